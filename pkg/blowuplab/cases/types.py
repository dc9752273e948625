from typing import Any, List, Literal, NamedTuple, Optional, Tuple, Union


class CaseLiteral(NamedTuple):
    value: Any
    type: str


class CaseGroup(NamedTuple):
    id: str
    description: str


class ExpectedResult(NamedTuple):
    value: Any
    type: str
    tolerance: Optional[float] = None
    relative: bool = False
    # Dotted attribute or index path into the returned value
    field: Optional[str] = None


class Case(NamedTuple):
    function: str
    # Module that defines the function
    base_uri: str
    group: CaseGroup
    args: List[CaseLiteral]
    result: Union[ExpectedResult, Literal["error"]]
    options: List[Tuple[str, Any]]


def case_to_signature(case: Case) -> str:
    joined = ", ".join(arg.type for arg in case.args)
    result = case.result if isinstance(case.result, str) else case.result.type
    return f"{case.function}({joined}) -> {result}"


class CaseFile(NamedTuple):
    function: str
    base_uri: str
    cases: List[Case]


class ProtoCase(NamedTuple):
    group: str
    args: List[CaseLiteral]
    result: Union[ExpectedResult, Literal["error"]]
    options: List[Tuple[str, Any]]
