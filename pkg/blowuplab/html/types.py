from typing import List, NamedTuple


class ExampleCaseInfo(NamedTuple):
    # Argument values, formatted for display
    args: List[str]
    # Keyword options as name=value
    options: List[str]
    # Expected value, or "error"
    result: str
    # Tolerance and field selector of the expected value, empty when exact
    qualifier: str


class ExampleGroupInfo(NamedTuple):
    id: str
    description: str
    arg_types: List[str]
    result_type: str
    cases: List[ExampleCaseInfo]


# One catalogue page
class OperationInfo(NamedTuple):
    # Function name (e.g. bubble_w)
    name: str
    # Defining module (e.g. blowuplab.profiles.bubble)
    module: str
    # First docstring line of the function
    brief: str
    groups: List[ExampleGroupInfo]


class IndexItem(NamedTuple):
    name: str
    module: str
    brief: str
    # Library module the operation belongs to, e.g. Profiles
    category: str
    cases: int


class CatalogueIndexInfo(NamedTuple):
    modules: List[tuple]
    operations: List[IndexItem]
