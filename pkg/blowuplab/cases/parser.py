import math

from blowuplab.core.yaml_parser import BaseYamlParser, BaseYamlVisitor

from .types import Case, CaseFile, CaseGroup, CaseLiteral, ExpectedResult, ProtoCase

# Keys a structured literal must carry before the runner can build it
STRUCTURED_KEYS = {
    "series": ("sample", "T", "n"),
    "grid": ("r_max", "n"),
    "params": (),
}


class CaseFileVisitor(BaseYamlVisitor[CaseFile]):
    def __init__(self):
        super().__init__()
        self.__groups = {}

    def __resolve_proto_case(self, case: ProtoCase, base_uri: str, function: str) -> Case:
        if case.group not in self.__groups:
            self._fail(f"A case referred to group {case.group} which was not defined in the file")
        return Case(function, base_uri, self.__groups[case.group], case.args, case.result, case.options)

    def visit_group(self, group):
        id = self._get_or_die(group, "id")
        description = self._get_or_die(group, "description")
        self.__groups[id] = CaseGroup(id, description)
        return id

    def __normalize_float(self, value):
        # YAML has no spelling for infinity or nan that survives every loader
        if not isinstance(value, str):
            return value
        lowered = value.lower()
        if lowered in ("inf", "+inf", "infinity"):
            return math.inf
        if lowered in ("-inf", "-infinity"):
            return -math.inf
        if lowered == "nan":
            return math.nan
        self._fail(f"Unrecognized float string literal {value}")

    def __normalize_yaml_literal(self, value, data_type):
        if data_type == "fp64":
            return self.__normalize_float(value)
        if data_type == "list<fp64>":
            if not isinstance(value, list):
                self._fail(f"Expected a list for list<fp64> but got {value}")
            return [self.__normalize_float(v) for v in value]
        if data_type in STRUCTURED_KEYS:
            if not isinstance(value, dict):
                self._fail(f"Expected a mapping for {data_type} but got {value}")
            missing = [key for key in STRUCTURED_KEYS[data_type] if key not in value]
            if missing:
                self._fail(f"A {data_type} literal is missing {', '.join(missing)}")
        return value

    def visit_literal(self, lit):
        value = self._get_or_die(lit, "value")
        data_type = self._get_or_die(lit, "type")
        return CaseLiteral(self.__normalize_yaml_literal(value, data_type), data_type)

    def visit_result(self, res):
        special = self._get_or_else(res, "special", None)
        if special is not None:
            if special != "error":
                self._fail(f"Unknown special result {special}")
            return special
        data_type = self._get_or_die(res, "type")
        value = self.__normalize_yaml_literal(self._get_or_die(res, "value"), data_type)
        return ExpectedResult(
            value,
            data_type,
            self._get_or_else(res, "tolerance", None),
            self._get_or_else(res, "relative", False),
            self._get_or_else(res, "field", None),
        )

    def visit_case(self, case):
        grp = self._get_or_die(case, "group")
        if not isinstance(grp, str):
            grp = self.visit_group(grp)
        result = self._visit_or_die(self.visit_result, case, "result")
        args = self._visit_list(self.visit_literal, case, "args")
        opts = self._get_or_else(case, "options", {})
        return ProtoCase(grp, args, result, [(key, opts[key]) for key in sorted(opts.keys())])

    def visit(self, case_file):
        base_uri = self._get_or_die(case_file, "base_uri")
        func_name = self._get_or_die(case_file, "function")
        proto_cases = self._visit_list(self.visit_case, case_file, "cases")
        cases = [self.__resolve_proto_case(c, base_uri, func_name) for c in proto_cases]
        return CaseFile(func_name, base_uri, cases)


class CaseFileParser(BaseYamlParser[CaseFile]):
    def get_visitor(self) -> CaseFileVisitor:
        return CaseFileVisitor()
