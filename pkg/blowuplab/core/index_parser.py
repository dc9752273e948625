from typing import List, NamedTuple

from .yaml_parser import BaseYamlParser, BaseYamlVisitor


class IndexModule(NamedTuple):
    name: str
    description: str


class IndexFile(NamedTuple):
    modules: List[IndexModule]
    case_directories: List[str]


class IndexFileVisitor(BaseYamlVisitor[IndexFile]):
    def __init__(self):
        super().__init__()

    def visit_module(self, module):
        name = self._get_or_die(module, "name")
        description = self._get_or_else(module, "description", "")
        return IndexModule(name, description)

    def visit(self, index_file):
        modules = self._visit_list(self.visit_module, index_file, "modules")
        case_dirs = self._get_or_else(index_file, "cases", [])
        return IndexFile(modules, case_dirs)


class IndexFileParser(BaseYamlParser[IndexFile]):
    def get_visitor(self) -> IndexFileVisitor:
        return IndexFileVisitor()


def load_index(index_path: str) -> IndexFile:
    parser = IndexFileParser()
    with open(index_path, "rb") as f:
        return parser.parse(f)[0]
