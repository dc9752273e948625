import importlib
import json
import logging
from pathlib import Path
from typing import Dict, List

from blowuplab.cases.loader import load_cases
from blowuplab.cases.types import Case, ExpectedResult
from blowuplab.core.index_parser import load_index

from .render import render
from .types import CatalogueIndexInfo, ExampleCaseInfo, ExampleGroupInfo, IndexItem, OperationInfo

logger = logging.getLogger(__name__)


def _show(value) -> str:
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        return ", ".join(f"{k}={v}" for k, v in value.items())
    return str(value)


def _qualifier(result: ExpectedResult) -> str:
    parts = []
    if result.field is not None:
        parts.append(f"field {result.field}")
    if result.tolerance is not None:
        parts.append(f"{'rtol' if result.relative else 'atol'} {result.tolerance:g}")
    return ", ".join(parts)


def create_example(case: Case) -> ExampleCaseInfo:
    args = [_show(arg.value) for arg in case.args]
    options = [f"{name}={_show(value)}" for name, value in case.options]
    if case.result == "error":
        return ExampleCaseInfo(args, options, "error", "")
    return ExampleCaseInfo(args, options, _show(case.result.value), _qualifier(case.result))


def create_example_groups(cases: List[Case]) -> List[ExampleGroupInfo]:
    groups: Dict[str, Case] = {}
    for case in cases:
        # One prototypical case per group, preferring one with a typed result
        if case.group.id not in groups or isinstance(case.result, ExpectedResult):
            groups[case.group.id] = case
    infos = []
    for group_id in sorted(groups):
        proto = groups[group_id]
        result_type = proto.result if proto.result == "error" else proto.result.type
        members = [c for c in cases if c.group.id == group_id]
        infos.append(
            ExampleGroupInfo(
                group_id,
                proto.group.description,
                [arg.type for arg in proto.args],
                result_type,
                [create_example(c) for c in members],
            )
        )
    return infos


def brief_of(module: str, function: str) -> str:
    fn = getattr(importlib.import_module(module), function, None)
    doc = (fn.__doc__ or "").strip() if fn is not None else ""
    return doc.splitlines()[0] if doc else ""


def category_of(module: str) -> str:
    parts = module.split(".")
    return parts[1].title() if len(parts) > 1 else module


def build_catalogue(index_path, dest_dir) -> List[Path]:
    """Renders one page per oracle operation plus index.html; returns the written paths"""
    root = Path(index_path).parent
    index = load_index(str(index_path))
    cases: List[Case] = []
    for cases_dir in index.case_directories:
        cases.extend(load_cases((root / cases_dir).resolve()))

    operations: Dict[tuple, List[Case]] = {}
    for case in cases:
        operations.setdefault((case.base_uri, case.function), []).append(case)
    logger.info("Catalogue: %d operations, %d cases", len(operations), len(cases))

    dest = Path(dest_dir)
    dest.mkdir(parents=True, exist_ok=True)
    written = []
    items = []
    for (module, function), members in sorted(operations.items()):
        brief = brief_of(module, function)
        info = OperationInfo(function, module, brief, create_example_groups(members))
        out_path = dest / f"{module}.{function}.html"
        out_path.write_text(render("catalogue_operation.html.j2", **info._asdict()))
        written.append(out_path)
        items.append(IndexItem(function, module, brief, category_of(module), len(members)))

    modules = [(m.name, m.description) for m in index.modules]
    out_path = dest / "index.html"
    out_path.write_text(render("catalogue_index.html.j2", **CatalogueIndexInfo(modules, items)._asdict()))
    written.append(out_path)
    return written
