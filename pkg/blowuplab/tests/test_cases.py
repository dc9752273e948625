import pytest

from .base import case_id_fn, cases, run_test


@pytest.mark.parametrize("case", cases(), ids=case_id_fn)
def test_oracle_cases(case, runner):
    run_test(case, runner)


def test_index_lists_every_case_module(index):
    names = {m.name for m in index.modules}
    for case in cases():
        assert case.base_uri.split(".")[1] in names
