import pytest

from cqes.reproduce import (
    BOLD_TOL,
    PLAIN_TOL,
    FIG_LEVEL_TARGETS,
    SCAN_TARGETS,
    expand_column,
    load_reference,
    reproduce,
)


@pytest.mark.parametrize("name", ["table5", "table6"])
def test_reference_data(name):
    ref = load_reference(name)
    assert ref["beta"] == -5
    assert ref["provenance"]
    cells = [c for col in ref["columns"] for c in col["cells"]]
    assert sum(1 for c in cells if c["bold"]) == 21
    for col in ref["columns"]:
        for value, cell in expand_column(col, ref["levels_per_column"]):
            assert value == pytest.approx(float(cell["text"].replace("−", "-")))


def test_table4_check():
    man = reproduce("table4-check")
    assert man.passed and len(man.records) == 96


@pytest.mark.parametrize("target", ["table5", "table6"])
def test_tables(target):
    man = reproduce(target)
    assert man.passed, [r for r in man.failures()][:3]
    for rec in man.records:
        assert rec.tolerance == (BOLD_TOL if "bold" in rec.provenance else PLAIN_TOL)


def test_table5_underlined_doublets():
    man = reproduce("table5")
    assert any("underline" in rec.provenance for rec in man.records)


@pytest.mark.parametrize("target", [*FIG_LEVEL_TARGETS, "fig7-data"])
def test_figure_levels(target):
    man = reproduce(target, grid=1024)
    assert man.passed, man.failures()[:3]
    assert man.files


@pytest.mark.slow
@pytest.mark.parametrize("target", list(SCAN_TARGETS))
def test_figure_scans(target):
    man = reproduce(target, steps=61)
    assert man.passed, man.failures()[:3]
    assert any(name.endswith(".csv") for name in man.files)


def test_unknown_target():
    with pytest.raises(ValueError):
        reproduce("table9")
