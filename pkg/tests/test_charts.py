import pytest

from painleve4d import charts, invariants
from painleve4d.errors import ValidationError


@pytest.mark.parametrize("autonomous", [True, False])
def test_all_round_trips(autonomous):
    trips = invariants.chart_round_trips(autonomous=autonomous)
    assert len(trips) == 32
    bad = [k for k, (fwd, back) in trips.items() if not (fwd and back)]
    assert not bad


@pytest.mark.parametrize("case", ["a2a2", "a5"])
def test_inclusion_structure(case):
    ok, msg = charts.check_inclusion_structure(case)
    assert ok, msg


def test_chains_cover_all_centres():
    assert sorted(i for c in charts.CHAINS for i in c) == list(range(1, 17))


@pytest.mark.parametrize("case", ["a2a2", "a5"])
def test_forward_and_base_are_inverse(case):
    for ch in charts.charts(case):
        assert len(ch.forward_local) == 4
        assert ch.index in range(1, 17)


def test_u4_to_u8_display():
    r = invariants.u4_to_u8_check()
    assert r.matches
    assert r.exceptional_vanishes
    assert r.image_rank == 3
    assert r.ok


def test_shift_row_rejects_non_step_rows():
    with pytest.raises(ValidationError):
        charts.shift_row(charts.CHART_DATA["a5"][3], "1")
