import pytest

from vvalla.errors import PreconditionError
from vvalla.experiments.estimates import UPPER_LABEL, ar_estimate, power_ideal, powers_scan, sample_seeds
from vvalla.local_model import declare_ideal


def test_seed_prefix_property():
    assert sample_seeds(5, 64)[:32] == sample_seeds(5, 32)


def test_regular_maximal_ideal_gives_unit_at_once(plane):
    m = declare_ideal(plane, ["x", "y"])
    for r in (1, 2):
        est = ar_estimate(m, r, samples=10, window=8)
        assert est.ideal.is_unit() and est.verdict.kind == "unit"
        assert est.stabilization_index == 1


def test_estimate_trace_descends_and_is_m_primary(d0):
    est = ar_estimate(d0, 1, samples=12, window=8)
    assert est.descending
    for a, b in zip(est.trace_ideals, est.trace_ideals[1:]):
        assert a.contains_ideal(b)
    assert est.verdict.kind == "m-primary" and est.verdict.N is not None
    assert est.to_dict()["label"] == UPPER_LABEL


def test_more_samples_give_smaller_estimate(d1):
    small = ar_estimate(d1, 2, samples=6, seed=3, window=2)
    large = ar_estimate(d1, 2, samples=12, seed=3, window=2)
    assert small.ideal.contains_ideal(large.ideal)
    assert small.trace == large.trace[:6]


def test_unstabilized_trace_has_no_index(d0):
    est = ar_estimate(d0, 1, samples=3, window=8)
    assert est.stabilization_index is None and not est.stable
    d = est.to_dict()
    assert d["status"] == "unstabilized"
    assert "ideal" not in d and "verdict" not in d and "trace" not in d


def test_powers_scan_flags_unstabilized_rows(cusp):
    I = declare_ideal(cusp, ["x^3", "y^2"])
    scan = powers_scan(I, 1, l_max=2, samples=3, window=8)
    assert scan.failed == [1, 2]


def test_powers_scan_needs_two_powers(d0):
    with pytest.raises(PreconditionError):
        powers_scan(d0, 1, l_max=1)


def test_power_ideal_is_fresh(d0):
    I2 = power_ideal(d0, 2)
    assert I2 is not d0 and I2.handle == d0.power(2)
    assert I2.colength == d0.power(2).colength()


def test_powers_scan_isolates_row_failures(cusp, monkeypatch):
    from vvalla.errors import UnstabilizedError
    from vvalla.experiments import estimates

    I = declare_ideal(cusp, ["x^3", "y^2"])
    real = estimates.ar_estimate

    def flaky(Il, r, *a, **kw):
        if Il.colength > 2 * I.colength:
            raise UnstabilizedError("window exhausted", 99)
        return real(Il, r, *a, **kw)
    monkeypatch.setattr(estimates, "ar_estimate", flaky)
    scan = powers_scan(I, 1, l_max=3, samples=4, window=2)
    assert scan.failed == [2, 3] or scan.failed == [3]
    assert not scan.rows[0].error
    d = scan.to_dict()
    assert "error" in d["rows"][-1] and "running_intersection" not in d["rows"][-1]
