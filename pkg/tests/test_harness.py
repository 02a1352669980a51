import math

import numpy as np
import pytest

from qcatlab.arith import CyclicCharacter
from qcatlab.groups import CatMap, build_hecke_torus
from qcatlab.hecke import eigenfunction, hecke_spectrum, split_adapted_realization, split_closed_form, transport
from qcatlab.models import Realization
from qcatlab.harness import (
    SweepConfig,
    gating_failures,
    projector_identity_check,
    su2_abs_trace_cdf,
    su2_abs_trace_moment,
    su2_trace_density,
    supremum_check,
    supremum_records,
    universal_sweep,
    value_distribution,
    write_records_csv,
    write_records_json,
)

A = CatMap(2, 1, 1, 1)


def config(lo, hi, **kw):
    return SweepConfig(matrix=A, prime_lo=lo, prime_hi=hi, **kw)


def test_supremum_check_split_closed_form():
    torus = build_hecke_torus(A, 11)
    r = split_adapted_realization(torus)
    fn = split_closed_form(torus, CyclicCharacter(10, 3), r)
    rec = supremum_check(fn, "split")
    assert abs(rec.sup - math.sqrt(11 / 10)) < 1e-9  # ~1.0488
    assert rec.passed and rec.gating
    assert abs(rec.a_max - rec.sup ** 2) < 1e-12
    assert rec.multiplicity == 1 and rec.p == 11


def test_power_bound_recorded():
    torus = build_hecke_torus(A, 7)
    spectrum = hecke_spectrum(torus, Realization.standard(7))
    k = next(s.index for s in spectrum.spaces if s.multiplicity == 1)
    rec = supremum_check(eigenfunction(spectrum, k), "inert")
    assert abs(rec.power_bound - 7 ** 0.375) < 1e-12
    assert abs(rec.power_bound - 2.0745) < 1e-3


def test_supremum_check_enforces_normalization():
    torus = build_hecke_torus(A, 7)
    spectrum = hecke_spectrum(torus, Realization.standard(7))
    k = next(s.index for s in spectrum.spaces if s.multiplicity == 1)
    fn = eigenfunction(spectrum, k)
    fn.vectors = fn.vectors * 2.0
    with pytest.raises(ValueError):
        supremum_check(fn, "inert")


def test_sweep_p7_all_realizations_all_pass():
    result = universal_sweep(config(7, 7, realizations="all"))
    # 8 realizations x 7 multiplicity-one characters
    assert len(result.records) == 56
    assert all(r.passed for r in result.records)
    assert all(r.kind == "inert" for r in result.records)
    assert len({r.realization for r in result.records}) == 8
    assert not result.skips


def test_sweep_skips_ramified_with_log():
    result = universal_sweep(config(5, 7))
    assert any(p == 5 and "ramified" in reason for p, reason in result.skips)
    assert {r.p for r in result.records} == {7}


def test_sweep_p3_reported_but_not_gating():
    result = universal_sweep(config(3, 3))
    assert result.records
    assert all(r.p == 3 and not r.gating for r in result.records)


def test_sweep_degenerate_rows_not_gating():
    result = universal_sweep(config(11, 11))
    deg = [r for r in result.records if r.multiplicity > 1]
    assert len(deg) == 2  # two basis vectors of the one two-dimensional space
    assert all(not r.gating for r in deg)
    assert sum(1 for r in result.records if r.multiplicity == 1) == 9


def test_sweep_isolation_of_prime_failures(monkeypatch):
    import qcatlab.harness as harness

    original = harness._sweep_one_prime

    def flaky(entries, p, *rest):
        if p == 11:
            raise RuntimeError("injected")
        return original(entries, p, *rest)

    monkeypatch.setattr(harness, "_sweep_one_prime", flaky)
    result = universal_sweep(config(7, 13))
    assert any(p == 11 and "injected" in reason for p, reason in result.skips)
    assert {r.p for r in result.records} == {7, 13}


def test_sweep_transport_verification_runs():
    result = universal_sweep(config(7, 7, realizations="all", verify_samples=3))
    assert len(result.records) == 56


def test_sweep_parallel_matches_serial():
    serial = universal_sweep(config(7, 13))
    parallel = universal_sweep(config(7, 13, jobs=2))
    assert [r.csv_row() for r in serial.records] == [r.csv_row() for r in parallel.records]


def test_records_norm_equal_across_realizations():
    # transported eigenfunctions keep norm^2 = p: the record builder enforces
    # it, so a full multi-realization sweep doubles as the check
    result = universal_sweep(config(13, 13, realizations="all"))
    assert len({r.realization for r in result.records}) == 14
    by_char = {}
    for r in result.records:
        by_char.setdefault(r.character, set()).add(r.realization)
    for char, tags in by_char.items():
        assert len(tags) == 14


# ---------------------------------------------------------------------------
# projector identity


@pytest.mark.parametrize("p", [7, 11, 13])
def test_projector_identity_direct_vs_projector(p, rng):
    torus = build_hecke_torus(A, p)
    spectrum = hecke_spectrum(torus, Realization.standard(p))
    simple = [s.index for s in spectrum.spaces if s.multiplicity == 1]
    others = [Realization.of(1, 0, p), Realization.of(1, 2, p)]
    for _ in range(20):
        k = int(simple[rng.integers(len(simple))])
        fn = eigenfunction(spectrum, k)
        x = int(rng.integers(p))
        direct, proj = projector_identity_check(fn, x)
        assert abs(direct - proj) < 1e-8
        via = others[int(rng.integers(len(others)))]
        direct2, proj2 = projector_identity_check(fn, x, via=via)
        assert direct2 == direct
        assert abs(direct - proj2) < 1e-8  # model independence


def test_projector_identity_sums_to_p():
    p = 7
    torus = build_hecke_torus(A, p)
    spectrum = hecke_spectrum(torus, Realization.standard(p))
    k = next(s.index for s in spectrum.spaces if s.multiplicity == 1)
    fn = eigenfunction(spectrum, k)
    direct_sum = sum(projector_identity_check(fn, x)[0] for x in range(p))
    proj_sum = sum(projector_identity_check(fn, x, via=Realization.of(1, 0, p))[1]
                   for x in range(p))
    assert abs(direct_sum - p) < 1e-8
    assert abs(proj_sum - p) < 1e-8


def test_point_masses_bounded_on_passing_records():
    result = universal_sweep(config(7, 7, realizations="all"))
    for rec in result.records:
        assert rec.passed
        assert rec.a_max <= 4.0 + 5e-9


def test_observed_sup_envelopes():
    # the flat bound 2 holds at inert primes with room to spare
    # (sup <= 2*sqrt(p/(p+1)) < 2), while split primes stay under the
    # Salie-sum envelope 2*sqrt(p/(p-1)), which exceeds 2 by O(1/p)
    for p in (7, 13, 23):
        recs = [r for r in universal_sweep(config(p, p)).records if r.gating]
        bound = 2 * math.sqrt(p / (p + 1))
        assert all(r.sup <= bound + 1e-9 for r in recs)
    for p in (11, 19, 29):
        recs = [r for r in universal_sweep(config(p, p)).records if r.gating]
        bound = 2 * math.sqrt(p / (p - 1))
        assert all(r.sup <= bound + 1e-9 for r in recs)
        assert any(r.sup > 2.0 for r in recs)  # the flat bound genuinely fails


# ---------------------------------------------------------------------------
# value distribution


def test_su2_reference_cdf_shape():
    s = np.linspace(0, 2, 101)
    cdf = su2_abs_trace_cdf(s)
    assert abs(cdf[0]) < 1e-12 and abs(cdf[-1] - 1.0) < 1e-12
    assert np.all(np.diff(cdf) >= 0)
    assert abs(su2_abs_trace_cdf(np.array([-1.0, 3.0]))[0]) < 1e-12
    assert abs(su2_abs_trace_cdf(np.array([3.0]))[0] - 1.0) < 1e-12


def test_su2_reference_moments_match_closed_forms():
    # independent closed forms: E|t| = 8/(3 pi), E t^2 = 1, E|t|^3 = 64/(15 pi),
    # E t^4 = 2 (the second Catalan number)
    expected = [8 / (3 * math.pi), 1.0, 64 / (15 * math.pi), 2.0]
    for k, ref in zip((1, 2, 3, 4), expected):
        assert abs(su2_abs_trace_moment(k) - ref) < 1e-10


def test_su2_density_normalized():
    t = np.linspace(-2, 2, 20001)
    mass = np.trapezoid(su2_trace_density(t), t)
    assert abs(mass - 1.0) < 1e-6


def test_value_distribution_small_inert_range():
    report = value_distribution(config(7, 13))
    assert report.primes == [7, 13]
    assert any(p == 11 and "split" in reason for p, reason in report.skipped)
    assert 0.0 <= report.ks_distance <= 1.0
    # p points per eigenfunction, one eigenfunction per simple character:
    # both inert primes here have p simple characters out of p + 1
    assert report.sample_count == 7 * 7 + 13 * 13
    assert abs(report.second_moment - 1.0) < 1e-9  # forced by the normalization
    assert sum(report.bin_counts) == report.sample_count


def test_value_distribution_rejects_split_only_range():
    with pytest.raises(ValueError):
        value_distribution(config(11, 11))


# ---------------------------------------------------------------------------
# artifacts


def test_csv_schema_and_determinism(tmp_path):
    cfg = config(7, 13)
    paths = []
    for name in ("a.csv", "b.csv"):
        result = universal_sweep(cfg)
        path = tmp_path / name
        write_records_csv(path, result.records)
        paths.append(path)
    a, b = (p.read_bytes() for p in paths)
    assert a == b
    text = a.decode()
    lines = text.strip().split("\n")
    assert lines[0].startswith("# schema: qcatlab-sweep")
    assert lines[1] == "p,kind,realization,character,multiplicity,sup,argmax,a_max,pass"
    assert len(lines) == 2 + len(universal_sweep(cfg).records)


def test_json_records_mirror_csv(tmp_path):
    import json

    result = universal_sweep(config(7, 7))
    path = tmp_path / "records.jsonl"
    write_records_json(path, result.records)
    lines = path.read_text().strip().split("\n")
    assert json.loads(lines[0])["schema"].startswith("qcatlab-sweep")
    first = json.loads(lines[1])
    assert set(first) == {"p", "kind", "realization", "character", "multiplicity",
                          "sup", "argmax", "a_max", "pass"}


def test_gating_failures_filter():
    result = universal_sweep(config(7, 7))
    assert gating_failures(result.records) == []
    result11 = universal_sweep(config(11, 11))
    failing = gating_failures(result11.records)
    # the split prime 11 genuinely exceeds the flat bound at one character
    assert failing and all(r.sup > 2.0 for r in failing)


def test_config_validation():
    with pytest.raises(ValueError):
        config(13, 7)
    with pytest.raises(ValueError):
        config(5, 7, realizations="some")
    with pytest.raises(ValueError):
        SweepConfig(matrix=CatMap(1, 1, 0, 1), prime_lo=5, prime_hi=7)
