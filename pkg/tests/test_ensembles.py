import math

import numpy as np
import pytest

from edgelab.ensembles import (
    EnsembleSpec,
    draw_entries,
    exhaustive_sign_rect,
    exhaustive_sign_wigner,
    sample_rect,
    sample_wigner,
)


def test_spec_validation():
    with pytest.raises(ValueError):
        EnsembleSpec(1, ("wigner", 10), "unit_circle")   # complex law, beta 1
    with pytest.raises(ValueError):
        EnsembleSpec(2, ("wigner", 10), "sign")          # real law, beta 2
    with pytest.raises(ValueError):
        EnsembleSpec(1, ("rect", 5, 3), "sign")          # M > N
    with pytest.raises(ValueError):
        EnsembleSpec(3, ("wigner", 10), "gaussian")


def test_spec_json_roundtrip():
    spec = EnsembleSpec(2, ("rect", 3, 9), "unit_circle", seed=7, stream_id=4)
    assert EnsembleSpec.from_dict(spec.to_dict()) == spec
    spec = EnsembleSpec(1, ("wigner", 5), "sign", seed=1)
    assert EnsembleSpec.from_dict(spec.to_dict()) == spec


def test_wigner_sign_determinism_and_structure():
    spec = EnsembleSpec(1, ("wigner", 3), "sign", seed=123)
    a = sample_wigner(spec).entries
    b = sample_wigner(spec).entries
    assert np.array_equal(a, b)                      # bit-identical rerun
    assert np.array_equal(a, a.T)                    # exact symmetry
    assert np.all(np.diag(a) == 0.0)
    off = a[np.triu_indices(3, 1)]
    assert set(np.unique(off)) <= {-1.0, 1.0}
    c = sample_wigner(spec.with_stream(1)).entries
    assert not np.array_equal(a, c)                  # distinct stream


def test_wigner_hermitian_exact_complex():
    spec = EnsembleSpec(2, ("wigner", 6), "unit_circle", seed=5)
    A = sample_wigner(spec).entries
    assert np.array_equal(A, A.conj().T)
    assert np.all(np.abs(np.abs(A[np.triu_indices(6, 1)]) - 1.0) < 1e-15)
    assert np.all(A[np.diag_indices(6)] == 0.0)


def test_rect_samples():
    spec = EnsembleSpec(1, ("rect", 2, 3), "sign", seed=9)
    X = sample_rect(spec).entries
    assert X.shape == (2, 3)
    assert np.array_equal(X, sample_rect(spec).entries)
    spec_c = EnsembleSpec(2, ("rect", 2, 3), "unit_circle", seed=9)
    Xc = sample_rect(spec_c).entries
    assert np.allclose(np.abs(Xc), 1.0, atol=1e-15)


NDRAW = 1_000_000


@pytest.mark.parametrize("law,beta,second_moment", [
    ("sign", 1, 1.0),
    ("gaussian", 1, 1.0),
    ("rademacher_scale_mix", 1, 1.0),
])
def test_real_law_second_moments(law, beta, second_moment):
    rng = np.random.default_rng(42)
    r = draw_entries(law, beta, rng, NDRAW)
    mean = r.mean()
    m2 = (r * r).mean()
    se2 = (r * r).std() / math.sqrt(NDRAW)
    assert abs(mean) <= 4 * r.std() / math.sqrt(NDRAW) + 1e-12
    assert abs(m2 - second_moment) <= max(4 * se2, 1e-12)
    assert np.isfinite((r ** 4).mean())


def test_complex_law_second_moments():
    rng = np.random.default_rng(43)
    for law in ("unit_circle", "gaussian"):
        r = draw_entries(law, 2, rng, NDRAW)
        sq = r * r
        se = math.sqrt(sq.real.var() + sq.imag.var()) / math.sqrt(NDRAW)
        assert abs(sq.mean()) <= 4 * se + 1e-12    # E r^2 = 0
        m2 = (r * r.conj()).real
        se2 = m2.std() / math.sqrt(NDRAW)
        assert abs(m2.mean() - 1.0) <= 4 * se2 + 1e-12   # E |r|^2 = 1


def test_gaussian_diagonal_variance():
    spec = EnsembleSpec(1, ("wigner", 400), "gaussian", seed=77)
    diags = []
    for r in range(40):
        diags.append(np.diag(sample_wigner(spec.with_stream(r)).entries))
    d = np.concatenate(diags)
    se = (d * d).std() / math.sqrt(d.size)
    assert abs((d * d).mean() - 2.0) <= 4 * se


def test_mix_law_values_exact():
    rng = np.random.default_rng(3)
    r = draw_entries("rademacher_scale_mix", 1, rng, 10_000)
    c = math.sqrt(5.0 / 8.0)
    values = set(np.round(np.unique(np.abs(r)), 12))
    assert values <= {round(c, 12), round(2 * c, 12)}


def test_exhaustive_wigner_counts():
    fams = list(exhaustive_sign_wigner(3))
    assert len(fams) == 8
    assert len({a.entries.tobytes() for a in fams}) == 8
    fams4 = list(exhaustive_sign_wigner(4))
    assert len(fams4) == 64
    assert len({a.entries.tobytes() for a in fams4}) == 64
    with pytest.raises(ValueError):
        next(exhaustive_sign_wigner(6))


def test_exhaustive_rect_counts():
    assert len(list(exhaustive_sign_rect(2, 2))) == 16
    mats = list(exhaustive_sign_rect(2, 3))
    assert len(mats) == 64
    assert len({m.entries.tobytes() for m in mats}) == 64
    with pytest.raises(ValueError):
        next(exhaustive_sign_rect(4, 4))


def test_exhaustive_rect_q1_average():
    # B_uu = N identically for +-1 entries, so tr Q_1(B) = tr B - MN = 0
    total = 0.0
    for s in exhaustive_sign_rect(2, 3):
        B = s.entries @ s.entries.T
        total += np.trace(B) - 2 * 3
    assert total == 0.0
