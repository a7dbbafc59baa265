import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regfm import linalg
from regfm.forward import ArrayGeometry, ConfigError, RadialShape, born_farfield_matrix
from regfm.operators import sharp
from regfm.rfm import (
    FilterKind,
    FilterSpec,
    GelfandModel,
    Grid,
    imaging_field,
    imaging_value,
    imaging_values,
    jaccard,
    level_set,
    probe_vector,
    quadratic_form,
    regularized_solution,
)

from conftest import random_complex

TIK, LW, CUT = FilterKind.TIKHONOV, FilterKind.LANDWEBER, FilterKind.CUTOFF


def _psd(rng, n):
    b = random_complex(rng, n)
    return b @ b.conj().T / n


def _spectrum(values, vectors):
    return linalg.SpectralData(np.asarray(values, dtype=float), np.asarray(vectors, dtype=complex))


def test_filter_examples():
    from regfm.rfm import filter_value

    assert filter_value(FilterSpec(TIK, 1.0), 1.0, 1.0) == pytest.approx(0.5)
    assert filter_value(FilterSpec(CUT, 0.25), 0.5, 1.0) == 1.0
    assert filter_value(FilterSpec(CUT, 0.25), 0.49, 1.0) == 0.0
    assert filter_value(FilterSpec(LW, 1.0, beta=0.5), 1.0, 1.0) == pytest.approx(0.5)


def test_filter_landweber_step_error():
    from regfm.rfm import filter_value

    with pytest.raises(ConfigError):
        filter_value(FilterSpec(LW, 0.1, beta=2.0), 1.0, 1.0)


def test_filter_spec_validation():
    with pytest.raises(ConfigError):
        FilterSpec(TIK, 0.0)
    with pytest.raises(ValueError):
        FilterSpec("gauss", 1e-3)
    assert FilterSpec(LW, 0.3).iterations == 3
    assert FilterSpec(LW, 5.0).iterations == 1


@settings(max_examples=50, deadline=None)
@given(kind=st.sampled_from(list(FilterKind)), alpha=st.floats(1e-10, 10.0), sigma1=st.floats(1e-3, 1e3))
def test_filter_bounds_property(kind, alpha, sigma1):
    from regfm.rfm import filter_value

    t = np.linspace(sigma1 / 1000, sigma1, 1000)
    phi = np.asarray(filter_value(FilterSpec(kind, alpha), t, sigma1))
    assert np.all((phi >= 0) & (phi <= 1))


def test_regularized_solution_identity():
    model = GelfandModel.from_operator(np.eye(4))
    ell = np.array([1, 2j, -1, 0.5])
    np.testing.assert_allclose(regularized_solution(model, ell, FilterSpec(TIK, 1e-12)), ell, atol=1e-10)


def test_regularized_solution_cutoff_kills_small_mode():
    model = GelfandModel(np.diag([1.0, 1e-9]), _spectrum([1.0, 1e-9], np.eye(2)))
    x = regularized_solution(model, np.array([0.0, 1.0]), FilterSpec(CUT, 0.5))
    np.testing.assert_allclose(x, 0.0)


def test_regularized_solution_tikhonov_closed_form(rng):
    a = _psd(rng, 8)
    ell = random_complex(rng, 8, 1)[:, 0]
    alpha = 1e-3
    x = regularized_solution(GelfandModel.from_operator(a), ell, FilterSpec(TIK, alpha))
    ref = np.linalg.solve(a @ a + alpha * np.eye(8), a @ ell)
    np.testing.assert_allclose(x, ref, atol=1e-8 * np.linalg.norm(ref))


def test_regularized_solution_empty_spectrum():
    model = GelfandModel(np.zeros((0, 0)), _spectrum([], np.zeros((0, 0))))
    with pytest.raises(ValueError):
        regularized_solution(model, np.zeros(0), FilterSpec())


def test_quadratic_form_examples():
    model = GelfandModel(np.eye(1), _spectrum([1.0], [[1.0]]))
    assert quadratic_form(model, np.array([1.0]), FilterSpec(TIK, 1.0)) == pytest.approx(0.25)
    model2 = GelfandModel(np.diag([1.0, 0.0]), _spectrum([1.0], [[1.0], [0.0]]))
    assert quadratic_form(model2, np.array([0.0, 1.0]), FilterSpec(TIK, 1.0)) == 0.0


@pytest.mark.parametrize("kind", list(FilterKind))
def test_quadratic_form_identity(rng, kind):
    for _ in range(10):
        a = _psd(rng, 10)
        model = GelfandModel.from_operator(a)
        ell = random_complex(rng, 10, 1)[:, 0]
        spec = FilterSpec(kind, 1e-2)
        x = regularized_solution(model, ell, spec)
        lhs = quadratic_form(model, ell, spec)
        rhs = np.vdot(x, a @ x).real
        assert lhs == pytest.approx(rhs, rel=1e-10)


def test_probe_vector():
    geom = ArrayGeometry()
    np.testing.assert_array_equal(probe_vector((0, 0), geom, 4.0).entries, np.ones(64))
    z, w = np.array([0.3, -0.2]), np.array([0.1, 0.4])
    p = probe_vector(z, geom, 4.0).entries
    assert np.allclose(np.abs(p), 1.0, atol=1e-15)
    shifted = probe_vector(z + w, geom, 4.0).entries
    np.testing.assert_allclose(shifted, p * np.exp(-4j * geom.directions @ w), atol=1e-14)


def test_imaging_value_examples():
    spec1 = _spectrum([1.0], [[1.0], [0.0]])
    assert imaging_value(spec1, np.array([1.0, 0.0]), FilterSpec(TIK, 1.0)) == pytest.approx(4.0)
    spec2 = _spectrum([1.0, 1e-6], np.eye(2))
    assert imaging_value(spec2, np.array([0.0, 1.0]), FilterSpec(CUT, 1e-4)) == np.inf


@pytest.mark.parametrize("kind", [TIK, CUT])
@pytest.mark.parametrize("c", [0.1, 10.0])
def test_imaging_value_scaling(rng, kind, c):
    a = _psd(rng, 12)
    s = linalg.svd(a, right=False)
    scaled = linalg.SpectralData(abs(c) * s.values, s.left_vectors)
    ell = random_complex(rng, 12, 1)[:, 0]
    w1 = imaging_value(s, ell, FilterSpec(kind, 1e-2))
    w2 = imaging_value(scaled, ell, FilterSpec(kind, 1e-2 * c**2))
    assert w2 == pytest.approx(abs(c) * w1, rel=1e-12)


def test_imaging_field_zero_data():
    f = imaging_field(np.zeros((64, 64)), Grid(-1, 1, -1, 1, 4, 5), FilterSpec(), 4.0, ArrayGeometry())
    assert f.values.shape == (5, 4)
    assert np.all(np.isinf(f.values))


def test_imaging_field_permutation_invariance(rng):
    geom = ArrayGeometry()
    fs = sharp(born_farfield_matrix(RadialShape("star")))
    pts = rng.uniform(-1, 1, size=(50, 2))
    s = linalg.svd(fs, right=False)
    w = imaging_values(s, pts, FilterSpec(), 4.0, geom)

    perm = rng.permutation(64)
    s_p = linalg.svd(fs[np.ix_(perm, perm)], right=False)
    from regfm.rfm import _reciprocal, _series, probe_matrix

    w_p = _reciprocal(_series(s_p, probe_matrix(pts, geom, 4.0)[perm], FilterSpec()))
    np.testing.assert_allclose(w_p, w, rtol=1e-10)


def test_level_set_and_jaccard():
    v = np.array([[0.0, 1.0], [2.0, np.inf]])
    np.testing.assert_array_equal(level_set(v), [[False, True], [True, True]])
    a = np.array([1, 1, 0, 0], bool)
    b = np.array([1, 0, 1, 0], bool)
    assert jaccard(a, b) == pytest.approx(1 / 3)
    assert jaccard(np.zeros(3, bool), np.zeros(3, bool)) == 1.0


def test_grid_validation():
    with pytest.raises(ConfigError):
        Grid(nx=0)
    g = Grid(0, 1, 0, 2, 3, 5)
    assert g.points().shape == (5, 3, 2)
    np.testing.assert_allclose(g.points()[4, 2], [1, 2])


@pytest.mark.parametrize("kind", [TIK, CUT])
def test_imaging_field_scaling_recomputed(kind):
    # recomputing the decomposition of c * F sharp perturbs the small-sigma
    # vectors at rounding level, so the identity only holds to ~1e-10 here
    geom = ArrayGeometry()
    fs = sharp(born_farfield_matrix(RadialShape("star")))
    grid = Grid(-1, 1, -1, 1, 24, 24)
    base = imaging_field(fs, grid, FilterSpec(kind, 1e-6), 4.0, geom).values
    for c in (0.1, 10.0):
        scaled = imaging_field(c * fs, grid, FilterSpec(kind, c**2 * 1e-6), 4.0, geom).values
        assert np.max(np.abs(scaled - c * base) / (c * base)) < 1e-9
