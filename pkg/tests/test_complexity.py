"""VC bounds, weights and truncated weight sums."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from rhosel import complexity as cx


def log2(x):
    return math.log(x, 2)


# --- hand substitutions ------------------------------------------------------------


@pytest.mark.parametrize("s, r, expected", [((2,), 1, 9.0), ((0, 0), 0, 2.0), ((0,), 0, 2.0)])
def test_vc_dyadic(s, r, expected):
    assert cx.vc_dyadic(s, r) == expected


def test_vc_additive_example():
    expected = 2 + 3 * log2(4 * math.e * 3 * log2(2 * math.e * 3))
    assert cx.vc_additive([1], 1, 0) == pytest.approx(expected, abs=1e-6)
    assert cx.vc_additive([1], 1, 0) == pytest.approx(23.11, abs=0.01)


def test_vc_additive_bracket_two_axes():
    # t(r+1) + 2 * (1 + 1) * (r+1) = 5 with U = 3
    assert cx.vc_additive([1, 1], 1, 0) == pytest.approx(2 + 5 * log2(12 * math.e * log2(6 * math.e)), abs=1e-6)


def test_vc_multi_examples():
    assert cx.vc_multi((1,), 0, 1, 1) == pytest.approx(2 + 3 * log2(12 * math.e * log2(6 * math.e)), abs=1e-6)
    assert cx.vc_multi((1,), 0, 1, 1) == pytest.approx(23.11, abs=0.01)
    # bracket 2*2*3 + 4*2^2 = 28 and U = 4 + 2 + 2 + 1 = 9
    assert cx.vc_multi((2, 2), 1, 2, 3) == pytest.approx(2 + 28 * log2(36 * math.e * log2(18 * math.e)), abs=1e-6)


def test_vc_neural_examples():
    assert cx.vc_neural(1, 2, 7) == pytest.approx(16 * log2(2 * (8 * math.e) ** 2), abs=1e-6)
    assert cx.vc_neural(1, 2, 7) == pytest.approx(158.17, abs=0.01)
    assert cx.vc_neural(1, 2, 0) > 0


@pytest.mark.parametrize("L, p, d, expected", [(1, 2, 1, 7), (3, 2, 1, 19), (1, 1, 1, 4)])
def test_param_count(L, p, d, expected):
    assert cx.param_count(L, p, d) == expected


def test_weight_examples():
    assert cx.weight_dyadic((0,), 0) == pytest.approx(math.log(8), abs=1e-12)
    assert cx.weight_relu_sparse(1, 2, 7, 1) == pytest.approx(7 * math.log(2 * math.e) + 3, abs=1e-12)
    assert cx.weight_relu_sparse(1, 2, 7, 1) == pytest.approx(14.852, abs=1e-3)
    assert cx.weight_varsel({1, 2, 3}, 50) == pytest.approx(2 * math.log(4), abs=1e-12)
    assert cx.weight_varsel({2, 5}, 50) == pytest.approx(2 * math.log(50 * math.e), abs=1e-12)
    assert cx.weight_varsel({2, 5}, 50) == pytest.approx(9.82404, abs=1e-5)
    assert cx.weight_varsel(set(), 50) == 0.0


def test_weight_dispatch_matches_direct_calls():
    assert cx.weight("dyadic-poly", s=(1, 2), r=1) == cx.weight_dyadic((1, 2), 1)
    assert cx.weight("holder-poly", n_cells=6, r=0, d=2) == cx.weight_partition(6, 0, 2)
    assert cx.weight("additive", pi_sizes=[2, 4], t=1, r=0) == cx.weight_additive([2, 4], 1, 0)
    assert cx.weight("multi-index", t=(2, 1), r=1) == 4.0
    assert cx.weight("relu", L=2, p=3) == 5.0
    assert cx.weight("relu-sparse", L=1, p=2, s0=0, d=1) == 3.0
    assert cx.weight("linear-varsel", support=[1], p=4) == pytest.approx(2 * math.log(2))
    with pytest.raises(ValueError):
        cx.weight("spline", s=1)


def test_argument_validation():
    with pytest.raises(ValueError):
        cx.vc_dyadic((-1,), 0)
    with pytest.raises(ValueError):
        cx.vc_additive([], 1, 0)
    with pytest.raises(ValueError):
        cx.vc_neural(0, 1, 1)
    with pytest.raises(ValueError):
        cx.weight_varsel({0}, 5)
    with pytest.raises(ValueError):
        cx.weight_relu_sparse(1, 1, 99, 1)
    with pytest.raises(ValueError):
        cx.ComplexityRecord((0,), 0.5, 0.0, "relu")


# --- monotonicity ------------------------------------------------------------------


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 5), st.integers(0, 4), st.integers(1, 3))
def test_dyadic_monotone(s, r, d):
    base = cx.vc_dyadic((s,) * d, r)
    assert cx.vc_dyadic((s + 1,) + (s,) * (d - 1), r) > base
    assert cx.vc_dyadic((s,) * d, r + 1) > base
    assert cx.weight_dyadic((s + 1,) + (s,) * (d - 1), r) > cx.weight_dyadic((s,) * d, r)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 5), st.integers(1, 6), st.integers(0, 20))
def test_neural_monotone(L, p, s0):
    assert cx.vc_neural(L, p, s0 + 1) > cx.vc_neural(L, p, s0)
    assert cx.vc_neural(L + 1, p, s0) > cx.vc_neural(L, p, s0)
    assert cx.vc_neural(L, p + 1, s0) > cx.vc_neural(L, p, s0)


# --- truncated weight sums ---------------------------------------------------------


@pytest.mark.parametrize("kind, kwargs, cutoffs", [
    ("dyadic-poly", {"d": 1}, range(0, 11)),
    ("dyadic-poly", {"d": 2}, range(0, 7)),
    ("additive", {"d": 1}, range(1, 7)),
    ("additive", {"d": 2}, range(1, 5)),
    ("multi-index", {"l": 1}, range(1, 10)),
    ("multi-index", {"l": 2}, range(1, 8)),
    ("relu", {}, range(1, 10)),
    ("relu-sparse", {"d": 1}, range(1, 7)),
    ("relu-sparse", {"d": 3}, range(1, 5)),
    ("linear-varsel", {"p": 10}, range(0, 11)),
    ("linear-varsel", {"p": 50}, range(0, 8)),
])
def test_sigma_partial_below_bound(kind, kwargs, cutoffs):
    prev = 0.0
    for c in cutoffs:
        val = cx.sigma_partial(kind, c, **kwargs)
        assert val <= cx.sigma_bound(kind)
        assert val >= prev
        prev = val


def test_sigma_partial_examples():
    assert cx.sigma_partial("dyadic-poly", 10, d=1) <= math.e / (math.e - 1)
    assert cx.sigma_partial("relu-sparse", 6, d=1) <= 2.0
    assert cx.sigma_partial("linear-varsel", 10, p=10) <= 1 + math.pi**2 / 6


def test_sigma_partial_varsel_matches_brute_force():
    p = 8
    brute = math.fsum(
        math.exp(-cx.weight_varsel(m, p))
        for k in range(p + 1)
        for m in itertools.combinations(range(1, p + 1), k)
    )
    assert cx.sigma_partial("linear-varsel", p, p=p) == pytest.approx(brute, rel=1e-12)


def test_sigma_partial_sparse_matches_mask_enumeration():
    # L=1, p=1, d=1 has 4 parameters: enumerate all 16 masks
    pbar = cx.param_count(1, 1, 1)
    brute = math.fsum(
        math.exp(-cx.weight_relu_sparse(1, 1, sum(bits), 1)) for bits in itertools.product((0, 1), repeat=pbar)
    )
    # cutoff 1 only holds (L, p) = (1, 1)
    assert cx.sigma_partial("relu-sparse", 1, d=1) == pytest.approx(brute, rel=1e-12)


def test_graded_order():
    idx = cx.graded_indices(2, [2, 2])
    assert idx[:4] == [(0, 0), (0, 1), (1, 0), (0, 2)]
    assert len(idx) == 9


# --- brute-force shattering oracle ------------------------------------------------------


def _separable(Phi, t, labels):
    """Is there ``beta`` with ``Phi beta > t`` on labels 1 and ``<= t`` on labels 0?

    Strictness is enforced with a unit margin after rescaling, which is
    exact for a linear space of functions.
    """
    sign = np.where(labels, -1.0, 1.0)
    A = sign[:, None] * Phi
    b = sign * t - np.where(labels, 1.0, 0.0)
    res = linprog(np.zeros(Phi.shape[1]), A_ub=A, b_ub=b, bounds=[(None, None)] * Phi.shape[1], method="highs")
    return res.status == 0


def _shatters(Phi, t):
    m = Phi.shape[0]
    return all(_separable(Phi, t, np.array(lab, dtype=bool)) for lab in itertools.product((0, 1), repeat=m))


def _largest_shattered(features, sampler, max_m, tries, rng):
    best = 0
    for m in range(1, max_m + 1):
        if any(_shatters(features(w), t) for w, t in (sampler(m, rng) for _ in range(tries))):
            best = m
        else:
            break
    return best


def _piecewise_features(s, r):
    N = 2**s

    def features(w):
        cell = np.clip(np.ceil(w * N) - 1, 0, N - 1).astype(int)
        out = np.zeros((w.size, N * (r + 1)))
        for j in range(r + 1):
            out[np.arange(w.size), cell * (r + 1) + j] = w**j
        return out

    return features


@pytest.mark.parametrize("s, r", [(0, 0), (1, 0), (0, 1), (1, 1)])
def test_dyadic_bound_dominates_shattering(s, r):
    rng = np.random.default_rng(s * 10 + r)

    def sampler(m, rng):
        return rng.uniform(size=m), rng.normal(size=m) * 1e-3

    found = _largest_shattered(_piecewise_features(s, r), sampler, max_m=(r + 1) * 2**s + 1, tries=40, rng=rng)
    assert found == (r + 1) * 2**s
    assert found <= cx.vc_dyadic((s,), r)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_linear_bound_dominates_shattering(k):
    rng = np.random.default_rng(k)

    def sampler(m, rng):
        return rng.normal(size=(m, k)), rng.normal(size=m)

    found = _largest_shattered(lambda w: w, sampler, max_m=k + 2, tries=40, rng=rng)
    assert k <= found <= cx.vc_linear(k)
