"""Lattice nodes, truncated and full dual error sums, log-sine quality
functional, and the closed-form Fourier kernels."""

import itertools
import math

import numpy as np
import pytest

from cbcdbd.errors import EnumerationBudgetError, SmoothnessError
from cbcdbd.lattice import (
    GeneratingVector,
    bernoulli_kernel,
    dual_error_even_alpha,
    fourier_decay,
    lattice_points,
    log_sine_sum,
    qmc_integrate,
    truncated_dual_sum,
)
from cbcdbd.weights import GeneralWeights, PodWeights, ProductWeights, iter_subsets


def ones(s):
    return ProductWeights((1.0,) * s)


def random_vector(n, s, rng):
    N = 2**n
    z = tuple(int(2 * rng.integers(0, N // 2) + 1) for _ in range(s))
    return GeneratingVector(n, z)


# --------------------------------------------------------------------------
# vector invariants


def test_vector_validation():
    gv = GeneratingVector(3, (1, 5))
    assert gv.N == 8 and gv.s == 2
    with pytest.raises(ValueError):
        GeneratingVector(3, (2, 1))  # even component
    with pytest.raises(ValueError):
        GeneratingVector(3, (9, 1))  # outside 1..N-1
    with pytest.raises(ValueError):
        GeneratingVector(3, (-1, 1))
    with pytest.raises(ValueError):
        GeneratingVector(0, (1,))
    with pytest.raises(ValueError):
        GeneratingVector(31, (1,))  # beyond exact float range
    with pytest.raises(ValueError):
        GeneratingVector(2, (1, 3), digit_history=((1, 1), (1, 1)))  # 3 mod 4 != 1


def test_vector_prefix_truncates_history():
    gv = GeneratingVector(3, (1, 5, 3), digit_history=((1, 1, 1), (1, 1, 5), (1, 3, 3)))
    head = gv.prefix(2)
    assert head.z == (1, 5)
    assert head.digit_history == ((1, 1, 1), (1, 1, 5))


def test_lattice_points_are_exact_dyadic_fractions():
    rng = np.random.default_rng(101)
    for _ in range(5):
        n = int(rng.integers(1, 11))
        s = int(rng.integers(1, 5))
        gv = random_vector(n, s, rng)
        pts = lattice_points(gv)
        assert pts.shape == (gv.N, s)
        for _ in range(20):
            k = int(rng.integers(0, gv.N))
            j = int(rng.integers(0, s))
            assert pts[k, j] == (k * gv.z[j] % gv.N) / gv.N  # dyadic, no rounding


# --------------------------------------------------------------------------
# frequency decay and the truncated dual sum


def test_fourier_decay_values():
    w = ProductWeights((0.5, 0.25))
    assert fourier_decay(2.0, w, (0, 0)) == 1.0
    assert fourier_decay(2.0, w, (2, -3)) == pytest.approx(
        (4.0 * 9.0) / 0.125, rel=1e-15
    )
    with pytest.raises(ValueError):
        fourier_decay(0.5, w, (1, 0))


def brute_truncated_dual(alpha, scheme, gv):
    N = gv.N
    total = 0.0
    for m in itertools.product(range(-(N - 1), N), repeat=gv.s):
        if all(mj == 0 for mj in m):
            continue
        if sum(mj * zj for mj, zj in zip(m, gv.z)) % N == 0:
            total += 1.0 / fourier_decay(alpha, scheme, m)
    return total


def test_truncated_dual_frozen_values():
    gv = GeneratingVector(2, (1, 3))
    assert truncated_dual_sum(2.0, ones(2), gv) == pytest.approx(
        2.719135802469136, rel=1e-14
    )
    assert truncated_dual_sum(1.0, ones(2), gv) == pytest.approx(
        4.5555555555555545, rel=1e-14
    )


def test_truncated_dual_matches_bruteforce():
    rng = np.random.default_rng(102)
    for alpha in (1.0, 2.0):
        for _ in range(6):
            n = int(rng.integers(1, 4))
            s = int(rng.integers(1, 4))
            gv = random_vector(n, s, rng)
            scheme = ProductWeights(tuple(10.0 ** rng.uniform(-2, 0, s)))
            assert truncated_dual_sum(alpha, scheme, gv) == pytest.approx(
                brute_truncated_dual(alpha, scheme, gv), rel=1e-12
            )
    # POD and general schemes take the same code path through subset weights
    pod = PodWeights((1.0, 1.0, 0.5), (0.9, 0.4))
    gv = GeneratingVector(2, (1, 3))
    assert truncated_dual_sum(2.0, pod, gv) == pytest.approx(
        brute_truncated_dual(2.0, pod, gv), rel=1e-12
    )


def test_truncated_dual_single_dimension_has_no_box_terms():
    # in one dimension the box |m| <= N-1 contains no non-zero multiple of N
    for n in (1, 3, 6):
        gv = GeneratingVector(n, (1,))
        assert truncated_dual_sum(2.0, ones(1), gv) == 0.0


def test_truncated_dual_budget_guard():
    gv = GeneratingVector(10, (1, 3, 5, 7))
    with pytest.raises(EnumerationBudgetError):
        truncated_dual_sum(2.0, ones(4), gv)


# --------------------------------------------------------------------------
# log-sine quality functional


def brute_log_sine(scheme, gv):
    N = gv.N
    total = 0.0
    for k in range(1, N):
        for u in iter_subsets(range(1, gv.s + 1)):
            term = scheme.weight(u)
            for j in u:
                term *= math.log(1.0 / math.sin(math.pi * k * gv.z[j - 1] / N) ** 2)
            total += term
    return total


def test_log_sine_frozen_value():
    gv = GeneratingVector(2, (1, 3))
    scheme = ProductWeights((0.5, 1.0 / 3.0))
    assert log_sine_sum(scheme, gv) == pytest.approx(1.3153963055726423, rel=1e-13)


def test_log_sine_single_dim_closed_form():
    # with one coordinate at z = 1 the sum telescopes to log(4) * (N - n - 1)
    for n in range(1, 13):
        gv = GeneratingVector(n, (1,))
        expected = math.log(4.0) * (2**n - n - 1)
        assert log_sine_sum(ones(1), gv) == pytest.approx(expected, rel=1e-12)


def test_log_sine_factored_paths_match_enumeration():
    rng = np.random.default_rng(103)
    for _ in range(8):
        n = int(rng.integers(1, 9))
        s = int(rng.integers(1, 9))
        gv = random_vector(n, s, rng)
        gammas = tuple(10.0 ** rng.uniform(-2, 0, s))
        Gammas = (1.0,) + tuple(10.0 ** rng.uniform(-1, 1, s))
        product = ProductWeights(gammas)
        pod = PodWeights(Gammas, gammas)
        for scheme in (product, pod):
            table = {
                u: scheme.weight(u) for u in iter_subsets(range(1, s + 1))
            }
            general = GeneralWeights(s, table)
            assert log_sine_sum(scheme, gv) == pytest.approx(
                log_sine_sum(general, gv), rel=1e-10
            )


def test_log_sine_matches_bruteforce_small():
    rng = np.random.default_rng(104)
    for _ in range(4):
        n = int(rng.integers(1, 5))
        s = int(rng.integers(1, 4))
        gv = random_vector(n, s, rng)
        scheme = ProductWeights(tuple(10.0 ** rng.uniform(-2, 0, s)))
        assert log_sine_sum(scheme, gv) == pytest.approx(
            brute_log_sine(scheme, gv), rel=1e-11
        )


# --------------------------------------------------------------------------
# closed-form kernels and the full dual error


def test_bernoulli_kernel_values():
    x = np.array([0.0, 0.5])
    k2 = bernoulli_kernel(2, x)
    assert k2[0] == pytest.approx(math.pi**2 / 3.0, rel=1e-15)
    assert k2[1] == pytest.approx(-(math.pi**2) / 6.0, rel=1e-15)
    # reflection symmetry on a grid
    grid = np.linspace(0.0, 1.0, 33)
    for alpha in (2, 4, 6):
        vals = bernoulli_kernel(alpha, grid)
        assert np.allclose(vals, vals[::-1], rtol=1e-12, atol=1e-12)
    for bad in (1, 3, 5, 8):
        with pytest.raises(SmoothnessError):
            bernoulli_kernel(bad, x)


def test_kernel_sums_to_zero_over_full_period():
    # the non-zero-frequency kernel integrates to zero; the N-point lattice
    # average over one coordinate equals the tail sum over multiples of N
    for alpha in (2, 4, 6):
        N = 2**6
        x = np.arange(N) / N
        mean = float(np.mean(bernoulli_kernel(alpha, x)))
        zeta_alpha = {2: math.pi**2 / 6, 4: math.pi**4 / 90, 6: math.pi**6 / 945}[alpha]
        assert mean == pytest.approx(2.0 * zeta_alpha / N**alpha, rel=1e-10)


def test_dual_error_single_dim_closed_form():
    # s = 1, z = 1: the dual is exactly the multiples of N, so the error is
    # 2 * zeta(alpha) / N^alpha
    zetas = {2: math.pi**2 / 6, 4: math.pi**4 / 90, 6: math.pi**6 / 945}
    for alpha, zeta_alpha in zetas.items():
        for n in (1, 4, 8, 10):
            gv = GeneratingVector(n, (1,))
            expected = 2.0 * zeta_alpha / (2**n) ** alpha
            assert dual_error_even_alpha(alpha, ones(1), gv) == pytest.approx(
                expected, rel=1e-11
            )


def test_dual_error_frozen_value():
    gv = GeneratingVector(2, (1, 3))
    assert dual_error_even_alpha(2, ones(2), gv) == pytest.approx(
        3.8780501246930443, rel=1e-13
    )


def test_dual_error_paths_agree():
    rng = np.random.default_rng(105)
    for _ in range(5):
        n = int(rng.integers(1, 8))
        s = int(rng.integers(1, 6))
        gv = random_vector(n, s, rng)
        gammas = tuple(10.0 ** rng.uniform(-2, 0, s))
        scheme = ProductWeights(gammas)
        table = {u: scheme.weight(u) for u in iter_subsets(range(1, s + 1))}
        general = GeneralWeights(s, table)
        pod = PodWeights((1.0,) * (s + 1), gammas)
        a = dual_error_even_alpha(2, scheme, gv)
        assert dual_error_even_alpha(2, general, gv) == pytest.approx(a, rel=1e-11)
        assert dual_error_even_alpha(2, pod, gv) == pytest.approx(a, rel=1e-11)


def test_dual_error_dominates_truncated_sum():
    # the truncated frequency box is a subset of the dual lattice
    rng = np.random.default_rng(106)
    for _ in range(6):
        n = int(rng.integers(1, 6))
        s = int(rng.integers(1, 4))
        gv = random_vector(n, s, rng)
        scheme = ProductWeights(tuple(10.0 ** rng.uniform(-2, 0, s)))
        full = dual_error_even_alpha(2, scheme, gv)
        part = truncated_dual_sum(2.0, scheme, gv)
        assert full >= part - 1e-12 * max(1.0, abs(full))


# --------------------------------------------------------------------------
# cubature


def test_qmc_integrate_exactness_and_shape():
    gv = GeneratingVector(4, (1, 7))
    assert qmc_integrate(gv, lambda x: np.ones(len(x))) == pytest.approx(1.0)
    mean_first = qmc_integrate(gv, lambda x: x[:, 0])
    assert mean_first == pytest.approx((gv.N - 1) / (2 * gv.N), rel=1e-14)
    with pytest.raises(ValueError):
        qmc_integrate(gv, lambda x: x)  # wrong output shape


def test_qmc_reproduces_dual_error_identity():
    # averaging the product kernel over the nodes reproduces the dual error
    rng = np.random.default_rng(107)
    for _ in range(4):
        n = int(rng.integers(2, 8))
        s = int(rng.integers(1, 4))
        gv = random_vector(n, s, rng)
        gammas = tuple(10.0 ** rng.uniform(-2, 0, s))
        scheme = ProductWeights(gammas)

        def kernel_product(x):
            out = np.ones(len(x))
            for j in range(s):
                out *= 1.0 + gammas[j] * bernoulli_kernel(2, x[:, j])
            return out - 1.0

        lhs = qmc_integrate(gv, kernel_product)
        rhs = dual_error_even_alpha(2, scheme, gv)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-13)
