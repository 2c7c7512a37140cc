import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import near_orthogonal_pair, random_psd, random_spectraplex
from projfeas.cone import BlockVec, center, congruence, identity, inner, logdet, pd_sqrt_factors
from projfeas.potential import (
    InvalidBounds,
    basic_budget,
    calibrate,
    log_potential,
    scaling_budget,
)
from projfeas.projective import apply_Fy

LN43 = math.log(4.0 / 3.0)


def test_calibrate_n2():
    cal = calibrate(2, -10.0)
    assert cal.epsilon == pytest.approx(0.143841036, abs=1e-9)
    assert cal.log_U_plus == pytest.approx(-2 * math.log(2.0))


def test_calibrate_n1():
    cal = calibrate(1, -1.0)
    assert cal.epsilon == pytest.approx(0.287682072, abs=1e-9)
    assert cal.log_U_plus == 0.0


@pytest.mark.parametrize("n", [1, 2, 7, 30])
def test_calibration_constants(n):
    cal = calibrate(n, -1e3)
    assert cal.kappa == 0.25
    assert cal.kappa == cal.eta / (2 * (1 + cal.eta))
    assert cal.growth == 1.5
    assert cal.theta == 1.0
    assert (1 + cal.epsilon) ** (-n) >= 0.75 - 1e-12


def test_calibrate_rejects_bad_bounds():
    with pytest.raises(InvalidBounds):
        calibrate(2, -2 * math.log(2.0))
    with pytest.raises(InvalidBounds):
        calibrate(3, 0.0)


def test_log_potential_examples():
    assert log_potential(center([1, 1])) == pytest.approx(math.log(0.25))
    assert log_potential(identity([2, 3])) == 0.0
    x = BlockVec([1, 1], [0.05, 0.95])
    assert log_potential(x) == pytest.approx(math.log(0.0475), abs=1e-14)


def test_scaling_budget_examples():
    cal = calibrate(2, -2 * math.log(2.0) - math.log(1.5))
    assert scaling_budget(cal) == 1
    cal = calibrate(2, 2 * math.log(1e-3))
    assert scaling_budget(cal) == 31
    cal = calibrate(3, -3 * math.log(3.0) - math.log(1.0001))
    assert scaling_budget(cal) == 1


@pytest.mark.parametrize("n, expected", [(1, 13), (2, 49), (6, 435)])
def test_basic_budget(n, expected):
    # ceil(n^2 / ln(4/3)^2): 12.08 -> 13, 48.33 -> 49, 434.99 -> 435
    assert basic_budget(calibrate(n, -1e3)) == expected


def test_progress_worked_instance():
    x = BlockVec([1, 1], [0.05, 0.95])
    y = BlockVec([1, 1], [1.0, 0.0])
    eps = calibrate(2, -10.0).epsilon
    assert inner(y, x) <= eps
    after = math.exp(log_potential(apply_Fy(y, x)))
    assert after == pytest.approx(0.086168, abs=1e-6)
    assert after >= 1.5 * 0.0475


@given(st.lists(st.integers(1, 4), min_size=1, max_size=4), st.integers(0, 2**32 - 1))
@settings(max_examples=100)
def test_progress_inequality(sizes, seed):
    rng = np.random.default_rng(seed)
    eps = calibrate(sum(sizes), -1e3).epsilon
    pair = near_orthogonal_pair(rng, sizes, eps)
    if pair is None:
        return
    y, x = pair
    assert inner(y, x) <= eps + 1e-15
    assert log_potential(apply_Fy(y, x)) >= log_potential(x) + math.log(1.5) - 1e-10


@given(st.lists(st.integers(1, 5), min_size=1, max_size=4), st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_determinant_bound(sizes, seed, rank):
    y = random_spectraplex(np.random.default_rng(seed), sizes, rank)
    assert logdet(identity(sizes) + y) >= math.log(2.0) - 1e-12


@given(st.integers(1, 60), st.floats(0.0, 1.0))
def test_epsilon_calibration(n, frac):
    eps = calibrate(n, -1e4).epsilon
    assert -n * math.log1p(frac * eps) >= math.log(0.75) - 1e-12


@given(st.lists(st.integers(1, 4), min_size=1, max_size=3), st.integers(0, 2**32 - 1))
def test_potential_multiplicative_under_congruence(sizes, seed):
    rng = np.random.default_rng(seed)
    a = random_psd(rng, sizes) + identity(sizes) * 0.1
    b = random_psd(rng, sizes) + identity(sizes) * 0.1
    lhs = logdet(congruence(pd_sqrt_factors(a).sqrt, b))
    assert lhs == pytest.approx(logdet(a) + logdet(b), abs=1e-9)
