import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semiflow import (
    InputSignal,
    KinfFunction,
    Nonlinearity,
    SpectralState,
    signal_sup_distance,
    stack_channels,
)


def test_state_arithmetic_and_norm():
    a = SpectralState(np.array([3.0, 4.0]))
    b = SpectralState(np.array([1.0, -1.0]))
    assert a.norm_X() == 5.0
    assert np.allclose((a + b).coeffs, [4.0, 3.0])
    assert np.allclose((a - b).coeffs, [2.0, 5.0])
    assert np.allclose(a.scale(2.0).coeffs, [6.0, 8.0])
    assert SpectralState.zero(3).norm_X() == 0.0
    e = SpectralState.basis(4, 2)
    assert e.coeffs[2] == 1.0 and e.norm_X() == 1.0


def test_state_rejects_nan():
    with pytest.raises(ValueError):
        SpectralState(np.array([1.0, np.nan]))
    # the blow-up flag is the only way to carry non-finite samples
    s = SpectralState(np.array([1.0, np.inf]), blown_up=True)
    assert s.blown_up


def test_signal_right_continuity():
    u = InputSignal(np.array([0.0, 1.0, 2.0]), np.array([[1.0], [5.0]]))
    assert u.value(0.0) == 1.0
    assert u.value(1.0) == 5.0          # right-continuous at the jump
    assert u.value_left(1.0) == 1.0     # left limit keeps the old cell
    assert u.value_left(2.0) == 5.0     # horizon end evaluates from the left
    assert u.m == 1 and u.horizon == 2.0


def test_signal_sup_norm_and_restrict():
    u = InputSignal(np.array([0.0, 1.0, 2.0]), np.array([[3.0, 4.0], [0.0, 1.0]]))
    assert u.sup_norm(0.0, 2.0) == 5.0
    assert u.sup_norm(1.0, 2.0) == 1.0
    r = u.restrict(1.0)
    assert r.horizon == 1.0 and r.value(0.5)[0] == 3.0


def test_signal_shift_concat_roundtrip():
    u = InputSignal(np.array([0.0, 0.5, 1.5]), np.array([[2.0], [-1.0]]))
    s = u.shift(0.5)
    assert s.value(0.0) == -1.0
    tail = InputSignal.constant(np.array([7.0]), 1.0)
    c = InputSignal.concat(u, tail, 1.0)
    assert c.value(0.5) == -1.0 and c.value(1.0) == 7.0
    assert c.horizon == 2.0


def test_signal_validation_errors():
    with pytest.raises(ValueError):
        InputSignal(np.array([0.0]), np.zeros((0, 1)))
    with pytest.raises(ValueError):
        InputSignal(np.array([0.0, 0.0]), np.array([[1.0]]))
    with pytest.raises(ValueError):
        InputSignal(np.array([0.0, 1.0]), np.array([[1.0], [2.0]]))


def test_stack_channels_merges_grids():
    u1 = InputSignal(np.array([0.0, 0.4, 1.0]), np.array([[1.0], [2.0]]))
    u2 = InputSignal(np.array([0.0, 0.7, 1.0]), np.array([[5.0], [6.0]]))
    j = stack_channels(u1, u2)
    assert j.m == 2
    assert np.allclose(j.value(0.0), [1.0, 5.0])
    assert np.allclose(j.value(0.5), [2.0, 5.0])
    assert np.allclose(j.value(0.8), [2.0, 6.0])


def test_signal_sup_distance_exact_on_merged_grid():
    u1 = InputSignal(np.array([0.0, 0.4, 1.0]), np.array([[1.0], [2.0]]))
    u2 = InputSignal(np.array([0.0, 0.7, 1.0]), np.array([[1.5], [0.0]]))
    # cells: [0,.4): |1-1.5| ; [.4,.7): |2-1.5| ; [.7,1): |2-0|
    assert signal_sup_distance(u1, u2, 1.0) == 2.0
    assert signal_sup_distance(u1, u2, 0.6) == 0.5


@given(
    vals=st.lists(st.floats(-10, 10), min_size=2, max_size=6),
    t=st.floats(0.01, 0.99),
)
def test_signal_sup_norm_dominates_samples(vals, t):
    grid = np.linspace(0.0, 1.0, len(vals) + 1)
    u = InputSignal(grid, np.array(vals)[:, None])
    sup = u.sup_norm(0.0, 1.0)
    assert abs(u.value(t)[0]) <= sup + 1e-12


def test_kinf_validate_accepts_identity_rejects_bounded():
    KinfFunction.identity().validate()
    bad = KinfFunction(lambda r: r / (1.0 + r), label="saturating")
    with pytest.raises(ValueError):
        bad.validate()
    dec = KinfFunction(lambda r: -r, label="negative")
    with pytest.raises(ValueError):
        dec.validate()


def test_kinf_power_scaling():
    f = KinfFunction.power(2.0, scale=3.0)
    assert f(2.0) == pytest.approx(12.0)
    assert f(0.0) == 0.0
    f.validate()


def test_nonlinearity_batch_matches_pointwise():
    f = Nonlinearity(
        eval=lambda x, v: np.tanh(x) + 0.0 * v.sum(),
        lipschitz=lambda r: 1.0,
        growth_sigma=KinfFunction.identity(),
        label="tanh",
    )
    X = np.array([[0.3, -0.2], [1.0, 2.0]])
    V = np.zeros((2, 1))
    got = f.batch(X, V)
    want = np.stack([f(X[0], V[0]), f(X[1], V[1])])
    assert np.allclose(got, want)


def test_nonlinearity_spot_check_lipschitz_flags_lies():
    honest = Nonlinearity(
        eval=lambda x, v: np.sin(x),
        lipschitz=lambda r: 1.0,
        growth_sigma=KinfFunction.identity(),
        label="sin",
    )
    worst = honest.spot_check_lipschitz(
        np.random.default_rng(0), radius=2.0, n_modes=4, m=1, n_samples=40
    )
    assert worst <= 1.0 + 1e-9
    liar = Nonlinearity(
        eval=lambda x, v: 10.0 * x,
        lipschitz=lambda r: 1.0,
        growth_sigma=KinfFunction.identity(),
        label="liar",
    )
    with pytest.raises(ValueError):
        liar.spot_check_lipschitz(
            np.random.default_rng(0), radius=2.0, n_modes=4, m=1, n_samples=40
        )
