import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import trace_pauli
from qent import states
from qent.errors import BlochOutOfBall, NotHermitian, NotPSD, ParamOutOfRange, StateFormatError, TraceNotOne, ZeroVector
from qent.states import (
    BlochForm,
    bloch_decompose,
    mems,
    product_state,
    pure_state,
    purity,
    random_state,
    reconstruct,
    validate,
    werner,
)

FAMILY_POINTS = [(mems, x) for x in np.linspace(0, 1, 11)] + [(werner, x) for x in np.linspace(0, 1, 11)]


def test_validate_accepts_and_rejects():
    validate(np.eye(4) / 4)
    validate(mems(0.3).matrix)
    with pytest.raises(NotPSD, match="minimum eigenvalue"):
        validate(np.diag([0.5, 0.6, 0.0, -0.1]))
    with pytest.raises(TraceNotOne, match="trace"):
        validate(np.eye(4) / 2)
    bad = np.eye(4, dtype=complex) / 4
    bad[0, 1] = 0.1
    with pytest.raises(NotHermitian, match="Hermiticity"):
        validate(bad)


def test_validate_symmetrises():
    m = np.eye(4, dtype=complex) / 4
    m[0, 1] = 1e-10j
    rho = validate(m)
    assert np.array_equal(rho.matrix, rho.matrix.conj().T)


def test_mems_matrix():
    assert np.array_equal(mems(0.0).matrix, np.diag([0, 1, 0, 0]).astype(complex))
    m1 = mems(1.0).matrix
    assert m1[0, 0] == 0.5 and m1[0, 3] == -0.5 and m1[3, 0] == -0.5 and m1[3, 3] == 0.5
    assert np.allclose(np.diag(mems(0.5).matrix).real, [0.25, 0.5, 0, 0.25], atol=0)
    with pytest.raises(ParamOutOfRange):
        mems(1.2)


def test_werner_matrix():
    assert np.array_equal(werner(0.0).matrix, np.eye(4) / 4)
    m1 = werner(1.0).matrix
    assert m1[0, 3] == 0.5 and m1[1, 1] == 0
    m = werner(0.5).matrix
    assert np.allclose(np.diag(m).real, [0.375, 0.125, 0.125, 0.375], atol=0)
    assert m[0, 3] == 0.25 and m[3, 0] == 0.25
    with pytest.raises(ParamOutOfRange):
        werner(-0.1)


@pytest.mark.parametrize("p", np.linspace(0, 1, 11))
def test_mems_correlation_matrix(p):
    b = bloch_decompose(mems(p))
    assert np.allclose(b.c, np.diag([-p, p, 2 * p - 1]), atol=1e-15)


@pytest.mark.parametrize("ctor,x", FAMILY_POINTS)
def test_bloch_entrywise_against_trace_formula(ctor, x):
    rho = ctor(x).matrix
    b = bloch_decompose(rho)
    for i in range(3):
        assert abs(b.r[i] - trace_pauli(rho, i + 1, 0)) <= 1e-15
        assert abs(b.s[i] - trace_pauli(rho, 0, i + 1)) <= 1e-15
        for j in range(3):
            assert abs(b.c[i, j] - trace_pauli(rho, i + 1, j + 1)) <= 1e-15


def test_werner_one_correlations():
    # direct evaluation of the trace formula on |Phi+><Phi+|
    assert np.allclose(bloch_decompose(werner(1.0)).c, np.diag([1, -1, 1]), atol=1e-15)


def test_maximally_mixed_bloch():
    b = bloch_decompose(np.eye(4) / 4)
    assert not b.r.any() and not b.s.any() and not b.c.any()


def test_reconstruct_examples():
    rho = reconstruct(BlochForm(np.zeros(3), np.zeros(3), np.zeros((3, 3))))
    assert np.allclose(rho.matrix, np.eye(4) / 4, atol=0)
    rho = reconstruct(BlochForm(np.array([0, 0, 1.0]), np.array([0, 0, 1.0]), np.diag([0, 0, 1.0])))
    assert np.allclose(rho.matrix, np.diag([1.0, 0, 0, 0]), atol=0)
    assert np.max(np.abs(reconstruct(bloch_decompose(mems(0.7))).matrix - mems(0.7).matrix)) <= 1e-12
    with pytest.raises(NotPSD):
        reconstruct(BlochForm(np.zeros(3), np.zeros(3), np.diag([1.0, 1.0, 1.0])))


@pytest.mark.parametrize("ctor,x", FAMILY_POINTS)
def test_round_trip_families(ctor, x):
    rho = ctor(x)
    assert np.max(np.abs(reconstruct(bloch_decompose(rho)).matrix - rho.matrix)) <= 1e-12


def test_round_trip_and_purity_random():
    mats = states.random_states(3, 4, 0, 1000)
    for k in range(0, 1000):
        rho = states.DensityMatrix(mats[k])
        b = bloch_decompose(rho)
        assert np.max(np.abs(reconstruct(b).matrix - rho.matrix)) <= 1e-12
        via_bloch = 0.25 * (1 + b.r @ b.r + b.s @ b.s + np.sum(b.c**2))
        assert abs(purity(rho) - via_bloch) <= 1e-12
        assert np.linalg.norm(b.r) <= 1 + 1e-9 and np.linalg.norm(b.s) <= 1 + 1e-9
        assert np.linalg.eigvalsh(b.c.T @ b.c).max() <= 1 + 1e-9


def test_purity_examples():
    assert purity(np.eye(4) / 4) == pytest.approx(0.25, abs=1e-15)
    assert purity(pure_state([0.3, 1j, -0.2, 0.5])) == pytest.approx(1.0, abs=1e-12)
    assert purity(mems(0.5)) == pytest.approx(0.5, abs=1e-15)


def test_pure_state():
    assert np.allclose(pure_state([1, 0, 0, 0]).matrix, np.diag([1.0, 0, 0, 0]), atol=0)
    assert np.allclose(pure_state(np.array([1, 0, 0, -1]) / np.sqrt(2)).matrix, mems(1.0).matrix, atol=1e-15)
    b = bloch_decompose(pure_state([0.5, 0.5, 0.5, 0.5]))
    assert np.allclose(b.r, [1, 0, 0], atol=1e-15) and np.allclose(b.s, [1, 0, 0], atol=1e-15)
    with pytest.raises(ZeroVector):
        pure_state([0, 0, 0, 0])


def test_product_state_examples():
    assert np.allclose(product_state([0, 0, 1], [0, 0, 1]).matrix, np.diag([1.0, 0, 0, 0]), atol=0)
    assert np.allclose(product_state([0, 0, 0], [0, 0, 0]).matrix, np.eye(4) / 4, atol=0)
    with pytest.raises(BlochOutOfBall):
        product_state([0, 0, 1.1], [0, 0, 0])


ball = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).map(np.array).filter(
    lambda v: np.linalg.norm(v) <= 1)


@settings(max_examples=200)
@given(ball, ball)
def test_product_state_correlation_is_outer_product(a, b):
    f = bloch_decompose(product_state(a, b))
    assert np.max(np.abs(f.c - np.outer(f.r, f.s))) <= 1e-12
    assert abs(np.sum(f.c**2) - (f.r @ f.r) * (f.s @ f.s)) <= 1e-12


def test_random_state_determinism_and_rank():
    assert np.array_equal(random_state(5, 3).matrix, random_state(5, 3).matrix)
    assert not np.array_equal(random_state(5, 3).matrix, random_state(6, 3).matrix)
    assert purity(random_state(9, 1)) == pytest.approx(1.0, abs=1e-12)
    # chunked generation agrees with one-by-one generation
    block = states.random_states(5, 4, 10, 5)
    for i in range(5):
        assert np.array_equal(block[i], random_state(5, 4, index=10 + i).matrix)


def test_random_states_validate():
    for rank in (1, 2, 3, 4):
        for m in states.random_states(0, rank, 0, 50):
            validate(m)


def test_random_mean_purity():
    # independent sampler (plain numpy, seed 20261015, 10^4 draws): mean 0.47021, 3 sigma of mean 0.0020;
    # closed form for the Hilbert-Schmidt measure: 8/17 = 0.470588
    p = states.purity_batch(states.random_states(7, 4, 0, 10_000))
    assert 0.3 <= p.mean() <= 0.5
    assert abs(p.mean() - 0.47021) <= 0.0020


def test_json_round_trip(tmp_path):
    rho = random_state(1, 4)
    path = tmp_path / "s.json"
    states.save_state(rho, path)
    back = states.load_state(path)
    assert np.array_equal(back.matrix, rho.matrix)


@pytest.mark.parametrize("payload,field", [
    ({"re": np.eye(4).tolist()}, "im"),
    ({"re": [[1]], "im": np.zeros((4, 4)).tolist()}, "re"),
    ({"re": np.eye(4).tolist(), "im": [[0, 0], [0, 0]]}, "im"),
    ({"re": "x", "im": np.zeros((4, 4)).tolist()}, "re"),
])
def test_json_rejects_bad_shapes(tmp_path, payload, field):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(StateFormatError, match=f"'{field}'"):
        states.load_state(path)


def test_json_rejects_non_object(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("[1, 2]")
    with pytest.raises(StateFormatError):
        states.load_state(path)
