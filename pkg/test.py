"""
Test Script
Verifies that all components are working correctly
"""

import json
import sys
import tempfile
import traceback
from pathlib import Path

import numpy as np

# Small optimizer settings keep the optimizer-backed tests quick
FAST = dict(restarts=4, max_iterations=150, seed=0)

LOG2_3 = float(np.log2(3))


def close(a, b, tol=1e-10):
    return np.max(np.abs(np.asarray(a) - np.asarray(b))) <= tol


def test_imports():
    """Test that all modules can be imported"""
    print("Testing imports...")

    import config
    print("✓ config")

    import linalg
    print("✓ linalg")

    import states
    print("✓ states")

    import optim
    print("✓ optim")

    import measures
    print("✓ measures")

    import verify
    print("✓ verify")

    import report
    print("✓ report")

    import main
    print("✓ main")

    print("\n✅ All imports successful!")


def test_config():
    """Test configuration tables"""
    print("\nTesting configuration...")
    import config

    assert config.validate_check_table(), "Check tolerance table is incomplete"
    if config.TOLERANCE_OVERRIDE is None:
        assert config.check_tolerance("three_tangle") == 1e-8
        try:
            config.check_tolerance("no_such_check")
            raise AssertionError("Unknown check id accepted")
        except ValueError:
            pass
    assert config.check_tolerance("three_tangle", 0.5) == 0.5
    print("✓ Check tolerances cover the registry")

    print("\n✅ Configuration tests passed!")


# ============================================================================
# LINEAR ALGEBRA
# ============================================================================

def test_tensor_and_partial_trace():
    """Test tensor products and partial traces"""
    print("\nTesting tensor / partial trace...")
    from linalg import partial_trace, tensor
    from states import bell, make_rng, random_mixed, remark1_state

    assert close(tensor(np.eye(2), np.eye(2)), np.eye(4))
    assert close(tensor(np.diag([1, 2]), np.diag([3, 4])), np.diag([3, 4, 6, 8]))
    x = np.array([[0, 1], [1, 0]])
    block = tensor(np.diag([1, 0]), x)
    assert close(block[:2, :2], x) and close(block[2:, :], 0) and close(block[:, 2:], 0)
    print("✓ Kronecker ordering")

    assert close(partial_trace(bell().density(), [2, 2], [0]), np.eye(2) / 2)
    rho_a = random_mixed([2], 2, 1).data
    sigma_b = random_mixed([3], 3, 2).data
    assert close(partial_trace(np.kron(rho_a, sigma_b), [2, 3], [0]), rho_a)
    state = remark1_state()
    assert close(state.marginal([0]), np.eye(2) / 2)
    print("✓ Bell, product and three-party reductions")

    rng = make_rng(5, 0)
    for _ in range(20):
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        assert close(partial_trace(np.kron(a, b), [3, 2], [0]), a * np.trace(b), 1e-10)
        h = np.kron(a + a.conj().T, b + b.conj().T)
        assert abs(np.trace(partial_trace(h, [3, 2], [1])) - np.trace(h)) <= 1e-10
    print("✓ tr_B(a x b) = a tr(b) and trace preservation")

    try:
        partial_trace(np.eye(4), [2, 3], [0])
        raise AssertionError("Dimension mismatch accepted")
    except ValueError:
        print("✓ Dimension mismatch rejected")

    print("\n✅ Tensor / partial trace tests passed!")


def test_partial_transpose():
    """Test the partial transpose"""
    print("\nTesting partial transpose...")
    from linalg import eigvals_hermitian, partial_transpose
    from states import bell, random_mixed, remark1_state

    assert abs(eigvals_hermitian(partial_transpose(bell().density(), [2, 2], 1))[0] + 0.5) <= 1e-12
    print("✓ Bell state has PT eigenvalue -1/2")

    rho = random_mixed([2, 3], 6, 4).data
    assert close(partial_transpose(partial_transpose(rho, [2, 3], 1), [2, 3], 1), rho)
    product = np.kron(random_mixed([2], 2, 1).data, random_mixed([2], 2, 2).data)
    assert eigvals_hermitian(partial_transpose(product, [2, 2], 1))[0] >= -1e-12
    print("✓ Involution and separable positivity")

    rho_ab = remark1_state().marginal([0, 1])
    assert eigvals_hermitian(partial_transpose(rho_ab, [2, 2], 1))[0] >= -1e-10
    print("✓ Rank-three example is PPT")

    print("\n✅ Partial transpose tests passed!")


def test_eig_hermitian():
    """Test the Hermitian eigensolver"""
    print("\nTesting eigensolver...")
    from linalg import eig_hermitian, eigvals_hermitian
    from states import make_rng, w

    vals, _ = eig_hermitian(np.diag([3.0, 1.0, 2.0]))
    assert close(vals, [1, 2, 3])
    vals, _ = eig_hermitian(np.array([[0, 1], [1, 0]]))
    assert close(vals, [-1, 1])
    vals, _ = eig_hermitian(w(3).marginal([0]))
    assert close(vals, [1 / 3, 2 / 3])
    print("✓ Known spectra")

    rng = make_rng(9, 0)
    for k in range(1000):
        d = 2 + k % 15
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = a + a.conj().T
        vals, vecs = eig_hermitian(h)
        assert close((vecs * vals) @ vecs.conj().T, h, 1e-9)
        assert np.all(np.diff(vals) >= 0)
    print("✓ Reconstruction on random Hermitian matrices")

    vals, _ = eig_hermitian(np.diag([-5e-13, 1.0]))
    assert vals[0] == 0.0
    print("✓ Tiny negative eigenvalues clipped")

    try:
        eig_hermitian(np.array([[0, 1], [0, 0]]))
        raise AssertionError("Non-Hermitian input accepted")
    except ValueError:
        pass
    try:
        eigvals_hermitian(np.array([[0, 1], [0, 0]]))
        raise AssertionError("Non-Hermitian input accepted by eigvals_hermitian")
    except ValueError:
        print("✓ Non-Hermitian input rejected")
    vals = eigvals_hermitian(np.diag([-5e-13, 2.0, 1.0]))
    assert vals[0] == 0.0 and close(vals, [0, 1, 2], 1e-12)

    print("\n✅ Eigensolver tests passed!")


def test_purify_and_sqrt():
    """Test purification and the PSD square root"""
    print("\nTesting purify / sqrt_psd...")
    from linalg import ket_to_dm, ptrace_ket, purify, sqrt_psd
    from states import haar_ket, make_rng, random_mixed, remark1_state

    v = haar_ket(3, make_rng(1, 0))
    psi, dims = purify(ket_to_dm(v), [3])
    assert dims == [3, 1] and abs(abs(np.vdot(v, psi)) - 1) <= 1e-10
    psi, dims = purify(np.eye(2) / 2, [2])
    assert dims == [2, 2]
    assert close(ptrace_ket(psi, dims, [0]), np.eye(2) / 2) and close(ptrace_ket(psi, dims, [1]), np.eye(2) / 2)
    print("✓ Rank-one and maximally mixed purifications")

    rho_ab = remark1_state().marginal([0, 1])
    psi, dims = purify(rho_ab, [2, 2])
    assert dims == [2, 2, 3] and close(ptrace_ket(psi, dims, [0, 1]), rho_ab, 1e-10)
    for seed in range(10):
        rho = random_mixed([3, 4], 1 + seed, seed).data
        psi, dims = purify(rho, [3, 4])
        assert close(ptrace_ket(psi, dims, [0, 1]), rho, 1e-9)
    print("✓ Round trips")

    try:
        purify(np.eye(2), [2])
        raise AssertionError("Unnormalized input accepted")
    except ValueError:
        print("✓ Bad trace rejected")

    assert close(sqrt_psd(np.eye(3)), np.eye(3))
    assert close(sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    m = np.array([[0.5, 0.2], [0.2, 0.5]])
    assert close(sqrt_psd(m) @ sqrt_psd(m), m, 1e-12)
    print("✓ PSD square roots")

    print("\n✅ Purify / sqrt_psd tests passed!")


# ============================================================================
# STATES
# ============================================================================

def test_named_states():
    """Test the builtin constructions"""
    print("\nTesting named states...")
    from measures import entropy
    from states import bell, get_builtin_state, ghz, remark1_state, w

    assert close(ghz(3).marginal([0]), np.eye(2) / 2)
    assert abs(entropy(ghz(3).marginal([0])) - 1) <= 1e-12
    assert close(w(3).marginal([0]), np.diag([2 / 3, 1 / 3]))
    assert close(ghz(2).data, bell().data)
    print("✓ GHZ, W and Bell")

    for bad in (lambda: ghz(1), lambda: w(1)):
        try:
            bad()
            raise AssertionError("n < 2 accepted")
        except ValueError:
            pass
    print("✓ n < 2 rejected")

    psi = remark1_state().data.reshape(2, 2, 3)
    x, y = psi[:, 0, :].reshape(-1), psi[:, 1, :].reshape(-1)
    assert abs(np.vdot(x, y)) <= 1e-15
    assert abs(entropy(remark1_state().marginal([0])) - 1) <= 1e-12
    print("✓ Rank-three example: orthogonal branches, S(A) = 1")

    assert get_builtin_state("max_mixed(3)").dims == [3, 3]
    assert get_builtin_state("remark1").dims == [2, 2, 3]
    for d in (1, 5, 7):
        state = get_builtin_state(f"max_mixed({d})")
        assert state.dims == [d, d] and close(state.data, np.eye(d * d) / (d * d))
    assert get_builtin_state("max_mixed6").dims == [6, 6]
    assert get_builtin_state("ghz(5)").dims == [2] * 5 and get_builtin_state("w6").dims == [2] * 6
    for bad in ("nope", "max_mixed(0)", "max_mixed(x)", "max_mixed(", "ghz(1)"):
        try:
            get_builtin_state(bad)
            raise AssertionError(f"Bad builtin accepted: {bad}")
        except ValueError:
            pass
    print("✓ Builtin registry and families of any size")

    print("\n✅ Named state tests passed!")


def test_fourier_and_paulis():
    """Test the Fourier basis and generalized Paulis"""
    print("\nTesting Fourier basis / Paulis...")
    from states import fourier_basis, pauli_x, pauli_z, random_unitary

    assert close(fourier_basis(2), np.array([[1, 1], [1, -1]]) / np.sqrt(2), 1e-12)
    for d in (3, 4):
        basis = random_unitary(d, d)
        f = fourier_basis(d, basis)
        assert close(f.conj().T @ f, np.eye(d), 1e-12)
        assert close(np.abs(basis.conj().T @ f) ** 2, 1 / d, 1e-12)
    print("✓ Orthonormal and mutually unbiased")

    assert close(pauli_z(2), np.diag([1, -1]), 1e-12)
    assert close(pauli_x(2), np.array([[0, 1], [1, 0]]), 1e-12)
    omega = np.exp(2j * np.pi / 3)
    z, x = pauli_z(3), pauli_x(3)
    assert close(z @ x, omega * x @ z, 1e-12)
    assert close(z @ z.conj().T, np.eye(3)) and close(x @ x.conj().T, np.eye(3))
    f = fourier_basis(3)
    assert close(f.conj().T @ x @ f, np.diag(omega ** -np.arange(3)), 1e-12)
    print("✓ Weyl relation ZX = w XZ and X diagonal in the Fourier basis")

    print("\n✅ Fourier basis / Pauli tests passed!")


def test_channels():
    """Test the dephasing channels"""
    print("\nTesting channels...")
    from linalg import eig_hermitian
    from states import channel_m0, channel_m1, dephase, fourier_basis, random_mixed

    for d in (2, 3, 4):
        rho_b = random_mixed([d], d, d).data
        _, basis = eig_hermitian(rho_b)
        assert close(channel_m0(rho_b, basis), rho_b, 1e-10)
        assert close(channel_m1(rho_b, basis), np.eye(d) / d, 1e-10)

        sigma = random_mixed([d], d, 10 + d).data
        assert close(channel_m0(sigma, basis), dephase(sigma, basis), 1e-10)
        assert close(channel_m1(sigma, basis), dephase(sigma, fourier_basis(d, basis)), 1e-10)
        assert close(channel_m1(channel_m0(sigma, basis), basis), np.eye(d) / d, 1e-10)
        assert close(channel_m0(channel_m1(sigma, basis), basis), np.eye(d) / d, 1e-10)
    print("✓ M0(rho_B) = rho_B, M1(rho_B) = I/d, projector forms, composition")

    print("\n✅ Channel tests passed!")


def test_omega_state():
    """Test the Omega state and its blockwise entropies"""
    print("\nTesting Omega state...")
    from linalg import partial_trace
    from measures import entropy, omega_informations
    from states import omega_state, random_mixed

    for d_b in (2, 3, 4):
        for seed in range(3):
            rho = random_mixed([2, d_b], 1 + seed * d_b, seed).data
            omega = omega_state(rho, [2, d_b])
            assert close(omega.marginal_ab(), np.kron(partial_trace(rho, [2, d_b], [0]), np.eye(d_b) / d_b), 1e-10)
            info = omega_informations(rho, [2, d_b])
            for key in ("I(X:AB)", "I(Y:AB)", "I(XY:AB)"):
                assert abs(info[key] - info[f"expected {key}"]) <= 1e-9, key
            assert info["chi0"] + info["chi1"] <= info["I(A:B)"] + 1e-9
    print("✓ Marginal and mutual-information identities for d_B in {2, 3, 4}")

    rho = random_mixed([2, 2], 3, 8).data
    omega = omega_state(rho, [2, 2])
    assert abs(entropy(omega.to_state().data) - omega.entropies()["XYAB"]) <= 1e-9
    print("✓ Blockwise entropy matches the dense state")

    print("\n✅ Omega state tests passed!")


def test_measurement():
    """Test measurements and induced ensembles"""
    print("\nTesting measurement...")
    from measures import concurrence_pure
    from states import (MultipartiteState, Povm, fourier_basis, ghz, marginal_eigenbasis,
                        measure_on_subsystem, random_mixed, random_povm, random_pure, mixed_basis_povm)

    rho_a = random_mixed([2], 2, 1).data
    product = MultipartiteState("mixed", np.kron(rho_a, random_mixed([3], 3, 2).data), [2, 3])
    ensemble = measure_on_subsystem(product, Povm.from_isometry(np.eye(3)), 1)
    assert all(close(m, rho_a, 1e-10) for m in ensemble.members())
    print("✓ Product states are unaffected")

    hadamard = fourier_basis(2).conj().T
    ensemble = measure_on_subsystem(ghz(3), Povm.from_isometry(hadamard), 1)
    assert ensemble.is_pure and close(ensemble.weights, [0.5, 0.5])
    assert all(abs(concurrence_pure(k, [2, 2], [0]) - 1) <= 1e-10 for k in ensemble.states)
    print("✓ X-basis measurement of GHZ leaves Bell states")

    state = random_pure([2, 3, 2], 4)
    povm = random_povm(3, 5, 4)
    ensemble = measure_on_subsystem(state.marginal_state([0, 1]), povm, 1)
    assert abs(ensemble.weights.sum() - 1) <= 1e-9
    assert close(ensemble.density(), state.marginal([0]), 1e-9)
    print("✓ Probabilities and average state")

    rho = random_mixed([2, 3], 4, 3).data
    mixed = mixed_basis_povm(marginal_eigenbasis(rho, [2, 3]))
    assert mixed.n == 6 and mixed.rank1
    print("✓ The 2d-outcome mixed measurement is a rank-1 POVM")

    print("\n✅ Measurement tests passed!")


def test_sampling():
    """Test random sampling"""
    print("\nTesting sampling...")
    from states import make_rng, random_mixed, random_povm, random_pure, random_separable
    from measures import purity

    assert np.array_equal(random_pure([2, 2, 2], 5).data, random_pure([2, 2, 2], 5).data)
    assert not np.array_equal(random_pure([2, 2, 2], 5).data, random_pure([2, 2, 2], 6).data)
    print("✓ Same seed gives identical samples")

    assert abs(purity(random_mixed([2, 2], 1, 3).data) - 1) <= 1e-10
    povm = random_povm(3, 7, 2)
    assert close(np.sum(povm.elements, axis=0), np.eye(3), 1e-10)
    sep = random_separable(2, 4)
    assert np.sum(np.linalg.eigvalsh(sep.data) > 1e-10) <= 2
    print("✓ Rank-one mixed, POVM completeness, separable rank")

    purities = [purity(random_pure([2, 2], s).marginal([0])) for s in range(4000)]
    # E[tr rho_A^2] = (d_A + d_B) / (d_A d_B + 1) for Haar states
    assert abs(np.mean(purities) - 0.8) <= 0.01, np.mean(purities)
    print(f"✓ Mean marginal purity {np.mean(purities):.4f}")

    try:
        make_rng(-1, 0)
        raise AssertionError("Negative seed accepted")
    except ValueError:
        pass

    print("\n✅ Sampling tests passed!")


def test_state_files():
    """Test the JSON state format"""
    print("\nTesting state files...")
    from states import load_state, remark1_state, save_state, state_from_dict, w

    state = w(3)
    assert close(state_from_dict(state.to_dict()).data, state.data, 0)
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "remark1.json"
        save_state(remark1_state(), path)
        loaded = load_state(path)
        assert loaded.dims == [2, 2, 3] and close(loaded.data, remark1_state().data, 0)
    print("✓ Save / load")

    for bad in ({"kind": "pure", "dims": [2], "data": [[1, 0]]},
                {"kind": "weird", "dims": [2], "data": [[1, 0], [0, 0]]},
                {"kind": "mixed", "dims": [2], "data": [[1, 0], [0, 0], [0, 0], [1, 0]]}):
        try:
            state_from_dict(bad)
            raise AssertionError(f"Malformed state accepted: {bad}")
        except ValueError:
            pass
    print("✓ Malformed states rejected")

    print("\n✅ State file tests passed!")


# ============================================================================
# OPTIMIZATION ENGINE
# ============================================================================

def test_optim_types():
    """Test the optimizer data types"""
    print("\nTesting optimizer types...")
    from measures import decomposition_ensemble
    from optim import IsometryParam, OptimConfig, optimize_decomposition
    from states import haar_isometry, make_rng, random_mixed

    IsometryParam(haar_isometry(4, 2, make_rng(1, 0)))
    for bad in (lambda: IsometryParam(np.ones((2, 2))), lambda: OptimConfig(restarts=-1),
                lambda: OptimConfig(step_tol=0)):
        try:
            bad()
            raise AssertionError("Invalid optimizer input accepted")
        except ValueError:
            pass
    print("✓ Validation")

    rho = random_mixed([2, 3], 3, 2).data
    rng = make_rng(2, 0)
    for n in (3, 5, 9):
        ensemble = decomposition_ensemble(rho, [2, 3], haar_isometry(n, 3, rng))
        assert close(ensemble.density(), rho, 1e-8)
    print("✓ Every isometry reconstructs the state")

    try:
        optimize_decomposition(np.eye(4) / 4, [2, 2], "min", lambda s2: s2[:, 0], OptimConfig(outcome_count=2))
        raise AssertionError("Outcome count below rank accepted")
    except ValueError:
        print("✓ n < r rejected")

    print("\n✅ Optimizer type tests passed!")


def test_optimize_decomposition():
    """Test decomposition search"""
    print("\nTesting decomposition search...")
    from linalg import spectral_entropy
    from measures import concurrence_2q, concurrence_roof
    from optim import OptimConfig, optimize_decomposition
    from states import bell, random_mixed, remark1_state

    score = lambda s2: spectral_entropy(s2, axis=1)
    result = optimize_decomposition(bell().density(), [2, 2], "min", score, OptimConfig(**FAST))
    assert abs(result.value - 1) <= 1e-9
    print("✓ Rank-one input has the score of its only member")

    rho_ac = remark1_state().marginal([0, 2])
    target = LOG2_3 - 2 / 3
    for objective in ("min", "max"):
        result = optimize_decomposition(rho_ac, [2, 3], objective, score, OptimConfig(**FAST))
        assert abs(result.value - target) <= 1e-4, (objective, result.value)
    print("✓ All decompositions of the rank-three example's AC state are equivalent")

    rho = random_mixed([2, 2], 2, 21).data
    roof = concurrence_roof(rho, [2, 2], OptimConfig(restarts=16, max_iterations=400, seed=0))
    assert abs(roof.value - concurrence_2q(rho)) <= 1e-3, (roof.value, concurrence_2q(rho))
    print("✓ Concurrence roof matches the closed form")

    print("\n✅ Decomposition search tests passed!")


def test_optimize_povm():
    """Test measurement search"""
    print("\nTesting measurement search...")
    from optim import OptimConfig, optimize_povm, povm_to_decomposition
    from states import Povm, ghz, haar_ket, make_rng, measure_on_subsystem, random_povm, random_pure
    from states import product_state, remark1_state
    from measures import entropy
    from linalg import ptrace_ket

    cfg = OptimConfig(**FAST)
    result = optimize_povm(ghz(3).data, [2, 2, 2], 1, "min", cfg)
    assert result.value <= 1e-9
    print("✓ GHZ: zero with the Fourier measurement")

    rng = make_rng(3, 0)
    psi = product_state(haar_ket(2, rng), haar_ket(4, rng)).data
    for objective in ("min", "max"):
        assert abs(optimize_povm(psi, [2, 2, 2], 1, objective, cfg).value) <= 1e-9
    print("✓ Product target gives zero")

    result = optimize_povm(remark1_state().data, [2, 2, 3], 1, "min", cfg)
    assert abs(result.value - (5 / 3 - LOG2_3)) <= 1e-4
    print("✓ Rank-three example: 5/3 - log2 3")

    state = random_pure([2, 2, 2], 12)
    first = optimize_povm(state.data, state.dims, 1, "min", cfg)
    second = optimize_povm(state.data, state.dims, 1, "min", cfg)
    assert first.value == second.value and np.array_equal(first.params[0], second.params[0])
    print("✓ Deterministic given the config")

    few = optimize_povm(state.data, state.dims, 1, "max", OptimConfig(restarts=2, max_iterations=100, escalate=False))
    many = optimize_povm(state.data, state.dims, 1, "max", OptimConfig(restarts=6, max_iterations=100, escalate=False))
    assert many.value >= few.value
    print("✓ More restarts never worsen the optimum")

    v = random_povm(2, 4, 7).to_isometry()
    u = povm_to_decomposition(state.data, state.dims, 1, v)
    assert close(u.conj().T @ u, np.eye(u.shape[1]), 1e-9)
    ensemble = measure_on_subsystem(state, Povm.from_isometry(v), 1)
    localized = float(np.dot(ensemble.weights, [entropy(ptrace_ket(k, [2, 2], [0])) for k in ensemble.states]))
    conditional = measure_on_subsystem(state.marginal_state([0, 1]), Povm.from_isometry(v), 1)
    average = float(np.dot(conditional.weights, [entropy(m) for m in conditional.states]))
    assert abs(localized - average) <= 1e-10
    print("✓ A measurement and its decomposition carry the same average entanglement")

    print("\n✅ Measurement search tests passed!")


# ============================================================================
# MEASURES
# ============================================================================

def test_entropies():
    """Test entropies and information quantities"""
    print("\nTesting entropies...")
    from measures import (binary_entropy, coherent_information, entropy, mutual_information, shannon)
    from states import bell, random_mixed

    assert abs(entropy(np.eye(2) / 2) - 1) <= 1e-12
    assert abs(entropy(bell().density())) <= 1e-12
    assert abs(binary_entropy(1 / 3) - (LOG2_3 - 2 / 3)) <= 1e-12
    assert abs(shannon([0.5, 0.5, 0.0]) - 1) <= 1e-12
    print("✓ Entropies")

    rho = bell().density()
    assert abs(mutual_information(rho, [2, 2]) - 2) <= 1e-10
    assert abs(coherent_information(rho, [2, 2]) - 1) <= 1e-10
    product = np.kron(random_mixed([2], 2, 1).data, random_mixed([2], 2, 2).data)
    assert abs(mutual_information(product, [2, 2])) <= 1e-10
    assert abs(coherent_information(np.eye(4) / 4, [2, 2]) + 1) <= 1e-10
    print("✓ Mutual and coherent information")

    try:
        binary_entropy(1.5)
        raise AssertionError("x > 1 accepted")
    except ValueError:
        pass

    print("\n✅ Entropy tests passed!")


def test_curly_e():
    """Test the concurrence-to-entanglement function"""
    print("\nTesting curly_e...")
    from measures import binary_entropy, curly_e

    assert abs(curly_e(1.0) - 1) <= 1e-12 and abs(curly_e(0.0)) <= 1e-12
    assert abs(curly_e(2 * np.sqrt(2) / 3) - binary_entropy(2 / 3)) <= 1e-12
    assert abs(curly_e(0.6) + curly_e(0.8) - 1.191) <= 2e-3
    grid = curly_e(np.linspace(0, 1, 1001))
    assert np.all(np.diff(grid) >= -1e-12)
    assert np.all(np.diff(grid, 2) >= -1e-9)
    print("✓ Values, monotonicity and convexity")

    try:
        curly_e(1.1)
        raise AssertionError("x > 1 accepted")
    except ValueError:
        print("✓ Out-of-range input rejected")

    print("\n✅ curly_e tests passed!")


def test_concurrences():
    """Test concurrences and the two-qubit closed forms"""
    print("\nTesting concurrences...")
    from measures import coa_2q, concurrence_2q, concurrence_pure, eof_2q
    from states import bell, ghz, product_state, random_mixed, random_pure, remark1_state, w

    assert concurrence_pure(product_state([1, 0], [0, 1]).data, [2, 2], [0]) <= 1e-12
    assert abs(concurrence_pure(remark1_state().data, [2, 2, 3], [0]) - 1) <= 1e-10
    assert abs(concurrence_pure(w(3).data, [2, 2, 2], [0]) - 2 * np.sqrt(2) / 3) <= 1e-10
    state = random_pure([2, 3], 2)
    rho_a = state.marginal([0])
    assert abs(concurrence_pure(state.data, [2, 3], [0]) - 2 * np.sqrt(np.linalg.det(rho_a).real)) <= 1e-10
    print("✓ Pure-state concurrence")

    assert abs(concurrence_2q(bell().density()) - 1) <= 1e-10 and abs(coa_2q(bell().density()) - 1) <= 1e-10
    rho = ghz(3).marginal([0, 1])
    # the X-basis measurement on C turns AB into a Bell state, so C^a = 1
    assert concurrence_2q(rho) <= 1e-10 and abs(coa_2q(rho) - 1) <= 1e-10
    assert abs(concurrence_2q(w(3).marginal([0, 1])) - 2 / 3) <= 1e-10
    assert abs(coa_2q(w(3).marginal([0, 2])) - 2 / 3) <= 1e-10
    print("✓ Bell, GHZ and W closed forms")

    for seed in range(1000):
        rho = random_mixed([2, 2], 1 + seed % 4, seed).data
        assert concurrence_2q(rho) <= coa_2q(rho) + 1e-10
    print("✓ C <= C^a on random states")

    assert eof_2q(np.kron(np.diag([1.0, 0]), np.eye(2) / 2)) <= 1e-12
    assert abs(eof_2q(bell().density()) - 1) <= 1e-10
    print("✓ Entanglement of formation")

    print("\n✅ Concurrence tests passed!")


def test_roof_measures():
    """Test the roof-type measures"""
    print("\nTesting roof measures...")
    from measures import coa_2q, curly_e, entropy, eoa_roof, eof_roof
    from optim import OptimConfig
    from states import random_mixed, random_pure, remark1_state

    cfg = OptimConfig(**FAST)
    state = random_pure([2, 3], 4)
    s_a = entropy(state.marginal([0]))
    assert abs(eof_roof(state.density(), [2, 3], cfg).value - s_a) <= 1e-9
    assert abs(eoa_roof(state.density(), [2, 3], cfg).value - s_a) <= 1e-9
    print("✓ Pure input: EoF = EoA = S(A)")

    rho_ac = remark1_state().marginal([0, 2])
    eoa = eoa_roof(rho_ac, [2, 3], cfg)
    eof = eof_roof(rho_ac, [2, 3], cfg)
    assert abs(eoa.value - (LOG2_3 - 2 / 3)) <= 1e-4 and abs(eof.value - (LOG2_3 - 2 / 3)) <= 1e-4
    assert eoa.bound_direction == "lower-estimate" and eof.bound_direction == "upper-estimate"
    assert close(eoa.certificate.density(), rho_ac, 1e-8)
    print("✓ Rank-three example: EoA = EoF = log2 3 - 2/3")

    cfg = OptimConfig(restarts=8, max_iterations=300, seed=0)
    for seed in range(3):
        rho = random_mixed([2, 2], 2, 30 + seed).data
        assert eoa_roof(rho, [2, 2], cfg).value >= curly_e(min(1.0, coa_2q(rho))) - 2e-3
    print("✓ EoA >= E(C^a) on rank-two states")

    print("\n✅ Roof measure tests passed!")


def test_unlocalizable_entanglement():
    """Test UE, Henderson-Vedral correlation and the entropy-defect bound"""
    print("\nTesting UE...")
    from measures import (coherent_information, henderson_vedral, mutual_information, thm1_povm_bound,
                          ue_direct, ue_via_purification)
    from optim import OptimConfig
    from states import bell, ghz, random_mixed, remark1_state

    cfg = OptimConfig(**FAST)
    product = np.kron(random_mixed([2], 2, 1).data, random_mixed([2], 2, 2).data)
    assert abs(henderson_vedral(product, [2, 2], cfg).value) <= 1e-9
    assert abs(henderson_vedral(bell().density(), [2, 2], cfg).value - 1) <= 1e-9
    assert abs(henderson_vedral(ghz(3).marginal([0, 1]), [2, 2], cfg).value - 1) <= 1e-9
    print("✓ Henderson-Vedral correlation")

    assert ue_direct(np.eye(4) / 4, [2, 2], cfg).value <= 1e-6
    assert ue_direct(ghz(3).marginal([0, 1]), [2, 2], cfg).value <= 1e-6
    bell_ue = ue_direct(bell().density(), [2, 2], cfg).value
    assert abs(bell_ue - 1) <= 1e-6
    assert abs(bell_ue - coherent_information(bell().density(), [2, 2])) <= 1e-6
    print("✓ Maximally mixed, GHZ and Bell values")

    rho_ab = remark1_state().marginal([0, 1])
    direct = ue_direct(rho_ab, [2, 2], cfg)
    purified = ue_via_purification(rho_ab, [2, 2], cfg)
    assert abs(direct.value - (5 / 3 - LOG2_3)) <= 1e-4
    assert abs(purified.value - (5 / 3 - LOG2_3)) <= 1e-4
    assert direct.bound_direction == "upper-estimate" and direct.certificate.rank1
    assert abs(ue_via_purification(ghz(3).marginal([0, 1]), [2, 2], cfg).value) <= 1e-6
    print("✓ Rank-three example by both routes")

    bound, povm = thm1_povm_bound(bell().density(), [2, 2])
    assert abs(bound - 1) <= 1e-10 and povm.n == 4
    sigma = np.kron(random_mixed([2], 2, 3).data, np.eye(3) / 3)
    assert abs(thm1_povm_bound(sigma, [2, 3])[0]) <= 1e-10
    for seed in range(20):
        rho = random_mixed([3, 3], 1 + seed % 9, seed).data
        bound, _ = thm1_povm_bound(rho, [3, 3])
        assert bound <= mutual_information(rho, [3, 3]) / 2 + 1e-9
        if seed < 3:
            assert ue_direct(rho, [3, 3], cfg).value <= bound + 1e-9
    print("✓ UE <= (chi0 + chi1)/2 <= I/2")

    print("\n✅ UE tests passed!")


def test_holevo_chi():
    """Test the entropy defect"""
    print("\nTesting Holevo chi...")
    from measures import holevo_chi, mutual_information
    from states import Ensemble, basis_ket, induced_ensembles, random_mixed, remark1_state

    rho = random_mixed([2], 2, 1).data
    assert abs(holevo_chi(Ensemble([0.3, 0.7], [rho, rho], [2]))) <= 1e-10
    assert abs(holevo_chi(Ensemble([0.5, 0.5], [basis_ket(0, 2), basis_ket(1, 2)], [2])) - 1) <= 1e-12
    rho_ab = remark1_state().marginal([0, 1])
    e0, e1 = induced_ensembles(rho_ab, [2, 2])
    assert holevo_chi(e0) + holevo_chi(e1) <= mutual_information(rho_ab, [2, 2]) + 1e-9
    print("✓ Identical members, orthogonal members, induced ensembles")

    print("\n✅ Holevo chi tests passed!")


def test_product_measures():
    """Test product-measurement UE and localizable entanglement"""
    print("\nTesting product measures...")
    from dataclasses import replace

    from linalg import partial_trace, ptrace_ket
    from measures import localizable_ea, ue_direct, ue_product, entropy
    from optim import OptimConfig
    from states import ghz, random_mixed, random_pure

    cfg = OptimConfig(**FAST)
    product = np.kron(random_mixed([2], 2, 1).data, random_mixed([2, 2], 4, 2).data)
    assert abs(ue_product(product, [2, 2, 2], cfg).value) <= 1e-9
    print("✓ Uncorrelated A gives zero")

    assert abs(localizable_ea(ghz(4).data, [2, 2, 2, 2], cfg).value - 1) <= 1e-9
    print("✓ GHZ(4): localizable entanglement 1")

    state = random_pure([2, 2, 2, 2], 5)
    rho_acd = ptrace_ket(state.data, state.dims, [0, 2, 3])
    tilde_u = ue_product(rho_acd, [2, 2, 2], cfg)
    tilde_a = localizable_ea(state.data, state.dims, cfg)
    assert abs(tilde_u.value - (entropy(state.marginal([0])) - tilde_a.value)) <= 1e-9
    print("✓ E~_u = S(A) - E~_a")

    for seed in range(5):
        rho_acd = random_mixed([2, 2, 2], 2, 40 + seed).data
        tilde_u = ue_product(rho_acd, [2, 2, 2], cfg)
        rho_ac = partial_trace(rho_acd, [2, 2, 2], [0, 1])
        seeded = replace(cfg, candidates=[tilde_u.optim.params[0]])
        assert ue_direct(rho_ac, [2, 2], seeded).value <= tilde_u.value + 1e-9
    print("✓ E~_u(A(CD)) >= E_u(AC) with the marginal measurement")

    print("\n✅ Product measure tests passed!")


# ============================================================================
# VERIFICATION HARNESS
# ============================================================================

def test_exact_checks():
    """Test the closed-form and algebraic checks"""
    print("\nTesting exact checks...")
    from optim import OptimConfig
    from states import ghz, random_mixed, random_povm, random_pure, w
    from verify import run_check

    cfg = OptimConfig(**FAST)
    for seed in range(10):
        result = run_check("kw_identity", random_pure([2, 2, 2], seed), cfg, povm=random_povm(2, 4, seed))
        assert result.passed and result.margin >= -1e-10
    print("✓ Per-measurement identity")

    result = run_check("three_tangle", w(3), cfg)
    assert result.passed and abs(result.lhs - 8 / 9) <= 1e-10 and abs(result.rhs - 8 / 9) <= 1e-10
    assert run_check("three_tangle", ghz(3), cfg).passed
    print("✓ Three-qubit concurrence identity on W and GHZ")

    for state in (w(3), ghz(3), random_pure([2, 2, 2], 3)):
        assert run_check("three_qubit_polygamy", state, cfg).passed
    for state in (w(4), ghz(4), random_pure([2, 2, 2, 2], 3)):
        assert run_check("coa_polygamy", state, cfg).passed
        assert run_check("nqubit_polygamy", state, cfg).passed
    print("✓ Closed-form polygamy checks")

    assert run_check("curly_e_property", None, cfg, grid=51).passed
    assert run_check("omega_identities", random_mixed([2, 3], 4, 6), cfg).passed
    print("✓ Grid and Omega identities")

    for bad in (lambda: run_check("no_such_check", w(3), cfg), lambda: run_check("three_tangle", w(4), cfg)):
        try:
            bad()
            raise AssertionError("Invalid check call accepted")
        except ValueError:
            pass
    print("✓ Unknown check and incompatible state rejected")

    print("\n✅ Exact check tests passed!")


def test_seeded_checks():
    """Test the checks that pass by construction of their seeded candidates"""
    print("\nTesting seeded checks...")
    from optim import OptimConfig
    from states import random_mixed, random_pure
    from verify import run_check

    cfg = OptimConfig(**FAST)
    for seed in range(3):
        rho, sigma = random_mixed([2, 2], 2, seed), random_mixed([2, 2], 2, seed, stream=5)
        assert run_check("subadd", rho, cfg, partner=sigma).passed
        assert run_check("upper_bound", random_mixed([2, 3], 6, seed), cfg).passed
        assert run_check("lower_bound", random_mixed([2, 2], 2, seed), cfg).passed
        state = random_pure([2, 2, 2, 2], seed)
        assert run_check("mixed_tradeoff", state, cfg).passed
        assert run_check("cor2_tradeoff", state, cfg).passed
    print("✓ Subadditivity, bounds and trade-offs")

    print("\n✅ Seeded check tests passed!")


def test_optimizer_checks():
    """Test the optimizer-dependent checks on a few states"""
    print("\nTesting optimizer-dependent checks...")
    import config
    from optim import OptimConfig
    from states import bell, derive_seed, random_mixed, random_pure, random_separable, w
    from verify import run_check

    cfg = OptimConfig(restarts=8, max_iterations=300, seed=0)
    assert run_check("lemma1_equiv", random_mixed([2, 2], 3, 2), cfg).passed
    assert run_check("rank2_bounds", random_mixed([2, 2], 2, 3), cfg).passed
    for state in (w(3), random_pure([2, 2, 2], 4)):
        assert run_check("tripartite_polygamy", state, cfg).passed
    print("✓ Lemma equivalence, rank-two bounds, tripartite polygamy")

    count = 200 if config.FULL_SWEEPS else 10
    for i in range(count):
        state = random_separable(2, derive_seed(11, i))
        result = run_check("zero_ue_separable", state, cfg)
        assert result.passed and result.certificates["ue"] < 1e-3
        assert result.rhs == config.SEPARABLE_UE_BOUND and result.lhs == result.certificates["ue"]
    print(f"✓ {count} rank-two separable states have (numerically) zero UE")

    state = random_separable(2, derive_seed(11, 0))
    bound = config.SEPARABLE_UE_BOUND
    config.SEPARABLE_UE_BOUND = -1.0
    try:
        assert not run_check("zero_ue_separable", state, cfg).passed
    finally:
        config.SEPARABLE_UE_BOUND = bound
    print("✓ UE above the bound on a separable state is a violation")

    result = run_check("zero_ue_separable", bell(), cfg)
    assert result.passed and result.note.startswith("premise not met")
    assert result.certificates["ppt_min_eigenvalue"] < 0
    print("✓ Entangled state with UE > 0 passes on an unmet premise")

    print("\n✅ Optimizer-dependent check tests passed!")


def test_suites():
    """Test the suite runner"""
    print("\nTesting suites...")
    import config
    from optim import OptimConfig
    from verify import run_remark1, run_suite

    report = run_suite("three_tangle", 20, 7)
    assert report.samples == 20 and not report.violations
    assert report.to_dict() == run_suite("three_tangle", 20, 7).to_dict()
    print("✓ Deterministic three-tangle sweep")

    override = config.TOLERANCE_OVERRIDE
    strict = run_suite("three_tangle", 5, 7, tolerance=-1.0)
    assert len(strict.violations) == 5 and all(r.tolerance == -1.0 for r in strict.results)
    assert config.TOLERANCE_OVERRIDE == override
    if override is None:
        assert all(r.tolerance == config.CHECK_TOLERANCES["three_tangle"] for r in run_suite("three_tangle", 2, 7).results)
    print("✓ Tolerance override is scoped to one run")

    assert run_suite("curly_e_property", 5, 0).samples == 1
    try:
        run_suite("no_such_suite", 1, 0)
        raise AssertionError("Unknown suite accepted")
    except ValueError:
        pass
    print("✓ Fixed-count and unknown suites")

    report = run_remark1(OptimConfig(**FAST))
    failed = [r.check_id for r in report.violations]
    assert not failed, failed
    assert len(report.results) == 8
    print("✓ Rank-three separable example reproduced")

    print("\n✅ Suite tests passed!")


# ============================================================================
# REPORTS AND CLI
# ============================================================================

def test_reports():
    """Test report assembly and analysis"""
    print("\nTesting reports...")
    from report import build_report, load_report, summarize_frame, write_report
    from verify import run_suite

    suite = run_suite("three_tangle", 5, 1)
    report = build_report([r.to_dict() for r in suite.results], {"seed": 1})
    assert set(report) == {"version", "config", "results", "summary"}
    assert report["summary"]["violations"] == 0 and report["summary"]["runtime_ms"] is None
    with tempfile.TemporaryDirectory() as tmp:
        for fmt in ("json", "csv"):
            path = write_report(report, Path(tmp) / f"report.{fmt}", fmt)
            summary = summarize_frame(load_report(path))
            assert int(summary.loc["three_tangle", "samples"]) == 5
    print("✓ JSON and CSV reports")

    print("\n✅ Report tests passed!")


def test_cli():
    """Test the command-line exit codes and outputs"""
    print("\nTesting CLI...")
    import config
    from main import main

    fast = ["--restarts", "4", "--max-iter", "150", "--log-level", "WARNING"]
    with tempfile.TemporaryDirectory() as tmp:
        out = str(Path(tmp) / "out.json")

        assert main(["compute", "--builtin", "w3", "--measure", "concurrence", "--cut", "A|BC", "--out", out] + fast) == 0
        with open(out) as f:
            value = json.load(f)["results"][0]["value"]
        assert abs(value - 2 * np.sqrt(2) / 3) <= 1e-10
        print("✓ compute concurrence")

        assert main(["compute", "--builtin", "ghz3", "--measure", "ue", "--cut", "AB", "--out", out] + fast) == 0
        with open(out) as f:
            assert json.load(f)["results"][0]["value"] <= 1e-6
        assert main(["compute", "--builtin", "remark1", "--measure", "ue", "--cut", "AB", "--out", out] + fast) == 0
        with open(out) as f:
            assert abs(json.load(f)["results"][0]["value"] - (5 / 3 - LOG2_3)) <= 1e-4
        print("✓ compute ue")

        assert main(["compute", "--builtin", "w3", "--measure", "bogus", "--out", out] + fast) == 2
        assert main(["compute", "--state", str(Path(tmp) / "missing.json"), "--measure", "ue"] + fast) == 2
        assert main(["verify", "--suite", "bogus", "--out", out] + fast) == 2
        assert main(["nonsense"]) == 2
        print("✓ Input errors exit with 2")

        assert main(["verify", "--suite", "three_tangle", "--samples", "20", "--seed", "7", "--out", out] + fast) == 0
        assert main(["summarize", out]) == 0
        print("✓ verify and summarize")

        override = config.TOLERANCE_OVERRIDE
        assert main(["verify", "--suite", "kw_identity", "--n", "3", "--tol", "-1", "--out", out] + fast) == 1
        assert config.TOLERANCE_OVERRIDE == override
        with open(out) as f:
            report = json.load(f)
        assert report["summary"]["violations"] == 3
        assert all(r["tolerance"] == -1 and not r["passed"] for r in report["results"])
        print("✓ Violations exit with 1; --tol stays local to the run")

        for fmt in ("json", "csv"):
            first, second = Path(tmp) / f"p1.{fmt}", Path(tmp) / f"p2.{fmt}"
            for path in (first, second):
                assert main(["verify", "--suite", "three_tangle", "--n", "10", "--seed", "7", "--format", fmt,
                             "--out", str(path)] + fast) == 0
            assert first.read_bytes() == second.read_bytes()
        print("✓ verify reports are byte-identical across runs")

        assert main(["verify", "--suite", "remark1", "--out", out] + fast) == 0
        with open(out) as f:
            report = json.load(f)
        assert len(report["results"]) == 8 and all(r["passed"] for r in report["results"])
        assert report["summary"]["violations"] == 0
        print("✓ verify remark1 reproduces all eight facts")

        first, second = Path(tmp) / "a.json", Path(tmp) / "b.json"
        for path in (first, second):
            assert main(["sample", "--dims", "2,2,2", "--kind", "pure", "--count", "3", "--seed", "5",
                         "--out", str(path)] + fast) == 0
        assert first.read_bytes() == second.read_bytes()
        with open(first) as f:
            states = json.load(f)
        assert len(states) == 3
        for s in states:
            vec = np.array([re + 1j * im for re, im in s["data"]])
            assert vec.shape == (8,) and abs(np.linalg.norm(vec) - 1) <= 1e-10
        print("✓ sample is deterministic")

    print("\n✅ CLI tests passed!")


def run_all_tests():
    """Run all tests"""
    print("=" * 80)
    print("RUNNING SYSTEM TESTS")
    print("=" * 80)

    tests = {
        "Imports": test_imports,
        "Configuration": test_config,
        "Tensor / Partial Trace": test_tensor_and_partial_trace,
        "Partial Transpose": test_partial_transpose,
        "Eigensolver": test_eig_hermitian,
        "Purify / sqrt_psd": test_purify_and_sqrt,
        "Named States": test_named_states,
        "Fourier / Paulis": test_fourier_and_paulis,
        "Channels": test_channels,
        "Omega State": test_omega_state,
        "Measurement": test_measurement,
        "Sampling": test_sampling,
        "State Files": test_state_files,
        "Optimizer Types": test_optim_types,
        "Decomposition Search": test_optimize_decomposition,
        "Measurement Search": test_optimize_povm,
        "Entropies": test_entropies,
        "curly_e": test_curly_e,
        "Concurrences": test_concurrences,
        "Roof Measures": test_roof_measures,
        "UE": test_unlocalizable_entanglement,
        "Holevo chi": test_holevo_chi,
        "Product Measures": test_product_measures,
        "Exact Checks": test_exact_checks,
        "Seeded Checks": test_seeded_checks,
        "Optimizer Checks": test_optimizer_checks,
        "Suites": test_suites,
        "Reports": test_reports,
        "CLI": test_cli,
    }

    results = {}
    for name, test in tests.items():
        try:
            test()
            results[name] = True
        except Exception as e:
            print(f"\n❌ {name} error: {e!r}")
            traceback.print_exc()
            results[name] = False

    print("\n" + "=" * 80)
    print("TEST SUMMARY")
    print("=" * 80)

    for test_name, result in results.items():
        status = "✅ PASS" if result else "❌ FAIL"
        print(f"{test_name:.<40} {status}")

    all_passed = all(results.values())

    print("\n" + "=" * 80)
    if all_passed:
        print("🎉 ALL TESTS PASSED!")
        print("\nReproduce the rank-three separable example:")
        print("  python main.py verify --suite remark1")
        print("\nOr run the full harness:")
        print("  python main.py verify --suite all --samples 50 --seed 1")
    else:
        print("⚠️  SOME TESTS FAILED")
        print("\nPlease fix the issues above before running the harness.")
    print("=" * 80)

    return all_passed


if __name__ == "__main__":
    success = run_all_tests()
    sys.exit(0 if success else 1)
