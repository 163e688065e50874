"""
Correlation and Entanglement Measures
Entropies, mutual/coherent information, concurrences, roof measures,
Henderson-Vedral correlation and unlocalizable entanglement.

All values are in bits.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np

import config
from linalg import (
    check_dims,
    eigvals_hermitian,
    partial_trace,
    partial_transpose,
    ptrace_ket,
    purify,
    spectral_entropy,
    sqrt_psd,
)
from optim import (
    OptimConfig,
    OptimResult,
    decomposition_members,
    optimize_decomposition,
    optimize_povm,
    optimize_product_povm,
    povm_to_decomposition,
)
from states import (
    Ensemble,
    Povm,
    fourier_basis,
    induced_ensembles,
    marginal_eigenbasis,
    omega_state,
    mixed_basis_povm,
)

logger = logging.getLogger(__name__)

METHODS = ("closed-form", "optimized")
BOUND_DIRECTIONS = ("exact", "lower-estimate", "upper-estimate")

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
SPIN_FLIP = np.kron(SIGMA_Y, SIGMA_Y)


@dataclass
class MeasureValue:
    """A measure value with how it was obtained"""
    value: float
    method: str = "closed-form"
    bound_direction: str = "exact"
    certificate: Any = None
    optim: Optional[OptimResult] = field(default=None, repr=False)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"Unknown method: {self.method}")
        if self.bound_direction not in BOUND_DIRECTIONS:
            raise ValueError(f"Unknown bound direction: {self.bound_direction}")
        self.value = float(self.value)

    def certificate_summary(self) -> Optional[Union[Dict, List[Dict]]]:
        if self.certificate is None:
            return None
        if isinstance(self.certificate, (list, tuple)):
            return [c.to_dict() for c in self.certificate]
        return self.certificate.to_dict()

    def to_dict(self) -> Dict:
        return {
            "value": self.value,
            "method": self.method,
            "bound_direction": self.bound_direction,
            "certificate": self.certificate_summary(),
            "optimizer": self.optim.to_dict() if self.optim is not None else None,
        }


def _bipartite(rho: np.ndarray, dims: Sequence[int]) -> Tuple[np.ndarray, List[int]]:
    rho = np.asarray(rho, dtype=complex)
    dims = check_dims(dims, rho.shape[0])
    if len(dims) != 2:
        raise ValueError(f"Expected a bipartite state, got dims {dims}")
    return rho, dims


def _two_qubit(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"Expected a two-qubit density matrix, got shape {rho.shape}")
    return rho


# ============================================================================
# ENTROPIES AND INFORMATION
# ============================================================================

def entropy(rho: np.ndarray) -> float:
    """von Neumann entropy in bits"""
    return float(spectral_entropy(eigvals_hermitian(rho)))


def shannon(p: Sequence[float]) -> float:
    p = np.asarray(p, dtype=float)
    if np.any(p < -config.ENSEMBLE_TOL):
        raise ValueError(f"Probabilities must be non-negative, got {p}")
    return float(spectral_entropy(p))


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"Binary entropy needs x in [0, 1], got {x}")
    return shannon([x, 1.0 - x])


def purity(rho: np.ndarray) -> float:
    rho = np.asarray(rho, dtype=complex)
    return float(np.real(np.einsum("ij,ji->", rho, rho)))


def mutual_information(rho_ab: np.ndarray, dims: Sequence[int]) -> float:
    """S(A) + S(B) - S(AB)"""
    rho_ab, dims = _bipartite(rho_ab, dims)
    s_a = entropy(partial_trace(rho_ab, dims, [0]))
    s_b = entropy(partial_trace(rho_ab, dims, [1]))
    return s_a + s_b - entropy(rho_ab)


def coherent_information(rho_ab: np.ndarray, dims: Sequence[int]) -> float:
    """S(A) - S(AB)"""
    rho_ab, dims = _bipartite(rho_ab, dims)
    return entropy(partial_trace(rho_ab, dims, [0])) - entropy(rho_ab)


def curly_e(x):
    """
    H(1/2 + sqrt(1 - x^2)/2), the entanglement of a two-qubit pure state with concurrence x

    Accepts a scalar or an array; values outside [0, 1] are rejected.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < -1e-12) or np.any(arr > 1 + 1e-12):
        raise ValueError(f"curly_e needs x in [0, 1], got {x}")
    arr = np.clip(arr, 0.0, 1.0)
    p = 0.5 + np.sqrt(1.0 - arr ** 2) / 2
    out = spectral_entropy(np.stack([p, 1.0 - p]), axis=0)
    return float(out) if np.ndim(out) == 0 else out


def holevo_chi(ensemble: Ensemble) -> float:
    """S(sum p_i rho_i) - sum p_i S(rho_i)"""
    average = entropy(ensemble.density() / np.sum(ensemble.weights))
    members = [0.0 if np.ndim(s) == 1 else entropy(s) for s in ensemble.states]
    return average - float(np.dot(ensemble.weights, members)) / float(np.sum(ensemble.weights))


# ============================================================================
# CONCURRENCE AND TWO-QUBIT CLOSED FORMS
# ============================================================================

def concurrence_pure(psi: np.ndarray, dims: Sequence[int], cut: Sequence[int]) -> float:
    """sqrt(2 (1 - tr rho^2)) of the reduced state on the `cut` subsystems"""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    rho = ptrace_ket(psi, dims, cut)
    return float(np.sqrt(max(0.0, 2.0 * (1.0 - purity(rho)))))


def spin_flip_spectrum(rho: np.ndarray) -> np.ndarray:
    """Descending eigenvalues of sqrt(sqrt(rho) rho~ sqrt(rho)), rho~ = (Y x Y) rho* (Y x Y)"""
    rho = _two_qubit(rho)
    root = sqrt_psd(rho)
    flipped = SPIN_FLIP @ rho.conj() @ SPIN_FLIP
    r = root @ flipped @ root
    lam = eigvals_hermitian((r + r.conj().T) / 2)
    return np.sqrt(np.clip(lam, 0.0, None))[::-1]


def concurrence_2q(rho: np.ndarray) -> float:
    lam = spin_flip_spectrum(rho)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def coa_2q(rho: np.ndarray) -> float:
    """Concurrence of assistance: the sum of the spin-flip spectrum"""
    return float(np.sum(spin_flip_spectrum(rho)))


def eof_2q(rho: np.ndarray) -> float:
    return curly_e(min(1.0, concurrence_2q(rho)))


def ppt_min_eigenvalue(rho: np.ndarray, dims: Sequence[int], sys: int = 1) -> float:
    return float(eigvals_hermitian(partial_transpose(rho, dims, sys))[0])


def is_ppt(rho: np.ndarray, dims: Sequence[int], tol: float = config.CHECK_TOLERANCES["zero_ue_separable"]) -> bool:
    return ppt_min_eigenvalue(rho, dims) >= -tol


# ============================================================================
# ROOF MEASURES
# ============================================================================

def _entanglement_score(s2: np.ndarray) -> np.ndarray:
    return spectral_entropy(s2, axis=1)


def _concurrence_score(s2: np.ndarray) -> np.ndarray:
    return np.sqrt(np.clip(2.0 * (1.0 - np.sum(s2 ** 2, axis=1)), 0.0, None))


def decomposition_ensemble(rho: np.ndarray, dims: Sequence[int], isometry: np.ndarray) -> Ensemble:
    """Pure-state ensemble selected by an HJW isometry"""
    p, kets = decomposition_members(rho, isometry)
    keep = p > config.OUTCOME_DROP
    return Ensemble(
        weights=p[keep],
        states=list(kets[keep]),
        dims=list(dims),
        dropped_mass=float(np.sum(p[~keep])),
    )


def _roof(rho, dims, objective, score, cfg) -> MeasureValue:
    rho = np.asarray(rho, dtype=complex)
    dims = check_dims(dims, rho.shape[0])
    result = optimize_decomposition(rho, dims, objective, score, cfg)
    return MeasureValue(
        value=result.value,
        method="optimized",
        bound_direction="upper-estimate" if objective == "min" else "lower-estimate",
        certificate=decomposition_ensemble(rho, dims, result.params[0]),
        optim=result,
    )


def eof_roof(rho: np.ndarray, dims: Sequence[int], cfg: Optional[OptimConfig] = None) -> MeasureValue:
    """Entanglement of formation across 0 | rest, minimized over decompositions"""
    return _roof(rho, dims, "min", _entanglement_score, cfg)


def eoa_roof(rho: np.ndarray, dims: Sequence[int], cfg: Optional[OptimConfig] = None) -> MeasureValue:
    """Entanglement of assistance across 0 | rest, maximized over decompositions"""
    return _roof(rho, dims, "max", _entanglement_score, cfg)


def coa_roof(rho: np.ndarray, dims: Sequence[int], cfg: Optional[OptimConfig] = None) -> MeasureValue:
    return _roof(rho, dims, "max", _concurrence_score, cfg)


def concurrence_roof(rho: np.ndarray, dims: Sequence[int], cfg: Optional[OptimConfig] = None) -> MeasureValue:
    return _roof(rho, dims, "min", _concurrence_score, cfg)


# ============================================================================
# MEASUREMENT-BASED MEASURES
# ============================================================================

def _single_povm_measure(rho_ab, dims, objective, cfg) -> MeasureValue:
    rho_ab, dims = _bipartite(rho_ab, dims)
    result = optimize_povm(rho_ab, dims, 1, objective, cfg)
    return MeasureValue(
        value=result.value,
        method="optimized",
        bound_direction="upper-estimate" if objective == "min" else "lower-estimate",
        certificate=Povm.from_isometry(result.params[0]),
        optim=result,
    )


def henderson_vedral(rho_ab: np.ndarray, dims: Sequence[int], cfg: Optional[OptimConfig] = None) -> MeasureValue:
    """max over rank-1 POVMs on B of S(rho_A) - sum_x p_x S(rho_A^x)"""
    return _single_povm_measure(rho_ab, dims, "max", cfg)


def ue_direct(rho_ab: np.ndarray, dims: Sequence[int], cfg: Optional[OptimConfig] = None) -> MeasureValue:
    """
    Unlocalizable entanglement as min over rank-1 POVMs on B of
    S(rho_A) - sum_x p_x S(rho_A^x)

    The pool always contains the 2 d_B-outcome mixed measurement built from
    the eigenbasis of rho_B and its Fourier basis.
    """
    return _single_povm_measure(rho_ab, dims, "min", cfg)


def ue_via_purification(rho_ab: np.ndarray, dims: Sequence[int],
                        cfg: Optional[OptimConfig] = None) -> MeasureValue:
    """S(rho_A) - E_a(rho_AC) for a purification |psi>_ABC of rho_AB"""
    cfg = cfg or OptimConfig()
    rho_ab, dims = _bipartite(rho_ab, dims)
    psi, pdims = purify(rho_ab, dims)
    s_a = entropy(partial_trace(rho_ab, dims, [0]))
    rho_ac = ptrace_ket(psi, pdims, [0, 2])

    basis = marginal_eigenbasis(rho_ab, dims)
    seeds = [
        basis.conj().T,
        fourier_basis(dims[1], basis).conj().T,
        mixed_basis_povm(basis).to_isometry(),
    ]
    candidates = [povm_to_decomposition(psi, pdims, 1, v) for v in seeds]
    eoa = eoa_roof(rho_ac, [dims[0], pdims[2]], cfg.with_candidates(list(cfg.candidates) + candidates))
    return MeasureValue(
        value=s_a - eoa.value,
        method="optimized",
        bound_direction="upper-estimate",
        certificate=eoa.certificate,
        optim=eoa.optim,
    )


def eoa_from_pure(psi: np.ndarray, dims: Sequence[int], target: int, helper: int,
                  cfg: Optional[OptimConfig] = None) -> MeasureValue:
    """
    Entanglement of assistance between `target` and the remaining parties
    other than `helper`, assisted by rank-1 measurements on `helper` of the
    pure state psi
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    dims = check_dims(dims, psi.shape[0])
    s_t = entropy(ptrace_ket(psi, dims, [target]))
    result = optimize_povm(psi, dims, helper, "min", cfg, target=target)
    return MeasureValue(
        value=s_t - result.value,
        method="optimized",
        bound_direction="lower-estimate",
        certificate=Povm.from_isometry(result.params[0]),
        optim=result,
    )


def ue_product(state: np.ndarray, dims: Sequence[int], cfg: Optional[OptimConfig] = None,
               measured: Sequence[int] = (1, 2), target: int = 0) -> MeasureValue:
    """
    min over product rank-1 POVMs M_x (x) N_y on the two `measured` parties of
    S(rho_A) - sum_xy p_xy S(rho_A^xy); `state` is a ket or density matrix
    """
    result = optimize_product_povm(state, dims, measured, "min", cfg, target=target)
    return MeasureValue(
        value=result.value,
        method="optimized",
        bound_direction="upper-estimate",
        certificate=[Povm.from_isometry(v) for v in result.params],
        optim=result,
    )


def localizable_ea(state: np.ndarray, dims: Sequence[int], cfg: Optional[OptimConfig] = None,
                   measured: Sequence[int] = (2, 3), target: int = 0) -> MeasureValue:
    """
    max over product rank-1 POVMs on the two `measured` parties of
    sum_xy p_xy S(rho_A^xy); B stays unmeasured

    For the same product POVM this equals S(rho_A) minus the ue_product objective.
    """
    state = np.asarray(state, dtype=complex)
    dims = check_dims(dims, state.shape[0])
    reduced = ptrace_ket(state, dims, [target]) if state.ndim == 1 else partial_trace(state, dims, [target])
    s_a = entropy(reduced)
    result = optimize_product_povm(state, dims, measured, "min", cfg, target=target)
    return MeasureValue(
        value=s_a - result.value,
        method="optimized",
        bound_direction="lower-estimate",
        certificate=[Povm.from_isometry(v) for v in result.params],
        optim=result,
    )


def rank2_tradeoff_values(rho_ab: np.ndarray, cfg: Optional[OptimConfig] = None) -> Dict[str, MeasureValue]:
    """I<-, E_a, E_u and E_f of a two-qubit state (the rank <= 2 trade-off quantities)"""
    rho_ab = _two_qubit(rho_ab)
    eoa = eoa_roof(rho_ab, [2, 2], cfg)
    closed = curly_e(min(1.0, coa_2q(rho_ab)))
    if closed > eoa.value:
        eoa = MeasureValue(closed, method="closed-form", bound_direction="lower-estimate")
    return {
        "hv": henderson_vedral(rho_ab, [2, 2], cfg),
        "eoa": eoa,
        "ue": ue_direct(rho_ab, [2, 2], cfg),
        "eof": MeasureValue(eof_2q(rho_ab)),
    }


# ============================================================================
# THE ENTROPY-DEFECT BOUND
# ============================================================================

def thm1_povm_bound(rho_ab: np.ndarray, dims: Sequence[int]) -> Tuple[float, Povm]:
    """
    (chi(E0) + chi(E1)) / 2 and the mixed measurement achieving it

    E0 and E1 are the ensembles on A induced by measuring B in the eigenbasis
    of rho_B and in its Fourier basis.
    """
    rho_ab, dims = _bipartite(rho_ab, dims)
    e0, e1 = induced_ensembles(rho_ab, dims)
    value = (holevo_chi(e0) + holevo_chi(e1)) / 2
    return value, mixed_basis_povm(marginal_eigenbasis(rho_ab, dims))


def omega_informations(rho_ab: np.ndarray, dims: Sequence[int]) -> Dict[str, float]:
    """
    Mutual informations of the Omega state next to the closed forms they must equal

    Returns:
        Dict with I(X:AB), I(Y:AB), I(XY:AB), their predicted values, chi0,
        chi1 and I(rho_AB)
    """
    rho_ab, dims = _bipartite(rho_ab, dims)
    omega = omega_state(rho_ab, dims)
    info = omega.mutual_informations()
    e0, e1 = induced_ensembles(rho_ab, dims)
    chi0, chi1 = holevo_chi(e0), holevo_chi(e1)
    log_d = float(np.log2(dims[1]))
    s_b = entropy(partial_trace(rho_ab, dims, [1]))
    return {
        "I(X:AB)": info["X:AB"],
        "I(Y:AB)": info["Y:AB"],
        "I(XY:AB)": info["XY:AB"],
        "expected I(X:AB)": log_d - s_b + chi0,
        "expected I(Y:AB)": chi1,
        "expected I(XY:AB)": log_d + coherent_information(rho_ab, dims),
        "chi0": chi0,
        "chi1": chi1,
        "I(A:B)": mutual_information(rho_ab, dims),
    }
