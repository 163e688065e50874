"""
State Definitions
Multipartite states, measurements and ensembles, the named constructions
used by the polygamy/unlocalizable-entanglement results, random sampling and
the JSON state file format.
"""

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np

import config
from linalg import (
    check_dims,
    dims_product,
    eig_hermitian,
    eigvals_hermitian,
    ket_to_dm,
    partial_trace,
    permute_subsystems,
    ptrace_ket,
    spectral_entropy,
    tensor_all,
)

logger = logging.getLogger(__name__)

# PRNG streams per sampler (seed 0 is reserved for fixtures)
STREAM_PURE = 0
STREAM_MIXED = 1
STREAM_UNITARY = 2
STREAM_POVM = 3
STREAM_SEPARABLE = 4

LABELS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by (seed, stream)"""
    if seed < 0 or stream < 0:
        raise ValueError(f"Seed and stream must be non-negative, got ({seed}, {stream})")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


def derive_seed(seed: int, index: int) -> int:
    """Per-sample 63-bit seed, so any single sample can be replayed on its own"""
    state = np.random.SeedSequence([int(seed), int(index)]).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 31 | int(state[1]) >> 1


# ============================================================================
# DOMAIN TYPES
# ============================================================================

@dataclass
class MultipartiteState:
    """Pure vector or density matrix with an ordered subsystem dimension list"""
    kind: str
    data: np.ndarray
    dims: List[int]
    labels: List[str] = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("pure", "mixed"):
            raise ValueError(f"Unknown state kind: {self.kind}")
        self.data = np.asarray(self.data, dtype=complex)

        if self.kind == "pure":
            self.data = self.data.reshape(-1)
            self.dims = check_dims(self.dims, self.data.shape[0])
            norm = np.linalg.norm(self.data)
            if abs(norm - 1) > config.NORM_TOL:
                raise ValueError(f"Pure state is not normalized: norm = {norm:.12f}")
        else:
            if self.data.ndim != 2 or self.data.shape[0] != self.data.shape[1]:
                raise ValueError(f"Density matrix must be square, got shape {self.data.shape}")
            self.dims = check_dims(self.dims, self.data.shape[0])
            vals, _ = eig_hermitian(self.data)
            if vals[0] < -config.PSD_TOL:
                raise ValueError(f"Density matrix is not PSD: eigenvalue {vals[0]:.3e}")
            trace = np.trace(self.data).real
            if abs(trace - 1) > config.TRACE_TOL:
                raise ValueError(f"Density matrix trace is {trace:.12f}, expected 1")

        if self.labels is None:
            self.labels = list(LABELS[:len(self.dims)])
        if len(self.labels) != len(self.dims):
            raise ValueError(f"{len(self.labels)} labels for {len(self.dims)} subsystems")

    @property
    def dim(self) -> int:
        return dims_product(self.dims)

    @property
    def is_pure(self) -> bool:
        return self.kind == "pure"

    def density(self) -> np.ndarray:
        return ket_to_dm(self.data) if self.is_pure else self.data

    def marginal(self, keep: Sequence[int]) -> np.ndarray:
        """Reduced density matrix on the kept subsystems"""
        if self.is_pure:
            return ptrace_ket(self.data, self.dims, keep)
        return partial_trace(self.data, self.dims, keep)

    def marginal_state(self, keep: Sequence[int]) -> "MultipartiteState":
        keep = sorted(keep)
        return MultipartiteState(
            kind="mixed",
            data=self.marginal(keep),
            dims=[self.dims[i] for i in keep],
            labels=[self.labels[i] for i in keep],
            name=f"{self.name}[{''.join(self.labels[i] for i in keep)}]" if self.name else "",
        )

    def index(self, label: str) -> int:
        if label not in self.labels:
            raise ValueError(f"Unknown subsystem label {label!r}, have {self.labels}")
        return self.labels.index(label)

    def regroup(self, groups: Sequence[Sequence[int]]) -> "MultipartiteState":
        """
        State on the given groups of subsystems, one merged party per group

        Subsystems not in any group are traced out; the result stays pure only
        when every subsystem is kept.
        """
        flat = [int(i) for g in groups for i in g]
        if not flat or any(not g for g in groups) or len(set(flat)) != len(flat):
            raise ValueError(f"Groups must be non-empty and disjoint, got {groups}")
        keep = sorted(flat)
        if keep[-1] >= len(self.dims):
            raise ValueError(f"Subsystem index out of range in {groups} for dims {self.dims}")

        data = self.data if self.is_pure and len(keep) == len(self.dims) else self.marginal(keep)
        data = permute_subsystems(data, [self.dims[i] for i in keep], [keep.index(i) for i in flat])
        return MultipartiteState(
            kind="pure" if data.ndim == 1 else "mixed",
            data=data,
            dims=[dims_product([self.dims[i] for i in g]) for g in groups],
            labels=["".join(self.labels[i] for i in g) for g in groups],
            name=self.name,
        )

    def to_dict(self) -> Dict:
        flat = self.data.reshape(-1)
        return {
            "kind": self.kind,
            "dims": list(self.dims),
            "labels": list(self.labels),
            "data": [[float(z.real), float(z.imag)] for z in flat],
        }


@dataclass
class Povm:
    """Positive operators on one subsystem summing to the identity"""
    elements: List[np.ndarray]
    rank1: bool = True
    isometry: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if not self.elements:
            raise ValueError("POVM needs at least one element")
        self.elements = [np.asarray(e, dtype=complex) for e in self.elements]
        d = self.elements[0].shape[0]
        total = np.sum(self.elements, axis=0)
        residual = np.max(np.abs(total - np.eye(d)))
        if residual > config.POVM_TOL:
            raise ValueError(f"POVM elements do not sum to identity (residual {residual:.3e})")
        for k, element in enumerate(self.elements):
            vals, _ = eig_hermitian(element)
            if vals[0] < -config.PSD_TOL:
                raise ValueError(f"POVM element {k} is not PSD (eigenvalue {vals[0]:.3e})")
            if self.rank1 and np.sum(vals > 1e-9) > 1:
                raise ValueError(f"POVM element {k} is not rank 1")

    @classmethod
    def from_isometry(cls, isometry: np.ndarray) -> "Povm":
        """Rank-1 POVM with elements v_x^dagger v_x for the rows v_x of an n x d isometry"""
        v = np.asarray(isometry, dtype=complex)
        elements = [np.outer(row.conj(), row) for row in v]
        return cls(elements=elements, rank1=True, isometry=v)

    @classmethod
    def from_vectors(cls, vectors: Sequence[np.ndarray]) -> "Povm":
        """Rank-1 POVM with elements |m_x><m_x| for sub-normalized vectors m_x"""
        return cls.from_isometry(np.array([np.asarray(m).conj() for m in vectors]))

    @property
    def n(self) -> int:
        return len(self.elements)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def to_isometry(self) -> np.ndarray:
        """Rows <m_x| of a rank-1 POVM"""
        if self.isometry is not None:
            return self.isometry
        if not self.rank1:
            raise ValueError("Only rank-1 POVMs have an isometry form")
        rows = []
        for element in self.elements:
            vals, vecs = eig_hermitian(element)
            rows.append(np.sqrt(max(vals[-1], 0.0)) * vecs[:, -1].conj())
        return np.array(rows)

    def to_dict(self) -> Dict:
        return {
            "outcomes": self.n,
            "dim": self.dim,
            "rank1": self.rank1,
            "weights": [float(np.trace(e).real) for e in self.elements],
        }


@dataclass
class Ensemble:
    """Weighted states (kets or density matrices) sharing one dimension list"""
    weights: np.ndarray
    states: List[np.ndarray]
    dims: List[int]
    dropped_mass: float = 0.0

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if len(self.weights) != len(self.states):
            raise ValueError(f"{len(self.weights)} weights for {len(self.states)} states")
        if np.any(self.weights < 0):
            raise ValueError("Ensemble weights must be non-negative")
        total = self.weights.sum() + self.dropped_mass
        if abs(total - 1) > config.ENSEMBLE_TOL:
            raise ValueError(f"Ensemble weights sum to {total:.12f}, expected 1")

    @property
    def is_pure(self) -> bool:
        return all(np.ndim(s) == 1 for s in self.states)

    def members(self) -> List[np.ndarray]:
        """Member density matrices"""
        return [ket_to_dm(s) if np.ndim(s) == 1 else np.asarray(s) for s in self.states]

    def density(self) -> np.ndarray:
        d = dims_product(self.dims)
        rho = np.zeros((d, d), dtype=complex)
        for p, member in zip(self.weights, self.members()):
            rho += p * member
        return rho

    def to_dict(self) -> Dict:
        return {
            "members": len(self.states),
            "dims": list(self.dims),
            "weights": [float(p) for p in self.weights],
            "dropped_mass": float(self.dropped_mass),
        }


# ============================================================================
# NAMED STATES
# ============================================================================

def basis_ket(index: int, dim: int) -> np.ndarray:
    ket = np.zeros(dim, dtype=complex)
    ket[index] = 1.0
    return ket


def product_state(*kets: np.ndarray, name: str = "") -> MultipartiteState:
    kets = [np.asarray(k, dtype=complex) / np.linalg.norm(k) for k in kets]
    return MultipartiteState("pure", tensor_all(*kets), [len(k) for k in kets], name=name)


def ghz(n: int) -> MultipartiteState:
    """(|0...0> + |1...1>)/sqrt(2)"""
    if n < 2:
        raise ValueError(f"GHZ state needs n >= 2, got {n}")
    psi = np.zeros(2 ** n, dtype=complex)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    return MultipartiteState("pure", psi, [2] * n, name=f"ghz{n}")


def w(n: int) -> MultipartiteState:
    """Equal superposition of the n single-excitation states"""
    if n < 2:
        raise ValueError(f"W state needs n >= 2, got {n}")
    psi = np.zeros(2 ** n, dtype=complex)
    for k in range(n):
        psi[1 << k] = 1 / np.sqrt(n)
    return MultipartiteState("pure", psi, [2] * n, name=f"w{n}")


def bell() -> MultipartiteState:
    state = ghz(2)
    state.name = "bell"
    return state


def max_mixed(d: int, parties: int = 2) -> MultipartiteState:
    if d < 1 or parties < 1:
        raise ValueError(f"Maximally mixed state needs d >= 1 and parties >= 1, got d={d}, parties={parties}")
    dims = [d] * parties
    total = dims_product(dims)
    return MultipartiteState("mixed", np.eye(total) / total, dims, name=f"max_mixed{d}")


def remark1_state() -> MultipartiteState:
    """
    Three-party state on 2 x 2 x 3 (labels A, B, C):
        (|x>_AC |0>_B + |y>_AC |1>_B)/sqrt(2)
        |x> = (|02> + sqrt(2)|10>)/sqrt(3),  |y> = (|12> + sqrt(2)|01>)/sqrt(3)

    Its AB marginal is a rank-3 separable two-qubit state with non-zero UE.
    """
    x = np.zeros((2, 3), dtype=complex)
    x[0, 2] = 1 / np.sqrt(3)
    x[1, 0] = np.sqrt(2 / 3)
    y = np.zeros((2, 3), dtype=complex)
    y[1, 2] = 1 / np.sqrt(3)
    y[0, 1] = np.sqrt(2 / 3)

    psi = np.zeros((2, 2, 3), dtype=complex)
    psi[:, 0, :] = x / np.sqrt(2)
    psi[:, 1, :] = y / np.sqrt(2)
    return MultipartiteState("pure", psi.reshape(-1), [2, 2, 3], name="remark1")


# ============================================================================
# FOURIER BASIS, GENERALIZED PAULIS, CHANNELS
# ============================================================================

def _basis_matrix(d: int, basis: Optional[np.ndarray]) -> np.ndarray:
    if d < 2:
        raise ValueError(f"Dimension must be >= 2, got {d}")
    if basis is None:
        return np.eye(d, dtype=complex)
    basis = np.asarray(basis, dtype=complex)
    if basis.shape != (d, d):
        raise ValueError(f"Reference basis must be {d}x{d}, got {basis.shape}")
    return basis


def fourier_basis(d: int, basis: Optional[np.ndarray] = None) -> np.ndarray:
    """Columns |e~_j> = (1/sqrt d) sum_k w^{jk} |e_k>, w = exp(2 pi i / d)"""
    e = _basis_matrix(d, basis)
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    phases = np.exp(2j * np.pi * j * k / d) / np.sqrt(d)
    return e @ phases.T


def pauli_z(d: int, basis: Optional[np.ndarray] = None) -> np.ndarray:
    """Z = sum_j w^j |e_j><e_j|"""
    e = _basis_matrix(d, basis)
    return (e * np.exp(2j * np.pi * np.arange(d) / d)) @ e.conj().T


def pauli_x(d: int, basis: Optional[np.ndarray] = None) -> np.ndarray:
    """X = sum_j |e_{j+1 mod d}><e_j|"""
    e = _basis_matrix(d, basis)
    shift = np.roll(np.eye(d), 1, axis=0)
    return e @ shift @ e.conj().T


def dephase(sigma: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Projector form sum_i |b_i><b_i| sigma |b_i><b_i| for the columns b_i"""
    b = np.asarray(basis, dtype=complex)
    diag = np.einsum("ki,kl,li->i", b.conj(), sigma, b)
    return (b * diag) @ b.conj().T


def _twirl(sigma: np.ndarray, unitary: np.ndarray) -> np.ndarray:
    d = unitary.shape[0]
    out = np.zeros_like(sigma, dtype=complex)
    power = np.eye(d, dtype=complex)
    for _ in range(d):
        out += power @ sigma @ power.conj().T
        power = unitary @ power
    return out / d


def channel_m0(sigma: np.ndarray, basis: Optional[np.ndarray] = None) -> np.ndarray:
    """Dephasing in {|e_i>}: (1/d) sum_b Z^b sigma Z^-b"""
    sigma = np.asarray(sigma, dtype=complex)
    return _twirl(sigma, pauli_z(sigma.shape[0], basis))


def channel_m1(sigma: np.ndarray, basis: Optional[np.ndarray] = None) -> np.ndarray:
    """Dephasing in the Fourier basis: (1/d) sum_a X^a sigma X^-a"""
    sigma = np.asarray(sigma, dtype=complex)
    return _twirl(sigma, pauli_x(sigma.shape[0], basis))


def marginal_eigenbasis(rho_ab: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    """Eigenbasis of rho_B (columns), eigenvalues descending"""
    _, vecs = eig_hermitian(partial_trace(rho_ab, dims, [1]))
    return vecs[:, ::-1]


def mixed_basis_povm(basis: np.ndarray) -> Povm:
    """The 2d-outcome rank-1 measurement {|e_i><e_i|/2, |e~_j><e~_j|/2}"""
    e = np.asarray(basis, dtype=complex)
    f = fourier_basis(e.shape[0], e)
    return Povm.from_isometry(np.vstack([e.conj().T, f.conj().T]) / np.sqrt(2))


# ============================================================================
# THE OMEGA STATE
# ============================================================================

@dataclass
class OmegaState:
    """
    Classical-quantum state on X, Y, A, B stored as its d_B^2 quantum blocks
    block[x, y] = (I x X^x Z^y) rho_AB (I x Z^-y X^-x), each with weight 1/d_B^2
    """
    blocks: np.ndarray
    dims: List[int]

    @property
    def d_b(self) -> int:
        return self.blocks.shape[0]

    def marginal_ab(self) -> np.ndarray:
        return self.blocks.mean(axis=(0, 1))

    def x_blocks(self) -> np.ndarray:
        """Conditional AB states given X = x"""
        return self.blocks.mean(axis=1)

    def y_blocks(self) -> np.ndarray:
        """Conditional AB states given Y = y"""
        return self.blocks.mean(axis=0)

    def entropies(self) -> Dict[str, float]:
        """
        Entropies of the marginals, computed blockwise (joint entropy theorem)

        Keys: X, Y, XY, AB, XAB, YAB, XYAB.
        """
        log_d = np.log2(self.d_b)

        def mean_entropy(blocks):
            lam = np.array([eigvals_hermitian(b) for b in blocks.reshape(-1, *blocks.shape[-2:])])
            return float(np.mean(spectral_entropy(lam, axis=1)))

        return {
            "X": float(log_d),
            "Y": float(log_d),
            "XY": float(2 * log_d),
            "AB": float(spectral_entropy(eigvals_hermitian(self.marginal_ab()))),
            "XAB": float(log_d + mean_entropy(self.x_blocks())),
            "YAB": float(log_d + mean_entropy(self.y_blocks())),
            "XYAB": float(2 * log_d + mean_entropy(self.blocks)),
        }

    def mutual_informations(self) -> Dict[str, float]:
        """I(X:AB), I(Y:AB) and I(XY:AB)"""
        s = self.entropies()
        return {
            "X:AB": s["X"] + s["AB"] - s["XAB"],
            "Y:AB": s["Y"] + s["AB"] - s["YAB"],
            "XY:AB": s["XY"] + s["AB"] - s["XYAB"],
        }

    def to_state(self) -> MultipartiteState:
        """Dense materialization on X x Y x A x B (small d_B only)"""
        d = self.d_b
        dab = self.blocks.shape[-1]
        rho = np.zeros((d * d * dab, d * d * dab), dtype=complex)
        for x in range(d):
            for y in range(d):
                k = (x * d + y) * dab
                rho[k:k + dab, k:k + dab] = self.blocks[x, y] / d ** 2
        return MultipartiteState("mixed", rho, [d, d] + list(self.dims),
                                 labels=["X", "Y", "A", "B"], name="omega")


def omega_state(rho_ab: np.ndarray, dims: Sequence[int]) -> OmegaState:
    """Omega_XYAB built from the eigenbasis of rho_B"""
    rho_ab = np.asarray(rho_ab, dtype=complex)
    dims = check_dims(dims, rho_ab.shape[0])
    if len(dims) != 2:
        raise ValueError(f"Omega state needs a bipartite rho_AB, got dims {dims}")
    d_a, d_b = dims
    basis = marginal_eigenbasis(rho_ab, dims)
    z = pauli_z(d_b, basis)
    x_op = pauli_x(d_b, basis)

    blocks = np.zeros((d_b, d_b, d_a * d_b, d_a * d_b), dtype=complex)
    x_power = np.eye(d_b, dtype=complex)
    for x in range(d_b):
        z_power = np.eye(d_b, dtype=complex)
        for y in range(d_b):
            u = np.kron(np.eye(d_a), x_power @ z_power)
            blocks[x, y] = u @ rho_ab @ u.conj().T
            z_power = z @ z_power
        x_power = x_op @ x_power
    return OmegaState(blocks=blocks, dims=dims)


# ============================================================================
# MEASUREMENT
# ============================================================================

def measure_on_subsystem(state: MultipartiteState, povm: Povm, sys: int) -> Ensemble:
    """
    Measure one subsystem and return the post-measurement ensemble on the rest

    Pure states measured by rank-1 POVMs give pure members (kets); otherwise
    members are density matrices. Outcomes with probability below
    OUTCOME_DROP are dropped and their mass recorded.
    """
    if not 0 <= sys < len(state.dims):
        raise ValueError(f"Subsystem {sys} out of range for dims {state.dims}")
    if povm.dim != state.dims[sys]:
        raise ValueError(f"POVM acts on dimension {povm.dim}, subsystem {sys} has {state.dims[sys]}")
    rest = [i for i in range(len(state.dims)) if i != sys]
    rest_dims = [state.dims[i] for i in rest]

    unnormalized = []
    if state.is_pure and povm.rank1:
        t = np.moveaxis(state.data.reshape(state.dims), sys, 0).reshape(state.dims[sys], -1)
        for phi in povm.to_isometry() @ t:
            unnormalized.append((float(np.vdot(phi, phi).real), phi))
    else:
        rho = state.density()
        before = np.eye(dims_product(state.dims[:sys]))
        after = np.eye(dims_product(state.dims[sys + 1:]))
        for element in povm.elements:
            op = tensor_all(before, element, after)
            sub = partial_trace(op @ rho, state.dims, rest)
            unnormalized.append((float(np.trace(sub).real), sub))

    weights, members, dropped = [], [], 0.0
    for x, (p, member) in enumerate(unnormalized):
        if p < config.OUTCOME_DROP:
            dropped += max(p, 0.0)
            logger.debug(f"Dropped outcome {x} with probability {p:.3e}")
            continue
        weights.append(p)
        members.append(member / np.sqrt(p) if np.ndim(member) == 1 else member / p)
    return Ensemble(weights=np.array(weights), states=members, dims=rest_dims, dropped_mass=dropped)


def induced_ensembles(rho_ab: np.ndarray, dims: Sequence[int]) -> Tuple[Ensemble, Ensemble]:
    """Ensembles on A induced by measuring B in the eigenbasis of rho_B and in its Fourier basis"""
    state = MultipartiteState("mixed", rho_ab, list(dims))
    basis = marginal_eigenbasis(state.data, state.dims)
    computational = Povm.from_isometry(basis.conj().T)
    fourier = Povm.from_isometry(fourier_basis(state.dims[1], basis).conj().T)
    return measure_on_subsystem(state, computational, 1), measure_on_subsystem(state, fourier, 1)


# ============================================================================
# RANDOM SAMPLING
# ============================================================================

def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """QR of a Ginibre matrix with the phases of R's diagonal fixed"""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def haar_isometry(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """n x d matrix with orthonormal columns"""
    return haar_unitary(n, rng)[:, :d]


def haar_ket(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_pure(dims: Sequence[int], seed: int, stream: int = STREAM_PURE) -> MultipartiteState:
    dims = [int(d) for d in dims]
    rng = make_rng(seed, stream)
    return MultipartiteState("pure", haar_ket(dims_product(dims), rng), dims, name=f"haar{dims}")


def random_mixed(dims: Sequence[int], rank: int, seed: int, stream: int = STREAM_MIXED) -> MultipartiteState:
    """Partial trace of a Haar pure state with a rank-dimensional ancilla"""
    dims = [int(d) for d in dims]
    total = dims_product(dims)
    if not 1 <= rank <= total:
        raise ValueError(f"Rank must be in [1, {total}], got {rank}")
    rng = make_rng(seed, stream)
    psi = haar_ket(total * rank, rng)
    rho = ptrace_ket(psi, [total, rank], [0])
    rho = (rho + rho.conj().T) / 2
    return MultipartiteState("mixed", rho / np.trace(rho).real, dims, name=f"mixed{dims}r{rank}")


def random_unitary(d: int, seed: int, stream: int = STREAM_UNITARY) -> np.ndarray:
    return haar_unitary(d, make_rng(seed, stream))


def random_povm(d: int, n: int, seed: int, stream: int = STREAM_POVM) -> Povm:
    """Rank-1 POVM from the columns of a Haar n x d isometry"""
    if n < d:
        raise ValueError(f"A rank-1 POVM on dimension {d} needs at least {d} outcomes, got {n}")
    return Povm.from_isometry(haar_isometry(n, d, make_rng(seed, stream)))


def random_separable(k: int, seed: int, dims: Sequence[int] = (2, 2),
                     stream: int = STREAM_SEPARABLE) -> MultipartiteState:
    """Random convex mixture of k Haar product pure states (rank <= k, separable)"""
    if k < 1:
        raise ValueError(f"Need at least one product state, got {k}")
    rng = make_rng(seed, stream)
    weights = rng.dirichlet(np.ones(k))
    total = dims_product(dims)
    rho = np.zeros((total, total), dtype=complex)
    for p in weights:
        ket = tensor_all(*[haar_ket(d, rng) for d in dims])
        rho += p * ket_to_dm(ket)
    return MultipartiteState("mixed", rho / np.trace(rho).real, list(dims), name=f"separable{k}")


# ============================================================================
# BUILTIN REGISTRY
# ============================================================================

BUILTIN_STATES: Dict[str, Callable[[], MultipartiteState]] = {
    "ghz2": lambda: ghz(2),
    "ghz3": lambda: ghz(3),
    "ghz4": lambda: ghz(4),
    "w3": lambda: w(3),
    "w4": lambda: w(4),
    "bell": bell,
    "remark1": remark1_state,
    "max_mixed2": lambda: max_mixed(2),
    "max_mixed3": lambda: max_mixed(3),
    "max_mixed4": lambda: max_mixed(4),
}

BUILTIN_FAMILIES: Dict[str, Callable[[int], MultipartiteState]] = {
    "ghz": ghz,
    "w": w,
    "max_mixed": max_mixed,
}

BUILTIN_FAMILY = re.compile(r"^(ghz|w|max_mixed)(?:\((\d+)\)|(\d+))$")


def get_builtin_state(name: str) -> MultipartiteState:
    """
    Get a builtin state by name

    Besides the registry entries, the families ghz(n), w(n) and max_mixed(d)
    are accepted for any size, written either "ghz5" or "ghz(5)".
    """
    key = name.strip().lower()
    if key in BUILTIN_STATES:
        return BUILTIN_STATES[key]()
    match = BUILTIN_FAMILY.match(key)
    if match is None:
        raise ValueError(f"Unknown builtin state: {name} (known: {', '.join(BUILTIN_STATES)}, ghz(n), w(n), max_mixed(d))")
    family, size = match.group(1), int(match.group(2) or match.group(3))
    return BUILTIN_FAMILIES[family](size)


# ============================================================================
# STATE FILE FORMAT
# ============================================================================

def _parse_entries(raw) -> np.ndarray:
    arr = np.asarray(raw, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise ValueError("data entries must be [re, im] pairs")
    return (arr[..., 0] + 1j * arr[..., 1]).reshape(-1)


def state_from_dict(obj: Dict) -> MultipartiteState:
    """
    Parse a state object {"kind", "dims", "data": [[re, im], ...]}

    Raises:
        ValueError listing every problem found
    """
    errors = []
    if not isinstance(obj, dict):
        raise ValueError("State must be a JSON object")

    kind = obj.get("kind")
    if kind not in ("pure", "mixed"):
        errors.append(f"kind must be 'pure' or 'mixed', got {kind!r}")
    dims = obj.get("dims")
    if not isinstance(dims, list) or not dims or not all(isinstance(d, int) and d >= 1 for d in dims):
        errors.append(f"dims must be a non-empty list of positive integers, got {dims!r}")
    data = None
    try:
        data = _parse_entries(obj.get("data"))
    except (TypeError, ValueError) as e:
        errors.append(f"data: {e}")

    if not errors:
        total = dims_product(dims)
        expected = total if kind == "pure" else total * total
        if data.shape[0] != expected:
            errors.append(f"data has {data.shape[0]} entries, expected {expected} for {kind} dims {dims}")
    if errors:
        raise ValueError("Malformed state: " + "; ".join(errors))

    if kind == "mixed":
        data = data.reshape(total, total)
    return MultipartiteState(kind, data, dims, labels=obj.get("labels"), name=obj.get("name", ""))


def load_state(path: Union[str, Path]) -> MultipartiteState:
    path = Path(path)
    try:
        with open(path, "r") as f:
            obj = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ValueError(f"Cannot read state file {path}: {e}")
    return state_from_dict(obj)


def save_state(state: MultipartiteState, path: Union[str, Path]):
    path = Path(path)
    with open(path, "w") as f:
        json.dump(state.to_dict(), f, indent=2)
    logger.info(f"Saved state to {path}")


def states_to_json(states: Sequence[MultipartiteState]) -> str:
    return json.dumps([s.to_dict() for s in states], indent=2)
