"""
Optimization Engine
Local search over pure-state decompositions (HJW isometries) and rank-1
POVMs, shared by every roof-type measure.

Decompositions of a rank-r density matrix with eigenpairs (l_i, e_i) are
parameterized by n x r isometries U: sqrt(p_j)|phi_j> = sum_i U_ji sqrt(l_i)|e_i>.
Rank-1 POVMs on a d-dimensional subsystem are n x d isometries V whose rows
are the bras <m_x|. Both live on the same kind of manifold and are searched
by the same derivative-free routine.
"""

from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

import config
from linalg import (
    check_dims,
    eig_hermitian,
    partial_trace,
    permute_subsystems,
    ptrace_ket,
    spectral_entropy,
)
from states import fourier_basis, haar_isometry, make_rng

logger = logging.getLogger(__name__)

OBJECTIVES = ("min", "max")

# Streams of the optimizer's generators (see states.make_rng)
STREAM_RESTART_BASE = 100
STREAM_ESCALATION_BASE = 10_000


# ============================================================================
# DOMAIN TYPES
# ============================================================================

@dataclass
class IsometryParam:
    """n x r matrix with orthonormal columns"""
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.matrix.ndim != 2 or self.matrix.shape[0] < self.matrix.shape[1]:
            raise ValueError(f"An isometry needs n >= r, got shape {self.matrix.shape}")
        gram = self.matrix.conj().T @ self.matrix
        residual = np.max(np.abs(gram - np.eye(self.matrix.shape[1])))
        if residual > 1e-9:
            raise ValueError(f"Columns are not orthonormal (residual {residual:.3e})")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def r(self) -> int:
        return self.matrix.shape[1]


@dataclass
class OptimConfig:
    """Search settings; results are deterministic given the config"""
    restarts: int = config.DEFAULT_RESTARTS
    max_iterations: int = config.DEFAULT_MAX_ITERATIONS
    step_tol: float = config.DEFAULT_STEP_TOL
    value_tol: float = config.DEFAULT_VALUE_TOL
    seed: int = config.DEFAULT_SEED
    outcome_count: Optional[int] = config.DEFAULT_POVM_CARD
    outcome_cap: Optional[int] = config.DEFAULT_OUTCOME_CAP
    initial_step: float = config.DEFAULT_INITIAL_STEP
    escalate: bool = True
    candidates: List = field(default_factory=list)

    def __post_init__(self):
        if self.restarts < 0 or self.max_iterations < 1:
            raise ValueError("restarts must be >= 0 and max_iterations >= 1")
        if self.step_tol <= 0 or self.value_tol <= 0 or self.initial_step <= 0:
            raise ValueError("step_tol, value_tol and initial_step must be positive")
        if self.outcome_count is not None and self.outcome_count < 1:
            raise ValueError(f"outcome_count must be positive, got {self.outcome_count}")

    def scaled(self, factor: int) -> "OptimConfig":
        return replace(self, restarts=max(1, self.restarts) * factor)

    def with_candidates(self, candidates: Sequence) -> "OptimConfig":
        return replace(self, candidates=list(candidates))

    def to_dict(self) -> Dict:
        d = asdict(self)
        d["candidates"] = len(self.candidates)
        return d


@dataclass
class OptimResult:
    """Best value over seeded candidates and random restarts"""
    value: float
    params: List[np.ndarray]
    objective: str
    converged: bool
    outcome_count: int
    trace: List[Dict] = field(default_factory=list)
    escalations: List[Dict] = field(default_factory=list)
    evaluations: int = 0

    def to_dict(self) -> Dict:
        return {
            "value": float(self.value),
            "objective": self.objective,
            "converged": bool(self.converged),
            "outcome_count": int(self.outcome_count),
            "starts": len(self.trace),
            "escalations": self.escalations,
            "evaluations": int(self.evaluations),
        }


# ============================================================================
# MANIFOLD SEARCH
# ============================================================================

def _pad_rows(v: np.ndarray, n: int) -> np.ndarray:
    if v.shape[0] >= n:
        return v
    return np.vstack([v, np.zeros((n - v.shape[0], v.shape[1]), dtype=complex)])


def _random_generator(n: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Eigen-pairs (h, W) of a random sparse Hermitian H; the move is exp(i t H)"""
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    mask = rng.random((n, n)) < 0.5
    mask = mask | mask.T | np.eye(n, dtype=bool)
    h = (a * mask + (a * mask).conj().T) / 2
    h /= max(np.linalg.norm(h), 1e-300)
    return np.linalg.eigh(h)


def _move(v: np.ndarray, direction: Tuple[np.ndarray, np.ndarray], t: float) -> np.ndarray:
    vals, vecs = direction
    return (vecs * np.exp(1j * t * vals)) @ (vecs.conj().T @ v)


def _local_search(
    evaluate: Callable[[List[np.ndarray]], float],
    start: List[np.ndarray],
    sign: float,
    cfg: OptimConfig,
    rng: np.random.Generator,
) -> Tuple[float, List[np.ndarray], int, bool, int]:
    """
    Derivative-free descent of sign * evaluate on a product of isometry manifolds

    Each iteration draws a random direction for one factor, tries +-step,
    fits a parabola through the three values and keeps the best point.
    The step halves whenever no trial point improves by more than value_tol.

    Returns:
        (best value, best params, iterations, converged, evaluations)
    """
    params = [p.copy() for p in start]
    current = sign * evaluate(params)
    evaluations = 1
    if all(p.shape[0] == 1 for p in params):
        return sign * current, params, 0, True, evaluations

    step = cfg.initial_step
    movable = [k for k, p in enumerate(params) if p.shape[0] > 1]
    iteration = 0
    converged = False
    while iteration < cfg.max_iterations:
        iteration += 1
        k = movable[iteration % len(movable)]
        direction = _random_generator(params[k].shape[0], rng)

        def step_to(t):
            trial = list(params)
            trial[k] = _move(params[k], direction, t)
            return sign * evaluate(trial), trial

        g_plus, p_plus = step_to(step)
        g_minus, p_minus = step_to(-step)
        evaluations += 2
        best_g, best_p = current, None
        for g, p in ((g_plus, p_plus), (g_minus, p_minus)):
            if g < best_g:
                best_g, best_p = g, p

        curvature = g_plus - 2 * current + g_minus
        if curvature > 0:
            t_star = float(np.clip(step * (g_minus - g_plus) / (2 * curvature), -2 * step, 2 * step))
            if abs(abs(t_star) - step) > 1e-12 * step and abs(t_star) > 1e-15:
                g_star, p_star = step_to(t_star)
                evaluations += 1
                if g_star < best_g:
                    best_g, best_p = g_star, p_star

        improvement = current - best_g
        if best_p is not None:
            params, current = best_p, best_g
        if improvement > cfg.value_tol:
            step = min(2 * step, np.pi)
        else:
            step /= 2
            if step < cfg.step_tol:
                converged = True
                break

    # re-orthonormalize against drift from repeated products
    params = [_orthonormalize(p) for p in params]
    return evaluate(params), params, iteration, converged, evaluations + 1


def _orthonormalize(v: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(v, full_matrices=False)
    return u @ vh


def _run_pool(
    evaluate: Callable[[List[np.ndarray]], float],
    pool: List[Tuple[str, List[np.ndarray]]],
    random_start: Callable[[np.random.Generator], List[np.ndarray]],
    objective: str,
    cfg: OptimConfig,
    stream_base: int,
) -> Tuple[float, List[np.ndarray], bool, List[Dict], int]:
    """Search from every seeded candidate and every random restart; keep the first best"""
    if objective not in OBJECTIVES:
        raise ValueError(f"Unknown objective: {objective}")
    sign = 1.0 if objective == "min" else -1.0

    starts = list(pool)
    for r in range(cfg.restarts):
        starts.append((f"random{r}", None))

    best_value, best_params, best_converged = None, None, False
    trace, evaluations = [], 0
    for index, (label, params) in enumerate(starts):
        rng = make_rng(cfg.seed, stream_base + index)
        if params is None:
            params = random_start(rng)
        value, found, iterations, converged, count = _local_search(evaluate, params, sign, cfg, rng)
        evaluations += count
        trace.append({
            "start": label,
            "value": float(value),
            "iterations": iterations,
            "converged": converged,
        })
        if best_value is None or sign * value < sign * best_value:
            best_value, best_params, best_converged = value, found, converged
    return best_value, best_params, best_converged, trace, evaluations


def _search_with_escalation(
    evaluate: Callable[[List[np.ndarray]], float],
    pool: List[Tuple[str, List[np.ndarray]]],
    outcome_counts: List[int],
    factor_dims: List[int],
    objective: str,
    cfg: OptimConfig,
) -> OptimResult:
    """Run the pool at the base outcome counts, then grow the last factor while it helps"""
    sign = 1.0 if objective == "min" else -1.0

    def random_start_for(counts):
        return lambda rng: [haar_isometry(n, d, rng) for n, d in zip(counts, factor_dims)]

    counts = list(outcome_counts)
    padded = [(label, [_pad_rows(p, n) for p, n in zip(params, counts)]) for label, params in pool]
    value, params, converged, trace, evaluations = _run_pool(
        evaluate, padded, random_start_for(counts), objective, cfg, STREAM_RESTART_BASE
    )

    escalations = []
    cap = cfg.outcome_cap if cfg.outcome_cap is not None else counts[-1] + 2
    level = 0
    while cfg.escalate and counts[-1] < cap:
        level += 1
        grown = counts[:-1] + [counts[-1] + 1]
        seed_params = [_pad_rows(p, n) for p, n in zip(params, grown)]
        small = replace(cfg, restarts=max(1, cfg.restarts // 4))
        new_value, new_params, new_converged, new_trace, count = _run_pool(
            evaluate, [("best", seed_params)], random_start_for(grown), objective, small,
            STREAM_ESCALATION_BASE * level,
        )
        evaluations += count
        trace.extend(dict(t, outcome_count=grown[-1]) for t in new_trace)
        gain = sign * (value - new_value)
        if gain <= cfg.value_tol:
            break
        logger.info(f"Outcome count {counts[-1]} -> {grown[-1]} improved the optimum by {gain:.3e}")
        escalations.append({"from": counts[-1], "to": grown[-1], "gain": float(gain)})
        counts = grown
        value, params, converged = new_value, new_params, new_converged

    if not converged:
        logger.info(f"Search stopped at max_iterations before the step tolerance (value {value:.6g})")
    return OptimResult(
        value=float(value),
        params=params,
        objective=objective,
        converged=converged,
        outcome_count=int(np.prod([p.shape[0] for p in params])),
        trace=trace,
        escalations=escalations,
        evaluations=evaluations,
    )


def default_outcome_count(rank: int, dim: int, cfg: OptimConfig) -> int:
    """min(r^2, 2r+2) outcomes for rank r, never fewer than the dimension searched"""
    if cfg.outcome_count is not None:
        return max(dim, cfg.outcome_count)
    return max(dim, min(rank * rank, 2 * rank + 2))


# ============================================================================
# DECOMPOSITIONS
# ============================================================================

def hjw_frame(rho: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Support eigenvalues (descending) and eigenvectors (columns) of rho"""
    vals, vecs = eig_hermitian(rho)
    support = np.flatnonzero(vals > config.RANK_TOL)[::-1]
    return vals[support], vecs[:, support]


def decomposition_members(rho: np.ndarray, isometry: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(probabilities, normalized kets as rows) of the decomposition an isometry selects"""
    vals, vecs = hjw_frame(rho)
    phi = (vecs * np.sqrt(vals)) @ np.asarray(isometry).T
    p = np.sum(np.abs(phi) ** 2, axis=0)
    kets = np.where(p > config.OUTCOME_DROP, phi / np.sqrt(np.maximum(p, 1e-300)), 0.0)
    return p, kets.T


def optimize_decomposition(
    rho: np.ndarray,
    dims: Sequence[int],
    objective: str,
    score: Callable[[np.ndarray], np.ndarray],
    cfg: Optional[OptimConfig] = None,
) -> OptimResult:
    """
    Extremize sum_j p_j score(phi_j) over pure-state decompositions of rho

    Args:
        rho: density matrix on dims; subsystem 0 is one side of the cut
        dims: subsystem dimensions
        objective: "min" or "max"
        score: maps normalized squared Schmidt coefficients, shape (n, k),
            of each member across the cut 0 | rest to a value per member
        cfg: search settings; cfg.candidates are n_c x r isometries in the
            hjw_frame ordering

    Raises:
        ValueError if the configured outcome count is below the rank
    """
    cfg = cfg or OptimConfig()
    rho = np.asarray(rho, dtype=complex)
    dims = check_dims(dims, rho.shape[0])
    vals, vecs = hjw_frame(rho)
    r = len(vals)
    frame = vecs * np.sqrt(vals)
    d_a = dims[0]
    d_rest = rho.shape[0] // d_a

    if cfg.outcome_count is not None and cfg.outcome_count < r:
        raise ValueError(f"Outcome count {cfg.outcome_count} is below the rank {r}")
    n = default_outcome_count(r, r, cfg)

    def evaluate(params):
        phi = (frame @ params[0].T).T.reshape(-1, d_a, d_rest)
        s2 = np.linalg.svd(phi, compute_uv=False) ** 2
        p = s2.sum(axis=1)
        keep = p > config.OUTCOME_DROP
        if not np.any(keep):
            return 0.0
        return float(np.sum(p[keep] * score(s2[keep] / p[keep, None])))

    pool = [("eigen", [np.eye(r, dtype=complex)])]
    for k, candidate in enumerate(cfg.candidates):
        candidate = candidate[0] if isinstance(candidate, (list, tuple)) else candidate
        if candidate.shape[1] != r:
            raise ValueError(f"Seeded decomposition {k} has {candidate.shape[1]} columns, rank is {r}")
        pool.append((f"seed{k}", [np.asarray(candidate, dtype=complex)]))

    return _search_with_escalation(evaluate, pool, [n], [r], objective, cfg)


# ============================================================================
# RANK-1 MEASUREMENTS
# ============================================================================

def conditional_entropy_average(rho_tm: np.ndarray, d_t: int, v: np.ndarray) -> float:
    """
    sum_x p_x S(rho_T^x) for the rank-1 POVM with rows v on the measured side

    rho_tm is a density matrix on T x M with T (dimension d_t) first.
    """
    d_m = rho_tm.shape[0] // d_t
    r4 = rho_tm.reshape(d_t, d_m, d_t, d_m)
    blocks = np.einsum("xb,abcd,xd->xac", v, r4, v.conj(), optimize=True)
    lam = np.linalg.eigvalsh((blocks + np.conj(np.swapaxes(blocks, 1, 2))) / 2)
    p = lam.sum(axis=1)
    keep = p > config.OUTCOME_DROP
    lam, p = lam[keep], p[keep]
    return float(np.sum(spectral_entropy(lam, axis=1)) - np.sum(spectral_entropy(p)))


def target_measured_marginal(
    data: np.ndarray, dims: Sequence[int], target: int, measured: Sequence[int]
) -> Tuple[np.ndarray, List[int]]:
    """Density matrix on (target, measured...) in that order, from a ket or density matrix"""
    data = np.asarray(data, dtype=complex)
    dims = check_dims(dims, data.shape[0])
    keep = [target] + list(measured)
    if len(set(keep)) != len(keep):
        raise ValueError(f"Target {target} and measured {list(measured)} must be distinct")
    ordered = sorted(keep)
    rho = ptrace_ket(data, dims, ordered) if data.ndim == 1 else partial_trace(data, dims, ordered)
    sub_dims = [dims[i] for i in ordered]
    rho = permute_subsystems(rho, sub_dims, [ordered.index(i) for i in keep])
    return rho, [dims[i] for i in keep]


def _factor_pool(marginal: np.ndarray) -> List[Tuple[str, np.ndarray]]:
    """Eigenbasis, its Fourier basis, computational basis and the mixed 2d-outcome measurement"""
    d = marginal.shape[0]
    _, vecs = eig_hermitian(marginal)
    eigen = vecs[:, ::-1]
    fourier = fourier_basis(d, eigen)
    return [
        ("eigen", eigen.conj().T),
        ("fourier", fourier.conj().T),
        ("computational", np.eye(d, dtype=complex)),
        ("mixed", np.vstack([eigen.conj().T, fourier.conj().T]) / np.sqrt(2)),
    ]


def _povm_search(
    rho_tm: np.ndarray,
    tm_dims: List[int],
    objective: str,
    cfg: OptimConfig,
) -> OptimResult:
    """Extremize S(rho_T) - sum p_xy S(rho_T^xy) over products of rank-1 POVMs, one per measured factor"""
    d_t = tm_dims[0]
    factor_dims = tm_dims[1:]
    nf = len(factor_dims)
    s_t = float(spectral_entropy(np.linalg.eigvalsh(partial_trace(rho_tm, tm_dims, [0]))))

    def evaluate(params):
        v = params[0]
        for extra in params[1:]:
            v = np.kron(v, extra)
        return s_t - conditional_entropy_average(rho_tm, d_t, v)

    marginals = [partial_trace(rho_tm, tm_dims, [k + 1]) for k in range(nf)]
    pools = [_factor_pool(m) for m in marginals]
    pool = []
    for kind in range(len(pools[0])):
        pool.append((pools[0][kind][0], [pools[f][kind][1] for f in range(nf)]))
    for k, candidate in enumerate(cfg.candidates):
        candidate = list(candidate) if isinstance(candidate, (list, tuple)) else [candidate]
        if len(candidate) != nf or any(c.shape[1] != d for c, d in zip(candidate, factor_dims)):
            raise ValueError(f"Seeded measurement {k} does not match measured dims {factor_dims}")
        pool.append((f"seed{k}", [np.asarray(c, dtype=complex) for c in candidate]))

    counts = []
    for m, d in zip(marginals, factor_dims):
        rank = int(np.sum(np.linalg.eigvalsh(m) > config.RANK_TOL))
        counts.append(default_outcome_count(rank, d, cfg))
    return _search_with_escalation(evaluate, pool, counts, factor_dims, objective, cfg)


def optimize_povm(
    psi: np.ndarray,
    dims: Sequence[int],
    measured_sys: int,
    objective: str,
    cfg: Optional[OptimConfig] = None,
    target: int = 0,
) -> OptimResult:
    """
    Extremize S(rho_A) - sum_x p_x S(rho_A^x) over rank-1 POVMs on one subsystem

    `psi` may be a ket (the global pure state) or a density matrix; A is the
    `target` subsystem. Seeded candidates in cfg.candidates are n_c x d isometries.
    """
    cfg = cfg or OptimConfig()
    rho_tm, tm_dims = target_measured_marginal(psi, dims, target, [measured_sys])
    return _povm_search(rho_tm, tm_dims, objective, cfg)


def optimize_product_povm(
    psi: np.ndarray,
    dims: Sequence[int],
    sys_pair: Sequence[int],
    objective: str,
    cfg: Optional[OptimConfig] = None,
    target: int = 0,
) -> OptimResult:
    """
    Extremize S(rho_A) - sum_xy p_xy S(rho_A^xy) over product rank-1 POVMs M_x (x) N_y

    The result's params are the marginal isometries [M, N]; seeded candidates
    are pairs of isometries.
    """
    cfg = cfg or OptimConfig()
    if len(sys_pair) != 2:
        raise ValueError(f"Expected two measured subsystems, got {list(sys_pair)}")
    rho_tm, tm_dims = target_measured_marginal(psi, dims, target, sys_pair)
    return _povm_search(rho_tm, tm_dims, objective, cfg)


def povm_to_decomposition(
    psi: np.ndarray,
    dims: Sequence[int],
    measured_sys: int,
    isometry: np.ndarray,
) -> np.ndarray:
    """
    HJW isometry of the decomposition of the unmeasured marginal that a rank-1
    POVM on `measured_sys` of the pure state `psi` induces
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    dims = check_dims(dims, psi.shape[0])
    rest = [i for i in range(len(dims)) if i != measured_sys]
    t = np.moveaxis(psi.reshape(dims), measured_sys, 0).reshape(dims[measured_sys], -1)
    phi = np.asarray(isometry) @ t
    vals, vecs = hjw_frame(ptrace_ket(psi, dims, rest))
    return (phi @ vecs.conj()) / np.sqrt(vals)
