"""
Verification Harness
Named identity/inequality checks, random-state sweeps with margin reporting
and the reproduction of the rank-three separable example.

Margin convention: margin = rhs - lhs and a check passes iff margin >= -tol.
Equalities report margin = -|rhs - lhs|.
"""

from dataclasses import asdict, dataclass, field, replace
from datetime import datetime
from typing import Callable, Dict, List, Optional, Tuple
import logging

import numpy as np
from tqdm import tqdm

import config
from linalg import dims_product, matrix_rank, permute_subsystems, ptrace_ket, purify
from measures import (
    coa_2q,
    coherent_information,
    concurrence_2q,
    concurrence_pure,
    curly_e,
    entropy,
    eoa_from_pure,
    eoa_roof,
    eof_2q,
    eof_roof,
    localizable_ea,
    mutual_information,
    omega_informations,
    ppt_min_eigenvalue,
    rank2_tradeoff_values,
    thm1_povm_bound,
    ue_direct,
    ue_via_purification,
)
from optim import OptimConfig, decomposition_members
from states import (
    MultipartiteState,
    Povm,
    derive_seed,
    haar_isometry,
    make_rng,
    measure_on_subsystem,
    random_mixed,
    random_povm,
    random_pure,
    random_separable,
    remark1_state,
)

logger = logging.getLogger(__name__)

CLASSIFICATIONS = ("exact", "conservative", "optimizer-dependent")

# Target values of the rank-three separable example
REMARK1_EA = float(np.log2(3) - 2 / 3)
REMARK1_UE = float(5 / 3 - np.log2(3))
REMARK1_CONCURRENCE = float(2 * np.sqrt(2) / 3)
REMARK1_TOL = 1e-4

# Stream used by suites that need a second independent state per sample
STREAM_PARTNER = 5
STREAM_RANK = 6


# ============================================================================
# RESULT TYPES
# ============================================================================

@dataclass
class CheckResult:
    """Outcome of one check on one state"""
    check_id: str
    state: str
    seed: Optional[int]
    lhs: Optional[float]
    rhs: Optional[float]
    margin: Optional[float]
    tolerance: float
    classification: str
    passed: bool
    certificates: Dict = field(default_factory=dict)
    note: str = ""
    error: Optional[str] = None
    escalated: bool = False

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass
class SuiteReport:
    """All check results of one sweep"""
    suite: str
    samples: int
    seed: int
    seeds: List[int]
    results: List[CheckResult]
    runtime_ms: Optional[float] = None

    @property
    def violations(self) -> List[CheckResult]:
        return [r for r in self.results if not r.passed]

    @property
    def worst_margin(self) -> Optional[float]:
        margins = [r.margin for r in self.results if r.margin is not None]
        return float(min(margins)) if margins else None

    def to_dict(self) -> Dict:
        return {
            "suite": self.suite,
            "samples": self.samples,
            "seed": self.seed,
            "seeds": list(self.seeds),
            "results": [r.to_dict() for r in self.results],
            "violations": len(self.violations),
            "worst_margin": self.worst_margin,
            "runtime_ms": self.runtime_ms,
        }


@dataclass
class Evaluation:
    """What a check function computes before tolerance and classification are applied"""
    lhs: float
    rhs: float
    margin: Optional[float] = None
    certificates: Dict = field(default_factory=dict)
    note: str = ""

    def __post_init__(self):
        self.lhs = float(self.lhs)
        self.rhs = float(self.rhs)
        self.margin = float(self.rhs - self.lhs if self.margin is None else self.margin)


def _equality(lhs: float, rhs: float, **kwargs) -> Evaluation:
    return Evaluation(lhs, rhs, margin=-abs(rhs - lhs), **kwargs)


# ============================================================================
# STATE ADAPTERS
# ============================================================================

def _bipartite(state: MultipartiteState) -> Tuple[np.ndarray, List[int]]:
    """rho_AB of a bipartite state or of the first two parties of a pure state"""
    if len(state.dims) == 2:
        return state.density(), list(state.dims)
    if state.is_pure and len(state.dims) >= 3:
        return state.marginal([0, 1]), state.dims[:2]
    raise ValueError(f"Check needs a bipartite state or a pure state, got {state.kind} dims {state.dims}")


def _pure(state: MultipartiteState, parties: Optional[int] = None, qubits: bool = False) -> np.ndarray:
    if not state.is_pure:
        raise ValueError(f"Check needs a pure state, got {state.kind}")
    if parties is not None and len(state.dims) != parties:
        raise ValueError(f"Check needs {parties} parties, got dims {state.dims}")
    if qubits and any(d != 2 for d in state.dims):
        raise ValueError(f"Check needs qubits, got dims {state.dims}")
    return state.data


def _two_qubit(state: MultipartiteState) -> np.ndarray:
    rho, dims = _bipartite(state)
    if dims != [2, 2]:
        raise ValueError(f"Check needs a two-qubit state, got dims {dims}")
    return rho


def _certs(**values) -> Dict:
    return {k: float(v) for k, v in values.items()}


# ============================================================================
# CHECKS
# ============================================================================

def check_kw_identity(state: MultipartiteState, cfg: OptimConfig, povm: Povm = None, **_) -> Evaluation:
    """Per-POVM: [S(A) - sum p S(rho_A^x)] + sum p E(phi_AC^x) = S(A)"""
    if state.is_pure:
        psi, dims = state.data, list(state.dims)
    else:
        rho, dims = _bipartite(state)
        psi, dims = purify(rho, dims)
    if len(dims) < 2:
        raise ValueError(f"Check needs at least two parties, got dims {dims}")
    povm = povm or random_povm(dims[1], 2 * dims[1], cfg.seed)

    pure = MultipartiteState("pure", psi, dims)
    s_a = entropy(pure.marginal([0]))

    localized = measure_on_subsystem(pure, povm, 1)
    rest_dims = localized.dims
    entanglements = [entropy(ptrace_ket(ket, rest_dims, [0])) for ket in localized.states]
    average_entanglement = float(np.dot(localized.weights, entanglements))

    conditional = measure_on_subsystem(pure.marginal_state([0, 1]), povm, 1)
    average_entropy = float(np.dot(conditional.weights, [entropy(s) for s in conditional.states]))
    chi = s_a - average_entropy
    return _equality(
        chi + average_entanglement, s_a,
        certificates=_certs(chi=chi, average_entanglement=average_entanglement, outcomes=povm.n),
    )


def check_lemma1_equiv(state: MultipartiteState, cfg: OptimConfig, **_) -> Evaluation:
    rho, dims = _bipartite(state)
    direct = ue_direct(rho, dims, cfg)
    purified = ue_via_purification(rho, dims, cfg)
    return _equality(direct.value, purified.value,
                     certificates=_certs(ue_direct=direct.value, ue_via_purification=purified.value))


def check_subadd(state: MultipartiteState, cfg: OptimConfig, partner: MultipartiteState = None, **_) -> Evaluation:
    """E_u(rho (x) sigma) <= E_u(rho) + E_u(sigma), joint search seeded with the product of both optima"""
    rho, dims = _bipartite(state)
    sigma, sigma_dims = _bipartite(partner) if partner is not None else (rho, dims)
    first = ue_direct(rho, dims, cfg)
    second = ue_direct(sigma, sigma_dims, cfg)

    joint = permute_subsystems(np.kron(rho, sigma), dims + sigma_dims, [0, 2, 1, 3])
    joint_dims = [dims[0] * sigma_dims[0], dims[1] * sigma_dims[1]]
    seed = np.kron(first.optim.params[0], second.optim.params[0])
    joint_cfg = replace(cfg, restarts=max(1, cfg.restarts // 4), candidates=[seed])
    together = ue_direct(joint, joint_dims, joint_cfg)
    return Evaluation(
        together.value, first.value + second.value,
        certificates=_certs(ue_joint=together.value, ue_first=first.value, ue_second=second.value),
    )


def check_lower_bound(state: MultipartiteState, cfg: OptimConfig, **_) -> Evaluation:
    """max(I_c, 0) <= E_u"""
    rho, dims = _bipartite(state)
    ic = coherent_information(rho, dims)
    ue = ue_direct(rho, dims, cfg)
    return Evaluation(max(ic, 0.0), ue.value, certificates=_certs(coherent_information=ic))


def check_upper_bound(state: MultipartiteState, cfg: OptimConfig, **_) -> Evaluation:
    """E_u <= I/2, the pool contains the mixed eigen/Fourier measurement"""
    rho, dims = _bipartite(state)
    ue = ue_direct(rho, dims, cfg)
    bound, _ = thm1_povm_bound(rho, dims)
    info = mutual_information(rho, dims)
    return Evaluation(ue.value, info / 2, certificates=_certs(entropy_defect_bound=bound, mutual_information=info))


def check_omega_identities(state: MultipartiteState, cfg: OptimConfig, **_) -> Evaluation:
    rho, dims = _bipartite(state)
    info = omega_informations(rho, dims)
    residuals = [info[k] - info[f"expected {k}"] for k in ("I(X:AB)", "I(Y:AB)", "I(XY:AB)")]
    chi_sum = info["chi0"] + info["chi1"]
    bound, _ = thm1_povm_bound(rho, dims)
    margin = min(
        min(-abs(r) for r in residuals),
        info["I(A:B)"] - chi_sum,
        info["I(A:B)"] / 2 - bound,
    )
    return Evaluation(chi_sum, info["I(A:B)"], margin=margin, certificates=_certs(**{
        "chi0": info["chi0"], "chi1": info["chi1"], "max_identity_residual": max(abs(r) for r in residuals),
    }))


def _ea_lower(psi: np.ndarray, dims: List[int], helper: int, cfg: OptimConfig) -> float:
    """Best available lower estimate of E_a between party 0 and the party other than `helper`"""
    estimate = eoa_from_pure(psi, dims, 0, helper, cfg).value
    if dims == [2, 2, 2]:
        other = 2 if helper == 1 else 1
        estimate = max(estimate, curly_e(min(1.0, coa_2q(ptrace_ket(psi, dims, [0, other])))))
    return estimate


def check_tripartite_polygamy(state: MultipartiteState, cfg: OptimConfig, **_) -> Evaluation:
    """S(A) <= E_a(AB) + E_a(AC)"""
    psi = _pure(state, parties=3)
    dims = list(state.dims)
    ea_ab = _ea_lower(psi, dims, 2, cfg)
    ea_ac = _ea_lower(psi, dims, 1, cfg)
    return Evaluation(entropy(state.marginal([0])), ea_ab + ea_ac, certificates=_certs(ea_ab=ea_ab, ea_ac=ea_ac))


def check_curly_e_property(state: Optional[MultipartiteState], cfg: OptimConfig,
                           grid: int = config.CURLY_E_GRID, **_) -> Evaluation:
    """E(sqrt(x^2 + y^2)) <= E(x) + E(y) on a grid of the unit quarter-disk"""
    axis = np.linspace(0.0, 1.0, grid)
    x, y = np.meshgrid(axis, axis, indexing="ij")
    inside = x ** 2 + y ** 2 <= 1.0
    x, y = x[inside], y[inside]
    lhs = curly_e(np.minimum(np.sqrt(x ** 2 + y ** 2), 1.0))
    rhs = curly_e(x) + curly_e(y)
    worst = int(np.argmin(rhs - lhs))
    return Evaluation(lhs[worst], rhs[worst], certificates=_certs(
        points=int(inside.sum()), worst_x=x[worst], worst_y=y[worst],
    ))


def check_three_tangle(state: MultipartiteState, cfg: OptimConfig, **_) -> Evaluation:
    """C_A(BC)^2 = C_AB^2 + (C^a_AC)^2"""
    psi = _pure(state, parties=3, qubits=True)
    c_a = concurrence_pure(psi, state.dims, [0])
    c_ab = concurrence_2q(state.marginal([0, 1]))
    ca_ac = coa_2q(state.marginal([0, 2]))
    return _equality(c_a ** 2, c_ab ** 2 + ca_ac ** 2, certificates=_certs(c_a_bc=c_a, c_ab=c_ab, ca_ac=ca_ac))


def check_three_qubit_polygamy(state: MultipartiteState, cfg: OptimConfig, **_) -> Evaluation:
    """S(A) <= E_f(AB) + E(C^a_AC)"""
    _pure(state, parties=3, qubits=True)
    ef_ab = eof_2q(state.marginal([0, 1]))
    ea_ac = curly_e(min(1.0, coa_2q(state.marginal([0, 2]))))
    return Evaluation(entropy(state.marginal([0])), ef_ab + ea_ac, certificates=_certs(ef_ab=ef_ab, ea_ac=ea_ac))


def check_rank2_bounds(state: MultipartiteState, cfg: OptimConfig, **_) -> Evaluation:
    """I<- <= E_a and E_u <= E_f for a two-qubit state of rank <= 2"""
    rho = _two_qubit(state)
    rank = matrix_rank(rho)
    if rank > 2:
        raise ValueError(f"Check needs rank <= 2, got rank {rank}")
    values = rank2_tradeoff_values(rho, cfg)
    hv, ea, ue, ef = (values[k].value for k in ("hv", "eoa", "ue", "eof"))
    margins = [ea - hv, ef - ue]
    lhs, rhs = (hv, ea) if margins[0] <= margins[1] else (ue, ef)
    return Evaluation(lhs, rhs, certificates=_certs(hv=hv, eoa=ea, ue=ue, eof=ef, rank=rank))


def _pairwise_coa(state: MultipartiteState) -> List[float]:
    return [coa_2q(state.marginal([0, i])) for i in range(1, len(state.dims))]


def check_coa_polygamy(state: MultipartiteState, cfg: OptimConfig, **_) -> Evaluation:
    """C_A1(A2...An)^2 <= sum_i (C^a_A1Ai)^2"""
    psi = _pure(state, qubits=True)
    if len(state.dims) < 3:
        raise ValueError(f"Check needs at least three qubits, got dims {state.dims}")
    c = concurrence_pure(psi, state.dims, [0])
    coas = _pairwise_coa(state)
    return Evaluation(c ** 2, sum(x ** 2 for x in coas), certificates=_certs(c_a1_rest=c))


def check_nqubit_polygamy(state: MultipartiteState, cfg: OptimConfig, **_) -> Evaluation:
    """S(A1) <= sum_i E(C^a_A1Ai)"""
    _pure(state, qubits=True)
    if len(state.dims) < 3:
        raise ValueError(f"Check needs at least three qubits, got dims {state.dims}")
    terms = [curly_e(min(1.0, x)) for x in _pairwise_coa(state)]
    return Evaluation(entropy(state.marginal([0])), sum(terms))


def check_zero_ue_separable(state: MultipartiteState, cfg: OptimConfig, **_) -> Evaluation:
    """
    A two-qubit state with (numerically) zero UE must be PPT

    Conversely, a PPT state of rank <= 2 is separable with zero UE, so there
    the estimate itself is held to SEPARABLE_UE_BOUND.
    """
    rho = _two_qubit(state)
    ue = ue_direct(rho, [2, 2], cfg).value
    lowest = ppt_min_eigenvalue(rho, [2, 2])
    rank = matrix_rank(rho)
    certificates = _certs(ue=ue, ppt_min_eigenvalue=lowest, rank=rank)
    if rank <= 2 and lowest >= -config.PSD_TOL:
        return Evaluation(ue, config.SEPARABLE_UE_BOUND, certificates=certificates)
    if ue >= config.ZERO_UE_EPSILON:
        return Evaluation(0.0, 0.0, certificates=certificates,
                          note=f"premise not met: UE estimate {ue:.3e} >= {config.ZERO_UE_EPSILON}")
    return Evaluation(0.0, lowest, certificates=certificates)


def check_mixed_tradeoff(state: MultipartiteState, cfg: OptimConfig, **_) -> Evaluation:
    """S(A) >= E~_a(AB) + E_u(AC), E_u seeded with the C-marginal of E~_a's measurement"""
    psi = _pure(state, parties=4)
    dims = list(state.dims)
    localized = localizable_ea(psi, dims, cfg, measured=(2, 3))
    rho_ac = ptrace_ket(psi, dims, [0, 2])
    seeded = replace(cfg, candidates=[localized.optim.params[0]])
    ue_ac = ue_direct(rho_ac, [dims[0], dims[2]], seeded)
    return Evaluation(
        localized.value + ue_ac.value, entropy(state.marginal([0])),
        certificates=_certs(localizable_ea=localized.value, ue_ac=ue_ac.value),
    )


def check_cor2_tradeoff(state: MultipartiteState, cfg: OptimConfig, **_) -> Evaluation:
    """E~_a(AB) <= E_a(A(BC)), the D-assisted search seeded with the D-marginal of E~_a's measurement"""
    psi = _pure(state, parties=4)
    dims = list(state.dims)
    localized = localizable_ea(psi, dims, cfg, measured=(2, 3))
    seeded = replace(cfg, candidates=[localized.optim.params[1]])
    assisted = eoa_from_pure(psi, dims, 0, 3, seeded)
    return Evaluation(
        localized.value, assisted.value,
        certificates=_certs(localizable_ea=localized.value, ea_a_bc=assisted.value),
    )


@dataclass
class CheckSpec:
    """Registry entry for one check"""
    check_id: str
    run: Callable[..., Evaluation]
    classification: str
    uses_optimizer: bool
    description: str


CHECKS: Dict[str, CheckSpec] = {spec.check_id: spec for spec in [
    CheckSpec("kw_identity", check_kw_identity, "exact", False,
              "per-measurement entropy defect + localized entanglement = S(A)"),
    CheckSpec("lemma1_equiv", check_lemma1_equiv, "optimizer-dependent", True,
              "UE over measurements equals UE via the purification"),
    CheckSpec("subadd", check_subadd, "conservative", True,
              "two-copy subadditivity of UE"),
    CheckSpec("lower_bound", check_lower_bound, "conservative", True,
              "UE >= max(coherent information, 0)"),
    CheckSpec("upper_bound", check_upper_bound, "conservative", True,
              "UE <= I(A:B)/2"),
    CheckSpec("omega_identities", check_omega_identities, "exact", False,
              "Omega-state mutual informations and chi0 + chi1 <= I(A:B)"),
    CheckSpec("tripartite_polygamy", check_tripartite_polygamy, "conservative", True,
              "S(A) <= E_a(AB) + E_a(AC)"),
    CheckSpec("curly_e_property", check_curly_e_property, "exact", False,
              "E(sqrt(x^2 + y^2)) <= E(x) + E(y)"),
    CheckSpec("three_tangle", check_three_tangle, "exact", False,
              "C_A(BC)^2 = C_AB^2 + (C^a_AC)^2"),
    CheckSpec("three_qubit_polygamy", check_three_qubit_polygamy, "conservative", False,
              "S(A) <= E_f(AB) + E_a(AC) for three qubits"),
    CheckSpec("rank2_bounds", check_rank2_bounds, "optimizer-dependent", True,
              "I<- <= E_a and UE <= E_f for two-qubit states of rank <= 2"),
    CheckSpec("coa_polygamy", check_coa_polygamy, "exact", False,
              "C_A1(rest)^2 <= sum of squared pairwise CoA"),
    CheckSpec("nqubit_polygamy", check_nqubit_polygamy, "conservative", False,
              "S(A1) <= sum of pairwise E_a for n qubits"),
    CheckSpec("zero_ue_separable", check_zero_ue_separable, "exact", True,
              "zero UE implies PPT for two qubits"),
    CheckSpec("mixed_tradeoff", check_mixed_tradeoff, "conservative", True,
              "S(A) >= E~_a(AB) + E_u(AC)"),
    CheckSpec("cor2_tradeoff", check_cor2_tradeoff, "conservative", True,
              "E_a(A(BC)) >= E~_a(AB)"),
]}


def get_check(check_id: str) -> CheckSpec:
    if check_id not in CHECKS:
        raise ValueError(f"Unknown check: {check_id}")
    return CHECKS[check_id]


def _describe(state: Optional[MultipartiteState]) -> str:
    if state is None:
        return "grid"
    return state.name or f"{state.kind}{state.dims}"


def run_check(check_id: str, state: Optional[MultipartiteState], cfg: Optional[OptimConfig] = None,
              tolerance: Optional[float] = None, **extras) -> CheckResult:
    """
    Run one check on one state

    Args:
        tolerance: replaces the check's tolerance for this call only

    Raises:
        ValueError for an unknown check or a state the check cannot take
    """
    spec = get_check(check_id)
    cfg = cfg or OptimConfig()
    evaluation = spec.run(state, cfg, **extras)
    tol = config.check_tolerance(check_id, tolerance)
    passed = bool(np.isfinite(evaluation.margin) and evaluation.margin >= -tol)
    return CheckResult(
        check_id=check_id,
        state=_describe(state),
        seed=cfg.seed,
        lhs=evaluation.lhs,
        rhs=evaluation.rhs,
        margin=evaluation.margin,
        tolerance=tol,
        classification=spec.classification,
        passed=passed,
        certificates=evaluation.certificates,
        note=evaluation.note,
    )


# ============================================================================
# SUITES
# ============================================================================

Sampler = Callable[[int, int], Tuple[Optional[MultipartiteState], Dict]]


def _haar(*dims_cycle) -> Sampler:
    def sample(seed: int, index: int):
        return random_pure(dims_cycle[index % len(dims_cycle)], seed), {}
    return sample


def _mixed(*dims_cycle, max_rank: Optional[int] = None) -> Sampler:
    def sample(seed: int, index: int):
        dims = dims_cycle[index % len(dims_cycle)]
        top = min(max_rank or dims_product(dims), dims_product(dims))
        rank = int(make_rng(seed, STREAM_RANK).integers(1, top + 1))
        return random_mixed(dims, rank, seed), {}
    return sample


def _kw_sample(seed: int, index: int):
    state = random_pure([(2, 2, 2), (2, 3, 2), (3, 2, 2)][index % 3], seed)
    return state, {"povm": random_povm(state.dims[1], 2 * state.dims[1], seed)}


def _subadd_sample(seed: int, index: int):
    return random_mixed((2, 2), 2, seed), {"partner": random_mixed((2, 2), 2, seed, stream=STREAM_PARTNER)}


def _rank2_sample(seed: int, index: int):
    return random_mixed((2, 2), 1 if index % 4 == 3 else 2, seed), {}


def _separable_sample(seed: int, index: int):
    return random_separable(1 + index % 2, seed), {}


def _grid_sample(seed: int, index: int):
    return None, {}


@dataclass
class SuiteSpec:
    """A check together with the states it is swept over"""
    name: str
    check_id: str
    sampler: Sampler
    description: str
    fixed_count: Optional[int] = None


SUITES: Dict[str, SuiteSpec] = {spec.name: spec for spec in [
    SuiteSpec("kw_identity", "kw_identity", _kw_sample, "Haar pure (2,2,2)/(2,3,2)/(3,2,2) + random rank-1 POVM"),
    SuiteSpec("lemma1_equiv", "lemma1_equiv", _mixed((2, 2), (3, 2), max_rank=3), "random rank <= 3 on (2,2)/(3,2)"),
    SuiteSpec("subadd", "subadd", _subadd_sample, "pairs of random rank-2 two-qubit states"),
    SuiteSpec("lower_bound", "lower_bound", _mixed((2, 2), (3, 2)), "random mixed (2,2)/(3,2)"),
    SuiteSpec("upper_bound", "upper_bound", _mixed((2, 2), (3, 3), (2, 4)), "random mixed (2,2)/(3,3)/(2,4)"),
    SuiteSpec("omega_identities", "omega_identities", _mixed((2, 2), (2, 3), (2, 4)), "random rho_AB, d_B in {2,3,4}"),
    SuiteSpec("tripartite_polygamy", "tripartite_polygamy", _haar((2, 2, 2)), "Haar three-qubit pure"),
    SuiteSpec("tripartite_polygamy_qudit", "tripartite_polygamy", _haar((3, 3, 3), (2, 3, 4)),
              "Haar pure (3,3,3)/(2,3,4)"),
    SuiteSpec("curly_e_property", "curly_e_property", _grid_sample, "201 x 201 quarter-disk grid", fixed_count=1),
    SuiteSpec("three_tangle", "three_tangle", _haar((2, 2, 2)), "Haar three-qubit pure"),
    SuiteSpec("three_qubit_polygamy", "three_qubit_polygamy", _haar((2, 2, 2)), "Haar three-qubit pure"),
    SuiteSpec("rank2_bounds", "rank2_bounds", _rank2_sample, "random two-qubit rank <= 2"),
    SuiteSpec("coa_polygamy", "coa_polygamy", _haar((2, 2, 2, 2)), "Haar four-qubit pure"),
    SuiteSpec("nqubit_polygamy", "nqubit_polygamy", _haar((2, 2, 2, 2)), "Haar four-qubit pure"),
    SuiteSpec("zero_ue_separable", "zero_ue_separable", _separable_sample, "mixtures of <= 2 product states"),
    SuiteSpec("mixed_tradeoff", "mixed_tradeoff", _haar((2, 2, 2, 2)), "Haar four-qubit pure"),
    SuiteSpec("cor2_tradeoff", "cor2_tradeoff", _haar((2, 2, 2, 2)), "Haar four-qubit pure"),
]}

SUITE_NAMES = list(SUITES) + ["remark1", "all"]


class SuiteRunner:
    """Sweeps one suite over deterministic per-sample seeds"""

    def __init__(self, suite: str, count: int = config.DEFAULT_SAMPLES, seed: int = config.DEFAULT_SEED,
                 cfg: Optional[OptimConfig] = None, timing: bool = config.REPORT_TIMING,
                 tolerance: Optional[float] = None):
        """
        Args:
            suite: suite name (see SUITES)
            count: number of samples (ignored by fixed-count suites)
            seed: suite seed; sample i uses derive_seed(seed, i)
            cfg: optimizer settings; each sample gets its own seed
            timing: record runtime_ms in the report
            tolerance: replaces the check's tolerance for every sample
        """
        if suite not in SUITES:
            raise ValueError(f"Unknown suite: {suite}")
        if count < 1:
            raise ValueError(f"Sample count must be positive, got {count}")
        self.spec = SUITES[suite]
        self.count = self.spec.fixed_count or count
        self.seed = seed
        self.cfg = cfg or OptimConfig()
        self.timing = timing
        self.tolerance = tolerance
        self.check = get_check(self.spec.check_id)

    def run(self) -> SuiteReport:
        logger.info(f"Suite {self.spec.name}: {self.count} samples, seed {self.seed} ({self.spec.description})")
        start_time = datetime.now()
        results, seeds = [], []

        for index in tqdm(range(self.count), desc=self.spec.name, leave=False):
            sample_seed = derive_seed(self.seed, index)
            seeds.append(sample_seed)
            results.append(self._run_sample(sample_seed, index))

        report = SuiteReport(suite=self.spec.name, samples=self.count, seed=self.seed, seeds=seeds, results=results)
        if self.timing:
            report.runtime_ms = (datetime.now() - start_time).total_seconds() * 1000
        for violation in report.violations:
            logger.warning(
                f"Violation in {violation.check_id} on {violation.state} (seed {violation.seed}): "
                f"margin {violation.margin} < -{violation.tolerance} {violation.error or ''}"
            )
        logger.info(f"Suite {self.spec.name}: {len(report.violations)} violations, worst margin {report.worst_margin}")
        return report

    def _run_sample(self, sample_seed: int, index: int) -> CheckResult:
        cfg = replace(self.cfg, seed=sample_seed, candidates=[])
        state = None
        try:
            state, extras = self.spec.sampler(sample_seed, index)
            result = run_check(self.spec.check_id, state, cfg, self.tolerance, **extras)
            if not result.passed and self.check.uses_optimizer:
                logger.info(f"Re-running {self.spec.check_id} sample {index} with "
                            f"{config.ESCALATION_FACTOR}x restarts (margin {result.margin:.3e})")
                result = run_check(self.spec.check_id, state, cfg.scaled(config.ESCALATION_FACTOR),
                                   self.tolerance, **extras)
                result.escalated = True
            return result
        except Exception as e:
            logger.error(f"Error in {self.spec.check_id} sample {index} (seed {sample_seed}): {e}")
            return CheckResult(
                check_id=self.spec.check_id,
                state=_describe(state),
                seed=sample_seed,
                lhs=None,
                rhs=None,
                margin=None,
                tolerance=config.check_tolerance(self.spec.check_id, self.tolerance),
                classification=self.check.classification,
                passed=False,
                error=str(e),
            )


def run_suite(suite: str, count: int = config.DEFAULT_SAMPLES, seed: int = config.DEFAULT_SEED,
              cfg: Optional[OptimConfig] = None, timing: bool = config.REPORT_TIMING,
              tolerance: Optional[float] = None) -> SuiteReport:
    """Run a named suite, "remark1" or "all" (every suite followed by remark1)"""
    if suite == "remark1":
        return run_remark1(cfg, timing=timing, tolerance=tolerance)
    if suite != "all":
        return SuiteRunner(suite, count, seed, cfg, timing, tolerance).run()

    start_time = datetime.now()
    reports = [SuiteRunner(name, count, seed, cfg, False, tolerance).run() for name in SUITES]
    reports.append(run_remark1(cfg, timing=False, tolerance=tolerance))
    combined = SuiteReport(
        suite="all",
        samples=sum(r.samples for r in reports),
        seed=seed,
        seeds=[s for r in reports for s in r.seeds],
        results=[res for r in reports for res in r.results],
    )
    if timing:
        combined.runtime_ms = (datetime.now() - start_time).total_seconds() * 1000
    return combined


# ============================================================================
# THE RANK-THREE SEPARABLE EXAMPLE
# ============================================================================

def _fact_tolerance(default: float, override: Optional[float]) -> float:
    if override is not None:
        return override
    return config.TOLERANCE_OVERRIDE if config.TOLERANCE_OVERRIDE is not None else default


def _fact(name: str, lhs: float, rhs: float, margin: float, tol: float, classification: str,
          seed: int, note: str = "", **certificates) -> CheckResult:
    return CheckResult(
        check_id=f"remark1.{name}",
        state="remark1",
        seed=seed,
        lhs=float(lhs),
        rhs=float(rhs),
        margin=float(margin),
        tolerance=tol,
        classification=classification,
        passed=bool(margin >= -tol),
        certificates=_certs(**certificates),
        note=note,
    )


def run_remark1(cfg: Optional[OptimConfig] = None, timing: bool = config.REPORT_TIMING,
                decompositions: int = 16, tolerance: Optional[float] = None) -> SuiteReport:
    """
    Reproduce the two-qubit rank-three separable state with non-zero UE:
    S(rho_A) = 1, every decomposition of rho_AC has member concurrence 2 sqrt(2)/3,
    E_a(rho_AC) = E_f(rho_AC) = log2 3 - 2/3, E_u(rho_AB) = 5/3 - log2 3,
    rank(rho_AB) = 3, rho_AB is PPT, and hence separable states can have UE > 0.
    """
    cfg = cfg or OptimConfig()
    start_time = datetime.now()
    state = remark1_state()
    rho_ab = state.marginal([0, 1])
    rho_ac = state.marginal([0, 2])
    seed = cfg.seed
    facts = []

    s_a = entropy(state.marginal([0]))
    facts.append(_fact("entropy_a", s_a, 1.0, -abs(s_a - 1.0), _fact_tolerance(1e-9, tolerance), "exact", seed))

    rng = make_rng(seed, 0)
    concurrences = []
    for _ in range(decompositions):
        p, kets = decomposition_members(rho_ac, haar_isometry(4, 2, rng))
        concurrences.extend(concurrence_pure(k, [2, 3], [0]) for k, w in zip(kets, p) if w > 1e-12)
    deviation = max(abs(c - REMARK1_CONCURRENCE) for c in concurrences)
    facts.append(_fact("member_concurrence", max(concurrences), REMARK1_CONCURRENCE, -deviation,
                       _fact_tolerance(1e-6, tolerance), "exact", seed, members=len(concurrences)))

    optimizer_tol = _fact_tolerance(REMARK1_TOL, tolerance)
    eoa = eoa_roof(rho_ac, [2, 3], cfg).value
    eof = eof_roof(rho_ac, [2, 3], cfg).value
    facts.append(_fact("eoa_ac", eoa, REMARK1_EA, -abs(eoa - REMARK1_EA), optimizer_tol, "optimizer-dependent", seed))
    facts.append(_fact("eof_ac", eof, REMARK1_EA, -abs(eof - REMARK1_EA), optimizer_tol, "optimizer-dependent", seed))

    ue = ue_direct(rho_ab, [2, 2], cfg).value
    ue_purified = ue_via_purification(rho_ab, [2, 2], cfg).value
    facts.append(_fact("ue_ab", ue, REMARK1_UE, -abs(ue - REMARK1_UE), optimizer_tol, "optimizer-dependent", seed,
                       ue_via_purification=ue_purified))

    rank = matrix_rank(rho_ab, tol=1e-10)
    facts.append(_fact("rank_ab", rank, 3, -abs(rank - 3), _fact_tolerance(0.0, tolerance), "exact", seed))

    lowest = ppt_min_eigenvalue(rho_ab, [2, 2])
    facts.append(_fact("ppt_ab", 0.0, lowest, lowest, _fact_tolerance(1e-9, tolerance), "exact", seed))

    facts.append(_fact("separable_with_ue", config.ZERO_UE_EPSILON, ue, ue - config.ZERO_UE_EPSILON,
                       _fact_tolerance(0.0, tolerance), "optimizer-dependent", seed,
                       note="PPT two-qubit state (separable) with UE > 0"))

    report = SuiteReport(suite="remark1", samples=1, seed=seed, seeds=[seed], results=facts)
    if timing:
        report.runtime_ms = (datetime.now() - start_time).total_seconds() * 1000
    for fact in facts:
        logger.info(f"{fact.check_id}: lhs {fact.lhs:.7f} rhs {fact.rhs:.7f} {'PASS' if fact.passed else 'FAIL'}")
    return report
