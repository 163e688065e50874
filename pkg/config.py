"""
Configuration for unlocalizable-entanglement computations
Numerical tolerances, optimizer defaults and environment overrides
"""

import os
from pathlib import Path
from typing import Dict, Optional
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

TOOL_VERSION = "1.0.0"

# ============================================================================
# PROJECT PATHS
# ============================================================================

PROJECT_ROOT = Path(__file__).parent
RESULTS_DIR = PROJECT_ROOT / "results"
LOG_FILE = RESULTS_DIR / "ue.log"

# Create directories if they don't exist
for directory in [RESULTS_DIR]:
    directory.mkdir(parents=True, exist_ok=True)


# ============================================================================
# ENVIRONMENT OVERRIDES (prefix UE_, mirrors the CLI flags)
# ============================================================================

ENV_PREFIX = "UE_"


def env_int(name: str, default: Optional[int]) -> Optional[int]:
    """Read an integer override, falling back to the default"""
    raw = os.getenv(ENV_PREFIX + name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{ENV_PREFIX}{name} must be an integer, got {raw!r}")


def env_float(name: str, default: Optional[float]) -> Optional[float]:
    """Read a float override, falling back to the default"""
    raw = os.getenv(ENV_PREFIX + name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"{ENV_PREFIX}{name} must be a number, got {raw!r}")


def env_str(name: str, default: Optional[str]) -> Optional[str]:
    raw = os.getenv(ENV_PREFIX + name)
    return default if raw is None or raw.strip() == "" else raw.strip()


def env_flag(name: str, default: bool = False) -> bool:
    raw = os.getenv(ENV_PREFIX + name)
    if raw is None:
        return default
    return raw.strip().lower() in ("1", "true", "yes", "on")


# ============================================================================
# NUMERICAL TOLERANCES
# ============================================================================

HERMITIAN_TOL = 1e-10        # ||M - M^dagger||_inf accepted as Hermitian
EIGEN_CLIP = 1e-12           # eigenvalues in [-EIGEN_CLIP, 0) are set to 0
PSD_TOL = 1e-10              # most negative eigenvalue accepted as PSD
RANK_TOL = 1e-12             # eigenvalues above this count towards the rank
TRACE_TOL = 1e-9             # |tr(rho) - 1| accepted as normalized
NORM_TOL = 1e-10             # | ||psi|| - 1 | accepted for pure states
POVM_TOL = 1e-9              # ||sum M_x - I||_inf accepted for a POVM
OUTCOME_DROP = 1e-14         # outcomes below this probability are dropped
ENSEMBLE_TOL = 1e-9          # ensemble reconstruction residual

# ============================================================================
# OPTIMIZER DEFAULTS
# ============================================================================

DEFAULT_SEED = env_int("SEED", 0)
DEFAULT_RESTARTS = env_int("RESTARTS", 32)
DEFAULT_MAX_ITERATIONS = env_int("MAX_ITERATIONS", 400)
DEFAULT_STEP_TOL = 1e-7
DEFAULT_VALUE_TOL = 1e-9
DEFAULT_INITIAL_STEP = 0.5
DEFAULT_POVM_CARD = env_int("POVM_CARD", None)       # None: min(r^2, 2r+2)
DEFAULT_OUTCOME_CAP = env_int("OUTCOME_CAP", None)   # None: cardinality + 2

# Restart multiplier used when an optimizer-dependent check fails once
ESCALATION_FACTOR = 4

# ============================================================================
# CHECK TOLERANCES (margin = rhs - lhs, pass iff margin >= -tol)
# ============================================================================

CHECK_TOLERANCES: Dict[str, float] = {
    "kw_identity": 1e-10,
    "lemma1_equiv": 2e-3,
    "subadd": 1e-9,
    "lower_bound": 1e-9,
    "upper_bound": 1e-9,
    "omega_identities": 1e-9,
    "tripartite_polygamy": 1e-3,
    "curly_e_property": 1e-12,
    "three_tangle": 1e-8,
    "three_qubit_polygamy": 1e-8,
    "rank2_bounds": 2e-3,
    "coa_polygamy": 1e-8,
    "nqubit_polygamy": 1e-8,
    "zero_ue_separable": 1e-9,
    "mixed_tradeoff": 1e-9,
    "cor2_tradeoff": 1e-9,
}

# Premise threshold for zero_ue_separable: an estimate below this counts as zero UE
ZERO_UE_EPSILON = 1e-4

# Largest UE estimate accepted for a PPT two-qubit state of rank <= 2 (true value is 0)
SEPARABLE_UE_BOUND = env_float("SEPARABLE_UE_BOUND", 1e-3)

# Global override applied on top of the table (UE_TOL / --tol)
TOLERANCE_OVERRIDE = env_float("TOL", None)

# ============================================================================
# REPORTING
# ============================================================================

DEFAULT_FORMAT = env_str("FORMAT", "json")
DEFAULT_OUTPUT = env_str("OUT", None)
REPORT_TIMING = env_flag("REPORT_TIMING", False)
LOG_LEVEL = env_str("LOG_LEVEL", "INFO")

DEFAULT_SAMPLES = 50
CURLY_E_GRID = 201

# Optimizer-backed sweeps in test.py use their full sample counts only when set (UE_FULL_SWEEPS=1)
FULL_SWEEPS = env_flag("FULL_SWEEPS", False)


def check_tolerance(check_id: str, override: Optional[float] = None) -> float:
    """Tolerance for a check: an explicit override first, then UE_TOL, then the table"""
    if override is not None:
        return override
    if TOLERANCE_OVERRIDE is not None:
        return TOLERANCE_OVERRIDE
    if check_id not in CHECK_TOLERANCES:
        raise ValueError(f"Unknown check: {check_id}")
    return CHECK_TOLERANCES[check_id]


def validate_check_table():
    """Validate that every registered check has a tolerance entry"""
    from verify import CHECKS

    print("\n" + "=" * 80)
    print("CHECK TOLERANCE TABLE")
    print("=" * 80)

    complete = True
    for check_id in CHECKS:
        tol = CHECK_TOLERANCES.get(check_id)
        status = "✅" if tol is not None else "❌"
        if tol is None:
            complete = False
        print(f"{status} {check_id:.<40} {tol}")

    print("=" * 80)
    if complete:
        print("✅ Every registered check has a tolerance")
    else:
        print("❌ Some checks have no tolerance entry")
    print("=" * 80 + "\n")

    return complete


if __name__ == "__main__":
    validate_check_table()

    print("\n" + "=" * 80)
    print("CONFIGURATION SUMMARY")
    print("=" * 80)
    print(f"Version: {TOOL_VERSION}")
    print(f"Results directory: {RESULTS_DIR}")
    print(f"Seed: {DEFAULT_SEED}")
    print(f"Restarts: {DEFAULT_RESTARTS}")
    print(f"Max iterations: {DEFAULT_MAX_ITERATIONS}")
    print(f"POVM cardinality: {DEFAULT_POVM_CARD or 'min(r^2, 2r+2)'}")
    print(f"Tolerance override: {TOLERANCE_OVERRIDE}")
    print("=" * 80)
