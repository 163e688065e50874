"""
Command-Line Front End
Computes measures on builtin or file states, runs verification suites,
samples random states and summarizes saved reports.

Exit codes: 0 success / no violations, 1 inequality violations, 2 usage or input error.
"""

import argparse
import logging
import sys
from dataclasses import asdict, dataclass
from datetime import datetime
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import config
from linalg import dims_product
from measures import (
    MeasureValue,
    coa_2q,
    coa_roof,
    coherent_information,
    concurrence_2q,
    concurrence_pure,
    concurrence_roof,
    curly_e,
    entropy,
    eoa_roof,
    eof_2q,
    eof_roof,
    henderson_vedral,
    localizable_ea,
    mutual_information,
    thm1_povm_bound,
    ue_direct,
    ue_product,
)
from optim import OptimConfig
from report import atomic_write, build_report, default_report_path, summarize, write_report
from states import (
    MultipartiteState,
    derive_seed,
    get_builtin_state,
    load_state,
    random_mixed,
    random_pure,
    random_separable,
    states_to_json,
)
from verify import SUITE_NAMES, run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_INPUT_ERROR = 2


def setup_logging(level: str = config.LOG_LEVEL):
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(config.LOG_FILE),
            logging.StreamHandler()
        ],
        force=True,
    )


@dataclass
class RunConfig:
    """Everything needed to replay a run; serialized into every report"""
    seed: int = config.DEFAULT_SEED
    restarts: int = config.DEFAULT_RESTARTS
    max_iterations: int = config.DEFAULT_MAX_ITERATIONS
    povm_card: Optional[int] = config.DEFAULT_POVM_CARD
    outcome_cap: Optional[int] = config.DEFAULT_OUTCOME_CAP
    tolerance: Optional[float] = config.TOLERANCE_OVERRIDE
    out: Optional[str] = config.DEFAULT_OUTPUT
    format: str = config.DEFAULT_FORMAT
    timing: bool = config.REPORT_TIMING

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        """Flags override the environment-backed defaults"""
        run = cls()
        for name in ("seed", "restarts", "max_iterations", "povm_card", "outcome_cap", "out", "format"):
            value = getattr(args, name, None)
            if value is not None:
                setattr(run, name, value)
        if getattr(args, "tol", None) is not None:
            run.tolerance = args.tol
        if getattr(args, "timing", False):
            run.timing = True
        if run.format not in ("json", "csv"):
            raise ValueError(f"Unknown format: {run.format}")
        if run.seed < 0:
            raise ValueError(f"Seed must be non-negative, got {run.seed}")
        return run

    def optim_config(self) -> OptimConfig:
        return OptimConfig(
            restarts=self.restarts,
            max_iterations=self.max_iterations,
            seed=self.seed,
            outcome_count=self.povm_card,
            outcome_cap=self.outcome_cap,
        )

    def to_dict(self) -> Dict:
        """Replay settings; the output path is left out so reruns elsewhere compare equal"""
        d = asdict(self)
        del d["out"]
        d["version"] = config.TOOL_VERSION
        return d


# ============================================================================
# MEASURE REGISTRY
# ============================================================================

def parse_cut(cut: str, state: MultipartiteState) -> List[List[int]]:
    """
    "A|BC" -> [[A], [B, C]];  "A,BC" likewise;  "ABC" -> [[A], [B], [C]]
    """
    cut = cut.strip()
    if "|" in cut:
        parts = cut.split("|")
    elif "," in cut:
        parts = cut.split(",")
    else:
        parts = list(cut)
    groups = [[state.index(label) for label in part.strip()] for part in parts]
    if any(not g for g in groups):
        raise ValueError(f"Empty group in cut {cut!r}")
    return groups


def _regrouped(state: MultipartiteState, groups: List[List[int]], parties: int) -> MultipartiteState:
    if len(groups) != parties:
        raise ValueError(f"Measure needs {parties} groups in the cut, got {len(groups)}")
    return state.regroup(groups)


def _is_two_qubit(state: MultipartiteState) -> bool:
    return state.dims == [2, 2]


def _entropy(state, groups, cfg, args) -> MeasureValue:
    keep = sorted(i for g in groups for i in g)
    return MeasureValue(entropy(state.marginal(keep)))


def _mutual_info(state, groups, cfg, args) -> MeasureValue:
    s = _regrouped(state, groups, 2)
    return MeasureValue(mutual_information(s.density(), s.dims))


def _coherent_info(state, groups, cfg, args) -> MeasureValue:
    s = _regrouped(state, groups, 2)
    return MeasureValue(coherent_information(s.density(), s.dims))


def _curly_e(state, groups, cfg, args) -> MeasureValue:
    if args.x is not None:
        return MeasureValue(curly_e(args.x))
    s = _regrouped(state, groups, 2)
    if s.is_pure and s.dims[0] == 2:
        return MeasureValue(curly_e(min(1.0, concurrence_pure(s.data, s.dims, [0]))))
    if not _is_two_qubit(s):
        raise ValueError("curly_e needs --x, a pure 2 x d cut or a two-qubit state")
    return MeasureValue(curly_e(min(1.0, concurrence_2q(s.density()))))


def _concurrence(state, groups, cfg, args) -> MeasureValue:
    s = _regrouped(state, groups, 2)
    if s.is_pure:
        return MeasureValue(concurrence_pure(s.data, s.dims, [0]))
    if _is_two_qubit(s):
        return MeasureValue(concurrence_2q(s.data))
    return concurrence_roof(s.data, s.dims, cfg)


def _coa(state, groups, cfg, args) -> MeasureValue:
    s = _regrouped(state, groups, 2)
    if _is_two_qubit(s):
        return MeasureValue(coa_2q(s.density()))
    return coa_roof(s.density(), s.dims, cfg)


def _eof(state, groups, cfg, args) -> MeasureValue:
    s = _regrouped(state, groups, 2)
    if _is_two_qubit(s):
        return MeasureValue(eof_2q(s.density()))
    return eof_roof(s.density(), s.dims, cfg)


def _eoa(state, groups, cfg, args) -> MeasureValue:
    s = _regrouped(state, groups, 2)
    return eoa_roof(s.density(), s.dims, cfg)


def _hv(state, groups, cfg, args) -> MeasureValue:
    s = _regrouped(state, groups, 2)
    return henderson_vedral(s.density(), s.dims, cfg)


def _ue(state, groups, cfg, args) -> MeasureValue:
    s = _regrouped(state, groups, 2)
    return ue_direct(s.density(), s.dims, cfg)


def _ue_product(state, groups, cfg, args) -> MeasureValue:
    s = _regrouped(state, groups, 3)
    return ue_product(s.data, s.dims, cfg, measured=(1, 2))


def _localizable_ea(state, groups, cfg, args) -> MeasureValue:
    s = _regrouped(state, groups, 4)
    return localizable_ea(s.data, s.dims, cfg, measured=(2, 3))


def _thm1_bound(state, groups, cfg, args) -> MeasureValue:
    s = _regrouped(state, groups, 2)
    value, povm = thm1_povm_bound(s.density(), s.dims)
    return MeasureValue(value, bound_direction="upper-estimate", certificate=povm)


# name -> (function, default cut)
MEASURES: Dict[str, Tuple[Callable, str]] = {
    "entropy": (_entropy, "A"),
    "mutual_info": (_mutual_info, "AB"),
    "coherent_info": (_coherent_info, "AB"),
    "curly_e": (_curly_e, "AB"),
    "concurrence": (_concurrence, "AB"),
    "coa": (_coa, "AB"),
    "eof": (_eof, "AB"),
    "eoa": (_eoa, "AB"),
    "hv": (_hv, "AB"),
    "ue": (_ue, "AB"),
    "ue_product": (_ue_product, "ACD"),
    "localizable_ea": (_localizable_ea, "ABCD"),
    "thm1_bound": (_thm1_bound, "AB"),
}


def compute_measure(state: MultipartiteState, measure: str, cut: Optional[str],
                    cfg: OptimConfig, args: argparse.Namespace) -> Dict:
    if measure not in MEASURES:
        raise ValueError(f"Unknown measure: {measure} (known: {', '.join(MEASURES)})")
    function, default_cut = MEASURES[measure]
    cut = cut or default_cut
    value = function(state, parse_cut(cut, state), cfg, args)
    return {"measure": measure, "state": state.name or f"{state.kind}{state.dims}", "cut": cut, **value.to_dict()}


# ============================================================================
# COMMANDS
# ============================================================================

def _resolve_state(args: argparse.Namespace) -> MultipartiteState:
    if args.state and args.builtin:
        raise ValueError("Give either --state or --builtin, not both")
    if args.state:
        state = load_state(args.state)
        state.name = state.name or Path(args.state).stem
        return state
    if args.builtin:
        return get_builtin_state(args.builtin)
    raise ValueError("A state is required: --state FILE or --builtin NAME")


def _output_path(run: RunConfig, stem: str) -> Path:
    return Path(run.out) if run.out else default_report_path(stem, run.format)


def cmd_compute(args: argparse.Namespace) -> int:
    run = RunConfig.from_args(args)
    state = _resolve_state(args)
    start_time = datetime.now()
    result = compute_measure(state, args.measure, args.cut, run.optim_config(), args)
    runtime_ms = (datetime.now() - start_time).total_seconds() * 1000 if run.timing else None

    print(f"{result['measure']}({result['state']}, {result['cut']}) = {result['value']:.10f} "
          f"[{result['method']}, {result['bound_direction']}]")
    report = build_report([result], run.to_dict(), runtime_ms)
    write_report(report, _output_path(run, f"compute_{args.measure}"), run.format)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    run = RunConfig.from_args(args)
    if args.suite not in SUITE_NAMES:
        raise ValueError(f"Unknown suite: {args.suite} (known: {', '.join(SUITE_NAMES)})")
    suite_report = run_suite(args.suite, args.samples, run.seed, run.optim_config(),
                             timing=run.timing, tolerance=run.tolerance)
    results = [r.to_dict() for r in suite_report.results]
    report = build_report(results, dict(run.to_dict(), suite=args.suite, samples=args.samples),
                          suite_report.runtime_ms)

    print("\n" + "=" * 80)
    print(f"SUITE {args.suite.upper()}")
    print("=" * 80)
    if args.suite == "remark1":
        for r in suite_report.results:
            status = "✓" if r.passed else "✗"
            print(f"{status} {r.check_id:.<40} lhs {r.lhs:.7f}  rhs {r.rhs:.7f}")
    print(f"Results: {len(suite_report.results)}")
    print(f"Violations: {len(suite_report.violations)}")
    print(f"Worst margin: {suite_report.worst_margin}")
    print("=" * 80)

    write_report(report, _output_path(run, f"verify_{args.suite}"), run.format)
    return EXIT_VIOLATIONS if suite_report.violations else EXIT_OK


def parse_dims(text: str) -> List[int]:
    try:
        dims = [int(d) for d in text.split(",")]
    except ValueError:
        raise ValueError(f"Invalid dims: {text!r}")
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"Invalid dims: {text!r}")
    return dims


def sample_states(dims: List[int], kind: str, rank: Optional[int], count: int, seed: int) -> List[MultipartiteState]:
    """Deterministic random states; state i uses derive_seed(seed, i)"""
    if count < 1:
        raise ValueError(f"Count must be positive, got {count}")
    states = []
    for i in range(count):
        sample_seed = derive_seed(seed, i)
        if kind == "pure":
            states.append(random_pure(dims, sample_seed))
        elif kind == "mixed":
            states.append(random_mixed(dims, rank or dims_product(dims), sample_seed))
        elif kind == "separable":
            states.append(random_separable(rank or 2, sample_seed, dims=dims))
        else:
            raise ValueError(f"Unknown state kind: {kind}")
    return states


def cmd_sample(args: argparse.Namespace) -> int:
    run = RunConfig.from_args(args)
    states = sample_states(parse_dims(args.dims), args.kind, args.rank, args.count, run.seed)
    path = Path(run.out) if run.out else config.RESULTS_DIR / "samples.json"
    atomic_write(path, states_to_json(states) + "\n")
    logger.info(f"Saved {len(states)} states to {path}")
    return EXIT_OK


def cmd_summarize(args: argparse.Namespace) -> int:
    summarize(args.report)
    return EXIT_OK


# ============================================================================
# ARGUMENT PARSING
# ============================================================================

def _add_run_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--seed", type=int, help=f"Seed (env {config.ENV_PREFIX}SEED, default {config.DEFAULT_SEED})")
    parser.add_argument("--restarts", type=int, help="Random restarts per optimization")
    parser.add_argument("--max-iter", dest="max_iterations", type=int, help="Iterations per local search")
    parser.add_argument("--povm-card", dest="povm_card", type=int, help="Outcome count of searched measurements")
    parser.add_argument("--outcome-cap", dest="outcome_cap", type=int, help="Largest outcome count escalation may reach")
    parser.add_argument("--tol", type=float, help="Override every check tolerance")
    parser.add_argument("--out", help="Output path (default under results/)")
    parser.add_argument("--format", choices=["json", "csv"], help="Report format")
    parser.add_argument("--timing", action="store_true", help="Record runtime_ms in reports")
    parser.add_argument("--log-level", dest="log_level", help="Logging level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Unlocalizable entanglement measures and verification harness")
    sub = parser.add_subparsers(dest="command", required=True)

    compute = sub.add_parser("compute", help="Compute one measure on one state")
    compute.add_argument("--state", help="State file (JSON)")
    compute.add_argument("--builtin", help="Builtin state name (ghz3, w3, remark1, max_mixed(2), ...)")
    compute.add_argument("--measure", required=True, help=f"One of: {', '.join(MEASURES)}")
    compute.add_argument("--cut", help='Subsystem roles, e.g. "AB" or "A|BC"')
    compute.add_argument("--x", type=float, help="Argument of curly_e")
    _add_run_flags(compute)
    compute.set_defaults(handler=cmd_compute)

    verify = sub.add_parser("verify", help="Run a verification suite")
    verify.add_argument("--suite", required=True, help=f"One of: {', '.join(SUITE_NAMES)}")
    verify.add_argument("--samples", "--n", dest="samples", type=int, default=config.DEFAULT_SAMPLES,
                        help="Samples per suite")
    _add_run_flags(verify)
    verify.set_defaults(handler=cmd_verify)

    sample = sub.add_parser("sample", help="Sample random states into a JSON file")
    sample.add_argument("--dims", required=True, help="Comma-separated dimensions, e.g. 2,2,2")
    sample.add_argument("--kind", choices=["pure", "mixed", "separable"], default="pure")
    sample.add_argument("--rank", type=int, help="Rank of mixed states / product terms of separable states")
    sample.add_argument("--count", type=int, default=1)
    _add_run_flags(sample)
    sample.set_defaults(handler=cmd_sample)

    summary = sub.add_parser("summarize", help="Summarize a saved verification report")
    summary.add_argument("report", help="Report file (JSON or CSV)")
    summary.add_argument("--log-level", dest="log_level", help="Logging level")
    summary.set_defaults(handler=cmd_summarize)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT_ERROR if e.code else EXIT_OK

    setup_logging(args.log_level or config.LOG_LEVEL)
    try:
        return args.handler(args)
    except ValueError as e:
        logger.error(str(e))
        return EXIT_INPUT_ERROR
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
