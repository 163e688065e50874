"""
Report Assembly and Analysis
Builds the JSON/CSV reports written by the CLI and summarizes saved reports
"""

import json
import os
import tempfile
from pathlib import Path
from typing import Dict, List, Optional, Union
import logging

import numpy as np
import pandas as pd
from scipy import stats

import config

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv")

# Flat CSV projection of a check result
CSV_COLUMNS = [
    "check_id", "state", "seed", "lhs", "rhs", "margin", "tolerance",
    "classification", "passed", "escalated", "note", "error",
]


def _json_safe(value):
    """Convert numpy scalars/arrays and non-finite floats into JSON values"""
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        return _json_safe(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else None
    return value


def build_report(results: List[Dict], run_config: Dict, runtime_ms: Optional[float] = None) -> Dict:
    """
    Assemble {"version", "config", "results", "summary"}

    `results` are check-result dicts (with "passed" and "margin") or
    measure-result dicts (always counted as passing).
    """
    margins = [r["margin"] for r in results if r.get("margin") is not None]
    violations = sum(1 for r in results if not r.get("passed", True))
    return _json_safe({
        "version": config.TOOL_VERSION,
        "config": run_config,
        "results": results,
        "summary": {
            "violations": violations,
            "worst_margin": min(margins) if margins else None,
            "runtime_ms": runtime_ms,
        },
    })


def atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def report_to_json(report: Dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def report_to_frame(report: Dict) -> pd.DataFrame:
    """Flat projection of the results; columns missing from a result are left empty"""
    df = pd.DataFrame(report["results"])
    if "check_id" in df.columns:
        for column in CSV_COLUMNS:
            if column not in df.columns:
                df[column] = None
        df = df[CSV_COLUMNS + [c for c in df.columns if c not in CSV_COLUMNS and c != "certificates"]]
    for column in df.columns:
        if df[column].map(lambda v: isinstance(v, (dict, list))).any():
            df[column] = df[column].map(lambda v: json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v)
    return df


def write_report(report: Dict, path: Union[str, Path], fmt: str = config.DEFAULT_FORMAT) -> Path:
    """Write atomically as JSON or CSV"""
    if fmt not in FORMATS:
        raise ValueError(f"Unknown format: {fmt}")
    path = Path(path)
    if fmt == "json":
        atomic_write(path, report_to_json(report))
    else:
        atomic_write(path, report_to_frame(report).to_csv(index=False))
    logger.info(f"Saved report to {path}")
    return path


def default_report_path(stem: str, fmt: str) -> Path:
    return config.RESULTS_DIR / f"{stem}.{fmt}"


# ============================================================================
# ANALYSIS OF SAVED REPORTS
# ============================================================================

def load_report(path: Union[str, Path]) -> pd.DataFrame:
    """Load the results of a JSON or CSV report"""
    path = Path(path)
    print(f"Loading results from {path}")
    if path.suffix == ".csv":
        return pd.read_csv(path)
    try:
        with open(path, "r") as f:
            report = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ValueError(f"Cannot read report {path}: {e}")
    if "results" not in report:
        raise ValueError(f"Report {path} has no results")
    return pd.DataFrame(report["results"])


def summarize_frame(df: pd.DataFrame) -> pd.DataFrame:
    """Per-check sample counts, pass counts and margin statistics"""
    if "check_id" not in df.columns:
        raise ValueError("Report holds no check results")
    grouped = df.groupby("check_id", sort=True)
    summary = grouped.agg(
        samples=("passed", "size"),
        passed=("passed", "sum"),
        worst_margin=("margin", "min"),
        median_margin=("margin", "median"),
        classification=("classification", "first"),
    )
    summary["violations"] = summary["samples"] - summary["passed"]
    return summary


def summarize(path: Union[str, Path]) -> pd.DataFrame:
    """Print a per-check summary of a saved report"""
    df = load_report(path)
    summary = summarize_frame(df)

    print("\n" + "=" * 80)
    print("VERIFICATION SUMMARY")
    print("=" * 80)
    print(summary.to_string())

    print("\nBy classification:")
    for classification, group in df.groupby("classification"):
        total = len(group)
        passed = int(group["passed"].sum())
        print(f"  {classification:.<30} {passed}/{total} passed")

    margins = pd.to_numeric(df["margin"], errors="coerce").dropna().to_numpy()
    if len(margins) > 1:
        described = stats.describe(margins)
        print("\nMargin distribution:")
        print(f"  {'min':.<30} {described.minmax[0]:.3e}")
        print(f"  {'max':.<30} {described.minmax[1]:.3e}")
        print(f"  {'mean':.<30} {described.mean:.3e}")
        print(f"  {'skewness':.<30} {described.skewness:.3f}")

    failed = df[~df["passed"].astype(bool)]
    if len(failed):
        print(f"\n⚠️  {len(failed)} violation(s):")
        for _, row in failed.iterrows():
            print(f"  {row['check_id']} on {row['state']} (seed {row['seed']}): margin {row['margin']}")
    else:
        print("\n✓ No violations")
    print("=" * 80)
    return summary
