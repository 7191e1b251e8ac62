"""Simulation designs A-D, the summary-table reproduction, and the
summary-data meta-analysis workflow.

Designs A and B fix every trial to one registry scenario (no variation in the
true surrogate, so the oracle slope is not identifiable); C and D draw each
trial's scenario uniformly (true slope exactly zero). Each repetition samples
n_T trials, fits the practical regression of estimated mortality reduction on
estimated late-stage reduction, and tests the zero-slope null; aggregates are
the mean fitted slope and the rejection rate.
"""

import csv
import math
from dataclasses import dataclass
from multiprocessing import get_context

from . import model
from .asymptotics import marginal_variances
from .errors import (
    DegenerateDenominatorError,
    DomainError,
    InsufficientDataError,
    NonIdentifiableError,
    SchemaError,
)
from .inference import MetaFit, ols_fit
from .regions import wald_region
from .sampling import EndpointEstimate, simulate_trial
from .streams import SeedSpec, UnitStream, scenario_state

DESIGN_NAMES = ("A", "B", "C", "D")

#: Default rho sweep for sensitivity regions.
DEFAULT_RHO_VALUES = (0.1, 0.66, 0.9)


@dataclass(frozen=True)
class SimulationDesign:
    name: str
    n_T: int
    N: int
    n: int
    m: int
    scenario_rule: str  # "fixed" | "uniform"
    fixed_scenario: int  # registry index; ignored for "uniform"
    alpha: float = 0.05


_BASE_DESIGNS = {
    "A": dict(scenario_rule="fixed", fixed_scenario=0, n=20000, m=20000),
    "B": dict(scenario_rule="fixed", fixed_scenario=1, n=20000, m=20000),
    "C": dict(scenario_rule="uniform", fixed_scenario=-1, n=20000, m=20000),
    "D": dict(scenario_rule="uniform", fixed_scenario=-1, n=100000, m=100000),
}


def design(name, N=100, n_T=10, n=None, m=None, alpha=0.05) -> SimulationDesign:
    """Named design with its standard arm sizes unless overridden."""
    if name not in _BASE_DESIGNS:
        raise DomainError(f"unknown design {name!r}; expected one of {DESIGN_NAMES}")
    base = dict(_BASE_DESIGNS[name])
    if n is not None:
        base["n"] = int(n)
    if m is not None:
        base["m"] = int(m)
    return SimulationDesign(name=name, n_T=int(n_T), N=int(N), alpha=float(alpha), **base)


@dataclass(frozen=True)
class TrialOutcome:
    repetition: int
    trial: int
    scenario: str
    S_true: float
    M_true: float
    estimate: EndpointEstimate


@dataclass(frozen=True)
class SimulationSummary:
    design: SimulationDesign
    master_seed: int
    mean_beta1: float
    rejection_rate: float
    mc_se_rejection: float
    per_repetition: tuple  # (repetition, beta1_hat, p_value)
    trials: tuple  # TrialOutcome, ordered by (repetition, trial)
    excluded_repetitions: tuple  # repetition indices with non-identifiable fits


def _scenario_index(design, master_seed, repetition, trial):
    if design.scenario_rule == "fixed":
        return design.fixed_scenario
    stream = UnitStream(scenario_state(master_seed, repetition, trial))
    return stream.next_index(4)


def _run_repetition(design, master_seed, repetition):
    scenarios = model.scenario_table()
    truths = [model.derive_endpoints(sc) for sc in scenarios]
    outcomes = []
    pairs = []
    for trial in range(design.n_T):
        idx = _scenario_index(design, master_seed, repetition, trial)
        params = scenarios[idx]
        est = simulate_trial(
            params, design.n, design.m,
            SeedSpec(master_seed, trial_index=trial, repetition_index=repetition),
        )
        outcomes.append(
            TrialOutcome(
                repetition=repetition,
                trial=trial,
                scenario=params.label,
                S_true=truths[idx].S,
                M_true=truths[idx].M,
                estimate=est,
            )
        )
        pairs.append((est.S_hat, est.M_hat))
    try:
        fit = ols_fit(pairs)
        stats = (fit.beta1_hat, fit.p_value)
    except NonIdentifiableError:
        stats = None
    return outcomes, stats


def _repetition_task(args):
    return _run_repetition(*args)


def run_simulation(design: SimulationDesign, master_seed, workers=1) -> SimulationSummary:
    """Run all repetitions of a design; reproducible from master_seed alone.

    Repetitions are independent work units; with workers > 1 they run on a
    process pool, and results are aggregated in repetition order so parallel
    output is byte-identical to sequential output.
    """
    tasks = [(design, master_seed, rep) for rep in range(design.N)]
    if workers > 1:
        with get_context("fork").Pool(workers) as pool:
            results = pool.map(_repetition_task, tasks)
    else:
        results = [_run_repetition(*t) for t in tasks]

    trials = []
    per_rep = []
    excluded = []
    for rep, (outcomes, stats) in enumerate(results):
        trials.extend(outcomes)
        if stats is None:
            excluded.append(rep)
        else:
            per_rep.append((rep, stats[0], stats[1]))
    if not per_rep:
        raise InsufficientDataError("every repetition was non-identifiable")
    kept = len(per_rep)
    mean_beta1 = math.fsum(b for _, b, _ in per_rep) / kept
    rejections = sum(1 for _, _, p in per_rep if p < design.alpha)
    rate = rejections / kept
    return SimulationSummary(
        design=design,
        master_seed=master_seed,
        mean_beta1=mean_beta1,
        rejection_rate=rate,
        mc_se_rejection=math.sqrt(rate * (1.0 - rate) / kept),
        per_repetition=tuple(per_rep),
        trials=tuple(trials),
        excluded_repetitions=tuple(excluded),
    )


# --- exports -------------------------------------------------------------


def fmt6(x):
    """Render a float with 6 significant digits (export-wide convention)."""
    return format(float(x), ".6g")


def summary_dict(summary: SimulationSummary) -> dict:
    d = summary.design
    return {
        "design": d.name,
        "seed": summary.master_seed,
        "N": d.N,
        "n_T": d.n_T,
        "n": d.n,
        "m": d.m,
        "alpha": d.alpha,
        "mean_beta1": float(fmt6(summary.mean_beta1)),
        "rejection_rate": float(fmt6(summary.rejection_rate)),
        "mc_se_rejection": float(fmt6(summary.mc_se_rejection)),
        "excluded_repetitions": list(summary.excluded_repetitions),
        "total_resamples": sum(t.estimate.resamples for t in summary.trials),
    }


def write_scatter_csv(summary: SimulationSummary, fh):
    """Per-trial scatter: estimates next to the true endpoint pair."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["design", "repetition", "trial", "S_true", "M_true", "S_hat", "M_hat"])
    for t in summary.trials:
        w.writerow(
            [
                summary.design.name,
                t.repetition,
                t.trial,
                fmt6(t.S_true),
                fmt6(t.M_true),
                fmt6(t.estimate.S_hat),
                fmt6(t.estimate.M_hat),
            ]
        )


def write_estimates_csv(summary: SimulationSummary, fh):
    """Raw per-repetition estimates with arm sizes and resample counts."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["repetition", "trial", "S_hat", "M_hat", "n", "m", "resamples"])
    for t in summary.trials:
        e = t.estimate
        w.writerow(
            [t.repetition, t.trial, fmt6(e.S_hat), fmt6(e.M_hat), e.n, e.m, e.resamples]
        )


# --- summary table over all four designs ---------------------------------


@dataclass(frozen=True)
class TableRow:
    design: str
    beta1_text: str  # "-" when the oracle slope is not identifiable
    mean_beta1: float
    rejection_rate: float


@dataclass(frozen=True)
class Table2Report:
    master_seed: int
    blocks: tuple  # (N, tuple[TableRow, ...]) per repetition count


_BETA1_TEXT = {"A": "-", "B": "-", "C": "0", "D": "0"}


def table2_report(master_seed, Ns=(100, 1000), workers=1) -> Table2Report:
    """All four designs at each repetition count: the standard N=100 pass
    plus a tighter N=1000 pass by default."""
    blocks = []
    for N in Ns:
        rows = []
        for name in DESIGN_NAMES:
            summ = run_simulation(design(name, N=N), master_seed, workers=workers)
            rows.append(
                TableRow(
                    design=name,
                    beta1_text=_BETA1_TEXT[name],
                    mean_beta1=summ.mean_beta1,
                    rejection_rate=summ.rejection_rate,
                )
            )
        blocks.append((N, tuple(rows)))
    return Table2Report(master_seed=master_seed, blocks=tuple(blocks))


def write_table2_csv(rows, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["simulation", "beta1", "mean_beta1_hat", "type_i_error"])
    for row in rows:
        w.writerow([row.design, row.beta1_text, fmt6(row.mean_beta1), fmt6(row.rejection_rate)])


def format_table2(report: Table2Report) -> str:
    lines = []
    for N, rows in report.blocks:
        lines.append(f"N = {N} repetitions (seed {report.master_seed})")
        lines.append(f"{'simulation':<12}{'beta1':>8}{'E[beta1_hat]':>16}{'Type I error':>16}")
        for r in rows:
            lines.append(
                f"{r.design:<12}{r.beta1_text:>8}{fmt6(r.mean_beta1):>16}"
                f"{fmt6(r.rejection_rate):>16}"
            )
        lines.append("")
    return "\n".join(lines)


# --- real-data meta-analysis ---------------------------------------------

SUMMARY_COLUMNS = (
    "trial_id",
    "n_control",
    "n_screen",
    "late_control",
    "late_screen",
    "deaths_control",
    "deaths_screen",
)


@dataclass(frozen=True)
class TrialSummaryRecord:
    """Published summary counts of one completed trial."""

    trial_id: str
    n_control: int
    n_screen: int
    late_control: int
    late_screen: int
    deaths_control: int
    deaths_screen: int


def read_trial_summaries(fh):
    """Parse the declared CSV schema; SchemaError pinpoints any violation."""
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty file: missing header", row=0) from None
    header = [h.strip() for h in header]
    if tuple(header) != SUMMARY_COLUMNS:
        missing = [c for c in SUMMARY_COLUMNS if c not in header]
        if missing:
            raise SchemaError(
                f"missing column {missing[0]!r} in header", column=missing[0], row=0
            )
        raise SchemaError(
            f"header must be exactly {','.join(SUMMARY_COLUMNS)}", row=0
        )
    records = []
    for i, row in enumerate(reader, start=1):
        if not row:
            continue
        if len(row) != len(SUMMARY_COLUMNS):
            raise SchemaError(f"row {i}: expected {len(SUMMARY_COLUMNS)} fields", row=i)
        vals = {}
        for col, raw in zip(SUMMARY_COLUMNS, row):
            if col == "trial_id":
                vals[col] = raw.strip()
                continue
            try:
                v = int(raw)
            except ValueError:
                raise SchemaError(
                    f"row {i}: column {col!r} is not an integer (got {raw!r})",
                    column=col,
                    row=i,
                ) from None
            if v < 0:
                raise SchemaError(
                    f"row {i}: column {col!r} must be nonnegative", column=col, row=i
                )
            vals[col] = v
        for col, size_col in (
            ("late_control", "n_control"),
            ("deaths_control", "n_control"),
            ("late_screen", "n_screen"),
            ("deaths_screen", "n_screen"),
        ):
            if vals[col] > vals[size_col]:
                raise SchemaError(
                    f"row {i}: {col} exceeds {size_col}", column=col, row=i
                )
        records.append(TrialSummaryRecord(**vals))
    return records


@dataclass(frozen=True)
class TrialAnalysis:
    record: TrialSummaryRecord
    estimate: EndpointEstimate
    var_S: float
    var_M: float
    low_count: bool


@dataclass(frozen=True)
class MetaAnalysis:
    fit: MetaFit
    trials: tuple  # TrialAnalysis
    regions: dict  # (trial_id, rho) -> WaldRegion
    rejected: tuple  # (trial_id, reason)
    alpha: float
    rho_values: tuple


def _record_estimate(rec: TrialSummaryRecord) -> EndpointEstimate:
    p_l_c = rec.late_control / rec.n_control
    p_l_s = rec.late_screen / rec.n_screen
    p_d_c = rec.deaths_control / rec.n_control
    p_d_s = rec.deaths_screen / rec.n_screen
    return EndpointEstimate(
        S_hat=1.0 - p_l_s / p_l_c,
        M_hat=1.0 - p_d_s / p_d_c,
        n=rec.n_control,
        m=rec.n_screen,
        p_hat_L_C=p_l_c,
        p_hat_L_S=p_l_s,
        p_hat_D_C=p_d_c,
        p_hat_D_S=p_d_s,
    )


def analyze_meta(records, rho_values=DEFAULT_RHO_VALUES, alpha=0.10,
                 ci_level=0.95) -> MetaAnalysis:
    """Meta-analytic regression plus per-trial sensitivity regions.

    Variances are plugged in from each trial's estimated marginal rates; the
    sampling correlation cannot be estimated from summary data and is swept
    over `rho_values` instead. Records with a zero control-arm denominator
    are rejected with a diagnostic rather than poisoning the regression.
    """
    usable = []
    rejected = []
    for rec in records:
        if rec.late_control == 0:
            rejected.append((rec.trial_id, "late_control is zero"))
            continue
        if rec.deaths_control == 0:
            rejected.append((rec.trial_id, "deaths_control is zero"))
            continue
        if rec.n_control == 0 or rec.n_screen == 0:
            rejected.append((rec.trial_id, "empty arm"))
            continue
        usable.append(rec)
    if len(usable) < 3:
        raise InsufficientDataError(
            f"need >= 3 usable records, got {len(usable)} "
            f"({len(rejected)} rejected)"
        )
    trials = []
    for rec in usable:
        est = _record_estimate(rec)
        try:
            var_s, var_m = marginal_variances(
                est.p_hat_L_C, est.p_hat_L_S, est.p_hat_D_C, est.p_hat_D_S,
                rec.n_control, rec.n_screen,
            )
        except DegenerateDenominatorError:  # guarded above; defensive
            rejected.append((rec.trial_id, "degenerate variance"))
            continue
        counts = (rec.late_control, rec.late_screen, rec.deaths_control, rec.deaths_screen)
        trials.append(
            TrialAnalysis(
                record=rec,
                estimate=est,
                var_S=var_s,
                var_M=var_m,
                low_count=any(c < 20 for c in counts),
            )
        )
    fit = ols_fit(
        [(t.estimate.S_hat, t.estimate.M_hat) for t in trials], ci_level=ci_level
    )
    regions = {}
    for t in trials:
        for rho in rho_values:
            regions[(t.record.trial_id, rho)] = wald_region(
                t.estimate, t.var_S, t.var_M, rho, alpha
            )
    return MetaAnalysis(
        fit=fit,
        trials=tuple(trials),
        regions=regions,
        rejected=tuple(rejected),
        alpha=alpha,
        rho_values=tuple(rho_values),
    )
