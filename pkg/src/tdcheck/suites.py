"""Reproducible multi-trial verification sweeps.

Each sweep draws per-trial contexts from seeds derived deterministically from
the master seed, runs the requested checks and returns one merged report whose
check ids carry the trial number and whose details carry the trial seed, so
any failure can be replayed in isolation.  Trials are independent, which makes
--jobs parallelism safe; results are assembled in trial order regardless of
the worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import List

from .fields import FieldSpec, derive_seed
from .params import (
    ContextError,
    random_admissible_context,
    random_valid_parameter_array,
)
from .realization import (
    RealizationError,
    mu_certificate,
    realize,
    shape_check,
    verify_relations,
)
from .report import Check, VerificationReport
from .tables import ModuleTable, load_table
from .tdsystem import roundtrip
from .zigzag import feasible_rank_test


def _trial_checks(
    kind: str, d: int, spec: FieldSpec, trial: int, assets
) -> List[Check]:
    """One trial of one sweep; module-level so process pools can pickle it."""
    seed = derive_seed(spec.seed, trial)
    trial_spec = spec.with_seed(seed)
    prefix = f"t{trial:03d}."
    tag = f"trial {trial}, seed {seed}"
    checks: List[Check] = []

    if kind == "tds":
        try:
            pa = random_valid_parameter_array(d, trial_spec)
        except ContextError as err:
            return [Check(prefix + "sample", False, f"{tag}: {err}")]
        rep = roundtrip(pa, trial_spec.build_field(), assets)
        return [
            Check(prefix + c.id, c.passed, f"{tag}: {c.detail}" if c.detail else tag)
            for c in rep.checks
        ]

    try:
        ctx = random_admissible_context(d, trial_spec)
    except ContextError as err:
        return [Check(prefix + "sample", False, f"{tag}: {err}")]
    table = load_table(d, assets)
    try:
        real = realize(table, ctx, trial_spec.build_field())
    except RealizationError as err:
        return [
            Check(prefix + "realize." + name, False, f"{tag}: {detail}")
            for name, detail in err.failures
        ]
    checks.append(Check(prefix + "realize", True, tag))

    reports = []
    if kind == "relations":
        reports = [verify_relations(real), mu_certificate(real)]
    elif kind == "mu":
        reports = [mu_certificate(real)]
    elif kind == "shape":
        reports = [shape_check(real).report]
    elif kind == "zzrank":
        reports = [feasible_rank_test(real)]
    else:
        raise ValueError(f"unknown sweep kind {kind!r}")
    for rep in reports:
        for c in rep.checks:
            detail = f"{tag}: {c.detail}" if c.detail else tag
            checks.append(Check(prefix + c.id, c.passed, detail))
    return checks


def run_sweep(
    kind: str,
    command: str,
    d: int,
    spec: FieldSpec,
    trials: int,
    assets=None,
    jobs: int = 1,
) -> VerificationReport:
    rep = VerificationReport(
        command=command,
        field=spec.echo(),
        seed=spec.seed,
        asset_version=load_table(d, assets).version,
        trials=trials,
    )
    args = [(kind, d, spec, t, assets) for t in range(trials)]
    if jobs > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_trial_checks_star, args))
    else:
        results = [_trial_checks(*a) for a in args]
    for checks in results:
        rep.checks.extend(checks)
    return rep


def _trial_checks_star(args):
    return _trial_checks(*args)


def relation_suite(
    d: int, spec: FieldSpec, trials: int, assets=None, jobs: int = 1
) -> VerificationReport:
    """Full relation sweep plus the weight certificate, per trial."""
    return run_sweep("relations", "verify-appendix", d, spec, trials, assets, jobs)


def mu_suite(d: int, spec: FieldSpec, trials: int, assets=None, jobs: int = 1):
    return run_sweep("mu", "mu-certificate", d, spec, trials, assets, jobs)


def shape_suite(d: int, spec: FieldSpec, trials: int, assets=None, jobs: int = 1):
    return run_sweep("shape", "shape", d, spec, trials, assets, jobs)


def zz_rank_suite(d: int, spec: FieldSpec, trials: int, assets=None, jobs: int = 1):
    return run_sweep("zzrank", "zz-rank", d, spec, trials, assets, jobs)


def tds_roundtrip_suite(
    d: int, spec: FieldSpec, trials: int, assets=None, jobs: int = 1
):
    return run_sweep("tds", "tds-roundtrip", d, spec, trials, assets, jobs)


def mutation_detections(
    table: ModuleTable,
    mutated: ModuleTable,
    spec: FieldSpec,
    trials: int,
    include_mu: bool = False,
) -> int:
    """How many of `trials` random contexts detect the mutated table.

    Detection = realization fails (minimal polynomial or rank invariant) or a
    relation check fails; with include_mu the chain certificate counts too.
    """
    field = spec.build_field()
    detected = 0
    for t in range(trials):
        seed = derive_seed(spec.seed, t)
        ctx = random_admissible_context(table.d, spec.with_seed(seed))
        try:
            real = realize(mutated, ctx, field)
        except RealizationError:
            detected += 1
            continue
        if not verify_relations(real).overall:
            detected += 1
        elif include_mu and not mu_certificate(real).overall:
            detected += 1
    return detected
