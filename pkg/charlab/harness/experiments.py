# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

"""Seeded experiments around the linear-forms characterization.

Every restart samples nonvanishing marginals, tests the joint law of the forms
for membership in D_{m,m-1}, and then searches for a near-member starting from
the sample. Any member found (sampled or searched) must have degenerate
marginals, and the symmetrized elimination pipeline must certify it.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Optional, Sequence

import numpy as np

from charlab import config as runtime_config
from charlab.api_schema.config import ExperimentConfig
from charlab.dist.distribution import (
    Distribution,
    JointCharFunction,
    char_function,
    convolve,
    push_forward,
    symmetrize,
)
from charlab.dist.forms import joint_of_forms_from_joint, joint_of_linear_forms, marginal_chars, product_char
from charlab.dist.gaussian import distance_to_degeneracy, is_gaussian
from charlab.errors import (
    CharLabError,
    Condition11Holds,
    Condition11Violated,
    PreconditionViolated,
)
from charlab.feq.characterization import cramer_factor_check, marcinkiewicz_check, q_independence_residual
from charlab.feq.differences import log_modulus
from charlab.feq.dmk import bump, is_in_Dmk
from charlab.feq.elimination import eliminate_lemma2, replay_certificate
from charlab.harness.report import Report, RestartRecord
from charlab.harness.sampling import restart_rng, sample_marginals
from charlab.harness.search import MembershipObjective, SearchResult, SearchSettings, minimize_residuals
from charlab.homs.conditions import (
    CoefficientSystem,
    CollinearityReduction,
    ConditionReport,
    check_condition_11,
    check_condition_12,
    collinearity_reduction,
    scalar_coprime,
)
from charlab.homs.endomorphism import classify, scalar

logger = logging.getLogger(__name__)

DEPENDENCE_PHASE = 0.3
JOINT_MATCH_TOL = 1e-12
RESTART_BATCH = 64  # restarts per search batch; batches are cut by index alone

NOTE_SEARCH = "stochastic search is a falsification attempt; PASS means no counterexample found"
NOTE_Q_REDUCTION = (
    "on finite groups Q-independence forces E = joint / prod(marginals) = 1, "
    "so Q-independent inputs are exactly the independent ones"
)
NOTE_RATIONAL = (
    "rational coefficients are modelled by integers coprime to every modulus; "
    "divisible groups are out of scope"
)


@dataclass(frozen=True, eq=False)
class ExperimentContext:
    config: ExperimentConfig
    system: CoefficientSystem
    # system the elimination runs on: the collinearity-reduced one in theorem3/5
    target: CoefficientSystem
    reduction: Optional[CollinearityReduction]
    multipliers: tuple[int, ...]
    objective: MembershipObjective
    settings: SearchSettings

    @property
    def q_path(self) -> bool:
        return self.config.mode in ("theorem4", "theorem5")


def _search_settings(cfg: ExperimentConfig) -> SearchSettings:
    s = cfg.search
    return SearchSettings(s.max_iterations, s.initial_step, s.decay, s.min_step, s.min_modulus)


def _as_multiplier(c: Fraction, exponent: int, column: int) -> int:
    if gcd(c.numerator, exponent) != 1 or gcd(c.denominator, exponent) != 1:
        raise PreconditionViolated(f"column {column + 1} is {c} times its representative; {c} is not invertible here")
    return c.numerator * pow(c.denominator, -1, exponent) % exponent


def _reduce(cs: CoefficientSystem, cfg: ExperimentConfig) -> tuple[CollinearityReduction, tuple[int, ...]]:
    X = cs.group
    columns = []
    for i in range(cs.n):
        column = []
        for j in range(cs.m):
            k = cfg.alphas[j][i]
            if not isinstance(k, int):
                raise PreconditionViolated("collinearity reduction needs integer coefficients")
            if not scalar_coprime(k, X):
                raise PreconditionViolated(f"coefficient {k} at ({j + 1}, {i + 1}) is not invertible on {X.literal()}")
            column.append(k)
        columns.append(column)
    reduction = collinearity_reduction(columns)
    multipliers = tuple(_as_multiplier(c, X.exponent, i) for i, c in enumerate(reduction.scalars))
    return reduction, multipliers


def build_context(cfg: ExperimentConfig) -> ExperimentContext:
    cs = cfg.system()
    reduction, multipliers, target = None, tuple([1] * cs.n), cs
    if cfg.mode in ("theorem3", "theorem5"):
        reduction, multipliers = _reduce(cs, cfg)
        target = cs.select_columns(reduction.representatives)
    settings = _search_settings(cfg)
    return ExperimentContext(
        config=cfg,
        system=cs,
        target=target,
        reduction=reduction,
        multipliers=multipliers,
        objective=MembershipObjective(cs, settings.min_modulus),
        settings=settings,
    )


@lru_cache(maxsize=4)
def _context_from_json(payload: str) -> ExperimentContext:
    return build_context(ExperimentConfig.model_validate_json(payload))


def _conditions(ctx: ExperimentContext) -> tuple[ConditionReport, Optional[ConditionReport]]:
    mode = ctx.config.mode
    system = ctx.target
    if mode == "explore-remark2":
        for j, row in enumerate(system.alphas):
            for i, f in enumerate(row):
                if not classify(f).is_auto:
                    raise PreconditionViolated(f"alpha_{j + 1}{i + 1} = {f.to_json()} is not an automorphism")
    cond11 = check_condition_11(system)
    try:
        cond12 = check_condition_12(system)
    except PreconditionViolated:
        cond12 = None
    if mode == "explore-remark2":
        if cond11.holds:
            raise Condition11Holds("pairwise intersections are trivial; nothing to explore")
    elif not cond11.holds:
        i, l = cond11.pair
        raise Condition11Violated(
            f"G_{i + 1} ∩ G_{l + 1} contains {cond11.witness}",
            cond11.witness,
            report={"condition11": cond11.to_json(), "mode": mode},
        )
    return cond11, cond12


def _scaled(mu: Distribution, k: int) -> Distribution:
    return mu if k == 1 else push_forward(scalar(mu.group, k), mu)


def _class_laws(ctx: ExperimentContext, marginals: Sequence[Distribution]) -> list[list[Distribution]]:
    """Scaled pieces c_i xi_i, grouped by collinearity class."""
    if ctx.reduction is None:
        return [[mu] for mu in marginals]
    return [[_scaled(marginals[i], ctx.multipliers[i]) for i in members] for members in ctx.reduction.classes]


def _fold(pieces: Sequence[Distribution]) -> Distribution:
    out = pieces[0]
    for mu in pieces[1:]:
        out = convolve(out, mu)
    return out


def _symmetrized_pipeline(ctx: ExperimentContext, laws: Sequence[Distribution], tol: float,
                          record: RestartRecord) -> None:
    """nu = mu * mu-bar, psi = log |nu^|, eliminate, replay, classify."""
    Y = ctx.target.group
    nus = [symmetrize(mu) for mu in laws]
    psis = [log_modulus(char_function(nu).values, Y) for nu in nus]
    adjoints = ctx.target.adjoint_system()
    for cert in eliminate_lemma2(adjoints, psis, tol):
        record.certificates.append(cert.to_json())
        replay = replay_certificate(cert, adjoints, psis, tol)
        if not replay.ok:
            record.failures.append(f"certificate for psi_{cert.target + 1} fails replay: {'; '.join(replay.problems)}")
    for q, nu in enumerate(nus):
        if not marcinkiewicz_check(char_function(nu), tol).gaussian:
            record.failures.append(f"symmetrized law {q + 1} is not exp(polynomial)")


def _check_member(ctx: ExperimentContext, marginals: Sequence[Distribution], record: RestartRecord,
                  what: str, tol: float) -> None:
    for i, mu in enumerate(marginals):
        if not is_gaussian(mu, tol).gaussian:
            record.failures.append(f"{what} member has non-Gaussian marginal {i + 1}")
    pieces = _class_laws(ctx, marginals)
    laws = [_fold(p) for p in pieces]
    try:
        _symmetrized_pipeline(ctx, laws, tol, record)
        for q, group in enumerate(pieces):
            if len(group) > 1:
                report = cramer_factor_check(laws[q], group[0], _fold(group[1:]), tol)
                if not report.consistent:
                    record.failures.append(f"class {q + 1} is Gaussian with a non-Gaussian factor")
    except CharLabError as exc:
        record.failures.append(f"{what} member pipeline: {exc.kind}: {exc}")


def _joint(ctx: ExperimentContext, marginals: Sequence[Distribution], record: RestartRecord) -> JointCharFunction:
    cs = ctx.system
    if not ctx.q_path:
        return joint_of_linear_forms(cs, marginals)
    X = cs.group
    tol = ctx.config.tolerances.gaussian
    chars = [char_function(mu) for mu in marginals]
    joint_xi = product_char(chars)
    q = q_independence_residual(joint_xi, chars, tol)
    record.q_residual = q.residual
    if not q.q_ok:
        record.failures.append("independent input rejected as not Q-independent")
    if cs.n >= 2 and X.order >= 2:
        dependent = JointCharFunction(X, cs.n, joint_xi.blocked() * bump(X, cs.n, DEPENDENCE_PHASE))
        dq = q_independence_residual(dependent, marginal_chars(dependent), tol)
        record.dependent_rejected = not dq.q_ok
        if dq.q_ok:
            record.failures.append("dependent input accepted as Q-independent")
    return joint_of_forms_from_joint(cs, joint_xi)


def _check_reduction(ctx: ExperimentContext, marginals: Sequence[Distribution], joint: JointCharFunction,
                     record: RestartRecord) -> None:
    laws = [_fold(p) for p in _class_laws(ctx, marginals)]
    reduced = joint_of_linear_forms(ctx.target, laws)
    gap = float(np.max(np.abs(reduced.values - joint.values)))
    if gap > JOINT_MATCH_TOL:
        record.failures.append(f"reduced system changes the joint law by {gap:.3g}")


def _prepare(ctx: ExperimentContext, index: int) -> tuple[RestartRecord, list[Distribution], np.random.Generator]:
    cfg = ctx.config
    cs = ctx.system
    tol = cfg.tolerances.membership
    rng = restart_rng(cfg.seeds.master, index)
    marginals = sample_marginals(cs.group, cs.n, rng, cfg.floor)
    record = RestartRecord(
        index=index, seed=[cfg.seeds.master, index], sampled_residual=0.0, sampled_member=False,
        search_residual=0.0, distances=[], iterations=0,
    )
    joint = _joint(ctx, marginals, record)
    if ctx.reduction is not None:
        _check_reduction(ctx, marginals, joint, record)
    sampled = is_in_Dmk(joint, cs.m - 1, tol, plan=ctx.objective.plan)
    record.sampled_residual = sampled.residual
    record.sampled_member = sampled.member
    explore = cfg.mode == "explore-remark2"
    if sampled.member and not explore:
        _check_member(ctx, marginals, record, "sampled", cfg.tolerances.gaussian)
    return record, marginals, rng


def _finish(ctx: ExperimentContext, record: RestartRecord, marginals: Sequence[Distribution],
            result: SearchResult) -> RestartRecord:
    cfg = ctx.config
    tol = cfg.tolerances.membership
    index = record.index
    explore = cfg.mode == "explore-remark2"
    record.search_residual = result.residual
    record.distances = result.distances
    record.iterations = result.iterations
    near_member = result.residual < tol
    non_degenerate = max(result.distances) > cfg.tolerances.degeneracy
    if explore:
        sampled_candidate = record.sampled_member and max(distance_to_degeneracy(mu) for mu in marginals) > cfg.tolerances.degeneracy
        record.candidate = (near_member and non_degenerate) or sampled_candidate
    elif near_member:
        if non_degenerate:
            record.failures.append(
                f"near-member (residual {result.residual:.3g}) with marginal {max(result.distances):.3g} from degenerate"
            )
        else:
            # searched points are only within the degeneracy tolerance of a point mass
            tol_searched = max(cfg.tolerances.gaussian, cfg.tolerances.degeneracy)
            _check_member(ctx, result.solution, record, "searched", tol_searched)
    for failure in record.failures:
        logger.info("restart %d: %s", index, failure)
    logger.debug("restart %d: sampled=%.3g searched=%.3g", index, record.sampled_residual, result.residual)
    return record


def run_restarts(ctx: ExperimentContext, indices: Sequence[int]) -> list[RestartRecord]:
    """Sample and check each restart, search them together, then check the results."""
    prepared = [_prepare(ctx, index) for index in indices]
    results = minimize_residuals(
        ctx.system, [marginals for _, marginals, _ in prepared], ctx.settings,
        [rng for _, _, rng in prepared], ctx.objective,
    )
    return [_finish(ctx, record, marginals, result) for (record, marginals, _), result in zip(prepared, results)]


def run_restart(ctx: ExperimentContext, index: int) -> RestartRecord:
    return run_restarts(ctx, [index])[0]


def _restart_task(args: tuple[str, int, int]) -> list[RestartRecord]:
    payload, start, stop = args
    return run_restarts(_context_from_json(payload), range(start, stop))


def _run_restarts(ctx: ExperimentContext) -> list[RestartRecord]:
    count = ctx.config.seeds.restarts
    threads = runtime_config.load().threads
    batches = [(start, min(start + RESTART_BATCH, count)) for start in range(0, count, RESTART_BATCH)]
    if threads > 1 and len(batches) > 1:
        payload = ctx.config.model_dump_json()
        with ProcessPoolExecutor(max_workers=threads) as pool:
            tasks = [(payload, start, stop) for start, stop in batches]
            records = [r for batch in pool.map(_restart_task, tasks) for r in batch]
    else:
        records = [r for start, stop in batches for r in run_restarts(ctx, range(start, stop))]
    return sorted(records, key=lambda r: r.index)


def run_experiment(cfg: ExperimentConfig) -> Report:
    started = time.perf_counter()
    ctx = build_context(cfg)
    cond11, cond12 = _conditions(ctx)
    logger.info("%s on %s (m=%d, n=%d): %d restarts, master seed %d", cfg.mode, ctx.system.group.literal(),
                ctx.system.m, ctx.system.n, cfg.seeds.restarts, cfg.seeds.master)
    records = _run_restarts(ctx)
    notes = [NOTE_SEARCH]
    if ctx.q_path:
        notes.append(NOTE_Q_REDUCTION)
    if ctx.reduction is not None:
        notes.append(NOTE_RATIONAL)
    report = Report(
        mode=cfg.mode,
        group=ctx.system.group.literal(),
        m=ctx.system.m,
        n=ctx.system.n,
        master_seed=cfg.seeds.master,
        condition11=cond11.to_json(),
        condition12=cond12.to_json() if cond12 is not None else None,
        records=records,
        notes=notes,
        reduction=ctx.reduction.to_json() if ctx.reduction is not None else None,
        wall_clock=time.perf_counter() - started,
    )
    logger.info("%s finished: %s (%s) in %.2fs", cfg.mode, report.verdict, report.summary, report.wall_clock)
    return report


def _with_mode(cfg: ExperimentConfig, mode: str) -> ExperimentConfig:
    return cfg if cfg.mode == mode else cfg.model_copy(update={"mode": mode})


def verify_theorem1(cfg: ExperimentConfig) -> Report:
    return run_experiment(_with_mode(cfg, "theorem1"))


def verify_theorem4(cfg: ExperimentConfig) -> Report:
    return run_experiment(_with_mode(cfg, "theorem4"))


def explore_remark2(cfg: ExperimentConfig) -> Report:
    return run_experiment(_with_mode(cfg, "explore-remark2"))


def reduce_and_verify_theorem3_style(cfg: ExperimentConfig) -> Report:
    return run_experiment(_with_mode(cfg, "theorem3"))


def verify_theorem5(cfg: ExperimentConfig) -> Report:
    return run_experiment(_with_mode(cfg, "theorem5"))


def check_instance(cfg: ExperimentConfig, marginals: Sequence[Distribution]) -> RestartRecord:
    """Membership and pipeline checks on caller-supplied marginals, no search."""
    ctx = build_context(cfg)
    _conditions(ctx)
    cs = ctx.system
    record = RestartRecord(
        index=0, seed=[], sampled_residual=0.0, sampled_member=False,
        search_residual=float("nan"), distances=[distance_to_degeneracy(mu) for mu in marginals], iterations=0,
    )
    joint = _joint(ctx, marginals, record)
    if ctx.reduction is not None:
        _check_reduction(ctx, marginals, joint, record)
    report = is_in_Dmk(joint, cs.m - 1, cfg.tolerances.membership, plan=ctx.objective.plan)
    record.sampled_residual = report.residual
    record.sampled_member = report.member
    if report.member:
        _check_member(ctx, marginals, record, "given", cfg.tolerances.gaussian)
    return record
