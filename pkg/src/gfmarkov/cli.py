"""Command-line interface.

Loads a model file, dispatches to the computation modules, and emits a
machine-readable result document (JSON by default, CSV for vector
outputs). Exit status: 0 success, 1 failed verification checks, 2 model
or validation errors, 3 numerical errors. Human-readable diagnostics go
to stderr; every library error surfaces as a stable code string in the
output document.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import ctmc as ctmc_mod
from . import gfm
from . import qfactors as qf
from .config import DEFAULT, Tolerances
from .errors import GfmError, ModelFormatError, NumericalError
from .estimator import (
    SimulationConfig,
    StepSchedule,
    online_potentials,
    write_trace_csv,
)
from .model import (
    StochasticMatrix,
    diagnose_chain,
    e1_reference,
    min_uniformization_rate,
    reference_vector,
    uniform_reference,
    uniformize,
)
from .modelio import LoadedModel, dumps_document, format_csv, load_model
from .report import CheckResult, VerificationReport

__all__ = ["main", "build_parser"]


def _add_common(sub, reference: bool = True):
    sub.add_argument("--model", required=True, help="path to a model JSON file")
    if reference:
        sub.add_argument(
            "--reference", default="uniform",
            help="uniform | e1 | stationary | explicit vector literal "
                 "(JSON list or comma-separated numbers)")
    sub.add_argument("--output", choices=["json", "csv"], default="json")
    sub.add_argument("--out", default=None, help="output path (default stdout)")
    sub.add_argument("--row-tol", type=float, default=None)
    sub.add_argument("--solve-tol", type=float, default=None)
    sub.add_argument("--poisson-tol", type=float, default=None)
    sub.add_argument("--re-tol", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gfmarkov",
        description="Potentials, stationary distributions, and Q-factors of "
                    "finite Markov systems through one shifted linear solve.")
    subs = p.add_subparsers(dest="command", required=True)

    _add_common(subs.add_parser("validate", help="validate a model file"),
                reference=False)
    _add_common(subs.add_parser("stationary", help="stationary distribution"))
    _add_common(subs.add_parser("potentials", help="chain potentials"))
    _add_common(subs.add_parser("qfactors", help="Q-factors of an mdp model"))
    _add_common(subs.add_parser("ctmc-stationary",
                                help="stationary distribution of a ctmc model"))
    _add_common(subs.add_parser("ctmc-potentials",
                                help="potentials of a ctmc model"))

    est = subs.add_parser("estimate", help="online potential estimation")
    _add_common(est)
    est.add_argument("--seed", type=int, default=0)
    est.add_argument("--seeds", default=None,
                     help="comma-separated seeds; runs are ordered by seed")
    est.add_argument("--steps", type=int, default=100_000)
    est.add_argument("--epsilon", type=float, default=1e-4)
    est.add_argument("--check-interval", type=int, default=1000)
    est.add_argument("--schedule", default="power:1,10,1",
                     help="power:a,b,p for a/(b+t)^p, or constant:x")
    est.add_argument("--s0", type=int, default=0)
    est.add_argument("--trace", default=None,
                     help="write sampled trace CSV to this path (single seed)")

    ser = subs.add_parser("series", help="truncated series form of the "
                                         "fundamental matrix")
    _add_common(ser)
    ser.add_argument("--terms", type=int, default=50)

    chk = subs.add_parser("check", help="run verification reports")
    _add_common(chk)
    chk.add_argument("--poisson", action="store_true",
                     help="only check Poisson-equation residuals")
    chk.add_argument("--gamma", type=float, default=None,
                     help="uniformization rate for ctmc spectrum checks")
    return p


def _tolerances(args) -> Tolerances:
    overrides = {}
    for name in ("row_tol", "solve_tol", "poisson_tol", "re_tol"):
        v = getattr(args, name, None)
        if v is not None:
            overrides[name] = v
    return dataclasses.replace(DEFAULT, **overrides) if overrides else DEFAULT


def _resolve_reference(text: str, n: int, loaded: LoadedModel, cfg: Tolerances):
    if text == "uniform":
        return uniform_reference(n, cfg=cfg)
    if text == "e1":
        return e1_reference(n, cfg=cfg)
    if text == "stationary":
        if loaded.kind == "dtmc":
            pi = gfm.stationary(loaded.chain, cfg=cfg).pi
        elif loaded.kind == "ctmc":
            pi = ctmc_mod.ctmc_stationary(loaded.generator, cfg=cfg).pi
        else:
            chain = qf.build_state_action_chain(loaded.mdp, cfg=cfg)
            pi = gfm.stationary(StochasticMatrix(chain.matrix), None,
                                allow_unchecked=True, cfg=cfg).pi
        return reference_vector(pi, cfg=cfg)
    if text.strip().startswith("["):
        import json
        try:
            values = json.loads(text)
        except json.JSONDecodeError as e:
            raise ModelFormatError(f"cannot parse reference literal: {e}") from e
    else:
        try:
            values = [float(x) for x in text.split(",") if x.strip()]
        except ValueError as e:
            raise ModelFormatError(f"cannot parse reference literal {text!r}") from e
    return reference_vector(values, cfg=cfg)


def _require_kind(loaded: LoadedModel, kind: str, command: str) -> None:
    if loaded.kind != kind:
        raise ModelFormatError(
            f"command {command!r} needs a {kind!r} model, got {loaded.kind!r}",
            expected=kind, got=loaded.kind)


def _vector(v: np.ndarray) -> list[float]:
    return [float(x) for x in v]


def _cmd_validate(args, cfg: Tolerances):
    loaded = load_model(args.model, cfg=cfg)
    if loaded.kind == "dtmc":
        d = diagnose_chain(loaded.chain, cfg=cfg)
        return {
            "valid": True, "kind": "dtmc", "states": loaded.states,
            "max_correction": loaded.chain.max_correction,
            "irreducible": d.irreducible, "aperiodic": d.aperiodic,
            "period": d.period, "num_closed_classes": d.num_closed_classes,
        }
    if loaded.kind == "ctmc":
        rate = min_uniformization_rate(loaded.generator)
        d = diagnose_chain(uniformize(loaded.generator, rate + 1.0, cfg=cfg),
                           cfg=cfg)
        return {
            "valid": True, "kind": "ctmc", "states": loaded.states,
            "max_correction": loaded.generator.max_correction,
            "ergodic": d.irreducible, "min_uniformization_rate": rate,
        }
    m = loaded.mdp
    dead = [[s, a] for s, a in np.argwhere(m.policy == 0.0).tolist()]
    return {
        "valid": True, "kind": "mdp", "states": m.states,
        "actions": m.actions, "state_action_pairs": m.states * m.actions,
        "zero_probability_actions": dead,
    }


def _cmd_stationary(args, cfg: Tolerances):
    loaded = load_model(args.model, cfg=cfg)
    _require_kind(loaded, "dtmc", "stationary")
    r = _resolve_reference(args.reference, loaded.states, loaded, cfg)
    pi = gfm.stationary(loaded.chain, r, cfg=cfg)
    return {"pi": _vector(pi.pi)}


def _cmd_potentials(args, cfg: Tolerances):
    loaded = load_model(args.model, cfg=cfg)
    _require_kind(loaded, "dtmc", "potentials")
    r = _resolve_reference(args.reference, loaded.states, loaded, cfg)
    sol = gfm.potentials(loaded.chain, loaded.rewards, r, cfg=cfg)
    return {"g": _vector(sol.g), "eta": sol.eta,
            "normalization": sol.normalization}


def _cmd_qfactors(args, cfg: Tolerances):
    loaded = load_model(args.model, cfg=cfg)
    _require_kind(loaded, "mdp", "qfactors")
    n = loaded.mdp.states * loaded.mdp.actions
    r = _resolve_reference(args.reference, n, loaded, cfg)
    sol = qf.qfactors_solve(loaded.mdp, r, cfg=cfg)
    return {"Q": _vector(sol.q), "eta": sol.eta,
            "normalization": "r·Q=eta", "induced_g": _vector(sol.induced_g)}


def _cmd_ctmc_stationary(args, cfg: Tolerances):
    loaded = load_model(args.model, cfg=cfg)
    _require_kind(loaded, "ctmc", "ctmc-stationary")
    r = _resolve_reference(args.reference, loaded.states, loaded, cfg)
    pi = ctmc_mod.ctmc_stationary(loaded.generator, r, cfg=cfg)
    return {"pi": _vector(pi.pi)}


def _cmd_ctmc_potentials(args, cfg: Tolerances):
    loaded = load_model(args.model, cfg=cfg)
    _require_kind(loaded, "ctmc", "ctmc-potentials")
    r = _resolve_reference(args.reference, loaded.states, loaded, cfg)
    sol = ctmc_mod.ctmc_potentials(loaded.generator, loaded.rewards, r, cfg=cfg)
    return {"g": _vector(sol.g), "eta": sol.eta,
            "normalization": sol.normalization}


def _parse_schedule(text: str) -> StepSchedule:
    kind, _, rest = text.partition(":")
    try:
        if kind == "power":
            a, b, p = (float(x) for x in rest.split(","))
            return StepSchedule.robbins_monro(a, b, p)
        if kind == "constant":
            return StepSchedule.constant(float(rest))
    except ValueError as e:
        raise ModelFormatError(f"cannot parse schedule {text!r}") from e
    raise ModelFormatError(f"unknown schedule kind {kind!r}; use power: or constant:")


def _cmd_estimate(args, cfg: Tolerances):
    loaded = load_model(args.model, cfg=cfg)
    _require_kind(loaded, "dtmc", "estimate")
    r = _resolve_reference(args.reference, loaded.states, loaded, cfg)
    schedule = _parse_schedule(args.schedule)
    seeds = ([int(s) for s in args.seeds.split(",") if s.strip()]
             if args.seeds else [args.seed])
    seeds = sorted(seeds)
    if args.trace and len(seeds) > 1:
        raise ModelFormatError("--trace needs a single seed")

    runs = []
    for seed in seeds:
        sim = SimulationConfig(seed=seed, max_steps=args.steps,
                               epsilon=args.epsilon,
                               check_interval=args.check_interval)
        trace = online_potentials(loaded.chain, loaded.rewards, r, schedule,
                                  sim, s0=args.s0, tolerances=cfg)
        if args.trace:
            with open(args.trace, "w", encoding="utf-8") as fh:
                write_trace_csv(trace, fh)
        runs.append({
            "seed": seed, "g_hat": _vector(trace.g_hat),
            "eta_hat": trace.eta_hat, "steps_run": trace.steps_run,
            "converged": trace.converged,
        })
    return runs[0] if len(runs) == 1 else {"runs": runs}


def _cmd_series(args, cfg: Tolerances):
    loaded = load_model(args.model, cfg=cfg)
    _require_kind(loaded, "dtmc", "series")
    r = _resolve_reference(args.reference, loaded.states, loaded, cfg)
    fm = gfm.series_fundamental(loaded.chain, r, args.terms, cfg=cfg)
    return {"Z": [_vector(row) for row in fm.Z], "terms": fm.terms,
            "tail_norm": fm.tail_norm}


def _series_agreement_check(chain, r, cfg: Tolerances) -> CheckResult:
    exact = gfm.fundamental_matrix(chain, r, cfg=cfg).Z
    terms = 64
    while terms <= 4096:
        approx = gfm.series_fundamental(chain, r, terms, cfg=cfg)
        if approx.tail_norm < 1e-8:
            gap = float(np.abs(approx.Z - exact).max())
            return CheckResult("series_vs_solve", gap <= 1e-8, gap)
        terms *= 2
    return CheckResult("series_vs_solve", True, None,
                       note="tail bound did not reach 1e-8; skipped")


def _dtmc_checks(loaded: LoadedModel, poisson_only: bool,
                 cfg: Tolerances) -> list[CheckResult]:
    chain, f = loaded.chain, loaded.rewards
    r = uniform_reference(loaded.states, cfg=cfg)
    sol = gfm.potentials(chain, f, r, cfg=cfg)
    pi = gfm.stationary(chain, r, cfg=cfg)
    P = np.asarray(chain.matrix)

    checks = []
    resid = float(np.abs(sol.g - f.values + sol.eta - P @ sol.g).max())
    checks.append(CheckResult("poisson_residual", resid <= cfg.poisson_tol, resid))
    resid = float(abs(sol.eta - pi.pi @ f.values))
    checks.append(CheckResult("eta_vs_stationary_reward", resid <= 1e-8, resid))
    if poisson_only:
        return checks

    resid = float(np.abs(pi.pi @ P - pi.pi).max())
    checks.append(CheckResult("stationary_row_identity", resid <= 1e-8, resid))
    resid = float(abs(pi.pi.sum() - 1.0))
    checks.append(CheckResult("stationary_sums_to_one", resid <= 1e-8, resid))
    checks.extend(gfm.verify_spectral_shift(chain, r, cfg=cfg).checks)
    d = diagnose_chain(chain, cfg=cfg)
    if d.aperiodic:
        checks.append(_series_agreement_check(chain, r, cfg))
    return checks


def _ctmc_checks(loaded: LoadedModel, poisson_only: bool, gamma: float | None,
                 cfg: Tolerances) -> list[CheckResult]:
    gen, f = loaded.generator, loaded.rewards
    r = uniform_reference(loaded.states, cfg=cfg)
    sol = ctmc_mod.ctmc_potentials(gen, f, r, cfg=cfg)
    B = np.asarray(gen.matrix)

    checks = []
    resid = float(np.abs(-B @ sol.g - (f.values - sol.eta)).max())
    checks.append(CheckResult("continuous_poisson_residual",
                              resid <= cfg.poisson_tol, resid))
    resid = float(abs(r.values @ sol.g + sol.eta))
    checks.append(CheckResult("normalization_r_g_minus_eta",
                              resid <= 1e-8, resid))
    if poisson_only:
        return checks

    rate = min_uniformization_rate(gen)
    base = rate if rate > 0 else 1.0
    pi_proc = ctmc_mod.ctmc_stationary(gen, r, cfg=cfg)
    for mult in (1.0, 2.0, 10.0):
        g = base * mult
        pi_chain = gfm.stationary(uniformize(gen, g, cfg=cfg), r,
                                  allow_unchecked=True, cfg=cfg)
        resid = float(np.abs(pi_proc.pi - pi_chain.pi).max())
        checks.append(CheckResult(f"uniformization_consistency_gamma_{mult:g}x",
                                  resid <= 1e-8, resid))
    checks.extend(ctmc_mod.verify_generator_spectrum(
        gen, gamma if gamma is not None else 2.0 * base, r, cfg=cfg).checks)
    return checks


def _cmd_check(args, cfg: Tolerances):
    loaded = load_model(args.model, cfg=cfg)
    if loaded.kind == "dtmc":
        checks = _dtmc_checks(loaded, args.poisson, cfg)
    elif loaded.kind == "ctmc":
        checks = _ctmc_checks(loaded, args.poisson, args.gamma, cfg)
    else:
        sol = qf.qfactors_solve(loaded.mdp, None, cfg=cfg)
        checks = list(qf.q_consistency_report(loaded.mdp, sol, cfg=cfg).checks)
    report = VerificationReport(tuple(checks))
    for c in report.failures():
        print(f"check failed: {c.name} (residual {c.residual})",
              file=sys.stderr)
    return report.to_dict(), (0 if report.passed else 1)


def _to_csv(command: str, doc: dict) -> str:
    if command in ("stationary", "ctmc-stationary"):
        return format_csv(["state", "pi"],
                          [(i, v) for i, v in enumerate(doc["pi"])])
    if command in ("potentials", "ctmc-potentials"):
        return format_csv(["state", "g", "eta"],
                          [(i, v, doc["eta"]) for i, v in enumerate(doc["g"])])
    if command == "qfactors":
        return format_csv(["pair", "Q"],
                          [(i, v) for i, v in enumerate(doc["Q"])])
    if command == "series":
        rows = [(i, j, v) for i, row in enumerate(doc["Z"])
                for j, v in enumerate(row)]
        return format_csv(["i", "j", "Z"], rows)
    raise ModelFormatError(f"command {command!r} has no CSV form; use json")


_HANDLERS = {
    "validate": _cmd_validate,
    "stationary": _cmd_stationary,
    "potentials": _cmd_potentials,
    "qfactors": _cmd_qfactors,
    "ctmc-stationary": _cmd_ctmc_stationary,
    "ctmc-potentials": _cmd_ctmc_potentials,
    "estimate": _cmd_estimate,
    "series": _cmd_series,
    "check": _cmd_check,
}


def _write(text: str, args) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = _tolerances(args)
    try:
        result = _HANDLERS[args.command](args, cfg)
        doc, code = result if isinstance(result, tuple) else (result, 0)
        text = (_to_csv(args.command, doc) if args.output == "csv"
                else dumps_document(doc))
    except GfmError as e:
        doc = {"error": e.code, "message": str(e)}
        if e.detail:
            doc["detail"] = e.detail
        code = 3 if isinstance(e, NumericalError) else 2
        text = dumps_document(doc)
        print(f"error [{e.code}]: {e}", file=sys.stderr)
    _write(text, args)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
