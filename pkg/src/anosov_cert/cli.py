"""Command-line front end: ``anosov-cert <subcommand>``.

Exit codes: 0 pass / feasible / certified, 1 fail / infeasible / incomplete,
2 usage or parse error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from anosov_cert import groups
from anosov_cert.l2g import (
    InfeasibleError,
    MorseQIParams,
    QuadrupleParams,
    StraightSpacedParams,
    check_quadruple,
    check_straight_spaced,
    get_policy,
    solve_local_scale,
    straight_params,
    word_radius_for_scale,
)
from anosov_cert.logscalar import LogScalar
from anosov_cert.matrix_io import MatrixFormatError, read_matrices
from anosov_cert.perturb import (
    PerturbationScenario,
    generator_frob_bound,
    local_morse_transfer,
    neighborhood_radius,
    orbit_displacement_bound_checked,
)
from anosov_cert.report import dumps, envelope
from anosov_cert.symspace import GeometryError, GroupElement, model_constants

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# Radii stated for the two presets in the source theorems, as powers of ten.
PUBLISHED_RADIUS = {"free": -15309, "surface": -3698433}


class UsageError(Exception):
    """Bad input detected after argument parsing; maps to exit code 2."""


# -- input helpers -------------------------------------------------------------


def _load_json(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise UsageError(f"{path}: top-level JSON value must be an object")
    return data


def _build(cls, data: dict, what: str):
    try:
        return cls(**data)
    except TypeError as exc:
        raise UsageError(f"bad {what} parameters: {exc}") from None
    except ValueError as exc:
        raise UsageError(f"invalid {what} parameters: {exc}") from None


def _constants_from(data: dict):
    try:
        return model_constants(int(data.get("d", 3)), data.get("tau"))
    except GeometryError as exc:
        raise UsageError(str(exc)) from None


def _parse_tau(text: Optional[str]):
    if text is None:
        return None
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"--tau must be a comma-separated list of integers, got {text!r}") from None


def _parse_qi(text: str) -> tuple[float, float, float, float]:
    try:
        vals = tuple(float(t) for t in text.split(","))
    except ValueError:
        vals = ()
    if len(vals) != 4:
        raise UsageError(f"--qi needs four comma-separated numbers c1,c2,c3,c4, got {text!r}")
    return vals


def _load_generators(path: str) -> list[np.ndarray]:
    try:
        return read_matrices(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except MatrixFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _model_from_matrices(mats: list[np.ndarray], kind: str, name: str) -> groups.GroupModel:
    """Close a generator list under inversion and wrap it as a GroupModel."""
    try:
        elems = [GroupElement(m) for m in mats]
    except (GeometryError, ValueError) as exc:
        raise UsageError(f"bad generator: {exc}") from None
    keys = [groups.element_key(e.entries) for e in elems]
    for e in list(elems):
        inv = e.inverse()
        k = groups.element_key(inv.entries)
        if k not in keys:
            elems.append(inv)
            keys.append(k)
    gens = []
    for i, e in enumerate(elems):
        j = keys.index(groups.element_key(np.linalg.inv(e.entries)))
        gens.append(groups.Generator(f"s{i}", e, j))
    try:
        return groups.GroupModel(name=name, generators=tuple(gens), kind=kind)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _digest(mats: Sequence[np.ndarray]) -> str:
    h = hashlib.sha256()
    for m in mats:
        h.update(np.ascontiguousarray(m, dtype="<f8").tobytes())
    return h.hexdigest()


def _emit(args, payload: dict) -> None:
    text = dumps(payload)
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)


# -- subcommands ---------------------------------------------------------------


def cmd_constants(args) -> int:
    try:
        mc = model_constants(args.d, _parse_tau(args.tau))
    except GeometryError as exc:
        raise UsageError(str(exc)) from None
    _emit(args, envelope("constants", {"constants": mc}))
    return EXIT_OK


def cmd_check(args) -> int:
    data = _load_json(args.file)
    mc = _constants_from(data)
    params = data.get("params", {k: v for k, v in data.items() if k not in ("d", "tau")})
    if args.theorem == "straight":
        report = check_straight_spaced(mc, _build(StraightSpacedParams, params, "straight-spaced"))
    else:
        report = check_quadruple(mc, _build(QuadrupleParams, params, "quadruple"))
    _emit(args, envelope("check", {"constants": mc, "params": params, "report": report}))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_solve(args) -> int:
    data = _load_json(args.file)
    mc = _constants_from(data)
    if "alpha_out" not in data:
        raise UsageError("solve input needs an 'alpha_out' value")
    morse_data = data.get("morse", {k: data[k] for k in ("alpha0", "D", "c1", "c2", "c3", "c4") if k in data})
    morse = _build(MorseQIParams, morse_data, "Morse")
    policy = args.policy or data.get("policy")
    try:
        pol = get_policy(policy)
        sol = solve_local_scale(mc, morse, float(data["alpha_out"]), pol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    except InfeasibleError as exc:
        _emit(args, envelope("solve", {"constants": mc, "morse": morse, "status": "infeasible", "error": str(exc),
                                       "blocking": list(exc.blocking)}))
        return EXIT_FAIL
    _emit(args, envelope("solve", {"constants": mc, "morse": morse, "status": "feasible", "solution": sol}))
    return EXIT_OK


def _base_free(args) -> dict:
    try:
        fc = groups.free_group_constants(args.tanh_t)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    model = groups.free_group_generators(args.tanh_t)
    mc = model_constants(3)
    base = MorseQIParams(
        alpha0=mc.zeta0, D=fc.R, c1=max(1.0, 1.0 / fc.c1_inv), c2=0.0, c3=fc.c3, c4=0.0
    )
    mats = [g.element.entries for g in model.generators]
    return {
        "model": model.name,
        "mc": mc,
        "base": base,
        "provenance": {"source": "free-group octagon constants", "free_group": fc},
        "A": max(g.element.frobenius() for g in model.generators),
        "A_provenance": "direct Frobenius norms of the generators",
        "max_generator_norm": max(g.element.frobenius() for g in model.generators),
        "digest": _digest(mats),
        "complete": True,
        "extra": {},
    }


def _base_surface(args) -> dict:
    R = groups.surface_cover_radius()
    c1, c2, c3, c4 = groups.milnor_schwarz_constants(R)
    mc = model_constants(3)
    hyp = groups.HyperbolicityInput(delta_hyp=args.delta_hyp, M=c3, l=1.0, a=1.0)
    morse_c = groups.classical_morse_constants(hyp)
    base = MorseQIParams(alpha0=mc.zeta0, D=morse_c.R, c1=c1, c2=c2, c3=c3, c4=c4)
    model = groups.surface_group_model()
    ball = groups.ball_generating_set(model, 2 * R + 1, depth_cap=args.depth_cap)
    bound = generator_frob_bound(3, 2 * R + 1)
    direct = ball.max_frobenius()
    A = bound if args.frob_source == "bound" else direct
    return {
        "model": model.name,
        "mc": mc,
        "base": base,
        "provenance": {
            "source": "Milnor-Schwarz and classical Morse lemma",
            "cover_radius": R,
            "two_R_plus_1": 2 * R + 1,
            "hyperbolicity": hyp,
            "classical_morse": morse_c,
        },
        "A": A,
        "A_provenance": f"{args.frob_source}: bound {bound!r}, direct max over S' {direct!r}",
        "max_generator_norm": direct,
        "digest": _digest([e.entries for e in ball.elements]),
        "complete": ball.complete,
        "extra": {"S_prime": {"size": len(ball), "complete": ball.complete, "depth": ball.depth_reached,
                              "max_displacement": ball.max_displacement()}},
    }


def _base_custom(args) -> dict:
    if not args.generators or args.alpha0 is None or args.morse_d is None or args.qi is None:
        raise UsageError("certify custom needs --generators, --alpha0, --morse-d and --qi")
    mats = _load_generators(args.generators)
    model = _model_from_matrices(mats, "cayley", Path(args.generators).name)
    mc = model_constants(model.d, _parse_tau(args.tau))
    c1, c2, c3, c4 = _parse_qi(args.qi)
    base = _build(MorseQIParams, dict(alpha0=args.alpha0, D=args.morse_d, c1=c1, c2=c2, c3=c3, c4=c4), "Morse")
    return {
        "model": model.name,
        "mc": mc,
        "base": base,
        "provenance": {"source": "user supplied"},
        "A": max(1.0, max(g.element.frobenius() for g in model.generators)),
        "A_provenance": "direct Frobenius norms of the generators",
        "max_generator_norm": max(g.element.frobenius() for g in model.generators),
        "digest": _digest(mats),
        "complete": True,
        "extra": {},
    }


def cmd_certify(args) -> int:
    setup = {"free": _base_free, "surface": _base_surface, "custom": _base_custom}[args.preset](args)
    mc, base = setup["mc"], setup["base"]
    if args.slack < 0 or args.target_disp <= 0:
        raise UsageError("--slack must be nonnegative and --target-disp positive")
    if not 0 < args.alpha_out_ratio < 1:
        raise UsageError("--alpha-out-ratio must lie strictly between 0 and 1")
    alpha_out = args.alpha_out_ratio * base.alpha0
    report = {
        "inputs": {
            "preset": args.preset,
            "model": setup["model"],
            "generators_sha256": setup["digest"],
            "alpha_out_ratio": args.alpha_out_ratio,
            "slack": args.slack,
            "target_disp": args.target_disp,
            "policy": get_policy(args.policy).name,
            "local_scale": args.local_scale,
        },
        "constants": mc,
        "base": base,
        "base_provenance": setup["provenance"],
        **setup["extra"],
    }
    if not setup["complete"]:
        report["verdict"] = "incomplete"
        _emit(args, envelope("certify", report))
        return EXIT_FAIL

    # relax additive constants; the scale itself is fixed after solving
    _, relaxed = local_morse_transfer(base, args.slack, 1)
    report["relaxed"] = relaxed
    try:
        sol = solve_local_scale(mc, relaxed, alpha_out, args.policy)
    except InfeasibleError as exc:
        report.update(verdict="infeasible", error=str(exc), blocking=list(exc.blocking))
        _emit(args, envelope("certify", report))
        return EXIT_FAIL
    L = sol.L
    if args.local_scale is not None:
        if args.local_scale < sol.L:
            raise UsageError(f"--local-scale {args.local_scale} is below the solved scale {sol.L}")
        L = args.local_scale
    k_w = max(3, word_radius_for_scale(L))
    scale, _ = local_morse_transfer(base, args.slack, k_w)

    A = setup["A"]
    eps = neighborhood_radius(mc.d, A, k_w, args.target_disp)
    check = orbit_displacement_bound_checked(PerturbationScenario(d=mc.d, A=A, k=k_w, eps=eps))
    stages = {
        "straight_spaced": sol.straight.passed,
        "quadruple": sol.quadruple.passed,
        "perturbation": check.ok and check.value <= LogScalar.from_float(args.target_disp) * (1 + 1e-12),
        "scale": scale >= sol.L,
        "generator_norms": setup["max_generator_norm"] <= A,
    }
    report.update(
        solution=sol,
        local_scale=L,
        word_radius=k_w,
        transfer_scale=scale,
        generator_norm_bound={"A": A, "provenance": setup["A_provenance"]},
        radius={
            "log10_epsilon": eps.log10(),
            "epsilon_power_of_ten": eps.floor_power_of_ten(),
            "value": eps,
        },
        displacement_check=check,
    )
    published = PUBLISHED_RADIUS.get(args.preset)
    if published is not None:
        pub = orbit_displacement_bound_checked(
            PerturbationScenario(d=mc.d, A=A, k=k_w, eps=LogScalar.from_log10(published))
        )
        report["published_radius_check"] = {
            "log10_epsilon": published,
            "displacement": pub.value,
            "within_target": pub.ok and pub.value <= LogScalar.from_float(args.target_disp),
            "radius_at_least_as_generous": eps.log10() >= published,
        }
    report["stages"] = stages
    report["verdict"] = "certified" if all(stages.values()) else "infeasible"
    _emit(args, envelope("certify", report))
    return EXIT_OK if report["verdict"] == "certified" else EXIT_FAIL


def cmd_verify_local(args) -> int:
    if args.preset == "free":
        model = groups.free_group_generators(args.tanh_t)
    elif args.preset == "surface":
        model = groups.surface_group_model()
    elif args.generators:
        model = _model_from_matrices(_load_generators(args.generators), args.kind, Path(args.generators).name)
    else:
        raise UsageError("verify-local needs --generators or --preset")
    mc = model_constants(model.d, _parse_tau(args.tau))
    alpha0 = mc.zeta0 if args.alpha0 is None else args.alpha0
    c1, c2, c3, c4 = _parse_qi(args.qi)
    target = _build(MorseQIParams, dict(alpha0=alpha0, D=0.0, c1=c1, c2=c2, c3=c3, c4=c4), "target")
    pol = get_policy(args.policy)
    base = straight_params(mc, alpha0, 0.95 * alpha0, pol, s=args.spacing)
    eps = base.epsilon if args.epsilon is None else args.epsilon
    straightness = _build(
        StraightSpacedParams,
        dict(alpha_in=alpha0, alpha_out=0.95 * alpha0, delta=base.delta, epsilon=eps, s=args.spacing),
        "straightness",
    )
    try:
        result = groups.local_morse_verify(model, mc, target, straightness, args.max_len)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(args, envelope("verify-local", {"constants": mc, "target": target, "straightness": straightness,
                                          "result": result}))
    return EXIT_OK if result["verdict"] == "pass" else EXIT_FAIL


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="anosov-cert", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version="%(prog)s 0.1.0")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constants", help="model constants kappa0, zeta0, c0")
    c.add_argument("--d", type=int, required=True)
    c.add_argument("--tau", help="comma-separated simple roots, default all")
    c.add_argument("--out")
    c.set_defaults(func=cmd_constants)

    c = sub.add_parser("check", help="check one theorem's hypotheses on a JSON parameter file")
    c.add_argument("theorem", choices=["straight", "quadruple"])
    c.add_argument("--file", required=True)
    c.add_argument("--out")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("solve", help="solve for the local-to-global scale")
    c.add_argument("--file", required=True)
    c.add_argument("--policy")
    c.add_argument("--out")
    c.set_defaults(func=cmd_solve)

    c = sub.add_parser("certify", help="end-to-end perturbation neighborhood")
    c.add_argument("preset", choices=["free", "surface", "custom"])
    c.add_argument("--tanh-t", type=float, default=0.75, help="free preset parameter T, needs T > 1/sqrt(2)")
    c.add_argument("--alpha-out-ratio", type=float, default=None, help="alpha_out / alpha0")
    c.add_argument("--slack", type=float, default=None, help="orbit displacement absorbed by the Morse constants")
    c.add_argument("--target-disp", type=float, default=None, help="allowed orbit displacement")
    c.add_argument("--delta-hyp", type=float, default=0.6376, help="hyperbolicity constant (surface); 0.6376 is back-solved to reproduce R = 163")
    c.add_argument("--frob-source", choices=["bound", "direct"], default="bound", help="surface generator norm: closed-form bound or max over S'")
    c.add_argument("--depth-cap", type=int, default=8, help="word-length cap for the S' enumeration")
    c.add_argument("--local-scale", type=int, help="pin the local scale L (at least the solved one)")
    c.add_argument("--policy")
    c.add_argument("--generators", help="matrix file (custom)")
    c.add_argument("--tau")
    c.add_argument("--alpha0", type=float)
    c.add_argument("--morse-d", type=float, help="Morse constant D (custom)")
    c.add_argument("--qi", help="c1,c2,c3,c4 (custom)")
    c.add_argument("--out")
    c.set_defaults(func=cmd_certify)

    c = sub.add_parser("verify-local", help="desk-scale check of orbit words")
    c.add_argument("--generators")
    c.add_argument("--preset", choices=["free", "surface"])
    c.add_argument("--tanh-t", type=float, default=0.75)
    c.add_argument("--kind", choices=["free", "cayley"], default="cayley")
    c.add_argument("--max-len", type=int, required=True, help="longest word checked")
    c.add_argument("--alpha0", type=float)
    c.add_argument("--qi", required=True, help="target c1,c2,c3,c4")
    c.add_argument("--spacing", type=float, required=True, help="coarsening spacing s")
    c.add_argument("--epsilon", type=float)
    c.add_argument("--tau")
    c.add_argument("--policy")
    c.add_argument("--out")
    c.set_defaults(func=cmd_verify_local)
    return p


# preset defaults mirror the published runs
_CERTIFY_DEFAULTS = {
    "free": {"alpha_out_ratio": 0.95, "slack": 0.1, "target_disp": 0.1},
    "surface": {"alpha_out_ratio": 0.5, "slack": 10.0, "target_disp": 10.0},
    "custom": {"alpha_out_ratio": 0.95, "slack": 0.1, "target_disp": 0.1},
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "certify":
        for key, value in _CERTIFY_DEFAULTS[args.preset].items():
            if getattr(args, key) is None:
                setattr(args, key, value)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"anosov-cert: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
