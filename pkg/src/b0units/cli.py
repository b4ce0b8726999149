"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 invalid input, 3 guard exceeded,
4 internal inconsistency.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .abelian import AbelianGroup
from .errors import GuardExceeded, InternalInconsistency, InvalidInput
from .fakedegree import ORACLE_GUARD, PROFILE_GUARD, coadjoint_profile, fake_degree_report
from .invariants import Session, bogomolov, kernel_f, main_theorem_report, mq_layer_check, mq_structure
from .nilalgebra import NilpotentAlgebra, augmentation_ideal, parse_algebra
from .pcgroup import MAX_ORDER, PcPresentation, builtin, parse_presentation
from .selftest import run_selftest
from .smallfield import field_for_q
from .unitgroup import MAX_GENERATORS, unit_abelianization

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_GUARD, EXIT_INTERNAL = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    group: str | None
    algebra: str | None
    q: int | None
    m: int | None
    json: bool
    max_order: int
    max_gens: int
    seed: int
    alt_embedding: bool
    quick: bool = False

    @property
    def choice(self) -> int:
        return 1 if self.alt_embedding else 0


def load_group(source: str) -> PcPresentation:
    if source.startswith("builtin:"):
        return builtin(source.split(":", 1)[1])
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidInput(f"cannot read {source}: {exc.strerror}") from None
    return parse_presentation(text, name=path.stem)


def load_algebra(source: str) -> NilpotentAlgebra:
    try:
        text = Path(source).read_text()
    except OSError as exc:
        raise InvalidInput(f"cannot read {source}: {exc.strerror}") from None
    return parse_algebra(text)


def ab_json(A: AbelianGroup) -> list[int]:
    return list(A.factors)


def _q_for(cfg: RunConfig, pres: PcPresentation) -> int:
    q = cfg.q if cfg.q is not None else pres.p
    if field_for_q(q).p != pres.p:
        raise InvalidInput(f"q = {q} is not a power of the group prime {pres.p}")
    return q


def _need_group(cfg: RunConfig) -> PcPresentation:
    if not cfg.group:
        raise UsageError(f"{cfg.command} needs --group")
    if cfg.algebra:
        raise UsageError("--group and --algebra are mutually exclusive")
    pres = load_group(cfg.group)
    pres.check_guard(cfg.max_order)
    return pres


def _algebra_for(cfg: RunConfig) -> tuple[NilpotentAlgebra, int]:
    if cfg.group and cfg.algebra:
        raise UsageError("--group and --algebra are mutually exclusive")
    if cfg.algebra:
        A = load_algebra(cfg.algebra)
        if cfg.q is not None and cfg.q != A.field.q:
            raise InvalidInput(f"--q {cfg.q} does not match the algebra field F_{A.field.q}")
        return A, A.field.q
    pres = _need_group(cfg)
    q = _q_for(cfg, pres)
    return augmentation_ideal(pres, field_for_q(q)), q


# -- commands ---------------------------------------------------------------------------

def cmd_classes(cfg: RunConfig):
    pres = _need_group(cfg)
    s = Session(pres, cfg.max_order, cfg.max_gens)
    cls = s.classes.classes
    results = {
        "k": len(cls),
        "sizes": [c.size for c in cls],
        "representatives": [list(c.rep) for c in cls],
        "power_map": [c.power for c in cls],
        "heights": [c.height for c in cls],
    }
    lines = [f"k = {len(cls)}"]
    for i, c in enumerate(cls):
        lines.append(f"  class {i}: rep {list(c.rep)} size {c.size} power {c.power} height {c.height}")
    return None, results, lines


def cmd_units(cfg: RunConfig):
    if cfg.algebra:
        A, q = _algebra_for(cfg)
        ab = unit_abelianization(A, max_generators=cfg.max_gens).group
        results = {"unit_ab": ab_json(ab), "unit_ab_order": ab.order()}
        return q, results, [f"(1+J)_ab = {ab}", f"order = {ab.order()}"]
    pres = _need_group(cfg)
    q = _q_for(cfg, pres)
    rep = main_theorem_report(pres, q, Session(pres, cfg.max_order, cfg.max_gens))
    results = {"k": rep.k, "unit_ab": ab_json(rep.unit_ab), "unit_ab_order": rep.unit_ab_order,
               "q_pow_k_minus_1": rep.q_pow_k_minus_1, "inferred_b0_order": rep.inferred_b0_order}
    lines = [f"(1+I)_ab = {rep.unit_ab}", f"order = {rep.unit_ab_order}",
             f"q^(k-1) = {rep.q_pow_k_minus_1} (k = {rep.k})", f"inferred |B0| = {rep.inferred_b0_order}"]
    return q, results, lines


def cmd_mq(cfg: RunConfig):
    pres = _need_group(cfg)
    q = _q_for(cfg, pres)
    s = Session(pres, cfg.max_order, cfg.max_gens)
    M = mq_structure(pres, q, s)
    layers = mq_layer_check(pres, q, s)
    results = {"mq": ab_json(M), "order": M.order(), "k": s.k,
               "layer_sizes": [a for a, _ in layers], "expected_layer_sizes": [b for _, b in layers]}
    return q, results, [f"M_q = {M}", f"order = {M.order()} = q^{s.k - 1}",
                        "layers: " + ", ".join(f"{a}" for a, _ in layers)]


def cmd_bogomolov(cfg: RunConfig):
    pres = _need_group(cfg)
    q = _q_for(cfg, pres)
    s = Session(pres, cfg.max_order, cfg.max_gens)
    rep = bogomolov(pres, q, cfg.choice, s)
    results = {"k": rep.k, "unit_ab": ab_json(rep.unit_ab), "mq": ab_json(rep.mq),
               "b0_order": rep.b0_order, "b0_structure": ab_json(rep.b0_structure),
               "b0_exponent": rep.b0_exponent,
               "kernel_orders": {str(m): o for m, o in sorted(rep.kernel_orders.items())}}
    lines = [f"|B0| = {rep.b0_order}", f"B0 = {rep.b0_structure}", f"exp B0 = {rep.b0_exponent}",
             "kernel orders: " + ", ".join(f"m={m}: {o}" for m, o in sorted(rep.kernel_orders.items()))]
    if cfg.m is not None:
        res = kernel_f(pres, q, cfg.m, cfg.choice, s)
        results["kernel_m"] = {"m": cfg.m, "kernel": ab_json(res.kernel), "order": res.kernel.order()}
        lines.append(f"ker f_{cfg.m} = {res.kernel}")
    return q, results, lines


def cmd_fakedegree(cfg: RunConfig):
    A, q = _algebra_for(cfg)
    rep = fake_degree_report(A, compare_orbits=True, oracle_guard=ORACLE_GUARD)
    results = {"fixed_points": rep.fixed_points, "ab_order": rep.ab_order, "verdict": rep.verdict,
               "ratio": rep.ratio, "orbit_total": rep.orbit_total, "class_count": rep.class_count,
               "profile": None}
    lines = [f"fixed points = {rep.fixed_points}", f"|(1+J)_ab| = {rep.ab_order}",
             f"verdict: {rep.verdict}" + (f" (ratio {rep.ratio})" if rep.ratio != 1 else "")]
    if q ** A.dim <= PROFILE_GUARD:
        prof = coadjoint_profile(A)
        results["profile"] = {str(k): v for k, v in prof.fake_degrees.items()}
        lines.append("fake degrees: " + ", ".join(f"{k}x{v}" for k, v in prof.fake_degrees.items()))
    if rep.orbit_total is not None:
        lines.append(f"orbits = {rep.orbit_total}, classes of 1+J = {rep.class_count}")
    return q, results, lines


def cmd_selftest(cfg: RunConfig):
    if cfg.group:
        _need_group(cfg)  # surfaces parse errors with exit 2
    if cfg.algebra:
        load_algebra(cfg.algebra)
    checks = run_selftest(cfg.seed, cfg.max_order, cfg.max_gens, quick=cfg.quick)
    results = {"checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
               "passed": all(c.passed for c in checks)}
    lines = [f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}" for c in checks]
    if not results["passed"]:
        raise _SelftestFailed(results, lines)
    return None, results, lines


class _SelftestFailed(InternalInconsistency):
    def __init__(self, results, lines):
        super().__init__("self-test failed")
        self.results, self.lines = results, lines


COMMANDS = {"classes": cmd_classes, "units": cmd_units, "mq": cmd_mq, "bogomolov": cmd_bogomolov,
            "fakedegree": cmd_fakedegree, "selftest": cmd_selftest}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="b0units", description="Unit groups of modular group algebras and B0(pi).")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--group", help="builtin:<name> or a presentation file")
    parser.add_argument("--algebra", help="algebra file (units, fakedegree)")
    parser.add_argument("--q", type=int, help="field size q = p^n (default p)")
    parser.add_argument("--m", type=int, help="extra extension degree for bogomolov")
    parser.add_argument("--json", action="store_true", help="emit JSON")
    parser.add_argument("--max-order", type=int, default=MAX_ORDER)
    parser.add_argument("--max-gens", type=int, default=MAX_GENERATORS)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--alt-embedding", action="store_true", help="use the second root for embeddings")
    parser.add_argument("--quick", action="store_true", help="selftest: skip the slowest case")
    return parser


def _emit(cfg: RunConfig, q, results, lines, timings, out) -> None:
    if cfg.json:
        payload = {"command": cfg.command,
                   "input": {"group": cfg.group, "algebra": cfg.algebra, "q": cfg.q, "m": cfg.m,
                             "seed": cfg.seed, "alt_embedding": cfg.alt_embedding},
                   "q": q, "results": results, "timings_ms": timings}
        out.write(json.dumps(payload, sort_keys=True) + "\n")
    else:
        out.write("\n".join(lines) + "\n")


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        ns = build_parser().parse_args(argv)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    cfg = RunConfig(ns.command, ns.group, ns.algebra, ns.q, ns.m, ns.json, ns.max_order,
                    ns.max_gens, ns.seed, ns.alt_embedding, ns.quick)
    start = time.perf_counter()
    try:
        q, results, lines = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except _SelftestFailed as exc:
        _emit(cfg, None, exc.results, exc.lines, {"total": 0}, out)
        return EXIT_INTERNAL
    except InvalidInput as exc:
        err.write(f"invalid input: {exc}\n")
        return EXIT_INPUT
    except GuardExceeded as exc:
        err.write(f"guard exceeded: {exc}\n")
        return EXIT_GUARD
    except InternalInconsistency as exc:
        err.write(f"internal inconsistency: {exc}\n")
        return EXIT_INTERNAL
    timings = {"total": round((time.perf_counter() - start) * 1000, 3)}
    _emit(cfg, q, results, lines, timings, out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
