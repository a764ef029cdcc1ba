"""Command-line front end.

Every report is a JSON object (keys sorted) or a CSV table, and embeds the
run configuration that produced it.  Exit status: 0 on success, 1 when the
input is well formed but rejected by the mathematics (e.g. a set that is
not maximal, a vector that is not an s.c.c.), 2 on malformed input or a
resource cap violation.

Default resource caps come from the ``XSPACE_CAPS`` environment variable,
for example ``XSPACE_CAPS="max_support=14,max_depth=6,max_size=8,time_budget=600"``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import signal
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from .engine import certify, engine_for
from .norming import to_json as functional_json
from .oracle import enumerate_W, oracle_norm
from .schreier import SchreierIndex, decompose_maximal, is_maximal_schreier, is_schreier
from .vectors import BlockSequence, FinVec, is_basic_scc, min_maximal_set, parse_rational, repeated_average

CSV_VERSION = "xspace-csv v1"
CAPS_ENV = "XSPACE_CAPS"


class InputError(Exception):
    """Malformed input or a cap violation (exit status 2)."""


class Rejected(Exception):
    """Well-formed input the mathematics rejects (exit status 1)."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass
class Caps:
    max_support: int = 14
    max_depth: int = 6
    max_size: int = 8
    time_budget: int = 600

    @classmethod
    def from_env(cls, text: str | None) -> "Caps":
        caps = cls()
        if not text:
            return caps
        for item in text.split(","):
            name, _, value = item.partition("=")
            name = name.strip()
            if not hasattr(caps, name):
                raise InputError(f"{CAPS_ENV}: unknown cap {name!r}")
            try:
                setattr(caps, name, int(value))
            except ValueError:
                raise InputError(f"{CAPS_ENV}: cap {name} needs an integer, got {value!r}") from None
        return caps

    def check(self):
        for name, value in asdict(self).items():
            if value <= 0:
                raise InputError(f"cap {name} must be positive, got {value}")


@dataclass
class RunConfig:
    command: str
    space: object
    params: dict
    seed: int | None
    output: str
    caps: Caps = field(default_factory=Caps)

    def to_json(self):
        return {
            "command": self.command,
            "space": self.space,
            "params": self.params,
            "seed": self.seed,
            "format": self.output,
            "caps": asdict(self.caps),
        }


# parsing helpers -------------------------------------------------------------


def _int_set(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        items = [int(t) for t in text.split(",")]
    except ValueError:
        raise InputError(f"not a comma separated list of integers: {text!r}") from None
    if any(i < 1 for i in items) or len(set(items)) != len(items):
        raise InputError(f"set elements must be distinct positive integers: {text!r}")
    return tuple(sorted(items))


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"not a comma separated list of integers: {text!r}") from None


def _read_json(text: str):
    if text == "-":
        text = sys.stdin.read()
    elif text.startswith("@"):
        try:
            text = Path(text[1:]).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {text[1:]}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from None


def _vector(text: str) -> FinVec:
    obj = _read_json(text)
    try:
        v = FinVec.from_json(obj)
    except (ValueError, TypeError) as exc:
        raise InputError(f"malformed vector: {exc}") from None
    if not v.is_zero() and v.min_supp < 1:
        raise InputError("vector indices must be positive")
    return v


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _space(args) -> SchreierIndex:
    if getattr(args, "omega", False):
        return SchreierIndex.omega()
    n = getattr(args, "n", None)
    if n is None:
        raise InputError("choose a space with --n K or --omega")
    if n < 0:
        raise InputError("--n must be >= 0")
    return SchreierIndex(n)


def _sequence(desc: str, family: SchreierIndex) -> BlockSequence:
    """basis:A-B | fast:S1,S2,...[@start] | scc:K:COUNT | c0:COUNT | json:<vector list JSON, @file or ->"""
    from .experiments.spreading import block_fast_growing, c0_selection, scc_blocking

    kind, _, rest = desc.partition(":")
    try:
        if kind == "basis":
            a, _, b = rest.partition("-")
            lo, hi = int(a), int(b)
            if lo < 1 or hi < lo:
                raise InputError(f"bad basis range {rest!r}")
            return BlockSequence.basis(range(lo, hi + 1))
        if kind == "fast":
            sizes_text, _, start = rest.partition("@")
            sizes = _int_list(sizes_text)
            start = int(start) if start else 2
            need = start + sum(sizes)
            return block_fast_growing(BlockSequence.basis(range(1, need + 1)), sizes, start)
        if kind == "scc":
            k, _, count = rest.partition(":")
            k, count = int(k), int(count)
            length = 2
            while True:
                try:
                    return scc_blocking(BlockSequence.basis(range(2, length + 2)), k, count).blocks
                except ValueError as exc:
                    if "too short" not in str(exc) or length > 4096:
                        raise
                    length *= 2
        if kind == "c0":
            return BlockSequence(c0_selection(int(rest), family).vectors)
        if kind == "json":
            return BlockSequence.from_json(_read_json(rest))
    except InputError:
        raise
    except ValueError as exc:
        if kind in ("fast", "scc"):
            raise Rejected(str(exc)) from None
        raise InputError(f"bad sequence {desc!r}: {exc}") from None
    raise InputError(f"unknown sequence kind {kind!r}")


def _check_support(v: FinVec, caps: Caps):
    if len(v) > caps.max_support:
        raise InputError(f"cap violation: support size {len(v)} exceeds max_support={caps.max_support}")


def _seed(args) -> int:
    if args.seed is None:
        raise InputError("--seed is required for sampled experiments")
    if not -(2**63) <= args.seed < 2**64:
        raise InputError("--seed must fit in 64 bits")
    return args.seed


# commands -------------------------------------------------------------------


def cmd_schreier(args, caps):
    F = _int_set(args.set)
    if args.action == "decompose":
        if args.k is None:
            raise InputError("decompose needs --k")
        try:
            pieces = decompose_maximal(F, args.k)
        except ValueError as exc:
            raise Rejected(str(exc)) from None
        return {"pieces": [list(p) for p in pieces]}, [{"piece": i + 1, "elements": list(p)} for i, p in enumerate(pieces)]
    index = SchreierIndex.omega() if args.omega else SchreierIndex(args.k if args.k is not None else 1)
    if args.action == "member":
        res = {"member": is_schreier(F, index)}
    else:
        res = {"maximal": is_maximal_schreier(F, index)}
    return res, [dict(res, set=list(F), index=index.to_json())]


def cmd_repavg(args, caps):
    F = _int_set(args.set) if args.set else min_maximal_set(args.k, args.start)
    if not F:
        raise InputError("give --set or --start")
    try:
        x = repeated_average(args.k, F)
    except ValueError as exc:
        raise Rejected(str(exc)) from None
    cert = is_basic_scc(x, args.k, Fraction(3, F[0]))
    res = {"set": list(F), "vector": x.to_json(), "certificate": cert.to_json()}
    rows = [{"index": i, "coefficient": str(x[i])} for i in x.support()]
    return res, rows


def cmd_scc_check(args, caps):
    x = _vector(args.vector)
    eps = _rational(args.eps)
    try:
        cert = is_basic_scc(x, args.k, eps)
    except ValueError as exc:
        raise Rejected(str(exc)) from None
    res = {"certificate": cert.to_json()}
    if not cert.valid:
        raise Rejected(cert.failure, res)
    return res, [{"valid": cert.valid, "worst_weight": str(cert.worst_weight), "worst_subset": list(cert.worst_subset)}]


def cmd_norm(args, caps):
    family = _space(args)
    x = _vector(args.vector)
    _check_support(x, caps)
    cert = engine_for(family).norm(x)
    res = {"value": str(cert.value), "certified": certify(cert, x) if not x.is_zero() else True}
    if args.witness:
        res["witness"] = None if cert.witness is None else functional_json(cert.witness)
        res["stats"] = cert.stats
    if args.oracle_check:
        bound = 1 if x.is_zero() else x.max_supp
        size_cap = bound + 1
        if size_cap > caps.max_size:
            raise InputError(f"cap violation: oracle check needs size cap {size_cap} > max_size={caps.max_size}")
        oval, owit = oracle_norm(x, family, bound, caps.max_depth, size_cap)
        res["oracle"] = {
            "value": str(oval),
            "depth": caps.max_depth,
            "size_cap": size_cap,
            "agrees": oval == cert.value,
        }
        if oval != cert.value:
            raise Rejected(f"oracle value {oval} differs from engine value {cert.value}", res)
    return res, [{"value": res["value"], "certified": res["certified"]}]


def cmd_smv(args, caps):
    from .experiments.spreading import smv_report

    family = _space(args)
    seq = _sequence(args.seq, family)
    seed = _seed(args) if args.samples else None
    report = smv_report(seq, args.seq, _int_list(args.t), _int_list(args.k), family, seed, args.samples)
    return report.to_json(), report.rows()


def cmd_alpha(args, caps):
    from .experiments.alpha import alpha_probe

    family = _space(args)
    seq = _sequence(args.seq, family)
    res = alpha_probe(seq, args.k, args.j0, args.i0, family)
    return res.to_json(), [{"k": res.k, "j0": res.j0, "i0": res.i0, "sup_value": str(res.sup_value), "position": res.position}]


def cmd_operator(args, caps):
    from .experiments.operators import (
        noncompactness_rows,
        operator_chain,
        operator_norm_probe,
        dyadic_schedule_spec,
        standard_probes,
    )

    family = _space(args)
    if args.spec == "dyadic":
        spec = dyadic_schedule_spec(args.count)
        probe = operator_norm_probe(spec, standard_probes(spec), family)
        nc = noncompactness_rows(spec, family)
        res = {"spec": spec.to_json(), "norm_probe": probe.to_json(), "noncompactness": nc}
        if not probe.ok or not all(r["equal"] for r in nc):
            raise Rejected("operator probe bound or identity failed", res)
        return res, probe.rows
    try:
        chain = operator_chain(args.stages, args.truncation, family=family)
    except ValueError as exc:
        raise Rejected(str(exc)) from None
    rows = [{"stage": k, "i": i + 1, "coefficient": str(c)} for k, row in enumerate(chain.coefficients) for i, c in enumerate(row)]
    return chain.to_json(), rows


def cmd_ssk(args, caps):
    from .experiments.operators import chain_sequence, operator_apply, operator_chain
    from .experiments.ssk import ssk_probe

    family = _space(args)
    seed = _seed(args)
    try:
        chain = operator_chain(args.stages, args.truncation, family=family)
    except ValueError as exc:
        raise Rejected(str(exc)) from None
    stages = _int_list(args.compose) if args.compose else list(range(1, args.stages + 1))
    if not stages or any(s < 1 or s > args.stages for s in stages):
        raise InputError(f"--compose stages must lie in 1..{args.stages}")
    specs = [chain.specs[s - 1] for s in stages]

    def apply(v):
        for s in reversed(specs):
            v = operator_apply(s, v)
        return v

    seq = chain_sequence(chain, args.seq_stage or stages[-1])
    res = ssk_probe(apply, seq, args.k, _rational(args.eps), args.budget, seed, family)
    out = res.to_json()
    out["operator"] = "".join(f"S{s}" for s in stages)
    return out, [{"operator": out["operator"], "status": res.status, "tried": res.tried}]


def cmd_equiv(args, caps):
    from .experiments.equivalence import equivalence_probe, interlaced_pair

    family = _space(args)
    seed = _seed(args)
    try:
        pair = interlaced_pair(args.k, args.count, family)
    except ValueError as exc:
        raise Rejected(str(exc)) from None
    theta = _rational(args.theta) if args.theta else pair.theta
    rep = equivalence_probe(pair.z, pair.w, theta, args.trials, seed, family)
    res = rep.to_json()
    res["z"] = pair.z.to_json()
    res["w"] = pair.w.to_json()
    return res, rep.rows


def cmd_oracle(args, caps):
    family = _space(args)
    if args.depth > caps.max_depth:
        raise InputError(f"cap violation: depth {args.depth} exceeds max_depth={caps.max_depth}")
    if args.size_cap > caps.max_size:
        raise InputError(f"cap violation: size cap {args.size_cap} exceeds max_size={caps.max_size}")
    if args.vector:
        x = _vector(args.vector)
        try:
            val, wit = oracle_norm(x, family, args.support_bound, args.depth, args.size_cap)
        except ValueError as exc:
            raise Rejected(str(exc)) from None
        res = {"value": str(val), "witness": None if wit is None else functional_json(wit)}
        return res, [{"value": str(val)}]
    if args.support_bound > 4:
        raise InputError("listing the truncated norming set is limited to --support-bound <= 4")
    fs = enumerate_W(args.support_bound, family, args.depth, args.size_cap)
    return {"count": len(fs), "functionals": [functional_json(f) for f in fs]}, [
        {"position": i, "functional": json.dumps(functional_json(f), sort_keys=True)} for i, f in enumerate(fs)
    ]


# output ---------------------------------------------------------------------


def _csv(config: RunConfig, rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(f"# {CSV_VERSION} command={config.command}\n")
    buf.write("# config=" + json.dumps(config.to_json(), sort_keys=True) + "\n")
    fields: list[str] = []
    for r in rows:
        for key in r:
            if key not in fields:
                fields.append(key)
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: json.dumps(v, sort_keys=True) if isinstance(v, (list, dict)) else v for k, v in r.items()})
    return buf.getvalue()


def _space_flags(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--n", type=int, help="finite Schreier order of the space")
    g.add_argument("--omega", action="store_true", help="use the S_omega space")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xspace", description=__doc__.splitlines()[0])
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--out", help="write the report to this file instead of stdout")
    parser.add_argument("--seed", type=int, help="random seed (required for sampled experiments)")
    # --seed is also accepted after the subcommand
    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schreier", parents=[seeded], help="Schreier family queries")
    p.add_argument("action", choices=("member", "maximal", "decompose"))
    p.add_argument("--set", required=True, help="comma separated positive integers")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--k", type=int)
    g.add_argument("--omega", action="store_true")
    p.set_defaults(func=cmd_schreier)

    p = sub.add_parser("repavg", parents=[seeded], help="repeated average on a maximal Schreier set")
    p.add_argument("--k", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--set")
    g.add_argument("--start", type=int)
    p.set_defaults(func=cmd_repavg)

    p = sub.add_parser("scc-check", parents=[seeded], help="basic special convex combination check")
    p.add_argument("--vector", required=True, help="JSON object, @file or - for stdin")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", required=True, help="rational p/q")
    p.set_defaults(func=cmd_scc_check)

    p = sub.add_parser("norm", parents=[seeded], help="exact norm with a witness functional")
    p.add_argument("--vector", required=True, help="JSON object, @file or - for stdin")
    _space_flags(p)
    p.add_argument("--witness", action="store_true")
    p.add_argument("--oracle-check", action="store_true")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("smv", parents=[seeded], help="c_0 and l_1^k spreading constants of a sequence")
    p.add_argument("--seq", required=True, help=_sequence.__doc__)
    _space_flags(p)
    p.add_argument("--t", default="1,2", help="scales")
    p.add_argument("--k", default="1", help="l_1 orders")
    p.add_argument("--samples", type=int, default=0, help="random simplex points per set (needs --seed)")
    p.set_defaults(func=cmd_smv)

    p = sub.add_parser("alpha-probe", parents=[seeded], help="sup of very fast growing average families on a sequence")
    p.add_argument("--seq", required=True, help=_sequence.__doc__)
    _space_flags(p)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--j0", type=int, default=2)
    p.add_argument("--i0", type=int, default=1)
    p.set_defaults(func=cmd_alpha)

    p = sub.add_parser("operator", parents=[seeded], help="operator constructions and norm probes")
    p.add_argument("--spec", choices=("dyadic", "chain"), default="dyadic")
    _space_flags(p)
    p.add_argument("--count", type=int, default=3, help="schedule terms for the dyadic-schedule spec")
    p.add_argument("--stages", type=int, default=2, help="chain length")
    p.add_argument("--truncation", type=int, default=62)
    p.set_defaults(func=cmd_operator)

    p = sub.add_parser("ssk-probe", parents=[seeded], help="search for contracting vectors of a chain composition")
    _space_flags(p)
    p.add_argument("--stages", type=int, default=2)
    p.add_argument("--truncation", type=int, default=1022)
    p.add_argument("--compose", help="stages applied, outermost first, e.g. 1,2")
    p.add_argument("--seq-stage", type=int, help="stage whose vectors span the search (default: innermost)")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--eps", default="1/4")
    p.add_argument("--budget", type=int, default=60)
    p.set_defaults(func=cmd_ssk)

    p = sub.add_parser("equiv-probe", parents=[seeded], help="sampled equivalence of interlaced s.c.c. blockings")
    _space_flags(p)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--count", type=int, default=2)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--theta", help="override the measured l_1 constant")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("oracle", parents=[seeded], help="truncated norming set: list it, or maximize over it")
    _space_flags(p)
    p.add_argument("--support-bound", type=int, required=True)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--size-cap", type=int, default=3)
    p.add_argument("--vector", help="maximize over the truncated set at this vector")
    p.set_defaults(func=cmd_oracle)
    return parser


def _params(args) -> dict:
    skip = {"func", "command", "format", "seed", "out"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _space_of(args):
    if getattr(args, "omega", False):
        return "omega"
    return getattr(args, "n", None)


def _on_alarm(signum, frame):
    raise TimeoutError


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        caps = Caps.from_env(os.environ.get(CAPS_ENV))
        caps.check()
    except InputError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    config = RunConfig(args.command, _space_of(args), _params(args), args.seed, args.format, caps)
    status, result, rows = 0, None, []
    use_alarm = hasattr(signal, "SIGALRM")
    if use_alarm:
        old = signal.signal(signal.SIGALRM, _on_alarm)
        signal.alarm(caps.time_budget)
    try:
        result, rows = args.func(args, caps)
    except InputError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except Rejected as exc:
        print(f"rejected: {exc}", file=stderr)
        status, result = 1, exc.report
        if result is None:
            return 1
    except TimeoutError:
        print(f"rejected: time budget of {caps.time_budget}s exceeded", file=stderr)
        return 1
    finally:
        if use_alarm:
            signal.alarm(0)
            signal.signal(signal.SIGALRM, old)
    if args.format == "csv":
        text = _csv(config, rows)
    else:
        text = json.dumps({"config": config.to_json(), "result": result}, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        stdout.write(text)
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
