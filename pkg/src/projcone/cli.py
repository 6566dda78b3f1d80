"""Command-line front end: ``projcone <subcommand> ...``.

Exit codes: 0 success / true, 10 NC-but-not-BT or infeasible membership,
20 not FNC, 30 no refutation found, 2 malformed input.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from multiprocessing import Pool
from pathlib import Path

from .boxgeom import BoxUnion, evaluate_inequality, project, volume
from .btcone import SizeGuardError, in_bt_cone
from .core import (
    LogProjectionVector,
    ProjectionInequality,
    SchemaError,
    axis_permutations,
    enumerate_subsets,
    ineq_from_json,
    parse_subset,
)
from .flower import RectangularFlower, flower_from_pi, pi_from_flower
from .ratflow import is_fnc
from .refuter import ALL_METHODS, M_CAP, refute_pipeline

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_NC_NOT_BT = 10
EXIT_INFEASIBLE = 10
EXIT_NOT_FNC = 20
EXIT_UNREFUTED = 30

BT, NC_NOT_BT, NOT_FNC = "BT", "NC\\BT", "not-FNC"

CHECKPOINT_EVERY = 10_000
MAX_ENUMERATIONS = 10**7


# --------------------------------------------------------------------------
# classification
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    label: str
    combination: object = None  # BtCombination when label == BT

    @property
    def exit_code(self) -> int:
        return {BT: EXIT_OK, NC_NOT_BT: EXIT_NC_NOT_BT, NOT_FNC: EXIT_NOT_FNC}[self.label]


def classify(ineq: ProjectionInequality) -> Verdict:
    if not is_fnc(ineq):
        return Verdict(NOT_FNC)
    combo = in_bt_cone(ineq)
    if combo is None:
        return Verdict(NC_NOT_BT)
    return Verdict(BT, combo)


# --------------------------------------------------------------------------
# scanning
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ScanJob:
    n: int
    c: int
    dedup: bool = True

    def __post_init__(self):
        if self.n < 1 or self.c < 1:
            raise ValueError("scan needs n >= 1 and c >= 1")
        if self.enumerations > MAX_ENUMERATIONS:
            raise ValueError(
                f"scan n={self.n}, c={self.c} needs {self.enumerations} enumerations (> {MAX_ENUMERATIONS})"
            )

    @property
    def subsets(self):
        return enumerate_subsets(self.n)

    @property
    def free_positions(self) -> list[int]:
        """Non-singleton coordinates; singletons are then forced by C1."""
        return [k for k, s in enumerate(self.subsets) if len(s) > 1]

    @property
    def enumerations(self) -> int:
        return (2 * self.c + 1) ** ((1 << self.n) - 1 - self.n)

    def to_json(self) -> dict:
        return {"n": self.n, "c": self.c, "dedup": self.dedup}


class _Enumerator:
    def __init__(self, job: ScanJob):
        self.job = job
        subs = job.subsets
        self.subs = subs
        index = {s: k for k, s in enumerate(subs)}
        self.singleton = [index[frozenset({x})] for x in range(1, job.n + 1)]
        self.free = job.free_positions
        self.perms = [[index[frozenset(p[x] for x in s)] for s in subs] for p in axis_permutations(job.n)]

    def candidate(self, values) -> list[int] | None:
        """Balanced nonzero vector for one choice of the free coordinates."""
        v = [0] * len(self.subs)
        for k, val in zip(self.free, values):
            v[k] = val
        for x in range(1, self.job.n + 1):
            load = -sum(v[k] for k in self.free if x in self.subs[k])
            if abs(load) > self.job.c:
                return None
            v[self.singleton[x - 1]] = load
        if not any(v):
            return None
        if self.job.dedup and tuple(v) != self.canonical(v):
            return None
        return v

    def canonical(self, v) -> tuple:
        best = None
        for p in self.perms:
            w = [0] * len(v)
            for k, target in enumerate(p):
                w[target] = v[k]
            w = tuple(w)
            if best is None or w < best:
                best = w
        return best

    def values(self, start: int = 0):
        rng = range(-self.job.c, self.job.c + 1)
        return itertools.islice(itertools.product(rng, repeat=len(self.free)), start, None)


def _burnside_orbits(job: ScanJob) -> int:
    """Orbits of all nonzero vectors in ``[-c, c]^(2^n - 1)`` under axis permutations."""
    subs = job.subsets
    total = 0
    perms = axis_permutations(job.n)
    for p in perms:
        seen = set()
        cycles = 0
        for s in subs:
            if s in seen:
                continue
            cycles += 1
            t = s
            while t not in seen:
                seen.add(t)
                t = frozenset(p[x] for x in t)
        total += (2 * job.c + 1) ** cycles
    assert total % factorial(job.n) == 0
    return total // len(perms) - 1


def _scan_one(args):
    n, vec, methods, m_cap = args
    ineq = ProjectionInequality.from_vector(n, vec)
    verdict = classify(ineq)
    record = {"vector": vec, "class": verdict.label}
    if verdict.label == NC_NOT_BT:
        record["inequality"] = str(ineq)
        outcome = refute_pipeline(ineq, methods=methods, m_cap=m_cap)
        if outcome.report is not None:
            rep = outcome.report
            record["method"] = rep.method
            record["params"] = rep.to_json()["params"]
        else:
            record["method"] = None
            record["resistant"] = True
            record["diagnostics"] = [list(a) for a in outcome.attempts]
    return record


def _empty_state(job: ScanJob) -> dict:
    return {
        "job": job.to_json(),
        "next_index": 0,
        "balanced_instances": 0,
        "classes": {BT: 0, NC_NOT_BT: 0, NOT_FNC: 0},
        "methods": {},
        "nc_not_bt": [],
        "resistant": [],
    }


def run_scan(
    job: ScanJob,
    checkpoint: Path | None = None,
    workers: int = 1,
    methods=ALL_METHODS,
    m_cap: int = M_CAP,
    stop_after: int | None = None,
) -> dict:
    """Enumerate, classify and refute; returns the ledger dictionary.

    The state is written to ``checkpoint`` every ``CHECKPOINT_EVERY``
    enumerations; an existing checkpoint for the same job is resumed.
    ``stop_after`` halts after that many enumerations (used to test resuming).
    """
    enum = _Enumerator(job)
    state = _empty_state(job)
    if checkpoint is not None and checkpoint.exists():
        saved = json.loads(checkpoint.read_text())
        if saved.get("job") != job.to_json():
            raise ValueError(f"checkpoint {checkpoint} belongs to a different job")
        state = saved

    pool = Pool(workers) if workers > 1 else None
    try:
        index = state["next_index"]
        values = enum.values(index)
        while index < job.enumerations:
            chunk = list(itertools.islice(values, CHECKPOINT_EVERY - index % CHECKPOINT_EVERY))
            if stop_after is not None:
                chunk = chunk[: max(0, stop_after - index)]
            if not chunk:
                break
            block = [v for v in map(enum.candidate, chunk) if v is not None]
            tasks = [(job.n, v, tuple(methods), m_cap) for v in block]
            records = pool.map(_scan_one, tasks) if pool else list(map(_scan_one, tasks))
            _absorb(state, records)
            index += len(chunk)
            state["next_index"] = index
            if checkpoint is not None:
                checkpoint.write_text(json.dumps(state, sort_keys=True))
            if stop_after is not None and index >= stop_after:
                break
    finally:
        if pool:
            pool.close()
            pool.join()
    return _ledger(job, state)


def _absorb(state: dict, records: list[dict]) -> None:
    for rec in records:
        state["balanced_instances"] += 1
        state["classes"][rec["class"]] += 1
        if rec["class"] != NC_NOT_BT:
            continue
        method = rec["method"] or "resistant"
        state["methods"][method] = state["methods"].get(method, 0) + 1
        entry = {k: rec[k] for k in ("vector", "inequality", "method") if k in rec}
        if rec.get("resistant"):
            entry["diagnostics"] = rec["diagnostics"]
            state["resistant"].append(entry)
        else:
            entry["params"] = rec["params"]
        state["nc_not_bt"].append(entry)


def _ledger(job: ScanJob, state: dict) -> dict:
    complete = state["next_index"] >= job.enumerations
    balanced = state["balanced_instances"]
    if job.dedup:
        unbalanced = _burnside_orbits(job) - balanced
    else:
        unbalanced = (2 * job.c + 1) ** ((1 << job.n) - 1) - 1 - balanced
    nc = state["classes"][NC_NOT_BT]
    return {
        "job": job.to_json(),
        "complete": complete,
        "enumerated": state["next_index"],
        "balanced_instances": balanced,
        "unbalanced_instances": unbalanced if complete else None,
        "classes": dict(state["classes"]),
        "methods": dict(sorted(state["methods"].items())),
        "resistant_fraction": format(Fraction(len(state["resistant"]), nc or 1)),
        "nc_not_bt": state["nc_not_bt"],
        "resistant": state["resistant"],
    }


# --------------------------------------------------------------------------
# I/O helpers
# --------------------------------------------------------------------------

def _load_json(path: str, what: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise SchemaError(str(exc), path) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON ({exc.msg}) at line {exc.lineno}, column {exc.colno}", path) from None


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=False)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _mcap(args) -> int:
    if args.mcap is not None:
        return args.mcap
    env = os.environ.get("PROJCONE_MCAP")
    if env:
        try:
            return int(env)
        except ValueError:
            raise SchemaError(f"PROJCONE_MCAP must be an integer, got {env!r}", "env") from None
    return M_CAP


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_classify(args) -> int:
    ineq = ineq_from_json(_load_json(args.ineq, "inequality"))
    verdict = classify(ineq)
    print(verdict.label)
    if verdict.combination is not None:
        if args.out:
            _emit(verdict.combination.to_json(), args.out)
        else:
            for term in verdict.combination.terms:
                print(f"  {term.multiplier} * ({term.inequality()})  [k={term.k}]")
    return verdict.exit_code


def cmd_refute(args) -> int:
    ineq = ineq_from_json(_load_json(args.ineq, "inequality"))
    methods = tuple(m.strip() for m in args.methods.split(",")) if args.methods else ALL_METHODS
    bad = [m for m in methods if m not in ALL_METHODS]
    if bad:
        raise SchemaError(f"unknown methods {bad}; choose from {list(ALL_METHODS)}", "--methods")
    outcome = refute_pipeline(ineq, methods=methods, radius=args.tmax, m_cap=_mcap(args))
    if outcome.report is None:
        print("no refutation found")
        for method, note in outcome.attempts:
            print(f"  {method}: {note}", file=sys.stderr)
        return EXIT_UNREFUTED
    rep = outcome.report
    _emit(rep.to_json(), args.out)
    if args.out:
        print(f"{rep.method}: {rep.lhs} < {rep.rhs}")
    return EXIT_OK


def cmd_membership(args) -> int:
    pi = LogProjectionVector.from_json(_load_json(args.pi, "pi"))
    result = flower_from_pi(pi)
    if result.member:
        _emit(result.flower.to_json(), args.out)
        return EXIT_OK
    _emit({"violated": result.certificate.to_json(), "text": str(result.certificate)}, args.out)
    return EXIT_INFEASIBLE


def cmd_flower_pi(args) -> int:
    fl = RectangularFlower.from_json(_load_json(args.flower, "flower"))
    _emit(pi_from_flower(fl).to_json(), args.out)
    return EXIT_OK


def cmd_volume(args) -> int:
    obj = BoxUnion.from_json(_load_json(args.object, "object"))
    if args.subset:
        s = parse_subset(args.subset, obj.n, "--subset")
        print(volume(project(obj, s)))
    else:
        print(volume(obj))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    ineq = ineq_from_json(_load_json(args.ineq, "inequality"))
    obj = BoxUnion.from_json(_load_json(args.object, "object"))
    if obj.n != ineq.n:
        raise SchemaError(f"object has n={obj.n}, inequality has n={ineq.n}", "object.n")
    ev = evaluate_inequality(ineq, obj)
    print(f"{ev.status} {ev.margin}")
    return EXIT_OK


def cmd_scan(args) -> int:
    try:
        job = ScanJob(args.n, args.c, not args.no_dedup)
    except ValueError as exc:
        raise SchemaError(str(exc), "scan") from None
    methods = tuple(m.strip() for m in args.methods.split(",")) if args.methods else ALL_METHODS
    ckpt = Path(args.checkpoint) if args.checkpoint else None
    ledger = run_scan(job, ckpt, workers=args.workers, methods=methods, m_cap=_mcap(args))
    _emit(ledger, args.out)
    c = ledger["classes"]
    print(
        f"n={job.n} c={job.c}: BT {c[BT]}, NC\\BT {c[NC_NOT_BT]}, not-FNC {c[NOT_FNC]} balanced"
        f" + {ledger['unbalanced_instances']} unbalanced; resistant {len(ledger['resistant'])}",
        file=sys.stderr,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="projcone", description="Exact projected-volume inequality toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="BT / NC\\BT / not-FNC verdict")
    p.add_argument("ineq")
    p.add_argument("-o", "--out", help="write the BT combination JSON here")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("refute", help="search for a counterexample box union")
    p.add_argument("ineq")
    p.add_argument("--methods", help=f"comma list from {','.join(ALL_METHODS)}")
    p.add_argument("--tmax", type=int, default=2, help="grid radius for the exponent search (<= 4)")
    p.add_argument("--mcap", type=int, help="cap on the scale M (default 2**20 or $PROJCONE_MCAP)")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_refute)

    p = sub.add_parser("membership", help="decide LP(pi): flower or violated inequality")
    p.add_argument("pi")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_membership)

    p = sub.add_parser("flower-pi", help="log-projection vector of a flower")
    p.add_argument("flower")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_flower_pi)

    p = sub.add_parser("volume", help="exact volume of a box union or one of its projections")
    p.add_argument("object")
    p.add_argument("--subset", help="axes like 1,2,3")
    p.set_defaults(func=cmd_volume)

    p = sub.add_parser("evaluate", help="evaluate an inequality on a box union")
    p.add_argument("ineq")
    p.add_argument("object")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("scan", help="exhaustive classification of small inequalities")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=int, default=1)
    p.add_argument("--no-dedup", action="store_true")
    p.add_argument("--methods")
    p.add_argument("--mcap", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--checkpoint")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
