"""The ``chorc`` command line.

Exit codes: 0 when every check passes, 1 when a verdict fails or a
counterexample is found, 2 on usage or parse errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .ast import ChorError, participants
from .cfsm import minimize, project
from .corpus import check_entry, corpus_files, roles
from .language import format_word, member, parse_word, words
from .render import hypergraph_dot, hypergraph_json
from .semantics import sem
from .syntax import parse, pretty
from .system import CommSystem, Policy, ReplayError, deadlocks, reachable, replay, worker_count
from .verify import random_choreography, verify

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _load(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from exc
    try:
        return parse(text)
    except ChorError as exc:
        raise UsageError(f"{path}:{exc}") from exc


def _dump(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False))


def _defined(g, path: str):
    res = sem(g)
    if not res.defined:
        print(f"{path}: {res.reason}", file=sys.stderr)
    return res


def cmd_parse(args) -> int:
    print(pretty(_load(args.file)))
    return OK


def cmd_sem(args) -> int:
    g = _load(args.file)
    res = _defined(g, args.file)
    if not res.defined:
        if args.json:
            _dump({"defined": False, "reason": res.reason.to_json()})
        return FAILED
    if args.dot:
        sys.stdout.write(hypergraph_dot(res.graph, Path(args.file).stem))
    elif args.json:
        _dump({"defined": True, "graph": hypergraph_json(res.graph)})
    else:
        for h in res.graph:
            print(h)
    return OK


def cmd_wf(args) -> int:
    g = _load(args.file)
    res = sem(g)
    if args.json:
        _dump({"defined": res.defined,
               "reason": None if res.defined else res.reason.to_json(),
               "choices": [c.to_json() for c in res.choices],
               "roles": roles(res)})
    else:
        print("well-formed" if res.defined else f"not well-formed: {res.reason}")
        for c in res.choices:
            parts = ", ".join(f"{r.participant} {r.role}" for r in c.roles)
            print(f"  choice {c.cp}: {parts}")
    return OK if res.defined else FAILED


def cmd_project(args) -> int:
    g = _load(args.file)
    if args.participant not in participants(g):
        raise UsageError(f"{args.participant} does not occur in {args.file}")
    m = project(g, args.participant)
    if not args.no_min:
        m = minimize(m)
    if args.dot:
        sys.stdout.write(m.to_dot())
    elif args.json:
        _dump(m.to_json())
    else:
        print(f"machine {m.participant}: {len(m.states)} states, initial {m.initial}")
        for s, a, t in sorted(m.transitions):
            print(f"  {s} --{a}--> {t}")
    return OK


def cmd_lang(args) -> int:
    g = _load(args.file)
    if not _defined(g, args.file).defined:
        return FAILED
    for w in sorted(words(g, args.max_len), key=lambda w: (len(w), w)):
        print(format_word(w))
    return OK


def cmd_member(args) -> int:
    g = _load(args.file)
    if not _defined(g, args.file).defined:
        return FAILED
    try:
        w = parse_word(args.word, participants(g))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    yes = member(g, w)
    print("member" if yes else "not a member")
    return OK if yes else FAILED


def _system(g, policy: str) -> CommSystem:
    return CommSystem({p: minimize(project(g, p)) for p in sorted(participants(g))}, Policy(policy))


def cmd_sim(args) -> int:
    g = _load(args.file)
    if not _defined(g, args.file).defined:
        return FAILED
    system = _system(g, args.buffer)
    if args.interactive_trace:
        try:
            text = Path(args.interactive_trace).read_text()
        except OSError as exc:
            raise UsageError(f"{args.interactive_trace}: {exc.strerror}") from exc
        try:
            trace = parse_word(text, participants(g))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        try:
            configs = replay(system, trace)
        except ReplayError as exc:
            print(f"stuck: {exc}")
            return FAILED
        for c in configs:
            _dump(c.to_json(system))
        return OK
    exp = reachable(system)
    stuck = deadlocks(exp)
    print(f"{len(exp.parent)} reachable configurations ({args.buffer} buffers)")
    for c in stuck:
        print(f"deadlock after: {format_word(exp.path(c))}")
        _dump(c.to_json(system))
    return FAILED if stuck else OK


def cmd_verify(args) -> int:
    stats = not args.no_stats
    if args.random:
        results = []
        for i in range(args.random):
            seed = args.seed + i
            g = random_choreography(seed, args.size)
            r = verify(g, f"seed={seed}:{pretty(g)}", Policy(args.buffer))
            results.append({"file": r.subject, "ok": r.ok, "report": r.to_json(stats)})
    else:
        if args.path is None:
            raise UsageError("give a path or --random")
        path = Path(args.path)
        if not path.exists():
            raise UsageError(f"{path}: no such file or directory")
        files = corpus_files(path)
        with ThreadPoolExecutor(worker_count()) as pool:
            entries = list(pool.map(check_entry, files))
        results = [e.to_json(stats) for e in sorted(entries, key=lambda e: str(e.path))]
    ok = all(r["ok"] for r in results)
    if args.json:
        _dump({"ok": ok, "results": results})
    else:
        for r in results:
            line = "ok  " if r["ok"] else "FAIL"
            detail = ""
            if "report" in r:
                rep = r["report"]
                detail = (f"deadlock_free={rep['deadlock_free']} "
                          f"inclusion={rep['inclusion']['verdict']}")
                if "inclusion_bag" in rep:
                    detail += f" bag={rep['inclusion_bag']['claim']}"
            for m in r.get("mismatches", []):
                detail += f" [{m['key']}: expected {m['expected']}, got {m['observed']}]"
            if "error" in r:
                detail += f" error: {r['error']}"
            print(f"{line} {r['file']} {detail}".rstrip())
    return OK if ok else FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chorc", description="Loop-free global choreography toolchain.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse and pretty-print a .gc file")
    p.add_argument("file")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("sem", help="print the hypergraph semantics")
    p.add_argument("file")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--dot", action="store_true")
    fmt.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sem)

    p = sub.add_parser("wf", help="check well-formedness")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_wf)

    p = sub.add_parser("project", help="project on one participant")
    p.add_argument("file")
    p.add_argument("-p", "--participant", required=True)
    p.add_argument("--no-min", action="store_true", help="skip determinization and minimization")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--dot", action="store_true")
    fmt.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("lang", help="list the trace language")
    p.add_argument("file")
    p.add_argument("--max-len", type=int, default=None)
    p.set_defaults(func=cmd_lang)

    p = sub.add_parser("member", help="test a word for membership, e.g. 'AB!x AB?x'")
    p.add_argument("file")
    p.add_argument("word")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("sim", help="explore or replay the projected system")
    p.add_argument("file")
    p.add_argument("--buffer", choices=["fifo", "bag"], default="fifo")
    p.add_argument("--interactive-trace", metavar="TRACE",
                   help="replay the actions listed in TRACE, one per line")
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("verify", help="check both theorems on a file, a corpus directory or random terms")
    p.add_argument("path", nargs="?")
    p.add_argument("--buffer", choices=["fifo", "bag"], default="fifo")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random", type=int, default=0, metavar="K")
    p.add_argument("--size", type=int, default=4)
    p.add_argument("--json", action="store_true")
    p.add_argument("--no-stats", action="store_true", help="omit timing and counters")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    if getattr(args, "max_len", None) is not None and args.max_len < 0:
        print("chorc: --max-len must be non-negative", file=sys.stderr)
        return USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"chorc: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
