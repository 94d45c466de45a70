"""Command-line interface.

Subcommands tie the dealer, agents, adversary, and harness together over
the file formats in :mod:`swarmfsa.stores`:

    init         dealer initialization -> a state directory
    run          apply a tick file to every agent state in a directory
    corrupt      dump one agent's current memory as a view snapshot
    reconstruct  recover the active state from collected state files
    verify       replay a run from the dealer record and check invariants
    privacy      run a statistical privacy regression from a JSON spec
    check-groups appropriateness + seed-cover verdict for a timeline
    gen-vectors  write a deterministic seed-expansion vector file

Exit codes: 0 success, 1 check/test failure, 2 usage or data error.
"""

from __future__ import annotations

import argparse
import json
import pathlib
import random
import sys

from . import __version__
from .adversary import CorruptionTimeline, View
from .automaton import parse_automaton, serialize_automaton
from .errors import SwarmFsaError
from .field import MERSENNE61, make_field
from .harness import (
    SimulationConfig,
    sample_views,
    two_sample_view_test,
    view_uniformity_test,
)
from .prg import expand
from .protocol import SCHEME_NN, SCHEME_TN, SCHEME_TN_NAIVE, agent_tick, enumerate_groups, snapshot
from .schemes import (
    dealer_init_nn,
    dealer_init_tn,
    dealer_init_tn_naive,
    reconstruct_nn,
    reconstruct_tn,
    reconstruct_tn_naive,
)
from .stores import (
    parse_dealer,
    parse_ticks,
    parse_timeline,
    read_agent_state,
    serialize_dealer,
    serialize_view,
    write_agent_state,
)

AUTOMATON_NAME = "automaton.aut"
DEALER_NAME = "dealer.record"


def _agent_path(outdir: pathlib.Path, i: int) -> pathlib.Path:
    return outdir / f"agent{i:03d}.state"


def _load_dir(state_dir: str):
    d = pathlib.Path(state_dir)
    aut_path = d / AUTOMATON_NAME
    if not aut_path.is_file():
        raise SwarmFsaError(f"no {AUTOMATON_NAME} in {d}")
    a = parse_automaton(aut_path.read_text(encoding="utf-8"))
    paths = sorted(d.glob("agent*.state"))
    if not paths:
        raise SwarmFsaError(f"no agent state files in {d}")
    return d, a, [read_agent_state(p, a) for p in paths], paths


def cmd_init(args) -> int:
    a = parse_automaton(pathlib.Path(args.automaton).read_text(encoding="utf-8"))
    rng = random.Random(args.seed) if args.seed is not None else random.SystemRandom()
    if args.scheme == SCHEME_NN:
        dep = dealer_init_nn(a, args.n, args.init, rng)
    elif args.scheme == SCHEME_TN:
        dep = dealer_init_tn(a, args.n, args.t, make_field(args.modulus), args.init, rng)
    else:
        dep = dealer_init_tn_naive(a, args.n, args.t, args.init, rng)
    outdir = pathlib.Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / AUTOMATON_NAME).write_text(serialize_automaton(a), encoding="utf-8")
    for ag in dep.agents:
        write_agent_state(_agent_path(outdir, ag.agent_index), ag)
    if args.keep_dealer:
        (outdir / DEALER_NAME).write_text(serialize_dealer(dep), encoding="utf-8")
    print(f"initialized {dep.scheme} deployment: {args.n} agents in {outdir}")
    return 0


def cmd_run(args) -> int:
    d, a, agents, paths = _load_dir(args.state_dir)
    schedule = parse_ticks(pathlib.Path(args.ticks).read_text(encoding="utf-8"))
    for inp in schedule:
        for ag in agents:
            agent_tick(ag, inp)
    for ag, p in zip(agents, paths):
        write_agent_state(p, ag)
    print(f"applied {len(schedule)} ticks to {len(agents)} agents")
    return 0


def cmd_corrupt(args) -> int:
    d, a, agents, _ = _load_dir(args.state_dir)
    match = [ag for ag in agents if ag.agent_index == args.agent]
    if not match:
        raise SwarmFsaError(f"agent {args.agent} not found in {d}")
    view = View((snapshot(match[0]),))
    text = serialize_view(view)
    if args.out:
        with open(args.out, "a", encoding="utf-8") as fh:
            fh.write(text)
        print(f"appended snapshot of agent {args.agent} at tick {match[0].tick} to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_reconstruct(args) -> int:
    if args.automaton:
        a = parse_automaton(pathlib.Path(args.automaton).read_text(encoding="utf-8"))
    else:
        first_dir = pathlib.Path(args.state_file[0]).parent
        aut = first_dir / AUTOMATON_NAME
        if not aut.is_file():
            raise SwarmFsaError("pass --automaton or keep state files next to automaton.aut")
        a = parse_automaton(aut.read_text(encoding="utf-8"))
    states = [read_agent_state(p, a) for p in args.state_file]
    scheme = states[0].scheme
    if any(st.scheme != scheme for st in states):
        raise SwarmFsaError("state files disagree on the scheme")
    if scheme == SCHEME_NN:
        state = reconstruct_nn([list(st.blocks[0].labels) for st in states], states[0].n)
    elif scheme == SCHEME_TN:
        state = reconstruct_tn(
            [(st.agent_index, list(st.blocks[0].labels)) for st in states],
            states[0].t,
            states[0].field,
        )
    else:
        state = reconstruct_tn_naive(states)
    print(f"state {state}")
    return 0


def cmd_verify(args) -> int:
    d, a, agents, _ = _load_dir(args.state_dir)
    dealer_path = pathlib.Path(args.dealer) if args.dealer else d / DEALER_NAME
    if not dealer_path.is_file():
        raise SwarmFsaError(f"dealer record {dealer_path} not found")
    dep = parse_dealer(dealer_path.read_text(encoding="utf-8"), a)
    schedule = parse_ticks(pathlib.Path(args.ticks).read_text(encoding="utf-8"))
    from .harness import replay_check

    ok, message = replay_check(dep, schedule)
    if not ok:
        print(f"FAIL: {message}")
        return 1
    from .stores import serialize_agent_state

    mismatched = []
    for ag, replayed in zip(agents, dep.agents):
        if serialize_agent_state(ag) != serialize_agent_state(replayed):
            mismatched.append(ag.agent_index)
    if mismatched:
        print(f"FAIL: state files of agents {mismatched} do not match the replay")
        return 1
    print(f"OK: {message}")
    return 0


def cmd_check_groups(args) -> int:
    rho = parse_timeline(pathlib.Path(args.timeline).read_text(encoding="utf-8"))
    from .adversary import first_hypergraph_violation, validate_timeline

    appropriate = validate_timeline(rho, args.scheme, args.n, args.t)
    if args.scheme == SCHEME_NN:
        groups = enumerate_groups(args.n, SCHEME_NN)
    elif args.scheme == SCHEME_TN:
        groups = enumerate_groups(args.n, SCHEME_TN, args.t)
    else:
        # pairs inside (t+1)-subsets: as hyperedges these are all pairs
        groups = enumerate_groups(args.n, SCHEME_NN)
    violation = first_hypergraph_violation(groups, rho)
    print(f"timeline: {len(rho)} corruptions")
    print(f"appropriate: {'yes' if appropriate else 'no'}")
    if violation is None:
        print("seed-cover: ok (every corruption step is covered by a private group)")
    else:
        print(f"seed-cover: violated at step {violation}")
    return 0 if (appropriate and violation is None) else 1


def _parse_inputs(tokens) -> list:
    return [None if tok == "-" else tok for tok in tokens]


def cmd_privacy(args) -> int:
    spec = json.loads(pathlib.Path(args.spec).read_text(encoding="utf-8"))
    kind = spec.get("test", "two-sample")
    a = parse_automaton(pathlib.Path(spec["automaton"]).read_text(encoding="utf-8"))
    scheme = spec.get("scheme", SCHEME_NN)
    n = int(spec["n"])
    t = int(spec.get("t", 0))
    modulus = int(spec.get("modulus", 2))
    trials = int(spec.get("trials", 20000))
    seed = int(spec.get("seed", 0))
    alpha = float(spec.get("alpha", 0.001))
    rho = CorruptionTimeline.of([tuple(x) for x in spec["timeline"]])
    f = make_field(modulus)

    def cfg_for(side) -> SimulationConfig:
        return SimulationConfig(
            automaton=a,
            scheme=scheme,
            n=n,
            t=t,
            modulus=modulus,
            schedule=_parse_inputs(side.get("inputs", [])),
            init_state=int(side.get("init", 1)),
            timeline=rho,
        )

    if kind == "uniformity":
        views = sample_views(cfg_for(spec["a"]), trials, seed)
        report = view_uniformity_test(views, f)
    elif kind == "two-sample":
        va = sample_views(cfg_for(spec["a"]), trials, seed)
        vb = sample_views(cfg_for(spec["b"]), trials, seed + 1)
        report = two_sample_view_test(va, vb, f)
    elif kind == "pi-vs-intermediate":
        cfg = cfg_for(spec["a"])
        va = sample_views(cfg, trials, seed)
        vb = sample_views(cfg, trials, seed + 1, intermediate=True)
        report = two_sample_view_test(va, vb, f)
    else:
        raise SwarmFsaError(f"unknown privacy test kind {kind!r}")
    passed = report.p_value > alpha
    if args.format == "json":
        print(json.dumps({"report": report.to_json(), "alpha": alpha, "verdict": "pass" if passed else "fail"}, sort_keys=True))
    else:
        print(report.to_text())
        print(f"verdict: {'pass' if passed else 'fail'} (alpha={alpha})")
    return 0 if passed else 1


VECTOR_MODULI = (2, 5, 257, MERSENNE61)


def cmd_gen_vectors(args) -> int:
    rng = random.Random(args.seed)
    lines = ["# seed-expansion vectors: seed_hex m modulus -> b_1,...,b_m next_seed_hex"]
    for k in range(args.count):
        seed = rng.getrandbits(128).to_bytes(16, "big")
        m = rng.randrange(1, 9)
        modulus = VECTOR_MODULI[k % len(VECTOR_MODULI)]
        e = expand(seed, m, make_field(modulus))
        lines.append(
            f"{seed.hex()} {m} {modulus} -> "
            + ",".join(str(x) for x in e.elements)
            + f" {e.next_seed.hex()}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        pathlib.Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.count} vectors to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="swarmfsa", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"swarmfsa {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="dealer initialization into a state directory")
    p.add_argument("automaton")
    p.add_argument("--scheme", choices=[SCHEME_NN, SCHEME_TN, SCHEME_TN_NAIVE], default=SCHEME_NN)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, default=0)
    p.add_argument("--modulus", type=int, default=MERSENNE61,
                   help="label field for the threshold scheme (default 2^61-1)")
    p.add_argument("--init", type=int, default=1, help="initial automaton state")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None, help="deterministic dealer randomness")
    p.add_argument("--keep-dealer", action="store_true",
                   help="write the omniscient dealer record (test use only)")
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("run", help="apply a tick file to a state directory")
    p.add_argument("state_dir")
    p.add_argument("--ticks", required=True, help="one line per tick: symbol or '-'")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("corrupt", help="dump one agent's memory as a view snapshot")
    p.add_argument("state_dir")
    p.add_argument("agent", type=int)
    p.add_argument("--out", help="append to this view file instead of stdout")
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("reconstruct", help="recover the active state from state files")
    p.add_argument("state_file", nargs="+")
    p.add_argument("--automaton", help="defaults to automaton.aut next to the first file")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("verify", help="replay from the dealer record and check invariants")
    p.add_argument("state_dir")
    p.add_argument("--dealer", help="dealer record (default: state dir's dealer.record)")
    p.add_argument("--ticks", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("privacy", help="statistical privacy regression from a JSON spec")
    p.add_argument("spec")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_privacy)

    p = sub.add_parser("check-groups", help="timeline appropriateness and seed-cover verdict")
    p.add_argument("--scheme", choices=[SCHEME_NN, SCHEME_TN, SCHEME_TN_NAIVE], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, default=0)
    p.add_argument("--timeline", required=True)
    p.set_defaults(func=cmd_check_groups)

    p = sub.add_parser("gen-vectors", help="deterministic seed-expansion vector file")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=16)
    p.set_defaults(func=cmd_gen_vectors)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SwarmFsaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
