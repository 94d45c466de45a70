"""Simulation driver, omniscient invariant checks, and privacy tests.

The harness owns the global clock: it delivers each tick's input to all
agents, enforces the barrier, captures corruption snapshots when due,
and (in test mode) checks after every tick that the labels still form a
valid sharing of the one-hot active-state indicator with the oracle's
state as the active one.

A statistical "pass" here is a regression signal, not a security proof:
the chi-square tests can only show that views under different inputs are
not obviously distinguishable at the configured sample size.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .adversary import CorruptionTimeline, View, intermediate_init
from .automaton import Automaton
from .errors import InsufficientSamples, SwarmFsaError, TickOutOfRange
from .field import FieldSpec, make_field
from .protocol import SCHEME_NN, SCHEME_TN, SCHEME_TN_NAIVE, TickInput
from .schemes import (
    Deployment,
    dealer_init_nn,
    dealer_init_tn,
    dealer_init_tn_naive,
    reconstruct_tn,
    reconstruct_tn_naive,
)


@dataclass
class SimulationConfig:
    """One deployment run: scheme parameters, input schedule, adversary."""

    automaton: Automaton
    scheme: str
    n: int
    schedule: Sequence[str | None]
    t: int = 0
    modulus: int = 2
    init_state: int = 1
    timeline: CorruptionTimeline | None = None
    dealer_seed: int | None = None
    check_invariants: bool = True
    record_trace: bool = False
    faulty_no_rerandomize: bool = False  # fault injection for power tests

    def field(self) -> FieldSpec:
        return make_field(self.modulus)

    def validate(self) -> None:
        if self.scheme not in (SCHEME_NN, SCHEME_TN, SCHEME_TN_NAIVE):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.scheme in (SCHEME_NN, SCHEME_TN_NAIVE) and self.modulus != 2:
            raise ValueError("pairwise schemes run over GF(2)")
        for sym in self.schedule:
            s = sym.symbol if isinstance(sym, TickInput) else sym
            if s is not None and s not in self.automaton.alphabet:
                raise ValueError(f"schedule symbol {s!r} not in alphabet")
        if self.timeline is not None:
            horizon = len(self.schedule)
            for c in self.timeline.events:
                if not 0 <= c.tick <= horizon:
                    raise TickOutOfRange(
                        f"corruption tick {c.tick} outside horizon {horizon}"
                    )


def _dealer_rng(cfg: SimulationConfig):
    if cfg.dealer_seed is None:
        return random.SystemRandom()
    return random.Random(cfg.dealer_seed)


def build_deployment(cfg: SimulationConfig, rng=None) -> Deployment:
    rng = rng if rng is not None else _dealer_rng(cfg)
    if cfg.scheme == SCHEME_NN:
        return dealer_init_nn(cfg.automaton, cfg.n, cfg.init_state, rng)
    if cfg.scheme == SCHEME_TN:
        return dealer_init_tn(cfg.automaton, cfg.n, cfg.t, cfg.field(), cfg.init_state, rng)
    return dealer_init_tn_naive(cfg.automaton, cfg.n, cfg.t, cfg.init_state, rng)


class _SecretChecker:
    """Per-tick sharing-invariant checks with precomputed interpolation rows."""

    def __init__(self, dep: Deployment):
        self.dep = dep
        self.m = dep.automaton.num_states
        if dep.scheme == SCHEME_TN:
            f = dep.field
            p = f.modulus
            nodes = list(range(1, dep.t + 2))

            def basis_row(y):
                row = []
                for xj in nodes:
                    num, den = 1, 1
                    for xk in nodes:
                        if xk == xj:
                            continue
                        num = num * ((y - xk) % p) % p
                        den = den * ((xj - xk) % p) % p
                    row.append(num * f.inv(den) % p)
                return row

            self._row0 = basis_row(0)
            self._rows_rest = [(y, basis_row(y)) for y in range(dep.t + 2, dep.n + 1)]

    def secrets(self) -> list[int]:
        """Reconstructed per-state secrets from all agents (omniscient)."""
        dep = self.dep
        if dep.scheme == SCHEME_NN:
            out = [0] * self.m
            for ag in dep.agents:
                labels = ag.blocks[0].labels
                for j in range(self.m):
                    out[j] ^= labels[j]
            return out
        if dep.scheme == SCHEME_TN:
            p = dep.field.modulus
            cols = [ag.blocks[0].labels for ag in dep.agents]
            return [
                sum(self._row0[k] * cols[k][j] for k in range(len(self._row0))) % p
                for j in range(self.m)
            ]
        # per-subset variant: secrets of the first instance
        first = self.dep.agents[0].blocks[0].subset
        return self._naive_instance_secrets(first)

    def _naive_instance_secrets(self, subset) -> list[int]:
        out = [0] * self.m
        for i in subset:
            blk = next(b for b in self.dep.agent(i).blocks if b.subset == subset)
            for j in range(self.m):
                out[j] ^= blk.labels[j]
        return out

    def check(self, oracle_state: int) -> str | None:
        """None if the sharing invariant holds for the oracle state."""
        dep = self.dep
        want = [1 if j + 1 == oracle_state else 0 for j in range(self.m)]
        if dep.scheme == SCHEME_NN:
            got = self.secrets()
            if got != want:
                return f"xor secrets {got} != one-hot at {oracle_state}"
            return None
        if dep.scheme == SCHEME_TN:
            p = dep.field.modulus
            cols = [ag.blocks[0].labels for ag in dep.agents]
            tp1 = len(self._row0)
            for j in range(self.m):
                s0 = sum(self._row0[k] * cols[k][j] for k in range(tp1)) % p
                if s0 != want[j]:
                    return f"state {j + 1} interpolates to {s0}, want {want[j]}"
                for y, row in self._rows_rest:
                    pred = sum(row[k] * cols[k][j] for k in range(tp1)) % p
                    if pred != cols[y - 1][j]:
                        return (
                            f"state {j + 1}: share of agent {y} off the degree-{dep.t} "
                            "interpolant"
                        )
            return None
        # per-subset variant: every instance must reconstruct the indicator
        import itertools

        for subset in itertools.combinations(range(1, dep.n + 1), dep.t + 1):
            got = self._naive_instance_secrets(subset)
            if got != want:
                return f"instance {subset} secrets {got} != one-hot at {oracle_state}"
        return None


@dataclass(frozen=True)
class TickRecord:
    tick: int
    symbol: str | None
    oracle_state: int
    secrets: tuple[int, ...]


@dataclass
class Trace:
    """Omniscient per-tick record of a run (test/harness mode only)."""

    records: list[TickRecord] = field(default_factory=list)

    def export_lines(self) -> list[str]:
        return [
            json.dumps(
                {
                    "tick": r.tick,
                    "symbol": r.symbol,
                    "oracle_state": r.oracle_state,
                    "secrets": list(r.secrets),
                },
                sort_keys=True,
            )
            for r in self.records
        ]


@dataclass
class SimulationResult:
    deployment: Deployment
    oracle_state: int
    view: View
    trace: Trace | None
    invariant_error: str | None

    @property
    def ok(self) -> bool:
        return self.invariant_error is None


def run_simulation(
    cfg: SimulationConfig,
    tamper: Callable[[Deployment, int], None] | None = None,
) -> SimulationResult:
    """Initialize, run the whole schedule, capture due snapshots.

    ``tamper`` is a fault-injection hook called after every tick (tests
    use it to corrupt labels and prove the invariant checker notices).
    """
    cfg.validate()
    dep = build_deployment(cfg)
    checker = _SecretChecker(dep) if cfg.check_invariants else None
    due: dict[int, list[int]] = {}
    if cfg.timeline is not None:
        for c in cfg.timeline.events:
            due.setdefault(c.tick, []).append(c.agent)
    snaps = [dep.snapshot(a) for a in due.get(0, [])]
    trace = Trace() if cfg.record_trace else None
    oracle = cfg.init_state
    invariant_error = None
    if checker is not None:
        invariant_error = checker.check(oracle)
    for r, inp in enumerate(cfg.schedule, start=1):
        sym = inp.symbol if isinstance(inp, TickInput) else inp
        dep.tick_all(sym, rerandomize=not cfg.faulty_no_rerandomize)
        if sym is not None:
            oracle = cfg.automaton.step(oracle, sym)
        if tamper is not None:
            tamper(dep, r)
        if checker is not None and invariant_error is None:
            invariant_error = checker.check(oracle)
        for agent in due.get(r, []):
            snaps.append(dep.snapshot(agent))
        if trace is not None:
            secrets = checker.secrets() if checker is not None else []
            trace.records.append(TickRecord(r, sym, oracle, tuple(secrets)))
    return SimulationResult(dep, oracle, View(tuple(snaps)), trace, invariant_error)


def all_reconstructions_match(dep: Deployment, expect: int) -> bool:
    """Every admissible reconstruction (all agents for the pairwise
    scheme; every (t+1)-subset otherwise) yields ``expect``."""
    import itertools

    try:
        if dep.scheme == SCHEME_NN:
            return dep.reconstruct() == expect
        if dep.scheme == SCHEME_TN:
            shares = [(ag.agent_index, list(ag.blocks[0].labels)) for ag in dep.agents]
            return all(
                reconstruct_tn([shares[i] for i in subset], dep.t, dep.field) == expect
                for subset in itertools.combinations(range(dep.n), dep.t + 1)
            )
        return all(
            reconstruct_tn_naive([dep.agent(i) for i in responders]) == expect
            for responders in itertools.combinations(range(1, dep.n + 1), dep.t + 1)
        )
    except SwarmFsaError:
        return False


def oracle_check(cfg: SimulationConfig) -> bool:
    """True iff invariants held at every tick and every admissible
    reconstruction at the horizon equals the direct-execution oracle."""
    res = run_simulation(cfg)
    if not res.ok:
        return False
    return all_reconstructions_match(res.deployment, res.oracle_state)


def replay_check(dep: Deployment, schedule: Sequence[str | None]) -> tuple[bool, str]:
    """Replay a rehydrated tick-0 deployment through a schedule, checking
    the sharing invariant every tick and the final reconstruction against
    the direct-execution oracle. Returns (ok, message)."""
    if dep.dealer is None:
        return False, "deployment carries no dealer record"
    checker = _SecretChecker(dep)
    oracle = dep.dealer.init_state
    err = checker.check(oracle)
    if err is not None:
        return False, f"tick 0: {err}"
    for r, inp in enumerate(schedule, start=1):
        sym = inp.symbol if isinstance(inp, TickInput) else inp
        dep.tick_all(sym)
        if sym is not None:
            oracle = dep.automaton.step(oracle, sym)
        err = checker.check(oracle)
        if err is not None:
            return False, f"tick {r}: {err}"
    if not all_reconstructions_match(dep, oracle):
        return False, f"final reconstruction disagrees with the oracle state {oracle}"
    return True, f"{len(schedule)} ticks verified, final state {oracle}"

# ----------------------------------------------------------- view sampling


def _trial_rng(base_seed: int, k: int) -> random.Random:
    return random.Random((base_seed << 32) + k)


def sample_views(
    cfg: SimulationConfig,
    trials: int,
    base_seed: int,
    intermediate: bool = False,
) -> list[View]:
    """i.i.d. views: fresh dealer randomness per trial, fixed everything
    else. ``intermediate=True`` samples the lazy intermediate scheme with
    the same parameters and timeline instead of the real one."""
    cfg.validate()
    if cfg.timeline is None:
        raise ValueError("sampling views requires a corruption timeline")
    rho = cfg.timeline
    last = max((c.tick for c in rho.events), default=0)
    schedule = [
        (inp.symbol if isinstance(inp, TickInput) else inp)
        for inp in cfg.schedule[:last]
    ]
    due: dict[int, list[int]] = {}
    for c in rho.events:
        due.setdefault(c.tick, []).append(c.agent)
    views = []
    for k in range(trials):
        rng = _trial_rng(base_seed, k)
        if intermediate:
            dep = intermediate_init(
                cfg.scheme, cfg.automaton, cfg.n, cfg.t, cfg.field(), rho, rng
            )
        else:
            dep = build_deployment(cfg, rng)
        snaps = [dep.snapshot(a) for a in due.get(0, [])]
        for r, sym in enumerate(schedule, start=1):
            if intermediate:
                dep.tick_all(sym)
            else:
                dep.tick_all(sym, rerandomize=not cfg.faulty_no_rerandomize)
            for agent in due.get(r, []):
                snaps.append(dep.snapshot(agent))
        views.append(View(tuple(snaps)))
    return views


# -------------------------------------------------------- statistical tests


@dataclass(frozen=True)
class TestReport:
    """One statistical test outcome; text/json renderings for the CLI."""

    name: str
    samples: tuple[int, ...]
    statistic: float
    dof: int
    p_value: float
    detail: str = ""

    def to_text(self) -> str:
        ns = "/".join(str(x) for x in self.samples)
        line = (
            f"{self.name}: N={ns} statistic={self.statistic:.4f} "
            f"dof={self.dof} p={self.p_value:.6g}"
        )
        return line + (f" ({self.detail})" if self.detail else "")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "samples": list(self.samples),
            "statistic": self.statistic,
            "dof": self.dof,
            "p_value": self.p_value,
            "detail": self.detail,
        }


def _coords(views: Sequence[View]) -> list[tuple[int, ...]]:
    rows = [v.label_vector() for v in views]
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("views have inconsistent label widths")
    return rows


def _bucket(value: int, modulus: int, bins: int) -> int:
    if modulus <= bins:
        return value
    return value * bins // modulus


def view_uniformity_test(
    views: Sequence[View],
    f: FieldSpec,
    bins: int = 16,
    min_samples: int = 1000,
) -> TestReport:
    """Goodness of fit of every captured label position against uniform.

    Per-position chi-square over the field (small fields) or 16 equal
    buckets (large fields), combined with a Bonferroni correction: the
    reported p-value is min(1, positions * min position p-value).
    """
    from scipy.stats import chisquare

    if len(views) < min_samples:
        raise InsufficientSamples(f"need at least {min_samples} views, got {len(views)}")
    rows = _coords(views)
    width = len(rows[0])
    domain = f.modulus if f.modulus <= bins else bins
    worst = (1.0, 0.0, 0)  # (p, stat, coord)
    for c in range(width):
        counts = [0] * domain
        for r in rows:
            counts[_bucket(r[c], f.modulus, bins)] += 1
        stat, p = chisquare(counts)
        if p < worst[0]:
            worst = (float(p), float(stat), c)
    combined = min(1.0, width * worst[0])
    return TestReport(
        name="view-uniformity",
        samples=(len(views),),
        statistic=worst[1],
        dof=domain - 1,
        p_value=combined,
        detail=f"{width} positions, worst at {worst[2]} (Bonferroni combined)",
    )


def two_sample_view_test(
    views_a: Sequence[View],
    views_b: Sequence[View],
    f: FieldSpec,
    bins: int = 16,
    min_pooled: int = 10,
    min_samples: int = 1000,
) -> TestReport:
    """Chi-square homogeneity test on the joint captured-label category.

    Categories are the tuples of label values (small fields) or of
    16-bucket indices per coordinate (large fields); categories with a
    pooled count under ``min_pooled`` are merged so every cell keeps a
    healthy expected count.
    """
    from scipy.stats import chi2_contingency

    if len(views_a) != len(views_b):
        raise ValueError("two-sample test needs equal sample sizes")
    if len(views_a) < min_samples:
        raise InsufficientSamples(
            f"need at least {min_samples} views per side, got {len(views_a)}"
        )
    rows_a, rows_b = _coords(views_a), _coords(views_b)
    if len(rows_a[0]) != len(rows_b[0]):
        raise ValueError("the two sides captured different label widths")

    def categorize(rows):
        out = {}
        for r in rows:
            key = tuple(_bucket(v, f.modulus, bins) for v in r)
            out[key] = out.get(key, 0) + 1
        return out

    ca, cb = categorize(rows_a), categorize(rows_b)
    keys = sorted(set(ca) | set(cb))
    pooled = {k: ca.get(k, 0) + cb.get(k, 0) for k in keys}
    kept = [k for k in keys if pooled[k] >= min_pooled]
    merged = [k for k in keys if pooled[k] < min_pooled]
    table_a = [ca.get(k, 0) for k in kept]
    table_b = [cb.get(k, 0) for k in kept]
    if merged:
        table_a.append(sum(ca.get(k, 0) for k in merged))
        table_b.append(sum(cb.get(k, 0) for k in merged))
    ncats = len(table_a)
    if ncats < 2:
        return TestReport(
            name="two-sample-views",
            samples=(len(views_a), len(views_b)),
            statistic=0.0,
            dof=0,
            p_value=1.0,
            detail="single category; distributions identical by construction",
        )
    stat, p, dof, _ = chi2_contingency([table_a, table_b], correction=False)
    return TestReport(
        name="two-sample-views",
        samples=(len(views_a), len(views_b)),
        statistic=float(stat),
        dof=int(dof),
        p_value=float(p),
        detail=f"{ncats} categories ({len(merged)} merged)",
    )
