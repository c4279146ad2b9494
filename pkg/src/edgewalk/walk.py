"""Streaming simple symmetric random walk with exact crossing bookkeeping.

The ledger tracks, per site x, the number of upcrossings (steps x-1 -> x) and
downcrossings (steps x+1 -> x), and per edge x (between x-1 and x) the number
of traversals, together with the running argmax sets:

* favorite edges: edges attaining the maximal edge local time;
* favorite downcrossing sites: sites attaining the maximal downcrossing
  count.  While no downcrossing has happened yet the maximum is 0 and the
  set is read as "every site the walk has already left", i.e. the range of
  S_0 .. S_{n-1}; this keeps the set finite and matches the hand examples.

All updates are O(1) per step: an incremented counter that beats the max
resets the argmax set to a singleton, one that ties the max is appended.

``CrossingLedger`` is the plain-Python reference used by tests and small
runs; the numba kernels in :mod:`edgewalk._fast` reimplement the same rules
for long paths and are cross-checked against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _fast
from .rng import StepGenerator, stream_base, mix64, GOLDEN


@dataclass
class WalkState:
    """Time, current and previous position of the walk."""

    n: int = 0
    position: int = 0
    previous: int = 0


def edge_of_step(prev: int, cur: int) -> int:
    """Index of the edge used by a step from ``prev`` to ``cur``.

    Edge x sits between sites x-1 and x, so both directions across it map to
    (cur + prev + 1) / 2.
    """
    if abs(cur - prev) != 1:
        raise ValueError(f"not a unit step: {prev} -> {cur}")
    return (cur + prev + 1) // 2


class CrossingLedger:
    """Dense per-site/per-edge crossing counts with streaming argmax sets."""

    def __init__(self) -> None:
        self.n = 0
        self.position = 0
        self.previous = 0
        # dense storage over [lo_cap, hi_cap], offset indexing
        self._cap = 64
        self._off = 32
        self._up = np.zeros(self._cap, np.int64)
        self._down = np.zeros(self._cap, np.int64)
        self._edge = np.zeros(self._cap, np.int64)
        self.lo = 0          # range of S_0 .. S_{n-1}
        self.hi = 0
        self.max_edge_local = 0
        self._kset: list[int] = []
        self.max_down = 0
        self._uset: list[int] = []

    # -- storage ---------------------------------------------------------

    def _grow(self, idx: int) -> None:
        while not (0 < idx + self._off < self._cap - 1):
            up = np.zeros(self._cap * 2, np.int64)
            down = np.zeros(self._cap * 2, np.int64)
            edge = np.zeros(self._cap * 2, np.int64)
            shift = self._cap // 2
            up[shift:shift + self._cap] = self._up
            down[shift:shift + self._cap] = self._down
            edge[shift:shift + self._cap] = self._edge
            self._up, self._down, self._edge = up, down, edge
            self._off += shift
            self._cap *= 2

    def xi_up(self, x: int) -> int:
        i = x + self._off
        return int(self._up[i]) if 0 <= i < self._cap else 0

    def xi_down(self, x: int) -> int:
        i = x + self._off
        return int(self._down[i]) if 0 <= i < self._cap else 0

    def edge_local(self, x: int) -> int:
        i = x + self._off
        return int(self._edge[i]) if 0 <= i < self._cap else 0

    # -- favorite sets -----------------------------------------------------

    @property
    def favorite_edges(self) -> tuple[int, ...]:
        return tuple(sorted(self._kset))

    @property
    def favorite_down_sites(self) -> tuple[int, ...]:
        if self.max_down == 0:
            return tuple(range(self.lo, self.hi + 1))
        return tuple(sorted(self._uset))

    def n_favorite_down_sites(self) -> int:
        if self.max_down == 0:
            return self.hi - self.lo + 1
        return len(self._uset)

    def utilde(self) -> int:
        """min |x| over the favorite edges."""
        return min(abs(x) for x in self._kset)

    def umin(self) -> int:
        """min |x| over the favorite downcrossing sites."""
        if self.max_down == 0:
            return 0  # origin is always in the visited range
        return min(abs(x) for x in self._uset)

    # -- stepping ----------------------------------------------------------

    def advance(self, step: int) -> None:
        if step not in (-1, 1):
            raise ValueError(f"step must be +-1, got {step}")
        prev = self.position
        self.previous = prev
        if prev < self.lo:
            self.lo = prev
        elif prev > self.hi:
            self.hi = prev
        pos = prev + step
        self.position = pos
        self.n += 1
        self._grow(pos)
        off = self._off
        if step == 1:
            e = pos
            self._up[pos + off] += 1
        else:
            e = prev
            self._down[pos + off] += 1
            d = int(self._down[pos + off])
            if d > self.max_down:
                self.max_down = d
                self._uset = [pos]
            elif d == self.max_down:
                self._uset.append(pos)
        self._edge[e + off] += 1
        c = int(self._edge[e + off])
        if c > self.max_edge_local:
            self.max_edge_local = c
            self._kset = [e]
        elif c == self.max_edge_local:
            self._kset.append(e)


def advance(state: WalkState, ledger: CrossingLedger, step: int) -> tuple[WalkState, CrossingLedger]:
    """Apply one ±1 step to a (state, ledger) pair."""
    ledger.advance(step)
    return WalkState(ledger.n, ledger.position, ledger.previous), ledger


def check_identities(ledger: CrossingLedger) -> int:
    """Number of (x, n)-identity violations over the full visited range.

    Checks, for every x in the visited range, the upcrossing/downcrossing
    difference identity and the three decompositions of the edge local time.
    """
    pos = ledger.position
    lo = min(ledger.lo, pos) - 1
    hi = max(ledger.hi, pos) + 2
    bad = 0
    for x in range(lo, hi + 1):
        ind = 1 if 0 < x <= pos else (-1 if pos < x <= 0 else 0)
        a = ledger.xi_up(x)
        b = ledger.xi_down(x - 1)
        lt = ledger.edge_local(x)
        if a - b != ind or lt != a + b or lt != 2 * a - ind or lt != 2 * b + ind:
            bad += 1
    return bad


def audit_prop24(ledger: CrossingLedger) -> bool:
    """True iff every favorite edge has its left site among the favorite
    downcrossing sites."""
    if ledger.max_down == 0:
        return all(ledger.lo <= x - 1 <= ledger.hi for x in ledger._kset)
    return all(ledger.xi_down(x - 1) == ledger.max_down for x in ledger._kset)


# -- batch (vectorized) recomputation, used as a from-scratch cross-check ----

def ledger_from_steps(steps: np.ndarray) -> CrossingLedger:
    """Replay a ±1 step array through a fresh ledger."""
    led = CrossingLedger()
    for s in steps:
        led.advance(int(s))
    return led


def crossing_counts(steps: np.ndarray) -> dict:
    """From-scratch dense counts for a whole path, via bincount.

    Returns dict with 'sites' (offset), 'up', 'down', 'edge', 'positions'.
    Independent of the streaming code path.
    """
    steps = np.asarray(steps, dtype=np.int64)
    n = len(steps)
    pos = np.concatenate([[0], np.cumsum(steps)])
    lo = int(pos.min()) - 1
    hi = int(pos.max()) + 1
    width = hi - lo + 1
    land = pos[1:]
    up_sites = land[steps == 1] - lo
    down_sites = land[steps == -1] - lo
    edges = np.where(steps == 1, land, pos[:-1]) - lo
    return {
        "lo": lo,
        "up": np.bincount(up_sites, minlength=width),
        "down": np.bincount(down_sites, minlength=width),
        "edge": np.bincount(edges, minlength=width),
        "positions": pos,
    }


@dataclass
class Snapshot:
    """Ledger digest at one probe time."""

    n: int
    position: int
    favorite_edges: tuple[int, ...]
    favorite_down_sites: tuple[int, ...]
    utilde: int
    umin: int
    max_edge_local: int
    max_down: int


def simulate(gen: StepGenerator, n_steps: int, probes: list[int]) -> list[Snapshot]:
    """Run ``n_steps`` and snapshot the ledger at each probe time."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    probes = sorted(probes)
    if probes and probes[-1] > n_steps:
        raise ValueError("probe beyond n_steps")
    steps = gen.steps(n_steps)
    led = CrossingLedger()
    want = set(probes)
    out = []
    for i, s in enumerate(steps, start=1):
        led.advance(int(s))
        if i in want:
            out.append(Snapshot(
                n=i, position=led.position,
                favorite_edges=led.favorite_edges,
                favorite_down_sites=led.favorite_down_sites,
                utilde=led.utilde(), umin=led.umin(),
                max_edge_local=led.max_edge_local, max_down=led.max_down,
            ))
    return out


@dataclass
class StoppedProfile:
    """Downcrossing profile at an inverse crossing time (or censored)."""

    target_site: int
    target_count: int
    kind: str                      # "upcross" | "downcross"
    stop_time: int | None
    window: tuple[int, int]
    down_profile: np.ndarray = field(repr=False)
    censored: bool = False
    cap: int = 0


def stopped_run(gen: StepGenerator, target_site: int, target_count: int,
                kind: str = "upcross", window: tuple[int, int] = (0, 0),
                cap: int = 10**8) -> StoppedProfile:
    """Run until the (site, count) inverse crossing time, or censor at cap."""
    if target_count < 1 or cap < 1:
        raise ValueError("target_count and cap must be >= 1")
    if kind not in ("upcross", "downcross"):
        raise ValueError(f"unknown kind {kind!r}")
    win_lo, win_hi = window
    span = 1 << 12
    while True:
        status, stop, prof = _fast.stopped_run_kernel(
            gen.base, target_site, target_count,
            1 if kind == "upcross" else 0, win_lo, win_hi, cap, span)
        if status == _fast.STATUS_OK:
            break
        span *= 2
    return StoppedProfile(
        target_site=target_site, target_count=target_count, kind=kind,
        stop_time=None if stop < 0 else int(stop),
        window=window, down_profile=prof, censored=stop < 0, cap=cap)


@dataclass
class AuditReport:
    """Violation counts from a streamed identity/coupling audit."""

    n_steps: int
    updown: int        # xi_U(x,n) - xi_D(x-1,n) vs the endpoint indicator
    sum_rule: int      # L = xi_U + xi_D(.-1)
    twice_up: int      # L = 2 xi_U -+ indicator
    twice_down: int    # L = 2 xi_D(.-1) +- indicator
    prop24: int        # favorite edge left-site coupling
    full_sweep: int    # periodic whole-range recheck

    @property
    def clean(self) -> bool:
        return (self.updown == self.sum_rule == self.twice_up
                == self.twice_down == self.prop24 == self.full_sweep == 0)


def identity_audit(gen: StepGenerator, n_steps: int,
                   full_every: int = 1 << 14) -> AuditReport:
    """Stream a run checking the crossing identities at every step.

    Per step the four identities are checked at the touched edge; both sides
    of each identity change only there, so with the trivial n=0 base case
    the per-step check certifies every (x, n) pair.  A full-range sweep runs
    every ``full_every`` steps as an independent recheck.
    """
    span = max(64, int(6 * math.sqrt(n_steps)) + 64)
    while True:
        res = _fast.identity_audit(gen.base, n_steps, full_every, span)
        if res[0] == _fast.STATUS_OK:
            break
        span *= 2
    return AuditReport(n_steps, *res[1:])


def max_site_local_time(gen: StepGenerator, n_steps: int) -> int:
    """Maximal site local time xi*(n), computed vectorized."""
    steps = gen.steps(n_steps).astype(np.int64)
    pos = np.cumsum(steps)
    lo = pos.min()
    return int(np.bincount(pos - lo).max())
