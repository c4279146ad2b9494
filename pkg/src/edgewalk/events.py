"""Exact per-path counting of the three-consecutive-favorite-edge events.

An event fires at a crossing step into site x-1 when the favorite-edge set
is exactly {x, x+1, x+2} (x >= 2) and the shared maximal edge local time is
an even number 2h:

* an "upcross" event at a step x-2 -> x-1 records k = (new upcrossing count
  at x-1) - 1; such a step is the inverse upcrossing time T_U(x-1, k+1);
* a "downcross" event at a step x -> x-1 requires the new downcrossing count
  at x-1 to equal h; such a step is T_D(x-1, h).

The walk runs until the maximal edge local time exceeds 2H.  Both event
kinds need their shared local time 2h <= 2H to be the running maximum, and
the maximum never decreases, so no event with h <= H can occur afterwards;
the stop is sound and a.s. finite.

``N_H`` tallies upcross events with h in [h_min_up, H] whose k lies in the
window ((2h - 2*sqrt(2h))/2, (2h - sqrt(2h))/2); ``N_tilde_H`` tallies
downcross events with h in [h_min_down, H].  All raw events (h >= 1, any k)
are kept on the report so the containment and disjointness audits can see
the full picture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _fast
from .rng import StepGenerator


def k_in_window(two_h: int, k: int, closed: bool = False) -> bool:
    """Exact-integer membership of k in the open (or closed) window
    ((two_h - 2 sqrt(two_h))/2, (two_h - sqrt(two_h))/2)."""
    d = two_h - 2 * k
    if closed:
        return (d <= 0 or d * d <= 4 * two_h) and (d >= 0 and d * d >= two_h)
    return (d < 0 or d * d < 4 * two_h) and (d > 0 and d * d > two_h)


@dataclass
class EventRecord:
    kind: str          # "upcross" | "downcross"
    x: int
    h: int             # shared local time is 2h
    time: int
    k: int | None = None   # upcross events only

    def to_payload(self) -> dict:
        return {"kind": self.kind, "x": self.x, "h": self.h,
                "k": self.k, "time": self.time}


@dataclass
class PathCountReport:
    master_seed: int
    stream: int
    H: int
    h_min_up: int
    h_min_down: int
    closed_window: bool
    stop_time: int
    stop_reason: str           # "max-local-time" | "budget"
    events: list[EventRecord]
    f_counts: dict[str, int]         # r = "1","2","3","4+" over n <= stop
    f_tilde_counts: dict[str, int]

    def n_events(self, h_hi: int) -> int:
        """N_{h_hi}: windowed upcross events with h in [h_min_up, h_hi]."""
        return sum(1 for e in self.events
                   if e.kind == "upcross" and self.h_min_up <= e.h <= h_hi
                   and k_in_window(2 * e.h, e.k, self.closed_window))

    def n_tilde_events(self, h_hi: int) -> int:
        """N~_{h_hi}: downcross events with h in [h_min_down, h_hi]."""
        return sum(1 for e in self.events
                   if e.kind == "downcross" and self.h_min_down <= e.h <= h_hi)

    def to_payload(self) -> dict:
        return {
            "seed": self.master_seed, "stream": self.stream, "H": self.H,
            "stop_time": self.stop_time, "stop_reason": self.stop_reason,
            "N": [self.n_events(hp) for hp in range(self.h_min_up, self.H + 1)],
            "Ntilde": [self.n_tilde_events(hp)
                       for hp in range(self.h_min_up, self.H + 1)],
            "f": self.f_counts, "f_tilde": self.f_tilde_counts,
            "events": [e.to_payload() for e in self.events],
        }


_F_KEYS = ("1", "2", "3", "4+")


def count_path_events(gen: StepGenerator, H: int, h_min_up: int = 8,
                      h_min_down: int = 50, closed_window: bool = False,
                      max_steps: int = 1 << 43) -> PathCountReport:
    """Run one path to its sound stopping time and report exact counts."""
    if H < 1:
        raise ValueError("H must be >= 1")
    span = 32 * H + 1024
    ev_cap = 1 << 16
    while True:
        res = _fast.event_run(gen.base, H, max_steps, span, ev_cap)
        if res[0] == _fast.STATUS_OK:
            break
        if res[0] == _fast.STATUS_EVCAP:
            ev_cap *= 4
        else:
            span *= 2
    _, stop_time, n_ev, ev_kind, ev_x, ev_h, ev_k, ev_time, f, ft = res
    events = []
    for i in range(n_ev):
        up = ev_kind[i] == 0
        events.append(EventRecord(
            kind="upcross" if up else "downcross",
            x=int(ev_x[i]), h=int(ev_h[i]), time=int(ev_time[i]),
            k=int(ev_k[i]) if up else None))
    return PathCountReport(
        master_seed=gen.master_seed, stream=gen.stream_index, H=H,
        h_min_up=h_min_up, h_min_down=h_min_down,
        closed_window=closed_window,
        stop_time=int(stop_time) if stop_time >= 0 else -1,
        stop_reason="max-local-time" if stop_time >= 0 else "budget",
        events=events,
        f_counts=dict(zip(_F_KEYS, map(int, f))),
        f_tilde_counts=dict(zip(_F_KEYS, map(int, ft))))


@dataclass
class AuditSummary:
    containment_violations: list[dict] = field(default_factory=list)
    disjointness_violations: list[dict] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.containment_violations and not self.disjointness_violations


def audit_containment_disjointness(report: PathCountReport) -> AuditSummary:
    """Check that every upcross event is contained in its downcross event and
    that, per fixed h, at most one windowed upcross event fired.

    Violations are reported, never suppressed.
    """
    out = AuditSummary()
    downs = {(e.x, e.h) for e in report.events if e.kind == "downcross"}
    down_time = {(e.x, e.h): e.time for e in report.events
                 if e.kind == "downcross"}
    for e in report.events:
        if e.kind != "upcross":
            continue
        key = (e.x, e.h)
        if key not in downs or down_time[key] > e.time:
            out.containment_violations.append(e.to_payload())
    by_h: dict[int, int] = {}
    for e in report.events:
        if e.kind == "upcross" and k_in_window(2 * e.h, e.k,
                                               report.closed_window):
            by_h[e.h] = by_h.get(e.h, 0) + 1
    for h, c in sorted(by_h.items()):
        if c > 1:
            out.disjointness_violations.append({"h": h, "count": c})
    return out


def downcross_site_tallies(gen: StepGenerator, horizon: int) -> dict[str, int]:
    """Counts of steps n <= horizon at which there were exactly r favorite
    downcrossing sites, r in {1, 2, 3, >=4}."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    span = max(64, int(6 * math.sqrt(horizon)) + 64)
    while True:
        status, tallies = _fast.down_tally_run(gen.base, horizon, span)
        if status == _fast.STATUS_OK:
            break
        span *= 2
    return dict(zip(_F_KEYS, map(int, tallies)))


def replicate_reports(master_seed: int, n_paths: int, H: int,
                      stream0: int = 0, **kwargs) -> list[PathCountReport]:
    """Independent per-stream reports, mergeable by plain concatenation."""
    return [count_path_events(StepGenerator(master_seed, stream0 + i), H,
                              **kwargs)
            for i in range(n_paths)]
