"""Literal, definition-level reference implementations for cross-checks.

Everything here is deliberately naive (set comprehensions over the whole
path) so it can serve as an independent oracle for the streaming code.
"""

from __future__ import annotations


def path_positions(steps):
    pos = [0]
    for s in steps:
        pos.append(pos[-1] + s)
    return pos


def xi_up(steps, x, n=None):
    pos = path_positions(steps)
    n = len(steps) if n is None else n
    return sum(1 for k in range(1, n + 1) if pos[k] == x and pos[k - 1] == x - 1)


def xi_down(steps, x, n=None):
    pos = path_positions(steps)
    n = len(steps) if n is None else n
    return sum(1 for k in range(1, n + 1) if pos[k] == x and pos[k - 1] == x + 1)


def edge_local(steps, x, n=None):
    pos = path_positions(steps)
    n = len(steps) if n is None else n
    return sum(1 for k in range(1, n + 1) if (pos[k] + pos[k - 1] + 1) // 2 == x)


def favorite_edges(steps, n=None):
    pos = path_positions(steps)
    n = len(steps) if n is None else n
    touched = {(pos[k] + pos[k - 1] + 1) // 2 for k in range(1, n + 1)}
    counts = {x: edge_local(steps, x, n) for x in touched}
    mx = max(counts.values())
    return {x for x, c in counts.items() if c == mx}, mx


def favorite_down_sites(steps, n=None):
    """Argmax of the downcrossing count; falls back to the sites already
    left (range of S_0..S_{n-1}) while no downcrossing has happened."""
    pos = path_positions(steps)
    n = len(steps) if n is None else n
    sites = set(range(min(pos), max(pos) + 1))
    counts = {x: xi_down(steps, x, n) for x in sites}
    mx = max(counts.values()) if counts else 0
    if mx == 0:
        return set(pos[:n]), 0
    return {x for x, c in counts.items() if c == mx}, mx
