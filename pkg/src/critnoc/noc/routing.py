"""Mesh coordinates, port numbering and X-Y dimension-order routing."""
from __future__ import annotations

from enum import IntEnum


class Port(IntEnum):
    # y grows southwards, router id = y * k + x
    N = 0
    S = 1
    E = 2
    W = 3
    L = 4


NUM_PORTS = 5

OPPOSITE = {Port.N: Port.S, Port.S: Port.N, Port.E: Port.W, Port.W: Port.E}


def coords(node: int, k: int) -> tuple[int, int]:
    return node % k, node // k


def node_id(x: int, y: int, k: int) -> int:
    return y * k + x


def neighbor(node: int, port: int, k: int) -> int:
    x, y = coords(node, k)
    if port == Port.N:
        y -= 1
    elif port == Port.S:
        y += 1
    elif port == Port.E:
        x += 1
    elif port == Port.W:
        x -= 1
    else:
        return node
    if not (0 <= x < k and 0 <= y < k):
        raise ValueError(f"no neighbour of node {node} through port {Port(port).name}")
    return node_id(x, y, k)


def hops(src: int, dst: int, k: int) -> int:
    sx, sy = coords(src, k)
    dx, dy = coords(dst, k)
    return abs(sx - dx) + abs(sy - dy)


def route_xy(cur: tuple[int, int], dst: tuple[int, int], k: int | None = None) -> Port:
    """Output port for a packet at ``cur`` heading to ``dst`` (X first, then Y)."""
    if k is not None:
        for x, y in (cur, dst):
            if not (0 <= x < k and 0 <= y < k):
                raise ValueError(f"coordinate ({x}, {y}) outside the {k}x{k} mesh")
    if dst[0] > cur[0]:
        return Port.E
    if dst[0] < cur[0]:
        return Port.W
    if dst[1] > cur[1]:
        return Port.S
    if dst[1] < cur[1]:
        return Port.N
    return Port.L
