"""Graph-to-instance encodings whose isomorphism mirrors graph isomorphism.

Vertex i gets variable x{i}, edge e_k gets y{k}; primed copies are x{i}'
and y{k}'.  The binary OR encodings work on any graph without isolated
vertices; the implication variant needs the edge variables to stay
faithful.  The exactly-one and odd-parity encodings are stated for
preprocessed graphs (minimum degree two, and triangle-free for parity),
where their outputs are maximal sets of applications.
"""

from __future__ import annotations

from .constraints import ONE_IN_THREE, OR0, OR1, OR2, XOR2, make_constraint
from .graphs import Graph
from .instances import Application, InstanceSet, instance_set

H4 = make_constraint(
    "h4", 4,
    lambda x, y, xp, yp: (x | y) & (x ^ xp) & (y ^ yp))

ONE_IN_THREE_PAIRED = make_constraint(
    "one-in-three-paired", 6,
    lambda x, y, z, xp, yp, zp: (1 if x + y + z == 1 else 0)
    & (x ^ xp) & (y ^ yp) & (z ^ zp))

XOR3_PAIRED = make_constraint(
    "xor3-paired", 6,
    lambda x, y, z, xp, yp, zp: (x ^ y ^ z) & (x ^ xp) & (y ^ yp) & (z ^ zp))


def _xv(i: int) -> str:
    return f"x{i}"


def _yv(k: int) -> str:
    return f"y{k}"


def _p(v: str) -> str:
    return v + "'"


def _no_isolated(g: Graph) -> None:
    if g.isolated_vertices():
        raise ValueError("encoding requires a graph without isolated vertices")


def encode_or(variant: int, g: Graph) -> InstanceSet:
    """variant 0: one OR0 per edge on vertex variables; variant 2: OR2
    likewise; variant 1: per edge e_k = {i, j} the implications y_k -> x_i
    and y_k -> x_j through an edge variable (the naive per-edge encoding
    fails for implication, edge variables restore faithfulness)."""
    _no_isolated(g)
    apps = []
    if variant in (0, 2):
        c = OR0 if variant == 0 else OR2
        for i, j in g.edges:
            apps.append(Application(c, (_xv(i), _xv(j))))
        universe = [_xv(v) for v in range(1, g.n + 1)]
    elif variant == 1:
        for k, (i, j) in enumerate(g.edges, start=1):
            apps.append(Application(OR1, (_yv(k), _xv(i))))
            apps.append(Application(OR1, (_yv(k), _xv(j))))
        universe = [_xv(v) for v in range(1, g.n + 1)] \
            + [_yv(k) for k in range(1, g.m + 1)]
    else:
        raise ValueError(f"variant must be 0, 1 or 2, got {variant}")
    return instance_set(apps, universe)


def encode_h4(g: Graph) -> InstanceSet:
    """Per edge {i, j}: h4(x_i, x_j, x_i', x_j')."""
    _no_isolated(g)
    apps = [Application(H4, (_xv(i), _xv(j), _p(_xv(i)), _p(_xv(j))))
            for i, j in g.edges]
    universe = [v for i in range(1, g.n + 1)
                for v in (_xv(i), _p(_xv(i)))]
    return instance_set(apps, universe)


def encode_oneinthree(g: Graph, *, expanded: bool = False) -> InstanceSet:
    """Per edge e_k = {i, j} an exactly-one application over
    (x_i, x_j, y_k) fused with the complement pairs, plus explicit XOR
    pairs for every vertex and edge variable.  With expanded=True the
    per-edge application is the plain 3-ary exactly-one instead."""
    _no_isolated(g)
    apps = []
    for k, (i, j) in enumerate(g.edges, start=1):
        if expanded:
            apps.append(Application(ONE_IN_THREE, (_xv(i), _xv(j), _yv(k))))
        else:
            apps.append(Application(
                ONE_IN_THREE_PAIRED,
                (_xv(i), _xv(j), _yv(k), _p(_xv(i)), _p(_xv(j)), _p(_yv(k)))))
    for i in range(1, g.n + 1):
        apps.append(Application(XOR2, (_xv(i), _p(_xv(i)))))
    for k in range(1, g.m + 1):
        apps.append(Application(XOR2, (_yv(k), _p(_yv(k)))))
    universe = [w for i in range(1, g.n + 1) for w in (_xv(i), _p(_xv(i)))] \
        + [w for k in range(1, g.m + 1) for w in (_yv(k), _p(_yv(k)))]
    return instance_set(apps, universe)


def encode_xor3(g: Graph) -> InstanceSet:
    """Per edge e_k = {i, j} the four odd-parity triples over the plain and
    primed copies, plus all XOR pairs."""
    _no_isolated(g)
    from .constraints import XOR3
    apps = []
    for k, (i, j) in enumerate(g.edges, start=1):
        x, y, z = _xv(i), _xv(j), _yv(k)
        xp, yp, zp = _p(x), _p(y), _p(z)
        apps.append(Application(XOR3, (x, y, z)))
        apps.append(Application(XOR3, (xp, yp, z)))
        apps.append(Application(XOR3, (xp, y, zp)))
        apps.append(Application(XOR3, (x, yp, zp)))
    for i in range(1, g.n + 1):
        apps.append(Application(XOR2, (_xv(i), _p(_xv(i)))))
    for k in range(1, g.m + 1):
        apps.append(Application(XOR2, (_yv(k), _p(_yv(k)))))
    universe = [w for i in range(1, g.n + 1) for w in (_xv(i), _p(_xv(i)))] \
        + [w for k in range(1, g.m + 1) for w in (_yv(k), _p(_yv(k)))]
    return instance_set(apps, universe)
