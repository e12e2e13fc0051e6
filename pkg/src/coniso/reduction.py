"""Graph isomorphism to constraint isomorphism, end to end and
constant-free.

The pipeline, for a constraint set whose isomorphism problem is not
polynomial-time decidable:

1. preprocess the graph pair (early non-isomorphic answer on count
   mismatches);
2. find a gadget: a set of applications without constants realizing one of
   ten fixed two/three-variable targets (complete search, first hit in the
   documented order);
3. for five of the targets the gadget instantiates a direct per-edge
   encoding; for the other five, realize one of six canonical forms with
   constants, lift the constants to the variables f and t, instantiate the
   lifted realization per edge, and append gadget copies that tie f, f1,
   f2 and t, t1 together in place of the constants 0 and 1.

The output pair of instance sets is isomorphic iff the input graphs are.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .constraints import (
    Constraint,
    classify_trichotomy,
    detect_properties,
    eval_constraint,
    TrichotomyClass,
)
from .closure import realize
from .graphs import Graph, preprocess_pair
from .instances import (
    Application,
    BoolFunc,
    InstanceSet,
    func_from_callable,
    instance_set,
    sort_vars,
)

_X, _Y, _Z, _XP, _YP, _ZP = "x", "y", "z", "x'", "y'", "z'"


def _form(name, variables, fn):
    return (name, tuple(variables), func_from_callable(variables, fn))


#: The six canonical forms, in realization priority order.  The last is
#: the only affine one and the only one attempted for affine sets.
CANONICAL_FORMS = [
    _form("or0", (_X, _Y), lambda x, y: x | y),
    _form("or1", (_X, _Y), lambda x, y: (1 - x) | y),
    _form("or2", (_X, _Y), lambda x, y: (1 - x) | (1 - y)),
    _form("h4", (_X, _Y, _XP, _YP),
          lambda x, y, xp, yp: (x | y) & (x ^ xp) & (y ^ yp)),
    _form("oneinthree-paired", (_X, _Y, _Z, _XP, _YP, _ZP),
          lambda x, y, z, xp, yp, zp: (1 if x + y + z == 1 else 0)
          & (x ^ xp) & (y ^ yp) & (z ^ zp)),
    _form("xor3-paired", (_X, _Y, _Z, _XP, _YP, _ZP),
          lambda x, y, z, xp, yp, zp: (x ^ y ^ z) & (x ^ xp) & (y ^ yp)
          & (z ^ zp)),
]

_FORM_INDEX = {name: i + 1 for i, (name, _, _) in enumerate(CANONICAL_FORMS)}

#: Gadget targets in fixed search order.  "claim4" targets carry the
#: variable substitutions for the copies appended next to the encoding;
#: "direct" targets carry the per-edge instantiation pattern.
GADGET_TARGETS = [
    ("notx-and-y", ("x", "y"), lambda x, y: (1 - x) & y, "claim4",
     [{"x": "f", "y": "t"}, {"x": "f1", "y": "t"}, {"x": "f2", "y": "t1"}]),
    ("notx-or-y", ("x", "y"), lambda x, y: (1 - x) | y, "direct", "edge-aux"),
    ("xor2", ("x", "y"), lambda x, y: x ^ y, "claim4",
     [{"x": "f", "y": "t"}, {"x": "f1", "y": "t"}, {"x": "f2", "y": "t"},
      {"x": "f", "y": "t1"}]),
    ("eq2", ("x", "y"), lambda x, y: 1 - (x ^ y), "claim4",
     [{"x": "f", "y": "f1"}, {"x": "f", "y": "f2"}, {"x": "t", "y": "t1"}]),
    ("t-and-notx-or-y", ("t", "x", "y"),
     lambda t, x, y: t & ((1 - x) | y), "direct", "edge-aux-t"),
    ("t-and-eq2", ("t", "x", "y"),
     lambda t, x, y: t & (1 - (x ^ y)), "claim4",
     [{"t": "t", "x": "f", "y": "f1"}, {"t": "t1", "x": "f", "y": "f2"}]),
    ("t-and-or", ("t", "x", "y"),
     lambda t, x, y: t & (x | y), "direct", "edge-t"),
    ("f-and-notx-or-y", ("f", "x", "y"),
     lambda f, x, y: (1 - f) & ((1 - x) | y), "direct", "edge-aux-f"),
    ("f-and-eq2", ("f", "x", "y"),
     lambda f, x, y: (1 - f) & (1 - (x ^ y)), "claim4",
     [{"f": "f", "x": "f", "y": "f1"}, {"f": "f2", "x": "t", "y": "t1"}]),
    ("f-and-nor", ("f", "x", "y"),
     lambda f, x, y: (1 - f) & ((1 - x) | (1 - y)), "direct", "edge-f"),
]


@dataclass(frozen=True)
class ReductionOutput:
    left: InstanceSet
    right: InstanceSet
    constraint_set: tuple[Constraint, ...]
    transcript: dict


def _eval_application(a: Application, assignment: Mapping[str, int]) -> int:
    bits = [assignment[arg] if isinstance(arg, str) else arg
            for arg in a.args]
    return eval_constraint(a.constraint, bits)


def _instantiate(apps: Iterable[Application],
                 mapping: Mapping[str, str]) -> list[Application]:
    out = []
    for a in apps:
        args = tuple(mapping.get(x, x) if isinstance(x, str) else x
                     for x in a.args)
        out.append(Application(a.constraint, args))
    return out


def witness_substitution(b: Constraint, mode: str) -> Application:
    """Turn closure-violating satisfying assignments s, t, u of b into a
    six-variable application with constants.

    mode "non_bijunctive": pick satisfying s, t, u whose coordinatewise
    majority falsifies b; mode "non_affine": pick s, t, u whose
    coordinatewise XOR falsifies b.  Each argument position becomes a
    constant or one of x, y, z, x', y', z' according to the bit pattern
    (s_i, t_i, u_i), and the result is verified against its truth-table
    checkpoints before being returned.
    """
    if mode not in ("non_bijunctive", "non_affine"):
        raise ValueError(f"unknown mode {mode!r}")
    k = b.arity
    mask = b.mask
    sat = [i for i in range(1 << k) if (mask >> i) & 1]
    witness = None
    for s in sat:
        for t in sat:
            for u in sat:
                probe = (s & t) | (s & u) | (t & u) \
                    if mode == "non_bijunctive" else s ^ t ^ u
                if not (mask >> probe) & 1:
                    witness = (s, t, u)
                    break
            if witness:
                break
        if witness:
            break
    if witness is None:
        kind = "majority" if mode == "non_bijunctive" else "XOR"
        raise ValueError(
            f"{b.name} is closed under coordinatewise {kind}; no witnesses")
    s, t, u = witness
    pattern_to_arg = {
        (0, 0, 0): 0, (1, 1, 1): 1,
        (0, 0, 1): _X, (1, 1, 0): _XP,
        (0, 1, 0): _Y, (1, 0, 1): _YP,
        (0, 1, 1): _Z, (1, 0, 0): _ZP,
    }
    args = []
    for i in range(k):
        shift = k - 1 - i
        trip = ((s >> shift) & 1, (t >> shift) & 1, (u >> shift) & 1)
        args.append(pattern_to_arg[trip])
    app = Application(b, tuple(args))
    checkpoints = [
        ({_X: 0, _Y: 0, _Z: 0, _XP: 1, _YP: 1, _ZP: 1}, 1),
        ({_X: 0, _Y: 1, _Z: 1, _XP: 1, _YP: 0, _ZP: 0}, 1),
        ({_X: 1, _Y: 0, _Z: 1, _XP: 0, _YP: 1, _ZP: 0}, 1),
    ]
    if mode == "non_bijunctive":
        checkpoints.append(({_X: 0, _Y: 0, _Z: 1, _XP: 1, _YP: 1, _ZP: 0}, 0))
    else:
        checkpoints.append(({_X: 1, _Y: 1, _Z: 0, _XP: 0, _YP: 0, _ZP: 1}, 0))
    for assignment, expected in checkpoints:
        if _eval_application(app, assignment) != expected:
            raise AssertionError(
                f"substitution checkpoint failed for {b.name}")
    return app


def lift_constants(s: InstanceSet) -> InstanceSet:
    """Replace the constant 0 by the variable f and 1 by t everywhere; the
    result restricted at f:=0, t:=1 is equivalent to the input."""
    if "f" in s.universe or "t" in s.universe:
        raise ValueError("instance already uses the variables f or t")
    apps = []
    for a in s.applications:
        args = tuple(("f", "t")[x] if isinstance(x, int) else x
                     for x in a.args)
        apps.append(Application(a.constraint, args))
    return instance_set(apps, tuple(s.universe) + ("f", "t"))


def _sid_mapping(i: int, a: int, b: int, k: int) -> dict[str, str]:
    """Variable substitution sending a canonical form's variables to the
    instance variables of edge e_k = {a, b}."""
    m = {_X: f"x{a}", _Y: f"x{b}"}
    if i == 2:
        # handled specially: two copies per edge through the edge variable
        raise AssertionError("use _sid_mappings for the implication form")
    if i >= 4:
        m[_XP] = f"x{a}'"
        m[_YP] = f"x{b}'"
    if i >= 5:
        m[_Z] = f"y{k}"
        m[_ZP] = f"y{k}'"
    return m


def _sid_mappings(i: int, g: Graph) -> list[dict[str, str]]:
    maps = []
    for k, (a, b) in enumerate(g.edges, start=1):
        if i == 2:
            maps.append({_X: f"y{k}", _Y: f"x{a}"})
            maps.append({_X: f"y{k}", _Y: f"x{b}"})
        else:
            maps.append(_sid_mapping(i, a, b, k))
    return maps


def _sid_universe(i: int, g: Graph) -> list[str]:
    names = ["f", "t"] + [f"x{v}" for v in range(1, g.n + 1)]
    if i == 2:
        names += [f"y{k}" for k in range(1, g.m + 1)]
    if i >= 4:
        names += [f"x{v}'" for v in range(1, g.n + 1)]
    if i >= 5:
        names += [f"y{k}" for k in range(1, g.m + 1)]
        names += [f"y{k}'" for k in range(1, g.m + 1)]
    return names


def _check_restriction(d_realization: InstanceSet, form_name: str) -> None:
    from .instances import substitute
    name, variables, func = next(
        f for f in CANONICAL_FORMS if f[0] == form_name)
    restricted = substitute(d_realization, {"f": 0, "t": 1})
    n = len(variables)
    pos = {v: j for j, v in enumerate(variables)}
    for idx in range(1 << n):
        assignment = {v: (idx >> (n - 1 - pos[v])) & 1 for v in variables}
        want = (func.mask >> sum(
            assignment[v] << (len(func.variables) - 1 - j)
            for j, v in enumerate(func.variables))) & 1
        got = all(_eval_application(a, assignment)
                  for a in restricted.applications)
        if bool(want) != got:
            raise ValueError(
                f"realization restricted at f:=0, t:=1 is not the "
                f"{form_name} form")


def build_sid(i: int, d_realization: InstanceSet, g: Graph) -> InstanceSet:
    """Instantiate a lifted realization of canonical form i per edge of g,
    with f and t shared across all copies."""
    if not 1 <= i <= 6:
        raise ValueError(f"form index {i} outside 1..6")
    form_name = CANONICAL_FORMS[i - 1][0]
    _check_restriction(d_realization, form_name)
    apps = []
    for mapping in _sid_mappings(i, g):
        apps.extend(_instantiate(d_realization.applications, mapping))
    return instance_set(apps, _sid_universe(i, g))


def find_gadget(cs: Iterable[Constraint]
                ) -> Optional[tuple[str, InstanceSet]]:
    """First realizable target from the fixed list, with its realization
    (no constants, no auxiliary variables)."""
    cs = list(cs)
    for name, variables, fn, _kind, _data in GADGET_TARGETS:
        target = func_from_callable(variables, fn)
        found = realize(cs, target, with_constants=False,
                        variables=variables)
        if found is not None:
            return name, found
    return None


def _gadget_entry(case_id: str):
    for entry in GADGET_TARGETS:
        if entry[0] == case_id:
            return entry
    raise ValueError(f"unknown gadget case {case_id!r}")


def _build_direct(case_id: str, gadget: InstanceSet, g: Graph
                  ) -> InstanceSet:
    """Per-edge instantiation of a directly-encodable gadget target."""
    _name, _vars, _fn, kind, pattern = _gadget_entry(case_id)
    if kind != "direct":
        raise ValueError(f"{case_id} is not a direct encoding case")
    apps = []
    universe = [f"x{v}" for v in range(1, g.n + 1)]
    if pattern in ("edge-aux-t", "edge-t"):
        universe.append("t")
    if pattern in ("edge-aux-f", "edge-f"):
        universe.append("f")
    if pattern.startswith("edge-aux"):
        universe += [f"y{k}" for k in range(1, g.m + 1)]
    for k, (a, b) in enumerate(g.edges, start=1):
        if pattern == "edge-aux":
            maps = [{"x": f"y{k}", "y": f"x{a}"},
                    {"x": f"y{k}", "y": f"x{b}"}]
        elif pattern == "edge-aux-t":
            maps = [{"t": "t", "x": f"y{k}", "y": f"x{a}"},
                    {"t": "t", "x": f"y{k}", "y": f"x{b}"}]
        elif pattern == "edge-t":
            maps = [{"t": "t", "x": f"x{a}", "y": f"x{b}"}]
        elif pattern == "edge-aux-f":
            maps = [{"f": "f", "x": f"y{k}", "y": f"x{a}"},
                    {"f": "f", "x": f"y{k}", "y": f"x{b}"}]
        elif pattern == "edge-f":
            maps = [{"f": "f", "x": f"x{a}", "y": f"x{b}"}]
        else:
            raise AssertionError(pattern)
        for m in maps:
            apps.extend(_instantiate(gadget.applications, m))
    return instance_set(apps, universe)


def attach_gadget(case_id: str, left: Optional[InstanceSet],
                  right: Optional[InstanceSet], gadget: InstanceSet,
                  graphs: Optional[tuple[Graph, Graph]] = None
                  ) -> tuple[InstanceSet, InstanceSet]:
    """Complete a pair of encodings for the given gadget case.

    For the five copy cases the gadget applications that tie f, f1, f2 and
    t, t1 together are appended to both sides; for the five direct cases
    the per-edge encodings are built from the graphs outright.
    """
    entry = _gadget_entry(case_id)
    kind, data = entry[3], entry[4]
    if kind == "direct":
        if graphs is None:
            raise ValueError(f"direct case {case_id} needs the graph pair")
        return (_build_direct(case_id, gadget, graphs[0]),
                _build_direct(case_id, gadget, graphs[1]))
    if left is None or right is None:
        raise ValueError(f"copy case {case_id} needs both encodings")

    def extend(side: InstanceSet) -> InstanceSet:
        apps = list(side.applications)
        extra_vars = set(side.universe)
        for mapping in data:
            apps.extend(_instantiate(gadget.applications, mapping))
            extra_vars.update(mapping.values())
        return instance_set(apps, sort_vars(extra_vars))

    return extend(left), extend(right)


def _render_apps(s: InstanceSet) -> list[str]:
    return [" ".join([a.constraint.name] + [str(x) for x in a.args])
            for a in s.sorted_applications()]


def trivial_nonisomorphic_pair(cs: Iterable[Constraint]
                               ) -> tuple[InstanceSet, InstanceSet]:
    """A fixed pair of instance sets of cs that is never isomorphic: the
    empty (tautological) set against one non-tautological application."""
    cs = list(cs)
    pick = next((c for c in cs if not detect_properties(c).two_affine),
                None)
    if pick is None:
        raise ValueError("no non-2-affine constraint to build the pair from")
    variables = tuple(f"v{i}" for i in range(1, pick.arity + 1))
    left = instance_set([], variables)
    right = instance_set([Application(pick, variables)], variables)
    return left, right


def reduce_gi_to_iso(cs: Iterable[Constraint], g: Graph, h: Graph
                     ) -> Optional[ReductionOutput]:
    """Many-one reduction from graph isomorphism: returns None when
    preprocessing already separates the graphs, otherwise a constant-free
    instance pair over one universe that is isomorphic iff g and h are."""
    cs = list(cs)
    verdict = classify_trichotomy(cs)
    if verdict == TrichotomyClass.IN_P:
        raise ValueError(
            "the isomorphism problem for a 2-affine set is polynomial-time "
            "decidable; there is no reduction from graph isomorphism")
    pre = preprocess_pair(g, h)
    transcript: dict = {
        "classification": verdict.value,
        "input": {"left": {"n": g.n, "m": g.m},
                  "right": {"n": h.n, "m": h.m}},
    }
    if pre is None:
        return None
    g3, h3 = pre
    transcript["preprocessed"] = {"n": g3.n, "m": g3.m}
    found = find_gadget(cs)
    if found is None:
        raise RuntimeError(
            "no gadget target is realizable; this contradicts the "
            "classification of the constraint set as not 2-affine")
    case_id, gadget = found
    entry = _gadget_entry(case_id)
    transcript["gadget"] = {"target": case_id,
                            "applications": _render_apps(gadget)}
    if entry[3] == "direct":
        left, right = attach_gadget(case_id, None, None, gadget,
                                    graphs=(g3, h3))
        transcript["branch"] = "direct"
    else:
        transcript["branch"] = "witness-copies"
        all_affine = all(detect_properties(c).affine for c in cs)
        form_order = ["xor3-paired"] if all_affine \
            else [name for name, _, _ in CANONICAL_FORMS]
        realization = None
        for form_name in form_order:
            _, variables, func = next(
                f for f in CANONICAL_FORMS if f[0] == form_name)
            found_form = realize(cs, func, with_constants=True,
                                 variables=variables)
            if found_form is not None:
                realization = (form_name, found_form)
                break
        if realization is None:
            raise RuntimeError(
                "no canonical form is realizable with constants; this "
                "contradicts the classification of the constraint set")
        form_name, real = realization
        lifted = lift_constants(real)
        i = _FORM_INDEX[form_name]
        left0 = build_sid(i, lifted, g3)
        right0 = build_sid(i, lifted, h3)
        left, right = attach_gadget(case_id, left0, right0, gadget)
        transcript["form"] = form_name
        transcript["form_index"] = i
        transcript["realization"] = _render_apps(real)
    if left.universe != right.universe:
        raise AssertionError("reduction sides ended up with different universes")
    if any(a.has_constants()
           for side in (left, right) for a in side.applications):
        raise AssertionError("reduction output contains constants")
    transcript["variables"] = len(left.universe)
    transcript["applications"] = {"left": len(left.applications),
                                  "right": len(right.applications)}
    return ReductionOutput(
        left=left, right=right,
        constraint_set=tuple(sorted(cs, key=lambda c: c.name)),
        transcript=transcript)
