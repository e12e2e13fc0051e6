"""Constraint applications and instance sets.

An application is a constraint applied to a tuple of arguments, where an
argument is a variable name (str) or one of the constants 0/1 (int).  The
identity of an application is the Boolean function it denotes on its own
support: OR0(x, y) == OR0(y, x), and an argument position the function does
not depend on does not count as occurring.  Canonicalization computes the
function over the natural-sorted support and minimizes away irrelevant
variables.

An instance set is a finite set of applications (conjunction semantics) over
a variable universe that must contain every occurring variable and may be
larger; unused universe variables matter for isomorphism.

Satisfying assignments are represented as ints over the universe in natural
sort order, first variable most significant.  Enumeration is a backtracking
search with per-application feasibility pruning; instance sets whose
applications are all affine take a GF(2) elimination fast path.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Optional

from .constraints import Constraint, eval_constraint

DEFAULT_MAX_VARS = 20
DEFAULT_MAX_PERM_VARS = 10
DEFAULT_NODE_BUDGET = 20_000_000


class GuardExceeded(RuntimeError):
    """A brute-force guard (variable count, node or size budget) was hit."""


_DIGIT_RUN = re.compile(r"(\d+)")


def var_key(name: str):
    """Natural sort key: digit runs compare numerically, so x2 < x10."""
    return tuple((1, int(p)) if p.isdigit() else (0, p)
                 for p in _DIGIT_RUN.split(name) if p != "")


def sort_vars(names: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(names), key=var_key))


Arg = "str | int"  # a variable name, or the constant 0 or 1


def _check_arg(a) -> None:
    if isinstance(a, bool):
        raise ValueError("use ints 0/1 for constants, not bools")
    if isinstance(a, int):
        if a not in (0, 1):
            raise ValueError(f"constant argument must be 0 or 1, got {a}")
    elif isinstance(a, str):
        if not a or a.isdigit():
            raise ValueError(f"bad variable name {a!r}")
    else:
        raise ValueError(f"argument must be str or 0/1, got {a!r}")


@dataclass(frozen=True)
class BoolFunc:
    """A Boolean function over named variables, support-minimal and with
    variables in natural sort order.  Bit i of mask is the value at
    assignment index i (first variable most significant)."""

    variables: tuple[str, ...]
    mask: int


TRUE = BoolFunc((), 1)
FALSE = BoolFunc((), 0)


def _drop_irrelevant(variables: tuple[str, ...], mask: int) -> BoolFunc:
    s = len(variables)
    keep = list(variables)
    j = 0
    while j < len(keep):
        s = len(keep)
        shift = s - 1 - j  # coordinate j is bit `shift` of the index
        lo = hi = 0
        li = hi_i = 0
        for idx in range(1 << s):
            if (idx >> shift) & 1:
                hi |= ((mask >> idx) & 1) << hi_i
                hi_i += 1
            else:
                lo |= ((mask >> idx) & 1) << li
                li += 1
        if lo == hi:
            keep.pop(j)
            mask = lo
        else:
            j += 1
    return BoolFunc(tuple(keep), mask)


def bool_func(variables: Iterable[str], mask: int) -> BoolFunc:
    """Canonical function: sort variables (permuting the table) and drop
    variables the function does not depend on."""
    variables = tuple(variables)
    order = sorted(range(len(variables)), key=lambda i: var_key(variables[i]))
    svars = tuple(variables[i] for i in order)
    if len(set(svars)) != len(svars):
        raise ValueError("duplicate variable in function support")
    s = len(variables)
    if svars != variables:
        perm_mask = 0
        for idx in range(1 << s):
            src = 0
            for newpos, oldpos in enumerate(order):
                bit = (idx >> (s - 1 - newpos)) & 1
                src |= bit << (s - 1 - oldpos)
            perm_mask |= ((mask >> src) & 1) << idx
        mask = perm_mask
    return _drop_irrelevant(svars, mask)


def func_from_callable(variables: Iterable[str], fn) -> BoolFunc:
    """Build a canonical BoolFunc from a predicate over bit tuples."""
    variables = tuple(variables)
    s = len(variables)
    mask = 0
    for idx in range(1 << s):
        bits = tuple((idx >> (s - 1 - j)) & 1 for j in range(s))
        if fn(*bits):
            mask |= 1 << idx
    return bool_func(variables, mask)


def rename_func(f: BoolFunc, mapping: Mapping[str, str]) -> BoolFunc:
    """Apply a variable renaming (injective on f's support) to a function."""
    new_vars = tuple(mapping.get(v, v) for v in f.variables)
    return bool_func(new_vars, f.mask)


def eval_func(f: BoolFunc, assignment: Mapping[str, int]) -> int:
    idx = 0
    for v in f.variables:
        idx = (idx << 1) | (1 if assignment[v] else 0)
    return (f.mask >> idx) & 1


class Application:
    """A constraint applied to arguments; equality and hashing go by the
    denoted Boolean function, the surface form is kept for printing."""

    __slots__ = ("constraint", "args", "func")

    def __init__(self, constraint: Constraint, args: Iterable):
        args = tuple(args)
        if len(args) != constraint.arity:
            raise ValueError(
                f"{constraint.name} has arity {constraint.arity}, "
                f"got {len(args)} arguments"
            )
        for a in args:
            _check_arg(a)
        object.__setattr__(self, "constraint", constraint)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "func", _app_func(constraint, args))

    def __setattr__(self, *a):  # immutable
        raise AttributeError("Application is immutable")

    @property
    def variables(self) -> tuple[str, ...]:
        """Support of the denoted function (may be smaller than the
        syntactic argument set)."""
        return self.func.variables

    def has_constants(self) -> bool:
        return any(isinstance(a, int) for a in self.args)

    def __eq__(self, other):
        return isinstance(other, Application) and self.func == other.func

    def __hash__(self):
        return hash(self.func)

    def __repr__(self):
        toks = " ".join(str(a) for a in self.args)
        return f"{self.constraint.name}({toks})"


def _app_func(constraint: Constraint, args: tuple) -> BoolFunc:
    occ = sort_vars(a for a in args if isinstance(a, str))
    pos = {v: i for i, v in enumerate(occ)}
    s = len(occ)
    k = constraint.arity
    cmask = constraint.mask
    mask = 0
    for idx in range(1 << s):
        cidx = 0
        for a in args:
            if isinstance(a, str):
                bit = (idx >> (s - 1 - pos[a])) & 1
            else:
                bit = a
            cidx = (cidx << 1) | bit
        mask |= ((cmask >> cidx) & 1) << idx
    return _drop_irrelevant(occ, mask)


@dataclass(frozen=True)
class InstanceSet:
    """A set of applications with conjunction semantics over a universe."""

    applications: frozenset[Application]
    universe: tuple[str, ...]

    def __post_init__(self):
        occurring = set()
        for a in self.applications:
            occurring.update(a.variables)
        missing = occurring - set(self.universe)
        if missing:
            raise ValueError(f"universe is missing variables {sorted(missing)}")
        if self.universe != sort_vars(self.universe):
            raise ValueError("universe must be natural-sorted and duplicate-free")

    def sorted_applications(self) -> list[Application]:
        return sorted(self.applications,
                      key=lambda a: (a.constraint.name,
                                     tuple(str(x) for x in a.args)))

    def constraints(self) -> list[Constraint]:
        seen = {}
        for a in self.applications:
            seen.setdefault(a.constraint.name, a.constraint)
        return [seen[n] for n in sorted(seen)]

    def __repr__(self):
        apps = ", ".join(repr(a) for a in self.sorted_applications())
        return f"InstanceSet({{{apps}}}, X={list(self.universe)})"


def instance_set(apps: Iterable[Application],
                 universe: Iterable[str] = ()) -> InstanceSet:
    """Build an instance set; the universe is the natural-sorted union of
    the given variables and everything occurring in the applications."""
    apps = list(apps)
    names = set(universe)
    for a in apps:
        names.update(a.variables)
    return InstanceSet(frozenset(apps), sort_vars(names))


def apply_permutation(perm: Mapping[str, str], s: InstanceSet) -> InstanceSet:
    """Replace every variable x by perm[x], simultaneously."""
    dom = set(perm)
    if dom != set(s.universe) or set(perm.values()) != set(s.universe):
        raise ValueError("permutation must be a bijection on the universe")
    new_apps = []
    for a in s.applications:
        new_args = tuple(perm[x] if isinstance(x, str) else x for x in a.args)
        new_apps.append(Application(a.constraint, new_args))
    return InstanceSet(frozenset(new_apps), s.universe)


def substitute(s: InstanceSet, binding: Mapping[str, int]) -> InstanceSet:
    """Pin variables to constants.  Applications that become constant-true
    are dropped; constant-false ones are kept as explicit falsum markers.
    The bound variables leave the universe."""
    extra = set(binding) - set(s.universe)
    if extra:
        raise ValueError(f"binding mentions unknown variables {sorted(extra)}")
    for v, b in binding.items():
        if b not in (0, 1):
            raise ValueError(f"binding value for {v} must be 0/1")
    new_apps = []
    for a in s.applications:
        new_args = tuple(binding.get(x, x) if isinstance(x, str) else x
                         for x in a.args)
        na = Application(a.constraint, new_args)
        if na.func == TRUE:
            continue
        new_apps.append(na)
    universe = tuple(v for v in s.universe if v not in binding)
    return InstanceSet(frozenset(new_apps), universe)


# ---------------------------------------------------------------------------
# Model enumeration
# ---------------------------------------------------------------------------

class _Compiled:
    """Instance compiled to positional form for the backtracking search.

    For each application we precompute, per prefix length j, the set of
    feasible index prefixes, so a partial assignment is rejected as soon as
    no completion of the application's own support can satisfy it.
    """

    def __init__(self, s: InstanceSet, variables: tuple[str, ...]):
        self.variables = variables
        pos = {v: i for i, v in enumerate(variables)}
        self.n = len(variables)
        self.unsat = False
        self.touch: list[list[tuple[int, int, frozenset]]] = \
            [[] for _ in range(self.n)]
        self.apps = []
        seen = set()
        for a in sorted(s.applications, key=lambda a: (a.constraint.name,
                                                       str(a.args))):
            f = a.func
            if f in seen:
                continue
            seen.add(f)
            if f == TRUE:
                continue
            if f.mask == 0:
                self.unsat = True
                continue
            positions = tuple(pos[v] for v in f.variables)
            arity = len(positions)
            # the prefix machinery needs the support in search order, so
            # sort the positions and remap the table coordinates to match
            by_pos = sorted(range(arity), key=lambda j: positions[j])
            mask = f.mask
            if by_pos != list(range(arity)):
                remapped = 0
                for idx in range(1 << arity):
                    src = 0
                    for newpos, oldpos in enumerate(by_pos):
                        src |= ((idx >> (arity - 1 - newpos)) & 1) \
                            << (arity - 1 - oldpos)
                    remapped |= ((mask >> src) & 1) << idx
                mask = remapped
                positions = tuple(positions[j] for j in by_pos)
            app_id = len(self.apps)
            self.apps.append((positions, mask, arity))
            # feasible prefixes at each depth of the app's own support
            sat_idx = [i for i in range(1 << arity) if (mask >> i) & 1]
            for j in range(1, arity + 1):
                feas = frozenset(i >> (arity - j) for i in sat_idx)
                self.touch[positions[j - 1]].append((app_id, j, feas))


def _backtrack(c: _Compiled, pinned: dict[int, int],
               max_models: Optional[int], node_budget: int,
               first_only: bool, count_only: bool):
    """DFS over variables in order; returns (models, count) where models is
    None in count_only mode.  Raises GuardExceeded on budget/cap hits."""
    if c.unsat:
        return ([] if not count_only else None), 0
    n = c.n
    cur = [0] * len(c.apps)
    models: Optional[list[int]] = None if count_only else []
    count = 0
    nodes = 0

    def rec(depth: int, acc: int):
        nonlocal count, nodes
        if depth == n:
            count += 1
            if models is not None:
                if max_models is not None and count > max_models:
                    raise GuardExceeded(
                        f"more than {max_models} satisfying assignments")
                models.append(acc)
            return first_only
        choices = (pinned[depth],) if depth in pinned else (0, 1)
        for v in choices:
            nodes += 1
            if nodes > node_budget:
                raise GuardExceeded("search node budget exceeded")
            ok = True
            touched = []
            for app_id, j, feas in c.touch[depth]:
                newpref = (cur[app_id] << 1) | v
                touched.append(app_id)
                cur[app_id] = newpref
                if newpref not in feas:
                    ok = False
                    break
            if ok and rec(depth + 1, (acc << 1) | v):
                return True
            for app_id in touched:
                cur[app_id] >>= 1
        return False

    rec(0, 0)
    return models, count


def _gf2_solve(rows: list[int], n: int):
    """Solve a GF(2) system given as ints: coefficient of variable column c
    at bit (n - c), right-hand side at bit 0.  Returns (particular solution,
    nullspace basis) as n-bit model masks, or None if inconsistent."""
    pivots: dict[int, int] = {}
    for row in rows:
        for col in range(n):
            if not row & (1 << (n - col)):
                continue
            if col in pivots:
                row ^= pivots[col]
            else:
                pivots[col] = row
                break
        else:
            if row & 1:
                return None
    cols = sorted(pivots)
    for i in reversed(range(len(cols))):
        c0 = cols[i]
        for c1 in cols[:i]:
            if pivots[c1] & (1 << (n - c0)):
                pivots[c1] ^= pivots[c0]
    particular = 0
    for c, row in pivots.items():
        if row & 1:
            particular |= 1 << (n - 1 - c)
    basis = []
    for fcol in (c for c in range(n) if c not in pivots):
        vec = 1 << (n - 1 - fcol)
        for c, row in pivots.items():
            if row & (1 << (n - fcol)):
                vec |= 1 << (n - 1 - c)
        basis.append(vec)
    return particular, basis


def _affine_equations(f: BoolFunc) -> Optional[list[tuple[int, int]]]:
    """If f's satisfying set is an affine subspace, return its defining
    equations as (coefficient mask over f's index bits, rhs) pairs; None if
    f is not affine.  Callers handle the empty satisfying set separately."""
    s = len(f.variables)
    sat = [i for i in range(1 << s) if (f.mask >> i) & 1]
    if not sat:
        return None
    p0 = sat[0]
    # greedy XOR basis of the difference vectors
    basis: list[int] = []
    for p in sat[1:]:
        vec = p ^ p0
        for b in basis:
            vec = min(vec, vec ^ b)
        if vec:
            basis.append(vec)
    if len(sat) != 1 << len(basis):
        return None
    # reduced row echelon form, then read off the kernel per free column
    rref = sorted(basis, reverse=True)
    for i in range(len(rref)):
        top = rref[i].bit_length() - 1
        for j in range(len(rref)):
            if j != i and (rref[j] >> top) & 1:
                rref[j] ^= rref[i]
    rref.sort(reverse=True)
    pivot_bits = [r.bit_length() - 1 for r in rref]
    eqs = []
    for fb in (b for b in range(s) if b not in pivot_bits):
        w = 1 << fb
        for r, pb in zip(rref, pivot_bits):
            if (r >> fb) & 1:
                w |= 1 << pb
        eqs.append((w, (w & p0).bit_count() & 1))
    return eqs


_AFFINE_DIM_CAP = 30


def _affine_models(s: InstanceSet, max_models: Optional[int]):
    """GF(2) fast path: if every application is affine, enumerate all
    models by Gray-coding the solution space.  Returns None if some
    application is not affine; raises GuardExceeded past the cap."""
    n = len(s.universe)
    pos = {v: i for i, v in enumerate(s.universe)}
    rows = []
    for a in s.sorted_applications():
        f = a.func
        if f == TRUE:
            continue
        if f.mask == 0:
            return []
        eqs = _affine_equations(f)
        if eqs is None:
            return None
        sf = len(f.variables)
        for w, rhs in eqs:
            row = rhs
            for j in range(sf):
                if (w >> (sf - 1 - j)) & 1:
                    row |= 1 << (n - pos[f.variables[j]])
            rows.append(row)
    solved = _gf2_solve(rows, n)
    if solved is None:
        return []
    particular, basis = solved
    dim = len(basis)
    if dim > _AFFINE_DIM_CAP or (max_models is not None
                                 and (1 << dim) > max_models):
        raise GuardExceeded(
            f"affine solution space has 2**{dim} models, over the cap")
    models = [particular]
    cur = particular
    for g in range(1, 1 << dim):
        cur ^= basis[(g & -g).bit_length() - 1]
        models.append(cur)
    return models


def satisfying_models(s: InstanceSet, *,
                      max_models: Optional[int] = None,
                      node_budget: int = DEFAULT_NODE_BUDGET,
                      pinned: Optional[Mapping[str, int]] = None
                      ) -> list[int]:
    """All satisfying assignments as ints over the universe (first variable
    most significant).  Tries the affine fast path first, then backtracking."""
    if pinned is None:
        aff = _affine_models(s, max_models)
        if aff is not None:
            if max_models is not None and len(aff) > max_models:
                raise GuardExceeded(
                    f"more than {max_models} satisfying assignments")
            return aff
    pin_idx = {}
    if pinned:
        pos = {v: i for i, v in enumerate(s.universe)}
        for v, b in pinned.items():
            pin_idx[pos[v]] = b
    c = _Compiled(s, s.universe)
    models, _ = _backtrack(c, pin_idx, max_models, node_budget,
                           first_only=False, count_only=False)
    return models


def make_sat_checker(s: InstanceSet, *, front: tuple[str, ...] = (),
                     node_budget: int = DEFAULT_NODE_BUDGET):
    """Compile the instance once and return a complete satisfiability
    predicate over pinned partial assignments.  Variables in `front` are
    searched first; putting the pinned variables there surfaces their
    conflicts near the root."""
    rest = tuple(v for v in s.universe if v not in set(front))
    order = tuple(front) + rest
    c = _Compiled(s, order)
    pos = {v: i for i, v in enumerate(order)}

    def check(pinned: Optional[Mapping[str, int]] = None) -> bool:
        pin_idx = {pos[v]: b for v, b in (pinned or {}).items()}
        _, count = _backtrack(c, pin_idx, None, node_budget,
                              first_only=True, count_only=True)
        return count > 0

    return check


def satisfiable(s: InstanceSet, *,
                pinned: Optional[Mapping[str, int]] = None,
                node_budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """Complete satisfiability check (backtracking with pruning)."""
    return make_sat_checker(s, node_budget=node_budget)(pinned)


def is_affine_instance(s: InstanceSet) -> bool:
    """True when every application denotes an affine function, i.e. the
    instance is a system of XOR equations."""
    return all(a.func.mask == 0 or _affine_equations(a.func) is not None
               for a in s.applications)


def count_sat(s: InstanceSet, max_vars: int = DEFAULT_MAX_VARS) -> int:
    """Exact number of assignments to the whole universe satisfying every
    application.  Unused universe variables double the count."""
    n = len(s.universe)
    if n > max_vars:
        raise GuardExceeded(f"{n} variables exceed the counting guard {max_vars}")
    occurring = set()
    for a in s.applications:
        occurring.update(a.variables)
    occ = tuple(v for v in s.universe if v in occurring)
    free = n - len(occ)
    c = _Compiled(s, occ)
    _, count = _backtrack(c, {}, None, DEFAULT_NODE_BUDGET,
                          first_only=False, count_only=True)
    return count << free


def equivalent(s: InstanceSet, u: InstanceSet,
               max_vars: int = DEFAULT_MAX_VARS) -> bool:
    """Logical equivalence over a shared universe."""
    if s.universe != u.universe:
        raise ValueError("equivalence requires identical universes")
    n = len(s.universe)
    if n > max_vars:
        raise GuardExceeded(f"{n} variables exceed the guard {max_vars}")
    ms = satisfying_models(s)
    mu = satisfying_models(u)
    return sorted(ms) == sorted(mu)


def conjunction_func(s: InstanceSet) -> BoolFunc:
    """The denoted function of the whole instance over its occurring
    variables (not the universe); small instances only."""
    occurring = set()
    for a in s.applications:
        occurring.update(a.variables)
    occ = sort_vars(occurring)
    if len(occ) > 16:
        raise GuardExceeded("conjunction function limited to 16 variables")
    mask = 0
    restricted = instance_set(s.applications, occ)
    for m in satisfying_models(restricted):
        mask |= 1 << m
    return bool_func(occ, mask)


def align_universes(s: InstanceSet, u: InstanceSet
                    ) -> tuple[InstanceSet, InstanceSet]:
    """Re-house both instance sets over the union of their universes."""
    universe = sort_vars(set(s.universe) | set(u.universe))
    return (InstanceSet(s.applications, universe),
            InstanceSet(u.applications, universe))
