"""Normal form and polynomial-time isomorphism for 2-affine instance sets.

Every application of a 2-affine constraint equals the conjunction of the
width-at-most-2 XOR clauses it implies, read off its own truth table.  All
clauses feed a union-find with parity and forced-value propagation, which
decides satisfiability and yields:

* Z, O - the variables forced to 0 resp. 1,
* parity components among the remaining variables, each split against a
  pivot into an unordered pair of sets (equal side, opposite side); a
  variable in no clause forms the singleton class ({x}, {}).

The normal form determines the instance up to logical equivalence, commutes
with variable permutations, and reduces isomorphism to comparing the sizes
|Z|, |O| and the multiset of unordered class-size pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .constraints import detect_properties
from .instances import (
    Application,
    InstanceSet,
    sort_vars,
    var_key,
)


@dataclass(frozen=True)
class XorClause:
    """An XOR clause over one or two variables: XOR(variables) == rhs.

    (x,), 1 is the positive unary clause x; (x,), 0 forces x false;
    (a, b), 1 is a xor b; (a, b), 0 is the biconditional a <-> b.
    """

    variables: tuple[str, ...]
    rhs: int

    def __post_init__(self):
        if len(self.variables) not in (1, 2):
            raise ValueError("clause width must be 1 or 2")
        if len(self.variables) == 2 \
                and sort_vars(self.variables) != self.variables:
            raise ValueError("binary clause variables must be sorted")
        if self.rhs not in (0, 1):
            raise ValueError("rhs must be a bit")

    def __repr__(self):
        if len(self.variables) == 1:
            v, = self.variables
            return v if self.rhs else f"!{v}"
        a, b = self.variables
        return f"{a}^{b}" if self.rhs else f"{a}=={b}"


def xor_clause(variables: Iterable[str], rhs: int) -> XorClause:
    return XorClause(sort_vars(variables), rhs)


@dataclass(frozen=True)
class AffineNormalForm:
    """Either unsatisfiable, or forced-0 set, forced-1 set, and the parity
    classes as unordered pairs in canonical order."""

    unsat: bool
    zeros: tuple[str, ...] = ()
    ones: tuple[str, ...] = ()
    classes: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...] = ()

    def __post_init__(self):
        if self.unsat:
            if self.zeros or self.ones or self.classes:
                raise ValueError("unsatisfiable form carries no structure")
            return
        seen: set[str] = set()
        for group in (self.zeros, self.ones, *[p for c in self.classes
                                               for p in c]):
            for v in group:
                if v in seen:
                    raise ValueError(f"variable {v} appears twice")
                seen.add(v)
        for a, b in self.classes:
            if not a and not b:
                raise ValueError("empty class")

    def variables(self) -> tuple[str, ...]:
        out = set(self.zeros) | set(self.ones)
        for a, b in self.classes:
            out |= set(a) | set(b)
        return sort_vars(out)

    def signature(self) -> tuple:
        """The isomorphism-deciding data: |Z|, |O|, and the multiset of
        unordered class-size pairs."""
        sizes = sorted((min(len(a), len(b)), max(len(a), len(b)))
                       for a, b in self.classes)
        return (len(self.zeros), len(self.ones), tuple(sizes))

    def evaluate(self, assignment: Mapping[str, int]) -> int:
        """Truth value of the denoted conjunction under an assignment."""
        if self.unsat:
            return 0
        if any(assignment[v] for v in self.zeros):
            return 0
        if not all(assignment[v] for v in self.ones):
            return 0
        for a, b in self.classes:
            side_a = all(assignment[v] for v in a) \
                and not any(assignment[v] for v in b)
            side_b = all(assignment[v] for v in b) \
                and not any(assignment[v] for v in a)
            if not (side_a or side_b):
                return 0
        return 1


UNSAT = AffineNormalForm(unsat=True)


class _ParityDSU:
    """Union-find with edge parities; a sentinel node carries the constant
    0, so forcing a value is a union with the sentinel."""

    ZERO = "\x00zero"

    def __init__(self, variables: Iterable[str]):
        self.parent: dict[str, str] = {self.ZERO: self.ZERO}
        self.parity: dict[str, int] = {self.ZERO: 0}
        for v in variables:
            self.parent[v] = v
            self.parity[v] = 0

    def find(self, x: str) -> tuple[str, int]:
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        p = 0
        for y in reversed(path):
            p ^= self.parity[y]
            self.parent[y] = x
            self.parity[y] = p
        return x, self.parity[path[0]] if path else 0

    def union(self, x: str, y: str, rel: int) -> bool:
        """Assert x xor y == rel; False on contradiction."""
        rx, px = self.find(x)
        ry, py = self.find(y)
        if rx == ry:
            return (px ^ py) == rel
        # keep the sentinel a root so forced values stay readable
        if rx == self.ZERO:
            rx, ry = ry, rx
            px, py = py, px
        self.parent[rx] = ry
        self.parity[rx] = px ^ py ^ rel
        return True

    def forced(self, x: str) -> Optional[int]:
        rx, px = self.find(x)
        rz, pz = self.find(self.ZERO)
        return px ^ pz if rx == rz else None

    def same_component(self, x: str, y: str) -> Optional[int]:
        rx, px = self.find(x)
        ry, py = self.find(y)
        return px ^ py if rx == ry else None


def _require_two_affine(s: InstanceSet) -> None:
    for c in {a.constraint.name: a.constraint
              for a in s.applications}.values():
        if not detect_properties(c).two_affine:
            raise ValueError(f"constraint {c.name} is not 2-affine")


def _clauses_of_application(a: Application) -> Optional[list[XorClause]]:
    """Unary/binary XOR clauses implied by one application, read off its
    truth table; None marks a constant-false application.  For a 2-affine
    application the conjunction of these clauses is the application."""
    f = a.func
    if f.mask == 0:
        return None
    names = f.variables
    width = len(names)
    sat = [i for i in range(1 << width) if (f.mask >> i) & 1]
    clauses = []
    for j, v in enumerate(names):
        bits = {(i >> (width - 1 - j)) & 1 for i in sat}
        if len(bits) == 1:
            clauses.append(XorClause((v,), bits.pop()))
    for j in range(width):
        for jj in range(j + 1, width):
            rels = {((i >> (width - 1 - j)) & 1)
                    ^ ((i >> (width - 1 - jj)) & 1) for i in sat}
            if len(rels) == 1:
                clauses.append(xor_clause((names[j], names[jj]), rels.pop()))
    # sanity: the clauses must pin down the application exactly
    for i in range(1 << width):
        holds = all(
            _clause_value(c, names, width, i) for c in clauses)
        if holds != bool((f.mask >> i) & 1):
            raise ValueError(
                f"application {a!r} is not a conjunction of width-2 XOR "
                "clauses; is its constraint really 2-affine?")
    return clauses


def _clause_value(c: XorClause, names: tuple[str, ...], width: int,
                  idx: int) -> bool:
    acc = 0
    for v in c.variables:
        j = names.index(v)
        acc ^= (idx >> (width - 1 - j)) & 1
    return acc == c.rhs


def _build_dsu(s: InstanceSet) -> Optional[_ParityDSU]:
    _require_two_affine(s)
    dsu = _ParityDSU(s.universe)
    for a in s.sorted_applications():
        clauses = _clauses_of_application(a)
        if clauses is None:
            return None
        for c in clauses:
            if len(c.variables) == 1:
                ok = dsu.union(c.variables[0], _ParityDSU.ZERO, c.rhs)
            else:
                ok = dsu.union(c.variables[0], c.variables[1], c.rhs)
            if not ok:
                return None
    return dsu


def xor_clause_closure(s: InstanceSet) -> Optional[frozenset[XorClause]]:
    """All width-at-most-2 XOR clauses over the universe implied by a
    2-affine instance set, or None if it is unsatisfiable.  Clauses between
    two forced variables are subsumed by the unary ones and left out; the
    reflexive biconditional x <-> x is implicit."""
    dsu = _build_dsu(s)
    if dsu is None:
        return None
    clauses = set()
    unforced = []
    for v in s.universe:
        val = dsu.forced(v)
        if val is None:
            unforced.append(v)
        else:
            clauses.add(XorClause((v,), val))
    for i, v in enumerate(unforced):
        for w in unforced[i + 1:]:
            rel = dsu.same_component(v, w)
            if rel is not None:
                clauses.add(xor_clause((v, w), rel))
    return frozenset(clauses)


def normal_form(s: InstanceSet) -> AffineNormalForm:
    """Canonical normal form of a 2-affine instance set over its universe."""
    dsu = _build_dsu(s)
    if dsu is None:
        return UNSAT
    zeros, ones, rest = [], [], []
    for v in s.universe:
        val = dsu.forced(v)
        if val == 0:
            zeros.append(v)
        elif val == 1:
            ones.append(v)
        else:
            rest.append(v)
    components: dict[str, list[str]] = {}
    for v in rest:
        root, _ = dsu.find(v)
        components.setdefault(root, []).append(v)
    classes = []
    for members in components.values():
        members = sorted(members, key=var_key)
        pivot = members[0]
        same = tuple(v for v in members
                     if dsu.same_component(pivot, v) == 0)
        anti = tuple(v for v in members
                     if dsu.same_component(pivot, v) == 1)
        classes.append((same, anti))
    classes.sort(key=lambda ab: (min(len(ab[0]), len(ab[1])),
                                 max(len(ab[0]), len(ab[1])),
                                 var_key(min(ab[0] + ab[1], key=var_key))))
    return AffineNormalForm(unsat=False, zeros=tuple(zeros),
                            ones=tuple(ones), classes=tuple(classes))


def apply_permutation_to_nf(perm: Mapping[str, str],
                            nf: AffineNormalForm) -> AffineNormalForm:
    """Rename all variables in a normal form and re-canonicalize."""
    if nf.unsat:
        return nf

    def m(group: tuple[str, ...]) -> tuple[str, ...]:
        return sort_vars(perm[v] for v in group)

    classes = []
    for a, b in nf.classes:
        na, nb = m(a), m(b)
        lead_a = min(na, key=var_key) if na else None
        lead_b = min(nb, key=var_key) if nb else None
        if lead_a is None or (lead_b is not None
                              and var_key(lead_b) < var_key(lead_a)):
            na, nb = nb, na
        classes.append((na, nb))
    classes.sort(key=lambda ab: (min(len(ab[0]), len(ab[1])),
                                 max(len(ab[0]), len(ab[1])),
                                 var_key(min(ab[0] + ab[1], key=var_key))))
    return AffineNormalForm(unsat=False, zeros=m(nf.zeros), ones=m(nf.ones),
                            classes=tuple(classes))


def iso_2affine(s: InstanceSet, u: InstanceSet) -> bool:
    """Polynomial-time isomorphism for 2-affine instance sets over a shared
    universe, by comparing normal-form signatures."""
    if s.universe != u.universe:
        raise ValueError("iso_2affine requires a shared universe")
    nfs = normal_form(s)
    nfu = normal_form(u)
    if nfs.unsat or nfu.unsat:
        return nfs.unsat == nfu.unsat
    return nfs.signature() == nfu.signature()


def witness_from_normal_forms(nfs: AffineNormalForm, nfu: AffineNormalForm,
                              universe: tuple[str, ...]) -> Optional[dict]:
    """A permutation mapping one satisfiable normal form onto the other,
    when the signatures agree; None otherwise.  With unsatisfiable inputs
    any permutation works, so the identity is returned."""
    if nfs.unsat and nfu.unsat:
        return {v: v for v in universe}
    if nfs.unsat or nfu.unsat or nfs.signature() != nfu.signature():
        return None
    perm: dict[str, str] = {}

    def assign(src: tuple[str, ...], dst: tuple[str, ...]) -> None:
        for a, b in zip(src, dst):
            perm[a] = b

    assign(nfs.zeros, nfu.zeros)
    assign(nfs.ones, nfu.ones)

    def size_pair(ab):
        return (min(len(ab[0]), len(ab[1])), max(len(ab[0]), len(ab[1])))

    by_sig: dict[tuple, list] = {}
    for cls in nfu.classes:
        by_sig.setdefault(size_pair(cls), []).append(cls)
    for cls in nfs.classes:
        target = by_sig[size_pair(cls)].pop(0)
        a, b = cls
        ta, tb = target
        if (len(a), len(b)) != (len(ta), len(tb)):
            ta, tb = tb, ta
        assign(a, ta)
        assign(b, tb)
    return perm
