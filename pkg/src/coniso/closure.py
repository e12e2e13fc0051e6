"""Maximal implicate closures and the realization search built on them.

The closure of an instance set S, relative to a constraint set, a variable
universe and the with-constants / without-duplicates flags, is the set of
all candidate applications that S logically implies.  Tautological
(constant-true) applications are filtered out.

Because any set of applications realizing a target function without
auxiliary variables is a subset of the target's closure, conjoining the
whole closure and comparing against the target decides realizability
exactly; `realize` implements that.

Implication testing picks an engine per call: evaluate candidates against
the enumerated satisfying assignments when those are few enough (with a
grouped bit-mask scan for the common small-support candidates), and fall
back to one complete satisfiability search per falsifying pattern when the
model set is too large to enumerate.
"""

from __future__ import annotations

from itertools import combinations, permutations, product
from typing import Iterable, Optional, Union

from .constraints import Constraint
from .instances import (
    Application,
    BoolFunc,
    GuardExceeded,
    InstanceSet,
    TRUE,
    bool_func,
    instance_set,
    make_sat_checker,
    rename_func,
    satisfiable,
    satisfying_models,
    sort_vars,
)

DEFAULT_MAX_CANDIDATES = 500_000
DEFAULT_MODEL_CAP = 1 << 17
_DIRECT_EVAL_BUDGET = 6_000_000


def _position_symmetries(c: Constraint) -> list[tuple[int, ...]]:
    """Argument permutations that leave the constraint's table unchanged."""
    k = c.arity
    if k > 6:
        return [tuple(range(k))]
    mask = c.mask
    syms = []
    for perm in permutations(range(k)):
        ok = True
        for idx in range(1 << k):
            src = 0
            for newpos, oldpos in enumerate(perm):
                src |= ((idx >> (k - 1 - newpos)) & 1) << (k - 1 - oldpos)
            if (mask >> idx) & 1 != (mask >> src) & 1:
                ok = False
                break
        if ok:
            syms.append(perm)
    return syms


def candidate_applications(cs: Iterable[Constraint],
                           universe: tuple[str, ...],
                           *,
                           with_constants: bool = False,
                           without_duplicates: bool = False,
                           max_candidates: int = DEFAULT_MAX_CANDIDATES
                           ) -> list[Application]:
    """All applications of the constraint set over the universe respecting
    the flags, one representative per denoted function, tautologies and
    constant arguments per the flags.  Deterministic order."""
    pool: list = list(universe)
    if with_constants:
        if without_duplicates:
            raise ValueError("duplicate-free applications exclude constants")
        pool = pool + [0, 1]
    by_func: dict[BoolFunc, Application] = {}
    slot_cache: dict[tuple, BoolFunc] = {}
    total = 0
    for c in sorted(cs, key=lambda c: c.name):
        syms = _position_symmetries(c)
        k = c.arity
        if without_duplicates:
            tuples = combinations(range(len(universe)), k) \
                if len(syms) == _factorial(k) else permutations(
                    range(len(universe)), k)
        else:
            tuples = product(range(len(pool)), repeat=k)
        for t in tuples:
            if len(syms) > 1 and not _orbit_minimal(t, syms):
                continue
            total += 1
            if total > max_candidates:
                raise GuardExceeded(
                    f"candidate application space exceeds {max_candidates}")
            args = tuple(pool[i] for i in t)
            func = _pattern_func(c, args, slot_cache)
            if func == TRUE or func in by_func:
                continue
            by_func[func] = Application(c, args)
    return list(by_func.values())


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def _orbit_minimal(t: tuple[int, ...], syms) -> bool:
    return all(t <= tuple(t[p] for p in perm) for perm in syms)


def _pattern_func(c: Constraint, args: tuple, cache: dict) -> BoolFunc:
    """Denoted function of c(args), via a memoized slot pattern: the
    function shape depends only on which positions repeat or hold
    constants, concrete names enter through a renaming."""
    slot_of: dict[str, int] = {}
    pattern = []
    concrete: list[str] = []
    for a in args:
        if isinstance(a, int):
            pattern.append(("c", a))
        else:
            if a not in slot_of:
                slot_of[a] = len(concrete)
                concrete.append(a)
            pattern.append(("v", slot_of[a]))
    key = (c.name, c.mask, tuple(pattern))
    slot_func = cache.get(key)
    if slot_func is None:
        slot_args = tuple(f"_s{i}" if kind == "v" else i
                          for kind, i in pattern)
        slot_func = Application(c, slot_args).func
        cache[key] = slot_func
    mapping = {f"_s{i}": v for i, v in enumerate(concrete)}
    return rename_func(slot_func, mapping)


def _eval_func_on_model(f: BoolFunc, model: int, pos: dict[str, int],
                        n: int) -> int:
    idx = 0
    for v in f.variables:
        idx = (idx << 1) | ((model >> (n - 1 - pos[v])) & 1)
    return (f.mask >> idx) & 1


def _implied_by_models(models: list[int], universe: tuple[str, ...],
                       candidates: list[Application]) -> list[Application]:
    """Filter candidates down to those satisfied by every model."""
    n = len(universe)
    pos = {v: i for i, v in enumerate(universe)}
    nmodels = len(models)
    small = [c for c in candidates if len(c.func.variables) <= 3]
    large = [c for c in candidates if len(c.func.variables) > 3]
    implied: list[Application] = []

    if large:
        if nmodels * len(large) > _DIRECT_EVAL_BUDGET:
            raise GuardExceeded("model-based implication test over budget")
        for c in large:
            f = c.func
            if all(_eval_func_on_model(f, m, pos, n) for m in models):
                implied.append(c)

    if small:
        if nmodels * len(small) <= _DIRECT_EVAL_BUDGET // 8:
            for c in small:
                f = c.func
                if all(_eval_func_on_model(f, m, pos, n) for m in models):
                    implied.append(c)
        else:
            implied.extend(_implied_small_grouped(models, universe, small))

    order = {id(c): i for i, c in enumerate(candidates)}
    implied.sort(key=lambda c: order[id(c)])
    return implied


def _implied_small_grouped(models: list[int], universe: tuple[str, ...],
                           candidates: list[Application]
                           ) -> list[Application]:
    """Pattern-presence test for candidates with support size <= 3, shared
    across candidates through per-variable model bit-columns."""
    n = len(universe)
    pos = {v: i for i, v in enumerate(universe)}
    nmodels = len(models)
    all_rows = (1 << nmodels) - 1
    col = {}
    for v in universe:
        p = pos[v]
        bits = 0
        for r, m in enumerate(models):
            bits |= ((m >> (n - 1 - p)) & 1) << r
        col[v] = bits

    def presence(support: tuple[str, ...]) -> int:
        """Bitmap over assignment indices of `support` marking which
        patterns occur among the models."""
        width = len(support)
        groups = [all_rows]
        for v in support:
            cv = col[v]
            nxt = []
            for g in groups:
                nxt.append(g & ~cv & all_rows)
                nxt.append(g & cv)
            groups = nxt
        out = 0
        for idx, g in enumerate(groups):
            if g:
                out |= 1 << idx
        return out

    by_support: dict[tuple[str, ...], list[Application]] = {}
    for c in candidates:
        by_support.setdefault(c.func.variables, []).append(c)
    implied = []
    for support, cands in by_support.items():
        pres = presence(support)
        for c in cands:
            if pres & ~c.func.mask == 0:
                implied.append(c)
    return implied


def _implied_by_refutation(source: InstanceSet,
                           candidates: list[Application],
                           node_budget: int) -> list[Application]:
    """One complete satisfiability search per falsifying pattern of each
    candidate: implied means every falsifying pinning is unsatisfiable.
    The search order puts the candidate's support first, so conflicts among
    the pinned variables surface immediately."""
    implied = []
    for c in candidates:
        f = c.func
        s = len(f.variables)
        check = make_sat_checker(source, front=f.variables,
                                 node_budget=node_budget)
        ok = True
        for idx in range(1 << s):
            if (f.mask >> idx) & 1:
                continue
            pins = {v: (idx >> (s - 1 - j)) & 1
                    for j, v in enumerate(f.variables)}
            if check(pins):
                ok = False
                break
        if ok:
            implied.append(c)
    return implied


Source = Union[InstanceSet, BoolFunc]

_AFFINE_MODEL_CAP = 1 << 18


def _source_models(source: Source, universe: tuple[str, ...],
                   model_cap: int) -> Optional[list[int]]:
    if isinstance(source, BoolFunc):
        n = len(universe)
        pos = {v: i for i, v in enumerate(universe)}
        models = []
        for idx in range(1 << n):
            fidx = 0
            for v in source.variables:
                fidx = (fidx << 1) | ((idx >> (n - 1 - pos[v])) & 1)
            if (source.mask >> fidx) & 1:
                models.append(idx)
        return models
    rehoused = InstanceSet(source.applications, universe)
    try:
        from .instances import _affine_models
        models = _affine_models(rehoused, max(model_cap, _AFFINE_MODEL_CAP))
        if models is None:
            models = satisfying_models(rehoused, max_models=model_cap)
        return models
    except GuardExceeded:
        return None


def maximal_closure(cs: Iterable[Constraint],
                    universe: Iterable[str],
                    source: Source,
                    *,
                    with_constants: bool = False,
                    without_duplicates: bool = False,
                    max_vars: int = 20,
                    max_candidates: int = DEFAULT_MAX_CANDIDATES,
                    model_cap: int = DEFAULT_MODEL_CAP,
                    node_budget: int = 2_000_000) -> InstanceSet:
    """The set of all applications of `cs` over `universe` (respecting the
    flags) implied by `source`.  Contains `source`'s consequences within
    the candidate space and is a fixpoint of itself."""
    universe = sort_vars(universe)
    if len(universe) > max_vars:
        raise GuardExceeded(
            f"{len(universe)} variables exceed the closure guard {max_vars}")
    if isinstance(source, InstanceSet):
        missing = {v for a in source.applications for v in a.variables} \
            - set(universe)
        if missing:
            raise ValueError(
                f"source uses variables outside the universe: {sorted(missing)}")
    cs = list(cs)
    candidates = candidate_applications(
        cs, universe, with_constants=with_constants,
        without_duplicates=without_duplicates, max_candidates=max_candidates)
    models = _source_models(source, universe, model_cap)
    if models is not None:
        implied = _implied_by_models(models, universe, candidates)
    else:
        if not isinstance(source, InstanceSet):
            raise GuardExceeded("function source too large to enumerate")
        rehoused = InstanceSet(source.applications, universe)
        implied = _implied_by_refutation(rehoused, candidates, node_budget)
    return InstanceSet(frozenset(implied), universe)


def implies_func(s: InstanceSet, f: BoolFunc, *,
                 node_budget: int = 2_000_000) -> bool:
    """Does the instance set imply the given function?  Complete."""
    missing = set(f.variables) - set(s.universe)
    if missing:
        raise ValueError(f"function uses unknown variables {sorted(missing)}")
    width = len(f.variables)
    for idx in range(1 << width):
        if (f.mask >> idx) & 1:
            continue
        pins = {v: (idx >> (width - 1 - j)) & 1
                for j, v in enumerate(f.variables)}
        if satisfiable(s, pinned=pins, node_budget=node_budget):
            return False
    return True


def realize(cs: Iterable[Constraint],
            target: BoolFunc,
            *,
            with_constants: bool = False,
            variables: Optional[Iterable[str]] = None,
            max_target_vars: int = 8,
            max_candidates: int = DEFAULT_MAX_CANDIDATES
            ) -> Optional[InstanceSet]:
    """Find a set of applications of `cs` over the target's variables whose
    conjunction is equivalent to `target`, or report that none exists.

    Complete for realization without auxiliary variables: any realizing set
    is contained in the target's maximal closure M, so the conjunction of M
    is squeezed between the target and that realization, and comparing it
    with the target decides the question.
    """
    variables = sort_vars(variables if variables is not None
                          else target.variables)
    if set(target.variables) - set(variables):
        raise ValueError("target mentions variables outside the given set")
    if len(variables) > max_target_vars:
        raise GuardExceeded(
            f"realization limited to {max_target_vars} variables")
    closure = maximal_closure(
        cs, variables, target, with_constants=with_constants,
        max_vars=max_target_vars, max_candidates=max_candidates)
    n = len(variables)
    pos = {v: i for i, v in enumerate(variables)}
    tmask = 0
    for idx in range(1 << n):
        fidx = 0
        for v in target.variables:
            fidx = (fidx << 1) | ((idx >> (n - 1 - pos[v])) & 1)
        tmask |= ((target.mask >> fidx) & 1) << idx
    cmask = (1 << (1 << n)) - 1
    for a in closure.applications:
        amask = 0
        for idx in range(1 << n):
            if _eval_func_on_model(a.func, idx, pos, n):
                amask |= 1 << idx
        cmask &= amask
    if cmask == tmask:
        return closure
    return None
