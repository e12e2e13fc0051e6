"""Brute-force isomorphism of instance sets.

Two search strategies, both sound and complete, picked automatically:

* Model matching.  A permutation pi makes S equivalent to U exactly when
  permuting the columns of S's satisfying-assignment matrix by pi yields
  U's matrix as a row set.  We search variable images in natural order with
  partition refinement over the model rows (bit-mask blocks), so pruning is
  by satisfying counts and per-variable occurrence statistics of the model
  sets.  The first leaf reached is the lexicographically least witness.

* Closure matching, for instances whose model sets are too large to
  enumerate.  Both sides are replaced by their maximal closures over the
  occurring constraints; for closures, pi(S) equivalent to U holds exactly
  when pi maps the closure of S onto the closure of U as a set (closures
  are renaming-equivariant and determined by semantics), so the search is a
  backtracking match of application sets guided by renaming-invariant
  per-variable signatures.  A found map is verified by syntactic set
  equality before being returned.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations
from typing import Iterable, Optional

from .constraints import Constraint
from .instances import (
    Application,
    BoolFunc,
    DEFAULT_MAX_PERM_VARS,
    GuardExceeded,
    InstanceSet,
    _affine_models,
    bool_func,
    is_affine_instance,
    rename_func,
    satisfying_models,
    sort_vars,
    var_key,
)
from .closure import maximal_closure

_DFS_MODEL_CAP = 1 << 14
_AFFINE_MODEL_CAP = 1 << 18
_CLOSURE_CANDIDATE_CAP = 600_000
_SEARCH_NODE_BUDGET = 3_000_000
_MODEL_MATCH_BUDGET = 400_000


@lru_cache(maxsize=256)
def _col_profile(inst: InstanceSet) -> Optional[tuple[int, tuple[int, ...]]]:
    """Satisfying assignments of an instance as per-variable bit columns
    (bit r of column j = value of variable j in the r-th model), or None
    when the model set is too large to enumerate.  Cached: the acceptance
    sweeps compare each instance against many partners."""
    try:
        models = _affine_models(inst, _AFFINE_MODEL_CAP)
        if models is None:
            models = satisfying_models(inst, max_models=_DFS_MODEL_CAP)
    except GuardExceeded:
        return None
    n = len(inst.universe)
    cols = [0] * n
    for r, m in enumerate(models):
        bit = 1 << r
        for j in range(n):
            if (m >> (n - 1 - j)) & 1:
                cols[j] |= bit
    return len(models), tuple(cols)


def _match_model_columns(profile_s, profile_u, n: int) -> Optional[list[int]]:
    """Column permutation mapping one model matrix onto the other as a row
    set, as a list image[j] = column of U for column j of S; None if there
    is none.  Lexicographically least in image order."""
    rows, cols_s = profile_s
    rows_u, cols_u = profile_u
    if rows != rows_u:
        return None
    if rows == 0:
        return list(range(n))
    full = (1 << rows) - 1
    weights_u: dict[int, list[int]] = {}
    for j, c in enumerate(cols_u):
        weights_u.setdefault(c.bit_count(), []).append(j)
    for j, c in enumerate(cols_s):
        if c.bit_count() not in weights_u:
            return None

    nodes = 0

    def rec(depth: int, used: int, blocks: list[tuple[int, int]]
            ) -> Optional[list[int]]:
        nonlocal nodes
        if depth == n:
            return []
        cs = cols_s[depth]
        for u in weights_u.get(cs.bit_count(), ()):
            if (used >> u) & 1:
                continue
            nodes += 1
            if nodes > _MODEL_MATCH_BUDGET:
                raise GuardExceeded("model matching budget exceeded")
            cu = cols_u[u]
            new_blocks = []
            ok = True
            for bs, bu in blocks:
                b1s = bs & cs
                b1u = bu & cu
                if b1s.bit_count() != b1u.bit_count():
                    ok = False
                    break
                b0s = bs ^ b1s
                if b1s:
                    new_blocks.append((b1s, b1u))
                if b0s:
                    new_blocks.append((b0s, bu ^ b1u))
            if not ok:
                continue
            tail = rec(depth + 1, used | (1 << u), new_blocks)
            if tail is not None:
                return [u] + tail
        return None

    return rec(0, 0, [(full, full)])


# --- closure matching -------------------------------------------------------


def _func_class(f: BoolFunc) -> tuple[int, int]:
    """Renaming-invariant key of a function: support size and the minimum
    table over all orderings of the support."""
    s = len(f.variables)
    if s <= 1:
        return (s, f.mask)
    best = None
    for perm in permutations(range(s)):
        pm = 0
        for idx in range(1 << s):
            src = 0
            for newpos, oldpos in enumerate(perm):
                src |= ((idx >> (s - 1 - newpos)) & 1) << (s - 1 - oldpos)
            pm |= ((f.mask >> src) & 1) << idx
        if best is None or pm < best:
            best = pm
    return (s, best)


def _role_key(f: BoolFunc, position: int) -> int:
    """Renaming-invariant role of one support position: the minimum table
    over orderings that keep this position first."""
    s = len(f.variables)
    if s == 1:
        return f.mask
    best = None
    others = [p for p in range(s) if p != position]
    for rest in permutations(others):
        perm = (position,) + rest
        pm = 0
        for idx in range(1 << s):
            src = 0
            for newpos, oldpos in enumerate(perm):
                src |= ((idx >> (s - 1 - newpos)) & 1) << (s - 1 - oldpos)
            pm |= ((f.mask >> src) & 1) << idx
        if best is None or pm < best:
            best = pm
    return best


def _match_closures(ms: InstanceSet, mu: InstanceSet) -> Optional[dict]:
    """Backtracking search for pi with pi(ms) = mu as application sets."""
    if len(ms.applications) != len(mu.applications):
        return None
    universe = ms.universe
    n = len(universe)
    funcs_s = sorted((a.func for a in ms.applications),
                     key=lambda f: (len(f.variables), f.mask, f.variables))
    funcs_u = {a.func for a in mu.applications}

    class_cache: dict[tuple, tuple] = {}
    role_cache: dict[tuple, int] = {}

    def fclass(f: BoolFunc):
        key = (len(f.variables), f.mask)
        if key not in class_cache:
            class_cache[key] = _func_class(f)
        return class_cache[key]

    def frole(f: BoolFunc, p: int):
        key = (len(f.variables), f.mask, p)
        if key not in role_cache:
            role_cache[key] = _role_key(f, p)
        return role_cache[key]

    def signature(inst: InstanceSet) -> dict[str, tuple]:
        sig: dict[str, list] = {v: [] for v in inst.universe}
        for a in inst.applications:
            f = a.func
            cls = fclass(f)
            for p, v in enumerate(f.variables):
                sig[v].append((cls, frole(f, p)))
        return {v: tuple(sorted(s)) for v, s in sig.items()}

    sig_s = signature(ms)
    sig_u = signature(mu)
    if sorted(sig_s.values()) != sorted(sig_u.values()):
        return None
    candidates = {x: sorted((u for u in universe if sig_u[u] == sig_s[x]),
                            key=var_key)
                  for x in universe}

    # applications become checkable once all their variables are mapped;
    # group them by their latest variable in search order
    order = list(universe)
    pos = {v: i for i, v in enumerate(order)}
    due: list[list[BoolFunc]] = [[] for _ in range(n)]
    for f in funcs_s:
        if f.variables:
            due[max(pos[v] for v in f.variables)].append(f)
        elif f not in funcs_u:
            return None

    nodes = 0
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def rec(depth: int) -> bool:
        nonlocal nodes
        if depth == n:
            return True
        x = order[depth]
        for u in candidates[x]:
            if u in used:
                continue
            nodes += 1
            if nodes > _SEARCH_NODE_BUDGET:
                raise GuardExceeded("isomorphism search budget exceeded")
            mapping[x] = u
            used.add(u)
            if all(rename_func(f, mapping) in funcs_u for f in due[depth]) \
                    and rec(depth + 1):
                return True
            del mapping[x]
            used.discard(u)
        return False

    if not rec(0):
        return None
    image = {rename_func(f, mapping) for f in funcs_s}
    if image != funcs_u:  # defensive; the leaf checks should guarantee it
        return None
    return dict(mapping)


@lru_cache(maxsize=128)
def _closure_of(inst: InstanceSet, cs_key: tuple,
                with_constants: bool) -> InstanceSet:
    cs = [Constraint(name, arity, table) for name, arity, table in cs_key]
    return maximal_closure(cs, inst.universe, inst,
                           with_constants=with_constants,
                           max_vars=len(inst.universe),
                           max_candidates=_CLOSURE_CANDIDATE_CAP,
                           model_cap=_DFS_MODEL_CAP)


def brute_force_iso(s: InstanceSet, u: InstanceSet, *,
                    max_vars: int = DEFAULT_MAX_PERM_VARS) -> Optional[dict]:
    """Some permutation pi of the shared universe with pi(s) equivalent to
    u, or None.  The returned witness is the lexicographically least one
    under the model-matching strategy."""
    if s.universe != u.universe:
        raise ValueError("brute_force_iso requires a shared universe")
    universe = s.universe
    n = len(universe)
    if n > max_vars:
        raise GuardExceeded(
            f"{n} variables exceed the permutation guard {max_vars}")
    # XOR-system model sets are unions of cosets and give the refinement
    # nothing to cut on; their clause closures are the useful invariant
    prefer_closures = n > 12 and is_affine_instance(s) \
        and is_affine_instance(u)
    if not prefer_closures:
        profile_s = _col_profile(s)
        profile_u = _col_profile(u)
        if profile_s is not None and profile_u is not None:
            try:
                image = _match_model_columns(profile_s, profile_u, n)
                if image is None:
                    return None
                return {universe[j]: universe[image[j]] for j in range(n)}
            except GuardExceeded:
                pass  # refinement stalled; retry on closures below

    # match maximal closures instead (renaming-equivariant and determined
    # by semantics, so set equality of closures characterizes isomorphism)
    cs = {c.name: c for c in s.constraints()}
    for c in u.constraints():
        if c.name in cs and cs[c.name].table != c.table:
            raise ValueError(f"conflicting definitions of {c.name}")
        cs.setdefault(c.name, c)
    cs_key = tuple(sorted((c.name, c.arity, c.table) for c in cs.values()))
    with_constants = any(a.has_constants()
                         for inst in (s, u) for a in inst.applications)
    ms = _closure_of(s, cs_key, with_constants)
    mu = _closure_of(u, cs_key, with_constants)
    return _match_closures(ms, mu)
