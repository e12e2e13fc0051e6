"""Line-oriented text formats for constraints and instance sets.

Constraint files: one constraint per line, `name arity bits`, where bits
is a 0/1 string of length 2**arity in the fixed index order (first
argument most significant).  Instance files: a `vars` header naming the
universe, then one `apply <constraint> <arg>...` line per application,
where an argument is a variable token or the constant 0 or 1.  Printing
is canonical, so parse-print round-trips are exact.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .constraints import BUILTINS, Constraint, constraint_from_bits
from .instances import Application, InstanceSet, instance_set, sort_vars


def parse_constraint_file(text: str) -> dict[str, Constraint]:
    """Ordered name -> constraint map; duplicate names are rejected."""
    out: dict[str, Constraint] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if len(toks) != 3:
            raise ValueError(
                f"line {lineno}: expected `name arity bits`, got {line!r}")
        name, arity_tok, bits = toks
        if name in out:
            raise ValueError(f"line {lineno}: duplicate constraint {name!r}")
        try:
            arity = int(arity_tok)
        except ValueError:
            raise ValueError(f"line {lineno}: bad arity {arity_tok!r}")
        try:
            out[name] = constraint_from_bits(name, arity, bits)
        except ValueError as e:
            raise ValueError(f"line {lineno}: {e}")
    return out


def format_constraint_file(cs: Iterable[Constraint]) -> str:
    lines = [f"{c.name} {c.arity} {c.bits}" for c in cs]
    return "\n".join(lines) + "\n" if lines else ""


def resolve_constraints(spec: str) -> dict[str, Constraint]:
    """`builtin:name[,name...]` or a path to a constraint file."""
    if spec.startswith("builtin:"):
        out = {}
        for name in spec[len("builtin:"):].split(","):
            name = name.strip()
            if name not in BUILTINS:
                known = " ".join(sorted(BUILTINS))
                raise ValueError(f"unknown builtin {name!r} (have: {known})")
            out[name] = BUILTINS[name]
        if not out:
            raise ValueError("empty builtin constraint list")
        return out
    with open(spec, encoding="utf-8") as fh:
        return parse_constraint_file(fh.read())


def parse_instance_file(text: str,
                        cs: Mapping[str, Constraint]) -> InstanceSet:
    """`vars` header plus `apply` lines; the universe is the declared
    variable list joined with everything that occurs."""
    declared: list[str] = []
    seen_header = False
    apps: list[Application] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if toks[0] == "vars":
            if seen_header:
                raise ValueError(f"line {lineno}: duplicate vars header")
            seen_header = True
            declared = toks[1:]
            for v in declared:
                if v.isdigit():
                    raise ValueError(
                        f"line {lineno}: numeric variable name {v!r}")
        elif toks[0] == "apply":
            if not seen_header:
                raise ValueError(f"line {lineno}: apply before vars header")
            if len(toks) < 2:
                raise ValueError(f"line {lineno}: missing constraint name")
            name = toks[1]
            if name not in cs:
                raise ValueError(f"line {lineno}: unknown constraint {name!r}")
            c = cs[name]
            raw_args = toks[2:]
            if len(raw_args) != c.arity:
                raise ValueError(
                    f"line {lineno}: {name} takes {c.arity} arguments, "
                    f"got {len(raw_args)}")
            args = tuple(int(a) if a in ("0", "1") else a for a in raw_args)
            try:
                apps.append(Application(c, args))
            except ValueError as e:
                raise ValueError(f"line {lineno}: {e}")
        else:
            raise ValueError(f"line {lineno}: unknown record {toks[0]!r}")
    if not seen_header:
        raise ValueError("missing `vars` header")
    return instance_set(apps, declared)


def format_instance_file(s: InstanceSet) -> str:
    lines = ["vars " + " ".join(s.universe) if s.universe else "vars"]
    for a in s.sorted_applications():
        lines.append("apply " + a.constraint.name + "".join(
            f" {x}" for x in a.args))
    return "\n".join(lines) + "\n"
