"""Command-line front end.

Subcommands: classify, iso, nf, reduce, realize, preprocess.  Outputs are
deterministic text (or JSON mirroring it field for field).  Exit codes:
0 decision reached, 1 negative decision (NON-ISO or NOT-ISOMORPHIC),
2 usage error, 3 a brute-force guard was exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .affine_nf import normal_form, witness_from_normal_forms
from .constraints import classify_trichotomy, detect_properties
from .closure import realize
from .fileformats import (
    format_instance_file,
    parse_instance_file,
    resolve_constraints,
)
from .graphs import format_graph, parse_graph, preprocess_pair
from .instances import (
    DEFAULT_MAX_PERM_VARS,
    DEFAULT_MAX_VARS,
    GuardExceeded,
    align_universes,
    func_from_callable,
)
from .isosearch import brute_force_iso
from .reduction import (
    CANONICAL_FORMS,
    GADGET_TARGETS,
    reduce_gi_to_iso,
    trivial_nonisomorphic_pair,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_GUARD = 3


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs: subcommand, inputs, guards and
    output switches.  The seed is accepted for reproducibility of any
    future randomized batch mode; all current subcommands are
    deterministic."""

    command: str
    constraints: Optional[str] = None
    inputs: tuple[str, ...] = ()
    max_vars: int = DEFAULT_MAX_VARS
    max_perm_vars: int = DEFAULT_MAX_PERM_VARS
    json_output: bool = False
    force_brute: bool = False
    seed: int = 0
    output_dir: str = "."
    target: Optional[str] = None
    with_constants: bool = False
    emit_trivial_pair: bool = False

    def __post_init__(self):
        if self.max_vars <= 0 or self.max_perm_vars <= 0:
            raise ValueError("guards must be positive")


def _emit(config: RunConfig, text_lines: list[str], payload: dict) -> None:
    if config.json_output:
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        for line in text_lines:
            print(line)


def _load_instance(path: str, cs) -> "InstanceSet":
    with open(path, encoding="utf-8") as fh:
        return parse_instance_file(fh.read(), cs)


def _cmd_classify(config: RunConfig) -> int:
    cs = resolve_constraints(config.constraints)
    verdict = classify_trichotomy(cs.values())
    _emit(config, [verdict.value], {"classification": verdict.value})
    return EXIT_OK


def _cmd_iso(config: RunConfig) -> int:
    cs = resolve_constraints(config.constraints)
    left = _load_instance(config.inputs[0], cs)
    right = _load_instance(config.inputs[1], cs)
    left, right = align_universes(left, right)
    fast = all(detect_properties(c).two_affine for c in cs.values())
    witness = None
    if fast and not config.force_brute:
        nf_left = normal_form(left)
        nf_right = normal_form(right)
        witness = witness_from_normal_forms(nf_left, nf_right, left.universe)
        is_iso = witness is not None
        method = "normal-form"
    else:
        witness = brute_force_iso(left, right,
                                  max_vars=config.max_perm_vars)
        is_iso = witness is not None
        method = "brute-force"
    lines = ["ISO" if is_iso else "NON-ISO"]
    payload = {"verdict": lines[0], "method": method}
    if witness is not None:
        mapping = " ".join(f"{a}->{witness[a]}" for a in left.universe)
        lines.append(f"witness: {mapping}")
        payload["witness"] = dict(witness)
    _emit(config, lines, payload)
    return EXIT_OK if is_iso else EXIT_NEGATIVE


def _format_nf(nf) -> list[str]:
    if nf.unsat:
        return ["UNSAT"]
    classes = " ".join(
        "{" + ",".join(a) + "|" + ",".join(b) + "}" for a, b in nf.classes)
    return [("Z: " + " ".join(nf.zeros)).rstrip(),
            ("O: " + " ".join(nf.ones)).rstrip(),
            ("CLASSES: " + classes).rstrip()]


def _cmd_nf(config: RunConfig) -> int:
    cs = resolve_constraints(config.constraints)
    bad = [c.name for c in cs.values()
           if not detect_properties(c).two_affine]
    if bad:
        raise ValueError(
            f"normal form requires 2-affine constraints; not 2-affine: "
            f"{' '.join(bad)}")
    inst = _load_instance(config.inputs[0], cs)
    nf = normal_form(inst)
    lines = _format_nf(nf)
    payload = {"unsat": nf.unsat}
    if not nf.unsat:
        payload.update({"Z": list(nf.zeros), "O": list(nf.ones),
                        "classes": [[list(a), list(b)]
                                    for a, b in nf.classes]})
    _emit(config, lines, payload)
    return EXIT_OK


def _gadget_target_funcs():
    return {name: (variables, func_from_callable(variables, fn))
            for name, variables, fn, _k, _d in GADGET_TARGETS}


def _cmd_realize(config: RunConfig) -> int:
    cs = resolve_constraints(config.constraints)
    registry = {name: (variables, func)
                for name, variables, func in CANONICAL_FORMS}
    registry.update(_gadget_target_funcs())
    if config.target not in registry:
        known = " ".join(sorted(registry))
        raise ValueError(f"unknown target {config.target!r} (have: {known})")
    variables, func = registry[config.target]
    found = realize(cs.values(), func, with_constants=config.with_constants,
                    variables=variables)
    if found is None:
        _emit(config, ["NONE"], {"realization": None})
        return EXIT_NEGATIVE
    apps = [" ".join([a.constraint.name] + [str(x) for x in a.args])
            for a in found.sorted_applications()]
    _emit(config, apps, {"realization": apps,
                         "variables": list(found.universe)})
    return EXIT_OK


def _cmd_preprocess(config: RunConfig) -> int:
    with open(config.inputs[0], encoding="utf-8") as fh:
        g = parse_graph(fh.read())
    with open(config.inputs[1], encoding="utf-8") as fh:
        h = parse_graph(fh.read())
    pre = preprocess_pair(g, h)
    if pre is None:
        _emit(config, ["NOT-ISOMORPHIC"], {"verdict": "NOT-ISOMORPHIC"})
        return EXIT_NEGATIVE
    g3, h3 = pre
    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "left.graph").write_text(format_graph(g3), encoding="utf-8")
    (outdir / "right.graph").write_text(format_graph(h3), encoding="utf-8")
    lines = [f"vertices: {g3.n}", f"edges: {g3.m}",
             f"written: {outdir / 'left.graph'} {outdir / 'right.graph'}"]
    _emit(config, lines, {"vertices": g3.n, "edges": g3.m,
                          "files": ["left.graph", "right.graph"]})
    return EXIT_OK


def _cmd_reduce(config: RunConfig) -> int:
    cs = resolve_constraints(config.constraints)
    with open(config.inputs[0], encoding="utf-8") as fh:
        g = parse_graph(fh.read())
    with open(config.inputs[1], encoding="utf-8") as fh:
        h = parse_graph(fh.read())
    outdir = Path(config.output_dir)
    out = reduce_gi_to_iso(cs.values(), g, h)
    if out is None:
        lines = ["NOT-ISOMORPHIC (preprocessing counts differ)"]
        payload = {"verdict": "NOT-ISOMORPHIC", "stage": "preprocessing"}
        if config.emit_trivial_pair:
            left, right = trivial_nonisomorphic_pair(cs.values())
            outdir.mkdir(parents=True, exist_ok=True)
            (outdir / "left.inst").write_text(
                format_instance_file(left), encoding="utf-8")
            (outdir / "right.inst").write_text(
                format_instance_file(right), encoding="utf-8")
            lines.append("wrote canonical non-isomorphic pair")
            payload["files"] = ["left.inst", "right.inst"]
        _emit(config, lines, payload)
        return EXIT_NEGATIVE
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "left.inst").write_text(
        format_instance_file(out.left), encoding="utf-8")
    (outdir / "right.inst").write_text(
        format_instance_file(out.right), encoding="utf-8")
    transcript = json.dumps(out.transcript, sort_keys=True, indent=2) + "\n"
    (outdir / "transcript.json").write_text(transcript, encoding="utf-8")
    lines = [
        f"branch: {out.transcript['branch']}",
        f"gadget: {out.transcript['gadget']['target']}",
        f"variables: {out.transcript['variables']}",
        f"written: left.inst right.inst transcript.json in {outdir}",
    ]
    if "form" in out.transcript:
        lines.insert(2, f"form: {out.transcript['form']}")
    _emit(config, lines, out.transcript)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coniso",
        description="Boolean constraint isomorphism: classification, "
                    "decision, normal forms, and reductions from graph "
                    "isomorphism.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, constraints=False, outdir=False):
        if constraints:
            p.add_argument("-c", "--constraints", required=True,
                           help="constraint file, or builtin:name[,name...]")
        p.add_argument("--max-vars", type=int, default=DEFAULT_MAX_VARS,
                       help="equivalence/counting guard")
        p.add_argument("--max-perm-vars", type=int,
                       default=DEFAULT_MAX_PERM_VARS,
                       help="permutation search guard")
        p.add_argument("--json", action="store_true", dest="json_output")
        p.add_argument("--seed", type=int, default=0)
        if outdir:
            p.add_argument("-o", "--output-dir", default=".")

    p = sub.add_parser("classify", help="complexity class of a set")
    common(p, constraints=True)

    p = sub.add_parser("iso", help="decide isomorphism of two instances")
    common(p, constraints=True)
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--force-brute", action="store_true",
                   help="skip the 2-affine fast path")

    p = sub.add_parser("nf", help="print the 2-affine normal form")
    common(p, constraints=True)
    p.add_argument("instance")

    p = sub.add_parser("realize", help="search for a realizing set")
    common(p, constraints=True)
    p.add_argument("--target", required=True)
    p.add_argument("--with-constants", action="store_true")

    p = sub.add_parser("reduce",
                       help="reduce a graph-isomorphism instance")
    common(p, constraints=True, outdir=True)
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--emit-trivial-pair", action="store_true",
                   help="on an early negative answer, still write a "
                            "canonical non-isomorphic instance pair")

    p = sub.add_parser("preprocess", help="preprocess a graph pair")
    common(p, outdir=True)
    p.add_argument("left")
    p.add_argument("right")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    inputs = []
    for attr in ("left", "right", "instance"):
        if hasattr(args, attr):
            inputs.append(getattr(args, attr))
    return RunConfig(
        command=args.command,
        constraints=getattr(args, "constraints", None),
        inputs=tuple(inputs),
        max_vars=args.max_vars,
        max_perm_vars=args.max_perm_vars,
        json_output=args.json_output,
        force_brute=getattr(args, "force_brute", False),
        seed=args.seed,
        output_dir=getattr(args, "output_dir", "."),
        target=getattr(args, "target", None),
        with_constants=getattr(args, "with_constants", False),
        emit_trivial_pair=getattr(args, "emit_trivial_pair", False),
    )


_COMMANDS = {
    "classify": _cmd_classify,
    "iso": _cmd_iso,
    "nf": _cmd_nf,
    "realize": _cmd_realize,
    "reduce": _cmd_reduce,
    "preprocess": _cmd_preprocess,
}


def run(config: RunConfig) -> int:
    """Dispatch one parsed invocation; returns the exit status."""
    try:
        return _COMMANDS[config.command](config)
    except GuardExceeded as e:
        print(f"guard exceeded: {e}", file=sys.stderr)
        return EXIT_GUARD
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    try:
        config = config_from_args(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
