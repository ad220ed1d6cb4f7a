"""Command-line interface.

Commands
--------
decompose GROUP REP          print the isotypic structure of a representation
blockdiag SDP GROUP REP      rewrite invariant SDP data into per-component blocks
verify GROUP REP BASIS       re-check an emitted change-of-basis file
sample-group SPEC COUNT      draw group elements (diagnostics)

One ``--seed`` determines every random draw a command makes; the seed is
split into independent labeled substreams per pipeline stage, so e.g. the
two commutant samples the decomposer compares are never correlated.
Every value flag can also be set through an environment variable with the
``REPBLOCK_`` prefix (``REPBLOCK_SEED``, ``REPBLOCK_NU``, ...); explicit
flags win over the environment.

Exit codes: 0 success, 2 spec/parse error, 3 decomposition failure,
4 invariance check failure, 5 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path

import numpy as np

from .commutant import ProjectionConfig, ProjectionError
from .decompose import (DecomposeConfig, DecompositionError, decompose,
                        verify_decomposition)
from .formats import (SpecFormatError, format_basis, format_sdp, parse_basis,
                      parse_group_spec, parse_inline_group, parse_rep_spec,
                      parse_sdp)
from .perm import PermutationGroup
from .sdp import NotInvariantError, SdpProblem, block_diagonalize_sdp

ENV_PREFIX = "REPBLOCK_"
SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_DECOMPOSE = 3
EXIT_INVARIANCE = 4
EXIT_VERIFY = 5

_INLINE_GROUP = re.compile(r"^(unitary|orthogonal):\d+$")


def _env(name, default, cast=str):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise SpecFormatError(f"invalid {ENV_PREFIX}{name}={raw!r}")


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=_env("SEED", 0, int),
                        help="seed for all randomized behavior (default 0)")
    common.add_argument("--field", choices=["real", "complex"],
                        default=_env("FIELD", "complex"),
                        help="scalar field of the representation (default complex)")
    common.add_argument("--nu", type=int, default=_env("NU", 1000, int),
                        help="averaging rounds for compact-group projection")
    common.add_argument("--set-size", type=int, default=_env("SET_SIZE", 3, int),
                        help="Haar sample set size per averaging round")
    common.add_argument("--commutation-tol", type=float,
                        default=_env("COMMUTATION_TOL", 1e-8, float),
                        help="commutation residual target for compact projection")
    common.add_argument("--tol", type=float, default=_env("TOL", None, float),
                        help="verification / invariance tolerance override")
    common.add_argument("--format", choices=["text", "structured"],
                        default=_env("FORMAT", "text"),
                        help="output format (structured = versioned JSON)")
    common.add_argument("--threads", type=int, default=_env("THREADS", 1, int),
                        help="worker threads for independent matrix work")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(
        prog="repblock",
        description="decompose representations and block-diagonalize invariant SDPs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", parents=[common],
                       help="decompose a representation into isotypic components")
    p.add_argument("group_spec", help="group spec file")
    p.add_argument("rep_spec", help="representation spec file")
    p.add_argument("--emit-basis", metavar="PATH", default=None,
                   help="write the change-of-basis matrix to PATH")

    p = sub.add_parser("blockdiag", parents=[common],
                       help="block-diagonalize invariant SDP data")
    p.add_argument("sdp", help="SDP data file")
    p.add_argument("group_spec")
    p.add_argument("rep_spec")
    p.add_argument("--symmetrize", action="store_true",
                   default=bool(int(_env("SYMMETRIZE", "0"))),
                   help="group-average the data before extraction")
    p.add_argument("--out", metavar="DIR", default=None,
                   help="output directory (default: <sdp>.blocks)")

    p = sub.add_parser("verify", parents=[common],
                       help="verify an emitted basis against its representation")
    p.add_argument("group_spec")
    p.add_argument("rep_spec")
    p.add_argument("basis", help="basis file written by decompose --emit-basis")
    p.add_argument("--trials", type=int, default=50)

    p = sub.add_parser("sample-group", parents=[common],
                       help="sample group elements")
    p.add_argument("spec", help="group spec file, or inline 'unitary:<d>' / 'orthogonal:<d>'")
    p.add_argument("count", type=int)

    return parser


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise SpecFormatError(f"cannot read {path}: {exc.strerror or exc}")


def _load_group(path):
    return parse_group_spec(_read(path))


def _load_rep(group_path, rep_path, field):
    group = _load_group(group_path)
    return parse_rep_spec(_read(rep_path), group, field)


def _decompose_config(args):
    proj = ProjectionConfig(nu=args.nu, set_size=args.set_size,
                            commutation_tol=args.commutation_tol)
    return DecomposeConfig(projection=proj, block_tol=args.tol)


def _emit(doc, args):
    if args.format == "structured":
        print(json.dumps(doc, indent=2))
    else:
        raise AssertionError("text output is handled per command")


def _report_doc(command, args, extra):
    doc = {"schema_version": SCHEMA_VERSION, "command": command,
           "seed": args.seed, "field": args.field}
    doc.update(extra)
    return doc


def _diag_doc(report):
    return {
        "trials": report.trials,
        "tolerance": float(report.tolerance),
        "unitarity_residual": float(report.unitarity_residual),
        "max_off_component": float(report.max_off_component),
        "component_residuals": [float(r) for r in report.component_residuals],
        "passed": bool(report.passed),
        "failures": list(report.failures),
    }


def _group_label(group):
    if isinstance(group, PermutationGroup):
        return f"permutation group, degree {group.degree}, order {group.order()}"
    return f"{group.kind} group, dimension {group.dim}"


def _note(args, message):
    if args.verbose:
        print(f"# {message}", file=sys.stderr)


def cmd_decompose(args) -> int:
    rep = _load_rep(args.group_spec, args.rep_spec, args.field)
    _note(args, f"{_group_label(rep.group)}; representation dimension {rep.dim}")
    rng = np.random.default_rng(args.seed)
    try:
        decomp = decompose(rep, _decompose_config(args), rng=rng)
    except (DecompositionError, ProjectionError) as exc:
        print(f"decomposition failed: {exc}", file=sys.stderr)
        return EXIT_DECOMPOSE
    _note(args, f"decomposed in {decomp.attempts} attempt(s)")

    if args.emit_basis:
        Path(args.emit_basis).write_text(format_basis(decomp, args.field))

    if args.format == "structured":
        doc = _report_doc("decompose", args, {
            "n": rep.dim,
            "attempts": decomp.attempts,
            "components": [
                {"dimension": c.dimension, "multiplicity": c.multiplicity,
                 "real_type": c.real_type, "residual": float(resid)}
                for c, resid in zip(decomp.components,
                                    decomp.diagnostics.component_residuals)],
            "diagnostics": _diag_doc(decomp.diagnostics),
        })
        _emit(doc, args)
    else:
        print(f"representation: n={rep.dim}, field={args.field} ({_group_label(rep.group)})")
        print(f"components ({len(decomp.components)}, canonical order):")
        for c, resid in zip(decomp.components, decomp.diagnostics.component_residuals):
            print(f"  D={c.dimension} M={c.multiplicity} type={c.real_type} "
                  f"residual={resid:.3e}")
        r = decomp.diagnostics
        print(f"unitarity residual: {r.unitarity_residual:.3e}")
        print(f"max off-component residual: {r.max_off_component:.3e}")
        print(f"max component structure residual: "
              f"{max(r.component_residuals, default=0.0):.3e}")
        print(f"attempts: {decomp.attempts}")
        if args.emit_basis:
            print(f"basis written to {args.emit_basis}")
    return EXIT_OK


def cmd_blockdiag(args) -> int:
    prob = parse_sdp(_read(args.sdp))
    group = _load_group(args.group_spec)
    rep = parse_rep_spec(_read(args.rep_spec), group, prob.field)
    if rep.dim != prob.n:
        raise SpecFormatError(
            f"SDP size {prob.n} does not match representation dimension {rep.dim}")

    _note(args, f"{_group_label(rep.group)}; SDP n={prob.n}, m={prob.m}, "
                f"field {prob.field}")
    rng = np.random.default_rng(args.seed)
    config = _decompose_config(args)
    try:
        decomp = decompose(rep, config, rng=rng)
    except (DecompositionError, ProjectionError) as exc:
        print(f"decomposition failed: {exc}", file=sys.stderr)
        return EXIT_DECOMPOSE

    tol = args.tol if args.tol is not None else 1e-6
    try:
        blocked = block_diagonalize_sdp(
            decomp, prob, symmetrize_first=args.symmetrize, tol=tol,
            config=config.projection, rng=rng, threads=max(1, args.threads))
    except NotInvariantError as exc:
        print(f"invariance check failed: {exc}\n"
              "(re-run with --symmetrize to project the data first)", file=sys.stderr)
        return EXIT_INVARIANCE

    outdir = Path(args.out) if args.out else Path(str(args.sdp) + ".blocks")
    outdir.mkdir(parents=True, exist_ok=True)
    blocks_meta = []
    for k, comp in enumerate(blocked.components):
        name = f"block_{k:03d}.sdp"
        sub = SdpProblem(c=comp.c_block, a=comp.a_blocks, b=blocked.b,
                         field=blocked.field)
        (outdir / name).write_text(format_sdp(sub))
        blocks_meta.append({
            "file": name,
            "dimension": comp.dimension,
            "multiplicity": comp.multiplicity,
            "size": comp.multiplicity,
            "field": blocked.field,
            "residual": float(comp.residual),
        })
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "field": blocked.field,
        "n": prob.n,
        "m": prob.m,
        "b": [float(v) for v in blocked.b],
        "worst_residual": float(blocked.residual),
        "blocks": blocks_meta,
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")

    if args.format == "structured":
        doc = _report_doc("blockdiag", args, {"out": str(outdir), **manifest})
        doc["field"] = blocked.field
        _emit(doc, args)
    else:
        sizes = [c.multiplicity for c in blocked.components]
        print(f"block-diagonalized: n={prob.n}, m={prob.m} -> "
              f"{len(sizes)} blocks of sizes {sizes}")
        print(f"worst residual: {blocked.residual:.3e}")
        print(f"wrote {len(sizes)} block files and manifest.json to {outdir}")
    return EXIT_OK


def cmd_verify(args) -> int:
    basis_field, decomp = parse_basis(_read(args.basis))
    group = _load_group(args.group_spec)
    rep = parse_rep_spec(_read(args.rep_spec), group, basis_field)
    if rep.dim != decomp.U.shape[0]:
        raise SpecFormatError(
            f"basis size {decomp.U.shape[0]} does not match representation "
            f"dimension {rep.dim}")

    rng = np.random.default_rng(args.seed)
    report = verify_decomposition(rep, decomp, trials=args.trials, tol=args.tol,
                                  rng=rng)
    if args.format == "structured":
        doc = _report_doc("verify", args, {
            "n": rep.dim,
            "components": [
                {"dimension": c.dimension, "multiplicity": c.multiplicity,
                 "real_type": c.real_type}
                for c in decomp.components],
            "diagnostics": _diag_doc(report),
        })
        doc["field"] = basis_field
        _emit(doc, args)
    else:
        print(f"verifying basis against n={rep.dim}, field={basis_field}, "
              f"{report.trials} trials, tolerance {report.tolerance:.1e}")
        print(f"unitarity residual:        {report.unitarity_residual:.3e}")
        print(f"max off-component:         {report.max_off_component:.3e}")
        for i, r in enumerate(report.component_residuals):
            c = decomp.components[i]
            print(f"component {i} (D={c.dimension} M={c.multiplicity}): {r:.3e}")
        print("PASS" if report.passed else "FAIL: " + "; ".join(report.failures))
    return EXIT_OK if report.passed else EXIT_VERIFY


def _format_matrix_rows(mat, field):
    rows = []
    for row in np.asarray(mat):
        if field == "complex":
            vals = []
            for v in row:
                vals.append(f"{v.real:.17g}")
                vals.append(f"{v.imag:.17g}")
        else:
            vals = [f"{float(v):.17g}" for v in row]
        rows.append(" ".join(vals))
    return rows


def cmd_sample_group(args) -> int:
    if _INLINE_GROUP.match(args.spec):
        group = parse_inline_group(args.spec)
    else:
        group = _load_group(args.spec)
    if args.count < 0:
        raise SpecFormatError("count must be >= 0")

    rng = np.random.default_rng(args.seed)
    samples = [group.sample(rng) for _ in range(args.count)]

    if isinstance(group, PermutationGroup):
        doc_samples = [list(p.images) for p in samples]
        worst = None
    else:
        doc_samples = []
        worst = 0.0
        eye = np.eye(group.dim)
        for u in samples:
            worst = max(worst, float(np.linalg.norm(u.conj().T @ u - eye)))
            if group.kind == "unitary":
                doc_samples.append([[[float(v.real), float(v.imag)] for v in row]
                                    for row in u])
            else:
                doc_samples.append([[float(v) for v in row] for row in u])
        if not samples:
            worst = 0.0

    if args.format == "structured":
        doc = _report_doc("sample-group", args, {
            "spec": args.spec, "count": args.count, "samples": doc_samples})
        if worst is not None:
            doc["max_unitarity_residual"] = worst
        _emit(doc, args)
    else:
        if isinstance(group, PermutationGroup):
            for p in samples:
                print(json.dumps(list(p.images)))
        else:
            for k, u in enumerate(samples):
                print(f"SAMPLE {k}")
                for line in _format_matrix_rows(u, "complex" if group.kind == "unitary"
                                                else "real"):
                    print(line)
            if samples:
                print(f"# max unitarity residual: {worst:.3e}")
    return EXIT_OK


_COMMANDS = {
    "decompose": cmd_decompose,
    "blockdiag": cmd_blockdiag,
    "verify": cmd_verify,
    "sample-group": cmd_sample_group,
}


def main(argv=None) -> int:
    try:
        parser = _build_parser()
    except SpecFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except SpecFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except (DecompositionError, ProjectionError) as exc:
        print(f"decomposition failed: {exc}", file=sys.stderr)
        return EXIT_DECOMPOSE
    except NotInvariantError as exc:
        print(f"invariance check failed: {exc}", file=sys.stderr)
        return EXIT_INVARIANCE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC


def entrypoint():
    sys.exit(main())
