"""Command-line interface: ``bicomm <command> [options]``.

Exit status is 0 on success, 1 when a verification or implication check
fails, and 2 for unreadable or inconsistent input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional, Sequence

import numpy as np

from .classify import FLAGS, ModuleFamily, property_report
from .commutant import alg_lat_member, bicommutant, commutant, dcp_check
from .errors import BicommError, VerificationError, WorkspaceError
from .families import (
    T2Rep,
    build_t2,
    canonical_t2_family,
    canonical_ux_family,
    counterexample_search,
    refl_closure,
    t2_algebra,
    t2_bicommutant_excess,
    t2_closed_form,
    t2_commutant_closed_form,
    ux_algebra,
)
from .hilbmod import adjointable_intertwiners, intertwiners, reject_module, trace_module
from .linalg import DEFAULT_TOL, Tolerance, span_of
from .workspace import (
    Workspace,
    document_tolerance,
    load_workspace,
    matrix_to_json,
    parse_inline_matrix,
    read_document,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class _InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on its own; keep that but route through main
    def error(self, message):
        raise _InputError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# output helpers


def _fmt(M) -> str:
    M = np.asarray(M)
    if np.allclose(M.imag, 0):
        M = M.real
    return np.array2string(M, precision=6, suppress_small=True, max_line_width=120)


class Report:
    """Collects human lines and the machine payload of one command."""

    def __init__(self, args, tol: Tolerance):
        self.args = args
        self.lines: list[str] = []
        self.data = {
            "verdict": None,
            "dims": {},
            "basis": [],
            "seed": args.seed,
            "tolerances": {"rank_rel": tol.rank_rel, "match_abs": tol.match_abs},
        }

    def say(self, line: str = ""):
        self.lines.append(line)

    def basis(self, mats, label="basis"):
        mats = list(mats)
        self.data["basis"] = [matrix_to_json(m) for m in mats]
        for i, m in enumerate(mats):
            self.say(f"{label}[{i}] =")
            self.say(_fmt(m))

    def emit(self, out):
        if self.args.json:
            out.write(json.dumps(self.data, indent=2) + "\n")
        else:
            out.write("\n".join(self.lines) + "\n")


def _load(args) -> Workspace:
    doc = read_document(args.file)
    tol = document_tolerance(doc, args.tol_rank, args.tol_match)
    return load_workspace(doc, tol)


def _cli_tol(args) -> Tolerance:
    rank = DEFAULT_TOL.rank_rel if args.tol_rank is None else args.tol_rank
    match = DEFAULT_TOL.match_abs if args.tol_match is None else args.tol_match
    try:
        return Tolerance(rank, match)
    except ValueError as exc:
        raise WorkspaceError(f"tolerance: {exc}") from None


def _family(ws: Workspace, rep, names: Sequence[str], seed: int, tol) -> ModuleFamily:
    """Family from workspace names; the word ``canonical`` picks the built-in family of the rep's algebra."""
    if list(names) == ["canonical"]:
        if rep.algebra.same_as(t2_algebra()):
            return canonical_t2_family(seed, tol)
        d = rep.algebra.dim - 2
        if d >= 1 and rep.algebra.same_as(ux_algebra(d)):
            return canonical_ux_family(d, seed, tol)
        raise WorkspaceError("--family canonical: only T2 and U(X) representations have a built-in family")
    members = [ws.rep(n) for n in names]
    try:
        return ModuleFamily(rep.algebra, members, "+".join(names))
    except ValueError as exc:
        raise WorkspaceError(f"--family: {exc}") from None


# ---------------------------------------------------------------------------
# commands


def cmd_commutant(args, out) -> int:
    ws = _load(args)
    tol = ws.tolerance
    S = span_of(ws.matrix_set(args.set), tol)
    C = commutant(S, tol) if args.command == "commutant" else bicommutant(S, tol)
    r = Report(args, tol)
    r.data["dims"] = {"span": S.dim, args.command: C.dim}
    r.say(f"{args.command} of {args.set!r}: dim {C.dim} (span dim {S.dim}, ambient {S.rows}x{S.rows})")
    r.basis(C.basis)
    r.emit(out)
    return EXIT_OK


def cmd_dcp(args, out) -> int:
    ws = _load(args)
    tol = ws.tolerance
    v = dcp_check(ws.rep(args.rep), tol)
    r = Report(args, tol)
    r.data["verdict"] = v.holds
    r.data["dims"] = {"span": v.span_dim, "bicommutant": v.bicommutant_dim}
    r.say(f"double commutant property for {args.rep!r}: {'holds' if v.holds else 'fails'}")
    r.say(f"span of images: dim {v.span_dim}; bicommutant: dim {v.bicommutant_dim}")
    if not v.holds:
        r.say("bicommutant elements outside the span:")
    r.basis(v.excess.basis, "excess")
    r.emit(out)
    return EXIT_OK


def cmd_hom(args, out) -> int:
    ws = _load(args)
    tol = ws.tolerance
    H, K = ws.rep(args.src), ws.rep(args.dst)
    hom = (adjointable_intertwiners if args.adjointable else intertwiners)(H, K, tol)
    r = Report(args, tol)
    kind = "adjointable module maps" if args.adjointable else "module maps"
    r.data["verdict"] = hom.dim > 0
    r.data["dims"] = {"hom": hom.dim}
    r.say(f"{kind} {args.src} -> {args.dst}: dim {hom.dim}")
    r.basis(hom.basis)
    r.emit(out)
    return EXIT_OK


def cmd_trace(args, out) -> int:
    ws = _load(args)
    tol = ws.tolerance
    H, K = ws.rep(args.src), ws.rep(args.dst)
    r = Report(args, tol)
    if args.command == "trace":
        # ranges of maps H -> K, a subspace of K
        W, ambient = trace_module(H, K, tol), K.dim_H
        r.data["verdict"] = W.dim == ambient
        r.say(f"trace of {args.src} in {args.dst}: dim {W.dim} of {ambient}" + (" (all of it)" if W.dim == ambient else ""))
    else:
        # kernels of maps src -> dst, a subspace of src
        W, ambient = reject_module(H, K, tol), H.dim_H
        r.data["verdict"] = W.dim == 0
        r.say(f"reject of {args.dst} in {args.src}: dim {W.dim} of {ambient}")
    r.data["dims"] = {r.args.command: W.dim, "ambient": ambient}
    r.basis([W.basis], "columns")
    r.emit(out)
    return EXIT_OK


def cmd_classify(args, out) -> int:
    ws = _load(args)
    tol = ws.tolerance
    H = ws.rep(args.rep)
    F = _family(ws, H, args.family, args.seed, tol)
    rep = property_report(H, F, samples=args.samples, tol=tol, seed=args.seed, complete=args.complete)
    r = Report(args, tol)
    r.data.update(rep.to_dict())
    r.data["verdict"] = {k: str(v) for k, v in rep.flags.items()}
    r.say(f"properties of {args.rep!r} relative to {F.name!r}:")
    for k in FLAGS:
        r.say(f"  {k:12s} {rep.flags[k]}")
    for note in rep.notes:
        r.say(f"note: {note}")
    r.basis(rep.dcp.excess.basis, "excess")
    r.emit(out)
    return EXIT_OK


def cmd_t2(args, out) -> int:
    if args.file:
        ws = _load(args)
        tol = ws.tolerance
        T = ws.matrices[args.T] if args.T in ws.matrices else parse_inline_matrix(args.T)
    else:
        tol = _cli_tol(args)
        T = parse_inline_matrix(args.T)
    try:
        t = T2Rep.a(T)
        rep = build_t2(t, tol, "T2(a)")
    except ValueError as exc:
        raise WorkspaceError(f"--T: {exc}") from None
    cf = t2_closed_form(t, tol)
    engine = dcp_check(rep, tol)
    comm = t2_commutant_closed_form(t, tol)
    r = Report(args, tol)
    r.data["verdict"] = cf.flags()
    r.data["dims"] = {
        "H1": t.dim_H1,
        "H2": t.dim_H2,
        "span": engine.span_dim,
        "commutant": comm.dim,
        "bicommutant": engine.bicommutant_dim,
    }
    r.say(f"T ({t.dim_H1}x{t.dim_H2}, rank {cf.rank}) =")
    r.say(_fmt(t.T))
    r.say(f"dcp: {str(cf.dcp).lower()} (closed form: T {'not ' if cf.dcp else ''}invertible)")
    r.say(f"engine: span dim {engine.span_dim}, commutant dim {comm.dim}, bicommutant dim {engine.bicommutant_dim}")
    failures = []
    if engine.holds != cf.dcp:
        failures.append(f"dcp: closed form {cf.dcp}, engine {engine.holds}")
    z = t2_bicommutant_excess(t, tol)
    if z is not None:
        r.say("witness outside the span (T^-1 from H1 to H2):")
        r.basis([z], "z")
    if args.all:
        F = canonical_t2_family(args.seed, tol)
        rel = property_report(rep, F, samples=args.samples, tol=tol, seed=args.seed)
        r.data["relative"] = {k: str(v) for k, v in rel.flags.items()}
        r.data["family_id"] = rel.family_id
        r.say(f"{'flag':12s} {'closed form':12s} relative ({F.name})")
        for k, want in cf.flags().items():
            got = rel.flags[k]
            mark = "" if got.positive == want else "  MISMATCH"
            r.say(f"{k:12s} {str(want).lower():12s} {got}{mark}")
            if mark:
                failures.append(f"{k}: closed form {want}, relative {got}")
        for note in cf.notes():
            r.say(f"note: {note}")
    r.data["failures"] = failures
    for f in failures:
        r.say(f"self-check failed: {f}")
    r.emit(out)
    return EXIT_FAIL if failures else EXIT_OK


def cmd_refl(args, out) -> int:
    ws = _load(args)
    tol = ws.tolerance
    S = span_of(ws.matrix_set(args.set), tol)
    cl = refl_closure(S, tol)
    r = Report(args, tol)
    r.data["verdict"] = cl.dim == S.dim
    r.data["dims"] = {"span": S.dim, "closure": cl.dim}
    r.say(f"reflexive closure of {args.set!r}: dim {cl.dim} (span dim {S.dim})")
    r.basis(cl.basis)
    r.emit(out)
    return EXIT_OK


def cmd_alg_lat(args, out) -> int:
    ws = _load(args)
    tol = ws.tolerance
    X = ws.matrices.get(args.op)
    if X is None:
        raise WorkspaceError(f"--op: unknown matrix {args.op!r}")
    ok = alg_lat_member(X, ws.matrix_set(args.set), samples=args.samples, tol=tol, seed=args.seed, strict=args.strict_cyclic)
    r = Report(args, tol)
    r.data["verdict"] = "evidence-true" if ok else "false"
    r.say(f"{args.op} in alg lat {args.set}: {'evidence-true' if ok else 'false'} ({args.samples} random probes)")
    r.emit(out)
    return EXIT_OK


def parse_target(text: str) -> dict:
    """``"dcp=F,semigen=T"`` or a JSON object of booleans."""
    text = text.strip()
    if text.startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise WorkspaceError(f"--target: not valid JSON ({exc.msg})") from None
        if not isinstance(raw, dict):
            raise WorkspaceError("--target: expected an object")
        items = raw.items()
    else:
        items = []
        for part in filter(None, (p.strip() for p in text.split(","))):
            if "=" not in part:
                raise WorkspaceError(f"--target: expected flag=value, got {part!r}")
            k, v = (s.strip() for s in part.split("=", 1))
            items.append((k, v))
    truth = {"t": True, "true": True, "1": True, "f": False, "false": False, "0": False}
    target = {}
    for k, v in items:
        if k not in FLAGS:
            raise WorkspaceError(f"--target: unknown flag {k!r} (known: {', '.join(FLAGS)})")
        if isinstance(v, bool):
            target[k] = v
        elif str(v).lower() in truth:
            target[k] = truth[str(v).lower()]
        else:
            raise WorkspaceError(f"--target.{k}: expected T or F, got {v!r}")
    if not target:
        raise WorkspaceError("--target: no flags given")
    return target


def cmd_search(args, out) -> int:
    tol = _cli_tol(args)
    target = parse_target(args.target)
    found = counterexample_search(target, seed=args.seed, budget=args.budget, tol=tol, samples=args.samples)
    r = Report(args, tol)
    r.data["verdict"] = bool(found)
    r.data["dims"] = {"found": len(found), "budget": args.budget}
    r.data["target"] = target
    r.data["instances"] = [rep.to_dict() for rep in found]
    r.say(f"{len(found)} of {args.budget} candidates match {target}")
    for rep in found:
        flags = ", ".join(f"{k}={v}" for k, v in rep.flags.items())
        r.say(f"- {json.dumps(rep.instance)}")
        r.say(f"    {flags} [{rep.family_id}]")
    r.emit(out)
    return EXIT_OK


def cmd_suite(args, out) -> int:
    from .suite import run_suite

    tol = _cli_tol(args)
    start = time.perf_counter()
    echo = None if args.json else (lambda line: (out.write(line + "\n"), out.flush()))
    results = run_suite(args.seed, tol, echo)
    secs = time.perf_counter() - start
    passed = sum(r.passed for r in results)
    if args.json:
        r = Report(args, tol)
        r.data["verdict"] = passed == len(results)
        r.data["dims"] = {"passed": passed, "total": len(results)}
        r.data["criteria"] = [
            {"number": c.number, "name": c.name, "passed": c.passed, "detail": c.detail, "seconds": c.seconds}
            for c in results
        ]
        r.data["seconds"] = secs
        r.emit(out)
    else:
        out.write(f"{passed}/{len(results)} criteria passed in {secs:.1f}s\n")
    return EXIT_OK if passed == len(results) else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=None, help="relative singular value cutoff (default 1e-9)")
    common.add_argument("--tol-match", type=float, default=None, help="absolute residual threshold (default 1e-8)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--strict-cyclic", action="store_true", help="cyclic subspaces exclude the vector itself")

    p = _Parser(prog="bicomm", description="Commutants, bicommutants and module properties of matrix algebras.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help, file=True):
        sp = sub.add_parser(name, parents=[common], help=help)
        if file:
            sp.add_argument("file", help="workspace JSON file")
        sp.set_defaults(func=func)
        return sp

    for name in ("commutant", "bicommutant"):
        add(name, cmd_commutant, f"{name} of a set of matrices").add_argument("--set", required=True)
    add("dcp", cmd_dcp, "double commutant property of a representation").add_argument("--rep", required=True)
    sp = add("hom", cmd_hom, "module maps between two representations")
    sp.add_argument("--from", dest="src", required=True)
    sp.add_argument("--to", dest="dst", required=True)
    sp.add_argument("--adjointable", action="store_true")
    for name, what in (("trace", "span of ranges of maps --from -> --to"), ("reject", "common kernel of maps --from -> --to")):
        sp = add(name, cmd_trace, what)
        sp.add_argument("--from", dest="src", required=True)
        sp.add_argument("--to", dest="dst", required=True)
    sp = add("classify", cmd_classify, "property report relative to a module family")
    sp.add_argument("--rep", required=True)
    sp.add_argument("--family", nargs="+", required=True, help="representation names, or 'canonical'")
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--complete", action="store_true", help="probe multiples 1, 2, 4 for sub-tracing")
    sp = add("t2", cmd_t2, "closed forms for a T2 module, cross-checked against the engine", file=False)
    sp.add_argument("--T", required=True, help="inline JSON matrix, or a matrix name with --file")
    sp.add_argument("--file", default=None)
    sp.add_argument("--all", action="store_true", help="also compare every flag with the relative classification")
    sp.add_argument("--samples", type=int, default=200)
    add("refl-closure", cmd_refl, "reflexive closure of an operator space").add_argument("--set", required=True)
    sp = add("alg-lat", cmd_alg_lat, "randomized test of X in alg lat S")
    sp.add_argument("--set", required=True)
    sp.add_argument("--op", required=True)
    sp.add_argument("--samples", type=int, default=200)
    sp = add("search", cmd_search, "look for T2 / U(X) modules with given flags", file=False)
    sp.add_argument("--target", required=True, help="e.g. 'dcp=F,semigen=T'")
    sp.add_argument("--budget", type=int, default=50)
    sp.add_argument("--samples", type=int, default=50)
    add("suite", cmd_suite, "run the acceptance scoreboard", file=False)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except _InputError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (BicommError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
