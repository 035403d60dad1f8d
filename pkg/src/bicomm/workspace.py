"""Reading and writing JSON matrix workspaces.

A workspace is a JSON object with these keys:

``matrices``
    name -> ``{"rows", "cols", "entries"}``, entries a flat row-major list
    of ``[re, im]`` pairs.
``algebras``
    name -> ``{"generators": [matrix names]}``.
``representations``
    name -> ``{"algebra", "images"}`` (images of the algebra's generators),
    ``{"t2": {"T", "kind"}}`` or ``{"ux": {"alpha": [matrix names]}}``.
``sets``
    name -> list of matrix names (optional).
``tolerance``
    ``{"rank_rel", "match_abs"}`` (optional).

Every error names the key path where it occurred, e.g.
``representations.rho.t2.T``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import MatrixAlgebra, generate_algebra
from .errors import WorkspaceError
from .families import T2Rep, UXRep, build_t2, build_ux
from .hilbmod import Representation
from .linalg import DEFAULT_TOL, Tolerance


def matrix_from_json(obj, path: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        raise WorkspaceError(f"{path}: expected an object with rows, cols, entries")
    for key in ("rows", "cols", "entries"):
        if key not in obj:
            raise WorkspaceError(f"{path}: missing key {key!r}")
    rows, cols, entries = obj["rows"], obj["cols"], obj["entries"]
    for key, v in (("rows", rows), ("cols", cols)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise WorkspaceError(f"{path}.{key}: expected a positive integer, got {v!r}")
    if not isinstance(entries, list) or len(entries) != rows * cols:
        got = len(entries) if isinstance(entries, list) else type(entries).__name__
        raise WorkspaceError(f"{path}.entries: expected {rows * cols} [re, im] pairs, got {got}")
    out = np.empty(rows * cols, dtype=np.complex128)
    for i, e in enumerate(entries):
        ok = (
            isinstance(e, list)
            and len(e) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x) for x in e)
        )
        if not ok:
            raise WorkspaceError(f"{path}.entries[{i}]: expected a finite [re, im] pair, got {e!r}")
        out[i] = complex(e[0], e[1])
    return out.reshape(rows, cols)


def matrix_to_json(M) -> dict:
    M = np.asarray(M, dtype=np.complex128)
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in M.reshape(-1)],
    }


def parse_inline_matrix(text: str, path: str = "--T") -> np.ndarray:
    """Parse a matrix given on the command line.

    Accepts a workspace matrix object, a nested list of real numbers, or a
    nested list of ``[re, im]`` pairs.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise WorkspaceError(f"{path}: not valid JSON ({exc.msg})") from None
    if isinstance(obj, dict):
        return matrix_from_json(obj, path)
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError):
        raise WorkspaceError(f"{path}: expected a rectangular list of numbers") from None
    if arr.ndim == 3 and arr.shape[2] == 2:
        arr = arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim != 2 or arr.size == 0:
        raise WorkspaceError(f"{path}: expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise WorkspaceError(f"{path}: entries must be finite")
    return arr.astype(np.complex128)


@dataclass
class Workspace:
    matrices: dict = field(default_factory=dict)
    algebras: dict = field(default_factory=dict)
    representations: dict = field(default_factory=dict)
    sets: dict = field(default_factory=dict)
    tolerance: Tolerance = DEFAULT_TOL

    def matrix_set(self, name: str) -> list[np.ndarray]:
        """Matrices named by ``name``: a set, an algebra's generators, a representation's images or one matrix."""
        if name in self.sets:
            return self.sets[name]
        if name in self.algebras:
            return list(self.algebras[name].generators)
        if name in self.representations:
            return list(self.representations[name].images)
        if name in self.matrices:
            return [self.matrices[name]]
        raise WorkspaceError(f"no set, algebra, representation or matrix named {name!r}")

    def rep(self, name: str) -> Representation:
        try:
            return self.representations[name]
        except KeyError:
            raise WorkspaceError(f"representations.{name}: not defined") from None


def _section(doc, key) -> dict:
    sec = doc.get(key, {})
    if not isinstance(sec, dict):
        raise WorkspaceError(f"{key}: expected an object")
    return sec


def _names(value, path, table, what) -> list:
    if not isinstance(value, list):
        raise WorkspaceError(f"{path}: expected a list of {what} names")
    out = []
    for i, v in enumerate(value):
        if v not in table:
            raise WorkspaceError(f"{path}[{i}]: unknown {what} {v!r}")
        out.append(table[v])
    return out


def _wrap(path, fn, *args, **kw):
    # attach the key path to errors raised by constructors
    try:
        return fn(*args, **kw)
    except WorkspaceError:
        raise
    except ValueError as exc:
        raise WorkspaceError(f"{path}: {exc}") from None


def read_document(source) -> dict:
    """Decode the JSON of a workspace file (path or open file)."""
    try:
        text = source.read() if hasattr(source, "read") else Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise WorkspaceError(f"cannot read workspace: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise WorkspaceError(f"workspace is not valid JSON: {exc.msg} at line {exc.lineno}") from None
    if not isinstance(doc, dict):
        raise WorkspaceError("workspace: top level must be an object")
    return doc


def document_tolerance(doc: dict, rank_rel: float | None = None, match_abs: float | None = None) -> Tolerance:
    """The file's tolerance section with explicit values taking precedence."""
    t = _section(doc, "tolerance")
    kw = {k: t[k] for k in ("rank_rel", "match_abs") if k in t}
    if rank_rel is not None:
        kw["rank_rel"] = rank_rel
    if match_abs is not None:
        kw["match_abs"] = match_abs
    for k, v in kw.items():
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise WorkspaceError(f"tolerance.{k}: expected a number, got {v!r}")
    return _wrap("tolerance", Tolerance, **kw)


def load_workspace(source, tol: Tolerance | None = None) -> Workspace:
    """Parse a workspace from a path, an open file or an already-decoded dict.

    ``tol`` overrides the file's own ``tolerance`` section.
    """
    doc = source if isinstance(source, dict) else read_document(source)
    if not isinstance(doc, dict):
        raise WorkspaceError("workspace: top level must be an object")

    ws = Workspace()
    ws.tolerance = tol or document_tolerance(doc)
    tol = ws.tolerance

    for name, m in _section(doc, "matrices").items():
        ws.matrices[name] = matrix_from_json(m, f"matrices.{name}")

    for name, a in _section(doc, "algebras").items():
        path = f"algebras.{name}"
        if not isinstance(a, dict) or "generators" not in a:
            raise WorkspaceError(f"{path}: expected an object with 'generators'")
        gens = _names(a["generators"], f"{path}.generators", ws.matrices, "matrix")
        if not gens:
            raise WorkspaceError(f"{path}.generators: needs at least one matrix")
        if len({g.shape for g in gens}) != 1 or gens[0].shape[0] != gens[0].shape[1]:
            raise WorkspaceError(f"{path}.generators: must be square matrices of one size")
        ws.algebras[name] = _wrap(path, generate_algebra, gens, tol, name=name)

    for name, mats in _section(doc, "sets").items():
        path = f"sets.{name}"
        mats = _names(mats, path, ws.matrices, "matrix")
        if not mats or len({m.shape for m in mats}) != 1:
            raise WorkspaceError(f"{path}: needs one or more matrices of a single shape")
        ws.sets[name] = mats

    for name, r in _section(doc, "representations").items():
        ws.representations[name] = _load_rep(name, r, ws, tol)
    return ws


def _load_rep(name, r, ws: Workspace, tol) -> Representation:
    path = f"representations.{name}"
    if not isinstance(r, dict):
        raise WorkspaceError(f"{path}: expected an object")
    if "t2" in r:
        entry = r["t2"]
        p = f"{path}.t2"
        if not isinstance(entry, dict):
            raise WorkspaceError(f"{p}: expected an object")
        kind = entry.get("kind", "a")
        if kind == "a":
            if entry.get("T") not in ws.matrices:
                raise WorkspaceError(f"{p}.T: unknown matrix {entry.get('T')!r}")
            t = _wrap(p, T2Rep.a, ws.matrices[entry["T"]])
        elif kind in ("b", "c"):
            dim = entry.get("dim", 1)
            if not isinstance(dim, int) or dim < 1:
                raise WorkspaceError(f"{p}.dim: expected a positive integer")
            t = getattr(T2Rep, kind)(dim)
        else:
            raise WorkspaceError(f"{p}.kind: expected 'a', 'b' or 'c', got {kind!r}")
        return _wrap(p, build_t2, t, tol, name)
    if "ux" in r:
        p = f"{path}.ux"
        entry = r["ux"]
        if not isinstance(entry, dict) or "alpha" not in entry:
            raise WorkspaceError(f"{p}: expected an object with 'alpha'")
        imgs = _names(entry["alpha"], f"{p}.alpha", ws.matrices, "matrix")
        if not imgs:
            raise WorkspaceError(f"{p}.alpha: needs at least one matrix")
        u = _wrap(p, UXRep.of, imgs)
        return _wrap(p, build_ux, u, tol, name)
    if "algebra" in r and "images" in r:
        if r["algebra"] not in ws.algebras:
            raise WorkspaceError(f"{path}.algebra: unknown algebra {r['algebra']!r}")
        alg: MatrixAlgebra = ws.algebras[r["algebra"]]
        imgs = _names(r["images"], f"{path}.images", ws.matrices, "matrix")
        if len({m.shape for m in imgs}) > 1 or (imgs and imgs[0].shape[0] != imgs[0].shape[1]):
            raise WorkspaceError(f"{path}.images: must be square matrices of one size")
        return _wrap(path, Representation.from_generators, alg, imgs, tol, name)
    raise WorkspaceError(f"{path}: expected 'algebra'+'images', 't2' or 'ux'")
