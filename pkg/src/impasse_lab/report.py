"""Whole-system analyses assembled into JSON-ready reports.

Every report is a plain ``dict`` of strings, numbers, booleans, lists and
``None`` so it can be serialised deterministically with :func:`dumps`.
Polynomials are printed in canonical form; floats are written with 17
significant digits.
"""

from __future__ import annotations

import math
from typing import Any

import numpy as np

from .classify import (ImpasseClass, EquilibriumType, LineVerdict, adjoint_equilibria,
                       analyze_line, classify_impasse_point, equilibrium_type)
from .errors import NotAnEquilibrium, NotOnImpasse, WrongForm
from .infinity import CompactifiedSurface, compactify
from .numerics import Box2
from .polynomial import Poly
from .reduction import (CatastropheSpec, ConstrainedSystem, adjoint, cancel_row_factors,
                        reduce_general, reduce_potential)
from .slowfast import ContinuationResult, PeriodicOrbit
from .surface import (IntersectionCase, SurfaceSpec, VectorField3, connectivity_report, pseudo_impasse_projections,
                      singular_points, verify_invariance)

__all__ = ["SCHEMA", "dumps", "analyze_surface", "analyze_constrained", "catastrophe_report",
           "compactify_report", "continuation_report"]

SCHEMA = "impasse-lab/1"


# -- serialisation -------------------------------------------------------------

def _fmt_float(v: float) -> str:
    if not math.isfinite(v):
        return "null"
    if v == 0:
        return "0.0"
    return format(v, ".17g")


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON text with floats at 17 significant digits and stable key order."""
    import json

    def emit(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return _fmt_float(float(o))
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(str(k))}: {emit(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, (list, tuple, np.ndarray)):
            if len(o) == 0:
                return "[]"
            items = [f"{pad}{emit(v, level + 1)}" for v in o]
            return "[\n" + ",\n".join(items) + "\n" + end + "]"
        raise TypeError(f"cannot serialise {type(o).__name__}")

    return emit(obj, 0) + "\n"


def _pt(q) -> list[float]:
    return [float(v) for v in q]


def _complex(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _eq_type(t: EquilibriumType | None) -> dict | None:
    if t is None:
        return None
    return {
        "kind": t.kind.value,
        "eigenvalues": [_complex(complex(z)) for z in t.eigenvalues],
        "eigenvector_count": int(t.eigenvector_count),
        "hyperbolic": bool(t.hyperbolic),
        "repeated_eigenvalue": bool(t.repeated),
        "jacobian": [_pt(row) for row in np.asarray(t.jacobian)],
    }


def _impasse_class(c: ImpasseClass | None) -> dict | None:
    if c is None:
        return None
    label = c.label.value if c.label is not None else None
    eff = c.effective_label
    return {
        "regular": bool(c.regular),
        "condition_A": bool(c.cond_a),
        "condition_B": bool(c.cond_b),
        "label": label,
        "effective_label": eff.value if eff is not None else None,
        "r_first_kind": c.r_first_kind,
        "r_second_kind": c.r_second_kind,
        "shortcut_label": c.shortcut.value if c.shortcut is not None else None,
    }


def _line(v: LineVerdict | None) -> dict | None:
    if v is None:
        return None
    return {
        "verdict": v.verdict.value,
        "contains_equilibria_of_X": v.contains_equilibria_of_X,
        "basis": v.basis,
        "singular_height": v.singular_height,
    }


def _system(cs: ConstrainedSystem) -> dict:
    return {
        "text": str(cs),
        "A": [[str(a) for a in row] for row in cs.A],
        "F": [str(c) for c in cs.F],
        "provenance": cs.provenance.value,
        "detA": str(cs.detA),
    }


def _impasse_locus(cs: ConstrainedSystem) -> dict:
    det = cs.detA
    if det.is_zero():
        return {"kind": "everywhere", "equation": "0"}
    if det.is_constant():
        return {"kind": "empty", "equation": str(det)}
    return {"kind": "curve", "equation": str(det.primitive()) + " = 0"}


def _equilibria(cs: ConstrainedSystem, box: Box2, tol: float) -> list[dict]:
    out = []
    for e in adjoint_equilibria(cs, box, tol):
        entry = {"point": _pt(e.point), "on_impasse": bool(e.on_impasse), "type": _eq_type(e.type)}
        if e.on_impasse:
            entry["classification"] = _impasse_class(classify_impasse_point(cs, e.point, tol))
        out.append(entry)
    return out


def compactify_report(S: SurfaceSpec) -> dict:
    c: CompactifiedSurface = compactify(S)
    return {
        "boundary_poly": str(c.boundary_poly),
        "degree": c.degree,
        "case": c.case.value,
        "contains_poles": c.contains_poles,
        "pole_containment": c.pole_containment.value,
        "contains_big_circle": c.contains_big_circle,
        "z_divides_boundary": c.z_divides_boundary,
    }


def analyze_surface(X: VectorField3, S: SurfaceSpec, box: Box2, tol: float = 1e-8) -> dict:
    """Full pipeline for a field and an invariant surface ``f z - g = 0``."""
    inv = verify_invariance(X, S)
    reduced = reduce_general(X, S)
    cancelled, removed = cancel_row_factors(reduced)
    adj = adjoint(cancelled)
    proj = pseudo_impasse_projections(S, box)
    lines = []
    for q in proj.points:
        entry: dict[str, Any] = {"projection": _pt(q)}
        try:
            entry["classification"] = _impasse_class(classify_impasse_point(cancelled, q, tol))
        except NotOnImpasse:
            entry["classification"] = None
        try:
            entry["equilibrium"] = _eq_type(equilibrium_type(adj, q, tol))
        except NotAnEquilibrium:
            entry["equilibrium"] = None
        try:
            entry["line"] = _line(analyze_line(X, S, q, tol))
        except WrongForm as exc:
            entry["line"] = {"verdict": None, "basis": str(exc)}
        lines.append(entry)
    if proj.case is IntersectionCase.SHARED_CURVE:
        singular = None
    else:
        sing = singular_points(S, proj)
        singular = {"whole_lines": [_pt(q) for q in sing.whole_lines],
                    "isolated": [_pt(p) for p in sing.isolated]}
    return {
        "schema": SCHEMA,
        "mode": "surface",
        "field": [str(c) for c in X.components],
        "surface": {"f": str(S.f), "g": str(S.g), "H": str(S.H)},
        "invariance": {"kind": inv.kind.value, "cofactor": str(inv.cofactor),
                       "residual": str(inv.residual)},
        "constrained": _system(reduced),
        "cancelled": {**_system(cancelled), "removed_row_factors": [str(p) for p in removed]},
        "adjoint": [str(c) for c in adj.components],
        "impasse_locus": _impasse_locus(cancelled),
        "pseudo_impasse": {
            "case": proj.case.value,
            "shared_factor": str(proj.shared_factor) if proj.shared_factor is not None else None,
            "lines": lines,
        },
        "singular_points_of_M": singular,
        "adjoint_equilibria": _equilibria(cancelled, box, tol),
        "connectivity": connectivity_report(S, proj, box).value,
        "infinity": compactify_report(S),
        "box": [box.x_lo, box.x_hi, box.y_lo, box.y_hi],
    }


def analyze_constrained(cs: ConstrainedSystem, box: Box2, tol: float = 1e-8) -> dict:
    """Report for a constrained system given directly."""
    adj = adjoint(cs)
    return {
        "schema": SCHEMA,
        "mode": "constrained",
        "constrained": _system(cs),
        "adjoint": [str(c) for c in adj.components],
        "impasse_locus": _impasse_locus(cs),
        "smooth": cs.is_smooth,
        "adjoint_equilibria": _equilibria(cs, box, tol),
        "box": [box.x_lo, box.x_hi, box.y_lo, box.y_hi],
    }


def catastrophe_report(spec: CatastropheSpec, tol: float = 1e-8) -> dict:
    """Normal form, its planar reduction and the nature of the origin."""
    V, beta, gamma = spec.V, spec.X.beta, spec.X.gamma
    cs = reduce_potential(V, beta, gamma)
    origin: dict[str, Any]
    if not cs.detA.is_zero() and cs.detA.evaluate((0, 0)) != 0:
        origin = {"on_impasse": False, "label": "NonSingular", "classification": None}
    else:
        c = classify_impasse_point(cs, (0.0, 0.0), tol)
        origin = {"on_impasse": True,
                  "label": c.label.value if c.label is not None else None,
                  "classification": _impasse_class(c)}
    return {
        "schema": SCHEMA,
        "mode": "catastrophe",
        "name": spec.name,
        "potential": str(V),
        "potential_type": spec.potential,
        "field": [str(beta), str(gamma)],
        "reduction": _system(cs),
        "smooth": cs.is_smooth,
        "origin": origin,
    }


def continuation_report(result: ContinuationResult, mode: str) -> dict:
    items = []
    for e, item in zip(result.eps_values, result.items):
        if isinstance(item, PeriodicOrbit):
            items.append({"eps": e, "period": item.period, "multiplier": item.multiplier,
                          "return_error": item.return_error,
                          "section_point": _pt(item.section_point),
                          "samples": int(len(item.points))})
        else:
            items.append({"eps": e, "point": _pt(item)})
    base = result.base
    if isinstance(base, PeriodicOrbit):
        base_entry = {"period": base.period, "multiplier": base.multiplier,
                      "return_error": base.return_error, "section_point": _pt(base.section_point)}
    else:
        base_entry = {"point": _pt(base)} if base is not None else None
    return {
        "schema": SCHEMA,
        "mode": "slowfast",
        "continuation": mode,
        "eps": list(result.eps_values),
        "base": base_entry,
        "items": items,
        "distances": list(result.distances),
        "step_distances": list(result.step_distances),
        "residuals": list(result.residuals),
        "converged": result.converged,
    }
