"""Sectioned input files describing one system.

The format is TOML with these sections::

    [field]        alpha, beta, gamma        3D polynomial field
    [surface]      f, g                      surface f z - g = 0
    [constrained]  A11, A12, A21, A22, F1, F2
    [slowfast]     H, beta, slow_vars, mode, eps, tol, point | seed_*
    [analysis]     box, tol, grid, t_end

Exactly one system kind may be present: ``[field]`` with ``[surface]``,
``[constrained]``, or ``[slowfast]``.  All expressions use the polynomial
syntax of :mod:`impasse_lab.expr`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ModeMismatch, ParseError
from .numerics import Box2
from .reduction import ConstrainedSystem
from .slowfast import DEFAULT_EPS, SlowFastFamily
from .surface import SurfaceSpec, VectorField3

__all__ = ["Mode", "AnalysisOptions", "SlowFastSetup", "SystemFile", "load_system", "parse_system",
           "fixture_names", "fixture_path", "load_fixture"]

_SECTIONS = {"field", "surface", "constrained", "slowfast", "analysis"}


class Mode(str, enum.Enum):
    SURFACE = "surface"
    CONSTRAINED = "constrained"
    SLOWFAST = "slowfast"


@dataclass(frozen=True)
class AnalysisOptions:
    box: Box2 = Box2(-10.0, 10.0, -10.0, 10.0)
    tol: float = 1e-8
    grid: tuple[int, int] = (5, 5)
    t_end: float = 10.0


@dataclass(frozen=True)
class SlowFastSetup:
    family: SlowFastFamily
    mode: str
    eps: tuple[float, ...]
    point: tuple[float, ...] | None = None
    seed_center: tuple[float, float] = (0.0, 0.0)
    seed_radius: float = 1.0
    seed_samples: int = 400
    tol: float = 1e-10

    def seed_orbit(self) -> np.ndarray:
        """Closed circle samples ``(y, z)``; the first point is repeated at the end."""
        th = np.linspace(0.0, 2 * np.pi, self.seed_samples + 1)
        cy, cz = self.seed_center
        return np.column_stack([cy + self.seed_radius * np.cos(th),
                                cz + self.seed_radius * np.sin(th)])


@dataclass(frozen=True)
class SystemFile:
    mode: Mode
    title: str = ""
    field: VectorField3 | None = None
    surface: SurfaceSpec | None = None
    constrained: ConstrainedSystem | None = None
    slowfast: SlowFastSetup | None = None
    analysis: AnalysisOptions = dc_field(default_factory=AnalysisOptions)
    source: str = ""

    def require(self, *modes: Mode) -> None:
        if self.mode not in modes:
            wanted = " or ".join(m.value for m in modes)
            raise ModeMismatch(f"{self.source or 'input'}: needs a {wanted} system, found {self.mode.value}")


def _expr(section: dict, key: str, where: str) -> str:
    if key not in section:
        raise ParseError(f"[{where}] is missing {key!r}")
    value = section[key]
    if not isinstance(value, str):
        raise ParseError(f"[{where}] {key} must be a string expression")
    return value


def _floats(value, n: int | None, what: str) -> tuple[float, ...]:
    try:
        out = tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise ParseError(f"{what} must be a list of numbers") from None
    if n is not None and len(out) != n:
        raise ParseError(f"{what} must have {n} entries")
    return out


def _analysis(sec: dict) -> AnalysisOptions:
    opts = AnalysisOptions()
    kw: dict[str, Any] = {}
    if "box" in sec:
        b = _floats(sec["box"], 4, "[analysis] box")
        if not (b[0] < b[1] and b[2] < b[3]):
            raise ParseError("[analysis] box must be [x_lo, x_hi, y_lo, y_hi] with positive widths")
        kw["box"] = Box2(*b)
    if "tol" in sec:
        kw["tol"] = float(sec["tol"])
    if "grid" in sec:
        g = sec["grid"]
        if isinstance(g, str):
            g = g.lower().split("x")
        try:
            kw["grid"] = tuple(int(v) for v in g)
        except (TypeError, ValueError):
            raise ParseError("[analysis] grid must be 'NxM' or [N, M]") from None
        if len(kw["grid"]) != 2 or min(kw["grid"]) < 1:
            raise ParseError("[analysis] grid must be two positive integers")
    if "t_end" in sec:
        kw["t_end"] = float(sec["t_end"])
    return AnalysisOptions(**{**opts.__dict__, **kw})


def _slowfast(sec: dict) -> SlowFastSetup:
    slow_vars = tuple(sec.get("slow_vars", ("y", "z")))
    beta = sec.get("beta")
    if not isinstance(beta, list) or not all(isinstance(b, str) for b in beta):
        raise ParseError("[slowfast] beta must be a list of expressions")
    fam = SlowFastFamily.from_strings(_expr(sec, "H", "slowfast"), beta, slow_vars)
    mode = sec.get("mode", "equilibrium")
    if mode not in ("equilibrium", "periodic"):
        raise ParseError(f"[slowfast] mode must be 'equilibrium' or 'periodic', not {mode!r}")
    eps = _floats(sec.get("eps", DEFAULT_EPS), None, "[slowfast] eps")
    point = _floats(sec["point"], 1 + len(slow_vars), "[slowfast] point") if "point" in sec else None
    if mode == "equilibrium" and point is None:
        raise ParseError("[slowfast] equilibrium mode needs 'point'")
    extra = {}
    if "seed_center" in sec:
        extra["seed_center"] = _floats(sec["seed_center"], 2, "[slowfast] seed_center")
    if "seed_radius" in sec:
        extra["seed_radius"] = float(sec["seed_radius"])
    if "tol" in sec:
        extra["tol"] = float(sec["tol"])
    if "seed_samples" in sec:
        extra["seed_samples"] = int(sec["seed_samples"])
    return SlowFastSetup(fam, mode, eps, point, **extra)


def parse_system(text: str, source: str = "") -> SystemFile:
    """Build a :class:`SystemFile` from TOML text.

    Raises
    ------
    ParseError
        Malformed TOML, unknown sections, missing keys or bad expressions.
    ModeMismatch
        Zero or several system kinds, or ``[field]`` without ``[surface]``.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"{source or 'input'}: {exc}") from None
    unknown = {k for k, v in data.items() if isinstance(v, dict)} - _SECTIONS
    if unknown:
        raise ParseError(f"unknown section(s): {', '.join(sorted(unknown))}")
    has_field, has_surface = "field" in data, "surface" in data
    kinds = [k for k, present in (("surface", has_field or has_surface),
                                  ("constrained", "constrained" in data),
                                  ("slowfast", "slowfast" in data)) if present]
    if len(kinds) != 1:
        found = ", ".join(kinds) if kinds else "none"
        raise ModeMismatch(f"exactly one system kind is allowed per file (found: {found})")
    if has_field != has_surface:
        raise ModeMismatch("[field] and [surface] must be given together")
    title = str(data.get("title", ""))
    analysis = _analysis(data.get("analysis", {}))
    mode = Mode(kinds[0])
    if mode is Mode.SURFACE:
        fs, ss = data["field"], data["surface"]
        X = VectorField3.from_strings(*(_expr(fs, k, "field") for k in ("alpha", "beta", "gamma")))
        f, g = _expr(ss, "f", "surface"), _expr(ss, "g", "surface")
        try:
            S = SurfaceSpec.from_strings(f, g)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"[surface] {exc}") from None
        return SystemFile(mode, title, field=X, surface=S, analysis=analysis, source=source)
    if mode is Mode.CONSTRAINED:
        cs_sec = data["constrained"]
        A = [[_expr(cs_sec, f"A{i}{j}", "constrained") for j in (1, 2)] for i in (1, 2)]
        F = [_expr(cs_sec, f"F{i}", "constrained") for i in (1, 2)]
        return SystemFile(mode, title, constrained=ConstrainedSystem.direct(A, F),
                          analysis=analysis, source=source)
    return SystemFile(mode, title, slowfast=_slowfast(data["slowfast"]), analysis=analysis,
                      source=source)


def load_system(path: str | Path) -> SystemFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_system(text, str(path))


def fixture_names() -> list[str]:
    """Names of the systems shipped with the package."""
    root = resources.files("impasse_lab") / "data"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def fixture_path(name: str) -> Path:
    path = Path(str(resources.files("impasse_lab") / "data" / f"{name}.toml"))
    if not path.exists():
        raise KeyError(f"no fixture named {name!r}")
    return path


def load_fixture(name: str) -> SystemFile:
    return load_system(fixture_path(name))
