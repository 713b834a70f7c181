"""Built-in manifold catalog and user manifest loading.

Each entry binds a topological descriptor to the metric backend that
realizes it (or to stored analytic integrals when no chart is needed).
User manifests are flat key-value INI sections, one manifold per
section; built-in names cannot be overridden.
"""

from __future__ import annotations

import configparser
import dataclasses
import math

from .assembly import ManifoldDescriptor
from .errors import DescriptorError, UsageError
from .geometry import (CurvatureIntegrals, FlatTorus, GeometryBackend,
                       MultiTaubNut, RoundS4, Schwarzschild,
                       integrate_invariants)


@dataclasses.dataclass(frozen=True)
class CatalogEntry:
    descriptor: ManifoldDescriptor
    backend: GeometryBackend | None  # None when purely analytic

    @property
    def name(self) -> str:
        return self.descriptor.name


def _k3_integrals() -> CurvatureIntegrals:
    # hyperkahler K3: scalar and trace-free Ricci vanish, the curvature
    # norm is pinned by the Euler and signature integrals
    endo = 192.0 * math.pi ** 2
    return CurvatureIntegrals(
        I_R_full=4.0 * endo, I_R_endo=endo, I_r=0.0, I_s2=0.0,
        I_gb=24.0, I_p=-16.0, error_estimate=0.0,
        resolution=0, cutoff_rho=None, node_count=0)


def _builtins() -> dict:
    entries = [
        CatalogEntry(
            ManifoldDescriptor(
                name="flat-torus", kind="compact", b0=1, b1=4,
                bplus_l2=3, bminus_l2=3, geometry="flat-torus"),
            FlatTorus()),
        CatalogEntry(
            ManifoldDescriptor(
                name="round-s4", kind="compact", b0=1, b1=0,
                bplus_l2=0, bminus_l2=0, geometry="round-s4"),
            RoundS4(a=1.0)),
        CatalogEntry(
            ManifoldDescriptor(
                name="k3-analytic", kind="compact", b0=1, b1=0,
                bplus_l2=3, bminus_l2=19, geometry="analytic",
                analytic_integrals=_k3_integrals()),
            None),
        CatalogEntry(
            ManifoldDescriptor(
                name="taub-nut-1", kind="alf", b0=1, b1=0,
                bplus_l2=0, bminus_l2=1, b0_D="derive", b1_D="derive",
                h1_neck_trivial=True, geometry="multi-taub-nut"),
            MultiTaubNut(mass=0.5, centers=((0.0, 0.0, 0.0),))),
        CatalogEntry(
            ManifoldDescriptor(
                name="taub-nut-2", kind="alf", b0=1, b1=0,
                bplus_l2=0, bminus_l2=2, b0_D="derive", b1_D="derive",
                h1_neck_trivial=True, geometry="multi-taub-nut"),
            MultiTaubNut(mass=0.5,
                         centers=((0.0, 0.0, -1.0), (0.0, 0.0, 1.0)))),
        CatalogEntry(
            ManifoldDescriptor(
                name="schwarzschild", kind="alf", b0=1, b1=0,
                bplus_l2=1, bminus_l2=1, b0_D="derive", b1_D="derive",
                h1_neck_trivial=False, geometry="schwarzschild"),
            Schwarzschild(mass=1.0)),
    ]
    return {e.name: e for e in entries}


BUILTINS = _builtins()


def builtin_names() -> tuple[str, ...]:
    return tuple(BUILTINS)


def get_entry(name: str, extra: dict | None = None) -> CatalogEntry:
    if name in BUILTINS:
        return BUILTINS[name]
    if extra and name in extra:
        return extra[name]
    known = ", ".join(sorted(BUILTINS) + sorted(extra or ())) or "none"
    raise UsageError("manifold-unknown", f"{name!r}; known: {known}")


def entry_integrals(entry: CatalogEntry, resolution: int = 4,
                    cutoff_rho: float | None = None) -> CurvatureIntegrals:
    """Curvature integrals of an entry, analytic ones taking precedence."""
    if entry.descriptor.analytic_integrals is not None:
        return entry.descriptor.analytic_integrals
    if entry.backend is None:
        raise DescriptorError(
            "integrals-missing",
            f"{entry.name}: neither analytic integrals nor a backend")
    return integrate_invariants(entry.backend, resolution=resolution,
                                cutoff_rho=cutoff_rho)


# ---------------------------------------------------------------- manifests

_DESC_KEYS = {
    "kind": str, "b0": int, "b1": int, "bplus_l2": int, "bminus_l2": int,
    "torsion_order": int, "b0_d": None, "b1_d": None,
    "h1_neck_trivial": None, "geometry": str,
    "vol_flat_torus_factor": float,
}
_BACKEND_KEYS = ("mass", "centers", "string_signs", "radius", "radii")
_ANALYTIC_KEYS = ("i_r_full", "i_r_endo", "i_ricci", "i_s2", "i_gb", "i_p")


def _parse_bool(section: str, key: str, raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise DescriptorError("manifest-value",
                          f"[{section}] {key} = {raw!r} is not a boolean")


def _parse_dirichlet(section: str, key: str, raw: str):
    raw = raw.strip()
    if raw == "derive":
        return "derive"
    try:
        return int(raw)
    except ValueError:
        raise DescriptorError(
            "manifest-value",
            f"[{section}] {key} = {raw!r}; expected an integer or 'derive'")


def _parse_floats(section: str, key: str, raw: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in raw.replace(",", " ").split())
    except ValueError:
        raise DescriptorError("manifest-value",
                              f"[{section}] {key} = {raw!r}")


def _backend_from(section: str, geometry: str, opts: dict):
    mass = float(opts["mass"]) if "mass" in opts else None
    if geometry == "analytic":
        return None
    if geometry == "flat-torus":
        radii = _parse_floats(section, "radii", opts.get("radii", "1 1 1 1"))
        if len(radii) != 4:
            raise DescriptorError("manifest-value",
                                  f"[{section}] radii needs 4 entries")
        return FlatTorus(radii=radii)
    if geometry == "round-s4":
        return RoundS4(a=float(opts.get("radius", 1.0)))
    if geometry == "multi-taub-nut":
        flat = _parse_floats(section, "centers", opts.get("centers", "0 0 0"))
        if len(flat) % 3:
            raise DescriptorError(
                "manifest-value",
                f"[{section}] centers needs 3 floats per center")
        centers = tuple(tuple(flat[i:i + 3]) for i in range(0, len(flat), 3))
        signs = None
        if "string_signs" in opts:
            signs = tuple(int(v) for v in
                          _parse_floats(section, "string_signs",
                                        opts["string_signs"]))
        return MultiTaubNut(mass=mass if mass is not None else 0.5,
                            centers=centers, string_signs=signs)
    if geometry == "schwarzschild":
        return Schwarzschild(mass=mass if mass is not None else 1.0)
    raise DescriptorError("geometry-unknown",
                          f"[{section}] geometry = {geometry!r}")


def _analytic_from(section: str, opts: dict) -> CurvatureIntegrals | None:
    present = [k for k in _ANALYTIC_KEYS if k in opts]
    if not present:
        return None
    if len(present) != len(_ANALYTIC_KEYS):
        missing = sorted(set(_ANALYTIC_KEYS) - set(present))
        raise DescriptorError(
            "manifest-value",
            f"[{section}] analytic integrals incomplete, missing {missing}")
    val = {k: float(opts[k]) for k in _ANALYTIC_KEYS}
    return CurvatureIntegrals(
        I_R_full=val["i_r_full"], I_R_endo=val["i_r_endo"],
        I_r=val["i_ricci"], I_s2=val["i_s2"], I_gb=val["i_gb"],
        I_p=val["i_p"], error_estimate=0.0, resolution=0,
        cutoff_rho=None, node_count=0)


def parse_manifest(path: str) -> dict:
    """Load user manifolds from an INI manifest; returns name -> entry."""
    parser = configparser.ConfigParser(interpolation=None)
    read = parser.read(path)
    if not read:
        raise UsageError("manifest-unreadable", str(path))
    out: dict[str, CatalogEntry] = {}
    for section in parser.sections():
        if section in BUILTINS:
            raise DescriptorError(
                "manifest-shadows-builtin",
                f"[{section}] collides with a built-in entry")
        opts = dict(parser[section])
        unknown = (set(opts) - set(_DESC_KEYS) - set(_BACKEND_KEYS)
                   - set(_ANALYTIC_KEYS))
        if unknown:
            raise DescriptorError(
                "manifest-key-unknown",
                f"[{section}] unknown keys {sorted(unknown)}")
        kw = {"name": section}
        for key in ("kind", "geometry"):
            if key in opts:
                kw[key] = opts[key].strip()
        for key in ("b0", "b1", "bplus_l2", "bminus_l2", "torsion_order"):
            if key in opts:
                try:
                    kw[key] = int(opts[key])
                except ValueError:
                    raise DescriptorError("manifest-value",
                                          f"[{section}] {key} = {opts[key]!r}")
        if "vol_flat_torus_factor" in opts:
            kw["vol_flat_torus_factor"] = float(opts["vol_flat_torus_factor"])
        if "b0_d" in opts:
            kw["b0_D"] = _parse_dirichlet(section, "b0_d", opts["b0_d"])
        if "b1_d" in opts:
            kw["b1_D"] = _parse_dirichlet(section, "b1_d", opts["b1_d"])
        if "h1_neck_trivial" in opts:
            kw["h1_neck_trivial"] = _parse_bool(section, "h1_neck_trivial",
                                                opts["h1_neck_trivial"])
        analytic = _analytic_from(section, opts)
        if analytic is not None:
            kw["analytic_integrals"] = analytic
        for key in ("b0", "b1", "bplus_l2", "bminus_l2", "kind"):
            if key not in kw:
                raise DescriptorError("manifest-key-missing",
                                      f"[{section}] needs {key}")
        desc = ManifoldDescriptor(**kw)
        backend = _backend_from(section, desc.geometry, opts)
        if backend is None and analytic is None:
            raise DescriptorError(
                "manifest-incomplete",
                f"[{section}] analytic geometry needs the i_* integral keys")
        out[section] = CatalogEntry(descriptor=desc, backend=backend)
    return out
