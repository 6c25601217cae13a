"""Model definition and validation.

The Hamiltonian is H = -Delta - alpha*delta(x - Sigma) + point interactions,
where Sigma is the line x2 = 0 and each point interaction sits at
y_i = (c_i, a_i) with a_i != 0, parametrized by a coupling beta_i through
logarithmic boundary conditions.  Units: hbar = 2m = 1, so all energies and
lengths are dimensionless and the line continuum starts at -alpha^2/4.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace


@dataclass(frozen=True)
class DotSite:
    """One point interaction: longitudinal position c, signed distance a
    from the line, coupling parameter beta."""
    c: float
    a: float
    beta: float


@dataclass(frozen=True)
class QuadratureSpec:
    """Numerical knobs shared by all quadrature-backed operations."""
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    eta: float = 1e-5            # offset for lambda + i*eta cross-checks
    t_cutoff: float = 40.0       # exponent budget before tail truncation
    max_subdivisions: int = 200


@dataclass(frozen=True)
class ModelConfig:
    alpha: float
    sites: tuple[DotSite, ...]
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)

    @property
    def n(self) -> int:
        return len(self.sites)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]


@dataclass(frozen=True)
class SymmetryReport:
    symmetric: bool
    pairs: tuple[tuple[int, int], ...]   # index pairs mapped onto each other


class ConfigError(ValueError):
    """Raised for malformed configuration documents."""


def validate_model(cfg: ModelConfig) -> ValidationReport:
    """Check the structural constraints; report-style, never raises."""
    bad = []
    if not cfg.alpha > 0:
        bad.append("alpha must be positive")
    if len(cfg.sites) == 0:
        bad.append("at least one site required")
    for i, s in enumerate(cfg.sites):
        if s.a == 0:
            bad.append(f"site {i} lies on the line (a = 0)")
    for i in range(len(cfg.sites)):
        for j in range(i + 1, len(cfg.sites)):
            si, sj = cfg.sites[i], cfg.sites[j]
            if si.c == sj.c and si.a == sj.a:
                bad.append(f"sites {i} and {j} coincide")
    q = cfg.quadrature
    for name in ("rel_tol", "abs_tol", "eta", "t_cutoff"):
        if not getattr(q, name) > 0:
            bad.append(f"quadrature.{name} must be positive")
    if q.max_subdivisions < 1:
        bad.append("quadrature.max_subdivisions must be >= 1")
    return ValidationReport(ok=not bad, violations=tuple(bad))


def detect_mirror_symmetry(cfg: ModelConfig, tol: float = 1e-12) -> SymmetryReport:
    """True iff the site multiset is invariant under (c, a, beta) -> (c, -a, beta).

    Embedded eigenvalues survive the line perturbation exactly in this case,
    so downstream resonance searches flag the affected seeds.
    """
    unused = list(range(len(cfg.sites)))
    pairs = []
    for i, s in enumerate(cfg.sites):
        if i not in unused:
            continue
        match = None
        for j in unused:
            t = cfg.sites[j]
            if (abs(s.c - t.c) <= tol and abs(s.a + t.a) <= tol
                    and abs(s.beta - t.beta) <= tol):
                match = j
                break
        if match is None:
            return SymmetryReport(False, ())
        unused.remove(i)
        if match != i:
            unused.remove(match)
        pairs.append((min(i, match), max(i, match)))
    return SymmetryReport(True, tuple(pairs))


_SITE_KEYS = {"c", "a", "beta"}
_QUAD_KEYS = {"rel_tol", "abs_tol", "eta", "t_cutoff", "max_subdivisions"}
_TOP_KEYS = {"alpha", "sites", "quadrature"}


def config_from_dict(doc: dict) -> ModelConfig:
    """Strict schema: unknown keys are rejected, defaults only for quadrature."""
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "alpha" not in doc:
        raise ConfigError("missing required key 'alpha'")
    if "sites" not in doc:
        raise ConfigError("missing required key 'sites'")
    alpha = doc["alpha"]
    if not isinstance(alpha, (int, float)) or isinstance(alpha, bool):
        raise ConfigError("'alpha' must be a number")
    raw_sites = doc["sites"]
    if not isinstance(raw_sites, list) or not raw_sites:
        raise ConfigError("'sites' must be a non-empty array; at least one site")
    sites = []
    for k, entry in enumerate(raw_sites):
        if not isinstance(entry, dict):
            raise ConfigError(f"sites[{k}] must be an object")
        unknown = set(entry) - _SITE_KEYS
        if unknown:
            raise ConfigError(f"sites[{k}]: unknown keys {sorted(unknown)}")
        missing = _SITE_KEYS - set(entry)
        if missing:
            raise ConfigError(f"sites[{k}]: missing keys {sorted(missing)}")
        for key in _SITE_KEYS:
            v = entry[key]
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ConfigError(f"sites[{k}].{key} must be a number")
        sites.append(DotSite(c=float(entry["c"]), a=float(entry["a"]),
                             beta=float(entry["beta"])))
    quad = QuadratureSpec()
    if "quadrature" in doc:
        qd = doc["quadrature"]
        if not isinstance(qd, dict):
            raise ConfigError("'quadrature' must be an object")
        unknown = set(qd) - _QUAD_KEYS
        if unknown:
            raise ConfigError(f"quadrature: unknown keys {sorted(unknown)}")
        kwargs = {}
        for key, v in qd.items():
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ConfigError(f"quadrature.{key} must be a number")
            kwargs[key] = int(v) if key == "max_subdivisions" else float(v)
        quad = replace(quad, **kwargs)
    cfg = ModelConfig(alpha=float(alpha), sites=tuple(sites), quadrature=quad)
    report = validate_model(cfg)
    if not report.ok:
        raise ConfigError("; ".join(report.violations))
    return cfg


def parse_config(path: str) -> ModelConfig:
    """Load and validate a JSON config file."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, "
                          f"column {exc.colno}: {exc.msg}") from exc
    return config_from_dict(doc)
