"""Batch front door for the workbench.

Five commands over a shared configuration file::

    sixvertex spectrum --config run.cfg [--sector S] [--out path]
                       [--format json|csv] [--seed n]
    sixvertex bethe    ...   roots, residuals and norm determinants
    sixvertex qops     ...   Baxter polynomial data and functional checks
    sixvertex verify   ...   the full identity suite for the model
    sixvertex norms    ...   star-form Gram tables per sector

Exit status: 0 when every check lands inside its tolerance, 2 when at
least one check fails, 1 for any configuration problem.

Configuration grammar
---------------------
Plain text, one ``key = value`` per line, ``#`` starts a comment.

=================  ====================================================
``model``          ``homogeneous``, ``alternating``, ``cyclic`` (alias
                   ``zr``), ``unimodular`` (alias ``case-i``), ``real``
                   (alias ``case-ii``), ``modulus-paired`` (alias
                   ``case-iii``) or ``custom``.
``sites``          chain length N (required).
``gamma-over-pi``  anisotropy angle divided by pi; ``gamma`` takes the
                   raw angle instead (exactly one of the two).
``twist``          boundary-phase exponent k (default 0).
``period``         r for ``cyclic``; optional declared period for
                   ``custom``.
``modulus``        modulus split for ``modulus-paired`` (default drawn
                   from the seed).
``phases-over-pi`` comma list: the full phase list for ``unimodular``,
                   or the first-half phases for ``modulus-paired``.
``magnitudes``     comma list of site magnitudes for ``real``.
``eta.J``          per-site inhomogeneity for ``custom``; complex
                   values are written ``[re, im]``,
                   ``{modulus: m, phase-over-pi: p}``, or a bare real.
``sectors``        comma list of magnon numbers to keep.
``seed``           integer feeding every random draw (default 0).
``out``            default report path (flag overrides).
``format``         ``json`` (default) or ``csv``.
``tolerance.X``    override for check named X, e.g.
                   ``tolerance.tq-relation = 1e-9``.
=================  ====================================================

A product of inhomogeneities away from one is renormalized and noted in
the report header.  Reports are byte-deterministic for a fixed
configuration and seed; random spectral-parameter samples come from the
seed alone.  ``verify`` always works on the full spin space, ignoring
the sector filter.
"""

from __future__ import annotations

import cmath
import csv
import dataclasses
import io
import json
import math
import re
import sys

import click
import numpy as np

from . import bethe, hermitian, lattice, models, qoper, symmetry, translation, vertex
from .lattice import ModelParams, SingularPointError
from .qoper import DegenerateTwistError
from .symmetry import RealityConditionError

SCHEMA_VERSION = 1

_KIND_ALIASES = {
    "case-i": "unimodular",
    "case-ii": "real",
    "case-iii": "modulus-paired",
    "zr": "cyclic",
}

_KNOWN_KINDS = ("homogeneous", "alternating", "cyclic", "unimodular",
                "real", "modulus-paired", "custom")

DEFAULT_TOLERANCES = {
    "family-commutation": 1e-12,
    "exchange-relation": 1e-12,
    "spectrum-count": 0.0,
    "root-equation-residuals": 1e-8,
    "eigenvalue-cross-check": 1e-9,
    "state-collinearity": 1e-9,
    "state-ratio": 1e-6,
    "norm-determinant-contraction": 1e-8,
    "q-spectral-vs-resummed": 1e-8,
    "q-trace-vs-resummed": 1e-8,
    "tq-relation": 1e-10,
    "q-wronskian": 1e-10,
    "transfer-wronskian": 1e-10,
    "zero-field-closed-form": 1e-8,
    "symmetry-involutions": 1e-12,
    "charge-parity-display": 1e-10,
    "time-reversal-display": 1e-10,
    "cpt-display": 1e-10,
    "cpt-root-map": 1e-9,
    "metric-hermiticity": 1e-12,
    "metric-conjugation-family": 1e-10,
    "star-conjugation-family": 1e-10,
    "star-orthogonality": 1e-8,
    "star-norm-match": 1e-8,
    "translation-dual-construction": 1e-10,
    "translation-period-product": 1e-12,
    "translation-period-phase": 1e-10,
    "translation-eigenvalues": 1e-8,
    "quasi-shift-dual-construction": 1e-10,
    "quasi-shift-eigenvalues": 1e-8,
    "hamiltonian-locality": 1e-10,
    "local-support-window": 1e-10,
    "xxz-display": 1e-10,
    "alternating-plus-display": 1e-10,
    "alternating-minus-display": 1e-10,
    "alternating-total-display": 1e-10,
    "cyclic-generator-order": 1e-12,
    "cyclic-transfer-scaling": 1e-10,
    "translation-transfer-scaling": 1e-10,
    "cyclic-hamiltonian-rotation": 1e-10,
    "charge-parity-on-generators": 1e-10,
    "time-reversal-on-generators": 1e-10,
    "shift-ratio-dual-construction": 1e-11,
    "shift-ratio-eigenvalues": 1e-8,
    "spin-conjugation-displays": 1e-12,
    "alternating-symmetry-displays": 1e-10,
    "alternating-conjugation-displays": 1e-10,
}

# the q-oscillator trace comparison is capped to keep the Fock-space
# blowup (truncation x spin dimension) inside desk memory
_TRACE_SITE_CAP = 6
_TRACE_LEVELS = 60
_TRACE_TWIST_SCALE = 1.3


class ConfigError(ValueError):
    """Anything wrong with the run configuration (exit code 1)."""


# ----------------------------------------------------------------------
# configuration parsing


def parse_complex_scalar(text: str) -> complex:
    """Read ``[re, im]``, ``{modulus: m, phase-over-pi: p}`` or a real."""
    t = text.strip()
    if t.startswith("["):
        try:
            parts = json.loads(t)
            if len(parts) != 2:
                raise ValueError
            return complex(float(parts[0]), float(parts[1]))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad complex literal {text!r}") from exc
    if t.startswith("{"):
        m = re.fullmatch(
            r"\{\s*modulus\s*:\s*([^,\s}]+)\s*,"
            r"\s*phase-over-pi\s*:\s*([^,\s}]+)\s*\}", t)
        if m is None:
            raise ConfigError(f"bad complex literal {text!r}; expected "
                              "{modulus: m, phase-over-pi: p}")
        try:
            modulus, phase = float(m.group(1)), float(m.group(2))
        except ValueError as exc:
            raise ConfigError(f"bad complex literal {text!r}") from exc
        return modulus * cmath.exp(1j * math.pi * phase)
    try:
        return complex(float(t))
    except ValueError as exc:
        raise ConfigError(f"bad numeric literal {text!r}") from exc


def _read_pairs(text: str) -> dict:
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        pairs[key] = value
    return pairs


def _pop_int(pairs, key, default=None):
    if key not in pairs:
        return default
    raw = pairs.pop(key)
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{key} must be an integer, got {raw!r}") from exc


def _pop_float(pairs, key, default=None):
    if key not in pairs:
        return default
    raw = pairs.pop(key)
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key} must be a number, got {raw!r}") from exc


def _pop_float_list(pairs, key):
    if key not in pairs:
        return None
    raw = pairs.pop(key)
    try:
        return [float(part) for part in raw.split(",")]
    except ValueError as exc:
        raise ConfigError(f"{key} must be a comma list of numbers") from exc


def parse_sector_list(raw: str, n_sites: int) -> tuple:
    sectors = []
    for part in raw.split(","):
        part = part.strip()
        try:
            value = int(part)
        except ValueError as exc:
            raise ConfigError(f"bad sector {part!r}") from exc
        if not 0 <= value <= n_sites:
            raise ConfigError(f"sector {value} outside 0..{n_sites}")
        sectors.append(value)
    return tuple(dict.fromkeys(sectors))


@dataclasses.dataclass
class RunConfig:
    model: models.NamedModel
    sectors: tuple | None
    seed: int
    out: str | None
    fmt: str
    tolerances: dict
    warnings: list

    def tolerance(self, name: str) -> float:
        return self.tolerances.get(name, DEFAULT_TOLERANCES[name])


def _conjugation_closed_phases(count: int, rng) -> list:
    """Phases over pi whose unit-circle points close under conjugation."""
    half = count // 2
    draws = list(rng.uniform(0.05, 0.85, half))
    middle = [0.0] if count % 2 else []
    return draws + middle + [-p for p in reversed(draws)]


def _resolve_reality_model(kind, n, gamma, k, fields, seed, warnings):
    phases = _pop_float_list(fields, "phases-over-pi")
    magnitudes = _pop_float_list(fields, "magnitudes")
    modulus = _pop_float(fields, "modulus")
    explicit = phases is not None or magnitudes is not None \
        or modulus is not None
    if not explicit:
        return models.reality_case_model(n, kind, gamma, k, seed=seed)

    if kind == "unimodular":
        if phases is None or len(phases) != n:
            raise ConfigError("unimodular model needs phases-over-pi with "
                              f"{n} entries")
        etas = [cmath.exp(1j * math.pi * p) for p in phases]
    elif kind == "real":
        if magnitudes is None or len(magnitudes) != n:
            raise ConfigError(f"real model needs magnitudes with {n} entries")
        etas = [complex(m) for m in magnitudes]
    else:  # modulus-paired
        if n % 2:
            raise ConfigError("modulus-paired model needs an even chain")
        half = n // 2
        if modulus is None:
            modulus = 1.15 + 0.45 * float(
                np.random.default_rng(seed).uniform())
        if phases is None:
            phases = _conjugation_closed_phases(
                half, np.random.default_rng(seed + 1))
        if len(phases) != half:
            raise ConfigError("modulus-paired model needs phases-over-pi "
                              f"with {half} entries (first half)")
        inner = [cmath.exp(1j * math.pi * p) for p in phases]
        etas = [w / modulus for w in inner] \
            + [modulus / w for w in reversed(inner)]

    params = ModelParams.from_angles(n, gamma, k, etas)
    try:
        found = symmetry.detect_reality_case(params)
    except RealityConditionError as exc:
        raise ConfigError(
            f"explicit inhomogeneities fail validation: {exc}") from exc
    if found != kind:
        raise ConfigError(f"explicit inhomogeneities classify as {found}, "
                          f"not {kind}")
    return models.NamedModel(kind=kind, params=params)


def _resolve_model(fields: dict, warnings: list) -> models.NamedModel:
    if "model" not in fields:
        raise ConfigError("missing key 'model'")
    raw_kind = fields.pop("model")
    kind = _KIND_ALIASES.get(raw_kind, raw_kind)
    if kind not in _KNOWN_KINDS:
        raise ConfigError(f"unknown model {raw_kind!r}")

    n = _pop_int(fields, "sites")
    if n is None or n < 2:
        raise ConfigError("'sites' must be an integer >= 2")
    gamma_over_pi = _pop_float(fields, "gamma-over-pi")
    gamma_raw = _pop_float(fields, "gamma")
    if (gamma_over_pi is None) == (gamma_raw is None):
        raise ConfigError("give exactly one of gamma-over-pi or gamma")
    gamma = math.pi * gamma_over_pi if gamma_raw is None else gamma_raw
    if abs(math.sin(gamma)) < 1e-12:
        raise ConfigError("anisotropy angle must avoid multiples of pi")
    k = _pop_float(fields, "twist", 0.0)
    seed = _pop_int(fields, "seed", 0)
    fields["seed"] = str(seed)     # re-read later by load_config

    try:
        if kind == "homogeneous":
            return models.homogeneous_model(n, gamma, k)
        if kind == "alternating":
            return models.alternating_model(n, gamma, k)
        if kind == "cyclic":
            period = _pop_int(fields, "period")
            if period is None:
                raise ConfigError("cyclic model needs 'period'")
            return models.cyclic_model(n, period, gamma, k)
        if kind in ("unimodular", "real", "modulus-paired"):
            return _resolve_reality_model(kind, n, gamma, k, fields, seed,
                                          warnings)
        # custom
        etas = []
        for j in range(1, n + 1):
            key = f"eta.{j}"
            if key not in fields:
                raise ConfigError(f"custom model missing {key}")
            etas.append(parse_complex_scalar(fields.pop(key)))
        period = _pop_int(fields, "period")
        params = ModelParams.from_angles(n, gamma, k, etas, r=period)
        return models.custom_model(params)
    except ConfigError:
        raise
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str, *, sector=None, out=None, fmt=None,
                seed=None) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    fields = _read_pairs(text)

    if seed is not None:
        try:
            fields["seed"] = str(int(seed))
        except ValueError as exc:
            raise ConfigError(f"bad seed {seed!r}") from exc

    warnings: list = []
    model = _resolve_model(fields, warnings)
    n = model.params.n_sites

    if sector is not None:
        sectors = parse_sector_list(str(sector), n)
    elif "sectors" in fields:
        sectors = parse_sector_list(fields.pop("sectors"), n)
    else:
        sectors = None

    seed_value = _pop_int(fields, "seed", 0)
    out_value = out if out is not None else fields.pop("out", None)
    fmt_value = fmt if fmt is not None else fields.pop("format", "json")
    if fmt_value not in ("json", "csv"):
        raise ConfigError(f"format must be json or csv, got {fmt_value!r}")

    tolerances = {}
    for key in list(fields):
        if not key.startswith("tolerance."):
            continue
        name = key[len("tolerance."):]
        if name not in DEFAULT_TOLERANCES:
            raise ConfigError(f"unknown tolerance name {name!r}")
        tolerances[name] = _pop_float(fields, key)
    if fields:
        stray = ", ".join(sorted(fields))
        raise ConfigError(f"unrecognized keys: {stray}")

    if model.params.eta_renormalized:
        warnings.append("inhomogeneity product renormalized to one")
    return RunConfig(model=model, sectors=sectors, seed=seed_value,
                     out=out_value, fmt=fmt_value, tolerances=tolerances,
                     warnings=warnings)


# ----------------------------------------------------------------------
# check bookkeeping


@dataclasses.dataclass
class CheckResult:
    name: str
    identity: str
    residual: float | None
    tolerance: float | None
    passed: bool | None        # None means skipped
    detail: str = ""

    def to_dict(self) -> dict:
        entry = {"name": self.name, "identity": self.identity,
                 "residual": self.residual, "tolerance": self.tolerance,
                 "pass": self.passed}
        if self.detail:
            entry["detail"] = self.detail
        return entry


class Workbench:
    """Lazy shared state for one command run."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.model = config.model
        self.params = config.model.params
        self.rng = np.random.default_rng(config.seed)
        self._spectra = None

    def check(self, name, identity, residual, detail="") -> CheckResult:
        tol = self.config.tolerance(name)
        value = float(residual)
        ok = bool(math.isfinite(value) and value <= tol)
        return CheckResult(name, identity, value, tol, ok, detail)

    def skip(self, name, identity, reason) -> CheckResult:
        return CheckResult(name, identity, None,
                           self.config.tolerance(name), None, reason)

    def zeta(self) -> complex:
        radius = float(self.rng.uniform(0.6, 1.4))
        phase = float(self.rng.uniform(0.0, 2.0 * math.pi))
        return radius * cmath.exp(1j * phase)

    @property
    def spectra(self):
        if self._spectra is None:
            spectra = bethe.roots_from_spectrum(self.params)
            if self.params.r is not None:
                spectra = translation.attach_shift_scalars(spectra,
                                                           self.params)
            self._spectra = spectra
        return self._spectra

    def onshell(self, low=0, high=None, cap=None):
        """(magnons, record) pairs with certified root residuals."""
        tol = self.config.tolerance("root-equation-residuals")
        high = self.params.n_sites if high is None else high
        picked = []
        for spec in self.spectra:
            if not low <= spec.magnons <= high:
                continue
            for rec in spec.records:
                if rec.max_residual <= tol:
                    picked.append((spec.magnons, rec))
        if cap is not None:
            picked = picked[:cap]
        return picked

    def full_vectors(self, spec) -> np.ndarray:
        full = np.zeros((self.params.dim, len(spec.indices)), dtype=complex)
        full[spec.indices, :] = spec.vectors
        return full


def _rel(diff: np.ndarray, scale: float) -> float:
    return float(np.abs(diff).max() / max(scale, 1e-300))


def _scale(mat: np.ndarray) -> float:
    return float(np.abs(mat).max())


def _is_zsym_pattern(params: ModelParams) -> bool:
    r = params.r
    if r is None or r < 2 or params.n_sites % r:
        return False
    want = [(-1) ** r * cmath.exp(1j * math.pi * (2 * j - 1) / r)
            for j in range(1, params.n_sites + 1)]
    have = params.eta_by_site()
    return max(abs(a - b) for a, b in zip(have, want)) < 1e-9


def _is_homogeneous(params: ModelParams) -> bool:
    return max(abs(e - 1.0) for e in params.eta_by_site()) < 1e-12


# ----------------------------------------------------------------------
# verify suites


def _suite_family(wb: Workbench) -> list:
    params = wb.params
    worst, where = 0.0, ""
    for _ in range(5):
        z1, z2 = wb.zeta(), wb.zeta()
        t1 = vertex.transfer_matrix(z1, params)
        t2 = vertex.transfer_matrix(z2, params)
        rel = _rel(t1 @ t2 - t2 @ t1, _scale(t1) * _scale(t2))
        if rel > worst:
            worst, where = rel, f"worst at |z1|={abs(z1):.3f}, " \
                                f"|z2|={abs(z2):.3f}"
    fam = wb.check("family-commutation",
                   "transfer matrices at different spectral parameters "
                   "commute", worst, where)
    z = wb.zeta()
    exch = max(vertex.check_exchange(params, pair, z)
               for pair in range(1, params.n_sites))
    exc = wb.check("exchange-relation",
                   "adjacent inhomogeneity swaps intertwine the monodromy "
                   "through the braid weight", exch)
    return [fam, exc]


def _suite_roots(wb: Workbench) -> list:
    params = wb.params
    count = bethe.spectrum_record_count(wb.spectra)
    count_check = wb.check("spectrum-count",
                           "root records enumerate the full spin space",
                           abs(count - params.dim),
                           f"{count} records for dimension {params.dim}")
    worst = max(rec.max_residual for spec in wb.spectra
                for rec in spec.records)
    res_check = wb.check("root-equation-residuals",
                         "every record satisfies the root equations", worst)
    cross = 0.0
    for _ in range(3):
        z = wb.zeta()
        tmat = vertex.transfer_matrix(z, params)
        blocks = lattice.to_sector_blocks(tmat, params.n_sites)
        for spec in wb.spectra:
            vals = [rec.t_eigenvalue(z) for rec in spec.records]
            eigs = np.linalg.eigvals(blocks[spec.magnons])
            dist = bethe.multiset_distance(vals, eigs)
            cross = max(cross, dist / max(np.abs(eigs).max(), 1e-300))
    cross_check = wb.check("eigenvalue-cross-check",
                           "record eigenvalues reproduce dense "
                           "diagonalization sector by sector", cross,
                           "3 held-out spectral parameters")
    return [count_check, res_check, cross_check]


def _generic_pairs(pairs, params):
    """Drop records whose roots sit on an exact q^2-string.

    The closed coordinate-amplitude and norm-determinant formulas are
    generic-root statements; on a string their denominators vanish and
    double precision loses one digit per digit of string distance.
    Returns (kept pairs, number excluded).
    """
    kept = [(sec, rec) for sec, rec in pairs
            if bethe.string_distance(rec.roots, params)
            > bethe.DEGENERATE_STRING_CUTOFF]
    return kept, len(pairs) - len(kept)


def _suite_states(wb: Workbench) -> list:
    params = wb.params
    pairs = wb.onshell(low=1, high=min(3, params.n_sites // 2))
    pairs, excluded = _generic_pairs(pairs, params)
    if not pairs:
        reason = "no certified generic-root records available"
        return [wb.skip("state-collinearity",
                        "row and product constructions give the same "
                        "eigenvector", reason),
                wb.skip("state-ratio",
                        "row and product constructions share normalization",
                        reason)]
    worst_col, worst_ratio = 0.0, 0.0
    for _, rec in pairs:
        psi_a = bethe.algebraic_state(rec.roots, params,
                                      check_commute=False)
        psi_c = bethe.coordinate_state(rec.roots, params)
        coeff = np.vdot(psi_c, psi_a) / np.vdot(psi_c, psi_c)
        col = np.linalg.norm(psi_a - coeff * psi_c) \
            / np.linalg.norm(psi_a)
        worst_col = max(worst_col, float(col))
        worst_ratio = max(worst_ratio, abs(coeff - 1.0))
    detail = f"{len(pairs)} states with up to three magnons"
    if excluded:
        detail += f"; {excluded} string-degenerate records excluded"
    return [wb.check("state-collinearity",
                     "row and product constructions give the same "
                     "eigenvector", worst_col, detail),
            wb.check("state-ratio",
                     "row and product constructions share normalization",
                     worst_ratio, detail)]


def _suite_norms(wb: Workbench) -> list:
    params = wb.params
    pairs = wb.onshell(low=1, high=min(3, params.n_sites // 2))
    pairs, excluded = _generic_pairs(pairs, params)
    if not pairs:
        return [wb.skip("norm-determinant-contraction",
                        "norm determinant equals the annihilation-chain "
                        "coefficient",
                        "no certified generic-root records available")]
    worst = 0.0
    for _, rec in pairs:
        det = bethe.gaudin_korepin(rec.roots, params)
        scalar, _leak = bethe.contraction_oracle(rec.roots, params)
        worst = max(worst, abs(det - scalar) / max(abs(scalar), 1e-300))
    detail = f"{len(pairs)} states with up to three magnons"
    if excluded:
        detail += f"; {excluded} string-degenerate records excluded"
    return [wb.check("norm-determinant-contraction",
                     "norm determinant equals the annihilation-chain "
                     "coefficient", worst, detail)]


def _suite_qops(wb: Workbench) -> list:
    params = wb.params
    checks = []
    zs = [wb.zeta(), wb.zeta()]

    try:
        worst = max(_rel(qoper.q_operator(z, params, sign)
                         - qoper.q_operator_spectral(
                             z, params, sign, spectra=wb.spectra),
                         _scale(qoper.q_operator(z, params, sign)))
                    for z in zs for sign in (+1, -1))
        checks.append(wb.check("q-spectral-vs-resummed",
                               "root-synthesized Baxter operators match the "
                               "resummed construction", worst))
    except DegenerateTwistError as exc:
        checks.append(wb.skip("q-spectral-vs-resummed",
                              "root-synthesized Baxter operators match the "
                              "resummed construction", str(exc)))

    if params.n_sites <= _TRACE_SITE_CAP:
        scaled = dataclasses.replace(
            params, omega=_TRACE_TWIST_SCALE * params.omega)
        worst = max(
            _rel(qoper.q_operator_trace(z, scaled, sign,
                                        levels=_TRACE_LEVELS)
                 - qoper.q_operator(z, scaled, sign),
                 _scale(qoper.q_operator(z, scaled, sign)))
            for z in zs for sign in (+1, -1))
        checks.append(wb.check("q-trace-vs-resummed",
                               "oscillator-space traces match the resummed "
                               "construction at a scaled twist", worst,
                               f"truncation {_TRACE_LEVELS}, twist scale "
                               f"{_TRACE_TWIST_SCALE}"))
    else:
        checks.append(wb.skip("q-trace-vs-resummed",
                              "oscillator-space traces match the resummed "
                              "construction at a scaled twist",
                              f"capped at {_TRACE_SITE_CAP} sites"))

    try:
        tq = max(qoper.check_tq(z, params, sign)
                 for z in zs for sign in (+1, -1))
        checks.append(wb.check("tq-relation",
                               "transfer matrix closes on each Baxter "
                               "operator", tq))
        wron = max(qoper.check_wronskian(z, params) for z in zs)
        checks.append(wb.check("q-wronskian",
                               "opposite Baxter operators close on the site "
                               "polynomial", wron))
        twron = max(qoper.check_t_wronskian(z, params) for z in zs)
        checks.append(wb.check("transfer-wronskian",
                               "transfer matrix is a bilinear in the two "
                               "Baxter operators", twron))
    except DegenerateTwistError as exc:
        for name, identity in (
                ("tq-relation", "transfer matrix closes on each Baxter "
                                "operator"),
                ("q-wronskian", "opposite Baxter operators close on the "
                                "site polynomial"),
                ("transfer-wronskian", "transfer matrix is a bilinear in "
                                       "the two Baxter operators")):
            checks.append(wb.skip(name, identity, str(exc)))

    if params.n_sites % 2 == 0:
        balanced = dataclasses.replace(params, omega=1.0 + 0.0j)
        worst = max(_rel(qoper.zero_field_q(z, balanced)
                         - qoper.baxter_zero_field_matrix(z, balanced),
                         _scale(qoper.baxter_zero_field_matrix(z, balanced)))
                    for z in zs)
        checks.append(wb.check("zero-field-closed-form",
                               "untwisted balanced-sector limit matches its "
                               "closed form", worst))
    else:
        checks.append(wb.skip("zero-field-closed-form",
                              "untwisted balanced-sector limit matches its "
                              "closed form", "needs an even chain"))
    return checks


def _suite_symmetry(wb: Workbench) -> list:
    params = wb.params
    names = (
        ("symmetry-involutions",
         "parity, spin flip and time reversal square to the identity"),
        ("charge-parity-display",
         "charge parity reflects the spectral parameter of the family"),
        ("time-reversal-display",
         "time reversal conjugates the family pointwise"),
        ("cpt-display",
         "combined conjugation fixes the family up to parameter "
         "conjugation"),
        ("cpt-root-map",
         "combined conjugation maps a root state to the conjugate-root "
         "state"),
    )
    try:
        symmetry.detect_reality_case(params)
    except RealityConditionError as exc:
        return [wb.skip(name, identity, str(exc))
                for name, identity in names]

    pieces = [symmetry.parity(params), symmetry.charge(params),
              symmetry.time_reversal(params)]
    eye = np.eye(params.dim)
    inv = max(_rel(op.compose(op).matrix - eye, 1.0) for op in pieces)
    checks = [wb.check(names[0][0], names[0][1], inv)]

    zs = [wb.zeta(), wb.zeta()]
    cp = max(max(symmetry.check_cp_transfer(params, z),
                 symmetry.check_cp_baxter(params, z, +1),
                 symmetry.check_cp_baxter(params, z, -1)) for z in zs)
    checks.append(wb.check(names[1][0], names[1][1], cp))
    tr = max(max(symmetry.check_time_reversal_transfer(params, z),
                 symmetry.check_time_reversal_baxter(params, z, +1),
                 symmetry.check_time_reversal_baxter(params, z, -1))
             for z in zs)
    checks.append(wb.check(names[2][0], names[2][1], tr))
    cpt = max(symmetry.check_cpt(params, z) for z in zs)
    checks.append(wb.check(names[3][0], names[3][1], cpt))

    sampled = wb.onshell(low=1, cap=4)
    if sampled:
        worst = max(symmetry.check_cpt_bethe_map(params, rec.roots)
                    for _, rec in sampled)
        checks.append(wb.check(names[4][0], names[4][1], worst,
                               f"{len(sampled)} sampled states"))
    else:
        checks.append(wb.skip(names[4][0], names[4][1],
                              "no certified records available"))
    return checks


def _suite_hermitian(wb: Workbench) -> list:
    params = wb.params
    names = (
        ("metric-hermiticity", "the conjugation metric is Hermitian"),
        ("metric-conjugation-family",
         "metric conjugation fixes the family up to parameter conjugation"),
        ("star-conjugation-family",
         "dressed conjugation fixes the family up to parameter "
         "conjugation"),
        ("star-orthogonality",
         "distinct root states are orthogonal in the dressed form"),
        ("star-norm-match",
         "dressed self-pairings reproduce the norm determinants"),
    )
    try:
        metric = hermitian.conjugation_metric(params)
    except (RealityConditionError, ArithmeticError) as exc:
        return [wb.skip(name, identity, str(exc))
                for name, identity in names]

    checks = [wb.check(names[0][0], names[0][1],
                       _rel(metric - metric.conj().T, _scale(metric)))]
    zs = [wb.zeta(), wb.zeta()]
    worst = max(max(hermitian.check_ddag_monodromy(params, z),
                    hermitian.check_ddag_family(params, z)) for z in zs)
    checks.append(wb.check(names[1][0], names[1][1], worst))
    try:
        star = max(hermitian.check_star_family(params, z) for z in zs)
        checks.append(wb.check(names[2][0], names[2][1], star))
    except DegenerateTwistError as exc:
        checks.append(wb.skip(names[2][0], names[2][1], str(exc)))

    magnons = min(2, params.n_sites // 2)
    try:
        offdiag, defect = hermitian.check_bethe_orthogonality(
            params, magnons,
            residual_cap=wb.config.tolerance("root-equation-residuals"))
        detail = f"sector with {magnons} magnons"
        checks.append(wb.check(names[3][0], names[3][1], offdiag, detail))
        checks.append(wb.check(names[4][0], names[4][1], defect, detail))
    except (bethe.OffShellError, DegenerateTwistError) as exc:
        checks.append(wb.skip(names[3][0], names[3][1], str(exc)))
        checks.append(wb.skip(names[4][0], names[4][1], str(exc)))
    return checks


def _suite_translation(wb: Workbench) -> list:
    params = wb.params
    names = (
        ("translation-dual-construction",
         "braid product and transfer product build the same period "
         "translation"),
        ("translation-period-product",
         "quasi-shifts compose to the period translation"),
        ("quasi-shift-dual-construction",
         "braid route and special-point transfer agree on every "
         "quasi-shift"),
        ("translation-period-phase",
         "translating through the whole chain leaves only the twist "
         "phase"),
        ("translation-eigenvalues",
         "period-translation action matches the root formula"),
        ("quasi-shift-eigenvalues",
         "quasi-shift action matches the root formula"),
    )
    if params.r is None:
        return [wb.skip(name, identity, "model declares no period")
                for name, identity in names]

    shift_r = translation.r_translation(params)
    checks = [wb.check(names[0][0], names[0][1],
                       _rel(shift_r
                            - translation.r_translation_from_transfer(params),
                            _scale(shift_r)))]
    quasis = {ell: translation.quasi_shift(params, ell)
              for ell in range(1, params.r + 1)}
    product = np.eye(params.dim)
    for ell in range(params.r, 0, -1):
        product = product @ quasis[ell]
    checks.append(wb.check(names[1][0], names[1][1],
                           _rel(product - shift_r, _scale(shift_r)),
                           "descending factor order"))
    worst = max(_rel(quasis[ell]
                     - translation.quasi_shift_from_transfer(params, ell),
                     _scale(quasis[ell]))
                for ell in range(1, params.r + 1))
    checks.append(wb.check(names[2][0], names[2][1], worst))

    sz = lattice.total_sz_diagonal(params.n_sites)
    phase = np.diag(np.exp(2j * math.pi * params.twist_exponent * sz))
    whole = np.linalg.matrix_power(shift_r, params.copies)
    checks.append(wb.check(names[3][0], names[3][1],
                           _rel(whole - phase, 1.0)))

    worst_t, worst_q = 0.0, 0.0
    for spec in wb.spectra:
        vecs = wb.full_vectors(spec)
        scale = np.abs(vecs).max(axis=0)
        tvals = np.array([rec.scalars["translation"]
                          for rec in spec.records])
        worst_t = max(worst_t, float(
            (np.abs(shift_r @ vecs - vecs * tvals) / scale).max()))
        for ell in range(1, params.r + 1):
            qvals = np.array([rec.scalars[f"quasi_shift_{ell}"]
                              for rec in spec.records])
            worst_q = max(worst_q, float(
                (np.abs(quasis[ell] @ vecs - vecs * qvals) / scale).max()))
    checks.append(wb.check(names[4][0], names[4][1], worst_t))
    checks.append(wb.check(names[5][0], names[5][1], worst_q))
    return checks


def _suite_hamiltonian(wb: Workbench) -> list:
    params = wb.params
    if params.r is None:
        return [wb.skip("hamiltonian-locality",
                        "log-derivative generators equal sums of local "
                        "blocks", "model declares no period")]
    checks = []
    gamma = float(np.angle(params.q))
    k = params.twist_exponent

    hams = {ell: translation.hamiltonian_logderiv(params, ell)
            for ell in range(1, params.r + 1)}
    worst = max(_rel(hams[ell] - translation.hamiltonian_from_local(
        params, ell), _scale(hams[ell])) for ell in hams)
    checks.append(wb.check("hamiltonian-locality",
                           "log-derivative generators equal sums of local "
                           "blocks", worst))
    if params.n_sites >= 2 * params.r:
        block = translation.local_hamiltonian_block(params, 1)
        defect = translation.support_defect(block, 1, params.r + 1,
                                            params.n_sites)
        checks.append(wb.check("local-support-window",
                               "the local block acts inside one period plus "
                               "a site", defect))
    else:
        checks.append(wb.skip("local-support-window",
                              "the local block acts inside one period plus "
                              "a site", "chain shorter than two periods"))

    if _is_homogeneous(params) and params.r == 1:
        built = models.xxz_hamiltonian(params.n_sites, gamma, k)
        checks.append(wb.check("xxz-display",
                               "nearest-neighbor spin display matches the "
                               "log-derivative generator",
                               _rel(built - hams[1], _scale(hams[1]))))
    if _is_zsym_pattern(params) and params.r == 2:
        try:
            plus, minus, total = models.alternating_hamiltonians(
                params.n_sites, gamma, k)
        except SingularPointError as exc:
            for name in ("alternating-plus-display",
                         "alternating-minus-display",
                         "alternating-total-display"):
                checks.append(wb.skip(name, "staggered-chain spin display "
                                            "matches its generator",
                                      str(exc)))
            return checks
        scale = _scale(hams[1])
        checks.append(wb.check("alternating-plus-display",
                               "even-sublattice spin display matches the "
                               "second generator",
                               _rel(plus - hams[2], scale)))
        checks.append(wb.check("alternating-minus-display",
                               "odd-sublattice spin display matches the "
                               "first generator",
                               _rel(minus - hams[1], scale)))
        checks.append(wb.check("alternating-total-display",
                               "summed spin display matches the generator "
                               "sum", _rel(total - hams[1] - hams[2],
                                           scale)))
    return checks


def _suite_cyclic(wb: Workbench) -> list:
    params = wb.params
    names = (
        ("cyclic-generator-order", "the cyclic generator has the period as "
                                   "its order"),
        ("cyclic-transfer-scaling", "the cyclic generator rotates the "
                                    "spectral parameter of the family"),
        ("translation-transfer-scaling",
         "the quasi-shift factor rotates the spectral parameter the other "
         "way"),
        ("cyclic-hamiltonian-rotation",
         "the cyclic generator permutes the local generators cyclically"),
        ("charge-parity-on-generators",
         "charge parity inverts the cyclic generator and the translation"),
        ("time-reversal-on-generators",
         "time reversal fixes the cyclic generator and the translation"),
    )
    if not _is_zsym_pattern(params):
        return [wb.skip(name, identity,
                        "inhomogeneities are not at the cyclic point")
                for name, identity in names]
    try:
        gen = translation.zr_generator(params)
    except SingularPointError as exc:
        return [wb.skip(name, identity, str(exc))
                for name, identity in names]

    r = params.r
    eye = np.eye(params.dim)
    checks = [wb.check(names[0][0], names[0][1],
                       _rel(np.linalg.matrix_power(gen, r) - eye, 1.0))]
    zs = [wb.zeta(), wb.zeta()]
    checks.append(wb.check(names[1][0], names[1][1],
                           max(translation.check_zr_scaling(params, z)
                               for z in zs)))

    shift_1 = translation.one_site_translation(params)
    turn = cmath.exp(-2j * math.pi / r)
    worst = 0.0
    for z in zs:
        lhs = np.linalg.solve(shift_1, vertex.transfer_matrix(z, params)) \
            @ shift_1
        rhs = vertex.transfer_matrix(turn * z, params)
        worst = max(worst, _rel(lhs - rhs, _scale(rhs)))
    checks.append(wb.check(names[2][0], names[2][1], worst))

    hams = {ell: translation.hamiltonian_logderiv(params, ell)
            for ell in range(1, r + 1)}
    worst = 0.0
    scale = _scale(hams[1])
    for ell in range(1, r + 1):
        succ = ell % r + 1
        moved = np.linalg.solve(gen, hams[ell]) @ gen
        worst = max(worst, _rel(moved - hams[succ], scale))
    checks.append(wb.check(names[3][0], names[3][1], worst))

    try:
        cp = symmetry.cp_conjugation(params)
        trev = symmetry.time_reversal(params)
    except RealityConditionError as exc:
        checks.append(wb.skip(names[4][0], names[4][1], str(exc)))
        checks.append(wb.skip(names[5][0], names[5][1], str(exc)))
        return checks
    worst = max(_rel(cp.conjugate(gen) - np.linalg.inv(gen), 1.0),
                _rel(cp.conjugate(shift_1) - np.linalg.inv(shift_1), 1.0))
    checks.append(wb.check(names[4][0], names[4][1], worst))
    worst = max(_rel(trev.conjugate(gen) - gen, 1.0),
                _rel(trev.conjugate(shift_1) - shift_1, 1.0))
    checks.append(wb.check(names[5][0], names[5][1], worst))

    if r == 2:
        checks.extend(_suite_alternating_extras(wb))
    return checks


def _suite_alternating_extras(wb: Workbench) -> list:
    params = wb.params
    gamma = float(np.angle(params.q))
    k = params.twist_exponent
    checks = []

    ratio = models.shift_ratio_operator(params)
    braid = models.shift_ratio_braid(params.n_sites, gamma, k)
    checks.append(wb.check("shift-ratio-dual-construction",
                           "twisted braid chain reproduces the quasi-shift "
                           "ratio", _rel(braid - ratio, _scale(ratio))))
    worst = 0.0
    for spec in wb.spectra:
        vecs = wb.full_vectors(spec)
        scale = np.abs(vecs).max(axis=0)
        vals = np.array([models.shift_ratio_eigenvalue(rec.roots, params)
                         for rec in spec.records])
        worst = max(worst, float(
            (np.abs(ratio @ vecs - vecs * vals) / scale).max()))
    checks.append(wb.check("shift-ratio-eigenvalues",
                           "quasi-shift ratio action matches the root "
                           "formula", worst))

    report = models.alternating_symmetry_report(params)
    spin = {key: val for key, val in report.items()
            if key.startswith("spin_map_")}
    rest = {key: val for key, val in report.items()
            if not key.startswith("spin_map_")}
    worst_key = max(spin, key=spin.get)
    checks.append(wb.check("spin-conjugation-displays",
                           "generator conjugation of single-site spins "
                           "matches the closed forms", spin[worst_key],
                           f"worst entry {worst_key}"))
    worst_key = max(rest, key=rest.get)
    checks.append(wb.check("alternating-symmetry-displays",
                           "staggered-chain symmetry displays all hold",
                           rest[worst_key], f"worst entry {worst_key}"))
    conj = models.alternating_conjugation_report(params)
    worst_key = max(conj, key=conj.get)
    checks.append(wb.check("alternating-conjugation-displays",
                           "staggered-chain conjugation displays all hold",
                           conj[worst_key], f"worst entry {worst_key}"))
    return checks


_VERIFY_SUITES = (_suite_family, _suite_roots, _suite_states, _suite_norms,
                  _suite_qops, _suite_symmetry, _suite_hermitian,
                  _suite_translation, _suite_hamiltonian, _suite_cyclic)


# ----------------------------------------------------------------------
# commands


def _selected_spectra(wb: Workbench):
    sectors = wb.config.sectors
    return [spec for spec in wb.spectra
            if sectors is None or spec.magnons in sectors]


def _cmd_verify(wb: Workbench):
    checks = []
    for suite in _VERIFY_SUITES:
        checks.extend(suite(wb))
    return {}, checks


def _cmd_spectrum(wb: Workbench):
    selected = _selected_spectra(wb)
    payload = {"sectors": [
        {"magnons": spec.magnons,
         "dimension": len(spec.records),
         "records": [bethe.record_to_dict(rec) for rec in spec.records]}
        for spec in selected]}
    worst = max((rec.max_residual for spec in selected
                 for rec in spec.records), default=0.0)
    checks = [wb.check("root-equation-residuals",
                       "every record satisfies the root equations", worst)]
    if wb.config.sectors is None:
        count = bethe.spectrum_record_count(wb.spectra)
        checks.append(wb.check("spectrum-count",
                               "root records enumerate the full spin space",
                               abs(count - wb.params.dim)))
    return payload, checks


def _cmd_bethe(wb: Workbench):
    params = wb.params
    selected = _selected_spectra(wb)
    sectors_payload = []
    worst_res = 0.0
    worst_norm = 0.0
    norm_count = 0
    norm_excluded = 0
    for spec in selected:
        rows = []
        for rec in spec.records:
            worst_res = max(worst_res, rec.max_residual)
            entry = {"roots": [_pair(z) for z in rec.roots],
                     "max-residual": rec.max_residual}
            if rec.max_residual <= wb.config.tolerance(
                    "root-equation-residuals"):
                det = bethe.gaudin_korepin(rec.roots, params)
                entry["norm-determinant"] = _pair(det)
                if spec.magnons <= min(3, params.n_sites // 2):
                    if bethe.string_distance(rec.roots, params) \
                            <= bethe.DEGENERATE_STRING_CUTOFF:
                        norm_excluded += 1
                    else:
                        scalar, _ = bethe.contraction_oracle(rec.roots,
                                                             params)
                        worst_norm = max(worst_norm, abs(det - scalar)
                                         / max(abs(scalar), 1e-300))
                        norm_count += 1
            rows.append(entry)
        sectors_payload.append({"magnons": spec.magnons, "records": rows})
    checks = [wb.check("root-equation-residuals",
                       "every record satisfies the root equations",
                       worst_res)]
    if norm_count:
        detail = f"{norm_count} states"
        if norm_excluded:
            detail += (f"; {norm_excluded} string-degenerate records "
                       "excluded")
        checks.append(wb.check("norm-determinant-contraction",
                               "norm determinant equals the "
                               "annihilation-chain coefficient", worst_norm,
                               detail))
    return {"sectors": sectors_payload}, checks


def _cmd_qops(wb: Workbench):
    params = wb.params
    selected = _selected_spectra(wb)
    payload = {"sectors": []}
    for spec in selected:
        rows = []
        for rec in spec.records:
            rows.append({
                "roots": [_pair(z) for z in rec.roots],
                "aplus-coefficients": [_pair(z)
                                       for z in rec.aplus_coefficients],
                "aminus-coefficients": [
                    _pair(z)
                    for z in qoper.minus_coefficients(rec, params)],
                "asymptotic-plus": _pair(rec.a_inf_plus),
                "asymptotic-minus": _pair(rec.a_inf_minus),
            })
        payload["sectors"].append({"magnons": spec.magnons,
                                   "records": rows})
    checks = _suite_qops(wb)
    return payload, checks


def _cmd_norms(wb: Workbench):
    params = wb.params
    cap = wb.config.tolerance("root-equation-residuals")
    try:
        gram = hermitian.gram_matrix(params)
        cpt = symmetry.cpt_conjugation(params)
    except (RealityConditionError, DegenerateTwistError,
            ArithmeticError) as exc:
        skip = [wb.skip("star-orthogonality",
                        "distinct root states are orthogonal in the "
                        "dressed form", str(exc)),
                wb.skip("star-norm-match",
                        "dressed self-pairings reproduce the norm "
                        "determinants", str(exc))]
        return {"sectors": []}, skip

    payload = {"sectors": []}
    worst_off, worst_norm = 0.0, 0.0
    norm_excluded = 0
    for spec in _selected_spectra(wb):
        records = [rec for rec in spec.records if rec.max_residual <= cap]
        if not records:
            payload["sectors"].append(
                {"magnons": spec.magnons, "note": "no certified records"})
            continue
        basis = np.column_stack(
            [bethe.algebraic_state(rec.roots, params, check_commute=False)
             for rec in records])
        table = (cpt.matrix @ basis.conj()).conj().T @ gram @ basis
        dets = np.array([bethe.gaudin_korepin(rec.roots, params)
                         for rec in records])
        generic = np.array([bethe.string_distance(rec.roots, params)
                            > bethe.DEGENERATE_STRING_CUTOFF
                            for rec in records])
        norm_excluded += int((~generic).sum())
        scale = max(np.abs(np.diag(table)).max(), 1e-300)
        off = table - np.diag(np.diag(table))
        worst_off = max(worst_off, float(np.abs(off).max() / scale))
        if generic.any():
            defects = (np.abs(np.diag(table) - dets)
                       / np.abs(dets))[generic]
            worst_norm = max(worst_norm, float(defects.max()))
        payload["sectors"].append({
            "magnons": spec.magnons,
            "pairings": [[_pair(z) for z in row] for row in table],
            "norm-determinants": [_pair(z) for z in dets],
        })
    norm_detail = ""
    if norm_excluded:
        norm_detail = (f"{norm_excluded} string-degenerate records "
                       "excluded")
    checks = [wb.check("star-orthogonality",
                       "distinct root states are orthogonal in the dressed "
                       "form", worst_off),
              wb.check("star-norm-match",
                       "dressed self-pairings reproduce the norm "
                       "determinants", worst_norm, norm_detail)]
    return payload, checks


_COMMANDS = {
    "spectrum": _cmd_spectrum,
    "bethe": _cmd_bethe,
    "qops": _cmd_qops,
    "verify": _cmd_verify,
    "norms": _cmd_norms,
}


# ----------------------------------------------------------------------
# report rendering


def _pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return _pair(obj)
    return obj


def _model_header(config: RunConfig) -> dict:
    params = config.model.params
    return {
        "kind": config.model.kind,
        "sites": params.n_sites,
        "gamma-over-pi": float(np.angle(params.q) / math.pi),
        "twist": params.twist_exponent,
        "period": params.r,
        "eta-by-site": [_pair(e) for e in params.eta_by_site()],
    }


def _fmt_float(x: float) -> str:
    return repr(float(x))


def _fmt_complex(z: complex) -> str:
    z = complex(z)
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real!r}{sign}{abs(z.imag)!r}j"


def _csv_rows(command: str, payload: dict, checks: list) -> list:
    if command in ("spectrum", "bethe", "qops"):
        rows = [["sector", "index", "max-residual", "roots", "extra"]]
        for sector in payload["sectors"]:
            for idx, rec in enumerate(sector.get("records", [])):
                roots = ";".join(
                    _fmt_complex(complex(a, b)) for a, b in rec["roots"])
                if command == "spectrum":
                    residual = max(rec["residuals"], default=0.0)
                    extra = ";".join(
                        f"{key}={_fmt_complex(complex(*val))}"
                        for key, val in sorted(rec["scalars"].items()))
                elif command == "bethe":
                    residual = rec["max-residual"]
                    det = rec.get("norm-determinant")
                    extra = _fmt_complex(complex(*det)) if det else ""
                else:
                    residual = ""
                    extra = ";".join(_fmt_complex(complex(a, b))
                                     for a, b in rec["aplus-coefficients"])
                rows.append([sector["magnons"], idx,
                             _fmt_float(residual) if residual != "" else "",
                             roots, extra])
        return rows
    rows = [["name", "residual", "tolerance", "pass", "detail"]]
    for check in checks:
        rows.append([
            check.name,
            "" if check.residual is None else _fmt_float(check.residual),
            "" if check.tolerance is None else _fmt_float(check.tolerance),
            {True: "true", False: "false", None: "skipped"}[check.passed],
            check.detail,
        ])
    return rows


def render_report(command: str, config: RunConfig, payload: dict,
                  checks: list) -> bytes:
    if config.fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerows(_csv_rows(command, payload, checks))
        return buffer.getvalue().encode("utf-8")
    passed = sum(1 for c in checks if c.passed is True)
    failed = sum(1 for c in checks if c.passed is False)
    skipped = sum(1 for c in checks if c.passed is None)
    report = {
        "schema": SCHEMA_VERSION,
        "command": command,
        "model": _model_header(config),
        "seed": config.seed,
        "warnings": list(config.warnings),
        "checks": [c.to_dict() for c in checks],
        "summary": {"passed": passed, "failed": failed,
                    "skipped": skipped},
    }
    report.update(payload)
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True)
    return (text + "\n").encode("utf-8")


def run_command(command: str, config: RunConfig) -> int:
    """Execute one command; returns the process exit code."""
    wb = Workbench(config)
    payload, checks = _COMMANDS[command](wb)
    blob = render_report(command, config, payload, checks)
    if config.out:
        with open(config.out, "wb") as handle:
            handle.write(blob)
    else:
        sys.stdout.buffer.write(blob)
        sys.stdout.buffer.flush()
    failed = [c for c in checks if c.passed is False]
    passed = sum(1 for c in checks if c.passed is True)
    skipped = sum(1 for c in checks if c.passed is None)
    click.echo(f"{command}: {passed} passed, {len(failed)} failed, "
               f"{skipped} skipped", err=True)
    for check in failed:
        click.echo(f"  FAIL {check.name}: residual {check.residual:.3e} "
                   f"> {check.tolerance:.3e}", err=True)
    return 2 if failed else 0


# ----------------------------------------------------------------------
# click wiring


def _common_options(f):
    f = click.option("--seed", default=None, help="override the config "
                     "seed")(f)
    f = click.option("--format", "fmt", default=None,
                     help="json or csv")(f)
    f = click.option("--out", default=None, help="report path (default "
                     "stdout)")(f)
    f = click.option("--sector", default=None, help="restrict to these "
                     "magnon numbers, comma separated")(f)
    f = click.option("--config", "config_path", default=None,
                     help="run configuration file")(f)
    return f


def _dispatch(command, config_path, sector, out, fmt, seed):
    try:
        if config_path is None:
            raise ConfigError("missing --config")
        config = load_config(config_path, sector=sector, out=out, fmt=fmt,
                             seed=seed)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(1)
    sys.exit(run_command(command, config))


@click.group()
def main():
    """Operator workbench for the twisted inhomogeneous six-vertex chain."""


def _register(name, help_text):
    @main.command(name=name, help=help_text)
    @_common_options
    def _cmd(config_path, sector, out, fmt, seed):
        _dispatch(name, config_path, sector, out, fmt, seed)
    return _cmd


_register("spectrum", "All root records per sector, with shift scalars.")
_register("bethe", "Roots, residuals and norm determinants.")
_register("qops", "Baxter polynomial data and functional-relation checks.")
_register("verify", "Run the full identity suite for the configured model.")
_register("norms", "Dressed Gram tables and orthogonality checks.")


if __name__ == "__main__":
    main()
