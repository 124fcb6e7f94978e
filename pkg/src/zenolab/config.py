"""Strict JSON experiment configs.

Every object rejects unknown keys.  A minimal config::

    {"instance": {"dim": 2,
                  "state": {"diagonal": [0.75, 0.25]},
                  "projection": {"diagonal": [1, 0]}}}

Complex numbers are written either as plain numbers or as ``[re, im]``.
Relative file paths are resolved against the directory of the config file.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .models import MODELS, SpinChainSpec, build_spin_chain, gibbs_state, region_projection
from .numerics import read_matrix_csv
from .standard_form import build_standard_form
from .tolerances import Tolerances

CHECKS = (
    "group_law",
    "contraction",
    "convergence",
    "cauchy",
    "boundary",
    "gamma",
    "invariance",
    "corollary",
    "ms",
    "survival",
)

TOP_KEYS = {"instance", "sweep", "checks", "tolerances", "seed", "output"}
INSTANCE_KEYS = {"id", "dim", "state", "projection", "psi", "hamiltonian", "omega_e"}
SWEEP_KEYS = {
    "t_grid", "n_list", "z_grid", "eta_list", "s_grid", "pairs", "small_t",
    "cauchy_T", "cauchy_panels", "cauchy_n", "cauchy_z", "condition_t",
    "oracle_ns", "ms_n_max", "ms_levels",
}


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


def default_z_grid() -> tuple:
    return tuple(complex(re, -im) for im in (0.0, 0.125, 0.25, 0.375, 0.5) for re in (-2.0, -1.0, 0.0, 1.0, 2.0))


@dataclass(frozen=True)
class SweepConfig:
    t_grid: tuple = (0.5, 1.0, 1.5, 2.0, 3.0)
    n_list: tuple = (32, 64, 128, 256, 512, 1024)
    z_grid: tuple = field(default_factory=default_z_grid)
    eta_list: tuple = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
    s_grid: tuple = (0.05, 0.1, 0.2, 0.25, 0.3, 0.45)
    pairs: tuple | None = None
    small_t: tuple = (1e-3, -1e-3, 1e-4, 1e-5)
    cauchy_T: float = 1000.0
    cauchy_panels: int = 2_000_000
    cauchy_n: int = 4
    cauchy_z: tuple = (-0.25j, 0.25j)
    condition_t: tuple = (1 / 8, 1 / 16, 1 / 32, 1 / 64)
    oracle_ns: tuple = (256, 512, 1024, 2048, 4096)
    ms_n_max: int = 1024
    ms_levels: int = 7

    def group_pairs(self) -> tuple:
        if self.pairs is not None:
            return self.pairs
        ts = self.t_grid
        return tuple((s, t) for s in ts for t in ts) + tuple((s, -t) for s in ts for t in ts)


@dataclass(frozen=True)
class InstanceConfig:
    id: str
    dim: int
    state: dict
    projection: dict
    psi: tuple | None = None
    hamiltonian: dict | None = None
    omega_e: dict | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    instance: InstanceConfig
    sweep: SweepConfig = field(default_factory=SweepConfig)
    checks: tuple = CHECKS
    tolerances: Tolerances = field(default_factory=Tolerances)
    seed: int = 0
    output_dir: Path = Path("zeno_out")
    base_dir: Path = Path(".")
    source: str | None = None


# -- helpers ---------------------------------------------------------------------

def _strict(obj, allowed: set, where: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError("expected an object", where)
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r}", f"{where}.{key}" if where else key)
    return obj


def _complex(x, where: str) -> complex:
    if isinstance(x, bool):
        raise ConfigError("expected a number", where)
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return complex(x[0], x[1])
    raise ConfigError("expected a number or [re, im]", where)


def _float(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError("expected a real number", where)
    return float(x)


def _int(x, where: str, low: int | None = None) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError("expected an integer", where)
    if low is not None and x < low:
        raise ConfigError(f"must be >= {low}", where)
    return x


def _list(x, where: str, nonempty: bool = True) -> list:
    if not isinstance(x, list) or (nonempty and not x):
        raise ConfigError("expected a nonempty list" if nonempty else "expected a list", where)
    return x


def _one_of(obj: dict, options: set, where: str) -> str:
    _strict(obj, options, where)
    if len(obj) != 1:
        raise ConfigError(f"exactly one of {sorted(options)} is required", where)
    return next(iter(obj))


def _check_file(base: Path, name, where: str) -> Path:
    if not isinstance(name, str):
        raise ConfigError("expected a file path", where)
    path = Path(name)
    if not path.is_absolute():
        path = base / path
    if not path.is_file():
        raise ConfigError(f"file not found: {path}", where)
    return path


def _validate_model(obj, where: str) -> SpinChainSpec:
    _strict(obj, {"n_sites", "model", "J", "g", "periodic"}, where)
    if "n_sites" not in obj:
        raise ConfigError("n_sites is required", where)
    model = obj.get("model", "transverse-ising")
    if model not in MODELS:
        raise ConfigError(f"unknown model {model!r}", f"{where}.model")
    periodic = obj.get("periodic", False)
    if not isinstance(periodic, bool):
        raise ConfigError("expected true or false", f"{where}.periodic")
    try:
        return SpinChainSpec(_int(obj["n_sites"], f"{where}.n_sites", 1), model,
                             _float(obj.get("J", 1.0), f"{where}.J"), _float(obj.get("g", 1.0), f"{where}.g"),
                             periodic)
    except ValueError as exc:
        raise ConfigError(str(exc), where) from exc


def _validate_state(state, dim: int, base: Path) -> None:
    where = "instance.state"
    kind = _one_of(state, {"diagonal", "gibbs", "matrix_file"}, where)
    if kind == "diagonal":
        probs = [_float(p, f"{where}.diagonal[{i}]") for i, p in enumerate(_list(state["diagonal"], f"{where}.diagonal"))]
        if len(probs) != dim:
            raise ConfigError(f"expected {dim} probabilities, got {len(probs)}", f"{where}.diagonal")
        if any(p <= 0 for p in probs) or abs(sum(probs) - 1.0) > 1e-9:
            raise ConfigError("non-stochastic probabilities (need positive entries summing to 1)", f"{where}.diagonal")
    elif kind == "gibbs":
        g = _strict(state["gibbs"], {"model", "matrix_file", "beta"}, f"{where}.gibbs")
        if "beta" not in g:
            raise ConfigError("beta is required", f"{where}.gibbs")
        if _float(g["beta"], f"{where}.gibbs.beta") <= 0:
            raise ConfigError("beta must be positive", f"{where}.gibbs.beta")
        if ("model" in g) == ("matrix_file" in g):
            raise ConfigError("exactly one of model, matrix_file is required", f"{where}.gibbs")
        if "model" in g:
            spec = _validate_model(g["model"], f"{where}.gibbs.model")
            if spec.dim != dim:
                raise ConfigError(f"model dimension {spec.dim} does not match dim {dim}", f"{where}.gibbs.model")
        else:
            _check_file(base, g["matrix_file"], f"{where}.gibbs.matrix_file")
    else:
        _check_file(base, state["matrix_file"], f"{where}.matrix_file")


def _validate_projection(proj, dim: int, base: Path) -> None:
    where = "instance.projection"
    kind = _one_of(proj, {"diagonal", "vector", "region", "matrix_file"}, where)
    if kind == "diagonal":
        pattern = _list(proj["diagonal"], f"{where}.diagonal")
        if len(pattern) != dim or any(p not in (0, 1) or isinstance(p, bool) for p in pattern) or sum(pattern) == 0:
            raise ConfigError(f"expected {dim} entries from {{0, 1}} with at least one 1", f"{where}.diagonal")
    elif kind == "vector":
        v = [_complex(x, f"{where}.vector[{i}]") for i, x in enumerate(_list(proj["vector"], f"{where}.vector"))]
        if len(v) != dim or np.linalg.norm(v) == 0:
            raise ConfigError(f"expected a nonzero vector of length {dim}", f"{where}.vector")
    elif kind == "region":
        r = _strict(proj["region"], {"sites", "phi"}, f"{where}.region")
        n_sites = int(round(np.log2(dim)))
        if 2 ** n_sites != dim:
            raise ConfigError("region projections need dim = 2**n_sites", f"{where}.region")
        sites = [_int(s, f"{where}.region.sites", 1) for s in _list(r.get("sites"), f"{where}.region.sites")]
        if len(set(sites)) != len(sites) or max(sites) > n_sites or len(sites) >= n_sites:
            raise ConfigError("sites must be a nonempty proper subset of 1..n_sites", f"{where}.region.sites")
        if "phi" in r:
            phis = _list(r["phi"], f"{where}.region.phi")
            if len(phis) != n_sites - len(sites):
                raise ConfigError("one single-site vector per outside site is required", f"{where}.region.phi")
            for i, v in enumerate(phis):
                vv = [_complex(x, f"{where}.region.phi[{i}]") for x in _list(v, f"{where}.region.phi[{i}]")]
                if len(vv) != 2 or np.linalg.norm(vv) == 0:
                    raise ConfigError("expected a nonzero 2-vector", f"{where}.region.phi[{i}]")
    else:
        _check_file(base, proj["matrix_file"], f"{where}.matrix_file")


def _tuple_of(x, conv, where: str, nonempty: bool = True) -> tuple:
    return tuple(conv(v, f"{where}[{i}]") for i, v in enumerate(_list(x, where, nonempty)))


def _parse_sweep(obj) -> SweepConfig:
    where = "sweep"
    _strict(obj, SWEEP_KEYS, where)
    kw = {}
    for key in ("t_grid", "eta_list", "s_grid", "small_t", "condition_t"):
        if key in obj:
            kw[key] = _tuple_of(obj[key], _float, f"{where}.{key}")
    for key in ("n_list", "oracle_ns"):
        if key in obj:
            ns = _tuple_of(obj[key], lambda v, w: _int(v, w, 1), f"{where}.{key}")
            if len(ns) < 2 or any(b <= a for a, b in zip(ns, ns[1:])):
                raise ConfigError("must be strictly ascending with at least two entries", f"{where}.{key}")
            kw[key] = ns
    for key in ("z_grid", "cauchy_z"):
        if key in obj:
            kw[key] = _tuple_of(obj[key], _complex, f"{where}.{key}")
    if "z_grid" in kw:
        for i, z in enumerate(kw["z_grid"]):
            if not -0.5 <= z.imag <= 0.0:
                raise ConfigError("strip points need -1/2 <= Im z <= 0", f"{where}.z_grid[{i}]")
    if "cauchy_z" in kw:
        for i, z in enumerate(kw["cauchy_z"]):
            if z.imag in (0.0, -0.5):
                raise ConfigError("z must avoid the boundary lines", f"{where}.cauchy_z[{i}]")
    if "eta_list" in kw:
        etas = kw["eta_list"]
        if any(not 0 < e < 0.5 for e in etas) or any(b >= a for a, b in zip(etas, etas[1:])):
            raise ConfigError("must be strictly descending within (0, 1/2)", f"{where}.eta_list")
    if "s_grid" in kw and any(not 0 < s < 0.5 for s in kw["s_grid"]):
        raise ConfigError("entries must lie in (0, 1/2)", f"{where}.s_grid")
    if "condition_t" in kw:
        ts = kw["condition_t"]
        if len(ts) < 4 or any(t <= 0 for t in ts) or any(abs(b - a / 2) > 1e-15 * a for a, b in zip(ts, ts[1:])):
            raise ConfigError("must be positive and halving with at least four entries", f"{where}.condition_t")
    if "pairs" in obj:
        pairs = []
        for i, p in enumerate(_list(obj["pairs"], f"{where}.pairs")):
            if not isinstance(p, list) or len(p) != 2:
                raise ConfigError("expected [s, t]", f"{where}.pairs[{i}]")
            pairs.append((_float(p[0], f"{where}.pairs[{i}]"), _float(p[1], f"{where}.pairs[{i}]")))
        kw["pairs"] = tuple(pairs)
    if "cauchy_T" in obj:
        kw["cauchy_T"] = _float(obj["cauchy_T"], f"{where}.cauchy_T")
        if kw["cauchy_T"] < 10:
            raise ConfigError("must be at least 10", f"{where}.cauchy_T")
    for key, low in (("cauchy_panels", 2), ("cauchy_n", 1), ("ms_n_max", 2), ("ms_levels", 1)):
        if key in obj:
            kw[key] = _int(obj[key], f"{where}.{key}", low)
    sweep = SweepConfig(**kw)
    if sweep.ms_n_max >> (sweep.ms_levels - 1) < 1:
        raise ConfigError("ms_n_max too small for ms_levels", f"{where}.ms_levels")
    return sweep


def parse_config_data(data, base_dir: Path | str = ".", source: str | None = None) -> ExperimentConfig:
    base = Path(base_dir)
    _strict(data, TOP_KEYS, "")
    if "instance" not in data:
        raise ConfigError("the instance section is required", "instance")
    inst = _strict(data["instance"], INSTANCE_KEYS, "instance")
    for key in ("dim", "state", "projection"):
        if key not in inst:
            raise ConfigError(f"{key} is required", f"instance.{key}")
    dim = _int(inst["dim"], "instance.dim", 1)
    iid = inst.get("id", "instance")
    if not isinstance(iid, str) or not iid or any(c in iid for c in ",\n\r\""):
        raise ConfigError("expected a nonempty string without commas or quotes", "instance.id")
    _validate_state(inst["state"], dim, base)
    _validate_projection(inst["projection"], dim, base)
    psi = None
    if "psi" in inst:
        psi = _tuple_of(inst["psi"], _complex, "instance.psi")
        if len(psi) != dim or np.linalg.norm(psi) == 0:
            raise ConfigError(f"expected a nonzero vector of length {dim}", "instance.psi")
    ham = None
    if "hamiltonian" in inst:
        ham = _strict(inst["hamiltonian"], {"matrix_file", "model"}, "instance.hamiltonian")
        kind = _one_of(ham, {"matrix_file", "model"}, "instance.hamiltonian")
        if kind == "matrix_file":
            _check_file(base, ham["matrix_file"], "instance.hamiltonian.matrix_file")
        elif _validate_model(ham["model"], "instance.hamiltonian.model").dim != dim:
            raise ConfigError("model dimension does not match dim", "instance.hamiltonian.model")
    omega_e = None
    if "omega_e" in inst:
        omega_e = _strict(inst["omega_e"], {"matrix_file"}, "instance.omega_e")
        if "matrix_file" not in omega_e:
            raise ConfigError("matrix_file is required", "instance.omega_e")
        _check_file(base, omega_e["matrix_file"], "instance.omega_e.matrix_file")
    icfg = InstanceConfig(iid, dim, inst["state"], inst["projection"], psi, ham, omega_e)

    sweep = _parse_sweep(data.get("sweep", {}))
    checks = CHECKS
    if "checks" in data:
        names = _list(data["checks"], "checks", nonempty=False)
        for i, name in enumerate(names):
            if name not in CHECKS:
                raise ConfigError(f"unknown check {name!r}", f"checks[{i}]")
        if len(set(names)) != len(names):
            raise ConfigError("duplicate check names", "checks")
        checks = tuple(c for c in CHECKS if c in names)
    tol = Tolerances()
    if "tolerances" in data:
        _strict(data["tolerances"], set(tol.as_dict()), "tolerances")
        for key, val in data["tolerances"].items():
            _float(val, f"tolerances.{key}")
        try:
            tol = tol.with_overrides(data["tolerances"])
        except ValueError as exc:
            raise ConfigError(str(exc), "tolerances") from exc
    seed = data.get("seed", 0)
    _int(seed, "seed", 0)
    if seed >= 2 ** 64:
        raise ConfigError("seed must fit in 64 bits", "seed")
    out = Path("zeno_out")
    if "output" in data:
        o = _strict(data["output"], {"dir"}, "output")
        if "dir" in o:
            if not isinstance(o["dir"], str):
                raise ConfigError("expected a path", "output.dir")
            out = Path(o["dir"])
            if not out.is_absolute():
                out = base / out
    return ExperimentConfig(icfg, sweep, checks, tol, seed, out, base, source)


def parse_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    return parse_config_data(data, path.parent, str(path))


# -- building instances --------------------------------------------------------------

def _resolve(base: Path, name: str) -> Path:
    p = Path(name)
    return p if p.is_absolute() else base / p


def build_state(cfg: ExperimentConfig) -> tuple:
    """Return ``(rho, hamiltonian_or_None)`` for the configured state."""
    ic, base = cfg.instance, cfg.base_dir
    st = ic.state
    if "diagonal" in st:
        p = np.array(st["diagonal"], float)
        return np.diag(p / p.sum()).astype(complex), None
    if "gibbs" in st:
        g = st["gibbs"]
        if "model" in g:
            H = build_spin_chain(_validate_model(g["model"], "instance.state.gibbs.model"))
        else:
            H = read_matrix_csv(_resolve(base, g["matrix_file"]), ic.dim)
        return gibbs_state(H, float(g["beta"])), H
    return read_matrix_csv(_resolve(base, st["matrix_file"]), ic.dim), None


def build_projection(cfg: ExperimentConfig) -> np.ndarray:
    ic, base = cfg.instance, cfg.base_dir
    pr = ic.projection
    if "diagonal" in pr:
        return np.diag(np.array(pr["diagonal"], float)).astype(complex)
    if "vector" in pr:
        v = np.array([_complex(x, "") for x in pr["vector"]])
        v /= np.linalg.norm(v)
        return np.outer(v, v.conj())
    if "region" in pr:
        r = pr["region"]
        n_sites = int(round(np.log2(ic.dim)))
        phi = None
        if "phi" in r:
            phi = [[_complex(x, "") for x in v] for v in r["phi"]]
        return region_projection(n_sites, r["sites"], phi)
    return read_matrix_csv(_resolve(base, pr["matrix_file"]), ic.dim)


def build_hamiltonian(cfg: ExperimentConfig, state_hamiltonian):
    """Hamiltonian for the Misra-Sudarshan checks, or ``None`` to use ``-log rho``."""
    ham = cfg.instance.hamiltonian
    if ham is None:
        return state_hamiltonian
    if "matrix_file" in ham:
        return read_matrix_csv(_resolve(cfg.base_dir, ham["matrix_file"]), cfg.instance.dim)
    return build_spin_chain(_validate_model(ham["model"], "instance.hamiltonian.model"))


def build_omega_e(cfg: ExperimentConfig):
    oe = cfg.instance.omega_e
    if oe is None:
        return None
    X = read_matrix_csv(_resolve(cfg.base_dir, oe["matrix_file"]), cfg.instance.dim)
    return X / np.linalg.norm(X)


def build_standard(cfg: ExperimentConfig):
    rho, H = build_state(cfg)
    return build_standard_form(cfg.instance.dim, rho), H
