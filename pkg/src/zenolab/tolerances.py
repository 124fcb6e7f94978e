from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    """Absolute tolerances used by the verification checks.

    Every field can be overridden from a config file or ``--tolerance KEY=VAL``.
    """

    projection: float = 1e-12
    commuting: float = 1e-10
    real_contraction: float = 1e-10
    strip_bound: float = 1e-8
    factored: float = 1e-10
    group_law: float = 1e-10
    gamma: float = 1e-9
    gamma_delta: float = 1e-10
    cauchy: float = 1e-4
    holomorphy: float = 1e-6
    monotone_slack: float = 1e-12
    noise_floor: float = 1e-13
    rate_floor: float = 1e-9
    rate_slope: float = 0.3
    invariance: float = 1e-10
    invariance_gate: float = 1e-8
    invariance_paths: float = 1e-6
    condition_iii: float = 1e-6
    modular_match: float = 1e-8
    tomita: float = 1e-9
    ms_limit: float = 1e-10
    ms_invariance: float = 1e-12
    survival_rel: float = 0.01
    zeno_survival: float = 1e-10

    def with_overrides(self, overrides: dict) -> "Tolerances":
        known = {f.name for f in fields(self)}
        unknown = sorted(set(overrides) - known)
        if unknown:
            raise KeyError(f"unknown tolerance key(s): {', '.join(unknown)}")
        values = {}
        for key, val in overrides.items():
            val = float(val)
            if not val >= 0.0:
                raise ValueError(f"tolerance {key} must be a nonnegative number")
            values[key] = val
        return replace(self, **values)

    def as_dict(self) -> dict:
        return asdict(self)
