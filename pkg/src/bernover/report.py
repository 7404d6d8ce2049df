"""Inequality-check reports and their JSON / CSV forms.

JSON field order is fixed: ``config``, ``aggregates`` (``max_lhs``,
``min_margin``, ``pass``, then experiment-specific keys), ``points``,
``provenance`` (``moduli_mode``, ``resolutions``, ``seed``, ``advisory``,
``moduli_kinds``), and ``meta`` unless suppressed. Floats are written with
``repr``, which round-trips IEEE-754 doubles.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from .moduli import ANALYTIC, GRID_LOWER_BOUND

PASS_TOL = 1e-12


def point_record(point, lhs: float, rhs: float, **extra) -> dict:
    """One ``lhs <= rhs`` record; ``point`` may be ``None`` for non-spatial checks."""
    record = {} if point is None else {"point": [float(c) for c in point]}
    record.update(extra)
    record.update(lhs=float(lhs), rhs=float(rhs), margin=float(rhs) - float(lhs))
    return record


@dataclass
class BoundReport:
    """Per-point ``lhs <= rhs`` records plus aggregates and provenance.

    ``passed`` holds when the smallest margin is at least ``-PASS_TOL``. A
    report that used any lattice modulus is advisory: its right-hand sides
    are lower bounds, so a pass is evidence rather than a certificate.
    """

    config: dict
    points: list = field(default_factory=list)
    moduli_kinds: set = field(default_factory=set)
    resolutions: dict = field(default_factory=dict)
    seed: int | None = None
    extra_aggregates: dict = field(default_factory=dict)
    failure: str | None = None

    @property
    def max_lhs(self) -> float:
        return max((p["lhs"] for p in self.points), default=0.0)

    @property
    def min_margin(self) -> float:
        return min((p["margin"] for p in self.points), default=0.0)

    @property
    def passed(self) -> bool:
        return self.failure is None and self.min_margin >= -PASS_TOL

    @property
    def moduli_mode(self) -> str:
        if not self.moduli_kinds or self.moduli_kinds == {ANALYTIC}:
            return ANALYTIC
        return GRID_LOWER_BOUND

    @property
    def advisory(self) -> bool:
        return GRID_LOWER_BOUND in self.moduli_kinds

    def to_dict(self, meta: dict | None = None) -> dict:
        aggregates = {"max_lhs": self.max_lhs, "min_margin": self.min_margin, "pass": self.passed}
        aggregates.update(self.extra_aggregates)
        if self.failure is not None:
            aggregates["failure"] = self.failure
        out = {
            "config": self.config,
            "aggregates": aggregates,
            "points": self.points,
            "provenance": {
                "moduli_mode": self.moduli_mode,
                "resolutions": self.resolutions,
                "seed": self.seed,
                "advisory": self.advisory,
                "moduli_kinds": sorted(self.moduli_kinds),
            },
        }
        if meta is not None:
            out["meta"] = meta
        return out

    def to_json(self, meta: dict | None = None) -> str:
        return json.dumps(_finite(self.to_dict(meta)), indent=2) + "\n"

    def to_csv(self) -> str:
        """One row per record: point coordinates as ``x1..xd``, then every other field."""
        return records_to_csv(self.points)


@dataclass
class RateReport:
    """Geometric convergence record: ``error`` per iteration count ``n`` and a fitted rate.

    Serialises with the same top-level layout as :class:`BoundReport`; the
    aggregate margin is the rate tolerance minus the observed relative
    deviation of the fitted rate from the expected one.
    """

    config: dict
    points: list
    expected_rate: float
    fitted_rate: float | None
    tolerance: float
    fit_window: list
    resolutions: dict = field(default_factory=dict)
    seed: int | None = None

    @property
    def trivially_converged(self) -> bool:
        return self.fitted_rate is None

    @property
    def relative_deviation(self) -> float:
        if self.fitted_rate is None:
            return 0.0
        return abs(self.fitted_rate - self.expected_rate) / self.expected_rate

    @property
    def max_lhs(self) -> float:
        return max((p["error"] for p in self.points), default=0.0)

    @property
    def min_margin(self) -> float:
        return self.tolerance - self.relative_deviation

    @property
    def passed(self) -> bool:
        return self.min_margin >= -PASS_TOL

    def to_dict(self, meta: dict | None = None) -> dict:
        out = {
            "config": self.config,
            "aggregates": {
                "max_lhs": self.max_lhs,
                "min_margin": self.min_margin,
                "pass": self.passed,
                "expected_rate": self.expected_rate,
                "fitted_rate": self.fitted_rate,
                "trivially_converged": self.trivially_converged,
                "fit_window": self.fit_window,
            },
            "points": self.points,
            "provenance": {
                "moduli_mode": ANALYTIC,
                "resolutions": self.resolutions,
                "seed": self.seed,
                "advisory": False,
                "moduli_kinds": [],
            },
        }
        if meta is not None:
            out["meta"] = meta
        return out

    def to_json(self, meta: dict | None = None) -> str:
        return json.dumps(_finite(self.to_dict(meta)), indent=2) + "\n"

    def to_csv(self) -> str:
        return records_to_csv(self.points)


def records_to_csv(records) -> str:
    """CSV with point coordinates as ``x1..xd`` followed by the remaining fields in order."""
    if not records:
        return ""
    d = len(records[0].get("point", ()))
    other = [k for k in records[0] if k != "point"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"x{i + 1}" for i in range(d)] + other)
    for rec in records:
        row = list(rec.get("point", ())) + [rec[k] for k in other]
        writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _finite(obj):
    # JSON has no inf/nan
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj
