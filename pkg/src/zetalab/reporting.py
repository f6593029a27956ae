"""Verification reports: per-identity two-route results with itemized error
budgets, and a deterministic JSON document wrapper for the CLI."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

import mpmath
from mpmath import mp, mpf, mpc

UNCONDITIONAL = "UNCONDITIONAL"
CONDITIONAL = "CONDITIONAL"
SEARCH = "SEARCH"


def num(x, digits=20):
    """Deterministic string form for report numbers."""
    if isinstance(x, (mpf, mpc)):
        return mpmath.nstr(x, digits)
    if isinstance(x, complex):
        return repr(x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


@dataclass
class SampleResult:
    point: str
    lhs: str
    rhs: str
    residual: float
    budget: dict
    budget_total: float
    ratio: float
    passed: bool


@dataclass
class VerificationReport:
    name: str
    klass: str
    params: dict = field(default_factory=dict)
    samples: list = field(default_factory=list)
    passed: bool = True
    safety_factor: float = 5.0
    notes: str = ""

    def add_sample(self, point, lhs, rhs, residual, budget):
        total = float(sum(budget.values()))
        ratio = residual / total if total > 0 else float("inf")
        ok = residual <= self.safety_factor * total
        self.samples.append(SampleResult(
            point=num(point), lhs=num(lhs), rhs=num(rhs),
            residual=float(residual), budget={k: float(v) for k, v in budget.items()},
            budget_total=total, ratio=float(ratio), passed=bool(ok)))
        if self.klass == UNCONDITIONAL and not ok:
            self.passed = False
        return ok

    @property
    def max_ratio(self):
        return max((s.ratio for s in self.samples), default=0.0)

    def to_dict(self):
        d = asdict(self)
        d["max_ratio"] = self.max_ratio
        return d


@dataclass
class ReportDocument:
    tool_version: str
    config: dict
    reports: list = field(default_factory=list)
    generated_at: str = ""

    def add(self, report):
        self.reports.append(report)

    def summary(self):
        uncond = [r for r in self.reports if r.klass == UNCONDITIONAL]
        return {
            "n_reports": len(self.reports),
            "unconditional_pass": all(r.passed for r in uncond),
            "classes": sorted({r.klass for r in self.reports}),
        }

    def to_json(self):
        doc = {
            "tool_version": self.tool_version,
            "config": self.config,
            "generated_at": self.generated_at,
            "summary": self.summary(),
            "reports": [r.to_dict() for r in self.reports],
        }
        return json.dumps(doc, sort_keys=True, indent=2, default=_coerce)


def _coerce(x):
    import numpy as np
    if isinstance(x, (mpf, mpc)):
        return num(x)
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return str(x)


def emit_plot_data(path_base, name, rows):
    """Two-column text file '<base>.<name>.dat' (x y per line)."""
    path = "%s.%s.dat" % (path_base, name)
    with open(path, "w") as fh:
        for x, y in rows:
            fh.write("%s %s\n" % (repr(float(x)), repr(float(y))))
    return path
