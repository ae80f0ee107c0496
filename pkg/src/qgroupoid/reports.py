"""Check results and verification reports."""

import math
from dataclasses import dataclass, field


def _round(x, digits=6):
    if x == 0 or not math.isfinite(x):
        return x
    return float(f"{x:.{digits - 1}e}")


@dataclass
class Check:
    """Outcome of one numerical check.

    ``residual`` is relative (absolute defect divided by ``max(1, scale)``);
    the check passes iff ``residual <= tol``.
    """
    name: str
    residual: float
    passed: bool
    scale: float = 1.0
    witness: object = None
    note: str = ""

    def to_dict(self):
        d = {
            "name": self.name,
            "max_residual": _round(float(self.residual)),
            "scale": _round(float(self.scale)),
            "pass": bool(self.passed),
            "witness": _jsonable(self.witness),
        }
        if self.note:
            d["note"] = self.note
        return d


def _jsonable(w):
    if w is None or isinstance(w, (str, int, float, bool)):
        return w
    if isinstance(w, (tuple, list)):
        return [_jsonable(v) for v in w]
    if hasattr(w, "item"):
        return w.item()
    return str(w)


def make_check(name, defect, scale, tol, witness=None, note=""):
    defect = float(defect)
    scale = float(scale)
    if not (math.isfinite(defect) and math.isfinite(scale)):
        return Check(name, 1.0, False, 1.0, witness, (note + "; " if note else "") + "non-finite defect")
    residual = defect / max(1.0, scale)
    passed = residual <= tol
    return Check(name, residual, passed, scale, None if passed else witness, note)


def failed_check(name, message, witness=None):
    """A check that could not be evaluated; recorded as a discrete failure."""
    return Check(name, 1.0, False, 1.0, witness, message)


@dataclass
class Report:
    title: str
    tol: float
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, check):
        self.checks.append(check)
        return check

    def extend(self, other, prefix=""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.residual, c.passed, c.scale, c.witness, c.note))
        self.notes.extend(n for n in other.notes if n not in self.notes)
        self.info.update(other.info)
        return self

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def names(self):
        return [c.name for c in self.checks]

    @property
    def max_residual(self):
        finite = [c.residual for c in self.checks]
        return max(finite) if finite else 0.0

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self):
        return {
            "title": self.title,
            "tolerance": self.tol,
            "notes": list(self.notes),
            "info": {k: _jsonable(v) for k, v in self.info.items()},
            "checks": [c.to_dict() for c in self.checks],
            "summary": {"pass": self.passed, "n_checks": len(self.checks),
                        "n_failed": len(self.failures())},
        }

    def format(self):
        lines = [f"{self.title}  (tol={self.tol:g})"]
        for n in self.notes:
            lines.append(f"  note: {n}")
        width = max((len(c.name) for c in self.checks), default=10)
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            line = f"  {flag}  {c.name:<{width}}  residual={c.residual:.3e}"
            if c.witness is not None:
                line += f"  witness={_jsonable(c.witness)}"
            if c.note:
                line += f"  ({c.note})"
            lines.append(line)
        lines.append(f"  summary: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)
