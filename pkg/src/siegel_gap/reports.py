"""Report records and their stable JSON / CSV encodings."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, fields, is_dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional

import mpmath
import numpy as np

SCHEMA = "siegel-gap/1"
DEFAULT_PRECISION = 20

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass
class LemmaReport:
    """Outcome of one check: inputs, measured and comparison values, verdict."""

    lemma: str
    inputs: Dict[str, Any]
    measured: Dict[str, Any]
    comparison: Dict[str, Any] = field(default_factory=dict)
    tolerance: Any = None
    verdict: str = PASS
    fitted: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self, precision: int = DEFAULT_PRECISION) -> Dict[str, Any]:
        return encode(self, precision)


def encode(obj: Any, precision: int = DEFAULT_PRECISION) -> Any:
    """Convert numbers to decimal strings at a fixed precision, recursively."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (float, np.floating)) and precision >= 17 and math.isfinite(obj):
        return repr(float(obj))  # shortest round-trip form; more digits would only show binary noise
    if isinstance(obj, (float, np.floating, mpmath.mpf)):
        x = mpmath.mpf(obj)
        if mpmath.isinf(x) or mpmath.isnan(x):
            return str(float(x))
        return mpmath.nstr(x, precision, strip_zeros=False, min_fixed=-6, max_fixed=12)
    if isinstance(obj, (complex, np.complexfloating, mpmath.mpc)):
        z = mpmath.mpc(obj)
        return {"re": encode(z.real, precision), "im": encode(z.imag, precision)}
    if is_dataclass(obj):
        return {f.name: encode(getattr(obj, f.name), precision) for f in fields(obj) if not f.name.startswith("_")}
    if isinstance(obj, dict):
        return {str(k): encode(v, precision) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [encode(v, precision) for v in obj]
    raise TypeError(f"cannot encode {type(obj).__name__}")


def to_json(payload: Any, precision: int = DEFAULT_PRECISION) -> str:
    body = {"schema": SCHEMA}
    enc = encode(payload, precision)
    if isinstance(enc, dict):
        body.update(enc)
    else:
        body["reports"] = enc
    return json.dumps(body, indent=2, ensure_ascii=False) + "\n"


def pretty(x: Any, digits: int = 12) -> str:
    if isinstance(x, Fraction):
        return f"{x} (~{mpmath.nstr(mpmath.mpf(x.numerator) / x.denominator, digits)})"
    if isinstance(x, (float, mpmath.mpf, np.floating)):
        return mpmath.nstr(mpmath.mpf(x), digits)
    if isinstance(x, (complex, mpmath.mpc)):
        return mpmath.nstr(mpmath.mpc(x), digits)
    if isinstance(x, (list, tuple, dict)) or is_dataclass(x):
        return json.dumps(encode(x, digits))
    return str(x)


def render_pretty(report: LemmaReport, digits: int = 12) -> str:
    lines = [f"[{report.verdict.upper()}] {report.lemma}"]
    for title, block in (("inputs", report.inputs), ("measured", report.measured),
                         ("comparison", report.comparison), ("fitted", report.fitted)):
        if block:
            lines.append(f"  {title}:")
            for k, v in block.items():
                lines.append(f"    {k} = {pretty(v, digits)}")
    if report.tolerance is not None:
        lines.append(f"  tolerance = {pretty(report.tolerance, digits)}")
    for n in report.notes:
        lines.append(f"  note: {n}")
    return "\n".join(lines)


def to_csv(rows: List[Dict[str, Any]], columns: List[str], precision: int = DEFAULT_PRECISION) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([encode(row[c], precision) for c in columns])
    return buf.getvalue()


def as_float(x: Any) -> float:
    if isinstance(x, Fraction):
        return x.numerator / x.denominator
    return float(x)


def finite(x: Any) -> bool:
    return math.isfinite(as_float(x))
