"""Verification records and their JSON / CSV / human serializations."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

SCHEMA = "ancrc-report/1"
CSV_COLUMNS = ("identity", "n", "param", "residual", "tolerance", "pass")


@dataclass(frozen=True)
class VerificationReport:
    """One checked identity at one parameter point.

    mode "lt" passes when residual < tolerance; mode "ge" passes when the
    residual (a fitted slope, say) is at least the tolerance.  Records with
    ``expected_failure`` document a known mismatch and do not gate the exit
    status unless they unexpectedly pass.  ``inputs`` maps names to scalars.
    """

    identity: str
    n: int
    param: str
    residual: float
    tolerance: float
    mode: str = "lt"
    expected_failure: bool = False
    inputs: dict = field(default_factory=dict, compare=True)

    def __post_init__(self):
        if self.mode not in ("lt", "ge"):
            raise ValueError(f"unknown comparison mode {self.mode!r}")
        object.__setattr__(self, "residual", float(self.residual))
        object.__setattr__(self, "tolerance", float(self.tolerance))

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.residual):
            return False
        if self.mode == "lt":
            return self.residual < self.tolerance
        return self.residual >= self.tolerance

    @property
    def status(self) -> str:
        if self.expected_failure:
            return "XPASS" if self.passed else "XFAIL"
        return "PASS" if self.passed else "FAIL"

    @property
    def ok(self) -> bool:
        """Contribution to the exit status: PASS and XFAIL are fine."""
        return self.status in ("PASS", "XFAIL")

    def sort_key(self):
        return (self.identity, self.n, self.param)


def _enc_scalar(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_enc_float(x.real), _enc_float(x.imag)]
    if isinstance(x, (float, np.floating)):
        return _enc_float(x)
    if isinstance(x, str):
        return x
    raise TypeError(f"report inputs must be scalars, got {type(x).__name__}")


def _enc_float(x) -> float | str:
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def _dec_float(x) -> float:
    return float(x)


def _dec_scalar(x):
    if isinstance(x, list):
        return complex(_dec_float(x[0]), _dec_float(x[1]))
    if isinstance(x, str) and x in ("nan", "inf", "-inf"):
        return float(x)
    return x


def summarize(reports) -> dict:
    out = {"total": 0, "PASS": 0, "FAIL": 0, "XFAIL": 0, "XPASS": 0}
    for r in reports:
        out["total"] += 1
        out[r.status] += 1
    return out


def _record(r: VerificationReport, seed) -> dict:
    return {
        "identity": r.identity,
        "n": r.n,
        "param": r.param,
        "residual": _enc_float(r.residual),
        "tolerance": _enc_float(r.tolerance),
        "mode": r.mode,
        "pass": r.passed,
        "expected_failure": r.expected_failure,
        "status": r.status,
        "inputs": {k: _enc_scalar(v) for k, v in r.inputs.items()},
        "seed": seed,
    }


def emit_report(reports, fmt: str = "json", seed=None, config: dict | None = None) -> bytes:
    """Serialize reports deterministically (sorted by identity, n, param)."""
    reports = sorted(reports, key=VerificationReport.sort_key)
    if fmt == "json":
        doc = {
            "schema": SCHEMA,
            "seed": seed,
            "config": {k: _enc_config(v) for k, v in (config or {}).items()},
            "summary": summarize(reports),
            "reports": [_record(r, seed) for r in reports],
        }
        return (json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in reports:
            w.writerow([r.identity, r.n, r.param, repr(r.residual), repr(r.tolerance), "true" if r.passed else "false"])
        return buf.getvalue().encode()
    if fmt == "human":
        lines = []
        for r in reports:
            op = "<" if r.mode == "lt" else ">="
            lines.append(f"{r.status:5s} {r.identity} n={r.n} {r.param} residual={r.residual:.3e} {op} {r.tolerance:.1e}")
        s = summarize(reports)
        lines.append(f"{s['total']} checks: {s['PASS']} passed, {s['FAIL']} failed, "
                     f"{s['XFAIL']} expected failures, {s['XPASS']} unexpected passes")
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown report format {fmt!r}")


def _enc_config(v):
    if isinstance(v, (list, tuple)):
        return [_enc_config(x) for x in v]
    if v is None:
        return None
    return _enc_scalar(v)


def parse_report(data: bytes) -> list[VerificationReport]:
    """Inverse of the JSON serialization."""
    doc = json.loads(data)
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"unsupported report schema {doc.get('schema')!r}")
    out = []
    for d in doc["reports"]:
        out.append(VerificationReport(
            identity=d["identity"], n=int(d["n"]), param=d["param"],
            residual=_dec_float(d["residual"]), tolerance=_dec_float(d["tolerance"]),
            mode=d["mode"], expected_failure=bool(d["expected_failure"]),
            inputs={k: _dec_scalar(v) for k, v in d["inputs"].items()},
        ))
    return out


def exit_status(reports) -> int:
    """0 when every gating check is fine, 1 otherwise."""
    return 0 if all(r.ok for r in reports) else 1


def jsonable(obj):
    """Plain-JSON form of nested data: complex as [re, im], arrays as lists."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if obj is None:
        return None
    return _enc_scalar(obj)


def dump_json(obj) -> bytes:
    return (json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n").encode()
