"""Structured run reports with exact serialization.

Reports are plain data: a command echo, a content hash of the parsed
input, a status, a list of named checks, and a payload dictionary.  The
JSON form uses sorted keys and renders every rational as the exact
string ``"num/den"`` (integers as ``"n"``); nothing is ever emitted as a
float.  For a fixed input and configuration the serialized report is
byte-identical across runs except for the ``timing_seconds`` field,
which carries wall-clock time and is explicitly excluded from the
determinism contract.

The input hash is sha256 over a canonical serialization of the parsed
input (not the raw file bytes), so whitespace or comment changes that do
not alter the mathematical content do not change the hash.  The exact
canonical payloads are produced by the ``fingerprint_*`` helpers.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import List, Optional, Sequence

__all__ = [
    "Check",
    "Report",
    "to_jsonable",
    "render_json",
    "render_text",
    "sha256_fingerprint",
    "fingerprint_poly",
    "fingerprint_gram",
    "fingerprint_parts",
]

STATUS_PASS = "pass"
STATUS_REJECT = "reject"
STATUS_ERROR = "error"
STATUS_RESOURCE = "resource"

EXIT_CODES = {
    STATUS_PASS: 0,
    STATUS_REJECT: 1,
    STATUS_ERROR: 2,
    STATUS_RESOURCE: 3,
}


@dataclass
class Check:
    name: str
    passed: bool
    details: dict = dc_field(default_factory=dict)


@dataclass
class Report:
    command: str
    input_hash: str
    config: dict
    status: str = STATUS_PASS
    checks: List[Check] = dc_field(default_factory=list)
    data: dict = dc_field(default_factory=dict)
    timing_seconds: Optional[float] = None

    def add_check(self, name: str, passed: bool, **details) -> Check:
        check = Check(name=name, passed=bool(passed), details=details)
        self.checks.append(check)
        if not check.passed and self.status == STATUS_PASS:
            self.status = STATUS_REJECT
        return check

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]


def to_jsonable(value):
    """Recursively convert report payloads to exact JSON-safe values.

    Fractions become ``str(Fraction)`` ("2/3", "-1/2", "4"); objects with
    a ``render()`` method (polynomials, monomials) use it; floats are
    rejected outright except for the timing channel handled separately.
    """
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not allowed in report payloads")
    if hasattr(value, "render") and callable(value.render):
        return value.render()
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(to_jsonable(v) for v in value)
    if hasattr(value, "coords"):  # discriminant elements
        return list(value.coords)
    raise TypeError(f"cannot serialize {type(value).__name__} in a report")


def render_json(report: Report) -> str:
    payload = {
        "command": report.command,
        "input_hash": report.input_hash,
        "config": to_jsonable(report.config),
        "status": report.status,
        "checks": [
            {
                "name": c.name,
                "passed": c.passed,
                "details": to_jsonable(c.details),
            }
            for c in report.checks
        ],
        "data": to_jsonable(report.data),
        "timing_seconds": (
            None if report.timing_seconds is None
            else format(report.timing_seconds, ".3f")
        ),
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _render_value(value, indent: int) -> List[str]:
    pad = "  " * indent
    jsonable = to_jsonable(value)
    if isinstance(jsonable, dict):
        lines = []
        for key in sorted(jsonable):
            sub = _render_value(jsonable[key], indent + 1)
            inline = len(sub) == 1 and not sub[0].strip().endswith(":")
            if inline and not sub[0].strip().startswith("- "):
                lines.append(f"{pad}{key}: {sub[0].strip()}")
            else:
                lines.append(f"{pad}{key}:")
                lines.extend(sub)
        return lines or [f"{pad}(empty)"]
    if isinstance(jsonable, list):
        flat = json.dumps(jsonable)
        if len(flat) <= 72:
            return [f"{pad}{flat}"]
        return [f"{pad}- " + json.dumps(item) for item in jsonable]
    return [f"{pad}{json.dumps(jsonable)}"]


def render_text(report: Report) -> str:
    lines = [
        f"command: {report.command}",
        f"input-hash: {report.input_hash}",
        f"status: {report.status}",
    ]
    if report.config:
        cfg = ", ".join(
            f"{k}={to_jsonable(v)}" for k, v in sorted(report.config.items())
        )
        lines.append(f"config: {cfg}")
    for check in report.checks:
        tag = "[ pass ]" if check.passed else "[ FAIL ]"
        summary = ""
        if check.details:
            parts = []
            for key in sorted(check.details):
                rendered = json.dumps(to_jsonable(check.details[key]))
                if len(rendered) > 48:
                    rendered = rendered[:45] + "..."
                parts.append(f"{key}={rendered}")
            summary = "  (" + ", ".join(parts) + ")"
        lines.append(f"{tag} {check.name}{summary}")
    if report.data:
        lines.append("data:")
        lines.extend(_render_value(report.data, 1))
    if report.timing_seconds is not None:
        lines.append(f"timing-seconds: {report.timing_seconds:.3f}")
    return "\n".join(lines) + "\n"


def sha256_fingerprint(payload: str) -> str:
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def fingerprint_poly(f) -> str:
    """Canonical hash payload for a polynomial input."""
    return sha256_fingerprint(
        f"poly\nvars {f.num_vars}\nfield {f.field.name}\n{f.render()}\n"
    )


def fingerprint_gram(gram: Sequence[Sequence[int]]) -> str:
    rows = "\n".join(" ".join(str(int(x)) for x in row) for row in gram)
    return sha256_fingerprint(f"gram\n{rows}\n")


def fingerprint_parts(*parts: str) -> str:
    return sha256_fingerprint("\n".join(parts) + "\n")
