"""Verification reports and atomic JSON output."""

from __future__ import annotations

import json
import os
import tempfile
import time
from dataclasses import dataclass, field

from . import __version__
from .config import get_cap
from .moore import SCHEMA_VERSION

PASS, FAIL, SKIPPED = "PASS", "FAIL", "SKIPPED"
STATUSES = (PASS, FAIL, SKIPPED)


@dataclass
class Assertion:
    name: str
    status: str
    witness: dict = field(default_factory=dict)
    message: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == FAIL and not self.witness:
            raise ValueError(f"failed assertion {self.name!r} must carry a witness")

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "witness": self.witness,
                "message": self.message}


@dataclass
class VerificationReport:
    suite: str
    parameters: dict
    assertions: list = field(default_factory=list)
    wall_time: float = 0.0
    tool_version: str = __version__
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        self._t0 = time.perf_counter()
        if not self.config:
            self.config = {"cap": get_cap()}

    def check(self, name: str, ok: bool, witness: dict | None = None, message: str = "") -> bool:
        """Record a PASS/FAIL assertion; failures always keep a witness."""
        witness = dict(witness or {})
        if not ok and not witness:
            witness = {"detail": message or "assertion failed"}
        self.assertions.append(Assertion(name, PASS if ok else FAIL, witness, message))
        return ok

    def skip(self, name: str, reason: str, witness: dict | None = None):
        self.assertions.append(Assertion(name, SKIPPED, dict(witness or {}), reason))

    def fail_with(self, name: str, exc: BaseException):
        self.assertions.append(Assertion(name, FAIL, {"exception": type(exc).__name__,
                                                      "detail": str(exc)}, str(exc)))

    def finish(self) -> VerificationReport:
        self.wall_time = round(time.perf_counter() - self._t0, 6)
        return self

    @property
    def status(self) -> str:
        if any(a.status == FAIL for a in self.assertions):
            return FAIL
        if self.assertions and all(a.status == SKIPPED for a in self.assertions):
            return SKIPPED
        return PASS

    @property
    def passed(self) -> bool:
        return self.status != FAIL

    def assertion(self, name: str) -> Assertion:
        return next(a for a in self.assertions if a.name == name)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "type": "report",
            "suite": self.suite,
            "status": self.status,
            "parameters": self.parameters,
            "assertions": [a.to_json() for a in self.assertions],
            "wall_time": self.wall_time,
            "tool_version": self.tool_version,
            "config": self.config,
        }

    @classmethod
    def from_json(cls, data) -> VerificationReport:
        rep = cls(data["suite"], data["parameters"], [], data.get("wall_time", 0.0),
                  data.get("tool_version", __version__), data.get("config", {}))
        rep.assertions = [Assertion(a["name"], a["status"], a.get("witness", {}), a.get("message", ""))
                          for a in data["assertions"]]
        return rep


def write_json_atomic(path, data) -> None:
    """Write JSON to a temporary file in the target directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", suffix=".json", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(data, fh, indent=1, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
