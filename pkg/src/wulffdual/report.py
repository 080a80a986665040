"""Structured outcome of a numerical check."""

from dataclasses import dataclass, field

import numpy as np

PASS = "pass"
FAIL = "fail"
NOT_APPLICABLE = "not-applicable"


@dataclass
class CheckReport:
    name: str
    status: str
    subject: str = ""
    residuals: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    seed: int = 0
    trials: int = 1
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return self.status == PASS

    @property
    def failed(self):
        return self.status == FAIL

    def residual(self, label):
        for name, value in self.residuals:
            if name == label:
                return value
        raise KeyError(label)

    def to_dict(self):
        return {
            "name": self.name,
            "subject": self.subject,
            "status": self.status,
            "passed": self.passed,
            "residuals": [[label, _plain(v)] for label, v in self.residuals],
            "witnesses": [[float(x) for x in np.ravel(w)] for w in self.witnesses],
            "seed": int(self.seed),
            "trials": int(self.trials),
            "notes": list(self.notes),
        }


def _plain(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def verdict(ok):
    return PASS if ok else FAIL
