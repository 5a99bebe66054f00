"""A testing problem pairs an observation model with a cost structure."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .cost import CostSpec
from .model import ControlledBinaryModel, model_fingerprint_text, validate_model
from .errors import InvalidModelError


@dataclass(frozen=True)
class TestingProblem:
    __test__ = False  # keep pytest from collecting the class by name

    model: ControlledBinaryModel
    cost: CostSpec

    def require_valid(self) -> None:
        """Raise InvalidModelError when the model fails validation."""
        report = validate_model(self.model)
        if not report.ok:
            raise InvalidModelError(
                "model failed validation: " + ", ".join(sorted(set(report.codes()))))

    def fingerprint(self) -> str:
        """Stable hash of model and cost, used to tag sessions and reports."""
        text = model_fingerprint_text(self.model) + "|" + str(sorted(self.cost.to_json_dict().items()))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


__all__ = ["TestingProblem"]
