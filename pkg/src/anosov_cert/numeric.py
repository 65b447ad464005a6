"""Global numeric tolerance policy.

Every tolerance used by the invariant checks lives here.  The environment
variable ``ANOSOV_CERT_NUMERIC_SLACK`` scales all of them by a common factor
(default 1.0), e.g. ``ANOSOV_CERT_NUMERIC_SLACK=10`` loosens every check
tenfold.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

ENV_VAR = "ANOSOV_CERT_NUMERIC_SLACK"


@dataclass(frozen=True)
class Tolerances:
    log_abs: float = 1e-10  # absolute, on log-scale quantities (Cartan vectors)
    dist_rel: float = 1e-9  # relative, on distances
    symmetry_rel: float = 1e-12
    det_rel: float = 1e-9
    eigen_gap_rel: float = 1e-8  # minimum relative root gap for ordered eigenbases
    cancellation_rel: float = 1e-12  # LogScalar subtraction

    def scaled(self, factor: float) -> "Tolerances":
        if not factor > 0:
            raise ValueError(f"tolerance scale factor must be positive, got {factor}")
        return replace(
            self,
            log_abs=self.log_abs * factor,
            dist_rel=self.dist_rel * factor,
            symmetry_rel=self.symmetry_rel * factor,
            det_rel=self.det_rel * factor,
            eigen_gap_rel=self.eigen_gap_rel * factor,
            cancellation_rel=self.cancellation_rel * factor,
        )


def tolerances() -> Tolerances:
    """Return the active policy, honouring ``ANOSOV_CERT_NUMERIC_SLACK``."""
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw.strip() == "":
        return Tolerances()
    try:
        factor = float(raw)
    except ValueError as exc:
        raise ValueError(f"{ENV_VAR} must be a positive number, got {raw!r}") from exc
    return Tolerances().scaled(factor)
