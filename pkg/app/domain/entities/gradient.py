# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/domain/entities/gradient.py

import numpy as np
from pydantic import BaseModel, ConfigDict
from typing import Optional


class GradientDecomposition(BaseModel):
    """
    Splitting M = S + A of a velocity gradient into symmetric and skew parts.

    Convention: M[i, j] = du_j/dx_i, and vorticity[k] = M[i, j] - M[j, i]
    for the k-th pair i < j in row-major order.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    sym: np.ndarray
    skew: np.ndarray
    vorticity: np.ndarray
    divergence: float

    @property
    def n(self) -> int:
        return self.sym.shape[0]


class TraceReport(BaseModel):
    """
    Eigen-sums of M and S computed through traces, with identity residuals.
    The oracle fields are filled only when an eigensolver cross-check was requested.
    """
    model_config = ConfigDict(frozen=True)

    sum_lambda_m: float
    sum_lambda_m_sq: float
    sum_lambda_s: float
    sum_lambda_s_sq: float
    vorticity_sq: float
    divergence: float
    residual_sum1: float
    residual_sum2: float

    oracle_sum_lambda_m: Optional[float] = None
    oracle_sum_lambda_m_sq: Optional[float] = None
    oracle_sum_lambda_s: Optional[float] = None
    oracle_sum_lambda_s_sq: Optional[float] = None
    oracle_residual_sum1: Optional[float] = None
    oracle_residual_sum2: Optional[float] = None
