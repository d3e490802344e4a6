# SPDX-FileCopyrightText: 2024-present Alan Meeson <am@carefullycalculated.co.uk>
#
# SPDX-License-Identifier: Apache-2.0
from computable_analysis.creal import CReal, MonotoneWitness, diff_quotient_sequence
from computable_analysis.derivative_lab import (
    GaugeSchedule,
    UAFunction,
    build_uA,
    dseq_lower_bounds,
    gauge_G,
    poly_p,
    sigma1_general_construction,
    sigma1_to_function,
)
from computable_analysis.dovetail import (
    dyadic_bound_search,
    race,
    semidecide_below,
    semidecide_positive,
    upper_bound_detector,
)
from computable_analysis.enumerators import Enumerator, specker_sequence, step_enumerator, zw_real
from computable_analysis.errors import BudgetExhaustedError, DomainError, ValidationError
from computable_analysis.exact_numeric import DyadicInterval, enclose_cos, enclose_ln, enclose_sin, interval_arith
from computable_analysis.trig_series import EffectiveFunction, TrigPoly, certified_sup, eval_trig_poly
from computable_analysis.wave_radial import RadialProfile, kirchhoff_quadrature_oracle, wave_at_origin, window

__all__ = [
    "BudgetExhaustedError",
    "CReal",
    "DomainError",
    "DyadicInterval",
    "EffectiveFunction",
    "Enumerator",
    "GaugeSchedule",
    "MonotoneWitness",
    "RadialProfile",
    "TrigPoly",
    "UAFunction",
    "ValidationError",
    "build_uA",
    "certified_sup",
    "diff_quotient_sequence",
    "dseq_lower_bounds",
    "dyadic_bound_search",
    "enclose_cos",
    "enclose_ln",
    "enclose_sin",
    "eval_trig_poly",
    "gauge_G",
    "interval_arith",
    "kirchhoff_quadrature_oracle",
    "poly_p",
    "race",
    "semidecide_below",
    "semidecide_positive",
    "sigma1_general_construction",
    "sigma1_to_function",
    "specker_sequence",
    "step_enumerator",
    "upper_bound_detector",
    "wave_at_origin",
    "window",
    "zw_real",
]
