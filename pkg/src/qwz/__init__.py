"""Accelerated 3phi2 series identities from q-WZ pairs.

Exact q-rational algebra, q-Gosper / q-Zeilberger telescoping, normalization
of first-order recurrences into WZ pairs, identity assembly for five input
families, and high-precision numeric verification including q -> 1 limits.
"""

from __future__ import annotations

from .algebra import LaurentPoly, RationalFunction, RootScale, factor_q_linear, parse_poly, parse_rf, rf_equal, rf_normalize
from .catalog import CatalogEntry, catalog, lookup
from .constants import CATALOG, ConstantExpr, cexpr
from .identity import (
    ConditionUnsatisfiable,
    Family,
    Identity,
    SchemaError,
    build_identity,
    certify_identity,
    dumps_identity,
    family_instantiate,
    latex_identity,
    loads_identity,
    printed_theorem_term,
    theorem_form_check,
)
from .qterm import PochFactor, QProperTerm, QuadForm, classical_limit_ratio, shift_quotient_k, shift_quotient_n, term_eval
from .special import PhiSeriesSpec, PrecisionContext, phi_eval, qbinomial, qpoch, qpoch_infinite
from .telescoper import (
    CertificationFailed,
    DegenerateParameters,
    NoFirstOrder,
    NotSummable,
    QWZPair,
    Recurrence,
    certify_wz,
    ekhad_normalize,
    q_gosper,
    zeilberger_first_order,
)
from .verify import (
    ConditionViolated,
    classical_limit_check,
    convergence_report,
    telescoping_check,
    verify_identity,
)

__version__ = "0.1.0"
