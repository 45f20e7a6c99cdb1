"""Pseudo-unitary measurement algebra on Cartan's space C^4.

Submodules, bottom-up: :mod:`.core` (vectors, metric, sectors),
:mod:`.operators` (g-convention operators, conjugations, traces),
:mod:`.group` (SU(2,2) elements, Poincare embeddings, Cartan factors),
:mod:`.measurement` (states, devices, sequences), :mod:`.frames`
(frame transport and invariance reports), plus the CLI helpers
:mod:`.scenario`, :mod:`.checks` and :mod:`.cli`.
"""

from .core import (
    DELTA,
    G,
    TOL,
    CartanError,
    CartanVector,
    Sector,
    SectorMismatchError,
    SectorVector,
    hilbert_inner,
    indefinite_inner,
    sector_inner,
)
from .frames import FrameTransform, InvarianceReport, TransformPolicy, invariance_report
from .group import (
    DynFrameMap,
    GroupElement,
    NotInGroupError,
    cartan_decompose,
    dyn_matrix,
    poincare_matrix,
    random_dyn_frame,
    random_su22,
)
from .measurement import (
    DensityOperator,
    MeasurementDevice,
    Observable,
    ReducedState,
    State,
    big_pi,
    born,
    compose_sequence,
    exchange_device,
    m_device,
    make_state,
    pi_device,
)
from .operators import (
    Operator,
    SectorOperator,
    compose,
    dagger,
    dyad,
    sector_trace,
    star,
    trace,
)

__version__ = "0.1.0"
