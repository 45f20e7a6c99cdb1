"""Carry a state and an observable into a frame from the dynamical intersection.

Individual amplitudes change, sums over branches do not.  Run with
``python3 demos/frame_invariance.py``.
"""

import numpy as np

from cartanq.frames import (
    FrameTransform,
    TransformPolicy,
    invariance_report,
    primed_basis,
    transform_observable,
    transform_state_amplitudes,
)
from cartanq.group import random_dyn_frame
from cartanq.measurement import Observable, make_state

np.set_printoptions(precision=4, suppress=True)

f = FrameTransform(random_dyn_frame(7), "random-7")
s = make_state((0.6, 0.8j), "-", "s")
obs = Observable("-", (2.0, -1.0))

primed = transform_state_amplitudes(s, f)
print("amplitudes:        ", s.amplitudes)
print("primed amplitudes: ", primed)
print("rebuilt from primed basis:", primed @ primed_basis(f, "-"))

m = transform_observable(obs, f, TransformPolicy.FIXED_MATRIX)
print("fixed-matrix spectrum:", np.sort(np.linalg.eigvals(m.delta).real))

rep = invariance_report([s], f, [obs])
width = max(len(k) for k in rep.claims)
for name, c in sorted(rep.claims.items()):
    print(f"  {name:<{width}}  {c.residual:.1e}")
for name, c in sorted(rep.non_invariants.items()):
    print(f"  {name:<{width}}  changes by {c.residual:.3f}")
print("report passed:", rep.passed)
