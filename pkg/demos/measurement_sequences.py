"""Selective measurements on one sector and the closed forms of their sequences.

Run with ``python3 demos/measurement_sequences.py``.
"""

import numpy as np

from cartanq.measurement import (
    Observable,
    big_pi,
    born,
    compose_sequence,
    expectation,
    expectation_trace,
    m_device,
    make_state,
    pi_device,
)

np.set_printoptions(precision=4, suppress=True)

for sector in ("+", "-"):
    print(f"--- sector {sector}")
    a = make_state((3 / 5, 4j / 5), sector, "a")
    b = make_state((0.8, -0.6), sector, "b")
    print("Born table of a:", born(a, 0), born(a, 1))

    obs = Observable(sector, (1.0, -1.0))
    print("<S> weighted sum:", expectation(obs, a), " trace route:", expectation_trace(obs, a))

    # Pi(b) Pi(a) Pi(b) collapses to |<b_0|a_0>|^2 Pi(b)
    r = compose_sequence([big_pi(b, 0), big_pi(a, 0), big_pi(b, 0)])
    print("sandwich weight:", r.transmission, " closed-form residual:", r.closed_form_residual)

    # with the canonical selector in the middle the a-states drop out
    r = compose_sequence([big_pi(b, 0), pi_device(sector, 0), big_pi(b, 0)])
    print("hidden-middle weight <b_0|b_0>_g:", r.transmission)

    # M(a,b) M(b,a): the trace is a product of two linking weights
    r = compose_sequence([m_device(a, b, 1), m_device(b, a, 1)])
    print("M-composition trace:", r.trace)
    print("operator g-entries:\n", r.operator.entries)
