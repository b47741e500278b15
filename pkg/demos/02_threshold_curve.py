"""
The mass/energy threshold curve
===============================

For each mass m between the two anchors the curve stores the infimum of
energy over states with I = 0 and Gamma >= 1/3.  Below M(S) no such state
exists and the threshold is +infinity; at M(Q1) the infimum hits zero.
The region K in the mass/energy plane is everything under the curve.

The full curve build runs a constrained descent per mass node; with the
small options here the whole thing takes around a minute.
"""

from dnls.ground_state import SolverOptions, minimize_weinstein
from dnls.kernel import DipoleParams
from dnls.threshold import (
    MASS_RATIO_S_TO_Q1,
    CurveOptions,
    PLUS_INFINITY,
    build_curve,
    build_s,
    in_region_k,
    write_curve,
)

params = DipoleParams(lam1=-1.0, lam2=0.5)

solver = SolverOptions(n_coarse=16, n_fine=32, descent_iters=250,
                       gamma_tol=1e-5, initial_box=12.0,
                       intrinsic_box_min=12.0, max_boundary_retries=0,
                       max_secant=4, newton_iters=4)
q1 = minimize_weinstein(params, alpha=1.0, options=solver)
mass_q1 = q1.report.mass
print("M(Q1) =", mass_q1)
print("M(S)  =", MASS_RATIO_S_TO_Q1 * mass_q1, " (ratio 4/(3 sqrt 3))")

# The S construction realizes the left anchor explicitly: a box relabel of
# Q1 with Gamma exactly 1/3 and mass exactly (4/(3 sqrt 3)) M(Q1).
s = build_s(q1)
print("E at the left anchor:", s.exact_report.energy)
print("Gamma of S:          ", s.exact_report.gamma)

opts = CurveOptions(n_grid=24, n_nodes=7, restarts_per_node=2,
                    standalone_restarts=3, iters=150, random_iters=100,
                    seed=5, probe_fractions=(0.6,))
curve = build_curve(q1, opts)

# On a grid this coarse the constrained descent can sag slightly below
# zero near the right anchor (mass piles onto a few cells, where the
# discrete sextic beats the band-limited gradient).  The production grid
# keeps the whole curve within its eps band.
print()
print("m / M(Q1)   threshold")
for m, e in curve.samples:
    print(f"  {m / mass_q1:7.4f}   {e:.6f}")

# threshold_at interpolates; outside (M(S), M(Q1)) it returns the branch
# values +infinity and 0.
below = 0.5 * MASS_RATIO_S_TO_Q1 * mass_q1
print()
print("threshold below M(S):", curve.threshold_at(below) is PLUS_INFINITY)
print("threshold at M(Q1):  ", curve.threshold_at(mass_q1))

# Region membership: small positive energy at a mass between the anchors.
m_mid = 0.5 * (MASS_RATIO_S_TO_Q1 + 1.0) * mass_q1
e_mid = curve.threshold_at(m_mid)
print("within K just under the curve:",
      in_region_k(m_mid, 0.5 * e_mid, curve))
print("outside K just above it:      ",
      not in_region_k(m_mid, 1.5 * e_mid, curve))

write_curve(curve, "demo_curve")
print()
print("curve artifacts in demo_curve/")
