"""
Solving for the focusing profile
================================

Minimize the Weinstein quotient at alpha = 1 on a small grid, then look at
the certificates that come back with the profile: the two scaling
identities, the elliptic equation residual, and the sharp-constant
identity C_alpha * W(Q_alpha) = 1.

A production run uses the default SolverOptions (96^3 fine grid); here we
shrink everything so the script finishes in about a second.  The
certificates below still land near machine precision because the alpha = 1
profile is narrow enough for a box-12 grid at 32^3.
"""

import numpy as np

from dnls.ground_state import SolverOptions, minimize_weinstein, save_ground_state
from dnls.kernel import DipoleParams, classify_regime

params = DipoleParams(lam1=-1.0, lam2=0.5)
print("coupling regime:", classify_regime(params).value)

opts = SolverOptions(
    n_coarse=16,
    n_fine=32,
    descent_iters=250,
    gamma_tol=1e-5,
    initial_box=12.0,
    intrinsic_box_min=12.0,
    max_boundary_retries=0,
    max_secant=4,
    newton_iters=4,
)

gs = minimize_weinstein(params, alpha=1.0, options=opts)

print()
print("omega              ", gs.omega)
print("mass               ", gs.report.mass)
print("energy             ", gs.report.energy)
print("Gamma (sextic/grad)", gs.report.gamma)
print("sharp constant C_1 ", gs.c_alpha)

# The certificates.  Pohozaev residuals are the relative errors of the two
# scaling identities every true profile satisfies; the elliptic residual is
# the equation misfit in L2 over H1.
p1, p2 = gs.pohozaev_residuals
print()
print("pohozaev residual (multiplier pairing)", p1)
print("pohozaev residual (dilation pairing)  ", p2)
print("elliptic residual                     ", gs.elliptic_residual)

# Combining the two identities gives N = (4/3)(grad^2 + sextic) on a true
# profile, i.e. I = 0.  At this resolution I/(grad^2 + sextic) tracks the
# dilation-pairing residual above (the multiplier identity is exact on the
# lattice, the dilation identity picks up box truncation).
rep = gs.report
print("I / (grad^2 + sextic)                 ",
      rep.i_value / (rep.grad_squared + rep.sextic))

# Everything can be persisted and reloaded bit-for-bit.
paths = save_ground_state(gs, "demo_ground_state")
print()
print("saved:", *paths)

# The saved field doubles as an initial condition for the evolution demos:
#   {"type": "ground_state", "path": "demo_ground_state"}
field = gs.field
print("grid:", field.grid.n_points_per_axis, "^3, box",
      round(field.grid.box_length, 3))
print("peak |Q|:", float(np.max(np.abs(field.values))))
