"""
Checking the Gaussian formulas against density matrices
=======================================================

The Fock module integrates the same master equation for a truncated
density matrix.  Moderate squeezing keeps the truncation honest.
"""

import numpy as np

from qbmgauss import BathSpec, StateSpec, evolve, fidelity_general, make_state, petz_renyi_entropy, thermal, vacuum
from qbmgauss.fock import build_fock, evolve_fock, fock_covariance, fock_fidelity, fock_petz_renyi

bath = BathSpec(alpha=0.2, T=10.0, omega0=7.0, omega_c=1.0)
spec = StateSpec("squeezed1", r=0.5)
times = [0.0, 0.5, 1.0, 2.0, 5.0]

rho = evolve_fock(build_fock(spec, 60), times, bath)
vac = evolve_fock(build_fock(StateSpec("vacuum"), 60), times, bath)
ref = build_fock(StateSpec("thermal", n_bar=3.0), 60)

print("  t    |CM gap|    F gauss     F fock      D2 gauss    D2 fock")
for t, r, v in zip(times, rho, vac):
    g = evolve(make_state(spec), t, bath)
    cm_gap = np.max(np.abs(fock_covariance(r) - g.cm))
    fg, ff = fidelity_general(g, evolve(vacuum(), t, bath)), fock_fidelity(r, v)
    if t > 0:
        dg, df = petz_renyi_entropy(g, thermal(3.0), 2.0), fock_petz_renyi(r, ref, 2.0)
        tail = f"{dg:10.6f}  {df:10.6f}"
    else:
        tail = "   (pure state, outside the domain)"
    print(f"{t:4.1f}  {cm_gap:9.2e}  {fg:10.7f}  {ff:10.7f}  {tail}")
