"""
Bath coefficients and their negative windows
============================================

The diffusion and damping coefficients of the Ohmic bath are not rates in
the Lindblad sense: their combinations can dip below zero for a while.
"""

import numpy as np

from qbmgauss import BathSpec, delta, gamma

# one cold and one hot bath with the same coupling and cut-off
cold = BathSpec(alpha=0.3, T=1.5, omega0=7.0, omega_c=1.0)
hot = BathSpec(alpha=0.3, T=50.0, omega0=7.0, omega_c=1.0)
t = np.linspace(0.0, 6.0, 601)

for name, bath in (("T = 1.5", cold), ("T = 50", hot)):
    d = np.array([delta(x, bath) for x in t])
    g = np.array([gamma(x, bath) for x in t])
    plus, minus = d + g, d - g
    neg = t[minus < 0]
    print(f"{name}: min(D+g) = {plus.min():+.4f}, min(D-g) = {minus.min():+.4f}")
    if neg.size:
        print(f"   D-g first turns negative at t = {neg[0]:.2f}, last negative sample at t = {neg[-1]:.2f}")

# at late times gamma settles to its Markov value
print("gamma(40) =", gamma(40.0, hot), "vs prefactor", hot.prefactor)
