"""
Fidelity of two squeezed states in a common bath
================================================

Two squeezed vacua with r = 2 and r = 3 are sent through the same channel.
Their fidelity wiggles early on before creeping toward 1.
"""

import numpy as np

from qbmgauss import BathSpec, Metric, fidelity_closed, fidelity_general, metric_series, squeezed

bath = BathSpec(alpha=0.1, T=50.0, omega0=7.0, omega_c=1.0)
a, b = squeezed(2.0), squeezed(3.0)

# at t = 0 the overlap is 1/cosh(r2 - r1)
print("F(0) =", fidelity_general(a, b), " 1/cosh(1) =", 1 / np.cosh(1.0))
print("closed form agrees:", fidelity_closed(a, b))

t = np.linspace(0.0, 30.0, 1201)
series = metric_series(Metric.FIDELITY, a, bath, t, b)
f = series.values

# local extrema in the first couple of bath times
d = np.diff(f[t < 1.8])
turns = np.nonzero(np.sign(d[1:]) != np.sign(d[:-1]))[0] + 1
print("turning points below t = 1.8:", np.round(t[turns], 3))

for tk in (1.0, 5.0, 10.0, 30.0):
    print(f"F({tk:4.1f}) = {f[np.searchsorted(t, tk)]:.6f}")
