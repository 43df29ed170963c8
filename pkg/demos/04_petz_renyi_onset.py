"""
When does the Petz-Renyi divergence exist?
==========================================

For kappa > 1 the Gaussian formula needs sigma_b(kappa - 1) > sigma_a(kappa).
Pure inputs never satisfy it; the bath mixes them until it does.
"""

import numpy as np

from qbmgauss import BathSpec, Convention, Metric, critical_time, metric_series, squeezed, two_mode_squeezed

print(" T     alpha   t* one-mode   t* two-mode")
for T, alpha in ((50.0, 0.15), (100.0, 0.15), (50.0, 0.3), (100.0, 0.3)):
    bath = BathSpec(alpha=alpha, T=T, omega0=7.0, omega_c=1.0)
    one = critical_time(squeezed(2.0), squeezed(3.0), bath)
    two = critical_time(two_mode_squeezed(2.0), two_mode_squeezed(3.0), bath, convention=Convention.PAPER)
    print(f"{T:5.0f}  {alpha:5.2f}   {one:10.4f}   {two:11.4f}")

# past the onset the divergence is finite and mostly decreasing
bath = BathSpec(alpha=0.3, T=50.0, omega0=7.0, omega_c=1.0)
t = np.linspace(0.0, 5.0, 501)
s = metric_series(Metric.PETZ_RENYI, squeezed(2.0), bath, t, squeezed(3.0), kappa=2.0)
defined = np.isfinite(s.values) & (t > s.t_star)
print(f"\nt* = {s.t_star:.4f}; D2 just after onset {s.values[defined][0]:.4f}, at t = 5 {s.values[-1]:.4f}")
