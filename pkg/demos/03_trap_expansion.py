"""
Tenfold expansion of a harmonic trap in unit time.

A plain frequency ramp from 1 to 0.1 excites the atom badly. Adding the
dilation term -(pq + qp) w'/(4w) keeps it in the instantaneous ground
state; squeezing that Hamiltonian by U_q gives an ordinary trap with a
modified (at times inverted) frequency that produces the same densities
and, with a flat-ended ramp, the same final state.
"""

import numpy as np

from sta_pictures import expansion_suite, make_ramp
from sta_pictures.harmonic import omega_prime_squared

ramp = make_ramp(1.0, 0.1, 1.0)
t = np.linspace(0, 1, 1001)
w2 = omega_prime_squared(ramp, t)
print(f"modified frequency squared ranges over [{w2.min():.3f}, {w2.max():.3f}]; "
      f"inverted for {np.mean(w2 < 0):.0%} of the ramp\n")

runs, scaling = expansion_suite(ramp)
for kind, r in runs.items():
    s = r.summary()
    print(f"{kind:10s} P0 = {s['final_P0']:.8f}  <H> = {s['final_energy']:.6f}  width = {s['final_width']:.5f}")
print(f"\nscaling-solution prediction for the reference run: P0 = {scaling.ground_population():.8f}")
cd, mod = runs["cd"].run.final, runs["modified"].run.final
print(f"<cd|modified> at t_f = {cd.overlap(mod):.8f}")
