"""Generate the dual-rail entangled cat state and inspect its structure.

An odd cat of amplitude sqrt(2)*alpha enters a 50:50 beam splitter; the
two arms are tagged H and V and folded onto one spatial path by a
polarizing beam splitter.  The result is maximally entangled between its
polarization rails no matter how large alpha is, while the same
interferometer fed with an even cat always falls short of a full ebit.
"""

import numpy as np

from dualcat import (
    analytic_dual_rail_pair,
    entanglement,
    fidelity,
    generate_entangled_cat,
    generate_even_cat_control,
    mode,
)

for alpha in (0.8, 1.2, 2.0):
    rep = generate_entangled_cat(alpha)
    out = rep.output_state
    target = analytic_dual_rail_pair(out.register, alpha, "-")
    summary = entanglement(out, [mode(1, "H")])
    print(f"alpha = {alpha}")
    print(f"  fidelity to (|even>|odd> - |odd>|even>)/sqrt2 : {fidelity(out, target):.12f}")
    print(f"  entanglement entropy across H|V               : {summary.entropy_bits:.9f} bits")
    print(f"  post-selection probability                    : {rep.postselect_probability:.6f}")

print()
print("even-cat control run (no full ebit at any finite amplitude):")
for alpha in (0.5, 1.0, 2.0):
    rep = generate_even_cat_control(alpha)
    summary = entanglement(rep.output_state, [mode(1, "H")])
    x = np.exp(-2 * alpha**2)
    lam = sorted(summary.schmidt_spectrum, reverse=True)[:2]
    print(f"  alpha = {alpha}: entropy = {summary.entropy_bits:.6f} bits, "
          f"Schmidt weights {lam[0]:.4f}/{lam[1]:.4f} "
          f"(closed form ratio {((1 - x) / (1 + x))**2:.4f})")
