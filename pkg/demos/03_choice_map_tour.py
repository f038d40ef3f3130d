"""How the kernel shapes the score-to-strategy map.

All four bundled kernels maximize <y, x> - h(x) over the simplex; they
differ in the penalty h. Steep kernels (logit, tsallis) keep every action
at positive probability no matter the scores, while the quadratic family
zeroes out actions whose scores fall far enough behind. The rate function
makes that quantitative: it maps a score deficit to the mass the kernel
still allows.
"""

import numpy as np

from rlgames import (
    choice_map,
    conjugate,
    fenchel_coupling,
    kernel_from_name,
    rate_function,
)

NAMES = ["euclidean", "logit", "tsallis", "power:1.5"]

y = np.array([1.0, 0.4, 0.0, -1.2])
print("scores y =", y)
for name in NAMES:
    k = kernel_from_name(name)
    x = choice_map(k, y)
    print(f"  {name:10s} -> {np.array2string(x, precision=4, floatmode='fixed')}"
          f"   min mass {x.min():.2e}")

print("\npushing one score down, mass of that action:")
header = "  deficit " + "".join(f"{n:>12s}" for n in NAMES)
print(header)
for t in (0.5, 2.0, 8.0, 32.0):
    row = y.copy()
    row[1] -= t
    masses = [choice_map(kernel_from_name(n), row)[1] for n in NAMES]
    print(f"  {t:7.1f} " + "".join(f"{m:12.2e}" for m in masses))

print("\nrate function at deficit z (mass allowed when trailing by z):")
zs = np.array([-6.0, -4.0, -2.0, -1.0, 0.0, 1.0])
print("  z       " + "".join(f"{z:10.1f}" for z in zs))
for name in NAMES:
    k = kernel_from_name(name)
    vals = rate_function(k, k.theta_prime_at_one() + zs)
    print(f"  {name:8s}" + "".join(f"{v:10.4f}" for v in vals))

# the conjugate ties it together: its gradient is the choice map itself
k = kernel_from_name("logit")
eps = 1e-6
grad = np.array([
    (conjugate(k, y + eps * e) - conjugate(k, y - eps * e)) / (2 * eps)
    for e in np.eye(4)
])
print("\nlogit conjugate gradient  ", grad.round(6))
print("logit choice map          ", choice_map(k, y).round(6))

# and the coupling F(p, y) measures how far a base point sits from Q(y)
p = np.array([0.25, 0.25, 0.25, 0.25])
for name in NAMES:
    k = kernel_from_name(name)
    print(f"coupling F(uniform, y) under {name:10s} {fenchel_coupling(k, p, y):.4f}"
          f"   (zero at p = Q(y): {fenchel_coupling(k, choice_map(k, y), y):.1e})")
