"""How large can a reconstructed jump get?

For every order the ratio between the reconstructed interface jump and the
jump of the cell averages has a sharp upper bound. This script draws random
data, records the largest ratio it sees, and compares it with the bound and
with the ratio produced by the extremal family of data.
"""

from enolab.stability import UPPER_BOUNDS, random_suite, worst_case

print(" k   bound      random max   extremal (eps=1e-10)")
for k in range(1, 7):
    res = random_suite(k, 5000, seed=1)
    _, extremal = worst_case(k, 1e-10)
    sign_ok = "ok" if res["sign"].passed else "VIOLATED"
    print(f"{k:2d}  {float(UPPER_BOUNDS[k]):8.4f}  {res['upper_bound'].max_stat:10.4f}  "
          f"{extremal:10.4f}   sign property {sign_ok}")

# the bound is approached from below as the perturbation shrinks
for eps in (0.5, 0.1, 1e-3, 1e-6):
    print(f"k=3 eps={eps:g}: ratio {worst_case(3, eps)[1]:.6f}")
