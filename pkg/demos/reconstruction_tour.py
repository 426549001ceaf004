"""Cell averages in, piecewise polynomials out.

Samples sin(x) on a coarse periodic mesh, reconstructs it with ENO at a few
orders and prints the stencils the algorithm picked together with the error
at the cell edges. Then it puts a jump into the data and shows that the
stencils move away from the discontinuity.

Run with ``python demos/reconstruction_tour.py``.
"""

import numpy as np

from enolab import build_uniform_mesh, reconstruct, sample_averages
from enolab.mesh import CONSTANT

# %% smooth data: edge errors shrink with the order
mesh = build_uniform_mesh(0.0, 2 * np.pi, 16)
u = sample_averages(np.sin, mesh)
for k in (1, 2, 3, 4):
    r = reconstruct(u, k)
    xr = mesh.interfaces[1:]
    vm = np.array([r.trace.v_minus[r.trace.position(i)] for i in range(mesh.n)])
    print(f"k={k}: max |p_i(x_{{i+1/2}}) - sin| = {np.abs(vm - np.sin(xr)).max():.2e}")

# %% a jump: the stencil offsets r_i = i - s_i steer around it
mesh = build_uniform_mesh(-1.0, 1.0, 12)
step = sample_averages(lambda x: 1.0 * (x > 0.1234), mesh, breakpoints=(0.1234,), boundary=CONSTANT)
r = reconstruct(step, 3)
print("cell  average  stencil start  offset")
for i in range(mesh.n):
    s = r.selection.stencil(i)
    print(f"{i:4d}  {step.values[i]:7.3f}  {s:13d}  {i - s:6d}")
