"""Linear advection of sin^4 with fourth-order ENO and RK4.

Near the flat zeros of sin^4 the stencil choice flips between neighbours,
and the level-4 divided differences grow in a few steps even though the
solution itself stays bounded. Writes CSV snapshots to ./sin4-demo.
"""

import json
import os

from enolab.experiments import ExperimentSpec, run_sin4

out = "sin4-demo"
os.makedirs(out, exist_ok=True)
res = run_sin4(ExperimentSpec("sin4-instability"), out)
for rep in res.reports:
    print(rep)
print(json.dumps(res.summary, indent=1))
print(f"plot with: python {os.path.join(out, 'plot_sin4.py')}")
