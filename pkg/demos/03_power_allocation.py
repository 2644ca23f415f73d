#!/usr/bin/env python3
"""Watch the convex-concave power allocation climb on one channel draw.

Each outer iteration maximizes a concave surrogate (the coupled shared-stream
rates are linearized around the previous user-2 powers) and re-anchors. The
printed objective is the true weighted sum rate, which ascends monotonically.
"""

import numpy as np

from stnoma import (
    ccp_allocate,
    config_from_scenario,
    sample_channels,
    simultaneous_triangularize,
)
from stnoma.power import SolverSettings

cfg = config_from_scenario(n_bs=5, m1=3, m2=3, d1=250, d2=50, pt_dbm=30, sigma2_dbm=-35)
rng = np.random.default_rng(2)
ch = sample_channels(rng, cfg.n_bs, cfg.m1, cfg.m2)
dec = simultaneous_triangularize(ch)

for mu in (0.25, 0.5, 0.75):
    alloc, state = ccp_allocate(dec, cfg, mu=mu)
    print(f"mu = {mu}:")
    for i, value in enumerate(state.objective_trace, start=1):
        print(f"  iteration {i:2d}: weighted sum rate {value:.4f} bpcu")
    print(f"  p1 = {np.round(alloc.p1, 4)}")
    print(f"  p2 = {np.round(alloc.p2, 4)}")
    print(f"  total power {alloc.total_power:.6f} W of {cfg.power_budget} W")
    inner_ok = all(r.converged for r in state.inner_results)
    print(f"  inner solves certified optimal: {inner_ok}\n")

# the ten-iteration default reproduces the figure-style trace; running the
# same algorithm with a tight stopping rule shows where it is headed
settings = SolverSettings(ccp_max_iters=200, ccp_tol=1e-7)
alloc, state = ccp_allocate(dec, cfg, mu=0.5, settings=settings)
print(f"mu = 0.5 run to a tight fixed point: {state.iterations} iterations, "
      f"rate {state.objective_trace[-1]:.4f} bpcu")
