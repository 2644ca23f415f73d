"""Frozen regression values for fully seeded pipelines.

The numbers were computed once with the independently verified oracles
(reconstruction residuals, water-level bisection, grid search) vouching for
them; these tests pin them down so silent numerical drift shows up. Loose-ish
tolerances absorb BLAS/LAPACK variation across builds.
"""

import numpy as np

from stnoma import (
    config_from_scenario,
    p2p_capacity,
    sample_channels,
    simultaneous_triangularize,
    st_noma_region,
)
from stnoma.power import ccp_allocate

CFG = config_from_scenario(
    n_bs=5, m1=3, m2=3, d1=250.0, d2=50.0, pt_dbm=30.0, sigma2_dbm=-35.0
)


def fixed_case():
    rng = np.random.default_rng(np.random.SeedSequence([2026, 1]))
    ch = sample_channels(rng, 5, 3, 3)
    return ch, simultaneous_triangularize(ch)


def test_decomposition_diagonals():
    _, dec = fixed_case()
    np.testing.assert_allclose(
        dec.diag1, [1.66920397, 1.50881999, 1.45794418], atol=1e-7
    )
    np.testing.assert_allclose(
        dec.diag2, [1.96433256, 1.16661726, 1.83973207], atol=1e-7
    )


def test_p2p_capacities():
    ch, _ = fixed_case()
    c1 = p2p_capacity(ch.h1, CFG.pathloss1, CFG.power_budget, CFG.noise_power)
    c2 = p2p_capacity(ch.h2, CFG.pathloss2, CFG.power_budget, CFG.noise_power)
    np.testing.assert_allclose(c1, 19.066853417031364, rtol=1e-9)
    np.testing.assert_allclose(c2, 33.31206432599525, rtol=1e-9)


def test_ccp_trace_and_allocation():
    _, dec = fixed_case()
    alloc, state = ccp_allocate(dec, CFG, mu=0.5)
    want_trace = [
        16.522030401409964, 16.949143940175887, 17.324968950477377,
        17.632919624405954, 17.86743524367187, 18.036899977298614,
        18.156908856700262, 18.2424290189853, 18.30463687419667,
        18.35105604077617,
    ]
    np.testing.assert_allclose(state.objective_trace, want_trace, rtol=1e-6)
    np.testing.assert_allclose(
        alloc.p1,
        [0.18296012425436853, 0.19649586327188243, 0.19587938506418748, 0.0, 0.0],
        atol=1e-6,
    )
    np.testing.assert_allclose(
        alloc.p2,
        [0.015123938733847733, 0.0, 0.0, 0.20459669519474244, 0.20494399348097153],
        atol=1e-6,
    )


def test_region_point():
    pts = st_noma_region(CFG, [0.5], trials=4, seed=123)
    np.testing.assert_allclose(pts[0].r1, 11.238545853447116, rtol=1e-6)
    np.testing.assert_allclose(pts[0].r2, 23.188642963283794, rtol=1e-6)
