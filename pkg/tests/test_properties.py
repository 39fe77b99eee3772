import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from ehmac import PolicySpec, build_iid_product, simulate_trajectory
from ehmac.regions import awgn_outer, is_submodular
from ehmac.throughput import exact_throughput, supadditivity_gaps, throughput_set_function


@st.composite
def marginals(draw, cap=1.0):
    vals = draw(st.lists(st.integers(0, 20).map(lambda j: cap * j / 20), min_size=1, max_size=3, unique=True))
    if max(vals) <= 0:
        vals = vals + [cap]
    w = draw(st.lists(st.floats(0.05, 1), min_size=len(vals), max_size=len(vals)))
    total = sum(w)
    return {v: x / total for v, x in zip(vals, w)}


policies = st.sampled_from([
    PolicySpec.fixed_fraction(),
    PolicySpec.greedy(),
    PolicySpec.constant(0.35),
    PolicySpec.quantized_fixed_fraction(4),
])


@settings(max_examples=40, deadline=None)
@given(m=st.lists(marginals(), min_size=1, max_size=3), pol=policies, seed=st.integers(0, 2**32 - 1))
def test_trajectory_bounds_and_conservation(m, pol, seed):
    model = build_iid_product(m, [1.0] * len(m))
    tr = simulate_trajectory(model, pol, 60, seed)
    assert np.all(tr.spends >= -1e-12) and np.all(tr.spends <= tr.levels + 1e-12)
    assert np.all(tr.levels <= 1 + 1e-12)
    assert np.all(np.cumsum(tr.spends, 1) <= np.cumsum(tr.arrivals, 1) + 1e-9)


@settings(max_examples=25, deadline=None)
@given(m=st.lists(marginals(), min_size=2, max_size=3), pol=policies, n=st.integers(1, 5))
def test_throughput_set_function_structure(m, pol, n):
    model = build_iid_product(m, [1.0] * len(m))
    f = throughput_set_function(pol, model, n)
    assert f.is_normalized() and f.is_monotone(1e-9)
    assert is_submodular(f, 1e-9)
    assert np.all(f.values <= awgn_outer(model.means).f.values + 1e-9)


@settings(max_examples=25, deadline=None)
@given(m=marginals(), pol=policies, n=st.integers(1, 5), k=st.integers(1, 5))
def test_supadditive_in_horizon(m, pol, n, k):
    model = build_iid_product([m], [1.0])
    assert supadditivity_gaps(pol, model, n, k)[0] >= -1e-9
    assert exact_throughput(pol, model, [0], n).value >= 0
