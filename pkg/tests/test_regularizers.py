import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize
from scipy.special import softmax

from rlgames import (
    InputError,
    Kernel,
    choice_map,
    choice_map_profile,
    conjugate,
    fenchel_coupling,
    kernel_from_name,
    rate_function,
    strong_convexity,
)

KERNEL_NAMES = ["euclidean", "logit", "tsallis", "power:0.8", "power:1.5", "power:2"]


def kernels():
    return [kernel_from_name(n) for n in KERNEL_NAMES]


score_vectors = st.lists(
    st.floats(min_value=-50, max_value=50, allow_nan=False),
    min_size=2, max_size=6,
).map(lambda xs: np.array(xs))


# ---------------------------------------------------------------------------
# names and kernel calculus


def test_kernel_names_resolve_to_families():
    assert kernel_from_name("euclidean").variant == "quadratic"
    assert kernel_from_name("logit").variant == "entropic"
    ts = kernel_from_name("tsallis")
    assert (ts.variant, ts.rho) == ("power", 0.5)
    assert kernel_from_name("power:1.5").rho == 1.5
    # the power family at exponent 2 is the quadratic kernel
    assert kernel_from_name("power:2").variant == "quadratic"


@pytest.mark.parametrize("bad", [
    "power:1", "power:0", "power:2.5", "power:-0.3", "power:abc", "gibbs", "",
])
def test_kernel_name_rejections(bad):
    with pytest.raises(InputError):
        kernel_from_name(bad)


def test_kernel_name_must_be_string():
    with pytest.raises(InputError):
        kernel_from_name(3)


def test_kernel_variant_guard():
    with pytest.raises(InputError):
        Kernel(name="x", variant="cubic")
    with pytest.raises(InputError):
        Kernel(name="x", variant="power", rho=None)


def test_strong_convexity_is_one_for_all_kernels():
    for k in kernels():
        assert strong_convexity(k) == 1.0


def test_theta_prime_endpoints():
    logit = kernel_from_name("logit")
    assert logit.theta_prime_at_zero() == -np.inf
    assert logit.theta_prime_at_one() == 1.0
    ts = kernel_from_name("tsallis")
    assert ts.theta_prime_at_zero() == -np.inf
    assert ts.theta_prime_at_one() == pytest.approx(-2.0)
    euc = kernel_from_name("euclidean")
    assert euc.theta_prime_at_zero() == 0.0
    assert euc.theta_prime_at_one() == 1.0


# ---------------------------------------------------------------------------
# choice maps against independent solvers


def euclidean_projection(y):
    """Textbook sort-and-threshold projection onto the simplex."""
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, len(y) + 1)
    cond = u - css / ks > 0
    k = ks[cond][-1]
    tau = css[k - 1] / k
    return np.clip(y - tau, 0.0, None)


def test_euclidean_matches_sort_projection(rng):
    k = kernel_from_name("euclidean")
    for _ in range(200):
        y = rng.uniform(-3, 3, int(rng.integers(2, 7)))
        x = choice_map(k, y)
        assert np.allclose(x, euclidean_projection(y), atol=1e-12)
        # inactive coordinates are exactly zero, not merely tiny
        assert all(v == 0.0 or v > 1e-12 for v in x)


def test_logit_matches_scipy_softmax(rng):
    k = kernel_from_name("logit")
    for _ in range(200):
        y = rng.uniform(-30, 30, int(rng.integers(2, 7)))
        assert np.allclose(choice_map(k, y), softmax(y), atol=1e-12)


def kkt_residual(kernel, y, x):
    """Optimality certificate for argmax <y,x> - h(x) on the simplex.

    On the support, y_a - theta'(x_a) must be a constant mu; off the
    support (non-steep kernels only), y_a - theta'(0+) must not exceed mu.
    """
    on = x > 0
    mu = y[on] - kernel.theta_prime(x[on])
    spread = float(mu.max() - mu.min())
    slack = 0.0
    if (~on).any():
        slack = float((y[~on] - kernel.theta_prime_at_zero() - mu.min()).max())
    return spread, slack


@pytest.mark.parametrize("name", KERNEL_NAMES)
def test_choice_map_satisfies_kkt(name, rng):
    k = kernel_from_name(name)
    for _ in range(100):
        y = rng.uniform(-8, 8, int(rng.integers(2, 7)))
        x = choice_map(k, y)
        assert x.sum() == pytest.approx(1.0, abs=1e-9)
        assert (x >= 0).all()
        spread, slack = kkt_residual(k, y, x)
        assert spread < 1e-7
        assert slack < 1e-7


@pytest.mark.filterwarnings("ignore::RuntimeWarning")  # SLSQP bound clipping
@pytest.mark.parametrize("name", ["tsallis", "power:0.8", "power:1.5"])
def test_power_matches_slsqp(name, rng):
    k = kernel_from_name(name)

    def objective(x, y):
        return float(k.entropy(np.clip(x, 1e-15, None)) - np.dot(y, x))

    for _ in range(25):
        m = int(rng.integers(2, 5))
        y = rng.uniform(-4, 4, m)
        x = choice_map(k, y)
        x0 = np.full(m, 1.0 / m)
        res = minimize(
            objective, x0, args=(y,), method="SLSQP",
            bounds=[(1e-12, 1.0)] * m,
            constraints=[{"type": "eq", "fun": lambda z: z.sum() - 1.0}],
            options={"maxiter": 500, "ftol": 1e-14},
        )
        assert res.success
        # our map should never score worse than the iterative solver
        assert objective(x, y) <= res.fun + 1e-9


def test_batch_rows_match_single_calls(rng):
    for k in kernels():
        batch = rng.uniform(-5, 5, (40, 4))
        rows = choice_map(k, batch)
        for i in range(40):
            assert np.allclose(rows[i], choice_map(k, batch[i]), atol=1e-12)


def test_single_action_is_degenerate():
    for k in kernels():
        assert choice_map(k, np.array([3.7])) == pytest.approx([1.0])


# ---------------------------------------------------------------------------
# invariance and monotonicity properties


@given(y=score_vectors, c=st.floats(min_value=-40, max_value=40, allow_nan=False))
def test_choice_map_shift_invariance(y, c):
    for k in kernels():
        assert np.allclose(choice_map(k, y + c), choice_map(k, y), atol=1e-9)


@given(y=score_vectors)
def test_choice_map_feasibility(y):
    for k in kernels():
        x = choice_map(k, y)
        assert abs(x.sum() - 1.0) < 1e-9
        assert (x >= 0).all()


@given(y=score_vectors, bump=st.floats(min_value=0.01, max_value=5))
def test_raising_a_score_never_lowers_its_mass(y, bump):
    for k in kernels():
        before = choice_map(k, y)
        lifted = y.copy()
        lifted[0] += bump
        after = choice_map(k, lifted)
        assert after[0] >= before[0] - 1e-9


def test_steep_kernels_stay_interior():
    y = np.array([40.0, 0.0, -40.0])
    for name in ("logit", "tsallis", "power:0.8"):
        x = choice_map(kernel_from_name(name), y)
        assert (x > 0).all()


def test_nonsteep_kernels_hit_the_boundary():
    y = np.array([1.0, 0.0, -1.0])
    for name in ("euclidean", "power:1.5", "power:2"):
        x = choice_map(kernel_from_name(name), y)
        assert x[-1] == 0.0


def test_suppressed_coordinate_vanishes_along_a_ray():
    base = np.array([0.3, -0.2, 0.1])
    for k in kernels():
        masses = []
        for t in (0.0, 5.0, 20.0, 2000.0):
            y = base.copy()
            y[1] -= t
            masses.append(choice_map(k, y)[1])
        assert all(b <= a + 1e-12 for a, b in zip(masses, masses[1:]))
        assert masses[-1] < 1e-5  # tsallis decays slowest, like 4 / t^2
        if not k.steep:
            assert masses[-1] == 0.0


def test_score_validation_errors():
    k = kernel_from_name("logit")
    with pytest.raises(InputError):
        choice_map(k, np.array([np.nan, 0.0]))
    with pytest.raises(InputError):
        choice_map(k, np.array([np.inf, 0.0]))
    with pytest.raises(InputError):
        choice_map(k, np.zeros((2, 2, 2)))
    with pytest.raises(InputError):
        choice_map(k, np.zeros((3, 0)))


def test_choice_map_profile_handles_mixed_sizes(rng):
    k = kernel_from_name("tsallis")
    scores = [rng.uniform(-2, 2, m) for m in (2, 4, 2, 3)]
    out = choice_map_profile(k, scores)
    assert [len(v) for v in out] == [2, 4, 2, 3]
    for got, y in zip(out, scores):
        assert np.allclose(got, choice_map(k, y), atol=1e-12)


# ---------------------------------------------------------------------------
# conjugate and coupling


def test_conjugate_at_zero_scores():
    for m in range(2, 6):
        z = np.zeros(m)
        assert conjugate(kernel_from_name("logit"), z) == pytest.approx(math.log(m))
        assert conjugate(kernel_from_name("euclidean"), z) == pytest.approx(-0.5 / m)


def test_conjugate_batch_matches_scalar(rng):
    for k in kernels():
        batch = rng.uniform(-4, 4, (10, 3))
        vals = conjugate(k, batch)
        assert vals.shape == (10,)
        for i in range(10):
            assert vals[i] == pytest.approx(conjugate(k, batch[i]), abs=1e-12)


def test_conjugate_gradient_is_the_choice_map(rng):
    eps = 1e-6
    for k in kernels():
        y = rng.uniform(-2, 2, 4)
        x = choice_map(k, y)
        for a in range(4):
            e = np.zeros(4)
            e[a] = eps
            fd = (conjugate(k, y + e) - conjugate(k, y - e)) / (2 * eps)
            assert fd == pytest.approx(x[a], abs=1e-5)


def test_coupling_nonnegative_and_zero_at_the_image(rng):
    for k in kernels():
        for _ in range(50):
            y = rng.uniform(-4, 4, 4)
            p = rng.dirichlet(np.ones(4))
            if not k.steep:
                p = choice_map(k, rng.uniform(-1, 1, 4))  # boundary points too
            assert fenchel_coupling(k, p, y) >= -1e-12
        y = rng.uniform(-3, 3, 5)
        assert fenchel_coupling(k, choice_map(k, y), y) == pytest.approx(0.0, abs=1e-10)


def test_coupling_positive_away_from_the_image():
    k = kernel_from_name("logit")
    y = np.zeros(3)
    p = np.array([0.6, 0.3, 0.1])
    assert fenchel_coupling(k, p, y) > 1e-3


@given(y=score_vectors, c=st.floats(min_value=-20, max_value=20, allow_nan=False))
def test_coupling_shift_invariance(y, c):
    p = np.full(len(y), 1.0 / len(y))
    for k in kernels():
        assert fenchel_coupling(k, p, y + c) == pytest.approx(
            fenchel_coupling(k, p, y), abs=1e-8
        )


def test_coupling_validation():
    k = kernel_from_name("logit")
    with pytest.raises(InputError):
        fenchel_coupling(k, np.array([0.5, 0.5]), np.zeros(3))
    with pytest.raises(InputError):
        fenchel_coupling(k, np.array([0.9, 0.3]), np.zeros(2))
    with pytest.raises(InputError):
        fenchel_coupling(k, np.array([-0.2, 1.2]), np.zeros(2))


# ---------------------------------------------------------------------------
# rate function


def test_rate_function_logit_values():
    k = kernel_from_name("logit")
    assert rate_function(k, 1.0) == pytest.approx(1.0)
    assert rate_function(k, 0.0) == pytest.approx(math.exp(-1.0))
    assert rate_function(k, -3.0) == pytest.approx(math.exp(-4.0))
    assert rate_function(k, 7.0) == 1.0  # saturates past theta'(1)


def test_rate_function_tsallis_values():
    k = kernel_from_name("tsallis")
    assert rate_function(k, -2.0) == pytest.approx(1.0)
    assert rate_function(k, -4.0) == pytest.approx(0.25)
    assert rate_function(k, -10.0) == pytest.approx(0.04)
    assert rate_function(k, -1.0) == 1.0


def test_rate_function_euclidean_is_a_clip():
    k = kernel_from_name("euclidean")
    z = np.array([-2.0, -1e-9, 0.0, 0.3, 1.0, 5.0])
    assert np.allclose(rate_function(k, z), [0, 0, 0, 0.3, 1, 1])


def test_rate_function_monotone_and_consistent_with_theta_prime():
    for k in kernels():
        zs = np.linspace(-6, 2, 200)
        vals = rate_function(k, zs)
        assert (np.diff(vals) >= -1e-12).all()
        interior = (vals > 1e-6) & (vals < 1.0)
        assert np.allclose(
            k.theta_prime(vals[interior]), zs[interior], atol=1e-8
        )
