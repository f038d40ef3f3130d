"""Separable simplex regularizers and their choice maps.

A kernel is a convex scalar function theta on [0, 1]; the regularizer is
h(x) = sum_a theta(x_a) and the choice map picks argmax <y, x> - h(x) over
the simplex. Three families are supported:

* quadratic  theta(z) = z^2 / 2       (exact sparse Euclidean projection)
* entropic   theta(z) = z log z       (closed-form logit map)
* power      theta(z) = z^rho / (rho (rho - 1)),  rho in (0,1) or (1,2]
             (safeguarded bisection on the dual variable)

All maps accept a single score vector or a 2-D batch of rows. Steep
kernels (theta'(0+) = -inf) keep every coordinate strictly positive;
non-steep ones return exact zeros.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericError

_BISECT_ITERS = 200
_SUM_TOL = 1e-12


@dataclass(frozen=True)
class Kernel:
    """Kernel descriptor. Build with :func:`kernel_from_name`."""

    name: str
    variant: str  # 'quadratic' | 'entropic' | 'power'
    rho: float | None = None

    def __post_init__(self):
        if self.variant not in ("quadratic", "entropic", "power"):
            raise InputError(f"unknown kernel variant '{self.variant}'")
        if self.variant == "power":
            r = self.rho
            if r is None or not (0.0 < r < 1.0 or 1.0 < r <= 2.0):
                raise InputError(
                    "power kernel exponent must lie in (0,1) or (1,2]; "
                    "use the entropic kernel for the log case"
                )

    # --- scalar calculus -------------------------------------------------

    def theta(self, z):
        z = np.asarray(z, dtype=float)
        if self.variant == "quadratic":
            return 0.5 * z * z
        if self.variant == "entropic":
            out = np.where(z > 0, z * np.log(np.where(z > 0, z, 1.0)), 0.0)
            return out
        r = self.rho
        return np.power(z, r) / (r * (r - 1.0))

    def theta_prime(self, z):
        z = np.asarray(z, dtype=float)
        if self.variant == "quadratic":
            return z
        if self.variant == "entropic":
            return 1.0 + np.log(z)
        r = self.rho
        return np.power(z, r - 1.0) / (r - 1.0)

    def theta_second(self, z):
        z = np.asarray(z, dtype=float)
        if self.variant == "quadratic":
            return np.ones_like(z)
        if self.variant == "entropic":
            return 1.0 / z
        return np.power(z, self.rho - 2.0)

    def theta_prime_inv(self, w):
        """Inverse of theta' on (0, 1]; caller clips outside the range."""
        w = np.asarray(w, dtype=float)
        if self.variant == "quadratic":
            return w
        if self.variant == "entropic":
            return np.exp(w - 1.0)
        r = self.rho
        return np.power((r - 1.0) * w, 1.0 / (r - 1.0))

    @property
    def steep(self) -> bool:
        """theta'(0+) = -inf, so the choice map stays interior."""
        if self.variant == "entropic":
            return True
        return self.variant == "power" and self.rho < 1.0

    def theta_prime_at_zero(self) -> float:
        if self.steep:
            return -np.inf
        return 0.0  # quadratic and power rho>1 both have theta'(0+) = 0

    def theta_prime_at_one(self) -> float:
        if self.variant == "quadratic":
            return 1.0
        if self.variant == "entropic":
            return 1.0
        return 1.0 / (self.rho - 1.0)

    def strong_convexity(self) -> float:
        """inf of theta'' over (0, 1], the modulus K of 2-strong convexity."""
        if self.variant == "quadratic":
            return 1.0
        if self.variant == "entropic":
            return 1.0  # attained at z = 1
        # z^(rho-2) is nonincreasing on (0,1] for rho <= 2: minimum at z = 1
        return 1.0

    def entropy(self, p):
        """h(p) = sum_a theta(p_a), rows of a batch handled at once."""
        p = np.asarray(p, dtype=float)
        return self.theta(p).sum(axis=-1)


def kernel_from_name(name: str) -> Kernel:
    """Parse 'euclidean' | 'logit' | 'tsallis' | 'power:<rho>'."""
    if not isinstance(name, str):
        raise InputError("kernel name must be a string")
    if name == "euclidean":
        return Kernel(name=name, variant="quadratic")
    if name == "logit":
        return Kernel(name=name, variant="entropic")
    if name == "tsallis":
        return Kernel(name=name, variant="power", rho=0.5)
    if name.startswith("power:"):
        try:
            rho = float(name.split(":", 1)[1])
        except ValueError:
            raise InputError(f"could not parse power kernel exponent in '{name}'") from None
        if rho == 2.0:
            # identical kernel; reuse the exact projection path
            return Kernel(name=name, variant="quadratic")
        return Kernel(name=name, variant="power", rho=rho)
    raise InputError(
        f"unknown kernel '{name}' (expected euclidean, logit, tsallis, or power:<rho>)"
    )


# ---------------------------------------------------------------------------
# choice maps


def _check_scores(y):
    arr = np.asarray(y, dtype=float)
    if arr.ndim == 1:
        batch = arr[None, :]
    elif arr.ndim == 2:
        batch = arr
    else:
        raise InputError("scores must be a vector or a 2-D batch of rows")
    if batch.shape[-1] < 1:
        raise InputError("scores need at least one coordinate")
    if not np.all(np.isfinite(batch)):
        raise InputError("scores contain NaN or Inf")
    return arr, batch


def choice_map(kernel: Kernel, y) -> np.ndarray:
    """argmax_x <y, x> - h(x) over the simplex, per row."""
    arr, batch = _check_scores(y)
    if kernel.variant == "quadratic":
        out = _project_simplex(batch)
    elif kernel.variant == "entropic":
        shifted = batch - batch.max(axis=1, keepdims=True)
        e = np.exp(shifted)
        out = e / e.sum(axis=1, keepdims=True)
    else:
        out = _power_choice(kernel, batch)
    return out[0] if arr.ndim == 1 else out


def _project_simplex(batch):
    """Exact Euclidean projection of each row onto the simplex (sort based)."""
    m = batch.shape[1]
    u = np.sort(batch, axis=1)[:, ::-1]
    cs = np.cumsum(u, axis=1)
    j = np.arange(1, m + 1)
    cond = u + (1.0 - cs) / j > 0
    k = cond.sum(axis=1)  # cond[:, 0] always holds
    lam = (1.0 - cs[np.arange(len(batch)), k - 1]) / k
    return np.maximum(batch + lam[:, None], 0.0)


def _power_choice(kernel: Kernel, batch):
    """Solve sum_a g(y_a - mu) = 1 for the dual variable mu, rowwise.

    g is theta_prime_inv clipped to the kernel's domain. The bracket
    [max y - theta'(1), max y - theta'(1/m)] always straddles the root:
    at the lower end the largest coordinate alone reaches 1, at the upper
    end every coordinate is at most 1/m. Safeguarded root finding: Newton
    steps (the sum is convex and decreasing in mu) clipped to the bracket,
    falling back to the midpoint, until the simplex residual closes.
    """
    m = batch.shape[1]
    if m == 1:
        return np.ones_like(batch)
    rho = kernel.rho
    scale = rho - 1.0
    inv_exp = 1.0 / scale
    steep = kernel.steep
    top = batch.max(axis=1)
    lo = top - kernel.theta_prime_at_one()
    hi = top - float(kernel.theta_prime(1.0 / m))
    mu = 0.5 * (lo + hi)

    def eval_at(mu):
        w = batch - mu[:, None]
        if rho == 0.5:
            x = 4.0 / (w * w)  # w < 0 inside the bracket
            dx = x * np.sqrt(x)
        elif steep:
            x = np.power(scale * w, inv_exp)
            dx = np.power(x, 2.0 - rho)
        else:
            wp = np.maximum(w, 0.0)
            x = np.where(w > 0, np.power(scale * wp, inv_exp), 0.0)
            dx = np.power(x, 2.0 - rho)
        return x, x.sum(axis=1), dx.sum(axis=1)

    x, s, ds = eval_at(mu)
    for _ in range(_BISECT_ITERS):
        resid = s - 1.0
        if np.all(np.abs(resid) <= 1e-13):
            break
        pos = resid > 0
        lo = np.where(pos, mu, lo)
        hi = np.where(pos, hi, mu)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = mu + resid / ds
        mid = 0.5 * (lo + hi)
        mu = np.where((newton > lo) & (newton < hi), newton, mid)
        x, s, ds = eval_at(mu)
    if np.any(np.abs(s - 1.0) > 1e-8):
        raise NumericError("choice map root finding failed to close the bracket")
    return x / s[:, None]


def choice_map_profile(kernel: Kernel, scores) -> list[np.ndarray]:
    """Apply the choice map to one score vector per player.

    Players with equal action counts are batched into a single call, which
    matters inside simulation loops.
    """
    sizes = [len(np.asarray(s)) for s in scores]
    out: list = [None] * len(scores)
    for m in set(sizes):
        idx = [i for i, s in enumerate(sizes) if s == m]
        block = np.stack([np.asarray(scores[i], dtype=float) for i in idx])
        mapped = choice_map(kernel, block)
        for row, i in enumerate(idx):
            out[i] = mapped[row]
    return out


# ---------------------------------------------------------------------------
# conjugates and couplings


def conjugate(kernel: Kernel, y):
    """h*(y) = <y, Q(y)> - h(Q(y)), per row."""
    arr, batch = _check_scores(y)
    q = choice_map(kernel, batch)
    val = (batch * q).sum(axis=1) - kernel.entropy(q)
    return float(val[0]) if arr.ndim == 1 else val


def fenchel_coupling(kernel: Kernel, p, y) -> float:
    """F(p, y) = h(p) + h*(y) - <y, p>; nonnegative, zero iff p = Q(y)."""
    p = np.asarray(p, dtype=float)
    yv = np.asarray(y, dtype=float)
    if p.shape != yv.shape or p.ndim != 1:
        raise InputError("base point and scores must be vectors of equal length")
    if np.any(p < -1e-12) or abs(float(p.sum()) - 1.0) > 1e-9:
        raise InputError("base point must lie on the probability simplex")
    h_p = float(kernel.entropy(np.clip(p, 0.0, None)))
    return h_p + conjugate(kernel, yv) - float(np.dot(yv, p))


def rate_function(kernel: Kernel, z):
    """How much strategy mass a score deficit allows: 0 below theta'(0+),
    the inverse of theta' in between, and 1 from theta'(1-) on."""
    z_arr = np.asarray(z, dtype=float)
    lo = kernel.theta_prime_at_zero()
    hi = kernel.theta_prime_at_one()
    mid = np.clip(z_arr, None, hi)
    if not kernel.steep:
        mid = np.clip(mid, 0.0, None)  # inverse undefined below theta'(0+)
    with np.errstate(over="ignore", invalid="ignore"):
        inner = kernel.theta_prime_inv(mid)
    out = np.where(z_arr >= hi, 1.0, inner)
    if not kernel.steep:
        out = np.where(z_arr <= lo, 0.0, out)
    return float(out) if np.isscalar(z) or z_arr.ndim == 0 else out


def strong_convexity(kernel: Kernel) -> float:
    return kernel.strong_convexity()
