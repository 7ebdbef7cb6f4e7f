"""Seeded generators for the toolkit's model classes, each paired with its
closed-form oracle spectra.

Models
------
binomial / localized_bernoulli
    Deterministic dyadic cascades: each interval splits its mass with ratio
    p (constant, or p(midpoint) for the localized variant, with p valued in
    (0, 1/2)).
cantor_pair
    Barycenter of the uniform measures on two two-branch Cantor sets: ratio
    1/4 on [0, 1/2) (dimension 1/2) and ratio 1/16 on [1/2, 1) (dimension
    1/4). Cantor cylinders are themselves dyadic intervals, so the dyadic
    realization is exact down to the cylinder depth that fits the bin
    scale; the remaining mass is spread uniformly inside each cylinder.
mbm / fbm
    Reduced wavelet-coefficient model of (multi)fractional Brownian motion:
    c_{j,k} = eps_{j,k} 2^{-H(k 2^-j) j} with independent standard
    Gaussians, H valued in a compact subinterval of (0, 1). The pyramid is
    returned alongside the reconstructed signal so analysis can skip the
    transform round trip.
markov_jump
    Increasing pure-jump Markov process with state-dependent jump measure
    gamma(y) u^{-1-gamma(y)} du on (0, 1]; jumps below a truncation
    threshold are thinned away, at a documented drift cost, and the
    remaining process is simulated exactly with state-wise exponential
    clocks and inverse-CDF jump sizes.

Randomness comes from one counter-based generator (Philox) keyed by the
seed, with one substream per scale (mbm) and per epoch of pre-drawn
variates (markov), so identical specs reproduce outputs bit for bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .builders import BinnedMeasure
from .errors import DomainError, ModelError, ScaleError
from .estimators import discrete_legendre
from .wavelet import DEFAULT_FILTER, WaveletPyramid, inverse_dwt

__all__ = [
    "ModelSpec",
    "OracleSpectrum",
    "MarkovPath",
    "gen_localized_bernoulli",
    "gen_cantor_pair",
    "gen_mbm",
    "gen_markov_jump",
    "oracle",
    "synthesize",
    "write_jumps",
]

KINDS = ("binomial", "localized_bernoulli", "cantor_pair", "mbm", "fbm",
         "markov_jump", "birkhoff")

_LN2 = math.log(2.0)


def _as_function(param) -> Callable[[np.ndarray], np.ndarray]:
    """Accept a constant, a piecewise-linear table [[x, y], ...], or a
    callable; return a vectorized callable."""
    if callable(param):
        return lambda x: np.asarray(param(np.asarray(x, dtype=float)), dtype=float)
    if np.isscalar(param):
        c = float(param)
        return lambda x: np.full_like(np.asarray(x, dtype=float), c)
    table = np.asarray(param, dtype=float)
    if table.ndim != 2 or table.shape[1] != 2 or table.shape[0] < 2:
        raise ModelError("piecewise-linear tables need shape (n >= 2, 2)")
    xs, ys = table[:, 0], table[:, 1]
    if np.any(np.diff(xs) <= 0):
        raise ModelError("table abscissae must be strictly increasing")
    return lambda x: np.interp(np.asarray(x, dtype=float), xs, ys)


@dataclass(frozen=True)
class ModelSpec:
    """Model kind, kind-specific parameters, and a 64-bit seed."""

    kind: str
    params: dict
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ModelError(f"unsupported model kind {self.kind!r}; "
                             f"known kinds: {KINDS}")
        if not 0 <= int(self.seed) < 1 << 64:
            raise ModelError(f"seed must be an unsigned 64-bit integer, "
                             f"got {self.seed}")

    def to_json(self) -> str:
        payload = {"kind": self.kind, "params": self.params, "seed": self.seed}
        return json.dumps(payload, indent=2)

    @staticmethod
    def from_json(text: str) -> "ModelSpec":
        data = json.loads(text)
        if not isinstance(data, dict) or "kind" not in data:
            raise ModelError("model spec JSON must carry a 'kind' field")
        params = dict(data.get("params", {}))
        for key in ("J", "N", "T"):
            if key in data:
                params.setdefault(key, data[key])
        return ModelSpec(data["kind"], params, int(data.get("seed", 0)))


def _substream(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(stream))


# ---------------------------------------------------------------------------
# cascades


def gen_localized_bernoulli(spec: ModelSpec) -> BinnedMeasure:
    """Deterministic localized Bernoulli cascade at bin scale J.

    Generation n splits each interval I of generation n-1 with ratio
    p(midpoint of I): the left child receives mass(I) * p, the right child
    the rest. A constant p recovers the usual binomial measure.
    """
    params = spec.params
    J = int(params["J"])
    if not 4 <= J <= 24:
        raise ScaleError(f"localized Bernoulli needs 4 <= J <= 24, got {J}")
    p_fn = _as_function(params["p"])
    masses = np.array([1.0])
    for n in range(1, J + 1):
        width = 2.0 ** -(n - 1)
        mids = (np.arange(masses.size) + 0.5) * width
        ratios = p_fn(mids)
        if np.any(ratios <= 0) or np.any(ratios >= 0.5):
            raise DomainError("the splitting map p(.) must take values in (0, 1/2)")
        masses = np.column_stack([masses * ratios,
                                  masses * (1.0 - ratios)]).ravel()
    return BinnedMeasure(masses)


def _cantor_component(bins: np.ndarray, start: int, n_bins: int, mass: float,
                      subdiv: int) -> None:
    """Uniform two-branch Cantor measure with contraction 1/subdiv, realized
    exactly on dyadic bins (children at offsets 0 and (subdiv-1)/subdiv)."""
    starts = np.array([start], dtype=np.int64)
    length = n_bins
    while length >= subdiv:
        child = length // subdiv
        starts = np.concatenate([starts, starts + (subdiv - 1) * child])
        starts.sort()
        length = child
    share = mass / starts.size / length
    for s in starts:
        bins[s:s + length] += share


def gen_cantor_pair(J: int) -> BinnedMeasure:
    """Barycenter of uniform Cantor measures of dimensions 1/2 (left half)
    and 1/4 (right half), binned at scale J (J >= 8)."""
    J = int(J)
    if J < 8:
        raise ScaleError(f"the Cantor pair needs J >= 8, got {J}")
    bins = np.zeros(1 << J)
    half = 1 << (J - 1)
    _cantor_component(bins, 0, half, 0.5, 4)
    _cantor_component(bins, half, half, 0.5, 16)
    return BinnedMeasure(bins)


# ---------------------------------------------------------------------------
# multifractional Brownian motion (reduced coefficient model)


def _check_hurst(H_fn) -> None:
    probe = H_fn(np.linspace(0.0, 1.0, 1025))
    if probe.min() < 1e-6 or probe.max() > 1.0 - 1e-6:
        raise DomainError("H(.) must take values in a compact subinterval of (0, 1)")


def gen_mbm(spec: ModelSpec) -> tuple[np.ndarray, WaveletPyramid]:
    """Sampled (multi)fractional Brownian path plus its coefficient pyramid.

    Coefficients are drawn per scale from seeded substreams as c_{j,k} =
    eps_{j,k} 2^{-H(k 2^-j) j}; the signal is the inverse transform of the
    pyramid (zero coarse component).
    """
    params = spec.params
    if "J" not in params and "N" not in params:
        raise ModelError("mbm needs a scale J or a sample count N")
    J = int(params.get("J") or round(math.log2(params["N"])))
    if not 7 <= J <= 20:
        raise ScaleError(f"mbm needs 7 <= J <= 20, got {J}")
    H_fn = _as_function(params["H"])
    _check_hurst(H_fn)
    details = []
    for j in range(J):
        rng = _substream(spec.seed, j)
        eps = rng.standard_normal(1 << j)
        x = np.arange(1 << j) * 2.0 ** -j
        details.append(eps * 2.0 ** (-H_fn(x) * j))
    pyramid = WaveletPyramid(1 << J, params.get("filter", DEFAULT_FILTER),
                             tuple(details), np.zeros(1))
    return inverse_dwt(pyramid), pyramid


# ---------------------------------------------------------------------------
# increasing pure-jump Markov process


@dataclass(frozen=True)
class MarkovPath:
    """A realization of the truncated jump process: jump times/sizes, the
    path sampled on a uniform grid, and the neglected small-jump drift."""

    T: float
    eps_trunc: float
    times: np.ndarray
    sizes: np.ndarray
    grid_t: np.ndarray
    grid_M: np.ndarray
    drift_bound: float           # integral over [0, T] of the neglected mass rate
    drift_rate_max: float        # sup over visited states of the rate

    def value_at(self, t) -> np.ndarray:
        """Path value M_t (right-continuous) at arbitrary times."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.times, t, side="right")
        cum = np.concatenate([[0.0], np.cumsum(self.sizes)])
        return cum[idx]


def neglected_mass_rate(gamma: float, eps: float) -> float:
    """Mean drift per unit time of the dropped jumps of size <= eps:
    the integral of u gamma u^{-1-gamma} over (0, eps]."""
    return gamma * eps ** (1.0 - gamma) / (1.0 - gamma)


_CHUNK = 1 << 14


def gen_markov_jump(spec: ModelSpec) -> MarkovPath:
    """Exact simulation of the eps-truncated increasing jump process.

    While the state is y, jumps of size > eps arrive at rate
    Lambda(y) = eps^(-gamma(y)) - 1 and sizes follow the inverse CDF of the
    truncated power law on [eps, 1]; the state (hence the rate) only
    changes at jumps, so exponential clocks are exact. Dropped sub-
    threshold jumps contribute the reported drift bound.
    """
    params = spec.params
    T = float(params.get("T", 1.0))
    N = int(params.get("N", 1 << 12))
    eps = float(params.get("eps_trunc", 2.0 ** -20))
    if T <= 0 or N < 2:
        raise ModelError("markov_jump needs T > 0 and N >= 2")
    if not 0 < eps < 1:
        raise DomainError(f"truncation threshold must lie in (0, 1), got {eps}")
    gamma_fn = _as_function(params["gamma"])
    probe_y = np.linspace(0.0, 64.0, 8193)
    probe = gamma_fn(probe_y)
    if probe.min() <= 0 or probe.max() >= 1:
        raise DomainError("gamma(.) must take values inside (0, 1)")
    if np.any(np.diff(probe) < -1e-12):
        raise DomainError("gamma(.) must be nondecreasing (hypothesis on the "
                          "jump kernel)")

    times, sizes = [], []
    t, y = 0.0, 0.0
    drift_int, drift_max = 0.0, 0.0
    epoch = 0
    exp_buf = uni_buf = None
    pos = _CHUNK
    while True:
        if pos >= _CHUNK:
            rng = _substream(spec.seed, 1000 + epoch)
            exp_buf = rng.exponential(size=_CHUNK)
            uni_buf = rng.random(size=_CHUNK)
            epoch += 1
            pos = 0
        g = float(gamma_fn(y))
        eg = eps ** -g
        lam = eg - 1.0
        rate = neglected_mass_rate(g, eps)
        dt = exp_buf[pos] / lam
        if t + dt >= T:
            drift_int += rate * (T - t)
            drift_max = max(drift_max, rate)
            break
        drift_int += rate * dt
        drift_max = max(drift_max, rate)
        t += dt
        u = (eg - uni_buf[pos] * lam) ** (-1.0 / g)
        y += u
        times.append(t)
        sizes.append(u)
        pos += 1

    times = np.asarray(times)
    sizes = np.asarray(sizes)
    grid_t = np.arange(N) * (T / N)
    cum = np.concatenate([[0.0], np.cumsum(sizes)])
    grid_M = cum[np.searchsorted(times, grid_t, side="right")]
    return MarkovPath(T, eps, times, sizes, grid_t, grid_M, drift_int, drift_max)


def write_jumps(path, markov: MarkovPath) -> None:
    """Jump list CSV with rows `t,size`."""
    with open(path, "w") as fh:
        fh.write("t,size\n")
        for t, s in zip(markov.times, markov.sizes):
            fh.write(f"{float(t)!r},{float(s)!r}\n")


# ---------------------------------------------------------------------------
# oracles


def _binomial_tau(p_mass: float):
    lp, lq = math.log(p_mass), math.log(1.0 - p_mass)

    def tau(q):
        q = np.asarray(q, dtype=float)
        return -np.logaddexp(q * lp, q * lq) / _LN2

    return tau


_FINE_Q = np.arange(-40.0, 40.0 + 1e-9, 0.05)


@dataclass(frozen=True)
class OracleSpectrum:
    """Closed-form evaluators for a model's scaling function, Legendre-type
    spectrum, and almost-everywhere pointwise exponent.

    ``tau(x, p)`` and ``spectrum(x, H)`` are the local quantities
    (x-independent for homogeneous models); global variants take the
    x-infimum/supremum. ``pointwise`` is the exponent where the model
    prescribes one (Lebesgue-a.e. value for cascades and the jump process,
    exact for mbm) or None.
    """

    kind: str
    tau: Callable
    spectrum: Callable
    tau_global: Callable
    spectrum_global: Callable
    pointwise: Callable | None = None


def _require(params: dict, key: str, kind: str):
    if key not in params:
        raise ModelError(f"model {kind!r} needs parameter {key!r}")
    return params[key]


def oracle(spec: ModelSpec, realization=None) -> OracleSpectrum:
    """Oracle bundle for a model spec; every theoretical value used by the
    acceptance suite flows through here.

    The ``markov_jump`` oracle is conditional on a realization (the
    generated :class:`MarkovPath`), which must be passed explicitly.
    """
    kind = spec.kind
    params = spec.params

    if kind in ("binomial", "localized_bernoulli"):
        p_par = _require(params, "p", kind)
        p_fn = _as_function(p_par)

        def tau(x, q):
            px = float(p_fn(np.asarray(x, dtype=float)))
            return _binomial_tau(px)(q)

        def pointwise(x, zero_digit_freq=0.5):
            px = float(p_fn(np.asarray(x, dtype=float)))
            return (-zero_digit_freq * math.log2(px)
                    - (1.0 - zero_digit_freq) * math.log2(1.0 - px))

        def tau_global(q, x_grid=np.linspace(0.0, 1.0, 513)):
            taus = np.array([tau(x, q) for x in x_grid])
            return taus.min(axis=0)

        def spectrum(x, H):
            return discrete_legendre(_FINE_Q, tau(x, _FINE_Q), np.atleast_1d(H),
                                     floor=-math.inf, endpoint_slope_tol=1e-12)

        def spectrum_global(H, x_grid=np.linspace(0.0, 1.0, 129)):
            per_x = np.stack([spectrum(x, H) for x in x_grid])
            return per_x.max(axis=0)

        return OracleSpectrum(kind, tau, spectrum, tau_global, spectrum_global,
                              pointwise)

    if kind == "cantor_pair":
        dims = (0.5, 0.25)

        def tau(x, q):
            d = dims[0] if x < 0.5 else dims[1]
            return (np.asarray(q, dtype=float) - 1.0) * d

        def spectrum(x, H):
            d = dims[0] if x < 0.5 else dims[1]
            H = np.atleast_1d(np.asarray(H, dtype=float))
            return np.where(np.abs(H - d) <= 1e-12, d, -math.inf)

        def tau_global(q):
            return np.minimum(tau(0.25, q), tau(0.75, q))

        def spectrum_global(H):
            return np.maximum(spectrum(0.25, H), spectrum(0.75, H))

        return OracleSpectrum(kind, tau, spectrum, tau_global, spectrum_global,
                              pointwise=lambda x: dims[0] if x < 0.5 else dims[1])

    if kind in ("mbm", "fbm"):
        H_fn = _as_function(_require(params, "H", kind))
        _check_hurst(H_fn)
        fine_x = np.linspace(0.0, 1.0, 2049)
        H_vals = H_fn(fine_x)

        def tau(x, p):
            Hx = float(H_fn(np.asarray(x, dtype=float)))
            return Hx * np.asarray(p, dtype=float) - 1.0

        def spectrum(x, H):
            Hx = float(H_fn(np.asarray(x, dtype=float)))
            H = np.atleast_1d(np.asarray(H, dtype=float))
            return np.where(np.abs(H - Hx) <= 1e-9, 1.0, -math.inf)

        def tau_global(p):
            p = np.asarray(p, dtype=float)
            return np.where(p >= 0, H_vals.min() * p, H_vals.max() * p) - 1.0

        def spectrum_global(H):
            H = np.atleast_1d(np.asarray(H, dtype=float))
            inside = (H >= H_vals.min() - 1e-9) & (H <= H_vals.max() + 1e-9)
            return np.where(inside, 1.0, -math.inf)

        return OracleSpectrum(kind, tau, spectrum, tau_global, spectrum_global,
                              pointwise=lambda x: float(H_fn(np.asarray(x))))

    if kind == "birkhoff":
        a, b = float(_require(params, "a", kind)), float(_require(params, "b", kind))
        gamma_fn = _as_function(params.get("gamma", 1.0))
        theta_fn = _as_function(params.get("theta", 0.0))

        def pressure(q):
            return np.logaddexp(np.asarray(q, dtype=float) * a,
                                np.asarray(q, dtype=float) * b)

        def tau(x, p):
            p = np.asarray(p, dtype=float)
            g = float(gamma_fn(np.asarray(x, dtype=float)))
            th = float(theta_fn(np.asarray(x, dtype=float)))
            return (-pressure(-g * p) + th * p) / _LN2

        def tau_global(p, x_grid=np.linspace(0.0, 1.0, 513)):
            return np.array([tau(x, p) for x in x_grid]).min(axis=0)

        def spectrum(x, H):
            return discrete_legendre(_FINE_Q, tau(x, _FINE_Q), np.atleast_1d(H),
                                     floor=-math.inf, endpoint_slope_tol=1e-12)

        def spectrum_global(H, x_grid=np.linspace(0.0, 1.0, 129)):
            return np.stack([spectrum(x, H) for x in x_grid]).max(axis=0)

        return OracleSpectrum(kind, tau, spectrum, tau_global, spectrum_global)

    if kind == "markov_jump":
        if realization is None or not isinstance(realization, MarkovPath):
            raise ModelError("the markov_jump oracle is conditional on a "
                             "generated MarkovPath; pass realization=path")
        gamma_fn = _as_function(_require(params, "gamma", kind))
        path = realization

        def gamma_at(t):
            return float(gamma_fn(path.value_at(t)))

        def spectrum(t, h):
            g = gamma_at(t)
            h = np.atleast_1d(np.asarray(h, dtype=float))
            return np.where((h >= 0) & (h <= 1.0 / g), h * g, -math.inf)

        def tau(t, p):
            # Legendre dual of the local spectrum, valid for p >= 0
            g = gamma_at(t)
            p = np.asarray(p, dtype=float)
            return np.minimum(p / g - 1.0, 0.0)

        def spectrum_global(h, t_grid=None):
            ts = t_grid if t_grid is not None else \
                np.linspace(0.0, path.T, 257, endpoint=False)[1:]
            return np.stack([spectrum(t, h) for t in ts]).max(axis=0)

        def tau_global(p, t_grid=None):
            ts = t_grid if t_grid is not None else \
                np.linspace(0.0, path.T, 257, endpoint=False)[1:]
            return np.stack([tau(t, p) for t in ts]).min(axis=0)

        return OracleSpectrum(kind, tau, spectrum, tau_global, spectrum_global,
                              pointwise=lambda t: 1.0 / gamma_at(t))

    raise ModelError(f"no oracle for model kind {kind!r}")


# ---------------------------------------------------------------------------
# dispatcher


def synthesize(spec: ModelSpec) -> dict:
    """Generate a model realization; returns a dict with kind-specific
    products ('measure', 'signal' + 'pyramid', or 'path')."""
    if spec.kind in ("binomial", "localized_bernoulli"):
        params = dict(spec.params)
        if spec.kind == "binomial" and not np.isscalar(params.get("p")):
            raise ModelError("binomial needs a scalar splitting ratio p")
        return {"measure": gen_localized_bernoulli(
            ModelSpec("localized_bernoulli", params, spec.seed))}
    if spec.kind == "cantor_pair":
        return {"measure": gen_cantor_pair(int(_require(spec.params, "J", spec.kind)))}
    if spec.kind in ("mbm", "fbm"):
        signal, pyramid = gen_mbm(spec)
        return {"signal": signal, "pyramid": pyramid}
    if spec.kind == "markov_jump":
        return {"path": gen_markov_jump(spec)}
    raise ModelError(f"model kind {spec.kind!r} has no generator "
                     "(birkhoff families are built by localmf.builders)")
