"""Cost families over experiments.

Six specifications are supported: weighted-KL sums, maxima of those over a
finite set of weight matrices, scaled single divergences, maxima of finite
divergence mixtures, posterior-separable costs built from a convex potential,
and increasing convex transforms of posterior-separable costs.

Sign convention: potentials are stored convex (entropy-style concave
potentials are negated), and the posterior-separable cost is the expected
potential of the posterior minus the potential of the prior.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .divergence import (
    DivergenceMeasure,
    InteriorParam,
    _kl_raw,
    extended_divergence,
    param_from_json,
    param_to_json,
    unified_divergence,
)
from .errors import (
    BadCostSpec,
    DimensionMismatch,
    NoSecondDerivative,
    PriorNotFullSupport,
    TransformDomain,
)
from .experiment import FiniteExperiment, posteriors


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# potentials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShannonEntropy:
    """Negated Shannon entropy: sum_i p_i log p_i."""


@dataclass(frozen=True)
class Tsallis:
    """Negated generalized entropy (sum_i p_i^sigma - 1) / (sigma - 1), sigma > 0, != 1."""

    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0) or self.sigma == 1.0:
            raise BadCostSpec(f"sigma must be positive and != 1, got {self.sigma!r}")


@dataclass(frozen=True, eq=False)
class KLPotential:
    """The convex potential whose posterior-separable cost is the weighted-KL cost.

    Phi(p) = sum_ij beta_ij (p_i/q_i) log((p_i/q_i) / (p_j/q_j)); it vanishes
    at the prior and its expectation under the posterior distribution of an
    experiment is exactly sum_ij beta_ij KL(mu_i || mu_j).
    """

    beta: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.beta, dtype=float)
        _check_beta(b)
        object.__setattr__(self, "beta", _freeze(b.copy()))


@dataclass(frozen=True, eq=False)
class RenyiPotential:
    """Phi(p) = 1 - prod_i (p_i/q_i)^alpha_i for a nonnegative interior alpha."""

    alpha: np.ndarray

    def __post_init__(self):
        param = InteriorParam(np.asarray(self.alpha, dtype=float))
        if not param.is_nonnegative():
            raise BadCostSpec("potential exponents must be nonnegative")
        object.__setattr__(self, "alpha", param.alpha)


@dataclass(frozen=True)
class CustomPotential:
    """User-supplied convex potential fn(p, q); d2(x) is the second derivative
    of the concave-entropy counterpart in the binary belief x, if available."""

    fn: Callable[[np.ndarray, np.ndarray], float]
    d2: Optional[Callable[[float], float]] = None


PotentialSpec = Union[ShannonEntropy, Tsallis, KLPotential, RenyiPotential, CustomPotential]


def potential_value(potential: PotentialSpec, p: np.ndarray, q: np.ndarray) -> float:
    """Evaluate the convex potential at posterior p under prior q."""
    if isinstance(potential, ShannonEntropy):
        pos = p > 0
        return float(np.sum(p[pos] * np.log(p[pos])))
    if isinstance(potential, Tsallis):
        return (float(np.sum(p**potential.sigma)) - 1.0) / (potential.sigma - 1.0)
    if isinstance(potential, KLPotential):
        total = 0.0
        n = p.shape[0]
        for i in range(n):
            if p[i] == 0.0:
                continue
            ri = p[i] / q[i]
            for j in range(n):
                bij = potential.beta[i, j]
                if bij == 0.0:
                    continue
                if p[j] == 0.0:
                    return math.inf
                total += bij * ri * (math.log(ri) - math.log(p[j] / q[j]))
        return total
    if isinstance(potential, RenyiPotential):
        a = potential.alpha
        active = a > 0
        if np.any(p[active] == 0.0):
            return 1.0
        return 1.0 - float(np.exp(np.sum(a[active] * (np.log(p[active]) - np.log(q[active])))))
    if isinstance(potential, CustomPotential):
        return float(potential.fn(p, q))
    raise BadCostSpec(f"unknown potential {potential!r}")


def entropy_second_derivative(potential: PotentialSpec, x: float) -> float:
    """Second derivative of the concave entropy H at binary belief x in (0, 1)."""
    if not (0.0 < x < 1.0):
        raise NoSecondDerivative(f"belief must be interior, got {x!r}")
    if isinstance(potential, ShannonEntropy):
        return -1.0 / (x * (1.0 - x))
    if isinstance(potential, Tsallis):
        s = potential.sigma
        return -s * (x ** (s - 2.0) + (1.0 - x) ** (s - 2.0))
    if isinstance(potential, CustomPotential):
        if potential.d2 is None:
            raise NoSecondDerivative("custom potential has no second derivative")
        return float(potential.d2(x))
    raise NoSecondDerivative(
        f"{type(potential).__name__} is prior-dependent; the binary convexity "
        "criterion applies to prior-independent potentials only"
    )


def f_criterion(potential: PotentialSpec, p: float) -> float:
    """p^2 (1-p)^2 H''(p) for the concave entropy H of a binary potential.

    This is the quantity whose convexity in p characterizes sub-additivity of
    the posterior-separable cost at every full-support prior.
    """
    return p * p * (1.0 - p) * (1.0 - p) * entropy_second_derivative(potential, p)


def tsallis_xform_lhs(sigma: float, x: float) -> float:
    """Odds-form criterion: F''(p) >= 0 iff this is <= 0 at x = p/(1-p)."""
    return (
        2.0 * (1.0 + x**sigma)
        + sigma * (sigma - 1.0) * (x**2 + x ** (sigma - 2.0))
        - 4.0 * sigma * (x ** (sigma - 1.0) + x)
    )


@dataclass(frozen=True)
class SubadditivityReport:
    subadditive: bool
    witness_p: Optional[float]
    max_violation: float
    grid_size: int


def ups_subadditivity_check(potential: PotentialSpec, grid_size: int = 2001) -> SubadditivityReport:
    """Test convexity of the F-criterion on an interior belief grid.

    Midpoint convexity is checked on consecutive grid triples with tolerance
    1e-9.  The reported witness is the smallest belief above 1/2 at which
    local convexity of F fails (the failure region is symmetric).
    """
    xs = np.linspace(0.0, 1.0, grid_size + 2)[1:-1]
    f = np.array([f_criterion(potential, x) for x in xs])
    gaps = f[1:-1] - 0.5 * (f[:-2] + f[2:])  # > 0 means concave locally
    max_violation = float(np.max(gaps)) if gaps.size else 0.0
    subadditive = max_violation <= 1e-9
    witness = None
    if not subadditive:
        mids = xs[1:-1]
        bad = gaps > 1e-9
        upper = bad & (mids > 0.5)
        pool = mids[upper] if np.any(upper) else mids[bad]
        witness = float(np.min(pool))
    return SubadditivityReport(subadditive, witness, max_violation, grid_size)


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityTransform:
    pass


@dataclass(frozen=True)
class RenyiLogTransform:
    """c(x) = (lam / (alpha_max - 1)) log(1 - x): convex and increasing for
    alpha_max < 1, with domain x <= 1 (x = 1 maps to +inf)."""

    lam: float
    alpha_max: float

    def __post_init__(self):
        if self.lam < 0:
            raise BadCostSpec("lam must be nonnegative")
        if not (0.0 < self.alpha_max < 1.0):
            raise BadCostSpec("alpha_max must lie in (0, 1)")


@dataclass(frozen=True)
class CustomTransform:
    """User-supplied increasing convex transform."""

    fn: Callable[[float], float]


TransformSpec = Union[IdentityTransform, RenyiLogTransform, CustomTransform]


def apply_transform(transform: TransformSpec, x: float) -> float:
    if isinstance(transform, IdentityTransform):
        return x
    if isinstance(transform, RenyiLogTransform):
        if x > 1.0:
            raise TransformDomain(f"argument {x!r} above the transform domain")
        if x == 1.0:
            return math.inf
        return transform.lam / (transform.alpha_max - 1.0) * math.log(1.0 - x)
    if isinstance(transform, CustomTransform):
        return float(transform.fn(x))
    raise BadCostSpec(f"unknown transform {transform!r}")


# ---------------------------------------------------------------------------
# cost specifications
# ---------------------------------------------------------------------------


def _check_beta(b: np.ndarray) -> None:
    if b.ndim != 2 or b.shape[0] != b.shape[1] or b.shape[0] < 2:
        raise BadCostSpec("beta must be a square matrix of size >= 2")
    if np.any(b < 0):
        raise BadCostSpec("beta must be nonnegative")
    if np.any(np.abs(np.diag(b)) > 0):
        raise BadCostSpec("beta must have a zero diagonal")


def _check_prior(q: np.ndarray) -> np.ndarray:
    if q.ndim != 1 or q.shape[0] < 2 or np.any(q <= 0) or abs(q.sum() - 1.0) > 1e-9:
        raise PriorNotFullSupport("prior must be strictly positive and sum to 1")
    return q


@dataclass(frozen=True, eq=False)
class KLCost:
    """C(mu) = sum_ij beta_ij KL(mu_i || mu_j)."""

    beta: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.beta, dtype=float)
        _check_beta(b)
        object.__setattr__(self, "beta", _freeze(b.copy()))


@dataclass(frozen=True, eq=False)
class MaxKLCost:
    """Maximum of weighted-KL costs over a finite set of weight matrices."""

    betas: tuple

    def __post_init__(self):
        mats = tuple(np.asarray(b, dtype=float) for b in self.betas)
        if not mats:
            raise BadCostSpec("need at least one weight matrix")
        for b in mats:
            _check_beta(b)
            if b.shape != mats[0].shape:
                raise BadCostSpec("weight matrices must share a shape")
        object.__setattr__(self, "betas", tuple(_freeze(b.copy()) for b in mats))


@dataclass(frozen=True)
class RenyiCost:
    """C(mu) = lam * D(mu) for a single nonnegative interior exponent vector."""

    lam: float
    param: InteriorParam

    def __post_init__(self):
        if self.lam < 0:
            raise BadCostSpec("lam must be nonnegative")
        if not isinstance(self.param, InteriorParam) or not self.param.is_nonnegative():
            raise BadCostSpec(
                "the scaled-divergence cost requires a nonnegative interior exponent vector"
            )


@dataclass(frozen=True)
class MaxRenyiCost:
    """Maximum over a finite set of measures of mixed divergences.

    Interior atoms must have nonnegative exponents (exponents above 1 define
    valid divergences but not valid costs); weighted-KL and sup atoms are
    accepted as-is.
    """

    measures: tuple

    def __post_init__(self):
        if not self.measures:
            raise BadCostSpec("need at least one measure")
        n = None
        for m in self.measures:
            if not isinstance(m, DivergenceMeasure):
                raise BadCostSpec(f"expected DivergenceMeasure, got {m!r}")
            for _, p in m.atoms:
                if isinstance(p, InteriorParam) and not p.is_nonnegative():
                    raise BadCostSpec("interior cost atoms must have nonnegative exponents")
                if n is None:
                    n = p.n_states
                elif p.n_states != n:
                    raise BadCostSpec("all atoms must share the state count")


@dataclass(frozen=True, eq=False)
class PosteriorSeparableCost:
    """Expected convex potential of the posterior minus potential of the prior."""

    prior: np.ndarray
    potential: PotentialSpec

    def __post_init__(self):
        q = _check_prior(np.asarray(self.prior, dtype=float))
        object.__setattr__(self, "prior", _freeze(q.copy()))


@dataclass(frozen=True, eq=False)
class ConvexPSCost:
    """Increasing convex transform of a posterior-separable cost."""

    prior: np.ndarray
    potential: PotentialSpec
    transform: TransformSpec

    def __post_init__(self):
        q = _check_prior(np.asarray(self.prior, dtype=float))
        object.__setattr__(self, "prior", _freeze(q.copy()))


CostSpec = Union[KLCost, MaxKLCost, RenyiCost, MaxRenyiCost, PosteriorSeparableCost, ConvexPSCost]


def spec_n_states(spec: CostSpec) -> int:
    """The state-space dimension a cost specification is built for."""
    if isinstance(spec, KLCost):
        return spec.beta.shape[0]
    if isinstance(spec, MaxKLCost):
        return spec.betas[0].shape[0]
    if isinstance(spec, RenyiCost):
        return spec.param.n_states
    if isinstance(spec, MaxRenyiCost):
        return spec.measures[0].n_states
    if isinstance(spec, (PosteriorSeparableCost, ConvexPSCost)):
        return spec.prior.shape[0]
    raise BadCostSpec(f"unknown cost specification {spec!r}")


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _kl_form(beta: np.ndarray, mu: FiniteExperiment) -> float:
    total = 0.0
    n = mu.n_states
    for i in range(n):
        for j in range(n):
            bij = beta[i, j]
            if bij == 0.0:
                continue
            d = _kl_raw(mu.probs[i], mu.probs[j])
            if math.isinf(d):
                return math.inf
            total += bij * d
    return total


def _measure_integral(measure: DivergenceMeasure, mu: FiniteExperiment) -> float:
    total = 0.0
    for w, p in measure.atoms:
        if w == 0.0:
            continue
        d = unified_divergence(p, mu)
        if math.isinf(d):
            return math.inf
        total += w * d
    return total


def _ps_value(prior: np.ndarray, potential: PotentialSpec, mu: FiniteExperiment) -> float:
    pd = posteriors(mu, prior)
    total = 0.0
    for a in range(pd.n_atoms):
        v = potential_value(potential, pd.posteriors[a], prior)
        if math.isinf(v):
            return math.inf
        total += pd.weights[a] * v
    return total - potential_value(potential, prior, prior)


def eval_cost(spec: CostSpec, mu: FiniteExperiment) -> float:
    """Evaluate a cost specification on an experiment (extended real >= 0)."""
    n = spec_n_states(spec)
    if n != mu.n_states:
        raise DimensionMismatch(f"spec is {n}-state, experiment has {mu.n_states}")
    if isinstance(spec, KLCost):
        return _kl_form(spec.beta, mu)
    if isinstance(spec, MaxKLCost):
        return max(_kl_form(b, mu) for b in spec.betas)
    if isinstance(spec, RenyiCost):
        if spec.lam == 0.0:
            return 0.0
        return spec.lam * extended_divergence(spec.param, mu)
    if isinstance(spec, MaxRenyiCost):
        return max(_measure_integral(m, mu) for m in spec.measures)
    if isinstance(spec, PosteriorSeparableCost):
        return _ps_value(spec.prior, spec.potential, mu)
    if isinstance(spec, ConvexPSCost):
        return apply_transform(spec.transform, _ps_value(spec.prior, spec.potential, mu))
    raise BadCostSpec(f"unknown cost specification {spec!r}")


def renyi_cost_as_transform_check(
    lam: float, alpha, q, mu: FiniteExperiment
) -> tuple[float, float]:
    """Evaluate the scaled divergence directly and as a transformed
    posterior-separable cost; the two agree for every full-support prior."""
    param = alpha if isinstance(alpha, InteriorParam) else InteriorParam(np.asarray(alpha, float))
    if not param.is_nonnegative():
        raise BadCostSpec("exponents must be nonnegative for the potential form")
    direct = lam * extended_divergence(param, mu) if lam > 0 else 0.0
    composed = eval_cost(
        ConvexPSCost(
            np.asarray(q, dtype=float),
            RenyiPotential(param.alpha),
            RenyiLogTransform(lam, float(param.alpha.max())),
        ),
        mu,
    )
    return direct, composed


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _potential_to_payload(p: PotentialSpec) -> dict:
    if isinstance(p, ShannonEntropy):
        return {"kind": "shannon"}
    if isinstance(p, Tsallis):
        return {"kind": "tsallis", "sigma": p.sigma}
    if isinstance(p, KLPotential):
        return {"kind": "kl_potential", "beta": p.beta.tolist()}
    if isinstance(p, RenyiPotential):
        return {"kind": "renyi_potential", "alpha": p.alpha.tolist()}
    raise BadCostSpec("custom potentials are construction-time only, not serializable")


def _potential_from_payload(payload: dict) -> PotentialSpec:
    kind = payload.get("kind")
    if kind == "shannon":
        return ShannonEntropy()
    if kind == "tsallis":
        return Tsallis(float(payload["sigma"]))
    if kind == "kl_potential":
        return KLPotential(np.asarray(payload["beta"], dtype=float))
    if kind == "renyi_potential":
        return RenyiPotential(np.asarray(payload["alpha"], dtype=float))
    raise BadCostSpec(f"unknown potential kind {kind!r}")


def _transform_to_payload(t: TransformSpec) -> dict:
    if isinstance(t, IdentityTransform):
        return {"kind": "identity"}
    if isinstance(t, RenyiLogTransform):
        return {"kind": "renyi_log", "lambda": t.lam, "alpha_max": t.alpha_max}
    raise BadCostSpec("custom transforms are construction-time only, not serializable")


def _transform_from_payload(payload: dict) -> TransformSpec:
    kind = payload.get("kind")
    if kind == "identity":
        return IdentityTransform()
    if kind == "renyi_log":
        return RenyiLogTransform(float(payload["lambda"]), float(payload["alpha_max"]))
    raise BadCostSpec(f"unknown transform kind {kind!r}")


def cost_to_json(spec: CostSpec) -> str:
    if isinstance(spec, KLCost):
        payload = {"kind": "kl", "beta": spec.beta.tolist()}
    elif isinstance(spec, MaxKLCost):
        payload = {"kind": "max_kl", "betas": [b.tolist() for b in spec.betas]}
    elif isinstance(spec, RenyiCost):
        payload = {
            "kind": "renyi",
            "lambda": spec.lam,
            "param": json.loads(param_to_json(spec.param)),
        }
    elif isinstance(spec, MaxRenyiCost):
        payload = {
            "kind": "max_renyi",
            "measures": [
                {"atoms": [{"weight": w, "param": json.loads(param_to_json(p))} for w, p in m.atoms]}
                for m in spec.measures
            ],
        }
    elif isinstance(spec, PosteriorSeparableCost):
        payload = {
            "kind": "posterior_separable",
            "prior": spec.prior.tolist(),
            "potential": _potential_to_payload(spec.potential),
        }
    elif isinstance(spec, ConvexPSCost):
        payload = {
            "kind": "convex_ps",
            "prior": spec.prior.tolist(),
            "potential": _potential_to_payload(spec.potential),
            "transform": _transform_to_payload(spec.transform),
        }
    else:
        raise BadCostSpec(f"unknown cost specification {spec!r}")
    return json.dumps(payload)


def cost_from_json(text: str) -> CostSpec:
    payload = json.loads(text) if isinstance(text, str) else text
    kind = payload.get("kind")
    if kind == "kl":
        return KLCost(np.asarray(payload["beta"], dtype=float))
    if kind == "max_kl":
        return MaxKLCost(tuple(np.asarray(b, dtype=float) for b in payload["betas"]))
    if kind == "renyi":
        param = param_from_json(payload["param"])
        if not isinstance(param, InteriorParam):
            raise BadCostSpec("renyi cost parameter must be of interior kind")
        return RenyiCost(float(payload["lambda"]), param)
    if kind == "max_renyi":
        measures = tuple(
            DivergenceMeasure(
                tuple((float(a["weight"]), param_from_json(a["param"])) for a in m["atoms"])
            )
            for m in payload["measures"]
        )
        return MaxRenyiCost(measures)
    if kind == "posterior_separable":
        return PosteriorSeparableCost(
            np.asarray(payload["prior"], dtype=float),
            _potential_from_payload(payload["potential"]),
        )
    if kind == "convex_ps":
        return ConvexPSCost(
            np.asarray(payload["prior"], dtype=float),
            _potential_from_payload(payload["potential"]),
            _transform_from_payload(payload["transform"]),
        )
    raise BadCostSpec(f"unknown cost kind {kind!r}")
