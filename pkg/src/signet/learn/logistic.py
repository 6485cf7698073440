"""L2-regularised logistic regression fitted by damped Newton iterations."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateDesign, DidNotConverge, DimensionMismatch, EmptyData

Z_95 = 1.96


_NOISE = 64 * np.finfo(float).eps


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _log1pexp(z):
    return np.logaddexp(0.0, z)


def _targets(y):
    y = np.asarray(y)
    if np.all(np.isin(y, (-1, 1))):
        return (y > 0).astype(float)
    if np.all(np.isin(y, (0, 1))):
        return y.astype(float)
    raise ValueError("labels must be +/-1 or 0/1")


def objective(theta, X, t, lam, weights=None):
    """Summed negative log-likelihood plus ``lam/2 * |w|^2``; ``theta = [intercept, w]``."""
    z = theta[0] + X @ theta[1:]
    losses = _log1pexp(z) - t * z
    w = np.ones(len(t)) if weights is None else weights
    return float(np.sum(w * losses) + 0.5 * lam * theta[1:] @ theta[1:])


def gradient(theta, X, t, lam, weights=None):
    z = theta[0] + X @ theta[1:]
    w = np.ones(len(t)) if weights is None else weights
    r = w * (sigmoid(z) - t)
    g = np.empty_like(theta)
    g[0] = r.sum()
    g[1:] = X.T @ r + lam * theta[1:]
    return g


def _hessian(theta, X, t, lam, weights=None):
    z = theta[0] + X @ theta[1:]
    p = sigmoid(z)
    w = np.ones(len(t)) if weights is None else weights
    s = w * p * (1 - p)
    Xa = np.hstack([np.ones((len(t), 1)), X])
    H = Xa.T @ (Xa * s[:, None])
    H[1:, 1:] += lam * np.eye(X.shape[1])
    return H


@dataclass
class LogisticModel:
    weights: np.ndarray
    intercept: float
    lam: float
    std_errors: np.ndarray
    intercept_se: float
    iterations: int
    grad_norm: float
    feature_names: list = None
    eps_p: float = 0.5
    eps_n: float = 0.5
    standardization: dict = field(default=None)

    kind = "logistic"

    @property
    def odds_ratios(self):
        return np.exp(self.weights)

    @property
    def ci_low(self):
        return np.exp(self.weights - Z_95 * self.std_errors)

    @property
    def ci_high(self):
        return np.exp(self.weights + Z_95 * self.std_errors)

    def decision_function(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != len(self.weights):
            raise DimensionMismatch(
                f"model has {len(self.weights)} features, rows have {X.shape[1]}"
            )
        if self.standardization is not None:
            mean = np.asarray(self.standardization["mean"])
            scale = np.asarray(self.standardization["scale"])
            X = (X - mean) / scale
        return self.intercept + X @ self.weights

    def predict_proba(self, X):
        """Probability of a positive link for each row of ``X``."""
        return sigmoid(self.decision_function(X))

    def to_dict(self):
        return {
            "kind": self.kind,
            "weights": [float(w) for w in self.weights],
            "intercept": float(self.intercept),
            "lambda": float(self.lam),
            "std_errors": [float(s) for s in self.std_errors],
            "intercept_se": float(self.intercept_se),
            "convergence": {"iterations": int(self.iterations), "grad_norm": float(self.grad_norm)},
            "feature_names": self.feature_names,
            "thresholds": {"eps_p": self.eps_p, "eps_n": self.eps_n},
            "standardization": self.standardization,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            weights=np.asarray(d["weights"], dtype=float),
            intercept=float(d["intercept"]),
            lam=float(d["lambda"]),
            std_errors=np.asarray(d["std_errors"], dtype=float),
            intercept_se=float(d["intercept_se"]),
            iterations=int(d["convergence"]["iterations"]),
            grad_norm=float(d["convergence"]["grad_norm"]),
            feature_names=d.get("feature_names"),
            eps_p=float(d.get("thresholds", {}).get("eps_p", 0.5)),
            eps_n=float(d.get("thresholds", {}).get("eps_n", 0.5)),
            standardization=d.get("standardization"),
        )


def fit_logistic(
    X,
    y,
    lam=1.0,
    *,
    tol=1e-8,
    max_iter=500,
    sample_weight=None,
    balanced=False,
    init=None,
    feature_names=None,
    standardize=False,
):
    """Fit by Newton's method with backtracking line search.

    Minimises the summed negative log-likelihood plus ``lam/2 * |w|^2``; the
    intercept is not penalised. Iteration stops once the gradient norm is at
    most ``tol``. Standard errors come from the inverse Hessian of the
    penalised objective at the optimum.

    ``balanced`` weights each row by the inverse prevalence of its class.
    ``standardize`` fits on z-scored columns; the stored weights then refer
    to the standardised scale and prediction applies the same transform.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    t = _targets(y)
    n, d = X.shape
    if n == 0:
        raise EmptyData("no rows to fit")
    if len(t) != n:
        raise DimensionMismatch("X and y disagree on row count")
    if t.min() == t.max():
        raise DegenerateDesign("need at least one row of each class")
    if lam < 0:
        raise ValueError("lam must be non-negative")
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")

    standardization = None
    if standardize:
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        scale = np.where(std > 0, std, 1.0)
        X = (X - mean) / scale
        standardization = {"mean": mean.tolist(), "scale": scale.tolist()}

    weights = None
    if sample_weight is not None:
        weights = np.asarray(sample_weight, dtype=float)
    if balanced:
        prev = t.mean()
        cw = np.where(t > 0, 0.5 / prev, 0.5 / (1 - prev))
        weights = cw if weights is None else weights * cw

    theta = np.zeros(d + 1)
    if init is not None:
        theta = np.asarray(init, dtype=float).copy()
    else:
        prev = t.mean() if weights is None else np.sum(weights * t) / np.sum(weights)
        theta[0] = np.log(prev / (1 - prev))

    f = objective(theta, X, t, lam, weights)
    g = gradient(theta, X, t, lam, weights)
    gnorm = float(np.linalg.norm(g))
    it = 0
    while gnorm > tol and it < max_iter:
        it += 1
        H = _hessian(theta, X, t, lam, weights)
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, g, rcond=None)[0]
        if not np.all(np.isfinite(step)) or step @ g <= 0:
            step = g
        alpha = 1.0
        while True:
            cand = theta - alpha * step
            fc = objective(cand, X, t, lam, weights)
            # sufficient decrease, up to rounding noise in f
            if fc <= f - 1e-4 * alpha * (step @ g) + _NOISE * abs(f) or alpha < 1e-12:
                break
            alpha *= 0.5
        if fc > f + _NOISE * abs(f):
            # no decrease possible in floating point; accept the current point
            break
        theta, f = cand, fc
        g = gradient(theta, X, t, lam, weights)
        gnorm = float(np.linalg.norm(g))

    if lam == 0 and _separable(theta, X, t):
        raise DegenerateDesign("classes are perfectly separated and lam = 0")
    if gnorm > tol:
        # a stalled line search at the floating-point floor of the objective
        # is accepted as converged
        if not gnorm <= max(tol, 1e3 * np.finfo(float).eps * (1 + abs(f))):
            raise DidNotConverge(it, gnorm)

    try:
        cov = np.linalg.inv(_hessian(theta, X, t, lam, weights))
    except np.linalg.LinAlgError:
        raise DegenerateDesign("information matrix is singular; add regularisation") from None
    diag = np.diag(cov)
    if np.any(diag < 0) or not np.all(np.isfinite(diag)):
        raise DegenerateDesign("information matrix is not positive definite")
    se = np.sqrt(diag)
    return LogisticModel(
        weights=theta[1:].copy(),
        intercept=float(theta[0]),
        lam=float(lam),
        std_errors=se[1:],
        intercept_se=float(se[0]),
        iterations=it,
        grad_norm=gnorm,
        feature_names=list(feature_names) if feature_names is not None else None,
        standardization=standardization,
    )


def _separable(theta, X, t):
    z = theta[0] + X @ theta[1:]
    return bool(np.all((z > 0) == (t > 0)))


@dataclass
class CoefficientRow:
    name: str
    coefficient: float
    std_error: float
    odds_ratio: float
    ci_low: float
    ci_high: float
    expected_sign: int
    agreement: str


def coefficient_report(model, feature_names=None, expected_signs=None):
    """Per-feature coefficient, standard error, odds ratio and 95% CI.

    ``agreement`` is ``"agree"``/``"disagree"`` comparing the coefficient's
    sign with the expected one, ``"neutral"`` for a zero coefficient, and
    ``"none"`` when no sign is expected.
    """
    names = feature_names or model.feature_names or [f"x{n}" for n in range(len(model.weights))]
    signs = expected_signs if expected_signs is not None else [0] * len(model.weights)
    if len(names) != len(model.weights) or len(signs) != len(model.weights):
        raise DimensionMismatch("names/expected signs must match the number of weights")
    rows = []
    for name, b, se, exp in zip(names, model.weights, model.std_errors, signs):
        b, se = float(b), float(se)
        if b == 0:
            agreement = "neutral"
        elif not exp:
            agreement = "none"
        else:
            agreement = "agree" if np.sign(b) == np.sign(exp) else "disagree"
        rows.append(
            CoefficientRow(
                name, b, se, float(np.exp(b)), float(np.exp(b - Z_95 * se)),
                float(np.exp(b + Z_95 * se)), int(exp or 0), agreement,
            )
        )
    return rows
