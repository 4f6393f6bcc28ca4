"""From identified estimands to numbers: plug-in standardization, inverse
probability weighting, stratum-conditional effects, and seeded bootstrap
confidence intervals."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .dataset import Dataset


class EstimateError(ValueError):
    pass


@dataclass(frozen=True)
class OutcomeModel:
    """Logistic model fit by gradient descent (backtracking line search on
    the mean negative log-likelihood)."""
    feature_names: tuple[str, ...]
    coefficients: np.ndarray  # per feature, raw scale
    intercept: float
    iterations: int
    final_loss: float
    test_accuracy: float | None = None

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        lin = self.intercept + (X @ self.coefficients if len(self.feature_names)
                                else np.zeros(X.shape[0]))
        return 1.0 / (1.0 + np.exp(-lin))


def _nll(theta: np.ndarray, X: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    lin = X @ theta
    # stable log(1 + exp(lin)) - y*lin
    loss = float(np.mean(np.logaddexp(0.0, lin) - y * lin))
    p = 1.0 / (1.0 + np.exp(-lin))
    grad = X.T @ (p - y) / X.shape[0]
    return loss, grad


def fit_outcome_model(d: Dataset, outcome: str, features: Sequence[str],
                      config: Mapping | None = None) -> OutcomeModel:
    """Deterministic given (data, seed, config); features are standardized
    internally and coefficients reported on the raw scale."""
    config = dict(config or {})
    tol = float(config.get("tol", 1e-8))
    max_iters = int(config.get("max_iters", 5000))
    seed = int(config.get("seed", 0))
    test_fraction = float(config.get("test_fraction", 0.2))

    y_all = d.column(outcome)
    uniq = np.unique(y_all)
    if not np.all(np.isin(uniq, (0.0, 1.0))):
        raise EstimateError(f"outcome {outcome!r} must be binary 0/1")

    features = tuple(features)
    X_all = d.columns(features) if features else np.empty((d.n, 0))

    rng = np.random.default_rng(seed)
    perm = rng.permutation(d.n)
    n_test = int(round(test_fraction * d.n)) if test_fraction > 0 else 0
    test_idx, train_idx = perm[:n_test], perm[n_test:]
    if len(train_idx) == 0:
        raise EstimateError("empty training split")
    Xtr, ytr = X_all[train_idx], y_all[train_idx]

    mu = Xtr.mean(axis=0) if features else np.empty(0)
    sd = Xtr.std(axis=0) if features else np.empty(0)
    sd_safe = np.where(sd > 0, sd, 1.0)
    Z = (Xtr - mu) / sd_safe if features else Xtr
    if features:
        Z[:, sd == 0] = 0.0
    design = np.column_stack([np.ones(len(train_idx)), Z])

    theta = np.zeros(design.shape[1])
    loss, grad = _nll(theta, design, ytr)
    step = 1.0
    iters = 0
    for iters in range(1, max_iters + 1):
        # backtracking line search along the negative gradient
        step = min(step * 2.0, 64.0)
        while step > 1e-12:
            cand = theta - step * grad
            new_loss, new_grad = _nll(cand, design, ytr)
            if new_loss <= loss - 0.5 * step * float(grad @ grad):
                break
            step *= 0.5
        if step <= 1e-12:
            break
        delta = loss - new_loss
        theta, loss, grad = cand, new_loss, new_grad
        if delta < tol:
            break

    # un-standardize: beta_raw = beta_z / sd; intercept adjusts by mu
    if features:
        beta = np.where(sd > 0, theta[1:] / sd_safe, 0.0)
        intercept = float(theta[0] - np.sum(beta * mu))
    else:
        beta = np.empty(0)
        intercept = float(theta[0])

    test_accuracy = None
    if n_test > 0:
        model_tmp = OutcomeModel(features, beta, intercept, iters, loss)
        pred = model_tmp.predict_proba(X_all[test_idx]) >= 0.5
        test_accuracy = float(np.mean(pred == (y_all[test_idx] > 0.5)))
    return OutcomeModel(features, beta, intercept, iters, loss, test_accuracy)


# -- point estimators ----------------------------------------------------------

def _strata(d: Dataset, z: Sequence[str]) -> tuple[np.ndarray, list[tuple]]:
    """Stratum id per row plus the value tuple of each stratum."""
    cols = d.columns(z)
    uniq, inverse = np.unique(cols, axis=0, return_inverse=True)
    return inverse, [tuple(row) for row in uniq]


def estimate_plugin(d: Dataset, x: str, x_value: float, y: str,
                    z: Sequence[str] = (), mode: str = "frequency",
                    model_config: Mapping | None = None) -> float:
    """Adjustment formula sum_z P(y=1|x,z) P(z).

    frequency mode uses empirical cell frequencies and refuses empty
    (x_value, z)-cells (never imputes); model mode standardizes a fitted
    logistic model over the empirical z distribution.
    """
    z = tuple(z)
    xcol = d.column(x)
    ycol = d.column(y)
    if mode == "model":
        model = fit_outcome_model(d, y, (x,) + z, model_config)
        X = np.column_stack([np.full(d.n, x_value), d.columns(z)]) if z else \
            np.full((d.n, 1), x_value)
        return float(np.mean(model.predict_proba(X)))
    if mode != "frequency":
        raise EstimateError(f"unknown plugin mode {mode!r}")
    if not z:
        mask = xcol == x_value
        if not mask.any():
            raise EstimateError(f"no rows with {x}={x_value}")
        return float(np.mean(ycol[mask]))
    ids, values = _strata(d, z)
    total = 0.0
    for sid, zvals in enumerate(values):
        in_stratum = ids == sid
        pz = float(np.mean(in_stratum))
        cell = in_stratum & (xcol == x_value)
        if not cell.any():
            desc = ", ".join(f"{name}={val}" for name, val in zip(z, zvals))
            raise EstimateError(
                f"empty stratum for {x}={x_value} within ({desc}); "
                f"cannot estimate without imputation")
        total += float(np.mean(ycol[cell])) * pz
    return total


def estimate_ipw(d: Dataset, x: str, x_value: float, y: str,
                 z: Sequence[str] = (), clip: float = 0.01,
                 model_config: Mapping | None = None,
                 diagnostics: dict | None = None) -> float:
    """Hajek-form inverse probability weighting with a logistic propensity
    model of x on z; propensities clipped to [clip, 1-clip]."""
    if not (0 < clip <= 0.5):
        raise EstimateError("clip must lie in (0, 0.5]")
    z = tuple(z)
    xcol = d.column(x)
    ycol = d.column(y)
    arm = xcol == x_value
    if not arm.any() or arm.all():
        raise EstimateError(
            f"degenerate treatment column {x!r}: all rows in one arm")
    all_discrete = z and all(d.variable(v).cardinality is not None for v in z)
    if all_discrete:
        # Saturated logistic MLE in closed form: with one indicator per
        # z-stratum the fitted propensities are the per-cell frequencies.
        ids, _values = _strata(d, z)
        e = np.empty(d.n)
        for sid in np.unique(ids):
            cell = ids == sid
            e[cell] = float(np.mean(arm[cell]))
    elif z:
        model = fit_outcome_model(_as_binary_outcome(d, x), x, z, model_config)
        p_treat = model.predict_proba(d.columns(z))
        e = p_treat if x_value == 1 else 1.0 - p_treat
    else:
        e = np.full(d.n, float(np.mean(arm)))
    clipped = (e < clip) | (e > 1.0 - clip)
    e = np.clip(e, clip, 1.0 - clip)
    w = arm / e
    value = float(np.sum(w * ycol) / np.sum(w))
    if diagnostics is not None:
        diagnostics["clipped_fraction"] = float(np.mean(clipped))
        diagnostics["clip_engaged"] = bool(clipped.any())
        diagnostics["mean_weight"] = float(np.mean(w[arm]))
    return value


def _as_binary_outcome(d: Dataset, x: str) -> Dataset:
    col = d.column(x)
    uniq = np.unique(col)
    if not np.all(np.isin(uniq, (0.0, 1.0))):
        raise EstimateError(f"treatment {x!r} must be binary 0/1 for IPW")
    return d


# -- bootstrap -----------------------------------------------------------------

@dataclass(frozen=True)
class EstimateReport:
    point: float
    boot_mean: float
    boot_std: float
    ci_lower: float
    ci_upper: float
    k: int
    seed: int
    dropped: int = 0

    def to_json_dict(self) -> dict:
        return {
            "point": self.point, "boot_mean": self.boot_mean,
            "boot_std": self.boot_std,
            "ci95": [self.ci_lower, self.ci_upper],
            "k": self.k, "seed": self.seed, "dropped": self.dropped,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    def table_row(self, label: str = "") -> str:
        """One line in mean / std / upper-95%-CI shape."""
        return (f"{label:<24} mean={self.boot_mean:.3f} std={self.boot_std:.3f} "
                f"upper95={self.ci_upper:.3f}")


def bootstrap(estimator: Callable[[Dataset], float], d: Dataset, k: int,
              seed: int = 0) -> EstimateReport:
    """k resamples with replacement; percentile 95% CI; replicate seeds are
    derived from the master seed so reports are bit-reproducible."""
    if k < 1:
        raise EstimateError("k must be >= 1")
    point = float(estimator(d))
    values: list[float] = []
    dropped = 0
    for rep in range(k):
        rng = np.random.default_rng([seed, rep])
        idx = rng.integers(0, d.n, size=d.n)
        try:
            values.append(float(estimator(d.take(idx))))
        except ValueError:
            dropped += 1
    if dropped > 0.1 * k:
        raise EstimateError(
            f"{dropped}/{k} bootstrap replicates failed (>10%)")
    arr = np.array(values)
    lo, hi = np.percentile(arr, [2.5, 97.5])
    std = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    return EstimateReport(
        point=point, boot_mean=float(arr.mean()), boot_std=std,
        ci_lower=float(lo), ci_upper=float(hi), k=k, seed=seed, dropped=dropped)


def conditional_effect(d: Dataset, x: str, x_value: float, y: str,
                       z: Sequence[str], condition: Callable[[Dataset], np.ndarray],
                       k: int = 200, seed: int = 0,
                       mode: str = "frequency") -> EstimateReport:
    """Effect within the stratum selected by ``condition`` (a row-mask
    function), adjusting for z per the identified conditional formula."""
    mask = np.asarray(condition(d), dtype=bool)
    if mask.shape != (d.n,):
        raise EstimateError("condition must return one boolean per row")
    if not mask.any():
        raise EstimateError("condition selects zero rows")
    stratum = d.take(mask)
    return bootstrap(
        lambda data: estimate_plugin(data, x, x_value, y, z, mode=mode),
        stratum, k=k, seed=seed)
