"""Penalised linear regression with cross-validated absolute error.

The objective is ``sum_i (y_i - b - x_i . w)^2 + eta * P(w)`` with ``P`` the L1
norm (cyclic coordinate descent with soft thresholding) or the squared L2 norm
(closed form). Columns are standardised before fitting, the intercept is not
penalised and weights are reported on the original feature scale.
"""
from __future__ import annotations

import warnings
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataWarning, EvaluationError
from .features import FeatureMatrix, apply_imputation, column_means, polynomial_features

DEFAULT_ETA_GRID = (0.01, 0.02, 0.03, 0.04)
PENALTIES = ("l1", "l2")


@dataclass
class RegressionModel:
    names: list[str]
    weights: np.ndarray
    intercept: float
    penalty: str
    eta: float
    dropped: list[str] = field(default_factory=list)
    sweeps: int = 0

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        return self.intercept + X @ self.weights


def soft_threshold(x: float, t: float) -> float:
    """sign(x) * max(|x| - t, 0)."""
    if x > t:
        return x - t
    if x < -t:
        return x + t
    return 0.0


POLISH_EVERY = 25


def _polish(G: np.ndarray, c: np.ndarray, w: list[float], half: float) -> np.ndarray | None:
    """Exact minimiser for the current support and signs, or None if it fails the optimality check.

    On the support the gradient must equal ``half * sign``; off it, its size
    must stay within ``half``.
    """
    S = [j for j, x in enumerate(w) if x != 0.0]
    if not S:
        return None
    signs = np.sign([w[j] for j in S])
    try:
        wS = np.linalg.solve(G[np.ix_(S, S)], c[S] - half * signs)
    except np.linalg.LinAlgError:
        return None
    if np.any(np.sign(wS) != signs):
        return None
    full = np.zeros(len(c))
    full[S] = wS
    slack = 1e-9 * max(1.0, float(np.abs(c).max()))
    if np.any(np.abs(c - G @ full) > half + slack):
        return None
    return full


def _lasso_cd(G: np.ndarray, c: np.ndarray, eta: float, tol: float, max_sweeps: int,
              w0: np.ndarray | None = None) -> tuple[np.ndarray, int]:
    """Coordinate descent on 0.5 w'Gw - c'w + (eta/2)|w|_1, which has the same minimiser
    as the residual form with penalty eta |w|_1.

    Every few sweeps the current support is solved exactly; on correlated
    columns plain cyclic descent can otherwise need thousands of sweeps.
    """
    p = len(c)
    # plain lists: the systems are small and per-element numpy access dominates otherwise
    Gl = G.tolist()
    cl = c.tolist()
    w = [0.0] * p if w0 is None else [float(x) for x in w0]
    Gw = [sum(Gl[i][j] * w[j] for j in range(p)) for i in range(p)]
    half = eta / 2.0
    diag = [Gl[j][j] for j in range(p)]
    for sweep in range(1, max_sweeps + 1):
        biggest = 0.0
        for j in range(p):
            old = w[j]
            rho = cl[j] - Gw[j] + diag[j] * old
            if rho > half:
                new = (rho - half) / diag[j]
            elif rho < -half:
                new = (rho + half) / diag[j]
            else:
                new = 0.0
            delta = new - old
            if delta != 0.0:
                col = Gl[j]
                for i in range(p):
                    Gw[i] += col[i] * delta
                w[j] = new
                if abs(delta) > biggest:
                    biggest = abs(delta)
        if biggest < tol:
            return np.array(w), sweep
        if sweep % POLISH_EVERY == 0:
            exact = _polish(G, c, w, half)
            if exact is not None:
                return exact, sweep
    return np.array(w), max_sweeps


@dataclass
class _Standardized:
    names: list[str]
    mean: np.ndarray
    std: np.ndarray
    live: np.ndarray
    y_mean: float
    G: np.ndarray
    c: np.ndarray
    dropped: list[str]


def _dependent_columns(Z: np.ndarray, live: np.ndarray, rtol: float = 1e-9) -> list[int]:
    """Live columns lying in the span of earlier kept columns (Gram-Schmidt, in column order).

    Exact identities between features make the Gram matrix singular, and
    coordinate descent then creeps along a nearly flat valley for thousands of sweeps.
    """
    basis: list[np.ndarray] = []
    out = []
    for j in np.flatnonzero(live):
        r = Z[:, j].copy()
        for _ in range(2):  # second pass restores orthogonality lost to rounding
            for q in basis:
                r -= (q @ r) * q
        norm = float(np.linalg.norm(r))
        if norm <= rtol * float(np.linalg.norm(Z[:, j])):
            out.append(int(j))
        else:
            basis.append(r / norm)
    return out


def _standardize(X: np.ndarray, y: np.ndarray, names: Sequence[str] | None) -> _Standardized:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if n == 0:
        raise EvaluationError("no rows to fit")
    names = list(names) if names is not None else [f"x{j}" for j in range(p)]
    mean = X.mean(axis=0) if p else np.zeros(0)
    std = X.std(axis=0) if p else np.zeros(0)
    live = std > 1e-12 * np.maximum(1.0, np.abs(mean))
    flat = [names[j] for j in range(p) if not live[j]]
    if flat:
        warnings.warn(f"dropping zero-variance columns: {', '.join(flat)}", DataWarning, stacklevel=3)
    safe = np.where(live, std, 1.0)
    tied = _dependent_columns((X - mean) / safe, live)
    if tied:
        live[tied] = False
        warnings.warn(f"dropping collinear columns: {', '.join(names[j] for j in tied)}", DataWarning,
                      stacklevel=3)
    dropped = [names[j] for j in range(p) if not live[j]]
    y_mean = float(y.mean())
    Z = (X[:, live] - mean[live]) / std[live]
    yc = y - y_mean
    return _Standardized(names, mean, std, live, y_mean, Z.T @ Z, Z.T @ yc, dropped)


def _solve(st: _Standardized, eta: float, penalty: str, tol: float, max_sweeps: int,
           w0: np.ndarray | None = None) -> tuple[RegressionModel, np.ndarray]:
    p = len(st.names)
    weights = np.zeros(p)
    sweeps = 0
    w_std = np.zeros(int(st.live.sum()))
    if st.live.any():
        if penalty == "l2":
            w_std = np.linalg.solve(st.G + eta * np.eye(st.G.shape[0]), st.c)
        else:
            w_std, sweeps = _lasso_cd(st.G, st.c, eta, tol, max_sweeps, w0)
        weights[st.live] = w_std / st.std[st.live]
    intercept = st.y_mean - float(st.mean @ weights) if p else st.y_mean
    return RegressionModel(st.names, weights, intercept, penalty, float(eta), st.dropped, sweeps), w_std


def _check_args(eta: float, penalty: str) -> None:
    if penalty not in PENALTIES:
        raise ConfigError(f"penalty must be one of {PENALTIES}")
    if eta < 0:
        raise ConfigError("eta must be non-negative")


def fit_regularized_linear(X: np.ndarray, y: np.ndarray, eta: float, penalty: str = "l1",
                           names: Sequence[str] | None = None, tol: float = 1e-8,
                           max_sweeps: int = 10000) -> RegressionModel:
    """Fit on standardised columns; zero-variance columns are dropped with a warning."""
    _check_args(eta, penalty)
    return _solve(_standardize(X, y, names), eta, penalty, tol, max_sweeps)[0]


def r_squared(y: np.ndarray, pred: np.ndarray) -> float:
    y = np.asarray(y, dtype=float)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    ss_res = float(((y - pred) ** 2).sum())
    if ss_tot == 0:
        return 1.0 if ss_res == 0 else 0.0
    return 1.0 - ss_res / ss_tot


def mean_absolute_error(pred: Sequence[float], truth: Sequence[float]) -> float:
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape or pred.size == 0:
        raise EvaluationError("predictions and targets must be non-empty and aligned")
    return float(np.abs(pred - truth).mean())


def select_eta(X: np.ndarray, y: np.ndarray, grid: Sequence[float] = DEFAULT_ETA_GRID,
               penalty: str = "l1", names: Sequence[str] | None = None) -> tuple[float, RegressionModel, float]:
    """Grid value with the highest in-sample R^2 (smallest eta on ties), its model and R^2."""
    if not grid:
        raise ConfigError("eta grid is empty")
    for eta in grid:
        _check_args(eta, penalty)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DataWarning)
        st = _standardize(X, y, names)
    X = np.asarray(X, dtype=float)
    best = None
    w_prev = None
    # ascending eta with warm starts; the solution path moves little between grid points
    for eta in sorted(grid):
        model, w_prev = _solve(st, eta, penalty, 1e-8, 10000, w_prev)
        r2 = r_squared(y, model.predict(X))
        if best is None or r2 > best[2]:
            best = (float(eta), model, r2)
    return best


@dataclass
class EvaluationReport:
    mae: float
    r2: float                 # mean in-sample R^2 over folds
    eta: float                # most frequent per-fold choice (smallest on ties)
    fold_maes: list[float]
    fold_etas: list[float]
    n_rows: int
    n_features: int
    predictions: np.ndarray = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {"mae": self.mae, "r2": self.r2, "eta": self.eta, "fold_maes": self.fold_maes,
                "fold_etas": self.fold_etas, "n_rows": self.n_rows, "n_features": self.n_features}


def fold_assignment(n: int, folds: int, seed: int | None) -> np.ndarray:
    """Fold id per row: a seeded permutation split into near-equal parts."""
    if folds < 2:
        raise ConfigError("need at least 2 folds")
    if n < folds:
        raise EvaluationError(f"{n} rows cannot fill {folds} folds")
    perm = np.random.default_rng(seed).permutation(n)
    out = np.empty(n, dtype=int)
    for f, part in enumerate(np.array_split(perm, folds)):
        out[part] = f
    return out


def cross_validate(features: FeatureMatrix, y: Sequence[float], folds: int = 10, seed: int | None = 0,
                   grid: Sequence[float] = DEFAULT_ETA_GRID, penalty: str = "l1",
                   polynomial: bool = False) -> EvaluationReport:
    """K-fold MAE where imputation, standardisation and eta selection see training rows only."""
    y = np.asarray(y, dtype=float)
    n = len(y)
    if features.shape[0] != n:
        raise EvaluationError("feature rows and targets differ in length")
    assign = fold_assignment(n, folds, seed)
    preds = np.empty(n)
    fold_maes, fold_etas, r2s = [], [], []
    for f in range(folds):
        test = np.flatnonzero(assign == f)
        train = np.flatnonzero(assign != f)
        tr = features.take_rows(train)
        te = features.take_rows(test)
        means = column_means(tr)
        tr, te = apply_imputation(tr, means), apply_imputation(te, means)
        if polynomial and tr.shape[1]:
            tr, te = polynomial_features(tr), polynomial_features(te)
        eta, model, r2 = select_eta(tr.values, y[train], grid, penalty, tr.names)
        preds[test] = model.predict(te.values) if te.shape[1] else model.intercept
        fold_maes.append(mean_absolute_error(preds[test], y[test]))
        fold_etas.append(eta)
        r2s.append(r2)
    counts = Counter(fold_etas)
    eta = min(counts, key=lambda e: (-counts[e], e))
    return EvaluationReport(mean_absolute_error(preds, y), float(np.mean(r2s)), eta, fold_maes, fold_etas,
                            n, features.shape[1], preds)
