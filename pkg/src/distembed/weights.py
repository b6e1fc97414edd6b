"""Distance-dependent context weights with learnable parameters.

A context word at signed offset ``i`` from the center word (0 < |i| <= r)
receives a weight ``lambda_i`` computed by one of four closed-form decay
formulas. Each formula has a small number of learnable scalars, all
initialized to zero, which makes every weight exactly 1 at the start of
training (both ``|i|**-0 + 0`` and ``e**-0 + 0`` equal 1):

* ``pow-shared``:  lambda_i = |i|**-alpha + beta          (params: alpha, beta)
* ``pow-split``:   left/right sides use independent (alpha, beta) pairs
* ``exp-shared``:  lambda_i = exp(-alpha*|i|) + beta      (params: alpha, beta)
* ``exp-split``:   left/right sides use independent (alpha, beta) pairs

Split variants apply (alpha0, beta0) to offsets i < 0 and (alpha1, beta1)
to offsets i > 0. Parameter vectors are flat float64 arrays:
``[alpha, beta]`` for shared variants, ``[alpha0, beta0, alpha1, beta1]``
for split variants.

The weighted context vector is the normalized combination

    u_C = (1/Z) * sum_i lambda_i * u_i,     Z = sum_i lambda_i,

where the sums run over the context offsets actually present (windows
truncated at corpus edges renormalize over what exists, so u_C stays a
convex combination).

Because beta is unconstrained, a raw weight can go nonpositive during
training; weights are clamped to a floor of ``WEIGHT_FLOOR`` in the
forward pass and the clamped offset contributes zero gradient to the
parameters. All parameter arithmetic is done in float64 even when the
embeddings are float32.
"""

from __future__ import annotations

import csv
import math

import numpy as np

POW_SHARED = "pow-shared"
POW_SPLIT = "pow-split"
EXP_SHARED = "exp-shared"
EXP_SPLIT = "exp-split"

FORMULAS = (POW_SHARED, POW_SPLIT, EXP_SHARED, EXP_SPLIT)

WEIGHT_FLOOR = 1e-6


def _check_formula(formula: str) -> None:
    if formula not in FORMULAS:
        raise ValueError(f"unknown weight formula {formula!r}; expected one of {FORMULAS}")


def is_split(formula: str) -> bool:
    _check_formula(formula)
    return formula in (POW_SPLIT, EXP_SPLIT)


def n_params(formula: str) -> int:
    """Number of learnable scalars: 2 for shared variants, 4 for split."""
    return 4 if is_split(formula) else 2


def init_params(formula: str) -> np.ndarray:
    """Fresh parameter vector, all zeros (every weight starts at 1)."""
    return np.zeros(n_params(formula), dtype=np.float64)


def _check_offset(i: int, r: int) -> None:
    if r < 1:
        raise ValueError(f"max offset r must be >= 1, got {r}")
    if i == 0 or abs(i) > r:
        raise ValueError(f"offset must satisfy 0 < |i| <= {r}, got {i}")


def _side_params(formula: str, params: np.ndarray, i: int) -> tuple[float, float]:
    """(alpha, beta) governing offset i, honoring the split-side case structure."""
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (n_params(formula),):
        raise ValueError(
            f"{formula} expects {n_params(formula)} parameters, got shape {params.shape}"
        )
    if is_split(formula) and i > 0:
        return float(params[2]), float(params[3])
    return float(params[0]), float(params[1])


def _raw_weight(formula: str, alpha: float, beta: float, dist: int) -> float:
    if formula in (POW_SHARED, POW_SPLIT):
        return dist ** (-alpha) + beta
    return math.exp(-alpha * dist) + beta


def weight(formula: str, params: np.ndarray, i: int, r: int) -> float:
    """Weight lambda_i for a context word at signed offset i, floor-clamped."""
    _check_formula(formula)
    _check_offset(i, r)
    alpha, beta = _side_params(formula, params, i)
    return max(_raw_weight(formula, alpha, beta, abs(i)), WEIGHT_FLOOR)


def weight_gradients(formula: str, params: np.ndarray, i: int, r: int) -> np.ndarray:
    """Analytic partials of lambda_i with respect to each learnable parameter.

    Power decay:        d/dalpha = -ln|i| * |i|**-alpha,   d/dbeta = 1
    Exponential decay:  d/dalpha = -|i| * exp(-alpha*|i|), d/dbeta = 1

    Split variants return zeros for the inactive side's parameters. When
    the forward weight is clamped at the floor, all partials are zero.
    """
    _check_formula(formula)
    _check_offset(i, r)
    alpha, beta = _side_params(formula, params, i)
    dist = abs(i)
    grads = np.zeros(n_params(formula), dtype=np.float64)
    if _raw_weight(formula, alpha, beta, dist) < WEIGHT_FLOOR:
        return grads
    if formula in (POW_SHARED, POW_SPLIT):
        d_alpha = -math.log(dist) * dist ** (-alpha)
    else:
        d_alpha = -dist * math.exp(-alpha * dist)
    base = 2 if (is_split(formula) and i > 0) else 0
    grads[base] = d_alpha
    grads[base + 1] = 1.0
    return grads


def weight_table(formula: str, params: np.ndarray, r: int) -> tuple[np.ndarray, np.ndarray]:
    """Weights for every offset, as (left, right) arrays indexed by distance.

    ``left[d]`` is the weight at offset -d and ``right[d]`` at offset +d,
    for d in 1..r; index 0 is unused and set to NaN. Shared variants give
    identical sides.
    """
    _check_formula(formula)
    if r < 1:
        raise ValueError(f"max offset r must be >= 1, got {r}")
    left = np.full(r + 1, np.nan, dtype=np.float64)
    right = np.full(r + 1, np.nan, dtype=np.float64)
    for d in range(1, r + 1):
        left[d] = weight(formula, params, -d, r)
        right[d] = weight(formula, params, d, r)
    return left, right


def gradient_table(formula: str, params: np.ndarray, r: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-parameter weight partials for every offset.

    Returns (left, right) arrays of shape (n_params, r + 1), laid out like
    :func:`weight_table` with column 0 unused (zero).
    """
    _check_formula(formula)
    p = n_params(formula)
    left = np.zeros((p, r + 1), dtype=np.float64)
    right = np.zeros((p, r + 1), dtype=np.float64)
    for d in range(1, r + 1):
        left[:, d] = weight_gradients(formula, params, -d, r)
        right[:, d] = weight_gradients(formula, params, d, r)
    return left, right


def weighted_context(context_vecs: np.ndarray, lambdas: np.ndarray) -> np.ndarray:
    """Normalized weighted combination of the present context embeddings.

    Args:
        context_vecs: (m, d) rows for the m context words actually present.
        lambdas: (m,) weights for those rows.

    Returns:
        u_C = (lambdas @ context_vecs) / sum(lambdas).
    """
    context_vecs = np.asarray(context_vecs)
    lambdas = np.asarray(lambdas, dtype=context_vecs.dtype)
    if context_vecs.ndim != 2 or context_vecs.shape[0] == 0:
        raise ValueError("need at least one context vector")
    if lambdas.shape != (context_vecs.shape[0],):
        raise ValueError("one weight per context vector required")
    z = lambdas.sum()
    if not z > 0:
        raise ValueError(f"normalization factor must be positive, got {z}")
    return (lambdas @ context_vecs) / z


def context_gradient_wrt_params(
    loss_grad: np.ndarray,
    context_vecs: np.ndarray,
    lambdas: np.ndarray,
    lambda_grads: np.ndarray,
) -> np.ndarray:
    """Chain rule from a loss gradient at u_C down to the weight parameters.

    Because the normalizer Z depends on the parameters, the derivative of
    the pooled vector is

        d u_C / d p = (1/Z) * sum_j (d lambda_j / d p) * (u_j - u_C)

    and the loss partial is its dot product with ``loss_grad``.

    Args:
        loss_grad: (d,) gradient of the loss with respect to u_C.
        context_vecs: (m, d) present context embeddings.
        lambdas: (m,) forward weights.
        lambda_grads: (m, P) partials of each weight wrt each parameter.

    Returns:
        (P,) loss partials with respect to the parameters.
    """
    loss_grad = np.asarray(loss_grad, dtype=np.float64)
    context_vecs = np.asarray(context_vecs, dtype=np.float64)
    lambdas = np.asarray(lambdas, dtype=np.float64)
    lambda_grads = np.asarray(lambda_grads, dtype=np.float64)
    z = lambdas.sum()
    u_c = (lambdas @ context_vecs) / z
    dots = context_vecs @ loss_grad - u_c @ loss_grad
    return (lambda_grads.T @ dots) / z


def normalized_curve(formula: str, params: np.ndarray, r: int) -> list[tuple]:
    """Weight-vs-distance curve at integer distances 1..r, normalized to sum 1.

    Shared variants return ``(distance, weight)`` rows for a single curve;
    split variants return ``(distance, weight, side)`` rows with each side
    normalized independently (two curves, each summing to 1).
    """
    _check_formula(formula)
    if r < 1:
        raise ValueError(f"max offset r must be >= 1, got {r}")
    left, right = weight_table(formula, params, r)
    if not is_split(formula):
        w = right[1:]
        w = w / w.sum()
        return [(d, w[d - 1]) for d in range(1, r + 1)]
    rows = []
    for side, vals in (("left", left), ("right", right)):
        w = vals[1:]
        w = w / w.sum()
        rows.extend((d, w[d - 1], side) for d in range(1, r + 1))
    return rows


def write_curve_csv(path, formula: str, params: np.ndarray, r: int) -> None:
    """Write the normalized weight curve as CSV (`distance,weight[,side]`)."""
    rows = normalized_curve(formula, params, r)
    split = is_split(formula)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["distance", "weight", "side"] if split else ["distance", "weight"])
        for row in rows:
            writer.writerow([row[0], repr(float(row[1]))] + list(row[2:]))
