"""Finite-difference derivative tensors of holomorphic functions of several variables.

Every partial derivative is computed from a tensor product of one-dimensional
central stencils (all of truncation order two), then improved by Richardson
extrapolation over successive step halvings. Only one representative of
each multiset of indices is computed, so the returned tensor is symmetric by
construction; the difference between the last two Richardson levels is
returned as the error estimate.

:func:`adaptive_derivative_tensor` repeats the extrapolation over a sweep
of base steps that share stencil nodes, and keeps, entry by entry, the
estimate on which two neighbouring base steps agree best.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, StencilError, UnstableError

__all__ = ["DerivSpec", "DerivResult", "derivative_tensor", "adaptive_derivative_tensor", "DEFAULT_SPEC"]


@dataclass(frozen=True)
class DerivSpec:
    """Step-size policy for :func:`derivative_tensor`.

    Parameters
    ----------
    base_step : float
        Relative step; the step in variable ``a`` is
        ``base_step * max(1, |t_a|)``.
    richardson_levels : int
        Number of step sizes ``h, h/2, ...`` combined by Richardson
        extrapolation (1, 2 or 3).
    per_variable_scale : str
        Step scaling rule. Only ``"max1abs"`` (the rule above) is defined.
    """

    base_step: float = 1e-3
    richardson_levels: int = 2
    per_variable_scale: str = "max1abs"

    def __post_init__(self):
        if not 0 < self.base_step < 0.1:
            raise DomainError("base_step must lie in (0, 0.1)")
        if self.richardson_levels not in (1, 2, 3):
            raise DomainError("richardson_levels must be 1, 2 or 3")
        if self.per_variable_scale != "max1abs":
            raise DomainError(f"unknown step scaling rule {self.per_variable_scale!r}")

    def halved(self) -> "DerivSpec":
        """The same policy with half the base step."""
        return DerivSpec(self.base_step / 2, self.richardson_levels, self.per_variable_scale)


DEFAULT_SPEC = DerivSpec()


@dataclass(frozen=True)
class DerivResult:
    """Output of :func:`derivative_tensor`.

    Attributes
    ----------
    tensor : numpy.ndarray
        Symmetric complex array of shape ``(N,) * order``.
    error_estimate : numpy.ndarray
        Magnitude of the change between the two finest Richardson levels,
        entry by entry (zeros when only one level is used).
    asymmetry : float
        Largest disagreement between permuted entries before
        symmetrization. Tensor-product stencils are permutation invariant,
        so this is zero up to rounding.
    """

    tensor: np.ndarray
    error_estimate: np.ndarray
    asymmetry: float

    @property
    def max_error(self) -> float:
        return float(np.max(self.error_estimate)) if self.error_estimate.size else 0.0


# One-dimensional central stencils, as (offset in units of h, weight) pairs,
# for derivative multiplicities 1, 2 and 3. Each has error O(h^2).
_STENCILS_1D = {
    1: ((1, 0.5), (-1, -0.5)),
    2: ((1, 1.0), (0, -2.0), (-1, 1.0)),
    3: ((2, 0.5), (1, -1.0), (-1, 1.0), (-2, -0.5)),
}


def _stencil(multiset: Sequence[int]):
    """Tensor-product stencil for the partial derivative named by ``multiset``."""
    counts = {}
    for a in multiset:
        counts[a] = counts.get(a, 0) + 1
    axes = sorted(counts)
    nodes = []
    for combo in itertools.product(*(_STENCILS_1D[counts[a]] for a in axes)):
        offset = tuple((a, off) for a, (off, _) in zip(axes, combo) if off != 0)
        weight = math.prod(w for _, w in combo)
        nodes.append((offset, weight, tuple(counts[a] for a in axes), axes))
    return nodes


def _evaluator(f, t0):
    """Cached evaluation of ``f`` at ``t0 + offset * h / 2**lev``."""
    cache = {}

    def evaluate(offset, h, lev):
        key = (offset, lev)
        if key in cache:
            return cache[key]
        t = t0.copy()
        for a, off in offset:
            t[a] = t0[a] + off * h[a]
        try:
            val = complex(f(t))
        except DomainError as exc:
            raise StencilError(f"stencil node {t} left the domain: {exc}") from exc
        if not (math.isfinite(val.real) and math.isfinite(val.imag)):
            raise StencilError(f"non-finite value at stencil node {t}")
        cache[key] = val
        return val

    return evaluate


def _raw_table(evaluate, multisets, base_h, levels):
    """Raw difference quotients at steps ``base_h / 2**lev``, one dict per level."""
    stencils = {ms: _stencil(ms) for ms in multisets}
    raw = []
    for lev in range(levels):
        h = base_h / 2**lev
        row = {}
        for ms in multisets:
            acc = 0j
            for offset, weight, powers, axes in stencils[ms]:
                acc += weight * evaluate(offset, h, lev)
            denom = math.prod(h[a] ** p for a, p in zip(axes, powers))
            row[ms] = acc / denom
        raw.append(row)
    return raw


def _richardson(raw, multisets):
    """Richardson extrapolation of a column of halving-step estimates.

    Returns the best estimate and the best estimate of one level less
    (``None`` for a single level).
    """
    # T_{k+1}(h) = (4^{k+1} T_k(h/2) - T_k(h)) / (4^{k+1} - 1).
    table = raw
    previous_best = None
    for k in range(1, len(raw)):
        factor = 4.0**k
        previous_best = table[-1]
        table = [{ms: (factor * table[i + 1][ms] - table[i][ms]) / (factor - 1.0) for ms in multisets}
                 for i in range(len(table) - 1)]
    return table[-1], previous_best


def derivative_tensor(f: Callable[[np.ndarray], complex], point, order: int,
                      spec: DerivSpec = DEFAULT_SPEC, tol: float | None = None) -> DerivResult:
    """Gradient, Hessian or third-derivative tensor of ``f`` at ``point``.

    Parameters
    ----------
    f : callable
        Holomorphic function taking a complex vector of length N.
    point : array_like
        Complex base point.
    order : {1, 2, 3}
        Rank of the returned tensor.
    spec : DerivSpec
        Step policy.
    tol : float, optional
        If given, raise :class:`UnstableError` when the Richardson error
        estimate of any entry exceeds ``10 * tol * max(1, |entry|)``.

    Returns
    -------
    DerivResult

    Raises
    ------
    StencilError
        If ``f`` raises :class:`DomainError` or returns a non-finite value at
        a stencil node.
    UnstableError
        See ``tol``.

    Examples
    --------
    >>> r = derivative_tensor(lambda t: t[0] ** 2 * t[1], [0.3, 0.7], 3)
    >>> round(r.tensor[0, 0, 1].real, 9)
    2.0
    """
    if order not in (1, 2, 3):
        raise DomainError("order must be 1, 2 or 3")
    t0 = np.asarray(point, dtype=complex).ravel()
    n = t0.size
    base_h = spec.base_step * np.maximum(1.0, np.abs(t0))
    evaluate = _evaluator(f, t0)
    multisets = list(itertools.combinations_with_replacement(range(n), order))
    raw = _raw_table(evaluate, multisets, base_h, spec.richardson_levels)
    best, previous_best = _richardson(raw, multisets)

    tensor = np.zeros((n,) * order, dtype=complex)
    err = np.zeros((n,) * order)
    for ms in multisets:
        e = abs(best[ms] - previous_best[ms]) if previous_best is not None else 0.0
        for perm in set(itertools.permutations(ms)):
            tensor[perm] = best[ms]
            err[perm] = e
    asym = 0.0
    if order > 1:
        for perm in itertools.permutations(range(order)):
            asym = max(asym, float(np.max(np.abs(tensor - np.transpose(tensor, perm)))))
    if tol is not None and previous_best is not None:
        bound = 10.0 * tol * np.maximum(1.0, np.abs(tensor))
        if np.any(err > bound):
            raise UnstableError(f"Richardson levels disagree by {float(np.max(err)):.3e}")
    return DerivResult(tensor, err, asym)


def adaptive_derivative_tensor(f: Callable[[np.ndarray], complex], point, order: int,
                               spec: DerivSpec = DerivSpec(4e-2, 3), sweeps: int = 5) -> DerivResult:
    """Derivative tensor with the base step chosen per entry.

    The base steps ``spec.base_step / 2**w`` for ``w = 0..sweeps-1`` are each
    extrapolated with ``spec.richardson_levels`` levels. Consecutive base
    steps share all but one level of stencil nodes, so the sweep costs
    ``sweeps + levels - 1`` levels of evaluations in total. For each entry
    the pair of neighbouring base steps whose estimates are closest is
    selected; the finer estimate of that pair is returned and their
    difference is the error estimate.

    This trades a few extra evaluations for robustness: large steps win
    where rounding dominates, small steps win near singularities.

    Parameters
    ----------
    f, point, order
        As in :func:`derivative_tensor`.
    spec : DerivSpec
        Largest base step and number of Richardson levels.
    sweeps : int
        Number of base steps (at least 2).

    Returns
    -------
    DerivResult
    """
    if order not in (1, 2, 3):
        raise DomainError("order must be 1, 2 or 3")
    if sweeps < 2:
        raise DomainError("sweeps must be at least 2")
    t0 = np.asarray(point, dtype=complex).ravel()
    n = t0.size
    base_h = spec.base_step * np.maximum(1.0, np.abs(t0))
    evaluate = _evaluator(f, t0)
    multisets = list(itertools.combinations_with_replacement(range(n), order))
    levels = spec.richardson_levels
    raw = _raw_table(evaluate, multisets, base_h, levels + sweeps - 1)
    estimates = [_richardson(raw[w:w + levels], multisets)[0] for w in range(sweeps)]

    tensor = np.zeros((n,) * order, dtype=complex)
    err = np.zeros((n,) * order)
    for ms in multisets:
        diffs = [abs(estimates[w + 1][ms] - estimates[w][ms]) for w in range(sweeps - 1)]
        w = int(np.argmin(diffs))
        for perm in set(itertools.permutations(ms)):
            tensor[perm] = estimates[w + 1][ms]
            err[perm] = diffs[w]
    return DerivResult(tensor, err, 0.0)
