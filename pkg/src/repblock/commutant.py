"""Sampling generic elements of the commutant algebra of a representation.

A commutant sample is obtained by drawing a Hermitian matrix from the
Gaussian unitary ensemble (orthogonal ensemble over the reals) and
projecting it onto the commutant by group averaging: exactly, through the
stabilizer-chain transversal sets, for finite groups; by iterated
averaging over small random sample sets for compact groups, where the
averaged matrix converges to the group integral as rounds accumulate.

The conjugation inverse is realized as the conjugate transpose, which is
exact for unitary representations and keeps Hermitian input Hermitian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .perm import PermutationGroup
from .reps import Representation

#: Commutation tolerance for the exact finite-group projection; anything
#: above this indicates a broken representation rather than roundoff.
FINITE_COMMUTATION_TOL = 1e-10

_RESIDUAL_PROBES = 20


class ProjectionError(RuntimeError):
    """Raised when a projected matrix fails its commutation tolerance."""


@dataclass(frozen=True)
class ProjectionConfig:
    """Tuning knobs for the compact-group iterated projection.

    ``nu`` rounds of averaging over fresh Haar sample sets of size
    ``set_size`` are run first; if the measured commutation residual still
    exceeds ``commutation_tol``, extension blocks of ``nu/10`` rounds are
    added, at most ``max_resamples`` of them, before giving up.
    """

    nu: int = 1000
    set_size: int = 3
    commutation_tol: float = 1e-8
    max_resamples: int = 10

    def __post_init__(self):
        if self.nu < 1:
            raise ValueError("nu must be >= 1")
        if self.set_size < 2:
            raise ValueError("set_size must be >= 2")
        if self.commutation_tol <= 0:
            raise ValueError("commutation_tol must be positive")
        if self.max_resamples < 0:
            raise ValueError("max_resamples must be >= 0")


@dataclass(frozen=True)
class CommutantSample:
    """A generic Hermitian commutant element and its measured residual."""

    matrix: np.ndarray
    residual: float


def sample_gue(n: int, field="complex", rng=None) -> np.ndarray:
    """Hermitian matrix from the GUE (GOE for the real field).

    The distribution is invariant under unitary (orthogonal) conjugation,
    which is what makes the projected sample generic in the commutant.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if rng is None:
        rng = np.random.default_rng()
    if field == "complex":
        a = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)
    elif field == "real":
        a = rng.standard_normal((n, n))
    else:
        raise ValueError(f"unknown field {field!r}")
    return (a + a.conj().T) / 2


def _conjugation_average(rep, elements, x, hermitize):
    x = np.asarray(x)
    field_dtype = np.complex128 if rep.field == "complex" else np.float64
    acc = np.zeros(x.shape, dtype=np.result_type(x.dtype, field_dtype))
    for g in elements:
        u = rep.image(g)
        acc += u @ x @ u.conj().T
    acc /= len(elements)
    if hermitize:
        acc = (acc + acc.conj().T) / 2
    return acc


def partial_average(rep: Representation, elements, x) -> np.ndarray:
    """Average of u x u^dag over the given group elements.

    The accumulator is re-symmetrized so Hermitian input stays Hermitian
    bit-for-bit despite floating-point non-commutativity.
    """
    if len(elements) == 0:
        raise ValueError("partial_average needs a nonempty element set")
    return _conjugation_average(rep, elements, x, hermitize=True)


def commutation_residual(rep: Representation, x, elements) -> float:
    """max_g ||x rho_g - rho_g x||_F / ||x||_F over the given elements."""
    nx = np.linalg.norm(x)
    if nx == 0 or len(elements) == 0:
        return 0.0
    worst = 0.0
    for g in elements:
        u = rep.image(g)
        worst = max(worst, np.linalg.norm(x @ u - u @ x) / nx)
    return worst


def _finite_probes(group: PermutationGroup):
    # The images of the generators suffice: commuting with them means
    # commuting with everything they generate.
    return [g for g in group.generators if not g.is_identity()]


def _project_finite(rep, x, hermitize):
    if not rep.is_finite:
        raise TypeError("finite projection requires a permutation-group representation")
    out = np.array(x)
    for t in rep.group.transversal_sets():
        out = _conjugation_average(rep, t, out, hermitize)
    return out


def _project_compact(rep, x, config, rng, hermitize):
    if rep.is_finite:
        raise TypeError("compact projection requires a compact-group representation")
    handle = rep.group
    out = np.array(x)
    for block in range(config.max_resamples + 1):
        rounds = config.nu if block == 0 else max(1, math.ceil(config.nu / 10))
        for _ in range(rounds):
            t = [handle.sample(rng) for _ in range(config.set_size)]
            out = _conjugation_average(rep, t, out, hermitize)
        probes = [handle.sample(rng) for _ in range(_RESIDUAL_PROBES)]
        resid = commutation_residual(rep, out, probes)
        if resid <= config.commutation_tol:
            return out, resid
    raise ProjectionError(
        f"commutation residual {resid:.3e} still above {config.commutation_tol:.1e} "
        f"after {config.nu} rounds and {config.max_resamples} extensions")


def project_commutant_finite(rep: Representation, x) -> CommutantSample:
    """Exact group average of x through the transversal-set factorization.

    Costs one conjugation per transversal element instead of one per group
    element; for the symmetric group on D points that is quadratic in D
    rather than factorial.
    """
    out = _project_finite(rep, x, hermitize=True)
    resid = commutation_residual(rep, out, _finite_probes(rep.group))
    if resid > FINITE_COMMUTATION_TOL:
        raise ProjectionError(
            f"finite projection left commutation residual {resid:.3e}; "
            "the representation is probably not a homomorphism")
    return CommutantSample(out, resid)


def project_commutant_compact(rep: Representation, x, config: ProjectionConfig,
                              rng) -> CommutantSample:
    """Iterated randomized averaging onto the commutant of a compact group."""
    out, resid = _project_compact(rep, x, config, rng, hermitize=True)
    return CommutantSample(out, resid)


def project_commutant(rep: Representation, x, config: ProjectionConfig = None,
                      rng=None) -> CommutantSample:
    """Group-appropriate projection of a Hermitian matrix onto the commutant."""
    if rep.is_finite:
        return project_commutant_finite(rep, x)
    if config is None:
        config = ProjectionConfig()
    if rng is None:
        rng = np.random.default_rng()
    return project_commutant_compact(rep, x, config, rng)


def project_linear(rep: Representation, x, config: ProjectionConfig = None,
                   rng=None) -> np.ndarray:
    """Projection of an arbitrary (not necessarily Hermitian) matrix.

    Same averaging as :func:`project_commutant` but without Hermitian
    symmetrization and without the residual contract; used to probe the
    full commutant algebra, e.g. when measuring its dimension.
    """
    if rep.is_finite:
        return _project_finite(rep, x, hermitize=False)
    if config is None:
        config = ProjectionConfig()
    if rng is None:
        rng = np.random.default_rng()
    out, _ = _project_compact(rep, x, config, rng, hermitize=False)
    return out


def sample_commutant(rep: Representation, config: ProjectionConfig = None,
                     rng=None) -> CommutantSample:
    """Generic Hermitian commutant sample: GUE/GOE seed, then projection."""
    if rng is None:
        rng = np.random.default_rng()
    seed = sample_gue(rep.dim, rep.field, rng)
    return project_commutant(rep, seed, config, rng)
