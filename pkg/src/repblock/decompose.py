"""Decomposition of a representation into irreducible subrepresentations.

The pipeline reduces the problem to three steps operating on commutant
samples:

1. eigendecompose a generic Hermitian commutant sample and split the
   spectrum into eigenvalue clusters; each cluster's eigenspace carries
   one irreducible subrepresentation,
2. decide equivalence of two subrepresentation bases U1, U2 from a second,
   independent commutant sample Y: the matrix F = U1 Y U2^dag is (with
   probability one) either negligible, in which case the two are
   inequivalent, or a scalar multiple of a unitary intertwiner,
3. rewrite every member of an equivalence class in the basis of the class
   representative, so equal irreps have entrywise equal images.

The assembled change of basis puts group images into block-diagonal form
with each isotypic component a multiplicity-fold repetition of one irrep
block, and puts invariant matrices into blocks of size multiplicity x
multiplicity tensored with the identity.

All genericity assumptions hold with probability one but can fail
numerically; such failures raise :class:`ResampleNeeded` internally and
the driver restarts with fresh samples up to a configured budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .commutant import (CommutantSample, ProjectionConfig, project_linear,
                        sample_commutant)
from .reps import Representation

REAL_TYPES = ("real", "complex", "quaternionic", "not_applicable")

_WITNESS_PROBES = 10
_CLASSIFY_SAMPLES = 8
_CLASSIFY_SV_CUTOFF = 1e-6


class ResampleNeeded(Exception):
    """A genericity assumption failed; retry with fresh samples."""


class DecompositionError(RuntimeError):
    """Decomposition failed even after exhausting the resample budget."""


@dataclass(frozen=True)
class DecomposeConfig:
    gap_tol: float = 1e-6          # eigenvalue clusters split at gaps above this (relative to the spectral range)
    zero_tol: float = 1e-6         # |F| below this (relative to |Y|) means inequivalent
    witness_tol: float = 1e-3      # acceptance band for the scaled-unitary / intertwiner checks
    max_resamples: int = 3         # full restarts allowed on genericity failures
    verify_trials: int = 20        # random elements checked before a decomposition is returned
    block_tol: float | None = None  # verification tolerance; None = 1e-8 finite, 1e-6 compact
    projection: ProjectionConfig = dataclass_field(default_factory=ProjectionConfig)


@dataclass
class SubrepBasis:
    """Orthonormal row basis of one eigenvalue cluster's eigenspace."""

    rows: np.ndarray
    eigenvalue: float

    @property
    def dim(self) -> int:
        return self.rows.shape[0]


@dataclass
class EquivalenceWitness:
    """Intertwiner evidence that two subrepresentations are equivalent.

    ``F`` maps the second basis to the first; ``alpha`` is its spectral
    norm, the scale at which F becomes unitary.
    """

    F: np.ndarray
    alpha: float

    @property
    def transform(self) -> np.ndarray:
        # Unitary polar factor of F: equals F/alpha up to the noise in F,
        # but exactly unitary, so harmonized bases stay orthonormal.
        w, _, vh = np.linalg.svd(self.F)
        return w @ vh


@dataclass
class IsotypicComponent:
    """All copies of one irrep, expressed in a common basis.

    ``basis`` has ``multiplicity`` consecutive groups of ``dimension``
    rows; with that layout a commuting matrix restricted to the component
    reads as an M x M matrix tensored with the D x D identity.
    """

    dimension: int
    multiplicity: int
    basis: np.ndarray
    real_type: str = "not_applicable"
    eigenvalues: tuple = ()

    @property
    def size(self) -> int:
        return self.dimension * self.multiplicity


@dataclass
class VerificationReport:
    trials: int
    tolerance: float
    unitarity_residual: float
    max_off_component: float
    component_residuals: tuple
    dims_ok: bool
    passed: bool
    failures: tuple


@dataclass
class IrrepDecomposition:
    """Change of basis U with the ordered isotypic components it exposes."""

    U: np.ndarray
    components: list
    diagnostics: VerificationReport | None
    rep: Representation | None = None
    attempts: int = 1

    @property
    def dims(self):
        return [c.dimension for c in self.components]

    @property
    def multiplicities(self):
        return [c.multiplicity for c in self.components]

    def dm_multiset(self):
        return sorted((c.dimension, c.multiplicity) for c in self.components)


def eigsplit(xbar: CommutantSample, gap_tol: float = 1e-6):
    """Split a commutant sample's eigenbasis into eigenvalue clusters.

    Eigenvalues are sorted ascending and clusters break at every gap
    larger than ``gap_tol`` times the spectral range.  A cluster whose
    internal spread exceeds a tenth of that threshold is neither clearly
    degenerate nor clearly split, which violates the genericity
    assumption; that raises :class:`ResampleNeeded`.
    """
    x = np.asarray(xbar.matrix if isinstance(xbar, CommutantSample) else xbar)
    evals, evecs = np.linalg.eigh(x)
    span = float(evals[-1] - evals[0])
    # The additive term keeps the threshold above eigenvalue roundoff even
    # when the whole spectrum collapses to one point (span ~ eps), where a
    # purely relative threshold would shatter the noise into fake clusters.
    scale = max(1.0, abs(float(evals[0])), abs(float(evals[-1])))
    threshold = gap_tol * span + 1e3 * np.finfo(float).eps * scale

    clusters = []
    start = 0
    for i in range(len(evals) - 1):
        if evals[i + 1] - evals[i] > threshold:
            clusters.append((start, i + 1))
            start = i + 1
    clusters.append((start, len(evals)))

    out = []
    for lo, hi in clusters:
        spread = float(evals[hi - 1] - evals[lo])
        if spread > threshold / 10:
            raise ResampleNeeded(
                f"ambiguous eigenvalue cluster: spread {spread:.3e} vs gap threshold "
                f"{threshold:.3e}")
        q, _ = np.linalg.qr(evecs[:, lo:hi])
        out.append(SubrepBasis(rows=q.conj().T, eigenvalue=float(np.mean(evals[lo:hi]))))
    return out


def equivalence_test(rep: Representation, b1: SubrepBasis, b2: SubrepBasis,
                     xprime: CommutantSample, zero_tol: float = 1e-6,
                     witness_tol: float = 1e-3, rng=None):
    """Decide whether two subrepresentation bases carry equivalent irreps.

    Returns an :class:`EquivalenceWitness` or None (inequivalent).  The
    second sample ``xprime`` must be independent of the sample the bases
    came from.  A candidate witness that is neither negligible nor close
    to a scaled unitary intertwiner means the eigenspaces were not clean
    irrep copies; that raises :class:`ResampleNeeded`.
    """
    if b1.dim != b2.dim:
        return None
    y = xprime.matrix if isinstance(xprime, CommutantSample) else np.asarray(xprime)
    f = b1.rows @ y @ b2.rows.conj().T
    if np.linalg.norm(f) <= zero_tol * np.linalg.norm(y):
        return None

    alpha = float(np.linalg.norm(f, 2))
    a = f / alpha
    k = b1.dim
    unit_resid = np.linalg.norm(a.conj().T @ a - np.eye(k)) / max(1.0, np.sqrt(k))
    if unit_resid > witness_tol:
        raise ResampleNeeded(
            f"candidate intertwiner is not a scaled unitary (residual {unit_resid:.3e})")

    if rng is None:
        rng = np.random.default_rng()
    fn = np.linalg.norm(f)
    for _ in range(_WITNESS_PROBES):
        g = rep.random_element(rng)
        u = rep.image(g)
        s1 = b1.rows @ u @ b1.rows.conj().T
        s2 = b2.rows @ u @ b2.rows.conj().T
        err = np.linalg.norm(s1 @ f - f @ s2) / fn
        if err > witness_tol:
            raise ResampleNeeded(
                f"candidate intertwiner fails the commuting check (error {err:.3e})")
    return EquivalenceWitness(F=f, alpha=alpha)


def harmonize(b2: SubrepBasis, witness: EquivalenceWitness) -> SubrepBasis:
    """Rewrite ``b2`` so its subrepresentation matches the witness target.

    The new basis is A b2 with A the unitary carried by the witness, so
    the transported images equal the first basis's images and row
    orthonormality is preserved exactly.
    """
    return SubrepBasis(rows=witness.transform @ b2.rows, eigenvalue=b2.eigenvalue)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def classify_real_type(rep: Representation, component: IsotypicComponent,
                       rng=None, config: DecomposeConfig | None = None) -> str:
    """Division-algebra type of a real isotypic component's irrep.

    Restricts the representation to one irrep copy and measures the
    dimension of its commutant algebra by projecting generic (full,
    non-symmetric) Gaussian matrices and ranking their span: dimension 1,
    2 or 4 corresponds to real, complex or quaternionic type.  Symmetric
    seeds would not do: the symmetric part of the commutant is
    one-dimensional for all three types.
    """
    if rep.field != "real":
        raise ValueError("real-type classification applies to real representations")
    if rng is None:
        rng = np.random.default_rng()
    cfg = config or DecomposeConfig()
    d = component.dimension
    block = np.ascontiguousarray(component.basis[:d])

    restricted = Representation(
        rep.group, d, "real",
        lambda g: block @ rep.image(g) @ block.conj().T,
        name="restricted")

    rows = []
    for _ in range(_CLASSIFY_SAMPLES):
        seed = rng.standard_normal((d, d))
        rows.append(project_linear(restricted, seed, cfg.projection, rng).reshape(-1))
    svals = np.linalg.svd(np.array(rows), compute_uv=False)
    if svals[0] == 0:
        raise ResampleNeeded("all classification samples projected to zero")
    rank = int(np.sum(svals > _CLASSIFY_SV_CUTOFF * svals[0]))
    mapping = {1: "real", 2: "complex", 4: "quaternionic"}
    if rank not in mapping:
        raise ResampleNeeded(f"commutant dimension estimate {rank} is not 1, 2 or 4")
    return mapping[rank]


def verify_decomposition(rep: Representation, decomp: IrrepDecomposition,
                         trials: int = 50, tol: float | None = None,
                         rng=None) -> VerificationReport:
    """Check a decomposition against random group elements.

    For each trial the conjugated image U rho_g U^dag is compared against
    the claimed pattern: zero off the component blocks, and each component
    an M-fold repetition of a single D x D block.  Norms are relative to
    the Frobenius norm of rho_g.
    """
    if tol is None:
        tol = 1e-8 if rep.is_finite else 1e-6
    if rng is None:
        rng = np.random.default_rng()
    u = decomp.U
    n = rep.dim
    failures = []

    dims_ok = sum(c.size for c in decomp.components) == n and u.shape == (n, n)
    if not dims_ok:
        failures.append("component sizes do not add up to the dimension")

    unit_resid = float(np.linalg.norm(u.conj().T @ u - np.eye(n)))
    if unit_resid > tol * n:
        failures.append(f"basis is not unitary (residual {unit_resid:.3e})")

    max_off = 0.0
    comp_resid = [0.0] * len(decomp.components)
    if dims_ok:
        offsets = np.cumsum([0] + [c.size for c in decomp.components])
        for _ in range(trials):
            g = rep.random_element(rng)
            img = rep.image(g)
            nrm = float(np.linalg.norm(img))
            b = u @ img @ u.conj().T
            leak = b.copy()
            for ci, comp in enumerate(decomp.components):
                lo, hi = offsets[ci], offsets[ci + 1]
                sub = b[lo:hi, lo:hi]
                leak[lo:hi, lo:hi] = 0.0
                d, m = comp.dimension, comp.multiplicity
                copies = sub.reshape(m, d, m, d)
                avg = np.trace(copies, axis1=0, axis2=2) / m
                pattern = np.zeros_like(sub)
                for a in range(m):
                    pattern[a * d:(a + 1) * d, a * d:(a + 1) * d] = avg
                comp_resid[ci] = max(comp_resid[ci],
                                     float(np.linalg.norm(sub - pattern)) / nrm)
            max_off = max(max_off, float(np.linalg.norm(leak)) / nrm)
        if max_off > tol:
            failures.append(f"off-component leakage {max_off:.3e} above {tol:.1e}")
        worst_comp = max(comp_resid, default=0.0)
        if worst_comp > tol:
            failures.append(f"component copy structure off by {worst_comp:.3e}")

    return VerificationReport(
        trials=trials, tolerance=tol, unitarity_residual=unit_resid,
        max_off_component=max_off, component_residuals=tuple(comp_resid),
        dims_ok=dims_ok, passed=not failures, failures=tuple(failures))


def _decompose_once(rep, cfg, streams, attempt):
    s_xbar, s_xprime, s_checks, s_classify, s_verify = streams

    xbar = sample_commutant(rep, cfg.projection, s_xbar)
    bases = eigsplit(xbar, cfg.gap_tol)
    xprime = sample_commutant(rep, cfg.projection, s_xprime)

    nb = len(bases)
    uf = _UnionFind(nb)
    witnesses = {}
    for i in range(nb):
        for j in range(i):
            w = equivalence_test(rep, bases[j], bases[i], xprime,
                                 cfg.zero_tol, cfg.witness_tol, s_checks)
            if w is not None:
                witnesses[(j, i)] = w
                uf.union(j, i)

    classes = {}
    for i in range(nb):
        classes.setdefault(uf.find(i), []).append(i)

    components = []
    for root in sorted(classes):
        members = sorted(classes[root])  # eigsplit order = ascending eigenvalue
        lead = members[0]
        rows = [bases[lead].rows]
        for m in members[1:]:
            w = witnesses.get((lead, m))
            if w is None:
                w = equivalence_test(rep, bases[lead], bases[m], xprime,
                                     cfg.zero_tol, cfg.witness_tol, s_checks)
                if w is None:
                    raise ResampleNeeded(
                        "transitively grouped bases lack a direct intertwiner")
            rows.append(harmonize(bases[m], w).rows)
        components.append(IsotypicComponent(
            dimension=bases[lead].dim,
            multiplicity=len(members),
            basis=np.vstack(rows),
            eigenvalues=tuple(bases[m].eigenvalue for m in members)))

    # canonical order: big irreps first, then high multiplicity, then by the
    # leading eigenvalue of the sample that produced the component
    components.sort(key=lambda c: (-c.dimension, -c.multiplicity, c.eigenvalues[0]))

    if rep.field == "real":
        for comp in components:
            comp.real_type = classify_real_type(rep, comp, s_classify, cfg)

    decomp = IrrepDecomposition(
        U=np.vstack([c.basis for c in components]),
        components=components, diagnostics=None, rep=rep, attempts=attempt + 1)

    tol = cfg.block_tol if cfg.block_tol is not None else (1e-8 if rep.is_finite else 1e-6)
    report = verify_decomposition(rep, decomp, trials=cfg.verify_trials,
                                  tol=tol, rng=s_verify)
    decomp.diagnostics = report
    if not report.passed:
        raise ResampleNeeded("verification failed: " + "; ".join(report.failures))
    return decomp


def decompose(rep: Representation, config: DecomposeConfig | None = None,
              rng=None) -> IrrepDecomposition:
    """Decompose a representation into ordered isotypic components.

    Runs the sample / split / group pipeline, restarting with fresh
    samples when a genericity assumption fails, up to
    ``config.max_resamples`` restarts.  The returned object carries the
    unitary change of basis, the (dimension, multiplicity) structure,
    real-field type labels, and the verification report.
    """
    cfg = config or DecomposeConfig()
    if rng is None:
        rng = np.random.default_rng()
    reasons = []
    for attempt in range(cfg.max_resamples + 1):
        streams = rng.spawn(5)
        try:
            return _decompose_once(rep, cfg, streams, attempt)
        except ResampleNeeded as exc:
            reasons.append(str(exc))
    raise DecompositionError(
        f"gave up after {cfg.max_resamples + 1} attempts; last failure: {reasons[-1]}")
