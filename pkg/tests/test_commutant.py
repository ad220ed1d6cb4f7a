import numpy as np
import pytest

from repblock import (CommutantSample, Permutation, ProjectionConfig,
                      defining_rep, group_from_generators, natural_perm_rep,
                      partial_average, project_commutant,
                      project_commutant_compact, project_commutant_finite,
                      sample_commutant, sample_gue, tensor, unitary_group)
from repblock.commutant import commutation_residual

from conftest import (alternating4, closure, cyclic, dihedral, group_of,
                      klein4, perm_matrix, quaternion8, symmetric)


def brute_reynolds_natural(group, x):
    """Average over the whole group with permutation matrices built directly
    from brute-force closure; independent of the stabilizer chain."""
    elems = closure(group.degree, [p.images for p in group.generators])
    acc = np.zeros_like(np.asarray(x, dtype=complex))
    for e in elems:
        u = perm_matrix(e, dtype=complex)
        acc += u @ x @ u.conj().T
    return acc / len(elems)


def test_sample_gue_basics(rng):
    x = sample_gue(1, "real", rng)
    assert x.shape == (1, 1) and not np.iscomplexobj(x)
    y = sample_gue(50, "complex", rng)
    assert np.linalg.norm(y - y.conj().T) == 0.0
    z = sample_gue(50, "real", rng)
    assert np.linalg.norm(z - z.T) == 0.0
    with pytest.raises(ValueError):
        sample_gue(0, "complex", rng)
    with pytest.raises(ValueError):
        sample_gue(3, "rational", rng)


def test_sample_gue_moments(rng):
    n, samples = 30, 10_000
    diag_c, diag_r = [], []
    off_c = []
    for _ in range(samples):
        x = sample_gue(n, "complex", rng)
        diag_c.append(x[0, 0].real)
        off_c.append(x[0, 1])
    for _ in range(samples):
        diag_r.append(sample_gue(n, "real", rng)[0, 0])
    assert abs(np.mean(diag_c)) < 0.05
    # complex diagonal entries are N(0, 1/2); real (GOE) diagonal N(0, 1)
    assert abs(np.var(diag_c) - 0.5) < 0.05
    assert abs(np.var(diag_r) - 1.0) < 0.1
    assert abs(np.mean(np.abs(off_c) ** 2) - 0.5) < 0.05


def test_partial_average_identity_set(rng):
    g = symmetric(3)
    rep = natural_perm_rep(g)
    x = sample_gue(3, "complex", rng)
    out = partial_average(rep, [Permutation.identity(3)], x)
    assert np.allclose(out, x, atol=1e-14)
    with pytest.raises(ValueError):
        partial_average(rep, [], x)


def test_partial_average_c2_hand_computed():
    g = group_of(2, [[1, 0]])
    rep = natural_perm_rep(g, "complex")
    a, b, c, d = 1.0, 2.0 + 1j, 2.0 - 1j, -3.0  # Hermitian input
    x = np.array([[a, b], [c, d]])
    out = partial_average(rep, list(g.elements()), x)
    want = np.array([[(a + d) / 2, (b + c) / 2], [(b + c) / 2, (a + d) / 2]])
    assert np.allclose(out, want, atol=1e-14)


def test_partial_average_s3_whole_group(rng):
    g = symmetric(3)
    rep = natural_perm_rep(g)
    x = sample_gue(3, "complex", rng)
    out = partial_average(rep, list(g.elements()), x)
    want = brute_reynolds_natural(g, x)
    assert np.linalg.norm(out - want) <= 1e-12
    # alpha I + beta J with beta the common off-diagonal value
    alpha, beta = out[0, 0] - out[0, 1], out[0, 1]
    model = alpha * np.eye(3) + beta * np.ones((3, 3))
    assert np.linalg.norm(out - model) <= 1e-12


def test_project_finite_trivial_group(rng):
    g = group_from_generators(5, [])
    rep = natural_perm_rep(g)
    x = sample_gue(5, "complex", rng)
    out = project_commutant_finite(rep, x)
    assert np.allclose(out.matrix, x)
    assert out.residual == 0.0


def test_project_finite_identity_fixed_point():
    g = symmetric(4)
    rep = natural_perm_rep(g)
    out = project_commutant_finite(rep, np.eye(4))
    assert np.linalg.norm(out.matrix - np.eye(4)) <= 1e-14


def test_project_finite_matches_brute_force_s4(rng):
    g = symmetric(4)
    rep = natural_perm_rep(g)
    x = sample_gue(4, "complex", rng)
    got = project_commutant_finite(rep, x).matrix
    want = brute_reynolds_natural(g, x)
    assert np.linalg.norm(got - want) <= 1e-12 * np.linalg.norm(want)


FINITE_CATALOG = [
    ("C2", lambda: cyclic(2)),
    ("C4", lambda: cyclic(4)),
    ("C6", lambda: cyclic(6)),
    ("V4", klein4),
    ("S3", lambda: symmetric(3)),
    ("D4", lambda: dihedral(4)),
    ("Q8", lambda: quaternion8()[0]),
    ("A4", alternating4),
    ("S4", lambda: symmetric(4)),
    ("S5", lambda: symmetric(5)),
]


@pytest.mark.parametrize("name,make", FINITE_CATALOG)
def test_chain_projection_invariants(name, make, rng):
    group = make()
    rep = natural_perm_rep(group, "complex")
    n = group.degree
    x = sample_gue(n, "complex", rng)
    proj = project_commutant_finite(rep, x).matrix

    # matches brute force
    want = brute_reynolds_natural(group, x)
    assert np.linalg.norm(proj - want) <= 1e-12 * max(1, np.linalg.norm(want))
    # idempotent
    again = project_commutant_finite(rep, proj).matrix
    assert np.linalg.norm(again - proj) <= 1e-10 * np.linalg.norm(proj)
    # commutes with 20 random elements
    elems = [group.sample(rng) for _ in range(20)]
    assert commutation_residual(rep, proj, elems) <= 1e-10
    # trace preserved
    assert abs(np.trace(proj) - np.trace(x)) <= 1e-10 * max(1, abs(np.trace(x)))
    # linear
    y = sample_gue(n, "complex", rng)
    py = project_commutant_finite(rep, y).matrix
    both = project_commutant_finite(rep, 2.0 * x + 0.5 * y).matrix
    assert np.linalg.norm(both - (2.0 * proj + 0.5 * py)) <= 1e-10 * np.linalg.norm(both)


def test_projection_config_validation():
    with pytest.raises(ValueError):
        ProjectionConfig(nu=0)
    with pytest.raises(ValueError):
        ProjectionConfig(set_size=1)
    with pytest.raises(ValueError):
        ProjectionConfig(commutation_tol=0)


def test_project_compact_identity(rng):
    rep = tensor(defining_rep(unitary_group(2)), defining_rep(unitary_group(2)))
    cfg = ProjectionConfig(nu=50)
    out = project_commutant_compact(rep, np.eye(4), cfg, rng)
    assert np.linalg.norm(out.matrix - np.eye(4)) <= 1e-12
    assert out.residual <= 1e-12


def test_project_compact_u1_scalar(rng):
    rep = defining_rep(unitary_group(1))
    x = np.array([[2.5]])
    out = project_commutant_compact(rep, x, ProjectionConfig(nu=10), rng)
    assert np.allclose(out.matrix, x)


def test_project_compact_schur_weyl(rng):
    # the commutant of u (x) u on U(2) is spanned by I and SWAP
    u2 = defining_rep(unitary_group(2))
    rep = tensor(u2, u2)
    x = sample_gue(4, "complex", rng)
    out = project_commutant_compact(rep, x, ProjectionConfig(nu=1000), rng)
    assert out.residual <= 1e-8

    swap = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            swap[j * 2 + i, i * 2 + j] = 1
    basis = np.stack([np.eye(4).reshape(-1), swap.reshape(-1)]).T
    coeff, *_ = np.linalg.lstsq(basis, out.matrix.reshape(-1), rcond=None)
    fitted = (basis @ coeff).reshape(4, 4)
    assert np.linalg.norm(fitted - out.matrix) <= 1e-6


def test_project_compact_budget_exhaustion(rng):
    from repblock import ProjectionError

    u2 = defining_rep(unitary_group(2))
    rep = tensor(u2, u2)
    x = sample_gue(4, "complex", rng)
    cfg = ProjectionConfig(nu=1, set_size=2, commutation_tol=1e-15, max_resamples=1)
    with pytest.raises(ProjectionError):
        project_commutant_compact(rep, x, cfg, rng)


def test_sample_commutant_trivial_group_returns_raw_gue():
    g = group_from_generators(5, [])
    rep = natural_perm_rep(g, "complex")
    want = sample_gue(5, "complex", np.random.default_rng(13))
    got = sample_commutant(rep, rng=np.random.default_rng(13))
    assert np.array_equal(got.matrix, want)


def test_sample_commutant_s3_span(rng):
    g = symmetric(3)
    rep = natural_perm_rep(g)
    s = sample_commutant(rep, rng=rng)
    basis = np.stack([np.eye(3).reshape(-1), np.ones(9)]).T
    coeff, *_ = np.linalg.lstsq(basis, s.matrix.reshape(-1), rcond=None)
    assert np.linalg.norm((basis @ coeff).reshape(3, 3) - s.matrix) <= 1e-10


def test_sample_commutant_c4_circulant(rng):
    g = cyclic(4)
    rep = natural_perm_rep(g, "complex")
    s = sample_commutant(rep, rng=rng).matrix
    # circulant: entry depends only on (j - i) mod 4
    for i in range(4):
        for j in range(4):
            assert abs(s[i, j] - s[0, (j - i) % 4]) <= 1e-12
    # and equals the brute-force average of the GOE/GUE seed used
    want = brute_reynolds_natural(g, sample_gue(4, "complex", np.random.default_rng(99)))
    got = project_commutant_finite(rep, sample_gue(4, "complex", np.random.default_rng(99))).matrix
    assert np.linalg.norm(got - want) <= 1e-12


def test_project_dispatch(rng):
    g = symmetric(3)
    rep = natural_perm_rep(g)
    x = sample_gue(3, "complex", rng)
    out = project_commutant(rep, x)
    assert isinstance(out, CommutantSample)
    with pytest.raises(TypeError):
        project_commutant_compact(rep, x, ProjectionConfig(), rng)
    with pytest.raises(TypeError):
        project_commutant_finite(defining_rep(unitary_group(2)), np.eye(2))
