import numpy as np
import pytest
import scipy.sparse.linalg as spla

from cipflow import assemble as asm
from cipflow.mesh import build_structured_mesh, make_periodic_x
from cipflow.params import PhysParams
from cipflow.space import build_space

from oracles import DenseOracle


def small_meshes():
    return [
        ("1x1", build_structured_mesh(1, 1)),
        ("2x1", build_structured_mesh(2, 1)),
        ("2x2", build_structured_mesh(2, 2)),
        ("periodic2x2", make_periodic_x(build_structured_mesh(2, 2))),
    ]


def params_for(mesh, mu=1e-3):
    return PhysParams(mu=mu, h=mesh.h_cell, beta_inf=1.0, gamma_u=0.001,
                      gamma_p=0.001, gamma=10.0, eps_perp=0.01)


def beta_poly(x, y):
    # polynomial field whose normal trace is single-signed on every face
    return (1.0 + x, 2.0 + y)


def beta_bubble(x, y):
    # divergence-free with zero normal trace on the unit square
    return (x * (1 - x) * (1 - 2 * y), -(1 - 2 * x) * y * (1 - y))


def rel_fro(A, B):
    return np.linalg.norm(A - B) / np.linalg.norm(B)


@pytest.mark.parametrize("name,mesh", small_meshes())
@pytest.mark.parametrize("degree", [1, 2])
def test_operator_oracle_suite(name, mesh, degree):
    vspace = build_space(mesh, degree, 2)
    pspace = build_space(mesh, degree, 1)
    params = params_for(mesh)
    oracle = DenseOracle(vspace, pspace)

    M = asm.assemble_mass(vspace).toarray()
    assert rel_fro(M, oracle.mass(vspace)) < 1e-12

    A = asm.assemble_viscous_nitsche(vspace, params).toarray()
    assert rel_fro(A, oracle.nitsche_viscous(params)) < 1e-12

    G = asm.assemble_gradient(vspace, pspace).toarray()
    assert rel_fro(G, oracle.gradient()) < 1e-12

    Sp = asm.assemble_pressure_stab(pspace, params).toarray()
    assert rel_fro(Sp, oracle.pressure_stab(params)) < 1e-12

    beta_inf = 4.0
    C = asm.assemble_convection(vspace, asm.AnalyticBeta(beta_poly), params,
                                beta_inf=beta_inf).toarray()
    assert rel_fro(C, oracle.convection(beta_poly, params, beta_inf)) < 1e-12

    D = asm.assemble_velocity_pressure_grad(vspace, pspace).toarray()
    assert rel_fro(D, oracle.mixed_gradient()) < 1e-12


def test_p1_reference_mass_matrix():
    # single reference triangle: analytic (1/24) [[2,1,1],[1,2,1],[1,1,2]]
    from cipflow.mesh import Mesh2D
    mesh = Mesh2D(np.array([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]),
                  [(0, 1, 2)], (0, 1, 0, 1), 1.0)
    s = build_space(mesh, 1, 1)
    M = asm.assemble_mass(s).toarray()
    exact = np.array([[2, 1, 1], [1, 2, 1], [1, 1, 2]]) / 24.0
    assert np.allclose(M, exact, atol=1e-15)


@pytest.mark.parametrize("degree", [1, 2])
def test_mass_partition_of_unity(degree):
    m = build_structured_mesh(3, 2, domain=(0.0, 2.0, 0.0, 1.0))
    s = build_space(m, degree, 1)
    M = asm.assemble_mass(s)
    ones = np.ones(s.ndof_scalar)
    assert ones @ (M @ ones) == pytest.approx(2.0, rel=1e-12)
    # row sums reproduce the basis integrals
    assert np.allclose(np.asarray(M.sum(axis=1)).ravel(),
                       asm.mean_vector(s), atol=1e-14)


def test_mass_spd():
    m = build_structured_mesh(3, 3)
    for degree in (1, 2):
        M = asm.assemble_mass(build_space(m, degree, 2))
        # Cholesky-style check: smallest eigenvalue of the SPD matrix
        w = spla.eigsh(M.tocsc(), k=1, which="SA",
                       return_eigenvectors=False)
        assert w[0] > 0


def test_viscous_constant_field_identity():
    m = build_structured_mesh(3, 2)
    s = build_space(m, 1, 2)
    params = params_for(m, mu=0.7)
    A = asm.assemble_viscous_nitsche(s, params)
    c = np.concatenate([np.full(s.ndof_scalar, 2.0),
                        np.full(s.ndof_scalar, -1.0)])
    # gradient terms vanish; only the penalty survives, face length = h_F
    expected = params.gamma * params.mu * len(m.boundary_faces) * 5.0
    assert c @ (A @ c) == pytest.approx(expected, rel=1e-12)
    assert abs(A - A.T).max() < 1e-13


def test_viscous_zero_viscosity():
    m = build_structured_mesh(2, 2)
    s = build_space(m, 1, 2)
    A = asm.assemble_viscous_nitsche(s, params_for(m, mu=0.0))
    assert A.nnz == 0


@pytest.mark.parametrize("degree", [1, 2])
def test_viscous_positive_definite_probe(degree):
    m = build_structured_mesh(4, 4)
    s = build_space(m, degree, 2)
    params = PhysParams(mu=1.0, h=m.h_cell, gamma=10.0 * degree ** 2)
    A = asm.assemble_viscous_nitsche(s, params)
    w = spla.eigsh(A.tocsc(), k=1, which="SA", return_eigenvectors=False)
    assert w[0] > 0


def test_gradient_constant_pressure_kernel():
    m = build_structured_mesh(3, 3)
    for degree in (1, 2):
        v = build_space(m, degree, 2)
        p = build_space(m, degree, 1)
        G = asm.assemble_gradient(v, p)
        assert np.abs(G @ np.full(p.ndof_scalar, 3.0)).max() < 1e-13


def test_gradient_mesh_mismatch_rejected():
    v = build_space(build_structured_mesh(2, 2), 1, 2)
    p = build_space(build_structured_mesh(3, 3), 1, 1)
    with pytest.raises(asm.AssemblyError):
        asm.assemble_gradient(v, p)


def test_gradient_is_projected_gradient():
    # for continuous q, (G q)_i = (grad q, v_i); check against D
    m = build_structured_mesh(2, 2)
    v = build_space(m, 1, 2)
    p = build_space(m, 1, 1)
    G = asm.assemble_gradient(v, p).toarray()
    D = asm.assemble_velocity_pressure_grad(v, p).toarray()
    assert np.allclose(G, D, atol=1e-13)


def test_pressure_stab_affine_kernel_and_psd():
    m = build_structured_mesh(3, 2)
    rng = np.random.RandomState(7)
    for degree in (1, 2):
        p = build_space(m, degree, 1)
        Sp = asm.assemble_pressure_stab(p, params_for(m))
        aff = 2.0 - p.dof_coords[:, 0] + 3 * p.dof_coords[:, 1]
        assert np.abs(Sp @ aff).max() < 1e-13
        for _ in range(100):
            q = rng.randn(p.ndof_scalar)
            assert q @ (Sp @ q) >= -1e-14


def test_pressure_stab_high_re_coefficient():
    # hand check on the single interior face of the 1x1 mesh, k=1
    m = build_structured_mesh(1, 1)
    p = build_space(m, 1, 1)
    params = params_for(m, mu=1e-4)
    assert params.reynolds > 1
    Sp = asm.assemble_pressure_stab(p, params)
    q = np.array([0.0, 1.0, 0.0, 0.0])  # hat at vertex (1, 0)
    # hat gradients: (1, -1) on the lower triangle, 0 on the upper one,
    # so |jump|^2 = 2 on the diagonal face of length sqrt(2)
    coef = params.gamma_p * params.xi * params.h ** 3 / params.mu
    assert q @ (Sp @ q) == pytest.approx(coef * 2 * np.sqrt(2.0), rel=1e-13)
    # xi equals 1/Re here, so the coefficient is gamma_p h^2 / beta_inf
    assert coef == pytest.approx(
        params.gamma_p * params.h ** 2 / params.beta_inf, rel=1e-13)


def test_pressure_stab_requires_viscosity():
    p = build_space(build_structured_mesh(2, 2), 1, 1)
    with pytest.raises(asm.AssemblyError, match="mu > 0"):
        asm.assemble_pressure_stab(p, params_for(p.mesh, mu=0.0))


def test_divergence_is_minus_g_transpose():
    # the continuity block of the assembled step matrix must equal -G^T
    # entry for entry (not merely approximately)
    from cipflow.saddle import build_imex_system
    m = build_structured_mesh(2, 2)
    v = build_space(m, 1, 2)
    p = build_space(m, 1, 1)
    ops = asm.DiscreteOperators(v, p, params_for(m))
    K = build_imex_system(ops, tau=0.1).matrix
    nv, npr = v.ndof, p.ndof_scalar
    block = K[nv:nv + npr, :nv].toarray()
    assert np.array_equal(block, -ops.G.T.toarray())


def test_convection_constant_tangential_kernel():
    # constant field with zero normal trace on the periodic strip
    m = make_periodic_x(build_structured_mesh(2, 2))
    v = build_space(m, 1, 2)
    params = params_for(m)
    c = np.concatenate([np.full(v.ndof_scalar, 0.8), np.zeros(v.ndof_scalar)])
    C = asm.assemble_convection(v, asm.AnalyticBeta(beta_poly), params,
                                beta_inf=4.0)
    assert np.abs(C @ c).max() < 1e-13


def test_convection_pure_volume_skew():
    # gamma_u = 0 and constant beta = (1, 0) on the periodic strip, where
    # beta.n = 0 on the remaining walls; v.n = 0 kills the penalty too
    m = make_periodic_x(build_structured_mesh(3, 3))
    v = build_space(m, 2, 2)
    params = PhysParams(mu=1e-3, h=m.h_cell, gamma_u=0.0, gamma=10.0)
    rng = np.random.RandomState(3)
    u = rng.randn(v.ndof)
    y = v.dof_coords[:, 1]
    on_y = np.minimum(y, 1 - y) < 1e-12
    u[np.where(on_y)[0] + v.ndof_scalar] = 0.0    # u2 = 0 on the walls
    C = asm.assemble_convection(
        v, asm.AnalyticBeta(lambda x, y: (np.ones(np.shape(x)),
                                          np.zeros(np.shape(x)))),
        params, beta_inf=1.0)
    assert abs(u @ (C @ u)) < 1e-12 * (u @ u)


@pytest.mark.parametrize("degree", [1, 2])
def test_chsemi_identity_20_random(degree):
    # (C v, v) = |v|^2_{s_u} for div-free tangential beta
    m = build_structured_mesh(2, 2)
    v = build_space(m, degree, 2)
    params = params_for(m)
    beta = asm.AnalyticBeta(beta_bubble)
    rng = np.random.RandomState(11)
    C = asm.assemble_convection(v, beta, params)
    for _ in range(20):
        u = rng.randn(v.ndof)
        lhs = u @ (C @ u)
        rhs = asm.su_seminorm(v, u, beta, params)
        assert abs(lhs - rhs) <= 1e-11 * (u @ u)


@pytest.mark.parametrize("degree", [1, 2])
@pytest.mark.parametrize("periodic", [False, True])
def test_apply_matches_matrix(degree, periodic):
    m = build_structured_mesh(2, 2)
    if periodic:
        m = make_periodic_x(m)
    v = build_space(m, degree, 2)
    params = params_for(m)
    beta = asm.AnalyticBeta(beta_poly)
    C = asm.assemble_convection(v, beta, params, beta_inf=4.0)
    rng = np.random.RandomState(5)
    u = rng.randn(v.ndof)
    assert np.allclose(asm.apply_convection(v, u, beta, params, beta_inf=4.0),
                       C @ u, atol=1e-13)


def test_su_seminorm_scaling_and_kernel():
    m = make_periodic_x(build_structured_mesh(2, 2))
    v = build_space(m, 1, 2)
    params = params_for(m)
    beta = asm.AnalyticBeta(beta_poly)
    rng = np.random.RandomState(9)
    u = rng.randn(v.ndof)
    s1 = asm.su_seminorm(v, u, beta, params)
    s2 = asm.su_seminorm(v, 2 * u, beta, params)
    assert s2 == pytest.approx(4 * s1, rel=1e-12)
    # globally affine tangential field: no jumps, no normal trace
    aff = np.concatenate([1.0 + 2 * v.dof_coords[:, 1],
                          np.zeros(v.ndof_scalar)])
    assert asm.su_seminorm(v, aff, beta, params) < 1e-13


def test_l2_project_constants_and_linears():
    m = build_structured_mesh(3, 3)
    s = build_space(m, 1, 1)
    c = asm.l2_project(s, lambda x, y: np.ones(np.shape(x)))
    assert np.allclose(c, 1.0, atol=1e-12)
    lin = asm.l2_project(s, lambda x, y: x + 2 * y)
    assert np.allclose(lin, s.dof_coords[:, 0] + 2 * s.dof_coords[:, 1],
                       atol=1e-12)


@pytest.mark.parametrize("degree", [1, 2])
def test_l2_projection_rate(degree):
    from cipflow.diagnostics import l2_error, convergence_rates
    errs, hs = [], []
    for n in (4, 8, 16):
        m = build_structured_mesh(n, n)
        s = build_space(m, degree, 1)
        f = lambda x, y: np.sin(2 * np.pi * x)
        coeffs = asm.l2_project(s, f)
        errs.append(l2_error(s, coeffs, f))
        hs.append(m.h_cell)
    rates = convergence_rates(hs, errs)
    assert rates[-1] == pytest.approx(degree + 1, abs=0.2)


def test_boundary_rhs_consistency():
    m = build_structured_mesh(3, 3)
    v = build_space(m, 1, 2)
    p = build_space(m, 1, 1)
    params = params_for(m, mu=0.3)
    n = v.ndof_scalar

    # normal penalty data: g = (x, y) has g.n = 1 on the far walls
    pen = asm.normal_penalty_bc_rhs(v, lambda x, y: (x, y), 2.0)
    ex = np.concatenate([np.ones(n), np.zeros(n)])
    ey = np.concatenate([np.zeros(n), np.ones(n)])
    assert ex @ pen == pytest.approx(2.0, rel=1e-12)   # beta_inf * |x=1 wall|
    assert ey @ pen == pytest.approx(2.0, rel=1e-12)

    # continuity data: -(1, g.n) = -div(g) * area = -2
    bc = asm.mass_bc_rhs(p, lambda x, y: (x, y))
    assert np.sum(bc) == pytest.approx(-2.0, rel=1e-12)

    # constant Dirichlet data reproduces the operator action exactly
    c = np.concatenate([np.full(n, 1.5), np.full(n, -0.5)])
    A = asm.assemble_viscous_nitsche(v, params)
    rhs = asm.viscous_bc_rhs(v, params,
                             lambda x, y: (np.full(np.shape(x), 1.5),
                                           np.full(np.shape(x), -0.5)))
    assert np.allclose(A @ c, rhs, atol=1e-12)

    # zero data gives zero loads
    zero = lambda x, y: (np.zeros(np.shape(x)), np.zeros(np.shape(x)))
    assert np.abs(asm.viscous_bc_rhs(v, params, zero)).max() == 0.0
    assert np.abs(asm.mass_bc_rhs(p, zero)).max() == 0.0


def test_forcing_rhs_integrates_constants():
    m = build_structured_mesh(2, 2, domain=(0.0, 2.0, 0.0, 1.0))
    v = build_space(m, 2, 2)
    f = asm.forcing_rhs(v, lambda x, y: (np.full(np.shape(x), 3.0),
                                         np.full(np.shape(x), -1.0)))
    n = v.ndof_scalar
    assert np.sum(f[:n]) == pytest.approx(6.0, rel=1e-12)
    assert np.sum(f[n:]) == pytest.approx(-2.0, rel=1e-12)


def test_matrix_dump_roundtrip(tmp_path):
    m = build_structured_mesh(1, 1)
    s = build_space(m, 1, 1)
    M = asm.assemble_mass(s)
    path = tmp_path / "mass.txt"
    asm.dump_matrix(M, path)
    rows, cols, vals = np.loadtxt(path, unpack=True)
    back = np.zeros(M.shape)
    back[rows.astype(int), cols.astype(int)] = vals
    assert np.allclose(back, M.toarray(), atol=1e-15)
