import numpy as np
import pytest

from cychern import fixtures as fx
from cychern.cochain import (
    A_matrix, B0_matrix, B_matrix, Cochain, NotCyclicError, b_matrix, bprime_matrix,
    class_solve, cyclic_basis, cyclic_cohomology_dims, cyclic_ops, from_function, hochschild_b,
    is_cyclic_cocycle, lambda_matrix, nullspace_sample, op_A, op_B, op_B0, preimage_under_B,
    random_cyclic, random_cyclic_cocycle, tau_matrix,
)
from cychern.fredholm import chern_even
from cychern.oracles import cyclic_dims_bruteforce

CATS = {"nil": fx.fix_nil, "proj": fx.fix_proj}


def rel(r, phi):
    return np.abs(r).max(initial=0.0) / (1.0 + np.abs(phi).max(initial=0.0))


@pytest.fixture(params=sorted(CATS))
def cat(request):
    return CATS[request.param]()


@pytest.mark.parametrize("n", range(5))
def test_complex_identities(cat, n, rng):
    phi = Cochain.random(cat, n, rng).values
    assert rel(b_matrix(cat, n + 1) @ b_matrix(cat, n) @ phi, phi) <= 1e-10
    assert rel(bprime_matrix(cat, n + 1) @ bprime_matrix(cat, n) @ phi, phi) <= 1e-10
    r = b_matrix(cat, n) @ A_matrix(cat, n) @ phi
    r = r - A_matrix(cat, n + 1) @ bprime_matrix(cat, n) @ phi
    assert rel(r, phi) <= 1e-10
    r = B_matrix(cat, n + 1) @ b_matrix(cat, n) @ phi
    r2 = B0_matrix(cat, n + 1) @ b_matrix(cat, n) @ phi - (phi - lambda_matrix(cat, n) @ phi)
    if n >= 1:
        r = r + b_matrix(cat, n - 1) @ B_matrix(cat, n) @ phi
        r2 = r2 + bprime_matrix(cat, n - 1) @ B0_matrix(cat, n) @ phi
    assert rel(r, phi) <= 1e-10
    assert rel(r2, phi) <= 1e-10


@pytest.mark.parametrize("n", range(1, 4))
def test_kernel_of_A_inside_image_of_one_minus_lambda(cat, n, rng):
    w = nullspace_sample(A_matrix(cat, n), rng)
    assert np.linalg.norm(w) > 0.1
    M = np.eye(w.size) - lambda_matrix(cat, n)
    x, *_ = np.linalg.lstsq(M, w, rcond=None)
    assert np.linalg.norm(M @ x - w) / np.linalg.norm(w) <= 1e-8


@pytest.mark.parametrize("n", range(4))
def test_image_of_B_is_cyclic(cat, n, rng):
    psi = Cochain.random(cat, n + 1, rng)
    phi = op_B(psi)
    assert (phi - cyclic_ops(phi)[1]).norm() <= 1e-10 * (1 + phi.norm())


@pytest.mark.parametrize("n", range(4))
def test_preimage_under_B(cat, n, rng):
    phi = random_cyclic(cat, n, rng)
    psi = preimage_under_B(phi)
    assert (op_B(psi) - 2 * (n + 1) * phi).norm() <= 1e-9 * (1 + phi.norm())


def test_preimage_of_zero_and_of_non_cyclic(rng):
    cat = fx.fix_proj()
    assert preimage_under_B(Cochain.zeros(cat, 1)).norm() == 0
    with pytest.raises(NotCyclicError):
        preimage_under_B(Cochain.random(cat, 1, rng))


def test_b_convention_on_matrix_units():
    cat = fx.fix_m2()
    phi = from_function(cat, 0, lambda c: {"E11": 3.0, "E22": 5.0}.get(c[0], 0.0))
    bphi = hochschild_b(phi)
    # (b phi)(f0, f1) = phi(f0 f1) - phi(f1 f0)
    assert bphi("E12", "E21") == pytest.approx(3.0 - 5.0)
    assert bphi("E21", "E12") == pytest.approx(5.0 - 3.0)
    assert bphi("E11", "E11") == 0


def test_b_wrap_face_sign_in_degree_one():
    cat = fx.fix_m2()
    phi = from_function(cat, 1, lambda c: 1.0 if c == ("E12", "E21") else 0.0)
    bphi = hochschild_b(phi)
    # faces: +phi(f0 f1, f2) - phi(f0, f1 f2) + phi(f2 f0, f1)
    assert bphi("E11", "E12", "E21") == pytest.approx(1.0)
    assert bphi("E12", "E22", "E21") == pytest.approx(0.0)
    # only the wrap face contributes here, with sign (-1)^(n+1) = +1
    assert bphi("E22", "E21", "E12") == pytest.approx(1.0)


def test_tau_moves_last_to_front(rng):
    cat = fx.fix_m2()
    phi = Cochain.random(cat, 2, rng)
    tau_phi, lam_phi = cyclic_ops(phi)
    assert tau_phi("E12", "E21", "E11") == pytest.approx(phi("E11", "E12", "E21"))
    assert np.allclose(lam_phi.values, tau_phi.values)
    assert np.allclose(lambda_matrix(cat, 1), -tau_matrix(cat, 1))


def test_tau_has_order_n_plus_one(cat):
    for n in range(4):
        T = tau_matrix(cat, n)
        assert np.allclose(np.linalg.matrix_power(T, n + 1), np.eye(T.shape[0]))


def test_A_is_sum_of_lambda_powers(cat, rng):
    n = 2
    phi = Cochain.random(cat, n, rng)
    total = sum(np.linalg.matrix_power(lambda_matrix(cat, n), i) for i in range(n + 1)) @ phi.values
    assert np.allclose(op_A(phi).values, total)


def test_B0_inserts_identity():
    cat = fx.fix_nil()
    phi = from_function(cat, 1, lambda c: {("id_X", "id_X"): 2.0, ("u", "v"): 7.0}.get(c, 0.0))
    out = op_B0(phi)
    # (B0 phi)(f0) = phi(id, f0) - (-1)^1 phi(f0, id)
    assert out("id_X") == pytest.approx(4.0)
    assert out("id_Y") == 0
    assert out("e") == 0


def test_cocycle_check_tolerance_and_tuple():
    cat = fx.fix_proj()
    phi = chern_even(fx.proj_even_module(), 1)
    check = is_cyclic_cocycle(phi)
    assert check.ok
    assert check.tolerance == pytest.approx(1e-10 * (1 + phi.norm()))
    cyclic, cocycle, (cr, br) = check
    assert cyclic and cocycle and cr <= 1e-12 and br <= 1e-12
    bad = Cochain(cat, 1, np.array([1.0, 0, 0, 0]))
    assert not is_cyclic_cocycle(bad).ok


@pytest.mark.parametrize("nmax,want", [(4, [1, 0, 1, 0, 1])])
def test_cyclic_cohomology_of_point(nmax, want):
    assert cyclic_cohomology_dims(fx.fix_pt(), nmax) == want
    assert cyclic_dims_bruteforce(fx.fix_pt(), nmax) == want


@pytest.mark.parametrize("name", ["proj", "nil", "dual", "m2"])
def test_cyclic_dims_agree_with_bruteforce(name):
    cat = fx.CATEGORIES[name]()
    nmax = 2 if name == "m2" else 3
    assert cyclic_cohomology_dims(cat, nmax) == cyclic_dims_bruteforce(cat, nmax)


def test_cyclic_dims_of_proj_are_two_in_even_degrees():
    # C (+) C has HC^even of dimension 2 and HC^odd zero
    assert cyclic_cohomology_dims(fx.fix_proj(), 4) == [2, 0, 2, 0, 2]


def test_class_solve_detects_coboundaries(cat, rng):
    w = random_cyclic(cat, 1, rng)
    target = hochschild_b(w)
    sol = class_solve(target)
    assert sol.member
    assert sol.residual <= 1e-10
    assert (hochschild_b(sol.witness) - target).norm() <= 1e-10
    assert is_cyclic_cocycle(sol.witness).cyclic


def test_class_solve_rejects_nontrivial_class():
    phi2 = chern_even(fx.proj_even_module(), 1)
    sol = class_solve(phi2)
    assert not sol.member
    assert sol.residual > 0.1
    assert sol.worst_chain is not None


def test_class_solve_scale_and_degree():
    cat = fx.fix_proj()
    tiny = Cochain(cat, 2, 1e-16 * np.ones(8))
    assert class_solve(tiny, scale=1.0).member
    assert class_solve(Cochain.zeros(cat, 2)).member
    with pytest.raises(ValueError):
        class_solve(Cochain.zeros(cat, 0))


@pytest.mark.parametrize("n", [0, 1, 2])
def test_random_cyclic_cocycle(cat, n, rng):
    phi = random_cyclic_cocycle(cat, n, rng)
    assert is_cyclic_cocycle(phi).ok


def test_cyclic_basis_spans_kernel(cat):
    for n in range(3):
        K = cyclic_basis(cat, n)
        M = np.eye(K.shape[0]) - lambda_matrix(cat, n)
        assert np.abs(M @ K).max(initial=0.0) <= 1e-12
        assert K.shape[1] == K.shape[0] - np.linalg.matrix_rank(M)


def test_cochain_arithmetic_and_shape(rng):
    cat = fx.fix_proj()
    a, b = Cochain.random(cat, 1, rng), Cochain.random(cat, 1, rng)
    assert np.allclose((a + b - b).values, a.values)
    assert np.allclose((2 * a / 2).values, a.values)
    assert np.allclose((-a).values, -a.values)
    with pytest.raises(ValueError):
        Cochain(cat, 1, np.zeros(3))
    with pytest.raises(ValueError):
        a + Cochain.zeros(cat, 2)
    assert dict(a.items())[("p", "q")] == a("p", "q")
