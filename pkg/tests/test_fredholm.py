import numpy as np
import pytest
from scipy.stats import unitary_group

from cychern import fixtures as fx
from cychern.acceptance import random_word
from cychern.cochain import Cochain, hochschild_b, is_cyclic_cocycle
from cychern.fredholm import (
    EvenModule, OddModule, OperatorWord, chern_even, chern_odd, conjugate, evaluate_word,
    merged_word_S, odd_character, periodicity_check, periodicity_witness, summability_report,
    summability_thresholds, supertrace, trs_odd, validate_module, witness_component,
)
from cychern.lincat import CompositionError
from cychern.numkernel import DimensionError, schatten_norm
from cychern.omega import periodicity_S


def generic_proj_module(seed=5, dim=3, rank_plus=2, rank_minus=1):
    """FIX_PROJ on C^dim (+) C^dim with random projections of different ranks
    and the odd involution [[0, G^-1], [G, 0]] for a random invertible G."""
    r = np.random.default_rng(seed)

    def projection(rank):
        U = unitary_group.rvs(dim, random_state=r)
        return U[:, :rank] @ U[:, :rank].conj().T

    G = r.standard_normal((dim, dim)) + 1j * r.standard_normal((dim, dim))
    z = np.zeros((dim, dim))
    F = np.block([[z, np.linalg.inv(G)], [G, z]])
    Pp, Pm = projection(rank_plus), projection(rank_minus)
    eye = np.eye(dim)
    return EvenModule(fx.fix_proj(), {"*": (dim, dim)}, {"*": F},
                      {"p": fx.block_diag(Pp, Pm), "q": fx.block_diag(eye - Pp, eye - Pm)})


def block_unitary(seed, dims):
    r = np.random.default_rng(seed)
    return fx.block_diag(unitary_group.rvs(dims[0], random_state=r),
                         unitary_group.rvs(dims[1], random_state=r))


# -- fixtures and validation ----------------------------------------------------------

@pytest.mark.parametrize("build", [fx.proj_even_module, fx.m2_even_module, fx.m2_odd_module,
                                   generic_proj_module])
def test_fixture_modules_validate(build):
    rep = validate_module(build())
    assert rep.passed, rep.to_text()


def test_validation_reports_each_failure():
    mod = fx.proj_even_module()
    bad = EvenModule(mod.cat, {"*": (2, 2)}, {"*": 2 * fx.swap(2)},
                     {"p": mod.H[0] + 0.1 * fx.swap(2), "q": mod.H[1]})
    failed = {c.name for c in validate_module(bad).failures()}
    assert "F^2 = id at *" in failed
    assert "H(p) block-diagonal" in failed
    assert "functor law H(p)H(p)" in failed
    assert "identity at *" in failed


def test_wrong_shape_names_the_morphism():
    mod = fx.proj_even_module()
    with pytest.raises(DimensionError, match=r"H\(q\)"):
        EvenModule(mod.cat, {"*": (2, 2)}, {"*": fx.swap(2)}, {"p": mod.H[0], "q": np.eye(3)})
    with pytest.raises(ValueError, match="missing"):
        EvenModule(mod.cat, {"*": (2, 2)}, {"*": fx.swap(2)}, {"p": mod.H[0]})
    with pytest.raises(DimensionError):
        OddModule(fx.fix_m2(), {"*": 2}, {"*": np.eye(3)}, fx.m2_standard_rep())


# -- goldens ---------------------------------------------------------------------

def test_even_character_goldens():
    mod = fx.proj_even_module()
    phi0, phi2 = chern_even(mod, 0), chern_even(mod, 1)
    assert phi0("p") == pytest.approx(1, abs=1e-12)
    assert phi0("q") == pytest.approx(-1, abs=1e-12)
    assert phi2("p", "p", "p") == pytest.approx(-1, abs=1e-12)
    assert phi2("p", "q", "p") == pytest.approx(1, abs=1e-12)


def test_commutator_and_word_goldens():
    mod = fx.proj_even_module()
    assert schatten_norm(mod.comm[0], 1) == pytest.approx(2.0)
    assert summability_report(mod, 1)["p"] == pytest.approx(2.0)
    w = evaluate_word(mod, "p", ["p", "p"])
    want = fx.block_diag(-fx.matrix_unit(0, 0), np.zeros((2, 2)))
    assert np.allclose(w.matrix, want)
    assert w.degree == 2


def test_odd_character_goldens():
    mod = fx.m2_odd_module()
    phi1 = chern_odd(mod, 1)
    assert phi1("E12", "E21") == pytest.approx(-2, abs=1e-12)
    assert phi1("E21", "E12") == pytest.approx(2, abs=1e-12)
    F, A, B = mod.F[0], fx.matrix_unit(0, 1), fx.matrix_unit(1, 0)
    assert phi1("E12", "E21") == pytest.approx(np.trace(F @ (B @ A - A @ B)), abs=1e-12)


def test_m2_even_characters_vanish():
    mod = fx.m2_even_module()
    assert chern_even(mod, 0).norm() <= 1e-12
    assert chern_even(mod, 1).norm() <= 1e-12


# -- characters are cyclic cocycles ------------------------------------------------

@pytest.mark.parametrize("build,m", [(fx.proj_even_module, 0), (fx.proj_even_module, 1),
                                     (fx.proj_even_module, 2), (fx.m2_even_module, 1),
                                     (generic_proj_module, 0), (generic_proj_module, 1)])
def test_even_characters_are_cyclic_cocycles(build, m):
    phi = chern_even(build(), m)
    check = is_cyclic_cocycle(phi, 1e-10 * (1 + phi.norm()))
    assert check.ok, (check.cyclic_residual, check.cocycle_residual)


@pytest.mark.parametrize("m", [1, 2])
def test_odd_characters_are_cyclic_cocycles(m):
    phi = chern_odd(fx.m2_odd_module(), m)
    assert is_cyclic_cocycle(phi).ok


@pytest.mark.parametrize("seed", range(4))
def test_characters_invariant_under_block_unitaries(seed):
    mod = fx.proj_even_module()
    conj = conjugate(mod, {"*": block_unitary(seed, (2, 2))})
    assert validate_module(conj).passed
    for m in (0, 1):
        phi = chern_even(conj, m)
        assert is_cyclic_cocycle(phi).ok
        assert (phi - chern_even(mod, m)).norm() <= 1e-10


def test_odd_character_invariant_under_unitary():
    mod = fx.m2_odd_module()
    U = unitary_group.rvs(2, random_state=np.random.default_rng(3))
    conj = conjugate(mod, {"*": U})
    assert (chern_odd(conj, 1) - chern_odd(mod, 1)).norm() <= 1e-10


def test_odd_module_has_no_even_characters():
    mod = fx.m2_odd_module()
    for n in (0, 2):
        assert odd_character(mod, n).norm() <= 1e-12
    with pytest.raises(ValueError):
        chern_odd(mod, 0)
    with pytest.raises(ValueError):
        chern_even(fx.proj_even_module(), -1)


# -- traces -------------------------------------------------------------------------

@pytest.mark.parametrize("degree", [0, 1, 2, 3])
def test_word_parity_blocks(degree, rng):
    mod = generic_proj_module()
    w = random_word(mod, degree, rng).matrix
    d = 3
    diag = max(np.abs(w[:d, :d]).max(), np.abs(w[d:, d:]).max())
    off = max(np.abs(w[:d, d:]).max(), np.abs(w[d:, :d]).max())
    if degree % 2:
        assert diag <= 1e-12 < off
    else:
        assert off <= 1e-12 < diag


@pytest.mark.parametrize("degree", [0, 2, 4])
def test_supertrace_of_even_word_is_graded_trace(degree, rng):
    mod = generic_proj_module()
    w = random_word(mod, degree, rng)
    eps = mod.grading(0)
    assert supertrace(mod, w) == pytest.approx(np.trace(eps @ w.matrix), abs=1e-10)


@pytest.mark.parametrize("degree", [1, 3])
def test_supertrace_of_odd_word_vanishes(degree, rng):
    mod = generic_proj_module()
    assert abs(supertrace(mod, random_word(mod, degree, rng))) <= 1e-10


@pytest.mark.parametrize("build,trace,total", [
    (generic_proj_module, supertrace, 2), (generic_proj_module, supertrace, 4),
    (fx.m2_odd_module, trs_odd, 1), (fx.m2_odd_module, trs_odd, 3)])
def test_graded_trace_laws(build, trace, total, rng):
    mod = build()
    for _ in range(20):
        i = int(rng.integers(0, total + 1))
        w1, w2 = random_word(mod, i, rng), random_word(mod, total - i, rng)
        a = trace(mod, OperatorWord(0, 0, total, w1.matrix @ w2.matrix))
        b = trace(mod, OperatorWord(0, 0, total, w2.matrix @ w1.matrix))
        assert abs(a - (-1) ** (i * (total - i)) * b) <= 1e-10 * (1 + abs(a))
        w = random_word(mod, total - 1, rng)
        F = mod.F[0]
        sign = -1 if (total - 1) % 2 else 1
        dw = OperatorWord(0, 0, total, F @ w.matrix - sign * w.matrix @ F)
        assert abs(trace(mod, dw)) <= 1e-10


def test_trs_odd_vanishes_on_even_words(rng):
    mod = fx.m2_odd_module()
    for degree in (0, 2, 4):
        assert abs(trs_odd(mod, random_word(mod, degree, rng))) <= 1e-12


@pytest.mark.parametrize("m", [0, 1])
def test_holder_bound_for_words(m, rng):
    mod = generic_proj_module()
    p = 2 * m + 1
    for k in range(1, p + 1):
        for _ in range(10):
            letters = [int(x) for x in rng.integers(0, 2, size=k)]
            head = int(rng.integers(0, 2))
            w = evaluate_word(mod, mod.cat.name(head), letters)
            bound = np.linalg.norm(mod.H[head], 2) * np.prod(
                [schatten_norm(mod.comm[f], p) for f in letters])
            assert schatten_norm(w.matrix, p / k) <= bound + 1e-8


def test_word_errors():
    mod = fx.proj_even_module()
    w = OperatorWord(0, 0, 0, np.eye(4))
    assert supertrace(mod, w) == pytest.approx(0)
    nil = fx.fix_nil()
    H = {"id_X": np.eye(2), "id_Y": np.eye(2), "u": np.zeros((2, 2)), "v": np.zeros((2, 2)),
         "e": np.zeros((2, 2))}
    F = {"X": fx.swap(1), "Y": fx.swap(1)}
    nmod = EvenModule(nil, {"X": (1, 1), "Y": (1, 1)}, F, H)
    with pytest.raises(CompositionError):
        evaluate_word(nmod, "u", ["u"])
    with pytest.raises(CompositionError):
        supertrace(nmod, evaluate_word(nmod, None, ["u"]))
    with pytest.raises(ValueError):
        evaluate_word(nmod, None)


def test_summability_thresholds():
    assert summability_thresholds(1) == {"even_degree": 0, "odd_degree": 1}
    assert summability_thresholds(2) == {"even_degree": 2, "odd_degree": 1}
    assert summability_thresholds(3) == {"even_degree": 2, "odd_degree": 3}
    assert summability_thresholds(4) == {"even_degree": 4, "odd_degree": 3}


# -- periodicity -------------------------------------------------------------------------

def test_periodicity_spot_values():
    mod = fx.proj_even_module()
    s = periodicity_S(chern_even(mod, 0))
    assert s("p", "p", "p") == pytest.approx(1, abs=1e-12)
    assert -chern_even(mod, 1)("p", "p", "p") == pytest.approx(1, abs=1e-12)
    # S(phi^0) + phi^2 vanishes at (p, p, p), and so must b psi
    assert hochschild_b(periodicity_witness(mod, 0))("p", "p", "p") == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("build,m", [(fx.proj_even_module, 0), (fx.proj_even_module, 1),
                                     (fx.m2_even_module, 0), (generic_proj_module, 0),
                                     (generic_proj_module, 1)])
def test_periodicity_check(build, m):
    rep = periodicity_check(build(), m)
    assert rep.passed, rep.to_text()
    assert {"S", "phi", "phi_next", "witness"} <= set(rep.data)


def test_merged_words_agree_with_forms():
    mod = generic_proj_module(seed=11)
    for m in (0, 1):
        s_forms = periodicity_S(chern_even(mod, m))
        assert (s_forms - merged_word_S(mod, m)).norm() <= 1e-10
        assert s_forms.norm() > 1e-3


def test_witness_components_rotate():
    mod = generic_proj_module()
    from cychern.cochain import cyclic_ops
    for j in range(1, 4):
        tau, _ = cyclic_ops(witness_component(mod, 1, j))
        assert (tau - witness_component(mod, 1, j - 1)).norm() <= 1e-10


@pytest.mark.parametrize("m", [0, 1])
def test_witness_normalization_is_one_half(m):
    mod = generic_proj_module()
    target = periodicity_S(chern_even(mod, m)) + (m + 1) * chern_even(mod, m + 1)
    psi = periodicity_witness(mod, m)
    assert (hochschild_b(psi) - target).norm() <= 1e-9
    # the unnormalized sum misses by an O(1) amount
    assert (hochschild_b(2 * psi) - target).norm() > 0.5


def test_periodicity_check_catches_a_broken_witness(monkeypatch):
    import cychern.fredholm as fr

    real = fr.periodicity_witness
    monkeypatch.setattr(fr, "periodicity_witness", lambda mod, m: 2 * real(mod, m))
    rep = fr.periodicity_check(generic_proj_module(), 0)
    assert [c.name for c in rep.failures()] == ["S(phi) + (m+1) phi' - b psi"]
    assert "worst chain" in rep.failures()[0].detail


def test_characters_use_thread_pool(monkeypatch):
    mod = fx.proj_even_module()
    serial = chern_even(mod, 1)
    monkeypatch.setenv("CYCHERN_THREADS", "3")
    assert np.array_equal(chern_even(mod, 1).values, serial.values)
    assert isinstance(serial, Cochain)
