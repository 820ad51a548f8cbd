from __future__ import annotations

import itertools

import pytest

from ybx import (
    AxiomViolation,
    NotClosed,
    action_closures,
    classify,
    derived_solution,
    diagonal_map,
    from_components,
    from_pairs,
    is_bijective,
    is_derived_shape,
    is_involutive,
    is_left_nondegenerate,
    is_right_nondegenerate,
    load_solution,
    loads_solution,
    make_idempotent_yy,
    make_lyubashenko,
    make_metahomomorphism,
    make_trivial,
    relabel,
    restrict_solution,
    retract_fixed_rho,
    sigma_tables,
    validate_yang_baxter,
    yang_baxter_witness,
)
from ybx.solution import (
    compose,
    idempotent_exponent,
    identity,
    invert,
    map_tail_period,
    perm_order,
)


def test_perm_helpers():
    assert compose((1, 0), (1, 0)) == (0, 1)
    assert invert((1, 2, 0)) == (2, 0, 1)
    assert identity(3) == (0, 1, 2)
    assert perm_order((1, 0)) == 2
    assert perm_order((1, 2, 0)) == 3
    # constant maps become stable immediately; the idempotent exponent
    # of a permutation is its order
    assert map_tail_period((1, 1)) == (1, 1)
    assert idempotent_exponent((1, 1)) == 1
    assert idempotent_exponent((0, 1)) == 1
    assert idempotent_exponent((1, 0)) == 2


def test_from_pairs_round_trip(triv2):
    data = triv2.to_json()
    again = load_solution(data)
    assert again.r == triv2.r
    assert loads_solution('{"n": 2, "lambda": [[0,1],[0,1]], "rho": [[0,1],[0,1]]}').r == triv2.r


def test_load_rejects_malformed():
    with pytest.raises(ValueError):
        load_solution({"n": 2})
    with pytest.raises(ValueError):
        load_solution({"n": 2, "lambda": [[0, 1], [0, 1]]})
    with pytest.raises(ValueError):
        load_solution(
            {
                "n": 2,
                "r": [[[0, 0], [0, 0]], [[0, 1], [1, 1]]],
                "lambda": [[0, 1], [0, 1]],
                "rho": [[0, 1], [0, 1]],
            }
        )


def test_braid_witness_on_non_solution():
    bad = from_pairs(2, [[[0, 0], [0, 0]], [[0, 0], [0, 1]]])
    assert yang_baxter_witness(bad) == (1, 1, 1)
    assert not validate_yang_baxter(bad)


def test_constructors_are_solutions():
    for sol in (
        make_trivial(2),
        make_trivial(4),
        make_idempotent_yy(3),
        make_lyubashenko((1, 2, 0), (2, 0, 1)),
        make_metahomomorphism([[0, 1], [1, 0]], [0, 0]),
    ):
        assert validate_yang_baxter(sol)


def test_classify_trivial(triv2):
    flags = classify(triv2)
    assert flags.is_solution and flags.bijective and flags.involutive
    assert flags.left_nondegenerate and flags.right_nondegenerate
    assert not flags.idempotent
    assert flags.fixed_rho  # rho is the identity for every y
    assert flags.abelian_A and flags.abelian_M
    assert flags.consistent()


def test_classify_abex(abex):
    flags = classify(abex)
    assert flags.is_solution and flags.left_nondegenerate
    assert not flags.right_nondegenerate and not flags.bijective
    assert not flags.involutive and not flags.idempotent
    assert flags.abelian_A is True
    assert flags.abelian_M is False
    assert flags.consistent()


def test_classify_idempotent(idem2):
    flags = classify(idem2)
    assert flags.idempotent and flags.left_nondegenerate
    assert not flags.bijective and not flags.involutive
    assert flags.consistent()


def test_flags_consistency_is_a_real_check():
    flags = classify(make_trivial(2))
    broken = type(flags)(**{**flags.to_json(), "right_nondegenerate": False})
    assert not broken.consistent()


def test_diagonal_and_action_closures(triv2, abex, swap2):
    assert diagonal_map(triv2) == (0, 1)
    assert diagonal_map(abex) == (0, 2, 1)
    assert diagonal_map(swap2) == (1, 0)
    for sol, expect in ((triv2, (1, 1, 1, 1)), (abex, (2, 2, 1, 4)), (swap2, (2, 2, 1, 4))):
        ac = action_closures(sol)
        assert (ac.k, ac.e, ac.e_sigma, ac.v) == expect


def test_action_closure_defining_properties(abex):
    # k is least with q^(2k) = q^k, e is the exponent of the lambda
    # group, e_sigma simultaneously idempotents every sigma map
    ac = action_closures(abex)
    q = diagonal_map(abex)

    def power(f, m):
        out = identity(len(f))
        for _ in range(m):
            out = compose(f, out)
        return out

    assert power(q, 2 * ac.k) == power(q, ac.k)
    assert all(power(q, 2 * m) != power(q, m) for m in range(1, ac.k))
    for lam in abex.lam:
        assert power(lam, ac.e) == identity(abex.n)
    for sig in sigma_tables(abex):
        assert power(sig, 2 * ac.e_sigma) == power(sig, ac.e_sigma)
    assert ac.v == ac.k * ac.e * ac.e_sigma


def test_derived_solution_shape(triv2, abex, idem2):
    assert derived_solution(triv2).r == triv2.r
    for sol in (abex, idem2):
        der = derived_solution(sol)
        assert validate_yang_baxter(der)
        assert is_derived_shape(der)
        # derived tables read r(x, y) = (y, sigma_y(x))
        sig = sigma_tables(sol)
        assert all(
            der.r[x][y] == (y, sig[y][x]) for x in range(sol.n) for y in range(sol.n)
        )


def test_sigma_formula(abex):
    # sigma_y(x) = lam_y(rho_{lam_x^-1(y)}(x))
    sig = sigma_tables(abex)
    for x in range(3):
        for y in range(3):
            t = invert(abex.lam[x])[y]
            assert sig[y][x] == abex.lam[y][abex.rho[t][x]]


def test_relabel_preserves_structure(abex):
    g = (2, 0, 1)
    moved = relabel(abex, g)
    assert validate_yang_baxter(moved)
    a, b = classify(abex).to_json(), classify(moved).to_json()
    assert a == b


def test_restrict_to_closed_subset(idem3):
    sub, embedding = restrict_solution(idem3, (0, 2))
    assert sub.n == 2 and embedding == (0, 2)
    assert validate_yang_baxter(sub)
    assert sub.r == make_idempotent_yy(2).r


def test_restrict_rejects_open_subset(abex):
    with pytest.raises(NotClosed):
        restrict_solution(abex, (0, 1))


def test_retract_fixed_rho(r2ex):
    assert classify(r2ex).fixed_rho
    q, proj = retract_fixed_rho(r2ex)
    assert q.n == 1 and proj == (0, 0)
    assert validate_yang_baxter(q)


def test_metahomomorphism_z2(z2group):
    from ybx import is_idempotent

    assert z2group.r == (((0, 0), (1, 0)), ((1, 0), (0, 0)))
    assert is_idempotent(z2group)
    assert sorted(set(diagonal_map(z2group))) == [0]


def test_metahomomorphism_rejects_bad_input():
    with pytest.raises(AxiomViolation):
        make_metahomomorphism([[0, 1], [1, 1]], [0, 0])  # not a group
    z3 = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]
    with pytest.raises(AxiomViolation):
        make_metahomomorphism(z3, [0, 0, 1])  # f breaks the law


def test_nondegeneracy_vs_bijectivity_on_samples():
    # for finite left non-degenerate solutions, bijective and right
    # non-degenerate coincide
    samples = [
        make_trivial(3),
        make_idempotent_yy(3),
        make_lyubashenko((1, 0), (0, 1)),
        from_components(lam=[(0, 2, 1)] * 3, rho=[(0, 0, 0), (0, 0, 1), (0, 2, 0)]),
    ]
    for sol in samples:
        if is_left_nondegenerate(sol):
            assert is_bijective(sol) == is_right_nondegenerate(sol)


def test_involutive_implies_bijective():
    for lam, rho in itertools.permutations([(0, 1), (1, 0)], 2):
        sol = make_lyubashenko(lam, rho)
        if is_involutive(sol):
            assert is_bijective(sol)
