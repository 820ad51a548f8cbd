from __future__ import annotations

import itertools

import pytest

from ybx import (
    CellSpec,
    ClassRef,
    PreconditionUnmet,
    WordEngine,
    archimedean_components,
    cancellativity_probe,
    derived_solution,
    noetherian_diagnosis,
    nil_power_check,
    replay_cancellation_witness,
)
from ybx.ideals import (
    cell_members,
    ideal_chain,
    lu_membership,
    mask_of,
    subset_of,
    w_y_element,
    yz_cell,
)


def test_mask_round_trip():
    for n in (2, 3, 4):
        for size in range(n + 1):
            for subset in itertools.combinations(range(n), size):
                assert subset_of(mask_of(subset), n) == subset


def test_ideal_chain_levels(triv2_engine):
    chain = ideal_chain(triv2_engine, 4)
    assert chain.level(ClassRef("M", 1, 0)) == 1
    pair = triv2_engine.class_of("M", (0, 1))
    assert chain.level(pair) == 2
    assert chain.divisor_mask(pair) == 0b11


def test_ideal_levels_monotone_under_product(abex_engine):
    # multiplying never loses left divisors
    chain = ideal_chain(abex_engine, 4)
    for w1 in itertools.product(range(3), repeat=2):
        for w2 in itertools.product(range(3), repeat=2):
            a = abex_engine.class_of("M", w1)
            b = abex_engine.class_of("M", w2)
            p = abex_engine.product(a, b)
            assert chain.divisor_mask(p) & chain.divisor_mask(a) == chain.divisor_mask(a)
            assert chain.level(p) >= chain.level(a)


def test_yz_cell(triv2_engine, abex_engine):
    assert yz_cell(triv2_engine, triv2_engine.class_of("M", (0, 1))) == (3, 3)
    # lambda of the class maps Z onto Y
    ref = abex_engine.class_of("M", (1,))
    y, z = yz_cell(abex_engine, ref)
    lam = abex_engine.lambda_of_class(ref)
    assert mask_of(lam[t] for t in subset_of(z, 3)) == y


def test_cell_members_count(triv2_engine):
    members = cell_members(triv2_engine, CellSpec("M"), 3)
    assert len(members) == 9  # 2 + 3 + 4 classes at lengths 1..3


def test_nil_power(triv2_engine, idem2_engine):
    assert nil_power_check(triv2_engine, triv2_engine.class_of("M", (0,))) is None
    assert nil_power_check(idem2_engine, idem2_engine.class_of("M", (0,))) == 2


def test_w_y_element(triv2_engine, idem2_engine):
    assert w_y_element(triv2_engine, (0,)) == ClassRef("M", 1, 0)
    w = w_y_element(idem2_engine, (0, 1))
    assert w is not None and w.length == 2


def test_lu_membership(triv2_engine, idem2_engine):
    assert lu_membership(triv2_engine, (0,), max_length=4).verdict == "EvidenceAtDepth"
    report = lu_membership(idem2_engine, (0,), max_length=4)
    assert report.verdict == "RefutedWithWitness"
    assert report.witness == {
        "d": 2,
        "f": [0],
        "word": [0, 0],
        "divisors": (0, 1),
    }
    with pytest.raises(ValueError):
        lu_membership(triv2_engine, ())


def test_cancellation_witness_on_idempotent_cell(idem2_engine):
    report = cancellativity_probe(
        idem2_engine, CellSpec("A_YY", (0, 1), 1), max_length=6
    )
    assert report.verdict == "RefutedWithWitness"
    assert report.witness == {
        "side": "right",
        "a": [0, 0],
        "b": [0, 1],
        "c": [0, 0],
    }
    assert replay_cancellation_witness(idem2_engine, "A", report.witness)


def test_cancellation_witness_replay_rejects_fakes(idem2_engine):
    fake = {"side": "right", "a": [0, 0], "b": [0, 0], "c": [0, 0]}
    assert not replay_cancellation_witness(idem2_engine, "A", fake)


def test_cancellativity_evidence_on_trivial(triv2_engine):
    report = cancellativity_probe(triv2_engine, CellSpec("M"), max_length=4)
    assert report.verdict == "EvidenceAtDepth"
    assert "commuting powers hold" in report.detail


def test_noetherian_exact_cases(triv2, idem2, z2group):
    def verdicts(sol):
        engine = WordEngine(sol)
        return {
            r.question: (r.verdict, r.witness)
            for r in noetherian_diagnosis(sol, engine, max_length=6)
        }

    bij = verdicts(triv2)
    assert bij["right-noetherian"] == ("Proved", {"right_noetherian": True})
    assert bij["left-noetherian"] == ("Proved", {"left_noetherian": True})

    idem = verdicts(idem2)
    assert idem["right-noetherian"][0] == "Proved"
    assert idem["right-noetherian"][1]["right_noetherian"] is False
    assert idem["right-noetherian"][1]["diagonal_image"] == [0, 1]

    grp = verdicts(z2group)
    assert grp["right-noetherian"][0] == "Proved"
    assert grp["right-noetherian"][1]["right_noetherian"] is True
    assert grp["right-noetherian"][1]["diagonal_image"] == [0]


def test_noetherian_reports_nil_cells(idem2, idem2_engine):
    by_question = {
        r.question: r for r in noetherian_diagnosis(idem2, idem2_engine, max_length=6)
    }
    assert by_question["nil-cell Y=[0]"].verdict == "RefutedWithWitness"
    assert by_question["nil-cell Y=[1]"].verdict == "RefutedWithWitness"
    assert by_question["nil-cell Y=[0, 1]"].verdict == "EvidenceAtDepth"


def test_archimedean_trivial(triv2, triv2_engine):
    arc = archimedean_components(triv2, triv2_engine, max_length=6)
    assert arc.count == 4
    assert arc.table_checks == {
        "well_defined": True,
        "commutative": True,
        "idempotent": True,
        "associative": True,
    }
    assert sorted(min(r.length for r in comp) for comp in arc.components) == [0, 1, 1, 2]
    # every truncated class is assigned to a component
    total = sum(triv2_engine.close("A", L).class_count for L in range(7))
    assert len(arc.component_of) == total


def test_archimedean_equal_divisor_sets_share_component(triv2, triv2_engine):
    arc = archimedean_components(triv2, triv2_engine, max_length=6)
    by_divisors: dict = {}
    for ref, comp in arc.component_of.items():
        if ref.length == 0:
            continue
        key = triv2_engine.left_divisors(ref)
        assert by_divisors.setdefault(key, comp) == comp


def test_archimedean_preconditions(abex, idem2):
    with pytest.raises(PreconditionUnmet):
        archimedean_components(abex)  # lambdas are not the identity
    with pytest.raises(PreconditionUnmet):
        archimedean_components(derived_solution(idem2))  # sigma not bijective
