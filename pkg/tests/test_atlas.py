from __future__ import annotations

import itertools

import pytest

from ybx import (
    CrossCheckFailure,
    AtlasSpec,
    census,
    census_csv,
    cross_enumeration_check,
    enumerate_solutions,
    from_pairs,
    isomorphism_representative,
    relabel,
    validate_yang_baxter,
)
from ybx.atlas import CHECKS, FILTERS, flat_table


def _from_flat(digits: str):
    bits = [int(c) for c in digits]
    n = 2
    pairs = [
        [[bits[(x * n + y) * 2], bits[(x * n + y) * 2 + 1]] for y in range(n)]
        for x in range(n)
    ]
    return from_pairs(n, pairs)


def test_spec_validation():
    with pytest.raises(ValueError):
        AtlasSpec(3, "general")  # 2^32 tables is out of scope
    with pytest.raises(ValueError):
        AtlasSpec(2, "lnd", filters=("no-such-filter",))
    with pytest.raises(ValueError):
        AtlasSpec(2, "everything")


def test_enumeration_counts():
    assert len(enumerate_solutions(AtlasSpec(1, "general"))) == 1
    assert len(enumerate_solutions(AtlasSpec(2, "general"))) == 43
    assert len(enumerate_solutions(AtlasSpec(2, "lnd"))) == 14
    assert len(enumerate_solutions(AtlasSpec(2, "fixed_rho"))) == 22
    assert len(enumerate_solutions(AtlasSpec(2, "lnd", dedup=True))) == 10


def test_enumeration_is_sound_and_sorted():
    sols = enumerate_solutions(AtlasSpec(2, "general"))
    tables = [flat_table(s) for s in sols]
    assert tables == sorted(tables)
    assert len(set(tables)) == len(tables)
    assert all(validate_yang_baxter(s) for s in sols)


def test_enumeration_matches_brute_force():
    # independent pure-python sweep over all 2^8 tables
    expected = set()
    for bits in itertools.product(range(2), repeat=8):
        r = [
            [
                (bits[(x * 2 + y) * 2], bits[(x * 2 + y) * 2 + 1])
                for y in range(2)
            ]
            for x in range(2)
        ]
        ok = True
        for x in range(2):
            for y in range(2):
                for z in range(2):
                    a, b = r[x][y]
                    c, d = r[b][z]
                    e, f = r[a][c]
                    u, v = r[y][z]
                    p, q = r[x][u]
                    s, t = r[q][v]
                    if (e, f, d) != (p, s, t):
                        ok = False
        if ok:
            expected.add(bits)
    got = {flat_table(s) for s in enumerate_solutions(AtlasSpec(2, "general"))}
    assert got == expected


def test_filters():
    inv = enumerate_solutions(
        AtlasSpec(2, "lnd", filters=("involutive", "nondegenerate"))
    )
    assert ["".join(map(str, flat_table(s))) for s in inv] == [
        "00100111",
        "11011000",
    ]
    idem = enumerate_solutions(AtlasSpec(2, "lnd", filters=("idempotent",)))
    assert len(idem) == 4
    assert set(FILTERS) >= {"lnd", "rnd", "bijective", "involutive", "idempotent"}


def test_isomorphism_representative_is_invariant():
    for sol in enumerate_solutions(AtlasSpec(2, "lnd")):
        rep = isomorphism_representative(sol)
        assert isomorphism_representative(relabel(sol, (1, 0))) == rep


def test_dedup_keeps_representatives():
    full = enumerate_solutions(AtlasSpec(2, "lnd"))
    reps = enumerate_solutions(AtlasSpec(2, "lnd", dedup=True))
    rep_tables = {flat_table(s) for s in reps}
    assert all(flat_table(s) == isomorphism_representative(s) for s in reps)
    assert {isomorphism_representative(s) for s in full} == rep_tables


def test_cross_enumeration_check():
    cross_enumeration_check(2)


def test_census_exact_checks():
    result = census(AtlasSpec(2, "lnd"), checks=("involutive-gk", "r1", "derived"))
    assert result.aggregate["total"] == 14
    assert result.aggregate["by_check"] == {
        "involutive-gk": {"Proved": 14},
        "r1": {"Proved": 14},
        "derived": {"Proved": 14},
    }
    for row in result.rows:
        assert row["left_nondegenerate"]
        assert {"k", "e", "e_sigma", "v"} <= set(row)


def test_census_eta_and_zcomm():
    result = census(AtlasSpec(2, "lnd"), checks=("eta", "zcomm"))
    assert result.aggregate["by_check"]["eta"] == {"EvidenceAtDepth": 14}
    assert result.aggregate["by_check"]["zcomm"] == {
        "Proved": 13,
        "ResourceLimit": 1,
    }
    blocked = [
        row for row in result.rows if row["checks"]["zcomm"]["verdict"] == "ResourceLimit"
    ]
    assert len(blocked) == 1 and blocked[0]["v"] == 8


def test_census_omega_and_archimedean():
    result = census(AtlasSpec(2, "lnd"), checks=("omega", "archimedean"))
    omega = result.aggregate["by_check"]["omega"]
    assert omega == {"Proved": 4, "PreconditionUnmet": 10}
    arch = result.aggregate["by_check"]["archimedean"]
    assert arch == {"Proved": 4, "PreconditionUnmet": 10}
    sizes = sorted(
        row["checks"]["omega"]["size"]
        for row in result.rows
        if row["checks"]["omega"]["verdict"] == "Proved"
    )
    assert sizes == [1, 1, 2, 2]
    for row in result.rows:
        if row["checks"]["archimedean"]["verdict"] == "Proved":
            assert row["bijective"]


def test_census_on_explicit_solutions(triv2):
    result = census(
        AtlasSpec(2, "lnd"), checks=("involutive-gk",), solutions=[triv2]
    )
    assert result.aggregate["total"] == 1
    assert result.rows[0]["involutive"]


def test_census_csv_shape():
    result = census(AtlasSpec(2, "lnd"), checks=("involutive-gk",))
    text = census_csv(result)
    lines = text.strip().split("\n")
    assert len(lines) == 15
    header = lines[0].split(",")
    assert header[:4] == ["index", "hash", "n", "table"]
    assert "check:involutive-gk" in header
    # byte-determinism of the census serialization
    assert text == census_csv(census(AtlasSpec(2, "lnd"), checks=("involutive-gk",)))


def test_census_replay_on_cross_check_failure(tmp_path, monkeypatch):
    def exploding(sol, engine, cfg):
        raise CrossCheckFailure("synthetic failure", witness={"table": "x"})

    monkeypatch.setitem(CHECKS, "involutive-gk", exploding)
    with pytest.raises(CrossCheckFailure):
        census(
            AtlasSpec(2, "lnd"),
            checks=("involutive-gk",),
            replay_dir=str(tmp_path),
        )
    replays = list(tmp_path.glob("replay-*.json"))
    assert len(replays) == 1
    body = replays[0].read_text()
    assert "synthetic failure" in body and "solution" in body


def test_noteworthy_omega_tables():
    from ybx import WordEngine, omega_lambda

    for digits in ("00101000", "11010111"):
        sol = _from_flat(digits)
        assert validate_yang_baxter(sol)
        data = omega_lambda(sol, WordEngine(sol))
        assert data.size == 2
        assert data.certified
