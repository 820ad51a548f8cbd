"""Structural invariants: invariant subsets, Gelfand-Kirillov dimension,
prime spectrum of the additive monoid, cancellative congruences, the
orbit group of the diagonal element, and theorem-level cross-checks.

Everything exact here reduces to finite data: subsets of letters,
orbits under the one-letter sigma maps, and bounded word computations.
The growth invariant is the maximal number of sigma-orbits outside an
invariant subset; for involutive solutions it equals the number of
letters and the additive growth is exactly binomial.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Optional, Sequence

from .engine import ClassRef, WordEngine
from .errors import (
    CrossCheckFailure,
    InconsistentSolution,
    PreconditionUnmet,
    ResourceLimit,
)
from .ideals import CellSpec, cancellativity_probe, mask_of, subset_of
from .reports import EVIDENCE, PROVED, REFUTED, RESOURCE, DiagnosisReport
from .solution import (
    SolutionTable,
    action_closures,
    compose,
    identity,
    is_bijective,
    is_involutive,
    is_left_nondegenerate,
    sigma_tables,
)


# ---------------------------------------------------------------------------
# Invariant subsets and the growth dimension


@dataclass(frozen=True)
class InvariantSubset:
    """A proper subset Z of the letters with sigma_x(Z) inside Z and
    sigma_x(X - Z) inside X - Z for every letter x outside Z."""

    members: tuple

    def to_json(self) -> list:
        return list(self.members)


def invariant_subsets(sol: SolutionTable) -> list[InvariantSubset]:
    """All qualifying Z, the empty set included, X itself excluded.

    Certification is a direct check of both closure conditions for
    every x outside Z.
    """
    sig = sigma_tables(sol)
    n = sol.n
    out = []
    for mask in range(1 << n):
        if mask == (1 << n) - 1:
            continue
        ok = True
        for x in range(n):
            if mask >> x & 1:
                continue
            for y in range(n):
                inside = bool(mask >> y & 1)
                if bool(mask >> sig[x][y] & 1) != inside:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(InvariantSubset(members=subset_of(mask, n)))
    return out


def orbit_count(sol: SolutionTable, z: Sequence[int]) -> int:
    """Number of orbits of the letters outside Z under the monoid
    generated by the sigma maps of those letters.

    Because sigma_x sigma_y = sigma_{sigma_x(y)} sigma_x, one-step
    moves y -> sigma_x(y) already generate the orbit relation, so the
    orbits are the connected components of those edges.
    """
    zset = set(z)
    sig = sigma_tables(sol)
    outside = [x for x in range(sol.n) if x not in zset]
    if any(sig[x][y] in zset for x in outside for y in outside):
        raise PreconditionUnmet("subset is not invariant", witness=tuple(z))
    parent = {y: y for y in outside}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for x in outside:
        for y in outside:
            ra, rb = find(y), find(sig[x][y])
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    return len({find(y) for y in outside})


def gk_dimension(sol: SolutionTable) -> int:
    """max over invariant subsets Z of the orbit count outside Z."""
    if not is_left_nondegenerate(sol):
        raise PreconditionUnmet("growth dimension needs left non-degeneracy")
    return max(orbit_count(sol, z.members) for z in invariant_subsets(sol))


# ---------------------------------------------------------------------------
# Prime spectrum of the additive monoid


@dataclass
class SpectrumData:
    """The nonempty invariant subsets ordered by inclusion, each paired
    with its ideal: the classes left-divisible by a member of Z."""

    subsets: list
    hasse_edges: list

    def to_json(self) -> dict:
        return {
            "primes": [list(z) for z in self.subsets],
            "hasse": [[list(a), list(b)] for a, b in self.hasse_edges],
        }


def spec_additive(
    sol: SolutionTable,
    engine: Optional[WordEngine] = None,
    check_length: int = 3,
) -> SpectrumData:
    """Prime spectrum of the additive monoid via invariant subsets.

    The ideal attached to Z collects the classes whose divisor set
    meets Z; membership is verified to be inclusion-monotone in Z at
    the probed lengths, and restricting an ideal to the letters
    recovers Z.
    """
    if engine is None:
        engine = WordEngine(sol)
    n = sol.n
    subsets = [z.members for z in invariant_subsets(sol) if z.members]
    subsets.sort(key=lambda t: (len(t), t))
    masks = [mask_of(z) for z in subsets]
    for L in range(1, check_length + 1):
        div = engine.divisor_masks("A", L)
        for mi, zi in zip(masks, subsets):
            if L == 1:
                recovered = tuple(
                    x
                    for x in range(n)
                    if int(div[engine.class_of("A", (x,)).cid]) & mi
                )
                if recovered != zi:
                    raise InconsistentSolution(
                        "ideal restricted to letters is not Z", witness=zi
                    )
        for ia, ib in itertools.product(range(len(subsets)), repeat=2):
            if set(subsets[ia]) <= set(subsets[ib]):
                member_a = [c for c in range(len(div)) if int(div[c]) & masks[ia]]
                member_b = [c for c in range(len(div)) if int(div[c]) & masks[ib]]
                if not set(member_a) <= set(member_b):
                    raise InconsistentSolution(
                        "ideal membership is not inclusion-monotone",
                        witness=(subsets[ia], subsets[ib]),
                    )
    edges = []
    for a in subsets:
        for b in subsets:
            if a != b and set(a) < set(b):
                if not any(
                    set(a) < set(c) < set(b) for c in subsets if c not in (a, b)
                ):
                    edges.append((a, b))
    return SpectrumData(subsets=subsets, hasse_edges=edges)


def spectrum_dot(data: SpectrumData) -> str:
    """Hasse diagram of the spectrum in DOT format."""

    def node(z):
        return '"' + "{" + ",".join(map(str, z)) + "}" + '"'

    lines = ["digraph spec {"]
    for z in data.subsets:
        lines.append(f"  {node(z)};")
    for a, b in data.hasse_edges:
        lines.append(f"  {node(a)} -> {node(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def ideal_member(engine: WordEngine, z: Sequence[int], ref: ClassRef) -> bool:
    """Membership of a class in the ideal attached to Z."""
    mask = int(engine.divisor_masks(ref.flavor, ref.length)[ref.cid])
    return bool(mask & mask_of(z))


# ---------------------------------------------------------------------------
# Cancellative congruences


@dataclass
class CongruenceData:
    """The stabilized congruence eta at one word length.

    partition[cid] is the eta-block id of each class at the probed
    length; t is the stabilization witness: adding the padding element
    t times and t+1 times induce the same partition (or the partition
    is already the coarsest possible).
    """

    flavor: str
    length: int
    t: int
    partition: list
    stabilized: bool
    reached_t: int
    block_count: int

    def to_json(self) -> dict:
        return {
            "flavor": self.flavor,
            "length": self.length,
            "t": self.t,
            "partition": self.partition,
            "stabilized": self.stabilized,
            "reached_t": self.reached_t,
            "blocks": self.block_count,
        }


def _eta_partition(engine: WordEngine, length: int, z_word: tuple, t: int) -> list:
    """Blocks of length-`length` additive classes under a + t z = b + t z."""
    clo = engine.close("A", length)
    blocks: dict = {}
    out = []
    for cid in range(clo.class_count):
        w = engine.decode(int(clo.canon[cid]), length)
        target = engine.class_of("A", w + z_word * t)
        out.append(blocks.setdefault(target.cid, len(blocks)))
    return out


def cancellative_congruence_additive(
    sol: SolutionTable,
    engine: Optional[WordEngine] = None,
    length: int = 4,
    t_max: int = 3,
) -> CongruenceData:
    """The congruence a ~ b iff a + t z = b + t z at one length, with z
    the concatenation of v copies of every letter in order.

    t is raised until two consecutive partitions agree or the partition
    is the coarsest possible (a single block), whichever comes first;
    if the node budget runs out first the data is returned with
    stabilized=False and the reached t.
    """
    if engine is None:
        engine = WordEngine(sol)
    ac = engine.closures()
    z_word = tuple(
        letter for x in range(sol.n) for letter in (x,) * ac.v
    )
    previous = None
    reached = 0
    for t in range(1, t_max + 2):
        needed = sol.n ** (length + t * len(z_word))
        if needed > engine.node_budget:
            break
        part = _eta_partition(engine, length, z_word, t)
        reached = t
        if max(part) == 0 and length > 0:
            return CongruenceData(
                flavor="A",
                length=length,
                t=t,
                partition=part,
                stabilized=True,
                reached_t=t,
                block_count=1,
            )
        if previous is not None and part == previous[1]:
            return CongruenceData(
                flavor="A",
                length=length,
                t=previous[0],
                partition=previous[1],
                stabilized=True,
                reached_t=t,
                block_count=max(previous[1]) + 1,
            )
        previous = (t, part)
    if previous is None:
        raise ResourceLimit(
            f"eta at length {length} needs words of length "
            f"{length + len(z_word)}",
            needed=sol.n ** (length + len(z_word)),
            budget=engine.node_budget,
        )
    return CongruenceData(
        flavor="A",
        length=length,
        t=previous[0],
        partition=previous[1],
        stabilized=False,
        reached_t=reached,
        block_count=max(previous[1]) + 1,
    )


def quotient_right_cancellative(
    sol: SolutionTable,
    engine: Optional[WordEngine] = None,
    max_length: int = 3,
    t_max: int = 3,
) -> DiagnosisReport:
    """Generator-cancellativity of the eta quotient at probed lengths.

    For every pair of classes a, b at each length and every generator
    x: if a + x and b + x are eta-related one length up, a and b must
    be eta-related.  Generator cancellation at every length implies
    cancellation by arbitrary elements within the truncation.
    """
    if engine is None:
        engine = WordEngine(sol)
    data: dict = {}

    def eta(L: int) -> CongruenceData:
        if L not in data:
            data[L] = cancellative_congruence_additive(
                sol, engine, length=L, t_max=t_max
            )
        return data[L]

    def out_of_budget() -> DiagnosisReport:
        return DiagnosisReport(
            question="eta-quotient-right-cancellative",
            verdict=RESOURCE,
            depth={"L": max_length, "reached": max(data) if data else 0},
        )

    for L in range(1, max_length + 1):
        try:
            part = eta(L).partition
        except ResourceLimit:
            return out_of_budget()
        clo = engine.close("A", L)
        pairs = [
            (a, b)
            for a in range(clo.class_count)
            for b in range(a + 1, clo.class_count)
            if part[a] != part[b]
        ]
        if not pairs:
            continue
        try:
            part_up = eta(L + 1).partition
        except ResourceLimit:
            return out_of_budget()
        for a, b in pairs:
            wa = engine.decode(int(clo.canon[a]), L)
            wb = engine.decode(int(clo.canon[b]), L)
            for x in range(sol.n):
                ca = engine.class_of("A", wa + (x,))
                cb = engine.class_of("A", wb + (x,))
                if part_up[ca.cid] == part_up[cb.cid]:
                    return DiagnosisReport(
                        question="eta-quotient-right-cancellative",
                        verdict=REFUTED,
                        witness={"a": list(wa), "b": list(wb), "x": x},
                        depth={"L": max_length},
                    )
    stabilized = all(data[L].stabilized for L in data)
    return DiagnosisReport(
        question="eta-quotient-right-cancellative",
        verdict=EVIDENCE,
        depth={
            "L": max_length,
            "t": max((d.t for d in data.values()), default=0),
        },
        detail=(
            "generator cancellation holds at all probed lengths; eta "
            + ("stabilized" if stabilized else "NOT stabilized within budget")
        ),
    )


def cancellative_congruence_multiplicative(
    sol: SolutionTable,
    engine: Optional[WordEngine] = None,
    length: int = 4,
    t_max: int = 3,
) -> CongruenceData:
    """The multiplicative congruence: classes are related when their
    cocycle images are eta-related and their lambda permutations agree.

    For bijective non-degenerate solutions the lambda condition is
    implied by the additive one; this co-occurrence is verified and a
    violation raises CrossCheckFailure.
    """
    if engine is None:
        engine = WordEngine(sol)
    add = cancellative_congruence_additive(sol, engine, length=length, t_max=t_max)
    clo = engine.close("M", length)
    blocks: dict = {}
    part = []
    check_bijective = is_bijective(sol) and is_left_nondegenerate(sol)
    seen_lambda: dict = {}
    for cid in range(clo.class_count):
        ref = ClassRef("M", length, cid)
        a_ref = engine.cocycle_class(ref)
        lam = engine.lambda_of_class(ref)
        key = (add.partition[a_ref.cid], lam)
        part.append(blocks.setdefault(key, len(blocks)))
        if check_bijective and add.stabilized:
            prev = seen_lambda.setdefault(add.partition[a_ref.cid], lam)
            if prev != lam:
                raise CrossCheckFailure(
                    "eta-related classes with distinct lambda on a bijective solution",
                    witness={"length": length, "cid": cid},
                )
    return CongruenceData(
        flavor="M",
        length=length,
        t=add.t,
        partition=part,
        stabilized=add.stabilized,
        reached_t=add.reached_t,
        block_count=max(part) + 1 if part else 0,
    )


# ---------------------------------------------------------------------------
# Retraction of derived solutions


def bijective_retract(sol: SolutionTable) -> tuple[SolutionTable, tuple]:
    """Quotient of a derived-shape solution by the kernel of the sigma
    map of the diagonal padding element.

    With z the concatenation of v copies of each letter, sigma_z is the
    composition of the one-letter sigma powers; letters are identified
    when sigma_z agrees on them.  The induced solution has bijective
    sigma maps; failure of well-definedness or bijectivity raises.
    """
    from .solution import is_derived_shape

    if not is_derived_shape(sol):
        raise PreconditionUnmet("expected a derived-shape solution (identity lambdas)")
    sig = sigma_tables(sol)
    n = sol.n
    ac = action_closures(sol)
    sigma_z = identity(n)
    for x in range(n):
        power = identity(n)
        for _ in range(ac.v):
            power = compose(sig[x], power)
        sigma_z = compose(power, sigma_z)
    reps: dict = {}
    proj = []
    for x in range(n):
        proj.append(reps.setdefault(sigma_z[x], len(reps)))
    m = len(reps)
    sig_bar = [[None] * m for _ in range(m)]
    for y in range(n):
        for x in range(n):
            img = proj[sig[y][x]]
            cur = sig_bar[proj[y]][proj[x]]
            if cur is None:
                sig_bar[proj[y]][proj[x]] = img
            elif cur != img:
                raise InconsistentSolution(
                    "retract sigma is not well defined", witness=(y, x)
                )
    from .solution import from_components

    out = from_components(
        lam=[identity(m)] * m,
        rho=[tuple(sig_bar[y]) for y in range(m)],
    )
    if not is_bijective(out):
        raise InconsistentSolution("retract is not bijective")
    return out, tuple(proj)


# ---------------------------------------------------------------------------
# The orbit group of the diagonal element


@dataclass
class OrbitGroupData:
    """Orbit of the idempotent-lambda power of the diagonal padding
    element under the lambda group, with its induced product table."""

    base: ClassRef
    orbit: list
    table: list
    certified: bool
    certificate_failure: Optional[str] = None

    @property
    def size(self) -> int:
        return len(self.orbit)

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "certified": self.certified,
            "failure": self.certificate_failure,
        }


def omega_lambda(
    sol: SolutionTable,
    engine: Optional[WordEngine] = None,
    max_length: int = 8,
    require_evidence: bool = True,
) -> OrbitGroupData:
    """The orbit of e q(z) under the lambda group with the product
    z * t = lambda_z(t).

    Precondition: no cancellation counterexample at the probed depth
    (the group structure is only meaningful for cancellative monoids).
    The orbit element e q(z) is computed as the additive image of the
    e-th power of the element denoted by z; the table is certified to
    be a group table (closure, identity, associativity, inverses).  A
    failed certification is recomputed once with the exponent doubled
    - the construction tolerates any multiple of v - before the data
    is returned uncertified.
    """
    if engine is None:
        engine = WordEngine(sol)
    if require_evidence:
        probe = cancellativity_probe(
            engine, CellSpec("M"), max_length=min(4, max_length), power_bound=2
        )
        if probe.verdict == REFUTED:
            raise PreconditionUnmet(
                "multiplicative monoid is provably non-cancellative",
                witness=probe.witness,
            )
    data = _omega_at_scale(sol, engine, 1)
    if not data.certified:
        try:
            retry = _omega_at_scale(sol, engine, 2)
        except ResourceLimit:
            return data
        return retry
    return data


def _omega_at_scale(
    sol: SolutionTable, engine: WordEngine, scale: int
) -> OrbitGroupData:
    ac = engine.closures()
    n = sol.n
    z_word = tuple(letter for x in range(n) for letter in (x,) * (ac.v * scale))
    lam_z = engine.lambda_of_additive_word(z_word)
    word = ()
    g = identity(n)
    for _ in range(ac.e):
        word = word + tuple(g[t] for t in z_word)
        g = compose(g, lam_z)
    if g != identity(n):
        raise InconsistentSolution("lambda of the padded power is not trivial")
    needed = n ** len(word)
    if needed > engine.node_budget:
        raise ResourceLimit(
            f"orbit element needs words of length {len(word)}",
            needed=needed,
            budget=engine.node_budget,
        )
    base = engine.class_of("A", word)
    if engine.lambda_of_additive_word(word) != identity(n):
        raise InconsistentSolution("orbit base element has nontrivial lambda")
    orbit = [base]
    seen = {base}
    queue = [base]
    while queue:
        cur = queue.pop(0)
        for x in range(n):
            img = engine.apply_letter_map(sol.lam[x], cur)
            if img not in seen:
                seen.add(img)
                orbit.append(img)
                queue.append(img)
    table = []
    certified = True
    failure = None
    for za in orbit:
        lam_a = engine.lambda_of_additive_word(engine.canon_word(za))
        row = []
        for tb in orbit:
            img = engine.apply_letter_map(lam_a, tb)
            if img not in seen:
                certified = False
                failure = "orbit is not closed under the product"
                row.append(None)
            else:
                row.append(orbit.index(img))
        table.append(row)
    if certified:
        ident = orbit.index(base)
        for i, row in enumerate(table):
            if table[ident][i] != i or row[ident] != i:
                certified = False
                failure = "base element is not an identity"
        if certified:
            for i in range(len(orbit)):
                for j in range(len(orbit)):
                    for k in range(len(orbit)):
                        if table[table[i][j]][k] != table[i][table[j][k]]:
                            certified = False
                            failure = "product is not associative"
        if certified:
            for i, row in enumerate(table):
                if sorted(row) != list(range(len(orbit))):
                    certified = False
                    failure = "a row is not a bijection"
    return OrbitGroupData(
        base=base,
        orbit=orbit,
        table=table,
        certified=certified,
        certificate_failure=failure,
    )


# ---------------------------------------------------------------------------
# Theorem-level cross-checks


def theorem_cross_checks(
    sol: SolutionTable,
    engine: Optional[WordEngine] = None,
    max_length: int = 6,
) -> list[DiagnosisReport]:
    """Exact consistency checks tying the invariants together.

    involutive <=> growth dimension equals the letter count; involutive
    solutions admit no cancellation counterexample and have exactly
    binomial additive growth.  A violation of an exact check raises
    CrossCheckFailure, since it falsifies the implementation.
    """
    if engine is None:
        engine = WordEngine(sol)
    n = sol.n
    reports = []
    inv = is_involutive(sol)
    gk = gk_dimension(sol)
    if inv != (gk == n):
        raise CrossCheckFailure(
            "involutivity and full growth dimension must co-occur",
            witness={"involutive": inv, "gk": gk, "table": sol.to_json()},
        )
    reports.append(
        DiagnosisReport(
            question="involutive-iff-full-growth",
            verdict=PROVED,
            witness={"involutive": inv, "gk": gk},
        )
    )
    if inv:
        try:
            probe = cancellativity_probe(
                engine, CellSpec("M"), max_length=min(4, max_length), power_bound=2
            )
        except ResourceLimit:
            probe = None
        if probe is not None and probe.verdict == REFUTED:
            raise CrossCheckFailure(
                "cancellation counterexample on an involutive solution",
                witness=probe.witness,
            )
        growth = []
        for L in range(max_length + 1):
            if n**L > engine.node_budget:
                break
            growth.append(engine.close("A", L).class_count)
        for L, h in enumerate(growth):
            if h != comb(L + n - 1, n - 1):
                raise CrossCheckFailure(
                    "involutive growth is not binomial",
                    witness={"L": L, "h": h},
                )
        reports.append(
            DiagnosisReport(
                question="involutive-binomial-growth",
                verdict=PROVED,
                depth={"L": len(growth) - 1},
                witness={"growth": growth},
            )
        )
    else:
        growth = []
        for L in range(max_length + 1):
            if n**L > engine.node_budget:
                break
            growth.append(engine.close("A", L).class_count)
        bound = max(
            (h / max(1, L) ** max(0, gk - 1) for L, h in enumerate(growth) if L > 0),
            default=0.0,
        )
        reports.append(
            DiagnosisReport(
                question="growth-exponent-fit",
                verdict=EVIDENCE,
                depth={"L": len(growth) - 1},
                witness={"growth": growth, "gk": gk, "coefficient": round(bound, 3)},
                detail="h(L) <= C L^(gk-1) fit reported, not asserted",
            )
        )
    return reports
