"""Ideal chain, nilness and cancellativity probes, Noetherian diagnosis.

The multiplicative monoid carries a descending chain of ideals: level i
collects the classes left-divisible by at least i distinct generators.
Its layers decompose into cells indexed by a pair of subsets (Y, Z):
a class sits in cell (Y, Z) when its divisor set is exactly Y and its
lambda permutation carries Z onto Y.  Nilness of a diagonal cell modulo
the next ideal level is probed through the divisor criterion on the
additive side; cancellativity questions are probed by exhaustive search
over bounded lengths.  All verdicts are depth-honest: only the
idempotent and bijective fast paths are exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .engine import ClassRef, WordEngine
from .errors import PreconditionUnmet
from .reports import EVIDENCE, PROVED, REFUTED, DiagnosisReport
from .solution import (
    SolutionTable,
    diagonal_map,
    identity,
    is_bijective,
    is_idempotent,
    is_left_nondegenerate,
    perm_order,
)

SYM_CAP = 8  # permutations of Y are enumerated only up to this size


def mask_of(subset) -> int:
    m = 0
    for x in subset:
        m |= 1 << x
    return m


def subset_of(mask: int, n: int) -> tuple:
    return tuple(x for x in range(n) if mask >> x & 1)


# ---------------------------------------------------------------------------
# Chain and cells


@dataclass
class ChainAssignment:
    """Divisor data of every multiplicative class up to max_length.

    levels[L][cid] is the number of distinct generators dividing the
    class; the level-i ideal consists of the classes with levels >= i.
    """

    max_length: int
    masks: dict  # length -> array of divisor bitmasks per class
    levels: dict  # length -> list of divisor counts per class

    def level(self, ref: ClassRef) -> int:
        return self.levels[ref.length][ref.cid]

    def divisor_mask(self, ref: ClassRef) -> int:
        return int(self.masks[ref.length][ref.cid])


def ideal_chain(engine: WordEngine, max_length: int) -> ChainAssignment:
    """Assign every class of length <= max_length to its chain level and
    verify the two-sided ideal property one length up."""
    masks = {}
    levels = {}
    for L in range(max_length + 1):
        mk = engine.divisor_masks("M", L)
        masks[L] = mk
        levels[L] = [int(m).bit_count() for m in mk]
    for L in range(1, max_length):
        for cid, lev in enumerate(levels[L]):
            w = engine.canon_word(ClassRef("M", L, cid))
            for x in range(engine.sol.n):
                left = engine.class_of("M", (x,) + w)
                right = engine.class_of("M", w + (x,))
                if levels[L + 1][left.cid] < lev or levels[L + 1][right.cid] < lev:
                    raise PreconditionUnmet(
                        "chain level dropped under generator multiplication",
                        witness=(w, x),
                    )
    return ChainAssignment(max_length=max_length, masks=masks, levels=levels)


def yz_cell(engine: WordEngine, ref: ClassRef) -> tuple[int, int]:
    """The (Y, Z) cell of a multiplicative class, as bitmasks: Y is the
    divisor set and Z its preimage under the class lambda permutation."""
    y = int(engine.divisor_masks("M", ref.length)[ref.cid])
    lam = engine.lambda_of_class(ref)
    # lam carries Z onto Y, so Z = lam^-1(Y)
    inv = [0] * engine.sol.n
    for i, j in enumerate(lam):
        inv[j] = i
    z = mask_of(inv[t] for t in subset_of(y, engine.sol.n))
    return y, z


def diagonal_cell_members(
    engine: WordEngine, y_mask: int, max_length: int, socle_only: bool = False
) -> list[ClassRef]:
    """Classes in the diagonal cell of Y up to max_length: divisor set
    exactly Y and lambda carrying Y onto Y (identity lambda when
    socle_only)."""
    n = engine.sol.n
    ident = identity(n)
    ys = subset_of(y_mask, n)
    out = []
    for L in range(1, max_length + 1):
        mk = engine.divisor_masks("M", L)
        for cid in range(len(mk)):
            if int(mk[cid]) != y_mask:
                continue
            lam = engine.lambda_of_class(ClassRef("M", L, cid))
            if socle_only:
                if lam != ident:
                    continue
            elif mask_of(lam[t] for t in ys) != y_mask:
                continue
            out.append(ClassRef("M", L, cid))
    return out


def additive_cell_members(
    engine: WordEngine, y_mask: int, max_length: int
) -> list[ClassRef]:
    """Additive classes with divisor set exactly Y, up to max_length."""
    out = []
    for L in range(1, max_length + 1):
        mk = engine.divisor_masks("A", L)
        for cid in range(len(mk)):
            if int(mk[cid]) == y_mask:
                out.append(ClassRef("A", L, cid))
    return out


# ---------------------------------------------------------------------------
# Nilness via the divisor criterion


def lu_membership(
    engine: WordEngine,
    y: Sequence[int],
    d_bound: int = 4,
    max_length: int = 8,
) -> DiagnosisReport:
    """Is the diagonal cell of Y nil modulo the next ideal level?

    Nilness is detected exactly by a witness (d, f): if the additive
    class of d copies of (f(y_1) + ... + f(y_i)) acquires a divisor
    outside Y, the cell is nil.  Absence of a witness up to d_bound is
    evidence of non-nilness only; in that case the cell is additionally
    checked to be closed under the product at the probed lengths.
    """
    n = engine.sol.n
    ys = tuple(sorted(set(y)))
    if not ys or any(t < 0 or t >= n for t in ys):
        raise ValueError("Y must be a nonempty subset of the letters")
    i = len(ys)
    y_mask = mask_of(ys)
    perms = [ys] if i > SYM_CAP else [p for p in itertools.permutations(ys)]
    reached_d = 0
    for d in range(1, d_bound + 1):
        if n ** (d * i) > engine.node_budget:
            break
        reached_d = d
        for f in perms:
            word = tuple(f) * d
            ref = engine.class_of("A", word)
            mask = int(engine.divisor_masks("A", d * i)[ref.cid])
            if mask & ~y_mask:
                return DiagnosisReport(
                    question=f"nil-cell Y={list(ys)}",
                    verdict=REFUTED,
                    witness={
                        "d": d,
                        "f": list(f),
                        "word": list(word),
                        "divisors": subset_of(mask, n),
                    },
                    depth={"D": d_bound, "L": max_length},
                    detail="cell is nil modulo the next ideal level",
                )
    members = diagonal_cell_members(engine, y_mask, max_length)
    closed = True
    closure_witness = None
    for a in members:
        for b in members:
            if a.length + b.length > max_length:
                continue
            p = engine.product(a, b)
            py, pz = yz_cell(engine, p)
            if py != y_mask or pz != y_mask:
                closed = False
                closure_witness = (engine.canon_word(a), engine.canon_word(b))
                break
        if not closed:
            break
    return DiagnosisReport(
        question=f"nil-cell Y={list(ys)}",
        verdict=EVIDENCE,
        witness=closure_witness,
        depth={"D": reached_d, "L": max_length},
        detail=(
            f"no nil witness; cell has {len(members)} members up to length "
            f"{max_length} and is {'closed' if closed else 'NOT closed'} under the product"
        ),
    )


def nil_power_check(
    engine: WordEngine, member: ClassRef, power_bound: int = 4
) -> Optional[int]:
    """Least exponent at which the member's power leaves its chain
    level, or None if no power up to the bound (and budget) does."""
    base_level = int(engine.divisor_masks("M", member.length)[member.cid]).bit_count()
    for m in range(2, power_bound + 1):
        if engine.sol.n ** (member.length * m) > engine.node_budget:
            return None
        p = engine.power(member, m)
        lev = int(engine.divisor_masks("M", p.length)[p.cid]).bit_count()
        if lev > base_level:
            return m
    return None


# ---------------------------------------------------------------------------
# Periodic socle elements of a diagonal cell


def w_y_element(
    engine: WordEngine, y: Sequence[int], max_length: int = 8
) -> Optional[ClassRef]:
    """The identity-lambda power of the shortest member of Y's diagonal
    cell: for a member with permutation of order k, its k-th power has
    identity lambda.  Returns None when the cell has no member up to
    max_length or the power exceeds the budget."""
    ys = tuple(sorted(set(y)))
    members = diagonal_cell_members(engine, mask_of(ys), max_length)
    for a in members:
        lam = engine.lambda_of_class(a)
        k = perm_order(lam)
        if engine.sol.n ** (a.length * k) > engine.node_budget:
            continue
        w = engine.power(a, k)
        if engine.lambda_of_class(w) != identity(engine.sol.n):
            raise PreconditionUnmet("power lost its identity lambda", witness=a)
        return w
    return None


# ---------------------------------------------------------------------------
# Cancellativity probes


@dataclass(frozen=True)
class CellSpec:
    """An enumerable subsemigroup to probe.

    kind is one of:
      'M'           all multiplicative classes
      'A'           all additive classes
      'M_YY'        diagonal cell of Y
      'S_YY'        socle part of the diagonal cell
      'A_YY'        additive classes with divisor set Y
      plus a semigroup power d (products of exactly d members), and for
      'shifted' the set w^d * M_YY with w the periodic element of Y.
    """

    kind: str
    y: tuple = ()
    d: int = 1

    def label(self) -> str:
        base = self.kind if not self.y else f"{self.kind}[{list(self.y)}]"
        return base if self.d == 1 else f"{base}^{self.d}"


def cell_members(
    engine: WordEngine, cell: CellSpec, max_length: int
) -> list[ClassRef]:
    y_mask = mask_of(cell.y)
    if cell.kind == "M":
        base = [
            ClassRef("M", L, c)
            for L in range(1, max_length + 1)
            for c in range(engine.close("M", L).class_count)
        ]
    elif cell.kind == "A":
        base = [
            ClassRef("A", L, c)
            for L in range(1, max_length + 1)
            for c in range(engine.close("A", L).class_count)
        ]
    elif cell.kind == "M_YY":
        base = diagonal_cell_members(engine, y_mask, max_length)
    elif cell.kind == "S_YY":
        base = diagonal_cell_members(engine, y_mask, max_length, socle_only=True)
    elif cell.kind == "A_YY":
        base = additive_cell_members(engine, y_mask, max_length)
    elif cell.kind == "shifted":
        w = w_y_element(engine, cell.y, max_length)
        if w is None:
            return []
        out = []
        shift = w
        for _ in range(1, cell.d):
            if engine.sol.n ** (shift.length + w.length) > engine.node_budget:
                return []
            shift = engine.product(shift, w)
        for m in diagonal_cell_members(engine, y_mask, max_length):
            if shift.length + m.length <= max_length:
                out.append(engine.product(shift, m))
        return sorted(set(out), key=lambda r: (r.length, r.cid))
    else:
        raise ValueError(f"unknown cell kind {cell.kind!r}")
    if cell.d <= 1 or cell.kind == "shifted":
        return base
    current = list(base)
    for _ in range(cell.d - 1):
        nxt = set()
        for p in current:
            for b in base:
                if p.length + b.length <= max_length:
                    nxt.add(engine.product(p, b))
        current = sorted(nxt, key=lambda r: (r.length, r.cid))
    return current


def cancellativity_probe(
    engine: WordEngine,
    cell: CellSpec,
    max_length: int = 8,
    power_bound: int = 4,
) -> DiagnosisReport:
    """Search the cell exhaustively for a cancellation failure.

    A witness is a triple (a, b, c) of members with a != b and a*c =
    b*c (right) or c*a = c*b (left).  With no witness, the report is
    evidence at the probed depth, upgraded by the commuting-powers
    observation: for every probed pair some power N <= power_bound has
    a^N b^N = b^N a^N.
    """
    members = cell_members(engine, cell, max_length)
    by_len: dict = {}
    for m in members:
        by_len.setdefault(m.length, []).append(m)
    for la, group in sorted(by_len.items()):
        for ai in range(len(group)):
            for bi in range(ai + 1, len(group)):
                a, b = group[ai], group[bi]
                for c in members:
                    if engine.sol.n ** (la + c.length) > engine.node_budget:
                        continue
                    wa, wb, wc = (
                        engine.canon_word(a),
                        engine.canon_word(b),
                        engine.canon_word(c),
                    )
                    flavor = a.flavor
                    if engine.equal(flavor, wa + wc, wb + wc):
                        return DiagnosisReport(
                            question=f"cancellative {cell.label()}",
                            verdict=REFUTED,
                            witness={
                                "side": "right",
                                "a": list(wa),
                                "b": list(wb),
                                "c": list(wc),
                            },
                            depth={"L": max_length},
                        )
                    if engine.equal(flavor, wc + wa, wc + wb):
                        return DiagnosisReport(
                            question=f"cancellative {cell.label()}",
                            verdict=REFUTED,
                            witness={
                                "side": "left",
                                "a": list(wa),
                                "b": list(wb),
                                "c": list(wc),
                            },
                            depth={"L": max_length},
                        )
    commuting = _commuting_powers(engine, members, power_bound)
    return DiagnosisReport(
        question=f"cancellative {cell.label()}",
        verdict=EVIDENCE,
        depth={"L": max_length, "N": power_bound, "members": len(members)},
        detail=(
            "no cancellation failure; commuting powers hold for all probed pairs"
            if commuting
            else "no cancellation failure; commuting powers NOT confirmed"
        ),
    )


def _commuting_powers(
    engine: WordEngine, members: list[ClassRef], power_bound: int
) -> bool:
    for a in members:
        for b in members:
            if a.flavor != b.flavor:
                continue
            ok = False
            for m in range(1, power_bound + 1):
                if engine.sol.n ** (m * (a.length + b.length)) > engine.node_budget:
                    break
                wa = engine.canon_word(a) * m
                wb = engine.canon_word(b) * m
                if engine.equal(a.flavor, wa + wb, wb + wa):
                    ok = True
                    break
            if not ok:
                return False
    return True


def replay_cancellation_witness(engine: WordEngine, flavor: str, witness: dict) -> bool:
    """Re-verify a cancellation witness from its serialized form."""
    a = tuple(witness["a"])
    b = tuple(witness["b"])
    c = tuple(witness["c"])
    if engine.equal(flavor, a, b):
        return False
    if witness["side"] == "right":
        return engine.equal(flavor, a + c, b + c)
    return engine.equal(flavor, c + a, c + b)


# ---------------------------------------------------------------------------
# Noetherian diagnosis


def noetherian_diagnosis(
    sol: SolutionTable,
    engine: Optional[WordEngine] = None,
    max_length: int = 6,
    d_bound: int = 3,
    power_bound: int = 4,
    abelian_bound: int = 6,
) -> list[DiagnosisReport]:
    """Assemble the Noetherian evidence for the semigroup algebra of M.

    Exact verdicts exist on two fast paths: bijective solutions are
    always left and right Noetherian, and idempotent solutions are
    right Noetherian precisely when the diagonal image q(X) is a single
    letter.  Everything else is reported as bounded evidence: the
    abelian-additive sufficient condition at its bound, and per-subset
    cancellativity of the socle cells S_YY^d for the non-nil Y.
    """
    if not is_left_nondegenerate(sol):
        raise PreconditionUnmet("diagnosis needs a left non-degenerate solution")
    if engine is None:
        engine = WordEngine(sol)
    n = sol.n
    reports: list[DiagnosisReport] = []
    if is_idempotent(sol):
        image = sorted(set(diagonal_map(sol)))
        right = len(image) == 1
        reports.append(
            DiagnosisReport(
                question="right-noetherian",
                verdict=PROVED,
                witness={"diagonal_image": image, "right_noetherian": right},
                detail=(
                    "idempotent solution: right Noetherian iff the diagonal "
                    f"image is a single letter; here |image| = {len(image)}"
                ),
            )
        )
        reports.append(
            DiagnosisReport(
                question="left-noetherian",
                verdict=PROVED,
                witness={"left_noetherian": True},
                detail="idempotent left non-degenerate solutions are left Noetherian",
            )
        )
    elif is_bijective(sol):
        reports.append(
            DiagnosisReport(
                question="right-noetherian",
                verdict=PROVED,
                witness={"right_noetherian": True},
                detail="bijective left non-degenerate solutions are Noetherian",
            )
        )
        reports.append(
            DiagnosisReport(
                question="left-noetherian",
                verdict=PROVED,
                witness={"left_noetherian": True},
                detail="bijective left non-degenerate solutions are Noetherian",
            )
        )
    abelian = engine.is_abelian("A", abelian_bound)
    reports.append(
        DiagnosisReport(
            question="abelian-additive-sufficient",
            verdict=EVIDENCE,
            witness={"abelian_A": abelian},
            depth={"L": abelian_bound},
            detail=(
                "additive monoid abelian at the bound: sufficient for Noetherian"
                if abelian
                else "additive monoid not abelian"
            ),
        )
    )
    all_clean = True
    for size in range(1, n + 1):
        for ys in itertools.combinations(range(n), size):
            nil = lu_membership(engine, ys, d_bound=d_bound, max_length=max_length)
            reports.append(nil)
            if nil.verdict == REFUTED:
                continue
            best = None
            for d in range(1, d_bound + 1):
                probe = cancellativity_probe(
                    engine,
                    CellSpec("S_YY", ys, d),
                    max_length=max_length,
                    power_bound=power_bound,
                )
                probe.depth["d"] = d
                if probe.verdict == EVIDENCE:
                    best = probe
                    break
                best = probe
            if best is not None:
                reports.append(best)
                if best.verdict == REFUTED:
                    all_clean = False
    reports.append(
        DiagnosisReport(
            question="socle-cell-sufficient-condition",
            verdict=EVIDENCE,
            witness={"all_probed_cells_cancellative": all_clean},
            depth={"L": max_length, "D": d_bound},
            detail=(
                "sufficient condition satisfied at depth"
                if all_clean
                else "a socle cell failed cancellativity at every probed power"
            ),
        )
    )
    return reports


# ---------------------------------------------------------------------------
# Archimedean components


@dataclass
class ArchimedeanDecomposition:
    """Mutual-divisibility components of the additive monoid, truncated.

    components[i] lists the classes (over all lengths <= max_length)
    of component i, ordered by (length, cid); the semilattice table
    gives the component of a product of component representatives, or
    None when the product left the truncation.
    """

    max_length: int
    components: list
    component_of: dict
    semilattice: list
    cancellative: list
    table_checks: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.components)


def archimedean_components(
    sol: SolutionTable,
    engine: Optional[WordEngine] = None,
    max_length: int = 6,
    multiple_bound: Optional[int] = None,
) -> ArchimedeanDecomposition:
    """Archimedean decomposition of the additive monoid of a derived
    solution whose sigma maps are all bijective.

    Classes a, b are mutually divisible when a divides some multiple of
    b and vice versa; multiples are probed up to multiple_bound letters
    (twice the member truncation by default, inside the node budget),
    and components are the connected parts of that relation.  The
    induced product on components is tabulated and checked to be a
    semilattice.
    """
    from .solution import is_derived_shape, is_right_nondegenerate

    if not is_derived_shape(sol):
        raise PreconditionUnmet("expected a derived-shape solution (identity lambdas)")
    if not is_right_nondegenerate(sol):
        raise PreconditionUnmet("expected bijective sigma maps")
    if engine is None:
        engine = WordEngine(sol)
    if multiple_bound is None:
        multiple_bound = 2 * max_length
    n = engine.sol.n
    refs = [
        ClassRef("A", L, c)
        for L in range(max_length + 1)
        for c in range(engine.close("A", L).class_count)
    ]
    pair_cache: dict = {}

    def prefix_pairs(target_length: int, p: int) -> set:
        """All (target class, prefix class) pairs at the given lengths."""
        import numpy as np

        key = (target_length, p)
        if key not in pair_cache:
            clo_t = engine.close("A", target_length)
            clo_p = engine.close("A", p)
            idx = np.arange(n**target_length, dtype=np.int64)
            pref = clo_p.class_of[idx // (n ** (target_length - p))]
            pair_cache[key] = set(zip(clo_t.class_of.tolist(), pref.tolist()))
        return pair_cache[key]

    def divides_some_multiple(a: ClassRef, b: ClassRef) -> bool:
        if a.length == 0:
            return True
        if b.length == 0:
            return False
        m = 1
        while m * b.length <= multiple_bound and n ** (m * b.length) <= engine.node_budget:
            target_length = m * b.length
            if target_length >= a.length:
                target = engine.class_of("A", engine.canon_word(b) * m)
                if target_length == a.length:
                    if target.cid == a.cid:
                        return True
                elif (target.cid, a.cid) in prefix_pairs(target_length, a.length):
                    return True
            m += 1
        return False

    parent = list(range(len(refs)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, a in enumerate(refs):
        for j in range(i + 1, len(refs)):
            b = refs[j]
            if divides_some_multiple(a, b) and divides_some_multiple(b, a):
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups: dict = {}
    for i, a in enumerate(refs):
        groups.setdefault(find(i), []).append(a)
    components = [groups[k] for k in sorted(groups)]
    component_of = {}
    for ci, comp in enumerate(components):
        for a in comp:
            component_of[a] = ci
    reps = [comp[0] for comp in components]
    table = []
    for ra in reps:
        row = []
        for rb in reps:
            if ra.length + rb.length <= max_length:
                prod = engine.class_of(
                    "A", engine.canon_word(ra) + engine.canon_word(rb)
                )
                row.append(component_of[prod])
            else:
                row.append(None)
        table.append(row)
    checks = _semilattice_checks(engine, components, component_of, table, max_length)
    cancellative = []
    for ci, comp in enumerate(components):
        witness = None
        for a in comp:
            for b in comp:
                if a.length != b.length or a.cid >= b.cid:
                    continue
                for c in comp:
                    if c.length == 0 or a.length + c.length > max_length:
                        continue
                    wa, wb, wc = (
                        engine.canon_word(a),
                        engine.canon_word(b),
                        engine.canon_word(c),
                    )
                    if engine.equal("A", wa + wc, wb + wc) or engine.equal(
                        "A", wc + wa, wc + wb
                    ):
                        witness = {"a": list(wa), "b": list(wb), "c": list(wc)}
                        break
                if witness:
                    break
            if witness:
                break
        cancellative.append(
            DiagnosisReport(
                question=f"component-{ci}-cancellative",
                verdict=REFUTED if witness else EVIDENCE,
                witness=witness,
                depth={"L": max_length},
            )
        )
    return ArchimedeanDecomposition(
        max_length=max_length,
        components=components,
        component_of=component_of,
        semilattice=table,
        cancellative=cancellative,
        table_checks=checks,
    )


def _semilattice_checks(engine, components, component_of, table, max_length) -> dict:
    count = len(components)
    ok_defined = True
    for ca in range(count):
        for cb in range(count):
            seen = set()
            for a in components[ca]:
                for b in components[cb]:
                    if a.length == 0 or b.length == 0:
                        continue
                    if a.length + b.length > max_length:
                        continue
                    prod = engine.class_of(
                        "A", engine.canon_word(a) + engine.canon_word(b)
                    )
                    seen.add(component_of[prod])
            if len(seen) > 1:
                ok_defined = False
    commutative = all(
        table[i][j] == table[j][i]
        for i in range(count)
        for j in range(count)
        if table[i][j] is not None and table[j][i] is not None
    )
    idempotent = all(
        table[i][i] == i for i in range(count) if table[i][i] is not None
    )
    associative = True
    for i in range(count):
        for j in range(count):
            for k in range(count):
                ij = table[i][j]
                jk = table[j][k]
                if ij is None or jk is None:
                    continue
                left = table[ij][k]
                right = table[i][jk]
                if left is not None and right is not None and left != right:
                    associative = False
    return {
        "well_defined": ok_defined,
        "commutative": commutative,
        "idempotent": idempotent,
        "associative": associative,
    }
