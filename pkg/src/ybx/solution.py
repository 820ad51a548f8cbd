"""Finite set-theoretic Yang-Baxter maps as explicit tables.

A solution on X = {0, ..., n-1} is a map r : X x X -> X x X subject to
the braid identity

    (r x id)(id x r)(r x id) = (id x r)(r x id)(id x r)

on X^3.  Tables are stored componentwise as r(x, y) = (lam[x][y],
rho[y][x]); everything else in the package (derived sigma maps, the
diagonal map, permutation closures, quotients and restrictions) is
computed from these tables alone.  Letters are 0-indexed throughout;
1-indexed sources must be translated at the I/O boundary.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .errors import (
    AxiomViolation,
    InconsistentSolution,
    NotClosed,
    PreconditionUnmet,
)

Perm = tuple  # a map {0..n-1} -> {0..n-1} as a tuple of images


def compose(f: Sequence[int], g: Sequence[int]) -> Perm:
    """Function composition f o g (g applied first)."""
    return tuple(f[g[i]] for i in range(len(g)))


def identity(n: int) -> Perm:
    return tuple(range(n))


def invert(p: Sequence[int]) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def is_permutation(t: Sequence[int]) -> bool:
    return sorted(t) == list(range(len(t)))


def perm_order(p: Sequence[int]) -> int:
    n = len(p)
    e = identity(n)
    q = tuple(p)
    k = 1
    while q != e:
        q = compose(q, p)
        k += 1
    return k


def map_tail_period(f: Sequence[int]) -> tuple[int, int]:
    """Eventual behaviour of iteration: least (tail, period) with
    f^(tail + period) = f^tail."""
    seen = {}
    q = tuple(f)
    i = 1
    while q not in seen:
        seen[q] = i
        q = compose(q, f)
        i += 1
    first = seen[q]
    return first, i - first


def idempotent_exponent(f: Sequence[int]) -> int:
    """Least p >= 1 with f^(2p) = f^p."""
    tail, period = map_tail_period(f)
    p = period
    while p < tail:
        p += period
    return p


@dataclass(frozen=True)
class SolutionTable:
    """A map r on pairs of {0..n-1}, stored as nested tuples.

    r[x][y] == (u, v) means r(x, y) = (u, v), i.e. lam_x(y) = u and
    rho_y(x) = v.  Instances are immutable and hashable; the structural
    hash only depends on (n, r).
    """

    n: int
    r: tuple

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError("need at least one element")
        if len(self.r) != self.n or any(len(row) != self.n for row in self.r):
            raise ValueError("table shape must be n x n")
        for x in range(self.n):
            for y in range(self.n):
                u, v = self.r[x][y]
                if not (0 <= u < self.n and 0 <= v < self.n):
                    raise ValueError(f"entry r({x},{y}) out of range")

    @cached_property
    def lam(self) -> tuple:
        """lam[x] is the map y -> first component of r(x, y)."""
        return tuple(
            tuple(self.r[x][y][0] for y in range(self.n)) for x in range(self.n)
        )

    @cached_property
    def rho(self) -> tuple:
        """rho[y] is the map x -> second component of r(x, y)."""
        return tuple(
            tuple(self.r[x][y][1] for x in range(self.n)) for y in range(self.n)
        )

    @cached_property
    def table_hash(self) -> str:
        blob = json.dumps({"n": self.n, "r": self.r}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def apply(self, x: int, y: int) -> tuple[int, int]:
        return self.r[x][y]

    def to_json(self) -> dict:
        return {"n": self.n, "r": [[list(p) for p in row] for row in self.r]}


def from_components(lam: Sequence[Sequence[int]], rho: Sequence[Sequence[int]]) -> SolutionTable:
    """Build a table from lam[x][y] = lam_x(y) and rho[y][x] = rho_y(x)."""
    n = len(lam)
    r = tuple(
        tuple((lam[x][y], rho[y][x]) for y in range(n)) for x in range(n)
    )
    return SolutionTable(n=n, r=r)


def from_pairs(n: int, pairs: Sequence[Sequence[Sequence[int]]]) -> SolutionTable:
    r = tuple(tuple((int(p[0]), int(p[1])) for p in row) for row in pairs)
    return SolutionTable(n=n, r=r)


def load_solution(data) -> SolutionTable:
    """Load a table from parsed JSON.

    Accepted shapes: {"n": N, "r": [[[u,v], ...], ...]} with r[x][y] =
    [u, v], or {"n": N, "lambda": [...], "rho": [...]} with lambda[x][y]
    = lam_x(y) and rho[y][x] = rho_y(x).  Supplying both r and the
    component maps is accepted only when they agree.
    """
    if not isinstance(data, dict) or "n" not in data:
        raise ValueError("solution JSON must be an object with an 'n' field")
    n = int(data["n"])
    sol_r = None
    sol_lr = None
    if "r" in data:
        sol_r = from_pairs(n, data["r"])
    if "lambda" in data or "rho" in data:
        if "lambda" not in data or "rho" not in data:
            raise ValueError("component form needs both 'lambda' and 'rho'")
        lam = [[int(v) for v in row] for row in data["lambda"]]
        rho = [[int(v) for v in row] for row in data["rho"]]
        if len(lam) != n or len(rho) != n:
            raise ValueError("component maps must have n rows")
        sol_lr = from_components(lam, rho)
    if sol_r is not None and sol_lr is not None:
        if sol_r.r != sol_lr.r:
            raise ValueError("'r' disagrees with 'lambda'/'rho' components")
    sol = sol_r if sol_r is not None else sol_lr
    if sol is None:
        raise ValueError("solution JSON needs 'r' or 'lambda'/'rho'")
    return sol


def loads_solution(text: str) -> SolutionTable:
    return load_solution(json.loads(text))


# ---------------------------------------------------------------------------
# Validation and classification


def yang_baxter_witness(sol: SolutionTable) -> Optional[tuple[int, int, int]]:
    """First triple (x, y, z) violating the braid identity, or None."""
    r = sol.r
    for x in range(sol.n):
        for y in range(sol.n):
            for z in range(sol.n):
                a, b = r[x][y]
                c, d = r[b][z]
                e, f = r[a][c]
                u, v = r[y][z]
                p, q = r[x][u]
                s, t = r[q][v]
                if (e, f, d) != (p, s, t):
                    return (x, y, z)
    return None


def validate_yang_baxter(sol: SolutionTable) -> bool:
    return yang_baxter_witness(sol) is None


def is_left_nondegenerate(sol: SolutionTable) -> bool:
    return all(is_permutation(sol.lam[x]) for x in range(sol.n))


def is_right_nondegenerate(sol: SolutionTable) -> bool:
    return all(is_permutation(sol.rho[y]) for y in range(sol.n))


def is_bijective(sol: SolutionTable) -> bool:
    seen = set()
    for x in range(sol.n):
        for y in range(sol.n):
            seen.add(sol.r[x][y])
    return len(seen) == sol.n * sol.n


def is_involutive(sol: SolutionTable) -> bool:
    for x in range(sol.n):
        for y in range(sol.n):
            u, v = sol.r[x][y]
            if sol.r[u][v] != (x, y):
                return False
    return True


def is_idempotent(sol: SolutionTable) -> bool:
    for x in range(sol.n):
        for y in range(sol.n):
            u, v = sol.r[x][y]
            if sol.r[u][v] != (u, v):
                return False
    return True


def is_fixed_rho(sol: SolutionTable) -> bool:
    return all(sol.rho[y] == sol.rho[0] for y in range(sol.n))


@dataclass(frozen=True)
class PropertyFlags:
    is_solution: bool
    left_nondegenerate: bool
    right_nondegenerate: bool
    bijective: bool
    involutive: bool
    idempotent: bool
    fixed_rho: bool
    abelian_A: Optional[bool]
    abelian_M: Optional[bool]
    abelian_bound: int

    def consistent(self) -> bool:
        """Finite-case implications between the exact flags."""
        if self.involutive and not self.bijective:
            return False
        if self.is_solution and self.left_nondegenerate:
            if self.bijective != self.right_nondegenerate:
                return False
        return True

    def to_json(self) -> dict:
        return {
            "is_solution": self.is_solution,
            "left_nondegenerate": self.left_nondegenerate,
            "right_nondegenerate": self.right_nondegenerate,
            "bijective": self.bijective,
            "involutive": self.involutive,
            "idempotent": self.idempotent,
            "fixed_rho": self.fixed_rho,
            "abelian_A": self.abelian_A,
            "abelian_M": self.abelian_M,
            "abelian_bound": self.abelian_bound,
        }


def classify(sol: SolutionTable, abelian_bound: int = 6) -> PropertyFlags:
    """Tabulate the decidable properties of a table.

    Every flag except the abelian ones is exact.  Commutativity of the
    monoids M and A is checked on all pairs of classes whose lengths sum
    to at most abelian_bound, and is reported together with that bound;
    for a degenerate table the A flag is None (no sigma maps exist).
    """
    if abelian_bound < 2:
        raise ValueError("abelian bound below 2 checks nothing")
    ok = validate_yang_baxter(sol)
    lnd = is_left_nondegenerate(sol)
    abel_a = abel_m = None
    if ok:
        from .engine import WordEngine

        eng = WordEngine(sol)
        abel_m = eng.is_abelian("M", abelian_bound)
        if lnd:
            abel_a = eng.is_abelian("A", abelian_bound)
    return PropertyFlags(
        is_solution=ok,
        left_nondegenerate=lnd,
        right_nondegenerate=is_right_nondegenerate(sol),
        bijective=is_bijective(sol),
        involutive=is_involutive(sol),
        idempotent=is_idempotent(sol),
        fixed_rho=is_fixed_rho(sol),
        abelian_A=abel_a,
        abelian_M=abel_m,
        abelian_bound=abelian_bound,
    )


# ---------------------------------------------------------------------------
# Derived solution and action closures


def sigma_tables(sol: SolutionTable) -> tuple:
    """The maps sigma_y(x) = lam_y(rho_{lam_x^-1(y)}(x)).

    Requires all lam_x bijective.  sigma_y drives the defining relation
    of the additive monoid: x + y = y + sigma_y(x).
    """
    if not is_left_nondegenerate(sol):
        raise PreconditionUnmet("sigma maps need bijective lambda maps")
    n = sol.n
    lam_inv = [invert(sol.lam[x]) for x in range(n)]
    return tuple(
        tuple(sol.lam[y][sol.rho[lam_inv[x][y]][x]] for x in range(n))
        for y in range(n)
    )


def derived_solution(sol: SolutionTable) -> SolutionTable:
    """The left derived solution s(x, y) = (y, sigma_y(x)).

    The result always satisfies the braid identity when the input does;
    this is verified on construction.
    """
    sig = sigma_tables(sol)
    n = sol.n
    s = from_components(
        lam=[identity(n)] * n,
        rho=[list(sig[y]) for y in range(n)],
    )
    w = yang_baxter_witness(s)
    if validate_yang_baxter(sol) and w is not None:
        raise InconsistentSolution("derived table fails the braid identity", witness=w)
    return s


def is_derived_shape(sol: SolutionTable) -> bool:
    """True when all lam maps are the identity (left derived flavour)."""
    e = identity(sol.n)
    return all(sol.lam[x] == e for x in range(sol.n))


def diagonal_map(sol: SolutionTable) -> Perm:
    """q(x) = lam_x^-1(x); needs left non-degeneracy."""
    if not is_left_nondegenerate(sol):
        raise PreconditionUnmet("diagonal map needs bijective lambda maps")
    return tuple(invert(sol.lam[x])[x] for x in range(sol.n))


def group_closure(gens: Iterable[Perm], n: int) -> list[Perm]:
    """All products of the given permutations (with the identity),
    in deterministic breadth-first order."""
    gens = list(gens)
    e = identity(n)
    seen = {e}
    order = [e]
    frontier = [e]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                f = compose(h, g)
                if f not in seen:
                    seen.add(f)
                    order.append(f)
                    nxt.append(f)
        frontier = nxt
    return order


@dataclass(frozen=True)
class ActionClosures:
    """Finite closure data of the one-letter actions.

    g_lambda   the permutation group generated by the lam maps
    e          its exponent
    sigma_monoid  the monoid generated by the sigma maps (with id)
    e_sigma    least p with sigma_x^(2p) = sigma_x^p for every x
    k          least p with q^(2p) = q^p for the diagonal map q
    v          the product k * e * e_sigma
    """

    g_lambda: tuple
    e: int
    sigma_monoid: tuple
    e_sigma: int
    k: int
    v: int


def action_closures(sol: SolutionTable) -> ActionClosures:
    """Closure data for a left non-degenerate solution.

    Verifies the two composition identities the closures rely on:
    lam_x lam_y = lam_{lam_x(y)} lam_{rho_y(x)} and sigma_x sigma_y =
    sigma_{sigma_x(y)} sigma_x.
    """
    if not validate_yang_baxter(sol):
        raise PreconditionUnmet("not a solution")
    n = sol.n
    lam = sol.lam
    for x in range(n):
        for y in range(n):
            u, w = sol.r[x][y]
            if compose(lam[x], lam[y]) != compose(lam[u], lam[w]):
                raise InconsistentSolution(
                    "lambda composition identity fails", witness=(x, y)
                )
    sig = sigma_tables(sol)
    for x in range(n):
        for y in range(n):
            lhs = compose(sig[x], sig[y])
            rhs = compose(sig[sig[x][y]], sig[x])
            if lhs != rhs:
                raise InconsistentSolution(
                    "sigma composition identity fails", witness=(x, y)
                )
    g = group_closure([lam[x] for x in range(n)], n)
    e = 1
    for p in g:
        e = math.lcm(e, perm_order(p))
    sigma_monoid = group_closure([sig[y] for y in range(n)], n)
    e_sigma = _least_idempotent_bound([sig[y] for y in range(n)])
    k = idempotent_exponent(diagonal_map(sol))
    return ActionClosures(
        g_lambda=tuple(g),
        e=e,
        sigma_monoid=tuple(sigma_monoid),
        e_sigma=e_sigma,
        k=k,
        v=k * e * e_sigma,
    )


def _least_idempotent_bound(maps: Sequence[Perm]) -> int:
    """Least p with f^(2p) = f^p simultaneously for all given maps."""
    period = 1
    tail = 0
    for f in maps:
        t, c = map_tail_period(f)
        period = math.lcm(period, c)
        tail = max(tail, t)
    p = period
    while p < tail:
        p += period
    return p


# ---------------------------------------------------------------------------
# Constructors


def make_trivial(n: int) -> SolutionTable:
    """r(x, y) = (y, x)."""
    return SolutionTable(
        n=n, r=tuple(tuple((y, x) for y in range(n)) for x in range(n))
    )


def make_idempotent_yy(n: int) -> SolutionTable:
    """r(x, y) = (y, y); idempotent and left non-degenerate."""
    return SolutionTable(
        n=n, r=tuple(tuple((y, y) for y in range(n)) for x in range(n))
    )


def make_lyubashenko(lam: Sequence[int], rho: Sequence[int]) -> SolutionTable:
    """r(x, y) = (lam(y), rho(x)) for a permutation lam commuting with rho."""
    n = len(lam)
    if not is_permutation(lam):
        raise AxiomViolation("lam must be a permutation", witness=tuple(lam))
    if len(rho) != n:
        raise AxiomViolation("rho must act on the same set")
    if compose(lam, rho) != compose(rho, lam):
        bad = next(i for i in range(n) if lam[rho[i]] != rho[lam[i]])
        raise AxiomViolation("lam and rho must commute", witness=bad)
    return SolutionTable(
        n=n,
        r=tuple(tuple((lam[y], rho[x]) for y in range(n)) for x in range(n)),
    )


def make_twisted_rack(tri: Sequence[Sequence[int]], star: Sequence[int]) -> SolutionTable:
    """r(x, y) = (x |> y, x*) from a twisted rack (X, |>, *).

    Axioms checked: each x |> - is a permutation; the twisted
    self-distributivity x |> (y |> z) = (x |> y) |> (x* |> z); and
    (x |> y)* = x* |> y*.
    """
    n = len(tri)
    for x in range(n):
        if not is_permutation(tri[x]):
            raise AxiomViolation(
                "x |> - must be a permutation", witness=(x, tuple(tri[x]))
            )
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if tri[x][tri[y][z]] != tri[tri[x][y]][tri[star[x]][z]]:
                    raise AxiomViolation(
                        "twisted self-distributivity fails", witness=(x, y, z)
                    )
    for x in range(n):
        for y in range(n):
            if star[tri[x][y]] != tri[star[x]][star[y]]:
                raise AxiomViolation("* is not |>-equivariant", witness=(x, y))
    rho = [list(star)] * n
    lam = [list(tri[x]) for x in range(n)]
    sol = from_components(lam, rho)
    w = yang_baxter_witness(sol)
    if w is not None:
        raise InconsistentSolution("twisted rack table fails braid", witness=w)
    return sol


def solution_to_twisted_rack(sol: SolutionTable) -> tuple[tuple, Perm]:
    """Inverse of make_twisted_rack on left non-degenerate tables with a
    single rho map: x |> y = lam_x(y), x* = rho(x)."""
    if not is_fixed_rho(sol) or not is_left_nondegenerate(sol):
        raise PreconditionUnmet("needs a left non-degenerate table with one rho map")
    return sol.lam, sol.rho[0]


def make_metahomomorphism(group: Sequence[Sequence[int]], f: Sequence[int]) -> SolutionTable:
    """r(x, y) = (x y f(x)^-1, f(x)) on a finite group.

    group[i][j] is the product of elements i and j; the identity element
    is located from the table.  f must satisfy
    f(x y f(x)^-1) = f(x) f(y) f^2(x)^-1.
    """
    n = len(group)
    mul = group
    ident = None
    for c in range(n):
        if all(mul[c][i] == i and mul[i][c] == i for i in range(n)):
            ident = c
            break
    if ident is None:
        raise AxiomViolation("table has no identity element")
    inv = [None] * n
    for a in range(n):
        for b in range(n):
            if mul[a][b] == ident and mul[b][a] == ident:
                inv[a] = b
    if any(i is None for i in inv):
        raise AxiomViolation("table has a non-invertible element")
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
                    raise AxiomViolation("table is not associative", witness=(a, b, c))
    for x in range(n):
        for y in range(n):
            lhs = f[mul[mul[x][y]][inv[f[x]]]]
            rhs = mul[mul[f[x]][f[y]]][inv[f[f[x]]]]
            if lhs != rhs:
                raise AxiomViolation(
                    "f is not a metahomomorphism", witness=(x, y)
                )
    lam = [[mul[mul[x][y]][inv[f[x]]] for y in range(n)] for x in range(n)]
    rho = [[f[x] for x in range(n)] for _y in range(n)]
    sol = from_components(lam, rho)
    w = yang_baxter_witness(sol)
    if w is not None:
        raise InconsistentSolution("metahomomorphism table fails braid", witness=w)
    return sol


# ---------------------------------------------------------------------------
# Quotients and restrictions


def relabel(sol: SolutionTable, g: Sequence[int]) -> SolutionTable:
    """The isomorphic table under the bijection g of X."""
    if not is_permutation(g):
        raise ValueError("relabelling must be a permutation")
    gi = invert(g)
    n = sol.n
    r = tuple(
        tuple(
            (g[sol.r[gi[x]][gi[y]][0]], g[sol.r[gi[x]][gi[y]][1]])
            for y in range(n)
        )
        for x in range(n)
    )
    return SolutionTable(n=n, r=r)


def retract_fixed_rho(sol: SolutionTable) -> tuple[SolutionTable, Perm]:
    """Retraction of a left non-degenerate solution with one rho map.

    With rho the common map and m least such that ker rho^m = ker
    rho^(m+1), letters are identified when their lam maps agree and
    their rho^m images agree.  Returns the induced table and the
    projection X -> quotient letters.
    """
    if not is_left_nondegenerate(sol):
        raise PreconditionUnmet("retraction needs bijective lambda maps")
    if not is_fixed_rho(sol):
        raise PreconditionUnmet("retraction needs a single rho map")
    n = sol.n
    rho = sol.rho[0]
    power = identity(n)
    while True:
        nxt = compose(rho, power)
        if _kernel(power, n) == _kernel(nxt, n):
            break
        power = nxt
    keys = [(sol.lam[x], power[x]) for x in range(n)]
    reps: dict = {}
    proj = []
    for x in range(n):
        proj.append(reps.setdefault(keys[x], len(reps)))
    m = len(reps)
    rbar = [[None] * m for _ in range(m)]
    for x in range(n):
        for y in range(n):
            u, w = sol.r[x][y]
            img = (proj[u], proj[w])
            cur = rbar[proj[x]][proj[y]]
            if cur is None:
                rbar[proj[x]][proj[y]] = img
            elif cur != img:
                raise InconsistentSolution(
                    "retraction is not well defined", witness=(x, y)
                )
    out = SolutionTable(n=m, r=tuple(tuple(row) for row in rbar))
    if not is_left_nondegenerate(out):
        raise InconsistentSolution("retracted table lost non-degeneracy")
    return out, tuple(proj)


def _kernel(f: Sequence[int], n: int) -> frozenset:
    buckets: dict = {}
    for x in range(n):
        buckets.setdefault(f[x], []).append(x)
    return frozenset(tuple(b) for b in buckets.values())


def restrict_solution(sol: SolutionTable, subset: Iterable[int]) -> tuple[SolutionTable, tuple]:
    """Restriction of the table to a subset closed under both components.

    Returns the restricted table (reindexed 0..k-1) and the sorted
    subset it corresponds to.  Raises NotClosed with the first escaping
    pair otherwise.
    """
    ys = sorted(set(subset))
    pos = {x: i for i, x in enumerate(ys)}
    for x in ys:
        for y in ys:
            u, v = sol.r[x][y]
            if u not in pos or v not in pos:
                raise NotClosed("subset is not r-closed", witness=(x, y))
    r = tuple(
        tuple((pos[sol.r[x][y][0]], pos[sol.r[x][y][1]]) for y in ys) for x in ys
    )
    return SolutionTable(n=len(ys), r=r), tuple(ys)
