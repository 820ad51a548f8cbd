"""Length-graded word problem for the two quadratic monoids of a solution.

The multiplicative monoid M is presented by x y = lam_x(y) rho_y(x),
the additive monoid A by x + y = y + sigma_y(x).  Both relation sets
are homogeneous of degree 2, so word equality never crosses length and
the congruence restricts to a partition of X^L for each L.  Each
partition is computed exactly: words of length L are the nodes of a
graph whose edges replace one adjacent pair by its relation image, and
classes are the connected components.

Words of length L over n letters are encoded as integers in [0, n^L)
with the first letter most significant, so numeric order is
lexicographic order.  The canonical form of a class is its least word
and class ids are dense in canonical-form order, which makes every
derived report deterministic.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass
from typing import Iterator, Literal, Optional, Sequence

import numpy as np

from .errors import (
    IllDefined,
    InconsistentSolution,
    PreconditionUnmet,
    ResourceLimit,
)
from .solution import (
    SolutionTable,
    action_closures,
    compose,
    identity,
    invert,
    is_left_nondegenerate,
    sigma_tables,
)

Flavor = Literal["M", "A"]
Word = tuple  # letters, first letter leftmost

DEFAULT_NODE_BUDGET = 5_000_000
_VECTOR_THRESHOLD = 1 << 15
CACHE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ClassRef:
    """A congruence class, addressed by flavor, word length and the
    dense class id at that length."""

    flavor: str
    length: int
    cid: int


@dataclass
class GradedClosure:
    """The exact partition of X^L for one flavor.

    class_of[i] is the dense class id of the word encoded by i; canon
    gives, per class id, the encoding of the least (canonical) word.
    """

    flavor: str
    length: int
    n: int
    class_of: np.ndarray
    canon: np.ndarray

    @property
    def class_count(self) -> int:
        return len(self.canon)


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, i: int) -> int:
        p = self.parent
        while p[i] != i:
            p[i] = p[p[i]]
            i = p[i]
        return i

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


class WordEngine:
    """Word-problem operations for one solution table.

    Closures are built lazily per (flavor, length), kept in memory and
    optionally mirrored to cache_dir.  All operations are pure: repeated
    calls with equal arguments return equal values, and cached runs are
    byte-identical to cold ones.
    """

    def __init__(
        self,
        sol: SolutionTable,
        node_budget: int = DEFAULT_NODE_BUDGET,
        cache_dir: Optional[str] = None,
    ):
        self.sol = sol
        self.node_budget = node_budget
        self.cache_dir = cache_dir
        self._closures: dict = {}
        self._induced: dict = {}
        self._lam_inv = (
            [invert(sol.lam[x]) for x in range(sol.n)]
            if is_left_nondegenerate(sol)
            else None
        )
        self._sigma = sigma_tables(sol) if self._lam_inv is not None else None
        self._closure_data = None

    # -- relation tables ----------------------------------------------------

    def _relation(self, flavor: str) -> list:
        """Flat pair-rewrite table: entry x*n+y is the encoded image pair."""
        n = self.sol.n
        if flavor == "M":
            return [
                self.sol.r[x][y][0] * n + self.sol.r[x][y][1]
                for x in range(n)
                for y in range(n)
            ]
        if flavor == "A":
            if self._sigma is None:
                raise PreconditionUnmet(
                    "additive flavor needs a left non-degenerate solution"
                )
            return [
                y * n + self._sigma[y][x] for x in range(n) for y in range(n)
            ]
        raise ValueError(f"unknown flavor {flavor!r}")

    def closures(self):
        if self._closure_data is None:
            self._closure_data = action_closures(self.sol)
        return self._closure_data

    # -- closure construction ----------------------------------------------

    def close(self, flavor: str, length: int) -> GradedClosure:
        key = (flavor, length)
        if key in self._closures:
            return self._closures[key]
        size = self.sol.n**length
        if size > self.node_budget:
            raise ResourceLimit(
                f"closure at length {length} needs {size} words",
                needed=size,
                budget=self.node_budget,
            )
        clo = self._load_cached(flavor, length)
        if clo is None:
            clo = self._build(flavor, length)
            self._store_cached(clo)
        self._closures[key] = clo
        return clo

    def _build(self, flavor: str, length: int) -> GradedClosure:
        n = self.sol.n
        size = n**length
        if length < 2:
            class_of = np.arange(size, dtype=np.int64)
            return GradedClosure(flavor, length, n, class_of, class_of.copy())
        rel = self._relation(flavor)
        if size < _VECTOR_THRESHOLD:
            labels = self._components_small(rel, length, size)
        else:
            labels = self._components_vectorized(rel, length, size)
        labs, first = np.unique(labels, return_index=True)
        rank = np.empty(len(labs), dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(len(labs))
        class_of = rank[np.searchsorted(labs, labels)]
        canon = np.sort(first)
        return GradedClosure(flavor, length, n, class_of.astype(np.int64), canon)

    def _components_small(self, rel: list, length: int, size: int) -> np.ndarray:
        n = self.sol.n
        pw = [n**i for i in range(length)]
        uf = _UnionFind(size)
        for idx in range(size):
            rest = idx
            letters = []
            for p in range(length - 1, -1, -1):
                letters.append(rest // pw[p])
                rest %= pw[p]
            for p in range(length - 1):
                x, y = letters[p], letters[p + 1]
                uv = rel[x * n + y]
                u, v = uv // n, uv % n
                if u != x or v != y:
                    j = idx + (u - x) * pw[length - 1 - p] + (v - y) * pw[length - 2 - p]
                    uf.union(idx, j)
        return np.fromiter(
            (uf.find(i) for i in range(size)), dtype=np.int64, count=size
        )

    def _components_vectorized(self, rel: list, length: int, size: int) -> np.ndarray:
        from scipy.sparse import coo_matrix
        from scipy.sparse.csgraph import connected_components

        n = self.sol.n
        relu = np.array([c // n for c in rel], dtype=np.int64)
        relv = np.array([c % n for c in rel], dtype=np.int64)
        idx = np.arange(size, dtype=np.int64)
        rows = []
        cols = []
        for p in range(length - 1):
            hi = n ** (length - 1 - p)
            lo = n ** (length - 2 - p)
            x = (idx // hi) % n
            y = (idx // lo) % n
            pair = x * n + y
            j = idx + (relu[pair] - x) * hi + (relv[pair] - y) * lo
            moved = j != idx
            rows.append(idx[moved])
            cols.append(j[moved])
        rows = np.concatenate(rows) if rows else np.empty(0, dtype=np.int64)
        cols = np.concatenate(cols) if cols else np.empty(0, dtype=np.int64)
        graph = coo_matrix(
            (np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(size, size)
        )
        _, labels = connected_components(graph, directed=False)
        return labels.astype(np.int64)

    # -- cache --------------------------------------------------------------

    def _cache_path(self, flavor: str, length: int) -> Optional[str]:
        if self.cache_dir is None:
            return None
        name = f"{self.sol.table_hash}_{flavor}{length}.ybx"
        return os.path.join(self.cache_dir, name)

    def _store_cached(self, clo: GradedClosure) -> None:
        path = self._cache_path(clo.flavor, clo.length)
        if path is None:
            return
        os.makedirs(self.cache_dir, exist_ok=True)
        header = {
            "format": CACHE_FORMAT_VERSION,
            "n": clo.n,
            "length": clo.length,
            "flavor": clo.flavor,
            "count": clo.class_count,
        }
        tmp = path + ".tmp"
        with open(tmp, "wb") as fh:
            fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
            fh.write(clo.class_of.astype(np.int64).tobytes())
        os.replace(tmp, path)

    def _load_cached(self, flavor: str, length: int) -> Optional[GradedClosure]:
        path = self._cache_path(flavor, length)
        if path is None or not os.path.exists(path):
            return None
        with open(path, "rb") as fh:
            header = json.loads(fh.readline())
            if (
                header.get("format") != CACHE_FORMAT_VERSION
                or header.get("n") != self.sol.n
                or header.get("length") != length
                or header.get("flavor") != flavor
            ):
                return None
            class_of = np.frombuffer(fh.read(), dtype=np.int64).copy()
        if len(class_of) != self.sol.n**length:
            return None
        labs, first = np.unique(class_of, return_index=True)
        if header.get("count") != len(labs):
            return None
        canon = np.sort(first)
        return GradedClosure(flavor, length, self.sol.n, class_of, canon)

    # -- word encoding ------------------------------------------------------

    def encode(self, word: Sequence[int]) -> int:
        idx = 0
        for letter in word:
            if not (0 <= letter < self.sol.n):
                raise ValueError(f"letter {letter} out of range")
            idx = idx * self.sol.n + letter
        return idx

    def decode(self, idx: int, length: int) -> Word:
        out = []
        for _ in range(length):
            out.append(idx % self.sol.n)
            idx //= self.sol.n
        return tuple(reversed(out))

    # -- class level operations --------------------------------------------

    def class_of(self, flavor: str, word: Sequence[int]) -> ClassRef:
        clo = self.close(flavor, len(word))
        return ClassRef(flavor, len(word), int(clo.class_of[self.encode(word)]))

    def canonical_form(self, flavor: str, word: Sequence[int]) -> Word:
        clo = self.close(flavor, len(word))
        return self.decode(int(clo.canon[clo.class_of[self.encode(word)]]), len(word))

    def canon_word(self, ref: ClassRef) -> Word:
        clo = self.close(ref.flavor, ref.length)
        return self.decode(int(clo.canon[ref.cid]), ref.length)

    def equal(self, flavor: str, w1: Sequence[int], w2: Sequence[int]) -> bool:
        if len(w1) != len(w2):
            return False
        clo = self.close(flavor, len(w1))
        return bool(clo.class_of[self.encode(w1)] == clo.class_of[self.encode(w2)])

    def growth(self, flavor: str, max_length: int) -> list[int]:
        """Class counts h(0..max_length)."""
        return [self.close(flavor, L).class_count for L in range(max_length + 1)]

    def members(self, ref: ClassRef) -> Iterator[Word]:
        clo = self.close(ref.flavor, ref.length)
        for idx in np.nonzero(clo.class_of == ref.cid)[0]:
            yield self.decode(int(idx), ref.length)

    def class_size(self, ref: ClassRef) -> int:
        clo = self.close(ref.flavor, ref.length)
        return int(np.count_nonzero(clo.class_of == ref.cid))

    def product(self, a: ClassRef, b: ClassRef) -> ClassRef:
        if a.flavor != b.flavor:
            raise ValueError("cannot multiply across flavors")
        return self.class_of(a.flavor, self.canon_word(a) + self.canon_word(b))

    def power(self, a: ClassRef, m: int) -> ClassRef:
        if m < 1:
            raise ValueError("need a positive exponent")
        return self.class_of(a.flavor, self.canon_word(a) * m)

    def is_abelian(self, flavor: str, bound: int) -> bool:
        """Commutativity of all class pairs with length sum <= bound."""
        if bound < 2:
            raise ValueError("abelian bound below 2 checks nothing")
        for la in range(1, bound):
            for lb in range(la, bound - la + 1):
                ca = self.close(flavor, la)
                cb = self.close(flavor, lb)
                for i in range(ca.class_count):
                    wa = self.decode(int(ca.canon[i]), la)
                    for j in range(cb.class_count):
                        wb = self.decode(int(cb.canon[j]), lb)
                        if not self.equal(flavor, wa + wb, wb + wa):
                            return False
        return True

    # -- lambda data and the cocycle ----------------------------------------

    def lambda_of(self, word: Sequence[int]) -> tuple:
        """The permutation attached to a multiplicative word, i.e. the
        composition of the one-letter lam maps left to right."""
        if self._lam_inv is None:
            raise PreconditionUnmet("lambda data needs left non-degeneracy")
        g = identity(self.sol.n)
        for letter in word:
            g = compose(g, self.sol.lam[letter])
        return g

    def lambda_of_class(self, ref: ClassRef) -> tuple:
        if ref.flavor == "M":
            return self.lambda_of(self.canon_word(ref))
        return self.lambda_of_additive_word(self.canon_word(ref))

    def cocycle(self, word: Sequence[int]) -> Word:
        """Image of a multiplicative word under the length-preserving
        1-cocycle into the additive monoid: letter i maps to the image
        of letter i under the lambda permutation of the prefix."""
        if self._lam_inv is None:
            raise PreconditionUnmet("the cocycle needs left non-degeneracy")
        g = identity(self.sol.n)
        out = []
        for letter in word:
            out.append(g[letter])
            g = compose(g, self.sol.lam[letter])
        return tuple(out)

    def cocycle_class(self, ref: ClassRef) -> ClassRef:
        if ref.flavor != "M":
            raise ValueError("the cocycle maps multiplicative classes")
        return self.class_of("A", self.cocycle(self.canon_word(ref)))

    def multiplicative_word(self, a_word: Sequence[int]) -> Word:
        """Preimage of an additive word under the cocycle (letterwise
        inversion through the accumulated lambda permutation)."""
        if self._lam_inv is None:
            raise PreconditionUnmet("the cocycle needs left non-degeneracy")
        g = identity(self.sol.n)
        out = []
        for letter in a_word:
            m = invert(g)[letter]
            out.append(m)
            g = compose(g, self.sol.lam[m])
        return tuple(out)

    def lambda_of_additive_word(self, a_word: Sequence[int]) -> tuple:
        """Lambda permutation of the element the additive word denotes."""
        return self.lambda_of(self.multiplicative_word(a_word))

    # -- divisor data --------------------------------------------------------

    def divisor_masks(self, flavor: str, length: int) -> np.ndarray:
        """Per class, the bitmask of generators dividing it on the left.

        Generator x divides a class of length L iff some word of the
        class starts with x, by homogeneity of the relations.
        """
        key = ("div", flavor, length)
        if key in self._induced:
            return self._induced[key]
        clo = self.close(flavor, length)
        if length == 0:
            masks = np.zeros(1, dtype=np.int64)
        else:
            first = np.arange(self.sol.n**length, dtype=np.int64) // (
                self.sol.n ** (length - 1)
            )
            masks = np.zeros(clo.class_count, dtype=np.int64)
            np.bitwise_or.at(masks, clo.class_of, np.int64(1) << first)
        self._induced[key] = masks
        return masks

    def left_divisors(self, ref: ClassRef) -> frozenset:
        mask = int(self.divisor_masks(ref.flavor, ref.length)[ref.cid])
        return frozenset(x for x in range(self.sol.n) if mask >> x & 1)

    def class_lambdas(self, length: int) -> list:
        """Lambda permutation per multiplicative class id."""
        key = ("lam", length)
        if key in self._induced:
            return self._induced[key]
        clo = self.close("M", length)
        lams = [self.lambda_of(self.decode(int(c), length)) for c in clo.canon]
        self._induced[key] = lams
        return lams

    # -- letterwise actions --------------------------------------------------

    def apply_letter_map(self, g: Sequence[int], ref: ClassRef) -> ClassRef:
        """Class image under the letterwise action of the map g.

        The induced map on classes is computed once per (flavor, length,
        g) with a built-in well-definedness check over every word, and
        raises IllDefined with a witness pair of representatives if two
        members of one class land in different classes.
        """
        table = self._induced_letter_map(g, ref.flavor, ref.length)
        return ClassRef(ref.flavor, ref.length, int(table[ref.cid]))

    def _induced_letter_map(self, g: Sequence[int], flavor: str, length: int):
        key = ("act", flavor, length, tuple(g))
        if key in self._induced:
            return self._induced[key]
        clo = self.close(flavor, length)
        n = self.sol.n
        garr = np.asarray(g, dtype=np.int64)
        idx = np.arange(n**length, dtype=np.int64)
        image = np.zeros_like(idx)
        rest = idx
        for p in range(length - 1, -1, -1):
            image += garr[rest % n] * (n**(length - 1 - p))
            rest = rest // n
        image_class = clo.class_of[image]
        lo = np.full(clo.class_count, np.iinfo(np.int64).max, dtype=np.int64)
        hi = np.full(clo.class_count, -1, dtype=np.int64)
        np.minimum.at(lo, clo.class_of, image_class)
        np.maximum.at(hi, clo.class_of, image_class)
        bad = np.nonzero(lo != hi)[0]
        if len(bad):
            cid = int(bad[0])
            words = [w for w in self.members(ClassRef(flavor, length, cid))]
            w1 = words[0]
            w2 = next(
                w
                for w in words
                if clo.class_of[self.encode(tuple(g[t] for t in w))]
                != clo.class_of[self.encode(tuple(g[t] for t in w1))]
            )
            raise IllDefined(
                "letterwise action is not constant on a class", witness=(w1, w2)
            )
        self._induced[key] = lo
        return lo

    # -- socle ---------------------------------------------------------------

    def is_socle(self, ref: ClassRef) -> bool:
        """Whether the class acts trivially, i.e. its lambda is the
        identity permutation."""
        return self.lambda_of_class(ref) == identity(self.sol.n)

    def socle_data(self, sample_count: int = 2) -> "SocleData":
        """The finite data controlling the socle decomposition.

        W holds, per generator x, the multiplicative class denoting the
        additive v-fold sum of x, kept only when its lambda is trivial.
        The transversal collects every multiplicative class of length
        below n(k+v); the factorization check verifies at sampled
        lengths at and above that bound that every class is a
        transversal element times a product of W members, and records
        the largest transversal length actually needed.
        """
        ac = self.closures()
        n = self.sol.n
        v, k, e = ac.v, ac.k, ac.e
        if n**v > self.node_budget:
            raise ResourceLimit(
                f"socle generators need words of length {v}",
                needed=n**v,
                budget=self.node_budget,
            )
        w_refs = {}
        for x in range(n):
            a_word = (x,) * v
            if self.lambda_of_additive_word(a_word) == identity(n):
                w_refs[x] = self.class_of("M", self.multiplicative_word(a_word))
        if n ** (v * n) > self.node_budget:
            raise ResourceLimit(
                f"diagonal elements need words of length {v * n}",
                needed=n ** (v * n),
                budget=self.node_budget,
            )
        z_refs = {}
        for kappa in itertools.permutations(range(n)):
            word = tuple(letter for x in kappa for letter in (x,) * v)
            z_refs[kappa] = self.class_of("A", word)
        bound = n * (k + v)
        if n ** (bound - 1) > self.node_budget:
            raise ResourceLimit(
                f"transversal needs words of length {bound - 1}",
                needed=n ** (bound - 1),
                budget=self.node_budget,
            )
        transversal = [
            ClassRef("M", L, c)
            for L in range(bound)
            for c in range(self.close("M", L).class_count)
        ]
        socle_transversal = [f for f in transversal if self.is_socle(f)]
        sampled = [
            L
            for L in range(bound, bound + sample_count)
            if n**L <= self.node_budget
        ]
        factorization = self._factorization_check(w_refs, v, bound, sampled)
        return SocleData(
            v=v,
            k=k,
            e=e,
            w_refs=w_refs,
            z_refs=z_refs,
            transversal_bound=bound,
            transversal=transversal,
            socle_transversal=socle_transversal,
            factorization=factorization,
        )

    def _factorization_check(self, w_refs, v, bound, sampled):
        """Exhaustive f * w coverage of the sampled lengths."""
        from .reports import PROVED, RESOURCE, DiagnosisReport

        if not sampled:
            return DiagnosisReport(
                question="socle-factorization",
                verdict=RESOURCE,
                depth={"bound": bound},
                detail="no length at or above the transversal bound fits the budget",
            )
        minimal_needed = 0
        for L in sampled:
            powers = {}
            current = {self.class_of("M", ())}
            d = 1
            while d * v <= L:
                current = {
                    self.product(u, w) for u in current for w in w_refs.values()
                }
                powers[d] = current
                d += 1
            best: dict = {}
            for d, wset in powers.items():
                f_len = L - d * v
                if not 0 <= f_len < bound:
                    continue
                f_clo = self.close("M", f_len)
                for f_cid in range(f_clo.class_count):
                    f_ref = ClassRef("M", f_len, f_cid)
                    for w in wset:
                        got = self.product(f_ref, w).cid
                        if got not in best or best[got] > f_len:
                            best[got] = f_len
            total = self.close("M", L).class_count
            missing = [c for c in range(total) if c not in best]
            if missing:
                raise InconsistentSolution(
                    "a class admits no transversal factorization",
                    witness={
                        "length": L,
                        "word": self.canon_word(ClassRef("M", L, missing[0])),
                    },
                )
            minimal_needed = max(minimal_needed, max(best.values(), default=0))
        return DiagnosisReport(
            question="socle-factorization",
            verdict=PROVED,
            depth={"bound": bound, "sampled": sampled},
            witness={"minimal_transversal_length": minimal_needed},
        )

    def check_zcomm(self, scale: int = 1, retried: bool = False) -> "DiagnosisReport":
        """Exhaustive check that v-fold generator sums commute past the
        diagonal padding element: vx + vy + z = vy + vx + z for all
        generator pairs, at words of length v(n+2).

        A failure at the minimal exponent v is retried once at 2v
        before being treated as fatal, since the underlying identities
        survive replacing v by any multiple.
        """
        from .reports import PROVED, RESOURCE, DiagnosisReport

        ac = self.closures()
        n = self.sol.n
        v = ac.v * scale
        total_len = v * (n + 2)
        if n**total_len > self.node_budget:
            return DiagnosisReport(
                question="diagonal-commutation",
                verdict=RESOURCE,
                depth={"v": v, "length": total_len},
                detail=f"needs {n}^{total_len} nodes over budget {self.node_budget}",
            )
        z_word = tuple(letter for x in range(n) for letter in (x,) * v)
        for x in range(n):
            for y in range(n):
                lhs = (x,) * v + (y,) * v + z_word
                rhs = (y,) * v + (x,) * v + z_word
                if not self.equal("A", lhs, rhs):
                    if not retried and n ** (2 * total_len) <= self.node_budget:
                        return self.check_zcomm(scale=2 * scale, retried=True)
                    raise InconsistentSolution(
                        "diagonal commutation fails",
                        witness={"x": x, "y": y, "v": v},
                    )
        return DiagnosisReport(
            question="diagonal-commutation",
            verdict=PROVED,
            depth={"v": v, "length": total_len},
        )


@dataclass
class SocleData:
    """Socle decomposition data: the v-fold generator powers with
    trivial lambda, the diagonal elements per letter ordering, and the
    finite transversal below length n(k+v)."""

    v: int
    k: int
    e: int
    w_refs: dict
    z_refs: dict
    transversal_bound: int
    transversal: list
    socle_transversal: list
    factorization: object

    def to_json(self) -> dict:
        return {
            "v": self.v,
            "k": self.k,
            "e": self.e,
            "w_letters": sorted(self.w_refs),
            "diagonal_classes": len({ref.cid for ref in self.z_refs.values()}),
            "transversal_bound": self.transversal_bound,
            "transversal_size": len(self.transversal),
            "socle_transversal_size": len(self.socle_transversal),
            "factorization": self.factorization.to_json(),
        }
