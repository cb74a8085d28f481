"""Curved complexes over presented rings.

A curved complex is stored in decomposed form: a list of rank-1 free
objects (each with a multidegree and a presented ring), a connection
written as a sum of (parameter monomial, matrix of ring elements) terms,
and a declared curvature.  Parameter monomials live in the Clifford-type
algebra generated by even multiplications, odd multiplications theta and
contractions theta-dual, subject to

    theta^2 = (theta-dual)^2 = 0,
    theta-dual theta + theta theta-dual = 1,
    distinct odd symbols anticommute, even symbols are central.

Composition of decomposed terms follows the middle interchange law

    (A (x) s) o (B (x) r) = (-1)^{<deg s, deg B>} (A B) (x) (s o r)

where <,> is the (a,t) sign form and the entrywise sign factors through
diagonal sign matrices because ring elements are pure q-degree.  All the
engine operations -- Maurer-Cartan checks, twists, cones, Gaussian
elimination with SDR data, deformation transport, SDR lifting, truncated
homology -- are built on that one composition rule.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .grading import MultiDegree, parity, shift_sign
from .linalg import ClassTracker, RowBasis, rank_of, vec_add
from .qseries import TriSeries, Window
from .symfun import Mono, Poly, eval_at_point, gen_degree

# ---------------------------------------------------------------------------
# presented rings with graded normal forms


@dataclass
class RingSpec:
    """A graded-commutative polynomial ring modulo homogeneous relations.

    generators: list of (symbol, even q-degree); relations: homogeneous
    Polys in those symbols.  qshift records the overall quantum shift of
    the bimodule this ring presents (never baked into generator degrees).
    sampler(count, seed) optionally returns exact points of the vanishing
    locus of the relations, used as a second route in equality checks.
    """

    name: str
    generators: list[tuple[tuple, int]]
    relations: list[Poly] = field(default_factory=list)
    qshift: int = 0
    sampler: Optional[Callable[[int, int], list[dict]]] = None
    eval_composition: object = None  # Composition for eval_at_point, if sampled


class GradedRing:
    """Normal forms and graded linear algebra for a RingSpec.

    Relations whose leading generator occurs linearly and nowhere else in
    the same relation are folded into a substitution; the rest are handled
    degree by degree as row spaces over the monomial basis.
    """

    def __init__(self, spec: RingSpec):
        self.spec = spec
        self._subst: dict[tuple, Poly] = {}
        kept: list[Poly] = []
        gens = dict(spec.generators)
        todo = [self._apply_subst(r) for r in spec.relations]
        changed = True
        while changed:
            changed = False
            rest: list[Poly] = []
            for rel in todo:
                rel = self._apply_subst(rel)
                if rel.is_zero():
                    continue
                target = self._solvable_gen(rel)
                if target is None:
                    rest.append(rel)
                    continue
                g, coeff = target
                rhs = Fraction(-1, 1) / coeff * (rel - coeff * Poly.gen(g))
                self._subst[g] = rhs
                # re-apply to everything already recorded
                self._subst = {
                    h: p.substitute({g: rhs}) for h, p in self._subst.items()
                }
                gens.pop(g, None)
                changed = True
            todo = rest
        kept = [r for r in (self._apply_subst(r) for r in todo) if not r.is_zero()]
        self.generators: list[tuple[tuple, int]] = sorted(
            gens.items(), key=lambda gv: repr(gv[0])
        )
        self.relations = kept
        self.qshift = spec.qshift
        self._basis_cache: dict[int, list[Mono]] = {}
        self._ideal_cache: dict[int, RowBasis] = {}
        self._qbasis_cache: dict[int, list[int]] = {}
        self._mult_cache: dict = {}

    # -- presentation preprocessing -----------------------------------------
    @staticmethod
    def _solvable_gen(rel: Poly):
        for m, c in rel.terms.items():
            if len(m) == 1 and m[0][1] == 1:
                g = m[0][0]
                if all(
                    mm == m or all(gg != g for gg, _ in mm) for mm in rel.terms
                ):
                    return g, c
        return None

    def _apply_subst(self, p: Poly) -> Poly:
        if not self._subst:
            return p
        while True:
            hit = [g for g in p.gens() if g in self._subst]
            if not hit:
                return p
            p = p.substitute({g: self._subst[g] for g in hit})

    # -- monomial bases ------------------------------------------------------
    def basis(self, qdeg: int) -> list[Mono]:
        """All monomials of the given q-degree in the surviving generators."""
        if qdeg in self._basis_cache:
            return self._basis_cache[qdeg]
        if qdeg < 0 or qdeg % 2:
            self._basis_cache[qdeg] = []
            return []
        weights = [(g, d // 2) for g, d in self.generators]
        out: list[Mono] = []

        def rec(i: int, remaining: int, acc: list):
            if remaining == 0:
                out.append(tuple(acc))
                return
            if i >= len(weights):
                return
            g, w = weights[i]
            rec(i + 1, remaining, acc)
            for e in range(1, remaining // w + 1):
                rec(i + 1, remaining - e * w, acc + [(g, e)])

        rec(0, qdeg // 2, [])
        out = [tuple(sorted(m)) for m in out]
        out.sort(key=repr)
        self._basis_cache[qdeg] = out
        return out

    def _ideal(self, qdeg: int) -> RowBasis:
        if qdeg in self._ideal_cache:
            return self._ideal_cache[qdeg]
        rb = RowBasis()
        basis = self.basis(qdeg)
        index = {m: i for i, m in enumerate(basis)}
        for rel in self.relations:
            rdeg = rel.degree().q
            if rdeg > qdeg:
                continue
            for m in self.basis(qdeg - rdeg):
                prod = Poly({m: Fraction(1)}) * rel
                vec = {}
                for mm, c in prod.terms.items():
                    vec[index[mm]] = c
                rb.add(vec)
        self._ideal_cache[qdeg] = rb
        return rb

    def quotient_basis(self, qdeg: int) -> list[int]:
        """Indices (into basis(qdeg)) of monomials spanning the quotient."""
        if qdeg in self._qbasis_cache:
            return self._qbasis_cache[qdeg]
        pivots = self._ideal(qdeg).pivots()
        out = [i for i in range(len(self.basis(qdeg))) if i not in pivots]
        self._qbasis_cache[qdeg] = out
        return out

    def dim(self, qdeg: int) -> int:
        return len(self.quotient_basis(qdeg))

    def normal_form(self, p: Poly) -> Poly:
        """Canonical representative of p modulo the relation ideal."""
        p = self._apply_subst(p)
        if p.is_zero():
            return p
        out = Poly.zero()
        by_deg: dict[int, dict[Mono, Fraction]] = {}
        for m, c in p.terms.items():
            d = sum(gen_degree(g).q * e for g, e in m)
            by_deg.setdefault(d, {})[m] = c
        for d, terms in by_deg.items():
            basis = self.basis(d)
            index = {m: i for i, m in enumerate(basis)}
            vec = {index[m]: c for m, c in terms.items()}
            red = self._ideal(d).reduce(vec)
            for i, c in red.items():
                out = out + Poly({basis[i]: c})
        return out

    def reduces_to_zero(self, p: Poly) -> bool:
        return self.normal_form(p).is_zero()

    def sampled_zero(self, p: Poly, count: int = 20, seed: int = 0) -> bool:
        """Exact evaluation at vanishing-locus samples (True if no sampler)."""
        if self.spec.sampler is None:
            return True
        p = self._apply_subst(p)
        from .symfun import expand_to_x

        expanded = expand_to_x(p, self.spec.eval_composition)
        for pt in self.spec.sampler(count, seed):
            if eval_at_point(expanded, pt, self.spec.eval_composition) != 0:
                return False
        return True

    def mult_matrix(self, p: Poly, qdeg: int) -> dict[tuple[int, int], Fraction]:
        """Matrix of multiplication by p: quotient(qdeg) -> quotient(qdeg + deg p)."""
        p = self._apply_subst(p)
        if p.is_zero():
            return {}
        key = (frozenset(p.terms.items()), qdeg)
        if key in self._mult_cache:
            return self._mult_cache[key]
        pdeg = p.degree().q
        src = self.quotient_basis(qdeg)
        src_basis = self.basis(qdeg)
        tgt_deg = qdeg + pdeg
        tgt_basis = self.basis(tgt_deg)
        tgt_index = {m: i for i, m in enumerate(tgt_basis)}
        tgt_cols = {i: r for r, i in enumerate(self.quotient_basis(tgt_deg))}
        ideal = self._ideal(tgt_deg)
        out: dict[tuple[int, int], Fraction] = {}
        for col, bi in enumerate(src):
            prod = Poly({src_basis[bi]: Fraction(1)}) * p
            vec = {tgt_index[m]: c for m, c in prod.terms.items()}
            red = ideal.reduce(vec)
            for i, c in red.items():
                out[(tgt_cols[i], col)] = c
        self._mult_cache[key] = out
        return out

    def series(self, qmin: int, qmax: int) -> dict[int, int]:
        """Graded dimensions of the quotient, natural grading."""
        return {d: self.dim(d) for d in range(max(qmin, 0), qmax + 1)}


# ---------------------------------------------------------------------------
# deformation parameters and Clifford monomials


@dataclass(frozen=True)
class ParamSpec:
    """Deformation alphabet: symbol -> (degree, parity).  Odd symbols carry
    a contraction dual with inverse degree."""

    params: tuple[tuple[str, MultiDegree, str], ...]  # (name, degree, "even"/"odd")

    @staticmethod
    def make(entries: Iterable[tuple[str, MultiDegree, str]]) -> "ParamSpec":
        return ParamSpec(tuple(entries))

    def degree(self, name: str) -> MultiDegree:
        for n, d, _ in self.params:
            if n == name:
                return d
        raise KeyError(name)

    def parity_of(self, name: str) -> str:
        for n, _, p in self.params:
            if n == name:
                return p
        raise KeyError(name)

    def odd_names(self) -> list[str]:
        return [n for n, _, p in self.params if p == "odd"]

    def even_names(self) -> list[str]:
        return [n for n, _, p in self.params if p == "even"]

    def merge(self, other: "ParamSpec") -> "ParamSpec":
        seen = {n for n, _, _ in self.params}
        extra = tuple(e for e in other.params if e[0] not in seen)
        return ParamSpec(self.params + extra)


# normal-ordered Clifford monomial: even exponents, odd thetas, odd duals
@dataclass(frozen=True)
class PMono:
    evens: tuple[tuple[str, int], ...] = ()
    thetas: tuple[str, ...] = ()
    duals: tuple[str, ...] = ()

    def is_module_monomial(self) -> bool:
        return not self.duals

    def total_even_weight(self) -> int:
        return sum(e for _, e in self.evens)


PM_ONE = PMono()


def pm_degree(spec: ParamSpec, m: PMono) -> MultiDegree:
    out = MultiDegree(0, 0, 0)
    for n, e in m.evens:
        out = out + spec.degree(n).scaled(e)
    for n in m.thetas:
        out = out + spec.degree(n)
    for n in m.duals:
        out = out - spec.degree(n)
    return out


def _word_normal_order(word: tuple) -> list[tuple[int, tuple]]:
    """Normal-order a word of ('t', name) / ('d', name) odd letters.
    Returns [(sign, word)] with words sorted thetas-then-duals ascending."""
    # find the first violation
    for i in range(len(word) - 1):
        (k1, n1), (k2, n2) = word[i], word[i + 1]
        if k1 == "t" and k2 == "t":
            if n1 == n2:
                return []
            if n1 > n2:
                swapped = word[:i] + (word[i + 1], word[i]) + word[i + 2:]
                return [(-s, w) for s, w in _word_normal_order(swapped)]
        elif k1 == "d" and k2 == "d":
            if n1 == n2:
                return []
            if n1 > n2:
                swapped = word[:i] + (word[i + 1], word[i]) + word[i + 2:]
                return [(-s, w) for s, w in _word_normal_order(swapped)]
        elif k1 == "d" and k2 == "t":
            rest_pre, rest_post = word[:i], word[i + 2:]
            if n1 == n2:
                # d t = 1 - t d
                out = []
                for s, w in _word_normal_order(rest_pre + rest_post):
                    out.append((s, w))
                for s, w in _word_normal_order(
                    rest_pre + (word[i + 1], word[i]) + rest_post
                ):
                    out.append((-s, w))
                return out
            swapped = word[:i] + (word[i + 1], word[i]) + word[i + 2:]
            return [(-s, w) for s, w in _word_normal_order(swapped)]
    return [(1, word)]


def pm_mul(spec: ParamSpec, s: PMono, r: PMono) -> list[tuple[int, PMono]]:
    """Normal-ordered product s o r (s composed after r, word s then r)."""
    evens: dict[str, int] = {}
    for n, e in s.evens + r.evens:
        evens[n] = evens.get(n, 0) + e
    ev = tuple(sorted(evens.items()))
    word = (
        tuple(("t", n) for n in s.thetas)
        + tuple(("d", n) for n in s.duals)
        + tuple(("t", n) for n in r.thetas)
        + tuple(("d", n) for n in r.duals)
    )
    out = []
    for sign, w in _word_normal_order(word):
        thetas = tuple(n for k, n in w if k == "t")
        duals = tuple(n for k, n in w if k == "d")
        out.append((sign, PMono(ev, thetas, duals)))
    return out


def pm_from(evens: Mapping[str, int] | None = None,
            thetas: Iterable[str] = (),
            duals: Iterable[str] = ()) -> PMono:
    ev = tuple(sorted((n, e) for n, e in (evens or {}).items() if e))
    return PMono(ev, tuple(sorted(thetas)), tuple(sorted(duals)))


# ---------------------------------------------------------------------------
# matrix entries with opaque symbols


class Entry:
    """A matrix entry: a plain ring element plus optional opaque summands
    (tagged bimodule-map symbols like 'unzip' scaled by ring elements)."""

    __slots__ = ("parts",)

    def __init__(self, parts: Mapping[Optional[str], Poly] | None = None):
        self.parts: dict[Optional[str], Poly] = {}
        if parts:
            for tag, p in parts.items():
                if not p.is_zero():
                    self.parts[tag] = p

    @staticmethod
    def plain(p: Poly) -> "Entry":
        return Entry({None: p})

    @staticmethod
    def opaque(tag: str, p: Poly | None = None) -> "Entry":
        return Entry({tag: p if p is not None else Poly.one()})

    def __add__(self, other: "Entry") -> "Entry":
        out = dict(self.parts)
        for tag, p in other.parts.items():
            s = out.get(tag, Poly.zero()) + p
            if s.is_zero():
                out.pop(tag, None)
            else:
                out[tag] = s
        return Entry(out)

    def __neg__(self) -> "Entry":
        return Entry({tag: -p for tag, p in self.parts.items()})

    def scale(self, c) -> "Entry":
        c = Fraction(c)
        if not c:
            return Entry()
        return Entry({tag: c * p for tag, p in self.parts.items()})

    def times_poly(self, p: Poly) -> "Entry":
        return Entry({tag: p * q for tag, q in self.parts.items()})

    def is_zero(self) -> bool:
        return not self.parts

    def is_plain(self) -> bool:
        return set(self.parts) <= {None}

    def plain_part(self) -> Poly:
        return self.parts.get(None, Poly.zero())

    def compose(self, other: "Entry", rules: Mapping[tuple, Optional[str]]) -> "Entry":
        """self after other; opaque tags combine via the declared rules."""
        out = Entry()
        for t1, p1 in self.parts.items():
            for t2, p2 in other.parts.items():
                if t1 is None and t2 is None:
                    tag = None
                elif t1 is None:
                    tag = t2
                elif t2 is None:
                    tag = t1
                else:
                    if (t1, t2) not in rules:
                        raise ValueError(
                            f"no composition rule for opaque tags {t1!r} o {t2!r}"
                        )
                    tag = rules[(t1, t2)]
                out = out + Entry({tag: p1 * p2})
        return out

    def to_json(self):
        return [
            {"tag": tag, "poly": p.to_json()}
            for tag, p in sorted(self.parts.items(), key=lambda kv: repr(kv[0]))
        ]

    def __repr__(self):  # pragma: no cover
        return " + ".join(
            (f"[{t}]" if t else "") + repr(p) for t, p in self.parts.items()
        ) or "0"


TermMatrix = dict  # {(row, col): Entry}
Terms = dict  # {PMono: TermMatrix}


# ---------------------------------------------------------------------------
# objects and curved complexes


@dataclass(frozen=True)
class RC_Object:
    degree: MultiDegree
    ring: GradedRing
    label: str = ""
    # formal q-degree offset of the cyclic generator (cross-ring maps):
    offset: int = 0


class CheckReport:
    def __init__(self, ok: bool, details: str = ""):
        self.ok = ok
        self.details = details

    def __bool__(self):
        return self.ok

    def __repr__(self):  # pragma: no cover
        return f"CheckReport(ok={self.ok}, details={self.details!r})"


class CurvedComplex:
    """Curved complex in decomposed form; see module docstring."""

    def __init__(
        self,
        objects: Sequence[RC_Object],
        params: ParamSpec,
        terms: Terms | None = None,
        curvature: Mapping[PMono, Poly] | None = None,
        cap: Optional[int] = None,
        opaque_rules: Mapping[tuple, Optional[str]] | None = None,
        opaque_degrees: Mapping[str, MultiDegree] | None = None,
    ):
        self.objects = list(objects)
        self.params = params
        self.terms: Terms = {}
        self.cap = cap
        self.opaque_rules = dict(opaque_rules or {})
        self.opaque_degrees = dict(opaque_degrees or {})
        if terms:
            for mono, mat in terms.items():
                clean = {ij: e for ij, e in mat.items() if not e.is_zero()}
                if clean:
                    self.terms[mono] = clean
        self.curvature: dict[PMono, Poly] = {
            m: p for m, p in (curvature or {}).items() if not p.is_zero()
        }

    # -- bookkeeping ---------------------------------------------------------
    def entry_degree(self, i: int, j: int, entry: Entry) -> MultiDegree:
        """Internal degree of an entry O_j -> O_i (checks homogeneity).
        Opaque tags carry declared degrees absorbing any cross-ring shift."""
        degs = set()
        for tag, p in entry.parts.items():
            d = p.degree()
            if tag is not None:
                d = d + self.opaque_degrees[tag]
            degs.add(d.as_tuple())
        if len(degs) != 1:
            raise ValueError(f"inhomogeneous entry at ({i},{j})")
        return MultiDegree(*degs.pop())

    def check_homogeneous(self) -> None:
        from .grading import MultiDegree as MD

        t = MD(0, 0, 1)
        for mono, mat in self.terms.items():
            pdeg = pm_degree(self.params, mono)
            for (i, j), e in mat.items():
                total = (
                    self.objects[i].degree
                    - self.objects[j].degree
                    + pdeg
                    + self.entry_degree(i, j, e)
                )
                if total != t:
                    raise ValueError(
                        f"connection term at mono={mono}, ({i},{j}) has degree {total}, not t"
                    )

    def _eps(self, mono: PMono) -> list[int]:
        """Diagonal interchange signs (-1)^{<deg mono, obj degree>}."""
        pdeg = pm_degree(self.params, mono)
        return [(-1) ** parity(pdeg, o.degree) for o in self.objects]

    def _within_cap(self, mono: PMono) -> bool:
        return self.cap is None or mono.total_even_weight() <= self.cap

    # -- composition of term dictionaries ------------------------------------
    def compose_terms(self, t1: Terms, t2: Terms) -> Terms:
        """(sum of t1) o (sum of t2) as decomposed terms."""
        out: Terms = {}
        for s, A in t1.items():
            eps = self._eps(s)
            for r, B in t2.items():
                monos = pm_mul(self.params, s, r)
                if not monos:
                    continue
                # matrix product with diagonal interchange signs on B
                prod: TermMatrix = {}
                by_col: dict[int, list] = {}
                for (j, k), e in B.items():
                    by_col.setdefault(j, []).append((k, e))
                for (i, j), a in A.items():
                    for k, b in by_col.get(j, []):
                        sign = eps[j] * eps[k]
                        piece = a.compose(b, self.opaque_rules).scale(sign)
                        if piece.is_zero():
                            continue
                        prev = prod.get((i, k))
                        prod[(i, k)] = piece if prev is None else prev + piece
                for sign, mono in monos:
                    if not self._within_cap(mono):
                        continue
                    tgt = out.setdefault(mono, {})
                    for ij, e in prod.items():
                        piece = e.scale(sign)
                        if piece.is_zero():
                            continue
                        prev = tgt.get(ij)
                        tgt[ij] = piece if prev is None else prev + piece
        # drop zeros
        return {
            m: {ij: e for ij, e in mat.items() if not e.is_zero()}
            for m, mat in out.items()
            if any(not e.is_zero() for e in mat.values())
        }

    @staticmethod
    def add_terms(t1: Terms, t2: Terms, c: int = 1) -> Terms:
        out: Terms = {m: dict(mat) for m, mat in t1.items()}
        for m, mat in t2.items():
            tgt = out.setdefault(m, {})
            for ij, e in mat.items():
                piece = e.scale(c)
                prev = tgt.get(ij)
                tgt[ij] = piece if prev is None else prev + piece
        return {
            m: {ij: e for ij, e in mat.items() if not e.is_zero()}
            for m, mat in out.items()
            if any(not e.is_zero() for e in mat.values())
        }

    def square(self) -> Terms:
        return self.compose_terms(self.terms, self.terms)

    # -- reduction helpers ----------------------------------------------------
    def _entry_vanishes(self, i: int, j: int, entry: Entry, samples: int, seed: int) -> bool:
        """Does the entry act as zero O_j -> O_i?  Plain parts reduce in the
        target ring; opaque-tagged parts vanish if their scalar dies in the
        target or the source ring."""
        for tag, p in entry.parts.items():
            ring_i = self.objects[i].ring
            ring_j = self.objects[j].ring
            if tag is None:
                if not ring_i.reduces_to_zero(p):
                    return False
                if not ring_i.sampled_zero(p, samples, seed):
                    return False
            else:
                dead = (ring_i.reduces_to_zero(p) and ring_i.sampled_zero(p, samples, seed)) or (
                    ring_j.reduces_to_zero(p) and ring_j.sampled_zero(p, samples, seed)
                )
                if not dead:
                    return False
        return True

    # -- Maurer-Cartan --------------------------------------------------------
    def mc_check(self, samples: int = 20, seed: int = 0) -> CheckReport:
        """delta^2 = curvature, term by term in parameter monomials, with
        entries compared modulo each target object's relations and
        double-checked on vanishing-locus samples."""
        sq = self.square()
        monos = set(sq) | set(self.curvature)
        for mono in sorted(monos, key=repr):
            mat = sq.get(mono, {})
            fv = self.curvature.get(mono)
            for i in range(len(self.objects)):
                for j in range(len(self.objects)):
                    got = mat.get((i, j), Entry())
                    want = Entry()
                    if fv is not None and i == j:
                        want = Entry.plain(fv)
                    diff = got + (-want)
                    if diff.is_zero():
                        continue
                    if not self._entry_vanishes(i, j, diff, samples, seed):
                        return CheckReport(
                            False,
                            f"Maurer-Cartan fails at parameter monomial {mono}, "
                            f"component ({i},{j}): {diff!r}",
                        )
        return CheckReport(True)

    # -- basic constructions ---------------------------------------------------
    def copy(self) -> "CurvedComplex":
        return CurvedComplex(
            self.objects,
            self.params,
            {m: dict(mat) for m, mat in self.terms.items()},
            dict(self.curvature),
            self.cap,
            self.opaque_rules,
            self.opaque_degrees,
        )

    def shifted(self, delta: MultiDegree) -> "CurvedComplex":
        sign = shift_sign(delta)
        objects = [
            RC_Object(o.degree + delta, o.ring, o.label, o.offset) for o in self.objects
        ]
        terms = {
            m: {ij: e.scale(sign) for ij, e in mat.items()}
            for m, mat in self.terms.items()
        }
        return CurvedComplex(
            objects, self.params, terms, dict(self.curvature), self.cap,
            self.opaque_rules, self.opaque_degrees,
        )

    def twist(
        self,
        alpha: Terms,
        add_curvature: Mapping[PMono, Poly],
        check: bool = True,
        samples: int = 12,
    ) -> "CurvedComplex":
        """Add a Maurer-Cartan element to the connection."""
        new_curv: dict[PMono, Poly] = dict(self.curvature)
        for m, p in add_curvature.items():
            new_curv[m] = new_curv.get(m, Poly.zero()) + p
        out = CurvedComplex(
            self.objects,
            self.params,
            self.add_terms(self.terms, alpha),
            {m: p for m, p in new_curv.items() if not p.is_zero()},
            self.cap,
            self.opaque_rules,
            self.opaque_degrees,
        )
        if check:
            rep = out.mc_check(samples=samples)
            if not rep:
                raise ValueError(f"twist violates Maurer-Cartan: {rep.details}")
        return out

    def with_params(self, extra: ParamSpec, cap: Optional[int] = None) -> "CurvedComplex":
        return CurvedComplex(
            self.objects,
            self.params.merge(extra),
            {m: dict(mat) for m, mat in self.terms.items()},
            dict(self.curvature),
            cap if cap is not None else self.cap,
            self.opaque_rules,
            self.opaque_degrees,
        )

    # -- serialization ----------------------------------------------------------
    def to_json(self):
        def mono_json(m: PMono):
            return {
                "evens": [list(x) for x in m.evens],
                "thetas": list(m.thetas),
                "duals": list(m.duals),
            }

        return {
            "objects": [
                {
                    "degree": o.degree.to_json(),
                    "ring": o.ring.spec.name,
                    "label": o.label,
                    "qshift": o.ring.qshift,
                }
                for o in self.objects
            ],
            "params": [
                {"name": n, "degree": d.to_json(), "parity": p}
                for n, d, p in self.params.params
            ],
            "connection": [
                {
                    "monomial": mono_json(m),
                    "entries": [
                        {"row": ij[0], "col": ij[1], "entry": e.to_json()}
                        for ij, e in sorted(mat.items())
                    ],
                }
                for m, mat in sorted(self.terms.items(), key=lambda kv: repr(kv[0]))
            ],
            "curvature": [
                {"monomial": mono_json(m), "poly": p.to_json()}
                for m, p in sorted(self.curvature.items(), key=lambda kv: repr(kv[0]))
            ],
        }


# ---------------------------------------------------------------------------
# chain maps and cones


@dataclass
class ChainMap:
    """Degree-0 map between curved complexes, in decomposed form."""

    source: CurvedComplex
    target: CurvedComplex
    terms: Terms

    def is_closed(self, samples: int = 12, seed: int = 0) -> bool:
        """d_Y f - f d_X = 0 (degree-0 maps commute strictly)."""
        tgt, src = self.target, self.source
        left = tgt.compose_terms(tgt.terms, self.terms)
        right = tgt.compose_terms(self.terms, src.terms)
        diff = CurvedComplex.add_terms(left, right, -1)
        for mono, mat in diff.items():
            for (i, j), e in mat.items():
                probe = CurvedComplex(
                    [tgt.objects[i], src.objects[j]], tgt.params,
                    opaque_rules=tgt.opaque_rules, opaque_degrees=tgt.opaque_degrees,
                )
                if not probe._entry_vanishes(0, 1, e, samples, seed):
                    return False
        return True


def cone(f: ChainMap, check: bool = True) -> CurvedComplex:
    """Cone(f) = tw_f(t^{-1} X (+) Y) for a closed degree-0 map f."""
    X, Y = f.source, f.target
    if check and not f.is_closed():
        raise ValueError("cone of a non-closed map")
    shifted = X.shifted(MultiDegree(0, 0, -1))
    nx = len(shifted.objects)
    objects = list(shifted.objects) + list(Y.objects)
    terms: Terms = {}
    for m, mat in shifted.terms.items():
        terms.setdefault(m, {}).update({(i, j): e for (i, j), e in mat.items()})
    for m, mat in Y.terms.items():
        terms.setdefault(m, {}).update(
            {(i + nx, j + nx): e for (i, j), e in mat.items()}
        )
    for m, mat in f.terms.items():
        terms.setdefault(m, {}).update(
            {(i + nx, j): e for (i, j), e in mat.items()}
        )
    curv: dict[PMono, Poly] = dict(Y.curvature)
    return CurvedComplex(
        objects, Y.params.merge(X.params), terms, curv,
        Y.cap if Y.cap is not None else X.cap,
        {**X.opaque_rules, **Y.opaque_rules},
        {**X.opaque_degrees, **Y.opaque_degrees},
    )


# ---------------------------------------------------------------------------
# Koszul complexes and strict deformations


def koszul_build(
    ring: GradedRing,
    elements: Sequence[Poly],
    thetas: ParamSpec,
    base_degree: MultiDegree = MultiDegree(0, 0, 0),
    check: bool = True,
) -> CurvedComplex:
    """The Koszul complex on the rank-1 free module over `ring` for the
    commuting closed elements, twisted by sum(e_i (x) theta_i)."""
    names = thetas.odd_names()
    if len(names) != len(elements):
        raise ValueError("need one odd parameter per Koszul element")
    obj = RC_Object(base_degree, ring, "koszul")
    cx = CurvedComplex([obj], thetas)
    alpha: Terms = {}
    for name, el in zip(names, elements):
        want = MultiDegree(0, 0, 1) - thetas.degree(name)
        if not el.is_zero() and el.degree() != want:
            raise ValueError(
                f"element degree {el.degree()} does not match theta {name} "
                f"(needs {want})"
            )
        if not el.is_zero():
            alpha[PMono((), (name,), ())] = {(0, 0): Entry.plain(el)}
    return cx.twist(alpha, {}, check=check)


def strict_deformation(
    C: CurvedComplex,
    xi_list: Sequence[Terms],
    phi_list: Sequence[Poly],
    params: ParamSpec,
    check: bool = True,
    samples: int = 12,
) -> CurvedComplex:
    """tw_{sum xi_i (x) u_i}(C (x) R[params]) with curvature sum phi_i (x) u_i.

    Checks the two strictness conditions: [d, xi_i] = phi_i and the xi_i
    pairwise graded-commute.
    """
    names = [n for n, _, _ in params.params]
    if len(names) != len(xi_list) or len(xi_list) != len(phi_list):
        raise ValueError("need one parameter and one curvature per xi")
    big = C.with_params(params)
    if check:
        for idx, (xi, phi) in enumerate(zip(xi_list, phi_list)):
            pdeg = params.degree(names[idx])
            sign = (-1) ** parity(MultiDegree(0, 0, 1), MultiDegree(0, 0, 1) - pdeg)
            # [d, xi] = d xi - (-1)^{<t, deg xi>} xi d, deg xi = t - deg u
            left = big.compose_terms(big.terms, xi)
            right = big.compose_terms(xi, big.terms)
            comm = CurvedComplex.add_terms(left, right, -sign)
            expected: Terms = {
                PM_ONE: {
                    (i, i): Entry.plain(phi) for i in range(len(big.objects))
                }
            } if not phi.is_zero() else {}
            diff = CurvedComplex.add_terms(comm, expected, -1)
            for mono, mat in diff.items():
                for (i, j), e in mat.items():
                    if not big._entry_vanishes(i, j, e, samples, 0):
                        raise ValueError(
                            f"strictness condition (1) fails for xi_{idx + 1} "
                            f"at mono {mono}, component ({i},{j})"
                        )
        for idx1 in range(len(xi_list)):
            for idx2 in range(idx1 + 1, len(xi_list)):
                d1 = MultiDegree(0, 0, 1) - params.degree(names[idx1])
                d2 = MultiDegree(0, 0, 1) - params.degree(names[idx2])
                sign = (-1) ** parity(d1, d2)
                left = big.compose_terms(xi_list[idx1], xi_list[idx2])
                right = big.compose_terms(xi_list[idx2], xi_list[idx1])
                comm = CurvedComplex.add_terms(left, right, -sign)
                for mono, mat in comm.items():
                    for (i, j), e in mat.items():
                        if not big._entry_vanishes(i, j, e, samples, 0):
                            raise ValueError(
                                f"strictness condition (2) fails for pair "
                                f"({idx1 + 1},{idx2 + 1}) at ({i},{j})"
                            )
    alpha: Terms = {}
    curv: dict[PMono, Poly] = {}
    for name, xi, phi in zip(names, xi_list, phi_list):
        parity_kind = params.parity_of(name)
        mono = (
            PMono(((name, 1),), (), ())
            if parity_kind == "even"
            else PMono((), (name,), ())
        )
        for (i, j), e in xi.get(PM_ONE, {}).items():
            alpha.setdefault(mono, {})[(i, j)] = e
        if not phi.is_zero():
            curv[mono] = curv.get(mono, Poly.zero()) + phi
    return big.twist(alpha, curv, check=check, samples=samples)


# ---------------------------------------------------------------------------
# Gaussian elimination with SDR data


@dataclass
class SdrData:
    """Strong deformation retraction (f, g, h) from a big complex onto a
    smaller one: fg = id, [d, h] = id - gf, with side conditions
    h^2 = 0, f h = 0, h g = 0."""

    big: CurvedComplex
    small: CurvedComplex
    f: Terms  # big -> small
    g: Terms  # small -> big
    h: Terms  # big -> big, degree -t

    def verify(self, samples: int = 10) -> CheckReport:
        big, small = self.big, self.small

        def vanishes(terms: Terms, src: CurvedComplex, tgt: CurvedComplex) -> Optional[str]:
            for mono, mat in terms.items():
                for (i, j), e in mat.items():
                    probe = CurvedComplex(
                        [tgt.objects[i], src.objects[j]], big.params,
                        opaque_rules=big.opaque_rules, opaque_degrees=big.opaque_degrees,
                    )
                    if not probe._entry_vanishes(0, 1, e, samples, 0):
                        return f"mono {mono} component ({i},{j})"
            return None

        idm_small: Terms = {
            PM_ONE: {(i, i): Entry.plain(Poly.one()) for i in range(len(small.objects))}
        }
        idm_big: Terms = {
            PM_ONE: {(i, i): Entry.plain(Poly.one()) for i in range(len(big.objects))}
        }
        # f g = id_small
        fg = big.compose_terms(self.f, self.g)
        bad = vanishes(CurvedComplex.add_terms(fg, idm_small, -1), small, small)
        if bad:
            return CheckReport(False, f"fg != id at {bad}")
        # [d, h] = dh + hd (h has odd degree) = id - gf
        dh = big.compose_terms(big.terms, self.h)
        hd = big.compose_terms(self.h, big.terms)
        gf = big.compose_terms(self.g, self.f)
        lhs = CurvedComplex.add_terms(dh, hd)
        rhs = CurvedComplex.add_terms(idm_big, gf, -1)
        bad = vanishes(CurvedComplex.add_terms(lhs, rhs, -1), big, big)
        if bad:
            return CheckReport(False, f"[d,h] != id - gf at {bad}")
        # side conditions
        for name, terms, src, tgt in (
            ("h^2", big.compose_terms(self.h, self.h), big, big),
            ("fh", big.compose_terms(self.f, self.h), big, small),
            ("hg", big.compose_terms(self.h, self.g), small, big),
        ):
            bad = vanishes(terms, src, tgt)
            if bad:
                return CheckReport(False, f"side condition {name} fails at {bad}")
        # closedness of f and g
        df = CurvedComplex.add_terms(
            big.compose_terms(small.terms, self.f), big.compose_terms(self.f, big.terms), -1
        )
        bad = vanishes(df, big, small)
        if bad:
            return CheckReport(False, f"f not closed at {bad}")
        dg = CurvedComplex.add_terms(
            big.compose_terms(big.terms, self.g), big.compose_terms(self.g, small.terms), -1
        )
        bad = vanishes(dg, small, big)
        if bad:
            return CheckReport(False, f"g not closed at {bad}")
        return CheckReport(True)


def gaussian_eliminate(
    C: CurvedComplex, entry: tuple[int, int], verify: bool = True
) -> tuple[CurvedComplex, SdrData]:
    """Remove an invertible parameter-degree-0 component of the connection.

    entry = (row, col): the component phi: O_col -> O_row must be a nonzero
    scalar.  Returns the reduced complex on the complementary objects with
    corrected differential eps - gamma phi^{-1} kappa and the SDR realizing
    the removal.
    """
    r, c = entry
    if r == c:
        raise ValueError("cannot eliminate a diagonal component")
    mat0 = C.terms.get(PM_ONE, {})
    phi_entry = mat0.get((r, c))
    if phi_entry is None or not phi_entry.is_plain():
        raise ValueError("selected entry is not a plain parameter-degree-0 component")
    phi = C.objects[r].ring.normal_form(phi_entry.plain_part())
    scalar = phi.constant_value()
    if scalar is None or scalar == 0:
        raise ValueError(f"selected entry is not invertible: {phi!r}")
    inv = Fraction(1) / scalar

    keep = [i for i in range(len(C.objects)) if i not in (r, c)]
    reindex = {old: new for new, old in enumerate(keep)}

    # corrected differential on the complement
    new_terms: Terms = {}
    for mono, mat in C.terms.items():
        tgt = new_terms.setdefault(mono, {})
        for (i, j), e in mat.items():
            if i in (r, c) or j in (r, c):
                continue
            tgt[(reindex[i], reindex[j])] = e
    # gamma: components c -> y (out of the source of phi, excluding phi)
    # kappa: components x -> r (into the target of phi)
    gammas = {}
    kappas = {}
    for mono, mat in C.terms.items():
        for (i, j), e in mat.items():
            if j == c and i not in (r, c):
                gammas.setdefault(mono, {})[i] = e
            if i == r and j not in (r, c):
                kappas.setdefault(mono, {})[j] = e
    eps_c = C._eps
    for m1, gam in gammas.items():
        e1 = eps_c(m1)
        for m2, kap in kappas.items():
            for sign0, mono in pm_mul(C.params, m1, m2):
                if not C._within_cap(mono):
                    continue
                tgt = new_terms.setdefault(mono, {})
                for i, ge in gam.items():
                    for j, ke in kap.items():
                        sgn = sign0 * e1[c] * e1[j]
                        piece = ge.compose(ke, C.opaque_rules).scale(-inv * sgn)
                        if piece.is_zero():
                            continue
                        ij = (reindex[i], reindex[j])
                        prev = tgt.get(ij)
                        tgt[ij] = piece if prev is None else prev + piece

    reduced = CurvedComplex(
        [C.objects[i] for i in keep],
        C.params,
        new_terms,
        dict(C.curvature),
        C.cap,
        C.opaque_rules,
        C.opaque_degrees,
    )

    # SDR data: f(x->x) = id, f(r->y) = -gamma phi^{-1};
    #           g(x->x) = id, g(y->c) = -phi^{-1} kappa; h = phi^{-1}: r -> c.
    f_terms: Terms = {PM_ONE: {}}
    g_terms: Terms = {PM_ONE: {}}
    for i in keep:
        f_terms[PM_ONE][(reindex[i], i)] = Entry.plain(Poly.one())
        g_terms[PM_ONE][(i, reindex[i])] = Entry.plain(Poly.one())
    for mono, gam in gammas.items():
        tgt = f_terms.setdefault(mono, {})
        for i, ge in gam.items():
            piece = ge.scale(-inv)
            prev = tgt.get((reindex[i], r))
            tgt[(reindex[i], r)] = piece if prev is None else prev + piece
    for mono, kap in kappas.items():
        tgt = g_terms.setdefault(mono, {})
        for j, ke in kap.items():
            piece = ke.scale(-inv)
            prev = tgt.get((c, reindex[j]))
            tgt[(c, reindex[j])] = piece if prev is None else prev + piece
    h_terms: Terms = {PM_ONE: {(c, r): Entry.plain(Poly.const(inv))}}

    sdr = SdrData(C, reduced, f_terms, g_terms, h_terms)
    if verify:
        rep = sdr.verify()
        if not rep:
            raise ValueError(f"Gaussian elimination produced a bad SDR: {rep.details}")
    return reduced, sdr


# ---------------------------------------------------------------------------
# deformation transport and SDR lifting


def transport_twist(
    C: CurvedComplex,
    h: Terms,
    u_name: str,
    nilpotence: int,
    xi_old: Terms,
    xi_new: Terms,
    check: bool = True,
) -> tuple[Terms, Terms]:
    """Psi = sum h^k/k! (x) u^k and its inverse, realizing the isomorphism
    between the strict deformations by xi_old and xi_new when
    [d, h] = xi_old - xi_new, h nilpotent, and everything commutes."""
    # verify nilpotence: h^N = 0 modulo each target ring
    power: Terms = {PM_ONE: {
        (i, i): Entry.plain(Poly.one()) for i in range(len(C.objects))
    }}
    powers = [power]
    for _ in range(nilpotence):
        power = C.compose_terms(power, h)
        powers.append(power)
    for mono, mat in powers[-1].items():
        for (i, j), e in mat.items():
            if not C._entry_vanishes(i, j, e, 8, 0):
                raise ValueError(f"h^{nilpotence} does not vanish at ({i},{j})")

    def series(sign: int) -> Terms:
        out: Terms = {}
        fact = Fraction(1)
        for k in range(nilpotence):
            if k:
                fact *= k
            coeff = Fraction(sign ** k, 1) / fact
            mono = PMono(((u_name, k),), (), ()) if k else PM_ONE
            if not C._within_cap(mono):
                continue
            mat = powers[k]
            tgt = out.setdefault(mono, {})
            for ij, e in mat.get(PM_ONE, {}).items():
                piece = e.scale(coeff)
                prev = tgt.get(ij)
                tgt[ij] = piece if prev is None else prev + piece
        return out

    psi, psi_inv = series(1), series(-1)
    if check:
        comp = C.compose_terms(psi, psi_inv)
        idm: Terms = {PM_ONE: {
            (i, i): Entry.plain(Poly.one()) for i in range(len(C.objects))
        }}
        diff = CurvedComplex.add_terms(comp, idm, -1)
        for mono, mat in diff.items():
            if mono.total_even_weight() >= nilpotence:
                continue  # truncation artifacts beyond the nilpotence bound
            for (i, j), e in mat.items():
                if not C._entry_vanishes(i, j, e, 8, 0):
                    raise ValueError(
                        f"Psi Psi^-1 != id at mono {mono}, ({i},{j})"
                    )
    return psi, psi_inv


def conjugate_connection(C: CurvedComplex, psi: Terms, psi_inv: Terms) -> Terms:
    """Psi o delta o Psi^{-1} as decomposed terms."""
    return C.compose_terms(psi, C.compose_terms(C.terms, psi_inv))


def hpt_conjugate(
    f: Terms,
    g: Terms,
    source: CurvedComplex,
    target: CurvedComplex,
    alpha: Terms,
    add_curvature: Mapping[PMono, Poly],
) -> CurvedComplex:
    """Transport a Maurer-Cartan element along an isomorphism (f, g):
    tw_alpha(X) ~ tw_{f alpha g}(Y); Maurer-Cartan of f alpha g is verified
    by the twist constructor."""
    falphag = target.compose_terms(f, target.compose_terms(alpha, g))
    return target.twist(falphag, add_curvature)


def sdr_lift(
    sdr: SdrData,
    xi_list: Sequence[Terms],
    phi_list: Sequence[Poly],
    params: ParamSpec,
) -> tuple[list[Terms], SdrData]:
    """Lift a deforming family along an SDR: xi'_i = g xi_i f + phi_i h on
    the big complex; assert h xi' = xi' h = 0 and f xi' g = xi_i; return
    the lifted family and the SDR between the strict deformations."""
    big, small = sdr.big, sdr.small
    lifted: list[Terms] = []
    for xi, phi in zip(xi_list, phi_list):
        gxf = big.compose_terms(sdr.g, big.compose_terms(xi, sdr.f))
        phih = {
            mono: {ij: e.times_poly(phi) for ij, e in mat.items()}
            for mono, mat in sdr.h.items()
        } if not phi.is_zero() else {}
        xi_p = CurvedComplex.add_terms(gxf, phih)
        lifted.append(xi_p)
        for name, comp in (
            ("h xi'", big.compose_terms(sdr.h, xi_p)),
            ("xi' h", big.compose_terms(xi_p, sdr.h)),
        ):
            for mono, mat in comp.items():
                for (i, j), e in mat.items():
                    if not big._entry_vanishes(i, j, e, 8, 0):
                        raise ValueError(f"lifting identity {name} = 0 fails at ({i},{j})")
        fxg = big.compose_terms(sdr.f, big.compose_terms(xi_p, sdr.g))
        diff = CurvedComplex.add_terms(fxg, xi, -1)
        for mono, mat in diff.items():
            for (i, j), e in mat.items():
                if not big._entry_vanishes(i, j, e, 8, 0):
                    raise ValueError(f"lifting identity f xi' g = xi fails at ({i},{j})")

    big_def = strict_deformation(big, lifted, list(phi_list), params, check=True)
    small_def = strict_deformation(small, list(xi_list), list(phi_list), params, check=True)
    lifted_sdr = SdrData(big_def, small_def, sdr.f, sdr.g, sdr.h)
    rep = lifted_sdr.verify()
    if not rep:
        raise ValueError(f"lifted SDR fails: {rep.details}")
    return lifted, lifted_sdr


# ---------------------------------------------------------------------------
# truncated homology


def _module_monomials(params: ParamSpec, cap: Optional[int], t_lo: int, t_hi: int):
    """Dual-free parameter monomials whose degree can matter in [t_lo, t_hi]."""
    odds = params.odd_names()
    evens = params.even_names()
    even_degs = {n: params.degree(n) for n in evens}
    odd_degs = {n: params.degree(n) for n in odds}
    max_exp = {}
    for n in evens:
        dt = even_degs[n].t
        max_exp[n] = (max(t_hi, 0)) // dt + 1 if dt > 0 else (cap or 0)
        if cap is not None:
            max_exp[n] = min(max_exp[n], cap)
    out = []
    for subset in itertools.chain.from_iterable(
        itertools.combinations(odds, k) for k in range(len(odds) + 1)
    ):
        ranges = [range(max_exp[n] + 1) for n in evens]
        for exps in itertools.product(*ranges):
            total = sum(exps)
            if cap is not None and total > cap:
                continue
            mono = pm_from({n: e for n, e in zip(evens, exps)}, subset)
            d = pm_degree(params, mono)
            if d.t > t_hi + 1:
                continue
            out.append((mono, d))
    return out


def homology_truncated(C: CurvedComplex, window: Window, samples: int = 8) -> TriSeries:
    """Graded dimensions of ker/im of the unrolled connection, per
    multidegree in the window.  Requires curvature that reduces to zero in
    every object's ring."""
    for mono, p in C.curvature.items():
        for o in C.objects:
            if not (o.ring.reduces_to_zero(p) and o.ring.sampled_zero(p, samples)):
                raise ValueError(
                    "homology of a complex with non-vanishing curvature "
                    f"(monomial {mono})"
                )
        # entries must be plain to act on monomial bases
    for mono, mat in C.terms.items():
        for ij, e in mat.items():
            if not e.is_plain():
                raise ValueError("homology with opaque entries is not defined")
    rings = {id(o.ring) for o in C.objects}
    if len(rings) > 1:
        raise ValueError("homology_truncated expects all objects over one ring")

    monos = _module_monomials(C.params, C.cap, window.t[0] - 1, window.t[1] + 1)
    # summands: (obj index, module monomial) with total degree shift
    summands = []
    for oi, o in enumerate(C.objects):
        for mono, mdeg in monos:
            summands.append((oi, mono, o.degree + mdeg))

    # ring pieces contribute only nonnegative even q; group summands by (a, t)
    def piece_dims(g: MultiDegree) -> list[tuple[int, PMono, int, int]]:
        """(obj, mono, local qdeg, dim) blocks contributing at degree g."""
        out = []
        for oi, mono, base in summands:
            if base.a != g.a or base.t != g.t:
                continue
            local = g.q - base.q
            d = C.objects[oi].ring.dim(local)
            if d:
                out.append((oi, mono, local, d))
        return out

    # matrix of the connection from degree g to g + t
    eps_cache: dict[PMono, list[int]] = {}

    def eps(mono: PMono) -> list[int]:
        if mono not in eps_cache:
            eps_cache[mono] = C._eps(mono)
        return eps_cache[mono]

    diff_cache: dict[tuple[int, int, int], tuple] = {}

    def differential(g: MultiDegree):
        key = g.as_tuple()
        if key in diff_cache:
            return diff_cache[key]
        src = piece_dims(g)
        tgt = piece_dims(g + MultiDegree(0, 0, 1))
        src_off = {}
        off = 0
        for oi, mono, local, d in src:
            src_off[(oi, mono)] = (off, local)
            off += d
        ncols = off
        tgt_off = {}
        off = 0
        for oi, mono, local, d in tgt:
            tgt_off[(oi, mono)] = (off, local)
            off += d
        nrows = off
        rows: dict[int, dict[int, Fraction]] = {}
        for s_mono, mat in C.terms.items():
            for (i, j), e in mat.items():
                p = e.plain_part()
                if p.is_zero():
                    continue
                pq = p.degree().q
                for (oj, vm), (coff, local) in src_off.items():
                    if oj != j:
                        continue
                    sgn = eps(s_mono)[j]
                    for msign, new_mono in pm_mul(C.params, s_mono, vm):
                        if new_mono.duals:
                            continue  # kills the cyclic generator
                        hit = tgt_off.get((i, new_mono))
                        if hit is None:
                            continue
                        roff, tlocal = hit
                        if tlocal != local + pq:
                            raise AssertionError("graded bookkeeping mismatch")
                        mm = C.objects[i].ring.mult_matrix(p, local)
                        for (rr, cc), val in mm.items():
                            v = val * msign * sgn
                            if not v:
                                continue
                            row = rows.setdefault(rr + roff, {})
                            row[cc + coff] = row.get(cc + coff, Fraction(0)) + v
        # clean zeros
        clean = {}
        for r, row in rows.items():
            row = {c: v for c, v in row.items() if v}
            if row:
                clean[r] = row
        diff_cache[key] = (clean, nrows, ncols)
        return diff_cache[key]

    coeffs: dict[tuple[int, int, int], Fraction] = {}
    for a_exp in range(window.a[0], window.a[1] + 1):
        for t_exp in range(window.t[0], window.t[1] + 1):
            for q_exp in range(window.q[0], window.q[1] + 1):
                g = MultiDegree(a_exp, q_exp, t_exp)
                d_out, _, ncols = differential(g)
                if ncols == 0:
                    continue
                d_in, _, nin = differential(g - MultiDegree(0, 0, 1))
                # rank of incoming, kernel of outgoing
                cols_out: dict[int, dict] = {}
                for r, row in d_out.items():
                    for cidx, v in row.items():
                        cols_out.setdefault(cidx, {})[r] = v
                rank_out = rank_of(cols_out.values())
                ker = ncols - rank_out
                cols_in: dict[int, dict] = {}
                for r, row in d_in.items():
                    for cidx, v in row.items():
                        cols_in.setdefault(cidx, {})[r] = v
                rank_in = rank_of(cols_in.values())
                dim = ker - rank_in
                if dim:
                    coeffs[(a_exp, q_exp, t_exp)] = Fraction(dim)
    return TriSeries(window, coeffs)
