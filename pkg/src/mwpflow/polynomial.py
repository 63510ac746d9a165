"""Choice polynomials: functions from branch assignments to flow scalars.

A delta generator d(v, j) is worth m on assignments whose pick at choice
index j equals v, and 0 elsewhere.  A monomial is a scalar times a
product of deltas over distinct indices; it denotes a cylinder of the
assignment space carrying that scalar.  A polynomial is an ordered sum
(pointwise max) of monomials and represents one coefficient of an
analysis matrix.

Deltas are stored as (index, value) pairs so the natural tuple order is
the canonical one: deltas inside a monomial sort by index, monomials
compare lexicographically by their delta lists with shorter prefixes
first.  That order makes multiplication by a fixed monomial monotone,
which is what lets products be built by merging already-sorted streams
instead of sorting from scratch.
"""

from __future__ import annotations

import heapq
import itertools
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .semiring import INF, M, ZERO, FlowMatrix, mul_inf, value_char

Delta = tuple[int, int]  # (choice index, chosen value)

Assignment = tuple[int, ...]


def delta(value: int, index: int) -> Delta:
    """Build a delta in the conventional d(value, index) argument order."""
    return (index, value)


class Monomial(NamedTuple):
    scalar: int
    deltas: tuple[Delta, ...]

    def matches(self, assignment: Sequence[int]) -> bool:
        return all(assignment[i] == v for i, v in self.deltas)

    def render(self) -> str:
        parts = [value_char(self.scalar)]
        parts.extend(f"δ({v},{i})" for i, v in self.deltas)
        return ".".join(parts)


def mono_mul(a: Monomial, b: Monomial) -> Monomial | None:
    """Product of two finite monomials; None when their deltas conflict.

    Deltas at the same index with different values select disjoint
    cylinders, so the product vanishes.
    """
    da, db = a.deltas, b.deltas
    out: list[Delta] = []
    i = j = 0
    while i < len(da) and j < len(db):
        x, y = da[i], db[j]
        if x[0] == y[0]:
            if x[1] != y[1]:
                return None
            out.append(x)
            i += 1
            j += 1
        elif x[0] < y[0]:
            out.append(x)
            i += 1
        else:
            out.append(y)
            j += 1
    out.extend(da[i:])
    out.extend(db[j:])
    return Monomial(mul_inf(a.scalar, b.scalar), tuple(out))


def _merge_duplicates(sorted_monos: Iterable[Monomial]) -> list[Monomial]:
    out: list[Monomial] = []
    for m in sorted_monos:
        if m.scalar == ZERO:
            continue
        if out and out[-1].deltas == m.deltas:
            if m.scalar > out[-1].scalar:
                out[-1] = m
        else:
            out.append(m)
    return out


def _subsume(monos: list[Monomial]) -> list[Monomial]:
    """Drop monomials whose delta list extends another's with <= scalar."""
    if len(monos) < 2:
        return monos
    sets = [frozenset(m.deltas) for m in monos]
    kept: list[Monomial] = []
    for i, m in enumerate(monos):
        si = sets[i]
        dominated = any(
            j != i
            and m.scalar <= monos[j].scalar
            and len(sets[j]) < len(si)
            and sets[j] <= si
            for j in range(len(monos))
        )
        if not dominated:
            kept.append(m)
    return kept


class Polynomial:
    """Canonical ordered sum of monomials, evaluated as pointwise max."""

    __slots__ = ("monomials",)

    def __init__(self, monomials: tuple[Monomial, ...] = ()):
        self.monomials = monomials

    @classmethod
    def of(cls, monomials: Iterable[Monomial]) -> "Polynomial":
        ms = sorted(monomials, key=lambda m: m.deltas)
        return cls(tuple(_subsume(_merge_duplicates(ms))))

    @classmethod
    def const(cls, scalar: int) -> "Polynomial":
        if scalar == ZERO:
            return ZERO_POLY
        return cls((Monomial(scalar, ()),))

    @property
    def is_zero(self) -> bool:
        return not self.monomials

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Polynomial) and self.monomials == other.monomials

    def __hash__(self) -> int:
        return hash(self.monomials)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if not self.monomials:
            return other
        if not other.monomials:
            return self
        merged = heapq.merge(self.monomials, other.monomials, key=lambda m: m.deltas)
        return Polynomial(tuple(_subsume(_merge_duplicates(merged))))

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        """Pointwise product.

        Finite monomials multiply pairwise, one product stream per
        monomial of the right factor, and the streams are k-way merged
        by repeatedly extracting the smallest head.  Multiplying by a
        fixed monomial preserves the order of equal-index-set monomials
        but can reorder across index sets, so the merged stream is
        nearly sorted rather than sorted; canonicalization re-sorts,
        which is close to linear on such input.  INF monomials bypass
        the pairwise step entirely: an INF cylinder absorbs whatever the
        other factor holds there, 0 included, so it survives verbatim.
        """
        streams: list = []
        inf_side: list[Monomial] = []
        fin_p: list[Monomial] = []
        for m in self.monomials:
            (inf_side if m.scalar == INF else fin_p).append(m)
        for q in other.monomials:
            if q.scalar == INF:
                inf_side.append(q)
                continue
            prods = [r for p in fin_p if (r := mono_mul(p, q)) is not None]
            if prods:
                streams.append(prods)
        if inf_side:
            streams.append(sorted(inf_side, key=lambda m: m.deltas))
        if not streams:
            return ZERO_POLY
        merged = heapq.merge(*streams, key=lambda m: m.deltas)
        return Polynomial.of(merged)

    def scale(self, scalar: int) -> "Polynomial":
        if scalar == ZERO:
            return ZERO_POLY
        scaled = [Monomial(mul_inf(scalar, m.scalar), m.deltas) for m in self.monomials]
        return Polynomial(tuple(_subsume(scaled)))

    def attach(self, index: int, value: int) -> "Polynomial":
        """Multiply by the single delta d(value, index).

        Only valid when index is fresh (larger than any index already
        used), which keeps every monomial sorted by plain appending.
        """
        d = (index, value)
        monos = tuple(Monomial(m.scalar, m.deltas + (d,)) for m in self.monomials)
        return Polynomial(monos)

    def evaluate(self, assignment: Sequence[int]) -> int:
        best = ZERO
        try:
            for m in self.monomials:
                if m.scalar > best and m.matches(assignment):
                    best = m.scalar
                    if best == INF:
                        break
        except IndexError:
            raise ValueError("assignment does not cover every choice index") from None
        return best

    def choice_indices(self) -> set[int]:
        return {i for m in self.monomials for i, _ in m.deltas}

    def has_inf(self) -> bool:
        return any(m.scalar == INF for m in self.monomials)

    def __str__(self) -> str:
        if not self.monomials:
            return "0"
        return "+".join(m.render() for m in self.monomials)

    def __repr__(self) -> str:
        return f"Polynomial({self})"


ZERO_POLY = Polynomial(())
UNIT_POLY = Polynomial((Monomial(M, ()),))
INF_POLY = Polynomial((Monomial(INF, ()),))


class ChoiceRegistry:
    """Ordered choice-point domains: index -> cardinality of its branch set.

    Expression branching registers domains of size 3; a call registers
    one domain per known callee behavior.  Grows during an analysis run;
    cardinalities of existing indices never change.
    """

    def __init__(self, cardinalities: Iterable[int] = ()):
        self._cards = list(cardinalities)
        if any(c < 1 for c in self._cards):
            raise ValueError("every choice domain needs cardinality >= 1")

    def fresh(self, cardinality: int) -> int:
        if cardinality < 1:
            raise ValueError("every choice domain needs cardinality >= 1")
        self._cards.append(cardinality)
        return len(self._cards) - 1

    def cardinality(self, index: int) -> int:
        return self._cards[index]

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(self._cards)

    def __len__(self) -> int:
        return len(self._cards)

    def count_assignments(self) -> int:
        n = 1
        for c in self._cards:
            n *= c
        return n

    def assignments(self) -> Iterator[Assignment]:
        return itertools.product(*(range(c) for c in self._cards))

    def validate(self, assignment: Sequence[int]) -> None:
        if len(assignment) != len(self._cards):
            raise ValueError(
                f"assignment length {len(assignment)} != {len(self._cards)} choice points"
            )
        for j, (v, c) in enumerate(zip(assignment, self._cards)):
            if not 0 <= v < c:
                raise ValueError(f"pick {v} out of range for choice {j} (domain {c})")


class ChoiceMatrix:
    """Square matrix of choice polynomials with a named variable order."""

    __slots__ = ("variables", "entries", "registry")

    def __init__(
        self,
        variables: Sequence[str],
        entries: Iterable[Iterable[Polynomial]],
        registry: ChoiceRegistry,
    ):
        self.variables = tuple(variables)
        self.entries = tuple(tuple(row) for row in entries)
        self.registry = registry
        n = len(self.variables)
        if len(self.entries) != n or any(len(r) != n for r in self.entries):
            raise ValueError("matrix shape must match the variable list")

    @classmethod
    def identity(cls, variables: Sequence[str], registry: ChoiceRegistry) -> "ChoiceMatrix":
        n = len(variables)
        return cls(
            variables,
            [[UNIT_POLY if i == j else ZERO_POLY for j in range(n)] for i in range(n)],
            registry,
        )

    @property
    def dim(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name}") from None

    def entry(self, i: int, j: int) -> Polynomial:
        return self.entries[i][j]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ChoiceMatrix)
            and self.variables == other.variables
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        return hash((self.variables, self.entries))

    def _check_compatible(self, other: "ChoiceMatrix") -> None:
        if self.variables != other.variables:
            raise ValueError("variable orders differ")
        if self.registry is not other.registry:
            raise ValueError("matrices belong to different analyses")

    def __add__(self, other: "ChoiceMatrix") -> "ChoiceMatrix":
        self._check_compatible(other)
        return ChoiceMatrix(
            self.variables,
            (tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)),
            self.registry,
        )

    def __mul__(self, other: "ChoiceMatrix") -> "ChoiceMatrix":
        self._check_compatible(other)
        n = self.dim
        cols = tuple(zip(*other.entries))
        out = []
        for row in self.entries:
            new_row = []
            for col in cols:
                acc = ZERO_POLY
                for k in range(n):
                    a, b = row[k], col[k]
                    if a.is_zero and b.is_zero:
                        continue
                    acc = acc + a * b
                new_row.append(acc)
            out.append(tuple(new_row))
        return ChoiceMatrix(self.variables, out, self.registry)

    def closure(self) -> "ChoiceMatrix":
        s = ChoiceMatrix.identity(self.variables, self.registry) + self
        while True:
            nxt = s + s * self
            if nxt == s:
                return s
            s = nxt

    def replace_column(self, j: int, column: Sequence[Polynomial]) -> "ChoiceMatrix":
        if len(column) != self.dim:
            raise ValueError("column length mismatch")
        return ChoiceMatrix(
            self.variables,
            (
                tuple(column[i] if c == j else row[c] for c in range(self.dim))
                for i, row in enumerate(self.entries)
            ),
            self.registry,
        )

    def evaluate(self, assignment: Sequence[int]) -> FlowMatrix:
        """Collapse to a plain flow matrix by fixing every branch pick."""
        self.registry.validate(assignment)
        return FlowMatrix(
            tuple(p.evaluate(assignment) for p in row) for row in self.entries
        )

    def expand(self) -> dict[Assignment, FlowMatrix]:
        """The full assignment -> flow-matrix view of this matrix."""
        return {a: self.evaluate(a) for a in self.registry.assignments()}

    @classmethod
    def from_tables(
        cls,
        variables: Sequence[str],
        registry: ChoiceRegistry,
        table: Mapping[Assignment, FlowMatrix],
    ) -> "ChoiceMatrix":
        """Inverse of expand: rebuild entry polynomials from a full table.

        Starts from one fully-constrained monomial per assignment and
        fuses complete equal-scalar fans back together, so constant
        behavior collapses to delta-free monomials.
        """
        n = len(variables)
        entries = []
        for i in range(n):
            row = []
            for j in range(n):
                monos = []
                for a, mat in table.items():
                    v = mat.entry(i, j)
                    if v != ZERO:
                        ds = tuple((idx, pick) for idx, pick in enumerate(a))
                        monos.append(Monomial(v, ds))
                row.append(_fuse_fans(Polynomial.of(monos), registry))
            entries.append(tuple(row))
        return cls(variables, entries, registry)

    def inf_cells(self) -> list[tuple[int, int]]:
        return [
            (i, j)
            for i in range(self.dim)
            for j in range(self.dim)
            if self.entries[i][j].has_inf()
        ]

    def submatrix(self, names: Sequence[str]) -> "ChoiceMatrix":
        idx = [self.index(v) for v in names]
        return ChoiceMatrix(
            tuple(names),
            (tuple(self.entries[i][j] for j in idx) for i in idx),
            self.registry,
        )

    def render(self) -> str:
        return "\n".join(
            " | ".join(str(p) for p in row) for row in self.entries
        )


def _fuse_fans(poly: Polynomial, registry: ChoiceRegistry) -> Polynomial:
    monos = list(poly.monomials)
    changed = True
    while changed:
        changed = False
        present = {(m.scalar, m.deltas) for m in monos}
        for m in monos:
            for pos, (idx, _) in enumerate(m.deltas):
                card = registry.cardinality(idx)
                rest = m.deltas[:pos] + m.deltas[pos + 1 :]
                fan = [
                    Monomial(m.scalar, m.deltas[:pos] + ((idx, k),) + m.deltas[pos + 1 :])
                    for k in range(card)
                ]
                if all((f.scalar, f.deltas) in present for f in fan):
                    keep = [x for x in monos if x not in fan]
                    keep.append(Monomial(m.scalar, rest))
                    monos = list(Polynomial.of(keep).monomials)
                    changed = True
                    break
            if changed:
                break
    return Polynomial.of(monos)
