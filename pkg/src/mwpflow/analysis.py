"""The derivation engine.

Each function body is folded into a single choice matrix: assignments
replace one column with the expression's vector, sequences multiply,
branches of a conditional join by entry-wise max over independent choice
indices, and the two iteration rules close the body matrix and then top
the cells that break the polynomial-growth argument with INF.  Every
INF-bearing monomial is mirrored into the run's delta graph the moment
it is created, so the qualitative verdict is available without touching
the assignment space.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Sequence

from .delta_graph import DeltaGraph
from .frontend import (
    Assign,
    Call,
    Command,
    Expr,
    FunctionDecl,
    If,
    Loop,
    Program,
    Var,
    While,
    variable_order,
)
from .polynomial import (
    Assignment,
    ChoiceMatrix,
    ChoiceRegistry,
    Delta,
    INF_POLY,
    Monomial,
    Polynomial,
    UNIT_POLY,
    ZERO_POLY,
)
from .semiring import INF, M, P, W, ZERO, FlowMatrix

BOUNDED = "bounded"
CONDITIONALLY_BOUNDED = "conditionally_bounded"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class FunctionSummary:
    """Deduplicated INF-free input-to-return dependency vectors.

    Rows are the callee's parameters followed by its shared input
    variables (everything it reads from the enclosing scope).  The
    return variable's own initial value is excluded: inlining renames it
    to a fresh name the caller never observes.  Each behavior remembers
    the lexicographically smallest assignment that produces it.
    """

    name: str
    param_count: int
    rows: tuple[str, ...]
    behaviors: tuple[tuple[int, ...], ...]
    representatives: tuple[Assignment, ...]

    @property
    def shared_rows(self) -> tuple[str, ...]:
        return self.rows[self.param_count:]


@dataclass
class FunctionAnalysis:
    name: str
    variables: tuple[str, ...]
    registry: ChoiceRegistry
    matrix: ChoiceMatrix
    graph: DeltaGraph
    inserted: tuple[tuple[Delta, ...], ...]
    verdict: str
    sample: Assignment | None
    blame: tuple[tuple[str, str], ...]
    summary: FunctionSummary | None
    clean_count: int | None
    total_assignments: int
    choice_sites: dict[int, int]  # id(AST node) -> first choice index it allocated
    elapsed: float


@dataclass
class ProgramAnalysis:
    functions: dict[str, FunctionAnalysis]

    def __iter__(self):
        return iter(self.functions.values())

    @property
    def any_unbounded(self) -> bool:
        return any(f.verdict == UNBOUNDED for f in self)


class _FunctionRun:
    def __init__(self, decl: FunctionDecl, summaries: dict[str, FunctionSummary]):
        self.decl = decl
        self.summaries = summaries
        self.registry = ChoiceRegistry()
        self.graph = DeltaGraph(self.registry)
        self.inserted: list[tuple[Delta, ...]] = []
        self.choice_sites: dict[int, int] = {}
        self.variables = variable_order(decl, self._call_rows)
        self.index = {v: i for i, v in enumerate(self.variables)}

    def _call_rows(self, fname: str) -> tuple[str, ...]:
        return self.summaries[fname].shared_rows

    # -- expressions ---------------------------------------------------

    def vector_of(self, e: Expr) -> list[Polynomial]:
        n = len(self.variables)
        if isinstance(e, Var):
            v = [ZERO_POLY] * n
            v[self.index[e.name]] = UNIT_POLY
            return v
        v1 = self.vector_of(e.left)
        v2 = self.vector_of(e.right)
        joined = [a + b for a, b in zip(v1, v2)]
        if e.op == "*":
            return [p.scale(W) for p in joined]
        # Additive operator: three ways to distribute the polynomial
        # penalty, tracked under a fresh three-valued choice index.
        j = self.registry.fresh(3)
        self.choice_sites.setdefault(id(e), j)
        branch0 = [a + b.scale(P) for a, b in zip(v1, v2)]
        branch1 = [a.scale(P) + b for a, b in zip(v1, v2)]
        branch2 = [p.scale(W) for p in joined]
        return [
            b0.attach(j, 0) + b1.attach(j, 1) + b2.attach(j, 2)
            for b0, b1, b2 in zip(branch0, branch1, branch2)
        ]

    # -- commands -------------------------------------------------------

    def matrix_of_body(self, body: Sequence[Command]) -> ChoiceMatrix:
        out: ChoiceMatrix | None = None
        for c in body:
            m = self.matrix_of(c)
            out = m if out is None else out * m
        if out is None:
            return ChoiceMatrix.identity(self.variables, self.registry)
        return out

    def matrix_of(self, c: Command) -> ChoiceMatrix:
        if isinstance(c, Assign):
            column = self.vector_of(c.value)
            base = ChoiceMatrix.identity(self.variables, self.registry)
            return base.replace_column(self.index[c.target], column)
        if isinstance(c, Call):
            return self._call_matrix(c)
        if isinstance(c, If):
            return self.matrix_of_body(c.then_body) + self.matrix_of_body(c.else_body)
        if isinstance(c, While):
            return self._iterate(self.matrix_of_body(c.body), counter=None)
        if isinstance(c, Loop):
            return self._iterate(self.matrix_of_body(c.body), counter=self.index[c.counter])
        raise TypeError(f"unknown command {c!r}")

    def _record_inf(self, deltas: tuple[Delta, ...]) -> None:
        self.inserted.append(deltas)
        self.graph.insert(deltas)

    def _iterate(self, body: ChoiceMatrix, counter: int | None) -> ChoiceMatrix:
        """Apply the iteration rule to a closed body matrix.

        Both rules top every diagonal entry that can exceed m with INF.
        A counted loop additionally marks the counter's polynomial
        influence on every column that holds a p somewhere; an
        unbounded while tops those p cells themselves.
        """
        star = body.closure()
        n = star.dim
        extra: list[list[list[Monomial]]] = [[[] for _ in range(n)] for _ in range(n)]
        for j in range(n):
            for m in star.entry(j, j).monomials:
                if m.scalar > M:
                    extra[j][j].append(Monomial(INF, m.deltas))
                    self._record_inf(m.deltas)
        if counter is None:
            for i in range(n):
                for j in range(n):
                    for m in star.entry(i, j).monomials:
                        if m.scalar == P:
                            extra[i][j].append(Monomial(INF, m.deltas))
                            self._record_inf(m.deltas)
        else:
            for j in range(n):
                hits = [
                    Monomial(P, m.deltas)
                    for i in range(n)
                    for m in star.entry(i, j).monomials
                    if m.scalar == P
                ]
                if hits:
                    extra[counter][j].extend(hits)
        rows = []
        for i in range(n):
            rows.append(tuple(
                star.entry(i, j) + Polynomial.of(extra[i][j]) if extra[i][j]
                else star.entry(i, j)
                for j in range(n)
            ))
        return ChoiceMatrix(self.variables, rows, self.registry)

    def _call_matrix(self, c: Call) -> ChoiceMatrix:
        summary = self.summaries[c.function]
        base = ChoiceMatrix.identity(self.variables, self.registry)
        target = self.index[c.target]
        row_targets = [self.index[a] for a in c.arguments]
        row_targets += [self.index[v] for v in summary.shared_rows]
        column = [ZERO_POLY] * len(self.variables)
        if not summary.behaviors:
            # A callee with no growth certificate cannot confer one: every
            # input floods the target with INF, unconditionally.
            self._record_inf(())
            for r in row_targets:
                column[r] = INF_POLY
            return base.replace_column(target, column)
        j = self.registry.fresh(len(summary.behaviors))
        self.choice_sites.setdefault(id(c), j)
        for b, behavior in enumerate(summary.behaviors):
            for r, flow in zip(row_targets, behavior):
                if flow != ZERO:
                    column[r] = column[r] + Polynomial.const(flow).attach(j, b)
        return base.replace_column(target, column)

    # -- results ---------------------------------------------------------

    def finish(self, fast: bool, want_summary: bool) -> FunctionAnalysis:
        start = time.perf_counter()
        matrix = self.matrix_of_body(self.decl.body)
        total = self.registry.count_assignments()
        clean_count: int | None = None
        sample: Assignment | None = None
        summary: FunctionSummary | None = None

        if not self.inserted:
            verdict = BOUNDED
        elif self.graph.is_complete():
            verdict = UNBOUNDED
        else:
            verdict = CONDITIONALLY_BOUNDED

        need_enumeration = (not fast) or (want_summary and self.decl.returns is not None)
        if need_enumeration:
            clean = self._clean_assignments(matrix, full_scan=not fast)
            if not fast:
                clean_count = len(clean)
                enum_verdict = (
                    BOUNDED if not self.inserted
                    else (UNBOUNDED if not clean else CONDITIONALLY_BOUNDED)
                )
                verdict = enum_verdict
            if clean:
                sample = clean[0]
            if want_summary and self.decl.returns is not None:
                summary = self._build_summary(matrix, clean)
        if sample is None and verdict != UNBOUNDED:
            sample = self.graph.find_uncovered()

        blame = tuple(
            (self.variables[i], self.variables[j]) for i, j in matrix.inf_cells()
        )
        return FunctionAnalysis(
            name=self.decl.name,
            variables=self.variables,
            registry=self.registry,
            matrix=matrix,
            graph=self.graph,
            inserted=tuple(self.inserted),
            verdict=verdict,
            sample=sample,
            blame=blame,
            summary=summary,
            clean_count=clean_count,
            total_assignments=total,
            choice_sites=self.choice_sites,
            elapsed=time.perf_counter() - start,
        )

    def _clean_assignments(
        self, matrix: ChoiceMatrix, full_scan: bool
    ) -> list[Assignment]:
        """INF-free assignments, in lexicographic order.

        The full scan evaluates the matrix at every assignment; the
        cheap path trusts the delta graph, which records exactly the
        poisoned cylinders.
        """
        clean = []
        if full_scan:
            for a in self.registry.assignments():
                if not matrix.evaluate(a).contains_inf():
                    clean.append(a)
        else:
            for a in self.registry.assignments():
                if not self.graph.covered(a):
                    clean.append(a)
        return clean

    def _build_summary(
        self, matrix: ChoiceMatrix, clean: Iterable[Assignment]
    ) -> FunctionSummary:
        decl = self.decl
        ret = self.index[decl.returns]
        shared = tuple(
            v for v in self.variables
            if v not in decl.params and v != decl.returns
        )
        rows = decl.params + shared
        row_idx = [self.index[v] for v in rows]
        behaviors: list[tuple[int, ...]] = []
        reps: list[Assignment] = []
        for a in clean:
            vec = tuple(matrix.entry(i, ret).evaluate(a) for i in row_idx)
            if vec not in behaviors:
                behaviors.append(vec)
                reps.append(a)
        return FunctionSummary(
            name=decl.name,
            param_count=len(decl.params),
            rows=rows,
            behaviors=tuple(behaviors),
            representatives=tuple(reps),
        )


def _called_functions(program: Program) -> set[str]:
    from .frontend import _walk_commands

    called = set()
    for decl in program.functions:
        for cmd in _walk_commands(decl.body):
            if isinstance(cmd, Call):
                called.add(cmd.function)
    return called


def analyze_program(program: Program, fast: bool = False) -> ProgramAnalysis:
    """Analyze every function in declaration order, threading summaries.

    The result is a pure function of the AST: choice indices are
    allocated depth-first over each body, so repeated runs are
    identical.  With fast=True the per-assignment scan is skipped and
    verdicts come straight from the delta graph; summaries are still
    computed for functions that are actually called.
    """
    called = _called_functions(program)
    summaries: dict[str, FunctionSummary] = {}
    results: dict[str, FunctionAnalysis] = {}
    for decl in program.functions:
        run = _FunctionRun(decl, summaries)
        want_summary = (not fast) or decl.name in called
        analysis = run.finish(fast=fast, want_summary=want_summary)
        if analysis.summary is not None:
            summaries[decl.name] = analysis.summary
        results[decl.name] = analysis
    return ProgramAnalysis(results)


def analyze_function(
    decl: FunctionDecl, summaries: dict[str, FunctionSummary] | None = None
) -> FunctionAnalysis:
    """Analyze a single declaration against already-known summaries."""
    run = _FunctionRun(decl, summaries or {})
    return run.finish(fast=False, want_summary=True)


def evaluate(matrix: ChoiceMatrix, assignment: Sequence[int]) -> FlowMatrix:
    return matrix.evaluate(assignment)
