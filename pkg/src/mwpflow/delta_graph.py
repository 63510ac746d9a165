"""Layered record of the monomials that acquired an infinite coefficient.

Vertices are delta lists, grouped in layers by length.  A stored list
covers the cylinder of assignments it matches; the graph as a whole
covers every assignment for which the analysis produced INF somewhere.
Whenever all siblings of a vertex across one choice index are covered,
the whole fan fuses into the list with that delta removed, so typical
complete covers collapse to the single empty list.  Deciding coverage
of the full space is hard in general, so is_complete backs the fused
fast path with a backtracking search for an uncovered assignment; the
search doubles as the supplier of sample assignments and prunes whole
subtrees on matched vertices, so nothing ever enumerates the space.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

from .polynomial import Assignment, ChoiceRegistry, Delta


class DeltaGraph:
    """Mutable accumulator owned by one analysis run."""

    def __init__(self, registry: ChoiceRegistry):
        self.registry = registry
        self._layers: dict[int, set[tuple[Delta, ...]]] = {}
        self.insert_count = 0

    def vertices(self) -> list[tuple[Delta, ...]]:
        out: list[tuple[Delta, ...]] = []
        for size in sorted(self._layers):
            out.extend(sorted(self._layers[size]))
        return out

    def __len__(self) -> int:
        return sum(len(s) for s in self._layers.values())

    def _has(self, deltas: tuple[Delta, ...]) -> bool:
        layer = self._layers.get(len(deltas))
        return layer is not None and deltas in layer

    def _remove(self, deltas: tuple[Delta, ...]) -> None:
        layer = self._layers[len(deltas)]
        layer.discard(deltas)
        if not layer:
            del self._layers[len(deltas)]

    def _covers_list(self, ds: tuple[Delta, ...]) -> bool:
        """Some stored vertex matches everything the given list matches."""
        new_set = frozenset(ds)
        for size in sorted(self._layers):
            if size > len(ds):
                break
            for stored in self._layers[size]:
                if frozenset(stored) <= new_set:
                    return True
        return False

    def insert(self, deltas: Iterable[Delta]) -> None:
        """Add one INF monomial's delta list and fuse to fixpoint.

        A list already covered by a stored vertex is a no-op; stored
        extensions of the new list are dropped as redundant.
        """
        ds = tuple(sorted(deltas))
        for idx, v in ds:
            if not 0 <= v < self.registry.cardinality(idx):
                raise ValueError(f"delta ({v},{idx}) outside its registered domain")
        self.insert_count += 1
        self._add(ds)
        self.fuse()

    def _add(self, ds: tuple[Delta, ...]) -> None:
        if self._covers_list(ds):
            return
        new_set = frozenset(ds)
        for size in [s for s in self._layers if s > len(ds)]:
            for stored in [v for v in self._layers[size] if new_set <= frozenset(v)]:
                self._remove(stored)
        self._layers.setdefault(len(ds), set()).add(ds)

    def fuse(self) -> None:
        """Apply the fan rewrite until no vertex qualifies.

        A vertex fuses across index j when each of its siblings at j is
        covered by the graph, whether stored verbatim or absorbed into a
        shorter vertex.  Kept at fixpoint by insert.
        """
        changed = True
        while changed:
            changed = False
            for size in sorted(self._layers, reverse=True):
                for v in sorted(self._layers.get(size, ())):
                    if not self._has(v):
                        continue
                    for pos, (idx, _) in enumerate(v):
                        fan = [
                            v[:pos] + ((idx, k),) + v[pos + 1 :]
                            for k in range(self.registry.cardinality(idx))
                        ]
                        if all(self._covers_list(f) for f in fan):
                            for f in fan:
                                if self._has(f):
                                    self._remove(f)
                            self._add(v[:pos] + v[pos + 1 :])
                            changed = True
                            break
                    if changed:
                        break
                if changed:
                    break

    def is_complete(self) -> bool:
        """True when every assignment is covered.

        Fusion usually leaves the lone empty vertex in that case; when
        it cannot finish the collapse, the uncovered-assignment search
        settles the answer exactly.
        """
        if self._has(()):
            return True
        if not self._layers:
            return False
        return self.find_uncovered() is None

    def find_uncovered(self) -> Assignment | None:
        """Lexicographically smallest assignment no vertex matches.

        Backtracking over choice indices: a vertex whose deltas are all
        decided and matched kills the subtree, vertices that mismatch a
        decided pick drop out of the live set.
        """
        cards = self.registry.cardinalities
        verts = [tuple(v) for v in self.vertices()]
        if () in verts:
            return None

        def extend(pos: int, prefix: list[int], live: list) -> Assignment | None:
            if pos == len(cards):
                return tuple(prefix)
            for pick in range(cards[pos]):
                fully_matched = False
                surviving = []
                for vs in live:
                    rest = []
                    matched = True
                    for i, val in vs:
                        if i == pos:
                            if val != pick:
                                matched = False
                                break
                        elif i > pos:
                            rest.append((i, val))
                    if not matched:
                        continue
                    if not rest:
                        fully_matched = True
                        break
                    surviving.append(tuple(rest))
                if fully_matched:
                    continue
                found = extend(pos + 1, prefix + [pick], surviving)
                if found is not None:
                    return found
            return None

        return extend(0, [], verts)

    def covered(self, assignment: Sequence[int]) -> bool:
        self.registry.validate(assignment)
        return any(
            all(assignment[i] == v for i, v in ds)
            for layer in self._layers.values()
            for ds in layer
        )

    def edges(self) -> Iterator[tuple[tuple[Delta, ...], tuple[Delta, ...], int]]:
        """Intra-layer sibling pairs differing in one delta's value.

        Derived on demand from the vertex sets; emitted once per
        unordered pair, labeled with the differing choice index.
        """
        for layer in self._layers.values():
            vs = sorted(layer)
            for a_pos, a in enumerate(vs):
                for b in vs[a_pos + 1 :]:
                    diff = [
                        (da, db)
                        for da, db in zip(a, b)
                        if da != db
                    ]
                    if (
                        len(diff) == 1
                        and diff[0][0][0] == diff[0][1][0]
                        and [d[0] for d in a] == [d[0] for d in b]
                    ):
                        yield a, b, diff[0][0][0]

    def dump(self) -> str:
        lines = [
            f"layer={len(ds)} {' '.join(f'δ({v},{i})' for i, v in ds) or '(empty)'}"
            for ds in self.vertices()
        ]
        lines.append(f"complete: {'yes' if self.is_complete() else 'no'}")
        return "\n".join(lines)
