"""Immutable causal graphs: d-separation, mutilation, ancestral and
c-component queries, JSON/DOT serialization.

Graphs are value objects: every transformation returns a new instance, so
edit histories and proof replays can share structure freely across threads.
Bidirected edges model latent confounding and are expanded internally into
synthetic fork nodes for the d-separation kernel.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels

VALID_KINDS = ("binary", "categorical", "continuous")


class GraphError(ValueError):
    """Malformed graph or invalid graph query."""


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str = "continuous"
    levels: int | None = None

    def __post_init__(self):
        if self.kind not in VALID_KINDS:
            raise GraphError(f"unknown variable kind {self.kind!r}")
        if self.kind == "categorical":
            if self.levels is None or self.levels < 2:
                raise GraphError(
                    f"categorical variable {self.name!r} needs levels >= 2"
                )
        elif self.levels is not None:
            raise GraphError(f"levels only applies to categorical ({self.name!r})")

    @property
    def cardinality(self) -> int | None:
        """Number of discrete states, or None for continuous."""
        if self.kind == "binary":
            return 2
        if self.kind == "categorical":
            return self.levels
        return None


@dataclass(frozen=True)
class SeparationQuery:
    x_set: frozenset[str]
    y_set: frozenset[str]
    z_set: frozenset[str]

    @staticmethod
    def of(x: Iterable[str], y: Iterable[str], z: Iterable[str] = ()) -> "SeparationQuery":
        return SeparationQuery(frozenset(x), frozenset(y), frozenset(z))


def _as_variable(v) -> Variable:
    if isinstance(v, Variable):
        return v
    return Variable(name=str(v))


class CausalGraph:
    """Directed graph over named variables, optionally with bidirected edges.

    ``flag`` records what the producer certified: ``"dag"`` (acyclic, no
    2-cycles; enforced at construction) or ``"pdag-like"`` (consensus output
    that may contain 2-cycles), or None.
    """

    __slots__ = (
        "_variables", "_index", "_directed", "_bidirected", "_flag",
        "_parents", "_children", "_csr", "_hash",
    )

    def __init__(
        self,
        variables: Sequence[Variable | str],
        directed_edges: Iterable[tuple[str, str]] = (),
        bidirected_edges: Iterable[tuple[str, str]] = (),
        flag: str | None = None,
    ):
        vars_ = tuple(_as_variable(v) for v in variables)
        names = [v.name for v in vars_]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise GraphError(f"duplicate variable names: {dup}")
        index = {n: i for i, n in enumerate(names)}

        directed = set()
        for u, v in directed_edges:
            if u not in index or v not in index:
                raise GraphError(f"edge ({u!r}, {v!r}) references unknown variable")
            if u == v:
                raise GraphError(f"self-loop on {u!r}")
            directed.add((u, v))
        bidirected = set()
        for a, b in bidirected_edges:
            if a not in index or b not in index:
                raise GraphError(f"bidirected edge ({a!r}, {b!r}) references unknown variable")
            if a == b:
                raise GraphError(f"bidirected self-loop on {a!r}")
            bidirected.add(tuple(sorted((a, b), key=index.__getitem__)))

        if flag not in (None, "dag", "pdag-like"):
            raise GraphError(f"unknown flag {flag!r}")

        self._variables = vars_
        self._index = index
        self._directed = frozenset(directed)
        self._bidirected = frozenset(bidirected)
        self._flag = flag
        self._parents = None
        self._children = None
        self._csr = None
        self._hash = None

        if flag == "dag" and not self.is_acyclic():
            raise GraphError("graph flagged dag but contains a directed cycle")

    # -- basic accessors ----------------------------------------------------

    @property
    def variables(self) -> tuple[Variable, ...]:
        return self._variables

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self._variables)

    @property
    def directed_edges(self) -> frozenset[tuple[str, str]]:
        return self._directed

    @property
    def bidirected_edges(self) -> frozenset[tuple[str, str]]:
        return self._bidirected

    @property
    def flag(self) -> str | None:
        return self._flag

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise GraphError(f"unknown variable {name!r}") from None

    def variable(self, name: str) -> Variable:
        return self._variables[self.index(name)]

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __eq__(self, other) -> bool:
        if not isinstance(other, CausalGraph):
            return NotImplemented
        return (
            self._variables == other._variables
            and self._directed == other._directed
            and self._bidirected == other._bidirected
            and self._flag == other._flag
        )

    def __hash__(self) -> int:
        return hash((self._variables, self._directed, self._bidirected, self._flag))

    def __repr__(self) -> str:
        return (
            f"CausalGraph({len(self._variables)} vars, "
            f"{len(self._directed)} directed, {len(self._bidirected)} bidirected"
            + (f", flag={self._flag}" if self._flag else "") + ")"
        )

    def _parent_map(self) -> dict[str, tuple[str, ...]]:
        if self._parents is None:
            par: dict[str, list[str]] = {n: [] for n in self.names}
            chi: dict[str, list[str]] = {n: [] for n in self.names}
            for u, v in sorted(self._directed, key=self._edge_key):
                par[v].append(u)
                chi[u].append(v)
            self._parents = {k: tuple(vs) for k, vs in par.items()}
            self._children = {k: tuple(vs) for k, vs in chi.items()}
        return self._parents

    def parents(self, name: str) -> tuple[str, ...]:
        self.index(name)
        return self._parent_map()[name]

    def children(self, name: str) -> tuple[str, ...]:
        self.index(name)
        self._parent_map()
        return self._children[name]

    def _edge_key(self, e: tuple[str, str]):
        return (self._index[e[0]], self._index[e[1]])

    def sorted_directed(self) -> list[tuple[str, str]]:
        return sorted(self._directed, key=self._edge_key)

    def sorted_bidirected(self) -> list[tuple[str, str]]:
        return sorted(self._bidirected, key=self._edge_key)

    def in_order(self, names: Iterable[str]) -> tuple[str, ...]:
        """Report a set of names in the graph's fixed variable order."""
        s = set(names)
        return tuple(n for n in self.names if n in s)

    # -- transformations (always return new values) -------------------------

    def replace(self, directed_edges=None, bidirected_edges=None, flag=None,
                keep_flag: bool = False) -> "CausalGraph":
        return CausalGraph(
            self._variables,
            self._directed if directed_edges is None else directed_edges,
            self._bidirected if bidirected_edges is None else bidirected_edges,
            flag=self._flag if keep_flag else flag,
        )

    def mutilate(self, cut_incoming: Iterable[str] = (),
                 cut_outgoing: Iterable[str] = ()) -> "CausalGraph":
        """Remove edges into ``cut_incoming`` and out of ``cut_outgoing``.

        A bidirected edge counts as incoming at both endpoints, so it is
        dropped whenever either endpoint has its incoming side cut.
        """
        cin = {n for n in cut_incoming}
        cout = {n for n in cut_outgoing}
        for n in cin | cout:
            self.index(n)
        directed = {
            (u, v) for (u, v) in self._directed if v not in cin and u not in cout
        }
        bidirected = {
            (a, b) for (a, b) in self._bidirected if a not in cin and b not in cin
        }
        return CausalGraph(self._variables, directed, bidirected)

    def induced(self, subset: Iterable[str]) -> "CausalGraph":
        """Subgraph over ``subset``, preserving variable order."""
        keep = set(subset)
        for n in keep:
            self.index(n)
        vars_ = tuple(v for v in self._variables if v.name in keep)
        directed = {(u, v) for (u, v) in self._directed if u in keep and v in keep}
        bidirected = {(a, b) for (a, b) in self._bidirected if a in keep and b in keep}
        return CausalGraph(vars_, directed, bidirected)

    # -- structure queries ---------------------------------------------------

    def is_acyclic(self) -> bool:
        """True iff the directed edges contain no cycle (bidirected ignored)."""
        return self.topological_order() is not None

    def topological_order(self) -> list[str] | None:
        """Kahn's algorithm; None if cyclic. Ties broken by variable order."""
        indeg = {n: 0 for n in self.names}
        for _, v in self._directed:
            indeg[v] += 1
        self._parent_map()
        ready = [n for n in self.names if indeg[n] == 0]
        out: list[str] = []
        while ready:
            n = ready.pop(0)
            out.append(n)
            newly = []
            for c in self._children[n]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    newly.append(c)
            if newly:
                ready = sorted(set(ready) | set(newly), key=self._index.__getitem__)
        if len(out) != len(self.names):
            return None
        return out

    def find_cycles(self) -> list[list[str]]:
        """Cycle witnesses: all 2-cycles plus one representative per larger SCC."""
        cycles: list[list[str]] = []
        seen_pairs = set()
        for (u, v) in self.sorted_directed():
            if (v, u) in self._directed and frozenset((u, v)) not in seen_pairs:
                seen_pairs.add(frozenset((u, v)))
                cycles.append([u, v, u])
        for scc in self._sccs():
            if len(scc) > 1:
                witness = self._cycle_in(scc)
                if witness and not (len(witness) == 3 and frozenset(witness[:2]) in seen_pairs):
                    cycles.append(witness)
        return cycles

    def _sccs(self) -> list[list[str]]:
        # Tarjan, iterative.
        self._parent_map()
        index_of: dict[str, int] = {}
        low: dict[str, int] = {}
        on_stack: set[str] = set()
        stack: list[str] = []
        sccs: list[list[str]] = []
        counter = [0]

        for root in self.names:
            if root in index_of:
                continue
            work = [(root, iter(self._children[root]))]
            index_of[root] = low[root] = counter[0]
            counter[0] += 1
            stack.append(root)
            on_stack.add(root)
            while work:
                v, it = work[-1]
                advanced = False
                for w in it:
                    if w not in index_of:
                        index_of[w] = low[w] = counter[0]
                        counter[0] += 1
                        stack.append(w)
                        on_stack.add(w)
                        work.append((w, iter(self._children[w])))
                        advanced = True
                        break
                    elif w in on_stack:
                        low[v] = min(low[v], index_of[w])
                if advanced:
                    continue
                work.pop()
                if work:
                    pv = work[-1][0]
                    low[pv] = min(low[pv], low[v])
                if low[v] == index_of[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == v:
                            break
                    sccs.append(comp)
        return sccs

    def _cycle_in(self, scc: list[str]) -> list[str] | None:
        members = set(scc)
        start = min(scc, key=self._index.__getitem__)
        # BFS back to start restricted to the SCC
        prev = {start: None}
        frontier = [start]
        while frontier:
            nxt = []
            for v in frontier:
                for c in self._children[v]:
                    if c == start:
                        node = v
                        back = [c]
                        while node is not None:
                            back.append(node)
                            node = prev[node]
                        return list(reversed(back))
                    if c in members and c not in prev:
                        prev[c] = v
                        nxt.append(c)
            frontier = nxt
        return None

    def ancestors(self, names: Iterable[str]) -> tuple[str, ...]:
        """The set plus everything with a directed path into it, in variable order."""
        n_aug, par, _chi = self._adjacency()
        out = kernels.ancestor_mask(n_aug, par[0], par[1], self._name_mask(names))
        return self._mask_names(out)

    def descendants(self, names: Iterable[str]) -> tuple[str, ...]:
        n_aug, _par, chi = self._adjacency()
        out = kernels.descendant_mask(n_aug, chi[0], chi[1], self._name_mask(names))
        return self._mask_names(out)

    def c_components(self) -> list[tuple[str, ...]]:
        """Partition by bidirected connectivity; singletons for unconfounded nodes."""
        parent = {n: n for n in self.names}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for a, b in self._bidirected:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[rb] = ra
        blocks: dict[str, list[str]] = {}
        for n in self.names:
            blocks.setdefault(find(n), []).append(n)
        out = [tuple(v) for v in blocks.values()]
        out.sort(key=lambda block: self._index[block[0]])
        return out

    def d_separated(self, x: Iterable[str], y: Iterable[str],
                    z: Iterable[str] = ()) -> bool:
        """Whether every trail between x and y is blocked by z.

        Bidirected edges are treated as latent forks (expanded internally).
        """
        xs, ys, zs = set(x), set(y), set(z)
        if xs & ys or xs & zs or ys & zs:
            raise GraphError("d-separation query sets must be pairwise disjoint")
        if not xs or not ys:
            raise GraphError("x and y must be nonempty")
        for n in xs | ys | zs:
            self.index(n)
        n_aug, par, chi = self._adjacency()
        x_mask = self._name_mask(xs)
        z_mask = self._name_mask(zs)
        reach = kernels.dsep_reachable(n_aug, par[0], par[1], chi[0], chi[1],
                                       x_mask, z_mask)
        return not any(reach[self._index[n]] for n in ys)

    def d_separated_query(self, q: SeparationQuery) -> bool:
        return self.d_separated(q.x_set, q.y_set, q.z_set)

    # -- kernel plumbing ------------------------------------------------------

    def _adjacency(self):
        """CSR parent/child adjacency of the latent-fork-augmented graph."""
        if self._csr is None:
            n = len(self._variables)
            bid = self.sorted_bidirected()
            n_aug = n + len(bid)
            par_lists: list[list[int]] = [[] for _ in range(n_aug)]
            chi_lists: list[list[int]] = [[] for _ in range(n_aug)]
            for u, v in self.sorted_directed():
                ui, vi = self._index[u], self._index[v]
                par_lists[vi].append(ui)
                chi_lists[ui].append(vi)
            for k, (a, b) in enumerate(bid):
                h = n + k
                for end in (self._index[a], self._index[b]):
                    par_lists[end].append(h)
                    chi_lists[h].append(end)

            def to_csr(lists):
                indptr = np.zeros(n_aug + 1, dtype=np.int32)
                for i, lst in enumerate(lists):
                    indptr[i + 1] = indptr[i] + len(lst)
                idx = np.zeros(max(int(indptr[-1]), 1), dtype=np.int32)
                pos = 0
                for lst in lists:
                    for v in lst:
                        idx[pos] = v
                        pos += 1
                return indptr, idx

            self._csr = (n_aug, to_csr(par_lists), to_csr(chi_lists))
        return self._csr

    def _name_mask(self, names: Iterable[str]):
        n_aug = self._adjacency()[0]
        mask = np.zeros(n_aug, dtype=np.uint8)
        for n in names:
            mask[self.index(n)] = 1
        return mask

    def _mask_names(self, mask) -> tuple[str, ...]:
        return tuple(n for i, n in enumerate(self.names) if mask[i])

    # -- serialization --------------------------------------------------------

    def to_json_dict(self) -> dict:
        d: dict = {
            "variables": [
                {"name": v.name, "kind": v.kind,
                 **({"levels": v.levels} if v.levels is not None else {})}
                for v in self._variables
            ],
            "directed_edges": [list(e) for e in self.sorted_directed()],
            "bidirected_edges": [list(e) for e in self.sorted_bidirected()],
        }
        if self._flag is not None:
            d["flag"] = self._flag
        return d

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)

    @staticmethod
    def from_json_dict(d: dict) -> "CausalGraph":
        variables = [
            Variable(v["name"], v.get("kind", "continuous"), v.get("levels"))
            for v in d["variables"]
        ]
        return CausalGraph(
            variables,
            [tuple(e) for e in d.get("directed_edges", [])],
            [tuple(e) for e in d.get("bidirected_edges", [])],
            flag=d.get("flag"),
        )

    @staticmethod
    def from_json(text: str) -> "CausalGraph":
        return CausalGraph.from_json_dict(json.loads(text))

    def graph_hash(self) -> str:
        """Content hash of the canonical JSON form."""
        if self._hash is None:
            payload = json.dumps(self.to_json_dict(), sort_keys=True,
                                 separators=(",", ":"))
            self._hash = hashlib.sha256(payload.encode()).hexdigest()
        return self._hash

    def to_dot(self) -> str:
        lines = ["digraph G {"]
        for v in self._variables:
            lines.append(f'  "{v.name}";')
        for u, v in self.sorted_directed():
            lines.append(f'  "{u}" -> "{v}";')
        for a, b in self.sorted_bidirected():
            lines.append(f'  "{a}" -> "{b}" [dir=both, style=dashed];')
        lines.append("}")
        return "\n".join(lines)
