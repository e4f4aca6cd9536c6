"""Half-edge graphs: stable ribbon graphs, ribbon graphs and trees, stable
graphs, graphs and trees.

A ribbon-flavored graph stores, per vertex, a partition of its half-edges
into cycles with a cyclic order (the permutation sigma0), the involution
sigma1 whose fixed points are leafs, a genus defect and per-color boundary
defects, and a coloring of every boundary: each free boundary of a face is
keyed by the leaf it starts at, faces without leafs carry a single color.
A stable graph keeps only the vertex partition, sigma1 and a loop defect.

Canonical forms are computed by minimal-encoding searches; class identity,
orientation signs, automorphism orders and the odd-edge-automorphism flag all
come out of the same search.  Zero classes (some automorphism permutes the
internal edges oddly) are flagged and dropped by the chain layer.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from . import conventions

RIBBON_FLAVORS = ("stable-ribbon", "ribbon", "ribbon-tree")
STABLE_FLAVORS = ("stable-graph", "graph", "tree")
FLAVORS = RIBBON_FLAVORS + STABLE_FLAVORS


class GraphStructureError(ValueError):
    pass


class ConnectivityError(ValueError):
    pass


def _edge(h1, h2):
    return (h1, h2) if h1 < h2 else (h2, h1)


# ---------------------------------------------------------------------------
# ribbon flavored graphs


class RibbonGraph:
    """A concrete oriented B-colored stable ribbon graph on labeled half-edges."""

    __slots__ = (
        "n",
        "vertices",
        "sigma1",
        "genus",
        "bdef",
        "leaf_color",
        "empty_face_color",
        "orientation",
        "flavor",
        "_faces",
    )

    def __init__(
        self,
        n,
        vertices,
        sigma1,
        genus=None,
        bdef=None,
        leaf_color=None,
        empty_face_color=None,
        orientation=None,
        flavor="stable-ribbon",
        validate=True,
    ):
        self.n = n
        self.vertices = tuple(tuple(tuple(c) for c in v) for v in vertices)
        self.sigma1 = dict(sigma1)
        nv = len(self.vertices)
        self.genus = tuple(genus) if genus else (0,) * nv
        if bdef is None:
            bdef = ({},) * nv
        self.bdef = tuple(tuple(sorted((c, e) for c, e in dict(b).items() if e)) for b in bdef)
        self.leaf_color = dict(leaf_color or {})
        self.empty_face_color = {frozenset(k): v for k, v in (empty_face_color or {}).items()}
        if orientation is None:
            orientation = sorted(self.edges())
        self.orientation = tuple(orientation)
        self.flavor = flavor
        self._faces = None
        if validate:
            self.validate()

    # -- basic structure ---------------------------------------------------

    def half_edges(self):
        return range(self.n)

    def leafs(self):
        return sorted(h for h in range(self.n) if self.sigma1[h] == h)

    def edges(self):
        return sorted({_edge(h, self.sigma1[h]) for h in range(self.n) if self.sigma1[h] != h})

    def n_edges(self):
        return len(self.edges())

    def n_leafs(self):
        return len(self.leafs())

    def vertex_of(self, h):
        for i, v in enumerate(self.vertices):
            for c in v:
                if h in c:
                    return i
        raise GraphStructureError("half-edge %r not attached to a vertex" % h)

    def cycle_of(self, h):
        for v in self.vertices:
            for c in v:
                if h in c:
                    return c
        raise GraphStructureError("half-edge %r not in a cycle" % h)

    def sigma0(self):
        nxt = {}
        for v in self.vertices:
            for c in v:
                for i, h in enumerate(c):
                    nxt[h] = c[(i + 1) % len(c)]
        return nxt

    def c_total(self):
        return sum(len(v) for v in self.vertices)

    def bdef_dict(self, i):
        return dict(self.bdef[i])

    def validate(self):
        seen = []
        for v in self.vertices:
            for c in v:
                if not c:
                    raise GraphStructureError("empty cycle")
                seen.extend(c)
        if sorted(seen) != list(range(self.n)):
            raise GraphStructureError("vertices do not partition the half-edges")
        if sorted(self.sigma1) != list(range(self.n)):
            raise GraphStructureError("sigma1 not defined on all half-edges")
        for h, k in self.sigma1.items():
            if self.sigma1[k] != h:
                raise GraphStructureError("sigma1 is not an involution")
        if sorted(self.orientation) != self.edges():
            raise GraphStructureError("orientation does not list the internal edges")
        if set(self.leaf_color) != set(self.leafs()):
            raise GraphStructureError("coloring must be total on free boundaries")
        faces = self.faces()
        empties = {frozenset(f) for f in faces if not self._face_leafs(f)}
        if set(self.empty_face_color) != empties:
            raise GraphStructureError("coloring must be total on empty faces")
        self.check_stability()
        if self.flavor in ("ribbon", "ribbon-tree"):
            if any(self.genus) or any(self.bdef):
                raise GraphStructureError("ribbon graphs have no defects")
            if any(len(v) != 1 for v in self.vertices):
                raise GraphStructureError("ribbon graph vertices carry a single cycle")
        if self.flavor == "ribbon-tree":
            if len(faces) != 1 or self.arithmetic_genus() != 0:
                raise GraphStructureError("ribbon trees have one face and genus zero")

    def check_stability(self):
        for i, v in enumerate(self.vertices):
            size = sum(len(c) for c in v)
            g = self.genus[i]
            b = sum(e for _, e in self.bdef[i])
            if size == 0 and g == 0 and b == 0:
                raise GraphStructureError("defect-free vertex with no half-edges")
            if g == 0 and b == 0 and len(v) == 1 and size < 3:
                raise GraphStructureError("unstable vertex of valence %d" % size)

    def is_connected(self):
        nv = len(self.vertices)
        if nv == 0:
            return False
        parent = list(range(nv))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        vx = {}
        for i, v in enumerate(self.vertices):
            for c in v:
                for h in c:
                    vx[h] = i
        for h1, h2 in self.edges():
            a, b = find(vx[h1]), find(vx[h2])
            if a != b:
                parent[a] = b
        return len({find(i) for i in range(nv)}) == 1

    # -- faces and boundaries ----------------------------------------------

    def faces(self):
        """Cycles of sigma_b = sigma0^{-1} o sigma1, as tuples of half-edges."""
        if self._faces is not None:
            return self._faces
        nxt = self.sigma0()
        prev = {v: k for k, v in nxt.items()}
        sigma_b = {h: prev[self.sigma1[h]] for h in range(self.n)}
        seen = set()
        out = []
        for h in range(self.n):
            if h in seen:
                continue
            cyc = []
            x = h
            while x not in seen:
                seen.add(x)
                cyc.append(x)
                x = sigma_b[x]
            out.append(tuple(cyc))
        self._faces = out
        return out

    def _face_leafs(self, face):
        return [h for h in face if self.sigma1[h] == h]

    def n_faces(self):
        return len(self.faces())

    def empty_faces(self):
        return [f for f in self.faces() if not self._face_leafs(f)]

    def f0(self):
        return len(self.empty_faces())

    def f_tot(self):
        return self.f0() + sum(e for b in self.bdef for _, e in b)

    def free_boundaries(self):
        """Free boundaries as ordered leaf pairs (start, end), one per leaf."""
        out = []
        for f in self.faces():
            ls = self._face_leafs(f)
            k = len(ls)
            for i in range(k):
                out.append((ls[i], ls[(i + 1) % k]))
        return out

    def face_of(self, h):
        for f in self.faces():
            if h in f:
                return f
        raise GraphStructureError("no face through %r" % h)

    def gap_color(self, h):
        """Color of the boundary segment at the corner between h and sigma0(h)."""
        f = self.face_of(h)
        ls = self._face_leafs(f)
        if not ls:
            return self.empty_face_color[frozenset(f)]
        pos = f.index(h)
        k = len(f)
        for step in range(k):
            x = f[(pos + step) % k]
            if self.sigma1[x] == x:
                end = x
                break
        start = ls[(ls.index(end) - 1) % len(ls)]
        return self.leaf_color[start]

    def leaf_sides(self, l):
        """(incoming, outgoing) boundary colors at a leaf.

        The incoming side is the boundary segment ending at l (the corner
        between l and its successor), the outgoing side the segment that
        starts at l.
        """
        return self.gap_color(l), self.leaf_color[l]

    def vertex_profile(self, i):
        """Boundary-color words of the cycles at vertex i, as tuples of colors.

        The k-th entry of a cycle's word is the color of the gap after the
        k-th half-edge; a letter placed on the k-th half-edge lives in
        Hom(word[k-1], word[k])^dual.
        """
        return tuple(tuple(self.gap_color(h) for h in c) for c in self.vertices[i])

    # -- numerical invariants ------------------------------------------------

    def arithmetic_genus(self):
        if not self.is_connected():
            raise ConnectivityError("arithmetic genus needs a connected graph")
        twice = 2 * (
            1 - len(self.vertices)
        ) + self.n_edges() + self.c_total() - self.n_faces() + 2 * sum(self.genus)
        if twice % 2:
            raise GraphStructureError("half-integer arithmetic genus")
        return twice // 2

    # -- rebuilding ---------------------------------------------------------

    def relabel(self, perm):
        """New graph with half-edge h renamed perm[h]."""
        vertices = tuple(tuple(tuple(perm[h] for h in c) for c in v) for v in self.vertices)
        sigma1 = {perm[h]: perm[k] for h, k in self.sigma1.items()}
        leaf_color = {perm[h]: c for h, c in self.leaf_color.items()}
        efc = {frozenset(perm[h] for h in f): c for f, c in self.empty_face_color.items()}
        orientation = tuple(_edge(perm[a], perm[b]) for a, b in self.orientation)
        return RibbonGraph(
            self.n,
            vertices,
            sigma1,
            self.genus,
            [dict(b) for b in self.bdef],
            leaf_color,
            efc,
            orientation,
            self.flavor,
            validate=False,
        )

    # -- contraction ---------------------------------------------------------

    def contract(self, edge_index):
        """Contract the edge at the given orientation position.

        Returns the contracted instance (orientation: remaining edges in
        order) or None when the edge cannot be contracted.  The caller adds
        the (-1)**position sign.
        """
        h1, h2 = self.orientation[edge_index]
        v1, v2 = self.vertex_of(h1), self.vertex_of(h2)
        c1, c2 = self.cycle_of(h1), self.cycle_of(h2)
        genus = list(self.genus)
        bdefs = [self.bdef_dict(i) for i in range(len(self.vertices))]
        vertices = [list(v) for v in self.vertices]

        def splice(ca, hb1, cb, hb2):
            ia, ib = ca.index(hb1), cb.index(hb2)
            arc_a = ca[ia + 1 :] + ca[:ia]
            arc_b = cb[ib + 1 :] + cb[:ib]
            return tuple(arc_a + arc_b)

        if v1 != v2:
            # rule 1: an edge joining distinct vertices
            if len(c1) == 1 and len(c2) == 1:
                if len(self.vertices[v1]) == 1 and len(self.vertices[v2]) == 1:
                    return None
                color = self.empty_face_color[frozenset((h1, h2))]
                new_cycles = [c for c in vertices[v1] if c != c1] + [
                    c for c in vertices[v2] if c != c2
                ]
                bd = bdefs[v1]
                for col, e in bdefs[v2].items():
                    bd[col] = bd.get(col, 0) + e
                bd[color] = bd.get(color, 0) + 1
            else:
                merged = splice(c1, h1, c2, h2)
                new_cycles = (
                    [c for c in vertices[v1] if c != c1]
                    + [c for c in vertices[v2] if c != c2]
                    + [merged]
                )
                bd = bdefs[v1]
                for col, e in bdefs[v2].items():
                    bd[col] = bd.get(col, 0) + e
            new_genus = genus[v1] + genus[v2]
            keep = [i for i in range(len(vertices)) if i not in (v1, v2)]
            new_vertices = [vertices[i] for i in keep] + [new_cycles]
            new_gen = [genus[i] for i in keep] + [new_genus]
            new_bd = [bdefs[i] for i in keep] + [bd]
        else:
            v = v1
            if c1 != c2:
                # rule 2: a loop joining distinct cycles of one vertex
                if len(c1) == 1 and len(c2) == 1:
                    color = self.empty_face_color[frozenset((h1, h2))]
                    new_cycles = [c for c in vertices[v] if c not in (c1, c2)]
                    bd = bdefs[v]
                    bd[color] = bd.get(color, 0) + 1
                else:
                    merged = splice(c1, h1, c2, h2)
                    new_cycles = [c for c in vertices[v] if c not in (c1, c2)] + [merged]
                    bd = bdefs[v]
                genus[v] += 1
            else:
                # rule 3: a loop with both endpoints in one cycle
                c = c1
                nxt = dict(zip(c, c[1:] + c[:1]))
                bd = bdefs[v]
                if len(c) == 2:
                    if len(vertices[v]) == 1:
                        return None
                    for h in (h1, h2):
                        bd_color = self.empty_face_color[frozenset((h,))]
                        bd[bd_color] = bd.get(bd_color, 0) + 1
                    new_cycles = [cc for cc in vertices[v] if cc != c]
                elif nxt[h1] == h2:
                    color = self.empty_face_color[frozenset((h1,))]
                    bd[color] = bd.get(color, 0) + 1
                    i = c.index(h1)
                    rest = c[i + 2 :] + c[:i]
                    new_cycles = [cc for cc in vertices[v] if cc != c] + [tuple(rest)]
                elif nxt[h2] == h1:
                    color = self.empty_face_color[frozenset((h2,))]
                    bd[color] = bd.get(color, 0) + 1
                    i = c.index(h2)
                    rest = c[i + 2 :] + c[:i]
                    new_cycles = [cc for cc in vertices[v] if cc != c] + [tuple(rest)]
                else:
                    i, j = c.index(h1), c.index(h2)
                    if i > j:
                        i, j = j, i
                    arc_a = c[i + 1 : j]
                    arc_b = c[j + 1 :] + c[:i]
                    new_cycles = [cc for cc in vertices[v] if cc != c] + [
                        tuple(arc_a),
                        tuple(arc_b),
                    ]
            keep = [i for i in range(len(vertices)) if i != v]
            new_vertices = [vertices[i] for i in keep] + [new_cycles]
            new_gen = [genus[i] for i in keep] + [genus[v]]
            new_bd = [bdefs[i] for i in keep] + [bd]

        dropped = {h1, h2}
        relab = {}
        for h in range(self.n):
            if h not in dropped:
                relab[h] = len(relab)
        vertices_out = tuple(
            tuple(tuple(relab[h] for h in c) for c in v if set(c) - dropped)
            for v in new_vertices
        )
        sigma1 = {
            relab[h]: relab[k] for h, k in self.sigma1.items() if h not in dropped
        }
        leaf_color = {relab[h]: col for h, col in self.leaf_color.items()}
        orientation = tuple(
            _edge(relab[a], relab[b]) for a, b in self.orientation if {a, b} != dropped
        )
        out = RibbonGraph(
            self.n - 2,
            vertices_out,
            sigma1,
            new_gen,
            new_bd,
            leaf_color,
            {},
            orientation,
            self.flavor if self.flavor != "ribbon" else "stable-ribbon",
            validate=False,
        )
        # transport colors of surviving empty faces
        efc = {}
        for f in out.faces():
            if out._face_leafs(f):
                continue
            for old, col in self.empty_face_color.items():
                if {relab[h] for h in old if h not in dropped} == set(f) and set(f):
                    efc[frozenset(f)] = col
                    break
            else:
                raise GraphStructureError("lost track of an empty face color")
        out.empty_face_color = efc
        try:
            out.check_stability()
        except GraphStructureError:
            return None
        return out

    # -- gluing ---------------------------------------------------------------

    def colors_match(self, l1, other, l2):
        in1, out1 = self.leaf_sides(l1)
        in2, out2 = other.leaf_sides(l2)
        return in1 == out2 and out1 == in2

    def glue(self, l1, other, l2):
        """Glue leaf l1 of self to leaf l2 of other (disjoint union, new edge).

        Orientation: edges of self, the new edge, edges of other.  Returns
        None on color mismatch.
        """
        if not self.colors_match(l1, other, l2):
            return None
        shift = self.n
        g2 = other.relabel({h: h + shift for h in range(other.n)})
        n = self.n + other.n
        vertices = self.vertices + g2.vertices
        sigma1 = dict(self.sigma1)
        sigma1.update(g2.sigma1)
        sigma1[l1] = l2 + shift
        sigma1[l2 + shift] = l1
        genus = self.genus + g2.genus
        bdef = [dict(b) for b in self.bdef] + [dict(b) for b in g2.bdef]
        new_edge = _edge(l1, l2 + shift)
        if conventions.NEW_EDGE_POSITION == "first":
            orientation = self.orientation + (new_edge,) + g2.orientation
        else:
            orientation = self.orientation + g2.orientation + (new_edge,)
        out = RibbonGraph(
            n,
            vertices,
            sigma1,
            genus,
            bdef,
            {},
            {},
            orientation,
            self.flavor,
            validate=False,
        )
        old_gaps = {h: self.gap_color(h) for h in range(self.n)}
        old_gaps.update({h + shift: other.gap_color(h) for h in range(other.n)})
        old_leaf = {**self.leaf_color, **{h + shift: c for h, c in other.leaf_color.items()}}
        return _reglue_colors(out, old_leaf, old_gaps, (l1, l2 + shift))

    def self_glue(self, l1, l2, mode):
        """Glue two leafs of one graph; mode is 'same_face' or 'different_faces'."""
        f1, f2 = self.face_of(l1), self.face_of(l2)
        if mode == "same_face" and f1 != f2:
            return None
        if mode == "different_faces" and f1 == f2:
            return None
        if not self.colors_match(l1, self, l2):
            return None
        sigma1 = dict(self.sigma1)
        sigma1[l1] = l2
        sigma1[l2] = l1
        new_edge = _edge(l1, l2)
        if conventions.NEW_EDGE_POSITION == "first":
            orientation = (new_edge,) + self.orientation
        else:
            orientation = self.orientation + (new_edge,)
        out = RibbonGraph(
            self.n,
            self.vertices,
            sigma1,
            self.genus,
            [dict(b) for b in self.bdef],
            {},
            {},
            orientation,
            self.flavor,
            validate=False,
        )
        old_gaps = {h: self.gap_color(h) for h in range(self.n)}
        return _reglue_colors(out, dict(self.leaf_color), old_gaps, (l1, l2))

    # -- projection to stable graphs ------------------------------------------

    def underlying_stable_graph(self):
        """Forget the ribbon data; o(v) = 2 g(v) + sum_b b(v) + c(v) - 1."""
        vertices = []
        odef = []
        for i, v in enumerate(self.vertices):
            halves = tuple(sorted(h for c in v for h in c))
            vertices.append(halves)
            b = sum(e for _, e in self.bdef[i])
            odef.append(2 * self.genus[i] + b + len(v) - 1)
        return StableGraph(
            self.n,
            vertices,
            self.sigma1,
            odef,
            self.orientation,
            flavor="stable-graph",
            validate=False,
        )

    # -- canonical form ---------------------------------------------------------

    def _labelings(self):
        """Yield complete half-edge labelings (dict old -> new) produced by the
        deterministic traversal, branching where the traversal stalls."""
        if self.n == 0:
            yield {}
            return
        cycle_id = {}
        cycles = []
        vertex_of = {}
        for vi, v in enumerate(self.vertices):
            for c in v:
                cid = len(cycles)
                cycles.append(c)
                for h in c:
                    cycle_id[h] = cid
                    vertex_of[h] = vi

        def walk(labels, order, visited_cycles):
            # process sigma1 partners in label order until stalled
            i = 0
            while i < len(order):
                h = order[i]
                p = self.sigma1[h]
                cid = cycle_id[p]
                if cid not in visited_cycles:
                    visited_cycles.add(cid)
                    c = cycles[cid]
                    j = c.index(p)
                    for k in range(len(c)):
                        x = c[(j + k) % len(c)]
                        labels[x] = len(labels)
                        order.append(x)
                i += 1

        def expand(labels, order, visited_cycles):
            walk(labels, order, visited_cycles)
            if len(labels) == self.n:
                yield dict(labels)
                return
            # stalled: branch over unvisited cycles at visited vertices
            visited_vertices = {}
            for h in order:
                visited_vertices.setdefault(vertex_of[h], labels[h])
            candidates = [
                cid
                for cid in range(len(cycles))
                if cid not in visited_cycles and vertex_of[cycles[cid][0]] in visited_vertices
            ]
            if not candidates:
                raise ConnectivityError("canonical form needs a connected graph")
            best_v = min(visited_vertices[vertex_of[cycles[cid][0]]] for cid in candidates)
            candidates = [
                cid
                for cid in candidates
                if visited_vertices[vertex_of[cycles[cid][0]]] == best_v
            ]
            for cid in candidates:
                c = cycles[cid]
                for j in range(len(c)):
                    labels2 = dict(labels)
                    order2 = list(order)
                    visited2 = set(visited_cycles)
                    visited2.add(cid)
                    for k in range(len(c)):
                        x = c[(j + k) % len(c)]
                        labels2[x] = len(labels2)
                        order2.append(x)
                    yield from expand(labels2, order2, visited2)

        for h0 in range(self.n):
            cid = cycle_id[h0]
            labels = {}
            order = []
            c = cycles[cid]
            j = c.index(h0)
            for k in range(len(c)):
                x = c[(j + k) % len(c)]
                labels[x] = len(labels)
                order.append(x)
            yield from expand(labels, order, {cid})

    def _encode(self, labels):
        vdata = []
        for i, v in enumerate(self.vertices):
            cyc = []
            for c in v:
                lab = tuple(labels[h] for h in c)
                best = min(lab[r:] + lab[:r] for r in range(len(lab)))
                cyc.append(best)
            vdata.append((tuple(sorted(cyc)), self.genus[i], self.bdef[i]))
        vdata.sort()
        sig = tuple(
            sorted(_edge(labels[h], labels[k]) for h, k in self.sigma1.items() if h < k)
        )
        lc = tuple(sorted((labels[h], c) for h, c in self.leaf_color.items()))
        efc = tuple(
            sorted((tuple(sorted(labels[h] for h in f)), c) for f, c in self.empty_face_color.items())
        )
        return ("R", self.flavor, self.n, tuple(vdata), sig, lc, efc)

    def canonical(self):
        """(key, sign, is_zero, aut_order) of the oriented isomorphism class."""
        if not self.is_connected():
            raise ConnectivityError("canonical form needs a connected graph")
        if self.n == 0:
            key = self._encode({})
            return key, Fraction(1), False, 1
        best = None
        minimizers = []
        for labels in self._labelings():
            enc = self._encode(labels)
            if best is None or enc < best:
                best = enc
                minimizers = [labels]
            elif enc == best:
                minimizers.append(labels)
        canon_edges = sorted(
            _edge(minimizers[0][h], minimizers[0][k]) for h, k in self.sigma1.items() if h < k
        )
        signs = set()
        for labels in minimizers:
            relabeled = [(_edge(labels[a], labels[b])) for a, b in self.orientation]
            signs.add(_perm_parity([canon_edges.index(e) for e in relabeled]))
        is_zero = len(signs) == 2
        sign = Fraction(signs.pop()) if not is_zero else Fraction(1)
        return best, sign, is_zero, len(minimizers)

    # -- serialization ------------------------------------------------------------

    def to_json(self):
        edges = self.edges()
        coloring = {"leaf:%d" % h: c for h, c in self.leaf_color.items()}
        for f, c in self.empty_face_color.items():
            coloring["face:%d" % min(f)] = c
        return {
            "flavor": self.flavor,
            "half_edges": list(range(self.n)),
            "vertices": [sorted(h for c in v for h in c) for v in self.vertices],
            "sigma1": [[h, k] for h, k in edges],
            "cycles": {str(i): [list(c) for c in v] for i, v in enumerate(self.vertices)},
            "genus_defect": {str(i): g for i, g in enumerate(self.genus) if g},
            "boundary_defect": {
                str(i): {c: e for c, e in b} for i, b in enumerate(self.bdef) if b
            },
            "coloring": coloring,
            "orientation": [edges.index(e) for e in self.orientation],
        }

    @staticmethod
    def from_json(data):
        cycles = {int(k): v for k, v in data["cycles"].items()}
        nv = len(data["vertices"])
        vertices = [tuple(tuple(c) for c in cycles[i]) for i in range(nv)]
        n = len(data["half_edges"])
        sigma1 = {h: h for h in range(n)}
        for h, k in data["sigma1"]:
            sigma1[h] = k
            sigma1[k] = h
        genus = [int(data.get("genus_defect", {}).get(str(i), 0)) for i in range(nv)]
        bdef = [
            {c: int(e) for c, e in data.get("boundary_defect", {}).get(str(i), {}).items()}
            for i in range(nv)
        ]
        leaf_color = {}
        face_color_by_min = {}
        for key, c in data.get("coloring", {}).items():
            kind, _, ident = key.partition(":")
            if kind == "leaf":
                leaf_color[int(ident)] = c
            else:
                face_color_by_min[int(ident)] = c
        edges = [_edge(*e) for e in data["sigma1"]]
        orientation = [edges[i] for i in data["orientation"]]
        g = RibbonGraph(
            n,
            vertices,
            sigma1,
            genus,
            bdef,
            leaf_color,
            {},
            orientation,
            data.get("flavor", "stable-ribbon"),
            validate=False,
        )
        efc = {}
        for f in g.faces():
            if not g._face_leafs(f):
                efc[frozenset(f)] = face_color_by_min[min(f)]
        g.empty_face_color = efc
        g.validate()
        return g


def _reglue_colors(out, old_leaf_color, old_gaps, glued):
    """Recompute boundary colors after a gluing.

    Surviving leafs keep the color of the segment starting at them; a face
    that ends up with no leafs is colored by the common old color of its
    corners (the matching condition makes it unique).
    """
    out.leaf_color = {l: old_leaf_color[l] for l in out.leafs()}
    efc = {}
    for f in out.faces():
        if out._face_leafs(f):
            continue
        cols = {old_gaps[h] for h in f}
        if len(cols) != 1:
            return None
        efc[frozenset(f)] = cols.pop()
    out.empty_face_color = efc
    try:
        out.validate()
    except GraphStructureError:
        return None
    return out


def _perm_parity(perm):
    perm = list(perm)
    parity = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            parity = -parity
    return parity


# ---------------------------------------------------------------------------
# stable graphs


class StableGraph:
    """A stable graph: vertex partition, involution and loop defects."""

    __slots__ = ("n", "vertices", "sigma1", "odef", "orientation", "flavor")

    def __init__(self, n, vertices, sigma1, odef=None, orientation=None, flavor="stable-graph", validate=True):
        self.n = n
        self.vertices = tuple(tuple(sorted(v)) for v in vertices)
        self.sigma1 = dict(sigma1)
        self.odef = tuple(odef) if odef else (0,) * len(self.vertices)
        if orientation is None:
            orientation = sorted(self.edges())
        self.orientation = tuple(orientation)
        self.flavor = flavor
        if validate:
            self.validate()

    def leafs(self):
        return sorted(h for h in range(self.n) if self.sigma1[h] == h)

    def edges(self):
        return sorted({_edge(h, self.sigma1[h]) for h in range(self.n) if self.sigma1[h] != h})

    def n_edges(self):
        return len(self.edges())

    def n_leafs(self):
        return len(self.leafs())

    def vertex_of(self, h):
        for i, v in enumerate(self.vertices):
            if h in v:
                return i
        raise GraphStructureError("half-edge %r not attached" % h)

    def validate(self):
        seen = [h for v in self.vertices for h in v]
        if sorted(seen) != list(range(self.n)):
            raise GraphStructureError("vertices do not partition the half-edges")
        for h, k in self.sigma1.items():
            if self.sigma1[k] != h:
                raise GraphStructureError("sigma1 is not an involution")
        if sorted(self.orientation) != self.edges():
            raise GraphStructureError("orientation does not list the internal edges")
        self.check_stability()
        if self.flavor in ("graph", "tree") and any(self.odef):
            raise GraphStructureError("plain graphs carry no loop defect")
        if self.flavor == "tree" and self.betti_number() != 0:
            raise GraphStructureError("trees have first Betti number zero")

    def check_stability(self):
        for i, v in enumerate(self.vertices):
            if self.odef[i] == 0 and len(v) < 3:
                raise GraphStructureError("unstable vertex of valence %d" % len(v))
            if self.odef[i] == 1 and len(v) < 1:
                raise GraphStructureError("loop-defect-one vertex needs a half-edge")

    def is_connected(self):
        nv = len(self.vertices)
        if nv == 0:
            return False
        parent = list(range(nv))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for h1, h2 in self.edges():
            a, b = find(self.vertex_of(h1)), find(self.vertex_of(h2))
            if a != b:
                parent[a] = b
        return len({find(i) for i in range(nv)}) == 1

    def betti_number(self):
        if not self.is_connected():
            raise ConnectivityError("Betti number needs a connected graph")
        return 1 - len(self.vertices) + self.n_edges() + sum(self.odef)

    def relabel(self, perm):
        vertices = tuple(tuple(sorted(perm[h] for h in v)) for v in self.vertices)
        sigma1 = {perm[h]: perm[k] for h, k in self.sigma1.items()}
        orientation = tuple(_edge(perm[a], perm[b]) for a, b in self.orientation)
        return StableGraph(self.n, vertices, sigma1, self.odef, orientation, self.flavor, validate=False)

    def contract(self, edge_index):
        h1, h2 = self.orientation[edge_index]
        v1, v2 = self.vertex_of(h1), self.vertex_of(h2)
        vertices = [list(v) for v in self.vertices]
        odef = list(self.odef)
        if v1 == v2:
            vertices[v1] = [h for h in vertices[v1] if h not in (h1, h2)]
            odef[v1] += 1
            new_vertices = vertices
            new_odef = odef
        else:
            merged = [h for h in vertices[v1] + vertices[v2] if h not in (h1, h2)]
            keep = [i for i in range(len(vertices)) if i not in (v1, v2)]
            new_vertices = [vertices[i] for i in keep] + [merged]
            new_odef = [odef[i] for i in keep] + [odef[v1] + odef[v2]]
        dropped = {h1, h2}
        relab = {}
        for h in range(self.n):
            if h not in dropped:
                relab[h] = len(relab)
        vertices_out = [tuple(sorted(relab[h] for h in v)) for v in new_vertices]
        sigma1 = {relab[h]: relab[k] for h, k in self.sigma1.items() if h not in dropped}
        orientation = tuple(
            _edge(relab[a], relab[b]) for a, b in self.orientation if {a, b} != dropped
        )
        out = StableGraph(
            self.n - 2,
            vertices_out,
            sigma1,
            new_odef,
            orientation,
            self.flavor if self.flavor != "graph" else "stable-graph",
            validate=False,
        )
        try:
            out.check_stability()
        except GraphStructureError:
            return None
        return out

    def glue(self, l1, other, l2):
        shift = self.n
        g2 = other.relabel({h: h + shift for h in range(other.n)})
        sigma1 = dict(self.sigma1)
        sigma1.update(g2.sigma1)
        sigma1[l1] = l2 + shift
        sigma1[l2 + shift] = l1
        new_edge = _edge(l1, l2 + shift)
        if conventions.NEW_EDGE_POSITION == "first":
            orientation = self.orientation + (new_edge,) + g2.orientation
        else:
            orientation = self.orientation + g2.orientation + (new_edge,)
        return StableGraph(
            self.n + other.n,
            self.vertices + g2.vertices,
            sigma1,
            self.odef + g2.odef,
            orientation,
            self.flavor,
            validate=False,
        )

    def self_glue(self, l1, l2, mode="unrestricted"):
        sigma1 = dict(self.sigma1)
        sigma1[l1] = l2
        sigma1[l2] = l1
        new_edge = _edge(l1, l2)
        if conventions.NEW_EDGE_POSITION == "first":
            orientation = (new_edge,) + self.orientation
        else:
            orientation = self.orientation + (new_edge,)
        return StableGraph(
            self.n, self.vertices, sigma1, self.odef, orientation, self.flavor, validate=False
        )

    # -- canonical form -----------------------------------------------------

    def _vertex_views(self):
        """Per-vertex invariants independent of a vertex ordering."""
        views = []
        for i, v in enumerate(self.vertices):
            leafs = sum(1 for h in v if self.sigma1[h] == h)
            views.append((self.odef[i], len(v), leafs))
        return views

    def _edge_structure(self, order):
        pos = {}
        for rank, i in enumerate(order):
            pos[i] = rank
        multi = {}
        for h1, h2 in self.edges():
            a, b = pos[self.vertex_of(h1)], pos[self.vertex_of(h2)]
            key = (a, b) if a <= b else (b, a)
            multi[key] = multi.get(key, 0) + 1
        return tuple(sorted(multi.items()))

    def canonical(self):
        if not self.is_connected():
            raise ConnectivityError("canonical form needs a connected graph")
        views = self._vertex_views()
        nv = len(self.vertices)
        best = None
        minimizers = []
        for order in itertools.permutations(range(nv)):
            enc = (
                "S",
                self.flavor,
                tuple(views[i] for i in order),
                self._edge_structure(order),
            )
            if best is None or enc < best:
                best = enc
                minimizers = [order]
            elif enc == best:
                minimizers.append(order)
        # internal automorphisms
        aut = len(minimizers)
        loops = {}
        multi = {}
        for h1, h2 in self.edges():
            a, b = self.vertex_of(h1), self.vertex_of(h2)
            if a == b:
                loops[a] = loops.get(a, 0) + 1
            else:
                key = (a, b) if a < b else (b, a)
                multi[key] = multi.get(key, 0) + 1
        for i, v in enumerate(self.vertices):
            leafs = sum(1 for h in v if self.sigma1[h] == h)
            aut *= _factorial(leafs)
        for m in multi.values():
            aut *= _factorial(m)
        for k in loops.values():
            aut *= 2**k * _factorial(k)
        odd = any(m >= 2 for m in multi.values()) or any(k >= 2 for k in loops.values())
        sign = Fraction(1)
        if not odd:
            # all parallel classes are singletons: orientation sign and the
            # parity of every vertex automorphism are unambiguous
            canon = minimizers[0]
            pos = {v: r for r, v in enumerate(canon)}
            canon_edges = sorted(
                (
                    tuple(sorted((pos[self.vertex_of(h1)], pos[self.vertex_of(h2)]))),
                    0,
                )
                for h1, h2 in self.edges()
            )

            def edge_key(h1, h2, order_pos):
                return tuple(sorted((order_pos[self.vertex_of(h1)], order_pos[self.vertex_of(h2)])))

            parities = set()
            for order in minimizers:
                opos = {v: r for r, v in enumerate(order)}
                keys = [
                    (edge_key(h1, h2, opos), 0) for (h1, h2) in self.orientation
                ]
                parities.add(_perm_parity([canon_edges.index(k) for k in keys]))
            if len(parities) == 2:
                odd = True
            else:
                sign = Fraction(parities.pop())
        return best, sign, odd, aut


def _factorial(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


# ---------------------------------------------------------------------------
# canonical classes and a registry of representatives


@dataclass(frozen=True)
class GraphClass:
    key: tuple
    flavor: str
    n_edges: int
    n_half_edges: int
    n_leafs: int
    aut_order: int

    def __repr__(self):
        return "<%s e=%d h=%d aut=%d>" % (self.flavor, self.n_edges, self.n_half_edges, self.aut_order)


_REPRESENTATIVES = {}


def classify(instance):
    """Canonical class and sign of a graph instance; (None, 0) for zero classes.

    The sign relates the instance to the stored class representative:
    instance == sign * representative as oriented classes.
    """
    key, sign, is_zero, aut = instance.canonical()
    if is_zero:
        return None, Fraction(0)
    if key not in _REPRESENTATIVES:
        cls = GraphClass(
            key,
            instance.flavor,
            instance.n_edges(),
            instance.n,
            instance.n_leafs(),
            aut,
        )
        _REPRESENTATIVES[key] = (cls, instance, sign)
    cls, _, rep_sign = _REPRESENTATIVES[key]
    return cls, sign * rep_sign


def representative(cls):
    return _REPRESENTATIVES[cls.key][1]


def reflavor(instance, flavor):
    """Reinterpret an instance in another flavor; None when the data does not fit."""
    if isinstance(instance, StableGraph):
        out = StableGraph(
            instance.n,
            instance.vertices,
            instance.sigma1,
            instance.odef,
            instance.orientation,
            flavor,
            validate=False,
        )
    else:
        out = RibbonGraph(
            instance.n,
            instance.vertices,
            instance.sigma1,
            instance.genus,
            [dict(b) for b in instance.bdef],
            dict(instance.leaf_color),
            dict(instance.empty_face_color),
            instance.orientation,
            flavor,
            validate=False,
        )
    try:
        out.validate()
    except GraphStructureError:
        return None
    return out


def faces(graph):
    return graph.faces()


def arithmetic_genus(graph):
    return graph.arithmetic_genus()


def betti_number(graph):
    return graph.betti_number()


def automorphism_order(graph):
    """(order of Aut, does some automorphism permute the edges oddly)."""
    key, sign, is_zero, aut = graph.canonical()
    return aut, is_zero


def canonical_form(graph):
    """(class or None, sign): the oriented isomorphism class of the instance."""
    return classify(graph)


# ---------------------------------------------------------------------------
# enumeration


@dataclass(frozen=True)
class GraphWindow:
    max_edges: int = 2
    max_half_edges: int = 8
    max_genus_defect: int = 1
    max_boundary_defect: int = 1
    max_loop_defect: int = 2
    colors: tuple = ("*",)

    def admits_class(self, cls):
        return cls.n_edges <= self.max_edges and cls.n_half_edges <= self.max_half_edges


def _connected_skeletons(v, e):
    """Connected multigraphs with loops on vertices 0..v-1 and e edges."""
    pairs = [(i, j) for i in range(v) for j in range(i, v)]
    out = []
    for combo in itertools.combinations_with_replacement(pairs, e):
        if v > 1:
            parent = list(range(v))

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            touched = set()
            for i, j in combo:
                touched.update((i, j))
                a, b = find(i), find(j)
                if a != b:
                    parent[a] = b
            if touched != set(range(v)) or len({find(i) for i in range(v)}) != 1:
                continue
        out.append(combo)
    return out


def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _cycle_structures(distinct, n_leaf):
    """All ways to arrange distinct items plus n_leaf leaf slots into cycles.

    Leaf slots are mutually interchangeable; yields tuples of cycles whose
    entries are either items or the placeholder None.
    """

    def build(remaining, leafs):
        if not remaining and leafs == 0:
            yield ()
            return
        if remaining:
            head = remaining[0]
            pool = list(remaining[1:])
        else:
            head = None
            pool = []
            leafs -= 1
        # choose the rest of head's cycle as an ordered sequence
        for k in range(0, len(pool) + leafs + 1):
            for chosen in _ordered_selections(pool, leafs, k):
                seq, rest_items, rest_leafs = chosen
                cycle = (head,) + seq
                for tail in build(tuple(rest_items), rest_leafs):
                    yield (cycle,) + tail

    return build(tuple(distinct), n_leaf)


def _ordered_selections(items, n_leaf, k):
    """Ordered length-k sequences from distinct items plus identical leafs."""
    if k == 0:
        yield (), list(items), n_leaf
        return
    for i, it in enumerate(items):
        rest = items[:i] + items[i + 1 :]
        for seq, ri, rl in _ordered_selections(rest, n_leaf, k - 1):
            yield (it,) + seq, ri, rl
    if n_leaf > 0:
        for seq, ri, rl in _ordered_selections(items, n_leaf - 1, k - 1):
            yield (None,) + seq, ri, rl


def _ribbon_instances(e, l, flavor, window):
    """All connected ribbon-flavor instances with e edges and l leafs (raw)."""
    out = []
    max_v = e + 1 if e else 1
    for v in range(1, max_v + 1):
        for skel in _connected_skeletons(v, e):
            # half-edges: edge k -> (2k, 2k+1); leafs numbered 2e..2e+l-1
            incidence = [[] for _ in range(v)]
            for k, (i, j) in enumerate(skel):
                incidence[i].append(2 * k)
                incidence[j].append(2 * k + 1)
            sigma1 = {}
            for k in range(e):
                sigma1[2 * k] = 2 * k + 1
                sigma1[2 * k + 1] = 2 * k
            for h in range(2 * e, 2 * e + l):
                sigma1[h] = h
            for leafdist in _compositions(l, v):
                leaf_ids = []
                base = 2 * e
                for li in leafdist:
                    leaf_ids.append(list(range(base, base + li)))
                    base += li
                per_vertex = []
                for vi in range(v):
                    if flavor in ("ribbon", "ribbon-tree"):
                        structures = [
                            (c,)
                            for c in _single_cycles(incidence[vi], leafdist[vi])
                        ]
                    else:
                        structures = list(
                            _cycle_structures(tuple(incidence[vi]), leafdist[vi])
                        )
                    per_vertex.append(structures)
                for choice in itertools.product(*per_vertex):
                    vertices = []
                    ok = True
                    for vi, cycles in enumerate(choice):
                        ids = iter(leaf_ids[vi])
                        concrete = []
                        for c in cycles:
                            concrete.append(
                                tuple(next(ids) if x is None else x for x in c)
                            )
                        if not concrete and leafdist[vi] == 0:
                            # vertex with no half-edges: only allowed alone
                            if v > 1:
                                ok = False
                        vertices.append(tuple(concrete))
                    if not ok:
                        continue
                    out.append((vertices, dict(sigma1)))
    return out


def _single_cycles(items, n_leaf):
    """Single-cycle arrangements of distinct items plus identical leafs."""
    for cycs in _cycle_structures(tuple(items), n_leaf):
        if len(cycs) == 1:
            yield cycs[0]


def _decorate_ribbon(vertices, sigma1, e, l, flavor, window):
    n = 2 * e + l
    nv = len(vertices)
    if flavor in ("ribbon", "ribbon-tree"):
        genus_options = [(0,) * nv]
        bdef_options = [({},) * nv]
    else:
        genus_options = list(
            itertools.product(range(window.max_genus_defect + 1), repeat=nv)
        )
        per_vertex_b = []
        for combo in itertools.product(
            range(window.max_boundary_defect + 1), repeat=len(window.colors)
        ):
            per_vertex_b.append(dict(zip(window.colors, combo)))
        bdef_options = list(itertools.product(per_vertex_b, repeat=nv))
    for genus in genus_options:
        for bdef in bdef_options:
            base = RibbonGraph(
                n,
                vertices,
                sigma1,
                genus,
                bdef,
                {h: window.colors[0] for h in range(n) if sigma1[h] == h},
                {},
                None,
                flavor,
                validate=False,
            )
            try:
                base.check_stability()
            except GraphStructureError:
                continue
            faces_ = base.faces()
            leaf_slots = base.leafs()
            empty_slots = [frozenset(f) for f in faces_ if not base._face_leafs(f)]
            slots = len(leaf_slots) + len(empty_slots)
            for colors in itertools.product(window.colors, repeat=slots):
                lc = dict(zip(leaf_slots, colors[: len(leaf_slots)]))
                efc = dict(zip(empty_slots, colors[len(leaf_slots) :]))
                g = RibbonGraph(
                    n,
                    vertices,
                    sigma1,
                    genus,
                    bdef,
                    lc,
                    efc,
                    None,
                    flavor,
                    validate=False,
                )
                try:
                    g.validate()
                except GraphStructureError:
                    continue
                yield g


def enumerate_sector(flavor, e, l, window):
    """Non-vanishing classes with exactly e edges and l leafs, deduplicated."""
    found = {}
    if flavor in RIBBON_FLAVORS:
        for vertices, sigma1 in _ribbon_instances(e, l, flavor, window):
            for g in _decorate_ribbon(vertices, sigma1, e, l, flavor, window):
                if not g.is_connected():
                    continue
                if flavor == "ribbon-tree" and (
                    g.n_faces() != 1 or g.arithmetic_genus() != 0
                ):
                    continue
                cls, sign = classify(g)
                if cls is not None:
                    found[cls.key] = cls
        # isolated defect vertices (no half-edges)
        if e == 0 and l == 0 and flavor == "stable-ribbon":
            for g0 in range(window.max_genus_defect + 1):
                for combo in itertools.product(
                    range(window.max_boundary_defect + 1), repeat=len(window.colors)
                ):
                    b = dict(zip(window.colors, combo))
                    if g0 == 0 and not any(b.values()):
                        continue
                    g = RibbonGraph(0, ((),), {}, (g0,), (b,), {}, {}, (), flavor, validate=False)
                    cls, sign = classify(g)
                    if cls is not None:
                        found[cls.key] = cls
    else:
        max_v = e + 1 if e else 1
        for v in range(1, max_v + 1):
            for skel in _connected_skeletons(v, e):
                incidence = [[] for _ in range(v)]
                for k, (i, j) in enumerate(skel):
                    incidence[i].append(2 * k)
                    incidence[j].append(2 * k + 1)
                sigma1 = {}
                for k in range(e):
                    sigma1[2 * k] = 2 * k + 1
                    sigma1[2 * k + 1] = 2 * k
                for h in range(2 * e, 2 * e + l):
                    sigma1[h] = h
                for leafdist in _compositions(l, v):
                    base = 2 * e
                    vertices = []
                    for vi in range(v):
                        ids = list(range(base, base + leafdist[vi]))
                        base += leafdist[vi]
                        vertices.append(tuple(sorted(incidence[vi] + ids)))
                    if flavor == "stable-graph":
                        odef_options = itertools.product(
                            range(window.max_loop_defect + 1), repeat=v
                        )
                    else:
                        odef_options = [(0,) * v]
                    for odef in odef_options:
                        g = StableGraph(
                            2 * e + l,
                            vertices,
                            sigma1,
                            odef,
                            None,
                            flavor,
                            validate=False,
                        )
                        try:
                            g.validate()
                        except GraphStructureError:
                            continue
                        if not g.is_connected():
                            continue
                        if flavor == "tree" and g.betti_number() != 0:
                            continue
                        cls, sign = classify(g)
                        if cls is not None:
                            found[cls.key] = cls
    return [found[k] for k in sorted(found)]


_SECTOR_CACHE = {}


def enumerate_graphs(flavor, window):
    """Complete duplicate-free list of non-vanishing classes in the window."""
    if flavor not in FLAVORS:
        raise ValueError("unknown flavor %r" % flavor)
    out = []
    for e in range(window.max_edges + 1):
        for l in range(window.max_half_edges - 2 * e + 1):
            key = (flavor, e, l, window)
            if key not in _SECTOR_CACHE:
                _SECTOR_CACHE[key] = enumerate_sector(flavor, e, l, window)
            out.extend(_SECTOR_CACHE[key])
    return out


# ---------------------------------------------------------------------------
# expansion moves (preimages of edge contraction)


def expansion_candidates(graph):
    """Instances with one more edge, one of whose contractions can give ``graph``.

    The list over-generates; the adjoint differential verifies each candidate
    by contracting its edges.  Complete for the contraction rules.
    """
    if isinstance(graph, StableGraph):
        return _expansions_stable(graph)
    return _expansions_ribbon(graph)


def _arc_splits(c):
    """All ways to cut a cyclic tuple at two gaps into an ordered pair of arcs."""
    k = len(c)
    for p in range(k):
        full = c[p + 1 :] + c[: p + 1]
        yield full, ()
        yield (), full
        for q in range(k):
            if p == q:
                continue
            arc_a = tuple(c[(p + 1 + t) % k] for t in range((q - p) % k))
            arc_b = tuple(c[(q + 1 + t) % k] for t in range((p - q) % k))
            yield arc_a, arc_b


def _expansions_ribbon(g):
    out = []
    n = g.n
    h1, h2 = n, n + 1
    old_gaps = {h: g.gap_color(h) for h in range(n)}

    def emit(vertices, genus, bdef, extra_empty_colors):
        sigma1 = dict(g.sigma1)
        sigma1[h1] = h2
        sigma1[h2] = h1
        cand = RibbonGraph(
            n + 2,
            vertices,
            sigma1,
            genus,
            bdef,
            dict(g.leaf_color),
            {},
            None,
            g.flavor,
            validate=False,
        )
        efc = {}
        for f in cand.faces():
            if cand._face_leafs(f):
                continue
            fs = frozenset(f)
            cols = {old_gaps[x] for x in f if x not in (h1, h2)}
            if fs in extra_empty_colors:
                cols.add(extra_empty_colors[fs])
            if len(cols) != 1:
                return
            efc[fs] = cols.pop()
        cand.empty_face_color = efc
        try:
            cand.validate()
        except GraphStructureError:
            return
        out.append(cand)

    for vi, v in enumerate(g.vertices):
        others = [w for wi, w in enumerate(g.vertices) if wi != vi]
        other_gen = [g.genus[wi] for wi in range(len(g.vertices)) if wi != vi]
        other_bd = [g.bdef_dict(wi) for wi in range(len(g.vertices)) if wi != vi]
        gv = g.genus[vi]
        bv = g.bdef_dict(vi)
        cycles = list(v)

        # M1: split the vertex along a new non-loop edge
        for ci, c in enumerate(cycles):
            rest = cycles[:ci] + cycles[ci + 1 :]
            for arc_a, arc_b in _arc_splits(c):
                ca = (h1,) + arc_a
                cb = (h2,) + arc_b
                for t_mask in range(1 << len(rest)):
                    part_a = [rest[t] for t in range(len(rest)) if t_mask >> t & 1]
                    part_b = [rest[t] for t in range(len(rest)) if not t_mask >> t & 1]
                    for ga in range(gv + 1):
                        for ba, bb in _bdef_splits(bv):
                            emit(
                                tuple(others) + (tuple([ca] + part_a), tuple([cb] + part_b)),
                                tuple(other_gen) + (ga, gv - ga),
                                tuple(other_bd) + (ba, bb),
                                {},
                            )
        # M1 degenerate: both new cycles are singletons, fed by a boundary defect
        for col in [c for c, e in bv.items() if e]:
            bv2 = dict(bv)
            bv2[col] -= 1
            for t_mask in range(1 << len(cycles)):
                part_a = [cycles[t] for t in range(len(cycles)) if t_mask >> t & 1]
                part_b = [cycles[t] for t in range(len(cycles)) if not t_mask >> t & 1]
                for ga in range(gv + 1):
                    for ba, bb in _bdef_splits(bv2):
                        emit(
                            tuple(others) + (tuple([(h1,)] + part_a), tuple([(h2,)] + part_b)),
                            tuple(other_gen) + (ga, gv - ga),
                            tuple(other_bd) + (ba, bb),
                            {frozenset((h1, h2)): col},
                        )

        # M2: a loop joining two cycles, paid by a genus defect
        if gv >= 1:
            for ci, c in enumerate(cycles):
                rest = cycles[:ci] + cycles[ci + 1 :]
                for arc_a, arc_b in _arc_splits(c):
                    emit(
                        tuple(others)
                        + (tuple(rest + [(h1,) + arc_a, (h2,) + arc_b]),),
                        tuple(other_gen) + (gv - 1,),
                        tuple(other_bd) + (dict(bv),),
                        {},
                    )
            for col in [c for c, e in bv.items() if e]:
                bv2 = dict(bv)
                bv2[col] -= 1
                emit(
                    tuple(others) + (tuple(cycles + [(h1,), (h2,)]),),
                    tuple(other_gen) + (gv - 1,),
                    tuple(other_bd) + (bv2,),
                    {frozenset((h1, h2)): col},
                )

        # M3: a loop inside a single cycle
        for ci, cj in itertools.combinations(range(len(cycles)), 2):
            ca, cb = cycles[ci], cycles[cj]
            rest = [cycles[t] for t in range(len(cycles)) if t not in (ci, cj)]
            for ra in range(len(ca)):
                for rb in range(len(cb)):
                    joined = (h1,) + ca[ra:] + ca[:ra] + (h2,) + cb[rb:] + cb[:rb]
                    emit(
                        tuple(others) + (tuple(rest + [joined]),),
                        tuple(other_gen) + (gv,),
                        tuple(other_bd) + (dict(bv),),
                        {},
                    )
        for col in [c for c, e in bv.items() if e]:
            bv2 = dict(bv)
            bv2[col] -= 1
            for ci, c in enumerate(cycles):
                rest = cycles[:ci] + cycles[ci + 1 :]
                for r in range(len(c)):
                    joined = (h1, h2) + c[r:] + c[:r]
                    emit(
                        tuple(others) + (tuple(rest + [joined]),),
                        tuple(other_gen) + (gv,),
                        tuple(other_bd) + (bv2,),
                        {frozenset((h1,)): col},
                    )
                    joined2 = (h2, h1) + c[r:] + c[:r]
                    emit(
                        tuple(others) + (tuple(rest + [joined2]),),
                        tuple(other_gen) + (gv,),
                        tuple(other_bd) + (bv2,),
                        {frozenset((h2,)): col},
                    )
            # doubly degenerate: the loop is a cycle of its own
            for col2 in [c for c, e in bv2.items() if e]:
                bv3 = dict(bv2)
                bv3[col2] -= 1
                emit(
                    tuple(others) + (tuple(cycles + [(h1, h2)]),),
                    tuple(other_gen) + (gv,),
                    tuple(other_bd) + (bv3,),
                    {frozenset((h1,)): col, frozenset((h2,)): col2},
                )
    return out


def _all_colors(g):
    for b in g.bdef:
        for c, _ in b:
            yield c


def _bdef_splits(b):
    """All ways to split a boundary-defect dict into two."""
    items = sorted(b.items())
    choices = [range(e + 1) for _, e in items]
    for combo in itertools.product(*choices):
        left = {c: x for (c, e), x in zip(items, combo) if x}
        right = {c: e - x for (c, e), x in zip(items, combo) if e - x}
        yield left, right


def _expansions_stable(g):
    out = []
    n = g.n
    h1, h2 = n, n + 1

    def emit(vertices, odef):
        sigma1 = dict(g.sigma1)
        sigma1[h1] = h2
        sigma1[h2] = h1
        cand = StableGraph(n + 2, vertices, sigma1, odef, None, g.flavor, validate=False)
        try:
            cand.validate()
        except GraphStructureError:
            return
        out.append(cand)

    for vi, v in enumerate(g.vertices):
        others = [g.vertices[wi] for wi in range(len(g.vertices)) if wi != vi]
        other_o = [g.odef[wi] for wi in range(len(g.vertices)) if wi != vi]
        ov = g.odef[vi]
        halves = list(v)
        # N1: split the vertex
        for mask in range(1 << len(halves)):
            part_a = [halves[t] for t in range(len(halves)) if mask >> t & 1]
            part_b = [halves[t] for t in range(len(halves)) if not mask >> t & 1]
            for oa in range(ov + 1):
                emit(
                    tuple(others) + (tuple(part_a + [h1]), tuple(part_b + [h2])),
                    tuple(other_o) + (oa, ov - oa),
                )
        # N2: add a loop
        if ov >= 1:
            emit(
                tuple(others) + (tuple(halves + [h1, h2]),),
                tuple(other_o) + (ov - 1,),
            )
    return out
