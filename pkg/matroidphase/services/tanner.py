"""
Tanner grafiği ve hipergraf diagnostikleri

Köşe düğümleri ("v", i), kenar düğümleri ("e", j) olarak tutulur. Kenar
düğümü kırmızıdır ⇔ hiperkenar boyu 2.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import networkx as nx
import numpy as np
from networkx.algorithms import bipartite as bp

from matroidphase.services.peel import Hypergraph
from matroidphase.services.spmat import DenseMatrix, Label
from matroidphase.utils.errors import DegreeSequenceError, DimensionError, UnknownLabelError
from matroidphase.utils.rng import SeedLike, make_rng

logger = logging.getLogger(__name__)

VERTEX = "v"
EDGE = "e"


@dataclass(frozen=True)
class TannerGraph:
    graph: nx.Graph
    simple: bool = True

    @property
    def vertex_nodes(self) -> List[Tuple[str, int]]:
        return sorted(n for n, d in self.graph.nodes(data=True) if d["bipartite"] == 0)

    @property
    def edge_nodes(self) -> List[Tuple[str, int]]:
        return sorted(n for n, d in self.graph.nodes(data=True) if d["bipartite"] == 1)

    @property
    def red_flags(self) -> Dict[Tuple[str, int], bool]:
        return {n: self.graph.nodes[n]["red"] for n in self.edge_nodes}

    @property
    def n_red(self) -> int:
        return sum(self.red_flags.values())

    def adjacency(self) -> Dict[Tuple[str, int], List[Tuple[str, int]]]:
        return {n: sorted(self.graph.neighbors(n)) for n in self.graph.nodes}


def tanner_of(hypergraph: Hypergraph) -> TannerGraph:
    g = nx.Graph()
    for i, label in enumerate(hypergraph.vertices):
        g.add_node((VERTEX, i), bipartite=0, label=label)
    for j, edge in enumerate(hypergraph.edges):
        g.add_node((EDGE, j), bipartite=1, red=len(edge) == 2, row=hypergraph.edge_rows[j])
        for pos, (v, value) in enumerate(zip(edge, hypergraph.edge_values[j])):
            g.add_edge((VERTEX, v), (EDGE, j), pos=pos, value=value)
    return TannerGraph(g)


def to_hypergraph(tanner: TannerGraph) -> Hypergraph:
    """tanner_of'un tersi"""
    g = tanner.graph
    vertices = tuple(g.nodes[n]["label"] for n in tanner.vertex_nodes)
    edges, values, rows = [], [], []
    for node in tanner.edge_nodes:
        incident = sorted(
            ((g.edges[node, v]["pos"], v[1], g.edges[node, v]["value"]) for v in g.neighbors(node)),
        )
        edges.append(tuple(v for _, v, _ in incident))
        values.append(tuple(val for _, _, val in incident))
        rows.append(g.nodes[node]["row"])
    return Hypergraph(vertices, tuple(edges), tuple(values), tuple(rows))


def red_components(tanner: TannerGraph) -> List[int]:
    """Köşe düğümleri + kırmızı kenar düğümlerinin ürettiği alt grafın bileşen mertebeleri (azalan)"""
    g = tanner.graph
    keep = [n for n, d in g.nodes(data=True) if d["bipartite"] == 0 or d.get("red")]
    sub = g.subgraph(keep)
    return sorted((len(c) for c in nx.connected_components(sub)), reverse=True)


def red_diagnostics(hypergraph: Hypergraph) -> Dict[str, float]:
    tanner = tanner_of(hypergraph)
    sizes = red_components(tanner)
    n_edges = hypergraph.n_edges
    return {
        "red_edges": tanner.n_red,
        "red_fraction": tanner.n_red / n_edges if n_edges else 0.0,
        "max_red_component": sizes[0] if sizes else 0,
    }


def sub_hypergraph(hypergraph: Hypergraph, edge_indices: Iterable[int]) -> Hypergraph:
    """Verilen kenarları tutar, yalıtılmış köşeleri atar"""
    picked = sorted(set(edge_indices))
    used = sorted({v for j in picked for v in hypergraph.edges[j]})
    remap = {v: i for i, v in enumerate(used)}
    return Hypergraph(
        tuple(hypergraph.vertices[v] for v in used),
        tuple(tuple(remap[v] for v in hypergraph.edges[j]) for j in picked),
        tuple(hypergraph.edge_values[j] for j in picked),
        tuple(hypergraph.edge_rows[j] for j in picked),
    )


def is_pseudo_forest(hypergraph: Hypergraph) -> bool:
    """Tüm köşe dereceleri ≥ 1 ve Tanner grafı orman"""
    if hypergraph.n_vertices == 0:
        return True
    if min(hypergraph.degrees) < 1:
        return False
    return nx.is_forest(tanner_of(hypergraph).graph)


def attach_leaf_edge(hypergraph: Hypergraph, anchor: Label, new_vertices: Sequence[Label], row: int = -1) -> Hypergraph:
    """
    Yaprak-kenar ekler: kenar tam olarak bir mevcut köşeyi (anchor) ve
    yeni köşeleri içerir.
    """
    if anchor not in hypergraph.vertices:
        raise UnknownLabelError(f"bilinmeyen köşe: {anchor!r}")
    if not new_vertices or set(new_vertices) & set(hypergraph.vertices) or len(set(new_vertices)) != len(new_vertices):
        raise DimensionError("yaprak-kenar en az bir yeni ve farklı köşe eklemeli")
    vertices = hypergraph.vertices + tuple(new_vertices)
    start = hypergraph.n_vertices
    edge = (hypergraph.vertices.index(anchor),) + tuple(range(start, start + len(new_vertices)))
    return Hypergraph(
        vertices,
        hypergraph.edges + (edge,),
        hypergraph.edge_values + ((1,) * len(edge),),
        hypergraph.edge_rows + (row,),
    )


def tanner_core(tanner: TannerGraph) -> nx.Graph:
    """Yapraklar tekrar tekrar silinerek elde edilen 2-çekirdek (paralel kenarlar tekilleştirilir)"""
    g = tanner.graph
    return nx.k_core(nx.Graph(g) if g.is_multigraph() else g, 2)


def excess(sub: nx.Graph, host: nx.Graph) -> int:
    """sub içindeki kenar düğümlerinin host'taki derece fazlalarının toplamı"""
    total = 0
    for node, data in sub.nodes(data=True):
        if host.nodes[node].get("bipartite") == 1:
            total += host.degree(node) - sub.degree(node)
    return total


def closure(sub: nx.Graph, host: nx.Graph) -> nx.Graph:
    """sub'ın kenar düğümlerini host'taki tüm komşularıyla tamamlayan en küçük alt graf"""
    nodes = set(sub.nodes)
    for node in list(sub.nodes):
        if host.nodes[node].get("bipartite") == 1:
            nodes.update(host.neighbors(node))
    closed = nx.Graph(host.subgraph(nodes).edge_subgraph(
        [(u, v) for u, v in host.subgraph(nodes).edges if _keeps(u, v, sub, host)]
    ))
    closed.add_nodes_from((n, host.nodes[n]) for n in sub.nodes)
    return closed


def _keeps(u, v, sub: nx.Graph, host: nx.Graph) -> bool:
    if sub.has_edge(u, v):
        return True
    return any(host.nodes[x].get("bipartite") == 1 and x in sub for x in (u, v))


def config_model(vertex_degrees: Sequence[int], edge_degrees: Sequence[int], rng: SeedLike = None) -> TannerGraph:
    """
    Noktaların düzgün rastgele eşlenmesiyle iki parçalı çoklu graf. Paralel
    kenarlar korunur; basitlik bayrağı raporlanır.
    """
    if sum(vertex_degrees) != sum(edge_degrees):
        raise DegreeSequenceError(
            f"derece toplamları farklı: köşeler {sum(vertex_degrees)}, kenarlar {sum(edge_degrees)}"
        )
    rng = make_rng(rng)
    seed = int(rng.integers(0, 2**32 - 1))
    multi = bp.configuration_model(list(edge_degrees), list(vertex_degrees), create_using=nx.MultiGraph(), seed=seed)
    n_e = len(edge_degrees)
    mapping = {i: (EDGE, i) if i < n_e else (VERTEX, i - n_e) for i in multi.nodes}
    multi = nx.relabel_nodes(multi, mapping)
    for node in multi.nodes:
        if node[0] == EDGE:
            multi.nodes[node].update(bipartite=1, red=multi.degree(node) == 2, row=node[1])
        else:
            multi.nodes[node].update(bipartite=0, label=node[1])
    simple = nx.Graph(multi).number_of_edges() == multi.number_of_edges()
    return TannerGraph(multi, simple)


@dataclass(frozen=True)
class AlphaSubgraph:
    J: Tuple[Label, ...]
    alpha: Tuple[int, ...]
    included_edges: Tuple[int, ...]
    vertex_degrees: Dict[Label, int]
    weight: int

    @property
    def edge_count(self) -> int:
        return len(self.included_edges)

    def degree_one_outside(self) -> List[Label]:
        """J dışında derecesi 1 olan köşeler (geçerli izlerde boş olmalı)"""
        inside = set(self.J)
        return [v for v, deg in self.vertex_degrees.items() if deg == 1 and v not in inside]


def alpha_subgraph(hypergraph: Hypergraph, b: DenseMatrix, J: Sequence[Label], alpha: Sequence[int]) -> AlphaSubgraph:
    """
    w = Σ_{i∈J} α_i b_i. Satırı A″ satırlarından olup w'nin sıfırdan farklı
    olduğu kenarlar tutulur, yalıtılmış köşeler atılır.
    """
    field = b.field
    if len(J) != len(alpha) or not J:
        raise DimensionError("J ve alpha aynı uzunlukta ve boş olmayan olmalı")
    if not any(int(a) % field.q for a in alpha):
        raise DimensionError("alpha sıfır vektör olamaz")
    if b.row_labels is None or b.col_labels is None:
        raise DimensionError("B satır ve sütun etiketleri taşımalı")
    row_of = {label: i for i, label in enumerate(b.row_labels)}
    missing = [j for j in J if j not in row_of]
    if missing:
        raise DimensionError(f"J, B'nin satır etiketleri dışında: {missing}")

    add, mul = field.add_table, field.mul_table
    w = np.zeros(b.n_cols, dtype=np.uint8)
    for label, a in zip(J, alpha):
        w = add[w, mul[int(a), b.data[row_of[label]]]]
    col_of = {row_id: c for c, row_id in enumerate(b.col_labels)}

    included = []
    degrees: Dict[Label, int] = {}
    for j, edge in enumerate(hypergraph.edges):
        c = col_of.get(hypergraph.edge_rows[j])
        if c is None or not w[c]:
            continue
        included.append(j)
        for v in edge:
            label = hypergraph.vertices[v]
            degrees[label] = degrees.get(label, 0) + 1
    return AlphaSubgraph(tuple(J), tuple(int(a) for a in alpha), tuple(included), degrees, int(np.count_nonzero(w)))
