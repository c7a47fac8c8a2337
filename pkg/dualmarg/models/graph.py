# Licensed under an MIT open source license - see LICENSE

import numpy as np
import networkx as nx

from ..exceptions import GraphValidationError


__all__ = ['Graph', 'build_graph', 'grid_graph', 'complete_graph']


class Graph(object):
    """
    Connected simple graph carrying the variables of the model.

    Edge ``e = (i, j)`` is oriented from ``i`` to ``j``; the edge variable of
    the primal model is ``y_e = x_i - x_j (mod q)``.

    Parameters
    ----------
    vertex_count : int
        Number of vertices N.
    edges : sequence of (int, int)
        Edge list. Self-loops, duplicate edges (in either orientation) and
        disconnected edge lists are rejected.
    """

    def __init__(self, vertex_count, edges):

        vertex_count = int(vertex_count)
        if vertex_count < 1:
            raise GraphValidationError("vertex_count must be positive. Found "
                                       "{}".format(vertex_count))

        edges = tuple((int(i), int(j)) for i, j in edges)

        seen = {}
        for idx, (i, j) in enumerate(edges):
            for v in (i, j):
                if v < 0 or v >= vertex_count:
                    raise GraphValidationError(
                        "Edge {0} {1} references vertex {2} outside "
                        "0..{3}.".format(idx, (i, j), v, vertex_count - 1))
            if i == j:
                raise GraphValidationError("Edge {0} {1} is a self-loop."
                                           .format(idx, (i, j)))
            key = frozenset((i, j))
            if key in seen:
                raise GraphValidationError(
                    "Edge {0} {1} duplicates edge {2} {3}."
                    .format(idx, (i, j), seen[key], edges[seen[key]]))
            seen[key] = idx

        nx_graph = nx.Graph()
        nx_graph.add_nodes_from(range(vertex_count))
        nx_graph.add_edges_from(edges)
        if not nx.is_connected(nx_graph):
            components = list(nx.connected_components(nx_graph))
            raise GraphValidationError(
                "The edge list is disconnected: found {0} components. "
                "Vertices {1} are not reachable from vertex 0."
                .format(len(components),
                        sorted(set(range(vertex_count)) -
                               nx.node_connected_component(nx_graph, 0))))

        self._vertex_count = vertex_count
        self._edges = edges

        incidence = [[] for _ in range(vertex_count)]
        signs = [[] for _ in range(vertex_count)]
        for idx, (i, j) in enumerate(edges):
            incidence[i].append(idx)
            signs[i].append(-1)
            incidence[j].append(idx)
            signs[j].append(1)

        self._incidence = tuple(tuple(inc) for inc in incidence)
        self._incidence_signs = tuple(tuple(sgn) for sgn in signs)

        self._edge_array = np.array(edges, dtype=int).reshape(-1, 2)
        self._edge_array.setflags(write=False)

    @property
    def vertex_count(self):
        '''
        Number of vertices N.
        '''
        return self._vertex_count

    @property
    def edges(self):
        '''
        Tuple of oriented edges ``(i, j)``.
        '''
        return self._edges

    @property
    def edge_count(self):
        return len(self._edges)

    @property
    def edge_array(self):
        '''
        Read-only ``(|E|, 2)`` integer array of the edges.
        '''
        return self._edge_array

    @property
    def incidence(self):
        '''
        Incident edge indices for every vertex.
        '''
        return self._incidence

    @property
    def incidence_signs(self):
        '''
        Orientation of every incident edge: +1 when the edge enters the
        vertex, -1 when it leaves it. Aligned with `incidence`.
        '''
        return self._incidence_signs

    @property
    def degrees(self):
        return np.array([len(inc) for inc in self._incidence], dtype=int)

    @property
    def is_tree(self):
        return self.edge_count == self.vertex_count - 1

    def to_networkx(self):
        nx_graph = nx.Graph()
        nx_graph.add_nodes_from(range(self.vertex_count))
        nx_graph.add_edges_from(self.edges)
        return nx_graph

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.vertex_count == other.vertex_count and
                self.edges == other.edges)

    def __hash__(self):
        return hash((self.vertex_count, self.edges))

    def __repr__(self):
        return "Graph(N={0}, |E|={1})".format(self.vertex_count,
                                             self.edge_count)


def grid_graph(rows, cols, periodic=False):
    '''
    Rectangular lattice with vertices numbered in row-major order.

    With periodic boundaries every side needs at least 3 vertices;
    smaller sides wrap onto an existing bond and raise a duplicate-edge
    error.
    '''

    rows = int(rows)
    cols = int(cols)
    if rows < 1 or cols < 1:
        raise GraphValidationError("Grid sides must be positive. Found "
                                   "{0}x{1}".format(rows, cols))

    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if periodic or c + 1 < cols:
                edges.append((v, r * cols + (c + 1) % cols))
            if periodic or r + 1 < rows:
                edges.append((v, ((r + 1) % rows) * cols + c))

    return Graph(rows * cols, edges)


def complete_graph(n):
    '''
    Complete graph on ``n`` vertices with edges ``(i, j)``, ``i < j``.
    '''
    n = int(n)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return Graph(n, edges)


def build_graph(spec):
    '''
    Build a `Graph` from a specification.

    Parameters
    ----------
    spec : dict or `Graph`
        One of ``{"kind": "grid", "rows": r, "cols": c, "periodic": bool}``,
        ``{"kind": "complete", "n": n}`` or
        ``{"kind": "edges", "edges": [[i, j], ...], "vertex_count": N}``.
        ``vertex_count`` defaults to one more than the largest vertex index.

    Returns
    -------
    graph : `Graph`
    '''

    if isinstance(spec, Graph):
        return spec

    if not isinstance(spec, dict):
        raise GraphValidationError("Graph spec must be a dictionary.")

    kind = spec.get("kind")

    try:
        return _build_from_dict(kind, spec)
    except KeyError as err:
        raise GraphValidationError("A '{0}' graph needs a {1} entry."
                                   .format(kind, err))


def _build_from_dict(kind, spec):

    if kind == "grid":
        return grid_graph(spec["rows"], spec["cols"],
                          periodic=bool(spec.get("periodic", False)))
    elif kind == "complete":
        return complete_graph(spec["n"])
    elif kind == "edges":
        edges = [tuple(edge) for edge in spec["edges"]]
        for edge in edges:
            if len(edge) != 2:
                raise GraphValidationError("Edge {} must be a vertex pair."
                                           .format(edge))
        vertex_count = spec.get("vertex_count")
        if vertex_count is None:
            if len(edges) == 0:
                raise GraphValidationError("An empty edge list needs an "
                                           "explicit vertex_count.")
            vertex_count = max(max(edge) for edge in edges) + 1
        return Graph(vertex_count, edges)
    else:
        raise GraphValidationError("Unknown graph kind {0}. Must be one of "
                                   "{1}".format(kind,
                                                ["grid", "complete", "edges"]))
