"""First passage percolation on a weighted graph.

The exploration is a binary-heap Dijkstra.  Every edge from an explored vertex
to a not-yet-explored endpoint stays in the heap as a separate *frontier entry*
(so a vertex may be active several times, with several colors), which is what
the active-set-with-remaining-lifetimes view needs.  A vertex is red if the edge
that reached it first is a cycle edge and blue if it is a shortcut; the source
is blue.  Equal distances are broken by lower vertex id.
"""
import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .nwgraph import CYCLE

RED, BLUE = 0, 1
COLOR_NAMES = ("R", "B")
COLOR_PAIRS = ("BB", "RB", "BR", "RR")


class UnknownVertex(IndexError):
    pass


@dataclass
class ShortestWeightTree:
    root: int
    frozen_at: float
    # vertex -> (distance, hopcount, color, parent)
    explored: dict
    # (vertex, remaining_lifetime, color, parent)
    frontier: list
    counts: tuple  # (N_R, N_B, A_R, A_B)

    @property
    def N_R(self):
        return self.counts[0]

    @property
    def N_B(self):
        return self.counts[1]

    @property
    def A_R(self):
        return self.counts[2]

    @property
    def A_B(self):
        return self.counts[3]


@dataclass
class PathResult:
    weight: float
    hopcount: int
    path: list


@dataclass
class Collision:
    s: float          # collision time minus t_freeze
    vertex: int
    color_v: int      # color of the vertex in the growing tree of v
    color_u: int      # color of its (shortest) frontier entry in the frozen tree of u
    remaining: float  # remaining lifetime in the frozen tree
    secondary: bool   # reached by the v-tree through an earlier collision or u-explored vertex

    @property
    def color_pair(self):
        return COLOR_NAMES[self.color_v] + COLOR_NAMES[self.color_u]


@dataclass
class CollisionResult:
    weight: float
    hopcount: int
    path: list
    t_freeze: float
    collisions: list = field(default_factory=list)
    direct: bool = False
    horizon: float = None
    horizon_reached: bool = True
    hops_u: int = 0
    hops_v: int = 0
    # frontier counts (A_R, A_B) of each tree at t_freeze; counts_v is None if
    # the growing tree never got past t_freeze
    counts_u: tuple = None
    counts_v: tuple = None


class Explorer:
    """Incremental exploration from one source on an immutable graph."""

    def __init__(self, graph, source, log_children=False):
        if not 0 <= source < graph.n:
            raise UnknownVertex(f"vertex {source} not in [0, {graph.n})")
        self.graph = graph
        self.source = int(source)
        self.ip, self.nbr, self.wt, self.kind = graph.adjacency_lists()
        # vertex -> (dist, hops, color, parent)
        self.explored = {}
        self.order = []
        self.heap = []
        # per unexplored vertex: pending frontier entries [red, blue]
        self.pending = {}
        self.A = [0, 0]
        self.N = [0, 0]
        self.time = 0.0
        self.log_children = log_children
        self.children_log = []
        self._settle(self.source, 0.0, 0, BLUE, -1)

    def _settle(self, x, d, hops, color, parent):
        self.explored[x] = (d, hops, color, parent)
        self.order.append(x)
        self.N[color] += 1
        self.time = d
        pend = self.pending.pop(x, None)
        if pend is not None:
            self.A[0] -= pend[0]
            self.A[1] -= pend[1]
        explored = self.explored
        pending = self.pending
        heap = self.heap
        nbr, wt, kind = self.nbr, self.wt, self.kind
        added = [0, 0]
        for k in range(self.ip[x], self.ip[x + 1]):
            y = nbr[k]
            if y in explored:
                continue
            c = RED if kind[k] == CYCLE else BLUE
            heapq.heappush(heap, (d + wt[k], y, x, c, hops + 1))
            p = pending.get(y)
            if p is None:
                pending[y] = p = [0, 0]
            p[c] += 1
            added[c] += 1
        self.A[0] += added[0]
        self.A[1] += added[1]
        if self.log_children:
            self.children_log.append((x, color, added[0], added[1], parent))

    def peek(self):
        """Distance of the next vertex to be explored (inf if none)."""
        heap, explored = self.heap, self.explored
        while heap and heap[0][1] in explored:
            heapq.heappop(heap)
        return heap[0][0] if heap else math.inf

    def step(self):
        """Explore the next vertex; returns it, or None when the graph is exhausted."""
        if self.peek() == math.inf:
            return None
        d, y, parent, c, hops = heapq.heappop(self.heap)
        self._settle(y, d, hops, c, parent)
        return y

    def advance_to(self, t):
        # right-continuous: vertices at distance exactly t are explored
        while self.peek() <= t:
            self.step()
        self.time = t

    def advance_splits(self, m):
        while len(self.order) < m and self.step() is not None:
            pass

    def advance_until(self, target):
        if not 0 <= target < self.graph.n:
            raise UnknownVertex(f"vertex {target} not in [0, {self.graph.n})")
        while target not in self.explored and self.step() is not None:
            pass

    def frontier_entries(self):
        t = self.time
        explored = self.explored
        return [(y, d - t, c, p) for d, y, p, c, _ in self.heap if y not in explored]

    def frontier_min(self):
        """Unexplored frontier vertex -> (remaining, color, parent, hops) of its shortest entry."""
        t = self.time
        explored = self.explored
        best = {}
        for d, y, p, c, h in self.heap:
            if y in explored:
                continue
            cur = best.get(y)
            if cur is None or d - t < cur[0]:
                best[y] = (d - t, c, p, h)
        return best

    def snapshot(self):
        return ShortestWeightTree(
            root=self.source,
            frozen_at=self.time,
            explored=dict(self.explored),
            frontier=self.frontier_entries(),
            counts=(self.N[0], self.N[1], self.A[0], self.A[1]),
        )

    def path_to(self, x):
        path = []
        while x != -1:
            path.append(x)
            x = self.explored[x][3]
        return path[::-1]


def explore(graph, source, at_time=None, at_splits=None, until_target=None):
    """Grow the shortest weight tree of ``source`` and freeze it.

    Exactly one stopping rule must be given.  With ``at_splits`` or
    ``until_target`` the tree is frozen at the distance of the last explored
    vertex.
    """
    given = [a is not None for a in (at_time, at_splits, until_target)]
    if sum(given) != 1:
        raise ValueError("give exactly one of at_time, at_splits, until_target")
    ex = Explorer(graph, source)
    if at_time is not None:
        ex.advance_to(at_time)
    elif at_splits is not None:
        ex.advance_splits(at_splits)
    else:
        ex.advance_until(until_target)
    return ex.snapshot()


def distance(graph, u, v):
    """Shortest weight path between ``u`` and ``v`` by Dijkstra stopped at ``v``."""
    ex = Explorer(graph, u)
    ex.advance_until(v)
    d, hops, _, _ = ex.explored[v]
    return PathResult(d, hops, ex.path_to(v))


def shortest_path_tree(graph, source):
    """Full single-source run: arrays of distances, hopcounts and parents."""
    if not 0 <= source < graph.n:
        raise UnknownVertex(f"vertex {source} not in [0, {graph.n})")
    ip, nbr, wt, _ = graph.adjacency_lists()
    n = graph.n
    dist = [math.inf] * n
    hops = [0] * n
    parent = [-1] * n
    done = [False] * n
    heap = [(0.0, source, -1, 0)]
    push, pop = heapq.heappush, heapq.heappop
    while heap:
        d, x, p, h = pop(heap)
        if done[x]:
            continue
        done[x] = True
        dist[x] = d
        hops[x] = h
        parent[x] = p
        h += 1
        for k in range(ip[x], ip[x + 1]):
            y = nbr[k]
            if not done[y]:
                nd = d + wt[k]
                if nd < dist[y]:
                    dist[y] = nd
                    push(heap, (nd, y, x, h))
    return np.array(dist), np.array(hops), np.array(parent)


def epidemic_curve(graph, source, time_grid, dist=None):
    """Fraction of vertices within distance t of ``source`` for each t in ``time_grid``."""
    grid = np.asarray(time_grid, dtype=float)
    if np.any(np.diff(grid) < 0):
        raise ValueError("time grid must be sorted")
    if dist is None:
        dist, _, _ = shortest_path_tree(graph, source)
    d = np.sort(dist)
    return np.searchsorted(d, grid, side="right") / graph.n


def swt_martingale(tree, k):
    """W^(n) = e^{-lam t} (A_R u_R + A_B u_B) from the frozen frontier counts."""
    a = tree.A_R * k.u_R + tree.A_B * k.u_B
    if a <= 0:
        raise ValueError("empty frontier: the tree already covers the graph")
    return math.exp(-k.lam * tree.frozen_at) * a


def default_t_freeze(k, n):
    return k.t_n(n)


def collision_connect(graph, u, v, t_freeze, horizon=None):
    """Distance from ``u`` to ``v`` through collisions of two shortest weight trees.

    The tree of ``u`` is frozen at ``t_freeze``; the tree of ``v`` grows and
    every frontier vertex of the frozen tree that it explores is a collision at
    time ``t_freeze + s``, giving a path of weight ``2 t_freeze + s + R``.  The
    tree of ``v`` keeps growing until no later collision can improve the
    minimum and, when ``horizon`` is given, at least until ``t_freeze + horizon``.
    """
    if u == v:
        raise ValueError("u and v must differ")
    if not t_freeze > 0:
        raise ValueError("t_freeze must be > 0")
    eu = Explorer(graph, u)
    eu.advance_to(t_freeze)
    if not 0 <= v < graph.n:
        raise UnknownVertex(f"vertex {v} not in [0, {graph.n})")
    if v in eu.explored:
        d, hops, _, _ = eu.explored[v]
        return CollisionResult(d, hops, eu.path_to(v), t_freeze, direct=True, horizon=horizon,
                               hops_u=hops, counts_u=tuple(eu.A))

    front = eu.frontier_min()
    u_explored = eu.explored
    ev = Explorer(graph, v)
    collisions = []
    tainted = {v: False}
    collided = set()
    best, best_x = math.inf, None
    stop_at = -math.inf if horizon is None else t_freeze + horizon

    def visit(x):
        nonlocal best, best_x
        d, _, c, p = ev.explored[x]
        t = p != -1 and (tainted[p] or p in collided or p in u_explored)
        tainted[x] = t
        hit = front.get(x)
        if hit is not None:
            rem, cu, _, _ = hit
            collisions.append(Collision(d - t_freeze, x, c, cu, rem, t))
            collided.add(x)
            if t_freeze + rem + d < best:
                best, best_x = t_freeze + rem + d, x

    counts_v = None
    visit(v)
    while True:
        nxt = ev.peek()
        if counts_v is None and nxt > t_freeze:
            counts_v = tuple(ev.A)
        if nxt == math.inf or (nxt > best - t_freeze and nxt > stop_at):
            break
        visit(ev.step())

    rem, _, pu, hu = front[best_x]
    path_u = eu.path_to(pu)
    path_v = ev.path_to(best_x)
    hops_v = ev.explored[best_x][1]
    return CollisionResult(
        weight=best,
        hopcount=hu + hops_v,
        path=path_u + path_v[::-1],
        t_freeze=t_freeze,
        collisions=collisions,
        horizon=horizon,
        horizon_reached=horizon is None or ev.peek() > stop_at,
        hops_u=hu,
        hops_v=hops_v,
        counts_u=tuple(eu.A),
        counts_v=counts_v,
    )


def collision_martingales(result, k):
    """(W_U^(n), W_V^(n)) from the frontier counts both trees had at t_freeze."""
    scale = math.exp(-k.lam * result.t_freeze)

    def w(counts):
        return None if counts is None else scale * (counts[0] * k.u_R + counts[1] * k.u_B)

    return w(result.counts_u), w(result.counts_v)


def collision_log_classified(result, include_secondary=False):
    """Split the collision log into the four color-pair streams.

    Keys are ``q + r``: the color of the vertex in the growing tree followed by
    its color in the frozen tree.  Each stream is a sorted array of collision
    times ``s``; its counting process is ``C_{q,r}(s)``.  Returns the streams and
    a flag that is False when the log stops short of the requested horizon.
    """
    streams = {pair: [] for pair in COLOR_PAIRS}
    for col in result.collisions:
        if col.secondary and not include_secondary:
            continue
        if result.horizon is not None and col.s > result.horizon:
            continue
        streams[col.color_pair].append(col.s)
    streams = {pair: np.sort(np.array(times)) for pair, times in streams.items()}
    complete = result.horizon is not None and result.horizon_reached
    return streams, complete


def counting_process(times, s):
    """C(s) = #{collision times <= s}."""
    return np.searchsorted(times, np.asarray(s, dtype=float), side="right")
