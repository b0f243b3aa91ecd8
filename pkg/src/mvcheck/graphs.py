"""Explicit-graph routines used by the classical back-ends.

Graphs are given as a node iterable plus a successor function returning an
iterable of nodes.  Everything is iterative so deep graphs do not hit the
recursion limit.
"""
from collections import deque


def reachable(starts, succ):
    seen = set()
    queue = deque()
    for s in starts:
        if s not in seen:
            seen.add(s)
            queue.append(s)
    while queue:
        u = queue.popleft()
        for v in succ(u):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def shortest_path(starts, succ, goal, allowed=None):
    """BFS path from some start to the first node satisfying ``goal``.

    Only nodes in ``allowed`` (when given) are traversed.  Returns a list of
    nodes or ``None``.
    """
    parent = {}
    queue = deque()
    for s in starts:
        if s not in parent and (allowed is None or s in allowed):
            parent[s] = None
            queue.append(s)
    while queue:
        u = queue.popleft()
        if goal(u):
            path = [u]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        for v in succ(u):
            if v not in parent and (allowed is None or v in allowed):
                parent[v] = u
                queue.append(v)
    return None


def cycle_through(node, succ, allowed):
    """Shortest cycle ``[node, ..., node]`` staying inside ``allowed``."""
    parent = {}
    queue = deque()
    for v in succ(node):
        if v == node:
            return [node, node]
        if v in allowed and v not in parent:
            parent[v] = None
            queue.append(v)
    while queue:
        u = queue.popleft()
        for v in succ(u):
            if v == node:
                path = [u]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return [node] + path[::-1] + [node]
            if v in allowed and v not in parent:
                parent[v] = u
                queue.append(v)
    return None


def live_nodes(nodes, succ):
    """Nodes from which an infinite path exists (dead ends pruned to a fixpoint)."""
    nodes = set(nodes)
    out = {u: [v for v in succ(u) if v in nodes] for u in nodes}
    preds = {u: [] for u in nodes}
    count = {}
    for u, vs in out.items():
        count[u] = len(vs)
        for v in vs:
            preds[v].append(u)
    dead = deque(u for u in nodes if count[u] == 0)
    removed = set(dead)
    while dead:
        v = dead.popleft()
        for u in preds[v]:
            if u not in removed:
                count[u] -= 1
                if count[u] == 0:
                    removed.add(u)
                    dead.append(u)
    return nodes - removed


def tarjan_scc(nodes, succ):
    """Strongly connected components in reverse topological order (Tarjan)."""
    index = {}
    low = {}
    on_stack = set()
    stack = []
    comps = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            u, it = work[-1]
            advanced = False
            for v in it:
                if v not in index:
                    index[v] = low[v] = counter
                    counter += 1
                    stack.append(v)
                    on_stack.add(v)
                    work.append((v, iter(succ(v))))
                    advanced = True
                    break
                if v in on_stack:
                    low[u] = min(low[u], index[v])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[u])
            if low[u] == index[u]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == u:
                        break
                comps.append(comp)
    return comps


def nontrivial(comp, succ):
    """True when the component carries a cycle (size > 1 or a self-loop)."""
    if len(comp) > 1:
        return True
    u = comp[0]
    return any(v == u for v in succ(u))
