"""Collect every connected cubic graph on N vertices by uniform sampling.

Samples the configuration model until the number of isomorphism classes
reaches the known count, then writes the 3-edge-colorable ones as graph6.

    python3 scripts/cubic_graphs.py 12 85 > data/cubic12.g6
"""

import random
import sys

import networkx as nx
import pynauty


def sample(n, rng):
    while True:
        points = [v for v in range(n) for _ in range(3)]
        rng.shuffle(points)
        edges = set()
        ok = True
        for a, b in zip(points[::2], points[1::2]):
            e = (min(a, b), max(a, b))
            if a == b or e in edges:
                ok = False
                break
            edges.add(e)
        if ok:
            return sorted(edges)


def canonical(n, edges):
    adj = {v: [] for v in range(n)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    return pynauty.certificate(pynauty.Graph(n, adjacency_dict=adj))


def colorable(n, edges):
    colors = [None] * len(edges)
    used = [set() for _ in range(n)]

    def go(i):
        if i == len(edges):
            return True
        a, b = edges[i]
        for c in range(3):
            if c not in used[a] and c not in used[b]:
                used[a].add(c)
                used[b].add(c)
                if go(i + 1):
                    return True
                used[a].discard(c)
                used[b].discard(c)
        return False

    return go(0)


def main():
    n, expected = int(sys.argv[1]), int(sys.argv[2])
    rng = random.Random(1)
    seen = {}
    samples = 0
    while len(seen) < expected:
        edges = sample(n, rng)
        samples += 1
        g = nx.Graph(edges)
        if not nx.is_connected(g):
            continue
        seen.setdefault(canonical(n, edges), edges)
    kept = 0
    for cert in sorted(seen):
        edges = seen[cert]
        if colorable(n, edges):
            kept += 1
            print(nx.to_graph6_bytes(nx.Graph(edges), header=False).decode().strip())
    print(f"{samples} samples, {len(seen)} classes, {kept} colorable", file=sys.stderr)


if __name__ == "__main__":
    main()
