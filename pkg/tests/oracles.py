"""Independent brute-force oracles used only by the test suite.

These deliberately share no code with the package solvers: the crates oracle
runs 0/1-cost Dijkstra over the complete single-step (player, crates) state
space, and the cave oracle materializes the full state graph and closes it
with a worklist. Slower, simpler, and easy to audit by hand.
"""
from __future__ import annotations

import heapq
from collections import deque

DIRS = ((-1, 0), (1, 0), (0, -1), (0, 1))


# --- crates oracle ---

def parse_crates(rows: list[str]):
    walls, slots, crates = set(), set(), set()
    player = None
    for r, row in enumerate(rows):
        for c, ch in enumerate(row):
            if ch == "X":
                walls.add((r, c))
            elif ch == "s":
                slots.add((r, c))
            elif ch == "c":
                crates.add((r, c))
            elif ch == "C":
                crates.add((r, c))
                slots.add((r, c))
            elif ch == "{":
                player = (r, c)
            elif ch == "+":
                player = (r, c)
                slots.add((r, c))
    return walls, slots, crates, player, len(rows), len(rows[0])


def crates_oracle(rows: list[str]) -> tuple[bool, int | None]:
    """(solvable, minimum pushes) by exhaustive 0/1-cost search.

    Every single player step is an edge; pushes cost 1, walks cost 0, so the
    distance to a solved state is the minimum number of pushes.
    """
    walls, slots, crates, player, h, w = parse_crates(rows)
    if player is None:
        return False, None

    def inside(p):
        return 0 <= p[0] < h and 0 <= p[1] < w and p not in walls

    start = (player, frozenset(crates))

    def done(cr):
        return all(p in slots for p in cr)

    if done(crates):
        return True, 0
    dist = {start: 0}
    heap = [(0, 0, start)]
    tick = 0
    while heap:
        d, _, (pl, cr) = heapq.heappop(heap)
        if d > dist.get((pl, cr), 1 << 60):
            continue
        if done(cr):
            return True, d
        for dr, dc in DIRS:
            np_ = (pl[0] + dr, pl[1] + dc)
            if not inside(np_):
                continue
            if np_ in cr:
                beyond = (np_[0] + dr, np_[1] + dc)
                if not inside(beyond) or beyond in cr:
                    continue
                state = (np_, cr - {np_} | {beyond})
                nd = d + 1
            else:
                state = (np_, cr)
                nd = d
            if nd < dist.get(state, 1 << 60):
                dist[state] = nd
                tick += 1
                heapq.heappush(heap, (nd, tick, state))
    return False, None


# --- cave oracle ---

def cave_oracle(rows: list[str], *, portal_pairs=(("P", "Q"),)) -> bool:
    """Reachability by materializing the whole (position, keys) state graph.

    Permissive: search starts from every '{'; any '}' wins; doors pass with
    at least one collected key (keys never consumed); a portal tile jumps to
    its partner only when both ends are unique.
    """
    h, w = len(rows), len(rows[0])
    cells = [(r, c) for r in range(h) for c in range(w)]
    sym = {p: rows[p[0]][p[1]] for p in cells}
    starts = [p for p in cells if sym[p] == "{"]
    goals = {p for p in cells if sym[p] == "}"}
    keys = [p for p in cells if sym[p] == "K"]
    if not starts or not goals:
        return False
    jump = {}
    for a, b in portal_pairs:
        a_cells = [p for p in cells if sym[p] == a]
        b_cells = [p for p in cells if sym[p] == b]
        if len(a_cells) == 1 and len(b_cells) == 1:
            jump[a_cells[0]] = b_cells[0]
            jump[b_cells[0]] = a_cells[0]
    key_index = {p: i for i, p in enumerate(keys)}

    def passable(p, keyset):
        s = sym[p]
        if s == "X":
            return False
        if s == "D":
            return keyset != 0
        return True

    # all states and all edges, built up front
    n_keys = len(keys)
    states = [(p, m) for p in cells if sym[p] != "X"
              for m in range(1 << n_keys)]
    edges = {st: [] for st in states}
    for (p, m) in states:
        neighbors = [(p[0] + dr, p[1] + dc) for dr, dc in DIRS]
        if p in jump:
            neighbors.append(jump[p])
        for q in neighbors:
            if not (0 <= q[0] < h and 0 <= q[1] < w):
                continue
            if not passable(q, m):
                continue
            m2 = m | (1 << key_index[q]) if q in key_index else m
            edges[(p, m)].append((q, m2))
    reached = set()
    work = deque()
    for s in starts:
        st = (s, 1 << key_index[s] if s in key_index else 0)
        if st not in reached:
            reached.add(st)
            work.append(st)
    while work:
        st = work.popleft()
        if st[0] in goals:
            return True
        for nxt in edges[st]:
            if nxt not in reached:
                reached.add(nxt)
                work.append(nxt)
    return False
