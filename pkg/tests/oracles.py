"""Independent reference implementations used to cross-check the package.

Everything here is written against plain dict/set structures and the raw
edge lists, deliberately sharing no code with the implementations under
test.
"""

from collections import defaultdict


def reachable_closure(edges, start, direction):
    """Transitive ``is_a`` closure by brute-force fixpoint iteration.

    ``edges`` is an iterable of (source, predicate, target) triples;
    ``direction`` is "up" (follow source->target) or "down" (reverse).
    """
    step = defaultdict(set)
    for s, p, t in edges:
        if p != "is_a":
            continue
        if direction == "up":
            step[s].add(t)
        else:
            step[t].add(s)
    closure = set()
    frontier = {start}
    while frontier:
        nxt = set()
        for node in frontier:
            for other in step[node]:
                if other not in closure and other != start:
                    closure.add(other)
                    nxt.add(other)
        frontier = nxt
    return closure


def naive_spread(node_ids, edges, seed, *, at, df, st, seed_activation=1.0,
                 blocked=None):
    """Round-by-round spreading simulation over adjacency dicts.

    Returns (activations, activated_set, crossover_set).  ``blocked`` nodes
    never receive contributions; edges reaching them are recorded as
    crossover tuples (blocked_node, source, predicate, target, frontier_node).
    """
    adjacency = defaultdict(list)
    for s, p, t, w in edges:
        adjacency[s].append((t, w, (s, p, t)))
        adjacency[t].append((s, w, (s, p, t)))
    blocked = blocked or set()

    act = {n: 0.0 for n in node_ids}
    act[seed] = seed_activation
    activated = {seed}
    frontier = [seed]
    crossovers = set()
    rounds = 0
    while frontier and rounds < st and not all(v >= at for v in act.values()):
        incoming = defaultdict(float)
        for i in frontier:
            for j, w, ekey in adjacency[i]:
                if j in blocked:
                    crossovers.add((j, *ekey, i))
                else:
                    incoming[j] += act[i] * w * df
        new_frontier = []
        for j, add in incoming.items():
            temp = act[j] + add
            if temp >= at:
                if act[j] < at:
                    new_frontier.append(j)
                act[j] = min(1.0, temp)
        frontier = sorted(new_frontier)
        activated.update(new_frontier)
        rounds += 1
    return act, activated, crossovers


def naive_two_sided_search(node_ids, edges, subj, obj, *, at, df, st,
                           seed_activation=1.0):
    """Full two-run reference for subgraph search: subject side first, then
    the object side blocked on the finished subject subgraph."""
    subj_act, subj_set, _ = naive_spread(
        node_ids, edges, subj, at=at, df=df, st=st,
        seed_activation=seed_activation)
    obj_act, obj_set, crossovers = naive_spread(
        node_ids, edges, obj, at=at, df=df, st=st,
        seed_activation=seed_activation, blocked=subj_set)
    return subj_act, subj_set, obj_act, obj_set, crossovers


def brute_force_features(tags):
    """Feature fold straight from the definitions: max over positive R1,
    explicit double sum over positive R2 cells, existence bits.

    ``tags`` are dicts: {kind, positive, sim, leaf, subclass} where the R2
    tags name their (leaf, subclass) cell; the denominator is the number of
    distinct leaves times the number of distinct subclasses supplied.
    """
    r1 = [t["sim"] for t in tags if t["kind"] == "R1" and t["positive"]]
    r2 = [t for t in tags if t["kind"] == "R2" and t["positive"]]
    m = len({t["leaf"] for t in tags if "leaf" in t})
    n = len({t["subclass"] for t in tags if "subclass" in t})
    total = 0.0
    for leaf in sorted({t["leaf"] for t in r2}, key=str):
        for sub in sorted({t["subclass"] for t in r2}, key=str):
            for t in r2:
                if t["leaf"] == leaf and t["subclass"] == sub:
                    total += t["sim"]
    p_r2 = total / (m * n) if r2 else 0.0
    return (
        max(r1) if r1 else 0.0,
        p_r2,
        int(any(t["kind"] == "R1" and not t["positive"] for t in tags)),
        int(any(t["kind"] == "R2" and not t["positive"] for t in tags)),
    )


def exhaustive_single_layer_answers(entities, edges, category, predicate,
                                    property_id):
    """Answers of a single-layer quad by full enumeration: every leaf
    subclass of the category holding a direct edge to the property."""
    descendants = reachable_closure(
        [(s, p, t) for s, p, t, _w in edges], category, "down") | {category}
    leaves = {
        e for e in descendants
        if not any(p == "is_a" and t == e and s in descendants
                   for s, p, t, _w in edges)
    }
    hits = set()
    for s, p, t, _w in edges:
        if p != predicate:
            continue
        if s in leaves and t == property_id:
            hits.add(s)
        if t in leaves and s == property_id:
            hits.add(t)
    return hits
