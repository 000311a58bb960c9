#!/usr/bin/env python3
"""Regenerate the golden files for the small test corpus.

Everything here is computed from first principles with exact rational
arithmetic (fractions.Fraction) or brute force (exhaustive set-partition
search, all-pairs path counting), so the outputs are an independent check
on the Rust pipeline rather than a copy of it.  Run from anywhere:

    python3 tools/golden_oracle.py

Files are written to crates/ipcmap/tests/golden/ plus the expected-values
manifest in crates/ipcmap/tests/fixtures/.
"""

import csv
import json
import re
from collections import defaultdict
from fractions import Fraction
from itertools import combinations
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "crates" / "ipcmap" / "tests" / "fixtures"
GOLDEN = REPO / "crates" / "ipcmap" / "tests" / "golden"

MIN_OCCURRENCE = 2
JACCARD_THRESHOLD = 0.05
FROM_YEAR, TO_YEAR = 2008, 2023

CODE_RE = re.compile(r"^([A-H])\s*(\d{2})\s*([A-Z])\s*(\d{1,4})\s*/\s*(\d{2,6})$")


def parse_subclass(raw):
    """Return the subclass form (e.g. 'A63F') of a full IPC code, or None."""
    m = CODE_RE.match(raw.strip())
    if m is None:
        return None
    section, klass, subclass, _major, _minor = m.groups()
    return f"{section}{klass}{subclass}"


def load_records(path):
    """Read the corpus CSV, keeping the first row for each patent id."""
    records = {}
    order = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            pid = row["patent_id"].strip()
            if not pid or pid in records:
                continue
            year = int(row["publication_date"][:4])
            if year < FROM_YEAR or year > TO_YEAR:
                continue
            codes = set()
            for raw in row["ipc_codes"].split(";"):
                raw = raw.strip()
                if not raw:
                    continue
                sub = parse_subclass(raw)
                if sub is not None:
                    codes.add(sub)
            records[pid] = {
                "office": row["office"].strip(),
                "year": year,
                "applicants": [a.strip() for a in row["applicants"].split(";") if a.strip()],
                "codes": codes,
            }
            order.append(pid)
    return [records[pid] for pid in order]


def fmt6(x):
    return f"{x:.6f}"


def jaccard_fraction(n_ij, n_i, n_j):
    return Fraction(n_ij, n_i + n_j - n_ij)


def jaccard_thousandths(frac):
    """Round a similarity to thousandths, halves away from zero."""
    scaled = frac * 1000
    return int(scaled + Fraction(1, 2)) if scaled >= 0 else -int(-scaled + Fraction(1, 2))


def fmt_thousandths(th):
    return f"{th // 1000}.{th % 1000:03d}"


class DisjointSet:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def renumber_groups(groups):
    """Label groups 0.. by descending size, then smallest member."""
    ordered = sorted(groups, key=lambda g: (-len(g), min(g)))
    labels = {}
    for idx, group in enumerate(ordered):
        for member in group:
            labels[member] = idx
    return labels, [len(g) for g in ordered]


def components_of(nodes, edges):
    ds = DisjointSet(nodes)
    for a, b in edges:
        ds.union(a, b)
    groups = defaultdict(set)
    for n in nodes:
        groups[ds.find(n)].add(n)
    return renumber_groups(groups.values())


def set_partitions(items):
    """Yield every partition of `items` as a list of lists."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in set_partitions(rest):
        for i in range(len(sub)):
            yield sub[:i] + [sub[i] + [first]] + sub[i + 1 :]
        yield [[first]] + sub


def best_modularity(nodes, weights):
    """Exhaustive max-modularity partition with exact rational weights.

    Among equal-quality partitions the finest one (most communities) wins,
    which pins down where zero-strength nodes land: alone.
    """
    strength = {n: Fraction(0) for n in nodes}
    for (a, b), w in weights.items():
        strength[a] += w
        strength[b] += w
    two_m = sum(strength.values())
    best_q, best_parts = None, None
    for parts in set_partitions(list(nodes)):
        q = Fraction(0)
        for part in parts:
            members = set(part)
            internal = sum(
                2 * w for (a, b), w in weights.items() if a in members and b in members
            )
            total = sum(strength[n] for n in members)
            q += Fraction(internal, two_m) - (Fraction(total, two_m)) ** 2
        if best_q is None or q > best_q or (q == best_q and len(parts) > len(best_parts)):
            best_q, best_parts = q, parts
    labels, _sizes = renumber_groups([set(p) for p in best_parts])
    return labels, best_q, len(best_parts)


def betweenness(nodes, edges):
    """Normalized betweenness by explicit shortest-path counting."""
    adj = defaultdict(set)
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    nodes = sorted(nodes)
    dist, sigma = {}, {}
    for s in nodes:
        d = {s: 0}
        sg = {s: Fraction(1)}
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                for v in sorted(adj[u]):
                    if v not in d:
                        d[v] = d[u] + 1
                        sg[v] = Fraction(0)
                        nxt.append(v)
                    if d[v] == d[u] + 1:
                        sg[v] += sg[u]
            frontier = nxt
        dist[s], sigma[s] = d, sg
    n = len(nodes)
    scores = {}
    for v in nodes:
        acc = Fraction(0)
        for s in nodes:
            for t in nodes:
                if v == s or v == t or s == t:
                    continue
                if t not in dist[s] or v not in dist[s]:
                    continue
                if dist[s][v] + dist[v][t] == dist[s][t]:
                    acc += sigma[s][v] * sigma[v][t] / sigma[s][t]
        scores[v] = float(acc / ((n - 1) * (n - 2))) if n > 2 else 0.0
    return scores


def kruskal(nodes, edge_distances):
    """Minimum spanning forest; ties broken by canonical edge order."""
    ds = DisjointSet(nodes)
    chosen = []
    ranked = sorted(
        enumerate(sorted(edge_distances.items())), key=lambda item: (item[1][1], item[0])
    )
    for _idx, (pair, dist) in ranked:
        if ds.union(*pair):
            chosen.append((pair, dist))
    chosen.sort()
    return chosen


def xml_escape(text):
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
        .replace("'", "&apos;")
    )


def graphml_doc(name, node_rows, edge_keys, edge_rows):
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns"'
        ' xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance"'
        ' xsi:schemaLocation="http://graphml.graphdrawing.org/xmlns'
        ' http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd">',
    ]
    node_keys = [("code", "string"), ("occurrence", "int")] + [
        (k, t) for k, t, _ in node_rows["extra"]
    ]
    for key, ty in node_keys:
        lines.append(f'  <key id="{key}" for="node" attr.name="{key}" attr.type="{ty}"/>')
    for key, ty in edge_keys:
        lines.append(f'  <key id="{key}" for="edge" attr.name="{key}" attr.type="{ty}"/>')
    lines.append(f'  <graph id="{name}" edgedefault="undirected">')
    for i, code in enumerate(node_rows["codes"]):
        lines.append(f'    <node id="n{i}">')
        lines.append(f'      <data key="code">{xml_escape(code)}</data>')
        lines.append(f'      <data key="occurrence">{node_rows["occurrence"][code]}</data>')
        for key, _ty, values in node_rows["extra"]:
            lines.append(f'      <data key="{key}">{values[code]}</data>')
        lines.append("    </node>")
    for i, (src, tgt, data) in enumerate(edge_rows):
        lines.append(f'    <edge id="e{i}" source="n{src}" target="n{tgt}">')
        for key, value in data:
            lines.append(f'      <data key="{key}">{value}</data>')
        lines.append("    </edge>")
    lines.append("  </graph>")
    lines.append("</graphml>")
    return "\n".join(lines) + "\n"


def dot_doc(name, codes, occurrence, edge_lines):
    lines = [f'graph "{name}" {{']
    for code in codes:
        lines.append(f'  "{code}" [occurrence={occurrence[code]}];')
    lines.extend(edge_lines)
    lines.append("}")
    return "\n".join(lines) + "\n"


def main():
    records = load_records(FIXTURES / "fixture_corpus.csv")

    occurrence = defaultdict(int)
    pair_counts = defaultdict(int)
    for rec in records:
        for code in rec["codes"]:
            occurrence[code] += 1
        for a, b in combinations(sorted(rec["codes"]), 2):
            pair_counts[(a, b)] += 1

    nodes = sorted(c for c, n in occurrence.items() if n >= MIN_OCCURRENCE)
    full_edges = {
        pair: count
        for pair, count in sorted(pair_counts.items())
        if pair[0] in nodes and pair[1] in nodes and count >= 1
    }
    jaccard = {
        pair: jaccard_fraction(count, occurrence[pair[0]], occurrence[pair[1]])
        for pair, count in full_edges.items()
    }
    kept_edges = {
        pair: count
        for pair, count in full_edges.items()
        if float(jaccard[pair]) >= JACCARD_THRESHOLD
    }

    comp_labels, _comp_sizes = components_of(nodes, kept_edges)
    community_labels, q, community_count = best_modularity(nodes, {p: jaccard[p] for p in kept_edges})
    between = betweenness(nodes, kept_edges)
    degree = {n: 0 for n in nodes}
    for a, b in kept_edges:
        degree[a] += 1
        degree[b] += 1

    # Distances mirror the pipeline's float semantics: 1 / (n_ij / union).
    distances = {
        pair: 1.0 / (count / (occurrence[pair[0]] + occurrence[pair[1]] - count))
        for pair, count in full_edges.items()
    }
    forest = kruskal(nodes, distances)
    forest_edges = [pair for pair, _ in forest]
    forest_labels, forest_sizes = components_of(nodes, forest_edges)
    forest_between = betweenness(nodes, forest_edges)
    forest_degree = {n: 0 for n in nodes}
    for a, b in forest_edges:
        forest_degree[a] += 1
        forest_degree[b] += 1

    GOLDEN.mkdir(parents=True, exist_ok=True)

    # --- CSV tables -------------------------------------------------------
    out = ["code,occurrence"]
    out += [f"{c},{occurrence[c]}" for c in nodes]
    (GOLDEN / "modularity_subclass.nodes.csv").write_text("\n".join(out) + "\n")

    out = ["source,target,n_ij,jaccard"]
    for (a, b), count in kept_edges.items():
        out.append(f"{a},{b},{count},{fmt_thousandths(jaccard_thousandths(jaccard[(a, b)]))}")
    (GOLDEN / "modularity_subclass.edges.csv").write_text("\n".join(out) + "\n")

    out = ["source,target,distance"]
    for (a, b), dist in forest:
        out.append(f"{a},{b},{fmt6(dist)}")
    (GOLDEN / "mst_subclass.edges.csv").write_text("\n".join(out) + "\n")

    out = ["code,patents,modularity_class,degree,betweenness,mst_degree,mst_betweenness"]
    for code in sorted(nodes, key=lambda c: (-occurrence[c], c)):
        out.append(
            f"{code},{occurrence[code]},{community_labels[code]},{degree[code]},"
            f"{fmt6(between[code])},{forest_degree[code]},{fmt6(forest_between[code])}"
        )
    (GOLDEN / "metrics_subclass.csv").write_text("\n".join(out) + "\n")

    # --- GraphML ----------------------------------------------------------
    index = {c: i for i, c in enumerate(nodes)}
    net_nodes = {
        "codes": nodes,
        "occurrence": occurrence,
        "extra": [
            ("degree", "int", degree),
            ("betweenness", "double", {c: fmt6(between[c]) for c in nodes}),
            ("modularity_class", "int", community_labels),
            ("component", "int", comp_labels),
        ],
    }
    net_edge_rows = [
        (
            index[a],
            index[b],
            [
                ("n_ij", str(count)),
                ("jaccard", fmt_thousandths(jaccard_thousandths(jaccard[(a, b)]))),
            ],
        )
        for (a, b), count in kept_edges.items()
    ]
    (GOLDEN / "modularity_subclass.graphml").write_text(
        graphml_doc(
            "modularity_subclass",
            net_nodes,
            [("n_ij", "int"), ("jaccard", "double")],
            net_edge_rows,
        )
    )

    mst_nodes = {
        "codes": nodes,
        "occurrence": occurrence,
        "extra": [
            ("degree", "int", forest_degree),
            ("betweenness", "double", {c: fmt6(forest_between[c]) for c in nodes}),
            ("component", "int", forest_labels),
        ],
    }
    mst_edge_rows = [
        (index[a], index[b], [("distance", fmt6(dist))]) for (a, b), dist in forest
    ]
    (GOLDEN / "mst_subclass.graphml").write_text(
        graphml_doc("mst_subclass", mst_nodes, [("distance", "double")], mst_edge_rows)
    )

    # --- DOT --------------------------------------------------------------
    net_lines = [
        f'  "{a}" -- "{b}" [n_ij={count}, '
        f'jaccard="{fmt_thousandths(jaccard_thousandths(jaccard[(a, b)]))}"];'
        for (a, b), count in kept_edges.items()
    ]
    (GOLDEN / "modularity_subclass.dot").write_text(
        dot_doc("modularity_subclass", nodes, occurrence, net_lines)
    )
    mst_lines = [f'  "{a}" -- "{b}" [distance="{fmt6(dist)}"];' for (a, b), dist in forest]
    (GOLDEN / "mst_subclass.dot").write_text(dot_doc("mst_subclass", nodes, occurrence, mst_lines))

    # --- Summaries --------------------------------------------------------
    comp_count = len(set(comp_labels.values()))
    by_count = sorted(kept_edges.items(), key=lambda item: -item[1])
    by_jaccard = sorted(kept_edges.items(), key=lambda item: -float(jaccard[item[0]]))
    lines = [
        "network: modularity_subclass",
        "level: subclass",
        f"nodes: {len(nodes)}",
        f"edges: {len(kept_edges)}",
        f"components: {comp_count}",
        f"communities: {community_count}",
        f"modularity: {fmt6(float(q))}",
        "top edges by co-occurrence:",
    ]
    for i, ((a, b), count) in enumerate(by_count, 1):
        j = fmt_thousandths(jaccard_thousandths(jaccard[(a, b)]))
        lines.append(f"  {i}. {a} -- {b}  n_ij={count}  jaccard={j}")
    lines.append("top edges by jaccard:")
    for i, ((a, b), count) in enumerate(by_jaccard, 1):
        j = fmt_thousandths(jaccard_thousandths(jaccard[(a, b)]))
        lines.append(f"  {i}. {a} -- {b}  jaccard={j}  n_ij={count}")
    (GOLDEN / "modularity_subclass.summary.txt").write_text("\n".join(lines) + "\n")

    total = 0.0
    for _pair, dist in forest:
        total += dist
    longest = sorted(forest, key=lambda item: -item[1])
    lines = [
        "network: mst_subclass",
        "level: subclass",
        f"nodes: {len(nodes)}",
        f"edges: {len(forest)}",
        f"components: {len(forest_sizes)}",
        f"total distance: {fmt6(total)}",
        "longest edges by distance:",
    ]
    for i, ((a, b), dist) in enumerate(longest, 1):
        lines.append(f"  {i}. {a} -- {b}  distance={fmt6(dist)}")
    (GOLDEN / "mst_subclass.summary.txt").write_text("\n".join(lines) + "\n")

    # --- Expected-values manifest for the replicate command ----------------
    annual = defaultdict(int)
    offices = defaultdict(int)
    for rec in records:
        annual[str(rec["year"])] += 1
        offices[rec["office"]] += 1
    groups = {}
    for label in ("Activision Publishing", "Blizzard Entertainment", "King.com"):
        needle = label.lower()
        groups[label] = sum(
            1
            for rec in records
            if any(needle in applicant.lower() for applicant in rec["applicants"])
        )
    expected = {
        "records": len(records),
        "annual": {y: annual[y] for y in ("2008", "2014", "2023")},
        "offices": dict(sorted(offices.items())),
        "applicant_groups": groups,
        "networks": {
            "subclass": {
                "nodes": len(nodes),
                "edges": len(kept_edges),
                "components": comp_count,
                "communities": community_count,
                "mst_component_sizes": forest_sizes,
                "mst_edges": len(forest),
            }
        },
        "occurrences": {"subclass": {c: occurrence[c] for c in nodes}},
        "edges": {
            "subclass": [
                {
                    "source": a,
                    "target": b,
                    "n_ij": count,
                    "jaccard": fmt_thousandths(jaccard_thousandths(jaccard[(a, b)])),
                }
                for (a, b), count in kept_edges.items()
            ]
        },
    }
    (FIXTURES / "fixture_expected.json").write_text(json.dumps(expected, indent=2) + "\n")

    print(f"wrote goldens to {GOLDEN}")


if __name__ == "__main__":
    main()
