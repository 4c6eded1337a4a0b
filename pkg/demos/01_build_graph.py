"""Build an item-item co-occurrence graph from a click log and query it.

Every pair of items a user clicked within a 3-event window becomes an
edge; weights count how often that happened across all users.
"""

from tgin import build_graph, save_graph, load_graph
from tgin.synth import make_behavior_log, make_clustered_catalog

catalog, clusters = make_clustered_catalog(n_items=60, n_clusters=6, seed=0)
log = make_behavior_log(clusters, n_users=100, events_per_user=30, seed=1)
print(f"log: {len(log.records)} events, "
      f"{len(set(r.user_id for r in log.records))} users")

g = build_graph(log, window=3)
print(f"graph: {len(g.nodes)} nodes, {len(g.edges)} edges")

a, b = next(iter(g.edges))
print(f"\nedge ({a}, {b}) weight {g.edge_weight(a, b)}")
print(f"has_edge({a}, {b}) = {g.has_edge(a, b)}  (hash map behind a bloom prefilter)")
print(f"has_edge({a}, {a}) = {g.has_edge(a, a)}  (no self loops)")

hops = g.neighbors_within(a, 2)
near = sorted(v for v, d in hops.items() if d == 1)
far = sorted(v for v, d in hops.items() if d == 2)
print(f"\n{a} reaches {len(near)} items in 1 hop, {len(far)} more in 2 hops")

save_graph(g, "/tmp/demo_graph.tsv")
reloaded = load_graph("/tmp/demo_graph.tsv")
print(f"\nsaved and reloaded: {len(reloaded.edges)} edges, "
      f"round-trip equal = {reloaded.edges == g.edges}")
print("the file is sorted text: identical graphs give identical bytes")
