#include <deque>

#include "hinrec/error.hpp"
#include "hinrec/graph.hpp"

namespace hinrec {

HeteroGraph k_core_filter(const HeteroGraph& g, std::string_view et_name, std::size_t k) {
  if (k == 0) throw ConfigError("k_core_filter: k must be >= 1");
  const auto& schema = g.schema();
  const TypeId et = schema.edge_type_id(et_name);
  const TypeId st = schema.edge_src(et);
  const TypeId dt = schema.edge_dst(et);

  std::vector<std::vector<bool>> removed(schema.node_type_count());
  for (TypeId t = 0; t < schema.node_type_count(); ++t) removed[t].assign(g.node_count(t), false);

  // Degrees under `et`; a self-typed edge kind counts both directions.
  const auto& fwd = g.adjacency(et, Direction::forward);
  const auto& rev = g.adjacency(et, Direction::reverse);
  std::vector<std::vector<std::size_t>> deg(schema.node_type_count());
  deg[st].assign(g.node_count(st), 0);
  deg[dt].assign(g.node_count(dt), 0);
  for (NodeIndex n = 0; n < g.node_count(st); ++n) deg[st][n] += fwd.degree(n);
  for (NodeIndex n = 0; n < g.node_count(dt); ++n) deg[dt][n] += rev.degree(n);

  std::vector<bool> edge_alive(g.edge_count(et), true);
  std::deque<NodeHandle> queue;
  std::vector<std::vector<bool>> queued(schema.node_type_count());
  queued[st].assign(g.node_count(st), false);
  queued[dt].assign(g.node_count(dt), false);
  auto enqueue_if_low = [&](NodeHandle h) {
    if (!queued[h.type][h.index] && deg[h.type][h.index] < k) {
      queued[h.type][h.index] = true;
      queue.push_back(h);
    }
  };
  for (NodeIndex n = 0; n < g.node_count(st); ++n) enqueue_if_low({st, n});
  for (NodeIndex n = 0; n < g.node_count(dt); ++n) enqueue_if_low({dt, n});

  while (!queue.empty()) {
    NodeHandle h = queue.front();
    queue.pop_front();
    removed[h.type][h.index] = true;
    auto drop = [&](const Adjacency& adj, TypeId other_type) {
      auto ids = adj.edges_of(h.index);
      auto targets = adj.targets_of(h.index);
      for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!edge_alive[ids[i]]) continue;
        edge_alive[ids[i]] = false;
        NodeHandle other{other_type, targets[i]};
        --deg[other.type][other.index];
        if (other == h) --deg[h.type][h.index];
        if (!removed[other.type][other.index]) enqueue_if_low(other);
      }
    };
    if (h.type == st) drop(fwd, dt);
    if (h.type == dt) drop(rev, st);
  }

  // Surviving edges of every type, then nodes that still touch one of them.
  std::vector<std::vector<bool>> keep_edge(schema.edge_type_count());
  std::vector<std::vector<bool>> has_edge(schema.node_type_count());
  for (TypeId t = 0; t < schema.node_type_count(); ++t) has_edge[t].assign(g.node_count(t), false);
  for (TypeId e = 0; e < schema.edge_type_count(); ++e) {
    keep_edge[e].assign(g.edge_count(e), false);
    for (EdgeId id = 0; id < g.edge_count(e); ++id) {
      Edge edge = g.edge(e, id);
      if (removed[edge.src.type][edge.src.index] || removed[edge.dst.type][edge.dst.index]) continue;
      keep_edge[e][id] = true;
      has_edge[edge.src.type][edge.src.index] = true;
      has_edge[edge.dst.type][edge.dst.index] = true;
    }
  }

  GraphBuilder builder(schema);
  std::vector<std::vector<NodeIndex>> remap(schema.node_type_count());
  for (TypeId t = 0; t < schema.node_type_count(); ++t) {
    remap[t].assign(g.node_count(t), 0);
    for (NodeIndex n = 0; n < g.node_count(t); ++n)
      if (has_edge[t][n]) remap[t][n] = builder.add_node(t, g.node_id(t, n));
  }
  for (TypeId e = 0; e < schema.edge_type_count(); ++e) {
    for (EdgeId id = 0; id < g.edge_count(e); ++id) {
      if (!keep_edge[e][id]) continue;
      Edge edge = g.edge(e, id);
      builder.add_edge(e, remap[edge.src.type][edge.src.index], remap[edge.dst.type][edge.dst.index], edge.weight);
    }
  }
  return std::move(builder).build();
}

}  // namespace hinrec
