#include "hinrec/reference.hpp"

#include <algorithm>
#include <map>

#include "hinrec/error.hpp"

namespace hinrec::reference {

namespace {

void enumerate(const HeteroGraph& g, const ResolvedMetaPath& mp, std::size_t step, NodeIndex node,
               std::map<NodeIndex, double>& row) {
  if (step == mp.steps.size()) {
    row[node] += 1.0;
    return;
  }
  const auto& s = mp.steps[step];
  for (NodeIndex t : g.adjacency(s.edge_type, s.direction).targets_of(node)) enumerate(g, mp, step + 1, t, row);
}

std::vector<NodeIndex> sorted_unique(std::span<const NodeIndex> in) {
  std::vector<NodeIndex> v(in.begin(), in.end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

RelationMatrix expand_full(const HeteroGraph& g, const ResolvedMetaPath& mp, std::span<const NodeIndex> starts) {
  std::vector<RelationEntry> entries;
  for (NodeIndex s : sorted_unique(starts)) {
    if (s >= g.node_count(mp.source_type())) throw LookupError("start node index out of range");
    std::map<NodeIndex, double> row;
    enumerate(g, mp, 0, s, row);
    for (const auto& [d, c] : row) entries.push_back({s, d, c});
  }
  Provenance prov;
  prov.label = mp.label;
  prov.method = GenerationMethod::full;
  const auto& schema = g.schema();
  return RelationMatrix(schema.node_type(mp.source_type()).name, schema.node_type(mp.target_type()).name,
                        g.node_count(mp.source_type()), g.node_count(mp.target_type()), std::move(entries),
                        std::move(prov));
}

RelationMatrix sample_relation(const HeteroGraph& g, const ResolvedMetaPath& mp, std::span<const NodeIndex> starts,
                               const SampleBudget& budget, std::uint64_t seed) {
  if (budget.walks_per_start == 0) throw ConfigError("walks_per_start must be >= 1");
  Provenance prov;
  prov.label = mp.label;
  prov.method = GenerationMethod::sampled;
  prov.walks_per_start = budget.walks_per_start;
  prov.max_retries = budget.max_retries;
  prov.seed = seed;
  std::vector<RelationEntry> entries;
  for (NodeIndex s : sorted_unique(starts)) {
    Rng rng(start_stream_seed(seed, s));
    std::map<NodeIndex, double> row;
    for (std::uint32_t w = 0; w < budget.walks_per_start; ++w) {
      bool done = false;
      for (std::uint32_t attempt = 0; attempt <= budget.max_retries; ++attempt) {
        auto walk = sample_walk(g, mp, NodeHandle{mp.source_type(), s}, rng);
        if (!walk) {
          ++prov.dead_ends;
          continue;
        }
        row[walk->nodes.back().index] += 1.0;
        ++prov.completed_walks;
        done = true;
        break;
      }
      if (!done) ++prov.failed_walks;
    }
    for (const auto& [d, c] : row) entries.push_back({s, d, c});
  }
  const auto& schema = g.schema();
  return RelationMatrix(schema.node_type(mp.source_type()).name, schema.node_type(mp.target_type()).name,
                        g.node_count(mp.source_type()), g.node_count(mp.target_type()), std::move(entries),
                        std::move(prov));
}

}  // namespace hinrec::reference
