#include "hinrec/expansion.hpp"

#include <omp.h>

#include <algorithm>
#include <numeric>

#include "hinrec/error.hpp"
#include "hinrec/text.hpp"

namespace hinrec {

std::vector<double> path_counts(const HeteroGraph& g, const ResolvedMetaPath& mp) {
  std::vector<double> next(g.node_count(mp.target_type()), 1.0);
  for (std::size_t s = mp.steps.size(); s-- > 0;) {
    const auto& step = mp.steps[s];
    const auto& adj = g.adjacency(step.edge_type, step.direction);
    std::vector<double> cur(g.node_count(step.from), 0.0);
    for (NodeIndex n = 0; n < cur.size(); ++n)
      for (NodeIndex t : adj.targets_of(n)) cur[n] += next[t];
    next = std::move(cur);
  }
  return next;
}

double projected_entries(const HeteroGraph& g, const ResolvedMetaPath& mp, std::span<const NodeIndex> starts) {
  const auto counts = path_counts(g, mp);
  const double universe = static_cast<double>(g.node_count(mp.target_type()));
  double total = 0;
  for (NodeIndex s : starts) total += std::min(counts.at(s), universe);
  return total;
}

std::vector<NodeIndex> all_starts(const HeteroGraph& g, const ResolvedMetaPath& mp) {
  std::vector<NodeIndex> s(g.node_count(mp.source_type()));
  std::iota(s.begin(), s.end(), NodeIndex{0});
  return s;
}

namespace {

// Dense accumulator with a touched list, reused across starts.
struct Frontier {
  std::vector<double> mass;
  std::vector<NodeIndex> touched;

  void add(NodeIndex n, double c) {
    if (mass[n] == 0.0) touched.push_back(n);
    mass[n] += c;
  }
};

}  // namespace

RelationMatrix expand_full(const HeteroGraph& g, const ResolvedMetaPath& mp, std::span<const NodeIndex> starts_in,
                           ExpandOptions opts) {
  std::vector<NodeIndex> starts(starts_in.begin(), starts_in.end());
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  const TypeId src_type = mp.source_type();
  for (NodeIndex s : starts)
    if (s >= g.node_count(src_type)) throw LookupError("start node index out of range");

  const double projected = projected_entries(g, mp, starts);
  if (projected > opts.entry_cap)
    throw SizeCapError("expansion of '" + mp.label + "' projects " + text::format_double(projected) +
                           " entries, above the cap of " + text::format_double(opts.entry_cap),
                       projected);

  std::vector<const Adjacency*> adjs;
  for (const auto& step : mp.steps) adjs.push_back(&g.adjacency(step.edge_type, step.direction));

  const std::size_t n = starts.size();
  std::vector<std::vector<RelationEntry>> rows(n);
  const int threads = opts.workers > 0 ? opts.workers : omp_get_max_threads();

#pragma omp parallel num_threads(threads)
  {
    // One accumulator per level; level 0 holds the start itself.
    std::vector<Frontier> levels(mp.steps.size() + 1);
    levels[0].mass.assign(g.node_count(src_type), 0.0);
    for (std::size_t s = 0; s < mp.steps.size(); ++s) levels[s + 1].mass.assign(g.node_count(mp.steps[s].to), 0.0);

#pragma omp for schedule(dynamic, 32)
    for (std::size_t i = 0; i < n; ++i) {
      levels[0].add(starts[i], 1.0);
      for (std::size_t s = 0; s < adjs.size(); ++s) {
        Frontier& cur = levels[s];
        Frontier& nxt = levels[s + 1];
        const Adjacency& adj = *adjs[s];
        for (NodeIndex node : cur.touched) {
          const double c = cur.mass[node];
          for (NodeIndex t : adj.targets_of(node)) nxt.add(t, c);
          cur.mass[node] = 0.0;
        }
        cur.touched.clear();
      }
      Frontier& last = levels.back();
      std::sort(last.touched.begin(), last.touched.end());
      auto& row = rows[i];
      row.reserve(last.touched.size());
      for (NodeIndex d : last.touched) {
        row.push_back({starts[i], d, last.mass[d]});
        last.mass[d] = 0.0;
      }
      last.touched.clear();
    }
  }

  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  std::vector<RelationEntry> entries;
  entries.reserve(total);
  for (auto& r : rows) entries.insert(entries.end(), r.begin(), r.end());
  Provenance prov;
  prov.label = mp.label;
  prov.method = GenerationMethod::full;
  const auto& schema = g.schema();
  return RelationMatrix::from_sorted(schema.node_type(src_type).name, schema.node_type(mp.target_type()).name,
                                     g.node_count(src_type), g.node_count(mp.target_type()), std::move(entries),
                                     std::move(prov));
}

}  // namespace hinrec
