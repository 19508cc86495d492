#include "hinrec/sampling.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "hinrec/error.hpp"

namespace hinrec {

void SoftmaxSampler::assign(std::span<const double> weights) {
  const std::size_t n = weights.size();
  prob_.resize(n);
  keep_.resize(n);
  alias_.resize(n);
  if (n == 0) return;
  const double top = *std::max_element(weights.begin(), weights.end());
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) total += prob_[i] = std::exp(weights[i] - top);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    prob_[i] /= total;
    keep_[i] = prob_[i] * static_cast<double>(n);
    alias_[i] = static_cast<std::uint32_t>(i);
    (keep_[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back(), l = large.back();
    small.pop_back();
    alias_[s] = l;
    keep_[l] -= 1.0 - keep_[s];
    if (keep_[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // leftovers are 1 up to rounding
  for (auto i : small) keep_[i] = 1.0;
  for (auto i : large) keep_[i] = 1.0;
}

std::size_t SoftmaxSampler::draw(Rng& rng) const {
  const std::size_t n = prob_.size();
  const double u = uniform_real(rng, static_cast<double>(n));
  const std::size_t col = std::min(static_cast<std::size_t>(u), n - 1);
  return u - static_cast<double>(col) < keep_[col] ? col : alias_[col];
}

double SoftmaxSampler::probability(std::size_t i) const { return prob_[i]; }

std::vector<double> softmax(std::span<const double> weights) {
  SoftmaxSampler s(weights);
  std::vector<double> p(weights.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = s.probability(i);
  return p;
}

const Edge& usample(std::span<const Edge> edges, Rng& rng) {
  if (edges.empty()) throw Error("usample: empty edge set");
  return edges[uniform_index(rng, edges.size())];
}

const Edge& wsample(std::span<const Edge> edges, Rng& rng) {
  if (edges.empty()) throw Error("wsample: empty edge set");
  std::vector<double> w;
  w.reserve(edges.size());
  for (const auto& e : edges) {
    if (!e.weight) throw Error("wsample: edge without weight");
    w.push_back(*e.weight);
  }
  return edges[SoftmaxSampler(w).draw(rng)];
}

namespace {

void check_start(const HeteroGraph& g, const ResolvedMetaPath& mp, NodeHandle start) {
  if (mp.steps.empty()) throw MetaPathError(MetaPathError::Kind::empty, 0, "meta-path has no steps");
  if (start.type != mp.source_type())
    throw LookupError("start node type '" + g.schema().node_type(start.type).name + "' does not match meta-path '" +
                      mp.label + "' source type '" + g.schema().node_type(mp.source_type()).name + "'");
  if (start.index >= g.node_count(start.type)) throw LookupError("start node index out of range");
}

}  // namespace

std::optional<Walk> sample_walk(const HeteroGraph& g, const ResolvedMetaPath& mp, NodeHandle start, Rng& rng) {
  check_start(g, mp, start);
  Walk walk;
  walk.label = mp.label;
  walk.nodes.reserve(mp.steps.size() + 1);
  walk.nodes.push_back(start);
  NodeIndex node = start.index;
  for (const auto& step : mp.steps) {
    const auto& adj = g.adjacency(step.edge_type, step.direction);
    const std::size_t deg = adj.degree(node);
    if (deg == 0) return std::nullopt;
    const std::size_t pick =
        step.weighted ? SoftmaxSampler(adj.weights_of(node)).draw(rng) : uniform_index(rng, deg);
    node = adj.targets_of(node)[pick];
    walk.nodes.push_back({step.to, node});
  }
  return walk;
}

std::optional<Walk> sample_walk(const HeteroGraph& g, const ResolvedMetaPath& mp, const NodeRef& start, Rng& rng) {
  return sample_walk(g, mp, g.handle(start), rng);
}

namespace {

// Softmax tables are rebuilt only when the walk visits a different node at
// that step; all walks from one start share the first-step table.
struct StepMemo {
  NodeIndex node = std::numeric_limits<NodeIndex>::max();
  SoftmaxSampler sampler;

  const SoftmaxSampler& get(const Adjacency& adj, NodeIndex n) {
    if (n != node) {
      sampler.assign(adj.weights_of(n));
      node = n;
    }
    return sampler;
  }
};

struct RowStats {
  std::uint64_t completed = 0;
  std::uint64_t failed = 0;
  std::uint64_t dead_ends = 0;
};

}  // namespace

RelationMatrix sample_relation(const HeteroGraph& g, const ResolvedMetaPath& mp, std::span<const NodeIndex> starts_in,
                               const SampleBudget& budget, std::uint64_t seed, ParallelOptions par) {
  if (budget.walks_per_start == 0) throw ConfigError("walks_per_start must be >= 1");
  std::vector<NodeIndex> starts(starts_in.begin(), starts_in.end());
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  for (NodeIndex s : starts) check_start(g, mp, {mp.source_type(), s});

  const TypeId dst_type = mp.target_type();
  const std::size_t dst_universe = g.node_count(dst_type);
  std::vector<const Adjacency*> adjs;
  for (const auto& step : mp.steps) adjs.push_back(&g.adjacency(step.edge_type, step.direction));

  const std::size_t n = starts.size();
  const int threads = par.workers > 0 ? par.workers : omp_get_max_threads();
  // Static chunks keep each thread's rows contiguous in start order, so the
  // per-thread buffers concatenate into a sorted entry list.
  std::vector<std::vector<RelationEntry>> parts(static_cast<std::size_t>(threads));
  std::vector<RowStats> part_stats(static_cast<std::size_t>(threads));

#pragma omp parallel num_threads(threads)
  {
    auto& out = parts[static_cast<std::size_t>(omp_get_thread_num())];
    RowStats& st = part_stats[static_cast<std::size_t>(omp_get_thread_num())];
    std::vector<double> acc(dst_universe, 0.0);
    std::vector<std::uint64_t> seen((dst_universe + 63) / 64, 0);
    std::vector<NodeIndex> touched;
    std::vector<StepMemo> memo(mp.steps.size());

#pragma omp for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
      const NodeIndex start = starts[i];
      Rng rng(start_stream_seed(seed, start));
      for (std::uint32_t w = 0; w < budget.walks_per_start; ++w) {
        bool done = false;
        for (std::uint32_t attempt = 0; attempt <= budget.max_retries && !done; ++attempt) {
          NodeIndex node = start;
          bool dead = false;
          for (std::size_t s = 0; s < mp.steps.size(); ++s) {
            const Adjacency& adj = *adjs[s];
            const std::size_t deg = adj.degree(node);
            if (deg == 0) {
              dead = true;
              break;
            }
            const std::size_t pick = mp.steps[s].weighted ? memo[s].get(adj, node).draw(rng) : uniform_index(rng, deg);
            node = adj.targets[adj.offsets[node] + pick];
          }
          if (dead) {
            ++st.dead_ends;
            continue;
          }
          if (acc[node] == 0.0) {
            touched.push_back(node);
            seen[node >> 6] |= std::uint64_t{1} << (node & 63);
          }
          acc[node] += 1.0;
          ++st.completed;
          done = true;
        }
        if (!done) ++st.failed;
      }
      auto emit = [&](NodeIndex d) {
        out.push_back({start, d, acc[d]});
        acc[d] = 0.0;
      };
      if (seen.size() <= 4 * touched.size()) {
        // dense enough that scanning the bitmap beats sorting
        for (std::size_t word = 0; word < seen.size(); ++word) {
          for (std::uint64_t bits = seen[word]; bits; bits &= bits - 1)
            emit(static_cast<NodeIndex>(word * 64 + static_cast<std::size_t>(std::countr_zero(bits))));
          seen[word] = 0;
        }
      } else {
        std::sort(touched.begin(), touched.end());
        for (NodeIndex d : touched) {
          emit(d);
          seen[d >> 6] = 0;
        }
      }
      touched.clear();
    }
  }

  Provenance prov;
  prov.label = mp.label;
  prov.method = GenerationMethod::sampled;
  prov.walks_per_start = budget.walks_per_start;
  prov.max_retries = budget.max_retries;
  prov.seed = seed;
  for (const auto& st : part_stats) {
    prov.completed_walks += st.completed;
    prov.failed_walks += st.failed;
    prov.dead_ends += st.dead_ends;
  }
  std::vector<RelationEntry> entries;
  if (parts.size() == 1) {
    entries = std::move(parts.front());
  } else {
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    entries.reserve(total);
    for (auto& p : parts) entries.insert(entries.end(), p.begin(), p.end());
  }
  const auto& schema = g.schema();
  return RelationMatrix::from_sorted(schema.node_type(mp.source_type()).name, schema.node_type(dst_type).name,
                                     g.node_count(mp.source_type()), dst_universe, std::move(entries), std::move(prov));
}

}  // namespace hinrec
