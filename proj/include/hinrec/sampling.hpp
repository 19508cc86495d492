#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hinrec/graph.hpp"
#include "hinrec/metapath.hpp"
#include "hinrec/relation.hpp"
#include "hinrec/rng.hpp"

namespace hinrec {

/// Alias table (Vose) for drawing index i with probability
/// exp(w_i) / sum_j exp(w_j) in constant time. Weights are shifted by their
/// maximum before exponentiation so large ratings cannot overflow.
class SoftmaxSampler {
 public:
  SoftmaxSampler() = default;
  explicit SoftmaxSampler(std::span<const double> weights) { assign(weights); }

  void assign(std::span<const double> weights);
  std::size_t draw(Rng& rng) const;
  double probability(std::size_t i) const;
  std::size_t size() const noexcept { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<double> keep_;
  std::vector<std::uint32_t> alias_;
};

/// softmax(w) as an explicit probability vector.
std::vector<double> softmax(std::span<const double> weights);

/// Uniform choice; throws Error on an empty sequence.
const Edge& usample(std::span<const Edge> edges, Rng& rng);
/// Choice with probability proportional to e^weight; throws Error on an
/// empty sequence or an unweighted edge.
const Edge& wsample(std::span<const Edge> edges, Rng& rng);

/// One random walk guided by `mp`. Steps over weighted edge types use the
/// softmax choice, all others the uniform one. Returns nullopt when the walk
/// reaches a node without an edge of the next required type. Throws
/// LookupError when `start` is not a node of the path's source type.
std::optional<Walk> sample_walk(const HeteroGraph& g, const ResolvedMetaPath& mp, NodeHandle start, Rng& rng);
std::optional<Walk> sample_walk(const HeteroGraph& g, const ResolvedMetaPath& mp, const NodeRef& start, Rng& rng);

struct SampleBudget {
  std::uint32_t walks_per_start = 100;
  std::uint32_t max_retries = 5;
};

struct ParallelOptions {
  /// OpenMP thread count; 0 keeps the runtime default.
  int workers = 0;
};

/// Walk stream of one start node. Depends only on the experiment seed and
/// the node index, so results do not depend on scheduling.
inline std::uint64_t start_stream_seed(std::uint64_t seed, NodeIndex start) {
  return mix_seed(seed, start);
}

/// Monte-Carlo estimate of the meta-path relation: `walks_per_start` walks
/// from every start, each dead end retried up to `max_retries` times. Entry
/// (s, d) counts completed walks from s ending at d. Starts are processed in
/// parallel; the result equals reference::sample_relation.
RelationMatrix sample_relation(const HeteroGraph& g, const ResolvedMetaPath& mp, std::span<const NodeIndex> starts,
                               const SampleBudget& budget, std::uint64_t seed, ParallelOptions par = {});

}  // namespace hinrec
