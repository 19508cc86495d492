#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hinrec/graph.hpp"
#include "hinrec/relation.hpp"
#include "hinrec/sampling.hpp"

namespace hinrec {

struct Hyperparams {
  std::size_t dim = 32;
  double lr = 0.05;
  double reg = 0.01;
  std::size_t epochs = 30;
  std::size_t neg_samples = 1;
  /// Per-relation weight alpha_r by label; unlisted relations get
  /// `default_weight`.
  std::map<std::string, double> relation_weights;
  double default_weight = 1.0;
  std::uint64_t seed = 0;

  double weight_of(std::string_view label) const;
  /// Throws ConfigError unless dim >= 1, lr > 0, reg >= 0, all weights >= 0
  /// and the target weight > 0.
  void validate(std::string_view target_label) const;
};

/// Row-major entities x dim matrix of latent factors.
class FactorMatrix {
 public:
  FactorMatrix() = default;
  FactorMatrix(std::size_t rows, std::size_t dim) : rows_(rows), dim_(dim), data_(rows * dim, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * dim_, dim_}; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * dim_, dim_}; }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const FactorMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// Latent factors per entity type, shared by every relation touching that
/// type. The target relation fixes which types are users and items.
struct FactorModel {
  std::map<std::string, FactorMatrix> factors;
  std::string target_label;
  std::string user_type;
  std::string item_type;
  Hyperparams hp;
  /// Mean BPR loss -ln sigma(x) per epoch.
  std::vector<double> loss_trace;

  const FactorMatrix& at(const std::string& type) const;
  FactorMatrix& at(const std::string& type);
  double score(NodeIndex user, NodeIndex item) const;
  double score(const std::string& src_type, NodeIndex a, const std::string& dst_type, NodeIndex b) const;
};

struct TrainingTriple {
  NodeIndex src = 0;
  NodeIndex pos = 0;
  NodeIndex neg = 0;
};

/// One factor matrix per entity type appearing in any relation, drawn from
/// N(0, (0.1/sqrt(dim))^2) with a per-type stream of the "init" sub-seed.
/// Throws ConfigError when two relations disagree on the size of a type.
FactorModel init_model(const RelationMatrix& target, std::span<const RelationMatrix> aux, const Hyperparams& hp);

/// One stochastic gradient ascent step on
///   alpha * ln sigma(<f_a, f_pos> - <f_a, f_neg>) - reg/2 (|f_a|^2 + |f_pos|^2 + |f_neg|^2).
/// All three updates use the pre-step factors. Returns the pre-step margin x.
double bpr_step(FactorMatrix& src, FactorMatrix& dst, const TrainingTriple& t, double alpha, double lr, double reg);

/// Checks the triple against `rel` (positive present, negative absent, indices
/// known) before stepping; throws LookupError / Error otherwise.
double bpr_step(FactorModel& model, const RelationMatrix& rel, const TrainingTriple& t, double alpha, double lr,
                double reg);

/// Multi-relational BPR training. Each epoch performs (total positives) draws:
/// a relation with probability proportional to alpha_r * |positives_r|, a
/// uniform positive of it, then `neg_samples` rejection-sampled negatives.
/// Counts are binarised: any stored entry is a positive.
FactorModel train_dmf(const RelationMatrix& target, std::span<const RelationMatrix> aux, const Hyperparams& hp);

/// Top-k items for `user` by <f_user, f_item>, skipping `exclusions`
/// (sorted ascending). Ties go to the smaller item index.
std::vector<std::pair<NodeIndex, double>> recommend_topk(const FactorModel& model, NodeIndex user, std::size_t k,
                                                         std::span<const NodeIndex> exclusions = {});

/// recommend_topk for every user, parallel over users. exclusions[u] must be
/// sorted; users beyond exclusions.size() have none.
std::vector<std::vector<NodeIndex>> recommend_all(const FactorModel& model, std::size_t k,
                                                  const std::vector<std::vector<NodeIndex>>& exclusions,
                                                  ParallelOptions par = {});

void write_model(const FactorModel& model, const HeteroGraph& g, std::ostream& out);
FactorModel read_model(std::istream& in, const HeteroGraph& g);
/// `epoch,mean_loss` CSV.
void write_loss_trace(const FactorModel& model, std::ostream& out);

}  // namespace hinrec
