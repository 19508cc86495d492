#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hinrec/graph.hpp"

namespace hinrec {

struct SplitSpec {
  enum class Mode { holdout, kfold };
  Mode mode = Mode::kfold;
  double train_fraction = 0.8;
  std::size_t folds = 5;
  std::uint64_t seed = 0;

  /// "kfold:5" or "holdout:0.8".
  static SplitSpec parse(std::string_view s, std::uint64_t seed);
  std::string to_string() const;
  /// Throws ConfigError unless 0 < train_fraction < 1 and folds >= 2.
  void validate() const;
};

/// Sorted indices into the rating entry list.
struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Entry-level random partition. k-fold folds are disjoint, exhaustive and
/// differ in size by at most one; holdout trains on round(n * fraction).
std::vector<Fold> split(std::size_t n_entries, const SplitSpec& spec);

/// Stable digest of a fold's test indices, for cross-report consistency checks.
std::string fold_hash(const Fold& f);

struct RatedItem {
  NodeIndex item = 0;
  double rating = 0;
};

/// Means over evaluated users for k = 1..max_k (index k-1).
struct FoldMetrics {
  std::vector<double> precision;
  std::vector<double> recall;
  std::size_t users_evaluated = 0;
  std::size_t users_excluded = 0;
};

/// precision@k = hits@k / k, recall@k = hits@k / |test_u|, averaged over
/// users with a non-empty test set. recs[u] is u's ranked list.
FoldMetrics precision_recall_at_k(const std::vector<std::vector<NodeIndex>>& recs,
                                  const std::vector<std::vector<NodeIndex>>& test, std::size_t max_k = 10);

/// As precision_recall_at_k, but only test items rated strictly above
/// `threshold` count as hits and as recall denominator; users without such
/// items are excluded.
FoldMetrics us_precision_recall(const std::vector<std::vector<NodeIndex>>& recs,
                                const std::vector<std::vector<RatedItem>>& test, double threshold,
                                std::size_t max_k = 10);

struct EvalReport {
  std::string algo;
  std::vector<FoldMetrics> folds;
  /// Unweighted mean of the per-fold means.
  FoldMetrics mean;
};

EvalReport summarize(std::string algo, std::vector<FoldMetrics> folds);

/// `algo,fold,k,precision,recall` rows per fold plus `fold=mean` summary rows.
void write_eval_csv(const std::vector<EvalReport>& reports, std::ostream& out);

}  // namespace hinrec
