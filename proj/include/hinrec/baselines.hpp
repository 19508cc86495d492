#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hinrec/graph.hpp"
#include "hinrec/relation.hpp"
#include "hinrec/sampling.hpp"

namespace hinrec {

/// Binary user-item graph built from training positives. Indices are the
/// global user/item indices; nodes of degree zero carry no adjacency and are
/// not listed by users()/items().
class BipartiteRatings {
 public:
  BipartiteRatings() = default;
  BipartiteRatings(std::size_t n_users, std::size_t n_items, std::span<const std::pair<NodeIndex, NodeIndex>> pairs);
  static BipartiteRatings from_relation(const RelationMatrix& r);

  std::size_t n_users() const noexcept { return user_items_.size(); }
  std::size_t n_items() const noexcept { return item_users_.size(); }
  /// Sorted item list of u; doubles as the exclusion list for u.
  std::span<const NodeIndex> items_of(NodeIndex u) const { return user_items_.at(u); }
  std::span<const NodeIndex> users_of(NodeIndex i) const { return item_users_.at(i); }
  std::size_t user_degree(NodeIndex u) const { return user_items_.at(u).size(); }
  std::size_t item_degree(NodeIndex i) const { return item_users_.at(i).size(); }
  std::vector<NodeIndex> users() const;
  std::vector<NodeIndex> items() const;
  const std::vector<std::vector<NodeIndex>>& user_lists() const noexcept { return user_items_; }

 private:
  std::vector<std::vector<NodeIndex>> user_items_;
  std::vector<std::vector<NodeIndex>> item_users_;
};

enum class Algorithm { p3, rp3, hl };
const char* to_string(Algorithm a) noexcept;
Algorithm parse_algorithm(std::string_view s);

struct BaselineParams {
  double alpha = 1.0;
  double beta = 0.0;
  double lambda = 0.5;
  bool operator==(const BaselineParams&) const = default;
};

/// Dense users x items score matrix.
struct ScoreTable {
  Algorithm algorithm = Algorithm::p3;
  BaselineParams params;
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::vector<double> scores;

  double at(NodeIndex u, NodeIndex i) const { return scores[static_cast<std::size_t>(u) * n_items + i]; }
};

/// Scores of every item for user u under the given algorithm. `out` is
/// resized to n_items.
void score_user(const BipartiteRatings& b, Algorithm algo, const BaselineParams& p, NodeIndex u, std::vector<double>& out);

/// score(u,i) = sum_j sum_v p'_uj p'_jv p'_vi with p'_xy = (a_xy / k_x)^alpha.
ScoreTable p3_alpha_scores(const BipartiteRatings& b, double alpha, ParallelOptions par = {});
/// P3alpha score divided by k_i^beta.
ScoreTable rp3_beta_scores(const BipartiteRatings& b, double alpha, double beta, ParallelOptions par = {});
/// Score vector W a_u with the HeatS/ProbS hybrid
///   W_ij = 1 / (k_i^(1-lambda) k_j^lambda) * sum_u a_ui a_uj / k_u.
/// lambda = 1 is ProbS, lambda = 0 HeatS.
ScoreTable hl_scores(const BipartiteRatings& b, double lambda, ParallelOptions par = {});
/// The dense items x items W used by hl_scores.
std::vector<double> hl_matrix(const BipartiteRatings& b, double lambda);

/// Top-k unseen items per user, parallel over users; ties go to the smaller
/// item index. Users without training items get an empty list.
std::vector<std::vector<NodeIndex>> baseline_topk(const BipartiteRatings& b, Algorithm algo, const BaselineParams& p,
                                                  std::size_t k, ParallelOptions par = {});

struct GridPoint {
  BaselineParams params;
  double recall_at_10 = 0;
};

struct TuneResult {
  BaselineParams best;
  double best_recall = 0;
  std::vector<GridPoint> grid;
};

/// alpha, beta in {0.2, ..., 2.0}, lambda in {0, 0.1, ..., 1}.
std::vector<BaselineParams> default_grid(Algorithm algo);

/// Recall@10 on `validation` (per-user held-out items) for every grid point;
/// the best point wins and ties go to the lexicographically smallest
/// (alpha, beta, lambda). Throws ConfigError on an empty grid or validation set.
TuneResult grid_tune(const BipartiteRatings& train, Algorithm algo,
                     const std::vector<std::vector<NodeIndex>>& validation, std::span<const BaselineParams> grid,
                     ParallelOptions par = {});

}  // namespace hinrec
