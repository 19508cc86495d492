#include "hinrec/baselines.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <tuple>

#include "hinrec/error.hpp"
#include "hinrec/eval.hpp"

namespace hinrec {

BipartiteRatings::BipartiteRatings(std::size_t n_users, std::size_t n_items,
                                   std::span<const std::pair<NodeIndex, NodeIndex>> pairs)
    : user_items_(n_users), item_users_(n_items) {
  for (const auto& [u, i] : pairs) {
    if (u >= n_users || i >= n_items) throw Error("BipartiteRatings: pair outside universe");
    user_items_[u].push_back(i);
    item_users_[i].push_back(u);
  }
  for (auto* lists : {&user_items_, &item_users_}) {
    for (auto& l : *lists) {
      std::sort(l.begin(), l.end());
      l.erase(std::unique(l.begin(), l.end()), l.end());
    }
  }
}

BipartiteRatings BipartiteRatings::from_relation(const RelationMatrix& r) {
  std::vector<std::pair<NodeIndex, NodeIndex>> pairs;
  pairs.reserve(r.size());
  for (const auto& e : r.entries()) pairs.emplace_back(e.src, e.dst);
  return BipartiteRatings(r.src_universe(), r.dst_universe(), pairs);
}

std::vector<NodeIndex> BipartiteRatings::users() const {
  std::vector<NodeIndex> out;
  for (NodeIndex u = 0; u < user_items_.size(); ++u)
    if (!user_items_[u].empty()) out.push_back(u);
  return out;
}

std::vector<NodeIndex> BipartiteRatings::items() const {
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < item_users_.size(); ++i)
    if (!item_users_[i].empty()) out.push_back(i);
  return out;
}

const char* to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::p3: return "p3";
    case Algorithm::rp3: return "rp3";
    case Algorithm::hl: return "hl";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view s) {
  if (s == "p3") return Algorithm::p3;
  if (s == "rp3") return Algorithm::rp3;
  if (s == "hl") return Algorithm::hl;
  throw ConfigError("unknown baseline '" + std::string(s) + "' (expected p3|rp3|hl)");
}

namespace {

void check_params(Algorithm algo, const BaselineParams& p) {
  if (algo != Algorithm::hl && !(p.alpha > 0)) throw ConfigError("alpha must be > 0");
  if (algo == Algorithm::rp3 && !(p.beta >= 0)) throw ConfigError("beta must be >= 0");
  if (algo == Algorithm::hl && !(p.lambda >= 0 && p.lambda <= 1)) throw ConfigError("lambda must lie in [0,1]");
}

void p3_user(const BipartiteRatings& b, double alpha, NodeIndex u, std::vector<double>& out) {
  thread_local std::vector<double> mid;
  mid.assign(b.n_users(), 0.0);
  const auto items = b.items_of(u);
  if (items.empty()) return;
  const double pu = std::pow(1.0 / static_cast<double>(items.size()), alpha);
  for (NodeIndex j : items) {
    const auto users = b.users_of(j);
    const double pj = pu * std::pow(1.0 / static_cast<double>(users.size()), alpha);
    for (NodeIndex v : users) mid[v] += pj;
  }
  for (NodeIndex v = 0; v < mid.size(); ++v) {
    if (mid[v] == 0.0) continue;
    const auto vi = b.items_of(v);
    const double pv = mid[v] * std::pow(1.0 / static_cast<double>(vi.size()), alpha);
    for (NodeIndex i : vi) out[i] += pv;
  }
}

void hl_user(const BipartiteRatings& b, double lambda, NodeIndex u, std::vector<double>& out) {
  thread_local std::vector<double> mid;
  mid.assign(b.n_users(), 0.0);
  for (NodeIndex j : b.items_of(u)) {
    const auto users = b.users_of(j);
    const double wj = std::pow(static_cast<double>(users.size()), -lambda);
    for (NodeIndex v : users) mid[v] += wj / static_cast<double>(b.user_degree(v));
  }
  for (NodeIndex v = 0; v < mid.size(); ++v) {
    if (mid[v] == 0.0) continue;
    for (NodeIndex i : b.items_of(v)) out[i] += mid[v];
  }
  for (NodeIndex i = 0; i < out.size(); ++i)
    if (out[i] != 0.0) out[i] *= std::pow(static_cast<double>(b.item_degree(i)), lambda - 1.0);
}

}  // namespace

void score_user(const BipartiteRatings& b, Algorithm algo, const BaselineParams& p, NodeIndex u,
                std::vector<double>& out) {
  out.assign(b.n_items(), 0.0);
  switch (algo) {
    case Algorithm::p3:
      p3_user(b, p.alpha, u, out);
      break;
    case Algorithm::rp3:
      p3_user(b, p.alpha, u, out);
      if (p.beta != 0.0)
        for (NodeIndex i = 0; i < out.size(); ++i)
          if (out[i] != 0.0) out[i] /= std::pow(static_cast<double>(b.item_degree(i)), p.beta);
      break;
    case Algorithm::hl:
      hl_user(b, p.lambda, u, out);
      break;
  }
}

namespace {

ScoreTable score_all(const BipartiteRatings& b, Algorithm algo, const BaselineParams& p, ParallelOptions par) {
  check_params(algo, p);
  ScoreTable t{algo, p, b.n_users(), b.n_items(), std::vector<double>(b.n_users() * b.n_items(), 0.0)};
  const int threads = par.workers > 0 ? par.workers : omp_get_max_threads();
#pragma omp parallel num_threads(threads)
  {
    std::vector<double> row;
#pragma omp for schedule(dynamic, 16)
    for (std::size_t u = 0; u < b.n_users(); ++u) {
      score_user(b, algo, p, static_cast<NodeIndex>(u), row);
      std::copy(row.begin(), row.end(), t.scores.begin() + static_cast<std::ptrdiff_t>(u * b.n_items()));
    }
  }
  return t;
}

}  // namespace

ScoreTable p3_alpha_scores(const BipartiteRatings& b, double alpha, ParallelOptions par) {
  return score_all(b, Algorithm::p3, {alpha, 0.0, 0.5}, par);
}

ScoreTable rp3_beta_scores(const BipartiteRatings& b, double alpha, double beta, ParallelOptions par) {
  return score_all(b, Algorithm::rp3, {alpha, beta, 0.5}, par);
}

ScoreTable hl_scores(const BipartiteRatings& b, double lambda, ParallelOptions par) {
  return score_all(b, Algorithm::hl, {1.0, 0.0, lambda}, par);
}

std::vector<double> hl_matrix(const BipartiteRatings& b, double lambda) {
  check_params(Algorithm::hl, {1.0, 0.0, lambda});
  const std::size_t n = b.n_items();
  std::vector<double> w(n * n, 0.0);
  for (NodeIndex u = 0; u < b.n_users(); ++u) {
    const auto items = b.items_of(u);
    const double ku = static_cast<double>(items.size());
    for (NodeIndex i : items)
      for (NodeIndex j : items) w[i * n + j] += 1.0 / ku;
  }
  for (NodeIndex i = 0; i < n; ++i) {
    for (NodeIndex j = 0; j < n; ++j) {
      double& v = w[i * n + j];
      if (v == 0.0) continue;
      v /= std::pow(static_cast<double>(b.item_degree(i)), 1.0 - lambda) *
           std::pow(static_cast<double>(b.item_degree(j)), lambda);
    }
  }
  return w;
}

std::vector<std::vector<NodeIndex>> baseline_topk(const BipartiteRatings& b, Algorithm algo, const BaselineParams& p,
                                                  std::size_t k, ParallelOptions par) {
  check_params(algo, p);
  std::vector<std::vector<NodeIndex>> out(b.n_users());
  const int threads = par.workers > 0 ? par.workers : omp_get_max_threads();
#pragma omp parallel num_threads(threads)
  {
    std::vector<double> row;
    std::vector<NodeIndex> cand;
#pragma omp for schedule(dynamic, 16)
    for (std::size_t uu = 0; uu < b.n_users(); ++uu) {
      const auto u = static_cast<NodeIndex>(uu);
      const auto seen = b.items_of(u);
      if (seen.empty()) continue;
      score_user(b, algo, p, u, row);
      cand.clear();
      std::size_t x = 0;
      for (NodeIndex i = 0; i < row.size(); ++i) {
        while (x < seen.size() && seen[x] < i) ++x;
        if (x < seen.size() && seen[x] == i) continue;
        cand.push_back(i);
      }
      const std::size_t n = std::min(k, cand.size());
      std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(n), cand.end(),
                        [&](NodeIndex a, NodeIndex c) { return row[a] != row[c] ? row[a] > row[c] : a < c; });
      out[u].assign(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(n));
    }
  }
  return out;
}

std::vector<BaselineParams> default_grid(Algorithm algo) {
  std::vector<BaselineParams> grid;
  auto steps = [](int lo, int hi, double scale) {
    std::vector<double> v;
    for (int i = lo; i <= hi; ++i) v.push_back(i * scale);
    return v;
  };
  switch (algo) {
    case Algorithm::p3:
      for (double a : steps(1, 10, 0.2)) grid.push_back({a, 0.0, 0.5});
      break;
    case Algorithm::rp3:
      for (double a : steps(1, 10, 0.2))
        for (double be : steps(1, 10, 0.2)) grid.push_back({a, be, 0.5});
      break;
    case Algorithm::hl:
      for (double l : steps(0, 10, 0.1)) grid.push_back({1.0, 0.0, l});
      break;
  }
  return grid;
}

TuneResult grid_tune(const BipartiteRatings& train, Algorithm algo,
                     const std::vector<std::vector<NodeIndex>>& validation, std::span<const BaselineParams> grid,
                     ParallelOptions par) {
  if (grid.empty()) throw ConfigError("grid_tune: empty parameter grid");
  bool any = false;
  for (const auto& v : validation) any = any || !v.empty();
  if (!any) throw ConfigError("grid_tune: empty validation set");

  TuneResult result;
  result.grid.resize(grid.size());
  // Grid points are the parallel unit here; scoring inside stays serial.
  const int threads = par.workers > 0 ? par.workers : omp_get_max_threads();
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
  for (std::size_t g = 0; g < grid.size(); ++g) {
    auto recs = baseline_topk(train, algo, grid[g], 10, ParallelOptions{1});
    auto m = precision_recall_at_k(recs, validation, 10);
    result.grid[g] = {grid[g], m.recall[9]};
  }
  auto key = [](const BaselineParams& p) { return std::tie(p.alpha, p.beta, p.lambda); };
  std::size_t best = 0;
  for (std::size_t g = 1; g < result.grid.size(); ++g) {
    const auto& cur = result.grid[g];
    const auto& top = result.grid[best];
    if (cur.recall_at_10 > top.recall_at_10 ||
        (cur.recall_at_10 == top.recall_at_10 && key(cur.params) < key(top.params)))
      best = g;
  }
  result.best = result.grid[best].params;
  result.best_recall = result.grid[best].recall_at_10;
  return result;
}

}  // namespace hinrec
