#include "hinrec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "hinrec/error.hpp"
#include "hinrec/rng.hpp"
#include "hinrec/text.hpp"

namespace hinrec {

SplitSpec SplitSpec::parse(std::string_view s, std::uint64_t seed) {
  auto parts = text::split(text::trim(s), ':');
  SplitSpec spec;
  spec.seed = seed;
  if (parts.size() != 2) throw ConfigError("split must look like kfold:N or holdout:F, got '" + std::string(s) + "'");
  if (parts[0] == "kfold") {
    auto n = text::parse_uint(parts[1]);
    if (!n) throw ConfigError("kfold needs an integer fold count");
    spec.mode = Mode::kfold;
    spec.folds = *n;
  } else if (parts[0] == "holdout") {
    auto f = text::parse_double(parts[1]);
    if (!f) throw ConfigError("holdout needs a train fraction");
    spec.mode = Mode::holdout;
    spec.train_fraction = *f;
  } else {
    throw ConfigError("unknown split mode '" + std::string(parts[0]) + "'");
  }
  spec.validate();
  return spec;
}

std::string SplitSpec::to_string() const {
  return mode == Mode::kfold ? "kfold:" + std::to_string(folds) : "holdout:" + text::format_double(train_fraction);
}

void SplitSpec::validate() const {
  if (mode == Mode::kfold && folds < 2) throw ConfigError("kfold needs at least 2 folds");
  if (mode == Mode::holdout && !(train_fraction > 0 && train_fraction < 1))
    throw ConfigError("holdout train fraction must lie in (0,1)");
}

std::vector<Fold> split(std::size_t n, const SplitSpec& spec) {
  spec.validate();
  if (n == 0) throw ConfigError("split: no entries");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng = make_rng(spec.seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<Fold> folds;
  auto assign = [&](std::size_t test_lo, std::size_t test_hi) {
    Fold f;
    for (std::size_t p = 0; p < n; ++p) (p >= test_lo && p < test_hi ? f.test : f.train).push_back(perm[p]);
    std::sort(f.train.begin(), f.train.end());
    std::sort(f.test.begin(), f.test.end());
    folds.push_back(std::move(f));
  };
  if (spec.mode == SplitSpec::Mode::kfold) {
    for (std::size_t k = 0; k < spec.folds; ++k) assign(k * n / spec.folds, (k + 1) * n / spec.folds);
  } else {
    const auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
    assign(n_train, n);
  }
  return folds;
}

std::string fold_hash(const Fold& f) {
  std::uint64_t h = text::fnv1a("fold");
  for (std::size_t i : f.test) h = text::fnv1a(std::to_string(i) + ",", h);
  return text::hex64(h);
}

namespace {

template <class TestList, class IsHit, class Relevant>
FoldMetrics evaluate(const std::vector<std::vector<NodeIndex>>& recs, const std::vector<TestList>& test,
                     std::size_t max_k, IsHit is_hit, Relevant relevant) {
  FoldMetrics m;
  m.precision.assign(max_k, 0.0);
  m.recall.assign(max_k, 0.0);
  for (std::size_t u = 0; u < test.size(); ++u) {
    const std::size_t rel = relevant(test[u]);
    if (rel == 0) {
      ++m.users_excluded;
      continue;
    }
    ++m.users_evaluated;
    std::size_t hits = 0;
    for (std::size_t k = 1; k <= max_k; ++k) {
      if (u < recs.size() && k <= recs[u].size() && is_hit(test[u], recs[u][k - 1])) ++hits;
      m.precision[k - 1] += static_cast<double>(hits) / static_cast<double>(k);
      m.recall[k - 1] += static_cast<double>(hits) / static_cast<double>(rel);
    }
  }
  if (m.users_evaluated) {
    for (auto* v : {&m.precision, &m.recall})
      for (double& x : *v) x /= static_cast<double>(m.users_evaluated);
  }
  return m;
}

}  // namespace

FoldMetrics precision_recall_at_k(const std::vector<std::vector<NodeIndex>>& recs,
                                  const std::vector<std::vector<NodeIndex>>& test, std::size_t max_k) {
  return evaluate(
      recs, test, max_k,
      [](const std::vector<NodeIndex>& t, NodeIndex item) { return std::find(t.begin(), t.end(), item) != t.end(); },
      [](const std::vector<NodeIndex>& t) { return t.size(); });
}

FoldMetrics us_precision_recall(const std::vector<std::vector<NodeIndex>>& recs,
                                const std::vector<std::vector<RatedItem>>& test, double threshold, std::size_t max_k) {
  return evaluate(
      recs, test, max_k,
      [threshold](const std::vector<RatedItem>& t, NodeIndex item) {
        return std::any_of(t.begin(), t.end(),
                           [&](const RatedItem& r) { return r.item == item && r.rating > threshold; });
      },
      [threshold](const std::vector<RatedItem>& t) {
        return static_cast<std::size_t>(
            std::count_if(t.begin(), t.end(), [&](const RatedItem& r) { return r.rating > threshold; }));
      });
}

EvalReport summarize(std::string algo, std::vector<FoldMetrics> folds) {
  EvalReport r;
  r.algo = std::move(algo);
  r.folds = std::move(folds);
  if (r.folds.empty()) return r;
  const std::size_t max_k = r.folds.front().precision.size();
  r.mean.precision.assign(max_k, 0.0);
  r.mean.recall.assign(max_k, 0.0);
  for (const auto& f : r.folds) {
    for (std::size_t k = 0; k < max_k; ++k) {
      r.mean.precision[k] += f.precision[k] / static_cast<double>(r.folds.size());
      r.mean.recall[k] += f.recall[k] / static_cast<double>(r.folds.size());
    }
    r.mean.users_evaluated += f.users_evaluated;
    r.mean.users_excluded += f.users_excluded;
  }
  return r;
}

void write_eval_csv(const std::vector<EvalReport>& reports, std::ostream& out) {
  out << "algo,fold,k,precision,recall\n";
  auto rows = [&](const std::string& algo, const std::string& fold, const FoldMetrics& m) {
    for (std::size_t k = 0; k < m.precision.size(); ++k)
      out << algo << ',' << fold << ',' << k + 1 << ',' << text::format_double(m.precision[k]) << ','
          << text::format_double(m.recall[k]) << '\n';
  };
  for (const auto& r : reports) {
    for (std::size_t f = 0; f < r.folds.size(); ++f) rows(r.algo, std::to_string(f), r.folds[f]);
    rows(r.algo, "mean", r.mean);
  }
}

}  // namespace hinrec
