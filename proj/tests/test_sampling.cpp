#include <doctest.h>

#include <cmath>
#include <random>

#include "hinrec/expansion.hpp"
#include "hinrec/reference.hpp"
#include "hinrec/sampling.hpp"
#include "support.hpp"

using namespace hinrec;
using testsupport::movie_schema;

namespace {

std::vector<Edge> weighted_edges(const std::vector<double>& w) {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < w.size(); ++i)
    out.push_back({0, static_cast<EdgeId>(i), {0, 0}, {1, static_cast<NodeIndex>(i)}, w[i]});
  return out;
}

// Upper 0.001 quantiles of chi-square with 1..9 degrees of freedom.
constexpr double kChi2Crit[] = {10.828, 13.816, 16.266, 18.467, 20.515, 22.458, 24.322, 26.124, 27.877};

double chi_square(const std::vector<int>& counts, const std::vector<double>& p, int n) {
  double x = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double e = p[i] * n;
    x += (counts[i] - e) * (counts[i] - e) / e;
  }
  return x;
}

std::vector<double> softmax_oracle(const std::vector<double>& w) {
  double z = 0;
  for (double x : w) z += std::exp(x);
  std::vector<double> p;
  for (double x : w) p.push_back(std::exp(x) / z);
  return p;
}

}  // namespace

TEST_CASE("usample") {
  Rng rng(9);
  auto one = weighted_edges({1});
  CHECK(usample(one, rng).id == 0);
  auto three = weighted_edges({1, 1, 1});
  std::vector<int> c(3);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++c[usample(three, rng).id];
  for (int x : c) CHECK(std::abs(x / double(n) - 1.0 / 3) < 0.01);
  CHECK_THROWS_AS(usample(std::span<const Edge>{}, rng), Error);

  auto four = weighted_edges({1, 1, 1, 1});
  Rng a(77), b(77);
  for (int i = 0; i < 50; ++i) CHECK(usample(four, a).id == usample(four, b).id);
}

TEST_CASE("wsample matches softmax") {
  SUBCASE("weights 5, 1, 3") {
    auto es = weighted_edges({5, 1, 3});
    Rng rng(1);
    std::vector<int> c(3);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++c[wsample(es, rng).id];
    CHECK(std::abs(c[0] / double(n) - 0.867) < 0.01);
    CHECK(std::abs(c[1] / double(n) - 0.016) < 0.01);
    CHECK(std::abs(c[2] / double(n) - 0.117) < 0.01);
  }
  SUBCASE("equal weights are uniform") {
    auto p = softmax(std::vector<double>{2, 2, 2, 2});
    for (double x : p) CHECK(x == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("weights 10, 0") {
    auto p = softmax(std::vector<double>{10, 0});
    CHECK(p[0] == doctest::Approx(std::exp(10.0) / (std::exp(10.0) + 1)).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(1 / (std::exp(10.0) + 1)).epsilon(1e-9));
    CHECK(p[0] == doctest::Approx(0.9999546).epsilon(1e-7));
  }
  SUBCASE("large weights do not overflow") {
    auto p = softmax(std::vector<double>{1000, 999});
    CHECK(std::isfinite(p[0]));
    CHECK(p[0] == doctest::Approx(1 / (1 + std::exp(-1.0))).epsilon(1e-12));
  }
  SUBCASE("errors") {
    Rng rng(1);
    CHECK_THROWS_AS(wsample(std::span<const Edge>{}, rng), Error);
    auto es = weighted_edges({1, 2});
    es[1].weight.reset();
    CHECK_THROWS_AS(wsample(es, rng), Error);
  }
}

TEST_CASE("property: wsample passes chi-square against softmax at 0.001") {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> len(2, 10);
  std::uniform_real_distribution<double> wdist(1, 5);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> w(static_cast<std::size_t>(len(gen)));
    for (auto& x : w) x = wdist(gen);
    auto es = weighted_edges(w);
    const auto p = softmax_oracle(w);
    auto lib = softmax(w);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(lib[i] == doctest::Approx(p[i]).epsilon(1e-12));
    Rng rng(static_cast<std::uint64_t>(trial) + 100);
    std::vector<int> c(w.size());
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++c[wsample(es, rng).id];
    CHECK(chi_square(c, p, n) < kChi2Crit[w.size() - 2]);
  }
}

TEST_CASE("sample_relation: two movies rated 5 and 3, distinct genres") {
  std::vector<EdgeRecord> recs{{"um", "u", "m1", 5.0, 0},
                               {"um", "u", "m2", 3.0, 0},
                               {"mg", "m1", "g1", std::nullopt, 0},
                               {"mg", "m2", "g2", std::nullopt, 0}};
  auto g = load_graph(movie_schema(), recs);
  auto r = resolve_metapath(MetaPath::parse("um,>mg"), g.schema());
  auto rel = sample_relation(g, r, all_starts(g, r), {1000, 5}, 7);
  const double p = std::exp(5.0) / (std::exp(5.0) + std::exp(3.0));
  const double sigma = std::sqrt(1000 * p * (1 - p));
  const NodeIndex g1 = *g.find_node(g.schema().node_type_id("genre"), "g1");
  const NodeIndex g2 = *g.find_node(g.schema().node_type_id("genre"), "g2");
  CHECK(std::abs(rel.get(0, g1) - 1000 * p) <= 3 * sigma);
  CHECK(rel.get(0, g1) + rel.get(0, g2) == 1000);
  CHECK(rel.provenance().completed_walks == 1000);
  CHECK(rel.provenance().failed_walks == 0);
  CHECK(rel.provenance().walks_per_start == 1000);
  CHECK(rel.provenance().seed == 7);
  CHECK(rel.provenance().method == GenerationMethod::sampled);
}

TEST_CASE("sample_relation: unique completion gives S per row") {
  std::vector<EdgeRecord> recs;
  for (int i = 0; i < 5; ++i) {
    recs.push_back({"um", "u" + std::to_string(i), "m" + std::to_string(i), 4.0, 0});
    recs.push_back({"md", "m" + std::to_string(i), "d" + std::to_string(i % 2), std::nullopt, 0});
  }
  auto g = load_graph(movie_schema(), recs);
  auto r = resolve_metapath(MetaPath::parse("um,>md"), g.schema());
  auto rel = sample_relation(g, r, all_starts(g, r), {37, 0}, 1);
  CHECK(rel.size() == 5);
  for (const auto& e : rel.entries()) CHECK(e.count == 37);
}

TEST_CASE("sample_relation: dead ends, retries and failures") {
  // u0 -> m0 (no actor) only: every attempt dead-ends.
  // u1 -> m1 (actor) and m0: some attempts dead-end and are retried.
  std::vector<EdgeRecord> recs{{"um", "u0", "m0", 1.0, 0},
                               {"um", "u1", "m1", 1.0, 0},
                               {"um", "u1", "m0", 1.0, 0},
                               {"ma", "m1", "a0", std::nullopt, 0}};
  auto g = load_graph(movie_schema(), recs);
  auto r = resolve_metapath(MetaPath::parse("um,>ma"), g.schema());
  auto rel = sample_relation(g, r, all_starts(g, r), {50, 3}, 5);
  const auto& pv = rel.provenance();
  CHECK(rel.row(0).empty());
  CHECK(pv.failed_walks >= 50);
  CHECK(pv.completed_walks + pv.failed_walks == 100);
  CHECK(pv.dead_ends >= 200);
  CHECK(rel.get(1, 0) == pv.completed_walks);
  // with retries u1 almost never fails: P(fail) = 0.5^4 per walk
  CHECK(pv.failed_walks - 50 < 15);
  CHECK_THROWS_AS(sample_relation(g, r, all_starts(g, r), {0, 3}, 5), ConfigError);
  const std::vector<NodeIndex> bad{99};
  CHECK_THROWS_AS(sample_relation(g, r, bad, {10, 3}, 5), LookupError);
}

TEST_CASE("property: sampled rows converge to the per-step walk distribution") {
  std::mt19937_64 gen(8);
  const std::vector<std::string> literals{"um,>mg", "um,>mg,<mg", "um,>ma,<ma", "um,<um,>um"};
  int checked = 0;
  for (int trial = 0; trial < 24; ++trial) {
    testsupport::RandomGraphSpec spec;
    spec.users = 4;
    spec.movies = 6;
    auto recs = testsupport::random_records(gen, spec);
    auto g = load_graph(movie_schema(), recs);
    const auto mp = MetaPath::parse(literals[static_cast<std::size_t>(trial) % literals.size()]);
    auto r = resolve_metapath(mp, g.schema());
    auto starts = all_starts(g, r);
    if (starts.empty()) continue;
    const auto raw = testsupport::raw_edges(recs, g.schema());
    std::vector<std::string> ids;
    for (auto s : starts) ids.push_back(g.node_id(r.source_type(), s));
    if (testsupport::enumerate_paths(raw, mp, ids).size() > 1000) continue;

    const std::uint32_t S = 10000;
    auto rel = sample_relation(g, r, starts, {S, 1000}, static_cast<std::uint64_t>(trial));
    for (auto s : starts) {
      auto oracle = testsupport::walk_distribution(raw, mp, {"um"}, g.node_id(r.source_type(), s));
      double row_total = 0;
      for (const auto& e : rel.row(s)) row_total += e.count;
      if (oracle.empty()) {
        CHECK(rel.row(s).empty());
        continue;
      }
      REQUIRE(row_total > 0);
      double max_dev = 0;
      for (const auto& [id, p] : oracle) {
        const NodeIndex d = *g.find_node(r.target_type(), id);
        max_dev = std::max(max_dev, std::abs(rel.get(s, d) / row_total - p));
      }
      for (const auto& e : rel.row(s)) CHECK(oracle.count(g.node_id(r.target_type(), e.dst)) == 1);
      CHECK(max_dev <= 0.02);
      ++checked;
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("property: sampling is deterministic and matches the serial reference for any worker count") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 10; ++trial) {
    testsupport::RandomGraphSpec spec;
    spec.users = 30;
    spec.movies = 20;
    spec.genres = 4;
    spec.actors = 12;
    auto g = load_graph(movie_schema(), testsupport::random_records(gen, spec));
    auto r = resolve_metapath(MetaPath::parse(trial % 2 ? "um,>ma,<ma" : "um,>mg"), g.schema());
    auto starts = all_starts(g, r);
    const SampleBudget b{64, 2};
    auto ref = reference::sample_relation(g, r, starts, b, 1234 + static_cast<std::uint64_t>(trial));
    for (int w : {1, 2, 3, 4}) {
      auto par = sample_relation(g, r, starts, b, 1234 + static_cast<std::uint64_t>(trial), {w});
      CHECK(par == ref);
    }
    // a subset of starts reproduces the same rows
    std::vector<NodeIndex> half;
    for (std::size_t i = 0; i < starts.size(); i += 2) half.push_back(starts[i]);
    auto sub = sample_relation(g, r, half, b, 1234 + static_cast<std::uint64_t>(trial));
    for (auto s : half) {
      auto a = sub.row(s), c = ref.row(s);
      CHECK(std::equal(a.begin(), a.end(), c.begin(), c.end()));
    }
  }
}
