#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hinrec/dmf.hpp"
#include "hinrec/synthetic.hpp"
#include "support.hpp"

using namespace hinrec;

namespace {

RelationMatrix rel(std::string label, std::string src, std::string dst, std::size_t ns, std::size_t nd,
                   std::vector<RelationEntry> es) {
  Provenance p;
  p.label = std::move(label);
  return RelationMatrix(std::move(src), std::move(dst), ns, nd, std::move(es), p);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// alpha ln sigma(x) - reg/2 (|a|^2 + |p|^2 + |n|^2) for x = <a,p> - <a,n>
double objective(const std::vector<double>& a, const std::vector<double>& p, const std::vector<double>& n,
                 double alpha, double reg) {
  const double x = dot(a, p) - dot(a, n);
  return alpha * -std::log1p(std::exp(-x)) - reg / 2 * (dot(a, a) + dot(p, p) + dot(n, n));
}

}  // namespace

TEST_CASE("init_model shares factors per entity type") {
  auto target = rel("um", "user", "movie", 3, 4, {{0, 1, 1}, {2, 3, 1}});
  std::vector<RelationMatrix> aux{rel("mg", "movie", "genre", 4, 2, {{0, 1, 1}}),
                                  rel("ma", "movie", "actor", 4, 5, {{1, 1, 1}})};
  Hyperparams hp;
  hp.dim = 8;
  auto m = init_model(target, aux, hp);
  CHECK(m.factors.size() == 4);
  CHECK(m.factors.count("movie") == 1);
  for (const auto& [type, f] : m.factors) CHECK(f.dim() == 8);
  CHECK(m.at("movie").rows() == 4);
  CHECK(m.user_type == "user");
  CHECK(m.item_type == "movie");

  auto again = init_model(target, aux, hp);
  for (const auto& [type, f] : m.factors) CHECK(again.at(type) == f);
  hp.seed = 1;
  CHECK_FALSE(init_model(target, aux, hp).at("user") == m.at("user"));

  std::vector<RelationMatrix> clash{rel("mg", "movie", "genre", 5, 2, {{0, 1, 1}})};
  CHECK_THROWS_AS(init_model(target, clash, hp), ConfigError);
}

TEST_CASE("init_model scale is 0.1/sqrt(dim)") {
  auto target = rel("ui", "user", "item", 2000, 2000, {{0, 0, 1}});
  Hyperparams hp;
  hp.dim = 16;
  auto m = init_model(target, {}, hp);
  double s = 0, s2 = 0;
  const auto d = m.at("user").data();
  for (double v : d) {
    s += v;
    s2 += v * v;
  }
  const double n = double(d.size());
  CHECK(std::abs(s / n) < 0.001);
  CHECK(std::sqrt(s2 / n) == doctest::Approx(0.1 / 4).epsilon(0.01));
}

TEST_CASE("Hyperparams validation") {
  Hyperparams hp;
  CHECK_NOTHROW(hp.validate("t"));
  hp.dim = 0;
  CHECK_THROWS_AS(hp.validate("t"), ConfigError);
  hp = {};
  hp.lr = 0;
  CHECK_THROWS_AS(hp.validate("t"), ConfigError);
  hp = {};
  hp.reg = -1;
  CHECK_THROWS_AS(hp.validate("t"), ConfigError);
  hp = {};
  hp.relation_weights["t"] = 0;
  CHECK_THROWS_AS(hp.validate("t"), ConfigError);
  hp = {};
  hp.relation_weights["aux"] = -0.5;
  CHECK_THROWS_AS(hp.validate("t"), ConfigError);
}

TEST_CASE("bpr_step closed-form cases") {
  SUBCASE("equal positive and negative factors") {
    FactorMatrix users(1, 3), items(2, 3);
    const std::vector<double> a{0.3, -0.2, 0.5}, b{0.1, 0.4, -0.3};
    std::copy(a.begin(), a.end(), users.row(0).begin());
    std::copy(b.begin(), b.end(), items.row(0).begin());
    std::copy(b.begin(), b.end(), items.row(1).begin());
    const double alpha = 2, lr = 0.1, reg = 0.05;
    const double x = bpr_step(users, items, {0, 0, 1}, alpha, lr, reg);
    CHECK(x == 0);
    const double g = alpha / 2;
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(users.row(0)[k] == doctest::Approx(a[k] - lr * reg * a[k]).epsilon(1e-14));
      CHECK(items.row(0)[k] == doctest::Approx(b[k] + lr * (g * a[k] - reg * b[k])).epsilon(1e-14));
      CHECK(items.row(1)[k] == doctest::Approx(b[k] + lr * (-g * a[k] - reg * b[k])).epsilon(1e-14));
    }
  }
  SUBCASE("alpha zero only shrinks") {
    FactorMatrix users(1, 2), items(2, 2);
    users.row(0)[0] = 1;
    users.row(0)[1] = 2;
    items.row(0)[0] = 3;
    items.row(1)[1] = -1;
    bpr_step(users, items, {0, 0, 1}, 0.0, 0.5, 0.1);
    CHECK(users.row(0)[0] == doctest::Approx(0.95));
    CHECK(users.row(0)[1] == doctest::Approx(1.9));
    CHECK(items.row(0)[0] == doctest::Approx(2.85));
    CHECK(items.row(1)[1] == doctest::Approx(-0.95));
  }
  SUBCASE("validated overload") {
    auto target = rel("ui", "user", "item", 2, 3, {{0, 0, 1}, {1, 2, 1}});
    auto m = init_model(target, {}, Hyperparams{});
    CHECK_NOTHROW(bpr_step(m, target, {0, 0, 1}, 1, 0.1, 0.01));
    CHECK_THROWS_AS(bpr_step(m, target, {0, 1, 2}, 1, 0.1, 0.01), Error);
    CHECK_THROWS_AS(bpr_step(m, target, {1, 2, 2}, 1, 0.1, 0.01), Error);
    CHECK_THROWS_AS(bpr_step(m, target, {0, 0, 7}, 1, 0.1, 0.01), LookupError);
  }
}

TEST_CASE("property: bpr_step ascends the analytic gradient (central differences)") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd(0, 0.5);
  std::uniform_real_distribution<double> ud(0.1, 2);
  const std::size_t dim = 6;
  const double h = 1e-5, lr = 1e-3;
  for (int point = 0; point < 10; ++point) {
    std::vector<double> a(dim), p(dim), n(dim);
    for (auto* v : {&a, &p, &n})
      for (auto& x : *v) x = nd(gen);
    const double alpha = ud(gen), reg = ud(gen) / 10;
    FactorMatrix src(1, dim), dst(2, dim);
    std::copy(a.begin(), a.end(), src.row(0).begin());
    std::copy(p.begin(), p.end(), dst.row(0).begin());
    std::copy(n.begin(), n.end(), dst.row(1).begin());
    bpr_step(src, dst, {0, 0, 1}, alpha, lr, reg);

    std::vector<double> analytic, numeric;
    for (int which = 0; which < 3; ++which) {
      std::vector<double>& v = which == 0 ? a : which == 1 ? p : n;
      auto updated = which == 0 ? src.row(0) : dst.row(static_cast<std::size_t>(which - 1));
      const std::vector<double>& old = v;
      for (std::size_t k = 0; k < dim; ++k) {
        analytic.push_back((updated[k] - old[k]) / lr);
        const double keep = v[k];
        v[k] = keep + h;
        const double up = objective(a, p, n, alpha, reg);
        v[k] = keep - h;
        const double down = objective(a, p, n, alpha, reg);
        v[k] = keep;
        numeric.push_back((up - down) / (2 * h));
      }
    }
    double diff = 0, norm = 0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
      norm += numeric[i] * numeric[i];
    }
    CHECK(std::sqrt(diff / norm) <= 1e-4);
  }
}

TEST_CASE("train_dmf behaviour") {
  auto spec = synthetic_preset("ring");
  auto data = generate_synthetic(spec);
  auto g = load_graph(data.schema, data.records);
  auto target = direct_relation(g, g.schema().edge_type_id("ui"));
  auto aux = direct_relation(g, g.schema().edge_type_id("is"));
  Hyperparams hp;
  hp.dim = 8;
  hp.epochs = 20;
  hp.seed = 3;

  SUBCASE("no auxiliary relations is plain BPR and deterministic") {
    auto a = train_dmf(target, {}, hp);
    auto b = train_dmf(target, {}, hp);
    CHECK(a.factors.size() == 2);
    CHECK(a.at("user") == b.at("user"));
    CHECK(a.at("item") == b.at("item"));
    CHECK(a.loss_trace == b.loss_trace);
    CHECK(a.loss_trace.size() == 20);
  }
  SUBCASE("loss falls from the first to the last epoch") {
    std::vector<RelationMatrix> ax{aux};
    auto m = train_dmf(target, ax, hp);
    CHECK(m.loss_trace.back() < m.loss_trace.front());
    CHECK(m.factors.count("sector") == 1);
  }
  SUBCASE("an auxiliary step moves the scores of the target relation") {
    std::vector<RelationMatrix> ax{aux};
    auto m = init_model(target, ax, hp);
    const double before = m.score(0, 0);
    const NodeIndex sector = static_cast<NodeIndex>(aux.row(0)[0].dst);
    NodeIndex other = sector == 0 ? 1 : 0;
    bpr_step(m, aux, {0, sector, other}, 1.0, 0.5, 0.0);
    CHECK(m.score(0, 0) != before);
  }
  SUBCASE("empty relation is rejected") {
    std::vector<RelationMatrix> ax{rel("empty", "item", "sector", 50, 8, {})};
    CHECK_THROWS_AS(train_dmf(target, ax, hp), TrainingError);
  }
  SUBCASE("model file round trip") {
    std::vector<RelationMatrix> ax{aux};
    hp.relation_weights["is"] = 0.5;
    auto m = train_dmf(target, ax, hp);
    std::stringstream io;
    write_model(m, g, io);
    auto back = read_model(io, g);
    CHECK(back.target_label == m.target_label);
    CHECK(back.hp.dim == 8);
    CHECK(back.hp.relation_weights.at("is") == 0.5);
    for (const auto& [type, f] : m.factors) CHECK(back.at(type) == f);
    std::ostringstream loss;
    write_loss_trace(m, loss);
    CHECK(loss.str().rfind("epoch,mean_loss\n0,", 0) == 0);
  }
}

TEST_CASE("recommend_topk") {
  FactorModel m;
  m.user_type = "user";
  m.item_type = "item";
  m.factors["user"] = FactorMatrix(5, 2);
  m.factors["item"] = FactorMatrix(5, 2);
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd;
  for (auto* f : {&m.factors["user"], &m.factors["item"]})
    for (double& v : f->data()) v = nd(gen);

  SUBCASE("scores are the dot products, sorted") {
    for (NodeIndex u = 0; u < 5; ++u) {
      auto top = recommend_topk(m, u, 5);
      REQUIRE(top.size() == 5);
      for (std::size_t i = 0; i < top.size(); ++i) {
        CHECK(std::abs(top[i].second - dot(m.at("user").row(u), m.at("item").row(top[i].first))) <= 1e-12);
        if (i) CHECK(top[i - 1].second >= top[i].second);
      }
    }
  }
  SUBCASE("k = 1 is the best unexcluded item") {
    const std::vector<NodeIndex> ex{recommend_topk(m, 2, 1)[0].first};
    auto best = recommend_topk(m, 2, 1, ex);
    REQUIRE(best.size() == 1);
    CHECK(best[0].first == recommend_topk(m, 2, 2)[1].first);
  }
  SUBCASE("everything excluded") {
    const std::vector<NodeIndex> ex{0, 1, 2, 3, 4};
    CHECK(recommend_topk(m, 0, 3, ex).empty());
  }
  SUBCASE("ties go to the smaller index") {
    for (NodeIndex i = 0; i < 5; ++i) {
      m.factors["item"].row(i)[0] = 1;
      m.factors["item"].row(i)[1] = 0;
    }
    auto top = recommend_topk(m, 0, 3);
    CHECK(top[0].first == 0);
    CHECK(top[1].first == 1);
    CHECK(top[2].first == 2);
  }
  SUBCASE("adding a constant to every item score keeps the order") {
    // second user column fixed to 1, so the item's second column shifts all its scores
    for (NodeIndex u = 0; u < 5; ++u) m.factors["user"].row(u)[1] = 1;
    for (NodeIndex i = 0; i < 5; ++i) m.factors["item"].row(i)[1] = 0;
    auto base = recommend_topk(m, 3, 5);
    for (NodeIndex i = 0; i < 5; ++i) m.factors["item"].row(i)[1] = 7.25;
    auto shifted = recommend_topk(m, 3, 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(base[i].first == shifted[i].first);
  }
  SUBCASE("unknown user") { CHECK_THROWS_AS(recommend_topk(m, 9, 3), LookupError); }
  SUBCASE("recommend_all matches per-user calls for any worker count") {
    std::vector<std::vector<NodeIndex>> ex{{1}, {}, {0, 4}};
    for (int w : {1, 2, 3}) {
      auto all = recommend_all(m, 3, ex, {w});
      for (NodeIndex u = 0; u < 5; ++u) {
        std::span<const NodeIndex> e;
        if (u < ex.size()) e = ex[u];
        auto one = recommend_topk(m, u, 3, e);
        REQUIRE(all[u].size() == one.size());
        for (std::size_t i = 0; i < one.size(); ++i) CHECK(all[u][i] == one[i].first);
      }
    }
  }
}
