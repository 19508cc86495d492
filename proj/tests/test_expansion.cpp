#include <doctest.h>

#include <random>
#include <sstream>

#include "hinrec/bench_generation.hpp"
#include "hinrec/error.hpp"
#include "hinrec/expansion.hpp"
#include "hinrec/reference.hpp"
#include "support.hpp"

using namespace hinrec;
using testsupport::movie_schema;

namespace {

void check_against_enumeration(const HeteroGraph& g, const std::vector<EdgeRecord>& recs, const MetaPath& mp,
                               const RelationMatrix& rel) {
  auto r = resolve_metapath(mp, g.schema());
  std::vector<std::string> ids;
  for (auto s : all_starts(g, r)) ids.push_back(g.node_id(r.source_type(), s));
  auto want = testsupport::enumerate_paths(testsupport::raw_edges(recs, g.schema()), mp, ids);
  std::map<std::pair<std::string, std::string>, double> got;
  for (const auto& e : rel.entries())
    got[{g.node_id(r.source_type(), e.src), g.node_id(r.target_type(), e.dst)}] = e.count;
  CHECK(got == want);
}

}  // namespace

TEST_CASE("expand_full: two paths to the same genre count twice") {
  std::vector<EdgeRecord> recs{{"um", "u1", "m1", 1.0, 0},
                               {"um", "u1", "m2", 5.0, 0},
                               {"mg", "m1", "g1", std::nullopt, 0},
                               {"mg", "m2", "g1", std::nullopt, 0}};
  auto g = load_graph(movie_schema(), recs);
  auto r = resolve_metapath(MetaPath::parse("um,>mg"), g.schema());
  auto rel = expand_full(g, r, all_starts(g, r));
  REQUIRE(rel.size() == 1);
  CHECK(rel.get(0, 0) == 2);
  CHECK(rel.provenance().method == GenerationMethod::full);
  CHECK(rel.label() == "umg");
  check_against_enumeration(g, recs, MetaPath::parse("um,>mg"), rel);
}

TEST_CASE("expand_full: one step equals the edge relation") {
  std::mt19937_64 gen(4);
  auto recs = testsupport::random_records(gen);
  auto g = load_graph(movie_schema(), recs);
  const TypeId um = g.schema().edge_type_id("um");
  auto r = resolve_metapath(MetaPath::parse("um"), g.schema());
  auto rel = expand_full(g, r, all_starts(g, r));
  auto direct = direct_relation(g, um);
  CHECK(std::equal(rel.entries().begin(), rel.entries().end(), direct.entries().begin(), direct.entries().end()));
  for (const auto& e : rel.entries()) CHECK(e.count == 1);
}

TEST_CASE("property: expand_full equals enumeration, dense adjacency products and the serial reference") {
  std::mt19937_64 gen(99);
  const std::vector<std::string> literals{"um,>mg", "um,>mg,<mg", "um,>ma,<ma", "um,<um,>um", "mg,<mg", "ma,<ma,>mg"};
  for (int trial = 0; trial < 36; ++trial) {
    auto recs = testsupport::random_records(gen);
    auto g = load_graph(movie_schema(), recs);
    const auto mp = MetaPath::parse(literals[static_cast<std::size_t>(trial) % literals.size()]);
    auto r = resolve_metapath(mp, g.schema());
    auto starts = all_starts(g, r);
    auto rel = expand_full(g, r, starts);
    check_against_enumeration(g, recs, mp, rel);
    CHECK(rel == reference::expand_full(g, r, starts));
    for (int w : {1, 3}) CHECK(expand_full(g, r, starts, {2e8, w}) == rel);

    // dense product of 0/1 step matrices
    std::vector<testsupport::Dense> mats;
    for (const auto& st : r.steps) {
      testsupport::Dense m(g.node_count(st.from), g.node_count(st.to));
      for (EdgeId id = 0; id < g.edge_count(st.edge_type); ++id) {
        const Edge e = g.edge(st.edge_type, id);
        if (st.direction == Direction::forward) m(e.src.index, e.dst.index) += 1;
        else m(e.dst.index, e.src.index) += 1;
      }
      mats.push_back(m);
    }
    testsupport::Dense prod = mats[0];
    for (std::size_t i = 1; i < mats.size(); ++i) prod = testsupport::matmul(prod, mats[i]);
    for (std::size_t s = 0; s < prod.r; ++s)
      for (std::size_t d = 0; d < prod.c; ++d)
        CHECK(rel.get(static_cast<NodeIndex>(s), static_cast<NodeIndex>(d)) == prod(s, d));

    // path_counts is the row total of the expansion
    auto pc = path_counts(g, r);
    for (auto s : starts) {
      double total = 0;
      for (const auto& e : rel.row(s)) total += e.count;
      CHECK(pc[s] == total);
    }
    CHECK(projected_entries(g, r, starts) >= double(rel.size()));
  }
}

TEST_CASE("expand_full refuses projections above the cap before working") {
  std::mt19937_64 gen(3);
  testsupport::RandomGraphSpec spec;
  spec.p_rate = 0.9;
  spec.p_genre = 0.9;
  auto g = load_graph(movie_schema(), testsupport::random_records(gen, spec));
  auto r = resolve_metapath(MetaPath::parse("um,>mg,<mg"), g.schema());
  try {
    expand_full(g, r, all_starts(g, r), {5, 1});
    FAIL("expected SizeCapError");
  } catch (const SizeCapError& e) {
    CHECK(e.projected_entries() > 5);
  }
}

TEST_CASE("bench_generation") {
  std::mt19937_64 gen(12);
  auto recs = testsupport::random_records(gen);
  auto g = load_graph(movie_schema(), recs);
  std::vector<ResolvedMetaPath> paths{resolve_metapath(MetaPath::parse("um,>mg,<mg"), g.schema())};
  CHECK_THROWS_AS(bench_generation(g, paths, {}, {20, 5}, 1, 2), ConfigError);
  const auto report = bench_generation(g, paths, {}, {20, 5}, 1, 3);
  REQUIRE(report.rows.size() == 2);
  const auto& full = report.rows[0];
  const auto& sampled = report.rows[1];
  CHECK(full.method == GenerationMethod::full);
  CHECK(full.count == expand_full(g, paths[0], all_starts(g, paths[0])).total());
  CHECK(full.ratio == 1);
  CHECK(sampled.rep_ms.size() == 3);
  for (auto c : sampled.rep_counts) CHECK(c == sampled.rep_counts.front());
  CHECK(sampled.ratio == doctest::Approx(sampled.median_ms / full.median_ms));
  std::ostringstream out;
  write_timing_csv(report, out);
  CHECK(out.str().find("metapath,method,median_ms,count,ratio\n") != std::string::npos);

  // a cap below the projection records the full row as capped
  const auto capped = bench_generation(g, paths, {}, {20, 5}, 1, 3, {1, 1});
  CHECK(capped.rows[0].capped);
  CHECK(std::isnan(capped.rows[1].ratio));
}
