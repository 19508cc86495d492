#pragma once
// Test-side fixtures, random generators and independent oracles. The oracles
// work from raw edge lists or dense matrices and never touch the library's
// CSR structures or kernels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hinrec/graph.hpp"
#include "hinrec/metapath.hpp"
#include "hinrec/relation.hpp"
#include "hinrec/schema.hpp"

namespace testsupport {

using namespace hinrec;

inline NetworkSchema movie_schema() {
  return NetworkSchema::parse(
      "[nodes]\nuser\nmovie\ngenre\ndirector\nactor\n"
      "[edges]\num user movie weighted(1,5)\nmg movie genre\nmd movie director\nma movie actor\n");
}

// Small random user-movie-genre-actor graph. Node ids are u0.., m0.., etc.
struct RandomGraphSpec {
  std::size_t users = 6;
  std::size_t movies = 8;
  std::size_t genres = 3;
  std::size_t actors = 5;
  double p_rate = 0.35;
  double p_genre = 0.4;
  double p_actor = 0.3;
};

inline std::vector<EdgeRecord> random_records(std::mt19937_64& gen, const RandomGraphSpec& s = {}) {
  std::bernoulli_distribution rate(s.p_rate), genre(s.p_genre), actor(s.p_actor);
  std::uniform_int_distribution<int> stars(1, 5);
  std::vector<EdgeRecord> recs;
  for (std::size_t u = 0; u < s.users; ++u)
    for (std::size_t m = 0; m < s.movies; ++m)
      if (rate(gen)) recs.push_back({"um", "u" + std::to_string(u), "m" + std::to_string(m), double(stars(gen)), 0});
  for (std::size_t m = 0; m < s.movies; ++m) {
    for (std::size_t x = 0; x < s.genres; ++x)
      if (genre(gen)) recs.push_back({"mg", "m" + std::to_string(m), "g" + std::to_string(x), std::nullopt, 0});
    for (std::size_t x = 0; x < s.actors; ++x)
      if (actor(gen)) recs.push_back({"ma", "m" + std::to_string(m), "a" + std::to_string(x), std::nullopt, 0});
  }
  return recs;
}

// ---- path oracles ----------------------------------------------------------

struct RawEdge {
  std::string type, src, dst;
  double weight = 0;
  std::string src_type, dst_type;
};

inline std::vector<RawEdge> raw_edges(const std::vector<EdgeRecord>& recs, const NetworkSchema& schema) {
  std::vector<RawEdge> out;
  for (const auto& r : recs) {
    const auto& def = schema.edge_type(schema.edge_type_id(r.edge_type));
    out.push_back({r.edge_type, r.src, r.dst, r.weight.value_or(0), def.src, def.dst});
  }
  return out;
}

// Neighbours of `node` along one step by scanning the whole edge list.
inline std::vector<std::pair<std::string, double>> step_neighbours(const std::vector<RawEdge>& edges,
                                                                   const MetaPathStep& st, const std::string& node) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& e : edges) {
    if (e.type != st.edge_type) continue;
    if (st.direction == Direction::forward && e.src == node) out.push_back({e.dst, e.weight});
    if (st.direction == Direction::reverse && e.dst == node) out.push_back({e.src, e.weight});
  }
  return out;
}

// Exhaustive path enumeration: (start id, end id) -> number of typed paths.
inline std::map<std::pair<std::string, std::string>, double> enumerate_paths(const std::vector<RawEdge>& edges,
                                                                            const MetaPath& mp,
                                                                            const std::vector<std::string>& starts) {
  std::map<std::pair<std::string, std::string>, double> out;
  auto rec = [&](auto&& self, const std::string& start, const std::string& node, std::size_t depth) -> void {
    if (depth == mp.steps.size()) {
      out[{start, node}] += 1;
      return;
    }
    for (const auto& [nb, w] : step_neighbours(edges, mp.steps[depth], node)) self(self, start, nb, depth + 1);
  };
  for (const auto& s : starts) rec(rec, s, s, 0);
  return out;
}

// Terminal distribution of one walk from `start`: softmax over e^w on
// weighted steps, uniform otherwise, conditioned on not dead-ending.
inline std::map<std::string, double> walk_distribution(const std::vector<RawEdge>& edges, const MetaPath& mp,
                                                       const std::set<std::string>& weighted_types,
                                                       const std::string& start) {
  std::map<std::string, double> out;
  auto rec = [&](auto&& self, const std::string& node, std::size_t depth, double p) -> void {
    if (depth == mp.steps.size()) {
      out[node] += p;
      return;
    }
    const auto nbs = step_neighbours(edges, mp.steps[depth], node);
    if (nbs.empty()) return;
    const bool weighted = weighted_types.count(mp.steps[depth].edge_type) > 0;
    double z = 0;
    for (const auto& nb : nbs) z += weighted ? std::exp(nb.second) : 1.0;
    for (const auto& [nb, w] : nbs) self(self, nb, depth + 1, p * (weighted ? std::exp(w) : 1.0) / z);
  };
  rec(rec, start, 0, 1.0);
  double mass = 0;
  for (const auto& kv : out) mass += kv.second;
  for (auto& kv : out) kv.second /= mass;
  return out;
}

// ---- dense linear algebra --------------------------------------------------

struct Dense {
  std::size_t r = 0, c = 0;
  std::vector<double> v;
  Dense(std::size_t rows, std::size_t cols) : r(rows), c(cols), v(rows * cols, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return v[i * c + j]; }
  double operator()(std::size_t i, std::size_t j) const { return v[i * c + j]; }
};

inline Dense matmul(const Dense& a, const Dense& b) {
  Dense out(a.r, b.c);
  for (std::size_t i = 0; i < a.r; ++i)
    for (std::size_t k = 0; k < a.c; ++k)
      for (std::size_t j = 0; j < b.c; ++j) out(i, j) += a(i, k) * b(k, j);
  return out;
}

inline Dense transpose(const Dense& a) {
  Dense out(a.c, a.r);
  for (std::size_t i = 0; i < a.r; ++i)
    for (std::size_t j = 0; j < a.c; ++j) out(j, i) = a(i, j);
  return out;
}

// Row-normalised then elementwise-powered transition matrix.
inline Dense powered_transitions(const Dense& a, double alpha) {
  Dense out(a.r, a.c);
  for (std::size_t i = 0; i < a.r; ++i) {
    double k = 0;
    for (std::size_t j = 0; j < a.c; ++j) k += a(i, j);
    if (k == 0) continue;
    for (std::size_t j = 0; j < a.c; ++j)
      if (a(i, j) > 0) out(i, j) = std::pow(a(i, j) / k, alpha);
  }
  return out;
}

// P3alpha: P'_ui P'_iu P'_ui.
inline Dense p3_oracle(const Dense& a, double alpha) {
  const Dense ui = powered_transitions(a, alpha);
  const Dense iu = powered_transitions(transpose(a), alpha);
  return matmul(matmul(ui, iu), ui);
}

inline Dense rp3_oracle(const Dense& a, double alpha, double beta) {
  Dense s = p3_oracle(a, alpha);
  for (std::size_t i = 0; i < s.c; ++i) {
    double k = 0;
    for (std::size_t u = 0; u < a.r; ++u) k += a(u, i);
    for (std::size_t u = 0; u < s.r; ++u) s(u, i) = k > 0 ? s(u, i) / std::pow(k, beta) : 0.0;
  }
  return s;
}

// W_ij = 1/(k_i^(1-l) k_j^l) sum_u a_ui a_uj / k_u, scores = (W a_u^T)^T.
inline Dense hl_matrix_oracle(const Dense& a, double lambda) {
  std::vector<double> ku(a.r, 0), ki(a.c, 0);
  for (std::size_t u = 0; u < a.r; ++u)
    for (std::size_t i = 0; i < a.c; ++i) {
      ku[u] += a(u, i);
      ki[i] += a(u, i);
    }
  Dense w(a.c, a.c);
  for (std::size_t i = 0; i < a.c; ++i)
    for (std::size_t j = 0; j < a.c; ++j) {
      if (ki[i] == 0 || ki[j] == 0) continue;
      double s = 0;
      for (std::size_t u = 0; u < a.r; ++u)
        if (ku[u] > 0) s += a(u, i) * a(u, j) / ku[u];
      w(i, j) = s / (std::pow(ki[i], 1 - lambda) * std::pow(ki[j], lambda));
    }
  return w;
}

inline Dense hl_oracle(const Dense& a, double lambda) { return transpose(matmul(hl_matrix_oracle(a, lambda), transpose(a))); }

// ---- other oracles ---------------------------------------------------------

// 1 - mean_u H(p_u)/log(N_d) straight from the definition.
inline double nig_oracle(const std::vector<std::vector<double>>& rows, std::size_t n_dst) {
  double acc = 0;
  std::size_t used = 0;
  for (const auto& row : rows) {
    double total = 0;
    for (double c : row) total += c;
    if (total <= 0) continue;
    double h = 0;
    for (double c : row)
      if (c > 0) h -= (c / total) * std::log(c / total);
    acc += h / std::log(double(n_dst));
    ++used;
  }
  return 1.0 - acc / double(used);
}

// k-core by deleting one offending node at a time until none is left.
// Nodes are typed ids; a node of an endpoint type of `et` that has no `et`
// edge at all is offending too. Returns surviving edges as (type, src, dst).
inline std::set<std::tuple<std::string, std::string, std::string>> kcore_oracle(std::vector<RawEdge> edges,
                                                                                const std::string& et, std::size_t k) {
  std::string rsrc, rdst;
  for (const auto& e : edges)
    if (e.type == et) {
      rsrc = e.src_type;
      rdst = e.dst_type;
    }
  for (;;) {
    std::map<std::string, std::size_t> deg;
    std::set<std::string> nodes;
    for (const auto& e : edges) {
      nodes.insert(e.src_type + ":" + e.src);
      nodes.insert(e.dst_type + ":" + e.dst);
      if (e.type == et) {
        ++deg[e.src_type + ":" + e.src];
        ++deg[e.dst_type + ":" + e.dst];
      }
    }
    std::string victim;
    for (const auto& n : nodes) {
      const std::string type = n.substr(0, n.find(':'));
      if ((type == rsrc || type == rdst) && deg[n] < k) {
        victim = n;
        break;
      }
    }
    if (victim.empty()) break;
    std::erase_if(edges, [&](const RawEdge& e) {
      return e.src_type + ":" + e.src == victim || e.dst_type + ":" + e.dst == victim;
    });
  }
  std::set<std::tuple<std::string, std::string, std::string>> out;
  for (const auto& e : edges) out.insert({e.type, e.src, e.dst});
  return out;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("hinrec_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testsupport
