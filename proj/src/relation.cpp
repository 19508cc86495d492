#include "hinrec/relation.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>

#include "hinrec/error.hpp"
#include "hinrec/text.hpp"

namespace hinrec {

const char* to_string(GenerationMethod m) noexcept {
  switch (m) {
    case GenerationMethod::direct: return "direct";
    case GenerationMethod::full: return "full";
    case GenerationMethod::sampled: return "sampled";
  }
  return "?";
}

GenerationMethod parse_generation_method(std::string_view s) {
  if (s == "direct") return GenerationMethod::direct;
  if (s == "full") return GenerationMethod::full;
  if (s == "sampled") return GenerationMethod::sampled;
  throw ConfigError("unknown generation method '" + std::string(s) + "' (expected full|sampled)");
}

RelationMatrix::RelationMatrix(std::string src_type, std::string dst_type, std::size_t src_universe,
                               std::size_t dst_universe, std::vector<RelationEntry> entries, Provenance prov)
    : src_type_(std::move(src_type)),
      dst_type_(std::move(dst_type)),
      src_universe_(src_universe),
      dst_universe_(dst_universe),
      prov_(std::move(prov)) {
  for (const auto& e : entries) {
    if (!(e.count > 0)) throw Error("relation '" + prov_.label + "': entry count must be positive");
    if (e.src >= src_universe_ || e.dst >= dst_universe_)
      throw Error("relation '" + prov_.label + "': entry outside entity universe");
  }
  std::sort(entries.begin(), entries.end(), [](const RelationEntry& a, const RelationEntry& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });
  for (const auto& e : entries) {
    if (!entries_.empty() && entries_.back().src == e.src && entries_.back().dst == e.dst)
      entries_.back().count += e.count;
    else
      entries_.push_back(e);
  }
  build_offsets();
}

RelationMatrix RelationMatrix::from_sorted(std::string src_type, std::string dst_type, std::size_t src_universe,
                                           std::size_t dst_universe, std::vector<RelationEntry> entries,
                                           Provenance prov) {
  RelationMatrix r;
  r.src_type_ = std::move(src_type);
  r.dst_type_ = std::move(dst_type);
  r.src_universe_ = src_universe;
  r.dst_universe_ = dst_universe;
  r.entries_ = std::move(entries);
  r.prov_ = std::move(prov);
  r.build_offsets();
  return r;
}

void RelationMatrix::build_offsets() {
  row_offsets_.assign(src_universe_ + 1, 0);
  for (const auto& e : entries_) ++row_offsets_[e.src + 1];
  for (std::size_t i = 0; i < src_universe_; ++i) row_offsets_[i + 1] += row_offsets_[i];
}

double RelationMatrix::get(NodeIndex src, NodeIndex dst) const noexcept {
  if (src >= src_universe_) return 0;
  auto r = row(src);
  auto it = std::lower_bound(r.begin(), r.end(), dst,
                             [](const RelationEntry& e, NodeIndex d) { return e.dst < d; });
  return it != r.end() && it->dst == dst ? it->count : 0;
}

std::size_t RelationMatrix::nonempty_rows() const noexcept {
  std::size_t n = 0;
  for (std::size_t i = 0; i < src_universe_; ++i) n += row_offsets_[i + 1] > row_offsets_[i];
  return n;
}

double RelationMatrix::total() const noexcept {
  double t = 0;
  for (const auto& e : entries_) t += e.count;
  return t;
}

RelationMatrix RelationMatrix::row_normalized() const {
  std::vector<RelationEntry> out(entries_);
  for (NodeIndex s = 0; s < src_universe_; ++s) {
    double denom = 0;
    if (prov_.method == GenerationMethod::sampled && prov_.walks_per_start > 0) {
      denom = static_cast<double>(prov_.walks_per_start);
    } else {
      for (const auto& e : row(s)) denom += e.count;
    }
    for (std::size_t i = row_offsets_[s]; i < row_offsets_[s + 1]; ++i) out[i].count /= denom;
  }
  return from_sorted(src_type_, dst_type_, src_universe_, dst_universe_, std::move(out), prov_);
}

RelationMatrix direct_relation(const HeteroGraph& g, TypeId et, std::string source) {
  const auto& schema = g.schema();
  const TypeId st = schema.edge_src(et);
  const TypeId dt = schema.edge_dst(et);
  const auto& adj = g.adjacency(et, Direction::forward);
  std::vector<RelationEntry> entries;
  entries.reserve(g.edge_count(et));
  for (NodeIndex s = 0; s < g.node_count(st); ++s)
    for (NodeIndex d : adj.targets_of(s)) entries.push_back({s, d, 1.0});
  Provenance prov;
  prov.label = schema.edge_type(et).name;
  prov.method = GenerationMethod::direct;
  prov.source = std::move(source);
  return RelationMatrix(schema.node_type(st).name, schema.node_type(dt).name, g.node_count(st), g.node_count(dt),
                        std::move(entries), std::move(prov));
}

void write_relation(const RelationMatrix& r, const HeteroGraph& g, std::ostream& out) {
  const auto& p = r.provenance();
  const TypeId st = g.schema().node_type_id(r.src_type());
  const TypeId dt = g.schema().node_type_id(r.dst_type());
  out << "# hinrec-relation\t1\n"
      << "# label\t" << p.label << '\n'
      << "# src_type\t" << r.src_type() << '\n'
      << "# dst_type\t" << r.dst_type() << '\n'
      << "# method\t" << to_string(p.method) << '\n'
      << "# walks_per_start\t" << p.walks_per_start << '\n'
      << "# max_retries\t" << p.max_retries << '\n'
      << "# seed\t" << p.seed << '\n'
      << "# completed\t" << p.completed_walks << '\n'
      << "# failures\t" << p.failed_walks << '\n'
      << "# dead_ends\t" << p.dead_ends << '\n'
      << "# source\t" << p.source << '\n';
  for (const auto& e : r.entries())
    out << g.node_id(st, e.src) << '\t' << g.node_id(dt, e.dst) << '\t' << text::format_double(e.count) << '\n';
}

RelationMatrix read_relation(std::istream& in, const HeteroGraph& g) {
  std::map<std::string, std::string, std::less<>> header;
  std::vector<std::pair<std::size_t, std::string>> body;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (line.empty()) continue;
    if (line.front() == '#') {
      auto kv = text::split(text::trim(line.substr(1)), '\t');
      if (kv.size() == 2) header[std::string(kv[0])] = std::string(kv[1]);
      continue;
    }
    body.emplace_back(lineno, raw);
  }
  auto need = [&](const char* key) -> const std::string& {
    auto it = header.find(key);
    if (it == header.end()) throw LoadError(std::string("relation header lacks '") + key + "'", 0);
    return it->second;
  };
  auto num = [&](const char* key) -> std::uint64_t {
    auto it = header.find(key);
    if (it == header.end()) return 0;
    auto v = text::parse_uint(it->second);
    if (!v) throw LoadError(std::string("relation header '") + key + "' is not an integer", 0);
    return *v;
  };
  Provenance p;
  p.label = need("label");
  p.method = parse_generation_method(need("method"));
  p.walks_per_start = num("walks_per_start");
  p.max_retries = num("max_retries");
  p.seed = num("seed");
  p.completed_walks = num("completed");
  p.failed_walks = num("failures");
  p.dead_ends = num("dead_ends");
  if (auto it = header.find("source"); it != header.end()) p.source = it->second;
  const std::string src_type = need("src_type");
  const std::string dst_type = need("dst_type");
  const TypeId st = g.schema().node_type_id(src_type);
  const TypeId dt = g.schema().node_type_id(dst_type);

  std::vector<RelationEntry> entries;
  entries.reserve(body.size());
  for (const auto& [ln, line] : body) {
    auto f = text::split(line, '\t');
    if (f.size() != 3) throw LoadError("expected src<TAB>dst<TAB>count", ln);
    auto s = g.find_node(st, f[0]);
    auto d = g.find_node(dt, f[1]);
    auto c = text::parse_double(f[2]);
    if (!s || !d) throw LoadError("unknown node id in relation row", ln);
    if (!c || !(*c > 0)) throw LoadError("count must be a positive number", ln);
    entries.push_back({*s, *d, *c});
  }
  return RelationMatrix(src_type, dst_type, g.node_count(st), g.node_count(dt), std::move(entries), std::move(p));
}

}  // namespace hinrec
