#include "hinrec/graph.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "hinrec/error.hpp"
#include "hinrec/text.hpp"

namespace hinrec {

std::size_t HeteroGraph::total_nodes() const noexcept {
  std::size_t n = 0;
  for (const auto& t : nodes_) n += t.ids.size();
  return n;
}

std::size_t HeteroGraph::total_edges() const noexcept {
  std::size_t n = 0;
  for (const auto& e : edges_) n += e.src.size();
  return n;
}

std::optional<NodeIndex> HeteroGraph::find_node(TypeId t, std::string_view id) const {
  const auto& table = nodes_.at(t);
  auto it = table.index.find(std::string(id));
  if (it == table.index.end()) return std::nullopt;
  return it->second;
}

NodeHandle HeteroGraph::handle(const NodeRef& ref) const {
  TypeId t = schema_.node_type_id(ref.type);
  auto idx = find_node(t, ref.id);
  if (!idx) throw LookupError("unknown node " + ref.type + ":" + ref.id);
  return {t, *idx};
}

NodeRef HeteroGraph::ref(NodeHandle h) const {
  return {schema_.node_type(h.type).name, node_id(h.type, h.index)};
}

Edge HeteroGraph::edge(TypeId et, EdgeId id) const {
  const auto& list = edges_.at(et);
  Edge e;
  e.edge_type = et;
  e.id = id;
  e.src = {schema_.edge_src(et), list.src.at(id)};
  e.dst = {schema_.edge_dst(et), list.dst.at(id)};
  if (!list.weight.empty()) e.weight = list.weight[id];
  return e;
}

void HeteroGraph::check_handle(NodeHandle h, TypeId et, Direction dir) const {
  if (et >= schema_.edge_type_count()) throw LookupError("unknown edge type id " + std::to_string(et));
  if (h.type >= nodes_.size() || h.index >= nodes_[h.type].ids.size())
    throw LookupError("unknown node handle");
  TypeId expected = dir == Direction::forward ? schema_.edge_src(et) : schema_.edge_dst(et);
  if (h.type != expected)
    throw LookupError("node type '" + schema_.node_type(h.type).name + "' is not the " +
                      (dir == Direction::forward ? "source" : "destination") + " of edge type '" +
                      schema_.edge_type(et).name + "'");
}

std::vector<Edge> HeteroGraph::get_edges(NodeHandle n, TypeId et, Direction dir) const {
  check_handle(n, et, dir);
  std::vector<Edge> out;
  for (EdgeId id : adjacency(et, dir).edges_of(n.index)) out.push_back(edge(et, id));
  return out;
}

std::vector<Edge> HeteroGraph::get_edges(const NodeRef& n, std::string_view et, Direction dir) const {
  return get_edges(handle(n), schema_.edge_type_id(et), dir);
}

std::size_t HeteroGraph::degree(NodeHandle n, TypeId et, Direction dir) const {
  check_handle(n, et, dir);
  return adjacency(et, dir).degree(n.index);
}

std::size_t HeteroGraph::degree(const NodeRef& n, std::string_view et, Direction dir) const {
  return degree(handle(n), schema_.edge_type_id(et), dir);
}

namespace {

Adjacency build_adjacency(std::size_t rows, const std::vector<NodeIndex>& from,
                          const std::vector<NodeIndex>& to, const std::vector<double>& weight) {
  Adjacency adj;
  adj.offsets.assign(rows + 1, 0);
  for (NodeIndex f : from) ++adj.offsets[f + 1];
  for (std::size_t i = 0; i < rows; ++i) adj.offsets[i + 1] += adj.offsets[i];
  std::vector<std::size_t> cursor(adj.offsets.begin(), adj.offsets.end() - 1);
  adj.edges.resize(from.size());
  adj.targets.resize(from.size());
  if (!weight.empty()) adj.weights.resize(from.size());
  // Stable counting sort: rows keep insertion order.
  for (std::size_t id = 0; id < from.size(); ++id) {
    std::size_t pos = cursor[from[id]]++;
    adj.edges[pos] = static_cast<EdgeId>(id);
    adj.targets[pos] = to[id];
    if (!weight.empty()) adj.weights[pos] = weight[id];
  }
  return adj;
}

}  // namespace

void HeteroGraph::build_indices() {
  fwd_.clear();
  rev_.clear();
  for (TypeId et = 0; et < schema_.edge_type_count(); ++et) {
    const auto& list = edges_[et];
    fwd_.push_back(build_adjacency(nodes_[schema_.edge_src(et)].ids.size(), list.src, list.dst, list.weight));
    rev_.push_back(build_adjacency(nodes_[schema_.edge_dst(et)].ids.size(), list.dst, list.src, list.weight));
  }
}

HeteroGraph HeteroGraph::with_edge_subset(TypeId et, const std::vector<bool>& keep) const {
  if (keep.size() != edge_count(et)) throw Error("with_edge_subset: mask size mismatch");
  HeteroGraph out;
  out.schema_ = schema_;
  out.nodes_ = nodes_;
  out.edges_ = edges_;
  EdgeList filtered;
  const auto& list = edges_[et];
  for (std::size_t id = 0; id < keep.size(); ++id) {
    if (!keep[id]) continue;
    filtered.src.push_back(list.src[id]);
    filtered.dst.push_back(list.dst[id]);
    if (!list.weight.empty()) filtered.weight.push_back(list.weight[id]);
  }
  out.edges_[et] = std::move(filtered);
  out.build_indices();
  return out;
}

GraphBuilder::GraphBuilder(NetworkSchema schema, LoadOptions opts) : opts_(opts) {
  g_.schema_ = std::move(schema);
  g_.nodes_.resize(g_.schema_.node_type_count());
  g_.edges_.resize(g_.schema_.edge_type_count());
  seen_.resize(g_.schema_.edge_type_count());
}

NodeIndex GraphBuilder::add_node(TypeId type, std::string_view id) {
  auto& table = g_.nodes_.at(type);
  auto [it, inserted] = table.index.try_emplace(std::string(id), static_cast<NodeIndex>(table.ids.size()));
  if (inserted) table.ids.emplace_back(id);
  return it->second;
}

void GraphBuilder::add(const EdgeRecord& rec) {
  auto et = g_.schema_.find_edge_type(rec.edge_type);
  if (!et) throw LoadError("unknown edge type '" + rec.edge_type + "'", rec.line);
  if (rec.src.empty() || rec.dst.empty()) throw LoadError("empty node id", rec.line);
  const auto& def = g_.schema_.edge_type(*et);
  if (def.weighted() && !rec.weight)
    throw LoadError("missing weight for weighted edge type '" + def.name + "'", rec.line);
  if (!def.weighted() && rec.weight)
    throw LoadError("weight given for unweighted edge type '" + def.name + "'", rec.line);
  if (rec.weight) {
    if (!std::isfinite(*rec.weight)) throw LoadError("non-finite weight", rec.line);
    if (!def.weight_range->contains(*rec.weight))
      throw LoadError("weight " + text::format_double(*rec.weight) + " outside range [" +
                          text::format_double(def.weight_range->min) + "," +
                          text::format_double(def.weight_range->max) + "] of '" + def.name + "'",
                      rec.line);
  }
  NodeIndex s = add_node(g_.schema_.edge_src(*et), rec.src);
  NodeIndex d = add_node(g_.schema_.edge_dst(*et), rec.dst);
  add_edge(*et, s, d, rec.weight, rec.line);
}

void GraphBuilder::add_edge(TypeId et, NodeIndex src, NodeIndex dst, std::optional<double> weight,
                            std::size_t line) {
  ++report_.records;
  auto& list = g_.edges_.at(et);
  std::uint64_t key = (static_cast<std::uint64_t>(src) << 32) | dst;
  auto [it, inserted] = seen_[et].try_emplace(key, static_cast<EdgeId>(list.src.size()));
  if (!inserted) {
    if (opts_.duplicates == DuplicatePolicy::reject)
      throw LoadError("duplicate edge " + g_.schema_.edge_type(et).name + " " +
                          g_.nodes_[g_.schema_.edge_src(et)].ids[src] + " -> " +
                          g_.nodes_[g_.schema_.edge_dst(et)].ids[dst],
                      line);
    if (weight) list.weight[it->second] = *weight;
    ++report_.merged_duplicates;
    return;
  }
  list.src.push_back(src);
  list.dst.push_back(dst);
  if (weight) list.weight.push_back(*weight);
}

HeteroGraph GraphBuilder::build() && {
  seen_.clear();
  g_.build_indices();
  return std::move(g_);
}

HeteroGraph load_graph(const NetworkSchema& schema, std::span<const EdgeRecord> records, LoadOptions opts,
                       LoadReport* report) {
  GraphBuilder builder(schema, opts);
  for (const auto& rec : records) builder.add(rec);
  if (report) *report = builder.report();
  return std::move(builder).build();
}

std::vector<EdgeRecord> read_edge_list(std::istream& in, std::string_view edge_type) {
  std::vector<EdgeRecord> out;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (text::trim(line).empty()) continue;
    auto fields = text::split(line, '\t');
    if (fields.size() < 2 || fields.size() > 3)
      throw LoadError("expected 2 or 3 tab-separated fields, got " + std::to_string(fields.size()), lineno);
    EdgeRecord rec{std::string(edge_type), std::string(text::trim(fields[0])),
                   std::string(text::trim(fields[1])), std::nullopt, lineno};
    if (fields.size() == 3 && !text::trim(fields[2]).empty()) {
      auto w = text::parse_double(fields[2]);
      if (!w) throw LoadError("malformed weight '" + std::string(fields[2]) + "'", lineno);
      rec.weight = *w;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void write_edge_list(const HeteroGraph& g, TypeId et, std::ostream& out) {
  const TypeId st = g.schema().edge_src(et);
  const TypeId dt = g.schema().edge_dst(et);
  for (EdgeId id = 0; id < g.edge_count(et); ++id) {
    Edge e = g.edge(et, id);
    out << g.node_id(st, e.src.index) << '\t' << g.node_id(dt, e.dst.index);
    if (e.weight) out << '\t' << text::format_double(*e.weight);
    out << '\n';
  }
}

void write_node_map(const HeteroGraph& g, std::ostream& out) {
  for (TypeId t = 0; t < g.schema().node_type_count(); ++t) {
    const auto& name = g.schema().node_type(t).name;
    for (NodeIndex i = 0; i < g.node_count(t); ++i) out << name << '\t' << i << '\t' << g.node_id(t, i) << '\n';
  }
}

}  // namespace hinrec
