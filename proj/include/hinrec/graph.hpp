#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hinrec/schema.hpp"

namespace hinrec {

/// Dense index of a node within its node type.
using NodeIndex = std::uint32_t;
/// Dense index of an edge within its edge type (insertion order).
using EdgeId = std::uint32_t;

/// External name of a node: its type and opaque identifier.
struct NodeRef {
  std::string type;
  std::string id;
  bool operator==(const NodeRef&) const = default;
};

struct NodeHandle {
  TypeId type = 0;
  NodeIndex index = 0;
  bool operator==(const NodeHandle&) const = default;
};

struct Edge {
  TypeId edge_type = 0;
  EdgeId id = 0;
  NodeHandle src;
  NodeHandle dst;
  std::optional<double> weight;
  bool operator==(const Edge&) const = default;
};

/// One input row before ingestion. `line` is 1-based, 0 when not from a file.
struct EdgeRecord {
  std::string edge_type;
  std::string src;
  std::string dst;
  std::optional<double> weight;
  std::size_t line = 0;
};

enum class DuplicatePolicy { reject, keep_last };

struct LoadOptions {
  DuplicatePolicy duplicates = DuplicatePolicy::reject;
};

struct LoadReport {
  std::size_t records = 0;
  std::size_t merged_duplicates = 0;
};

/// CSR adjacency of one edge type in one direction, rows indexed by the
/// node type the traversal leaves from. Within a row edges keep insertion
/// order.
struct Adjacency {
  std::vector<std::size_t> offsets;
  std::vector<EdgeId> edges;
  std::vector<NodeIndex> targets;
  std::vector<double> weights;  // empty for unweighted edge types

  std::size_t rows() const noexcept { return offsets.empty() ? 0 : offsets.size() - 1; }
  std::size_t degree(NodeIndex n) const noexcept { return offsets[n + 1] - offsets[n]; }
  std::span<const NodeIndex> targets_of(NodeIndex n) const noexcept {
    return {targets.data() + offsets[n], degree(n)};
  }
  std::span<const double> weights_of(NodeIndex n) const noexcept {
    return {weights.data() + offsets[n], degree(n)};
  }
  std::span<const EdgeId> edges_of(NodeIndex n) const noexcept {
    return {edges.data() + offsets[n], degree(n)};
  }
};

/// Typed heterogeneous graph. Built once through GraphBuilder and immutable
/// afterwards, so concurrent read-only traversal needs no synchronisation.
class HeteroGraph {
 public:
  HeteroGraph() = default;

  const NetworkSchema& schema() const noexcept { return schema_; }

  std::size_t node_count(TypeId t) const { return nodes_.at(t).ids.size(); }
  std::size_t total_nodes() const noexcept;
  const std::string& node_id(TypeId t, NodeIndex i) const { return nodes_.at(t).ids.at(i); }
  std::span<const std::string> node_ids(TypeId t) const { return nodes_.at(t).ids; }
  std::optional<NodeIndex> find_node(TypeId t, std::string_view id) const;

  /// Throws LookupError for an unknown type or id.
  NodeHandle handle(const NodeRef& ref) const;
  NodeRef ref(NodeHandle h) const;

  std::size_t edge_count(TypeId et) const { return edges_.at(et).src.size(); }
  std::size_t total_edges() const noexcept;
  Edge edge(TypeId et, EdgeId id) const;

  const Adjacency& adjacency(TypeId et, Direction dir) const {
    return dir == Direction::forward ? fwd_.at(et) : rev_.at(et);
  }

  /// Every edge of type `et` leaving `n` (forward) or entering it (reverse),
  /// in insertion order. Throws LookupError for unknown node or edge type.
  std::vector<Edge> get_edges(NodeHandle n, TypeId et, Direction dir) const;
  std::vector<Edge> get_edges(const NodeRef& n, std::string_view et, Direction dir) const;

  std::size_t degree(NodeHandle n, TypeId et, Direction dir) const;
  std::size_t degree(const NodeRef& n, std::string_view et, Direction dir) const;

  /// Copy with identical node tables in which edge type `et` keeps only the
  /// edges whose id is flagged in `keep`. Node indices stay stable.
  HeteroGraph with_edge_subset(TypeId et, const std::vector<bool>& keep) const;

 private:
  friend class GraphBuilder;

  struct NodeTable {
    std::vector<std::string> ids;
    std::unordered_map<std::string, NodeIndex> index;
  };
  struct EdgeList {
    std::vector<NodeIndex> src;
    std::vector<NodeIndex> dst;
    std::vector<double> weight;  // empty for unweighted edge types
  };

  void check_handle(NodeHandle h, TypeId et, Direction dir) const;
  void build_indices();

  NetworkSchema schema_;
  std::vector<NodeTable> nodes_;
  std::vector<EdgeList> edges_;
  std::vector<Adjacency> fwd_;
  std::vector<Adjacency> rev_;
};

/// Validating, mutable front end used while loading. `build()` freezes.
class GraphBuilder {
 public:
  explicit GraphBuilder(NetworkSchema schema, LoadOptions opts = {});

  NodeIndex add_node(TypeId type, std::string_view id);
  /// Validates the record against the schema; throws LoadError.
  void add(const EdgeRecord& rec);
  void add_edge(TypeId et, NodeIndex src, NodeIndex dst, std::optional<double> weight,
                std::size_t line = 0);

  const LoadReport& report() const noexcept { return report_; }
  HeteroGraph build() &&;

 private:
  HeteroGraph g_;
  LoadOptions opts_;
  LoadReport report_;
  std::vector<std::unordered_map<std::uint64_t, EdgeId>> seen_;
};

/// Builds a graph containing exactly `records`; nodes are created from edge
/// endpoints in first-appearance order.
HeteroGraph load_graph(const NetworkSchema& schema, std::span<const EdgeRecord> records,
                       LoadOptions opts = {}, LoadReport* report = nullptr);

/// Reads `src<TAB>dst[<TAB>weight]` lines; `#` starts a comment.
std::vector<EdgeRecord> read_edge_list(std::istream& in, std::string_view edge_type);
/// Canonical form: insertion order, shortest round-trip weights.
void write_edge_list(const HeteroGraph& g, TypeId et, std::ostream& out);
/// `type<TAB>index<TAB>id` for every node.
void write_node_map(const HeteroGraph& g, std::ostream& out);

/// Iteratively drops nodes of either endpoint type of `et` whose degree
/// under `et` is below `k`, together with all their incident edges, until
/// no such node is left. Nodes left without any edge are dropped as well.
HeteroGraph k_core_filter(const HeteroGraph& g, std::string_view et, std::size_t k);

}  // namespace hinrec
