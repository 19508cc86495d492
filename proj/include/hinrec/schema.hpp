#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hinrec {

using TypeId = std::uint32_t;

enum class Direction : std::uint8_t { forward, reverse };

struct WeightRange {
  double min = 0;
  double max = 0;
  bool contains(double w) const noexcept { return w >= min && w <= max; }
};

struct NodeTypeDef {
  std::string name;
  /// Letter(s) used when deriving meta-path labels ("umgm"). Defaults to the
  /// first character of the name.
  std::string abbrev;
};

struct EdgeTypeDef {
  std::string name;
  std::string src;
  std::string dst;
  std::optional<WeightRange> weight_range;  // present iff the edge is weighted

  bool weighted() const noexcept { return weight_range.has_value(); }
};

/// Node and edge types of a heterogeneous network. Types are addressed by
/// dense ids in declaration order.
class NetworkSchema {
 public:
  TypeId add_node_type(std::string name, std::string abbrev = {});
  TypeId add_edge_type(EdgeTypeDef def);

  std::size_t node_type_count() const noexcept { return node_types_.size(); }
  std::size_t edge_type_count() const noexcept { return edge_types_.size(); }

  const NodeTypeDef& node_type(TypeId t) const { return node_types_.at(t); }
  const EdgeTypeDef& edge_type(TypeId t) const { return edge_types_.at(t); }

  std::optional<TypeId> find_node_type(std::string_view name) const;
  std::optional<TypeId> find_edge_type(std::string_view name) const;
  /// Throws LookupError for unknown names.
  TypeId node_type_id(std::string_view name) const;
  TypeId edge_type_id(std::string_view name) const;

  TypeId edge_src(TypeId et) const { return edge_src_.at(et); }
  TypeId edge_dst(TypeId et) const { return edge_dst_.at(et); }

  /// Parses the `[nodes]` / `[edges]` text format; throws ConfigError.
  static NetworkSchema parse(std::istream& in);
  static NetworkSchema parse(std::string_view text);
  std::string to_text() const;

 private:
  std::vector<NodeTypeDef> node_types_;
  std::vector<EdgeTypeDef> edge_types_;
  std::vector<TypeId> edge_src_;
  std::vector<TypeId> edge_dst_;
};

}  // namespace hinrec
