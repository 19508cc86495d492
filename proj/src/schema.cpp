#include "hinrec/schema.hpp"

#include <istream>
#include <sstream>

#include "hinrec/error.hpp"
#include "hinrec/text.hpp"

namespace hinrec {

TypeId NetworkSchema::add_node_type(std::string name, std::string abbrev) {
  if (name.empty()) throw ConfigError("node type name must be non-empty");
  if (find_node_type(name)) throw ConfigError("duplicate node type '" + name + "'");
  if (abbrev.empty()) abbrev = name.substr(0, 1);
  node_types_.push_back({std::move(name), std::move(abbrev)});
  return static_cast<TypeId>(node_types_.size() - 1);
}

TypeId NetworkSchema::add_edge_type(EdgeTypeDef def) {
  if (def.name.empty()) throw ConfigError("edge type name must be non-empty");
  if (find_edge_type(def.name)) throw ConfigError("duplicate edge type '" + def.name + "'");
  auto src = find_node_type(def.src);
  auto dst = find_node_type(def.dst);
  if (!src) throw ConfigError("edge type '" + def.name + "': undeclared node type '" + def.src + "'");
  if (!dst) throw ConfigError("edge type '" + def.name + "': undeclared node type '" + def.dst + "'");
  if (def.weight_range && !(def.weight_range->min <= def.weight_range->max))
    throw ConfigError("edge type '" + def.name + "': empty weight range");
  edge_types_.push_back(std::move(def));
  edge_src_.push_back(*src);
  edge_dst_.push_back(*dst);
  return static_cast<TypeId>(edge_types_.size() - 1);
}

std::optional<TypeId> NetworkSchema::find_node_type(std::string_view name) const {
  for (std::size_t i = 0; i < node_types_.size(); ++i)
    if (node_types_[i].name == name) return static_cast<TypeId>(i);
  return std::nullopt;
}

std::optional<TypeId> NetworkSchema::find_edge_type(std::string_view name) const {
  for (std::size_t i = 0; i < edge_types_.size(); ++i)
    if (edge_types_[i].name == name) return static_cast<TypeId>(i);
  return std::nullopt;
}

TypeId NetworkSchema::node_type_id(std::string_view name) const {
  if (auto t = find_node_type(name)) return *t;
  throw LookupError("unknown node type '" + std::string(name) + "'");
}

TypeId NetworkSchema::edge_type_id(std::string_view name) const {
  if (auto t = find_edge_type(name)) return *t;
  throw LookupError("unknown edge type '" + std::string(name) + "'");
}

namespace {

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

WeightRange parse_weighted(std::string_view tok, std::size_t lineno) {
  // weighted(min,max)
  constexpr std::string_view head = "weighted(";
  if (tok.substr(0, head.size()) != head || tok.back() != ')')
    throw ConfigError("schema line " + std::to_string(lineno) + ": expected weighted(min,max)");
  auto inner = tok.substr(head.size(), tok.size() - head.size() - 1);
  auto parts = text::split(inner, ',');
  if (parts.size() != 2)
    throw ConfigError("schema line " + std::to_string(lineno) + ": expected weighted(min,max)");
  auto lo = text::parse_double(parts[0]);
  auto hi = text::parse_double(parts[1]);
  if (!lo || !hi)
    throw ConfigError("schema line " + std::to_string(lineno) + ": non-numeric weight bound");
  return {*lo, *hi};
}

}  // namespace

NetworkSchema NetworkSchema::parse(std::istream& in) {
  NetworkSchema schema;
  enum class Section { none, nodes, edges } section = Section::none;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    if (line == "[nodes]") {
      section = Section::nodes;
      continue;
    }
    if (line == "[edges]") {
      section = Section::edges;
      continue;
    }
    auto tok = tokens(line);
    try {
      switch (section) {
        case Section::none:
          throw ConfigError("schema line " + std::to_string(lineno) + ": entry outside [nodes]/[edges]");
        case Section::nodes:
          if (tok.size() > 2)
            throw ConfigError("schema line " + std::to_string(lineno) + ": expected 'name [abbrev]'");
          schema.add_node_type(std::string(tok[0]), tok.size() == 2 ? std::string(tok[1]) : std::string{});
          break;
        case Section::edges: {
          if (tok.size() != 3 && tok.size() != 4)
            throw ConfigError("schema line " + std::to_string(lineno) +
                              ": expected 'name src dst [weighted(min,max)]'");
          EdgeTypeDef def{std::string(tok[0]), std::string(tok[1]), std::string(tok[2]), std::nullopt};
          if (tok.size() == 4) def.weight_range = parse_weighted(tok[3], lineno);
          schema.add_edge_type(std::move(def));
          break;
        }
      }
    } catch (const ConfigError& e) {
      std::string msg = e.what();
      if (msg.rfind("schema line", 0) == 0) throw;
      throw ConfigError("schema line " + std::to_string(lineno) + ": " + msg);
    }
  }
  return schema;
}

NetworkSchema NetworkSchema::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse(in);
}

std::string NetworkSchema::to_text() const {
  std::ostringstream out;
  out << "[nodes]\n";
  for (const auto& n : node_types_) {
    out << n.name;
    if (n.abbrev != n.name.substr(0, 1)) out << ' ' << n.abbrev;
    out << '\n';
  }
  out << "[edges]\n";
  for (const auto& e : edge_types_) {
    out << e.name << ' ' << e.src << ' ' << e.dst;
    if (e.weight_range)
      out << " weighted(" << text::format_double(e.weight_range->min) << ','
          << text::format_double(e.weight_range->max) << ')';
    out << '\n';
  }
  return out.str();
}

}  // namespace hinrec
