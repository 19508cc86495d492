#include "hinrec/metapath.hpp"

#include "hinrec/text.hpp"

namespace hinrec {

MetaPath MetaPath::parse(std::string_view literal) {
  MetaPath mp;
  std::string_view body = text::trim(literal);
  if (auto colon = body.find(':'); colon != std::string_view::npos) {
    mp.label = std::string(text::trim(body.substr(0, colon)));
    if (mp.label.empty()) throw MetaPathError(MetaPathError::Kind::syntax, 0, "empty meta-path label");
    body = body.substr(colon + 1);
  }
  if (text::trim(body).empty()) throw MetaPathError(MetaPathError::Kind::empty, 0, "empty meta-path");
  std::size_t i = 0;
  for (auto part : text::split(body, ',')) {
    ++i;
    part = text::trim(part);
    MetaPathStep step;
    if (!part.empty() && (part.front() == '>' || part.front() == '<')) {
      step.direction = part.front() == '>' ? Direction::forward : Direction::reverse;
      part = text::trim(part.substr(1));
    }
    if (part.empty())
      throw MetaPathError(MetaPathError::Kind::syntax, i, "meta-path step " + std::to_string(i) + " is empty");
    step.edge_type = std::string(part);
    mp.steps.push_back(std::move(step));
  }
  return mp;
}

std::string MetaPath::to_literal() const {
  std::string out;
  if (!label.empty()) out += label + ": ";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out += ',';
    if (steps[i].direction == Direction::reverse) out += '<';
    else if (i) out += '>';
    out += steps[i].edge_type;
  }
  return out;
}

namespace {

// Shared by validate/resolve so both report identical errors.
ResolvedMetaPath resolve_impl(const MetaPath& mp, const NetworkSchema& schema, std::size_t max_steps) {
  using Kind = MetaPathError::Kind;
  if (mp.steps.empty()) throw MetaPathError(Kind::empty, 0, "meta-path has no steps");
  if (mp.steps.size() > max_steps)
    throw MetaPathError(Kind::too_long, max_steps + 1,
                        "meta-path has " + std::to_string(mp.steps.size()) + " steps; at most " +
                            std::to_string(max_steps) + " allowed");
  ResolvedMetaPath out;
  for (std::size_t i = 0; i < mp.steps.size(); ++i) {
    const auto& step = mp.steps[i];
    auto et = schema.find_edge_type(step.edge_type);
    if (!et)
      throw MetaPathError(Kind::unknown_edge_type, i + 1,
                          "step " + std::to_string(i + 1) + ": unknown edge type '" + step.edge_type + "'");
    ResolvedStep rs;
    rs.edge_type = *et;
    rs.direction = step.direction;
    const bool fwd = step.direction == Direction::forward;
    rs.from = fwd ? schema.edge_src(*et) : schema.edge_dst(*et);
    rs.to = fwd ? schema.edge_dst(*et) : schema.edge_src(*et);
    rs.weighted = schema.edge_type(*et).weighted();
    if (i > 0 && out.steps.back().to != rs.from)
      throw MetaPathError(Kind::type_mismatch, i + 1,
                          "step " + std::to_string(i + 1) + ": type mismatch, path is at '" +
                              schema.node_type(out.steps.back().to).name + "' but '" + step.edge_type +
                              "' leaves from '" + schema.node_type(rs.from).name + "'");
    out.steps.push_back(rs);
  }
  out.label = mp.label;
  if (out.label.empty()) {
    out.label = schema.node_type(out.steps.front().from).abbrev;
    for (const auto& s : out.steps) out.label += schema.node_type(s.to).abbrev;
  }
  return out;
}

}  // namespace

std::optional<MetaPathError> validate_metapath(const MetaPath& mp, const NetworkSchema& schema,
                                               std::size_t max_steps) {
  try {
    resolve_impl(mp, schema, max_steps);
  } catch (const MetaPathError& e) {
    return e;
  }
  return std::nullopt;
}

ResolvedMetaPath resolve_metapath(const MetaPath& mp, const NetworkSchema& schema, std::size_t max_steps) {
  return resolve_impl(mp, schema, max_steps);
}

}  // namespace hinrec
