#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hinrec/error.hpp"
#include "hinrec/graph.hpp"
#include "hinrec/schema.hpp"

namespace hinrec {

struct MetaPathStep {
  std::string edge_type;
  Direction direction = Direction::forward;
  bool operator==(const MetaPathStep&) const = default;
};

/// A typed path pattern, e.g. user -um-> movie -mg-> genre <-mg- movie.
///
/// Literal syntax: comma-separated steps, each an edge type name optionally
/// prefixed by `>` (forward, the default) or `<` (reverse). An optional
/// `label:` prefix names the path; otherwise the label is derived from the
/// node type abbreviations when the path is resolved.
///
///     um,>mg,<mg          -> label "umgm"
///     ubh: ub,>bh         -> label "ubh"
struct MetaPath {
  std::vector<MetaPathStep> steps;
  std::string label;

  /// Throws MetaPathError(kind=syntax) on malformed literals.
  static MetaPath parse(std::string_view literal);
  std::string to_literal() const;
};

struct ResolvedStep {
  TypeId edge_type = 0;
  Direction direction = Direction::forward;
  TypeId from = 0;
  TypeId to = 0;
  bool weighted = false;
};

/// A meta-path bound to a schema: edge types resolved to ids and the node
/// type sequence checked.
struct ResolvedMetaPath {
  std::string label;
  std::vector<ResolvedStep> steps;

  TypeId source_type() const { return steps.front().from; }
  TypeId target_type() const { return steps.back().to; }
  std::size_t length() const noexcept { return steps.size(); }
};

constexpr std::size_t kDefaultMaxSteps = 3;

/// nullopt when `mp` type-checks against `schema`, else the first problem.
std::optional<MetaPathError> validate_metapath(const MetaPath& mp, const NetworkSchema& schema,
                                               std::size_t max_steps = kDefaultMaxSteps);

/// Validates and resolves; throws the error validate_metapath would report.
ResolvedMetaPath resolve_metapath(const MetaPath& mp, const NetworkSchema& schema,
                                  std::size_t max_steps = kDefaultMaxSteps);

/// Ordered node sequence produced by one sampled walk.
struct Walk {
  std::string label;
  std::vector<NodeHandle> nodes;
};

}  // namespace hinrec
