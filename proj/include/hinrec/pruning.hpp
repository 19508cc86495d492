#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hinrec/relation.hpp"

namespace hinrec {

struct NigScore {
  std::string label;
  double value = 0;
  /// Destination universe smaller than two: the score is pinned to 0.
  bool degenerate = false;
};

/// Normalized information gain of a relation, used as a specificity score:
///
///   nig = 1 - mean_u H(p_u) / log(N_d)
///
/// over non-empty rows u, where p_u is the row's count distribution and N_d
/// the size of the destination entity universe. A relation whose rows each
/// reach one destination scores 1; rows spread uniformly over every
/// destination score 0. Throws Error on an empty relation.
NigScore nig(const RelationMatrix& r);

struct PruningPolicy {
  enum class Kind { threshold, top_m };
  Kind kind = Kind::threshold;
  double tau = 0.1;
  std::size_t m = 1;

  static PruningPolicy threshold(double tau) { return {Kind::threshold, tau, 1}; }
  static PruningPolicy top(std::size_t m) { return {Kind::top_m, 0.1, m}; }
};

struct PruneDecision {
  std::string label;
  double score = 0;
  bool kept = false;
  bool is_target = false;
  bool degenerate = false;
};

struct PruneResult {
  /// Kept relations ordered by label.
  std::vector<RelationMatrix> retained;
  /// One row per input relation, ordered by label.
  std::vector<PruneDecision> report;
};

/// Threshold keeps relations with nig >= tau; top-m keeps the m best
/// non-target relations (ties broken by label). The relation labelled
/// `target_label` is always kept. Throws ConfigError for tau outside [0,1],
/// m < 1 or an empty input.
PruneResult prune_relations(std::vector<RelationMatrix> rels, const PruningPolicy& policy,
                            std::string_view target_label = {});

/// `label<TAB>score<TAB>kept|pruned` lines.
void write_nig_report(const std::vector<PruneDecision>& report, std::ostream& out);

}  // namespace hinrec
