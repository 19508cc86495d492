#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hinrec/graph.hpp"
#include "hinrec/metapath.hpp"
#include "hinrec/relation.hpp"
#include "hinrec/sampling.hpp"

namespace hinrec {

struct ExpandOptions {
  /// Abort when the projected number of relation entries exceeds this.
  double entry_cap = 2e8;
  int workers = 0;
};

/// Number of typed paths leaving every node of the path's source type,
/// computed by a backward pass over the steps (weights ignored).
std::vector<double> path_counts(const HeteroGraph& g, const ResolvedMetaPath& mp);

/// Upper bound on the entries expand_full would produce for `starts`.
double projected_entries(const HeteroGraph& g, const ResolvedMetaPath& mp, std::span<const NodeIndex> starts);

/// Exact breadth-first expansion: entry (s, d) is the number of distinct
/// paths from s to d conforming to `mp`. A destination reached by several
/// paths counts once per path. Throws SizeCapError before doing any work when
/// the projection exceeds `opts.entry_cap`.
RelationMatrix expand_full(const HeteroGraph& g, const ResolvedMetaPath& mp, std::span<const NodeIndex> starts,
                           ExpandOptions opts = {});

/// All nodes of the meta-path's source type.
std::vector<NodeIndex> all_starts(const HeteroGraph& g, const ResolvedMetaPath& mp);

}  // namespace hinrec
