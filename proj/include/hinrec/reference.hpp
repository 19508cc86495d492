#pragma once

// Serial, deliberately plain versions of the parallel kernels. They are kept
// as the yardstick the OpenMP kernels are tested and benchmarked against.

#include <cstdint>
#include <span>

#include "hinrec/graph.hpp"
#include "hinrec/metapath.hpp"
#include "hinrec/relation.hpp"
#include "hinrec/sampling.hpp"

namespace hinrec::reference {

/// Depth-first enumeration of every conforming path, one at a time.
RelationMatrix expand_full(const HeteroGraph& g, const ResolvedMetaPath& mp, std::span<const NodeIndex> starts);

/// Start-by-start loop over sample_walk with the same per-start streams as
/// hinrec::sample_relation.
RelationMatrix sample_relation(const HeteroGraph& g, const ResolvedMetaPath& mp, std::span<const NodeIndex> starts,
                               const SampleBudget& budget, std::uint64_t seed);

}  // namespace hinrec::reference
