#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hinrec/expansion.hpp"
#include "hinrec/metapath.hpp"
#include "hinrec/sampling.hpp"

namespace hinrec {

struct TimingRow {
  std::string metapath;
  GenerationMethod method = GenerationMethod::full;
  double median_ms = 0;
  /// Paths for full expansion, completed walks for sampling.
  std::uint64_t count = 0;
  std::uint64_t failures = 0;
  /// sampled / full median time; 1 on full rows, NaN when full was capped.
  double ratio = 1;
  /// Full expansion refused by the size cap; no timing recorded.
  bool capped = false;
  std::vector<double> rep_ms;
  std::vector<std::uint64_t> rep_counts;
};

struct TimingReport {
  std::vector<TimingRow> rows;
  std::size_t repetitions = 0;
  std::size_t starts = 0;
};

/// Times expand_full against sample_relation for each meta-path on one
/// thread: one untimed warm-up, then `repetitions` timed runs, reporting the
/// median. Throws ConfigError when repetitions < 3. Empty `starts` means all
/// nodes of each path's source type.
TimingReport bench_generation(const HeteroGraph& g, std::span<const ResolvedMetaPath> metapaths,
                              std::span<const NodeIndex> starts, const SampleBudget& budget, std::uint64_t seed,
                              std::size_t repetitions, ExpandOptions expand = {});

/// `metapath,method,median_ms,count,ratio`, preceded by `#` environment lines.
void write_timing_csv(const TimingReport& report, std::ostream& out);

}  // namespace hinrec
