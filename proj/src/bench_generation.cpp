#include "hinrec/bench_generation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "hinrec/error.hpp"
#include "hinrec/text.hpp"

namespace hinrec {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <class Fn>
double time_ms(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

TimingReport bench_generation(const HeteroGraph& g, std::span<const ResolvedMetaPath> metapaths,
                              std::span<const NodeIndex> starts_in, const SampleBudget& budget, std::uint64_t seed,
                              std::size_t repetitions, ExpandOptions expand) {
  if (repetitions < 3) throw ConfigError("bench_generation needs at least 3 repetitions");
  expand.workers = 1;
  const ParallelOptions serial{1};
  TimingReport report;
  report.repetitions = repetitions;

  for (const auto& mp : metapaths) {
    std::vector<NodeIndex> starts(starts_in.begin(), starts_in.end());
    if (starts.empty()) starts = all_starts(g, mp);
    report.starts = std::max(report.starts, starts.size());

    TimingRow full;
    full.metapath = mp.label;
    full.method = GenerationMethod::full;
    try {
      (void)expand_full(g, mp, starts, expand);  // warm-up
      for (std::size_t r = 0; r < repetitions; ++r) {
        double paths = 0;
        full.rep_ms.push_back(time_ms([&] { paths = expand_full(g, mp, starts, expand).total(); }));
        full.rep_counts.push_back(static_cast<std::uint64_t>(paths));
      }
      full.median_ms = median(full.rep_ms);
      full.count = full.rep_counts.front();
    } catch (const SizeCapError&) {
      full.capped = true;
      full.median_ms = std::numeric_limits<double>::quiet_NaN();
      full.ratio = std::numeric_limits<double>::quiet_NaN();
    }

    TimingRow sampled;
    sampled.metapath = mp.label;
    sampled.method = GenerationMethod::sampled;
    (void)sample_relation(g, mp, starts, budget, seed, serial);  // warm-up
    for (std::size_t r = 0; r < repetitions; ++r) {
      Provenance prov;
      sampled.rep_ms.push_back(
          time_ms([&] { prov = sample_relation(g, mp, starts, budget, seed, serial).provenance(); }));
      sampled.rep_counts.push_back(prov.completed_walks);
      sampled.failures = prov.failed_walks;
    }
    sampled.median_ms = median(sampled.rep_ms);
    sampled.count = sampled.rep_counts.front();
    sampled.ratio = full.capped ? std::numeric_limits<double>::quiet_NaN() : sampled.median_ms / full.median_ms;

    report.rows.push_back(std::move(full));
    report.rows.push_back(std::move(sampled));
  }
  return report;
}

void write_timing_csv(const TimingReport& report, std::ostream& out) {
  out << "# threads=1 repetitions=" << report.repetitions << " warmup=1 starts=" << report.starts
      << " clock=steady_clock\n";
  out << "metapath,method,median_ms,count,ratio\n";
  auto num = [](double v) { return std::isnan(v) ? std::string("NA") : text::format_double(v); };
  for (const auto& r : report.rows) {
    out << r.metapath << ',' << to_string(r.method) << ',' << (r.capped ? std::string("capped") : num(r.median_ms))
        << ',' << r.count << ',' << num(r.ratio) << '\n';
  }
}

}  // namespace hinrec
