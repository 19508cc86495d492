#include "hinrec/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "hinrec/error.hpp"
#include "hinrec/text.hpp"

namespace hinrec {

NigScore nig(const RelationMatrix& r) {
  if (r.empty()) throw Error("nig: relation '" + r.label() + "' is empty");
  NigScore out{r.label(), 0.0, false};
  if (r.dst_universe() < 2) {
    out.degenerate = true;
    return out;
  }
  const double log_nd = std::log(static_cast<double>(r.dst_universe()));
  double sum = 0;
  std::size_t rows = 0;
  for (NodeIndex s = 0; s < r.src_universe(); ++s) {
    auto row = r.row(s);
    if (row.empty()) continue;
    ++rows;
    if (row.size() == 1) continue;
    double total = 0;
    for (const auto& e : row) total += e.count;
    double h = 0;
    for (const auto& e : row) {
      const double p = e.count / total;
      h -= p * std::log(p);
    }
    sum += h / log_nd;
  }
  out.value = std::clamp(1.0 - sum / static_cast<double>(rows), 0.0, 1.0);
  return out;
}

PruneResult prune_relations(std::vector<RelationMatrix> rels, const PruningPolicy& policy,
                            std::string_view target_label) {
  if (rels.empty()) throw ConfigError("prune_relations: no relations given");
  if (policy.kind == PruningPolicy::Kind::threshold && !(policy.tau >= 0.0 && policy.tau <= 1.0))
    throw ConfigError("pruning threshold must lie in [0,1]");
  if (policy.kind == PruningPolicy::Kind::top_m && policy.m < 1) throw ConfigError("top-m pruning needs m >= 1");

  std::sort(rels.begin(), rels.end(), [](const auto& a, const auto& b) { return a.label() < b.label(); });
  std::vector<PruneDecision> report;
  for (const auto& r : rels) {
    auto s = nig(r);
    report.push_back({r.label(), s.value, false, r.label() == target_label, s.degenerate});
  }

  if (policy.kind == PruningPolicy::Kind::threshold) {
    for (auto& d : report) d.kept = d.is_target || d.score >= policy.tau;
  } else {
    std::vector<std::size_t> order(report.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return report[a].score != report[b].score ? report[a].score > report[b].score
                                                : report[a].label < report[b].label;
    });
    std::size_t kept = 0;
    for (std::size_t i : order) {
      if (report[i].is_target) {
        report[i].kept = true;
      } else if (kept < policy.m) {
        report[i].kept = true;
        ++kept;
      }
    }
  }

  PruneResult out;
  for (std::size_t i = 0; i < rels.size(); ++i)
    if (report[i].kept) out.retained.push_back(std::move(rels[i]));
  out.report = std::move(report);
  return out;
}

void write_nig_report(const std::vector<PruneDecision>& report, std::ostream& out) {
  for (const auto& d : report)
    out << d.label << '\t' << text::format_double(d.score) << '\t' << (d.kept ? "kept" : "pruned") << '\n';
}

}  // namespace hinrec
