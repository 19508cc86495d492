#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hinrec/graph.hpp"

namespace hinrec {

enum class GenerationMethod { direct, full, sampled };

const char* to_string(GenerationMethod m) noexcept;
GenerationMethod parse_generation_method(std::string_view s);

/// Where a relation came from; written into every relation file header.
struct Provenance {
  std::string label;
  GenerationMethod method = GenerationMethod::full;
  std::uint64_t walks_per_start = 0;
  std::uint64_t max_retries = 0;
  std::uint64_t seed = 0;
  std::uint64_t completed_walks = 0;
  /// Walks abandoned after exhausting their retries.
  std::uint64_t failed_walks = 0;
  /// Individual walk attempts that hit a node without the required edge.
  std::uint64_t dead_ends = 0;
  /// Which edge set the relation was derived from, e.g. "train:fold=2".
  std::string source = "graph";

  bool operator==(const Provenance&) const = default;
};

struct RelationEntry {
  NodeIndex src = 0;
  NodeIndex dst = 0;
  double count = 0;
  bool operator==(const RelationEntry&) const = default;
};

/// Sparse (source entity, destination entity) -> positive count, stored row
/// major and sorted by (src, dst).
class RelationMatrix {
 public:
  RelationMatrix() = default;
  /// Entries may arrive in any order; duplicates are summed. Non-positive or
  /// out-of-universe entries throw.
  RelationMatrix(std::string src_type, std::string dst_type, std::size_t src_universe,
                 std::size_t dst_universe, std::vector<RelationEntry> entries, Provenance prov);

  /// Fast path for kernels that already emit sorted, merged rows.
  static RelationMatrix from_sorted(std::string src_type, std::string dst_type, std::size_t src_universe,
                                    std::size_t dst_universe, std::vector<RelationEntry> entries,
                                    Provenance prov);

  const std::string& src_type() const noexcept { return src_type_; }
  const std::string& dst_type() const noexcept { return dst_type_; }
  std::size_t src_universe() const noexcept { return src_universe_; }
  std::size_t dst_universe() const noexcept { return dst_universe_; }
  const std::string& label() const noexcept { return prov_.label; }

  std::span<const RelationEntry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::span<const RelationEntry> row(NodeIndex src) const noexcept {
    return {entries_.data() + row_offsets_[src], row_offsets_[src + 1] - row_offsets_[src]};
  }
  double get(NodeIndex src, NodeIndex dst) const noexcept;
  bool contains(NodeIndex src, NodeIndex dst) const noexcept { return get(src, dst) > 0; }
  std::size_t nonempty_rows() const noexcept;
  double total() const noexcept;

  const Provenance& provenance() const noexcept { return prov_; }
  Provenance& provenance() noexcept { return prov_; }

  /// Counts divided by walks-per-start for sampled relations, by the row
  /// total otherwise.
  RelationMatrix row_normalized() const;

  bool operator==(const RelationMatrix& o) const {
    return src_type_ == o.src_type_ && dst_type_ == o.dst_type_ && src_universe_ == o.src_universe_ &&
           dst_universe_ == o.dst_universe_ && entries_ == o.entries_ && prov_ == o.prov_;
  }

 private:
  void build_offsets();

  std::string src_type_;
  std::string dst_type_;
  std::size_t src_universe_ = 0;
  std::size_t dst_universe_ = 0;
  std::vector<RelationEntry> entries_;
  std::vector<std::size_t> row_offsets_{0};
  Provenance prov_;
};

/// Relation of a single edge type, one entry of count 1 per edge.
RelationMatrix direct_relation(const HeteroGraph& g, TypeId et, std::string source = "graph");

/// Header lines (`# key<TAB>value`) followed by `src_id<TAB>dst_id<TAB>count`.
void write_relation(const RelationMatrix& r, const HeteroGraph& g, std::ostream& out);
/// Ids are resolved against `g`; throws LoadError on unknown ids.
RelationMatrix read_relation(std::istream& in, const HeteroGraph& g);

}  // namespace hinrec
