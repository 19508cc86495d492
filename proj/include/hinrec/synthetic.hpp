#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hinrec/graph.hpp"
#include "hinrec/metapath.hpp"
#include "hinrec/schema.hpp"

namespace hinrec {

struct SyntheticNodeSpec {
  std::string name;
  std::string abbrev;
  std::size_t count = 0;
};

enum class RatingDist { uniform, point };

struct SyntheticEdgeSpec {
  std::string name;
  std::string src;
  std::string dst;
  /// Rating edges are weighted and follow the planted preference structure;
  /// attribute edges are unweighted.
  bool rating = false;
  /// Distinct destinations per source node (ratings per user, or branching).
  std::size_t per_src = 1;
  WeightRange range{1, 5};
  RatingDist dist = RatingDist::uniform;
  double point = 5;
  /// Attribute edge whose first destination is the planted group of the
  /// source item, so it carries the same signal as the ratings.
  bool aligned = false;
};

/// Preference structure planted into rating edges.
///  - blocks: user u and item i belong to group (index mod blocks).
///  - ring: users and items get random angles; a user's group neighbourhood is
///    every item within ring_width * pi of its own angle. Scores of the form
///    cos(theta_u - theta_i) make this an exactly rank-2 preference.
enum class Planted { none, blocks, ring };

struct SyntheticSpec {
  std::vector<SyntheticNodeSpec> nodes;
  std::vector<SyntheticEdgeSpec> edges;
  Planted planted = Planted::none;
  std::size_t blocks = 2;
  /// Probability that a rating is drawn from the user's own group.
  double in_group_prob = 0.9;
  /// Added to in-group ratings (clamped to the range).
  double shift = 1.0;
  double ring_width = 0.15;
  std::uint64_t seed = 1;
  /// Copied into the generated config template.
  std::vector<MetaPath> metapaths;

  /// Throws ConfigError on zero counts, unknown types or branching larger
  /// than the destination universe.
  void validate() const;
  /// INI form: [synth], [nodes] (`name = count [abbrev]`), one [edge.NAME]
  /// section per edge type, optional [metapaths].
  static SyntheticSpec parse(std::istream& in);
};

/// Built-in shapes: "movielens", "ring", "timing-high", "timing-low".
SyntheticSpec synthetic_preset(std::string_view name);

struct SyntheticData {
  NetworkSchema schema;
  std::vector<EdgeRecord> records;
  /// Planted group per node of the rating source and destination types;
  /// empty without planted structure.
  std::vector<std::size_t> user_group;
  std::vector<std::size_t> item_group;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// Writes schema.txt, one `<edge>.tsv` per edge type and experiment.ini.
void write_synthetic(const SyntheticSpec& spec, const SyntheticData& data, const std::filesystem::path& dir);

}  // namespace hinrec
