#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hinrec/baselines.hpp"
#include "hinrec/dmf.hpp"
#include "hinrec/eval.hpp"
#include "hinrec/graph.hpp"
#include "hinrec/metapath.hpp"
#include "hinrec/pruning.hpp"
#include "hinrec/relation.hpp"
#include "hinrec/sampling.hpp"

namespace hinrec {

/// Model selectors accepted under [experiment] models.
inline constexpr const char* kModelNames[] = {"dmf", "dmf2", "dmf3", "dmf-ig", "p3", "rp3", "hl"};

/// Everything one experiment run needs. Loaded from an INI-style file:
///
///     [data]
///     schema = schema.txt          ; paths are relative to the config file
///     rating_edge = um
///     kcore = 5                    ; 0 disables the filter
///     duplicates = reject          ; or keep_last
///     [edges]
///     um = um.tsv
///     mg = mg.tsv
///     [experiment]
///     seed = 42
///     split = kfold:5              ; or holdout:0.8
///     models = dmf,dmf2,dmf3,dmf-ig,p3,rp3,hl
///     output = out
///     workers = 0
///     us_threshold = 3
///     [generation]
///     method = sampled             ; or full
///     walks_per_start = 100
///     max_retries = 5
///     include_direct = true
///     entry_cap = 2e8
///     max_steps = 3
///     [metapaths]
///     umgm = um,>mg,<mg
///     [pruning]
///     threshold = 0.1              ; or top_m = 2
///     [dmf]
///     dim = 32
///     lr = 0.05
///     reg = 0.01
///     epochs = 30
///     neg_samples = 1
///     weight.umgm = 0.5
///     [baseline]
///     alpha = 1
///     beta = 0
///     lambda = 0.5
///     tune = true
///
/// The HINREC_OUT environment variable, when set, replaces `output`.
struct ExperimentConfig {
  std::filesystem::path base_dir;
  std::filesystem::path schema_path;
  std::map<std::string, std::filesystem::path> edge_files;
  std::string rating_edge;
  std::size_t kcore = 0;
  DuplicatePolicy duplicates = DuplicatePolicy::reject;

  std::uint64_t seed = 42;
  SplitSpec split;
  std::vector<std::string> models{"dmf"};
  std::filesystem::path output = "out";
  int workers = 0;
  std::size_t max_k = 10;
  double us_threshold = 3.0;

  GenerationMethod method = GenerationMethod::sampled;
  SampleBudget budget;
  bool include_direct = true;
  double entry_cap = 2e8;
  std::size_t max_steps = kDefaultMaxSteps;
  std::vector<MetaPath> metapaths;

  PruningPolicy pruning;
  Hyperparams hp;
  BaselineParams baseline;
  bool tune = true;

  /// Deterministic key=value dump of every setting that affects results
  /// (output directory and worker count excluded).
  std::string canonical() const;
  /// FNV-1a of canonical(), hex.
  std::string hash() const;
  /// Reapplies the seed to the derived fields (split, hyperparameters).
  void set_seed(std::uint64_t s);
  bool wants(const std::string& model) const;
};

/// Parses and validates; throws ConfigError with the offending key.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& file);

/// Checks that referenced files exist, that every meta-path type-checks and
/// that the rating edge is declared in `schema`. Throws ConfigError.
void validate_config(const ExperimentConfig& cfg, const NetworkSchema& schema);

}  // namespace hinrec
