#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hinrec/baselines.hpp"
#include "hinrec/config.hpp"
#include "hinrec/dmf.hpp"
#include "hinrec/eval.hpp"
#include "hinrec/graph.hpp"
#include "hinrec/pruning.hpp"
#include "hinrec/relation.hpp"

namespace hinrec {

/// A pipeline stage failed; `stage()` names it. Configuration problems are
/// reported as ConfigError instead.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Runs `fn`, rethrowing library errors other than ConfigError as StageError.
template <class Fn>
auto run_stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

/// `# config_hash=<hex> seed=<n>` line heading every CSV artifact.
std::string artifact_stamp(const ExperimentConfig& cfg);

/// Schema plus every configured edge list, validated against the config.
HeteroGraph ingest(const ExperimentConfig& cfg, LoadReport* report = nullptr);
/// ingest followed by the k-core filter on the rating edge (when kcore > 0).
HeteroGraph prepare_graph(const ExperimentConfig& cfg);

TypeId rating_type(const ExperimentConfig& cfg, const HeteroGraph& g);

/// Folds over the rating edges of `g`.
std::vector<Fold> make_folds(const ExperimentConfig& cfg, const HeteroGraph& g);
/// `g` with the rating edge restricted to the fold's training entries.
HeteroGraph train_graph(const HeteroGraph& g, TypeId rating, const Fold& fold);
std::string fold_source(std::size_t fold);

/// Per-user held-out items of a fold, plain and with ratings.
std::vector<std::vector<NodeIndex>> test_items(const HeteroGraph& g, TypeId rating, const Fold& fold);
std::vector<std::vector<RatedItem>> test_ratings(const HeteroGraph& g, TypeId rating, const Fold& fold);

/// Seed of the walks sampling meta-path `label` on fold `fold`.
std::uint64_t walk_seed(const ExperimentConfig& cfg, std::size_t fold, const std::string& label);

/// Target relation, direct relations of the other edge types (if enabled) and
/// one relation per configured meta-path, all derived from `train` only.
/// `method` overrides the configured generation method.
std::vector<RelationMatrix> generate_relations(const ExperimentConfig& cfg, const HeteroGraph& train,
                                               std::size_t fold, GenerationMethod method);

/// Number of steps behind a relation label: 1 for edge types, the meta-path
/// length otherwise.
std::size_t relation_steps(const ExperimentConfig& cfg, const std::string& label);

struct ModelInputs {
  RelationMatrix target;
  /// Sorted by label.
  std::vector<RelationMatrix> aux;
  /// Filled for dmf-ig only.
  std::vector<PruneDecision> pruning;
};

/// Relations feeding a DMF variant: dmf uses the direct relations, dmf2 adds
/// two-step meta-paths, dmf3 three-step ones and dmf-ig prunes dmf3's
/// meta-path relations by NIG (direct relations are never pruned).
ModelInputs select_relations(const ExperimentConfig& cfg, const std::vector<RelationMatrix>& relations,
                             const std::string& variant);

/// Training positives of the target relation per user, sorted.
std::vector<std::vector<NodeIndex>> training_items(const RelationMatrix& target);

struct BaselineRun {
  BaselineParams params;
  std::vector<GridPoint> grid;
  std::vector<std::vector<NodeIndex>> recs;
};

/// Tunes on an inner holdout of the training relation when cfg.tune, then
/// ranks for every user with the chosen parameters.
BaselineRun run_baseline(const ExperimentConfig& cfg, const RelationMatrix& target, Algorithm algo, std::size_t fold);

struct ExperimentResult {
  std::vector<EvalReport> reports;
  std::vector<EvalReport> us_reports;
  std::vector<std::string> fold_hashes;
  std::string config_hash;
};

/// ingest -> k-core -> split -> per fold: generate relations from the
/// training part, prune, train the DMF variants and baselines, evaluate.
/// Writes eval.csv, us_eval.csv, folds.csv, baseline_grid.csv and per-fold
/// relations, NIG reports, models and recommendation lists under cfg.output.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

/// `user<TAB>item<TAB>rank` lines, external ids.
void write_recs(const std::vector<std::vector<NodeIndex>>& recs, const HeteroGraph& g, TypeId rating,
                std::ostream& out);
std::vector<std::vector<NodeIndex>> read_recs(std::istream& in, const HeteroGraph& g, TypeId rating);

/// Writes every relation as `<label>.tsv` into `dir`.
void write_relations(const std::vector<RelationMatrix>& rels, const HeteroGraph& g, const ExperimentConfig& cfg,
                     const std::filesystem::path& dir);
/// Reads every `*.tsv` in `dir`, sorted by file name.
std::vector<RelationMatrix> read_relations(const std::filesystem::path& dir, const HeteroGraph& g);

}  // namespace hinrec
