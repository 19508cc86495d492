// Command-line front end: one subcommand per pipeline stage plus `run`.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 stage failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "hinrec/bench_generation.hpp"
#include "hinrec/config.hpp"
#include "hinrec/error.hpp"
#include "hinrec/pipeline.hpp"
#include "hinrec/synthetic.hpp"
#include "hinrec/text.hpp"

namespace fs = std::filesystem;
using namespace hinrec;

namespace {

constexpr int kConfigExit = 2;
constexpr int kStageExit = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> workers;
};

void add_common(CLI::App* sub, Common& c, bool needs_config = true) {
  auto* opt = sub->add_option("--config", c.config, "experiment config file");
  if (needs_config) opt->required();
  sub->add_option("--seed", c.seed, "override the experiment seed");
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--workers", c.workers, "OpenMP worker threads (0 = runtime default)");
}

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = load_config(c.config);
  if (c.seed) cfg.set_seed(*c.seed);
  if (!c.out.empty()) cfg.output = c.out;
  if (c.workers) cfg.workers = *c.workers;
  fs::create_directories(cfg.output);
  return cfg;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

void write_graph(const HeteroGraph& g, const fs::path& dir) {
  open_out(dir / "schema.txt") << g.schema().to_text();
  for (TypeId et = 0; et < g.schema().edge_type_count(); ++et) {
    auto out = open_out(dir / (g.schema().edge_type(et).name + ".tsv"));
    write_edge_list(g, et, out);
  }
  auto nodes = open_out(dir / "nodes.tsv");
  write_node_map(g, nodes);
}

void describe(const HeteroGraph& g) {
  for (TypeId t = 0; t < g.schema().node_type_count(); ++t)
    std::cout << "nodes\t" << g.schema().node_type(t).name << '\t' << g.node_count(t) << '\n';
  for (TypeId et = 0; et < g.schema().edge_type_count(); ++et)
    std::cout << "edges\t" << g.schema().edge_type(et).name << '\t' << g.edge_count(et) << '\n';
}

Fold pick_fold(const ExperimentConfig& cfg, const HeteroGraph& g, std::size_t f) {
  auto folds = make_folds(cfg, g);
  if (f >= folds.size())
    throw ConfigError("fold " + std::to_string(f) + " out of range (" + std::to_string(folds.size()) + " folds)");
  return folds[f];
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meta-path relation generation and multi-relational factorization toolkit"};
  app.require_subcommand(1);

  Common c;
  std::size_t fold = 0;
  std::optional<std::size_t> k;
  std::string relations_dir, variant = "dmf", algo_name, recs_file, name, preset, spec_file;
  std::optional<double> param;
  bool tune = false;
  std::size_t reps = 3;

  auto* ingest_cmd = app.add_subcommand("ingest", "load and validate the edge lists, write them back canonically");
  add_common(ingest_cmd, c);
  auto* pcore_cmd = app.add_subcommand("pcore", "k-core filter on the rating edge");
  add_common(pcore_cmd, c);
  pcore_cmd->add_option("--k", k, "core size (defaults to [data] kcore)");
  auto* expand_cmd = app.add_subcommand("expand", "full breadth-first meta-path expansion of one fold's training data");
  add_common(expand_cmd, c);
  expand_cmd->add_option("--fold", fold, "fold index");
  auto* sample_cmd = app.add_subcommand("sample", "random-walk meta-path sampling of one fold's training data");
  add_common(sample_cmd, c);
  sample_cmd->add_option("--fold", fold, "fold index");
  auto* nig_cmd = app.add_subcommand("nig", "score relations by normalized information gain and prune");
  add_common(nig_cmd, c);
  nig_cmd->add_option("--relations", relations_dir, "directory written by expand/sample")->required();
  auto* train_cmd = app.add_subcommand("train", "train a DMF variant from a relations directory");
  add_common(train_cmd, c);
  train_cmd->add_option("--relations", relations_dir, "directory written by expand/sample")->required();
  train_cmd->add_option("--model", variant, "dmf|dmf2|dmf3|dmf-ig");
  auto* baseline_cmd = app.add_subcommand("baseline", "P3alpha / RP3beta / HL recommendations for one fold");
  add_common(baseline_cmd, c);
  baseline_cmd->add_option("--algo", algo_name, "p3|rp3|hl")->required();
  auto* param_opt = baseline_cmd->add_option("--param", param, "alpha (p3), beta (rp3) or lambda (hl)");
  baseline_cmd->add_flag("--tune", tune, "grid-tune on an inner validation split")->excludes(param_opt);
  baseline_cmd->add_option("--fold", fold, "fold index");
  auto* eval_cmd = app.add_subcommand("eval", "precision/recall@1..k of a recommendation list against one fold");
  add_common(eval_cmd, c);
  eval_cmd->add_option("--recs", recs_file, "user<TAB>item<TAB>rank file")->required();
  eval_cmd->add_option("--name", name, "algorithm tag in the report");
  eval_cmd->add_option("--fold", fold, "fold index");
  auto* bench_cmd = app.add_subcommand("bench", "time full expansion against sampling for every configured meta-path");
  add_common(bench_cmd, c);
  bench_cmd->add_option("--reps", reps, "timed repetitions (>= 3)");
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset and config template");
  add_common(synth_cmd, c, false);
  synth_cmd->add_option("--preset", preset, "movielens|ring|timing-high|timing-low");
  synth_cmd->add_option("--spec", spec_file, "synthetic spec file");
  auto* run_cmd = app.add_subcommand("run", "the whole experiment pipeline");
  add_common(run_cmd, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kConfigExit;
  }

  try {
    if (synth_cmd->parsed()) {
      if (preset.empty() == spec_file.empty()) throw ConfigError("synth needs exactly one of --preset or --spec");
      if (c.out.empty()) throw ConfigError("synth needs --out");
      SyntheticSpec spec;
      if (!preset.empty()) {
        spec = synthetic_preset(preset);
      } else {
        std::ifstream in(spec_file);
        if (!in) throw ConfigError("cannot open " + spec_file);
        spec = SyntheticSpec::parse(in);
      }
      if (c.seed) spec.seed = *c.seed;
      const auto data = generate_synthetic(spec);
      write_synthetic(spec, data, c.out);
      std::cout << "wrote " << data.records.size() << " edges to " << c.out << '\n';
      return 0;
    }

    const ExperimentConfig cfg = load(c);

    if (ingest_cmd->parsed()) {
      LoadReport report;
      const HeteroGraph g = ingest(cfg, &report);
      write_graph(g, cfg.output);
      describe(g);
      std::cout << "merged_duplicates\t" << report.merged_duplicates << '\n';
    } else if (pcore_cmd->parsed()) {
      const HeteroGraph g = ingest(cfg);
      const std::size_t kk = k.value_or(cfg.kcore);
      const HeteroGraph core = run_stage("pcore", [&] { return k_core_filter(g, cfg.rating_edge, kk); });
      write_graph(core, cfg.output);
      describe(core);
    } else if (expand_cmd->parsed() || sample_cmd->parsed()) {
      const auto method = expand_cmd->parsed() ? GenerationMethod::full : GenerationMethod::sampled;
      const HeteroGraph g = prepare_graph(cfg);
      const HeteroGraph train = train_graph(g, rating_type(cfg, g), pick_fold(cfg, g, fold));
      const auto rels = run_stage(to_string(method), [&] { return generate_relations(cfg, train, fold, method); });
      write_relations(rels, train, cfg, cfg.output / "relations");
      for (const auto& r : rels)
        std::cout << r.label() << '\t' << to_string(r.provenance().method) << '\t' << r.size() << '\t'
                  << r.provenance().failed_walks << '\n';
    } else if (nig_cmd->parsed()) {
      const HeteroGraph g = prepare_graph(cfg);
      auto rels = run_stage("nig", [&] { return read_relations(relations_dir, g); });
      const PruneResult pr = run_stage("nig", [&] { return prune_relations(rels, cfg.pruning, cfg.rating_edge); });
      auto out = open_out(cfg.output / "nig.tsv");
      out << artifact_stamp(cfg) << '\n';
      write_nig_report(pr.report, out);
      write_nig_report(pr.report, std::cout);
    } else if (train_cmd->parsed()) {
      const HeteroGraph g = prepare_graph(cfg);
      const TypeId rating = rating_type(cfg, g);
      const auto rels = run_stage("train", [&] { return read_relations(relations_dir, g); });
      const ModelInputs in = select_relations(cfg, rels, variant);
      const FactorModel model = run_stage("train", [&] { return train_dmf(in.target, in.aux, cfg.hp); });
      auto m = open_out(cfg.output / ("model_" + variant + ".tsv"));
      m << "# config_hash\t" << cfg.hash() << '\n';
      write_model(model, g, m);
      auto l = open_out(cfg.output / ("loss_" + variant + ".csv"));
      l << artifact_stamp(cfg) << '\n';
      write_loss_trace(model, l);
      auto r = open_out(cfg.output / ("recs_" + variant + ".tsv"));
      write_recs(recommend_all(model, cfg.max_k, training_items(in.target), {cfg.workers}), g, rating, r);
      std::cout << "trained " << variant << " on " << in.aux.size() << " auxiliary relations, final loss "
                << text::format_double(model.loss_trace.empty() ? 0.0 : model.loss_trace.back()) << '\n';
    } else if (baseline_cmd->parsed()) {
      const Algorithm algo = parse_algorithm(algo_name);
      ExperimentConfig bcfg = cfg;
      bcfg.tune = tune;
      if (param) {
        if (algo == Algorithm::p3) bcfg.baseline.alpha = *param;
        else if (algo == Algorithm::rp3) bcfg.baseline.beta = *param;
        else bcfg.baseline.lambda = *param;
      }
      const HeteroGraph g = prepare_graph(bcfg);
      const TypeId rating = rating_type(bcfg, g);
      const HeteroGraph train = train_graph(g, rating, pick_fold(bcfg, g, fold));
      const auto target = direct_relation(train, rating, fold_source(fold));
      const BaselineRun run = run_stage("baseline", [&] { return run_baseline(bcfg, target, algo, fold); });
      auto r = open_out(cfg.output / (std::string("recs_") + to_string(algo) + ".tsv"));
      write_recs(run.recs, g, rating, r);
      auto grid = open_out(cfg.output / (std::string("grid_") + to_string(algo) + ".csv"));
      grid << artifact_stamp(bcfg) << "\nalpha,beta,lambda,recall_at_10\n";
      for (const auto& gp : run.grid)
        grid << text::format_double(gp.params.alpha) << ',' << text::format_double(gp.params.beta) << ','
             << text::format_double(gp.params.lambda) << ',' << text::format_double(gp.recall_at_10) << '\n';
      std::cout << to_string(algo) << " alpha=" << text::format_double(run.params.alpha)
                << " beta=" << text::format_double(run.params.beta)
                << " lambda=" << text::format_double(run.params.lambda) << '\n';
    } else if (eval_cmd->parsed()) {
      const HeteroGraph g = prepare_graph(cfg);
      const TypeId rating = rating_type(cfg, g);
      const Fold f = pick_fold(cfg, g, fold);
      std::ifstream in(recs_file);
      if (!in) throw ConfigError("cannot open " + recs_file);
      const auto recs = run_stage("eval", [&] { return read_recs(in, g, rating); });
      const std::string tag = name.empty() ? fs::path(recs_file).stem().string() : name;
      const auto report = summarize(tag, {precision_recall_at_k(recs, test_items(g, rating, f), cfg.max_k)});
      auto out = open_out(cfg.output / "eval.csv");
      out << artifact_stamp(cfg) << '\n';
      write_eval_csv({report}, out);
      if (g.schema().edge_type(rating).weighted()) {
        const auto us =
            summarize(tag, {us_precision_recall(recs, test_ratings(g, rating, f), cfg.us_threshold, cfg.max_k)});
        auto uo = open_out(cfg.output / "us_eval.csv");
        uo << artifact_stamp(cfg) << '\n';
        write_eval_csv({us}, uo);
      }
      write_eval_csv({report}, std::cout);
    } else if (bench_cmd->parsed()) {
      const HeteroGraph g = prepare_graph(cfg);
      std::vector<ResolvedMetaPath> paths;
      for (const auto& mp : cfg.metapaths) paths.push_back(resolve_metapath(mp, g.schema(), cfg.max_steps));
      if (paths.empty()) throw ConfigError("bench needs at least one meta-path in [metapaths]");
      const auto report = run_stage("bench", [&] {
        return bench_generation(g, paths, {}, cfg.budget, substream_seed(cfg.seed, "walks"), reps,
                                ExpandOptions{cfg.entry_cap, 1});
      });
      auto out = open_out(cfg.output / "timing.csv");
      write_timing_csv(report, out);
      write_timing_csv(report, std::cout);
    } else if (run_cmd->parsed()) {
      const auto result = run_experiment(cfg, &std::cerr);
      for (const auto& r : result.reports)
        std::cout << r.algo << "\trecall@" << cfg.max_k << '\t' << text::format_double(r.mean.recall.back()) << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const MetaPathError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const StageError& e) {
    std::cerr << "stage " << e.stage() << " failed: " << e.what() << '\n';
    return kStageExit;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << '\n';
    return kStageExit;
  }
  return 0;
}
