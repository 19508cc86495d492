#include "hinrec/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "hinrec/error.hpp"
#include "hinrec/expansion.hpp"
#include "hinrec/metapath.hpp"
#include "hinrec/rng.hpp"
#include "hinrec/sampling.hpp"
#include "hinrec/text.hpp"

namespace hinrec {

namespace fs = std::filesystem;

std::string artifact_stamp(const ExperimentConfig& cfg) {
  return "# config_hash=" + cfg.hash() + " seed=" + std::to_string(cfg.seed);
}

HeteroGraph ingest(const ExperimentConfig& cfg, LoadReport* report) {
  std::ifstream sin(cfg.schema_path);
  if (!sin) throw ConfigError("cannot open schema " + cfg.schema_path.string());
  NetworkSchema schema = NetworkSchema::parse(sin);
  validate_config(cfg, schema);
  return run_stage("ingest", [&] {
    std::vector<EdgeRecord> records;
    for (const auto& [et, path] : cfg.edge_files) {
      std::ifstream in(path);
      if (!in) throw LoadError("cannot open " + path.string(), 0);
      try {
        auto part = read_edge_list(in, et);
        records.insert(records.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
      } catch (const LoadError& e) {
        throw LoadError(path.filename().string() + ": " + e.what(), 0);
      }
    }
    LoadOptions opts;
    opts.duplicates = cfg.duplicates;
    return load_graph(schema, records, opts, report);
  });
}

HeteroGraph prepare_graph(const ExperimentConfig& cfg) {
  HeteroGraph g = ingest(cfg);
  if (cfg.kcore == 0) return g;
  return run_stage("pcore", [&] { return k_core_filter(g, cfg.rating_edge, cfg.kcore); });
}

TypeId rating_type(const ExperimentConfig& cfg, const HeteroGraph& g) {
  return g.schema().edge_type_id(cfg.rating_edge);
}

std::vector<Fold> make_folds(const ExperimentConfig& cfg, const HeteroGraph& g) {
  return run_stage("split", [&] { return split(g.edge_count(rating_type(cfg, g)), cfg.split); });
}

HeteroGraph train_graph(const HeteroGraph& g, TypeId rating, const Fold& fold) {
  std::vector<bool> keep(g.edge_count(rating), false);
  for (std::size_t i : fold.train) keep[i] = true;
  return g.with_edge_subset(rating, keep);
}

std::string fold_source(std::size_t fold) { return "train:fold=" + std::to_string(fold); }

std::vector<std::vector<NodeIndex>> test_items(const HeteroGraph& g, TypeId rating, const Fold& fold) {
  std::vector<std::vector<NodeIndex>> out(g.node_count(g.schema().edge_src(rating)));
  for (std::size_t i : fold.test) {
    const Edge e = g.edge(rating, static_cast<EdgeId>(i));
    out[e.src.index].push_back(e.dst.index);
  }
  return out;
}

std::vector<std::vector<RatedItem>> test_ratings(const HeteroGraph& g, TypeId rating, const Fold& fold) {
  std::vector<std::vector<RatedItem>> out(g.node_count(g.schema().edge_src(rating)));
  for (std::size_t i : fold.test) {
    const Edge e = g.edge(rating, static_cast<EdgeId>(i));
    out[e.src.index].push_back({e.dst.index, e.weight.value_or(0.0)});
  }
  return out;
}

std::uint64_t walk_seed(const ExperimentConfig& cfg, std::size_t fold, const std::string& label) {
  return mix_seed(mix_seed(substream_seed(cfg.seed, "walks"), fold), text::fnv1a(label));
}

std::vector<RelationMatrix> generate_relations(const ExperimentConfig& cfg, const HeteroGraph& train,
                                               std::size_t fold, GenerationMethod method) {
  const auto& schema = train.schema();
  const TypeId rating = rating_type(cfg, train);
  const std::string source = fold_source(fold);
  std::vector<RelationMatrix> rels;
  rels.push_back(direct_relation(train, rating, source));
  if (cfg.include_direct) {
    for (const auto& [name, path] : cfg.edge_files) {
      const TypeId et = schema.edge_type_id(name);
      if (et != rating) rels.push_back(direct_relation(train, et, source));
    }
  }
  for (const auto& mp : cfg.metapaths) {
    const ResolvedMetaPath r = resolve_metapath(mp, schema, cfg.max_steps);
    const auto starts = all_starts(train, r);
    RelationMatrix rel = method == GenerationMethod::full
                             ? expand_full(train, r, starts, ExpandOptions{cfg.entry_cap, cfg.workers})
                             : sample_relation(train, r, starts, cfg.budget, walk_seed(cfg, fold, mp.label),
                                               ParallelOptions{cfg.workers});
    rel.provenance().label = mp.label;
    rel.provenance().source = source;
    rels.push_back(std::move(rel));
  }
  return rels;
}

std::size_t relation_steps(const ExperimentConfig& cfg, const std::string& label) {
  for (const auto& mp : cfg.metapaths)
    if (mp.label == label) return mp.steps.size();
  return 1;
}

ModelInputs select_relations(const ExperimentConfig& cfg, const std::vector<RelationMatrix>& relations,
                             const std::string& variant) {
  std::size_t max_steps = 1;
  if (variant == "dmf2") max_steps = 2;
  else if (variant == "dmf3" || variant == "dmf-ig") max_steps = 3;
  else if (variant != "dmf") throw ConfigError("'" + variant + "' is not a DMF variant");

  ModelInputs in;
  bool have_target = false;
  std::vector<RelationMatrix> direct, paths;
  for (const auto& r : relations) {
    if (r.label() == cfg.rating_edge) {
      in.target = r;
      have_target = true;
      continue;
    }
    if (r.empty()) continue;
    const std::size_t steps = relation_steps(cfg, r.label());
    if (steps > max_steps) continue;
    (steps >= 2 ? paths : direct).push_back(r);
  }
  if (!have_target) throw ConfigError("no relation labelled '" + cfg.rating_edge + "' (the target) among the inputs");

  if (variant == "dmf-ig" && !paths.empty()) {
    std::vector<RelationMatrix> candidates = paths;
    candidates.push_back(in.target);
    PruneResult pr = prune_relations(std::move(candidates), cfg.pruning, cfg.rating_edge);
    in.pruning = pr.report;
    paths.clear();
    for (auto& r : pr.retained)
      if (r.label() != cfg.rating_edge) paths.push_back(std::move(r));
  }
  in.aux = std::move(direct);
  in.aux.insert(in.aux.end(), std::make_move_iterator(paths.begin()), std::make_move_iterator(paths.end()));
  std::sort(in.aux.begin(), in.aux.end(),
            [](const RelationMatrix& a, const RelationMatrix& b) { return a.label() < b.label(); });
  return in;
}

std::vector<std::vector<NodeIndex>> training_items(const RelationMatrix& target) {
  std::vector<std::vector<NodeIndex>> out(target.src_universe());
  for (const auto& e : target.entries()) out[e.src].push_back(e.dst);  // entries are sorted by (src, dst)
  return out;
}

BaselineRun run_baseline(const ExperimentConfig& cfg, const RelationMatrix& target, Algorithm algo, std::size_t fold) {
  const auto b = BipartiteRatings::from_relation(target);
  BaselineRun run;
  run.params = cfg.baseline;
  if (cfg.tune) {
    SplitSpec inner;
    inner.mode = SplitSpec::Mode::holdout;
    inner.train_fraction = 0.8;
    inner.seed = mix_seed(substream_seed(cfg.seed, "tune"), fold);
    const auto entries = target.entries();
    const Fold f = split(entries.size(), inner).front();
    std::vector<std::pair<NodeIndex, NodeIndex>> pairs;
    for (std::size_t i : f.train) pairs.emplace_back(entries[i].src, entries[i].dst);
    std::vector<std::vector<NodeIndex>> validation(target.src_universe());
    for (std::size_t i : f.test) validation[entries[i].src].push_back(entries[i].dst);
    const BipartiteRatings inner_b(target.src_universe(), target.dst_universe(), pairs);
    const auto grid = default_grid(algo);
    auto tuned = grid_tune(inner_b, algo, validation, grid, ParallelOptions{cfg.workers});
    run.params = tuned.best;
    run.grid = std::move(tuned.grid);
  }
  run.recs = baseline_topk(b, algo, run.params, cfg.max_k, ParallelOptions{cfg.workers});
  return run;
}

void write_recs(const std::vector<std::vector<NodeIndex>>& recs, const HeteroGraph& g, TypeId rating,
                std::ostream& out) {
  const TypeId ut = g.schema().edge_src(rating);
  const TypeId it = g.schema().edge_dst(rating);
  for (NodeIndex u = 0; u < recs.size(); ++u)
    for (std::size_t r = 0; r < recs[u].size(); ++r)
      out << g.node_id(ut, u) << '\t' << g.node_id(it, recs[u][r]) << '\t' << r + 1 << '\n';
}

std::vector<std::vector<NodeIndex>> read_recs(std::istream& in, const HeteroGraph& g, TypeId rating) {
  const TypeId ut = g.schema().edge_src(rating);
  const TypeId it = g.schema().edge_dst(rating);
  std::vector<std::vector<std::pair<std::uint64_t, NodeIndex>>> ranked(g.node_count(ut));
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto f = text::split(line, '\t');
    if (f.size() != 3) throw LoadError("expected user<TAB>item<TAB>rank", lineno);
    auto u = g.find_node(ut, f[0]);
    auto i = g.find_node(it, f[1]);
    auto rank = text::parse_uint(f[2]);
    if (!u || !i || !rank) throw LoadError("unknown user/item or malformed rank", lineno);
    ranked[*u].emplace_back(*rank, *i);
  }
  std::vector<std::vector<NodeIndex>> out(ranked.size());
  for (std::size_t u = 0; u < ranked.size(); ++u) {
    std::sort(ranked[u].begin(), ranked[u].end());
    for (const auto& [r, i] : ranked[u]) out[u].push_back(i);
  }
  return out;
}

void write_relations(const std::vector<RelationMatrix>& rels, const HeteroGraph& g, const ExperimentConfig& cfg,
                     const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& r : rels) {
    std::ofstream out(dir / (r.label() + ".tsv"));
    out << "# config_hash\t" << cfg.hash() << '\n';
    write_relation(r, g, out);
  }
}

std::vector<RelationMatrix> read_relations(const fs::path& dir, const HeteroGraph& g) {
  if (!fs::is_directory(dir)) throw ConfigError("relations directory " + dir.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".tsv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<RelationMatrix> rels;
  for (const auto& p : files) {
    std::ifstream in(p);
    try {
      rels.push_back(read_relation(in, g));
    } catch (const LoadError& e) {
      throw LoadError(p.filename().string() + ": " + e.what(), 0);
    }
  }
  return rels;
}

namespace {

void write_model_files(const FactorModel& model, const HeteroGraph& g, const ExperimentConfig& cfg,
                       const fs::path& dir, const std::string& variant) {
  std::ofstream m(dir / ("model_" + variant + ".tsv"));
  m << "# config_hash\t" << cfg.hash() << '\n';
  write_model(model, g, m);
  std::ofstream l(dir / ("loss_" + variant + ".csv"));
  l << artifact_stamp(cfg) << '\n';
  write_loss_trace(model, l);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log_sink) {
  std::ostringstream log;
  auto note = [&](const std::string& line) {
    log << line << '\n';
    if (log_sink) *log_sink << line << '\n';
  };
  fs::create_directories(cfg.output);
  const std::string stamp = artifact_stamp(cfg);
  note("config_hash " + cfg.hash() + " seed " + std::to_string(cfg.seed));

  LoadReport load;
  HeteroGraph full = ingest(cfg, &load);
  note("ingest: " + std::to_string(load.records) + " records, " + std::to_string(full.total_edges()) + " edges, " +
       std::to_string(full.total_nodes()) + " nodes, " + std::to_string(load.merged_duplicates) +
       " merged duplicates");
  HeteroGraph g = cfg.kcore ? run_stage("pcore", [&] { return k_core_filter(full, cfg.rating_edge, cfg.kcore); })
                            : std::move(full);
  if (cfg.kcore) note("pcore: k=" + std::to_string(cfg.kcore) + ", " + std::to_string(g.total_edges()) + " edges left");
  const TypeId rating = rating_type(cfg, g);
  const bool rated = g.schema().edge_type(rating).weighted();
  const auto folds = make_folds(cfg, g);

  ExperimentResult result;
  result.config_hash = cfg.hash();
  std::map<std::string, std::vector<FoldMetrics>> metrics, us_metrics;
  std::ostringstream grid_csv;
  grid_csv << stamp << "\nalgo,fold,alpha,beta,lambda,recall_at_10,chosen\n";

  for (std::size_t f = 0; f < folds.size(); ++f) {
    const Fold& fold = folds[f];
    result.fold_hashes.push_back(fold_hash(fold));
    const fs::path fdir = cfg.output / ("fold" + std::to_string(f));
    fs::create_directories(fdir);
    note("fold " + std::to_string(f) + ": " + std::to_string(fold.train.size()) + " train, " +
         std::to_string(fold.test.size()) + " test, hash " + result.fold_hashes.back());

    const HeteroGraph train = train_graph(g, rating, fold);
    const auto test = test_items(g, rating, fold);
    const auto rated_test = test_ratings(g, rating, fold);
    std::size_t users_with_test = 0;
    for (const auto& t : test) users_with_test += !t.empty();
    if (users_with_test == 0) note("warning: fold " + std::to_string(f) + " has no test entries");

    const auto relations = run_stage(to_string(cfg.method), [&] { return generate_relations(cfg, train, f, cfg.method); });
    write_relations(relations, train, cfg, fdir / "relations");
    for (const auto& r : relations) {
      const auto& p = r.provenance();
      note("  relation " + r.label() + ": " + std::to_string(r.size()) + " entries (" + to_string(p.method) +
           (p.method == GenerationMethod::sampled ? ", failures " + std::to_string(p.failed_walks) : "") + ")");
    }

    auto evaluate = [&](const std::string& name, const std::vector<std::vector<NodeIndex>>& recs) {
      auto m = precision_recall_at_k(recs, test, cfg.max_k);
      note("  " + name + ": recall@" + std::to_string(cfg.max_k) + " " + text::format_double(m.recall.back()) + ", " +
           std::to_string(m.users_excluded) + " users without test items excluded");
      metrics[name].push_back(std::move(m));
      if (rated) us_metrics[name].push_back(us_precision_recall(recs, rated_test, cfg.us_threshold, cfg.max_k));
      std::ofstream out(fdir / ("recs_" + name + ".tsv"));
      write_recs(recs, g, rating, out);
    };

    for (const auto& name : cfg.models) {
      if (name.starts_with("dmf")) {
        const ModelInputs in = run_stage("nig", [&] { return select_relations(cfg, relations, name); });
        if (name == "dmf-ig") {
          std::ofstream nig_out(fdir / "nig.tsv");
          nig_out << stamp << '\n';
          write_nig_report(in.pruning, nig_out);
        }
        const FactorModel model = run_stage("train", [&] { return train_dmf(in.target, in.aux, cfg.hp); });
        write_model_files(model, train, cfg, fdir, name);
        const auto excl = training_items(in.target);
        evaluate(name, run_stage("train", [&] { return recommend_all(model, cfg.max_k, excl, {cfg.workers}); }));
      } else {
        const Algorithm algo = parse_algorithm(name);
        const BaselineRun run = run_stage("baseline", [&] { return run_baseline(cfg, relations.front(), algo, f); });
        for (const auto& gp : run.grid)
          grid_csv << name << ',' << f << ',' << text::format_double(gp.params.alpha) << ','
                   << text::format_double(gp.params.beta) << ',' << text::format_double(gp.params.lambda) << ','
                   << text::format_double(gp.recall_at_10) << ',' << (gp.params == run.params) << '\n';
        evaluate(name, run.recs);
      }
    }
  }

  for (const auto& name : cfg.models) {
    result.reports.push_back(summarize(name, metrics[name]));
    if (rated) result.us_reports.push_back(summarize(name, us_metrics[name]));
  }
  run_stage("eval", [&] {
    std::ofstream eval(cfg.output / "eval.csv");
    eval << stamp << '\n';
    write_eval_csv(result.reports, eval);
    if (rated) {
      std::ofstream us(cfg.output / "us_eval.csv");
      us << stamp << '\n';
      write_eval_csv(result.us_reports, us);
    }
    std::ofstream fcsv(cfg.output / "folds.csv");
    fcsv << stamp << "\nfold,hash,train,test\n";
    for (std::size_t f = 0; f < folds.size(); ++f)
      fcsv << f << ',' << result.fold_hashes[f] << ',' << folds[f].train.size() << ',' << folds[f].test.size() << '\n';
    std::ofstream(cfg.output / "baseline_grid.csv") << grid_csv.str();
    std::ofstream(cfg.output / "run.log") << log.str();
    return 0;
  });
  return result;
}

}  // namespace hinrec
