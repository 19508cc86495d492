#include "hinrec/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hinrec/error.hpp"
#include "hinrec/text.hpp"

namespace hinrec {

namespace pt = boost::property_tree;

namespace {

// Boost's INI reader only knows whole-line comments.
std::string strip_comment(const std::string& raw) {
  std::size_t cut = raw.size();
  for (std::size_t i = 1; i < raw.size(); ++i) {
    if ((raw[i] == ';' || raw[i] == '#') && (raw[i - 1] == ' ' || raw[i - 1] == '\t')) {
      cut = i;
      break;
    }
  }
  return std::string(text::trim(std::string_view(raw).substr(0, cut)));
}

class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  bool present() const { return tree_ != nullptr; }

  std::vector<std::pair<std::string, std::string>> items() const {
    std::vector<std::pair<std::string, std::string>> out;
    if (!tree_) return out;
    for (const auto& [k, v] : *tree_) out.emplace_back(k, strip_comment(v.data()));
    return out;
  }

  std::optional<std::string> raw(const std::string& key) const {
    if (!tree_) return std::nullopt;
    for (const auto& [k, v] : *tree_)
      if (k == key) return strip_comment(v.data());
    return std::nullopt;
  }

  std::string str(const std::string& key, std::string fallback) const { return raw(key).value_or(std::move(fallback)); }

  std::string required(const std::string& key) const {
    auto v = raw(key);
    if (!v || v->empty()) throw ConfigError("[" + name_ + "] " + key + " is required");
    return *v;
  }

  double real(const std::string& key, double fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    auto d = text::parse_double(*v);
    if (!d) throw ConfigError("[" + name_ + "] " + key + ": expected a number, got '" + *v + "'");
    return *d;
  }

  std::uint64_t uint(const std::string& key, std::uint64_t fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    auto d = text::parse_uint(*v);
    if (!d) throw ConfigError("[" + name_ + "] " + key + ": expected a non-negative integer, got '" + *v + "'");
    return *d;
  }

  bool boolean(const std::string& key, bool fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    throw ConfigError("[" + name_ + "] " + key + ": expected true/false, got '" + *v + "'");
  }

  void only(std::initializer_list<std::string_view> allowed, std::string_view prefix = {}) const {
    for (const auto& [k, v] : items()) {
      if (!prefix.empty() && k.starts_with(prefix)) continue;
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
        throw ConfigError("[" + name_ + "] unknown key '" + k + "'");
    }
  }

 private:
  const pt::ptree* tree_;
  std::string name_;
};

Section section(const pt::ptree& root, const std::string& name) {
  auto child = root.get_child_optional(pt::ptree::path_type(name, '\0'));
  return Section(child ? &*child : nullptr, name);
}

}  // namespace

void ExperimentConfig::set_seed(std::uint64_t s) {
  seed = s;
  split.seed = substream_seed(s, "split");
  hp.seed = s;
}

bool ExperimentConfig::wants(const std::string& model) const {
  return std::find(models.begin(), models.end(), model) != models.end();
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream o;
  auto num = [](double v) { return text::format_double(v); };
  o << "schema=" << schema_path.filename().string() << '\n';
  for (const auto& [et, p] : edge_files) o << "edge." << et << '=' << p.filename().string() << '\n';
  o << "rating_edge=" << rating_edge << '\n'
    << "kcore=" << kcore << '\n'
    << "duplicates=" << (duplicates == DuplicatePolicy::reject ? "reject" : "keep_last") << '\n'
    << "seed=" << seed << '\n'
    << "split=" << split.to_string() << '\n'
    << "models=";
  for (std::size_t i = 0; i < models.size(); ++i) o << (i ? "," : "") << models[i];
  o << '\n'
    << "max_k=" << max_k << '\n'
    << "us_threshold=" << num(us_threshold) << '\n'
    << "method=" << to_string(method) << '\n'
    << "walks_per_start=" << budget.walks_per_start << '\n'
    << "max_retries=" << budget.max_retries << '\n'
    << "include_direct=" << include_direct << '\n'
    << "entry_cap=" << num(entry_cap) << '\n'
    << "max_steps=" << max_steps << '\n';
  for (const auto& mp : metapaths) o << "metapath." << mp.label << '=' << mp.to_literal() << '\n';
  if (pruning.kind == PruningPolicy::Kind::threshold)
    o << "pruning.threshold=" << num(pruning.tau) << '\n';
  else
    o << "pruning.top_m=" << pruning.m << '\n';
  o << "dim=" << hp.dim << "\nlr=" << num(hp.lr) << "\nreg=" << num(hp.reg) << "\nepochs=" << hp.epochs
    << "\nneg_samples=" << hp.neg_samples << "\ndefault_weight=" << num(hp.default_weight) << '\n';
  for (const auto& [label, w] : hp.relation_weights) o << "weight." << label << '=' << num(w) << '\n';
  o << "alpha=" << num(baseline.alpha) << "\nbeta=" << num(baseline.beta) << "\nlambda=" << num(baseline.lambda)
    << "\ntune=" << tune << '\n';
  return o.str();
}

std::string ExperimentConfig::hash() const { return text::hex64(text::fnv1a(canonical())); }

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  static const std::set<std::string> known{"data",    "edges",   "experiment", "generation",
                                           "metapaths", "pruning", "dmf",        "baseline"};
  for (const auto& [name, sub] : root) {
    if (!known.count(name)) throw ConfigError("unknown config section [" + name + "]");
    if (sub.empty() && !sub.data().empty()) throw ConfigError("key '" + name + "' outside of any section");
  }

  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };

  auto data = section(root, "data");
  data.only({"schema", "rating_edge", "kcore", "duplicates"});
  cfg.schema_path = resolve(data.required("schema"));
  cfg.rating_edge = data.required("rating_edge");
  cfg.kcore = data.uint("kcore", 0);
  const auto dup = data.str("duplicates", "reject");
  if (dup == "reject")
    cfg.duplicates = DuplicatePolicy::reject;
  else if (dup == "keep_last")
    cfg.duplicates = DuplicatePolicy::keep_last;
  else
    throw ConfigError("[data] duplicates must be reject or keep_last");

  for (const auto& [et, p] : section(root, "edges").items()) cfg.edge_files[et] = resolve(p);
  if (cfg.edge_files.empty()) throw ConfigError("[edges] lists no edge files");

  auto exp = section(root, "experiment");
  exp.only({"seed", "split", "models", "output", "workers", "max_k", "us_threshold"});
  cfg.seed = exp.uint("seed", 42);
  cfg.split = SplitSpec::parse(exp.str("split", "kfold:5"), 0);
  cfg.models.clear();
  const std::string model_list = exp.str("models", "dmf");
  for (auto m : text::split(model_list, ',')) {
    std::string name(text::trim(m));
    if (std::find(std::begin(kModelNames), std::end(kModelNames), name) == std::end(kModelNames))
      throw ConfigError("[experiment] unknown model '" + name + "'");
    if (!cfg.wants(name)) cfg.models.push_back(name);
  }
  cfg.output = exp.str("output", "out");
  if (const char* env = std::getenv("HINREC_OUT"); env && *env) cfg.output = env;
  if (cfg.output.is_relative()) cfg.output = base_dir / cfg.output;
  cfg.workers = static_cast<int>(exp.uint("workers", 0));
  cfg.max_k = exp.uint("max_k", 10);
  if (cfg.max_k < 1) throw ConfigError("[experiment] max_k must be >= 1");
  cfg.us_threshold = exp.real("us_threshold", 3.0);

  auto gen = section(root, "generation");
  gen.only({"method", "walks_per_start", "max_retries", "include_direct", "entry_cap", "max_steps"});
  cfg.method = parse_generation_method(gen.str("method", "sampled"));
  if (cfg.method == GenerationMethod::direct) throw ConfigError("[generation] method must be full or sampled");
  const auto s = gen.uint("walks_per_start", 100);
  if (s < 1 || s > UINT32_MAX) throw ConfigError("[generation] walks_per_start must be >= 1");
  cfg.budget.walks_per_start = static_cast<std::uint32_t>(s);
  cfg.budget.max_retries = static_cast<std::uint32_t>(gen.uint("max_retries", 5));
  cfg.include_direct = gen.boolean("include_direct", true);
  cfg.entry_cap = gen.real("entry_cap", 2e8);
  cfg.max_steps = gen.uint("max_steps", kDefaultMaxSteps);

  std::set<std::string> labels;
  for (const auto& [label, literal] : section(root, "metapaths").items()) {
    MetaPath mp = MetaPath::parse(literal);
    mp.label = label;
    if (!labels.insert(label).second) throw ConfigError("duplicate meta-path label '" + label + "'");
    cfg.metapaths.push_back(std::move(mp));
  }

  auto prune = section(root, "pruning");
  prune.only({"threshold", "top_m"});
  if (prune.raw("threshold") && prune.raw("top_m")) throw ConfigError("[pruning] set threshold or top_m, not both");
  if (prune.raw("top_m"))
    cfg.pruning = PruningPolicy::top(prune.uint("top_m", 1));
  else
    cfg.pruning = PruningPolicy::threshold(prune.real("threshold", 0.1));
  if (cfg.pruning.kind == PruningPolicy::Kind::threshold && !(cfg.pruning.tau >= 0 && cfg.pruning.tau <= 1))
    throw ConfigError("[pruning] threshold must lie in [0,1]");
  if (cfg.pruning.kind == PruningPolicy::Kind::top_m && cfg.pruning.m < 1)
    throw ConfigError("[pruning] top_m must be >= 1");

  auto dmf = section(root, "dmf");
  dmf.only({"dim", "lr", "reg", "epochs", "neg_samples", "default_weight"}, "weight.");
  cfg.hp.dim = dmf.uint("dim", cfg.hp.dim);
  cfg.hp.lr = dmf.real("lr", cfg.hp.lr);
  cfg.hp.reg = dmf.real("reg", cfg.hp.reg);
  cfg.hp.epochs = dmf.uint("epochs", cfg.hp.epochs);
  cfg.hp.neg_samples = dmf.uint("neg_samples", cfg.hp.neg_samples);
  cfg.hp.default_weight = dmf.real("default_weight", cfg.hp.default_weight);
  for (const auto& [k, v] : dmf.items()) {
    if (!k.starts_with("weight.")) continue;
    auto w = text::parse_double(v);
    if (!w) throw ConfigError("[dmf] " + k + ": expected a number");
    cfg.hp.relation_weights[k.substr(7)] = *w;
  }

  auto base = section(root, "baseline");
  base.only({"alpha", "beta", "lambda", "tune"});
  cfg.baseline.alpha = base.real("alpha", 1.0);
  cfg.baseline.beta = base.real("beta", 0.0);
  cfg.baseline.lambda = base.real("lambda", 0.5);
  cfg.tune = base.boolean("tune", true);

  cfg.set_seed(cfg.seed);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file.string());
  return parse_config(in, file.parent_path());
}

void validate_config(const ExperimentConfig& cfg, const NetworkSchema& schema) {
  auto rating = schema.find_edge_type(cfg.rating_edge);
  if (!rating) throw ConfigError("rating_edge '" + cfg.rating_edge + "' is not declared in the schema");
  if (!cfg.edge_files.count(cfg.rating_edge)) throw ConfigError("[edges] has no file for the rating edge");
  for (const auto& [et, path] : cfg.edge_files) {
    if (!schema.find_edge_type(et)) throw ConfigError("[edges] " + et + " is not declared in the schema");
    if (!std::filesystem::exists(path)) throw ConfigError("edge file " + path.string() + " does not exist");
  }
  for (const auto& mp : cfg.metapaths) {
    if (auto err = validate_metapath(mp, schema, cfg.max_steps))
      throw ConfigError("meta-path " + mp.label + ": " + err->what());
    const auto r = resolve_metapath(mp, schema, cfg.max_steps);
    if (r.source_type() != schema.edge_src(*rating))
      throw ConfigError("meta-path " + mp.label + " must start at the rating edge's source type");
    const auto weighted = std::count_if(r.steps.begin(), r.steps.end(), [](const ResolvedStep& s) { return s.weighted; });
    if (weighted > 1) throw ConfigError("meta-path " + mp.label + " has more than one weighted edge type");
    if (mp.label == cfg.rating_edge || cfg.edge_files.count(mp.label))
      throw ConfigError("meta-path label " + mp.label + " collides with an edge type name");
  }
}

}  // namespace hinrec
