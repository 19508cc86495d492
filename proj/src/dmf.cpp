#include "hinrec/dmf.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>

#include "hinrec/error.hpp"
#include "hinrec/rng.hpp"
#include "hinrec/text.hpp"

namespace hinrec {

double Hyperparams::weight_of(std::string_view label) const {
  auto it = relation_weights.find(std::string(label));
  return it == relation_weights.end() ? default_weight : it->second;
}

void Hyperparams::validate(std::string_view target_label) const {
  if (dim < 1) throw ConfigError("dim must be >= 1");
  if (!(lr > 0)) throw ConfigError("lr must be > 0");
  if (!(reg >= 0)) throw ConfigError("reg must be >= 0");
  if (!(default_weight >= 0)) throw ConfigError("relation weights must be >= 0");
  for (const auto& [label, w] : relation_weights)
    if (!(w >= 0)) throw ConfigError("relation weight of '" + label + "' must be >= 0");
  if (!(weight_of(target_label) > 0)) throw ConfigError("target relation weight must be > 0");
}

const FactorMatrix& FactorModel::at(const std::string& type) const {
  auto it = factors.find(type);
  if (it == factors.end()) throw LookupError("model has no factors for entity type '" + type + "'");
  return it->second;
}

FactorMatrix& FactorModel::at(const std::string& type) {
  auto it = factors.find(type);
  if (it == factors.end()) throw LookupError("model has no factors for entity type '" + type + "'");
  return it->second;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// -ln sigma(x) without overflow.
double bpr_loss(double x) { return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double FactorModel::score(NodeIndex user, NodeIndex item) const {
  return dot(at(user_type).row(user), at(item_type).row(item));
}

double FactorModel::score(const std::string& src_type, NodeIndex a, const std::string& dst_type, NodeIndex b) const {
  return dot(at(src_type).row(a), at(dst_type).row(b));
}

FactorModel init_model(const RelationMatrix& target, std::span<const RelationMatrix> aux, const Hyperparams& hp) {
  hp.validate(target.label());
  std::map<std::string, std::size_t> universe;
  auto note = [&](const std::string& type, std::size_t n, const std::string& label) {
    auto [it, inserted] = universe.emplace(type, n);
    if (!inserted && it->second != n)
      throw ConfigError("entity type collision: '" + type + "' has " + std::to_string(it->second) +
                        " entities elsewhere but " + std::to_string(n) + " in relation '" + label + "'");
  };
  note(target.src_type(), target.src_universe(), target.label());
  note(target.dst_type(), target.dst_universe(), target.label());
  for (const auto& r : aux) {
    note(r.src_type(), r.src_universe(), r.label());
    note(r.dst_type(), r.dst_universe(), r.label());
  }

  FactorModel model;
  model.target_label = target.label();
  model.user_type = target.src_type();
  model.item_type = target.dst_type();
  model.hp = hp;
  const std::uint64_t init_seed = substream_seed(hp.seed, "init");
  const double scale = 0.1 / std::sqrt(static_cast<double>(hp.dim));
  for (const auto& [type, n] : universe) {
    FactorMatrix m(n, hp.dim);
    Rng rng = make_rng(init_seed, text::fnv1a(type));
    std::normal_distribution<double> dist(0.0, scale);
    for (double& v : m.data()) v = dist(rng);
    model.factors.emplace(type, std::move(m));
  }
  return model;
}

double bpr_step(FactorMatrix& src, FactorMatrix& dst, const TrainingTriple& t, double alpha, double lr, double reg) {
  const std::size_t dim = src.dim();
  // Copies keep the update well-defined when src and dst alias.
  thread_local std::vector<double> fa, fp, fn;
  fa.assign(src.row(t.src).begin(), src.row(t.src).end());
  fp.assign(dst.row(t.pos).begin(), dst.row(t.pos).end());
  fn.assign(dst.row(t.neg).begin(), dst.row(t.neg).end());
  const double x = dot(fa, fp) - dot(fa, fn);
  const double g = alpha * sigmoid(-x);
  auto a = src.row(t.src);
  auto p = dst.row(t.pos);
  auto n = dst.row(t.neg);
  for (std::size_t k = 0; k < dim; ++k) {
    a[k] = fa[k] + lr * (g * (fp[k] - fn[k]) - reg * fa[k]);
    p[k] = fp[k] + lr * (g * fa[k] - reg * fp[k]);
    n[k] = fn[k] + lr * (-g * fa[k] - reg * fn[k]);
  }
  return x;
}

double bpr_step(FactorModel& model, const RelationMatrix& rel, const TrainingTriple& t, double alpha, double lr,
                double reg) {
  if (t.src >= rel.src_universe() || t.pos >= rel.dst_universe() || t.neg >= rel.dst_universe())
    throw LookupError("bpr_step: entity index outside relation '" + rel.label() + "'");
  if (!rel.contains(t.src, t.pos)) throw Error("bpr_step: positive pair absent from '" + rel.label() + "'");
  if (rel.contains(t.src, t.neg)) throw Error("bpr_step: negative pair present in '" + rel.label() + "'");
  return bpr_step(model.at(rel.src_type()), model.at(rel.dst_type()), t, alpha, lr, reg);
}

FactorModel train_dmf(const RelationMatrix& target, std::span<const RelationMatrix> aux, const Hyperparams& hp) {
  FactorModel model = init_model(target, aux, hp);

  std::vector<const RelationMatrix*> rels{&target};
  for (const auto& r : aux) rels.push_back(&r);
  std::vector<double> mass;
  std::vector<FactorMatrix*> src_f, dst_f;
  std::size_t steps_per_epoch = 0;
  for (const auto* r : rels) {
    if (r->empty()) throw TrainingError("relation '" + r->label() + "' has no positives");
    const double alpha = hp.weight_of(r->label());
    mass.push_back(alpha * static_cast<double>(r->size()));
    if (alpha > 0) steps_per_epoch += r->size();
    src_f.push_back(&model.at(r->src_type()));
    dst_f.push_back(&model.at(r->dst_type()));
  }

  Rng rng = make_rng(substream_seed(hp.seed, "negatives"));
  std::discrete_distribution<std::size_t> pick_relation(mass.begin(), mass.end());
  constexpr int kMaxRejections = 100;
  constexpr int kMaxResamples = 1000;

  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    double loss = 0;
    std::size_t count = 0;
    for (std::size_t step = 0; step < steps_per_epoch; ++step) {
      const std::size_t ri = pick_relation(rng);
      const RelationMatrix& rel = *rels[ri];
      const double alpha = hp.weight_of(rel.label());
      const auto entries = rel.entries();
      for (int resample = 0;; ++resample) {
        if (resample == kMaxResamples)
          throw TrainingError("relation '" + rel.label() + "': no negative found for repeated sources");
        const RelationEntry& pos = entries[uniform_index(rng, entries.size())];
        std::vector<NodeIndex> negs;
        for (std::size_t ns = 0; ns < hp.neg_samples; ++ns) {
          for (int tries = 0; tries < kMaxRejections; ++tries) {
            const auto b = static_cast<NodeIndex>(uniform_index(rng, rel.dst_universe()));
            if (!rel.contains(pos.src, b)) {
              negs.push_back(b);
              break;
            }
          }
        }
        if (negs.size() < hp.neg_samples) continue;
        for (NodeIndex neg : negs) {
          const double x = bpr_step(*src_f[ri], *dst_f[ri], {pos.src, pos.dst, neg}, alpha, hp.lr, hp.reg);
          loss += bpr_loss(x);
          ++count;
        }
        break;
      }
    }
    const double mean = count ? loss / static_cast<double>(count) : 0.0;
    if (!std::isfinite(mean)) throw TrainingError("training diverged in epoch " + std::to_string(epoch));
    model.loss_trace.push_back(mean);
  }
  return model;
}

std::vector<std::pair<NodeIndex, double>> recommend_topk(const FactorModel& model, NodeIndex user, std::size_t k,
                                                         std::span<const NodeIndex> exclusions) {
  const FactorMatrix& users = model.at(model.user_type);
  const FactorMatrix& items = model.at(model.item_type);
  if (user >= users.rows()) throw LookupError("recommend_topk: unknown user index " + std::to_string(user));
  std::vector<std::pair<NodeIndex, double>> cand;
  cand.reserve(items.rows());
  auto fu = users.row(user);
  std::size_t x = 0;
  for (NodeIndex i = 0; i < items.rows(); ++i) {
    while (x < exclusions.size() && exclusions[x] < i) ++x;
    if (x < exclusions.size() && exclusions[x] == i) continue;
    cand.emplace_back(i, dot(fu, items.row(i)));
  }
  const std::size_t n = std::min(k, cand.size());
  std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(n), cand.end(),
                    [](const auto& a, const auto& b) { return a.second != b.second ? a.second > b.second : a.first < b.first; });
  cand.resize(n);
  return cand;
}

std::vector<std::vector<NodeIndex>> recommend_all(const FactorModel& model, std::size_t k,
                                                  const std::vector<std::vector<NodeIndex>>& exclusions,
                                                  ParallelOptions par) {
  const std::size_t n_users = model.at(model.user_type).rows();
  std::vector<std::vector<NodeIndex>> out(n_users);
  const int threads = par.workers > 0 ? par.workers : omp_get_max_threads();
#pragma omp parallel for num_threads(threads) schedule(dynamic, 16)
  for (std::size_t u = 0; u < n_users; ++u) {
    std::span<const NodeIndex> ex;
    if (u < exclusions.size()) ex = exclusions[u];
    for (const auto& [item, s] : recommend_topk(model, static_cast<NodeIndex>(u), k, ex)) out[u].push_back(item);
  }
  return out;
}

void write_model(const FactorModel& model, const HeteroGraph& g, std::ostream& out) {
  const auto& hp = model.hp;
  out << "# hinrec-model\t1\n"
      << "# dim\t" << hp.dim << '\n'
      << "# target\t" << model.target_label << '\t' << model.user_type << '\t' << model.item_type << '\n'
      << "# hp\tlr=" << text::format_double(hp.lr) << "\treg=" << text::format_double(hp.reg)
      << "\tepochs=" << hp.epochs << "\tneg_samples=" << hp.neg_samples << "\tseed=" << hp.seed
      << "\tdefault_weight=" << text::format_double(hp.default_weight) << '\n';
  for (const auto& [label, w] : hp.relation_weights) out << "# weight\t" << label << '\t' << text::format_double(w) << '\n';
  for (const auto& [type, m] : model.factors) {
    const TypeId t = g.schema().node_type_id(type);
    if (g.node_count(t) != m.rows())
      throw Error("write_model: graph has " + std::to_string(g.node_count(t)) + " '" + type + "' nodes, model " +
                  std::to_string(m.rows()));
    out << '[' << type << "]\t" << m.rows() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
      out << g.node_id(t, static_cast<NodeIndex>(r));
      for (double v : m.row(r)) out << '\t' << text::format_double(v);
      out << '\n';
    }
  }
}

FactorModel read_model(std::istream& in, const HeteroGraph& g) {
  FactorModel model;
  std::string raw;
  std::size_t lineno = 0;
  FactorMatrix* current = nullptr;
  TypeId current_type = 0;
  auto num = [&](std::string_view s) {
    auto v = text::parse_double(s);
    if (!v) throw LoadError("malformed number '" + std::string(s) + "'", lineno);
    return *v;
  };
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (line.empty()) continue;
    auto f = text::split(line, '\t');
    if (line.front() == '#') {
      auto key = text::trim(f[0].substr(1));
      if (key == "dim" && f.size() == 2) {
        model.hp.dim = static_cast<std::size_t>(num(f[1]));
      } else if (key == "target" && f.size() == 4) {
        model.target_label = f[1];
        model.user_type = f[2];
        model.item_type = f[3];
      } else if (key == "hp") {
        for (std::size_t i = 1; i < f.size(); ++i) {
          auto kv = text::split(f[i], '=');
          if (kv.size() != 2) continue;
          if (kv[0] == "lr") model.hp.lr = num(kv[1]);
          else if (kv[0] == "reg") model.hp.reg = num(kv[1]);
          else if (kv[0] == "epochs") model.hp.epochs = static_cast<std::size_t>(num(kv[1]));
          else if (kv[0] == "neg_samples") model.hp.neg_samples = static_cast<std::size_t>(num(kv[1]));
          else if (kv[0] == "seed") model.hp.seed = text::parse_uint(kv[1]).value_or(0);
          else if (kv[0] == "default_weight") model.hp.default_weight = num(kv[1]);
        }
      } else if (key == "weight" && f.size() == 3) {
        model.hp.relation_weights[std::string(f[1])] = num(f[2]);
      }
      continue;
    }
    if (line.front() == '[') {
      auto close = line.find(']');
      if (close == std::string_view::npos) throw LoadError("malformed block header", lineno);
      std::string type(line.substr(1, close - 1));
      current_type = g.schema().node_type_id(type);
      current = &model.factors.emplace(type, FactorMatrix(g.node_count(current_type), model.hp.dim)).first->second;
      continue;
    }
    if (!current) throw LoadError("factor row outside a type block", lineno);
    if (f.size() != model.hp.dim + 1) throw LoadError("factor row has wrong width", lineno);
    auto idx = g.find_node(current_type, f[0]);
    if (!idx) throw LoadError("unknown entity '" + std::string(f[0]) + "'", lineno);
    auto row = current->row(*idx);
    for (std::size_t k = 0; k < model.hp.dim; ++k) row[k] = num(f[k + 1]);
  }
  return model;
}

void write_loss_trace(const FactorModel& model, std::ostream& out) {
  out << "epoch,mean_loss\n";
  for (std::size_t e = 0; e < model.loss_trace.size(); ++e)
    out << e << ',' << text::format_double(model.loss_trace[e]) << '\n';
}

}  // namespace hinrec
