#include "hinrec/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hinrec/error.hpp"
#include "hinrec/rng.hpp"
#include "hinrec/text.hpp"

namespace hinrec {

namespace pt = boost::property_tree;

namespace {

const SyntheticNodeSpec& node_spec(const SyntheticSpec& spec, const std::string& name) {
  for (const auto& n : spec.nodes)
    if (n.name == name) return n;
  throw ConfigError("synthetic edge refers to unknown node type '" + name + "'");
}

const SyntheticEdgeSpec* rating_edge(const SyntheticSpec& spec) {
  for (const auto& e : spec.edges)
    if (e.rating) return &e;
  return nullptr;
}

double circular_distance(double a, double b) {
  const double d = std::fabs(a - b);
  return std::min(d, 2 * std::numbers::pi - d);
}

std::string node_name(const SyntheticNodeSpec& n, std::size_t i) { return n.abbrev + std::to_string(i); }

// `k` distinct values from [0, n), `first` (if any) leading.
std::vector<std::size_t> distinct(Rng& rng, std::size_t n, std::size_t k, std::optional<std::size_t> first = {}) {
  std::vector<std::size_t> out;
  std::set<std::size_t> seen;
  if (first) {
    out.push_back(*first);
    seen.insert(*first);
  }
  while (out.size() < k) {
    const std::size_t v = uniform_index(rng, n);
    if (seen.insert(v).second) out.push_back(v);
  }
  return out;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (nodes.empty()) throw ConfigError("synthetic spec declares no node types");
  std::set<std::string> names;
  for (const auto& n : nodes) {
    if (n.count == 0) throw ConfigError("node type '" + n.name + "' needs a positive count");
    if (!names.insert(n.name).second) throw ConfigError("duplicate node type '" + n.name + "'");
  }
  std::size_t ratings = 0;
  for (const auto& e : edges) {
    const auto& dst = node_spec(*this, e.dst);
    node_spec(*this, e.src);
    if (e.per_src < 1) throw ConfigError("edge '" + e.name + "': branching must be >= 1");
    if (e.per_src > dst.count)
      throw ConfigError("edge '" + e.name + "': branching " + std::to_string(e.per_src) + " exceeds the " +
                        std::to_string(dst.count) + " nodes of type '" + dst.name + "'");
    if (e.rating) {
      ++ratings;
      if (!(e.range.min <= e.range.max)) throw ConfigError("edge '" + e.name + "': empty rating range");
      if (e.dist == RatingDist::point && !e.range.contains(e.point))
        throw ConfigError("edge '" + e.name + "': point rating outside the range");
    }
  }
  if (ratings > 1) throw ConfigError("synthetic spec may declare at most one rating edge");
  if (planted != Planted::none) {
    const auto* r = rating_edge(*this);
    if (!r) throw ConfigError("planted structure needs a rating edge");
    if (planted == Planted::blocks && blocks < 1) throw ConfigError("blocks must be >= 1");
    if (!(in_group_prob >= 0 && in_group_prob <= 1)) throw ConfigError("in_group_prob must lie in [0,1]");
    if (planted == Planted::ring && !(ring_width > 0 && ring_width <= 1))
      throw ConfigError("ring_width must lie in (0,1]");
    for (const auto& e : edges)
      if (e.aligned && e.src != r->dst)
        throw ConfigError("aligned edge '" + e.name + "' must start at the rated node type");
  }
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  SyntheticData data;
  for (const auto& n : spec.nodes) data.schema.add_node_type(n.name, n.abbrev);
  for (const auto& e : spec.edges) {
    EdgeTypeDef def{e.name, e.src, e.dst, std::nullopt};
    if (e.rating) def.weight_range = e.range;
    data.schema.add_edge_type(def);
  }

  const auto* rating = rating_edge(spec);
  std::vector<double> user_angle, item_angle;
  if (rating && spec.planted != Planted::none) {
    const std::size_t n_users = node_spec(spec, rating->src).count;
    const std::size_t n_items = node_spec(spec, rating->dst).count;
    if (spec.planted == Planted::blocks) {
      for (std::size_t u = 0; u < n_users; ++u) data.user_group.push_back(u % spec.blocks);
      for (std::size_t i = 0; i < n_items; ++i) data.item_group.push_back(i % spec.blocks);
    } else {
      Rng rng = make_rng(substream_seed(spec.seed, "angles"));
      for (std::size_t u = 0; u < n_users; ++u) user_angle.push_back(uniform_real(rng, 2 * std::numbers::pi));
      for (std::size_t i = 0; i < n_items; ++i) item_angle.push_back(uniform_real(rng, 2 * std::numbers::pi));
      // Groups for aligned attributes: angular sectors, assigned per edge below.
    }
  }

  auto in_group = [&](std::size_t u, std::size_t i) {
    if (spec.planted == Planted::blocks) return data.user_group[u] == data.item_group[i];
    return circular_distance(user_angle[u], item_angle[i]) <= spec.ring_width * std::numbers::pi;
  };

  for (std::size_t ei = 0; ei < spec.edges.size(); ++ei) {
    const auto& e = spec.edges[ei];
    const auto& src = node_spec(spec, e.src);
    const auto& dst = node_spec(spec, e.dst);
    Rng rng = make_rng(substream_seed(spec.seed, "edge:" + e.name));

    for (std::size_t s = 0; s < src.count; ++s) {
      std::vector<std::size_t> targets;
      std::vector<bool> own;
      if (e.rating && spec.planted != Planted::none) {
        std::vector<std::size_t> inside, outside;
        for (std::size_t i = 0; i < dst.count; ++i) (in_group(s, i) ? inside : outside).push_back(i);
        std::set<std::size_t> seen;
        while (targets.size() < e.per_src) {
          const bool want_in = std::bernoulli_distribution(spec.in_group_prob)(rng);
          auto& pool = (want_in && !inside.empty()) || outside.empty() ? inside : outside;
          // Fall back to the other pool once one is exhausted.
          std::size_t left = 0;
          for (std::size_t v : pool) left += !seen.count(v);
          auto& from = left ? pool : (&pool == &inside ? outside : inside);
          std::size_t v;
          do v = from[uniform_index(rng, from.size())];
          while (seen.count(v));
          seen.insert(v);
          targets.push_back(v);
          own.push_back(in_group(s, v));
        }
      } else {
        std::optional<std::size_t> first;
        if (e.aligned) {
          if (spec.planted == Planted::blocks) {
            first = data.item_group[s] * dst.count / spec.blocks;
          } else if (spec.planted == Planted::ring) {
            const auto sector = static_cast<std::size_t>(item_angle[s] / (2 * std::numbers::pi) *
                                                         static_cast<double>(dst.count));
            first = std::min(sector, dst.count - 1);
          }
        }
        targets = distinct(rng, dst.count, e.per_src, first);
        own.assign(targets.size(), false);
      }

      for (std::size_t t = 0; t < targets.size(); ++t) {
        EdgeRecord rec{e.name, node_name(src, s), node_name(dst, targets[t]), std::nullopt, 0};
        if (e.rating) {
          double w;
          if (e.dist == RatingDist::point) {
            w = e.point;
          } else {
            const auto lo = static_cast<long>(std::ceil(e.range.min));
            const auto hi = static_cast<long>(std::floor(e.range.max));
            w = lo <= hi ? static_cast<double>(std::uniform_int_distribution<long>(lo, hi)(rng))
                         : std::uniform_real_distribution<double>(e.range.min, e.range.max)(rng);
            if (own[t]) w = std::min(e.range.max, w + spec.shift);
          }
          rec.weight = w;
        }
        data.records.push_back(std::move(rec));
      }
    }
  }
  if (spec.planted == Planted::ring && rating) {
    const std::size_t sectors = std::max<std::size_t>(1, spec.blocks);
    auto sector = [&](double a) {
      return std::min(sectors - 1, static_cast<std::size_t>(a / (2 * std::numbers::pi) * static_cast<double>(sectors)));
    };
    for (double a : user_angle) data.user_group.push_back(sector(a));
    for (double a : item_angle) data.item_group.push_back(sector(a));
  }
  return data;
}

SyntheticSpec SyntheticSpec::parse(std::istream& in) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("synthetic spec line " + std::to_string(e.line()) + ": " + e.message());
  }
  auto get = [](const pt::ptree& t, const std::string& key) -> std::optional<std::string> {
    for (const auto& [k, v] : t)
      if (k == key) return std::string(text::trim(v.data()));
    return std::nullopt;
  };
  auto num = [&](const pt::ptree& t, const std::string& key, double fallback) {
    auto v = get(t, key);
    if (!v) return fallback;
    auto d = text::parse_double(*v);
    if (!d) throw ConfigError("synthetic spec: " + key + " must be a number");
    return *d;
  };

  SyntheticSpec spec;
  for (const auto& [name, sec] : root) {
    if (name == "synth") {
      spec.seed = static_cast<std::uint64_t>(num(sec, "seed", 1));
      const auto mode = get(sec, "planted").value_or("none");
      if (mode == "none") spec.planted = Planted::none;
      else if (mode == "blocks") spec.planted = Planted::blocks;
      else if (mode == "ring") spec.planted = Planted::ring;
      else throw ConfigError("synthetic spec: planted must be none, blocks or ring");
      spec.blocks = static_cast<std::size_t>(num(sec, "blocks", 2));
      spec.in_group_prob = num(sec, "in_group_prob", spec.in_group_prob);
      spec.shift = num(sec, "shift", spec.shift);
      spec.ring_width = num(sec, "ring_width", spec.ring_width);
    } else if (name == "nodes") {
      for (const auto& [type, v] : sec) {
        auto parts = text::split(text::trim(v.data()), ' ');
        auto count = parts.empty() ? std::nullopt : text::parse_uint(parts[0]);
        if (!count) throw ConfigError("synthetic spec: node type " + type + " needs a count");
        std::string abbrev = parts.size() > 1 ? std::string(parts.back()) : type.substr(0, 1);
        spec.nodes.push_back({type, abbrev, *count});
      }
    } else if (name.starts_with("edge.")) {
      SyntheticEdgeSpec e;
      e.name = name.substr(5);
      e.src = get(sec, "src").value_or("");
      e.dst = get(sec, "dst").value_or("");
      const auto kind = get(sec, "kind").value_or("attribute");
      if (kind != "rating" && kind != "attribute") throw ConfigError("edge " + e.name + ": kind must be rating or attribute");
      e.rating = kind == "rating";
      e.per_src = static_cast<std::size_t>(num(sec, "per_src", 1));
      if (auto r = get(sec, "range")) {
        auto p = text::split(*r, ',');
        auto lo = p.size() == 2 ? text::parse_double(p[0]) : std::nullopt;
        auto hi = p.size() == 2 ? text::parse_double(p[1]) : std::nullopt;
        if (!lo || !hi) throw ConfigError("edge " + e.name + ": range must be min,max");
        e.range = {*lo, *hi};
      }
      const auto dist = get(sec, "dist").value_or("uniform");
      if (dist != "uniform" && dist != "point") throw ConfigError("edge " + e.name + ": dist must be uniform or point");
      e.dist = dist == "point" ? RatingDist::point : RatingDist::uniform;
      e.point = num(sec, "point", e.range.max);
      e.aligned = get(sec, "aligned").value_or("false") == "true";
      spec.edges.push_back(std::move(e));
    } else if (name == "metapaths") {
      for (const auto& [label, v] : sec) {
        MetaPath mp = MetaPath::parse(v.data());
        mp.label = label;
        spec.metapaths.push_back(std::move(mp));
      }
    } else {
      throw ConfigError("synthetic spec: unknown section [" + name + "]");
    }
  }
  spec.validate();
  return spec;
}

SyntheticSpec synthetic_preset(std::string_view name) {
  SyntheticSpec s;
  auto rating = [](std::string n, std::string src, std::string dst, std::size_t per) {
    SyntheticEdgeSpec e;
    e.name = std::move(n);
    e.src = std::move(src);
    e.dst = std::move(dst);
    e.rating = true;
    e.per_src = per;
    return e;
  };
  auto attr = [](std::string n, std::string src, std::string dst, std::size_t per, bool aligned = false) {
    SyntheticEdgeSpec e;
    e.name = std::move(n);
    e.src = std::move(src);
    e.dst = std::move(dst);
    e.per_src = per;
    e.aligned = aligned;
    return e;
  };
  if (name == "movielens") {
    s.nodes = {{"user", "u", 60}, {"movie", "m", 80}, {"genre", "g", 6}, {"director", "d", 50}, {"actor", "a", 120}};
    s.edges = {rating("um", "user", "movie", 12), attr("mg", "movie", "genre", 2, true),
               attr("md", "movie", "director", 1), attr("ma", "movie", "actor", 4)};
    s.planted = Planted::blocks;
    s.blocks = 3;
    for (const char* lit : {"um,>mg", "um,>mg,<mg", "um,>md,<md", "um,>ma,<ma"}) s.metapaths.push_back(MetaPath::parse(lit));
  } else if (name == "ring") {
    s.nodes = {{"user", "u", 50}, {"item", "i", 50}, {"sector", "s", 8}};
    s.edges = {rating("ui", "user", "item", 10), attr("is", "item", "sector", 1, true)};
    s.planted = Planted::ring;
    s.blocks = 8;
    s.ring_width = 0.3;
  } else if (name == "timing-high") {
    s.nodes = {{"user", "u", 10000}, {"movie", "m", 2000}, {"actor", "a", 300}};
    s.edges = {rating("um", "user", "movie", 20), attr("ma", "movie", "actor", 30)};
    s.metapaths.push_back(MetaPath::parse("um,>ma,<ma"));
  } else if (name == "timing-low") {
    s.nodes = {{"user", "u", 10000}, {"movie", "m", 2000}, {"director", "d", 1600}};
    s.edges = {rating("um", "user", "movie", 80), attr("md", "movie", "director", 1)};
    s.metapaths.push_back(MetaPath::parse("um,>md,<md"));
  } else {
    throw ConfigError("unknown synthetic preset '" + std::string(name) + "'");
  }
  return s;
}

void write_synthetic(const SyntheticSpec& spec, const SyntheticData& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "schema.txt");
    out << data.schema.to_text();
  }
  LoadOptions opts;
  HeteroGraph g = load_graph(data.schema, data.records, opts);
  for (TypeId et = 0; et < data.schema.edge_type_count(); ++et) {
    std::ofstream out(dir / (data.schema.edge_type(et).name + ".tsv"));
    write_edge_list(g, et, out);
  }

  std::ofstream cfg(dir / "experiment.ini");
  cfg << "[data]\nschema = schema.txt\n";
  if (const auto* r = rating_edge(spec)) cfg << "rating_edge = " << r->name << '\n';
  cfg << "kcore = 0\n\n[edges]\n";
  for (const auto& e : spec.edges) cfg << e.name << " = " << e.name << ".tsv\n";
  cfg << "\n[experiment]\nseed = " << spec.seed << "\nsplit = kfold:5\nmodels = dmf,dmf2,dmf3,dmf-ig,p3,rp3,hl\n"
      << "output = out\n\n[generation]\nmethod = sampled\nwalks_per_start = 100\n";
  if (!spec.metapaths.empty()) {
    cfg << "\n[metapaths]\n";
    for (const auto& mp : spec.metapaths) {
      const auto r = resolve_metapath(mp, data.schema);
      MetaPath bare = mp;
      bare.label.clear();
      cfg << r.label << " = " << bare.to_literal() << '\n';
    }
  }
}

}  // namespace hinrec
