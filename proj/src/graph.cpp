#include "qtgnn/graph.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "qtgnn/error.hpp"
#include "qtgnn/rng.hpp"

namespace qtgnn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::array<std::size_t, 3> sorted3(std::size_t a, std::size_t b, std::size_t c) {
  std::array<std::size_t, 3> v{a, b, c};
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

void PreprocessConfig::validate() const {
  if (window <= 0) throw ConfigError("preprocess window must be positive");
  if (!(filter_threshold >= 0.0 && filter_threshold < 1.0)) {
    throw ConfigError("filter threshold must lie in [0, 1)");
  }
}

std::optional<std::size_t> TransactionGraph::find(std::string_view id) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
  if (it == nodes.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - nodes.begin());
}

std::vector<std::pair<std::size_t, std::size_t>> TransactionGraph::edge_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(edges.size());
  for (const auto& e : edges) pairs.emplace_back(std::min(e.src, e.dst), std::max(e.src, e.dst));
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

std::vector<std::size_t> TransactionGraph::degrees() const {
  std::vector<std::size_t> deg(nodes.size(), 0);
  for (const auto& e : edges) {
    ++deg[e.src];
    ++deg[e.dst];
  }
  return deg;
}

void TransactionGraph::validate() const {
  const std::size_t n = nodes.size();
  if (!std::is_sorted(nodes.begin(), nodes.end()) ||
      std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end()) {
    throw ValidationError("node ids must be unique and sorted");
  }
  if (node_bias.size() != n) throw ValidationError("node bias vector has wrong size");
  for (const auto& e : edges) {
    if (e.src >= n || e.dst >= n) throw ValidationError("edge references a missing node");
    if (e.src == e.dst) throw ValidationError("self loop on node " + nodes[e.src]);
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw ValidationError("edge weight must be finite and non-negative");
    }
  }
  for (const auto& t : triangles) {
    if (t.i >= n || t.j >= n || t.k >= n) {
      throw ValidationError("triangle references a missing node");
    }
    if (t.i == t.j || t.j == t.k || t.i == t.k) {
      throw ValidationError("triangle vertices must be distinct");
    }
    if (!std::isfinite(t.weight)) throw ValidationError("triangle weight must be finite");
  }
}

void GraphBuilder::add_node(const std::string& id) { ids_.insert(id); }

void GraphBuilder::add_edge(const std::string& src, const std::string& dst, double weight,
                            std::int64_t timestamp, std::optional<Label> label) {
  ids_.insert(src);
  ids_.insert(dst);
  edges_.push_back({src, dst, weight, timestamp, label});
}

void GraphBuilder::add_triangle(const std::string& a, const std::string& b,
                                const std::string& c, double weight,
                                std::int64_t timestamp) {
  ids_.insert(a);
  ids_.insert(b);
  ids_.insert(c);
  triangles_.push_back({a, b, c, weight, timestamp});
}

TransactionGraph GraphBuilder::finish() const {
  TransactionGraph g;
  g.nodes.assign(ids_.begin(), ids_.end());
  g.node_bias.assign(g.nodes.size(), 0.0);
  auto index = [&](const std::string& id) { return *g.find(id); };
  for (const auto& e : edges_) {
    g.edges.push_back({index(e.src), index(e.dst), e.weight, e.timestamp, e.label});
  }
  for (const auto& t : triangles_) {
    const auto v = sorted3(index(t.a), index(t.b), index(t.c));
    g.triangles.push_back({v[0], v[1], v[2], t.weight, t.timestamp});
  }
  return g;
}

TransactionGraph parse_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  bool with_label = false;
  GraphBuilder builder;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto fields = split_csv(view);
    if (!have_header) {
      const bool base = fields.size() >= 4 && fields[0] == "src" && fields[1] == "dst" &&
                        fields[2] == "amount" && fields[3] == "timestamp";
      if (!base || fields.size() > 5 || (fields.size() == 5 && fields[4] != "label")) {
        throw ParseError(line_no, "expected header src,dst,amount,timestamp[,label]");
      }
      with_label = fields.size() == 5;
      have_header = true;
      continue;
    }
    const std::size_t expected = with_label ? 5 : 4;
    if (fields.size() != expected) {
      throw ParseError(line_no, "expected " + std::to_string(expected) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) throw ParseError(line_no, "empty account id");
    double amount = 0.0;
    if (!parse_number(fields[2], amount)) throw ParseError(line_no, "bad amount");
    std::int64_t ts = 0;
    if (!parse_number(fields[3], ts)) throw ParseError(line_no, "bad timestamp");
    if (!std::isfinite(amount)) throw ParseError(line_no, "non-finite amount");
    if (amount < 0.0) {
      throw ValidationError("line " + std::to_string(line_no) + ": negative amount");
    }
    if (fields[0] == fields[1]) {
      throw ValidationError("line " + std::to_string(line_no) + ": self transaction");
    }
    std::optional<Label> label;
    if (with_label && !fields[4].empty()) {
      if (fields[4] == "fraud" || fields[4] == "1") {
        label = Label::kFraud;
      } else if (fields[4] == "normal" || fields[4] == "0") {
        label = Label::kNormal;
      } else {
        throw ParseError(line_no, "label must be fraud/normal/1/0");
      }
    }
    builder.add_edge(std::string(fields[0]), std::string(fields[1]), amount, ts, label);
  }
  if (!have_header) throw ParseError(line_no == 0 ? 1 : line_no, "missing header");
  return builder.finish();
}

TransactionGraph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_edge_list(in);
}

TransactionGraph preprocess(const TransactionGraph& g, const PreprocessConfig& cfg) {
  if (g.preprocessed_with && *g.preprocessed_with == cfg) return g;
  cfg.validate();
  if (g.empty()) throw ArgumentError("cannot preprocess an empty graph");
  g.validate();

  TransactionGraph out;
  out.nodes = g.nodes;

  // Aggregate parallel edges inside each half-open window [t, t + window).
  std::map<std::tuple<std::size_t, std::size_t, std::int64_t>, Edge> edges;
  for (const auto& e : g.edges) {
    const std::int64_t w = floor_div(e.timestamp, cfg.window);
    auto [it, fresh] = edges.try_emplace({e.src, e.dst, w},
                                         Edge{e.src, e.dst, 0.0, w * cfg.window, std::nullopt});
    it->second.weight += e.weight;
    if (e.label) {
      if (!it->second.label || *e.label == Label::kFraud) it->second.label = e.label;
    }
  }
  std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::int64_t>, Triangle> tris;
  for (const auto& t : g.triangles) {
    const auto v = sorted3(t.i, t.j, t.k);
    const std::int64_t w = floor_div(t.timestamp, cfg.window);
    auto [it, fresh] =
        tris.try_emplace({v[0], v[1], v[2], w}, Triangle{v[0], v[1], v[2], 0.0, w * cfg.window});
    it->second.weight += t.weight;
  }
  for (auto& [key, e] : edges) out.edges.push_back(e);
  for (auto& [key, t] : tris) out.triangles.push_back(t);

  if (cfg.min_max_normalize && !out.edges.empty()) {
    const auto [lo, hi] = std::minmax_element(
        out.edges.begin(), out.edges.end(),
        [](const Edge& a, const Edge& b) { return a.weight < b.weight; });
    const double min_w = lo->weight;
    const double range = hi->weight - min_w;
    for (auto& e : out.edges) e.weight = range > 0.0 ? (e.weight - min_w) / range : 1.0;
  }

  const auto deg = out.degrees();
  const double total = static_cast<double>(std::accumulate(deg.begin(), deg.end(), std::size_t{0}));
  out.node_bias.resize(out.nodes.size());
  for (std::size_t i = 0; i < out.nodes.size(); ++i) {
    out.node_bias[i] = total > 0.0 ? static_cast<double>(deg[i]) / total
                                   : 1.0 / static_cast<double>(out.nodes.size());
  }

  std::erase_if(out.edges, [&](const Edge& e) { return e.weight <= cfg.filter_threshold; });
  out.preprocessed_with = cfg;
  return out;
}

TransactionGraph sample_subgraph(const TransactionGraph& g, double kappa, std::uint64_t seed) {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw ArgumentError("kappa must lie in (0, 1]");
  g.validate();
  const std::size_t m = g.edges.size();
  if (m == 0) return g;
  const double target = kappa * static_cast<double>(m);
  const std::size_t budget = static_cast<std::size_t>(std::ceil(target - 1e-9));
  if (budget >= m) return g;

  std::vector<char> chosen(m, 0);
  if (target < 1.0) {
    std::size_t best = 0;
    for (std::size_t e = 1; e < m; ++e) {
      if (g.edges[e].weight > g.edges[best].weight) best = e;
    }
    chosen[best] = 1;
  } else {
    const std::size_t n = g.nodes.size();
    std::vector<std::vector<std::size_t>> incident(n);
    for (std::size_t e = 0; e < m; ++e) {
      incident[g.edges[e].src].push_back(e);
      incident[g.edges[e].dst].push_back(e);
    }
    std::vector<std::size_t> by_centrality(n);
    std::iota(by_centrality.begin(), by_centrality.end(), 0);
    std::stable_sort(by_centrality.begin(), by_centrality.end(), [&](std::size_t a, std::size_t b) {
      return g.node_bias[a] > g.node_bias[b];
    });
    auto has_free_edge = [&](std::size_t v) {
      return std::any_of(incident[v].begin(), incident[v].end(),
                         [&](std::size_t e) { return !chosen[e]; });
    };
    auto restart_node = [&]() {
      for (std::size_t v : by_centrality) {
        if (has_free_edge(v)) return v;
      }
      return by_centrality.front();
    };

    Rng rng(seed);
    constexpr double kRestart = 0.15;
    std::size_t start = restart_node();
    std::size_t cur = start;
    std::size_t selected = 0;
    std::size_t idle = 0;
    while (selected < budget) {
      if (incident[cur].empty() || rng.bernoulli(kRestart)) cur = start;
      const auto& inc = incident[cur];
      double total = 0.0;
      for (std::size_t e : inc) total += g.edges[e].weight;
      std::size_t pick = inc.back();
      if (total > 0.0) {
        double r = rng.uniform() * total;
        for (std::size_t e : inc) {
          r -= g.edges[e].weight;
          if (r < 0.0) {
            pick = e;
            break;
          }
        }
      } else {
        pick = inc[rng.index(inc.size())];
      }
      if (!chosen[pick]) {
        chosen[pick] = 1;
        ++selected;
        idle = 0;
      } else if (++idle > 50 * m) {
        // The walk's component is exhausted; jump to the most central node
        // that still has unsampled transactions.
        start = restart_node();
        idle = 0;
      }
      cur = g.edges[pick].src == cur ? g.edges[pick].dst : g.edges[pick].src;
    }
  }

  std::vector<char> keep_node(g.nodes.size(), 0);
  for (std::size_t e = 0; e < m; ++e) {
    if (chosen[e]) keep_node[g.edges[e].src] = keep_node[g.edges[e].dst] = 1;
  }
  std::vector<std::size_t> remap(g.nodes.size(), 0);
  TransactionGraph out;
  double bias_total = 0.0;
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    if (!keep_node[v]) continue;
    remap[v] = out.nodes.size();
    out.nodes.push_back(g.nodes[v]);
    out.node_bias.push_back(g.node_bias[v]);
    bias_total += g.node_bias[v];
  }
  for (double& a : out.node_bias) {
    a = bias_total > 0.0 ? a / bias_total : 1.0 / static_cast<double>(out.nodes.size());
  }
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t e = 0; e < m; ++e) {
    if (!chosen[e]) continue;
    Edge edge = g.edges[e];
    pairs.emplace(std::min(edge.src, edge.dst), std::max(edge.src, edge.dst));
    edge.src = remap[edge.src];
    edge.dst = remap[edge.dst];
    out.edges.push_back(edge);
  }
  auto joined = [&](std::size_t a, std::size_t b) {
    return pairs.count({std::min(a, b), std::max(a, b)}) > 0;
  };
  for (const auto& t : g.triangles) {
    if (joined(t.i, t.j) && joined(t.j, t.k) && joined(t.i, t.k)) {
      const auto v = sorted3(remap[t.i], remap[t.j], remap[t.k]);
      out.triangles.push_back({v[0], v[1], v[2], t.weight, t.timestamp});
    }
  }
  out.preprocessed_with = g.preprocessed_with;
  return out;
}

std::string_view to_string(Motif m) {
  switch (m) {
    case Motif::kCycle:
      return "cycle";
    case Motif::kStar:
      return "star";
    case Motif::kTriangle:
      return "triangle";
  }
  return "unknown";
}

Motif motif_from_string(std::string_view s) {
  if (s == "cycle") return Motif::kCycle;
  if (s == "star") return Motif::kStar;
  if (s == "triangle") return Motif::kTriangle;
  throw ConfigError("unknown fraud motif '" + std::string(s) + "'");
}

void SyntheticConfig::validate() const {
  if (n_accounts < 4) throw ConfigError("n_accounts must be at least 4");
  if (!(fraud_ratio > 0.0 && fraud_ratio < 1.0)) {
    throw ConfigError("fraud_ratio must lie in (0, 1)");
  }
  if (n_graphs == 0) throw ConfigError("n_graphs must be positive");
}

namespace {

constexpr std::int64_t kHorizon = 100;
constexpr std::size_t kIdSpace = 1000000;
constexpr std::size_t kMinStarFanOut = 3;

std::string account_id(std::size_t k) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "acct%06zu", k);
  return buf;
}

// Index proportional to (degree + 1) among the first `count` creation slots.
std::size_t preferential(Rng& rng, const std::vector<std::size_t>& deg, std::size_t count) {
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) total += static_cast<double>(deg[i] + 1);
  double r = rng.uniform() * total;
  for (std::size_t i = 0; i < count; ++i) {
    r -= static_cast<double>(deg[i] + 1);
    if (r < 0.0) return i;
  }
  return count - 1;
}

LabeledGraph synthesize_one(const SyntheticConfig& cfg, std::uint64_t seed,
                            std::optional<Motif> motif) {
  Rng rng(seed);
  std::size_t n = static_cast<std::size_t>(
      rng.integer(4, static_cast<std::int64_t>(cfg.n_accounts)));

  std::set<std::size_t> picked;
  while (picked.size() < n) picked.insert(rng.index(kIdSpace));
  std::vector<std::string> ids;
  for (std::size_t k : picked) ids.push_back(account_id(k));
  rng.shuffle(ids.begin(), ids.end());  // creation order

  GraphBuilder b;
  std::vector<std::size_t> deg(n, 0);
  auto transfer = [&](std::size_t u, std::size_t v, double amount, std::int64_t t,
                      std::optional<Label> label) {
    b.add_edge(ids[u], ids[v], amount, t, label);
    ++deg[u];
    ++deg[v];
  };
  auto background_amount = [&]() { return rng.lognormal(3.0, 1.0); };
  auto when = [&]() { return rng.integer(0, kHorizon - 1); };

  // Preferential-attachment spanning tree, then extra transactions.
  b.add_node(ids[0]);
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t target = preferential(rng, deg, k);
    if (rng.bernoulli(0.5)) {
      transfer(k, target, background_amount(), when(), Label::kNormal);
    } else {
      transfer(target, k, background_amount(), when(), Label::kNormal);
    }
  }
  // The transaction budget does not depend on the label: motif transfers
  // take the place of background ones, so graph size alone is no giveaway.
  const std::size_t spare = cfg.n_transactions > n - 1 ? cfg.n_transactions - (n - 1) : 0;
  std::size_t extra = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(2 * spare)));
  std::size_t motif_len = 0;
  if (motif == Motif::kCycle) {
    motif_len = static_cast<std::size_t>(rng.integer(3, static_cast<std::int64_t>(std::min<std::size_t>(6, n))));
  } else if (motif == Motif::kStar) {
    motif_len = static_cast<std::size_t>(rng.integer(static_cast<std::int64_t>(kMinStarFanOut),
                                                     static_cast<std::int64_t>(n - 1)));
  } else if (motif == Motif::kTriangle) {
    motif_len = 3;
  }
  extra -= std::min(extra, motif_len);
  for (std::size_t t = 0; t < extra; ++t) {
    const std::size_t u = preferential(rng, deg, n);
    std::size_t v = rng.index(n - 1);
    if (v >= u) ++v;
    transfer(u, v, background_amount(), when(), Label::kNormal);
  }
  if (rng.bernoulli(0.1)) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order.begin(), order.end());
    b.add_triangle(ids[order[0]], ids[order[1]], ids[order[2]], rng.uniform(0.05, 0.3), when());
  }

  if (motif) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order.begin(), order.end());
    const std::int64_t t0 = rng.integer(0, kHorizon - 10);
    switch (*motif) {
      case Motif::kCycle: {
        // Layering: a large amount travels around a directed loop, shaved a
        // little at every hop.
        const std::size_t len = motif_len;
        double amount = rng.lognormal(3.0, 1.0) * rng.uniform(3.0, 6.0);
        for (std::size_t h = 0; h < len; ++h) {
          transfer(order[h], order[(h + 1) % len], amount, t0 + static_cast<std::int64_t>(h),
                   Label::kFraud);
          amount *= rng.uniform(0.97, 0.99);
        }
        break;
      }
      case Motif::kStar: {
        // Smurfing: one account splits a sum across many recipients.
        const std::size_t hub = order[0];
        const std::size_t fan_out = motif_len;
        const double total = rng.lognormal(3.0, 1.0) * rng.uniform(3.0, 6.0);
        for (std::size_t h = 1; h <= fan_out; ++h) {
          transfer(hub, order[h], total / static_cast<double>(fan_out) * rng.uniform(0.95, 1.05),
                   t0 + rng.integer(0, 2), Label::kFraud);
        }
        break;
      }
      case Motif::kTriangle: {
        const double amount = rng.lognormal(3.0, 1.0) * rng.uniform(2.0, 4.0);
        transfer(order[0], order[1], amount, t0, Label::kFraud);
        transfer(order[1], order[2], amount * rng.uniform(0.9, 1.1), t0, Label::kFraud);
        transfer(order[0], order[2], amount * rng.uniform(0.9, 1.1), t0, Label::kFraud);
        b.add_triangle(ids[order[0]], ids[order[1]], ids[order[2]], rng.uniform(0.6, 1.0), t0);
        break;
      }
    }
  }
  LabeledGraph out;
  out.graph = b.finish();
  out.label = motif ? 1 : 0;
  out.seed = seed;
  out.motif = motif;
  return out;
}

}  // namespace

std::vector<LabeledGraph> generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  const std::vector<Motif> motifs(cfg.fraud_motifs.begin(), cfg.fraud_motifs.end());
  std::vector<std::optional<Motif>> assignment(cfg.n_graphs);
  if (!motifs.empty()) {
    const auto n_fraud = static_cast<std::size_t>(
        std::llround(cfg.fraud_ratio * static_cast<double>(cfg.n_graphs)));
    std::vector<std::size_t> order(cfg.n_graphs);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(cfg.seed, "labels"));
    rng.shuffle(order.begin(), order.end());
    for (std::size_t k = 0; k < std::min(n_fraud, cfg.n_graphs); ++k) {
      assignment[order[k]] = motifs[rng.index(motifs.size())];
    }
  }
  std::vector<LabeledGraph> out;
  out.reserve(cfg.n_graphs);
  for (std::size_t k = 0; k < cfg.n_graphs; ++k) {
    out.push_back(synthesize_one(cfg, derive_seed(cfg.seed, "graph", k), assignment[k]));
  }
  return out;
}

NodeStatistics node_statistics(const TransactionGraph& g) {
  const std::size_t n = g.nodes.size();
  NodeStatistics s;
  s.degree.assign(n, 0.0);
  s.strength.assign(n, 0.0);
  s.clustering.assign(n, 0.0);
  std::vector<std::set<std::size_t>> nbr(n);
  for (const auto& e : g.edges) {
    nbr[e.src].insert(e.dst);
    nbr[e.dst].insert(e.src);
    s.strength[e.src] += e.weight;
    s.strength[e.dst] += e.weight;
  }
  const double max_strength =
      n > 0 ? *std::max_element(s.strength.begin(), s.strength.end()) : 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    s.degree[v] = n > 1 ? static_cast<double>(nbr[v].size()) / static_cast<double>(n - 1) : 0.0;
    if (max_strength > 0.0) s.strength[v] /= max_strength;
    const std::vector<std::size_t> adj(nbr[v].begin(), nbr[v].end());
    const std::size_t k = adj.size();
    if (k < 2) continue;
    std::size_t links = 0;
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t c = a + 1; c < k; ++c) links += nbr[adj[a]].count(adj[c]);
    }
    s.clustering[v] = 2.0 * static_cast<double>(links) / static_cast<double>(k * (k - 1));
  }
  return s;
}

MotifScan scan_motifs(const TransactionGraph& g, std::optional<Label> only) {
  const std::size_t n = g.nodes.size();
  std::vector<std::set<std::size_t>> out(n);
  for (const auto& e : g.edges) {
    if (only && e.label != only) continue;
    out[e.src].insert(e.dst);
  }
  MotifScan scan;
  for (const auto& o : out) scan.max_fan_out = std::max(scan.max_fan_out, o.size());

  // Longest simple directed cycle by DFS from each start, visiting only
  // larger-indexed nodes so each cycle is enumerated from its smallest node.
  std::vector<char> on_path(n, 0);
  std::size_t best = 0;
  auto dfs = [&](auto&& self, std::size_t start, std::size_t v, std::size_t depth) -> void {
    for (std::size_t w : out[v]) {
      if (w == start) {
        best = std::max(best, depth);
      } else if (w > start && !on_path[w]) {
        on_path[w] = 1;
        self(self, start, w, depth + 1);
        on_path[w] = 0;
      }
    }
  };
  for (std::size_t s = 0; s < n; ++s) {
    on_path[s] = 1;
    dfs(dfs, s, s, 1);
    on_path[s] = 0;
  }
  scan.longest_cycle = best;
  return scan;
}

}  // namespace qtgnn
