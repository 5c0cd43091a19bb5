#pragma once

#include "dynflow.hpp"
#include "engine.hpp"
#include "oracle.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace treepart {

struct ParseError : std::runtime_error {
  int line, column;
  ParseError(int l, int c, const std::string& msg)
      : std::runtime_error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + msg),
        line(l),
        column(c) {}
};

struct ValidationError : std::runtime_error {
  int line;
  ValidationError(int l, const std::string& msg)
      : std::runtime_error(l > 0 ? "line " + std::to_string(l) + ": " + msg : msg), line(l) {}
};

template <class Num>
struct ServiceCost {
  int u, s;
  Num value;
};

template <class Num>
struct Instance {
  TreeGraph<Num> tree;
  std::vector<std::string> labels;
  std::optional<int> k;
  std::vector<int> sinks;
  std::vector<ServiceCost<Num>> costs;

  int index_of(const std::string& label) const {
    for (int i = 0; i < static_cast<int>(labels.size()); ++i)
      if (labels[i] == label) return i;
    return -1;
  }
};

namespace detail {

struct Token {
  std::string text;
  int column;
};

inline std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t end = std::min(line.find('#'), line.size());
  while (i < end) {
    while (i < end && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= end) break;
    std::size_t j = i;
    while (j < end && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

template <class Num>
Num number_at(const Token& t, int line) {
  try {
    return parse_num<Num>(t.text);
  } catch (const std::invalid_argument&) {
    throw ParseError(line, t.column, "bad number '" + t.text + "'");
  }
}

inline int int_at(const Token& t, int line) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(t.text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != t.text.size() || t.text.empty()) throw ParseError(line, t.column, "bad integer '" + t.text + "'");
  return v;
}

}  // namespace detail

template <class Num>
Instance<Num> parse_instance(const std::string& text) {
  using detail::Token;
  Instance<Num> inst;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0, n = -1;
  std::unordered_map<std::string, int> id;
  std::vector<Num> weights;
  std::vector<EdgeSpec<Num>> edges;
  bool sinks_seen = false;

  auto vertex = [&](const Token& t, int line) {
    auto it = id.find(t.text);
    if (it == id.end()) throw ParseError(line, t.column, "unknown vertex '" + t.text + "'");
    return it->second;
  };
  auto arity = [&](const std::vector<Token>& tk, std::size_t lo, std::size_t hi, int line) {
    if (tk.size() < lo || tk.size() > hi) {
      const int col = tk.size() > hi ? tk[hi].column : tk.back().column;
      throw ParseError(line, col, "wrong number of fields for '" + tk[0].text + "'");
    }
  };

  while (std::getline(in, raw)) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::vector<Token> tk = detail::tokenize(raw);
    if (tk.empty()) continue;
    const std::string& kw = tk[0].text;
    if (n < 0 && kw != "tree") throw ParseError(lineno, tk[0].column, "expected 'tree <n>' header");
    if (kw == "tree") {
      if (n >= 0) throw ParseError(lineno, tk[0].column, "duplicate header");
      arity(tk, 2, 3, lineno);
      n = detail::int_at(tk[1], lineno);
      if (n < 1) throw ValidationError(lineno, "tree needs at least one vertex");
      if (tk.size() == 3) {
        inst.k = detail::int_at(tk[2], lineno);
        if (*inst.k < 1) throw ValidationError(lineno, "k must be at least 1");
      }
    } else if (kw == "v") {
      arity(tk, 3, 3, lineno);
      if (static_cast<int>(weights.size()) >= n) throw ParseError(lineno, tk[0].column, "more than n vertices");
      if (!edges.empty()) throw ParseError(lineno, tk[0].column, "vertex after edges");
      if (id.count(tk[1].text)) throw ParseError(lineno, tk[1].column, "duplicate vertex '" + tk[1].text + "'");
      Num w = detail::number_at<Num>(tk[2], lineno);
      if (w < 0) throw ValidationError(lineno, "NegativeWeight: vertex " + tk[1].text);
      id[tk[1].text] = static_cast<int>(weights.size());
      inst.labels.push_back(tk[1].text);
      weights.push_back(w);
    } else if (kw == "e") {
      arity(tk, 4, 5, lineno);
      if (static_cast<int>(weights.size()) != n) throw ParseError(lineno, tk[0].column, "edge before all n vertices");
      EdgeSpec<Num> e;
      e.u = vertex(tk[1], lineno);
      e.v = vertex(tk[2], lineno);
      e.tau = detail::number_at<Num>(tk[3], lineno);
      e.cap = tk.size() == 5 ? detail::number_at<Num>(tk[4], lineno) : Num(1);
      if (!(e.tau > 0)) throw ValidationError(lineno, "NonPositiveParameter: tau must be positive");
      if (!(e.cap > 0)) throw ValidationError(lineno, "NonPositiveParameter: cap must be positive");
      edges.push_back(e);
    } else if (kw == "sinks") {
      if (sinks_seen) throw ParseError(lineno, tk[0].column, "duplicate sinks line");
      sinks_seen = true;
      for (std::size_t i = 1; i < tk.size(); ++i) {
        const int s = vertex(tk[i], lineno);
        for (int o : inst.sinks)
          if (o == s) throw ValidationError(lineno, "duplicate sink '" + tk[i].text + "'");
        inst.sinks.push_back(s);
      }
    } else if (kw == "cost") {
      arity(tk, 4, 4, lineno);
      inst.costs.push_back({vertex(tk[1], lineno), vertex(tk[2], lineno), detail::number_at<Num>(tk[3], lineno)});
      if (inst.costs.back().value < 0) throw ValidationError(lineno, "service cost must be non-negative");
    } else {
      throw ParseError(lineno, tk[0].column, "unknown directive '" + kw + "'");
    }
  }
  if (n < 0) throw ParseError(lineno + 1, 1, "missing 'tree <n>' header");
  if (static_cast<int>(weights.size()) != n)
    throw ValidationError(0, "expected " + std::to_string(n) + " vertices, found " + std::to_string(weights.size()));
  if (static_cast<int>(edges.size()) != n - 1)
    throw ValidationError(0, "expected " + std::to_string(n - 1) + " edges, found " + std::to_string(edges.size()));
  try {
    inst.tree = build_tree(weights, edges);
  } catch (const TreeError& e) {
    throw ValidationError(0, e.what());
  }
  return inst;
}

template <class Num>
std::string serialize_instance(const Instance<Num>& inst) {
  std::ostringstream os;
  const auto& t = inst.tree;
  os << "tree " << t.n();
  if (inst.k) os << ' ' << *inst.k;
  os << '\n';
  for (int x = 0; x < t.n(); ++x) os << "v " << inst.labels[x] << ' ' << num_to_string(t.weight[x]) << '\n';
  for (const auto& e : t.edges)
    os << "e " << inst.labels[e.u] << ' ' << inst.labels[e.v] << ' ' << num_to_string(e.tau) << ' '
       << num_to_string(e.cap) << '\n';
  if (!inst.sinks.empty()) {
    os << "sinks";
    for (int s : inst.sinks) os << ' ' << inst.labels[s];
    os << '\n';
  }
  for (const auto& c : inst.costs)
    os << "cost " << inst.labels[c.u] << ' ' << inst.labels[c.s] << ' ' << num_to_string(c.value) << '\n';
  return os.str();
}

template <class Num>
void load_costs(RangeOracle<Num>& f, const Instance<Num>& inst) {
  for (const auto& c : inst.costs) f.set(inst.tree.origin[c.u], inst.tree.origin[c.s], c.value);
}

struct GenOptions {
  int n = 10;
  std::uint64_t seed = 1;
  int max_weight = 5;
  int max_tau = 4;
  int max_cap = 3;
  int sinks = 0;
  bool costs = false;
  int max_cost = 20;
};

// Random recursive tree with integer parameters; identical seeds give identical instances.
template <class Num>
Instance<Num> random_instance(const GenOptions& g) {
  if (g.n < 1) throw std::invalid_argument("n must be at least 1");
  std::mt19937_64 rng(g.seed);
  auto draw = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
  std::vector<Num> w(g.n);
  for (auto& x : w) x = Num(draw(0, g.max_weight));
  std::vector<EdgeSpec<Num>> es;
  for (int i = 1; i < g.n; ++i) es.push_back({draw(0, i - 1), i, Num(draw(1, g.max_tau)), Num(draw(1, g.max_cap))});
  Instance<Num> inst;
  inst.tree = build_tree(w, es);
  for (int i = 0; i < g.n; ++i) inst.labels.push_back(std::to_string(i));
  if (g.sinks > 0) {
    std::vector<int> p(g.n);
    std::iota(p.begin(), p.end(), 0);
    for (int i = g.n - 1; i > 0; --i) std::swap(p[i], p[draw(0, i)]);
    p.resize(std::min(g.sinks, g.n));
    std::sort(p.begin(), p.end());
    inst.sinks = p;
    if (g.costs)
      for (int u = 0; u < g.n; ++u)
        for (int s : inst.sinks) inst.costs.push_back({u, s, Num(draw(0, g.max_cost))});
  }
  return inst;
}

// ----- reports -----

template <class Num>
nlohmann::json label_json(const Instance<Num>& inst, int x) {
  const std::string& l = inst.labels[x];
  if (!l.empty() && l.find_first_not_of("0123456789") == std::string::npos && l.size() < 10) return std::stoi(l);
  return l;
}

template <class Num>
nlohmann::json num_json(const Num& x) {
  return to_double(x);
}

template <class Num>
nlohmann::json cost_json(const Cost<Num>& c) {
  if (c.inf) return "inf";
  return to_double(c.v);
}

template <class Num>
nlohmann::json sink_json(const Instance<Num>& inst, const SinkLocation<Num>& s) {
  nlohmann::json j;
  if (!s.on_edge) {
    j["vertex"] = label_json(inst, s.vertex);
  } else {
    j["edge"] = {label_json(inst, s.u), label_json(inst, s.v)};
    j["offset"] = num_json(s.offset);
    if constexpr (num_traits<Num>::exact) j["offset_exact"] = num_to_string(s.offset);
  }
  return j;
}

inline nlohmann::json stats_json(const SolveStats& s) {
  return {{"oracle_calls", s.oracle_calls},
          {"calls_after_first_phase", s.calls_after_first_phase},
          {"probes", s.probes},
          {"probe_oracle_calls", s.probe_oracle_calls},
          {"stages", s.stages},
          {"peaks", s.peaks},
          {"reaching_rounds", s.reaching_rounds},
          {"invariant_violations", s.invariant_violations}};
}

template <class Num>
struct SolutionReport {
  bool feasible = false;
  Cost<Num> threshold;
  std::optional<Cost<Num>> bound;
  std::vector<SinkLocation<Num>> sinks;
  std::vector<std::vector<int>> blocks;
  std::vector<Cost<Num>> block_costs;
  SolveStats stats;
  double wall_ms = 0;
};

// Evaluates every block with the oracle; the threshold becomes the largest block cost.
template <class Num>
SolutionReport<Num> make_report(const TreeGraph<Num>& t, const CostOracle<Num>& f, bool feasible,
                                const std::vector<SinkLocation<Num>>& sinks,
                                const std::vector<std::vector<int>>& blocks) {
  SolutionReport<Num> r;
  r.feasible = feasible;
  r.sinks = sinks;
  r.blocks = blocks;
  r.threshold = Cost<Num>(Num(0));
  for (std::size_t i = 0; i < sinks.size(); ++i) {
    r.block_costs.push_back(f.eval(t, blocks[i], sinks[i]));
    r.threshold = cmax(r.threshold, r.block_costs.back());
  }
  return r;
}

template <class Num>
nlohmann::json report_json(const Instance<Num>& inst, const SolutionReport<Num>& r) {
  nlohmann::json j;
  j["feasible"] = r.feasible;
  j["threshold"] = r.feasible ? cost_json(r.threshold) : nlohmann::json(nullptr);
  if constexpr (num_traits<Num>::exact)
    if (r.feasible) j["threshold_exact"] = r.threshold.str();
  if (r.bound) j["bound"] = cost_json(*r.bound);
  j["sinks"] = nlohmann::json::array();
  j["partition"] = nlohmann::json::array();
  j["block_costs"] = nlohmann::json::array();
  for (std::size_t i = 0; i < r.sinks.size(); ++i) {
    j["sinks"].push_back(sink_json(inst, r.sinks[i]));
    nlohmann::json b = nlohmann::json::array();
    for (int x : r.blocks[i]) b.push_back(label_json(inst, x));
    j["partition"].push_back(b);
    j["block_costs"].push_back(cost_json(r.block_costs[i]));
  }
  j["stats"] = stats_json(r.stats);
  j["stats"]["wall_ms"] = r.wall_ms;
  return j;
}

template <class Num>
std::string sink_text(const Instance<Num>& inst, const SinkLocation<Num>& s) {
  if (!s.on_edge) return inst.labels[s.vertex];
  return inst.labels[s.u] + "-" + inst.labels[s.v] + "@" + num_to_string(s.offset);
}

template <class Num>
std::string report_tsv(const Instance<Num>& inst, const SolutionReport<Num>& r) {
  std::ostringstream os;
  os << "feasible\t" << (r.feasible ? "true" : "false") << '\n';
  os << "threshold\t" << (r.feasible ? r.threshold.str() : "") << '\n';
  if (r.bound) os << "bound\t" << r.bound->str() << '\n';
  for (std::size_t i = 0; i < r.sinks.size(); ++i) {
    os << "block\t" << sink_text(inst, r.sinks[i]) << '\t' << r.block_costs[i].str() << '\t';
    for (std::size_t j = 0; j < r.blocks[i].size(); ++j) os << (j ? "," : "") << inst.labels[r.blocks[i][j]];
    os << '\n';
  }
  os << "oracle_calls\t" << r.stats.oracle_calls << '\n';
  os << "probes\t" << r.stats.probes << '\n';
  os << "wall_ms\t" << r.wall_ms << '\n';
  return os.str();
}

// Reads sinks and blocks back from a JSON report.
template <class Num>
EvacuationPlan<Num> plan_from_json(const Instance<Num>& inst, const nlohmann::json& j) {
  auto vid = [&](const nlohmann::json& x) {
    const std::string l = x.is_string() ? x.get<std::string>() : std::to_string(x.get<long long>());
    const int i = inst.index_of(l);
    if (i < 0) throw InvalidPlan("unknown vertex '" + l + "'");
    return i;
  };
  EvacuationPlan<Num> p;
  p.assign.assign(inst.tree.n(), -1);
  if (!j.contains("sinks") || !j.contains("partition")) throw InvalidPlan("report lacks sinks or partition");
  const auto& js = j.at("sinks");
  const auto& jp = j.at("partition");
  if (js.size() != jp.size()) throw InvalidPlan("sinks and partition differ in length");
  for (std::size_t i = 0; i < js.size(); ++i) {
    const auto& s = js[i];
    if (s.contains("vertex")) {
      p.sinks.push_back(SinkLocation<Num>::at(vid(s["vertex"])));
    } else {
      const Num off = s.contains("offset_exact") ? parse_num<Num>(s["offset_exact"].get<std::string>())
                                                 : from_double<Num>(s.at("offset").get<double>());
      p.sinks.push_back(SinkLocation<Num>::edge_point(vid(s.at("edge")[0]), vid(s.at("edge")[1]), off));
    }
    for (const auto& x : jp[i]) p.assign[vid(x)] = static_cast<int>(i);
  }
  return p;
}

}  // namespace treepart
