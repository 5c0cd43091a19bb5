#include "treepart/treepart.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

using namespace treepart;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string command;
  std::string input;
  std::optional<int> k;
  std::optional<std::string> threshold;
  std::string oracle = "evac";
  bool continuous = false;
  std::optional<std::string> cap_weight;
  std::optional<int> cap_hops;
  bool exact = false;
  bool floating = false;
  std::uint64_t seed = 1;
  std::string format = "json";
  std::vector<std::string> sinks;
  std::vector<std::string> block;
  std::string plan;
  std::string grid = "1/1000";
  int n = 10;
  int gen_sinks = 0;
  bool gen_costs = false;
  std::string sizes = "1024,2048,4096,8192";
  int repeat = 1;
};

std::string read_input(const std::string& path) {
  if (path.empty()) throw UsageError("an instance file is required");
  if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
  std::ifstream in(path);
  if (!in) throw ValidationError(0, "cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

template <class Num>
std::unique_ptr<CostOracle<Num>> oracle_for(const Options& o, const Instance<Num>* inst) {
  OracleParams p{o.oracle, o.cap_weight, o.cap_hops};
  try {
    auto f = make_oracle<Num>(p);
    if (inst)
      if (auto* r = dynamic_cast<RangeOracle<Num>*>(f.get())) load_costs(*r, *inst);
    return f;
  } catch (const UnknownOracle& e) {
    throw UsageError(e.what());
  }
}

template <class Num>
int vertex_arg(const Instance<Num>& inst, const std::string& s) {
  const int x = inst.index_of(s);
  if (x < 0) throw ValidationError(0, "unknown vertex '" + s + "'");
  return x;
}

// Vertex label, or u,v@offset for a point on an edge.
template <class Num>
SinkLocation<Num> sink_arg(const Instance<Num>& inst, const std::string& s) {
  const auto at = s.find('@');
  if (at == std::string::npos) return SinkLocation<Num>::at(vertex_arg(inst, s));
  const auto comma = s.find(',');
  if (comma == std::string::npos || comma > at) throw UsageError("edge sink must look like u,v@offset");
  const int u = vertex_arg(inst, s.substr(0, comma));
  const int v = vertex_arg(inst, s.substr(comma + 1, at - comma - 1));
  if (inst.tree.edge_between(u, v) < 0) throw ValidationError(0, "not an edge: " + s.substr(0, at));
  return SinkLocation<Num>::edge_point(u, v, parse_num<Num>(s.substr(at + 1)));
}

template <class Num>
std::vector<int> sink_list(const Options& o, const Instance<Num>& inst) {
  if (o.sinks.empty()) return inst.sinks;
  std::vector<int> s;
  for (const auto& x : o.sinks) s.push_back(vertex_arg(inst, x));
  return s;
}

int require_k(const Options& o, const std::optional<int>& file_k) {
  std::optional<int> k = o.k ? o.k : file_k;
  if (!k) throw UsageError("--k is required");
  if (*k < 1) throw UsageError("--k must be at least 1");
  return *k;
}

template <class Num>
void emit(const Options& o, const Instance<Num>& inst, const SolutionReport<Num>& r) {
  if (o.format == "tsv")
    std::cout << report_tsv(inst, r);
  else
    std::cout << report_json(inst, r).dump(2) << '\n';
}

void emit_kv(const Options& o, const nlohmann::json& j) {
  if (o.format == "tsv") {
    for (auto it = j.begin(); it != j.end(); ++it)
      std::cout << it.key() << '\t' << (it->is_string() ? it->get<std::string>() : it->dump()) << '\n';
  } else {
    std::cout << j.dump(2) << '\n';
  }
}

template <class Num>
int cmd_solve(const Options& o) {
  auto inst = parse_instance<Num>(read_input(o.input));
  auto f = oracle_for<Num>(o, &inst);
  const int k = require_k(o, inst.k);
  auto t0 = std::chrono::steady_clock::now();
  auto res = solve_minmax(inst.tree, *f, k, MinmaxOptions{o.continuous, false});
  const double ms = elapsed_ms(t0);
  auto r = make_report(inst.tree, *f, true, res.partition.sinks, res.partition.blocks);
  r.threshold = res.threshold;
  r.stats = res.stats;
  r.stats.oracle_calls += res.final_stats.oracle_calls;
  r.wall_ms = ms;
  emit(o, inst, r);
  return 0;
}

template <class Num>
int cmd_feasible(const Options& o) {
  auto inst = parse_instance<Num>(read_input(o.input));
  auto f = oracle_for<Num>(o, &inst);
  const int k = require_k(o, inst.k);
  if (!o.threshold) throw UsageError("--threshold is required");
  const Cost<Num> T = parse_cost<Num>(*o.threshold);
  auto t0 = std::chrono::steady_clock::now();
  auto res = solve_bounded(inst.tree, *f, k, T, BoundedOptions{o.continuous, false});
  const double ms = elapsed_ms(t0);
  SolutionReport<Num> r;
  if (res.feasible) r = make_report(inst.tree, *f, true, res.partition.sinks, res.partition.blocks);
  r.bound = T;
  r.stats = res.stats;
  r.wall_ms = ms;
  emit(o, inst, r);
  return 0;
}

template <class Num>
int cmd_fixed(const Options& o) {
  auto inst = parse_instance<Num>(read_input(o.input));
  auto f = oracle_for<Num>(o, &inst);
  std::vector<int> sinks = sink_list(o, inst);
  if (sinks.empty()) throw UsageError("sinks are required (--sink or a sinks line)");
  auto t0 = std::chrono::steady_clock::now();
  auto res = solve_fixed(inst.tree, sinks, *f);
  const double ms = elapsed_ms(t0);
  std::vector<SinkLocation<Num>> locs;
  for (int s : res.sinks) locs.push_back(SinkLocation<Num>::at(s));
  auto r = make_report(inst.tree, *f, !res.threshold.inf, locs, res.blocks);
  r.threshold = res.threshold;
  r.stats = res.stats;
  r.wall_ms = ms;
  emit(o, inst, r);
  return 0;
}

template <class Num>
int cmd_evac_cost(const Options& o) {
  auto inst = parse_instance<Num>(read_input(o.input));
  auto f = oracle_for<Num>(o, &inst);
  if (o.sinks.size() != 1) throw UsageError("exactly one --sink is required");
  const SinkLocation<Num> s = sink_arg(inst, o.sinks[0]);
  std::vector<int> block;
  for (const auto& b : o.block) block.push_back(vertex_arg(inst, b));
  if (block.empty())
    for (int x = 0; x < inst.tree.n(); ++x) block.push_back(x);
  std::sort(block.begin(), block.end());
  const Cost<Num> c = f->eval(inst.tree, block, s);
  nlohmann::json j{{"oracle", f->name()}, {"sink", sink_json(inst, s)}, {"cost", cost_json(c)}};
  if constexpr (num_traits<Num>::exact) j["cost_exact"] = c.str();
  emit_kv(o, j);
  return 0;
}

template <class Num>
int cmd_simulate(const Options& o) {
  auto inst = parse_instance<Num>(read_input(o.input));
  EvacuationPlan<Num> plan;
  if (!o.plan.empty()) {
    std::ifstream in(o.plan);
    if (!in) throw ValidationError(0, "cannot open " + o.plan);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(0, std::string("bad plan: ") + e.what());
    }
    plan = plan_from_json(inst, j);
  } else {
    std::vector<int> sinks = sink_list(o, inst);
    if (sinks.empty()) throw UsageError("--plan or sinks are required");
    EvacOracle<Num> f;
    auto res = solve_fixed(inst.tree, sinks, f);
    plan.assign.assign(inst.tree.n(), -1);
    for (std::size_t i = 0; i < res.sinks.size(); ++i) {
      plan.sinks.push_back(SinkLocation<Num>::at(res.sinks[i]));
      for (int x : res.blocks[i]) plan.assign[x] = static_cast<int>(i);
    }
  }
  const Num sim = simulate_evacuation(inst.tree, plan);
  Cost<Num> formula(Num(0));
  for (std::size_t i = 0; i < plan.sinks.size(); ++i) {
    std::vector<int> b;
    for (int x = 0; x < inst.tree.n(); ++x)
      if (plan.assign[x] == static_cast<int>(i)) b.push_back(x);
    if (!b.empty()) formula = cmax(formula, evac_completion_time(inst.tree, b, plan.sinks[i]));
  }
  nlohmann::json j{{"completion", to_double(sim)},
                   {"formula", cost_json(formula)},
                   {"match", !formula.inf && near_eq(formula.v, sim)}};
  if constexpr (num_traits<Num>::exact) j["completion_exact"] = num_to_string(sim);
  emit_kv(o, j);
  return 0;
}

template <class Num>
int cmd_brute(const Options& o) {
  auto inst = parse_instance<Num>(read_input(o.input));
  auto f = oracle_for<Num>(o, &inst);
  auto t0 = std::chrono::steady_clock::now();
  BruteResult<Num> b;
  const std::optional<int> k = o.k ? o.k : inst.k;
  if (k) {
    if (*k < 1) throw UsageError("--k must be at least 1");
    b = o.continuous ? brute_continuous(inst.tree, *f, *k, parse_num<Num>(o.grid)) : brute_minmax(inst.tree, *f, *k);
  } else {
    std::vector<int> sinks = sink_list(o, inst);
    if (sinks.empty()) throw UsageError("--k or sinks are required");
    b = brute_fixed(inst.tree, sinks, *f);
  }
  const double ms = elapsed_ms(t0);
  auto r = make_report(inst.tree, *f, b.found, b.witness.sinks, b.witness.blocks);
  r.threshold = b.opt;
  r.wall_ms = ms;
  emit(o, inst, r);
  return 0;
}

template <class Num>
int cmd_gen(const Options& o) {
  GenOptions g;
  g.n = o.n;
  g.seed = o.seed;
  g.sinks = o.gen_sinks;
  g.costs = o.gen_costs;
  if (g.n < 1) throw UsageError("--n must be at least 1");
  auto inst = random_instance<Num>(g);
  inst.k = o.k;
  std::cout << serialize_instance(inst);
  return 0;
}

template <class Num>
int cmd_bench(const Options& o) {
  std::vector<int> sizes;
  std::stringstream ss(o.sizes);
  for (std::string tok; std::getline(ss, tok, ',');) {
    try {
      sizes.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw UsageError("bad --sizes entry '" + tok + "'");
    }
  }
  const int k = o.k.value_or(4);
  if (k < 1) throw UsageError("--k must be at least 1");
  std::cout << "n,k,oracle,mode,time_ms,oracle_calls,probes\n";
  for (int n : sizes) {
    for (int rep = 0; rep < o.repeat; ++rep) {
      GenOptions g;
      g.n = n;
      g.seed = o.seed + static_cast<std::uint64_t>(rep);
      auto inst = random_instance<Num>(g);
      auto f = oracle_for<Num>(o, &inst);
      auto t0 = std::chrono::steady_clock::now();
      auto res = solve_minmax(inst.tree, *f, k, MinmaxOptions{o.continuous, false});
      const double ms = elapsed_ms(t0);
      const auto calls = res.stats.oracle_calls + res.stats.probe_oracle_calls + res.final_stats.oracle_calls;
      std::cout << n << ',' << k << ',' << f->name() << ',' << (o.continuous ? "continuous" : num_traits<Num>::name)
                << ',' << ms << ',' << calls << ',' << res.stats.probes << '\n';
    }
  }
  return 0;
}

template <class Num>
int dispatch(const Options& o) {
  if (o.command == "solve") return cmd_solve<Num>(o);
  if (o.command == "feasible") return cmd_feasible<Num>(o);
  if (o.command == "fixed") return cmd_fixed<Num>(o);
  if (o.command == "evac-cost") return cmd_evac_cost<Num>(o);
  if (o.command == "simulate") return cmd_simulate<Num>(o);
  if (o.command == "brute") return cmd_brute<Num>(o);
  if (o.command == "gen") return cmd_gen<Num>(o);
  return cmd_bench<Num>(o);
}

void add_common(CLI::App* c, Options& o) {
  c->add_option("--oracle", o.oracle, "cost oracle")
      ->check(CLI::IsMember({"evac", "kcenter", "kcenter-capped", "range"}));
  c->add_option("--cap-weight", o.cap_weight, "weight cap for kcenter-capped");
  c->add_option("--cap-hops", o.cap_hops, "hop cap for kcenter-capped");
  c->add_flag("--continuous", o.continuous, "allow sinks on edges");
  auto* ex = c->add_flag("--exact", o.exact, "rational arithmetic (default)");
  auto* fl = c->add_flag("--float", o.floating, "double arithmetic");
  ex->excludes(fl);
  c->add_option("--seed", o.seed, "random seed");
  c->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "tsv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Min-max centred tree partitioning"};
  app.require_subcommand(1);
  Options o;
  struct Cmd {
    const char* name;
    const char* help;
    bool input;
  };
  const Cmd cmds[] = {{"solve", "optimal partition with at most k sinks", true},
                      {"feasible", "decide whether k sinks meet a threshold", true},
                      {"fixed", "optimal partition for given sinks", true},
                      {"evac-cost", "cost of one block under the oracle", true},
                      {"simulate", "simulate an evacuation plan", true},
                      {"brute", "exhaustive reference solver", true},
                      {"gen", "random instance", false},
                      {"bench", "scaling table as CSV", false}};
  for (const Cmd& c : cmds) {
    CLI::App* s = app.add_subcommand(c.name, c.help);
    add_common(s, o);
    if (c.input) s->add_option("instance", o.input, "instance file or -");
    s->add_option("--k", o.k, "number of sinks");
    const std::string name = c.name;
    if (name == "feasible") s->add_option("--threshold", o.threshold, "cost threshold");
    if (name == "fixed" || name == "evac-cost" || name == "simulate" || name == "brute")
      s->add_option("--sink", o.sinks, "sink vertex (u,v@offset for an edge point)")->allow_extra_args(false);
    if (name == "evac-cost") s->add_option("--block", o.block, "block vertices (default all)")->delimiter(',')->allow_extra_args(false);
    if (name == "simulate") s->add_option("--plan", o.plan, "JSON report to simulate");
    if (name == "brute") s->add_option("--grid", o.grid, "edge grid step for --continuous");
    if (name == "gen") {
      s->add_option("--n", o.n, "number of vertices");
      s->add_option("--sinks", o.gen_sinks, "number of random sinks");
      s->add_flag("--costs", o.gen_costs, "emit a random service-cost table");
    }
    if (name == "bench") {
      s->add_option("--sizes", o.sizes, "comma-separated n values");
      s->add_option("--repeat", o.repeat, "instances per size");
    }
    s->callback([&o, name] { o.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return o.floating ? dispatch<double>(o) : dispatch<Rational>(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
