#include "axioms.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace tp_test;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <class Num>
TreeGraph<Num> convert(const TreeGraph<Q>& t) {
  std::vector<Num> w;
  for (const auto& x : t.weight) w.push_back(Num(to_double(x)));
  std::vector<EdgeSpec<Num>> es;
  for (const auto& e : t.edges) es.push_back({e.u, e.v, Num(to_double(e.tau)), Num(to_double(e.cap))});
  return build_tree(w, es);
}

template <class Num>
SinkLocation<Num> convert(const SinkLocation<Q>& s) {
  SinkLocation<Num> r;
  r.on_edge = s.on_edge;
  r.vertex = s.vertex;
  r.u = s.u;
  r.v = s.v;
  r.offset = Num(to_double(s.offset));
  return r;
}

// Random partition into k connected blocks with a random sink (vertex or edge point) per block.
EvacuationPlan<Q> random_plan(std::mt19937& g, const TreeGraph<Q>& t, int k) {
  std::vector<int> cut(t.m());
  std::iota(cut.begin(), cut.end(), 0);
  std::shuffle(cut.begin(), cut.end(), g);
  cut.resize(std::min(k - 1, t.m()));
  auto comps = detail::components_without(t, cut);
  EvacuationPlan<Q> p;
  p.assign.assign(t.n(), -1);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const auto& c = comps[i];
    SinkLocation<Q> s = SinkLocation<Q>::at(c[g() % c.size()]);
    if (c.size() >= 2 && g() % 2) {
      const int u = c[g() % c.size()];
      for (const Adj& a : t.adj[u])
        if (std::find(c.begin(), c.end(), a.to) != c.end()) {
          s = SinkLocation<Q>::edge_point(u, a.to, t.edges[a.edge].tau * frac(g() % 7, 6));
          break;
        }
    }
    p.sinks.push_back(s);
    for (int x : c) p.assign[x] = static_cast<int>(i);
  }
  return p;
}

template <class Num>
Num plan_formula(const TreeGraph<Num>& t, const EvacuationPlan<Num>& p, bool& finite) {
  Num best = 0;
  finite = true;
  for (std::size_t i = 0; i < p.sinks.size(); ++i) {
    std::vector<int> b;
    for (int x = 0; x < t.n(); ++x)
      if (p.assign[x] == static_cast<int>(i)) b.push_back(x);
    const Cost<Num> c = evac_completion_time(t, b, p.sinks[i]);
    if (c.inf) finite = false;
    if (!c.inf && c.v > best) best = c.v;
  }
  return best;
}

void flow_formula() {
  std::vector<EdgeSpec<Q>> es{{0, 1, Q(3), Q(2)}};
  auto t = build_tree<Q>({Q(4), Q(0)}, es);
  const auto t0 = Clock::now();
  const Cost<Q> c = evac_completion_time(t, {0, 1}, SinkLocation<Q>::at(1));
  const double ms = seconds_since(t0) * 1000;
  const bool ok = c == Cost<Q>(Q(5)) && ms < 1.0;
  std::ostringstream os;
  os << "single edge w=4 c=2 tau=3 -> " << c << " (expected 5) in " << ms << " ms";
  report("flow-formula", ok, os.str());
}

void oracle_cross_validation() {
  std::mt19937 g(101);
  const auto t0 = Clock::now();
  int instances = 0, exact_bad = 0, float_bad = 0;
  for (int it = 0; it < 500; ++it) {
    const int n = 1 + static_cast<int>(g() % 12);
    auto t = random_rational_tree(g, n);
    auto plan = random_plan(g, t, 1 + static_cast<int>(g() % 4));
    bool finite = false;
    const Q formula = plan_formula(t, plan, finite);
    ++instances;
    if (!finite || simulate_evacuation(t, plan) != formula) ++exact_bad;
    auto td = convert<double>(t);
    EvacuationPlan<double> pd;
    pd.assign = plan.assign;
    for (const auto& s : plan.sinks) pd.sinks.push_back(convert<double>(s));
    const double fd = plan_formula(td, pd, finite);
    const double sd = simulate_evacuation(td, pd);
    if (!finite || std::abs(fd - sd) > 1e-9 * std::max(1.0, std::abs(fd))) ++float_bad;
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << instances << " instances n<=12, exact mismatches " << exact_bad << ", float mismatches " << float_bad
     << ", " << secs << " s";
  report("oracle-cross-validation", instances >= 500 && exact_bad == 0 && float_bad == 0 && secs < 60, os.str());
}

void axiom_suite() {
  std::ostringstream os;
  bool ok = true;
  for (const char* name : {"kcenter", "kcenter-capped", "range", "evac"}) {
    auto rep = check_axioms(name, 1000, 202);
    os << name << " " << rep.samples << " samples " << rep.violations << " violations; ";
    if (rep.samples < 1000 || rep.violations) {
      ok = false;
      os << "(" << rep.first << ") ";
    }
  }
  report("axiom-suite", ok, os.str());
}

struct OptInstance {
  TreeGraph<Q> tree;
  int k;
};

void exact_optimality_and_tightness() {
  std::mt19937 g(303);
  std::vector<OptInstance> insts;
  for (int it = 0; it < 200; ++it) {
    const int n = 1 + static_cast<int>(g() % 10);
    const int k = 1 + static_cast<int>(g() % 4);
    insts.push_back({it % 2 ? random_rational_tree(g, n) : random_tree<Q>(g, n), k});
  }
  const auto t0 = Clock::now();
  int runs = 0, mismatches = 0, tight_runs = 0, tight_bad = 0;
  for (const auto& in : insts) {
    for (auto& f : path_monotone_oracles()) {
      ++runs;
      const auto b = brute_minmax(in.tree, *f, in.k);
      const auto r = solve_minmax(in.tree, *f, in.k);
      if (r.threshold != b.opt || !valid_partition(in.tree, r.partition.sinks, r.partition.blocks) ||
          max_block_cost(in.tree, *f, r.partition) != r.threshold)
        ++mismatches;

      ++tight_runs;
      bool ok = true;
      const auto at = solve_bounded(in.tree, *f, in.k, b.opt);
      if (!at.feasible || static_cast<int>(at.partition.sinks.size()) > in.k ||
          !valid_partition(in.tree, at.partition.sinks, at.partition.blocks) ||
          max_block_cost(in.tree, *f, at.partition) > b.opt)
        ok = false;
      const auto costs = brute_block_costs(in.tree, *f, in.k);
      auto it = costs.lower_bound(b.opt);
      if (it != costs.begin()) {
        --it;
        if (solve_bounded(in.tree, *f, in.k, *it).feasible) ok = false;
      }
      if (!ok) ++tight_bad;
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << insts.size() << " trees n<=10 k=1..4, kcenter+evac, " << runs << " runs, " << mismatches << " mismatches, "
     << secs << " s";
  report("exact-optimality", insts.size() >= 200 && mismatches == 0 && secs < 300, os.str());
  std::ostringstream ot;
  ot << tight_runs << " runs, " << tight_bad << " failures (feasible at T*, infeasible just below)";
  report("feasibility-tightness", tight_bad == 0 && tight_runs >= 400, ot.str());
}

void fixed_sink_optimality() {
  std::mt19937 g(404);
  int pairs = 0, runs = 0, bad = 0;
  for (int it = 0; it < 200; ++it) {
    const int n = 1 + static_cast<int>(g() % 10);
    const int k = 1 + static_cast<int>(g() % std::min(n, 4));
    auto t = it % 2 ? random_rational_tree(g, n) : random_tree<Q>(g, n);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), g);
    std::vector<int> sinks(perm.begin(), perm.begin() + k);
    ++pairs;
    auto range = std::make_unique<RangeOracle<Q>>();
    for (int u = 0; u < n; ++u)
      for (int s : sinks) range->set(u, s, frac(g() % 30, 1 + g() % 3));
    auto oracles = path_monotone_oracles();
    oracles.push_back(std::move(range));
    for (auto& f : oracles) {
      ++runs;
      const auto b = brute_fixed(t, sinks, *f);
      const auto r = solve_fixed(t, sinks, *f);
      std::vector<SinkLocation<Q>> locs;
      for (int s : r.sinks) locs.push_back(SinkLocation<Q>::at(s));
      Cost<Q> worst(Q(0));
      for (std::size_t i = 0; i < locs.size(); ++i) worst = cmax(worst, f->eval(t, r.blocks[i], locs[i]));
      if (r.threshold != b.opt || !valid_partition(t, locs, r.blocks) || worst != r.threshold) ++bad;
    }
  }
  std::ostringstream os;
  os << pairs << " (tree, sinks) pairs n<=10, kcenter+evac+range, " << runs << " runs, " << bad << " mismatches";
  report("fixed-sink-optimality", pairs >= 200 && bad == 0, os.str());
}

void continuous_consistency() {
  std::mt19937 g(505);
  EvacOracle<Q> f;
  int instances = 0, worse = 0, far = 0;
  double max_gap = 0;
  for (int it = 0; it < 50; ++it) {
    const int n = 1 + static_cast<int>(g() % 8);
    const int k = 1 + static_cast<int>(g() % 3);
    auto t = random_tree<Q>(g, n);
    ++instances;
    const auto c = solve_minmax(t, f, k, {true, false});
    const auto d = solve_minmax(t, f, k);
    if (d.threshold < c.threshold) ++worse;
    const auto b = brute_continuous(t, f, k, frac(1, 1000));
    const double gap = std::abs(b.opt.as_double() - c.threshold.as_double());
    max_gap = std::max(max_gap, gap);
    if (gap > 1e-2) ++far;
  }
  std::vector<EdgeSpec<Q>> es{{0, 1, Q(10), Q(1)}};
  auto t = build_tree<Q>({Q(2), Q(2)}, es);
  const auto r = solve_minmax(t, f, 1, {true, false});
  bool analytic = r.partition.sinks.size() == 1 && r.partition.sinks[0].on_edge;
  double off = -1;
  if (analytic) {
    const auto& s = r.partition.sinks[0];
    off = to_double(s.u == 0 ? s.offset : Q(10) - s.offset);
    analytic = std::abs(off - 5) <= 1e-9 && std::abs(r.threshold.as_double() - 7) <= 1e-9;
  }
  std::ostringstream os;
  os << instances << " evac instances n<=8: continuous > discrete " << worse << ", grid gap > 1e-2 " << far
     << " (max gap " << max_gap << "); single edge offset " << off << " cost " << r.threshold;
  report("continuous-consistency", instances >= 50 && worse == 0 && far == 0 && analytic, os.str());
}

void structural_invariants() {
  std::mt19937 g(606);
  int runs = 0, overlaps = 0, range_bad = 0, steps = 0;
  for (int it = 0; it < 120; ++it) {
    const int n = 2 + static_cast<int>(g() % (it < 60 ? 9 : 199));
    const int k = 1 + static_cast<int>(g() % 6);
    auto t = random_tree<Q>(g, n);
    for (auto& f : path_monotone_oracles()) {
      const bool small = n <= 10;
      std::function<bool(const Cost<Q>&)> feasible = [&](const Cost<Q>& T) {
        return small ? brute_feasible(t, *f, k, T) : solve_bounded(t, *f, k, T).feasible;
      };
      const auto r = solve_minmax(t, *f, k, {false, true});
      ++runs;
      overlaps += r.stats.stage_overlaps + r.final_stats.stage_overlaps;
      for (const Cost<Q>& T : {r.threshold, Cost<Q>(r.threshold.v / 2)}) {
        if (T.inf) continue;
        const auto b = solve_bounded(t, *f, k, T, BoundedOptions{false, true});
        ++runs;
        overlaps += b.stats.stage_overlaps;
      }
      Cost<Q> low(Q(0)), high = Cost<Q>::infinity();
      bool ok = r.stats.invariant_violations == 0;
      for (const auto& s : r.trace) {
        ++steps;
        if (!(s.range.low < s.range.high)) ok = false;
        if (s.range.low < low || high < s.range.high) ok = false;
        if (feasible(s.range.low)) ok = false;
        if (!s.range.high.inf && !feasible(s.range.high)) ok = false;
        low = s.range.low;
        high = s.range.high;
      }
      if (!ok) ++range_bad;
    }
  }
  std::ostringstream os;
  os << runs << " runs n<=200: stage overlaps " << overlaps << "; " << steps << " range steps, runs violating I1-I3 "
     << range_bad;
  report("structural-invariants", overlaps == 0 && range_bad == 0, os.str());
}

double solve_seconds(int n, int k, std::uint64_t seed, SolveStats* st = nullptr, SolveStats* fin = nullptr) {
  GenOptions go;
  go.n = n;
  go.seed = seed;
  auto inst = random_instance<double>(go);
  EvacOracle<double> f;
  const auto t0 = Clock::now();
  auto r = solve_minmax(inst.tree, f, k);
  const double s = seconds_since(t0);
  if (st) *st = r.stats;
  if (fin) *fin = r.final_stats;
  return s;
}

void budget_and_scaling() {
  std::ostringstream os;
  bool ok = true;
  double worst_calls = 0, worst_probes = 0;
  for (int n : {100, 1000, 2500, 5000})
    for (int k : {1, 2, 4, 8, 16}) {
      SolveStats st, fin;
      solve_seconds(n, k, 7 + n + k, &st, &fin);
      const double lg = std::log2(static_cast<double>(n));
      const double call_cap = 64.0 * k * lg, probe_cap = 64.0 * (k + lg) * lg;
      const double calls = static_cast<double>(std::max(st.calls_after_first_phase, fin.calls_after_first_phase));
      worst_calls = std::max(worst_calls, calls / call_cap);
      worst_probes = std::max(worst_probes, static_cast<double>(st.probes) / probe_cap);
      if (calls > call_cap || static_cast<double>(st.probes) > probe_cap) ok = false;
    }
  os << "max calls/bound " << worst_calls << ", max probes/bound " << worst_probes;
  const double big = solve_seconds(50000, 10, 1);
  os << "; n=50000 k=10 evac float " << big << " s";
  if (big >= 60) ok = false;
  double prev = 0;
  os << "; doubling ratios";
  for (int n = 1 << 12; n <= 1 << 15; n <<= 1) {
    double total = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) total += solve_seconds(n, 10, seed);
    if (prev > 0) {
      os << ' ' << total / prev;
      if (total / prev > 3) ok = false;
    }
    prev = total;
  }
  report("budget-scaling", ok, os.str());
}

}  // namespace

int main() {
  flow_formula();
  oracle_cross_validation();
  axiom_suite();
  exact_optimality_and_tightness();
  fixed_sink_optimality();
  continuous_consistency();
  structural_invariants();
  budget_and_scaling();
  return failures ? 1 : 0;
}
