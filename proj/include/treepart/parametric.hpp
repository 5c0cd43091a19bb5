#pragma once

#include "bounded.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace treepart {

struct RelaxedOracleRejected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Half-open search range (low, high] for the optimal threshold.
template <class Num>
struct ThresholdRange {
  Cost<Num> low{Num(0)};
  Cost<Num> high = Cost<Num>::infinity();
};

template <class Num>
struct TraceStep {
  enum class Kind { If, Stage } kind = Kind::If;
  Cost<Num> a;      // queried value (If) or the new boundary (Stage)
  bool le = false;  // answer for If steps
  int probes = 0;
  ThresholdRange<Num> range;
};

template <class Num>
using FeasProbe = std::function<bool(const Cost<Num>&)>;

// Resolves "a <= T*?" against the range, probing only when a falls strictly inside it.
template <class Num>
bool if_step(ThresholdRange<Num>& r, const Cost<Num>& a, const FeasProbe<Num>& feas, int* probes = nullptr) {
  if (a <= r.low) return true;
  if (a >= r.high) return false;
  if (probes) ++*probes;
  if (feas(a)) {
    r.high = a;
    return false;
  }
  r.low = a;
  return true;
}

// Shrinks the range so that no finite value of the batch lies strictly inside it.
template <class Num>
void stage_step(ThresholdRange<Num>& r, const std::vector<Cost<Num>>& values, const FeasProbe<Num>& feas,
                int* probes = nullptr) {
  std::vector<Cost<Num>> c;
  for (const auto& v : values)
    if (!v.is_inf() && r.low < v && v < r.high) c.push_back(v);
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  std::size_t lo = 0, hi = c.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (probes) ++*probes;
    if (feas(c[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  if (lo > 0) r.low = c[lo - 1];
  if (lo < c.size()) r.high = c[lo];
}

// Runs the feasibility test without knowing T*, answering comparisons through the range.
template <class Num>
class InterferedDecider : public Decider<Num> {
 public:
  InterferedDecider(FeasProbe<Num> feas, ThresholdRange<Num> r, bool record)
      : feas_(std::move(feas)), r_(r), record_(record) {}

  bool le(const Cost<Num>& a) override {
    int p = 0;
    bool ans = if_step(r_, a, feas_, &p);
    probes += p;
    if (record_) {
      decisions_.push_back({a, ans});
      TraceStep<Num> s;
      s.kind = TraceStep<Num>::Kind::If;
      s.a = a;
      s.le = ans;
      s.probes = p;
      s.range = r_;
      trace.push_back(s);
      check();
    }
    return ans;
  }

  void stage(const std::vector<Cost<Num>>& values) override {
    int p = 0;
    stage_step(r_, values, feas_, &p);
    probes += p;
    if (record_) {
      TraceStep<Num> s;
      s.kind = TraceStep<Num>::Kind::Stage;
      s.probes = p;
      s.range = r_;
      trace.push_back(s);
      for (const auto& v : values)
        if (r_.low < v && v < r_.high) ++violations;
      check();
    }
  }

  bool concrete() const override { return false; }
  Cost<Num> threshold() const override { return r_.low; }
  const ThresholdRange<Num>& range() const { return r_; }

  std::uint64_t probes = 0;
  int violations = 0;
  std::vector<TraceStep<Num>> trace;

 private:
  // Every earlier answer must hold for every T in [low, high).
  void check() {
    if (!(r_.low < r_.high)) ++violations;
    for (const auto& [a, ans] : decisions_) {
      if (ans && !(a <= r_.low)) ++violations;
      if (!ans && !(a >= r_.high)) ++violations;
    }
  }

  FeasProbe<Num> feas_;
  ThresholdRange<Num> r_;
  bool record_;
  std::vector<std::pair<Cost<Num>, bool>> decisions_;
};

struct MinmaxOptions {
  bool continuous = false;
  bool check_invariants = false;
};

template <class Num>
struct MinmaxResult {
  Cost<Num> threshold;
  Partition<Num> partition;
  SolveStats stats;         // interfered run plus probe totals
  SolveStats final_stats;   // the concrete run at the optimum
  std::vector<TraceStep<Num>> trace;
};

// Optimal min-max threshold with at most k sinks, and a partition attaining it.
template <class Num>
MinmaxResult<Num> solve_minmax(const TreeGraph<Num>& t, const CostOracle<Num>& f, int k, MinmaxOptions opt = {}) {
  if (f.relaxed()) throw RelaxedOracleRejected(f.name() + " lacks path monotonicity; use the fixed-sink solver");
  if (opt.continuous && !f.continuous())
    throw UnsupportedContinuous(f.name() + " does not support continuous sinks");
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  CentroidDecomposition cd = centroid_decompose(t);
  BoundedOptions bo{opt.continuous, false};
  MinmaxResult<Num> res;
  std::uint64_t probes = 0, probe_calls = 0;
  FeasProbe<Num> feas = [&](const Cost<Num>& T) {
    ++probes;
    FixedDecider<Num> d(T);
    BoundedSolver<Num> s(t, f, k, d, cd, bo);
    auto r = s.run();
    probe_calls += r.stats.oracle_calls;
    return r.feasible;
  };
  Cost<Num> best;
  if (feas(Cost<Num>(Num(0)))) {
    best = Cost<Num>(Num(0));
  } else {
    InterferedDecider<Num> dec(feas, ThresholdRange<Num>{}, opt.check_invariants);
    BoundedSolver<Num> s(t, f, k, dec, cd, BoundedOptions{opt.continuous, opt.check_invariants});
    auto r = s.run();
    res.stats = r.stats;
    res.stats.invariant_violations += dec.violations;
    res.trace = std::move(dec.trace);
    best = dec.range().high;
  }
  res.stats.probes = probes;
  res.stats.probe_oracle_calls = probe_calls;
  FixedDecider<Num> d(best);
  BoundedSolver<Num> fin(t, f, k, d, cd, BoundedOptions{opt.continuous, opt.check_invariants});
  auto r = fin.run();
  if (!r.feasible) ++res.stats.invariant_violations;
  res.threshold = best;
  res.partition = r.partition;
  res.final_stats = r.stats;
  return res;
}

}  // namespace treepart
