#pragma once

#include "engine.hpp"
#include "parametric.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace treepart {

// One connected piece of the tree after the leaf transform.
template <class Num>
struct SinkComponent {
  TreeGraph<Num> tree;
  std::vector<int> to_orig;  // component vertex -> original vertex (stubs map to their sink)
  std::vector<int> stubs;    // component vertices that are sink stubs
};

template <class Num>
struct LeafTransform {
  std::vector<SinkComponent<Num>> components;
  std::vector<int> lone_sinks;  // sinks with no non-sink neighbour
};

// Every sink becomes one zero-supply leaf per non-sink neighbour, inheriting that edge.
template <class Num>
LeafTransform<Num> leaf_transform(const TreeGraph<Num>& t, const std::vector<int>& sinks) {
  const int n = t.n();
  std::vector<char> is_sink(n, 0);
  for (int s : sinks) {
    if (s < 0 || s >= n) throw TreeError(TreeErrorKind::BadVertex, "sink out of range");
    is_sink[s] = 1;
  }
  LeafTransform<Num> out;
  std::vector<int> comp(n, -1);
  for (int s : sinks) {
    bool lone = true;
    for (const Adj& a : t.adj[s])
      if (!is_sink[a.to]) lone = false;
    if (lone) out.lone_sinks.push_back(s);
  }
  for (int start = 0; start < n; ++start) {
    if (is_sink[start] || comp[start] >= 0) continue;
    const int cid = static_cast<int>(out.components.size());
    std::vector<int> verts{start};
    comp[start] = cid;
    for (std::size_t h = 0; h < verts.size(); ++h)
      for (const Adj& a : t.adj[verts[h]])
        if (!is_sink[a.to] && comp[a.to] < 0) {
          comp[a.to] = cid;
          verts.push_back(a.to);
        }
    std::sort(verts.begin(), verts.end());
    std::vector<int> local(n, -1);
    SinkComponent<Num> c;
    std::vector<Num> w;
    std::vector<EdgeSpec<Num>> es;
    for (int x : verts) {
      local[x] = static_cast<int>(w.size());
      w.push_back(t.weight[x]);
      c.to_orig.push_back(x);
    }
    for (int x : verts)
      for (const Adj& a : t.adj[x]) {
        const auto& e = t.edges[a.edge];
        if (!is_sink[a.to]) {
          if (x < a.to) es.push_back({local[x], local[a.to], e.tau, e.cap});
          continue;
        }
        const int stub = static_cast<int>(w.size());
        w.push_back(Num(0));
        c.to_orig.push_back(a.to);
        c.stubs.push_back(stub);
        es.push_back({local[x], stub, e.tau, e.cap});
      }
    c.tree = build_tree(w, es);
    for (int i = 0; i < c.tree.n(); ++i) c.tree.origin[i] = t.origin[c.to_orig[i]];
    out.components.push_back(std::move(c));
  }
  return out;
}

// Feasibility of serving a component from its stubs at the decider's threshold.
template <class Num>
class FixedSinkSolver {
 public:
  FixedSinkSolver(const SinkComponent<Num>& c, const CostOracle<Num>& f, Decider<Num>& d)
      : c_(c), eng_(c.tree, f, d, false), dec_(d) {
    for (int s : c.stubs) eng_.make_vertex_sink(s);
  }

  bool run() {
    eng_.after_first_phase = true;
    for (;;) {
      if (eng_.alive_count() == 0) return true;
      std::vector<int> S = eng_.open_sinks();
      if (S.empty()) return false;
      if (S.size() == 1) {
        const int a = eng_.sinks()[S[0]].anchor;
        Region r = grow_region(c_.tree, a, [&](int, int y) { return eng_.alive(y); });
        if (!dec_.le(eng_.call(r))) return false;
        eng_.close_into(S[0], eng_.alive_vertices());
        return true;
      }
      if (static_cast<int>(S.size()) == eng_.alive_count()) {
        for (int sid : S) eng_.close_into(sid, {eng_.sinks()[sid].anchor});
        return true;
      }
      eng_.build_hub();
      auto fire = eng_.reaching_edge();
      if (!fire) {
        eng_.commit_subtree(eng_.root());
        return true;
      }
      ++eng_.stats.reaching_rounds;
      eng_.commit_subtree(fire->first);
    }
  }

  // max over outstanding branches T_i at w_i of f(T_i + w_i, w_i); a lower bound on T*.
  Cost<Num> branch_lower_bound() {
    if (eng_.open_sinks().size() < 2) return Cost<Num>(Num(0));
    eng_.build_hub();
    Cost<Num> lb(Num(0));
    for (int w : eng_.bfs_order()) {
      if (!eng_.in_hub(w)) continue;
      for (const Adj& a : c_.tree.adj[w])
        if (eng_.alive(a.to) && !eng_.in_hub(a.to)) lb = cmax(lb, eng_.b_val(a.to, w));
    }
    return lb;
  }

  PartitionEngine<Num>& engine() { return eng_; }

 private:
  const SinkComponent<Num>& c_;
  PartitionEngine<Num> eng_;
  Decider<Num>& dec_;
};

template <class Num>
struct FixedResult {
  Cost<Num> threshold;
  std::vector<int> sinks;
  std::vector<std::vector<int>> blocks;  // blocks[i] is served by sinks[i]
  std::vector<Cost<Num>> component_thresholds;
  SolveStats stats;
};

template <class Num>
bool fixed_feasible(const SinkComponent<Num>& c, const CostOracle<Num>& f, const Cost<Num>& T,
                    SolveStats* st = nullptr) {
  FixedDecider<Num> d(T);
  FixedSinkSolver<Num> s(c, f, d);
  bool ok = s.run();
  if (st) st->probe_oracle_calls += s.engine().stats.oracle_calls;
  return ok;
}

// Optimal threshold of one component.
template <class Num>
Cost<Num> component_optimum(const SinkComponent<Num>& c, const CostOracle<Num>& f, SolveStats& st) {
  FeasProbe<Num> feas = [&](const Cost<Num>& T) {
    ++st.probes;
    return fixed_feasible(c, f, T, &st);
  };
  Cost<Num> low(Num(0));
  if (!f.relaxed() && c.stubs.size() >= 2) {
    FixedDecider<Num> d(Cost<Num>::infinity());
    FixedSinkSolver<Num> s(c, f, d);
    low = s.branch_lower_bound();
    st.oracle_calls += s.engine().stats.oracle_calls;
  }
  if (feas(low)) return low;
  ThresholdRange<Num> r;
  r.low = low;
  InterferedDecider<Num> dec(feas, r, false);
  FixedSinkSolver<Num> s(c, f, dec);
  s.run();
  st.oracle_calls += s.engine().stats.oracle_calls;
  return dec.range().high;
}

// Min-max partition in which every block holds exactly one of the given sinks.
template <class Num>
FixedResult<Num> solve_fixed(const TreeGraph<Num>& t, const std::vector<int>& sinks, const CostOracle<Num>& f) {
  if (sinks.empty()) throw std::invalid_argument("at least one sink is required");
  {
    std::vector<int> s = sinks;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw std::invalid_argument("duplicate sink");
  }
  LeafTransform<Num> lt = leaf_transform(t, sinks);
  FixedResult<Num> res;
  res.threshold = Cost<Num>(Num(0));
  std::vector<int> idx(t.n(), -1);
  for (int s : sinks) {
    idx[s] = static_cast<int>(res.sinks.size());
    res.sinks.push_back(s);
    res.blocks.push_back({s});
  }
  for (const auto& c : lt.components) {
    Cost<Num> opt = component_optimum(c, f, res.stats);
    res.component_thresholds.push_back(opt);
    res.threshold = cmax(res.threshold, opt);
    FixedDecider<Num> d(opt);
    FixedSinkSolver<Num> s(c, f, d);
    if (!s.run()) ++res.stats.invariant_violations;
    res.stats.oracle_calls += s.engine().stats.oracle_calls;
    for (const auto& st : s.engine().sinks()) {
      const int orig = c.to_orig[st.anchor];
      for (int x : st.block)
        if (x != st.anchor) res.blocks[idx[orig]].push_back(c.to_orig[x]);
    }
  }
  for (auto& b : res.blocks) std::sort(b.begin(), b.end());
  return res;
}

}  // namespace treepart
