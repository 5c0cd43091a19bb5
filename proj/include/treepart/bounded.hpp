#pragma once

#include "engine.hpp"

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

namespace treepart {

struct BoundedOptions {
  bool continuous = false;
  bool check_invariants = false;
};

template <class Num>
struct BoundedResult {
  bool feasible = false;
  Partition<Num> partition;
  SolveStats stats;
};

// Decides whether k sinks suffice at the decider's threshold, building the partition.
template <class Num>
class BoundedSolver {
 public:
  BoundedSolver(const TreeGraph<Num>& t, const CostOracle<Num>& f, int k, Decider<Num>& d,
                const CentroidDecomposition& cd, BoundedOptions opt = {})
      : t_(t), k_(k), dec_(d), cd_(cd), opt_(opt), eng_(t, f, d, opt.continuous),
        label_(2 * t.m(), 0), mark_(t.n(), -1) {}

  BoundedResult<Num> run() {
    BoundedResult<Num> res;
    res.feasible = solve();
    res.partition = eng_.partition();
    res.stats = eng_.stats;
    return res;
  }

 private:
  enum : unsigned char { U = 0, L1 = 1, L2 = 2 };

  int did(int x, int y) const {
    const int e = t_.edge_between(x, y);
    return 2 * e + (t_.edges[e].u == x ? 0 : 1);
  }
  bool over() const { return eng_.sinks_created() > k_; }

  // Labels every directed edge lying beyond (u,v) as seen from u.
  void propagate_above(int u, int v) {
    std::vector<std::pair<int, int>> st{{u, v}};
    while (!st.empty()) {
      auto [x, y] = st.back();
      st.pop_back();
      for (const Adj& a : t_.adj[y]) {
        if (a.to == x || !eng_.alive(a.to)) continue;
        int id = 2 * a.edge + (t_.edges[a.edge].u == y ? 0 : 1);
        if (label_[id] != U) continue;
        label_[id] = L1;
        st.push_back({y, a.to});
      }
    }
  }

  // Labels every directed edge pointing towards u inside V_{-v}(u).
  void propagate_below(int u, int v) {
    std::vector<std::pair<int, int>> st{{v, u}};
    while (!st.empty()) {
      auto [x, y] = st.back();  // y is the head; explore edges (z, y)
      st.pop_back();
      for (const Adj& a : t_.adj[y]) {
        if (a.to == x || !eng_.alive(a.to)) continue;
        int id = 2 * a.edge + (t_.edges[a.edge].u == a.to ? 0 : 1);
        if (label_[id] != U) continue;
        label_[id] = L2;
        st.push_back({y, a.to});
      }
    }
  }

  void peak(int u, int v) {
    eng_.open_commit(u, v);
    label_[did(u, v)] = L1;
    propagate_above(u, v);
  }

  bool skip_centroid(int v) const { return !eng_.alive(v); }

  // Returns true once the answer is known (infeasible or fully committed).
  bool first_phase(bool& feasible) {
    struct Item {
      int u, v, id;
      Cost<Num> a, b;
    };
    int stage_no = 0;
    for (const auto& level : cd_.levels) {
      if (eng_.alive_count() == 0) break;
      ++eng_.stats.stages;
      ++stage_no;
      std::vector<Item> items;
      std::vector<std::pair<std::size_t, std::size_t>> span;
      for (int v : level) {
        span.push_back({items.size(), items.size()});
        if (skip_centroid(v)) continue;
        std::vector<std::pair<int, int>> nb;
        for (const Adj& a : t_.adj[v]) {
          const int id = 2 * a.edge + (t_.edges[a.edge].u == a.to ? 0 : 1);
          if (eng_.alive(a.to) && label_[id] == U) nb.push_back({a.to, id});
        }
        std::sort(nb.begin(), nb.end());
        for (auto [u, id] : nb) items.push_back({u, v, id, {}, {}});
        span.back().second = items.size();
      }
      for (auto& it : items) {
        it.a = eng_.a_val(it.u, it.v);
        it.b = eng_.b_val(it.u, it.v);
      }
      if (opt_.check_invariants) check_stage(items, stage_no);
      std::vector<Cost<Num>> vals;
      vals.reserve(items.size() * 2);
      for (const auto& it : items) {
        vals.push_back(it.a);
        vals.push_back(it.b);
      }
      dec_.stage(vals);
      // A centroid whose every side can be pulled in supports the whole tree.
      for (std::size_t li = 0; li < level.size(); ++li) {
        const int v = level[li];
        if (skip_centroid(v)) continue;
        auto [lo, hi] = span[li];
        bool all = static_cast<int>(hi - lo) == t_.degree(v);
        for (std::size_t j = lo; all && j < hi; ++j)
          if (!dec_.le(items[j].b)) all = false;
        if (all) {
          eng_.commit_all_to(v);
          feasible = !over();
          return true;
        }
      }
      for (const auto& it : items) {
        if (!eng_.alive(it.u) || !eng_.alive(it.v) || label_[it.id] != U) continue;
        if (!dec_.le(it.a)) {
          label_[it.id] = L1;
          propagate_above(it.u, it.v);
        } else if (dec_.le(it.b)) {
          label_[it.id] = L2;
          propagate_below(it.u, it.v);
        } else {
          peak(it.u, it.v);
          if (over()) {
            feasible = false;
            return true;
          }
        }
      }
    }
    return false;
  }

  template <class Items>
  void check_stage(const Items& items, int stamp) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      for (int x : eng_.side_members(items[i].u, items[i].v)) {
        if (mark_[x] == stamp) ++eng_.stats.stage_overlaps;
        mark_[x] = stamp;
        if (eng_.sink_at(x) >= 0 && eng_.sinks()[eng_.sink_at(x)].open) ++eng_.stats.sink_in_side;
      }
    }
  }

  // Smallest i with f(V_{-p[i+1]}(p[i]) + p[i+1], p[i+1]) > T; the last index is known to qualify.
  std::pair<int, int> psearch(const std::vector<int>& p) {
    int lo = 0, hi = static_cast<int>(p.size()) - 2;
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      if (!dec_.le(eng_.b_val(p[mid], p[mid + 1])))
        hi = mid;
      else
        lo = mid + 1;
    }
    return {p[lo], p[lo + 1]};
  }

  std::vector<int> up_path(int from, int to) const {
    std::vector<int> p;
    for (int x = from;; x = eng_.parent(x)) {
      p.push_back(x);
      if (x == to) break;
    }
    return p;
  }

  // Commits T(u) after the reaching criterion fired at (u,v) and restores the no-peak state.
  void after_reaching(int u, int v) {
    ++eng_.stats.reaching_rounds;
    const int r = eng_.root();
    int h = v;
    while (!eng_.is_hub(h)) h = eng_.parent(h);
    int vp = -1;
    if (h != v) {
      vp = v;
      while (eng_.parent(vp) != h) vp = eng_.parent(vp);
    }
    const bool two_root = h == r && eng_.hub_children(r) == 2;
    int hp = -1, vpp = -1;
    std::vector<int> to_hp;
    if (two_root) {
      const int toward = (v == r) ? u : vp;
      int c2 = -1;
      for (const Adj& a : t_.adj[r])
        if (eng_.alive(a.to) && eng_.in_hub(a.to) && eng_.parent(a.to) == r && a.to != toward) c2 = a.to;
      hp = c2;
      while (!eng_.is_hub(hp)) hp = eng_.hub_kid(hp);
      vpp = eng_.parent(hp);
      to_hp = up_path(v, r);
      std::vector<int> down = up_path(hp, r);
      down.pop_back();
      to_hp.insert(to_hp.end(), down.rbegin(), down.rend());
    }
    std::vector<int> to_h;
    if (h != v) to_h = up_path(v, h);

    eng_.commit_subtree(u);

    if (h != v) {
      if (!dec_.le(eng_.b_val(vp, h))) {
        auto [a, b] = psearch(to_h);
        peak(a, b);
        return;
      }
    }
    if (two_root) {
      if (!dec_.le(eng_.b_val(vpp, hp))) {
        auto [a, b] = psearch(to_hp);
        peak(a, b);
      }
    }
  }

  bool solve() {
    bool feasible = false;
    if (first_phase(feasible)) return feasible;
    if (over()) return false;
    eng_.after_first_phase = true;
    for (;;) {
      if (over()) return false;
      if (eng_.end_cases()) return !over();
      eng_.build_hub();
      auto fire = eng_.reaching_edge();
      if (!fire) {
        eng_.commit_subtree(eng_.root());
        return !over();
      }
      after_reaching(fire->first, fire->second);
    }
  }

  const TreeGraph<Num>& t_;
  int k_;
  Decider<Num>& dec_;
  const CentroidDecomposition& cd_;
  BoundedOptions opt_;
  PartitionEngine<Num> eng_;
  std::vector<unsigned char> label_;
  std::vector<int> mark_;
};

template <class Num>
BoundedResult<Num> solve_bounded(const TreeGraph<Num>& t, const CostOracle<Num>& f, int k, const Cost<Num>& T,
                                 BoundedOptions opt = {}) {
  if (opt.continuous && !f.continuous())
    throw UnsupportedContinuous(f.name() + " does not support continuous sinks");
  CentroidDecomposition cd = centroid_decompose(t);
  FixedDecider<Num> d(T);
  BoundedSolver<Num> s(t, f, k, d, cd, opt);
  return s.run();
}

}  // namespace treepart
