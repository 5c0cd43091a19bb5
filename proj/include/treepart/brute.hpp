#pragma once

#include "engine.hpp"
#include "oracle.hpp"
#include "tree.hpp"

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

namespace treepart {

struct TooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kBruteMaxN = 12;

template <class Num>
struct BruteResult {
  Cost<Num> opt = Cost<Num>::infinity();
  Partition<Num> witness;
  bool found = false;
};

namespace detail {

// Components of the tree after deleting the chosen edges.
template <class Num>
std::vector<std::vector<int>> components_without(const TreeGraph<Num>& t, const std::vector<int>& cut) {
  std::vector<char> gone(t.m(), 0);
  for (int e : cut) gone[e] = 1;
  std::vector<int> comp(t.n(), -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < t.n(); ++s) {
    if (comp[s] >= 0) continue;
    out.push_back({});
    std::vector<int> st{s};
    comp[s] = static_cast<int>(out.size()) - 1;
    while (!st.empty()) {
      int x = st.back();
      st.pop_back();
      out.back().push_back(x);
      for (const Adj& a : t.adj[x])
        if (!gone[a.edge] && comp[a.to] < 0) {
          comp[a.to] = comp[s];
          st.push_back(a.to);
        }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

// Calls fn(cut) for every edge subset of size exactly m in lexicographic order.
template <class Fn>
void for_each_subset(int edges, int m, Fn&& fn) {
  if (m > edges) return;
  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  for (;;) {
    fn(idx);
    int i = m - 1;
    while (i >= 0 && idx[i] == edges - m + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
}

template <class Num>
struct BestCentre {
  Cost<Num> cost = Cost<Num>::infinity();
  SinkLocation<Num> loc;
};

template <class Num>
class CentreMemo {
 public:
  CentreMemo(const TreeGraph<Num>& t, const CostOracle<Num>& f, std::optional<Num> grid) : t_(t), f_(f), grid_(grid) {}

  const BestCentre<Num>& best(const std::vector<int>& comp) {
    unsigned mask = 0;
    for (int x : comp) mask |= 1u << x;
    auto it = memo_.find(mask);
    if (it != memo_.end()) return it->second;
    BestCentre<Num> b;
    std::vector<char> in(t_.n(), 0);
    for (int x : comp) in[x] = 1;
    for (int c : comp) {
      Cost<Num> v = f_.eval_region(t_, region_of_set(t_, c, in));
      all_costs.insert(v);
      if (v < b.cost) {
        b.cost = v;
        b.loc = SinkLocation<Num>::at(c);
      }
    }
    if (grid_) {
      for (int e = 0; e < t_.m(); ++e) {
        const auto& ed = t_.edges[e];
        if (!in[ed.u] || !in[ed.v]) continue;
        Region L = grow_region(t_, ed.u, [&](int x, int y) { return in[y] && !(x == ed.u && y == ed.v); });
        Region R = grow_region(t_, ed.v, [&](int x, int y) { return in[y] && !(x == ed.v && y == ed.u); });
        SideProfile<Num> pl = f_.side_profile(t_, L, e), pr = f_.side_profile(t_, R, e);
        for (Num x = *grid_; x < ed.tau; x += *grid_) {
          Cost<Num> v = cmax(pl.interior(x), pr.interior(Num(ed.tau - x)));
          if (v < b.cost) {
            b.cost = v;
            b.loc = SinkLocation<Num>::edge_point(ed.u, ed.v, x);
          }
        }
      }
    }
    return memo_.emplace(mask, b).first->second;
  }

  std::set<Cost<Num>> all_costs;

 private:
  const TreeGraph<Num>& t_;
  const CostOracle<Num>& f_;
  std::optional<Num> grid_;
  std::map<unsigned, BestCentre<Num>> memo_;
};

template <class Num>
BruteResult<Num> brute_core(const TreeGraph<Num>& t, const CostOracle<Num>& f, int k, std::optional<Num> grid,
                            std::set<Cost<Num>>* costs) {
  if (t.n() > kBruteMaxN) throw TooLarge("brute force limited to n <= 12");
  CentreMemo<Num> memo(t, f, grid);
  BruteResult<Num> res;
  const int maxcut = std::min(k - 1, t.m());
  for (int m = 0; m <= maxcut; ++m) {
    for_each_subset(t.m(), m, [&](const std::vector<int>& cut) {
      auto comps = components_without(t, cut);
      Cost<Num> worst(Num(0));
      Partition<Num> p;
      for (const auto& c : comps) {
        const auto& b = memo.best(c);
        worst = cmax(worst, b.cost);
        p.sinks.push_back(b.loc);
        p.blocks.push_back(c);
      }
      if (!res.found || worst < res.opt) {
        res.opt = worst;
        res.witness = p;
        res.found = true;
      }
    });
  }
  if (costs) *costs = memo.all_costs;
  return res;
}

}  // namespace detail

// Exhaustive min-max over at most k-1 edge deletions and all centre choices.
template <class Num>
BruteResult<Num> brute_minmax(const TreeGraph<Num>& t, const CostOracle<Num>& f, int k) {
  return detail::brute_core<Num>(t, f, k, std::nullopt, nullptr);
}

template <class Num>
bool brute_feasible(const TreeGraph<Num>& t, const CostOracle<Num>& f, int k, const Cost<Num>& T) {
  return brute_minmax(t, f, k).opt <= T;
}

// Every block cost the enumeration encounters, for tightness checks.
template <class Num>
std::set<Cost<Num>> brute_block_costs(const TreeGraph<Num>& t, const CostOracle<Num>& f, int k) {
  std::set<Cost<Num>> s;
  detail::brute_core<Num>(t, f, k, std::nullopt, &s);
  return s;
}

// Sinks may also sit on grid points of internal edges.
template <class Num>
BruteResult<Num> brute_continuous(const TreeGraph<Num>& t, const CostOracle<Num>& f, int k, const Num& grid) {
  if (!f.continuous()) throw UnsupportedContinuous(f.name() + " does not support continuous sinks");
  return detail::brute_core<Num>(t, f, k, std::optional<Num>(grid), nullptr);
}

// Optimal partition where every block holds exactly one of the given sinks.
template <class Num>
BruteResult<Num> brute_fixed(const TreeGraph<Num>& t, const std::vector<int>& sinks, const CostOracle<Num>& f) {
  if (t.n() > kBruteMaxN) throw TooLarge("brute force limited to n <= 12");
  BruteResult<Num> res;
  std::vector<int> which(t.n(), -1);
  for (int i = 0; i < static_cast<int>(sinks.size()); ++i) which[sinks[i]] = i;
  detail::for_each_subset(t.m(), static_cast<int>(sinks.size()) - 1, [&](const std::vector<int>& cut) {
    auto comps = detail::components_without(t, cut);
    Cost<Num> worst(Num(0));
    Partition<Num> p;
    for (const auto& c : comps) {
      int s = -1, cnt = 0;
      for (int x : c)
        if (which[x] >= 0) {
          s = x;
          ++cnt;
        }
      if (cnt != 1) return;
      worst = cmax(worst, f.eval(t, c, SinkLocation<Num>::at(s)));
      p.sinks.push_back(SinkLocation<Num>::at(s));
      p.blocks.push_back(c);
    }
    if (!res.found || worst < res.opt) {
      res.opt = worst;
      res.witness = p;
      res.found = true;
    }
  });
  return res;
}

}  // namespace treepart
