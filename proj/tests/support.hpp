#pragma once

#include "treepart/treepart.hpp"

#include <algorithm>
#include <memory>
#include <random>
#include <vector>

namespace tp_test {

using namespace treepart;
using Q = Rational;

inline Q frac(long p, long q) {
  Q r(p, q);
  r.canonicalize();
  return r;
}

// Random recursive tree with small integer parameters.
template <class Num = Q>
TreeGraph<Num> random_tree(std::mt19937& g, int n, int max_w = 4, int max_tau = 4, int max_cap = 3) {
  std::vector<Num> w(n);
  for (auto& x : w) x = Num(static_cast<int>(g() % (max_w + 1)));
  std::vector<EdgeSpec<Num>> es;
  for (int i = 1; i < n; ++i)
    es.push_back({static_cast<int>(g() % i), i, Num(static_cast<int>(g() % max_tau) + 1),
                  Num(static_cast<int>(g() % max_cap) + 1)});
  return build_tree(w, es);
}

// Random tree with non-integral rational parameters.
inline TreeGraph<Q> random_rational_tree(std::mt19937& g, int n) {
  std::vector<Q> w(n);
  for (auto& x : w) x = frac(g() % 9, g() % 3 + 1);
  std::vector<EdgeSpec<Q>> es;
  for (int i = 1; i < n; ++i)
    es.push_back({static_cast<int>(g() % i), i, frac(g() % 7 + 1, g() % 3 + 1),
                  frac(g() % 5 + 1, g() % 2 + 1)});
  return build_tree(w, es);
}

template <class Num>
TreeGraph<Num> path_tree(const std::vector<int>& w, const std::vector<int>& tau) {
  std::vector<Num> ws;
  for (int x : w) ws.push_back(Num(x));
  std::vector<EdgeSpec<Num>> es;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) es.push_back({int(i), int(i) + 1, Num(tau[i]), Num(1)});
  return build_tree(ws, es);
}

inline std::vector<int> random_connected_set(std::mt19937& g, const TreeGraph<Q>& t, int start) {
  std::vector<int> set{start};
  std::vector<char> in(t.n(), 0);
  in[start] = 1;
  const int target = 1 + static_cast<int>(g() % t.n());
  for (int it = 0; it < 4 * t.n() && static_cast<int>(set.size()) < target; ++it) {
    const int x = set[g() % set.size()];
    const auto& a = t.adj[x];
    if (a.empty()) break;
    const int y = a[g() % a.size()].to;
    if (!in[y]) {
      in[y] = 1;
      set.push_back(y);
    }
  }
  std::sort(set.begin(), set.end());
  return set;
}

// Blocks are disjoint, cover V, are connected, and each holds its sink.
template <class Num>
bool valid_partition(const TreeGraph<Num>& t, const std::vector<SinkLocation<Num>>& sinks,
                     const std::vector<std::vector<int>>& blocks) {
  if (sinks.size() != blocks.size()) return false;
  std::vector<int> seen(t.n(), 0);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].empty() || !is_connected_set(t, blocks[i])) return false;
    for (int x : blocks[i]) ++seen[x];
    const auto& s = sinks[i];
    auto has = [&](int x) { return std::find(blocks[i].begin(), blocks[i].end(), x) != blocks[i].end(); };
    if (!s.on_edge && !has(s.vertex)) return false;
    if (s.on_edge && !has(s.u) && !has(s.v)) return false;
  }
  return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

template <class Num>
Cost<Num> max_block_cost(const TreeGraph<Num>& t, const CostOracle<Num>& f, const Partition<Num>& p) {
  Cost<Num> c(Num(0));
  for (std::size_t i = 0; i < p.sinks.size(); ++i) c = cmax(c, f.eval(t, p.blocks[i], p.sinks[i]));
  return c;
}

template <class Num = Q>
std::vector<std::unique_ptr<CostOracle<Num>>> path_monotone_oracles() {
  std::vector<std::unique_ptr<CostOracle<Num>>> v;
  v.push_back(std::make_unique<KCenterOracle<Num>>());
  v.push_back(std::make_unique<EvacOracle<Num>>());
  return v;
}

}  // namespace tp_test
