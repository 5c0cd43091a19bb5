#pragma once

#include "tree.hpp"

#include <vector>

namespace treepart {

// A vertex set rooted at a centre vertex, listed in BFS order from the root.
struct Region {
  std::vector<int> order;  // order[0] is the root
  std::vector<int> par;    // index into order of the parent, -1 for the root
  std::vector<int> pedge;  // edge id towards the parent, -1 for the root

  int size() const { return static_cast<int>(order.size()); }
  int root() const { return order.front(); }
};

// BFS from root following edges (x -> y) for which enter(x, y) holds.
template <class Num, class Enter>
Region grow_region(const TreeGraph<Num>& t, int root, Enter&& enter) {
  Region r;
  r.order.push_back(root);
  r.par.push_back(-1);
  r.pedge.push_back(-1);
  for (int h = 0; h < r.size(); ++h) {
    int x = r.order[h];
    int p = r.par[h] < 0 ? -1 : r.order[r.par[h]];
    for (const Adj& a : t.adj[x]) {
      if (a.to == p || !enter(x, a.to)) continue;
      r.order.push_back(a.to);
      r.par.push_back(h);
      r.pedge.push_back(a.edge);
    }
  }
  return r;
}

// Region over an explicit connected vertex set; membership given as a flag array.
template <class Num>
Region region_of_set(const TreeGraph<Num>& t, int root, const std::vector<char>& in) {
  return grow_region(t, root, [&](int, int y) { return in[y] != 0; });
}

template <class Num>
Region region_of_set(const TreeGraph<Num>& t, int root, const std::vector<int>& vs) {
  std::vector<char> in(t.n(), 0);
  for (int x : vs) in[x] = 1;
  return region_of_set(t, root, in);
}

// The side V_{-v}(u), rooted at u.
template <class Num>
Region region_away(const TreeGraph<Num>& t, int u, int v) {
  return grow_region(t, u, [&](int x, int y) { return !(x == u && y == v); });
}

}  // namespace treepart
