#pragma once

#include "number.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace treepart {

enum class TreeErrorKind { CycleOrDisconnected, NonPositiveParameter, NegativeWeight, NotAnEdge, BadVertex };

inline const char* tree_error_name(TreeErrorKind k) {
  switch (k) {
    case TreeErrorKind::CycleOrDisconnected: return "CycleOrDisconnected";
    case TreeErrorKind::NonPositiveParameter: return "NonPositiveParameter";
    case TreeErrorKind::NegativeWeight: return "NegativeWeight";
    case TreeErrorKind::NotAnEdge: return "NotAnEdge";
    case TreeErrorKind::BadVertex: return "BadVertex";
  }
  return "TreeError";
}

struct TreeError : std::runtime_error {
  TreeErrorKind kind;
  TreeError(TreeErrorKind k, const std::string& msg)
      : std::runtime_error(std::string(tree_error_name(k)) + ": " + msg), kind(k) {}
};

template <class Num>
struct EdgeSpec {
  int u = 0, v = 0;
  Num tau{1};
  Num cap{1};
};

template <class Num>
struct Edge {
  int u = 0, v = 0;
  Num tau{1};
  Num cap{1};
  int other(int x) const { return x == u ? v : u; }
};

struct Adj {
  int to;
  int edge;
};

// Immutable weighted tree with edge lengths and capacities.
template <class Num>
class TreeGraph {
 public:
  std::vector<Num> weight;
  std::vector<Edge<Num>> edges;
  std::vector<std::vector<Adj>> adj;
  // Identity of each vertex in the instance it was derived from.
  std::vector<int> origin;

  int n() const { return static_cast<int>(weight.size()); }
  int m() const { return static_cast<int>(edges.size()); }
  int degree(int v) const { return static_cast<int>(adj[v].size()); }

  int edge_between(int u, int v) const {
    for (const Adj& a : adj[u])
      if (a.to == v) return a.edge;
    return -1;
  }

  const Edge<Num>& edge(int u, int v) const {
    int e = edge_between(u, v);
    if (e < 0) throw TreeError(TreeErrorKind::NotAnEdge, std::to_string(u) + "-" + std::to_string(v));
    return edges[e];
  }

  Num total_weight() const {
    Num s = 0;
    for (const Num& w : weight) s += w;
    return s;
  }
};

template <class Num>
TreeGraph<Num> build_tree(const std::vector<Num>& weights, const std::vector<EdgeSpec<Num>>& edges) {
  const int n = static_cast<int>(weights.size());
  if (n == 0) throw TreeError(TreeErrorKind::CycleOrDisconnected, "empty vertex set");
  if (static_cast<int>(edges.size()) != n - 1)
    throw TreeError(TreeErrorKind::CycleOrDisconnected, "expected n-1 edges");
  TreeGraph<Num> t;
  t.weight = weights;
  for (Num& w : t.weight) normalize(w);
  t.adj.assign(n, {});
  t.origin.resize(n);
  std::iota(t.origin.begin(), t.origin.end(), 0);
  for (int v = 0; v < n; ++v)
    if (weights[v] < 0) throw TreeError(TreeErrorKind::NegativeWeight, "vertex " + std::to_string(v));
  for (const auto& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
      throw TreeError(TreeErrorKind::BadVertex, "edge endpoint out of range");
    if (e.u == e.v) throw TreeError(TreeErrorKind::CycleOrDisconnected, "self loop");
    if (!(e.tau > 0) || !(e.cap > 0))
      throw TreeError(TreeErrorKind::NonPositiveParameter,
                      "edge " + std::to_string(e.u) + "-" + std::to_string(e.v));
    int id = static_cast<int>(t.edges.size());
    t.edges.push_back({e.u, e.v, e.tau, e.cap});
    normalize(t.edges.back().tau);
    normalize(t.edges.back().cap);
    t.adj[e.u].push_back({e.v, id});
    t.adj[e.v].push_back({e.u, id});
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (const Adj& a : t.adj[x])
      if (!seen[a.to]) {
        seen[a.to] = 1;
        ++count;
        stack.push_back(a.to);
      }
  }
  if (count != n) throw TreeError(TreeErrorKind::CycleOrDisconnected, "graph is not a tree");
  return t;
}

// Vertex sequence of the unique path u..v.
template <class Num>
std::vector<int> tree_path(const TreeGraph<Num>& t, int u, int v) {
  std::vector<int> par(t.n(), -2);
  std::vector<int> q{u};
  par[u] = -1;
  for (std::size_t h = 0; h < q.size() && par[v] == -2; ++h)
    for (const Adj& a : t.adj[q[h]])
      if (par[a.to] == -2) {
        par[a.to] = q[h];
        q.push_back(a.to);
      }
  std::vector<int> p;
  for (int x = v; x != -1; x = par[x]) p.push_back(x);
  std::reverse(p.begin(), p.end());
  return p;
}

// A vertex set of a tree: either the side V_{-v}(u) of an edge or an explicit sorted list.
template <class Num>
class SubtreeView {
 public:
  static SubtreeView cut(const TreeGraph<Num>& t, int u, int v) {
    if (t.edge_between(u, v) < 0)
      throw TreeError(TreeErrorKind::NotAnEdge, std::to_string(u) + "-" + std::to_string(v));
    SubtreeView s;
    s.tree_ = &t;
    s.cut_ = {u, v};
    return s;
  }
  static SubtreeView explicit_set(const TreeGraph<Num>& t, std::vector<int> vs) {
    SubtreeView s;
    s.tree_ = &t;
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    s.members_ = std::move(vs);
    return s;
  }

  bool is_cut() const { return cut_.has_value(); }
  std::pair<int, int> cut_edge() const { return *cut_; }

  std::vector<int> members() const {
    if (!cut_) return members_;
    std::vector<int> out;
    std::vector<std::pair<int, int>> st{{cut_->first, cut_->second}};
    while (!st.empty()) {
      auto [x, p] = st.back();
      st.pop_back();
      out.push_back(x);
      for (const Adj& a : tree_->adj[x])
        if (a.to != p) st.push_back({a.to, x});
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::size_t size() const { return members().size(); }

  bool contains(int x) const {
    auto m = members();
    return std::binary_search(m.begin(), m.end(), x);
  }

  const TreeGraph<Num>& tree() const { return *tree_; }

 private:
  const TreeGraph<Num>* tree_ = nullptr;
  std::optional<std::pair<int, int>> cut_;
  std::vector<int> members_;
};

template <class Num>
SubtreeView<Num> subtree_away(const TreeGraph<Num>& t, int u, int v) {
  return SubtreeView<Num>::cut(t, u, v);
}

// True when the vertex set induces a connected subgraph.
template <class Num>
bool is_connected_set(const TreeGraph<Num>& t, const std::vector<int>& vs) {
  if (vs.empty()) return false;
  std::vector<char> in(t.n(), 0), seen(t.n(), 0);
  for (int x : vs) in[x] = 1;
  std::vector<int> st{vs.front()};
  seen[vs.front()] = 1;
  std::size_t cnt = 1;
  while (!st.empty()) {
    int x = st.back();
    st.pop_back();
    for (const Adj& a : t.adj[x])
      if (in[a.to] && !seen[a.to]) {
        seen[a.to] = 1;
        ++cnt;
        st.push_back(a.to);
      }
  }
  std::size_t distinct = 0;
  for (int x = 0; x < t.n(); ++x) distinct += in[x];
  return cnt == distinct;
}

// Where a sink sits: a vertex, or a point on edge (u,v) at distance offset from u.
template <class Num>
struct SinkLocation {
  bool on_edge = false;
  int vertex = -1;
  int u = -1, v = -1;
  Num offset{0};

  static SinkLocation at(int x) {
    SinkLocation s;
    s.vertex = x;
    return s;
  }
  static SinkLocation edge_point(int u, int v, const Num& off) {
    SinkLocation s;
    s.on_edge = true;
    s.u = u;
    s.v = v;
    s.offset = off;
    normalize(s.offset);
    return s;
  }
};

struct CentroidDecomposition {
  // levels[i] holds the centroids chosen at stage i+1.
  std::vector<std::vector<int>> levels;
  std::vector<int> level_of;
};

// Recursive centroid decomposition; among equally balanced centroids the lowest index wins.
template <class Num>
CentroidDecomposition centroid_decompose(const TreeGraph<Num>& t) {
  const int n = t.n();
  CentroidDecomposition cd;
  cd.level_of.assign(n, -1);
  std::vector<char> removed(n, 0);
  std::vector<int> sz(n, 0), par(n, -1), order;
  std::vector<std::pair<int, int>> current{{0, 0}};
  while (!current.empty()) {
    std::vector<std::pair<int, int>> next;
    std::vector<int> chosen;
    int depth = current.front().second;
    for (auto [start, d] : current) {
      (void)d;
      order.clear();
      order.push_back(start);
      par[start] = -1;
      for (std::size_t h = 0; h < order.size(); ++h) {
        int x = order[h];
        for (const Adj& a : t.adj[x])
          if (!removed[a.to] && a.to != par[x]) {
            par[a.to] = x;
            order.push_back(a.to);
          }
      }
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        sz[*it] = 1;
        for (const Adj& a : t.adj[*it])
          if (!removed[a.to] && a.to != par[*it]) sz[*it] += sz[a.to];
      }
      const int total = static_cast<int>(order.size());
      int best = -1, best_val = total + 1;
      for (int x : order) {
        int mx = total - sz[x];
        for (const Adj& a : t.adj[x])
          if (!removed[a.to] && a.to != par[x]) mx = std::max(mx, sz[a.to]);
        if (mx < best_val || (mx == best_val && x < best)) {
          best_val = mx;
          best = x;
        }
      }
      chosen.push_back(best);
      removed[best] = 1;
      cd.level_of[best] = depth;
      for (const Adj& a : t.adj[best])
        if (!removed[a.to]) next.push_back({a.to, depth + 1});
    }
    std::sort(chosen.begin(), chosen.end());
    cd.levels.push_back(chosen);
    current = std::move(next);
  }
  return cd;
}

}  // namespace treepart
