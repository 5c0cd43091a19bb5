#pragma once

#include "plfn.hpp"
#include "region.hpp"
#include "tree.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

namespace treepart {

// Arrival profile at the root of a region: one cumulative arrival function per child slice.
template <class Num>
struct RootInflow {
  std::vector<PLFn<Num>> slices;
  Num slice_completion{0};  // max completion over slices (root supply not counted)
  Num total{0};             // supply of the region excluding the root
};

template <class Num>
RootInflow<Num> evac_inflow(const TreeGraph<Num>& t, const Region& r) {
  const int m = r.size();
  std::vector<PLFn<Num>> acc(m);
  RootInflow<Num> out;
  for (int i = m - 1; i >= 1; --i) {
    const int x = r.order[i];
    const Edge<Num>& e = t.edges[r.pedge[i]];
    PLFn<Num> avail = t.weight[x] != 0 ? pl_add(PLFn<Num>::step(t.weight[x]), acc[i]) : std::move(acc[i]);
    acc[i] = PLFn<Num>();
    if (avail.empty() || avail.total() == 0) continue;
    PLFn<Num> dep = pl_rate_limit(avail, e.cap);
    PLFn<Num> arr = pl_shift(dep, e.tau);
    const int p = r.par[i];
    if (p == 0) {
      out.total += arr.total();
      Num c = arr.completion();
      if (c > out.slice_completion) out.slice_completion = c;
      out.slices.push_back(std::move(arr));
    } else if (acc[p].empty()) {
      acc[p] = std::move(arr);
    } else {
      acc[p] = pl_add(acc[p], arr);
    }
  }
  return out;
}

// Cost with the sink at the region root.
template <class Num>
Num evac_root_cost(const TreeGraph<Num>& t, const Region& r) {
  return evac_inflow(t, r).slice_completion;
}

// Side cost profile for a region rooted at y leaving along an edge of capacity cap:
// at distance 0 the sink is y itself, at distance d > 0 the cost is depart + d.
template <class Num>
struct EvacSideProfile {
  Num at_root{0};
  Num depart{0};  // completion of departures from y into the edge
  bool positive = false;

  Num at(const Num& d) const {
    if (d == 0) return at_root;
    if (!positive) return Num(0);
    return depart + d;
  }
};

template <class Num>
EvacSideProfile<Num> evac_side_profile(const TreeGraph<Num>& t, const Region& r, const Num& cap) {
  EvacSideProfile<Num> p;
  RootInflow<Num> in = evac_inflow(t, r);
  p.at_root = in.slice_completion;
  const Num w = t.weight[r.root()];
  if (in.total + w == 0) return p;
  PLFn<Num> avail = PLFn<Num>::step(w);
  for (const auto& s : in.slices) avail = pl_add(avail, s);
  p.depart = pl_rate_limit(avail, cap).completion();
  p.positive = true;
  return p;
}

// Completion time of evacuating `block` to `sink`; +inf if the block is not a subtree
// containing the sink.
template <class Num>
Cost<Num> evac_completion_time(const TreeGraph<Num>& t, const std::vector<int>& block,
                               const SinkLocation<Num>& sink) {
  std::vector<char> in(t.n(), 0);
  for (int x : block) in[x] = 1;
  if (!is_connected_set(t, block)) return Cost<Num>::infinity();
  if (!sink.on_edge) {
    if (sink.vertex < 0 || sink.vertex >= t.n() || !in[sink.vertex]) return Cost<Num>::infinity();
    return Cost<Num>(evac_root_cost(t, region_of_set(t, sink.vertex, in)));
  }
  const Edge<Num>& e = t.edge(sink.u, sink.v);
  if (sink.offset < 0 || sink.offset > e.tau) return Cost<Num>::infinity();
  if (!in[sink.u] && !in[sink.v]) return Cost<Num>::infinity();
  if (sink.offset == 0) return evac_completion_time(t, block, SinkLocation<Num>::at(sink.u));
  if (sink.offset == e.tau) return evac_completion_time(t, block, SinkLocation<Num>::at(sink.v));
  Num best = 0;
  for (int side = 0; side < 2; ++side) {
    const int a = side ? sink.v : sink.u, b = side ? sink.u : sink.v;
    if (!in[a]) continue;
    Region r = grow_region(t, a, [&](int x, int y) { return in[y] && !(x == a && y == b); });
    Num c = evac_side_profile(t, r, e.cap).at(side ? Num(e.tau - sink.offset) : sink.offset);
    if (c > best) best = c;
  }
  return Cost<Num>(best);
}

// Sinks plus the sink index serving each vertex.
template <class Num>
struct EvacuationPlan {
  std::vector<SinkLocation<Num>> sinks;
  std::vector<int> assign;
};

struct InvalidPlan : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Event-driven fluid simulation of the plan; returns the time the last unit of supply
// reaches a sink.
template <class Num>
Num simulate_evacuation(const TreeGraph<Num>& t, const EvacuationPlan<Num>& plan) {
  const int n = t.n();
  if (static_cast<int>(plan.assign.size()) != n) throw InvalidPlan("assignment size mismatch");
  const int ns = static_cast<int>(plan.sinks.size());
  // Nodes: tree vertices then one node per edge-point sink.
  std::vector<int> sink_node(ns, -1);
  int nodes = n;
  for (int s = 0; s < ns; ++s) {
    const auto& loc = plan.sinks[s];
    if (!loc.on_edge) {
      if (loc.vertex < 0 || loc.vertex >= n) throw InvalidPlan("sink vertex out of range");
      sink_node[s] = loc.vertex;
    } else {
      if (t.edge_between(loc.u, loc.v) < 0) throw InvalidPlan("sink edge is not an edge");
      sink_node[s] = nodes++;
    }
  }
  std::vector<int> next(nodes, -1);
  std::vector<Num> tau(nodes, Num(0)), cap(nodes, Num(1)), supply(nodes, Num(0));
  std::vector<char> is_sink(nodes, 0), reached(n, 0);
  for (int s = 0; s < ns; ++s) is_sink[sink_node[s]] = 1;
  for (int s = 0; s < ns; ++s) {
    const auto& loc = plan.sinks[s];
    std::vector<std::pair<int, int>> q;  // (vertex, parent node)
    auto owned = [&](int x) { return plan.assign[x] == s; };
    if (!loc.on_edge) {
      if (!owned(loc.vertex)) throw InvalidPlan("sink vertex not assigned to its sink");
      reached[loc.vertex] = 1;
      q.push_back({loc.vertex, -1});
    } else {
      const Edge<Num>& e = t.edge(loc.u, loc.v);
      if (loc.offset < 0 || loc.offset > e.tau) throw InvalidPlan("edge offset out of range");
      const int pt = sink_node[s];
      if (owned(loc.u)) {
        next[loc.u] = pt;
        tau[loc.u] = loc.offset;
        cap[loc.u] = e.cap;
        reached[loc.u] = 1;
        q.push_back({loc.u, pt});
      }
      if (owned(loc.v)) {
        next[loc.v] = pt;
        tau[loc.v] = e.tau - loc.offset;
        cap[loc.v] = e.cap;
        reached[loc.v] = 1;
        q.push_back({loc.v, pt});
      }
    }
    for (std::size_t h = 0; h < q.size(); ++h) {
      int x = q[h].first;
      for (const Adj& a : t.adj[x]) {
        if (!owned(a.to) || reached[a.to]) continue;
        if (loc.on_edge && ((x == loc.u && a.to == loc.v) || (x == loc.v && a.to == loc.u))) continue;
        reached[a.to] = 1;
        next[a.to] = x;
        tau[a.to] = t.edges[a.edge].tau;
        cap[a.to] = t.edges[a.edge].cap;
        q.push_back({a.to, x});
      }
    }
  }
  for (int x = 0; x < n; ++x) {
    if (plan.assign[x] < 0 || plan.assign[x] >= ns) throw InvalidPlan("vertex without sink");
    if (!reached[x]) throw InvalidPlan("block is not connected to its sink");
  }
  // Zero-length hops arise when a sink point coincides with an endpoint.
  for (int x = 0; x < n; ++x) {
    if (is_sink[x]) continue;
    supply[x] = t.weight[x];
  }
  for (int x = 0; x < n; ++x) {
    if (next[x] >= 0 && tau[x] == 0) {
      // Collapse: the vertex sits on the sink point.
      is_sink[x] = 1;
      supply[x] = 0;
      next[x] = -1;
    }
  }
  std::vector<std::vector<int>> children(nodes);
  for (int x = 0; x < n; ++x)
    if (next[x] >= 0 && !is_sink[x]) children[next[x]].push_back(x);

  Num total = 0;
  for (int x = 0; x < n; ++x) total += supply[x];
  if (total == 0) return Num(0);

  std::vector<Num> Q = supply, dep(nodes, Num(0)), in(nodes, Num(0));
  std::vector<std::vector<std::pair<Num, Num>>> hist(nodes);
  for (int x = 0; x < nodes; ++x) hist[x].push_back({Num(0), Num(0)});
  auto rate_at = [&](int x, Num s) -> Num {
    if constexpr (!num_traits<Num>::exact) s += 1e-11 * std::max(1.0, std::abs(s));
    if (s < 0) return Num(0);
    const auto& h = hist[x];
    auto it = std::upper_bound(h.begin(), h.end(), s,
                               [](const Num& v, const std::pair<Num, Num>& p) { return v < p.first; });
    return (it - 1)->second;
  };
  std::set<Num> events{Num(0)};
  Num prev = 0, arrived = 0;
  while (!events.empty()) {
    Num now = *events.begin();
    events.erase(events.begin());
    Num dt = now - prev;
    for (int x = 0; x < nodes; ++x) {
      if (is_sink[x]) {
        arrived += in[x] * dt;
      } else if (x < n) {
        Q[x] += (in[x] - dep[x]) * dt;
        if constexpr (!num_traits<Num>::exact) {
          if (Q[x] < 1e-12 * std::max(1.0, to_double(total))) Q[x] = 0;
        }
      }
    }
    prev = now;
    if (arrived == total || near_eq(arrived, total)) return now;
    for (int x = 0; x < nodes; ++x) {
      Num s = 0;
      for (int y : children[x]) s += rate_at(y, now - tau[y]);
      in[x] = s;
    }
    for (int x = 0; x < n; ++x) {
      if (is_sink[x]) continue;
      Num nd = Q[x] > 0 ? cap[x] : (in[x] < cap[x] ? in[x] : cap[x]);
      if (nd != dep[x]) {
        dep[x] = nd;
        hist[x].push_back({now, nd});
        events.insert(now + tau[x]);
      }
      if (Q[x] > 0 && in[x] < cap[x]) events.insert(now + Q[x] / (cap[x] - in[x]));
    }
  }
  return prev;
}

}  // namespace treepart
