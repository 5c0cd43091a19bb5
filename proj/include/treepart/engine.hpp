#pragma once

#include "oracle.hpp"
#include "region.hpp"
#include "tree.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace treepart {

// Answers "is a <= T?" for the threshold under test.
template <class Num>
class Decider {
 public:
  virtual ~Decider() = default;
  virtual bool le(const Cost<Num>& a) = 0;
  // Called with every value of a batch before the batch is resolved.
  virtual void stage(const std::vector<Cost<Num>>&) {}
  // True when the threshold is a known number.
  virtual bool concrete() const = 0;
  virtual Cost<Num> threshold() const = 0;
};

template <class Num>
class FixedDecider : public Decider<Num> {
 public:
  explicit FixedDecider(Cost<Num> t) : T_(std::move(t)) {}
  bool le(const Cost<Num>& a) override { return a <= T_; }
  bool concrete() const override { return true; }
  Cost<Num> threshold() const override { return T_; }

 private:
  Cost<Num> T_;
};

struct SolveStats {
  std::uint64_t oracle_calls = 0;
  std::uint64_t calls_after_first_phase = 0;
  std::uint64_t probes = 0;
  std::uint64_t probe_oracle_calls = 0;
  int stages = 0;
  int stage_overlaps = 0;
  int sink_in_side = 0;
  int reaching_rounds = 0;
  int peaks = 0;
  int late_peaks = 0;
  int invariant_violations = 0;
};

template <class Num>
struct SinkState {
  int anchor = -1;  // working-tree vertex standing for the sink
  int far = -1;     // for an edge sink, the endpoint that stays in the working tree
  int edge = -1;
  bool located = true;
  Num offset{0};  // distance from anchor along the sink edge
  std::vector<int> block;
  bool open = true;
  std::optional<SideProfile<Num>> left;

  SinkLocation<Num> location() const {
    if (far < 0 || offset == 0) return SinkLocation<Num>::at(anchor);
    return SinkLocation<Num>::edge_point(anchor, far, offset);
  }
};

template <class Num>
struct Partition {
  std::vector<SinkLocation<Num>> sinks;
  std::vector<std::vector<int>> blocks;
};

// Working tree with committed sinks, hub tree and reaching machinery.
template <class Num>
class PartitionEngine {
 public:
  PartitionEngine(const TreeGraph<Num>& t, const CostOracle<Num>& f, Decider<Num>& d, bool continuous)
      : t_(t), f_(f), dec_(d), cont_(continuous) {
    const int n = t.n();
    alive_.assign(n, 1);
    alive_count_ = n;
    sink_at_.assign(n, -1);
    par_.assign(n, -1);
    in_hub_.assign(n, 0);
    is_hub_.assign(n, 0);
    hub_kids_.assign(n, 0);
    hub_kid_.assign(n, -1);
    outcnt_.assign(n, 0);
    prev_out_.assign(n, -1);
    scount_.assign(n, 0);
    cross_.assign(n, 0);
    witness_.assign(n, -1);
    mark_.assign(n, 0);
  }

  SolveStats stats;
  bool after_first_phase = false;

  const TreeGraph<Num>& tree() const { return t_; }
  int alive_count() const { return alive_count_; }
  bool alive(int x) const { return alive_[x] != 0; }
  int sink_at(int x) const { return sink_at_[x]; }
  int sinks_created() const { return static_cast<int>(sinks_.size()); }
  const std::vector<SinkState<Num>>& sinks() const { return sinks_; }

  std::vector<int> open_sinks() const {
    std::vector<int> s;
    for (int i = 0; i < static_cast<int>(sinks_.size()); ++i)
      if (sinks_[i].open) s.push_back(i);
    return s;
  }

  std::vector<int> alive_vertices() const {
    std::vector<int> v;
    for (int x = 0; x < t_.n(); ++x)
      if (alive_[x]) v.push_back(x);
    return v;
  }

  // ----- oracle access -----
  Cost<Num> call(const Region& r) {
    tick();
    return f_.eval_region(t_, r);
  }
  SideProfile<Num> profile(const Region& r, int e) {
    tick();
    return f_.side_profile(t_, r, e);
  }

  Region side_region(int u, int v) const {
    return grow_region(t_, u, [&](int x, int y) { return alive_[y] && !(x == u && y == v); });
  }
  Region side_plus_region(int u, int v) const {
    return grow_region(t_, v, [&](int x, int y) { return alive_[y] && (x != v || y == u); });
  }
  // f(V_{-v}(u), u)
  Cost<Num> a_val(int u, int v) { return call(side_region(u, v)); }
  // f(V_{-v}(u) + v, v); when v anchors an edge sink the centre is the sink point.
  Cost<Num> b_val(int u, int v) {
    const int sid = sink_at_[v];
    if (cont_ && sid >= 0 && sinks_[sid].open && sinks_[sid].far == u) return point_cost(sid, side_region(u, v));
    return call(side_plus_region(u, v));
  }

  // Cost at the sink point of an edge sink for a region hanging off its far end.
  Cost<Num> point_cost(int sid, const Region& r) {
    const auto& s = sinks_[sid];
    const Num& tau = t_.edges[s.edge].tau;
    SideProfile<Num> right = profile(r, s.edge);
    if (s.located) return right.at(Num(tau - s.offset));
    return edge_minimax(*s.left, right, tau).cost;
  }

  std::vector<int> side_members(int u, int v) const { return side_region(u, v).order; }

  // ----- commits -----
  int make_vertex_sink(int x) {
    SinkState<Num> s;
    s.anchor = x;
    s.block = {x};
    sinks_.push_back(std::move(s));
    sink_at_[x] = static_cast<int>(sinks_.size()) - 1;
    return sink_at_[x];
  }

  void kill(int x) {
    if (alive_[x]) {
      alive_[x] = 0;
      --alive_count_;
    }
  }

  // Commit V_{-v}(u) to a new open sink at u (or on edge (u,v) in continuous mode).
  int open_commit(int u, int v) {
    std::vector<int> block = side_members(u, v);
    const int e = t_.edge_between(u, v);
    SinkState<Num> s;
    s.anchor = u;
    s.block = block;
    if (cont_) {
      s.far = v;
      s.edge = e;
      Region r = side_region(u, v);
      s.left = profile(r, e);
      if (dec_.concrete()) {
        try {
          s.offset = farthest_feasible_point(*s.left, t_.edges[e].tau, dec_.threshold());
        } catch (const NoFeasiblePoint&) {
          s.offset = Num(0);
        }
        s.located = true;
      } else {
        s.located = false;
      }
    }
    for (int x : block)
      if (x != u) kill(x);
    sinks_.push_back(std::move(s));
    sink_at_[u] = static_cast<int>(sinks_.size()) - 1;
    ++stats.peaks;
    if (after_first_phase) ++stats.late_peaks;
    return sink_at_[u];
  }

  void close_into(int sid, const std::vector<int>& xs) {
    auto& s = sinks_[sid];
    for (int x : xs) {
      if (!alive_[x]) continue;
      if (x != s.anchor) s.block.push_back(x);
      kill(x);
    }
    kill(s.anchor);
    s.open = false;
  }

  void commit_all_to(int x) {
    std::vector<int> all = alive_vertices();
    int sid = sink_at_[x] >= 0 && sinks_[sink_at_[x]].open ? sink_at_[x] : make_vertex_sink(x);
    close_into(sid, all);
  }

  // Generic end cases once no peaking edge remains; returns true when V is exhausted.
  bool end_cases() {
    if (alive_count_ == 0) return true;
    std::vector<int> s = open_sinks();
    if (s.empty()) {
      commit_all_to(alive_vertices().front());
      return true;
    }
    if (s.size() == 1) {
      close_into(s[0], alive_vertices());
      return true;
    }
    if (static_cast<int>(s.size()) == alive_count_) {
      for (int sid : s) close_into(sid, {sinks_[sid].anchor});
      return true;
    }
    return false;
  }

  Partition<Num> partition() const {
    Partition<Num> p;
    for (const auto& s : sinks_) {
      p.sinks.push_back(s.location());
      std::vector<int> b = s.block;
      std::sort(b.begin(), b.end());
      p.blocks.push_back(std::move(b));
    }
    return p;
  }

  // ----- hub tree -----
  int root() const { return root_; }
  int parent(int x) const { return par_[x]; }
  bool is_hub(int x) const { return is_hub_[x] != 0; }
  bool in_hub(int x) const { return in_hub_[x] != 0; }
  int hub_children(int x) const { return hub_kids_[x]; }

  // Builds the hub tree over open sinks and refreshes every sink's reach.
  void build_hub() {
    const int n = t_.n();
    // Rooting vertex: previous root when still a usable non-sink, else lowest alive non-sink.
    int z = -1;
    if (root_ >= 0 && alive_[root_] && sink_at_[root_] < 0) z = root_;
    if (z < 0)
      for (int x = 0; x < n; ++x)
        if (alive_[x] && !is_open_sink(x)) {
          z = x;
          break;
        }
    bfs_from(z);
    std::vector<int> cnt(n, 0);
    int total = 0;
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
      const int x = *it;
      if (is_open_sink(x)) {
        ++cnt[x];
        ++total;
      }
      if (par_[x] >= 0) cnt[par_[x]] += cnt[x];
    }
    int r = z;
    for (;;) {
      int next = -1;
      for (const Adj& a : t_.adj[r])
        if (alive_[a.to] && a.to != par_[r] && cnt[a.to] == total) next = a.to;
      if (next < 0 || is_open_sink(next)) break;
      r = next;
    }
    const bool root_changed = r != root_;
    root_ = r;
    if (r != z) bfs_from(r);

    for (int x : order_) {
      in_hub_[x] = 0;
      hub_kids_[x] = 0;
      hub_kid_[x] = -1;
      is_hub_[x] = 0;
      outcnt_[x] = 0;
      scount_[x] = 0;
      cross_[x] = 0;
      witness_[x] = -1;
    }
    for (int sid : open_sinks()) {
      for (int x = sinks_[sid].anchor; x >= 0 && !in_hub_[x]; x = par_[x]) in_hub_[x] = 1;
    }
    for (int x : order_)
      if (in_hub_[x] && par_[x] >= 0) {
        ++hub_kids_[par_[x]];
        hub_kid_[par_[x]] = x;
      }
    for (int x : order_)
      if (in_hub_[x]) is_hub_[x] = is_open_sink(x) || x == root_ || hub_kids_[x] >= 2;
    // Outstanding content per hub-tree node.
    std::vector<int> attach(n, -1);
    for (int x : order_) {
      if (in_hub_[x]) continue;
      const int p = par_[x];
      attach[x] = in_hub_[p] ? p : attach[p];
      ++outcnt_[attach[x]];
    }
    std::vector<char> dirty(n, 0);
    for (int x : order_)
      if (in_hub_[x]) dirty[x] = prev_out_[x] != outcnt_[x];
    for (int x = 0; x < n; ++x) prev_out_[x] = (alive_[x] && in_hub_[x]) ? outcnt_[x] : -1;

    if (reach_.size() < sinks_.size()) reach_.resize(sinks_.size(), -1);
    for (int sid : open_sinks()) {
      int& rc = reach_[sid];
      if (root_changed || rc < 0 || !alive_[rc] || !in_hub_[rc]) {
        rc = rsearch(sid, root_);
        continue;
      }
      bool touched = false, found = false;
      for (int x = sinks_[sid].anchor; x >= 0; x = par_[x]) {
        if (dirty[x]) touched = true;
        if (x == rc) {
          found = true;
          break;
        }
      }
      if (!found)
        rc = rsearch(sid, root_);
      else if (touched)
        rc = rsearch(sid, rc);
    }
    for (int sid : open_sinks()) {
      const int rc = reach_[sid];
      for (int x = sinks_[sid].anchor;; x = par_[x]) {
        ++scount_[x];
        if (witness_[x] < 0) witness_[x] = sid;
        if (x == rc) break;
        ++cross_[x];
      }
    }
  }

  // Cost of BP(w, s) with the sink as centre.
  Cost<Num> bp_cost(int w, int sid) {
    const auto& s = sinks_[sid];
    auto enter = [&](int x, int y) {
      if (!alive_[y]) return false;
      if (!in_hub_[y]) return true;
      return y == par_[x] && x != w;
    };
    if (!cont_ || s.far < 0) return call(grow_region(t_, s.anchor, enter));
    if (w == s.anchor) return Cost<Num>(Num(0));
    return point_cost(sid, grow_region(t_, s.far, [&](int x, int y) { return y != s.anchor && enter(x, y); }));
  }

  // Highest vertex on the path anchor..limit whose BP the sink can absorb.
  int rsearch(int sid, int limit) {
    std::vector<int> path;
    for (int x = sinks_[sid].anchor;; x = par_[x]) {
      path.push_back(x);
      if (x == limit) break;
    }
    int lo = 0, hi = static_cast<int>(path.size()) - 1;
    while (lo < hi) {
      int mid = (lo + hi + 1) / 2;
      if (dec_.le(bp_cost(path[mid], sid)))
        lo = mid;
      else
        hi = mid - 1;
    }
    return path[lo];
  }

  // First hub-tree edge (child, parent) in children-first order whose child subtree
  // cannot serve the parent.
  std::optional<std::pair<int, int>> reaching_edge() const {
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
      const int c = *it;
      if (!in_hub_[c] || c == root_) continue;
      if (cross_[c] == 0) return std::make_pair(c, par_[c]);
    }
    return std::nullopt;
  }

  // Closed-commits T(x) by repeatedly giving BP(y, W(y)) to the witness of each component root y.
  void commit_subtree(int x) {
    std::vector<int> roots{x};
    while (!roots.empty()) {
      const int y = roots.back();
      roots.pop_back();
      const int sid = witness_[y];
      std::vector<int> path;
      for (int z = sinks_[sid].anchor;; z = par_[z]) {
        path.push_back(z);
        if (z == y) break;
      }
      std::vector<char>& on = mark_;
      for (int z : path) on[z] = 1;
      std::vector<int> members;
      std::vector<int> st(path.begin(), path.end());
      for (int z : path) members.push_back(z);
      while (!st.empty()) {
        const int z = st.back();
        st.pop_back();
        for (const Adj& a : t_.adj[z]) {
          const int w = a.to;
          if (!alive_[w] || w == par_[z] || on[w]) continue;
          if (in_hub_[w]) {
            if (on[z] && w != par_[z]) roots.push_back(w);
            continue;
          }
          on[w] = 1;
          members.push_back(w);
          st.push_back(w);
        }
      }
      for (int z : members) on[z] = 0;
      close_into(sid, members);
    }
  }

  const std::vector<int>& bfs_order() const { return order_; }
  int hub_kid(int x) const { return hub_kid_[x]; }

 private:
  void tick() {
    ++stats.oracle_calls;
    if (after_first_phase) ++stats.calls_after_first_phase;
  }
  bool is_open_sink(int x) const { return sink_at_[x] >= 0 && sinks_[sink_at_[x]].open; }

  void bfs_from(int z) {
    order_.clear();
    order_.push_back(z);
    par_[z] = -1;
    for (std::size_t h = 0; h < order_.size(); ++h) {
      const int x = order_[h];
      for (const Adj& a : t_.adj[x])
        if (alive_[a.to] && a.to != par_[x]) {
          par_[a.to] = x;
          order_.push_back(a.to);
        }
    }
  }

  const TreeGraph<Num>& t_;
  const CostOracle<Num>& f_;
  Decider<Num>& dec_;
  bool cont_;
  std::vector<char> alive_;
  int alive_count_ = 0;
  std::vector<int> sink_at_;
  std::vector<SinkState<Num>> sinks_;

  int root_ = -1;
  std::vector<int> order_, par_;
  std::vector<char> in_hub_, is_hub_;
  std::vector<int> hub_kids_, hub_kid_, outcnt_, prev_out_, scount_, cross_, witness_;
  std::vector<int> reach_;
  std::vector<char> mark_;
};

}  // namespace treepart
