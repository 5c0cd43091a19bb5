#include "axioms.hpp"

#include <doctest.h>

using namespace tp_test;

namespace {

TreeGraph<Q> unit_star(int leaves) {
  std::vector<Q> w(leaves + 1, Q(1));
  std::vector<EdgeSpec<Q>> es;
  for (int i = 1; i <= leaves; ++i) es.push_back({0, i, Q(1), Q(1)});
  return build_tree(w, es);
}

TreeGraph<Q> single_edge(int wu, int wv, int tau, int cap) {
  std::vector<EdgeSpec<Q>> es{{0, 1, Q(tau), Q(cap)}};
  return build_tree<Q>({Q(wu), Q(wv)}, es);
}

SideProfile<Q> side(const CostOracle<Q>& f, const TreeGraph<Q>& t, int u, int v) {
  return f.side_profile(t, region_away(t, u, v), t.edge_between(u, v));
}

}  // namespace

TEST_CASE("k-center evaluation") {
  KCenterOracle<Q> f;
  auto t = unit_star(2);
  CHECK(f.eval(t, {1}, SinkLocation<Q>::at(1)) == Cost<Q>(Q(0)));
  CHECK(f.eval(t, {0, 1, 2}, SinkLocation<Q>::at(0)) == Cost<Q>(Q(1)));
  CHECK(f.eval(t, {1}, SinkLocation<Q>::at(0)).inf);
  CHECK(f.eval(t, {0, 1, 2}, SinkLocation<Q>::at(1)) == Cost<Q>(Q(2)));
}

TEST_CASE("capped k-center") {
  auto t = path_tree<Q>({1, 2, 3, 4}, {1, 1, 1});
  KCenterCappedOracle<Q> w(Q(5), std::nullopt);
  CHECK(w.eval(t, {0, 1}, SinkLocation<Q>::at(0)) == Cost<Q>(Q(2)));
  CHECK(w.eval(t, {1, 2, 3}, SinkLocation<Q>::at(2)) == Cost<Q>(Q(4)));
  CHECK(w.eval(t, {0, 1, 2, 3}, SinkLocation<Q>::at(0)).inf);
  CHECK(w.eval(t, {0, 1, 2}, SinkLocation<Q>::at(1)) == Cost<Q>(Q(3)));
  KCenterCappedOracle<Q> h(std::nullopt, 1);
  CHECK(h.eval(t, {0, 1, 2}, SinkLocation<Q>::at(1)) == Cost<Q>(Q(3)));
  CHECK(h.eval(t, {0, 1, 2}, SinkLocation<Q>::at(0)).inf);
  CHECK_FALSE(w.continuous());
}

TEST_CASE("range cost per slice") {
  auto t = path_tree<Q>({1, 1, 1, 1}, {1, 1, 1});
  RangeOracle<Q> f;
  f.set(0, 2, Q(7));
  f.set(1, 2, Q(3));
  f.set(3, 2, Q(10));
  CHECK(f.relaxed());
  CHECK(f.eval(t, {0, 1, 2, 3}, SinkLocation<Q>::at(2)) == Cost<Q>(Q(4)));
  CHECK(f.eval(t, {2, 3}, SinkLocation<Q>::at(2)) == Cost<Q>(Q(0)));
  CHECK(f.eval(t, {1, 2}, SinkLocation<Q>::at(2)) == Cost<Q>(Q(0)));
  CHECK(f.eval(t, {0, 1}, SinkLocation<Q>::at(1)) == Cost<Q>(Q(0)));
}

TEST_CASE("oracle factory") {
  CHECK(make_oracle<Q>({"evac", {}, {}})->name() == "evac");
  CHECK(make_oracle<Q>({"kcenter-capped", std::string("3/2"), 2})->name() == "kcenter-capped");
  CHECK_THROWS_AS(make_oracle<Q>({"nope", {}, {}}), UnknownOracle);
  auto t = single_edge(1, 1, 1, 1);
  CHECK_THROWS_AS(make_oracle<Q>({"range", {}, {}})->eval(t, {0, 1}, SinkLocation<Q>::edge_point(0, 1, frac(1, 2))),
                  UnsupportedContinuous);
}

TEST_CASE("farthest feasible point") {
  KCenterOracle<Q> kc;
  auto t = single_edge(1, 1, 10, 1);
  auto p = side(kc, t, 0, 1);
  CHECK(farthest_feasible_point(p, Q(10), Cost<Q>(Q(4))) == 4);
  CHECK(farthest_feasible_point(p, Q(10), Cost<Q>(Q(0))) == 0);
  CHECK(farthest_feasible_point(p, Q(10), Cost<Q>(Q(40))) == 10);
  CHECK(farthest_feasible_point(p, Q(10), Cost<Q>::infinity()) == 10);

  SUBCASE("result is maximal") {
    std::mt19937 g(3);
    EvacOracle<Q> ev;
    for (int it = 0; it < 200; ++it) {
      const int n = 2 + static_cast<int>(g() % 8);
      auto tr = random_rational_tree(g, n);
      const int e = static_cast<int>(g() % tr.m());
      const int u = tr.edges[e].u, v = tr.edges[e].v;
      const Q tau = tr.edges[e].tau;
      for (const CostOracle<Q>* f : {static_cast<const CostOracle<Q>*>(&kc), static_cast<const CostOracle<Q>*>(&ev)}) {
        auto sp = side(*f, tr, u, v);
        const Cost<Q> T(sp.interior(Q(0)).v + Q(static_cast<int>(g() % 20), 3));
        const Q x = farthest_feasible_point(sp, tau, T);
        CHECK(sp.at(x) <= T);
        if (x < tau) CHECK(sp.interior(x + frac(1, 1000000)) > T);
      }
    }
  }
  SUBCASE("congestion jump at the end") {
    EvacOracle<Q> ev;
    std::vector<EdgeSpec<Q>> es{{0, 1, Q(1), Q(6)}, {1, 2, Q(5), Q(1)}};
    auto tr = build_tree<Q>({Q(6), Q(0), Q(0)}, es);
    // Six units reach vertex 1 by time 2 but need until time 7 to enter the narrow edge.
    auto sp = side(ev, tr, 1, 2);
    CHECK(sp.at0 == Cost<Q>(Q(2)));
    for (int i = 1; i <= 50; ++i) CHECK(sp.interior(frac(i, 10)) > Cost<Q>(Q(3)));
    CHECK_THROWS_AS(farthest_feasible_point(sp, Q(5), Cost<Q>(Q(3))), NoFeasiblePoint);
    CHECK_THROWS_AS(farthest_feasible_point(sp, Q(5), Cost<Q>(Q(1))), NoFeasiblePoint);
    CHECK(farthest_feasible_point(sp, Q(5), Cost<Q>(Q(9))) == 2);
  }
}

TEST_CASE("edge minimax") {
  EvacOracle<Q> ev;
  SUBCASE("balanced single edge") {
    auto t = single_edge(2, 2, 10, 1);
    auto r = edge_minimax(side(ev, t, 0, 1), side(ev, t, 1, 0), Q(10));
    CHECK(r.offset == 5);
    CHECK(r.cost == Cost<Q>(Q(7)));
  }
  SUBCASE("symmetric k-center") {
    KCenterOracle<Q> kc;
    auto t = path_tree<Q>({3, 1, 1, 3}, {2, 6, 2});
    auto r = edge_minimax(side(kc, t, 1, 2), side(kc, t, 2, 1), Q(6));
    CHECK(r.offset == 3);
    CHECK(r.cost == Cost<Q>(Q(15)));
  }
  SUBCASE("left side without supply") {
    auto t = single_edge(0, 3, 4, 1);
    auto left = side(ev, t, 0, 1), right = side(ev, t, 1, 0);
    auto r = edge_minimax(left, right, Q(4));
    // Right side cost at distance d is 3 + d; it is cheapest as the point approaches the far end.
    Cost<Q> grid_best = Cost<Q>::infinity();
    for (int i = 0; i <= 400; ++i) {
      const Q x = frac(i, 100);
      grid_best = cmin(grid_best, cmax(left.at(x), right.at(Q(4) - x)));
    }
    CHECK(r.cost <= grid_best);
    CHECK(r.cost == Cost<Q>(Q(0)));
  }
  SUBCASE("value is a lower envelope") {
    std::mt19937 g(9);
    KCenterOracle<Q> kc;
    for (int it = 0; it < 100; ++it) {
      const int n = 2 + static_cast<int>(g() % 8);
      auto t = random_rational_tree(g, n);
      const int e = static_cast<int>(g() % t.m());
      const int u = t.edges[e].u, v = t.edges[e].v;
      const Q tau = t.edges[e].tau;
      for (const CostOracle<Q>* f : {static_cast<const CostOracle<Q>*>(&kc), static_cast<const CostOracle<Q>*>(&ev)}) {
        auto L = side(*f, t, u, v), R = side(*f, t, v, u);
        auto r = edge_minimax(L, R, tau);
        CHECK(cmax(L.at(r.offset), R.at(tau - r.offset)) == r.cost);
        for (int i = 0; i <= 100; ++i) {
          const Q x = tau * frac(i, 100);
          CHECK(cmax(L.at(x), R.at(tau - x)).as_double() >= r.cost.as_double() - 1e-9);
        }
      }
    }
  }
}

TEST_CASE("axiom suite") {
  for (const char* name : {"kcenter", "kcenter-capped", "range", "evac"}) {
    CAPTURE(name);
    auto rep = check_axioms(name, 200, 17);
    CHECK(rep.samples == 200);
    CHECK_MESSAGE(rep.violations == 0, rep.first);
  }
}

TEST_CASE("max composition equals independent slice evaluation") {
  std::mt19937 g(21);
  for (auto& f : path_monotone_oracles()) {
    for (int it = 0; it < 250; ++it) {
      const int n = 1 + static_cast<int>(g() % 12);
      auto t = random_rational_tree(g, n);
      const int s = static_cast<int>(g() % n);
      std::vector<int> U = random_connected_set(g, t, s);
      std::vector<char> in(n, 0);
      for (int x : U) in[x] = 1;
      Cost<Q> best(Q(0));
      for (const Adj& a : t.adj[s]) {
        if (!in[a.to]) continue;
        std::vector<int> slice{s};
        for (int x : U)
          if (x != s && tree_path(t, x, s)[tree_path(t, x, s).size() - 2] == a.to) slice.push_back(x);
        std::sort(slice.begin(), slice.end());
        best = cmax(best, f->eval(t, slice, SinkLocation<Q>::at(s)));
      }
      CHECK(f->eval(t, U, SinkLocation<Q>::at(s)) == best);
    }
  }
}
