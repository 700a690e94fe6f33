#include <doctest.h>

#include <set>

#include "game.hpp"
#include "generators.hpp"
#include "helpers.hpp"

using namespace spliteq;
using th::qv;

TEST_CASE("aggregate flow") {
  Game g = gen_example_8player();
  std::vector<Q> x3 = th::example_detour(2);
  CHECK(th::slice(x3, 0, 8) == qv({2, 0, 2, 0, 2, 0, 0, 0}));
  std::vector<Q> xbar = aggregate_flow(g, x3);
  CHECK(xbar[0] == 6);
  for (const Q& q : xbar) CHECK(q == 6);
  CHECK(aggregate_flow(g, std::vector<Q>(64, Q(0))) == std::vector<Q>(8, Q(0)));
  Game one = th::single_edge(1, 0, 1);
  CHECK(aggregate_flow(one, qv({Q(7, 3)})) == qv({Q(7, 3)}));
  CHECK_THROWS_AS(aggregate_flow(g, qv({1})), InputError);
}

TEST_CASE("marginal cost") {
  Game g = gen_example_8player();
  // one unit on player 1's direct edge e8
  CHECK(marginal_cost(g, th::example_direct(1), 7, 0) == 21);
  // the detour edge e1 under the solution flow
  CHECK(marginal_cost(g, th::example_detour(2), 0, 0) == 14);
  CHECK(marginal_cost(g, std::vector<Q>(64, Q(0)), 0, 0) == 6);
  CHECK(marginal_cost(g, std::vector<Q>(64, Q(0)), 7, 0) == 3);
}

TEST_CASE("marginal cost identity on random flows") {
  std::mt19937_64 rng(3);
  Game g = gen_example_8player();
  for (int t = 0; t < 50; ++t) {
    std::vector<Q> x(64);
    for (Q& q : x) q = th::random_q(rng, 0, 3, 7);
    std::vector<Q> xbar = aggregate_flow(g, x);
    for (int e = 0; e < 8; ++e)
      for (int i = 0; i < 8; ++i)
        CHECK(marginal_cost(g, x, e, i) - (g.slope(e, i) * xbar[e] + g.offset(e, i)) == g.slope(e, i) * x[i * 8 + e]);
  }
}

TEST_CASE("player cost") {
  Game g = gen_example_8player();
  CHECK(player_cost(g, th::example_direct(1), 0) == 12);
  CHECK(player_cost(g, std::vector<Q>(64, Q(0)), 0) == 0);
  Game one = th::single_edge(2, 5, 3);
  CHECK(player_cost(one, qv({3}), 0) == 33);
}

TEST_CASE("excess") {
  Game g = gen_example_8player();
  std::vector<Q> y = excess(g, th::example_detour(2));
  CHECK(th::slice(y, 0, 4) == qv({2, 0, 0, -2}));
  CHECK(excess(g, std::vector<Q>(64, Q(0))) == std::vector<Q>(32, Q(0)));
  Game one = th::single_edge(1, 0, 5);
  CHECK(excess(one, qv({5})) == qv({5, -5}));
}

TEST_CASE("excess sums to zero per player") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 30; ++t) {
    RandomParams p;
    p.n = 5;
    p.m = 8;
    p.k = 3;
    Game g = gen_random(rng(), p);
    std::vector<Q> x(static_cast<size_t>(g.m()) * g.k());
    for (Q& q : x) q = th::random_q(rng, 0, 4, 5);
    std::vector<Q> y = excess(g, x);
    for (int i = 0; i < g.k(); ++i) {
      Q s = 0;
      for (int v = 0; v < g.n; ++v) s += y[i * g.n + v];
      CHECK(s == 0);
    }
  }
}

TEST_CASE("verify equilibrium on the worked example") {
  Game g = gen_example_8player();
  VerificationReport ok = verify_equilibrium(g, th::example_detour(2), 1, 0);
  CHECK(ok.pass);
  CHECK(ok.max_conservation_residual == 0);
  CHECK(ok.violations.empty());
  // shortest-path potentials of player 1 under the solution flow
  CHECK(th::slice(ok.potentials, 0, 4) == qv({0, 14, 28, 42}));

  CHECK(verify_equilibrium(g, std::vector<Q>(64, Q(0)), 0, 0).pass);

  VerificationReport bad = verify_equilibrium(g, th::example_direct(1), 1, 0);
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_conservation_residual == 1);
  // source and sink of every player are short by one unit
  int off = 0;
  for (const Q& r : bad.conservation_residual) off += r != 0;
  CHECK(off == 16);
}

TEST_CASE("verify rejects flow moved onto a costlier path") {
  Game g = gen_example_8player();
  std::vector<Q> x = th::example_detour(2);
  // player 1 shifts 1/10 from its detour onto the direct edge, which costs more at the margin
  for (int e : th::kDetour[0]) x[e] -= Q(1, 10);
  x[th::kDirect[0]] += Q(1, 10);
  VerificationReport r = verify_equilibrium(g, x, 1, 0);
  CHECK(r.max_conservation_residual == 0);
  CHECK_FALSE(r.pass);
  REQUIRE_FALSE(r.violations.empty());
  CHECK(r.violations.front().player == 0);
}

TEST_CASE("negative flow is reported") {
  Game g = th::single_edge(1, 0, 1);
  VerificationReport r = verify_equilibrium(g, qv({-1}), 1, 0);
  CHECK_FALSE(r.pass);
  CHECK(r.max_negativity == 1);
}

namespace {

// transitive closure by repeated relaxation
std::vector<std::vector<bool>> closure(const Game& g) {
  std::vector<std::vector<bool>> R(g.n, std::vector<bool>(g.n, false));
  for (int v = 0; v < g.n; ++v) R[v][v] = true;
  for (const Edge& e : g.edges) R[e.tail][e.head] = true;
  for (int w = 0; w < g.n; ++w)
    for (int u = 0; u < g.n; ++u)
      if (R[u][w])
        for (int v = 0; v < g.n; ++v)
          if (R[w][v]) R[u][v] = true;
  return R;
}

}  // namespace

TEST_CASE("strongly connect") {
  Game ex = gen_example_8player();
  CHECK(is_strongly_connected(ex));
  Game same = strongly_connect(ex, 1000);
  CHECK(same.m() == ex.m());

  Game two = th::single_edge(1, 0, 1);
  CHECK_FALSE(is_strongly_connected(two));
  Game aug = strongly_connect(two, 77);
  REQUIRE(aug.m() == 2);
  CHECK(aug.edges[1].tail == 1);
  CHECK(aug.edges[1].head == 0);
  CHECK(aug.slope(1, 0) == 1);
  CHECK(aug.offset(1, 0) == 77);
}

TEST_CASE("strongly connect bridges the condensation of gadget and random graphs") {
  std::vector<Game> games;
  BimatrixGame bm;
  bm.n = 2;
  bm.U = {{1, 0}, {0, 1}};
  bm.V = {{0, 1}, {1, 0}};
  games.push_back(gen_gadget(bm));
  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    RandomParams p;
    p.n = 6;
    p.m = 7;
    p.k = 2;
    games.push_back(gen_random(rng(), p));
  }
  for (const Game& g : games) {
    auto R = closure(g);
    // condensation sources and sinks from the closure
    std::vector<int> rep(g.n);
    for (int v = 0; v < g.n; ++v) {
      rep[v] = v;
      for (int u = 0; u < v; ++u)
        if (R[u][v] && R[v][u]) {
          rep[v] = rep[u];
          break;
        }
    }
    std::set<int> comps(rep.begin(), rep.end()), has_in, has_out;
    for (const Edge& e : g.edges)
      if (rep[e.tail] != rep[e.head]) {
        has_out.insert(rep[e.tail]);
        has_in.insert(rep[e.head]);
      }
    size_t sources = 0, sinks = 0;
    for (int c : comps) {
      sources += !has_in.count(c);
      sinks += !has_out.count(c);
    }
    Game aug = strongly_connect(g, g.big);
    auto RA = closure(aug);
    bool all = true;
    for (int u = 0; u < g.n; ++u)
      for (int v = 0; v < g.n; ++v) all = all && RA[u][v];
    CHECK(all);
    const size_t expect = comps.size() == 1 ? 0 : std::max(sources, sinks);
    CHECK(static_cast<size_t>(aug.m() - g.m()) == expect);
    for (int e = 0; e < g.m(); ++e) {
      CHECK(aug.edges[e].tail == g.edges[e].tail);
      CHECK(aug.edges[e].head == g.edges[e].head);
    }
    for (int e = g.m(); e < aug.m(); ++e)
      for (int i = 0; i < aug.k(); ++i) {
        CHECK(aug.slope(e, i) == 1);
        CHECK(aug.offset(e, i) == g.big);
      }
  }
}

TEST_CASE("validation") {
  Game g = th::single_edge(1, 0, 1);
  g.slope(0, 0) = 0;
  CHECK_THROWS_AS(g.validate(), InputError);
  Game h = th::single_edge(1, 0, 1);
  h.players[0].sink = 0;
  CHECK_THROWS_AS(h.validate(), InputError);
  CHECK_THROWS_AS(make_game(3, {{0, 1}}, {{0, 1, Q(1)}}).validate(), InputError);
}
