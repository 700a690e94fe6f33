#include <doctest.h>

#include <algorithm>

#include "engine.hpp"
#include "helpers.hpp"
#include "homotopy.hpp"

using namespace spliteq;
using th::qv;
using E = Engine<mpq_class>;
using St = State<mpq_class>;
using Sp = Step<mpq_class>;

namespace {

// rank of a dense rational matrix, plain elimination
int rank_of(std::vector<Q> A, size_t rows, size_t cols) {
  int rank = 0;
  for (size_t c = 0; c < cols && static_cast<size_t>(rank) < rows; ++c) {
    size_t p = static_cast<size_t>(rank);
    while (p < rows && A[p * cols + c] == 0) ++p;
    if (p == rows) continue;
    for (size_t j = 0; j < cols; ++j) std::swap(A[p * cols + j], A[static_cast<size_t>(rank) * cols + j]);
    for (size_t r = 0; r < rows; ++r) {
      if (r == static_cast<size_t>(rank) || A[r * cols + c] == 0) continue;
      Q f = A[r * cols + c] / A[static_cast<size_t>(rank) * cols + c];
      for (size_t j = 0; j < cols; ++j) A[r * cols + j] -= f * A[static_cast<size_t>(rank) * cols + j];
    }
    ++rank;
  }
  return rank;
}

Game random_connected(std::mt19937_64& rng, int n, int m, int k) {
  RandomParams p;
  p.n = n;
  p.m = std::min(m, n * (n - 1));
  p.k = k;
  Game g = gen_random(rng(), p);
  return is_strongly_connected(g) ? g : strongly_connect(g, g.big);
}

// Walks succ from the start until the step that crosses the plateau; returns the state before it.
St before_plateau(const E& eng, int& pivots) {
  St X = eng.start();
  pivots = 0;
  for (;;) {
    Sp st = eng.succ(X);
    REQUIRE(st.kind != Sp::Terminal);
    if (st.kind == Sp::Traversal) return X;
    CHECK(st.next->bound(eng.entry_side(*st.next)) == Q(1, 2));
    X = *st.next;
    ++pivots;
  }
}

}  // namespace

TEST_CASE("start state of the worked example") {
  Game g = gen_example_8player();
  E eng(g);
  St X = eng.start();
  CHECK(X.sigma() == 1);
  CHECK(X.lmin == 0);
  CHECK(X.lmax == Q(1, 2));
  CHECK(th::slice(eng.potential(X, 0), 0, 4) == qv({0, 6, 12, 3}));
  CHECK(th::slice(eng.potential(X, Q(1, 2)), 0, 4) == qv({0, 7, 14, 21}));
  CHECK(th::slice(X.dpi, 0, 4) == qv({0, 2, 4, 36}));
  // the start support keeps each player's direct edge and the detour's first two edges
  for (int i = 0; i < 8; ++i) {
    CHECK(X.support().active(th::kDirect[i], i));
    CHECK(X.support().active(th::kDetour[i][0], i));
    CHECK(X.support().active(th::kDetour[i][1], i));
    CHECK_FALSE(X.support().active(th::kDetour[i][2], i));
  }
  CHECK(X.kmax.pair.e == th::kDetour[X.kmax.pair.i][2]);
}

TEST_CASE("the degenerate support of the worked example has rank 23") {
  Game g = gen_example_8player();
  E eng(g);
  St X = eng.start();
  Support s1 = X.support();
  for (int i = 0; i < 8; ++i) s1.set(th::kDetour[i][2], i, true);
  auto lap1 = eng.build(s1);
  CHECK(lap1->sigma == 0);
  CHECK(lap1->rank_defect == 1);
  CHECK(rank_of(lap1->L, 32, 32) == 23);
  CHECK(rank_of(X.lap->L, 32, 32) == 24);
}

TEST_CASE("update into the degenerate support yields the null-space direction") {
  Game g = gen_example_8player();
  E eng(g);
  int pivots = 0;
  St X = before_plateau(eng, pivots);
  // seven detour edges were switched on one at a time at lambda = 1/2
  CHECK(pivots == 7);
  const Pair via = X.kmax.pair;
  RankOne<mpq_class> ro = eng.rank_one_update(*X.lap, via.e, via.i);
  REQUIRE(ro.degenerate);
  std::vector<Q> blk = th::slice(ro.raw_direction, 0, 4);
  REQUIRE(blk[1] != 0);
  CHECK(blk == qv({0, blk[1], 2 * blk[1], 3 * blk[1]}));
}

TEST_CASE("successor of the start traverses the plateau") {
  Game g = gen_example_8player();
  E eng(g);
  int pivots = 0;
  St X = before_plateau(eng, pivots);
  Sp st = eng.succ(X);
  REQUIRE(st.kind == Sp::Traversal);
  const NullTraversal<mpq_class>& nt = *st.traversal;
  CHECK(nt.lambda == Q(1, 2));
  CHECK(th::slice(nt.direction, 0, 4) == qv({0, 1, 2, 3}));
  CHECK(nt.xi == 3);
  CHECK(th::slice(nt.pi_entry, 0, 4) == qv({0, 7, 14, 21}));
  CHECK(th::slice(nt.pi_exit, 0, 4) == qv({0, 10, 20, 30}));
  CHECK(th::slice(nt.circulation, 0, 8) == qv({Q(1, 3), 0, Q(1, 3), 0, Q(1, 3), 0, 0, Q(-1, 3)}));
  // the circulation blend between the two endpoint flows
  Support deg = nt.degenerate;
  for (int s = 0; s <= 6; ++s) {
    Q alpha(s, 6);
    alpha.canonicalize();
    std::vector<Q> pi(nt.pi_entry.size());
    for (size_t p = 0; p < pi.size(); ++p) pi[p] = nt.pi_entry[p] + alpha * nt.xi * nt.direction[p];
    std::vector<Q> x = eng.flow(deg, pi);
    CHECK(th::slice(x, 0, 8) == qv({alpha, 0, alpha, 0, alpha, 0, 0, 1 - alpha}));
    CHECK(verify_equilibrium(g, x, Q(1, 2), 0).pass);
  }
  const St& Y = *st.next;
  CHECK(Y.sigma() != 0);
  CHECK(Y.lmin == Q(1, 2));
  // the direct edges switch off one pivot at a time, still at lambda = 1/2
  St Z = Y;
  int after = 0;
  for (;;) {
    Sp nx = eng.succ(Z);
    if (nx.kind == Sp::Terminal) break;
    CHECK(nx.kind == Sp::Pivot);
    Z = *nx.next;
    ++after;
  }
  CHECK(pivots + 1 + after == 15);
  CHECK(Z.lmin == Q(1, 2));
  CHECK(Z.lmax == 1);
  CHECK(th::slice(Z.dpi, 0, 4) == qv({0, 8, 16, 24}));
  for (int i = 0; i < 8; ++i) CHECK_FALSE(Z.support().active(th::kDirect[i], i));
  // reverse traversal returns to the state it came from
  Sp back = eng.pred(Y);
  REQUIRE(back.kind == Sp::Traversal);
  CHECK(back.next->support() == X.support());
  CHECK(th::slice(back.traversal->pi_exit, 0, 4) == qv({0, 7, 14, 21}));
  CHECK(eng.pred(eng.start()).kind == Sp::Terminal);
}

TEST_CASE("single edge game") {
  Game g = th::single_edge(1, 0, 1);
  Game h = strongly_connect(g, g.big);
  E eng(h);
  St X = eng.start();
  CHECK(X.support().active(0, 0));
  CHECK(X.lmin == 0);
  CHECK(X.lmax == 1);
  CHECK(X.kmin.pair.clamp());
  CHECK(X.kmax.pair.clamp());
  CHECK(eng.succ(X).kind == Sp::Terminal);
  CHECK(eng.pred(X).kind == Sp::Terminal);
}

TEST_CASE("rank one updates match fresh builds") {
  std::mt19937_64 rng(41);
  int updates = 0;
  while (updates < 200) {
    Game g = random_connected(rng, 3 + static_cast<int>(rng() % 3), 6, 2);
    E eng(g);
    St X = eng.start();
    for (int t = 0; t < 10; ++t) {
      int e = static_cast<int>(rng() % static_cast<unsigned>(g.m())), i = static_cast<int>(rng() % 2);
      Support S2 = neighbor(X.support(), e, i);
      if (!is_total(g, S2)) continue;
      RankOne<mpq_class> ro = eng.rank_one_update(*X.lap, e, i);
      auto fresh = eng.build(S2);
      if (ro.degenerate) {
        CHECK(fresh->sigma == 0);
        continue;
      }
      ++updates;
      CHECK(ro.lap->L == fresh->L);
      CHECK(ro.lap->M == fresh->M);
      CHECK(ro.lap->sigma == fresh->sigma);
      CHECK(fresh->sigma == X.sigma() * sgn(ro.factor));
      // toggling back restores the original
      RankOne<mpq_class> back = eng.rank_one_update(*ro.lap, e, i);
      REQUIRE_FALSE(back.degenerate);
      CHECK(back.lap->L == X.lap->L);
      CHECK(back.lap->M == X.lap->M);
    }
  }
}

TEST_CASE("pivots keep flows continuous and boundaries tight") {
  std::mt19937_64 rng(43);
  int pivots = 0;
  for (int t = 0; t < 60 && pivots < 120; ++t) {
    Game g = random_connected(rng, 4, 7, 2 + static_cast<int>(rng() % 2));
    E eng(g);
    St X = eng.start();
    for (int guard = 0; guard < 500; ++guard) {
      const Side side = eng.exit_side(X);
      const Q lam = X.bound(side);
      const std::vector<Q> pi = eng.potential(X, lam);
      const LexKey<mpq_class>& key = X.key(side);
      // every W-row is nonnegative at the boundary and the tight row vanishes
      for (int e = 0; e < g.m(); ++e)
        for (int i = 0; i < g.k(); ++i) CHECK(eng.row(X.support(), e, i, pi, true) >= 0);
      if (!key.pair.clamp()) CHECK(eng.row(X.support(), key.pair.e, key.pair.i, pi, true) == 0);
      CHECK(eng.is_shortest_path_state(X));
      Sp st = eng.step(X, side);
      if (st.kind == Sp::Terminal) break;
      if (st.kind == Sp::Pivot) {
        ++pivots;
        CHECK(st.sign_relation_ok);
        CHECK(eng.flow(X.support(), pi) == eng.flow(st.next->support(), pi));
      } else {
        const auto& nt = *st.traversal;
        CHECK(st.next->sigma() != 0);
        CHECK(eng.flow(X.support(), nt.pi_entry) == eng.flow(nt.degenerate, nt.pi_entry));
        CHECK(eng.flow(nt.degenerate, nt.pi_exit) == eng.flow(st.next->support(), nt.pi_exit));
        // the direction induces a circulation
        std::vector<Q> y = excess(g, nt.circulation);
        CHECK(std::all_of(y.begin(), y.end(), [](const Q& q) { return q == 0; }));
      }
      X = *st.next;
    }
  }
  CHECK(pivots >= 100);
}

TEST_CASE("perturbation keys form a total order") {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 10; ++t) {
    Game g = random_connected(rng, 4, 7, 2);
    E eng(g);
    St X = eng.start();
    std::vector<std::vector<mpq_class>> keys;
    for (int e = 0; e < g.m(); ++e)
      for (int i = 0; i < g.k(); ++i) keys.push_back(eng.row_perturbation(X, e, i));
    for (size_t a = 0; a < keys.size(); ++a)
      for (size_t b = 0; b < keys.size(); ++b) {
        CHECK(eng.lex_compare(keys[a], keys[b]) == -eng.lex_compare(keys[b], keys[a]));
        if (a == b) CHECK(eng.lex_compare(keys[a], keys[b]) == 0);
        for (size_t c = 0; c < keys.size(); ++c)
          if (eng.lex_compare(keys[a], keys[b]) < 0 && eng.lex_compare(keys[b], keys[c]) < 0)
            CHECK(eng.lex_compare(keys[a], keys[c]) < 0);
      }
  }
}

TEST_CASE("start states are positively oriented") {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 100; ++t) {
    Game g = random_connected(rng, 3 + static_cast<int>(rng() % 4), 8, 1 + static_cast<int>(rng() % 3));
    E eng(g);
    St X = eng.start();
    CHECK(X.sigma() == 1);
    CHECK(X.lmin == 0);
    CHECK(eng.is_shortest_path_state(X));
  }
}

TEST_CASE("float and wide engines follow the exact path on the worked example") {
  Game g = gen_example_8player();
  Engine<double> fe(g);
  State<double> X = fe.start();
  CHECK(X.lmax == doctest::Approx(0.5));
  int traversals = 0;
  for (int guard = 0; guard < 100; ++guard) {
    Step<double> st = fe.succ(X);
    if (st.kind == Step<double>::Terminal) break;
    if (st.kind == Step<double>::Traversal) {
      ++traversals;
      CHECK(st.traversal->xi == doctest::Approx(3.0));
    }
    X = *st.next;
  }
  CHECK(traversals == 1);
  CHECK(X.lmax == doctest::Approx(1.0));
  Engine<mpf_class> we(g);
  State<mpf_class> W = we.start();
  CHECK(std::fabs(W.lmax.get_d() - 0.5) < 1e-30);
}
