#include "homotopy.hpp"

#include <chrono>
#include <cmath>

#include "engine.hpp"

namespace spliteq {

long default_pivot_budget(const Game& g) {
  const int mk = std::min(g.m() * g.k(), 20);
  double b = 10.0 * std::pow(3.0, mk);
  return b > 1e7 ? 10000000L : static_cast<long>(b);
}

namespace {

template <class T>
struct RawPoint {
  T lambda;
  std::vector<T> pi;
  Support seg;  // support of the path piece ending here
  bool plateau = false;
};

template <class T>
std::vector<Q> to_q(const std::vector<T>& v) {
  std::vector<Q> out(v.size());
  for (size_t p = 0; p < v.size(); ++p) out[p] = Num<T>::to_q(v[p]);
  return out;
}

template <class T>
bool same_point(const Engine<T>& eng, const RawPoint<T>& a, const Breakpoint& b) {
  (void)eng;
  if (Num<T>::to_q(a.lambda) != b.lambda) {
    if constexpr (Num<T>::exact) return false;
  }
  const T tol = eng.data().tol;
  T sc = Num<T>::abs(a.lambda) + T(1);
  if (!near_zero(T(a.lambda - Num<T>::from_q(b.lambda)), sc, tol)) return false;
  for (size_t p = 0; p < a.pi.size(); ++p) {
    T bp = Num<T>::from_q(b.pi[p]);
    T s = Num<T>::abs(a.pi[p]) + Num<T>::abs(bp);
    if (!near_zero(T(a.pi[p] - bp), s, tol)) return false;
  }
  return true;
}

template <class T>
PiecewiseAffineEquilibrium run(const Game& g0, const TraceOptions& opt) {
  PiecewiseAffineEquilibrium res;
  res.mode = Num<T>::mode;
  res.original_edges = g0.m();
  if (is_strongly_connected(g0)) {
    res.game = g0;
  } else {
    res.game = strongly_connect(g0, g0.big);
    res.augmented = true;
  }
  res.game.fill_default_names();
  const Game& g = res.game;
  T tol = opt.tolerance ? Num<T>::from_q(*opt.tolerance) : Num<T>::default_tol();
  Engine<T> eng(g, tol);
  const long budget = opt.max_pivots > 0 ? opt.max_pivots : default_pivot_budget(g);

  auto close = [&](const T& a, const T& b) {
    T sc = Num<T>::abs(a) + Num<T>::abs(b);
    return near_zero(T(a - b), sc, tol);
  };

  State<T> X = eng.start();
  res.start = X.support();
  std::vector<RawPoint<T>> raw;
  raw.push_back({T(0), eng.potential(X, T(0)), X.support(), false});

  auto envelope_max = [&]() {
    T best(0);
    for (const auto& p : raw)
      if (p.lambda > best) best = p.lambda;
    return best;
  };

  for (;;) {
    const Side ex = eng.exit_side(X);
    const T lam = X.bound(ex);
    if (!X.feasible) {
      ++res.invariant_failures;
    }
    res.states.push_back({X.support().fingerprint(), X.sigma(), Num<T>::to_q(X.lmin), Num<T>::to_q(X.lmax)});
    if (opt.player_independent_asserts) {
      if (X.sigma() != 1) throw SolverError(SolverError::AssertionViolation, "negative orientation on a player-independent game");
      if (X.lmax < X.lmin) throw SolverError(SolverError::AssertionViolation, "lambda decreased on a player-independent game");
    }
    raw.push_back({lam, eng.potential(X, lam), X.support(), false});
    if (opt.stop_at && ex == Side::Max && Num<T>::to_q(envelope_max()) >= *opt.stop_at &&
        Num<T>::to_q(lam) >= *opt.stop_at)
      break;

    auto t0 = std::chrono::steady_clock::now();
    Step<T> st = eng.step(X, ex);
    auto t1 = std::chrono::steady_clock::now();
    if (st.kind == Step<T>::Terminal) {
      res.complete = ex == Side::Max;
      if (!res.complete) throw SolverError(SolverError::AssertionViolation, "path returned to lambda = 0");
      break;
    }
    res.pivot_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
    ++res.pivots;
    if (!st.sign_relation_ok || !st.entry_ok) ++res.invariant_failures;
    if (st.kind == Step<T>::Traversal) {
      if (opt.player_independent_asserts)
        throw SolverError(SolverError::AssertionViolation, "a-degenerate support on a player-independent game");
      ++res.degenerate_traversals;
      const auto& nt = *st.traversal;
      raw.push_back({nt.lambda, nt.pi_exit, nt.degenerate, true});
      TraversalRecord tr;
      tr.lambda = Num<T>::to_q(nt.lambda);
      tr.xi = Num<T>::to_q(nt.xi);
      tr.degenerate_fingerprint = nt.degenerate.fingerprint();
      tr.direction = to_q(nt.direction);
      tr.circulation = to_q(nt.circulation);
      tr.pi_entry = to_q(nt.pi_entry);
      tr.pi_exit = to_q(nt.pi_exit);
      res.traversals.push_back(std::move(tr));
    }
    if (opt.player_independent_asserts && !close(st.next->lmin, lam))
      throw SolverError(SolverError::AssertionViolation, "successor does not start where its predecessor ended");
    X = std::move(*st.next);
    if (res.pivots > budget) throw SolverError(SolverError::PivotBudgetExceeded, "pivot budget exceeded");
  }
  res.tie_anomalies = eng.stats().tie_anomalies;

  // monotone envelope
  auto emit = [&](const T& lam, const std::vector<T>& pi, const Support& seg) {
    Breakpoint bp;
    bp.lambda = Num<T>::to_q(lam);
    bp.pi = to_q(pi);
    bp.x = to_q(eng.flow(seg, pi));
    if (!res.breakpoints.empty()) res.segments.push_back(seg);
    res.breakpoints.push_back(std::move(bp));
  };
  T bar = raw[0].lambda;
  emit(raw[0].lambda, raw[0].pi, raw.size() > 1 ? raw[1].seg : raw[0].seg);
  bool at_frontier = true;
  for (size_t j = 1; j < raw.size(); ++j) {
    const RawPoint<T>& P = raw[j - 1];
    const RawPoint<T>& R = raw[j];
    if (R.lambda > bar && !close(R.lambda, bar)) {
      if (!at_frontier) {
        T t = (bar - P.lambda) / (R.lambda - P.lambda);
        std::vector<T> pi(P.pi.size());
        for (size_t p = 0; p < pi.size(); ++p) pi[p] = P.pi[p] + t * (R.pi[p] - P.pi[p]);
        RawPoint<T> J{bar, pi, R.seg, false};
        if (!same_point(eng, J, res.breakpoints.back())) emit(bar, pi, R.seg);
      }
      emit(R.lambda, R.pi, R.seg);
      bar = R.lambda;
      at_frontier = true;
    } else if (at_frontier && close(R.lambda, bar) && close(P.lambda, bar)) {
      if (!same_point(eng, R, res.breakpoints.back())) emit(R.lambda, R.pi, R.seg);
    } else if (at_frontier && close(R.lambda, bar)) {
      // returned to the frontier after an excursion that was never left
      if (!same_point(eng, R, res.breakpoints.back())) ++res.alternates;
      at_frontier = same_point(eng, R, res.breakpoints.back());
    } else {
      at_frontier = false;
      ++res.alternates;
    }
  }
  res.lambda_bar = Num<T>::to_q(bar);
  return res;
}

}  // namespace

PiecewiseAffineEquilibrium trace(const Game& g, const TraceOptions& opt) {
  g.validate();
  switch (opt.mode) {
    case Mode::Exact:
      return run<mpq_class>(g, opt);
    case Mode::Float:
      return run<double>(g, opt);
    case Mode::Wide:
      return run<mpf_class>(g, opt);
  }
  return {};
}

PiecewiseAffineEquilibrium solve_player_independent(const Game& g, const TraceOptions& opt) {
  if (!g.player_independent()) throw InputError("costs are player-specific");
  TraceOptions o = opt;
  o.player_independent_asserts = true;
  return trace(g, o);
}

std::vector<Q> eval(const PiecewiseAffineEquilibrium& f, const Q& lambda) {
  const auto& bp = f.breakpoints;
  if (bp.empty()) return {};
  if (lambda <= bp.front().lambda) return bp.front().x;
  for (size_t j = 1; j < bp.size(); ++j) {
    if (bp[j].lambda < lambda) continue;
    if (bp[j].lambda == lambda) return bp[j].x;
    const Breakpoint& a = bp[j - 1];
    const Breakpoint& b = bp[j];
    Q t = (lambda - a.lambda) / (b.lambda - a.lambda);
    std::vector<Q> x(a.x.size());
    for (size_t p = 0; p < x.size(); ++p) x[p] = a.x[p] + t * (b.x[p] - a.x[p]);
    return x;
  }
  return bp.back().x;
}

std::vector<Q> restrict_flow(const PiecewiseAffineEquilibrium& f, const std::vector<Q>& x) {
  if (!f.augmented) return x;
  const int m = f.game.m(), m0 = f.original_edges, k = f.game.k();
  std::vector<Q> out(static_cast<size_t>(m0) * k);
  for (int i = 0; i < k; ++i)
    for (int e = 0; e < m0; ++e) out[i * m0 + e] = x[i * m + e];
  return out;
}

std::vector<Q> solve_at(const Game& g, const Q& lambda, const TraceOptions& opt) {
  if (lambda < 0 || lambda > 1) throw InputError("lambda must lie in [0,1]");
  TraceOptions o = opt;
  o.stop_at = lambda;
  PiecewiseAffineEquilibrium f = trace(g, o);
  return restrict_flow(f, eval(f, lambda));
}

}  // namespace spliteq
