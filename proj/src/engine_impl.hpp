#pragma once
// Template bodies for Engine<T>; included only by the explicit instantiation units.
#include <algorithm>
#include <numeric>

#include "engine.hpp"

namespace spliteq {

namespace detail {

// Gauss-Jordan on a dense N x N matrix. Produces the determinant sign, the rank,
// the inverse when nonsingular and a kernel vector when the defect is exactly one.
template <class T>
void gauss_jordan(std::vector<T> A, int N, const T& tol, int& sign, int& rank, std::vector<T>* inv,
                  std::vector<T>* kernel) {
  std::vector<T> I(static_cast<size_t>(N) * N, T(0));
  for (int i = 0; i < N; ++i) I[static_cast<size_t>(i) * N + i] = T(1);
  T scale(0);
  if constexpr (!Num<T>::exact)
    for (const T& v : A)
      if (Num<T>::abs(v) > scale) scale = Num<T>::abs(v);
  sign = 1;
  int r = 0;
  std::vector<int> pivcol;
  for (int c = 0; c < N && r < N; ++c) {
    int p = -1;
    if constexpr (Num<T>::exact) {
      for (int q = r; q < N; ++q)
        if (A[static_cast<size_t>(q) * N + c] != 0) {
          p = q;
          break;
        }
    } else {
      T best(0);
      for (int q = r; q < N; ++q) {
        T v = Num<T>::abs(A[static_cast<size_t>(q) * N + c]);
        if (v > best) {
          best = v;
          p = q;
        }
      }
      T lim = tol * scale;
      if (p >= 0 && best <= lim) p = -1;
    }
    if (p < 0) continue;
    if (p != r) {
      for (int j = 0; j < N; ++j) {
        std::swap(A[static_cast<size_t>(p) * N + j], A[static_cast<size_t>(r) * N + j]);
        std::swap(I[static_cast<size_t>(p) * N + j], I[static_cast<size_t>(r) * N + j]);
      }
      sign = -sign;
    }
    T piv = A[static_cast<size_t>(r) * N + c];
    if (Num<T>::sgn(piv) < 0) sign = -sign;
    T ipiv = T(1) / piv;
    for (int j = c; j < N; ++j) A[static_cast<size_t>(r) * N + j] *= ipiv;
    for (int j = 0; j < N; ++j) I[static_cast<size_t>(r) * N + j] *= ipiv;
    for (int q = 0; q < N; ++q) {
      if (q == r) continue;
      T f = A[static_cast<size_t>(q) * N + c];
      if (f == 0) continue;
      for (int j = c; j < N; ++j) A[static_cast<size_t>(q) * N + j] -= f * A[static_cast<size_t>(r) * N + j];
      for (int j = 0; j < N; ++j) I[static_cast<size_t>(q) * N + j] -= f * I[static_cast<size_t>(r) * N + j];
    }
    pivcol.push_back(c);
    ++r;
  }
  rank = r;
  if (rank < N) {
    sign = 0;
    if (kernel && rank == N - 1) {
      std::vector<bool> is_piv(N, false);
      for (int c : pivcol) is_piv[c] = true;
      int f = 0;
      while (is_piv[f]) ++f;
      kernel->assign(N, T(0));
      (*kernel)[f] = T(1);
      for (int q = 0; q < rank; ++q) (*kernel)[pivcol[q]] = -A[static_cast<size_t>(q) * N + f];
    }
    return;
  }
  if (inv) *inv = std::move(I);
}

}  // namespace detail

template <class T>
Engine<T>::Engine(const Game& g) : Engine(g, Num<T>::default_tol()) {}

template <class T>
Engine<T>::Engine(const Game& g, const T& tol) : game_(g) {
  if constexpr (std::is_same_v<T, mpf_class>) ensure_wide_precision();
  game_.fill_default_names();
  auto& d = d_;
  d.n = g.n;
  d.m = g.m();
  d.k = g.k();
  d.N = d.k * (d.n - 1);
  d.tol = tol;
  for (const Edge& e : g.edges) {
    d.tail.push_back(e.tail);
    d.head.push_back(e.head);
  }
  for (const Commodity& c : g.players) {
    d.src.push_back(c.source);
    d.snk.push_back(c.sink);
    d.r.push_back(Num<T>::from_q(c.rate));
  }
  const size_t mk = static_cast<size_t>(d.m) * d.k;
  d.a.resize(mk);
  d.ia.resize(mk);
  d.b.resize(mk);
  for (size_t p = 0; p < mk; ++p) {
    d.a[p] = Num<T>::from_q(g.a[p]);
    d.ia[p] = Num<T>::from_q(Q(1) / g.a[p]);
    d.b[p] = Num<T>::from_q(g.b[p]);
  }
  d.red.assign(static_cast<size_t>(d.n) * d.k, -1);
  for (int i = 0; i < d.k; ++i)
    for (int v = 0; v < d.n; ++v) {
      if (v == d.src[i]) continue;
      d.red[i * d.n + v] = static_cast<int>(d.full.size());
      d.full.push_back(i * d.n + v);
    }
  d.dy.assign(static_cast<size_t>(d.n) * d.k, T(0));
  for (int i = 0; i < d.k; ++i) {
    d.dy[i * d.n + d.src[i]] -= d.r[i];
    d.dy[i * d.n + d.snk[i]] += d.r[i];
  }
}

template <class T>
bool Engine<T>::close(const T& x, const T& y) const {
  if constexpr (Num<T>::exact) {
    return x == y;
  } else {
    T diff = x - y;
    T sc = Num<T>::abs(x) + Num<T>::abs(y);
    return near_zero(diff, sc, d_.tol);
  }
}

template <class T>
int Engine<T>::lex_compare(const std::vector<T>& a, const std::vector<T>& b) const {
  for (size_t p = 0; p < a.size(); ++p) {
    if (close(a[p], b[p])) continue;
    return a[p] < b[p] ? -1 : 1;
  }
  return 0;
}

template <class T>
std::shared_ptr<const Laplacian<T>> Engine<T>::build(const Support& S) const {
  const auto& d = d_;
  const int n = d.n, k = d.k, nk = n * k;
  auto lap = std::make_shared<Laplacian<T>>();
  lap->S = S;
  lap->L.assign(static_cast<size_t>(nk) * nk, T(0));
  std::vector<int> act;
  for (int e = 0; e < d.m; ++e) {
    act.clear();
    for (int i = 0; i < k; ++i)
      if (S.active(e, i)) act.push_back(i);
    if (act.empty()) continue;
    T kd = T(1) / T(static_cast<int>(act.size()) + 1);
    const int h = d.head[e], t = d.tail[e];
    for (int i : act)
      for (int j : act) {
        T c = ((i == j ? T(1) : T(0)) - kd) * d.ia[e * k + j];
        lap->L[static_cast<size_t>(i * n + h) * nk + j * n + h] += c;
        lap->L[static_cast<size_t>(i * n + h) * nk + j * n + t] -= c;
        lap->L[static_cast<size_t>(i * n + t) * nk + j * n + h] -= c;
        lap->L[static_cast<size_t>(i * n + t) * nk + j * n + t] += c;
      }
  }
  const int N = d.N;
  std::vector<T> Lr(static_cast<size_t>(N) * N);
  for (int r = 0; r < N; ++r)
    for (int c = 0; c < N; ++c) Lr[static_cast<size_t>(r) * N + c] = lap->L[static_cast<size_t>(d.full[r]) * nk + d.full[c]];
  int sign = 0, rank = 0;
  std::vector<T> kern;
  detail::gauss_jordan(std::move(Lr), N, d.tol, sign, rank, &lap->M, &kern);
  lap->sigma = sign;
  lap->rank_defect = N - rank;
  if (!kern.empty()) {
    lap->kernel.assign(nk, T(0));
    for (int r = 0; r < N; ++r) lap->kernel[d.full[r]] = kern[r];
  }
  return lap;
}

template <class T>
std::vector<T> Engine<T>::solve(const Laplacian<T>& lap, const std::vector<T>& rhs) const {
  if (!lap.nonsingular()) throw SolverError(SolverError::DegenerateSupport, "support is a-degenerate");
  const auto& d = d_;
  const int N = d.N;
  std::vector<T> out(static_cast<size_t>(d.n) * d.k, T(0));
  std::vector<T> rr(N);
  for (int c = 0; c < N; ++c) rr[c] = rhs[d.full[c]];
  for (int r = 0; r < N; ++r) {
    T s(0);
    const T* row = &lap.M[static_cast<size_t>(r) * N];
    for (int c = 0; c < N; ++c)
      if (rr[c] != 0) s += row[c] * rr[c];
    out[d.full[r]] = s;
  }
  return out;
}

template <class T>
std::vector<T> Engine<T>::offset_vector(const Support& S) const {
  const auto& d = d_;
  const int n = d.n, k = d.k;
  std::vector<T> out(static_cast<size_t>(n) * k, T(0));
  for (int e = 0; e < d.m; ++e) {
    int kap = S.kappa(e);
    if (kap == 0) continue;
    T s(0);
    for (int j = 0; j < k; ++j)
      if (S.active(e, j)) s += d.b[e * k + j] * d.ia[e * k + j];
    s /= T(kap + 1);
    for (int i = 0; i < k; ++i) {
      if (!S.active(e, i)) continue;
      T cb = d.b[e * k + i] * d.ia[e * k + i] - s;
      out[i * n + d.head[e]] += cb;
      out[i * n + d.tail[e]] -= cb;
    }
  }
  return out;
}

template <class T>
RankOne<T> Engine<T>::rank_one_update(const Laplacian<T>& lap, int e, int i) const {
  if (!lap.nonsingular()) throw SolverError(SolverError::DegenerateSupport, "rank-one update from a-degenerate support");
  const auto& d = d_;
  const int n = d.n, k = d.k, nk = n * k, N = d.N;
  const Support& S = lap.S;
  Support S1 = neighbor(S, e, i);
  const int kap = S.kappa(e), kap1 = S1.kappa(e);
  const int h = d.head[e], t = d.tail[e];
  const int sig = S.sigma(e, i);
  // L' = L - p q^T with p = G (I - Omega' K') u and q = G W_S^T u
  std::vector<std::pair<int, T>> p, q;
  for (int j = 0; j < k; ++j) {
    T al = (j == i ? T(1) : T(0)) - (S1.active(e, j) ? T(1) / T(kap1 + 1) : T(0));
    if (al != 0) {
      p.emplace_back(j * n + h, al);
      p.emplace_back(j * n + t, -al);
    }
    T wq = (j == i ? d.ia[e * k + i] : T(0)) - (S.active(e, j) ? d.ia[e * k + j] / T(kap + 1) : T(0));
    if (sig < 0) wq = -wq;
    if (wq != 0) {
      q.emplace_back(j * n + h, wq);
      q.emplace_back(j * n + t, -wq);
    }
  }
  RankOne<T> res;
  auto lap2 = std::make_shared<Laplacian<T>>();
  lap2->S = S1;
  lap2->L = lap.L;
  for (const auto& [pi, pv] : p)
    for (const auto& [qi, qv] : q) lap2->L[static_cast<size_t>(pi) * nk + qi] -= pv * qv;

  std::vector<T> Mp(N, T(0)), qM(N, T(0));
  for (const auto& [pi, pv] : p) {
    int c = d.red[pi];
    if (c < 0) continue;
    for (int r = 0; r < N; ++r) Mp[r] += lap.M[static_cast<size_t>(r) * N + c] * pv;
  }
  for (const auto& [qi, qv] : q) {
    int r = d.red[qi];
    if (r < 0) continue;
    const T* row = &lap.M[static_cast<size_t>(r) * N];
    for (int c = 0; c < N; ++c) qM[c] += qv * row[c];
  }
  T qmp(0), sc(0);
  for (const auto& [qi, qv] : q) {
    int r = d.red[qi];
    if (r < 0) continue;
    T term = qv * Mp[r];
    qmp += term;
    if constexpr (!Num<T>::exact) sc += Num<T>::abs(term);
  }
  res.factor = T(1) - qmp;
  if (near_zero(res.factor, sc, d.tol)) {
    res.degenerate = true;
    res.factor = T(0);
    res.raw_direction.assign(nk, T(0));
    for (int r = 0; r < N; ++r) res.raw_direction[d.full[r]] = Mp[r];
    lap2->sigma = 0;
    lap2->rank_defect = 1;
    res.lap = lap2;
    return res;
  }
  lap2->sigma = lap.sigma * Num<T>::sgn(res.factor);
  lap2->M = lap.M;
  T inv = T(1) / res.factor;
  for (int r = 0; r < N; ++r) {
    if (Mp[r] == 0) continue;
    T s = Mp[r] * inv;
    T* row = &lap2->M[static_cast<size_t>(r) * N];
    for (int c = 0; c < N; ++c)
      if (qM[c] != 0) row[c] += s * qM[c];
  }
  res.lap = lap2;
  return res;
}

template <class T>
T Engine<T>::row(const Support& S, int e, int i, const std::vector<T>& pi, bool with_b) const {
  const auto& d = d_;
  const int n = d.n, k = d.k;
  int kap = 0;
  T s(0), own(0);
  for (int j = 0; j < k; ++j) {
    bool act = S.active(e, j);
    if (!act && j != i) continue;
    T z = pi[j * n + d.head[e]] - pi[j * n + d.tail[e]];
    if (with_b) z -= d.b[e * k + j];
    z *= d.ia[e * k + j];
    if (j == i) own = z;
    if (act) {
      s += z;
      ++kap;
    }
  }
  T v = own - s / T(kap + 1);
  return S.active(e, i) ? v : T(-v);
}

template <class T>
std::vector<T> Engine<T>::flow(const Support& S, const std::vector<T>& pi) const {
  const auto& d = d_;
  const int n = d.n, k = d.k, m = d.m;
  std::vector<T> x(static_cast<size_t>(m) * k, T(0));
  std::vector<T> z(k);
  for (int e = 0; e < m; ++e) {
    int kap = 0;
    T s(0);
    for (int j = 0; j < k; ++j) {
      if (!S.active(e, j)) continue;
      z[j] = (pi[j * n + d.head[e]] - pi[j * n + d.tail[e]] - d.b[e * k + j]) * d.ia[e * k + j];
      s += z[j];
      ++kap;
    }
    if (kap == 0) continue;
    s /= T(kap + 1);
    for (int j = 0; j < k; ++j)
      if (S.active(e, j)) x[j * m + e] = z[j] - s;
  }
  return x;
}

template <class T>
std::vector<T> Engine<T>::potential(const State<T>& X, const T& lambda) const {
  std::vector<T> pi(X.dpi.size());
  for (size_t p = 0; p < pi.size(); ++p) pi[p] = lambda * X.dpi[p] + X.dbar[p];
  return pi;
}

template <class T>
std::vector<std::pair<int, T>> Engine<T>::w_hat(const Support& S, int e, int i) const {
  const auto& d = d_;
  const int k = d.k;
  const int kap = S.kappa(e);
  std::vector<std::pair<int, T>> out;
  for (int j = 0; j < k; ++j) {
    T v = (j == i ? d.ia[e * k + i] : T(0)) - (S.active(e, j) ? d.ia[e * k + j] / T(kap + 1) : T(0));
    if (!S.active(e, i)) v = -v;
    if (v != 0) out.emplace_back(j, v);
  }
  return out;
}

// (w^T L* G C_S) as a player-major mk vector, w = G w_hat at edge e.
template <class T>
std::vector<T> Engine<T>::wlgc(const std::vector<std::pair<int, T>>& what, int e, const Laplacian<T>& lap) const {
  const auto& d = d_;
  const int n = d.n, k = d.k, m = d.m, N = d.N;
  std::vector<T> r(N, T(0));
  for (const auto& [j, v] : what) {
    for (int end = 0; end < 2; ++end) {
      int idx = j * n + (end == 0 ? d.head[e] : d.tail[e]);
      int rr = d.red[idx];
      if (rr < 0) continue;
      T f = end == 0 ? v : T(-v);
      const T* row = &lap.M[static_cast<size_t>(rr) * N];
      for (int c = 0; c < N; ++c) r[c] += f * row[c];
    }
  }
  std::vector<T> rf(static_cast<size_t>(n) * k, T(0));
  for (int c = 0; c < N; ++c) rf[d.full[c]] = r[c];
  const Support& S = lap.S;
  std::vector<T> out(static_cast<size_t>(m) * k, T(0));
  std::vector<T> g(k);
  for (int f = 0; f < m; ++f) {
    int kap = 0;
    T s(0);
    for (int l = 0; l < k; ++l) {
      if (!S.active(f, l)) continue;
      g[l] = rf[l * n + d.head[f]] - rf[l * n + d.tail[f]];
      s += g[l];
      ++kap;
    }
    if (kap == 0) continue;
    s /= T(kap + 1);
    for (int l = 0; l < k; ++l)
      if (S.active(f, l)) out[l * m + f] = (g[l] - s) * d.ia[f * k + l];
  }
  return out;
}

template <class T>
std::vector<T> Engine<T>::row_perturbation(const State<T>& X, int e, int i) const {
  auto what = w_hat(X.support(), e, i);
  std::vector<T> out = wlgc(what, e, *X.lap);
  for (const auto& [j, v] : what) out[j * d_.m + e] -= v;
  return out;
}

template <class T>
void Engine<T>::fill_coeff(const State<T>& X, LexKey<T>& key) const {
  if (key.has_coeff) return;
  const size_t mk = static_cast<size_t>(d_.m) * d_.k;
  if (key.pair.clamp()) {
    key.coeff.assign(mk, T(0));
  } else {
    key.coeff = row_perturbation(X, key.pair.e, key.pair.i);
    for (T& v : key.coeff) v = -v / key.slope;
  }
  key.has_coeff = true;
}

template <class T>
Pair Engine<T>::farthest(const Support& S, const std::vector<Pair>& tied) const {
  ++stats_.serial_resolutions;
  const int i = tied.front().i;
  for (const Pair& p : tied)
    if (p.i != i) {
      ++stats_.tie_anomalies;
      Pair best = tied.front();
      for (const Pair& q : tied)
        if (q.i * d_.m + q.e < best.i * d_.m + best.e) best = q;
      return best;
    }
  std::vector<uint8_t> mask(d_.m, 0);
  for (int e = 0; e < d_.m; ++e) mask[e] = S.active(e, i);
  const int anchor = d_.src[i];
  for (const Pair& c : tied) {
    bool closer = false;
    for (const Pair& o : tied)
      if (o != c && is_closer(game_, mask, anchor, c.e, o.e)) {
        closer = true;
        break;
      }
    if (!closer) return c;
  }
  ++stats_.tie_anomalies;
  return tied.back();
}

template <class T>
template <class CoeffFn>
LexKey<T> Engine<T>::choose(std::vector<Cand>& cands, bool want_max, const T* clamp, const Support& S,
                            CoeffFn coeff) const {
  // extreme base value
  const Cand* ext = nullptr;
  for (const Cand& c : cands)
    if (!ext || (want_max ? c.base > ext->base : c.base < ext->base)) ext = &c;
  LexKey<T> key;
  key.slope = T(0);
  bool clamp_best = clamp && (!ext || (want_max ? !(ext->base > *clamp) : !(ext->base < *clamp)));
  const T& best = clamp_best ? *clamp : ext->base;
  std::vector<const Cand*> tied;
  for (const Cand& c : cands)
    if (close(c.base, best)) tied.push_back(&c);
  bool clamp_tied = clamp && close(*clamp, best);
  if (tied.empty() || (tied.size() == 1 && !clamp_tied)) {
    if (clamp_best || tied.empty()) {
      key.base = *clamp;
      key.pair = Pair{};
    } else {
      key.base = tied[0]->base;
      key.slope = tied[0]->slope;
      key.pair = tied[0]->pair;
    }
    return key;
  }
  ++stats_.lex_resolutions;
  const size_t mk = static_cast<size_t>(d_.m) * d_.k;
  std::vector<std::vector<T>> vecs;
  for (const Cand* c : tied) vecs.push_back(coeff(*c));
  std::vector<T> zero(mk, T(0));
  // lexicographic extreme
  const std::vector<T>* bv = clamp_tied ? &zero : &vecs[0];
  for (const auto& v : vecs) {
    int cmp = lex_compare(v, *bv);
    if (want_max ? cmp > 0 : cmp < 0) bv = &v;
  }
  if (clamp_tied && lex_compare(*bv, zero) == 0) {
    key.base = *clamp;
    key.pair = Pair{};
    key.coeff = zero;
    key.has_coeff = true;
    return key;
  }
  std::vector<Pair> full;
  size_t pick = 0;
  for (size_t t = 0; t < tied.size(); ++t)
    if (lex_compare(vecs[t], *bv) == 0) {
      full.push_back(tied[t]->pair);
      pick = t;
    }
  if (full.size() > 1) {
    Pair p = farthest(S, full);
    for (size_t t = 0; t < tied.size(); ++t)
      if (tied[t]->pair == p) pick = t;
  }
  key.base = tied[pick]->base;
  key.slope = tied[pick]->slope;
  key.pair = tied[pick]->pair;
  key.coeff = vecs[pick];
  key.has_coeff = true;
  return key;
}

template <class T>
void Engine<T>::compute_range(State<T>& X) const {
  const auto& d = d_;
  const int n = d.n, k = d.k, m = d.m;
  const Support& S = X.support();
  std::vector<Cand> lower, upper;
  X.feasible = true;
  std::vector<T> zD(k), z0(k);
  for (int e = 0; e < m; ++e) {
    int kap = 0;
    T sD(0), s0(0), aD(0), a0(0);
    for (int j = 0; j < k; ++j) {
      zD[j] = (X.dpi[j * n + d.head[e]] - X.dpi[j * n + d.tail[e]]) * d.ia[e * k + j];
      z0[j] = (X.dbar[j * n + d.head[e]] - X.dbar[j * n + d.tail[e]] - d.b[e * k + j]) * d.ia[e * k + j];
      if (!S.active(e, j)) continue;
      ++kap;
      sD += zD[j];
      s0 += z0[j];
      if constexpr (!Num<T>::exact) {
        aD += Num<T>::abs(zD[j]);
        a0 += Num<T>::abs(z0[j]);
      }
    }
    T kd = T(1) / T(kap + 1);
    for (int i = 0; i < k; ++i) {
      T D = zD[i] - sD * kd;
      T c = z0[i] - s0 * kd;
      if (!S.active(e, i)) {
        D = -D;
        c = -c;
      }
      T scD(0), sc0(0);
      if constexpr (!Num<T>::exact) {
        scD = Num<T>::abs(zD[i]) + aD * kd;
        sc0 = Num<T>::abs(z0[i]) + a0 * kd;
      }
      int sg = sign_tol(D, scD, d.tol);
      if (sg == 0) {
        if (sign_tol(c, sc0, d.tol) < 0) X.feasible = false;
        continue;
      }
      T ratio = -c / D;
      (sg > 0 ? lower : upper).push_back(Cand{ratio, D, Pair{e, i}});
    }
  }
  auto coeff = [&](const Cand& c) {
    std::vector<T> v = row_perturbation(X, c.pair.e, c.pair.i);
    for (T& x : v) x = -x / c.slope;
    return v;
  };
  T zero(0), one(1);
  X.kmin = choose(lower, true, &zero, S, coeff);
  X.kmax = choose(upper, false, &one, S, coeff);
  X.lmin = X.kmin.base;
  X.lmax = X.kmax.base;
  if (X.lmin > X.lmax && !close(X.lmin, X.lmax)) X.feasible = false;
}

template <class T>
State<T> Engine<T>::make_state(std::shared_ptr<const Laplacian<T>> lap) const {
  if (!lap->nonsingular()) throw SolverError(SolverError::DegenerateSupport, "support is a-degenerate");
  State<T> X;
  X.lap = std::move(lap);
  X.dpi = solve(*X.lap, d_.dy);
  X.dbar = solve(*X.lap, offset_vector(X.support()));
  compute_range(X);
  return X;
}

template <class T>
Support Engine<T>::start_support() const {
  // Shortest paths on offsets; ties broken by the epsilon perturbation, i.e. lexicographically
  // smaller sets of perturbed pair indices are shorter.
  const int n = game_.n, m = game_.m(), k = game_.k();
  Support S(m, k);
  std::vector<std::vector<int>> out(n);
  for (int e = 0; e < m; ++e) out[game_.edges[e].tail].push_back(e);
  for (int i = 0; i < k; ++i) {
    std::vector<Q> dist(n);
    std::vector<std::vector<uint8_t>> lab(n);
    std::vector<int> pe(n, -1);
    std::vector<bool> seen(n, false), done(n, false);
    auto less = [&](const Q& d1, const std::vector<uint8_t>& l1, const Q& d2, const std::vector<uint8_t>& l2) {
      if (d1 != d2) return d1 < d2;
      for (size_t p = 0; p < l1.size(); ++p)
        if (l1[p] != l2[p]) return l1[p] < l2[p];
      return false;
    };
    const int s = game_.players[i].source;
    dist[s] = 0;
    lab[s].assign(static_cast<size_t>(m) * k, 0);
    seen[s] = true;
    for (;;) {
      int u = -1;
      for (int v = 0; v < n; ++v)
        if (seen[v] && !done[v] && (u < 0 || less(dist[v], lab[v], dist[u], lab[u]))) u = v;
      if (u < 0) break;
      done[u] = true;
      for (int e : out[u]) {
        int w = game_.edges[e].head;
        if (done[w]) continue;
        Q nd = dist[u] + game_.offset(e, i);
        std::vector<uint8_t> nl = lab[u];
        nl[static_cast<size_t>(i) * m + e] = 1;
        if (!seen[w] || less(nd, nl, dist[w], lab[w])) {
          seen[w] = true;
          dist[w] = nd;
          lab[w] = std::move(nl);
          pe[w] = e;
        }
      }
    }
    for (int v = 0; v < n; ++v) {
      if (v == s) continue;
      if (pe[v] < 0) throw SolverError(SolverError::NonTotalSupport, "vertex unreachable from a source; graph not strongly connected");
      S.set(pe[v], i, true);
    }
  }
  return S;
}

template <class T>
State<T> Engine<T>::start() const {
  State<T> X = make_state(build(start_support()));
  if (X.sigma() != 1) throw SolverError(SolverError::AssertionViolation, "start support without positive orientation");
  if (!X.kmin.pair.clamp()) throw SolverError(SolverError::AssertionViolation, "start support not clamped at 0");
  return X;
}

template <class T>
Support Engine<T>::continuative_neighbor(const State<T>& X, Side side) const {
  const LexKey<T>& key = X.key(side);
  if (key.pair.clamp()) throw SolverError(SolverError::ClampedBoundary, "boundary is clamped");
  return neighbor(X.support(), key.pair.e, key.pair.i);
}

template <class T>
Step<T> Engine<T>::step(const State<T>& X, Side side) const {
  Step<T> st;
  st.side = side;
  LexKey<T> key = X.key(side);
  if (key.pair.clamp()) {
    st.kind = Step<T>::Terminal;
    return st;
  }
  st.via = key.pair;
  const int e = key.pair.e, i = key.pair.i;
  RankOne<T> ro = rank_one_update(*X.lap, e, i);
  if (ro.degenerate) return traverse(X, side, key, ro);
  st.kind = Step<T>::Pivot;
  st.factor = ro.factor;
  State<T> Y = make_state(ro.lap);
  // sign relation between the shared row slopes
  const int s1 = Num<T>::sgn(key.slope);
  T slope_y = row(Y.support(), e, i, Y.dpi, false);
  T sc(0);
  if constexpr (!Num<T>::exact) sc = Num<T>::abs(slope_y) + Num<T>::abs(key.slope);
  const int s2 = sign_tol(slope_y, sc, d_.tol);
  st.sign_relation_ok = s1 == -X.sigma() * Y.sigma() * s2;
  // the toggled pair must be tight on the side that leads back
  Side back = (Y.kmin.pair == key.pair) ? Side::Min : (Y.kmax.pair == key.pair ? Side::Max : side);
  st.entry_ok = (Y.kmin.pair == key.pair || Y.kmax.pair == key.pair) && close(Y.bound(back), key.base);
  st.next = std::move(Y);
  return st;
}

template <class T>
Step<T> Engine<T>::traverse(const State<T>& X, Side side, const LexKey<T>& key0, const RankOne<T>& ro) const {
  const auto& d = d_;
  const int n = d.n, k = d.k, m = d.m, nk = n * k;
  LexKey<T> key = key0;
  fill_coeff(X, key);
  const Support& S1 = ro.lap->S;
  const Pair entry = key.pair;

  NullTraversal<T> nt;
  nt.lambda = key.base;
  nt.degenerate = S1;
  nt.entry = entry;
  nt.pi_entry = potential(X, key.base);

  // normalized direction
  T scale(0);
  if constexpr (!Num<T>::exact)
    for (const T& v : ro.raw_direction)
      if (Num<T>::abs(v) > scale) scale = Num<T>::abs(v);
  int first = -1;
  for (int p = 0; p < nk; ++p)
    if (!near_zero(ro.raw_direction[p], scale, d.tol) && (Num<T>::exact || Num<T>::abs(ro.raw_direction[p]) > scale * T(1e-6))) {
      first = p;
      break;
    }
  if (first < 0) throw SolverError(SolverError::AssertionViolation, "empty nullspace direction");
  nt.direction.resize(nk);
  for (int p = 0; p < nk; ++p) nt.direction[p] = ro.raw_direction[p] / ro.raw_direction[first];

  T dn_entry = row(S1, entry.e, entry.i, nt.direction, false);
  const int walk = Num<T>::sgn(dn_entry);
  if (walk == 0) throw SolverError(SolverError::AssertionViolation, "nullspace direction does not move the entering row");
  std::vector<T> dir = nt.direction;
  if (walk < 0)
    for (T& v : dir) v = -v;

  std::vector<Cand> upper;
  for (int e = 0; e < m; ++e)
    for (int i = 0; i < k; ++i) {
      if (Pair{e, i} == entry) continue;
      T DN = row(S1, e, i, dir, false);
      T c = row(S1, e, i, nt.pi_entry, true);
      T sc(0);
      if constexpr (!Num<T>::exact) {
        for (int j = 0; j < k; ++j)
          sc += Num<T>::abs(dir[j * n + d.head[e]]) + Num<T>::abs(dir[j * n + d.tail[e]]);
        sc *= d.ia[e * k + i] + T(1);
      }
      if (sign_tol(DN, sc, d.tol) >= 0) continue;
      upper.push_back(Cand{-c / DN, DN, Pair{e, i}});
    }
  if (upper.empty()) throw SolverError(SolverError::Unbounded, "nullspace walk is unbounded");
  auto coeff = [&](const Cand& c) {
    auto what = w_hat(S1, c.pair.e, c.pair.i);
    std::vector<T> v = wlgc(what, c.pair.e, *X.lap);
    for (const auto& [j, w] : what) v[j * m + c.pair.e] -= w;
    T wdpi = row(S1, c.pair.e, c.pair.i, X.dpi, false);
    for (size_t p = 0; p < v.size(); ++p) v[p] += wdpi * key.coeff[p];
    for (T& x : v) x = -x / c.slope;
    return v;
  };
  LexKey<T> ex = choose(upper, false, nullptr, S1, coeff);
  nt.exit = ex.pair;
  nt.xi = walk > 0 ? ex.base : T(-ex.base);
  nt.pi_exit.resize(nk);
  for (int p = 0; p < nk; ++p) nt.pi_exit[p] = nt.pi_entry[p] + ex.base * dir[p];
  {
    // circulation: induced flow of the direction (offsets excluded)
    std::vector<T> x(static_cast<size_t>(m) * k, T(0));
    for (int e = 0; e < m; ++e)
      for (int i = 0; i < k; ++i)
        if (S1.active(e, i)) {
          int kap = S1.kappa(e);
          T s(0), own(0);
          for (int j = 0; j < k; ++j) {
            if (!S1.active(e, j)) continue;
            T z = (nt.direction[j * n + d.head[e]] - nt.direction[j * n + d.tail[e]]) * d.ia[e * k + j];
            s += z;
            if (j == i) own = z;
          }
          x[i * m + e] = own - s / T(kap + 1);
        }
    nt.circulation = std::move(x);
  }

  Support S2 = neighbor(S1, ex.pair.e, ex.pair.i);
  auto lap2 = build(S2);
  if (!lap2->nonsingular())
    throw SolverError(SolverError::RankDefectTooLarge, "exit support of a nullspace walk is a-degenerate");
  State<T> Y = make_state(lap2);

  Step<T> st;
  st.kind = Step<T>::Traversal;
  st.side = side;
  st.via = entry;
  st.factor = T(0);
  Side back = (Y.kmin.pair == ex.pair) ? Side::Min : (Y.kmax.pair == ex.pair ? Side::Max : side);
  st.entry_ok = (Y.kmin.pair == ex.pair || Y.kmax.pair == ex.pair) && close(Y.bound(back), key.base);
  st.next = std::move(Y);
  st.traversal = std::move(nt);
  return st;
}

}  // namespace spliteq
