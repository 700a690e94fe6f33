#include "support.hpp"

#include <numeric>

namespace spliteq {

int Support::kappa(int e) const {
  int c = 0;
  for (int i = 0; i < k; ++i) c += active(e, i);
  return c;
}

std::string Support::fingerprint() const {
  const int bits = m * k;
  const int nibbles = std::max(1, (bits + 3) / 4);
  std::string s(nibbles, '0');
  static const char* hex = "0123456789abcdef";
  for (int nb = 0; nb < nibbles; ++nb) {
    int v = 0;
    for (int t = 0; t < 4; ++t) {
      int p = nb * 4 + t;
      if (p >= bits) break;
      int i = p / m, e = p % m;
      if (active(e, i)) v |= 1 << t;
    }
    s[nibbles - 1 - nb] = hex[v];
  }
  return s;
}

Support neighbor(const Support& s, int e, int i) {
  Support t = s;
  t.toggle(e, i);
  return t;
}

SupportMatrices build_support_matrices(const Game& g, const Support& s) {
  SupportMatrices mats;
  mats.m = g.m();
  mats.k = g.k();
  mats.support = s;
  const int k = g.k();
  mats.ct.assign(static_cast<size_t>(g.m()) * k * k, Q(0));
  for (int e = 0; e < g.m(); ++e) {
    Q kd(1, s.kappa(e) + 1);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        Q v = (i == j ? Q(1) : Q(0)) - (s.active(e, j) ? kd : Q(0));
        mats.ct[(static_cast<size_t>(e) * k + i) * k + j] = v / g.slope(e, j);
      }
  }
  return mats;
}

static std::vector<Q> potential_gaps(const Game& g, const std::vector<Q>& pi) {
  // z[e*k + j] = pi^j_head - pi^j_tail - b_{e,j}
  const int k = g.k(), n = g.n;
  std::vector<Q> z(static_cast<size_t>(g.m()) * k);
  for (int e = 0; e < g.m(); ++e)
    for (int j = 0; j < k; ++j)
      z[e * k + j] = pi[j * n + g.edges[e].head] - pi[j * n + g.edges[e].tail] - g.offset(e, j);
  return z;
}

std::vector<Q> induced_flow(const Game& g, const SupportMatrices& mats, const std::vector<Q>& pi) {
  const int k = g.k(), m = g.m();
  std::vector<Q> z = potential_gaps(g, pi);
  std::vector<Q> x(static_cast<size_t>(m) * k, Q(0));
  for (int e = 0; e < m; ++e)
    for (int i = 0; i < k; ++i) {
      if (!mats.support.active(e, i)) continue;
      Q v = 0;
      for (int j = 0; j < k; ++j) v += mats.ctilde(e, i, j) * z[e * k + j];
      x[i * m + e] = v;
    }
  return x;
}

Q total_flow_check(const Game& g, const SupportMatrices& mats, const std::vector<Q>& pi, int e) {
  const int k = g.k(), n = g.n;
  Q s = 0;
  for (int j = 0; j < k; ++j) {
    if (!mats.support.active(e, j)) continue;
    s += (pi[j * n + g.edges[e].head] - pi[j * n + g.edges[e].tail] - g.offset(e, j)) / g.slope(e, j);
  }
  return s / (mats.support.kappa(e) + 1);
}

LambdaPotentialCheck check_lambda_potential(const Game& g, const Support& s, const std::vector<Q>& pi,
                                            const Q& lambda) {
  LambdaPotentialCheck res;
  const int k = g.k(), m = g.m(), n = g.n;
  SupportMatrices mats = build_support_matrices(g, s);
  std::vector<Q> x = induced_flow(g, mats, pi);
  std::vector<Q> y = excess(g, x);
  res.laplace_residual.assign(static_cast<size_t>(n) * k, Q(0));
  bool lap_ok = true;
  for (int i = 0; i < k; ++i)
    for (int v = 0; v < n; ++v) {
      Q want = 0;
      if (v == g.players[i].source) want = lambda * g.players[i].rate;
      if (v == g.players[i].sink) want = -lambda * g.players[i].rate;
      Q r = y[i * n + v] - want;
      if (r != 0) lap_ok = false;
      res.laplace_residual[i * n + v] = r;
    }
  for (int i = 0; i < k; ++i)
    if (pi[i * n + g.players[i].source] != 0) lap_ok = false;
  std::vector<Q> z = potential_gaps(g, pi);
  for (int e = 0; e < m; ++e)
    for (int i = 0; i < k; ++i) {
      Q v = 0;
      for (int j = 0; j < k; ++j) v += mats.w(e, i, j) * z[e * k + j];
      if (v < 0) res.violated_rows.emplace_back(e, i);
    }
  res.ok = lap_ok && res.violated_rows.empty();
  return res;
}

namespace {

struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

}  // namespace

bool is_total(const Game& g, const Support& s) {
  for (int i = 0; i < g.k(); ++i) {
    Dsu d(g.n);
    int comps = g.n;
    for (int e = 0; e < g.m(); ++e) {
      if (!s.active(e, i)) continue;
      int a = d.find(g.edges[e].tail), b = d.find(g.edges[e].head);
      if (a != b) {
        d.unite(a, b);
        --comps;
      }
    }
    if (comps != 1) return false;
  }
  return true;
}

bool is_closer(const Game& g, const std::vector<uint8_t>& mask, int anchor, int e, int f) {
  if (e == f || !mask[e] || !mask[f]) return false;
  Dsu d(g.n);
  for (int h = 0; h < g.m(); ++h)
    if (mask[h] && h != e && h != f) d.unite(g.edges[h].tail, g.edges[h].head);
  // smallest candidate cut: components of head(e) and tail(f)
  int in = d.find(g.edges[e].head), out = d.find(g.edges[f].tail);
  auto inside = [&](int v) {
    int c = d.find(v);
    return c == in || c == out;
  };
  if (inside(anchor) || inside(g.edges[e].tail) || inside(g.edges[f].head)) return false;
  return true;
}

std::vector<std::pair<int, int>> serial_dependent_pairs(const Game& g, const std::vector<uint8_t>& mask,
                                                        int anchor) {
  std::vector<std::pair<int, int>> out;
  for (int e = 0; e < g.m(); ++e)
    for (int f = 0; f < g.m(); ++f)
      if (is_closer(g, mask, anchor, e, f)) out.emplace_back(e, f);
  return out;
}

bool is_shortest_path_support(const Game& g, const Support& s) {
  if (!is_total(g, s)) return false;
  std::vector<uint8_t> all(g.m(), 1);
  for (int i = 0; i < g.k(); ++i)
    for (auto [e, f] : serial_dependent_pairs(g, all, g.players[i].source))
      if (!s.active(e, i)) return false;
  return true;
}

}  // namespace spliteq
