#include "oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "support.hpp"

namespace spliteq {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double qd(const Q& q) { return q.get_d(); }

std::vector<int> weak_component_roots(const Game& g) {
  std::vector<int> parent(g.n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const Edge& e : g.edges) parent[find(e.tail)] = find(e.head);
  std::vector<int> root(g.n);
  for (int v = 0; v < g.n; ++v) root[v] = find(v);
  return root;
}

// Conservation rows for one player, one dropped vertex per weak component.
// Row convention: in minus out equals demand (+R at sink, -R at source).
void conservation_rows(const Game& g, int i, double R, int col0, std::vector<std::vector<std::pair<int, double>>>& rows,
                       std::vector<double>& rhs) {
  const std::vector<int> root = weak_component_roots(g);
  for (int v = 0; v < g.n; ++v) {
    if (root[v] == v) continue;
    std::vector<std::pair<int, double>> row;
    for (int e = 0; e < g.m(); ++e) {
      if (g.edges[e].head == v) row.push_back({col0 + e, 1.0});
      if (g.edges[e].tail == v) row.push_back({col0 + e, -1.0});
    }
    double d = 0;
    if (v == g.players[i].sink) d += R;
    if (v == g.players[i].source) d -= R;
    rows.push_back(std::move(row));
    rhs.push_back(d);
  }
}

struct Qp {
  MatrixXd H;
  VectorXd c;
  MatrixXd A;
  VectorXd b;
};

// Mehrotra predictor-corrector for min 1/2 x'Hx + c'x, Ax = b, x >= 0.
bool interior_point(const Qp& p, VectorXd& x, VectorXd& y, long max_iter) {
  const long nv = p.H.rows(), nc = p.A.rows();
  x = VectorXd::Ones(nv);
  VectorXd s = VectorXd::Ones(nv);
  y = VectorXd::Zero(nc);
  const double bscale = 1.0 + (nc ? p.b.cwiseAbs().maxCoeff() : 0.0);
  const double cscale = 1.0 + p.c.cwiseAbs().maxCoeff() + p.H.cwiseAbs().maxCoeff();
  for (long it = 0; it < max_iter; ++it) {
    VectorXd rp = p.b - p.A * x;
    VectorXd rd = p.H * x + p.c - p.A.transpose() * y - s;
    double mu = x.dot(s) / static_cast<double>(nv);
    double rpn = nc ? rp.cwiseAbs().maxCoeff() : 0.0;
    if (rpn <= 1e-13 * bscale && rd.cwiseAbs().maxCoeff() <= 1e-13 * cscale && mu <= 1e-15 * cscale * bscale)
      return true;
    MatrixXd K = p.H;
    K.diagonal() += s.cwiseQuotient(x);
    Eigen::LDLT<MatrixXd> kf(K);
    MatrixXd KiAt = kf.solve(p.A.transpose());
    MatrixXd N = p.A * KiAt;
    N.diagonal().array() += 1e-14 * (1.0 + N.diagonal().cwiseAbs().maxCoeff());
    Eigen::LDLT<MatrixXd> nf(N);
    auto newton = [&](const VectorXd& rc, VectorXd& dx, VectorXd& dy, VectorXd& ds) {
      VectorXd g = -rd + rc.cwiseQuotient(x);
      VectorXd Kig = kf.solve(g);
      dy = nc ? VectorXd(nf.solve(rp - p.A * Kig)) : VectorXd::Zero(0);
      dx = Kig + KiAt * dy;
      ds = (rc - s.cwiseProduct(dx)).cwiseQuotient(x);
    };
    auto max_step = [](const VectorXd& v, const VectorXd& dv) {
      double a = 1.0;
      for (long j = 0; j < v.size(); ++j)
        if (dv[j] < 0) a = std::min(a, -v[j] / dv[j]);
      return a;
    };
    VectorXd dxa, dya, dsa;
    newton(-x.cwiseProduct(s), dxa, dya, dsa);
    double ap = max_step(x, dxa), ad = max_step(s, dsa);
    double mua = (x + ap * dxa).dot(s + ad * dsa) / static_cast<double>(nv);
    double sigma = std::pow(mua / mu, 3);
    VectorXd rc = VectorXd::Constant(nv, sigma * mu) - x.cwiseProduct(s) - dxa.cwiseProduct(dsa);
    VectorXd dx, dy, ds;
    newton(rc, dx, dy, ds);
    double alpha = std::min(1.0, 0.995 * std::min(max_step(x, dx), max_step(s, ds)));
    x += alpha * dx;
    y += alpha * dy;
    s += alpha * ds;
    if (!x.allFinite() || !s.allFinite()) return false;
  }
  return false;
}

// Re-solves the equality system on the detected support, adjusting it a few times when the
// interior point stalled near a degenerate face. Keeps x when no candidate stays optimal.
void polish(const Qp& p, VectorXd& x) {
  const long nv = x.size(), nc = p.A.rows();
  const double thr = 1e-9 * (1.0 + x.cwiseAbs().maxCoeff());
  std::vector<char> in(static_cast<size_t>(nv), 0);
  for (long j = 0; j < nv; ++j) in[static_cast<size_t>(j)] = x[j] > thr;
  for (int round = 0; round < 2 * nv + 4; ++round) {
    std::vector<long> P;
    for (long j = 0; j < nv; ++j)
      if (in[static_cast<size_t>(j)]) P.push_back(j);
    const long np = static_cast<long>(P.size());
    MatrixXd K = MatrixXd::Zero(np + nc, np + nc);
    VectorXd r(np + nc);
    for (long a = 0; a < np; ++a) {
      for (long b = 0; b < np; ++b) K(a, b) = p.H(P[a], P[b]);
      for (long c = 0; c < nc; ++c) {
        K(a, np + c) = -p.A(c, P[a]);
        K(np + c, a) = p.A(c, P[a]);
      }
      r[a] = -p.c[P[a]];
    }
    for (long c = 0; c < nc; ++c) r[np + c] = p.b[c];
    VectorXd sol = K.completeOrthogonalDecomposition().solve(r);
    if (!sol.allFinite()) return;
    if (nc && (K * sol - r).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + r.cwiseAbs().maxCoeff())) return;
    // drop the most negative support entry, if any
    long worst = -1;
    for (long a = 0; a < np; ++a)
      if (sol[a] < -1e-12 && (worst < 0 || sol[a] < sol[worst])) worst = a;
    if (worst >= 0) {
      in[static_cast<size_t>(P[worst])] = 0;
      continue;
    }
    VectorXd xn = VectorXd::Zero(nv);
    for (long a = 0; a < np; ++a) xn[P[a]] = std::max(0.0, sol[a]);
    VectorXd yn = sol.tail(nc);
    VectorXd red = p.H * xn + p.c - p.A.transpose() * yn;
    const double sc = 1.0 + red.cwiseAbs().maxCoeff();
    long add = -1;
    for (long j = 0; j < nv; ++j)
      if (!in[static_cast<size_t>(j)] && red[j] < -1e-9 * sc && (add < 0 || red[j] < red[add])) add = j;
    if (add >= 0) {
      in[static_cast<size_t>(add)] = 1;
      continue;
    }
    x = xn;
    return;
  }
}

Qp build_qp(const Game& g, const std::vector<std::vector<std::pair<int, double>>>& rows, const std::vector<double>& rhs,
            long nv) {
  Qp p;
  p.H = MatrixXd::Zero(nv, nv);
  p.c = VectorXd::Zero(nv);
  p.A = MatrixXd::Zero(static_cast<long>(rows.size()), nv);
  p.b = VectorXd::Zero(static_cast<long>(rows.size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    for (auto [col, v] : rows[r]) p.A(static_cast<long>(r), col) += v;
    p.b[static_cast<long>(r)] = rhs[r];
  }
  (void)g;
  return p;
}

std::vector<double> water_fill(const std::vector<double>& slope, const std::vector<double>& level0, double R) {
  // marginal on link e at own flow z: level0[e] + 2 slope[e] z
  const size_t m = slope.size();
  std::vector<double> x(m, 0.0);
  if (R <= 0) return x;
  std::vector<size_t> ord(m);
  std::iota(ord.begin(), ord.end(), 0);
  std::stable_sort(ord.begin(), ord.end(), [&](size_t a, size_t b) { return level0[a] < level0[b]; });
  double inv = 0, wsum = 0, L = 0;
  size_t used = 0;
  for (size_t j = 0; j < m; ++j) {
    const size_t e = ord[j];
    inv += 1.0 / (2 * slope[e]);
    wsum += level0[e] / (2 * slope[e]);
    L = (R + wsum) / inv;
    used = j + 1;
    if (j + 1 == m || L <= level0[ord[j + 1]]) break;
  }
  for (size_t j = 0; j < used; ++j) {
    const size_t e = ord[j];
    x[e] = std::max(0.0, (L - level0[e]) / (2 * slope[e]));
  }
  return x;
}

}  // namespace

bool is_parallel_links(const Game& g) {
  if (g.k() == 0) return false;
  const int s = g.players[0].source, t = g.players[0].sink;
  for (const Commodity& c : g.players)
    if (c.source != s || c.sink != t) return false;
  for (const Edge& e : g.edges)
    if (e.tail != s || e.head != t) return false;
  return true;
}

std::vector<double> best_response(const Game& g, const std::vector<double>& x, int i, double lambda) {
  const int m = g.m(), k = g.k();
  const double R = lambda * qd(g.players[i].rate);
  std::vector<double> other(m, 0.0);
  for (int j = 0; j < k; ++j)
    if (j != i)
      for (int e = 0; e < m; ++e) other[e] += x[static_cast<size_t>(j) * m + e];
  std::vector<double> slope(m), level0(m);
  for (int e = 0; e < m; ++e) {
    slope[e] = qd(g.slope(e, i));
    level0[e] = slope[e] * other[e] + qd(g.offset(e, i));
  }
  if (is_parallel_links(g)) return water_fill(slope, level0, R);
  if (R <= 0) return std::vector<double>(m, 0.0);
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<double> rhs;
  conservation_rows(g, i, R, 0, rows, rhs);
  Qp p = build_qp(g, rows, rhs, m);
  for (int e = 0; e < m; ++e) {
    p.H(e, e) = 2 * slope[e];
    p.c[e] = level0[e];
  }
  VectorXd xs, ys;
  if (!interior_point(p, xs, ys, 500)) throw OracleError(OracleError::NoConverge, "interior point did not converge");
  polish(p, xs);
  std::vector<double> out(m);
  for (int e = 0; e < m; ++e) out[e] = std::max(0.0, xs[e]);
  return out;
}

std::vector<Q> best_response(const Game& g, const std::vector<Q>& x, int i, const Q& lambda) {
  std::vector<double> xd(x.size());
  for (size_t p = 0; p < x.size(); ++p) xd[p] = qd(x[p]);
  std::vector<double> r = best_response(g, xd, i, qd(lambda));
  std::vector<Q> out(r.size());
  for (size_t p = 0; p < r.size(); ++p) out[p] = Q(r[p]);
  return out;
}

std::vector<Q> oracle_equilibrium(const Game& g, const Q& lambda, const OracleConfig& cfg) {
  if (cfg.tolerance <= 0 || cfg.max_iterations < 1) throw InputError("oracle config: tolerance > 0, iterations >= 1");
  if (cfg.method == OracleConfig::PotentialMin) return potential_minimizer(g, lambda);
  if (cfg.method == OracleConfig::ExhaustiveSupport) {
    ScanResult sr = exhaustive_support_scan(g, lambda);
    if (sr.equilibria.empty()) throw OracleError(OracleError::NoConverge, "support scan found no equilibrium");
    return sr.equilibria.front().x;
  }
  const int m = g.m(), k = g.k();
  std::vector<double> x(static_cast<size_t>(m) * k, 0.0);
  const double lam = qd(lambda);
  double scale = 1;
  for (const Commodity& c : g.players) scale = std::max(scale, lam * qd(c.rate));
  auto to_q = [&]() {
    std::vector<Q> out(x.size());
    for (size_t p = 0; p < x.size(); ++p) out[p] = Q(x[p]);
    return out;
  };
  for (long it = 0; it < cfg.max_iterations; ++it) {
    double change = 0;
    for (int i = 0; i < k; ++i) {
      std::vector<double> r = best_response(g, x, i, lam);
      for (int e = 0; e < m; ++e) {
        double& cur = x[static_cast<size_t>(i) * m + e];
        change = std::max(change, std::fabs(r[e] - cur));
        cur = r[e];
      }
    }
    if (change <= 1e-14 * scale || k == 1) {
      std::vector<Q> out = to_q();
      if (verify_equilibrium(g, out, lambda, cfg.tolerance).pass) return out;
      if (change == 0) break;
    }
  }
  std::vector<Q> out = to_q();
  if (verify_equilibrium(g, out, lambda, cfg.tolerance).pass) return out;
  throw OracleError(OracleError::NoConverge,
                    "best-response dynamics did not converge in " + std::to_string(cfg.max_iterations) + " rounds");
}

std::vector<Q> potential_minimizer(const Game& g, const Q& lambda) {
  if (!g.player_independent())
    throw OracleError(OracleError::UnsupportedCosts, "potential minimizer needs player-independent costs");
  const int m = g.m(), k = g.k();
  const long nv = static_cast<long>(m) * k;
  std::vector<Q> out(static_cast<size_t>(nv), Q(0));
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<double> rhs;
  bool any = false;
  for (int i = 0; i < k; ++i) {
    double R = qd(lambda * g.players[i].rate);
    any = any || R > 0;
    conservation_rows(g, i, R, i * m, rows, rhs);
  }
  if (!any) return out;
  Qp p = build_qp(g, rows, rhs, nv);
  for (int e = 0; e < m; ++e) {
    const double a = qd(g.slope(e, 0)), b = qd(g.offset(e, 0));
    for (int i = 0; i < k; ++i) {
      p.c[i * m + e] = b;
      for (int j = 0; j < k; ++j) p.H(i * m + e, j * m + e) = a * (i == j ? 2 : 1);
    }
  }
  VectorXd xs, ys;
  if (!interior_point(p, xs, ys, 500))
    throw OracleError(OracleError::NoConverge, "interior point did not converge");
  polish(p, xs);
  for (long j = 0; j < nv; ++j) out[static_cast<size_t>(j)] = Q(std::max(0.0, xs[j]));
  return out;
}

namespace {

// Solves M X = R over the rationals. Returns false when M is singular; `consistent` then tells
// whether the given right-hand side column still admits a solution.
bool rational_solve(std::vector<std::vector<Q>> M, std::vector<std::vector<Q>>& R, int check_col, bool& consistent) {
  const size_t n = M.size(), nr = R.empty() ? 0 : R[0].size();
  std::vector<size_t> pivcol;
  size_t row = 0;
  for (size_t col = 0; col < n && row < n; ++col) {
    size_t piv = row;
    while (piv < n && M[piv][col] == 0) ++piv;
    if (piv == n) continue;
    std::swap(M[piv], M[row]);
    std::swap(R[piv], R[row]);
    Q inv = 1 / M[row][col];
    for (size_t c = col; c < n; ++c) M[row][c] *= inv;
    for (size_t c = 0; c < nr; ++c) R[row][c] *= inv;
    for (size_t r2 = 0; r2 < n; ++r2) {
      if (r2 == row || M[r2][col] == 0) continue;
      Q f = M[r2][col];
      for (size_t c = col; c < n; ++c) M[r2][c] -= f * M[row][c];
      for (size_t c = 0; c < nr; ++c) R[r2][c] -= f * R[row][c];
    }
    pivcol.push_back(col);
    ++row;
  }
  if (row == n) {
    return true;
  }
  consistent = true;
  for (size_t r2 = row; r2 < n; ++r2)
    if (R[r2][static_cast<size_t>(check_col)] != 0) consistent = false;
  // basic solution with free variables at zero, written back in column order
  std::vector<std::vector<Q>> X(n, std::vector<Q>(nr, Q(0)));
  for (size_t r2 = 0; r2 < row; ++r2) X[pivcol[r2]] = R[r2];
  R = X;
  return false;
}

}  // namespace

ScanResult exhaustive_support_scan(const Game& g, const Q& lambda, int max_pairs) {
  const int n = g.n, m = g.m(), k = g.k();
  const int mk = m * k;
  if (mk > max_pairs)
    throw OracleError(OracleError::BudgetExceeded,
                      "support scan needs mk <= " + std::to_string(max_pairs) + ", got " + std::to_string(mk));
  ScanResult res;
  res.total_supports = 1L << mk;
  // potential unknown index for (i, v), v != s_i
  std::vector<int> pidx(static_cast<size_t>(n) * k, -1);
  int np = 0;
  for (int i = 0; i < k; ++i)
    for (int v = 0; v < n; ++v)
      if (v != g.players[i].source) pidx[static_cast<size_t>(i) * n + v] = np++;

  std::vector<std::pair<std::vector<Q>, size_t>> seen;  // flow -> equilibrium index
  for (long mask = 0; mask < res.total_supports; ++mask) {
    Support S(m, k);
    for (int i = 0; i < k; ++i)
      for (int e = 0; e < m; ++e)
        if (mask >> (i * m + e) & 1) S.set(e, i, true);
    if (!is_total(g, S)) continue;
    ++res.supports_checked;
    std::vector<std::pair<int, int>> act;
    std::vector<int> xidx(static_cast<size_t>(mk), -1);
    for (int i = 0; i < k; ++i)
      for (int e = 0; e < m; ++e)
        if (S.active(e, i)) {
          xidx[static_cast<size_t>(i) * m + e] = np + static_cast<int>(act.size());
          act.push_back({e, i});
        }
    const size_t N = static_cast<size_t>(np) + act.size();
    std::vector<std::vector<Q>> M(N, std::vector<Q>(N, Q(0)));
    std::vector<std::vector<Q>> R(N, std::vector<Q>(3, Q(0)));  // columns: constant, demand, at lambda
    size_t r = 0;
    for (auto [e, i] : act) {
      // a (xbar + x_i) + b = pi_h - pi_t
      const Q& a = g.slope(e, i);
      for (int j = 0; j < k; ++j) {
        int c = xidx[static_cast<size_t>(j) * m + e];
        if (c >= 0) M[r][static_cast<size_t>(c)] += a;
      }
      M[r][static_cast<size_t>(xidx[static_cast<size_t>(i) * m + e])] += a;
      int ph = pidx[static_cast<size_t>(i) * n + g.edges[e].head];
      int pt = pidx[static_cast<size_t>(i) * n + g.edges[e].tail];
      if (ph >= 0) M[r][static_cast<size_t>(ph)] -= 1;
      if (pt >= 0) M[r][static_cast<size_t>(pt)] += 1;
      R[r][0] = -g.offset(e, i);
      R[r][2] = -g.offset(e, i);
      ++r;
    }
    for (int i = 0; i < k; ++i)
      for (int v = 0; v < n; ++v) {
        if (v == g.players[i].source) continue;
        for (int e = 0; e < m; ++e) {
          int c = xidx[static_cast<size_t>(i) * m + e];
          if (c < 0) continue;
          if (g.edges[e].head == v) M[r][static_cast<size_t>(c)] += 1;
          if (g.edges[e].tail == v) M[r][static_cast<size_t>(c)] -= 1;
        }
        if (v == g.players[i].sink) {
          R[r][1] = g.players[i].rate;
          R[r][2] = lambda * g.players[i].rate;
        }
        ++r;
      }
    bool consistent = false;
    const bool singular = !rational_solve(M, R, 2, consistent);
    if (singular && !consistent) continue;
    if (singular) {
      res.degenerate = true;
      res.degenerate_supports.push_back(S.fingerprint());
    }
    // row values: active flows and inactive slacks, each affine in lambda
    auto value = [&](size_t col, size_t u) -> Q { return R[u][col]; };
    auto pi_of = [&](size_t col, int i, int v) -> Q {
      int p = pidx[static_cast<size_t>(i) * n + v];
      return p < 0 ? Q(0) : value(col, static_cast<size_t>(p));
    };
    bool feasible = true, boundary = false;
    std::vector<Q> x(static_cast<size_t>(mk), Q(0));
    for (size_t u = 0; u < act.size(); ++u) {
      auto [e, i] = act[u];
      const Q v = value(2, static_cast<size_t>(np) + u);
      const Q D = value(1, static_cast<size_t>(np) + u);
      if (v < 0) feasible = false;
      if (v == 0 && D != 0) boundary = true;
      x[static_cast<size_t>(i) * m + e] = v;
    }
    if (!feasible) continue;
    std::vector<Q> xbar = aggregate_flow(g, x);
    std::vector<Q> xbarD(static_cast<size_t>(m), Q(0));
    for (size_t u = 0; u < act.size(); ++u) xbarD[static_cast<size_t>(act[u].first)] += value(1, static_cast<size_t>(np) + u);
    for (int i = 0; i < k && feasible; ++i)
      for (int e = 0; e < m; ++e) {
        if (S.active(e, i)) continue;
        const Edge& ed = g.edges[e];
        Q slack = g.slope(e, i) * xbar[e] + g.offset(e, i) - (pi_of(2, i, ed.head) - pi_of(2, i, ed.tail));
        Q D = g.slope(e, i) * xbarD[e] - (pi_of(1, i, ed.head) - pi_of(1, i, ed.tail));
        if (slack < 0) {
          feasible = false;
          break;
        }
        if (slack == 0 && D != 0) boundary = true;
      }
    if (!feasible) continue;
    if (!singular && boundary) {
      res.degenerate = true;
      res.degenerate_supports.push_back(S.fingerprint());
    }
    if (singular) res.continuum = true;
    std::vector<Q> pi(static_cast<size_t>(n) * k, Q(0));
    for (int i = 0; i < k; ++i)
      for (int v = 0; v < n; ++v) pi[static_cast<size_t>(i) * n + v] = pi_of(2, i, v);
    auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& s) { return s.first == x; });
    if (it != seen.end()) {
      res.equilibria[it->second].supports.push_back(S.fingerprint());
      continue;
    }
    seen.push_back({x, res.equilibria.size()});
    res.equilibria.push_back({x, pi, {S.fingerprint()}});
  }
  return res;
}

}  // namespace spliteq
