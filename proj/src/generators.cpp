#include "generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace spliteq {

Game gen_example_8player(const Q& big) {
  const std::vector<Edge> edges = {{0, 1}, {1, 0}, {1, 2}, {2, 1}, {2, 3}, {3, 2}, {3, 0}, {0, 3}};
  // direct edge and long path per player (0-based edge ids)
  struct Route {
    int s, t, direct;
    std::vector<int> path;
  };
  const std::vector<Route> routes = {
      {0, 3, 7, {0, 2, 4}}, {3, 2, 5, {6, 0, 2}}, {2, 1, 3, {4, 6, 0}}, {1, 0, 1, {2, 4, 6}},
      {0, 1, 0, {7, 5, 3}}, {1, 2, 2, {1, 7, 5}}, {2, 3, 4, {3, 1, 7}}, {3, 0, 6, {5, 3, 1}},
  };
  std::vector<Commodity> players;
  for (const Route& r : routes) players.push_back({r.s, r.t, Q(2)});
  Game g = make_game(4, edges, players);
  g.big = big;
  for (int i = 0; i < 8; ++i)
    for (int e = 0; e < 8; ++e) {
      g.slope(e, i) = 1;
      g.offset(e, i) = big;
    }
  for (int i = 0; i < 8; ++i) {
    g.slope(routes[i].direct, i) = 9;
    g.offset(routes[i].direct, i) = 3;
    for (int e : routes[i].path) {
      g.slope(e, i) = 1;
      g.offset(e, i) = 6;
    }
  }
  g.meta["generator"] = "example8";
  return g;
}

namespace {

struct Sampler {
  std::mt19937_64 rng;
  explicit Sampler(uint64_t seed) : rng(seed) {}
  uint64_t below(uint64_t n) { return n <= 1 ? 0 : rng() % n; }
  Q grid(const Q& lo, const Q& hi, int bits) {
    Q steps_q = (hi - lo) * Q(mpz_class(1) << bits);
    mpz_class steps = steps_q.get_num() / steps_q.get_den();
    uint64_t j = below(steps.get_ui() + 1);
    Q v = lo + Q(mpz_class(static_cast<unsigned long>(j)), mpz_class(1) << bits);
    v.canonicalize();
    return v;
  }
};

bool reaches(int n, const std::vector<Edge>& edges, int s, int t) {
  std::vector<std::vector<int>> out(n);
  for (const Edge& e : edges) out[e.tail].push_back(e.head);
  std::vector<bool> seen(n, false);
  std::vector<int> st{s};
  seen[s] = true;
  while (!st.empty()) {
    int u = st.back();
    st.pop_back();
    for (int w : out[u])
      if (!seen[w]) {
        seen[w] = true;
        st.push_back(w);
      }
  }
  return seen[t];
}

}  // namespace

Game gen_random(uint64_t seed, const RandomParams& p) {
  Sampler smp(seed);
  int n = p.n;
  std::vector<Edge> edges;
  if (p.k < 1) throw InputError("infeasible shape: k must be at least 1");
  if (p.family == "parallel") {
    if (p.m < 1) throw InputError("infeasible shape: parallel family needs m >= 1");
    n = 2;
    for (int e = 0; e < p.m; ++e) edges.push_back({0, 1});
  } else if (p.family == "grid") {
    const int w = p.grid_w, h = p.grid_h;
    if (w < 1 || h < 1 || w * h < 2) throw InputError("infeasible shape: grid needs at least two vertices");
    n = w * h;
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        int v = r * w + c;
        if (c + 1 < w) {
          edges.push_back({v, v + 1});
          edges.push_back({v + 1, v});
        }
        if (r + 1 < h) {
          edges.push_back({v, v + w});
          edges.push_back({v + w, v});
        }
      }
  } else if (p.family == "general") {
    if (n < 2 || p.m < n - 1) throw InputError("infeasible shape: need n >= 2 and m >= n-1");
    if (static_cast<long>(p.m) > static_cast<long>(n) * (n - 1)) throw InputError("infeasible shape: too many edges");
    std::set<std::pair<int, int>> used;
    for (int v = 1; v < n; ++v) {
      int parent = static_cast<int>(smp.below(v));
      edges.push_back({parent, v});
      used.insert({parent, v});
    }
    while (static_cast<int>(edges.size()) < p.m) {
      int u = static_cast<int>(smp.below(n)), v = static_cast<int>(smp.below(n));
      if (u == v || used.count({u, v})) continue;
      used.insert({u, v});
      edges.push_back({u, v});
    }
  } else {
    throw InputError("unknown family '" + p.family + "'");
  }

  std::vector<Commodity> players;
  for (int i = 0; i < p.k; ++i) {
    Commodity c;
    if (p.family == "parallel") {
      c.source = 0;
      c.sink = 1;
    } else if (p.family == "grid") {
      int corner = static_cast<int>(smp.below(4));
      const int w = p.grid_w, h = p.grid_h;
      int corners[4] = {0, w - 1, (h - 1) * w, h * w - 1};
      c.source = corners[corner];
      c.sink = corners[3 - corner];
      if (c.source == c.sink) c.sink = (c.source + 1) % n;
    } else {
      for (int tries = 0;; ++tries) {
        int s = static_cast<int>(smp.below(n)), t = static_cast<int>(smp.below(n));
        if (s != t && reaches(n, edges, s, t)) {
          c.source = s;
          c.sink = t;
          break;
        }
        if (tries > 10000) throw InputError("infeasible shape: no reachable terminal pair");
      }
    }
    c.rate = smp.grid(p.r_lo, p.r_hi, p.grid_bits);
    players.push_back(c);
  }
  Game g = make_game(n, edges, players);
  for (int e = 0; e < g.m(); ++e) {
    Q a0 = smp.grid(p.a_lo, p.a_hi, p.grid_bits);
    Q b0 = smp.grid(p.b_lo, p.b_hi, p.grid_bits);
    for (int i = 0; i < g.k(); ++i) {
      if (p.player_independent) {
        g.slope(e, i) = a0;
        g.offset(e, i) = b0;
      } else {
        g.slope(e, i) = i == 0 ? a0 : smp.grid(p.a_lo, p.a_hi, p.grid_bits);
        g.offset(e, i) = i == 0 ? b0 : smp.grid(p.b_lo, p.b_hi, p.grid_bits);
      }
    }
  }
  g.meta["generator"] = "random";
  g.meta["seed"] = std::to_string(seed);
  g.meta["family"] = p.family;
  return g;
}

int gadget_main_count(int n, const Q& beta) {
  // T = 2 n^(beta+1)
  if (beta.get_den() == 1) {
    mpz_class pw;
    mpz_pow_ui(pw.get_mpz_t(), mpz_class(n).get_mpz_t(), beta.get_num().get_ui() + 1);
    return static_cast<int>(2 * pw.get_si());
  }
  return static_cast<int>(std::ceil(2.0 * std::pow(static_cast<double>(n), beta.get_d() + 1.0)));
}

Game gen_gadget(const BimatrixGame& bm, long edge_budget) {
  const int n = bm.n;
  if (n < 1) throw InputError("bimatrix size must be positive");
  if (bm.beta <= 0 || bm.delta <= 0) throw InputError("beta and delta must be positive");
  if (static_cast<int>(bm.U.size()) != n || static_cast<int>(bm.V.size()) != n)
    throw InputError("payoff matrices must be n x n");
  for (int r = 0; r < n; ++r) {
    if (static_cast<int>(bm.U[r].size()) != n || static_cast<int>(bm.V[r].size()) != n)
      throw InputError("payoff matrices must be n x n");
    for (int c = 0; c < n; ++c)
      if ((bm.U[r][c] != 0 && bm.U[r][c] != 1) || (bm.V[r][c] != 0 && bm.V[r][c] != 1))
        throw InputError("payoff entries must be 0 or 1");
  }
  const int T = gadget_main_count(n, bm.beta);
  const long per = 8L * T + 2;
  const long total = per * n * n + 2L * (n * n + n);
  if (total > edge_budget) throw InputError("gadget too large: " + std::to_string(total) + " edges");

  // vertex layout: s1 t1 s2 t2, then per gadget (row-major):
  // in_r out_r in_c out_c hub_r hub_c r1_tail[T] r1_head[T] r2_tail[T] r2_head[T]
  const int per_v = 6 + 4 * T;
  auto gv = [&](int r, int c) { return 4 + (r * n + c) * per_v; };
  std::vector<Edge> edges;
  std::string types;
  std::vector<std::string> vnames = {"s1", "t1", "s2", "t2"};
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      std::string p = "g" + std::to_string(r + 1) + "_" + std::to_string(c + 1) + ".";
      for (const char* nm : {"in_r", "out_r", "in_c", "out_c", "hub_r", "hub_c"}) vnames.push_back(p + nm);
      for (const char* nm : {"m1t", "m1h", "m2t", "m2h"})
        for (int t = 0; t < T; ++t) vnames.push_back(p + nm + std::to_string(t + 1));
    }
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const int base = gv(r, c);
      const int in_r = base, out_r = base + 1, in_c = base + 2, out_c = base + 3, hub_r = base + 4, hub_c = base + 5;
      auto m1t = [&](int t) { return base + 6 + t; };
      auto m1h = [&](int t) { return base + 6 + T + t; };
      auto m2t = [&](int t) { return base + 6 + 2 * T + t; };
      auto m2h = [&](int t) { return base + 6 + 3 * T + t; };
      for (int t = 0; t < T; ++t) edges.push_back({m1t(t), m1h(t)}), types += 'M';
      for (int t = 0; t < T; ++t) edges.push_back({m2t(t), m2h(t)}), types += 'N';
      // row auxiliary edges: fan out over type-1 mains, collect, then chain the type-2 mains
      for (int t = 0; t < T; ++t) edges.push_back({in_r, m1t(t)}), types += 'a';
      for (int t = 0; t < T; ++t) edges.push_back({m1h(t), hub_r}), types += 'a';
      edges.push_back({hub_r, m2t(0)}), types += 'a';
      for (int t = 0; t + 1 < T; ++t) edges.push_back({m2h(t), m2t(t + 1)}), types += 'a';
      edges.push_back({m2h(T - 1), out_r}), types += 'a';
      // column auxiliary edges: chain the type-1 mains, then fan out over type-2 mains
      edges.push_back({in_c, m1t(0)}), types += 'b';
      for (int t = 0; t + 1 < T; ++t) edges.push_back({m1h(t), m1t(t + 1)}), types += 'b';
      edges.push_back({m1h(T - 1), hub_c}), types += 'b';
      for (int t = 0; t < T; ++t) edges.push_back({hub_c, m2t(t)}), types += 'b';
      for (int t = 0; t + 1 < T; ++t) edges.push_back({m2h(t), m2h(t + 1)}), types += 'b';
      edges.push_back({m2h(T - 1), out_c}), types += 'b';
    }
  std::vector<int> row_entry, col_entry;
  for (int r = 0; r < n; ++r) {
    row_entry.push_back(static_cast<int>(edges.size()));
    edges.push_back({0, gv(r, 0)}), types += 'a';
  }
  for (int r = 0; r < n; ++r)
    for (int c = 0; c + 1 < n; ++c) edges.push_back({gv(r, c) + 1, gv(r, c + 1)}), types += 'a';
  for (int r = 0; r < n; ++r) edges.push_back({gv(r, n - 1) + 1, 1}), types += 'a';
  for (int c = 0; c < n; ++c) {
    col_entry.push_back(static_cast<int>(edges.size()));
    edges.push_back({2, gv(0, c) + 2}), types += 'b';
  }
  for (int r = 0; r + 1 < n; ++r)
    for (int c = 0; c < n; ++c) edges.push_back({gv(r, c) + 3, gv(r + 1, c) + 2}), types += 'b';
  for (int c = 0; c < n; ++c) edges.push_back({gv(n - 1, c) + 3, 3}), types += 'b';

  const int nv = 4 + n * n * per_v;
  Game g = make_game(nv, edges, {{0, 1, Q(1)}, {2, 3, Q(1)}});
  g.vertex_names = vnames;
  g.delta = bm.delta;
  const Q four_n(4 * n);
  size_t e = 0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      for (long q = 0; q < per; ++q, ++e) {
        char ty = types[e];
        if (ty == 'M') {
          g.slope(e, 0) = bm.U[r][c] ? bm.delta : Q(1);
          g.slope(e, 1) = bm.delta;
        } else if (ty == 'N') {
          g.slope(e, 0) = bm.delta;
          g.slope(e, 1) = bm.V[r][c] ? bm.delta : Q(1);
        } else {
          g.slope(e, 0) = g.slope(e, 1) = bm.delta;
          g.offset(e, ty == 'a' ? 1 : 0) = four_n;
        }
      }
  for (; e < edges.size(); ++e) {
    g.slope(e, 0) = g.slope(e, 1) = bm.delta;
    g.offset(e, types[e] == 'a' ? 1 : 0) = four_n;
  }

  auto join = [](const std::vector<int>& v, char sep) {
    std::ostringstream os;
    for (size_t i = 0; i < v.size(); ++i) os << (i ? std::string(1, sep) : "") << v[i];
    return os.str();
  };
  auto mat = [&](const std::vector<std::vector<int>>& M) {
    std::ostringstream os;
    for (int r = 0; r < n; ++r) os << (r ? ";" : "") << join(M[r], ',');
    return os.str();
  };
  g.meta["generator"] = "gadget";
  g.meta["gadget.n"] = std::to_string(n);
  g.meta["gadget.beta"] = to_string(bm.beta);
  g.meta["gadget.T"] = std::to_string(T);
  g.meta["gadget.U"] = mat(bm.U);
  g.meta["gadget.V"] = mat(bm.V);
  g.meta["gadget.row_entry"] = join(row_entry, ',');
  g.meta["gadget.col_entry"] = join(col_entry, ',');
  g.meta["gadget.edge_types"] = types;
  return g;
}

namespace {

std::vector<int> split_ints(const std::string& s, char sep) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep))
    if (!tok.empty()) out.push_back(std::stoi(tok));
  return out;
}

std::vector<std::vector<int>> parse_matrix(const std::string& s) {
  std::vector<std::vector<int>> M;
  std::stringstream ss(s);
  std::string row;
  while (std::getline(ss, row, ';')) M.push_back(split_ints(row, ','));
  return M;
}

const std::string& meta_at(const Game& g, const std::string& key) {
  auto it = g.meta.find(key);
  if (it == g.meta.end()) throw InputError("missing gadget metadata '" + key + "'");
  return it->second;
}

}  // namespace

Extraction extract_bimatrix_strategies(const Game& g, const std::vector<Q>& x) {
  const int n = std::stoi(meta_at(g, "gadget.n"));
  auto U = parse_matrix(meta_at(g, "gadget.U"));
  auto V = parse_matrix(meta_at(g, "gadget.V"));
  auto rows = split_ints(meta_at(g, "gadget.row_entry"), ',');
  auto cols = split_ints(meta_at(g, "gadget.col_entry"), ',');
  const std::string& types = meta_at(g, "gadget.edge_types");
  const int m = static_cast<int>(types.size());
  if (x.size() < static_cast<size_t>(2 * m)) throw InputError("flow does not match the gadget instance");
  const int stride = static_cast<int>(x.size()) / 2;
  Extraction ex;
  for (int r = 0; r < n; ++r) ex.y.push_back(x[rows[r]]);
  for (int c = 0; c < n; ++c) ex.z.push_back(x[stride + cols[c]]);
  Q best_r = 0, best_c = 0, val_r = 0, val_c = 0;
  for (int r = 0; r < n; ++r) {
    Q u = 0;
    for (int c = 0; c < n; ++c) u += U[r][c] * ex.z[c];
    if (r == 0 || u > best_r) best_r = u;
    val_r += ex.y[r] * u;
  }
  for (int c = 0; c < n; ++c) {
    Q v = 0;
    for (int r = 0; r < n; ++r) v += V[r][c] * ex.y[r];
    if (c == 0 || v > best_c) best_c = v;
    val_c += ex.z[c] * v;
  }
  ex.regret_row = best_r - val_r;
  ex.regret_col = best_c - val_c;
  ex.epsilon = std::max(ex.regret_row, ex.regret_col);
  for (int e = 0; e < m; ++e) {
    if (types[e] == 'b' && abs(x[e]) > ex.wrong_aux) ex.wrong_aux = abs(x[e]);
    if (types[e] == 'a' && abs(x[stride + e]) > ex.wrong_aux) ex.wrong_aux = abs(x[stride + e]);
  }
  return ex;
}

}  // namespace spliteq
