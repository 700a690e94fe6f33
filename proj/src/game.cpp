#include "game.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>
#include <sstream>

namespace spliteq {

void Game::validate() const {
  if (n <= 0) throw InputError("game has no vertices");
  if (players.empty()) throw InputError("game has no players");
  const size_t mk = edges.size() * players.size();
  if (a.size() != mk || b.size() != mk) throw InputError("cost table does not cover all (edge, player) pairs");
  for (size_t e = 0; e < edges.size(); ++e) {
    const Edge& ed = edges[e];
    if (ed.tail < 0 || ed.tail >= n || ed.head < 0 || ed.head >= n)
      throw InputError("edge " + std::to_string(e) + " has an endpoint out of range");
    if (ed.tail == ed.head) throw InputError("edge " + std::to_string(e) + " is a self-loop");
  }
  for (size_t i = 0; i < players.size(); ++i) {
    const Commodity& c = players[i];
    if (c.source < 0 || c.source >= n || c.sink < 0 || c.sink >= n)
      throw InputError("player " + std::to_string(i) + " has a terminal out of range");
    if (c.source == c.sink) throw InputError("player " + std::to_string(i) + " has source equal to sink");
    if (c.rate < 0) throw InputError("player " + std::to_string(i) + " has negative rate");
  }
  for (size_t p = 0; p < mk; ++p) {
    if (a[p] <= 0) throw InputError("slope must be positive");
    if (b[p] < 0) throw InputError("offset must be nonnegative");
  }
  if (big <= 0 || delta <= 0) throw InputError("big and delta must be positive");
  if (!is_weakly_connected(*this)) throw InputError("graph is not weakly connected");
}

void Game::fill_default_names() {
  vertex_names.resize(n);
  for (int v = 0; v < n; ++v)
    if (vertex_names[v].empty()) vertex_names[v] = "v" + std::to_string(v + 1);
  edge_names.resize(edges.size());
  for (int e = 0; e < m(); ++e)
    if (edge_names[e].empty()) edge_names[e] = "e" + std::to_string(e + 1);
  player_names.resize(players.size());
  for (int i = 0; i < k(); ++i)
    if (player_names[i].empty()) player_names[i] = "p" + std::to_string(i + 1);
}

bool Game::player_independent() const {
  for (int e = 0; e < m(); ++e)
    for (int i = 1; i < k(); ++i)
      if (slope(e, i) != slope(e, 0) || offset(e, i) != offset(e, 0)) return false;
  return true;
}

Game make_game(int n, const std::vector<Edge>& edges, const std::vector<Commodity>& players) {
  Game g;
  g.n = n;
  g.edges = edges;
  g.players = players;
  g.a.assign(edges.size() * players.size(), Q(1));
  g.b.assign(edges.size() * players.size(), Q(0));
  g.fill_default_names();
  return g;
}

static void check_len(const Game& g, const std::vector<Q>& x) {
  if (x.size() != static_cast<size_t>(g.m()) * g.k())
    throw InputError("flow vector has length " + std::to_string(x.size()) + ", expected " +
                     std::to_string(g.m() * g.k()));
}

std::vector<Q> aggregate_flow(const Game& g, const std::vector<Q>& x) {
  check_len(g, x);
  const int m = g.m();
  std::vector<Q> xb(m, Q(0));
  for (int i = 0; i < g.k(); ++i)
    for (int e = 0; e < m; ++e) xb[e] += x[i * m + e];
  return xb;
}

Q marginal_cost(const Game& g, const std::vector<Q>& x, int e, int i) {
  check_len(g, x);
  const int m = g.m();
  Q total = 0;
  for (int j = 0; j < g.k(); ++j) total += x[j * m + e];
  return g.slope(e, i) * total + g.offset(e, i) + g.slope(e, i) * x[i * m + e];
}

Q player_cost(const Game& g, const std::vector<Q>& x, int i) {
  check_len(g, x);
  std::vector<Q> xb = aggregate_flow(g, x);
  Q c = 0;
  for (int e = 0; e < g.m(); ++e) c += x[i * g.m() + e] * (g.slope(e, i) * xb[e] + g.offset(e, i));
  return c;
}

std::vector<Q> excess(const Game& g, const std::vector<Q>& x) {
  check_len(g, x);
  const int m = g.m(), n = g.n;
  std::vector<Q> y(static_cast<size_t>(n) * g.k(), Q(0));
  for (int i = 0; i < g.k(); ++i)
    for (int e = 0; e < m; ++e) {
      const Q& f = x[i * m + e];
      if (f == 0) continue;
      y[i * n + g.edges[e].tail] += f;
      y[i * n + g.edges[e].head] -= f;
    }
  return y;
}

VerificationReport verify_equilibrium(const Game& g, const std::vector<Q>& x, const Q& lambda,
                                      const Q& tolerance) {
  VerificationReport rep;
  const int m = g.m(), n = g.n, k = g.k();
  check_len(g, x);
  std::vector<Q> y = excess(g, x);
  rep.conservation_residual.assign(static_cast<size_t>(n) * k, Q(0));
  for (int i = 0; i < k; ++i) {
    const Commodity& c = g.players[i];
    for (int v = 0; v < n; ++v) {
      Q want = 0;
      if (v == c.source) want = lambda * c.rate;
      if (v == c.sink) want = -lambda * c.rate;
      Q r = y[i * n + v] - want;
      rep.conservation_residual[i * n + v] = r;
      if (abs(r) > rep.max_conservation_residual) rep.max_conservation_residual = abs(r);
    }
  }
  for (int i = 0; i < k; ++i)
    for (int e = 0; e < m; ++e)
      if (x[i * m + e] < 0) {
        rep.negative_pairs.emplace_back(e, i);
        if (-x[i * m + e] > rep.max_negativity) rep.max_negativity = -x[i * m + e];
      }

  std::vector<Q> xb = aggregate_flow(g, x);
  std::vector<std::vector<int>> out(n);
  for (int e = 0; e < m; ++e) out[g.edges[e].tail].push_back(e);
  rep.potentials.assign(static_cast<size_t>(n) * k, Q(-1));
  rep.reachable.assign(static_cast<size_t>(n) * k, false);

  for (int i = 0; i < k; ++i) {
    std::vector<Q> mu(m);
    for (int e = 0; e < m; ++e) {
      Q xe = x[i * m + e] < 0 ? Q(0) : x[i * m + e];
      Q tot = xb[e] < 0 ? Q(0) : xb[e];
      mu[e] = g.slope(e, i) * (tot + xe) + g.offset(e, i);
    }
    // Dijkstra on nonnegative lengths
    std::vector<Q> dist(n);
    std::vector<bool> done(n, false), seen(n, false);
    const int s = g.players[i].source;
    dist[s] = 0;
    seen[s] = true;
    for (;;) {
      int u = -1;
      for (int v = 0; v < n; ++v)
        if (seen[v] && !done[v] && (u < 0 || dist[v] < dist[u])) u = v;
      if (u < 0) break;
      done[u] = true;
      for (int e : out[u]) {
        int w = g.edges[e].head;
        Q cand = dist[u] + mu[e];
        if (!seen[w] || cand < dist[w]) {
          dist[w] = cand;
          seen[w] = true;
        }
      }
    }
    for (int v = 0; v < n; ++v) {
      rep.reachable[i * n + v] = seen[v];
      if (seen[v]) rep.potentials[i * n + v] = dist[v];
    }
    for (int e = 0; e < m; ++e) {
      if (x[i * m + e] <= tolerance) continue;
      int v = g.edges[e].tail, w = g.edges[e].head;
      Q gap = seen[v] ? Q(mu[e] - (dist[w] - dist[v])) : mu[e] + 1;
      if (gap > tolerance) rep.violations.push_back({e, i, gap});
    }
  }
  rep.pass = rep.max_conservation_residual <= tolerance && rep.max_negativity <= tolerance &&
             rep.violations.empty();
  return rep;
}

std::string VerificationReport::summary(const Game& g) const {
  std::ostringstream os;
  os << "verdict " << (pass ? "pass" : "fail") << "\n";
  os << "max_conservation_residual " << to_string(max_conservation_residual) << "\n";
  os << "max_negativity " << to_string(max_negativity) << "\n";
  os << "potential_violations " << violations.size() << "\n";
  for (const auto& v : violations)
    os << "violation " << g.edge_names[v.edge] << " " << g.player_names[v.player] << " gap "
       << to_string(v.gap) << "\n";
  const int n = g.n;
  for (int i = 0; i < g.k(); ++i)
    for (int v = 0; v < n; ++v)
      if (conservation_residual[i * n + v] != 0)
        os << "residual " << g.vertex_names[v] << " " << g.player_names[i] << " "
           << to_string(conservation_residual[i * n + v]) << "\n";
  return os.str();
}

bool is_weakly_connected(const Game& g) {
  std::vector<std::vector<int>> adj(g.n);
  for (const Edge& e : g.edges) {
    adj[e.tail].push_back(e.head);
    adj[e.head].push_back(e.tail);
  }
  std::vector<bool> seen(g.n, false);
  std::vector<int> stack{0};
  seen[0] = true;
  int cnt = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int w : adj[u])
      if (!seen[w]) {
        seen[w] = true;
        ++cnt;
        stack.push_back(w);
      }
  }
  return cnt == g.n;
}

std::vector<int> scc_ids(int n, const std::vector<Edge>& edges, int* count) {
  // Kosaraju, iterative
  std::vector<std::vector<int>> out(n), in(n);
  for (const Edge& e : edges) {
    out[e.tail].push_back(e.head);
    in[e.head].push_back(e.tail);
  }
  std::vector<int> order;
  std::vector<bool> seen(n, false);
  for (int r = 0; r < n; ++r) {
    if (seen[r]) continue;
    std::vector<std::pair<int, size_t>> st{{r, 0}};
    seen[r] = true;
    while (!st.empty()) {
      auto& [u, it] = st.back();
      if (it < out[u].size()) {
        int w = out[u][it++];
        if (!seen[w]) {
          seen[w] = true;
          st.push_back({w, 0});
        }
      } else {
        order.push_back(u);
        st.pop_back();
      }
    }
  }
  std::vector<int> comp(n, -1);
  int c = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] >= 0) continue;
    std::vector<int> st{*it};
    comp[*it] = c;
    while (!st.empty()) {
      int u = st.back();
      st.pop_back();
      for (int w : in[u])
        if (comp[w] < 0) {
          comp[w] = c;
          st.push_back(w);
        }
    }
    ++c;
  }
  if (count) *count = c;
  return comp;
}

bool is_strongly_connected(const Game& g) {
  int c = 0;
  scc_ids(g.n, g.edges, &c);
  return c == 1;
}

Game strongly_connect(const Game& g, const Q& bigM) {
  Game h = g;
  h.fill_default_names();
  int added = 0;
  for (int round = 0; round <= h.n; ++round) {
    int c = 0;
    std::vector<int> comp = scc_ids(h.n, h.edges, &c);
    if (c <= 1) break;
    std::vector<int> rep(c, -1);
    for (int v = 0; v < h.n; ++v)
      if (rep[comp[v]] < 0) rep[comp[v]] = v;
    std::vector<bool> has_in(c, false), has_out(c, false);
    for (const Edge& e : h.edges)
      if (comp[e.tail] != comp[e.head]) {
        has_out[comp[e.tail]] = true;
        has_in[comp[e.head]] = true;
      }
    std::vector<int> src, snk;
    for (int v = 0; v < h.n; ++v) {
      if (rep[comp[v]] != v) continue;
      if (!has_in[comp[v]]) src.push_back(v);
      if (!has_out[comp[v]]) snk.push_back(v);
    }
    const size_t L = std::max(src.size(), snk.size());
    std::set<std::pair<int, int>> fresh;
    for (size_t j = 0; j < L; ++j) {
      int from = snk[j % snk.size()], to = src[(j + 1) % src.size()];
      if (from == to || !fresh.insert({from, to}).second) continue;
      h.edges.push_back({from, to});
      h.edge_names.push_back("aug" + std::to_string(++added));
    }
  }
  const int k = h.k(), m0 = g.m(), m1 = h.m();
  std::vector<Q> a(static_cast<size_t>(m1) * k), b(static_cast<size_t>(m1) * k);
  for (int e = 0; e < m1; ++e)
    for (int i = 0; i < k; ++i) {
      a[e * k + i] = e < m0 ? g.slope(e, i) : Q(1);
      b[e * k + i] = e < m0 ? g.offset(e, i) : bigM;
    }
  h.a = std::move(a);
  h.b = std::move(b);
  return h;
}

}  // namespace spliteq
