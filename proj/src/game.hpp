#pragma once
#include <map>
#include <string>
#include <vector>

#include "rational.hpp"

namespace spliteq {

struct Edge {
  int tail = 0, head = 0;
};

struct Commodity {
  int source = 0, sink = 0;
  Q rate;
};

// Flow vectors are player-major: x[i*m + e]. Potentials likewise: pi[i*n + v].
struct Game {
  int n = 0;
  std::vector<Edge> edges;
  std::vector<Commodity> players;
  std::vector<Q> a, b;  // a[e*k + i]
  std::vector<std::string> vertex_names, edge_names, player_names;
  Q big = 1000000;
  Q delta = Q(1, 1000000);
  std::map<std::string, std::string> meta;

  int m() const { return static_cast<int>(edges.size()); }
  int k() const { return static_cast<int>(players.size()); }
  const Q& slope(int e, int i) const { return a[static_cast<size_t>(e) * k() + i]; }
  const Q& offset(int e, int i) const { return b[static_cast<size_t>(e) * k() + i]; }
  Q& slope(int e, int i) { return a[static_cast<size_t>(e) * k() + i]; }
  Q& offset(int e, int i) { return b[static_cast<size_t>(e) * k() + i]; }

  // Throws InputError on broken invariants.
  void validate() const;
  void fill_default_names();
  bool player_independent() const;
};

Game make_game(int n, const std::vector<Edge>& edges, const std::vector<Commodity>& players);

std::vector<Q> aggregate_flow(const Game& g, const std::vector<Q>& x);
Q marginal_cost(const Game& g, const std::vector<Q>& x, int e, int i);
Q player_cost(const Game& g, const std::vector<Q>& x, int i);
// Out-minus-in per vertex and player (y_s = +r for a feasible flow).
std::vector<Q> excess(const Game& g, const std::vector<Q>& x);

struct PotentialViolation {
  int edge = 0, player = 0;
  Q gap;  // marginal cost minus potential difference on a used edge
};

struct VerificationReport {
  bool pass = false;
  Q max_conservation_residual;
  Q max_negativity;
  std::vector<Q> conservation_residual;  // nk, signed (excess minus required)
  std::vector<std::pair<int, int>> negative_pairs;
  std::vector<PotentialViolation> violations;
  std::vector<Q> potentials;  // shortest-path lengths, nk; -1 marks unreachable
  std::vector<bool> reachable;
  std::string summary(const Game& g) const;
};

VerificationReport verify_equilibrium(const Game& g, const std::vector<Q>& x, const Q& lambda,
                                      const Q& tolerance);

bool is_weakly_connected(const Game& g);
bool is_strongly_connected(const Game& g);
// Strongly connected component id per vertex.
std::vector<int> scc_ids(int n, const std::vector<Edge>& edges, int* count = nullptr);
Game strongly_connect(const Game& g, const Q& bigM);

}  // namespace spliteq
