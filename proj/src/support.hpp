#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "game.hpp"

namespace spliteq {

// Active sets S_e, stored edge-major: act[e*k + i].
struct Support {
  int m = 0, k = 0;
  std::vector<uint8_t> act;

  Support() = default;
  Support(int m_, int k_) : m(m_), k(k_), act(static_cast<size_t>(m_) * k_, 0) {}
  bool active(int e, int i) const { return act[static_cast<size_t>(e) * k + i] != 0; }
  void set(int e, int i, bool on) { act[static_cast<size_t>(e) * k + i] = on ? 1 : 0; }
  void toggle(int e, int i) { set(e, i, !active(e, i)); }
  int kappa(int e) const;
  int sigma(int e, int i) const { return active(e, i) ? 1 : -1; }
  // Hex bitset over the player-major pair order (bit p = i*m + e), most significant nibble first.
  std::string fingerprint() const;
  bool operator==(const Support& o) const { return m == o.m && k == o.k && act == o.act; }
  bool operator!=(const Support& o) const { return !(*this == o); }
};

Support neighbor(const Support& s, int e, int i);

// Per-edge k x k blocks of Ct = (I - K Omega) A^{-1}; C = Omega Ct and W = Sigma Ct are views.
struct SupportMatrices {
  int m = 0, k = 0;
  Support support;
  std::vector<Q> ct;  // ct[(e*k + i)*k + j]

  const Q& ctilde(int e, int i, int j) const { return ct[(static_cast<size_t>(e) * k + i) * k + j]; }
  Q c(int e, int i, int j) const { return support.active(e, i) ? ctilde(e, i, j) : Q(0); }
  Q w(int e, int i, int j) const { return support.active(e, i) ? ctilde(e, i, j) : Q(-ctilde(e, i, j)); }
  Q omega(int e, int i) const { return support.active(e, i) ? 1 : 0; }
  Q kdiag(int e) const { return Q(1, support.kappa(e) + 1); }
};

SupportMatrices build_support_matrices(const Game& g, const Support& s);

// x = C (G^T pi - b), player-major.
std::vector<Q> induced_flow(const Game& g, const SupportMatrices& mats, const std::vector<Q>& pi);
// u_{e,i}^T K Omega A^{-1} (G^T pi - b); the value is the same for every i.
Q total_flow_check(const Game& g, const SupportMatrices& mats, const std::vector<Q>& pi, int e);

struct LambdaPotentialCheck {
  bool ok = false;
  std::vector<Q> laplace_residual;                 // nk
  std::vector<std::pair<int, int>> violated_rows;  // (edge, player) with negative W-row
};

LambdaPotentialCheck check_lambda_potential(const Game& g, const Support& s, const std::vector<Q>& pi,
                                            const Q& lambda);

bool is_total(const Game& g, const Support& s);

// Edge subset mask over the game's edges.
bool is_closer(const Game& g, const std::vector<uint8_t>& mask, int anchor, int e, int f);
std::vector<std::pair<int, int>> serial_dependent_pairs(const Game& g, const std::vector<uint8_t>& mask,
                                                        int anchor);
bool is_shortest_path_support(const Game& g, const Support& s);

}  // namespace spliteq
