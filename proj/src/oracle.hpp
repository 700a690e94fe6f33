#pragma once
#include <stdexcept>
#include <string>
#include <vector>

#include "game.hpp"

namespace spliteq {

struct OracleError : std::runtime_error {
  enum Kind { NoConverge, UnsupportedCosts, BudgetExceeded } kind;
  OracleError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

struct OracleConfig {
  enum Method { BestResponse, PotentialMin, ExhaustiveSupport } method = BestResponse;
  long max_iterations = 20000;
  Q tolerance = Q(1, 1000000000);
  std::vector<Q> step_schedule;  // unused by the interior point path; kept for callers
};

// All edges run from every player's source to its sink.
bool is_parallel_links(const Game& g);

// Player i's cost minimizer against the other players' flows, returned as an m-vector.
std::vector<double> best_response(const Game& g, const std::vector<double>& x, int i, double lambda);
std::vector<Q> best_response(const Game& g, const std::vector<Q>& x, int i, const Q& lambda);

// Round-robin best responses. Throws OracleError(NoConverge).
std::vector<Q> oracle_equilibrium(const Game& g, const Q& lambda, const OracleConfig& cfg = {});

// Minimizer of the potential for player-independent costs. Throws OracleError(UnsupportedCosts).
std::vector<Q> potential_minimizer(const Game& g, const Q& lambda);

struct ScanEquilibrium {
  std::vector<Q> x;
  std::vector<Q> pi;
  std::vector<std::string> supports;
};

struct ScanResult {
  std::vector<ScanEquilibrium> equilibria;
  long supports_checked = 0;
  long total_supports = 0;
  bool degenerate = false;  // some support sits on a boundary or has a singular system
  bool continuum = false;   // a singular but consistent support: infinitely many equilibria
  std::vector<std::string> degenerate_supports;
};

// Enumerates every total support. Throws OracleError(BudgetExceeded) when mk > max_pairs.
ScanResult exhaustive_support_scan(const Game& g, const Q& lambda, int max_pairs = 18);

}  // namespace spliteq
