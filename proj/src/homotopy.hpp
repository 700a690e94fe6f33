#pragma once
#include <optional>
#include <string>
#include <vector>

#include "game.hpp"
#include "numeric.hpp"
#include "support.hpp"

namespace spliteq {

struct Breakpoint {
  Q lambda;
  std::vector<Q> pi;  // nk
  std::vector<Q> x;   // mk
};

struct StateRecord {
  std::string fingerprint;
  int sigma = 0;
  Q lmin, lmax;
};

struct TraversalRecord {
  Q lambda, xi;
  std::string degenerate_fingerprint;
  std::vector<Q> direction, circulation, pi_entry, pi_exit;
};

struct PiecewiseAffineEquilibrium {
  Game game;  // the traced game, augmented when the input was not strongly connected
  int original_edges = 0;
  bool augmented = false;
  Mode mode = Mode::Exact;
  std::vector<Breakpoint> breakpoints;
  std::vector<Support> segments;  // segments[j] governs breakpoints j..j+1
  Support start;
  Q lambda_bar;
  long pivots = 0;
  long degenerate_traversals = 0;
  long alternates = 0;
  long invariant_failures = 0;
  long tie_anomalies = 0;
  bool complete = false;
  std::vector<StateRecord> states;
  std::vector<TraversalRecord> traversals;
  std::vector<double> pivot_seconds;
};

struct TraceOptions {
  Mode mode = Mode::Exact;
  std::optional<Q> tolerance;  // float modes only
  std::optional<Q> stop_at;    // stop once the emitted envelope covers this lambda
  long max_pivots = 0;         // 0 selects the default budget
  bool player_independent_asserts = false;
};

PiecewiseAffineEquilibrium trace(const Game& g, const TraceOptions& opt = {});
PiecewiseAffineEquilibrium solve_player_independent(const Game& g, const TraceOptions& opt = {});

// Flow at lambda; at a shared breakpoint the earlier value.
std::vector<Q> eval(const PiecewiseAffineEquilibrium& f, const Q& lambda);
// Flow restricted to the edges of the untraced input game.
std::vector<Q> restrict_flow(const PiecewiseAffineEquilibrium& f, const std::vector<Q>& x);

std::vector<Q> solve_at(const Game& g, const Q& lambda, const TraceOptions& opt = {});

long default_pivot_budget(const Game& g);

}  // namespace spliteq
