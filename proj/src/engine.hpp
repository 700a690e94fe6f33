#pragma once
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "game.hpp"
#include "numeric.hpp"
#include "support.hpp"

namespace spliteq {

enum class Side { Min = 0, Max = 1 };
inline Side opposite(Side s) { return s == Side::Min ? Side::Max : Side::Min; }

// An (edge, player) pair; e < 0 is the clamp sentinel (0 on the min side, 1 on the max side).
struct Pair {
  int e = -1, i = -1;
  bool clamp() const { return e < 0; }
  bool operator==(const Pair& o) const { return e == o.e && i == o.i; }
  bool operator!=(const Pair& o) const { return !(*this == o); }
};

struct SolverError : std::runtime_error {
  enum Kind {
    DegenerateSupport,
    RankDefectTooLarge,
    Unbounded,
    Infeasible,
    PivotBudgetExceeded,
    AssertionViolation,
    NonTotalSupport,
    ClampedBoundary,
  };
  Kind kind;
  SolverError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

template <class T>
struct GameData {
  int n = 0, m = 0, k = 0, N = 0;
  std::vector<int> tail, head, src, snk;
  std::vector<T> a, ia, b, r;  // a[e*k + i]
  std::vector<int> red;        // (i*n + v) -> reduced index, -1 at sources
  std::vector<int> full;       // reduced index -> i*n + v
  std::vector<T> dy;           // per unit demand: -r at the source, +r at the sink
  T tol;
};

template <class T>
struct Laplacian {
  Support S;
  std::vector<T> L;       // nk x nk, row-major
  int sigma = 0;          // sign of det of the source-reduced matrix
  int rank_defect = 0;
  std::vector<T> M;       // inverse of the reduced matrix, N x N, when sigma != 0
  std::vector<T> kernel;  // nk, set by a fresh build with rank defect 1
  bool nonsingular() const { return sigma != 0; }
};

template <class T>
struct LexKey {
  T base;
  T slope;                // row slope in lambda (or xi) at the selected pair
  std::vector<T> coeff;   // epsilon coefficients, player-major pair order
  bool has_coeff = false;
  Pair pair;
};

template <class T>
struct State {
  std::shared_ptr<const Laplacian<T>> lap;
  std::vector<T> dpi, dbar;  // nk
  T lmin, lmax;
  LexKey<T> kmin, kmax;
  bool feasible = true;
  const Support& support() const { return lap->S; }
  int sigma() const { return lap->sigma; }
  const LexKey<T>& key(Side s) const { return s == Side::Min ? kmin : kmax; }
  const T& bound(Side s) const { return s == Side::Min ? lmin : lmax; }
};

template <class T>
struct RankOne {
  bool degenerate = false;
  T factor;
  std::shared_ptr<const Laplacian<T>> lap;
  std::vector<T> raw_direction;  // L* w' (nk) when degenerate
};

template <class T>
struct NullTraversal {
  T lambda;
  Support degenerate;
  std::vector<T> direction;  // normalized: first nonzero coordinate is +1
  T xi;                      // pi_exit = pi_entry + xi * direction
  Pair entry, exit;
  std::vector<T> pi_entry, pi_exit;
  std::vector<T> circulation;  // induced flow of the direction under the degenerate support
};

template <class T>
struct Step {
  enum Kind { Terminal, Pivot, Traversal } kind = Terminal;
  Side side = Side::Max;
  Pair via;
  std::optional<State<T>> next;
  std::optional<NullTraversal<T>> traversal;
  T factor;
  bool sign_relation_ok = true;
  bool entry_ok = true;
};

struct EngineStats {
  long tie_anomalies = 0;
  long lex_resolutions = 0;
  long serial_resolutions = 0;
};

template <class T>
class Engine {
 public:
  explicit Engine(const Game& g);
  Engine(const Game& g, const T& tol);

  const Game& game() const { return game_; }
  const GameData<T>& data() const { return d_; }
  const EngineStats& stats() const { return stats_; }

  std::shared_ptr<const Laplacian<T>> build(const Support& S) const;
  RankOne<T> rank_one_update(const Laplacian<T>& lap, int e, int i) const;

  State<T> make_state(std::shared_ptr<const Laplacian<T>> lap) const;
  State<T> make_state(const Support& S) const { return make_state(build(S)); }
  Support start_support() const;
  State<T> start() const;

  Side exit_side(const State<T>& X) const { return X.sigma() > 0 ? Side::Max : Side::Min; }
  Side entry_side(const State<T>& X) const { return opposite(exit_side(X)); }
  Step<T> step(const State<T>& X, Side side) const;
  Step<T> succ(const State<T>& X) const { return step(X, exit_side(X)); }
  Step<T> pred(const State<T>& X) const { return step(X, entry_side(X)); }
  Support continuative_neighbor(const State<T>& X, Side side) const;

  std::vector<T> potential(const State<T>& X, const T& lambda) const;
  std::vector<T> flow(const Support& S, const std::vector<T>& pi) const;
  // W-row (e,i) of S applied to G^T pi - b (with_b) or G^T pi.
  T row(const Support& S, int e, int i, const std::vector<T>& pi, bool with_b) const;
  // epsilon coefficients of the row value at the state's own perturbed potential line
  std::vector<T> row_perturbation(const State<T>& X, int e, int i) const;
  void fill_coeff(const State<T>& X, LexKey<T>& key) const;
  std::vector<T> solve(const Laplacian<T>& lap, const std::vector<T>& rhs_full) const;
  std::vector<T> offset_vector(const Support& S) const;  // d = G C b, nk
  int lex_compare(const std::vector<T>& a, const std::vector<T>& b) const;
  bool is_shortest_path_state(const State<T>& X) const { return is_shortest_path_support(game_, X.support()); }

 private:
  struct Cand {
    T base, slope;
    Pair pair;
  };
  template <class CoeffFn>
  LexKey<T> choose(std::vector<Cand>& cands, bool want_max, const T* clamp, const Support& S,
                   CoeffFn coeff) const;
  Pair farthest(const Support& S, const std::vector<Pair>& tied) const;
  std::vector<std::pair<int, T>> w_hat(const Support& S, int e, int i) const;
  std::vector<T> wlgc(const std::vector<std::pair<int, T>>& what, int e, const Laplacian<T>& lap) const;
  void compute_range(State<T>& X) const;
  Step<T> traverse(const State<T>& X, Side side, const LexKey<T>& key, const RankOne<T>& ro) const;
  bool close(const T& x, const T& y) const;

  Game game_;
  GameData<T> d_;
  mutable EngineStats stats_;
};

extern template class Engine<mpq_class>;
extern template class Engine<double>;
extern template class Engine<mpf_class>;

}  // namespace spliteq
