#pragma once
#include <initializer_list>
#include <random>
#include <vector>

#include "game.hpp"
#include "generators.hpp"

namespace th {

using spliteq::Q;

inline std::vector<Q> qv(std::initializer_list<Q> v) { return std::vector<Q>(v); }

inline std::vector<Q> slice(const std::vector<Q>& v, size_t from, size_t len) {
  return std::vector<Q>(v.begin() + static_cast<long>(from), v.begin() + static_cast<long>(from + len));
}

// Worked example routes, written out from the figure: direct edge and three-edge detour per player.
inline const int kDirect[8] = {7, 5, 3, 1, 0, 2, 4, 6};
inline const int kDetour[8][3] = {{0, 2, 4}, {6, 0, 2}, {4, 6, 0}, {2, 4, 6},
                                  {7, 5, 3}, {1, 7, 5}, {3, 1, 7}, {5, 3, 1}};

// Every player sends `amount` over its direct edge.
inline std::vector<Q> example_direct(const Q& amount) {
  std::vector<Q> x(64, Q(0));
  for (int i = 0; i < 8; ++i) x[i * 8 + kDirect[i]] = amount;
  return x;
}

// Every player sends `amount` along its detour.
inline std::vector<Q> example_detour(const Q& amount) {
  std::vector<Q> x(64, Q(0));
  for (int i = 0; i < 8; ++i)
    for (int e : kDetour[i]) x[i * 8 + e] = amount;
  return x;
}

inline spliteq::Game single_edge(const Q& a, const Q& b, const Q& r) {
  spliteq::Game g = spliteq::make_game(2, {{0, 1}}, {{0, 1, r}});
  g.slope(0, 0) = a;
  g.offset(0, 0) = b;
  return g;
}

inline Q random_q(std::mt19937_64& rng, long lo, long hi, long den) {
  long span = (hi - lo) * den;
  Q q(lo * den + static_cast<long>(rng() % static_cast<unsigned long>(span + 1)), den);
  q.canonicalize();
  return q;
}

}  // namespace th
