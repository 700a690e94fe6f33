#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "game.hpp"

namespace spliteq {

Game gen_example_8player(const Q& big = Q(1000000));

struct RandomParams {
  std::string family = "general";  // general | parallel | grid
  int n = 4, m = 6, k = 2;
  int grid_w = 0, grid_h = 0;      // grid family
  Q a_lo = 1, a_hi = 2;
  Q b_lo = 0, b_hi = 4;
  Q r_lo = 1, r_hi = 2;
  int grid_bits = 2;               // dyadic denominator 2^bits
  bool player_independent = false;
};

// Throws InputError("infeasible shape ...") when m < n-1 or the shape cannot be realized.
Game gen_random(uint64_t seed, const RandomParams& p);

struct BimatrixGame {
  int n = 1;
  std::vector<std::vector<int>> U, V;
  Q beta = 1;
  Q delta = Q(1, 1000000);
};

int gadget_main_count(int n, const Q& beta);
Game gen_gadget(const BimatrixGame& bm, long edge_budget = 200000);

struct Extraction {
  std::vector<Q> y, z;
  Q regret_row, regret_col, epsilon;
  Q wrong_aux;  // max flow of a player on the other player's auxiliary edges
};

// Reads the layout from the game metadata; x is player-major over the gadget's own edges.
Extraction extract_bimatrix_strategies(const Game& g, const std::vector<Q>& x);

}  // namespace spliteq
