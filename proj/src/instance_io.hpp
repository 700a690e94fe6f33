#pragma once
#include <string>
#include <vector>

#include "game.hpp"
#include "homotopy.hpp"

namespace spliteq {

// Line-oriented instance document, version 1:
//   spliteq-instance 1
//   big <Q>            delta <Q>
//   vertex <name>
//   edge <name> <tail> <head>
//   player <name> <source> <sink> <rate>
//   cost <edge> <player> <a> <b>
//   meta <key> <value...>
// '#' starts a comment. Every (edge, player) pair needs exactly one cost line.
Game parse_instance(const std::string& text);
std::string serialize_instance(const Game& g);
Game load_instance(const std::string& path);

struct FlowDocument {
  Q lambda = 1;
  bool has_lambda = false;
  std::vector<Q> x;
};

//   spliteq-flow 1
//   lambda <Q>
//   flow <edge> <player> <value>      (absent pairs are zero)
//   potential <vertex> <player> <value>   (informational)
FlowDocument parse_flow(const Game& g, const std::string& text);
std::string serialize_flow(const Game& g, const Q& lambda, const std::vector<Q>& x,
                           const std::vector<Q>* pi = nullptr);

enum class EmitFormat { Csv, Json };
// digits < 0 renders exact fractions
std::string emit_breakpoints(const PiecewiseAffineEquilibrium& f, EmitFormat fmt, int digits = -1);

std::string read_file(const std::string& path);

}  // namespace spliteq
