// Command-line front end over the C API.
#include <spliteq/spliteq.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

int fail(spliteq_status st) {
  std::cerr << "error: " << spliteq_last_error() << "\n";
  return static_cast<int>(st == SPLITEQ_INTERNAL_ERROR ? SPLITEQ_BUDGET_ERROR : st);
}

bool parse_mode(const std::string& s, spliteq_mode& m) {
  if (s == "exact") m = SPLITEQ_MODE_EXACT;
  else if (s == "float") m = SPLITEQ_MODE_FLOAT;
  else if (s == "wide") m = SPLITEQ_MODE_WIDE;
  else return false;
  return true;
}

// --mode wins; otherwise SPLITEQ_MODE; otherwise exact.
bool resolve_mode(const std::string& flag, spliteq_mode& m) {
  m = SPLITEQ_MODE_EXACT;
  if (!flag.empty()) return parse_mode(flag, m);
  const char* env = std::getenv("SPLITEQ_MODE");
  if (env && *env) return parse_mode(env, m);
  return true;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return {};
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

int emit(char* s, const std::string& out_path) {
  int rc = 0;
  if (out_path.empty()) {
    std::cout << s;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot write '" << out_path << "'\n";
      rc = SPLITEQ_INPUT_ERROR;
    } else {
      f << s;
    }
  }
  spliteq_string_free(s);
  return rc;
}

bool parse_matrix(const std::string& text, int n, std::vector<int>& out) {
  out.clear();
  std::string cell;
  for (char ch : text + ";") {
    if (ch == ',' || ch == ';') {
      if (cell != "0" && cell != "1") return false;
      out.push_back(cell == "1");
      cell.clear();
    } else if (ch != ' ') {
      cell += ch;
    }
  }
  return static_cast<int>(out.size()) == n * n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"atomic splittable congestion game equilibria"};
  app.require_subcommand(1);
  int rc = 0;

  // options are bound per subcommand; default_val writes eagerly
  std::string file, flow_file, lambda, solve_lambda, oracle_lambda, mode_flag, out_path, out_fmt = "csv", tolerance = "0", method;
  int digits = -1;
  long max_pivots = 0;

  auto load = [&](spliteq_game** g) {
    spliteq_status st = spliteq_game_load(file.c_str(), g);
    if (st != SPLITEQ_OK) rc = fail(st);
    return st == SPLITEQ_OK;
  };
  auto mode_or_fail = [&](spliteq_mode& m) {
    if (resolve_mode(mode_flag, m)) return true;
    std::cerr << "error: unknown mode (exact, float, wide)\n";
    rc = SPLITEQ_INPUT_ERROR;
    return false;
  };

  auto* solve = app.add_subcommand("solve", "equilibrium flow at one lambda");
  solve->add_option("file", file)->required();
  solve->add_option("--lambda", solve_lambda, "rational in [0,1]")->default_val("1");
  solve->add_option("--mode", mode_flag, "exact|float|wide");
  solve->add_option("--out", out_path);
  solve->add_option("--max-pivots", max_pivots, "pivot budget; 0 picks the default");
  solve->callback([&] {
    spliteq_game* g = nullptr;
    spliteq_mode m;
    if (!mode_or_fail(m) || !load(&g)) return;
    char* doc = nullptr;
    spliteq_status st = spliteq_solve_at(g, solve_lambda.c_str(), m, max_pivots, &doc);
    rc = st == SPLITEQ_OK ? emit(doc, out_path) : fail(st);
    spliteq_game_free(g);
  });

  auto* tr = app.add_subcommand("trace", "all breakpoints on [0,1]");
  tr->add_option("file", file)->required();
  tr->add_option("--out", out_fmt, "csv|json")->default_val("csv");
  tr->add_option("--mode", mode_flag, "exact|float|wide");
  tr->add_option("--digits", digits, "fixed decimals; fractions when negative");
  tr->add_option("-o,--output", out_path);
  tr->add_option("--max-pivots", max_pivots, "pivot budget; 0 picks the default");
  tr->callback([&] {
    if (out_fmt != "csv" && out_fmt != "json") {
      std::cerr << "error: --out takes csv or json\n";
      rc = SPLITEQ_INPUT_ERROR;
      return;
    }
    spliteq_game* g = nullptr;
    spliteq_mode m;
    if (!mode_or_fail(m) || !load(&g)) return;
    spliteq_solution* s = nullptr;
    spliteq_status st = spliteq_trace(g, m, max_pivots, &s);
    if (st == SPLITEQ_OK) {
      char* text = nullptr;
      st = spliteq_solution_emit(s, out_fmt == "json", digits, &text);
      rc = st == SPLITEQ_OK ? emit(text, out_path) : fail(st);
      spliteq_solution_free(s);
    } else {
      rc = fail(st);
    }
    spliteq_game_free(g);
  });

  auto* ver = app.add_subcommand("verify", "check a flow document");
  ver->add_option("file", file)->required();
  ver->add_option("flow", flow_file)->required();
  ver->add_option("--lambda", lambda);
  ver->add_option("--tolerance", tolerance)->default_val("0");
  ver->callback([&] {
    spliteq_game* g = nullptr;
    if (!load(&g)) return;
    std::string doc = slurp(flow_file);
    if (doc.empty()) {
      std::cerr << "error: cannot read '" << flow_file << "'\n";
      rc = SPLITEQ_INPUT_ERROR;
      spliteq_game_free(g);
      return;
    }
    char* report = nullptr;
    spliteq_status st =
        spliteq_verify(g, doc.c_str(), lambda.empty() ? nullptr : lambda.c_str(), tolerance.c_str(), &report);
    if (st == SPLITEQ_OK || st == SPLITEQ_VERIFY_FAILED) {
      std::cout << report;
      spliteq_string_free(report);
      rc = st;
    } else {
      rc = fail(st);
    }
    spliteq_game_free(g);
  });

  auto* gen = app.add_subcommand("gen", "instance generators");
  gen->require_subcommand(1);
  uint64_t seed = 1;
  std::string family = "general";
  int n = 4, m = 6, k = 2, gn = 2, width = 3, height = 3;
  bool pind = false;
  std::string U = "1,0;0,1", V = "0,1;1,0", beta = "1", delta = "1/1000000";
  auto* gr = gen->add_subcommand("random", "seeded random game");
  gr->add_option("--seed", seed);
  gr->add_option("--family", family, "general|parallel|grid");
  gr->add_option("--n", n);
  gr->add_option("--m", m);
  gr->add_option("--k", k);
  gr->add_option("--width", width, "grid family");
  gr->add_option("--height", height, "grid family");
  gr->add_flag("--player-independent", pind);
  gr->add_option("-o,--output", out_path);
  gr->callback([&] {
    spliteq_game* g = nullptr;
    int a = family == "grid" ? width : n, b = family == "grid" ? height : m;
    spliteq_status st = spliteq_gen_random(seed, family.c_str(), a, b, k, pind ? 1 : 0, &g);
    if (st != SPLITEQ_OK) {
      rc = fail(st);
      return;
    }
    char* text = nullptr;
    spliteq_game_serialize(g, &text);
    rc = emit(text, out_path);
    spliteq_game_free(g);
  });
  auto* gg = gen->add_subcommand("gadget", "bimatrix reduction instance");
  gg->add_option("--n", gn);
  gg->add_option("--U", U, "rows separated by ';'");
  gg->add_option("--V", V, "rows separated by ';'");
  gg->add_option("--beta", beta);
  gg->add_option("--delta", delta);
  gg->add_option("-o,--output", out_path);
  gg->callback([&] {
    std::vector<int> u, v;
    if (!parse_matrix(U, gn, u) || !parse_matrix(V, gn, v)) {
      std::cerr << "error: --U/--V must be n x n 0/1 matrices\n";
      rc = SPLITEQ_INPUT_ERROR;
      return;
    }
    spliteq_game* g = nullptr;
    spliteq_status st = spliteq_gen_gadget(gn, u.data(), v.data(), beta.c_str(), delta.c_str(), &g);
    if (st != SPLITEQ_OK) {
      rc = fail(st);
      return;
    }
    char* text = nullptr;
    spliteq_game_serialize(g, &text);
    rc = emit(text, out_path);
    spliteq_game_free(g);
  });
  auto* ge = gen->add_subcommand("example8", "the eight-player worked example");
  ge->add_option("-o,--output", out_path);
  ge->callback([&] {
    spliteq_game* g = nullptr;
    spliteq_gen_example8(&g);
    char* text = nullptr;
    spliteq_game_serialize(g, &text);
    rc = emit(text, out_path);
    spliteq_game_free(g);
  });

  auto* orc = app.add_subcommand("oracle", "independent equilibrium computation");
  orc->add_option("file", file)->required();
  orc->add_option("--lambda", oracle_lambda)->default_val("1");
  orc->add_option("--mode", method, "best-response|potential-min|exhaustive-support")->default_val("best-response");
  orc->add_option("--out", out_path);
  orc->callback([&] {
    spliteq_game* g = nullptr;
    if (!load(&g)) return;
    char* doc = nullptr;
    spliteq_status st = spliteq_oracle(g, oracle_lambda.c_str(), method.c_str(), &doc);
    rc = st == SPLITEQ_OK ? emit(doc, out_path) : fail(st);
    spliteq_game_free(g);
  });

  auto* cmp = app.add_subcommand("compare", "homotopy against oracle at lambda = 1");
  cmp->add_option("file", file)->required();
  cmp->add_option("--mode", mode_flag, "exact|float|wide");
  cmp->callback([&] {
    spliteq_game* g = nullptr;
    spliteq_mode md;
    if (!mode_or_fail(md) || !load(&g)) return;
    char* report = nullptr;
    spliteq_status st = spliteq_compare(g, md, &report);
    if (st == SPLITEQ_OK || st == SPLITEQ_VERIFY_FAILED) {
      std::cout << report;
      spliteq_string_free(report);
      rc = st;
    } else {
      rc = fail(st);
    }
    spliteq_game_free(g);
  });

  auto* ext = app.add_subcommand("extract", "bimatrix strategies from a gadget flow");
  ext->add_option("file", file)->required();
  ext->add_option("flow", flow_file)->required();
  ext->callback([&] {
    spliteq_game* g = nullptr;
    if (!load(&g)) return;
    std::string doc = slurp(flow_file);
    char* report = nullptr;
    spliteq_status st = spliteq_extract(g, doc.c_str(), &report);
    if (st == SPLITEQ_OK) {
      std::cout << report;
      spliteq_string_free(report);
    } else {
      rc = fail(st);
    }
    spliteq_game_free(g);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : SPLITEQ_INPUT_ERROR;
  }
  return rc;
}
