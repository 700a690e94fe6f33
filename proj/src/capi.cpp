#include <spliteq/spliteq.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "engine.hpp"
#include "generators.hpp"
#include "homotopy.hpp"
#include "instance_io.hpp"
#include "oracle.hpp"

struct spliteq_game {
  spliteq::Game g;
};

struct spliteq_solution {
  spliteq::PiecewiseAffineEquilibrium f;
};

namespace {

using namespace spliteq;

thread_local std::string g_last_error;

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class F>
spliteq_status guard(F&& fn) {
  g_last_error.clear();
  try {
    return fn();
  } catch (const InputError& e) {
    g_last_error = e.what();
    return SPLITEQ_INPUT_ERROR;
  } catch (const SolverError& e) {
    g_last_error = e.what();
    return e.kind == SolverError::PivotBudgetExceeded ? SPLITEQ_BUDGET_ERROR : SPLITEQ_INTERNAL_ERROR;
  } catch (const OracleError& e) {
    g_last_error = e.what();
    if (e.kind == OracleError::UnsupportedCosts) return SPLITEQ_INPUT_ERROR;
    return SPLITEQ_BUDGET_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SPLITEQ_INTERNAL_ERROR;
  }
}

Mode to_mode(spliteq_mode m) {
  switch (m) {
    case SPLITEQ_MODE_FLOAT:
      return Mode::Float;
    case SPLITEQ_MODE_WIDE:
      return Mode::Wide;
    default:
      return Mode::Exact;
  }
}

Q arg_q(const char* s, const char* what) {
  if (!s) throw InputError(std::string("missing ") + what);
  Q q;
  if (!try_parse_rational(s, q)) throw InputError(std::string("bad ") + what + " '" + s + "'");
  return q;
}

std::string render(const std::vector<Q>& v) {
  std::ostringstream os;
  for (size_t p = 0; p < v.size(); ++p) os << (p ? " " : "") << to_string(v[p]);
  return os.str();
}

}  // namespace

extern "C" {

const char* spliteq_last_error(void) { return g_last_error.c_str(); }

void spliteq_string_free(char* s) { std::free(s); }

spliteq_status spliteq_game_parse(const char* text, spliteq_game** out) {
  return guard([&] {
    if (!text || !out) throw InputError("null argument");
    *out = new spliteq_game{parse_instance(text)};
    return SPLITEQ_OK;
  });
}

spliteq_status spliteq_game_load(const char* path, spliteq_game** out) {
  return guard([&] {
    if (!path || !out) throw InputError("null argument");
    *out = new spliteq_game{load_instance(path)};
    return SPLITEQ_OK;
  });
}

spliteq_status spliteq_game_serialize(const spliteq_game* g, char** out) {
  return guard([&] {
    if (!g || !out) throw InputError("null argument");
    *out = dup(serialize_instance(g->g));
    return SPLITEQ_OK;
  });
}

void spliteq_game_free(spliteq_game* g) { delete g; }
int spliteq_game_vertices(const spliteq_game* g) { return g ? g->g.n : 0; }
int spliteq_game_edges(const spliteq_game* g) { return g ? g->g.m() : 0; }
int spliteq_game_players(const spliteq_game* g) { return g ? g->g.k() : 0; }

spliteq_status spliteq_gen_example8(spliteq_game** out) {
  return guard([&] {
    if (!out) throw InputError("null argument");
    *out = new spliteq_game{gen_example_8player()};
    return SPLITEQ_OK;
  });
}

spliteq_status spliteq_gen_random(uint64_t seed, const char* family, int n, int m, int k, int player_independent,
                                  spliteq_game** out) {
  return guard([&] {
    if (!out) throw InputError("null argument");
    RandomParams p;
    p.family = family ? family : "general";
    p.n = n;
    p.m = m;
    p.k = k;
    if (p.family == "grid") {
      p.grid_w = n;
      p.grid_h = m;
    }
    p.player_independent = player_independent != 0;
    *out = new spliteq_game{gen_random(seed, p)};
    return SPLITEQ_OK;
  });
}

spliteq_status spliteq_gen_gadget(int n, const int* U, const int* V, const char* beta, const char* delta,
                                  spliteq_game** out) {
  return guard([&] {
    if (!out || !U || !V || n < 1) throw InputError("bad gadget arguments");
    BimatrixGame bm;
    bm.n = n;
    bm.U.assign(n, std::vector<int>(n));
    bm.V.assign(n, std::vector<int>(n));
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        bm.U[r][c] = U[r * n + c];
        bm.V[r][c] = V[r * n + c];
      }
    bm.beta = beta ? arg_q(beta, "beta") : Q(1);
    bm.delta = delta ? arg_q(delta, "delta") : Q(1, 1000000);
    *out = new spliteq_game{gen_gadget(bm)};
    return SPLITEQ_OK;
  });
}

spliteq_status spliteq_trace(const spliteq_game* g, spliteq_mode mode, long max_pivots, spliteq_solution** out) {
  return guard([&] {
    if (!g || !out) throw InputError("null argument");
    TraceOptions o;
    o.mode = to_mode(mode);
    o.max_pivots = max_pivots > 0 ? max_pivots : 0;
    *out = new spliteq_solution{trace(g->g, o)};
    return SPLITEQ_OK;
  });
}

void spliteq_solution_free(spliteq_solution* s) { delete s; }
int spliteq_solution_breakpoints(const spliteq_solution* s) { return s ? static_cast<int>(s->f.breakpoints.size()) : 0; }
long spliteq_solution_pivots(const spliteq_solution* s) { return s ? s->f.pivots : 0; }

spliteq_status spliteq_solution_emit(const spliteq_solution* s, int json, int digits, char** out) {
  return guard([&] {
    if (!s || !out) throw InputError("null argument");
    *out = dup(emit_breakpoints(s->f, json ? EmitFormat::Json : EmitFormat::Csv, digits));
    return SPLITEQ_OK;
  });
}

spliteq_status spliteq_solve_at(const spliteq_game* g, const char* lambda, spliteq_mode mode, long max_pivots,
                                char** flow_doc) {
  return guard([&] {
    if (!g || !flow_doc) throw InputError("null argument");
    Q lam = lambda ? arg_q(lambda, "lambda") : Q(1);
    TraceOptions o;
    o.mode = to_mode(mode);
    o.max_pivots = max_pivots > 0 ? max_pivots : 0;
    std::vector<Q> x = solve_at(g->g, lam, o);
    *flow_doc = dup(serialize_flow(g->g, lam, x));
    return SPLITEQ_OK;
  });
}

spliteq_status spliteq_verify(const spliteq_game* g, const char* flow_doc, const char* lambda, const char* tolerance,
                              char** report) {
  return guard([&] {
    if (!g || !flow_doc || !report) throw InputError("null argument");
    FlowDocument d = parse_flow(g->g, flow_doc);
    Q lam = lambda ? arg_q(lambda, "lambda") : d.lambda;
    Q tol = tolerance ? arg_q(tolerance, "tolerance") : Q(0);
    if (tol < 0) throw InputError("tolerance must be nonnegative");
    VerificationReport r = verify_equilibrium(g->g, d.x, lam, tol);
    Game named = g->g;
    named.fill_default_names();
    *report = dup(r.summary(named));
    return r.pass ? SPLITEQ_OK : SPLITEQ_VERIFY_FAILED;
  });
}

spliteq_status spliteq_oracle(const spliteq_game* g, const char* lambda, const char* method, char** flow_doc) {
  return guard([&] {
    if (!g || !flow_doc) throw InputError("null argument");
    Q lam = lambda ? arg_q(lambda, "lambda") : Q(1);
    OracleConfig cfg;
    std::string m = method ? method : "best-response";
    if (m == "best-response")
      cfg.method = OracleConfig::BestResponse;
    else if (m == "potential-min")
      cfg.method = OracleConfig::PotentialMin;
    else if (m == "exhaustive-support")
      cfg.method = OracleConfig::ExhaustiveSupport;
    else
      throw InputError("unknown oracle method '" + m + "'");
    std::vector<Q> x = oracle_equilibrium(g->g, lam, cfg);
    *flow_doc = dup(serialize_flow(g->g, lam, x));
    return SPLITEQ_OK;
  });
}

spliteq_status spliteq_compare(const spliteq_game* g, spliteq_mode mode, char** report) {
  return guard([&] {
    if (!g || !report) throw InputError("null argument");
    const Game& G = g->g;
    TraceOptions o;
    o.mode = to_mode(mode);
    std::vector<Q> xh = solve_at(G, Q(1), o);
    Q vtol = o.mode == Mode::Exact ? Q(0) : Q(1, 1000000000);
    VerificationReport vr = verify_equilibrium(G, xh, Q(1), vtol);
    OracleConfig cfg;
    std::string method = "best-response";
    if (G.player_independent()) {
      cfg.method = OracleConfig::PotentialMin;
      method = "potential-min";
    }
    std::vector<Q> xo = oracle_equilibrium(G, Q(1), cfg);
    double dev = 0;
    for (size_t p = 0; p < xh.size(); ++p) dev = std::max(dev, std::fabs(xh[p].get_d() - xo[p].get_d()));
    const bool match = vr.pass && dev <= 1e-8;
    std::ostringstream os;
    os << "homotopy verify: " << (vr.pass ? "pass" : "fail") << "\n";
    os << "oracle: " << method << "\n";
    os << "max flow deviation: " << dev << "\n";
    os << "result: " << (match ? "match" : "mismatch") << "\n";
    *report = dup(os.str());
    return match ? SPLITEQ_OK : SPLITEQ_VERIFY_FAILED;
  });
}

spliteq_status spliteq_extract(const spliteq_game* g, const char* flow_doc, char** report) {
  return guard([&] {
    if (!g || !flow_doc || !report) throw InputError("null argument");
    FlowDocument d = parse_flow(g->g, flow_doc);
    Extraction ex = extract_bimatrix_strategies(g->g, d.x);
    std::ostringstream os;
    os << "y: " << render(ex.y) << "\n";
    os << "z: " << render(ex.z) << "\n";
    os << "regret_row: " << to_string(ex.regret_row) << "\n";
    os << "regret_col: " << to_string(ex.regret_col) << "\n";
    os << "epsilon: " << to_string(ex.epsilon) << " (~" << to_decimal(ex.epsilon, 9) << ")\n";
    os << "wrong_aux: " << to_string(ex.wrong_aux) << "\n";
    *report = dup(os.str());
    return SPLITEQ_OK;
  });
}

}  // extern "C"
