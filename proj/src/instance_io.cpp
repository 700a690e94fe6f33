#include "instance_io.hpp"

#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

namespace spliteq {

namespace {

struct Token {
  std::string text;
  int col;
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  size_t p = 0;
  while (p < line.size()) {
    while (p < line.size() && (line[p] == ' ' || line[p] == '\t' || line[p] == '\r')) ++p;
    if (p >= line.size() || line[p] == '#') break;
    size_t q = p;
    while (q < line.size() && line[q] != ' ' && line[q] != '\t' && line[q] != '\r' && line[q] != '#') ++q;
    out.push_back({line.substr(p, q - p), static_cast<int>(p) + 1});
    p = q;
  }
  return out;
}

std::string rest_of_line(const std::string& line, int col) {
  std::string s = line.substr(static_cast<size_t>(col - 1));
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  return s;
}

Q rational_at(const Token& t, int line) {
  Q q;
  if (!try_parse_rational(t.text, q)) throw InputError("not a rational number: '" + t.text + "'", line, t.col);
  return q;
}

}  // namespace

Game parse_instance(const std::string& text) {
  Game g;
  std::map<std::string, int> vid, eid, pid;
  struct CostRow {
    int e, i;
    Q a, b;
    int line;
  };
  std::vector<CostRow> costs;
  std::istringstream in(text);
  std::string line;
  int ln = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++ln;
    auto tk = tokenize(line);
    if (tk.empty()) continue;
    const std::string& kw = tk[0].text;
    auto need = [&](size_t cnt) {
      if (tk.size() != cnt)
        throw InputError("'" + kw + "' expects " + std::to_string(cnt - 1) + " fields, got " +
                             std::to_string(tk.size() - 1),
                         ln, tk.size() > cnt ? tk[cnt].col : static_cast<int>(line.size()) + 1);
    };
    auto lookup = [&](std::map<std::string, int>& tab, const Token& t, const char* what) {
      auto it = tab.find(t.text);
      if (it == tab.end()) throw InputError(std::string("unknown ") + what + " '" + t.text + "'", ln, t.col);
      return it->second;
    };
    if (!header) {
      if (kw != "spliteq-instance") throw InputError("expected 'spliteq-instance <version>' header", ln, tk[0].col);
      need(2);
      if (tk[1].text != "1") throw InputError("unsupported schema version '" + tk[1].text + "'", ln, tk[1].col);
      header = true;
      continue;
    }
    if (kw == "big") {
      need(2);
      g.big = rational_at(tk[1], ln);
    } else if (kw == "delta") {
      need(2);
      g.delta = rational_at(tk[1], ln);
    } else if (kw == "vertex") {
      need(2);
      if (vid.count(tk[1].text)) throw InputError("duplicate vertex '" + tk[1].text + "'", ln, tk[1].col);
      vid[tk[1].text] = g.n++;
      g.vertex_names.push_back(tk[1].text);
    } else if (kw == "edge") {
      need(4);
      if (eid.count(tk[1].text)) throw InputError("duplicate edge '" + tk[1].text + "'", ln, tk[1].col);
      Edge e{lookup(vid, tk[2], "vertex"), lookup(vid, tk[3], "vertex")};
      if (e.tail == e.head) throw InputError("self-loop edge '" + tk[1].text + "'", ln, tk[3].col);
      eid[tk[1].text] = static_cast<int>(g.edges.size());
      g.edges.push_back(e);
      g.edge_names.push_back(tk[1].text);
    } else if (kw == "player") {
      need(5);
      if (pid.count(tk[1].text)) throw InputError("duplicate player '" + tk[1].text + "'", ln, tk[1].col);
      Commodity c{lookup(vid, tk[2], "vertex"), lookup(vid, tk[3], "vertex"), rational_at(tk[4], ln)};
      if (c.source == c.sink) throw InputError("source equals sink", ln, tk[3].col);
      if (c.rate < 0) throw InputError("negative rate", ln, tk[4].col);
      pid[tk[1].text] = static_cast<int>(g.players.size());
      g.players.push_back(c);
      g.player_names.push_back(tk[1].text);
    } else if (kw == "cost") {
      need(5);
      CostRow r{lookup(eid, tk[1], "edge"), lookup(pid, tk[2], "player"), rational_at(tk[3], ln),
                rational_at(tk[4], ln), ln};
      if (r.a <= 0) throw InputError("slope must be positive", ln, tk[3].col);
      if (r.b < 0) throw InputError("offset must be nonnegative", ln, tk[4].col);
      costs.push_back(r);
    } else if (kw == "meta") {
      if (tk.size() < 2) throw InputError("'meta' expects a key", ln, static_cast<int>(line.size()) + 1);
      g.meta[tk[1].text] = tk.size() > 2 ? rest_of_line(line, tk[2].col) : std::string();
    } else {
      throw InputError("unknown field '" + kw + "'", ln, tk[0].col);
    }
  }
  if (!header) throw InputError("empty document", 1, 1);
  const int m = g.m(), k = g.k();
  g.a.assign(static_cast<size_t>(m) * k, Q(0));
  g.b.assign(static_cast<size_t>(m) * k, Q(0));
  std::vector<int> seen(static_cast<size_t>(m) * k, 0);
  for (const CostRow& r : costs) {
    size_t p = static_cast<size_t>(r.e) * k + r.i;
    if (seen[p]) throw InputError("duplicate cost row", r.line, 1);
    seen[p] = r.line;
    g.a[p] = r.a;
    g.b[p] = r.b;
  }
  for (int e = 0; e < m; ++e)
    for (int i = 0; i < k; ++i)
      if (!seen[static_cast<size_t>(e) * k + i])
        throw InputError("missing cost row for edge '" + g.edge_names[e] + "' player '" + g.player_names[i] + "'",
                         ln + 1, 1);
  g.validate();
  return g;
}

std::string serialize_instance(const Game& g0) {
  Game g = g0;
  g.fill_default_names();
  std::ostringstream os;
  os << "spliteq-instance 1\n";
  os << "big " << to_string(g.big) << "\n";
  os << "delta " << to_string(g.delta) << "\n";
  for (int v = 0; v < g.n; ++v) os << "vertex " << g.vertex_names[v] << "\n";
  for (int e = 0; e < g.m(); ++e)
    os << "edge " << g.edge_names[e] << " " << g.vertex_names[g.edges[e].tail] << " "
       << g.vertex_names[g.edges[e].head] << "\n";
  for (int i = 0; i < g.k(); ++i)
    os << "player " << g.player_names[i] << " " << g.vertex_names[g.players[i].source] << " "
       << g.vertex_names[g.players[i].sink] << " " << to_string(g.players[i].rate) << "\n";
  for (int e = 0; e < g.m(); ++e)
    for (int i = 0; i < g.k(); ++i)
      os << "cost " << g.edge_names[e] << " " << g.player_names[i] << " " << to_string(g.slope(e, i)) << " "
         << to_string(g.offset(e, i)) << "\n";
  for (const auto& [key, val] : g.meta) os << "meta " << key << (val.empty() ? "" : " ") << val << "\n";
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

Game load_instance(const std::string& path) { return parse_instance(read_file(path)); }

FlowDocument parse_flow(const Game& g0, const std::string& text) {
  Game g = g0;
  g.fill_default_names();
  std::map<std::string, int> vid, eid, pid;
  for (int v = 0; v < g.n; ++v) vid[g.vertex_names[v]] = v;
  for (int e = 0; e < g.m(); ++e) eid[g.edge_names[e]] = e;
  for (int i = 0; i < g.k(); ++i) pid[g.player_names[i]] = i;
  FlowDocument doc;
  doc.x.assign(static_cast<size_t>(g.m()) * g.k(), Q(0));
  std::istringstream in(text);
  std::string line;
  int ln = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++ln;
    auto tk = tokenize(line);
    if (tk.empty()) continue;
    const std::string& kw = tk[0].text;
    auto lookup = [&](std::map<std::string, int>& tab, const Token& t, const char* what) {
      auto it = tab.find(t.text);
      if (it == tab.end()) throw InputError(std::string("unknown ") + what + " '" + t.text + "'", ln, t.col);
      return it->second;
    };
    if (!header) {
      if (kw != "spliteq-flow" || tk.size() != 2 || tk[1].text != "1")
        throw InputError("expected 'spliteq-flow 1' header", ln, tk[0].col);
      header = true;
      continue;
    }
    if (kw == "lambda" && tk.size() == 2) {
      doc.lambda = rational_at(tk[1], ln);
      doc.has_lambda = true;
    } else if (kw == "flow" && tk.size() == 4) {
      int e = lookup(eid, tk[1], "edge"), i = lookup(pid, tk[2], "player");
      doc.x[static_cast<size_t>(i) * g.m() + e] = rational_at(tk[3], ln);
    } else if (kw == "potential" && tk.size() == 4) {
      lookup(vid, tk[1], "vertex");
      lookup(pid, tk[2], "player");
      rational_at(tk[3], ln);
    } else {
      throw InputError("unknown or malformed field '" + kw + "'", ln, tk[0].col);
    }
  }
  if (!header) throw InputError("empty flow document", 1, 1);
  return doc;
}

std::string serialize_flow(const Game& g0, const Q& lambda, const std::vector<Q>& x, const std::vector<Q>* pi) {
  Game g = g0;
  g.fill_default_names();
  std::ostringstream os;
  os << "spliteq-flow 1\n";
  os << "lambda " << to_string(lambda) << "\n";
  for (int i = 0; i < g.k(); ++i)
    for (int e = 0; e < g.m(); ++e)
      os << "flow " << g.edge_names[e] << " " << g.player_names[i] << " " << to_string(x[i * g.m() + e]) << "\n";
  if (pi)
    for (int i = 0; i < g.k(); ++i)
      for (int v = 0; v < g.n; ++v)
        os << "potential " << g.vertex_names[v] << " " << g.player_names[i] << " " << to_string((*pi)[i * g.n + v])
           << "\n";
  return os.str();
}

std::string emit_breakpoints(const PiecewiseAffineEquilibrium& f, EmitFormat fmt, int digits) {
  const Game& g = f.game;
  auto num = [&](const Q& q) { return digits < 0 ? to_string(q) : to_decimal(q, digits); };
  auto seg_fp = [&](size_t j) {
    if (f.segments.empty()) return f.start.fingerprint();
    return f.segments[j == 0 ? 0 : j - 1].fingerprint();
  };
  if (fmt == EmitFormat::Csv) {
    std::ostringstream os;
    os << "lambda";
    for (int i = 0; i < g.k(); ++i)
      for (int e = 0; e < g.m(); ++e) os << ",x:" << g.edge_names[e] << ":" << g.player_names[i];
    for (int i = 0; i < g.k(); ++i)
      for (int v = 0; v < g.n; ++v) os << ",pi:" << g.vertex_names[v] << ":" << g.player_names[i];
    os << ",support\n";
    for (size_t j = 0; j < f.breakpoints.size(); ++j) {
      const Breakpoint& bp = f.breakpoints[j];
      os << num(bp.lambda);
      for (const Q& q : bp.x) os << "," << num(q);
      for (const Q& q : bp.pi) os << "," << num(q);
      os << "," << seg_fp(j) << "\n";
    }
    return os.str();
  }
  nlohmann::ordered_json doc;
  doc["format"] = "spliteq-breakpoints";
  doc["version"] = 1;
  doc["mode"] = f.mode == Mode::Exact ? "exact" : (f.mode == Mode::Float ? "float" : "wide");
  doc["pivots"] = f.pivots;
  doc["degenerate_traversals"] = f.degenerate_traversals;
  doc["alternates"] = f.alternates;
  doc["augmented"] = f.augmented;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (size_t j = 0; j < f.breakpoints.size(); ++j) {
    const Breakpoint& bp = f.breakpoints[j];
    nlohmann::ordered_json row;
    row["lambda"] = num(bp.lambda);
    std::vector<std::string> xs, ps;
    for (const Q& q : bp.x) xs.push_back(num(q));
    for (const Q& q : bp.pi) ps.push_back(num(q));
    row["x"] = xs;
    row["pi"] = ps;
    row["support"] = seg_fp(j);
    arr.push_back(row);
  }
  doc["breakpoints"] = arr;
  return doc.dump(1) + "\n";
}

}  // namespace spliteq
