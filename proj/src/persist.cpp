#include "ybx/persist.hpp"

#include <cstdio>
#include <sstream>

#include "ybx/io.hpp"

namespace ybx {

std::string load_file(const std::string& path) {
  FILE* fp = fopen(path.c_str(), "rb");
  if (!fp) throw std::runtime_error("cannot open: " + path);
  std::string text;
  char buf[65536];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, fp)) > 0) text.append(buf, got);
  fclose(fp);
  return text;
}

void save_file(const std::string& path, const std::string& content) {
  FILE* fp = fopen(path.c_str(), "wb");
  if (!fp) throw std::runtime_error("cannot write: " + path);
  fwrite(content.data(), 1, content.size(), fp);
  fclose(fp);
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) {
      if (pos < text.size()) out.push_back(text.substr(pos));
      break;
    }
    out.push_back(text.substr(pos, eol - pos));
    pos = eol + 1;
  }
  return out;
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> tok;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && isspace((unsigned char)line[i])) ++i;
    size_t s = i;
    while (i < line.size() && !isspace((unsigned char)line[i])) ++i;
    if (i > s) tok.push_back(line.substr(s, i - s));
  }
  return tok;
}

const char* mode_name(Mode m) {
  return m == Mode::Invertible ? "invertible" : "rank3";
}

} // namespace

std::string serialize_graph(const RmGraph& g, const AtomTable& tab) {
  std::ostringstream os;
  os << "schema ybx-graph 1\n";
  os << "seed " << g.seed_id << "\n";
  os << "mode " << mode_name(g.mode) << "\n";
  os << "tuning n_term " << g.tuning.n_term << " n_diff " << g.tuning.n_diff
     << " n_lim " << g.tuning.n_lim << " pair_budget " << g.tuning.pair_budget
     << " degree_cap " << g.tuning.degree_cap << " branch_depth "
     << g.tuning.branch_depth_cap << " max_vertices " << g.tuning.max_vertices
     << "\n";
  os << "vertices " << g.vertices.size() << "\n";
  for (auto& v : g.vertices) {
    os << "vertex " << v.id << "\n";
    os << "flags";
    bool any = false;
    if (v.stopped) { os << " stopped"; any = true; }
    if (v.temp_stopped) { os << " temp"; any = true; }
    if (v.finalized) { os << " finalized"; any = true; }
    if (v.exhausted) { os << " exhausted"; any = true; }
    if (!any) os << " -";
    os << "\n";
    if (!v.parents.empty()) {
      os << "parents";
      for (int p : v.parents) os << " " << p;
      os << "\n";
    }
    if (v.merged_into >= 0) os << "merged " << v.merged_into << "\n";
    if (!v.note.empty()) os << "note " << v.note << "\n";
    for (auto& [k, val] : v.assignment)
      os << "assign " << tab.atom_name(k) << " := "
         << ratfunc_to_string(val, tab) << "\n";
    for (auto& c : v.side_conditions)
      os << "cond " << poly_to_string(c, tab) << "\n";
    for (auto& r : v.rels.A_u) os << "arel " << poly_to_string(r, tab) << "\n";
    for (auto& r : v.rels.D_u) os << "drel " << poly_to_string(r, tab) << "\n";
    for (auto& r : v.rels.D_0) os << "irel " << poly_to_string(r, tab) << "\n";
    os << "end\n";
  }
  return os.str();
}

RmGraph parse_graph(const std::string& text, AtomTable& tab) {
  RmGraph g;
  auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "schema ybx-graph 1")
    throw SchemaMismatch("expected 'schema ybx-graph 1'");
  Vertex cur;
  bool in_vertex = false;
  for (size_t li = 1; li < lines.size(); ++li) {
    const std::string& line = lines[li];
    auto tok = tokens_of(line);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    auto rest_after = [&](const std::string& kw) {
      size_t p = line.find(kw);
      return line.substr(p + kw.size() + 1);
    };
    if (key == "seed") g.seed_id = tok.at(1);
    else if (key == "mode")
      g.mode = tok.at(1) == "rank3" ? Mode::Rank3 : Mode::Invertible;
    else if (key == "tuning") {
      for (size_t i = 1; i + 1 < tok.size(); i += 2) {
        const std::string& k = tok[i];
        long v = std::stol(tok[i + 1]);
        if (k == "n_term") g.tuning.n_term = int(v);
        else if (k == "n_diff") g.tuning.n_diff = int(v);
        else if (k == "n_lim") g.tuning.n_lim = int(v);
        else if (k == "pair_budget") g.tuning.pair_budget = int(v);
        else if (k == "degree_cap") g.tuning.degree_cap = v;
        else if (k == "branch_depth") g.tuning.branch_depth_cap = int(v);
        else if (k == "max_vertices") g.tuning.max_vertices = int(v);
      }
    } else if (key == "vertices") {
      g.vertices.reserve(std::stoul(tok.at(1)));
    } else if (key == "vertex") {
      cur = Vertex{};
      cur.id = std::stoi(tok.at(1));
      in_vertex = true;
    } else if (key == "flags") {
      for (size_t i = 1; i < tok.size(); ++i) {
        if (tok[i] == "stopped") cur.stopped = true;
        else if (tok[i] == "temp") cur.temp_stopped = true;
        else if (tok[i] == "finalized") cur.finalized = true;
        else if (tok[i] == "exhausted") cur.exhausted = true;
      }
    } else if (key == "parents") {
      for (size_t i = 1; i < tok.size(); ++i)
        cur.parents.push_back(std::stoi(tok[i]));
    } else if (key == "merged") {
      cur.merged_into = std::stoi(tok.at(1));
    } else if (key == "note") {
      cur.note = line.substr(5);
    } else if (key == "assign") {
      size_t sep = line.find(" := ");
      if (sep == std::string::npos) throw SchemaMismatch("bad assign line");
      std::string lhs = line.substr(7, sep - 7);
      std::string rhs = line.substr(sep + 4);
      RatFunc a = parse_expr(lhs, tab);
      if (!a.is_poly() || a.num.term_count() != 1 ||
          a.num.leading().m.e.size() != 1)
        throw SchemaMismatch("assign target is not an atom: " + lhs);
      cur.assignment[a.num.leading().m.e[0].first] = parse_expr(rhs, tab);
    } else if (key == "cond") {
      cur.side_conditions.push_back(parse_poly(rest_after("cond"), tab));
    } else if (key == "arel") {
      cur.rels.A_u.push_back(parse_poly(rest_after("arel"), tab));
    } else if (key == "drel") {
      cur.rels.D_u.push_back(parse_poly(rest_after("drel"), tab));
    } else if (key == "irel") {
      cur.rels.D_0.push_back(parse_poly(rest_after("irel"), tab));
    } else if (key == "end") {
      if (!in_vertex) throw SchemaMismatch("end outside vertex");
      g.vertices.push_back(std::move(cur));
      in_vertex = false;
    } else if (key == "schema") {
      // already validated
    } else {
      throw SchemaMismatch("unknown graph directive: " + key);
    }
  }
  // rebuild child lists from parent edges
  for (auto& v : g.vertices)
    for (int p : v.parents) g.vertices.at(size_t(p)).children.push_back(v.id);
  return g;
}

std::string graph_to_dot(const RmGraph& g) {
  std::ostringstream os;
  os << "digraph rmgraph {\n  rankdir=TB;\n  node [shape=circle, style=filled];\n";
  for (auto& v : g.vertices) {
    const char* color = "lightgray";
    if (v.id == g.root) color = "green";
    else if (v.stopped) color = "red";
    else if (v.finalized) color = "lightblue";
    else if (v.exhausted) color = "orange";
    os << "  v" << v.id << " [fillcolor=" << color << ", label=\"" << v.id
       << "\"];\n";
  }
  for (auto& v : g.vertices) {
    for (int c : v.children)
      if (g.vertices[size_t(c)].merged_into < 0)
        os << "  v" << v.id << " -> v" << c << ";\n";
  }
  for (auto& v : g.vertices)
    if (v.merged_into >= 0)
      os << "  v" << v.id << " -> v" << v.merged_into << " [style=dashed];\n";
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// solutions / corpus format
// ---------------------------------------------------------------------------

std::string serialize_solutions(const std::vector<SolutionEntry>& entries,
                                AtomTable& tab) {
  std::ostringstream os;
  os << "schema ybx-solutions 1\n";
  for (auto& e : entries) {
    os << "\nsolution " << e.label << "\n";
    for (auto& n : e.notes) os << "note " << n << "\n";
    for (auto& s : e.sides) os << "side " << poly_to_string(s, tab) << "\n";
    os << "matrix\n";
    const int d = e.cells.dim();
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        std::string cell = e.cells.at(i, j).is_zero()
                               ? "."
                               : ratfunc_to_string(e.cells.at(i, j), tab);
        // entries must stay whitespace-free for the row tokenizer
        std::string packed;
        for (char ch : cell)
          if (!isspace((unsigned char)ch)) packed += ch;
        os << (j ? " " : "") << packed;
      }
      os << "\n";
    }
    os << "end\n";
  }
  return os.str();
}

std::vector<SolutionEntry> parse_solutions(const std::string& text,
                                           AtomTable& tab) {
  auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "schema ybx-solutions 1")
    throw SchemaMismatch("expected 'schema ybx-solutions 1'");
  std::vector<SolutionEntry> out;
  SolutionEntry cur;
  bool in_sol = false;
  int matrix_row = -1;
  int dim = 4;
  for (size_t li = 1; li < lines.size(); ++li) {
    const std::string& line = lines[li];
    if (!line.empty() && line[0] == '#') continue;
    auto tok = tokens_of(line);
    if (tok.empty()) continue;
    if (matrix_row >= 0) {
      if (int(tok.size()) != dim) throw SchemaMismatch("bad matrix row");
      for (int c = 0; c < dim; ++c)
        if (tok[c] != ".") cur.cells.at(matrix_row, c) = parse_expr(tok[c], tab);
      if (++matrix_row == dim) matrix_row = -1;
      continue;
    }
    const std::string& key = tok[0];
    if (key == "solution") {
      cur = SolutionEntry{};
      cur.label = tok.size() > 1 ? tok[1] : "";
      in_sol = true;
    } else if (key == "note") {
      cur.notes.push_back(line.substr(5));
    } else if (key == "side") {
      for (size_t i = 1; i < tok.size(); ++i)
        cur.sides.push_back(parse_poly(tok[i], tab));
    } else if (key == "dim") {
      dim = std::stoi(tok.at(1));
      cur.cells = RfMatrix(dim);
    } else if (key == "matrix") {
      matrix_row = 0;
    } else if (key == "end") {
      if (!in_sol) throw SchemaMismatch("end outside solution");
      out.push_back(std::move(cur));
      in_sol = false;
    } else {
      throw SchemaMismatch("unknown solutions directive: " + key);
    }
  }
  if (in_sol) throw SchemaMismatch("unterminated solution block");
  return out;
}

SolutionEntry entry_from_solution(const Solution& s, const std::string& label,
                                  const AtomTable& tab) {
  (void)tab;
  SolutionEntry e;
  e.label = label;
  e.cells = RfMatrix(s.matrix.dim());
  for (int i = 0; i < s.matrix.dim(); ++i)
    for (int j = 0; j < s.matrix.dim(); ++j)
      e.cells.at(i, j) = RatFunc(s.matrix.m.at(i, j));
  e.sides = s.side_conditions;
  return e;
}

RMatrixSymbolic entry_matrix(const SolutionEntry& e, std::vector<Poly>* sides) {
  int d = e.cells.dim();
  int n = d == 4 ? 2 : d == 9 ? 3 : 0;
  if (!n) throw std::runtime_error("entry_matrix: unsupported dimension");
  std::vector<Poly> conds = e.sides;
  RMatrixSymbolic r(n, Arg::U);
  r.m = clear_denominators(e.cells, &conds);
  bool constant = true;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (!spectral_free(r.m.at(i, j))) constant = false;
  r.arg = constant ? Arg::Zero : Arg::U;
  if (sides) *sides = std::move(conds);
  return r;
}

} // namespace ybx
