#include "ybx/relations.hpp"

#include <algorithm>
#include <map>

#include "ybx/io.hpp"

namespace ybx {

bool has_derivative_atom(const Poly& p) {
  return p.contains_kind(AtomKind::EntryDeriv) ||
         p.contains_kind(AtomKind::FreeFuncDeriv) ||
         p.contains_kind(AtomKind::InitDeriv);
}

std::vector<Poly> cleanup_relations(std::vector<Poly> rels,
                                    const AtomTable& tab) {
  std::map<std::string, Poly> uniq;
  for (auto& r : rels) {
    if (r.is_zero()) continue;
    Poly p = strip_content_and_units(r);
    uniq.emplace(poly_to_string(p, tab), std::move(p));
  }
  std::vector<Poly> out;
  out.reserve(uniq.size());
  for (auto& [k, v] : uniq) out.push_back(std::move(v));
  return out;
}

std::vector<Poly> scalarize(const PolyMatrix& m, const AtomTable& tab) {
  std::vector<Poly> rels;
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j)
      if (!m.at(i, j).is_zero()) rels.push_back(m.at(i, j));
  return cleanup_relations(std::move(rels), tab);
}

namespace {

struct Embeds {
  PolyMatrix e12, e13, e23;
  explicit Embeds(const RMatrixSymbolic& r)
      : e12(embed(r, Slot::S12)),
        e13(embed(r, Slot::S13)),
        e23(embed(r, Slot::S23)) {}
};

} // namespace

RelationSet generate_relations(const SeedClass& seed, AtomTable& tab) {
  const int n = seed.tmpl.n;
  RMatrixSymbolic r_u = unknown_rmatrix(tab, n, Arg::U);
  RMatrixSymbolic rp_u = unknown_rmatrix_deriv(tab, n, Arg::U);
  RMatrixSymbolic rp_0 = init_deriv_rmatrix(tab, n);

  Embeds u(r_u), du(rp_u), z(seed.tmpl), dz(rp_0);

  // R_YBE(u,0) and R_YBE(0,u)
  PolyMatrix alg1 = u.e12 * u.e13 * z.e23 - z.e23 * u.e13 * u.e12;
  PolyMatrix alg2 = z.e12 * u.e13 * u.e23 - u.e23 * u.e13 * z.e12;

  // D[R_YBE(u,v),v] at v=0
  PolyMatrix d1 = u.e12 * du.e13 * z.e23 + u.e12 * u.e13 * dz.e23 -
                  z.e23 * du.e13 * u.e12 - dz.e23 * u.e13 * u.e12;
  // D[R_YBE(v,u),v] at v=0
  PolyMatrix d2 = z.e12 * du.e13 * u.e23 + dz.e12 * u.e13 * u.e23 -
                  u.e23 * du.e13 * z.e12 - u.e23 * u.e13 * dz.e12;
  // D[R_YBE(u,0),u]
  PolyMatrix d3 = du.e12 * u.e13 * z.e23 + u.e12 * du.e13 * z.e23 -
                  z.e23 * du.e13 * u.e12 - z.e23 * u.e13 * du.e12;
  // D[R_YBE(0,u),u]
  PolyMatrix d4 = z.e12 * du.e13 * u.e23 + z.e12 * u.e13 * du.e23 -
                  du.e23 * u.e13 * z.e12 - u.e23 * du.e13 * z.e12;

  std::vector<Poly> a_rels;
  for (auto* m : {&alg1, &alg2})
    for (int i = 0; i < m->dim(); ++i)
      for (int j = 0; j < m->dim(); ++j)
        if (!m->at(i, j).is_zero()) a_rels.push_back(m->at(i, j));

  std::vector<Poly> d_rels;
  for (auto* m : {&d1, &d2, &d3, &d4})
    for (int i = 0; i < m->dim(); ++i)
      for (int j = 0; j < m->dim(); ++j)
        if (!m->at(i, j).is_zero()) d_rels.push_back(m->at(i, j));

  RelationSet rs;
  rs.D_0 = generate_initial_relations(seed, tab);
  for (auto& d : d_rels) {
    if (has_derivative_atom(d)) rs.D_u.push_back(d);
    else a_rels.push_back(d);
  }
  rs.A_u = cleanup_relations(std::move(a_rels), tab);
  rs.D_u = cleanup_relations(std::move(rs.D_u), tab);
  return rs;
}

std::vector<Poly> generate_initial_relations(const SeedClass& seed,
                                             AtomTable& tab) {
  const int n = seed.tmpl.n;
  RMatrixSymbolic rp_0 = init_deriv_rmatrix(tab, n);
  Embeds z(seed.tmpl), dz(rp_0);
  PolyMatrix i1 = dz.e12 * z.e13 * z.e23 + z.e12 * dz.e13 * z.e23 -
                  z.e23 * dz.e13 * z.e12 - z.e23 * z.e13 * dz.e12;
  PolyMatrix i2 = z.e12 * dz.e13 * z.e23 + z.e12 * z.e13 * dz.e23 -
                  dz.e23 * z.e13 * z.e12 - z.e23 * dz.e13 * z.e12;
  std::vector<Poly> rels;
  for (auto* m : {&i1, &i2})
    for (int i = 0; i < m->dim(); ++i)
      for (int j = 0; j < m->dim(); ++j)
        if (!m->at(i, j).is_zero()) rels.push_back(m->at(i, j));
  return cleanup_relations(std::move(rels), tab);
}

bool constant_ybe_check(const RMatrixSymbolic& c) {
  return ybe_residual(c, c, c).is_zero();
}

// ---------------------------------------------------------------------------
// catalog loading
// ---------------------------------------------------------------------------

std::vector<SeedClass> load_catalog(const std::string& path, AtomTable& tab) {
  FILE* fp = fopen(path.c_str(), "rb");
  if (!fp) throw std::runtime_error("cannot open catalog: " + path);
  std::string text;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, fp)) > 0) text.append(buf, got);
  fclose(fp);

  std::vector<SeedClass> cat;
  SeedClass cur;
  bool in_class = false;
  int matrix_row = -1;
  size_t lineno = 0;
  size_t pos = 0;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string line = text.substr(pos, eol == std::string::npos ? eol : eol - pos);
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    // tokenize
    std::vector<std::string> tok;
    size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && isspace((unsigned char)line[i])) ++i;
      size_t s = i;
      while (i < line.size() && !isspace((unsigned char)line[i])) ++i;
      if (i > s) tok.push_back(line.substr(s, i - s));
    }
    if (tok.empty()) continue;
    if (matrix_row >= 0) {
      int dim = cur.tmpl.dim();
      if ((int)tok.size() != dim) fail("expected " + std::to_string(dim) + " entries");
      for (int c = 0; c < dim; ++c) {
        if (tok[c] == ".") continue;
        cur.tmpl.m.at(matrix_row, c) = parse_poly(tok[c], tab);
      }
      if (++matrix_row == dim) matrix_row = -1;
      continue;
    }
    if (tok[0] == "schema") continue;
    if (tok[0] == "class") {
      if (in_class) fail("nested class");
      if (tok.size() != 2) fail("class needs a name");
      cur = SeedClass{};
      cur.id = tok[1];
      in_class = true;
    } else if (tok[0] == "rank") {
      if (tok.size() != 2) fail("rank needs a value");
      cur.rank = (tok[1] == "3") ? SeedRank::Rank3 : SeedRank::Full;
    } else if (tok[0] == "dim") {
      int n = std::stoi(tok[1]);
      cur.tmpl = RMatrixSymbolic(n, Arg::Zero);
    } else if (tok[0] == "matrix") {
      matrix_row = 0;
    } else if (tok[0] == "side") {
      for (size_t t = 1; t < tok.size(); ++t)
        cur.side_conditions.push_back(parse_poly(tok[t], tab));
    } else if (tok[0] == "end") {
      if (!in_class) fail("end outside class");
      if (!constant_ybe_check(cur.tmpl))
        fail("class " + cur.id + " fails the constant YBE");
      cat.push_back(std::move(cur));
      in_class = false;
    } else {
      fail("unknown directive: " + tok[0]);
    }
  }
  if (in_class) throw std::runtime_error(path + ": unterminated class block");
  return cat;
}

const SeedClass* find_seed(const std::vector<SeedClass>& cat,
                           const std::string& id) {
  for (auto& c : cat)
    if (c.id == id) return &c;
  return nullptr;
}

} // namespace ybx
