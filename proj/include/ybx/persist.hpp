#ifndef YBX_PERSIST_HPP
#define YBX_PERSIST_HPP

#include <string>
#include <vector>

#include "ybx/search.hpp"
#include "ybx/symmetry.hpp"

namespace ybx {

struct SchemaMismatch : std::runtime_error {
  explicit SchemaMismatch(const std::string& w) : std::runtime_error(w) {}
};

std::string load_file(const std::string& path);
void save_file(const std::string& path, const std::string& content);

// Graph document (schema-versioned structured text). Deterministic:
// serialize(parse(serialize(g))) == serialize(g).
std::string serialize_graph(const RmGraph& g, const AtomTable& tab);
RmGraph parse_graph(const std::string& text, AtomTable& tab);

// DOT export: the initiation vertex is green, terminated vertices red,
// finalized blue, budget-exhausted orange; merge edges are dashed.
std::string graph_to_dot(const RmGraph& g);

// A solutions-report entry (also the golden-corpus entry format).
struct SolutionEntry {
  std::string label;
  std::vector<std::string> notes;
  RfMatrix cells{4};
  std::vector<Poly> sides;
};

std::string serialize_solutions(const std::vector<SolutionEntry>& entries,
                                AtomTable& tab);
std::vector<SolutionEntry> parse_solutions(const std::string& text,
                                           AtomTable& tab);

SolutionEntry entry_from_solution(const Solution& s, const std::string& label,
                                  const AtomTable& tab);

// Clears denominators and hands the matrix to the verifier-facing form.
RMatrixSymbolic entry_matrix(const SolutionEntry& e,
                             std::vector<Poly>* sides = nullptr);

} // namespace ybx

#endif
