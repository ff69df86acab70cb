#ifndef YBX_SEARCH_HPP
#define YBX_SEARCH_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "ybx/closedform.hpp"
#include "ybx/groebner.hpp"
#include "ybx/linsolve.hpp"
#include "ybx/relations.hpp"

namespace ybx {

struct Tuning {
  int n_term = 4;   // max terms of a linear-method equation
  int n_diff = 8;   // max terms of a differential-method equation
  int n_lim = 24;   // max list size admitted to the Groebner method
  int pair_budget = 20000;
  int64_t degree_cap = 12;
  int branch_depth_cap = 6;
  int max_vertices = 2000;
  int jobs = 1;
};

enum class Mode { Invertible, Rank3 };
enum class Method { Linear, Product, Groebner, Differential, Exhausted };
enum class SolveStage { Init, Main };

struct Vertex {
  int id = 0;
  std::map<AtomKey, RatFunc> assignment;
  std::vector<Poly> side_conditions;
  RelationSet rels;
  bool stopped = false;
  bool temp_stopped = false;
  bool finalized = false;
  bool exhausted = false; // method cascade ran dry; eligible for resume
  std::vector<int> parents;
  std::vector<int> children;
  int merged_into = -1; // merge edge, newer -> older
  std::string note;

  bool is_leaf() const { return children.empty() && merged_into < 0; }
  bool flagged() const {
    return stopped || temp_stopped || finalized || exhausted;
  }
};

struct RmGraph {
  std::string seed_id;
  Mode mode = Mode::Invertible;
  Tuning tuning;
  std::vector<Vertex> vertices;
  int root = 0;
};

// Finalized solution: the candidate matrix with free entries promoted to
// free-function atoms, denominators cleared.
struct Solution {
  int vertex_id = 0;
  RMatrixSymbolic matrix; // entries over U-argument atoms
  std::vector<Poly> side_conditions;
};

// Childless, unflagged vertices in ascending id order.
std::vector<int> get_todo_vertices(const RmGraph& g);

struct Selection {
  Method method = Method::Exhausted;
  std::vector<size_t> eq_indices; // into the stage's relation list
};
Selection select_eqns(const Vertex& v, const Tuning& t, SolveStage stage);

// Substitution that also rewrites exp-atom rates; returns the cleared
// numerator (denominators are covered by recorded side conditions).
Poly subst_relation(const Poly& rel, const std::map<AtomKey, RatFunc>& asg,
                    AtomTable& tab);
RatFunc subst_value(const RatFunc& v, const std::map<AtomKey, RatFunc>& asg,
                    AtomTable& tab);

class SearchEngine {
 public:
  SearchEngine(const SeedClass& seed, Mode mode, const Tuning& tuning,
               AtomTable& tab);
  // Reattaches to a persisted graph (resume).
  SearchEngine(const SeedClass& seed, RmGraph graph, AtomTable& tab);

  void run_stage2();
  void run_stage3();
  void run_stage4();
  void run_all();

  const RmGraph& graph() const { return g_; }
  RmGraph& graph() { return g_; }
  const std::vector<Solution>& solutions() const { return solutions_; }
  const SeedClass& seed() const { return seed_; }

  struct Stats {
    int vertices = 0, finalized = 0, stopped = 0, exhausted = 0, merged = 0;
  };
  Stats stats() const;

 private:
  struct ChildSpec {
    std::map<AtomKey, RatFunc> delta;
    std::vector<Poly> conds;
    std::vector<Poly> new_relations;
    std::vector<size_t> consumed;   // indices into the stage list
    std::vector<size_t> consumed_d; // indices into D_u (differential method)
    bool inconsistent = false;
    bool unsupported = false; // ODE outside fragment
    std::string note;
  };

  const SeedClass& seed_;
  AtomTable& tab_;
  RmGraph g_;
  std::vector<Solution> solutions_;
  std::map<std::string, int> canon_index_; // vertex canonical key -> id

  std::vector<Poly>& stage_list(Vertex& v, SolveStage s);
  std::set<AtomKey> stage_unknowns(const Vertex& v, SolveStage s) const;
  std::vector<ChildSpec> reduce_vertex(const Vertex& v, const Selection& sel,
                                       SolveStage stage);
  void proc_solutions(int vid, const std::vector<ChildSpec>& specs,
                      SolveStage stage);
  void transform_equations_lists(Vertex& v, SolveStage stage);
  std::string canonical_key(const Vertex& v) const;
  void stage_loop(SolveStage stage);
  std::array<int64_t, 3> measure(const Vertex& v) const;
  RatFunc seed_entry(int row, int col) const;
};

} // namespace ybx

#endif
