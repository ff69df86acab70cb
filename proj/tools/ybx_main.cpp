#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "ybx/io.hpp"
#include "ybx/persist.hpp"
#include "ybx/relations.hpp"
#include "ybx/search.hpp"
#include "ybx/symmetry.hpp"
#include "ybx/verifier.hpp"

using namespace ybx;

namespace {

#ifndef YBX_DATA_DIR
#define YBX_DATA_DIR "data"
#endif

struct CommonOpts {
  std::string catalog_path = std::string(YBX_DATA_DIR) + "/seed_catalog.txt";
  std::string config_path;
};

// flat key = value configuration; CLI flags override file values
std::map<std::string, std::string> read_config(const std::string& path) {
  std::map<std::string, std::string> kv;
  if (path.empty()) return kv;
  std::string text = load_file(path);
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string line =
        text.substr(pos, eol == std::string::npos ? eol : eol - pos);
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t");
      size_t b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    if (!k.empty()) kv[k] = v;
  }
  return kv;
}

void apply_config(const std::map<std::string, std::string>& kv, Tuning& t,
                  std::string& seed, std::string& mode) {
  auto geti = [&](const char* k, int& dst) {
    auto it = kv.find(k);
    if (it != kv.end()) dst = std::stoi(it->second);
  };
  geti("n_term", t.n_term);
  geti("n_diff", t.n_diff);
  geti("n_lim", t.n_lim);
  geti("pair_budget", t.pair_budget);
  int dc = int(t.degree_cap);
  geti("degree_cap", dc);
  t.degree_cap = dc;
  geti("branch_depth", t.branch_depth_cap);
  geti("max_vertices", t.max_vertices);
  geti("jobs", t.jobs);
  if (kv.count("seed")) seed = kv.at("seed");
  if (kv.count("mode")) mode = kv.at("mode");
}

std::string human_matrix(const RfMatrix& m, AtomTable& tab) {
  // paper-style rendering, one bracketed row per line
  std::ostringstream os;
  std::vector<std::vector<std::string>> cells(m.dim());
  std::vector<size_t> width(m.dim(), 1);
  for (int i = 0; i < m.dim(); ++i) {
    cells[i].resize(m.dim());
    for (int j = 0; j < m.dim(); ++j) {
      cells[i][j] = m.at(i, j).is_zero() ? "." : ratfunc_to_string(m.at(i, j), tab);
      width[j] = std::max(width[j], cells[i][j].size());
    }
  }
  for (int i = 0; i < m.dim(); ++i) {
    os << "#   [ ";
    for (int j = 0; j < m.dim(); ++j) {
      os << cells[i][j] << std::string(width[j] - cells[i][j].size() + 2, ' ');
    }
    os << "]\n";
  }
  return os.str();
}

std::string render_report(const std::vector<SolutionEntry>& entries,
                          AtomTable& tab) {
  std::string machine = serialize_solutions(entries, tab);
  std::string out = machine;
  out += "\n# -- human-readable section --\n";
  for (auto& e : entries) {
    out += "# " + e.label + "\n";
    out += human_matrix(e.cells, tab);
    for (auto& s : e.sides) out += "#   nonzero: " + poly_to_string(s, tab) + "\n";
    out += "#\n";
  }
  return out;
}

int cmd_solve(const CommonOpts& common, const std::string& seed_id,
              const std::string& mode_s, Tuning tuning,
              const std::string& out_dir) {
  AtomTable tab;
  auto cat = load_catalog(common.catalog_path, tab);
  const SeedClass* seed = find_seed(cat, seed_id);
  if (!seed) {
    std::cerr << "error: unknown seed id '" << seed_id << "'\n";
    return 2;
  }
  Mode mode = mode_s == "rank3" ? Mode::Rank3 : Mode::Invertible;
  if (mode_s != "rank3" && mode_s != "invertible" && !mode_s.empty()) {
    std::cerr << "error: mode must be 'invertible' or 'rank3'\n";
    return 2;
  }
  if (seed->rank == SeedRank::Rank3 && mode != Mode::Rank3) {
    std::cerr << "error: seed " << seed_id << " is rank-3; use --mode rank3\n";
    return 2;
  }
  SearchEngine engine(*seed, mode, tuning, tab);
  engine.run_all();

  std::filesystem::create_directories(out_dir);
  save_file(out_dir + "/graph.txt", serialize_graph(engine.graph(), tab));
  std::vector<SolutionEntry> entries;
  int idx = 1;
  for (auto& s : engine.solutions())
    entries.push_back(entry_from_solution(
        s, seed_id + ".sol" + std::to_string(idx++), tab));
  save_file(out_dir + "/solutions.txt", render_report(entries, tab));
  auto st = engine.stats();
  std::ostringstream sum;
  sum << "seed " << seed_id << "\n"
      << "mode " << (mode == Mode::Rank3 ? "rank3" : "invertible") << "\n"
      << "vertices " << st.vertices << "\n"
      << "finalized " << st.finalized << "\n"
      << "stopped " << st.stopped << "\n"
      << "exhausted " << st.exhausted << "\n"
      << "merged " << st.merged << "\n";
  save_file(out_dir + "/summary.txt", sum.str());
  std::cout << sum.str();
  return 0;
}

int cmd_verify(const std::string& path, int jobs) {
  (void)jobs;
  AtomTable tab;
  std::vector<SolutionEntry> entries;
  try {
    entries = parse_solutions(load_file(path), tab);
  } catch (const std::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  }
  if (entries.empty()) {
    std::cout << "warning: empty solutions file\n";
    return 0;
  }
  int failed = 0;
  for (auto& e : entries) {
    try {
      RMatrixSymbolic r = entry_matrix(e);
      VerificationResult vr = r.arg == Arg::Zero ? verify_constant(r, tab)
                                                 : verify_spectral(r, tab);
      std::cout << (vr.passed ? "PASS " : "FAIL ") << e.label
                << (r.arg == Arg::Zero ? " (constant)" : " (spectral)");
      if (!vr.passed)
        std::cout << "  residual[" << vr.fail_row << "," << vr.fail_col
                  << "] = " << vr.witness;
      std::cout << "\n";
      if (!vr.passed) ++failed;
    } catch (const std::exception& ex) {
      std::cout << "FAIL " << e.label << "  error: " << ex.what() << "\n";
      ++failed;
    }
  }
  std::cout << (failed ? "FAILED " : "OK ") << entries.size() - failed << "/"
            << entries.size() << " verified\n";
  return failed ? 1 : 0;
}

int cmd_canon(const std::string& path, const std::string& out_path) {
  AtomTable tab;
  auto entries = parse_solutions(load_file(path), tab);
  std::vector<RMatrixSymbolic> mats;
  for (auto& e : entries) mats.push_back(entry_matrix(e));
  auto classes = dedup(mats, tab);
  std::ostringstream os;
  os << "classes " << classes.size() << "\n";
  for (size_t i = 0; i < classes.size(); ++i) {
    os << "class " << i + 1 << ":";
    for (size_t m : classes[i].members) os << " " << entries[m].label;
    os << "\n";
    for (auto& n : classes[i].notes) os << "  witness: " << n << "\n";
  }
  if (out_path.empty()) std::cout << os.str();
  else save_file(out_path, os.str());
  return 0;
}

int cmd_export_graph(const std::string& path, const std::string& format,
                     const std::string& out_path) {
  AtomTable tab;
  RmGraph g = parse_graph(load_file(path), tab);
  std::string out;
  if (format == "dot") out = graph_to_dot(g);
  else out = serialize_graph(g, tab);
  if (out_path.empty()) std::cout << out;
  else save_file(out_path, out);
  return 0;
}

int cmd_resume(const CommonOpts& common, const std::string& graph_path,
               Tuning tuning, bool tuning_given, const std::string& out_dir) {
  AtomTable tab;
  auto cat = load_catalog(common.catalog_path, tab);
  RmGraph g = parse_graph(load_file(graph_path), tab);
  const SeedClass* seed = find_seed(cat, g.seed_id);
  if (!seed) {
    std::cerr << "error: graph references unknown seed " << g.seed_id << "\n";
    return 2;
  }
  if (tuning_given) g.tuning = tuning;
  // re-arm budget-exhausted leaves under the (possibly broader) tuning
  for (auto& v : g.vertices)
    if (v.exhausted && v.is_leaf() && !v.stopped && !v.finalized)
      v.exhausted = false;
  SearchEngine engine(*seed, std::move(g), tab);
  engine.run_stage2();
  engine.run_stage3();
  engine.run_stage4();
  std::filesystem::create_directories(out_dir);
  save_file(out_dir + "/graph.txt", serialize_graph(engine.graph(), tab));
  std::vector<SolutionEntry> entries;
  int idx = 1;
  for (auto& s : engine.solutions())
    entries.push_back(entry_from_solution(
        s, engine.graph().seed_id + ".sol" + std::to_string(idx++), tab));
  save_file(out_dir + "/solutions.txt", render_report(entries, tab));
  auto st = engine.stats();
  std::cout << "vertices " << st.vertices << "\nfinalized " << st.finalized
            << "\nexhausted " << st.exhausted << "\n";
  return 0;
}

int cmd_catalog(const CommonOpts& common) {
  AtomTable tab;
  auto cat = load_catalog(common.catalog_path, tab);
  for (auto& c : cat) {
    std::cout << c.id << "  rank=" << (c.rank == SeedRank::Full ? "full" : "3")
              << "  side:";
    if (c.side_conditions.empty()) std::cout << " -";
    for (auto& s : c.side_conditions)
      std::cout << " " << poly_to_string(s, tab);
    std::cout << "\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact solver and verifier for spectral-parameter dependent "
               "solutions of the two-qubit Yang-Baxter equation"};
  app.require_subcommand(1);

  CommonOpts common;
  if (const char* env = std::getenv("YBX_CONFIG")) common.config_path = env;
  app.add_option("--catalog", common.catalog_path, "seed catalog data file");
  app.add_option("--config", common.config_path, "flat key=value config file");

  std::string seed_id, mode = "invertible", out_dir = "out";
  Tuning tuning;
  bool tuning_given = false;

  auto add_tuning = [&](CLI::App* cmd) {
    cmd->add_option("--n-term", tuning.n_term, "linear-method term cap")
        ->each([&](const std::string&) { tuning_given = true; });
    cmd->add_option("--n-diff", tuning.n_diff, "differential-method term cap")
        ->each([&](const std::string&) { tuning_given = true; });
    cmd->add_option("--n-lim", tuning.n_lim, "Groebner list-size cap")
        ->each([&](const std::string&) { tuning_given = true; });
    cmd->add_option("--pair-budget", tuning.pair_budget, "Groebner pair budget")
        ->each([&](const std::string&) { tuning_given = true; });
    cmd->add_option("--branch-depth", tuning.branch_depth_cap,
                    "pivot case-split depth cap")
        ->each([&](const std::string&) { tuning_given = true; });
    cmd->add_option("--max-vertices", tuning.max_vertices, "graph size cap")
        ->each([&](const std::string&) { tuning_given = true; });
    cmd->add_option("--jobs", tuning.jobs, "parallel vertex workers");
  };

  // config file pre-pass: its values act as defaults, flags override
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") common.config_path = argv[i + 1];
  try {
    apply_config(read_config(common.config_path), tuning, seed_id, mode);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  auto* solve = app.add_subcommand("solve", "run the four-stage search");
  solve->add_option("--seed", seed_id, "seed class id");
  solve->add_option("--mode", mode, "invertible | rank3");
  solve->add_option("--out", out_dir, "output directory");
  add_tuning(solve);

  std::string verify_path;
  auto* verify = app.add_subcommand("verify", "verify a solutions file");
  verify->add_option("file", verify_path, "solutions file")->required();

  std::string canon_path, canon_out;
  auto* canon = app.add_subcommand("canon", "deduplicate a solutions file");
  canon->add_option("file", canon_path, "solutions file")->required();
  canon->add_option("--out", canon_out, "output path (default stdout)");

  std::string graph_path, graph_format = "structured", graph_out;
  auto* expg = app.add_subcommand("export-graph", "export a graph document");
  expg->add_option("file", graph_path, "graph file")->required();
  expg->add_option("--format", graph_format, "structured | dot");
  expg->add_option("--out", graph_out, "output path (default stdout)");

  std::string resume_path;
  auto* resume = app.add_subcommand("resume", "continue exhausted branches");
  resume->add_option("file", resume_path, "graph file")->required();
  resume->add_option("--out", out_dir, "output directory");
  add_tuning(resume);

  app.add_subcommand("catalog", "list seed classes");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("solve")) {
      if (seed_id.empty()) {
        std::cerr << "error: --seed is required (flag or config file)\n";
        return 2;
      }
      return cmd_solve(common, seed_id, mode, tuning, out_dir);
    }
    if (app.got_subcommand("verify")) return cmd_verify(verify_path, tuning.jobs);
    if (app.got_subcommand("canon")) return cmd_canon(canon_path, canon_out);
    if (app.got_subcommand("export-graph"))
      return cmd_export_graph(graph_path, graph_format, graph_out);
    if (app.got_subcommand("resume"))
      return cmd_resume(common, resume_path, tuning, tuning_given, out_dir);
    if (app.got_subcommand("catalog")) return cmd_catalog(common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
