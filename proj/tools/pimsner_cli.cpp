#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pimsner/bimodule.hpp"
#include "pimsner/builtin.hpp"
#include "pimsner/errors.hpp"
#include "pimsner/graph.hpp"
#include "pimsner/io.hpp"
#include "pimsner/kktheory.hpp"
#include "pimsner/xi.hpp"

using namespace pimsner;

namespace {

constexpr int kInvalidInput = 1;
constexpr int kNotConverged = 2;
constexpr int kCheckFailed = 3;

struct RunConfig {
  std::size_t truncation = w_default_truncation;
  std::size_t rmax = 2;
  double tol = 1e-9;
  std::size_t cutoff = 60;
  std::string mode = "exact";
  std::string limit = "auto";
  std::optional<std::size_t> path_cap;
  std::string out;
};

// "builtin:NAME" picks a built-in graph, anything else is a file path.
DirectedGraph load_graph_arg(const std::string& arg) {
  const std::string prefix = "builtin:";
  if (arg.rfind(prefix, 0) == 0) {
    const std::string name = arg.substr(prefix.size());
    for (auto& ng : builtin_graphs())
      if (ng.name == name) return ng.graph;
    throw ValidationError("unknown builtin graph '" + name + "'");
  }
  return load_graph_file(arg);
}

void emit(const RunConfig& cfg, const Json& report) {
  const std::string text = report.dump(2) + "\n";
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw ValidationError("cannot write '" + cfg.out + "'");
  f << text;
}

bool all_checks_pass(const Json& report) {
  if (!report.contains("checks")) return true;
  for (const auto& c : report["checks"])
    if (!c["pass"].get<bool>()) return false;
  return true;
}

Json check(const std::string& name, bool pass, Json lhs, Json rhs) {
  return {{"name", name}, {"pass", pass}, {"lhs", std::move(lhs)}, {"rhs", std::move(rhs)}};
}

int run_ktheory(const RunConfig& cfg, const std::string& graph) {
  DirectedGraph g = load_graph_arg(graph);
  require_nonsingular(g);
  Json report = exact_sequence_to_json(g, exact_sequence_report(g));
  emit(cfg, report);
  return all_checks_pass(report) ? 0 : kCheckFailed;
}

int run_snf(const RunConfig& cfg, const std::string& file) {
  IntegerMatrix m = integer_matrix_from_json(parse_json(read_text_file(file)));
  Json report = smith_to_json(m, smith_normal_form(m));
  emit(cfg, report);
  return all_checks_pass(report) ? 0 : kCheckFailed;
}

int run_assumptions(const RunConfig& cfg, const std::string& graph, std::size_t kmax, std::size_t cap) {
  DirectedGraph g = load_graph_arg(graph);
  AssumptionReport r = verify_assumptions(g, kmax, parse_limit_mode(cfg.limit), cfg.cutoff, cfg.tol, cap);
  emit(cfg, assumptions_to_json(g, r));
  return 0;
}

int run_index(const RunConfig& cfg, const std::string& graph, const std::string& file, std::size_t cap) {
  DirectedGraph g = load_graph_arg(graph);
  auto suite = isometry_suite_from_json(g, parse_json(read_text_file(file)));
  Json report;
  report["truncation"] = cfg.truncation;
  report["mode"] = cfg.mode;
  report["isometries"] = Json::array();
  for (const auto& v : suite) {
    IndexComputation c = index_pairing(g, v, cfg.truncation, parse_rank_mode(cfg.mode), 0, cap);
    Json item = index_to_json(g, c);
    item["name"] = v.name();
    item["ev_star"] = k_class_to_json(g, ev_star(v));
    report["isometries"].push_back(std::move(item));
  }
  emit(cfg, report);
  return 0;
}

int run_diagram(const RunConfig& cfg, const std::string& graph, const std::string& suite_arg, std::size_t cap) {
  DirectedGraph g = load_graph_arg(graph);
  require_nonsingular(g);
  std::vector<PartialIsometryClass> suite =
      suite_arg == "builtin" ? builtin_isometries(g) : isometry_suite_from_json(g, parse_json(read_text_file(suite_arg)));
  std::vector<DiagramReport> reports;
  for (const auto& v : suite) reports.push_back(diagram_check(g, v, cfg.truncation, parse_rank_mode(cfg.mode), cap));
  Json report = diagram_to_json(g, reports);
  emit(cfg, report);
  return report["all_pass"].get<bool>() ? 0 : kCheckFailed;
}

int run_wclass(const RunConfig& cfg, const std::string& graph, std::size_t cap) {
  DirectedGraph g = load_graph_arg(graph);
  PartialIsometryClass w = w_class(g);
  IndexComputation c = index_pairing(g, w, cfg.truncation, parse_rank_mode(cfg.mode), 0, cap);
  const std::size_t n = g.vertex_count();
  IntegerVector ones(n, 1), minus_ones(n, -1), in_degree(n);
  for (VertexIndex v = 0; v < n; ++v) in_degree[v] = static_cast<long>(g.in_edges(v).size());
  const KClass ev = ev_star(w);
  Json report;
  report["matrix"] = matrix_over_algebra_to_json(g, w.matrix());
  report["index"] = index_to_json(g, c);
  report["ev_star"] = k_class_to_json(g, ev);
  report["checks"] = Json::array(
      {check("pairing_w = -[A]", c.pairing == minus_ones, integer_vector_to_json(c.pairing),
             integer_vector_to_json(minus_ones)),
       check("ev_star(w) + in-degree = [A]", ev + in_degree == ones, integer_vector_to_json(ev + in_degree),
             integer_vector_to_json(ones))});
  emit(cfg, report);
  return all_checks_pass(report) ? 0 : kCheckFailed;
}

int run_smeb(const RunConfig& cfg, const std::string& graph) {
  DirectedGraph g = load_graph_arg(graph);
  SmebReport r = smeb_report(g);
  Json report = smeb_to_json(r);
  // On a permutation matrix the two bimodule identities must agree.
  report["checks"] = Json::array(
      {check("permutation implies compatibility", !r.permutation || r.compatibility, r.permutation, r.compatibility)});
  emit(cfg, report);
  return all_checks_pass(report) ? 0 : kCheckFailed;
}

int run_xi(const RunConfig& cfg, const std::string& graph, const std::string& suite_arg, long window) {
  DirectedGraph g = load_graph_arg(graph);
  require_nonsingular(g);
  std::vector<PartialIsometryClass> suite =
      suite_arg == "builtin" ? builtin_isometries(g) : isometry_suite_from_json(g, parse_json(read_text_file(suite_arg)));
  Expectation phi(g, parse_limit_mode(cfg.limit), cfg.cutoff, cfg.tol);
  XiTruncation xi(phi, window, static_cast<long>(cfg.rmax));
  const auto dim = static_cast<Eigen::Index>(xi.dimension());
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(dim, dim);
  std::size_t higher = 0;
  for (Eigen::Index j = 0; j < dim; ++j) {
    const auto& c = xi.coordinates()[static_cast<std::size_t>(j)];
    if (xi.in_Q(static_cast<std::size_t>(j))) q(j, j) = 1;
    if (c.layer > std::max(c.degree, 0L)) ++higher;
  }
  const double q_error = dim ? (xi.fock_embedding_projection() - q).cwiseAbs().maxCoeff() : 0.0;
  constexpr double kTol = 1e-8;
  Json report;
  report["degree_window"] = window;
  report["rank_window"] = cfg.rmax;
  report["dimension"] = xi.dimension();
  report["higher_layer_dimension"] = higher;
  report["smeb"] = is_smeb(g);
  report["q_vs_fock_embedding"] = q_error;
  report["isometries"] = Json::array();
  Json checks = Json::array({check("Q = Fock embedding projection", q_error <= kTol, q_error, kTol)});
  for (const auto& v : suite) {
    HomogeneousDecomposition h = homogeneous_decompose(v, xi);
    Json comps = Json::array();
    for (const auto& [b, m] : h.components) comps.push_back(Json::array({b.m, b.s}));
    report["isometries"].push_back({{"name", v.name()},
                                    {"clean_columns", h.clean_columns},
                                    {"total_columns", h.total_columns},
                                    {"components", std::move(comps)},
                                    {"finite_certified", h.finite_certified},
                                    {"reconstruction_error", h.reconstruction_error},
                                    {"orthogonality_violation", h.chop_vee_violation},
                                    {"modular_violation", h.vee_modular_violation},
                                    {"modular_columns", h.modular_columns},
                                    {"homog", h.homog}});
    checks.push_back(check("components of " + v.name() + " orthogonal", h.chop_vee_violation <= kTol,
                           h.chop_vee_violation, kTol));
    checks.push_back(check("modular commutators of " + v.name(), h.vee_modular_violation <= kTol,
                           h.vee_modular_violation, kTol));
    checks.push_back(check("finitely many components of " + v.name(), h.finite_certified, h.finite_certified, true));
  }
  report["checks"] = std::move(checks);
  emit(cfg, report);
  return all_checks_pass(report) ? 0 : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact K-theory, Fock module and index computations for graph Cuntz-Pimsner algebras"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::size_t cap_flag = 0;
  app.add_option("--trunc", cfg.truncation, "Fock truncation level K")->check(CLI::PositiveNumber);
  app.add_option("--rmax", cfg.rmax, "Rank window for the bigraded module")->check(CLI::PositiveNumber);
  app.add_option("--tol", cfg.tol, "Tolerance for floating comparisons")->check(CLI::PositiveNumber);
  app.add_option("--cutoff", cfg.cutoff, "Cesaro cutoff for path-count limits")->check(CLI::PositiveNumber);
  app.add_option("--mode", cfg.mode, "Rank arithmetic: exact or float")->check(CLI::IsMember({"exact", "float"}));
  app.add_option("--limit", cfg.limit, "Limit evaluation: auto, closed-form or cesaro")
      ->check(CLI::IsMember({"auto", "closed-form", "cesaro"}));
  app.add_option("--path-cap", cap_flag, "Maximum number of enumerated paths")->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out, "Write the report to this file instead of stdout");
  app.fallthrough();

  std::string graph, file, suite = "builtin";
  std::size_t kmax = 3;
  long window = 2;
  auto* ktheory = app.add_subcommand("ktheory", "K-theory and K-homology of the graph algebra");
  ktheory->add_option("graph", graph, "Graph file or builtin:NAME")->required();
  auto* snf = app.add_subcommand("snf", "Smith normal form of an integer matrix");
  snf->add_option("matrix", file, "Matrix JSON file")->required();
  auto* assumptions = app.add_subcommand("verify-assumptions", "Diagnostics for the Lambda_k limits");
  assumptions->add_option("graph", graph, "Graph file or builtin:NAME")->required();
  assumptions->add_option("--k", kmax, "Largest k")->check(CLI::PositiveNumber);
  auto* index = app.add_subcommand("index", "Index of the Fock compression of a partial isometry");
  index->add_option("graph", graph, "Graph file or builtin:NAME")->required();
  index->add_option("--isometry", file, "Isometry JSON file")->required();
  auto* diagram = app.add_subcommand("diagram", "Check (1-[E]) Index = ev_* on a suite of classes");
  diagram->add_option("graph", graph, "Graph file or builtin:NAME")->required();
  diagram->add_option("--suite", suite, "builtin or an isometry suite file");
  auto* wclass = app.add_subcommand("wclass", "Pairing of the w class");
  wclass->add_option("graph", graph, "Graph file or builtin:NAME")->required();
  auto* smeb = app.add_subcommand("smeb", "Self-Morita equivalence criterion");
  smeb->add_option("graph", graph, "Graph file or builtin:NAME")->required();
  auto* xi = app.add_subcommand("xi", "Homogeneous decomposition on the truncated bigraded module");
  xi->add_option("graph", graph, "Graph file or builtin:NAME")->required();
  xi->add_option("--suite", suite, "builtin or an isometry suite file");
  xi->add_option("--window", window, "Degree window N")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidInput;
  }

  cfg.path_cap = path_cap_from_env(cap_flag ? cap_flag : default_path_cap);
  const std::size_t cap = *cfg.path_cap;
  try {
    if (*ktheory) return run_ktheory(cfg, graph);
    if (*snf) return run_snf(cfg, file);
    if (*assumptions) return run_assumptions(cfg, graph, kmax, cap);
    if (*index) return run_index(cfg, graph, file, cap);
    if (*diagram) return run_diagram(cfg, graph, suite, cap);
    if (*wclass) return run_wclass(cfg, graph, cap);
    if (*smeb) return run_smeb(cfg, graph);
    if (*xi) return run_xi(cfg, graph, suite, window);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNotConverged;
  } catch (const CheckFailure& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
  return kInvalidInput;
}
