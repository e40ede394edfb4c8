// Command-line front end: spectrum search, ghost analysis, verification
// suites, and plot-data export for indefinite-weight Dirichlet problems.

#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ghostspec/oracles.hpp"
#include "ghostspec/serialize.hpp"
#include "ghostspec/verify.hpp"

namespace gs = ghostspec;

namespace {

struct run_config {
  std::string example_id;
  std::string problem_path;
  std::string box_text;
  std::string window_text;
  std::string lambda_text;
  std::string format = "json";
  std::string out_path;
  double rtol = 1e-10, atol = 1e-12, eigen_tol = 1e-9;
  std::uint64_t seed = 7;
  int random_count = 0;
  bool verify_all = false;

  gs::solve_options solve_opts() const {
    if (!(rtol > 0) || !(atol > 0) || !(eigen_tol > 0))
      throw gs::domain_error("tolerances must be positive");
    gs::solve_options o;
    o.rtol = rtol;
    o.atol = atol;
    o.eigen_tol = eigen_tol;
    return o;
  }
};

struct problem_setup {
  gs::sl_problem prob;
  gs::box region{-60, 60, 1e-3, 50};
  std::array<double, 2> window{-60, 60};
};

problem_setup resolve_problem(const run_config& cfg) {
  const bool has_example = !cfg.example_id.empty();
  const bool has_file = !cfg.problem_path.empty();
  if (has_example == has_file)
    throw gs::parse_error("exactly one of --example or --problem is required");

  problem_setup s;
  if (has_example) {
    const gs::oracle_problem* ex = gs::find_example(cfg.example_id);
    if (ex == nullptr)
      throw gs::parse_error("unknown example id '" + cfg.example_id + "'");
    s.prob = ex->problem;
    s.region = {ex->default_region[0], ex->default_region[1], ex->default_region[2],
                ex->default_region[3]};
    s.window = ex->default_real_window;
  } else {
    s.prob = gs::load_problem_file(cfg.problem_path);
  }
  if (!cfg.box_text.empty()) s.region = gs::parse_box(cfg.box_text);
  if (!cfg.window_text.empty()) s.window = gs::parse_real_window(cfg.window_text);
  return s;
}

void write_text(const std::string& path, const std::string& payload) {
  if (path.empty()) {
    std::fwrite(payload.data(), 1, payload.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gs::parse_error("cannot open output file: " + path);
  out << payload;
}

// Newton polish from a user-supplied eigenvalue guess; the guess must sit in
// the basin of a genuine eigenvalue.
gs::eigen_pair refine_eigenvalue(const gs::sl_problem& prob, gs::complex lam0,
                                 const gs::solve_options& opts) {
  const gs::detail::newton_result nr = gs::detail::newton_polish(prob, lam0, opts);
  if (nr.residual > opts.eigen_tol)
    throw gs::convergence_error("no eigenvalue found near " +
                                gs::format_complex(lam0));
  if (std::abs(nr.lambda - lam0) > 1.0 + 0.1 * std::abs(lam0))
    throw gs::convergence_error("refinement left the neighborhood of " +
                                gs::format_complex(lam0));
  gs::complex best_lam = nr.lambda;
  if (best_lam.imag() < 0) best_lam = std::conj(best_lam);
  if (std::abs(best_lam.imag()) <= opts.eigen_tol)
    throw gs::domain_error("refined eigenvalue is real; analysis needs a non-real one");

  gs::eigen_pair ep;
  ep.lambda = best_lam;
  ep.traj = gs::integrate(prob, best_lam, opts.rtol, opts.atol);
  ep.residual = std::exp2(ep.traj.end_value().log2_abs() - ep.traj.sup_log2);
  return ep;
}

std::string reference_display(gs::complex z) {
  char buf[64];
  if (z.real() == 0)
    std::snprintf(buf, sizeof buf, "±%gi", z.imag());
  else
    std::snprintf(buf, sizeof buf, "%g%+gi", z.real(), z.imag());
  return buf;
}

int cmd_examples_list() {
  for (const auto& o : gs::example_registry())
    std::printf("%s  %s  λ≈%s\n", o.id.c_str(), o.parameter_label.c_str(),
                reference_display(o.reference_lambda).c_str());
  return 0;
}

int cmd_solve(const run_config& cfg) {
  const problem_setup s = resolve_problem(cfg);
  const gs::spectrum_report rep =
      gs::full_spectrum_report(s.prob, s.region, s.window, cfg.solve_opts());
  std::string payload;
  if (cfg.format == "csv") {
    std::ostringstream os;
    gs::write_spectrum_csv(os, rep);
    payload = os.str();
  } else {
    payload = gs::to_json(rep).dump(2) + "\n";
  }
  write_text(cfg.out_path, payload);
  return rep.bound_ok ? 0 : 1;
}

int cmd_analyze(const run_config& cfg) {
  const problem_setup s = resolve_problem(cfg);
  const gs::solve_options opts = cfg.solve_opts();
  const gs::complex lam0 = gs::parse_complex(cfg.lambda_text);
  const gs::eigen_pair ep = refine_eigenvalue(s.prob, lam0, opts);
  const gs::ghost_report rep = gs::analyze_ghost(s.prob, ep);

  std::ostringstream plot;
  gs::write_plot_csv(plot, gs::decompose(ep), rep.G);

  if (cfg.format == "csv") {
    write_text(cfg.out_path, plot.str());
  } else {
    write_text(cfg.out_path, gs::to_json(rep).dump(2) + "\n");
    if (!cfg.out_path.empty()) write_text(cfg.out_path + ".csv", plot.str());
  }

  const bool ok = rep.interlace_ok && rep.left_case.overall_match &&
                  rep.right_case.overall_match && rep.identity_residual <= 1e-7;
  return ok ? 0 : 1;
}

int cmd_plotdata(const run_config& cfg) {
  const problem_setup s = resolve_problem(cfg);
  const gs::solve_options opts = cfg.solve_opts();
  const gs::complex lam0 = gs::parse_complex(cfg.lambda_text);
  const gs::eigen_pair ep = refine_eigenvalue(s.prob, lam0, opts);
  const gs::ghost_report rep = gs::analyze_ghost(s.prob, ep);
  std::ostringstream plot;
  gs::write_plot_csv(plot, gs::decompose(ep), rep.G);
  write_text(cfg.out_path, plot.str());
  return 0;
}

void print_checks(const std::vector<gs::check_result>& checks) {
  for (const auto& c : checks)
    std::printf("  [%s] %s%s%s\n", c.pass ? "ok" : "FAIL", c.name.c_str(),
                c.detail.empty() ? "" : "  ", c.detail.c_str());
}

int cmd_verify(const run_config& cfg) {
  const gs::solve_options opts = cfg.solve_opts();
  const bool scoped_example = !cfg.example_id.empty();
  if (!cfg.verify_all && !scoped_example && cfg.random_count <= 0)
    throw gs::parse_error("choose --all, --example <id>, or --random <n>");

  bool all_ok = true;
  if (cfg.verify_all || scoped_example) {
    std::vector<const gs::oracle_problem*> targets;
    if (scoped_example) {
      const gs::oracle_problem* ex = gs::find_example(cfg.example_id);
      if (ex == nullptr)
        throw gs::parse_error("unknown example id '" + cfg.example_id + "'");
      targets.push_back(ex);
    } else {
      for (const auto& o : gs::example_registry()) targets.push_back(&o);
    }
    int passed = 0;
    for (const auto* ex : targets) {
      const auto checks = gs::run_example_suite(*ex, opts);
      print_checks(checks);
      const bool ok = gs::all_pass(checks);
      std::printf("example %s: %s\n", ex->id.c_str(), ok ? "PASS" : "FAIL");
      passed += ok ? 1 : 0;
      all_ok = all_ok && ok;
    }
    if (targets.size() > 1)
      std::printf("%d/%zu examples pass\n", passed, targets.size());
  }

  if (cfg.random_count > 0) {
    const double order = gs::convergence_order_study();
    const bool order_ok = order >= 4.0;
    std::printf("  [%s] step-halving convergence order  %.2f\n",
                order_ok ? "ok" : "FAIL", order);
    all_ok = all_ok && order_ok;

    const auto results = gs::run_random_suite(cfg.seed, cfg.random_count, opts);
    int passed = 0;
    for (const auto& r : results) {
      if (r.pass) {
        std::printf("problem %llu: pass%s\n", (unsigned long long)r.index,
                    r.ghost_found ? "" : " (no ghost found)");
        ++passed;
      } else {
        std::printf("problem %llu: FAIL\n", (unsigned long long)r.index);
        print_checks(r.checks);
        std::printf("  problem definition: %s\n", r.failure_context.c_str());
      }
    }
    std::printf("%d/%d problems pass\n", passed, cfg.random_count);
    all_ok = all_ok && passed == cfg.random_count;
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigenvalue toolkit for Dirichlet problems with sign-changing weight"};
  app.require_subcommand(1);
  run_config cfg;

  CLI::App* examples = app.add_subcommand("examples", "Built-in example problems");
  examples->require_subcommand(1);
  CLI::App* list = examples->add_subcommand("list", "List the built-in examples");

  auto add_common = [&](CLI::App* c) {
    c->add_option("--example", cfg.example_id, "Built-in example id (see 'examples list')");
    c->add_option("--problem", cfg.problem_path, "Problem definition JSON file");
    c->add_option("--box", cfg.box_text, "Search rectangle re0,re1,im0,im1");
    c->add_option("--real-window", cfg.window_text, "Real eigenvalue window lo,hi");
    c->add_option("--rtol", cfg.rtol, "Integrator relative tolerance");
    c->add_option("--atol", cfg.atol, "Integrator absolute tolerance");
    c->add_option("--eigen-tol", cfg.eigen_tol, "Eigenvalue residual tolerance");
    c->add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));
    c->add_option("--out", cfg.out_path, "Output path (default: stdout)");
  };

  CLI::App* solve = app.add_subcommand(
      "solve", "Locate real and non-real eigenvalues and check the count bound");
  add_common(solve);

  CLI::App* analyze = app.add_subcommand(
      "analyze", "Analyze the eigenfunction structure at a non-real eigenvalue");
  add_common(analyze);
  analyze->add_option("--lambda", cfg.lambda_text, "Eigenvalue guess re+imi")
      ->required();

  CLI::App* plotdata =
      app.add_subcommand("plotdata", "Emit x,phi,psi,G samples at an eigenvalue");
  add_common(plotdata);
  plotdata->add_option("--lambda", cfg.lambda_text, "Eigenvalue guess re+imi")
      ->required();

  CLI::App* verify =
      app.add_subcommand("verify", "Run the invariant suites and report pass/fail");
  verify->add_flag("--all", cfg.verify_all, "Verify every built-in example");
  verify->add_option("--example", cfg.example_id, "Verify one built-in example");
  verify->add_option("--random", cfg.random_count,
                     "Verify this many generated sign-changing problems");
  verify->add_option("--seed", cfg.seed, "Seed for the problem generator");
  verify->add_option("--rtol", cfg.rtol, "Integrator relative tolerance");
  verify->add_option("--atol", cfg.atol, "Integrator absolute tolerance");
  verify->add_option("--eigen-tol", cfg.eigen_tol, "Eigenvalue residual tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (list->parsed()) return cmd_examples_list();
    if (solve->parsed()) return cmd_solve(cfg);
    if (analyze->parsed()) return cmd_analyze(cfg);
    if (plotdata->parsed()) return cmd_plotdata(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    std::cerr << "input error: no subcommand\n";
    return 2;
  } catch (const gs::parse_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const gs::domain_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const gs::invariant_violation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 1;
  } catch (const gs::convergence_error& e) {
    std::cerr << "nonconvergence: " << e.what() << "\n";
    return 3;
  } catch (const gs::overflow_error& e) {
    std::cerr << "nonconvergence: " << e.what() << "\n";
    return 3;
  } catch (const gs::step_underflow_error& e) {
    std::cerr << "nonconvergence: " << e.what() << "\n";
    return 3;
  } catch (const gs::boundary_zero_error& e) {
    std::cerr << "nonconvergence: " << e.what() << "\n";
    return 3;
  } catch (const gs::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
