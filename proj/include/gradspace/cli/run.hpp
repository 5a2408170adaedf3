#pragma once

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gradspace/cli/build.hpp"
#include "gradspace/cli/certify.hpp"
#include "gradspace/cli/io.hpp"
#include "gradspace/cli/problem.hpp"
#include "gradspace/cli/selftest.hpp"

namespace gradspace::cli {

enum ExitCode : int { exit_ok = 0, exit_infeasible = 2, exit_nonconvergence = 3, exit_usage = 4, exit_certify = 5 };

struct Options {
  std::string subcommand;
  std::string problem;
  std::string out = "out";
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
};

namespace detail {

inline const std::map<std::string, std::vector<std::string>>& subcommand_problems() {
  static const std::map<std::string, std::vector<std::string>> m{
      {"solve", {"dirichlet", "obstacle", "multi-obstacle", "biharmonic"}},
      {"rayleigh", {"rayleigh"}},
      {"lattice", {"lattice-max", "lattice-min"}},
      {"gradient", {"hajlasz", "poincare-gradient", "fredholm"}},
  };
  return m;
}

inline int exit_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::infeasible: return exit_infeasible;
    case ErrorKind::nonconvergence: return exit_nonconvergence;
    default: return exit_usage;
  }
}

inline Outcome from_solve(const SolveReport& rep) {
  Outcome o;
  o.method = rep.method;
  o.objective = rep.objective;
  o.iterations = rep.iterations;
  o.converged = rep.converged;
  o.feasibility_residual = rep.feasibility_residual;
  o.stationarity = rep.stationarity;
  o.fields["minimizer"] = rep.minimizer.coords();
  o.fields["minimal_gradient"] = rep.minimal_gradient.coords();
  return o;
}

/// K with every obstacle folded in; infeasible when the bounds leave nothing.
inline FeasibleSet checked_constraints(const Instance& in) {
  const FeasibleSet s = in.constrained_k0();
  if (in.lower.empty() && in.upper.empty()) return s;
  bool feasible = false;
  try {
    feasible = !s.box().empty && s.contains(s.project(Vec(s.dimension(), 0.0)), in.cfg.tol_feasibility);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::infeasible && e.kind() != ErrorKind::nonconvergence) throw;
  }
  require(feasible, ErrorKind::infeasible, "the obstacle bounds leave no admissible function");
  return s;
}

inline Outcome compute(const ProblemFile& pf, const Instance& in) {
  const std::string& k = pf.problem;
  if (k == "rayleigh") {
    const auto sol = minimize_rayleigh(*in.rel, ConeSpec(*in.k0), in.cfg);
    Outcome o;
    o.method = sol.method;
    o.objective = sol.value;
    o.iterations = sol.iterations;
    o.feasibility_residual = in.k0->violation(sol.u.coords());
    o.fields["minimizer"] = sol.u.coords();
    o.fields["minimal_gradient"] = minimal_gradient(*in.rel, sol.u, in.cfg).coords();
    o.extra["value"] = sol.value;
    return o;
  }
  if (k == "lattice-max" || k == "lattice-min") {
    Outcome o;
    const Element top = lattice_max(in.order, in.lattice_norm, *in.psi1, *in.psi2, in.cfg);
    if (k == "lattice-max") {
      o.fields["result"] = top.coords();
      o.objective = in.lattice_norm.norm(top.coords());
    } else {
      const Element low = lattice_min(in.order, in.lattice_norm, *in.psi1, *in.psi2, in.cfg);
      o.fields["result"] = low.coords();
      o.fields["maximum"] = top.coords();
      o.objective = in.lattice_norm.norm(low.coords() - top.coords());
    }
    const bool psd = in.order.kind == OrderSpec::Kind::psd;
    const auto shaped = [&](const Vec& v) {
      if (!psd) return nlohmann::json(v);
      nlohmann::json rows = nlohmann::json::array();
      for (std::size_t i = 0; i < in.matrix_n; ++i)
        rows.push_back(Vec(v.begin() + static_cast<std::ptrdiff_t>(i * in.matrix_n),
                           v.begin() + static_cast<std::ptrdiff_t>((i + 1) * in.matrix_n)));
      return rows;
    };
    o.extra["maximum"] = shaped(top.coords());
    if (k == "lattice-min") o.extra["minimum"] = shaped(o.fields["result"]);
    o.method = psd ? "dykstra" : "pointwise";
    return o;
  }
  if (k == "hajlasz" || k == "poincare-gradient") {
    const auto sys = to_polyhedral(*in.rel);
    const NormSpec& wn = in.rel->w_space().norm;
    const auto pg = polyhedral_minimal_gradient(*sys, wn, in.u->coords(), in.cfg);
    Outcome o;
    o.method = "separable-dual";
    o.objective = wn.norm(pg.gradient);
    o.iterations = pg.sweeps;
    for (const auto& c : sys->constraints)
      o.feasibility_residual = std::max(o.feasibility_residual, c.rhs(in.u->coords()) - c.lhs(pg.gradient));
    o.fields["minimal_gradient"] = pg.gradient;
    o.fields["multipliers"] = pg.multipliers;
    return o;
  }
  if (k == "fredholm") {
    const auto fc = fredholm_poincare_constant(*in.op);
    Outcome o;
    o.method = "jacobi";
    o.objective = fc.constant;
    o.kernel = fc.kernel;
    o.extra["constant"] = fc.constant;
    o.extra["rank"] = fc.rank;
    o.extra["singular_values"] = fc.singular_values;
    return o;
  }
  return from_solve(solve_dirichlet(*in.rel, checked_constraints(in), *in.f, in.cfg));
}

/// CSV text for a stored field in the layout of the space it lives in.
inline std::string field_csv(const std::string& name, const Vec& v, const Instance& in) {
  const bool node_field = name == "minimizer";
  if (node_field && in.grid && v.size() == in.grid->node_count()) return csv_grid(v, *in.grid);
  if (name != "multipliers" && in.matrix_n > 0 && v.size() == in.matrix_n * in.matrix_n) return csv_matrix(v, in.matrix_n);
  return csv_vector(v);
}

inline std::string field_file(const std::string& name) {
  if (name == "minimal_gradient") return "gradient.csv";
  return name + ".csv";
}

inline nlohmann::json solver_json(const SolverConfig& c) {
  return {{"tol_objective", c.tol_objective},
          {"tol_feasibility", c.tol_feasibility},
          {"max_iterations", c.max_iterations},
          {"seed", c.seed}};
}

/// Report document and CSV payloads, keyed by file name.
inline std::map<std::string, std::string> render(const Options& opt, const ProblemFile& pf, const Instance& in,
                                                 const Outcome& o, const std::optional<Certificate>& cert) {
  std::map<std::string, std::string> files;
  nlohmann::json r = o.extra;
  r["status"] = o.status;
  if (!o.message.empty()) r["message"] = o.message;
  r["subcommand"] = opt.subcommand;
  r["problem"] = pf.problem;
  r["instance"] = pf.instance;
  r["method"] = o.method;
  r["objective"] = o.objective;
  r["iterations"] = o.iterations;
  r["converged"] = o.converged;
  r["feasibility_residual"] = o.feasibility_residual;
  r["stationarity"] = o.stationarity;
  r["solver"] = solver_json(in.cfg);
  if (cert) r["certificate"] = cert->to_json();
  auto& paths = r["fields"] = nlohmann::json::object();
  for (const auto& [name, v] : o.fields) {
    paths[name] = field_file(name);
    files[field_file(name)] = field_csv(name, v, in);
  }
  if (!o.kernel.empty() || pf.problem == "fredholm") {
    paths["kernel"] = "kernel.csv";
    files["kernel.csv"] = csv_vectors(o.kernel);
  }
  files["report.json"] = r.dump(2) + "\n";
  return files;
}

inline void write_all(const std::filesystem::path& dir, const std::map<std::string, std::string>& files) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, text] : files) write_file(dir / name, text);
}

inline ProblemFile load_problem(const Options& opt) {
  ProblemFile pf = parse_problem_text(read_file(opt.problem));
  if (opt.tol) pf.solver.tol_objective = *opt.tol;
  if (opt.max_iter) pf.solver.max_iterations = *opt.max_iter;
  if (opt.seed) pf.solver.seed = *opt.seed;
  return pf;
}

inline int run_problem(const Options& opt, std::ostream& out, std::ostream& err) {
  ProblemFile pf;
  Instance in;
  try {
    pf = load_problem(opt);
    const auto& allowed = subcommand_problems().at(opt.subcommand);
    if (std::find(allowed.begin(), allowed.end(), pf.problem) == allowed.end()) {
      err << "error: '" << opt.subcommand << "' does not handle '" << pf.problem << "' problems\n";
      return exit_usage;
    }
    in = build_instance(pf);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::infeasible ? exit_infeasible : exit_usage;
  }

  Outcome o;
  std::optional<Certificate> cert;
  int code = exit_ok;
  try {
    o = compute(pf, in);
    cert = certify_outcome(pf, in, o);
    if (!o.converged) {
      o.status = "nonconvergence";
      code = exit_nonconvergence;
    } else if (!cert->passed()) {
      o.status = "uncertified";
      o.message = "solution failed its optimality certificate";
      code = exit_nonconvergence;
    }
  } catch (const NonConvergence& e) {
    o = Outcome{};
    o.status = "nonconvergence";
    o.message = e.what();
    o.converged = false;
    o.iterations = e.iterations();
    o.stationarity = e.residual();
    if (in.rel && e.best_iterate().size() == in.rel->v_space().dimension) o.fields["minimizer"] = e.best_iterate();
    code = exit_nonconvergence;
  } catch (const Error& e) {
    code = exit_for(e.kind());
    if (code == exit_usage) {
      err << "error: " << e.what() << "\n";
      return code;
    }
    o = Outcome{};
    o.status = e.kind() == ErrorKind::infeasible ? "infeasible" : "nonconvergence";
    o.message = e.what();
    o.converged = false;
  }

  try {
    write_all(opt.out, render(opt, pf, in, o, cert));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
  if (code != exit_ok) err << opt.subcommand << ": " << o.status << (o.message.empty() ? "" : ": " + o.message) << "\n";
  out << o.status << " objective=" << format_value(o.objective) << " iterations=" << o.iterations << "\n";
  return code;
}

/// Outcome reconstructed from a report directory.
inline Outcome load_outcome(const std::filesystem::path& dir, const nlohmann::json& report) {
  Outcome o;
  o.status = report.at("status").get<std::string>();
  o.objective = report.at("objective").is_number() ? report.at("objective").get<double>()
                                                   : std::numeric_limits<double>::quiet_NaN();
  for (const char* key : {"value", "constant", "rank"})
    if (report.contains(key)) o.extra[key] = report.at(key);
  for (const auto& [name, file] : report.at("fields").items()) {
    const std::string text = read_file(dir / file.get<std::string>());
    if (name == "kernel") {
      o.kernel = parse_csv_vectors(text, file.get<std::string>());
    } else {
      o.fields[name] = parse_csv_values(text, file.get<std::string>());
    }
  }
  return o;
}

inline int run_certify(const Options& opt, std::ostream& out, std::ostream& err) {
  ProblemFile pf;
  nlohmann::json report;
  const std::filesystem::path dir = opt.out;
  try {
    pf = load_problem(opt);
    report = nlohmann::json::parse(read_file(dir / "report.json"));
    for (const auto& [name, file] : report.at("fields").items()) {
      if (!std::filesystem::exists(dir / file.get<std::string>())) {
        throw Error(ErrorKind::schema, "missing artifact " + (dir / file.get<std::string>()).string());
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }

  try {
    if (report.at("problem").get<std::string>() != pf.problem) {
      throw Error(ErrorKind::precondition, "report is for a '" + report.at("problem").get<std::string>() + "' problem");
    }
    if (report.contains("solver")) {
      const auto& s = report.at("solver");
      pf.solver.tol_objective = s.at("tol_objective").get<double>();
      pf.solver.tol_feasibility = s.at("tol_feasibility").get<double>();
      pf.solver.max_iterations = s.at("max_iterations").get<int>();
      pf.solver.seed = s.at("seed").get<std::uint64_t>();
    }
    const Instance in = build_instance(pf);
    const Outcome o = load_outcome(dir, report);
    const Certificate cert = certify_outcome(pf, in, o);
    for (const auto& c : cert.checks) {
      out << (c.passed ? "PASS " : "FAIL ") << c.name << " " << format_value(c.value) << " <= " << format_value(c.bound)
          << "\n";
    }
    if (o.status != "ok") out << "FAIL status " << o.status << "\n";
    if (cert.passed() && o.status == "ok") return exit_ok;
  } catch (const std::exception& e) {
    err << "certify: " << e.what() << "\n";
  }
  err << "certify: certificate rejected\n";
  return exit_certify;
}

}  // namespace detail

/// Command-line entry point; args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Minimal gradients, variational problems and order lattices", "gradspace"};
  app.require_subcommand(1);
  Options opt;

  const auto add_flags = [&opt](CLI::App* sub) {
    sub->add_option("problem", opt.problem, "Problem file")->required();
    sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
    sub->add_option("--tol", opt.tol, "Objective tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", opt.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "Solver seed (0: deterministic starts)");
    sub->add_option("--format", opt.format, "Field format")->check(CLI::IsMember({"csv"}))->capture_default_str();
  };
  for (const auto& [name, desc] :
       std::vector<std::pair<std::string, std::string>>{{"solve", "Dirichlet, obstacle and biharmonic problems"},
                                                        {"rayleigh", "Minimise the Rayleigh quotient over a cone"},
                                                        {"lattice", "Norm-minimal lattice max and min"},
                                                        {"gradient", "Minimal gradients and Fredholm constants"},
                                                        {"certify", "Re-check a written report against its problem"}}) {
    add_flags(app.add_subcommand(name, desc));
  }
  app.add_subcommand("selftest", "Run the stored example suite");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return exit_usage;
  }

  opt.subcommand = app.get_subcommands().front()->get_name();
  if (opt.subcommand == "selftest") return run_selftest(out) ? exit_ok : exit_certify;
  if (opt.subcommand == "certify") return detail::run_certify(opt, out, err);
  return detail::run_problem(opt, out, err);
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace gradspace::cli
