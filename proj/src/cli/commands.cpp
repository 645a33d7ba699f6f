#include "torus/cli/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <map>

#include "torus/errors.hpp"
#include "torus/floquet.hpp"
#include "torus/hum.hpp"
#include "torus/lattice.hpp"
#include "torus/measures.hpp"
#include "torus/normalform.hpp"
#include "torus/observability.hpp"
#include "torus/operator.hpp"
#include "torus/parallel.hpp"
#include "torus/propagator.hpp"

namespace torus::cli {

namespace {

constexpr double kGiB = 1024.0 * 1024.0 * 1024.0;

SchrodingerOperator make_operator(const ExperimentConfig& c) {
  return SchrodingerOperator(c.potential_field(), c.N, c.solver.memory_gb * kGiB);
}

ControlProblem make_problem(const ExperimentConfig& c, double T) {
  return ControlProblem(make_operator(c), c.region_value(), T, c.grid(), c.solver.nt,
                        parse_time_rule(c.solver.rule));
}

Json warnings_json(const SchrodingerOperator& op) {
  Json w = Json::array();
  for (const auto& s : op.warnings()) w.push_back(s);
  return w;
}

double rel_diff(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const double nb = b.norm();
  return nb > 0.0 ? (a - b).norm() / nb : (a - b).norm();
}

Json problem_json(const ExperimentConfig& c, const ControlProblem& cp) {
  Json j;
  j["N"] = c.N;
  j["T"] = cp.T();
  j["M"] = cp.grid();
  j["nt"] = cp.time_steps();
  j["rule"] = to_string(cp.rule());
  j["region"] = cp.omega().describe();
  j["grid_measure"] = cp.omega().grid_measure(c.lattice(), cp.grid());
  return j;
}

// ---------------------------------------------------------------- commands

void cmd_eig(const ExperimentConfig& c, OutputDir& out) {
  const SchrodingerOperator op = make_operator(c);
  const auto& e = op.eig();
  const Eigen::Index count = std::min<Eigen::Index>(c.eig.count, e.values.size());
  Csv csv({"index", "lambda"});
  Json vals = Json::array();
  for (Eigen::Index j = 0; j < e.values.size(); ++j) csv.row({std::to_string(j), fmt(e.values[j])});
  for (Eigen::Index j = 0; j < count; ++j) vals.push_back(e.values[j]);
  Json j = report_header("eig", &c);
  j["dimension"] = op.dimension();
  j["lowest"] = vals;
  j["lambda_min"] = e.values[0];
  j["lambda_max"] = e.values[e.values.size() - 1];
  j["warnings"] = warnings_json(op);
  out.write("eig.csv", csv.str());
  out.write("eig.json", j);
}

void cmd_evolve(const ExperimentConfig& c, OutputDir& out) {
  const SchrodingerOperator op = make_operator(c);
  const FourierField u0 = c.initial_field();
  const double n0 = norm_l2(u0), e0 = energy(op, u0);
  Csv csv({"t", "norm", "norm_ratio", "energy", "energy_drift"});
  double worst_norm = 0.0, worst_energy = 0.0;
  for (double t : c.evolve.times) {
    const FourierField u = evolve(op, u0, t);
    const double n = norm_l2(u), e = energy(op, u);
    const double dn = std::abs(n / n0 - 1.0), de = std::abs(e - e0) / std::max(1.0, std::abs(e0));
    worst_norm = std::max(worst_norm, dn);
    worst_energy = std::max(worst_energy, de);
    csv.row({fmt(t), fmt(n), fmt(n / n0), fmt(e), fmt(de)});
  }
  Json j = report_header("evolve", &c);
  j["initial_norm"] = n0;
  j["initial_energy"] = e0;
  j["max_norm_deviation"] = worst_norm;
  j["max_energy_drift"] = worst_energy;
  j["warnings"] = warnings_json(op);
  out.write("evolve.csv", csv.str());
  out.write("evolve.json", j);
}

std::vector<Family> observe_families(const ExperimentConfig& c) {
  std::vector<Family> fam;
  if (c.observe.eigen_count > 0) fam.push_back(EigenfunctionFamily{c.observe.eigen_count});
  if (c.observe.random_count > 0)
    fam.push_back(RandomFamily{c.observe.random_count, c.seed_for(2), FlatProfile{}, c.observe.random_band});
  return fam;
}

void cmd_observe(const ExperimentConfig& c, OutputDir& out) {
  const ControlProblem cp = make_problem(c, c.T);
  const ObservabilityReport rep = estimate_obs_constant(cp, observe_families(c), c.observe.refine);
  Csv csv({"family", "id", "label", "quotient"});
  for (const auto& s : rep.samples) csv.row({s.family, std::to_string(s.id), s.label, fmt(s.quotient)});
  Json j = report_header("observe", &c);
  j["problem"] = problem_json(c, cp);
  j["samples"] = rep.samples.size();
  j["min_quotient"] = rep.min_quotient;
  j["mean_quotient"] = rep.mean_quotient;
  j["K_estimate"] = rep.K_estimate;
  Json ref = Json::array();
  for (const auto& r : rep.refinement)
    ref.push_back(Json{{"name", r.name}, {"min_quotient", r.min_quotient}, {"relative_delta", r.relative_delta}});
  j["refinement"] = ref;
  if (!rep.refinement.empty()) j["max_refinement_delta"] = rep.max_refinement_delta();
  out.write("observe.csv", csv.str());
  out.write("observe.json", j);
}

void cmd_sweep_obs(const ExperimentConfig& c, OutputDir& out) {
  const ControlProblem base = make_problem(c, c.T);
  Csv csv({"T", "min_quotient", "mean_quotient", "K_estimate"});
  Json rows = Json::array();
  for (double T : c.sweep_obs.T) {
    const ControlProblem cp(base.op(), base.omega(), T, base.grid(), base.time_steps(), base.rule());
    const ObservabilityReport rep = estimate_obs_constant(cp, observe_families(c));
    csv.row({fmt(T), fmt(rep.min_quotient), fmt(rep.mean_quotient), fmt(rep.K_estimate)});
    rows.push_back(Json{{"T", T}, {"min_quotient", rep.min_quotient}, {"K_estimate", rep.K_estimate}});
  }
  Json j = report_header("sweep-obs", &c);
  j["problem"] = problem_json(c, base);
  j["sweep"] = rows;
  out.write("sweep_obs.csv", csv.str());
  out.write("sweep_obs.json", j);
}

int cmd_hum(const ExperimentConfig& c, OutputDir& out, std::ostream& log) {
  const ControlProblem cp = make_problem(c, c.T);
  const HumOperator hum(cp);
  const FourierField u0 = c.initial_field();
  HumOptions opt;
  opt.tol = c.solver.tol;
  opt.maxit = c.solver.maxit;
  opt.singular_tol = c.solver.singular_tol;
  const HumSolution sol = hum_solve(hum, u0, opt);
  Json j = report_header("hum", &c);
  j["problem"] = problem_json(c, cp);
  j["converged"] = sol.converged;
  j["iterations"] = sol.iterations;
  j["final_miss"] = sol.final_miss;
  j["condition_estimate"] = sol.condition_estimate;
  j["integrator_error"] = sol.integrator_error;
  j["control_norm"] = sol.control_norm;
  if (c.hum.dense_check) {
    const DenseHumSolution dense = hum_dense_solve(hum, u0);
    ControlSamples diff = dense.control;
    diff.values -= sol.control.values;
    const double cn = control_norm(dense.control);
    j["dense"] = Json{{"final_miss", dense.final_miss},
                      {"phiT_relative_difference", rel_diff(sol.phiT.coeffs(), dense.phiT.coeffs())},
                      {"control_relative_difference", cn > 0.0 ? control_norm(diff) / cn : control_norm(diff)}};
  }
  if (c.hum.min_norm_trials > 0) {
    const MinNormCheck mn = min_norm_signature(hum, sol, c.hum.min_norm_trials, c.seed_for(3));
    j["min_norm"] = Json{{"trials", mn.trials},
                         {"min_norm_ratio", mn.min_norm_ratio},
                         {"max_state_residual", mn.max_state_residual},
                         {"max_cosine", mn.max_cosine},
                         {"passed", mn.passed}};
  }
  Csv hist({"iteration", "residual", "energy_error"});
  for (std::size_t i = 0; i < sol.residual_history.size(); ++i) {
    const double ee = i < sol.energy_error_history.size() ? sol.energy_error_history[i]
                                                          : std::numeric_limits<double>::quiet_NaN();
    hist.row({std::to_string(i), fmt(sol.residual_history[i]), fmt(ee)});
  }
  Csv phi({"k", "l", "re", "im"});
  const int N = sol.phiT.truncation();
  for (int k = -N; k <= N; ++k)
    for (int l = -N; l <= N; ++l) {
      const cplx v = sol.phiT.coeff(k, l);
      phi.row({std::to_string(k), std::to_string(l), fmt(v.real()), fmt(v.imag())});
    }
  out.write("hum_history.csv", hist.str());
  out.write("hum_phiT.csv", phi.str());
  out.write("hum.json", j);
  if (!sol.converged) {
    log << "hum: CG did not reach tol " << c.solver.tol << " in " << sol.iterations << " iterations\n";
    throw NumericalError("HUM conjugate gradient did not converge");
  }
  return kExitOk;
}

StripFrame make_frame(const ExperimentConfig& c) {
  const TorusLattice lat = c.normalform_lattice();
  if (c.normalform.frame == "axis") return StripFrame::axis(lat);
  return StripFrame::along(make_direction(lat, c.normalform.n, c.normalform.m));
}

void cmd_normalform(const ExperimentConfig& c, OutputDir& out) {
  const auto& s = c.normalform;
  const FourierField V = c.normalform_potential();
  const StripFrame frame = make_frame(c);
  const CorrectorVariant variant = parse_corrector_variant(s.variant);
  const CorrectorSymbol q = build_corrector(V, frame, s.window, variant);
  Json j = report_header("normalform", &c);
  j["torus"] = Json::array({s.A, s.B});
  j["frame"] = frame.is_axis() ? "axis" : "direction";
  if (!frame.is_axis())
    j["direction"] = Json::array({frame.direction()->n, frame.direction()->m});
  j["variant"] = s.variant;
  j["window"] = Json{{"xi_c", s.window.xi_c}, {"eta_c", s.window.eta_c}, {"w_xi", s.window.w_xi},
                     {"w_eta", s.window.w_eta}};
  j["transport_residual"] = transport_residual(q, V);
  Csv csv({"quantity", "h", "residual"});
  Json conj = Json::array();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double h : s.h) {
    const double r = conjugation_residual(V, frame, s.window, h, variant);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    conj.push_back(Json{{"h", h}, {"residual", r}});
    csv.row({"conjugation", fmt(h), fmt(r)});
  }
  j["conjugation"] = conj;
  j["conjugation_ratio"] = lo > 0.0 ? hi / lo : (hi == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
  const WReport rep = [&] {
    try {
      return build_w_and_check(V, frame, s.window, s.h, variant, s.bound_ratio);
    } catch (const NormalFormInconsistency&) {
      out.write("normalform.csv", csv.str());
      out.write("normalform.json", j);
      throw;
    }
  }();
  Json cands = Json::array();
  for (const auto& ch : rep.candidates) {
    Json rs = Json::array();
    for (std::size_t i = 0; i < ch.h.size(); ++i) {
      rs.push_back(Json{{"h", ch.h[i]}, {"residual", ch.residual[i]}});
      csv.row({"W " + to_string(ch.candidate), fmt(ch.h[i]), fmt(ch.residual[i])});
    }
    cands.push_back(Json{{"candidate", to_string(ch.candidate)},
                         {"residuals", rs},
                         {"ratio", ch.ratio},
                         {"xi0_slice", ch.xi0_slice},
                         {"bounded", ch.bounded},
                         {"vanishes_at_xi0", ch.vanishes_at_xi0}});
  }
  j["W_candidates"] = cands;
  j["W_selected"] = to_string(rep.selected);
  out.write("normalform.csv", csv.str());
  out.write("normalform.json", j);
}

void cmd_floquet(const ExperimentConfig& c, OutputDir& out) {
  const auto& f = c.floquet;
  const CircleField W = c.floquet_potential();
  std::vector<double> betas;
  for (int i = 0; i < f.beta_points; ++i) betas.push_back(2.0 * M_PI / f.length * i / (f.beta_points - 1));
  FloquetSweepOptions opt;
  opt.N = f.N;
  opt.eigen_count = f.eigen_count;
  opt.random_count = f.random_count;
  opt.seed = c.seed_for(4);
  opt.panels = f.panels;
  opt.rule = parse_time_rule(c.solver.rule);
  const FloquetSweep base = floquet_obs_sweep(W, f.omega, f.T, betas, opt);
  opt.N = f.refine_N;
  const FloquetSweep fine = floquet_obs_sweep(W, f.omega, f.T, betas, opt);
  const FloquetOperator1D f0(W, 0.0, f.N), f1(W, 2.0 * M_PI / f.length, f.N);
  const double gauge =
      (f0.eig().values.head(f.gauge_count) - f1.eig().values.head(f.gauge_count)).cwiseAbs().maxCoeff();
  Csv csv({"beta", "min_quotient", "min_eigen_quotient", "min_random_quotient", "min_quotient_refined"});
  double mn = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const auto& e = base.entries[i];
    mn = std::min(mn, e.min_quotient);
    csv.row({fmt(e.beta), fmt(e.min_quotient), fmt(e.min_eigen_quotient), fmt(e.min_random_quotient),
             fmt(fine.entries[i].min_quotient)});
  }
  Json j = report_header("floquet-sweep", &c);
  j["length"] = f.length;
  j["omega"] = Json::array({f.omega.lo, f.omega.hi});
  j["T"] = f.T;
  j["N"] = f.N;
  j["refine_N"] = f.refine_N;
  j["min_quotient"] = mn;
  j["max_min_ratio"] = base.max_min_ratio;
  j["max_min_ratio_refined"] = fine.max_min_ratio;
  j["ratio_relative_change"] = std::abs(fine.max_min_ratio / base.max_min_ratio - 1.0);
  j["gauge_defect"] = gauge;
  out.write("floquet.csv", csv.str());
  out.write("floquet.json", j);
}

void cmd_measure(const ExperimentConfig& c, OutputDir& out) {
  const auto& m = c.measure;
  const TorusLattice lat = c.lattice();
  std::vector<std::pair<double, FourierField>> seq;
  for (double h : m.h) seq.emplace_back(h, coherent_state(lat, m.N, m.z0, m.xi0, h));
  const std::vector<TestSymbol> symbols = c.test_symbols();
  const MeasureScan scan = measure_scan(seq, symbols);
  Csv csv({"symbol_id", "h", "re", "im"});
  for (std::size_t s = 0; s < symbols.size(); ++s)
    for (std::size_t i = 0; i < m.h.size(); ++i) {
      const cplx v = scan.values(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(i));
      csv.row({symbols[s].name, fmt(m.h[i]), fmt(v.real()), fmt(v.imag())});
    }
  Json j = report_header("measure", &c);
  j["N"] = m.N;
  j["z0"] = Json::array({m.z0[0], m.z0[1]});
  j["xi0"] = Json::array({m.xi0[0], m.xi0[1]});
  Json syms = Json::array();
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    Json e{{"symbol_id", symbols[s].name},
           {"limit", complex_json(scan.limit[s])},
           {"error_bar", scan.error_bar[s]}};
    if (m.h.size() >= 2) {
      const CoherentConvergence cc = coherent_convergence(symbols[s], lat, m.N, m.z0, m.xi0, m.h);
      e["target"] = complex_json(cc.target);
      e["errors"] = cc.error;
      e["error_ratios"] = cc.ratio;
      e["max_error_ratio"] = cc.max_ratio;
      e["sqrt_h_constant"] = cc.constant;
    }
    syms.push_back(e);
  }
  j["symbols"] = syms;
  const MeasureSignatures sig = measure_signatures(seq);
  j["mass"] = Json{{"limit", complex_json(sig.mass_limit)}, {"error", sig.mass_error}, {"passed", sig.mass_ok}};
  j["off_circle"] = Json{{"max_at_smallest_h", sig.off_circle_max}, {"passed", sig.off_circle_ok}};
  const RationalDirection d = make_direction(lat, m.orbit_n, m.orbit_m);
  const OrbitUniformity ou = orbit_uniformity(d, m.z0, m.orbit_h, m.N);
  j["orbit_uniformity"] = Json{{"direction", Json::array({d.n, d.m})},
                               {"h", ou.h},
                               {"deviation", ou.deviation},
                               {"decreasing", ou.decreasing}};
  Json census = Json::array();
  for (const auto& dd : direction_census(lat, m.census_bound))
    census.push_back(Json{{"n", dd.n}, {"m", dd.m}, {"b", dd.b}});
  j["direction_census"] = census;
  out.write("measure.csv", csv.str());
  out.write("measure.json", j);
}

int cmd_selftest(const ExperimentConfig& c, OutputDir& out, std::ostream& log) {
  const std::vector<SelftestCheck> checks = selftest_checks(c);
  Csv csv({"suite", "check", "value", "tolerance", "passed"});
  Json arr = Json::array();
  bool all = true;
  for (const auto& ch : checks) {
    all = all && ch.passed;
    csv.row({ch.suite, ch.name, fmt(ch.value), fmt(ch.tolerance), ch.passed ? "true" : "false"});
    arr.push_back(Json{{"suite", ch.suite},
                       {"check", ch.name},
                       {"value", ch.value},
                       {"tolerance", ch.tolerance},
                       {"passed", ch.passed}});
    if (!ch.passed) log << "selftest: " << ch.suite << "/" << ch.name << " failed (" << ch.value << ")\n";
  }
  Json j = report_header("selftest", &c);
  j["checks"] = arr;
  j["passed"] = all;
  out.write("selftest.csv", csv.str());
  out.write("selftest.json", j);
  if (!all) throw NumericalError("selftest: invariant checks failed");
  return kExitOk;
}

Json diagnostics_json(const std::vector<Diagnostic>& ds) {
  Json a = Json::array();
  for (const auto& d : ds) a.push_back(Json{{"path", d.path}, {"message", d.message}});
  return a;
}

void write_error(const std::string& dir, const std::string& command, int code, const std::string& type,
                 const std::string& message, const std::vector<Diagnostic>& diags,
                 const ExperimentConfig* c, std::ostream& log) {
  try {
    OutputDir out(dir);
    Json j = report_header(command, c);
    j["exit_code"] = code;
    j["error_type"] = type;
    j["message"] = message;
    j["diagnostics"] = diagnostics_json(diags);
    out.write("error.json", j);
  } catch (const std::exception& e) {
    log << "torusctl: could not write error.json: " << e.what() << "\n";
  }
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"eig",        "evolve",        "observe", "sweep-obs",
                                              "hum",        "normalform",    "floquet-sweep",
                                              "measure",    "selftest",      "validate"};
  return names;
}

std::string resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("TORUSCTL_OUT"); env && *env) return env;
  return "torusctl_out";
}

int run(const RunOptions& options, std::ostream& log) {
  const std::string dir = resolve_out_dir(options.out_dir);
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), options.command) == names.end()) {
    const std::string msg = "unknown command '" + options.command + "'";
    log << "torusctl: " << msg << "\n";
    write_error(dir, options.command, kExitValidation, "usage", msg, {}, nullptr, log);
    return kExitValidation;
  }
  if (options.threads < 1) {
    log << "torusctl: --threads must be at least 1\n";
    write_error(dir, options.command, kExitValidation, "usage", "--threads must be at least 1", {}, nullptr, log);
    return kExitValidation;
  }
  set_worker_count(options.threads);
  ParseResult parsed = load_config(options.config_path);
  if (parsed.config && options.seed) parsed.config->seed = *options.seed;

  if (options.command == "validate") {
    for (const auto& d : parsed.diagnostics)
      log << (d.path.empty() ? "" : d.path + ": ") << d.message << "\n";
    try {
      OutputDir out(dir);
      Json j = report_header("validate", parsed.config ? &*parsed.config : nullptr);
      j["valid"] = parsed.diagnostics.empty();
      j["diagnostics"] = diagnostics_json(parsed.diagnostics);
      out.write("validate.json", j);
    } catch (const std::exception& e) {
      log << "torusctl: " << e.what() << "\n";
      return kExitValidation;
    }
    return parsed.diagnostics.empty() ? kExitOk : kExitValidation;
  }
  if (!parsed.config) {
    for (const auto& d : parsed.diagnostics)
      log << "config: " << (d.path.empty() ? "" : d.path + ": ") << d.message << "\n";
    write_error(dir, options.command, kExitValidation, "config", "configuration is invalid",
                parsed.diagnostics, nullptr, log);
    return kExitValidation;
  }
  const ExperimentConfig& c = *parsed.config;
  try {
    OutputDir out(dir);
    const std::string& cmd = options.command;
    if (cmd == "eig") cmd_eig(c, out);
    else if (cmd == "evolve") cmd_evolve(c, out);
    else if (cmd == "observe") cmd_observe(c, out);
    else if (cmd == "sweep-obs") cmd_sweep_obs(c, out);
    else if (cmd == "hum") cmd_hum(c, out, log);
    else if (cmd == "normalform") cmd_normalform(c, out);
    else if (cmd == "floquet-sweep") cmd_floquet(c, out);
    else if (cmd == "measure") cmd_measure(c, out);
    else if (cmd == "selftest") cmd_selftest(c, out, log);
    for (const auto& f : out.written()) log << "wrote " << (out.path() / f).string() << "\n";
    return kExitOk;
  } catch (const InvalidArgument& e) {
    log << "torusctl: " << e.what() << "\n";
    write_error(dir, options.command, kExitValidation, "invalid_argument", e.what(), {}, &c, log);
    return kExitValidation;
  } catch (const IllPosedControl& e) {
    log << "torusctl: " << e.what() << "\n";
    write_error(dir, options.command, kExitNumerical, "ill_posed_control", e.what(), {}, &c, log);
    return kExitNumerical;
  } catch (const NormalFormInconsistency& e) {
    log << "torusctl: " << e.what() << "\n";
    write_error(dir, options.command, kExitNumerical, "normal_form_inconsistency", e.what(), {}, &c, log);
    return kExitNumerical;
  } catch (const NumericalError& e) {
    log << "torusctl: " << e.what() << "\n";
    write_error(dir, options.command, kExitNumerical, "numerical", e.what(), {}, &c, log);
    return kExitNumerical;
  } catch (const ResourceError& e) {
    log << "torusctl: " << e.what() << "\n";
    write_error(dir, options.command, kExitNumerical, "resource", e.what(), {}, &c, log);
    return kExitNumerical;
  }
}

// ---------------------------------------------------------------- selftest

std::vector<SelftestCheck> selftest_checks(const ExperimentConfig& c) {
  std::vector<SelftestCheck> out;
  const auto add = [&out](std::string suite, std::string name, double value, double tol) {
    out.push_back({std::move(suite), std::move(name), value, tol, std::isfinite(value) && value <= tol});
  };
  const TorusLattice lat = c.lattice();
  const int N = c.N;

  {  // unitarity and energy conservation over random potentials
    double dn = 0.0, de = 0.0;
    for (int i = 0; i < 4; ++i) {
      const SchrodingerOperator op(random_real_field(lat, 2, c.seed_for(100 + i), 5.0), N);
      const FourierField u0 = random_field(lat, N, c.seed_for(200 + i));
      const double e0 = energy(op, u0);
      for (double t : {0.1, 0.7, 3.0}) {
        const FourierField u = evolve(op, u0, t);
        dn = std::max(dn, std::abs(norm_l2(u) / norm_l2(u0) - 1.0));
        de = std::max(de, std::abs(energy(op, u) - e0) / std::max(1.0, std::abs(e0)));
      }
    }
    add("propagator", "norm_deviation", dn, 1e-12);
    add("propagator", "energy_drift", de, 1e-10);
  }
  {  // lattice
    double tw = 0.0, bz = 0.0, rp = 0.0;
    const FourierField u = random_field(lat, 4, c.seed_for(300));
    for (const auto& d : direction_census(lat, 3)) {
      tw = std::max(tw, check_twisted_periodicity(u, d, 20, c.seed_for(301)));
      bz = std::max(bz, static_cast<double>(std::abs(d.n * d.q - d.m * d.p - 1)));
    }
    const TorusLattice rat(1.0, 2.0);
    const FourierField ur = random_field(rat, 3, c.seed_for(302));
    for (const auto& d : direction_census(rat, 2))
      rp = std::max(rp, check_rational_periodicity(ur, d, 2, 1, 20, c.seed_for(303)));
    add("lattice", "twisted_periodicity", tw, 1e-10);
    add("lattice", "bezout_defect", bz, 0.0);
    add("lattice", "rational_periodicity", rp, 1e-10);
  }
  const SchrodingerOperator op = make_operator(c);
  {  // full observation
    const ControlProblem whole(op, Region::whole(), c.T, c.grid(), c.solver.nt, parse_time_rule(c.solver.rule));
    const FourierField u0 = random_field(lat, N, c.seed_for(400));
    add("observability", "whole_torus_energy",
        std::abs(observed_energy(whole, u0) / (c.T * std::pow(norm_l2(u0), 2)) - 1.0), 1e-9);
    const Eigen::Index J = std::min<Eigen::Index>(20, op.dimension());
    const Eigen::MatrixXcd G = gramian_dense(whole, J);
    add("hum", "whole_torus_gramian",
        (G - c.T * Eigen::MatrixXcd::Identity(J, J)).cwiseAbs().maxCoeff() / c.T, 1e-9);
  }
  const Region omega = c.region_value();
  const int M = c.grid();
  {  // restriction: grid quadrature against the coefficient-space form
    const FourierField u = random_field(lat, N, c.seed_for(500));
    const RestrictionOperator R(lat, omega, N, M);
    const double a = restricted_mass(u, omega, M), b = R.mass(u.coeffs());
    add("region", "restricted_mass_consistency", std::abs(a - b) / std::max(a, 1e-300), 1e-12);
  }
  {  // HUM operator structure
    const ControlProblem cp(op, omega, c.T, M, c.solver.nt, parse_time_rule(c.solver.rule));
    const HumOperator hum(cp);
    const FourierField x = random_field(lat, N, c.seed_for(600)), y = random_field(lat, N, c.seed_for(601));
    const Eigen::VectorXcd Lx = hum.apply(x.coeffs()), Ly = hum.apply(y.coeffs());
    add("hum", "gramian_symmetry", std::abs(y.coeffs().dot(Lx) - Ly.dot(x.coeffs())) / Lx.norm(), 1e-12);
    add("hum", "gramian_positivity", std::max(0.0, -std::real(x.coeffs().dot(Lx))), 0.0);
    const ControlSamples f = hum.adjoint(y.coeffs());
    const Eigen::VectorXcd Lf = hum.control_to_state(f);
    // <L f, x> = <f, L^* x>
    const cplx lhs = lat.area() * x.coeffs().dot(Lf), rhs = control_inner(f, hum.adjoint(x.coeffs()));
    add("hum", "adjoint_consistency", std::abs(lhs - rhs) / std::max(1e-300, std::abs(lhs)), 1e-12);
  }
  {  // quantization
    const FourierField u = random_field(lat, N, c.seed_for(700));
    const double m1 = std::abs(matrix_element(TestSymbol::multiplier("one", profile_one()), u, 0.1) - 1.0);
    add("measures", "identity_quantization", m1, 1e-12);
    const TestSymbol s = mass_symbol();
    const cplx a = matrix_element(s, u, 0.05), b = matrix_element(s, cplx(0.3, -1.1) * u, 0.05);
    add("measures", "sesquilinearity", std::abs(b - std::norm(cplx(0.3, -1.1)) * a), 1e-12);
  }
  {  // dyadic partition of unity
    const FourierField u = random_field(lat, N, c.seed_for(800));
    const auto pieces = dyadic_partition(op, 2.0, u);
    // sum phi_j^2 = 1, so the piece masses add up to the total
    double e2 = 0.0;
    for (const auto& p : pieces) e2 += std::pow(norm_l2(p), 2);
    add("operator", "dyadic_partition_mass", std::abs(e2 - std::pow(norm_l2(u), 2)), 1e-12);
  }
  {  // normal form transport equation
    const FourierField V = c.normalform_potential();
    const CorrectorSymbol q = build_corrector(V, StripFrame::axis(c.normalform_lattice()), c.normalform.window,
                                              CorrectorVariant::zero_mean);
    add("normalform", "transport_residual", transport_residual(q, V, 16, 16, 4), 1e-10);
  }
  {  // Floquet gauge
    const CircleField W = c.floquet_potential();
    const int fn = std::min(c.floquet.N, 32);
    const FloquetOperator1D f0(W, 0.0, fn), f1(W, 2.0 * M_PI / c.floquet.length, fn);
    const int g = std::min(c.floquet.gauge_count, fn);
    add("floquet", "gauge_defect",
        (f0.eig().values.head(g) - f1.eig().values.head(g)).cwiseAbs().maxCoeff() /
            std::max(1.0, std::abs(f0.eig().values[g - 1])),
        1e-10);
  }
  return out;
}

}  // namespace torus::cli
