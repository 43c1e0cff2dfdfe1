#include "ree/cli.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ree/io.hpp"

namespace ree {

namespace {

using json = nlohmann::ordered_json;

json json_double(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

json json_matrix(const ComplexMatrix& m, bool imaginary) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j)
      row.push_back(imaginary ? m(i, j).imag() : m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

json json_state(const DensityMatrix& state) {
  json doc;
  doc["dims"] = {state.dim_a(), state.dim_b()};
  doc["matrix_re"] = json_matrix(state.matrix(), false);
  doc["matrix_im"] = json_matrix(state.matrix(), true);
  return doc;
}

json json_rotation(const Mat3& o) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back(std::vector<double>{o[i][0], o[i][1], o[i][2]});
  return rows;
}

json json_entropy(const EntropyValue& v) {
  json doc;
  doc["nats"] = v.infinite ? json(nullptr) : json(v.nats);
  doc["bits"] = v.infinite ? json(nullptr) : json(v.bits);
  doc["infinite"] = v.infinite;
  return doc;
}

json json_condition(const ConditionReport& report) {
  json doc;
  doc["party"] = report.party == Party::A ? "A" : "B";
  doc["filter_residual"] = report.filter_residual;
  doc["unitary_residual"] = report.unitary_residual;
  doc["tolerance"] = report.tolerance;
  doc["filter_satisfied"] = report.filter_satisfied;
  doc["unitary_satisfied"] = report.unitary_satisfied;
  doc["s"] = report.s;
  doc["r"] = report.r;
  doc["g_vec"] = report.g_vec;
  doc["h"] = report.h;
  return doc;
}

json input_digest(const LoadedState& loaded) {
  json doc;
  doc["dims"] = {loaded.state.dim_a(), loaded.state.dim_b()};
  doc["label"] = loaded.label;
  doc["eigenvalues"] = hermitian_eig(loaded.state.matrix()).values;
  return doc;
}

json report_skeleton(const std::string& command, std::uint64_t seed) {
  json doc;
  doc["tool"] = "ree";
  doc["version"] = kToolVersion;
  doc["command"] = command;
  doc["seed"] = seed;
  return doc;
}

void emit_report(const std::string& path, const json& report) {
  if (!path.empty()) write_text_file(path, report.dump(2) + "\n");
}

struct GenArgs {
  std::string family;
  std::string output;
  double p = 0.5;
  double f = 0.5;
  std::size_t d = 2;
  std::vector<double> lambdas;
  std::vector<double> amps;
  std::vector<double> ra;
  std::vector<double> rb;
};

std::string family_label(const GenArgs& a) {
  std::ostringstream label;
  label << a.family << "(";
  if (a.family == "pure" || a.family == "pure_closest") {
    label << "p=" << format_g17(a.p);
  } else if (a.family == "werner") {
    label << "F=" << format_g17(a.f);
  } else if (a.family == "isotropic") {
    label << "d=" << a.d << ",F=" << format_g17(a.f);
  } else if (a.family == "bell_diagonal") {
    for (std::size_t i = 0; i < a.lambdas.size(); ++i)
      label << (i ? "," : "") << format_g17(a.lambdas[i]);
  } else if (a.family == "maximally_correlated") {
    for (std::size_t i = 0; i < a.amps.size(); ++i)
      label << (i ? "," : "") << format_g17(a.amps[i]);
  } else if (a.family == "product") {
    label << "ra,rb";
  }
  label << ")";
  return label.str();
}

DensityMatrix state_from_gen_args(const GenArgs& a) {
  FamilySpec spec;
  spec.family = a.family;
  spec.p = a.p;
  spec.f = a.f;
  spec.d = a.d;
  if (!a.lambdas.empty()) {
    if (a.lambdas.size() != 4) throw InputError("gen: --lambdas needs exactly 4 values");
    std::copy(a.lambdas.begin(), a.lambdas.end(), spec.lambdas.begin());
  }
  for (double v : a.amps) spec.amplitudes.push_back(Complex(v, 0.0));
  auto to_vec3 = [](const std::vector<double>& v, const char* name) {
    if (v.size() != 3) throw InputError(std::string("gen: ") + name + " needs 3 components");
    return Vec3{v[0], v[1], v[2]};
  };
  if (!a.ra.empty()) spec.bloch_a = to_vec3(a.ra, "--ra");
  if (!a.rb.empty()) spec.bloch_b = to_vec3(a.rb, "--rb");
  return make_family(spec);
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"two-qubit relative-entropy-of-entanglement bound and closest-PPT-state toolkit"};
  app.require_subcommand(1);
  int threads = 1;

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "write a state file for a named family");
  gen->add_option("--family", gen_args.family, "family name")->required();
  gen->add_option("--p", gen_args.p, "pure / pure_closest parameter");
  gen->add_option("--F", gen_args.f, "werner / isotropic fidelity");
  gen->add_option("--d", gen_args.d, "local dimension (isotropic)");
  gen->add_option("--lambdas", gen_args.lambdas, "bell_diagonal weights")->delimiter(',');
  gen->add_option("--amps", gen_args.amps, "maximally_correlated amplitudes")->delimiter(',');
  gen->add_option("--ra", gen_args.ra, "product: Bloch vector of A")->delimiter(',');
  gen->add_option("--rb", gen_args.rb, "product: Bloch vector of B")->delimiter(',');
  std::string gen_output;
  gen->add_option("-o,--out", gen_output, "output state file")->required();

  std::string bound_input, bound_report;
  bool bound_bits = false;
  std::uint64_t bound_seed = 0;
  CLI::App* bound = app.add_subcommand("bound", "constrained upper bound on the REE");
  bound->add_option("--in", bound_input, "input state file")->required();
  bound->add_flag("--bits", bound_bits, "report the headline value in bits");
  bound->add_option("--report", bound_report, "write a JSON report");
  bound->add_option("--seed", bound_seed, "seed recorded in the report");

  std::string oracle_input, oracle_report;
  int oracle_starts = 32;
  std::uint64_t oracle_seed = 0;
  CLI::App* oracle = app.add_subcommand("oracle", "brute-force closest PPT state");
  oracle->add_option("--in", oracle_input, "input state file")->required();
  oracle->add_option("--starts", oracle_starts, "number of descent starts");
  oracle->add_option("--seed", oracle_seed, "random seed");
  oracle->add_option("--report", oracle_report, "write a JSON report");
  oracle->add_option("--threads", threads, "cap internal parallelism");

  std::string check_input, check_sigma, check_report;
  CLI::App* check = app.add_subcommand("check", "stationarity conditions of sigma against rho");
  check->add_option("--in", check_input, "state file for rho")->required();
  check->add_option("--sigma", check_sigma, "state file for sigma")->required();
  check->add_option("--report", check_report, "write a JSON report");

  std::string canonical_input, canonical_output;
  CLI::App* canonical = app.add_subcommand("canonical", "rotate a state to canonical form");
  canonical->add_option("--in", canonical_input, "input state file")->required();
  canonical->add_option("-o,--out", canonical_output, "output state file")->required();

  std::string sweep_family, sweep_param, sweep_output;
  double sweep_from = 0.0, sweep_to = 1.0;
  int sweep_steps = 11;
  bool sweep_with_oracle = false;
  int sweep_oracle_starts = 32;
  std::uint64_t sweep_seed = 0;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "bound along a one-parameter family");
  sweep_cmd->add_option("--family", sweep_family, "family name")->required();
  sweep_cmd->add_option("--param", sweep_param, "parameter name")->required();
  sweep_cmd->add_option("--from", sweep_from, "first parameter value")->required();
  sweep_cmd->add_option("--to", sweep_to, "last parameter value")->required();
  sweep_cmd->add_option("--steps", sweep_steps, "number of rows")->required();
  sweep_cmd->add_option("-o,--out", sweep_output, "output CSV file")->required();
  sweep_cmd->add_flag("--with-oracle", sweep_with_oracle, "add an oracle column");
  sweep_cmd->add_option("--starts", sweep_oracle_starts, "oracle starts per row");
  sweep_cmd->add_option("--seed", sweep_seed, "oracle seed");
  sweep_cmd->add_option("--threads", threads, "cap internal parallelism");

  std::vector<std::string> argv_strings = args;
  argv_strings.insert(argv_strings.begin(), "ree");
  std::vector<char*> argv;
  argv.reserve(argv_strings.size());
  for (std::string& s : argv_strings) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << app.help();
    return 2;
  }

  try {
    if (gen->parsed()) {
      const DensityMatrix state = state_from_gen_args(gen_args);
      write_state_file(gen_output, state, family_label(gen_args));
      out << "wrote " << gen_output << "\n";
      return 0;
    }

    if (bound->parsed()) {
      const LoadedState loaded = read_state_file(bound_input);
      BoundResult result = upper_bound_ree(loaded.state);
      if (bound_bits)
        out << "bound = " << format_g17(result.value.bits) << " bits\n";
      else
        out << "bound = " << format_g17(result.value.nats) << " nats\n";
      out << "bound_nats = " << format_g17(result.value.nats) << "\n";
      out << "bound_bits = " << format_g17(result.value.bits) << "\n";
      out << "tau_star = [" << format_g17(result.tau_star[0]) << ", "
          << format_g17(result.tau_star[1]) << ", " << format_g17(result.tau_star[2]) << "]\n";
      out << "filter_residual_A = " << format_g17(result.condition_a.filter_residual) << "\n";
      out << "filter_residual_B = " << format_g17(result.condition_b.filter_residual) << "\n";
      out << "unitary_residual_A = " << format_g17(result.condition_a.unitary_residual) << "\n";
      out << "unitary_residual_B = " << format_g17(result.condition_b.unitary_residual) << "\n";

      json report = report_skeleton("bound", bound_seed);
      report["input"] = input_digest(loaded);
      json results;
      results["value"] = json_entropy(result.value);
      results["tau_star"] = std::vector<double>{result.tau_star[0], result.tau_star[1],
                                                result.tau_star[2]};
      const OctahedronResult octa = octahedron_check(result.tau_star);
      results["octahedron"] = {{"inside", octa.inside}, {"margin", octa.margin}};
      results["rotation_a"] = json_rotation(result.o_a);
      results["rotation_b"] = json_rotation(result.o_b);
      results["sigma_star"] = json_state(result.sigma_star);
      json diag;
      diag["starts"] = result.diagnostics.starts;
      diag["best_start"] = result.diagnostics.best_start;
      diag["iterations"] = result.diagnostics.iterations;
      diag["final_simplex_size"] = result.diagnostics.final_simplex_size;
      diag["converged"] = result.diagnostics.converged;
      results["diagnostics"] = std::move(diag);
      results["conditions"] = {{"A", json_condition(result.condition_a)},
                               {"B", json_condition(result.condition_b)}};
      report["results"] = std::move(results);
      emit_report(bound_report, report);
      return 0;
    }

    if (oracle->parsed()) {
      const LoadedState loaded = read_state_file(oracle_input);
      OracleOptions options;
      options.threads = threads;
      OracleResult result = closest_ppt_oracle(loaded.state, oracle_starts, oracle_seed, options);
      out << "oracle_nats = " << format_g17(result.value.nats) << "\n";
      out << "oracle_bits = " << format_g17(result.value.bits) << "\n";
      out << "starts = " << result.starts << "\n";

      json report = report_skeleton("oracle", oracle_seed);
      report["input"] = input_digest(loaded);
      json results;
      results["value"] = json_entropy(result.value);
      results["starts"] = result.starts;
      json per_start = json::array();
      for (double v : result.per_start_nats) per_start.push_back(json_double(v));
      results["per_start_nats"] = std::move(per_start);
      results["sigma_star"] = json_state(result.sigma_star);
      report["results"] = std::move(results);
      emit_report(oracle_report, report);
      return 0;
    }

    if (check->parsed()) {
      const LoadedState rho = read_state_file(check_input);
      const LoadedState sigma = read_state_file(check_sigma);
      const ConditionReport cond_a = filter_residual(rho.state, sigma.state, Party::A);
      const ConditionReport cond_b = filter_residual(rho.state, sigma.state, Party::B);
      const Category category = category_classify(rho.state, sigma.state);

      out << "category = " << category_name(category) << "\n";
      out << "filter_residual_A = " << format_g17(cond_a.filter_residual) << "\n";
      out << "filter_residual_B = " << format_g17(cond_b.filter_residual) << "\n";
      out << "unitary_residual_A = " << format_g17(cond_a.unitary_residual) << "\n";
      out << "unitary_residual_B = " << format_g17(cond_b.unitary_residual) << "\n";

      json report = report_skeleton("check", 0);
      report["input"] = input_digest(rho);
      report["sigma"] = input_digest(sigma);
      json results;
      results["category"] = category_name(category);
      results["conditions"] = {{"A", json_condition(cond_a)}, {"B", json_condition(cond_b)}};
      if (rho.state.dim_a() == 2 && rho.state.dim_b() == 2) {
        WeakConstraintReport weak;
        try {
          weak = weak_constraint_residual(rho.state, sigma.state, true);
        } catch (const InputError&) {
          weak = weak_constraint_residual(rho.state, sigma.state, false);
        }
        json wj;
        wj["reduction_diff_a"] = weak.reduction_diff_a;
        wj["reduction_diff_b"] = weak.reduction_diff_b;
        wj["commutator_reduction_a"] = weak.commutator_reduction_a;
        wj["commutator_reduction_b"] = weak.commutator_reduction_b;
        wj["has_tau_t"] = weak.has_tau_t;
        if (weak.has_tau_t)
          wj["tau_t_residuals"] = std::vector<double>(weak.tau_t_residuals.begin(),
                                                      weak.tau_t_residuals.end());
        results["weak_constraints"] = std::move(wj);
      }
      report["results"] = std::move(results);
      emit_report(check_report, report);
      return 0;
    }

    if (canonical->parsed()) {
      const LoadedState loaded = read_state_file(canonical_input);
      const CanonicalForm form = canonical_form(loaded.state);
      const std::string label =
          loaded.label.empty() ? std::string("canonical") : ("canonical:" + loaded.label);
      write_state_file(canonical_output, form.state, label);
      out << "wrote " << canonical_output << "\n";
      return 0;
    }

    if (sweep_cmd->parsed()) {
      OracleOptions oracle_options;
      oracle_options.threads = threads;
      const SweepTable table =
          sweep(sweep_family, sweep_param, sweep_from, sweep_to, sweep_steps, sweep_with_oracle,
                sweep_seed, sweep_oracle_starts, oracle_options);
      write_text_file(sweep_output, sweep_csv(table));
      out << "wrote " << sweep_output << " (" << table.rows.size() << " rows)\n";
      return 0;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NotAStateError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const NotPsdError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const SupportError& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const SingularityError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  err << "error: no command\n";
  return 2;
}

}  // namespace ree
