#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtur/classical_bridge.hpp"
#include "qtur/degeneracy.hpp"
#include "qtur/error.hpp"
#include "qtur/fcs_bridge.hpp"
#include "qtur/io.hpp"
#include "qtur/parallel.hpp"
#include "qtur/quasiprobability.hpp"
#include "qtur/thermodynamics.hpp"

namespace qtur::cli {
namespace {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_number(v[i]);
  }
  return s;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::string input_hash(const std::filesystem::path& path) {
  return hex64(fnv1a(read_text_file(path)));
}

// Options echoed into every report, in a fixed order.
std::vector<std::pair<std::string, std::string>> header(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> h;
  h.emplace_back("tool", std::string("qtur ") + kVersion);
  h.emplace_back("command", to_string(c.command));
  auto input = [&](const char* key, const std::filesystem::path& p) {
    if (p.empty()) return;
    h.emplace_back(key, p.filename().string());
    h.emplace_back(std::string(key) + "_fnv1a", input_hash(p));
  };
  input("model", c.model);
  input("state", c.state);
  input("observable", c.observable);
  switch (c.command) {
    case Command::kPropagate:
      h.emplace_back("time", format_number(c.time));
      break;
    case Command::kSweep:
      h.emplace_back("delta_t", join(c.delta_t));
      break;
    case Command::kFcsCompare:
      h.emplace_back("lambda", c.lambda_grid.empty() ? "default" : join(c.lambda_grid));
      h.emplace_back("lambda_points", std::to_string(c.lambda_points));
      break;
    case Command::kExample:
      h.emplace_back("sign", c.sign);
      h.emplace_back("n", join(c.n_values));
      h.emplace_back("omega", format_number(c.omega));
      h.emplace_back("gammas", format_number(c.gamma_plus) + "," + format_number(c.gamma_minus));
      h.emplace_back("pg", format_number(c.p_g));
      h.emplace_back("bias", c.bias ? format_number(*c.bias) : "none");
      h.emplace_back("basis", c.basis);
      break;
    default:
      break;
  }
  h.emplace_back("eigenvalue_floor", c.flooring ? format_number(c.eigenvalue_floor) : "off");
  h.emplace_back("tolerance", format_number(c.tolerance));
  h.emplace_back("seed", std::to_string(c.seed));
  h.emplace_back("workers", std::to_string(c.workers));
  return h;
}

json header_json(const RunConfig& c) {
  json j = json::object();
  for (const auto& [k, v] : header(c)) j[k] = v;
  return j;
}

class Csv {
 public:
  explicit Csv(const RunConfig& c) {
    for (const auto& [k, v] : header(c)) text_ += "# " + k + "=" + v + "\n";
  }
  void comment(const std::string& key, const std::string& value) {
    text_ += "# " + key + "=" + value + "\n";
  }
  void columns(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) text_ += (i ? "," : "") + names[i];
    text_ += '\n';
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) text_ += (i ? "," : "") + format_number(values[i]);
    text_ += '\n';
  }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
  if (c.output.empty()) {
    out << text;
  } else {
    write_text_file(c.output, text);
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json matrix_json(const Operator& m) {
  return json::parse(state_to_json(m)).at("rho");
}

EntropyOptions entropy_options(const RunConfig& c) {
  EntropyOptions o;
  o.eigenvalue_floor = c.eigenvalue_floor;
  o.flooring = c.flooring;
  return o;
}

json tur_json(const TURReport& r) {
  json j;
  j["epr"] = r.epr;
  j["current"] = r.current;
  j["fluctuation"] = r.fluctuation;
  j["bound"] = r.bound;
  j["slack"] = r.slack;
  j["diffusivity"] = r.diffusivity;
  j["diffusivity_bound"] = r.diffusivity_bound;
  j["floored"] = r.floored;
  j["eigenvalue_floor"] = r.eigenvalue_floor;
  j["satisfied"] = r.satisfied();
  return j;
}

int cmd_validate(const RunConfig& c, std::ostream& out) {
  const LindbladModel model = load_model(c.model);
  const DetailedBalanceReport ldb = validate_local_detailed_balance(model, c.tolerance);
  json report;
  report["config"] = header_json(c);
  report["dim"] = model.dim();
  report["pairs"] = model.jump_pairs().size();
  json pairs = json::array();
  for (std::size_t k = 0; k < model.jump_pairs().size(); ++k) {
    json p;
    p["entropy_current"] = model.jump_pairs()[k].entropy_current;
    p["residual"] = ldb.residuals[k];
    pairs.push_back(p);
  }
  report["jump_pairs"] = pairs;
  report["detailed_balance_passed"] = ldb.passed();
  bool ok = ldb.passed();
  if (!c.state.empty()) {
    const QuantumState rho = load_state(c.state);
    if (rho.dim() != model.dim()) throw Error(ErrorCode::kDimMismatch, "state and model dimensions differ");
    report["state_min_eigenvalue"] = min_eigenvalue(rho.matrix());
  }
  if (!c.observable.empty()) {
    const Operator x = load_observable(c.observable);
    if (x.rows() != model.dim()) throw Error(ErrorCode::kDimMismatch, "observable and model dimensions differ");
    const CommutationResult comm = commutation_check(model, x, c.tolerance);
    report["current_observable"] = comm.holds();
    report["jump_weights"] = comm.weights;
  }
  report["valid"] = ok;
  emit(c, dump(report), out);
  return ok ? kExitOk : kExitValidation;
}

int cmd_propagate(const RunConfig& c, std::ostream& out) {
  const LindbladModel model = load_model(c.model);
  const QuantumState rho0 = load_state(c.state);
  const QuantumState rho = propagate(model, rho0, c.time);
  json report;
  report["config"] = header_json(c);
  report["time"] = c.time;
  report["min_eigenvalue"] = min_eigenvalue(rho.matrix());
  report["purity"] = (rho.matrix() * rho.matrix()).trace().real();
  report["rho"] = matrix_json(rho.matrix());
  emit(c, dump(report), out);
  return kExitOk;
}

int cmd_tur(const RunConfig& c, std::ostream& out) {
  const LindbladModel model = load_model(c.model);
  const QuantumState rho = load_state(c.state);
  const Operator x = load_observable(c.observable);
  const TURReport r = tur_check(model, rho, x, entropy_options(c));
  const CurrentDecomposition j = currents(model, rho, x);
  const FluxMatrix flux = flux_matrix(model, rho, ObservableDecomposition::from_operator(x));
  json report;
  report["config"] = header_json(c);
  report["tur"] = tur_json(r);
  report["hamiltonian_current"] = j.hamiltonian_part;
  report["escape_rate"] = escape_rate(flux);
  report["min_flux"] = flux.values.minCoeff();
  emit(c, dump(report), out);
  return r.satisfied() ? kExitOk : kExitValidation;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
  const LindbladModel model = load_model(c.model);
  const QuantumState rho = load_state(c.state);
  const Operator x_op = load_observable(c.observable);
  const auto x = ObservableDecomposition::from_operator(x_op);
  const FluxMatrix flux = flux_matrix(model, rho, x);
  const double m_x = short_time_moment(flux, 2).value;

  struct Row {
    double min_entry, negativity, m1, m2, gf_m2;
  };
  const auto rows = parallel_map(c.delta_t.size(), c.workers, [&](std::size_t i) {
    const double dt = c.delta_t[i];
    const QuasiprobTable t = tmh_table(model, rho, x, dt);
    return Row{t.min_entry(), t.values.cwiseMin(0.0).cwiseAbs().sum(), table_moment(t, 1),
               table_moment(t, 2), generating_function_moment(model, rho, x, 2, dt).value};
  });

  Csv csv(c);
  csv.comment("m_x", format_number(m_x));
  csv.comment("escape_rate", format_number(escape_rate(flux)));
  csv.columns({"delta_t", "min_q", "negativity", "m1", "m2", "m2_over_dt", "m2_generating_function"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    csv.row({c.delta_t[i], r.min_entry, r.negativity, r.m1, r.m2, r.m2 / c.delta_t[i], r.gf_m2});
  }
  emit(c, csv.text(), out);
  return kExitOk;
}

int cmd_fcs_compare(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const LindbladModel model = load_model(c.model);
  const QuantumState rho = load_state(c.state);
  const Operator x = load_observable(c.observable);
  std::vector<double> grid = c.lambda_grid;
  if (grid.empty()) grid = default_lambda_grid(ObservableDecomposition::from_operator(x), c.lambda_points);
  const GeneratingRateComparison r = compare_rates(model, rho, x, grid, c.tolerance, c.workers);

  Csv csv(c);
  csv.comment("weights", join(r.weights));
  csv.comment("residual", format_number(r.residual));
  csv.comment("scale", format_number(r.scale));
  for (const auto& m : r.even_moments) {
    csv.comment("moment" + std::to_string(m.order), format_number(m.tmh) + "," + format_number(m.fcs));
  }
  csv.columns({"lambda", "tmh_re", "tmh_im", "fcs_re", "fcs_im", "predicted_re", "predicted_im"});
  for (std::size_t i = 0; i < r.lambda_grid.size(); ++i) {
    csv.row({r.lambda_grid[i], r.tmh_rate[i].real(), r.tmh_rate[i].imag(), r.fcs_rate[i].real(),
             r.fcs_rate[i].imag(), r.predicted_difference[i].real(), r.predicted_difference[i].imag()});
  }
  emit(c, csv.text(), out);
  if (r.residual > c.tolerance * r.scale) {
    err << "qtur: rate difference residual " << format_number(r.residual) << " exceeds tolerance\n";
    return kExitValidation;
  }
  return kExitOk;
}

int cmd_classical_check(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ClassicalModelFile file = load_classical_model(c.model);
  QuantizationOptions options;
  options.entropy = entropy_options(c);
  if (!c.lambda_grid.empty()) options.lambda_grid = c.lambda_grid;
  const QuantizationReport r = quantize_and_compare(file.rate_matrix, file.p0, file.f, options);

  json report;
  report["config"] = header_json(c);
  report["m_quantum"] = r.m_quantum;
  report["m_classical"] = r.m_classical;
  report["m_residual"] = r.m_residual;
  report["table_steps"] = r.table_steps;
  report["table_residuals"] = r.table_residuals;
  report["min_table_entry"] = r.min_table_entry;
  report["generating_residual"] = r.generating_residual;
  report["max_residual"] = r.max_residual();
  report["irreversible"] = r.irreversible;
  report["classical_current"] = r.classical_current;
  report["tur"] = r.tur ? tur_json(*r.tur) : json(nullptr);
  emit(c, dump(report), out);
  if (r.max_residual() > c.tolerance) {
    err << "qtur: quantized and classical statistics differ by " << format_number(r.max_residual())
        << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

BasisKind parse_basis(const std::string& s) {
  if (s == "product") return BasisKind::kProduct;
  if (s == "fourier") return BasisKind::kFourier;
  if (s == "random") return BasisKind::kRandom;
  throw Error(ErrorCode::kInvalidArgument, "unknown basis '" + s + "'");
}

int cmd_example(const RunConfig& c, std::ostream& out, std::ostream& err) {
  SweepOptions o;
  o.params.omega = c.omega;
  o.params.gamma_plus = c.gamma_plus;
  o.params.gamma_minus = c.gamma_minus;
  o.params.p_g = c.p_g;
  o.n_values = c.n_values;
  o.state = parse_collective_state(c.sign);
  o.basis = parse_basis(c.basis);
  o.bias = c.bias;
  o.eigenvalue_floor = c.flooring ? c.eigenvalue_floor : 0.0;
  o.seed = c.seed;
  o.workers = c.workers;
  const ScalingSweepReport r = scaling_sweep(o);
  const bool closed = o.state != CollectiveState::kClassical;

  Csv csv(c);
  auto fit = [&](const char* name, const ExponentFit& f) {
    csv.comment(std::string(name) + "_exponent", format_number(f.exponent));
    csv.comment(std::string(name) + "_r2", format_number(f.r_squared));
  };
  fit("m_x", r.m_x_fit);
  fit("escape_rate", r.escape_rate_fit);
  fit("current", r.current_fit);
  fit("bound", r.bound_fit);
  if (r.points.size() >= 4) {
    const QDiagnostics q = q1_q2_diagnostics(r);
    csv.comment("q1", q.q1.satisfied ? "satisfied" : "not_satisfied");
    csv.comment("q1_slope", format_number(q.q1.fit.exponent));
    csv.comment("q2", q.q2.satisfied ? "satisfied" : "not_satisfied");
    csv.comment("q2_slope", format_number(q.q2.fit.exponent));
  }
  std::vector<std::string> cols = {"N", "p_g", "m_X", "escape_rate", "min_T", "J_d", "epr", "bound",
                                   "l1_coherence"};
  if (closed) {
    cols.insert(cols.end(), {"m_H_closed", "escape_rate_closed", "T_eg_closed"});
  }
  csv.columns(cols);

  double worst = 0.0;
  for (const SweepPoint& p : r.points) {
    std::vector<double> row = {static_cast<double>(p.n), p.p_g, p.m_x, p.escape_rate,
                               p.min_integrated_flux, p.current, p.epr, p.bound, p.l1_coherence};
    if (closed) {
      CollectiveModelParams params = o.params;
      params.n_levels = p.n;
      params.p_g = p.p_g;
      const ClosedFormFluxes ref = closed_form_reference(params, o.state);
      row.insert(row.end(), {ref.m_h, ref.escape_rate, ref.t_eg});
      worst = std::max(worst, std::abs(p.m_x - ref.m_h) / std::max(1.0, ref.m_h));
      if (o.basis == BasisKind::kProduct) {
        worst = std::max(worst, std::abs(p.escape_rate - ref.escape_rate) / std::max(1.0, ref.escape_rate));
      }
    }
    csv.row(row);
  }
  if (closed) csv.comment("closed_form_max_relative_error", format_number(worst));
  emit(c, csv.text(), out);
  if (worst > 1e-8) {
    err << "qtur: closed forms disagree by " << format_number(worst) << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

void require_file(const std::filesystem::path& p, const char* what) {
  if (p.empty()) throw Error(ErrorCode::kInvalidArgument, std::string("--") + what + " is required");
  if (!std::filesystem::exists(p)) {
    throw Error(ErrorCode::kIo, std::string(what) + " file not found: " + p.string());
  }
}

}  // namespace

std::string to_string(Command command) {
  switch (command) {
    case Command::kValidate: return "validate";
    case Command::kPropagate: return "propagate";
    case Command::kTur: return "tur";
    case Command::kSweep: return "sweep";
    case Command::kFcsCompare: return "fcs-compare";
    case Command::kClassicalCheck: return "classical-check";
    case Command::kExample: return "example";
  }
  return "?";
}

void RunConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must be positive");
    }
  };
  positive(tolerance, "tolerance");
  if (flooring) positive(eigenvalue_floor, "eigenvalue floor");
  if (workers == 0) throw Error(ErrorCode::kInvalidArgument, "workers must be >= 1");
  switch (command) {
    case Command::kValidate:
      require_file(model, "model");
      if (!state.empty()) require_file(state, "state");
      if (!observable.empty()) require_file(observable, "observable");
      break;
    case Command::kPropagate:
      require_file(model, "model");
      require_file(state, "state");
      if (!(time >= 0.0) || !std::isfinite(time)) {
        throw Error(ErrorCode::kInvalidArgument, "time must be non-negative");
      }
      break;
    case Command::kSweep:
      if (delta_t.empty()) throw Error(ErrorCode::kInvalidArgument, "delta-t list is empty");
      for (double dt : delta_t) positive(dt, "delta-t");
      [[fallthrough]];
    case Command::kTur:
    case Command::kFcsCompare:
      require_file(model, "model");
      require_file(state, "state");
      require_file(observable, "observable");
      if (lambda_points < 2) throw Error(ErrorCode::kInvalidArgument, "lambda-points must be >= 2");
      break;
    case Command::kClassicalCheck:
      require_file(model, "model");
      break;
    case Command::kExample:
      if (n_values.empty()) throw Error(ErrorCode::kInvalidArgument, "N list is empty");
      for (std::size_t i = 1; i < n_values.size(); ++i) {
        if (n_values[i] <= n_values[i - 1]) {
          throw Error(ErrorCode::kInvalidArgument, "N list must be strictly ascending");
        }
      }
      break;
  }
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    switch (config.command) {
      case Command::kValidate: return cmd_validate(config, out);
      case Command::kPropagate: return cmd_propagate(config, out);
      case Command::kTur: return cmd_tur(config, out);
      case Command::kSweep: return cmd_sweep(config, out);
      case Command::kFcsCompare: return cmd_fcs_compare(config, out, err);
      case Command::kClassicalCheck: return cmd_classical_check(config, out, err);
      case Command::kExample: return cmd_example(config, out, err);
    }
  } catch (const Error& e) {
    err << "qtur: " << qtur::to_string(e.code()) << ": " << e.what() << "\n";
    return (e.code() == ErrorCode::kIo || e.code() == ErrorCode::kParse) ? kExitInput
                                                                           : kExitValidation;
  } catch (const std::exception& e) {
    err << "qtur: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

namespace {

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("-o,--output", c.output, "Report file (stdout when omitted)");
  sub->add_option("--tolerance", c.tolerance, "Absolute tolerance for validation checks")
      ->capture_default_str();
  sub->add_option("--seed", c.seed, "Seed for randomized choices")->capture_default_str();
  sub->add_option("--workers", c.workers, "Worker threads")->capture_default_str();
}

void add_floor(CLI::App* sub, RunConfig& c, bool& no_floor) {
  sub->add_option("--eigenvalue-floor", c.eigenvalue_floor,
                  "Floor for rank-deficient states in entropy terms")
      ->capture_default_str();
  sub->add_flag("--no-floor", no_floor, "Reject rank-deficient states instead of flooring");
}

void add_inputs(CLI::App* sub, RunConfig& c, bool state, bool observable) {
  sub->add_option("--model", c.model, "Model JSON file")->required();
  if (state) sub->add_option("--state", c.state, "State JSON file")->required();
  if (observable) sub->add_option("--observable", c.observable, "Observable JSON file")->required();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quasiprobability thermodynamic uncertainty toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunConfig c;
  bool no_floor = false;
  std::vector<double> gammas = {c.gamma_plus, c.gamma_minus};
  std::optional<double> bias;

  auto* validate = app.add_subcommand("validate", "Check a model (and optional state/observable)");
  validate->add_option("--model", c.model, "Model JSON file")->required();
  validate->add_option("--state", c.state, "State JSON file");
  validate->add_option("--observable", c.observable, "Observable JSON file");
  add_common(validate, c);

  auto* propagate_cmd = app.add_subcommand("propagate", "Evolve a state under the model");
  add_inputs(propagate_cmd, c, true, false);
  propagate_cmd->add_option("-t,--time", c.time, "Evolution time")->capture_default_str();
  add_common(propagate_cmd, c);

  auto* tur = app.add_subcommand("tur", "Entropy production, current, fluctuation and the TUR bound");
  add_inputs(tur, c, true, true);
  add_floor(tur, c, no_floor);
  add_common(tur, c);

  auto* sweep = app.add_subcommand("sweep", "Quasiprobability table statistics over a step grid");
  add_inputs(sweep, c, true, true);
  sweep->add_option("--dt", c.delta_t, "Time steps")->delimiter(',')->capture_default_str();
  add_common(sweep, c);

  auto* fcs = app.add_subcommand("fcs-compare", "Compare quasiprobability and counting rate functions");
  add_inputs(fcs, c, true, true);
  fcs->add_option("--lambda", c.lambda_grid, "Explicit lambda grid")->delimiter(',');
  fcs->add_option("--lambda-points", c.lambda_points, "Points in the default lambda grid")
      ->capture_default_str();
  add_common(fcs, c);

  auto* classical = app.add_subcommand("classical-check", "Quantize a classical chain and compare");
  classical->add_option("--model", c.model, "Classical model JSON file")->required();
  classical->add_option("--lambda", c.lambda_grid, "Explicit lambda grid")->delimiter(',');
  add_floor(classical, c, no_floor);
  add_common(classical, c);

  auto* example = app.add_subcommand("example", "Degenerate two-level collective model sweep");
  example->add_option("--sign", c.sign, "State: +, - or classical")->capture_default_str();
  example->add_option("--n", c.n_values, "Ascending degeneracies")->delimiter(',')->capture_default_str();
  example->add_option("--omega", c.omega, "Level splitting")->capture_default_str();
  example->add_option("--gammas", gammas, "gamma_plus,gamma_minus")
      ->delimiter(',')
      ->expected(2)
      ->capture_default_str();
  example->add_option("--pg", c.p_g, "Ground population")->capture_default_str();
  example->add_option("--bias", bias, "Set p_g so that gamma_+ p_g - gamma_- p_e = bias / N");
  example->add_option("--basis", c.basis, "product, fourier or random")->capture_default_str();
  add_floor(example, c, no_floor);
  add_common(example, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  if (validate->parsed()) c.command = Command::kValidate;
  if (propagate_cmd->parsed()) c.command = Command::kPropagate;
  if (tur->parsed()) c.command = Command::kTur;
  if (sweep->parsed()) c.command = Command::kSweep;
  if (fcs->parsed()) c.command = Command::kFcsCompare;
  if (classical->parsed()) c.command = Command::kClassicalCheck;
  if (example->parsed()) c.command = Command::kExample;
  c.flooring = !no_floor;
  c.gamma_plus = gammas[0];
  c.gamma_minus = gammas[1];
  c.bias = bias;
  return run(c, out, err);
}

}  // namespace qtur::cli
