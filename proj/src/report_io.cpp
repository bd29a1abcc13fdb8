#include "kirchhoff/report_io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <stdexcept>

#include "kirchhoff/operator_assembly.hpp"
#include "kirchhoff/radial_grid.hpp"
#include "kirchhoff/shooting_oracle.hpp"

namespace kirchhoff {

namespace {

using nlohmann::ordered_json;

RadialGrid natural_grid(const BubbleSpec& spec, int n) {
  const double scale = scaling_constants(spec.params).sqrt_c * spec.lambda;
  return RadialGrid(GridSpec{n, scale, MapKind::algebraic});
}

CliReport stamp(const RunConfig& config) {
  CliReport report;
  report.config = config;
  if (config.with_timestamp) report.timestamp = current_timestamp();
  return report;
}

Status worst(Status lhs, Status rhs) {
  if (lhs == Status::fail || rhs == Status::fail) return Status::fail;
  if (lhs == Status::inconclusive || rhs == Status::inconclusive)
    return Status::inconclusive;
  return Status::pass;
}

void push_check(VerificationReport& report, const std::string& name,
                double value, double tolerance, bool pass) {
  report.identity_checks.push_back(IdentityCheck{name, value, tolerance, pass});
  if (!pass) report.status = Status::fail;
}

// Appends checks, notes and convergence points; adopts the kernel block when
// the fragment carries one.  Status degrades, never improves.
void merge(VerificationReport& into, const VerificationReport& part) {
  into.identity_checks.insert(into.identity_checks.end(),
                              part.identity_checks.begin(),
                              part.identity_checks.end());
  into.notes.insert(into.notes.end(), part.notes.begin(), part.notes.end());
  into.convergence.insert(into.convergence.end(), part.convergence.begin(),
                          part.convergence.end());
  if (!part.kernel_counts.empty()) {
    into.kernel_counts = part.kernel_counts;
    into.kernel_alignments = part.kernel_alignments;
    into.coercivity_gap = part.coercivity_gap;
    into.total_kernel_dim = part.total_kernel_dim;
    into.tol_kernel = part.tol_kernel;
  }
  into.status = worst(into.status, part.status);
}

void note_value(VerificationReport& report, const std::string& name,
                double value) {
  report.notes.push_back(name + " = " + format_g17(value));
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::domain_error(std::string(what) + " must be finite");
}

void validate(const RunConfig& config) {
  require_finite(config.params.a, "a");
  require_finite(config.params.b, "b");
  require_finite(config.lambda, "lambda");
  for (double coord : config.x0) require_finite(coord, "x0");
  if (config.lambda <= 0.0) throw std::domain_error("lambda must be positive");
  if (config.n < 16) throw std::domain_error("grid size must be at least 16");
  if (config.count < 1) throw std::domain_error("eigenvalue count must be positive");
  if (config.sector < 0) throw std::domain_error("sector index must be nonnegative");
  if (config.format != "json" && config.format != "csv")
    throw std::domain_error("format must be json or csv");
  scaling_constants(config.params);  // rejects a <= 0, b < 0
}

VerifierTolerances tolerances_of(const RunConfig& config) {
  VerifierTolerances tolerances;
  tolerances.tol_kernel = config.tol_kernel;
  return tolerances;
}

}  // namespace

bool operator==(const RunConfig& lhs, const RunConfig& rhs) {
  return lhs.command == rhs.command && lhs.params.a == rhs.params.a &&
         lhs.params.b == rhs.params.b && lhs.lambda == rhs.lambda &&
         lhs.x0 == rhs.x0 && lhs.n == rhs.n && lhs.ell_max == rhs.ell_max &&
         lhs.sector == rhs.sector && lhs.count == rhs.count &&
         lhs.tol_kernel == rhs.tol_kernel && lhs.format == rhs.format &&
         lhs.out_path == rhs.out_path &&
         lhs.with_timestamp == rhs.with_timestamp;
}

bool operator==(const SpectrumRow& lhs, const SpectrumRow& rhs) {
  return lhs.sector == rhs.sector && lhs.index == rhs.index &&
         lhs.eigenvalue == rhs.eigenvalue &&
         lhs.kernel_flag == rhs.kernel_flag && lhs.alignment == rhs.alignment;
}

bool operator==(const IdentityCheck& lhs, const IdentityCheck& rhs) {
  return lhs.name == rhs.name && lhs.value == rhs.value &&
         lhs.tolerance == rhs.tolerance && lhs.pass == rhs.pass;
}

bool operator==(const ConvergencePoint& lhs, const ConvergencePoint& rhs) {
  return lhs.n == rhs.n && lhs.kernel_magnitude == rhs.kernel_magnitude &&
         lhs.coercivity_gap == rhs.coercivity_gap &&
         lhs.worst_alignment == rhs.worst_alignment &&
         lhs.spectral_scale == rhs.spectral_scale;
}

bool operator==(const VerificationReport& lhs, const VerificationReport& rhs) {
  return lhs.status == rhs.status &&
         lhs.identity_checks == rhs.identity_checks &&
         lhs.kernel_counts == rhs.kernel_counts &&
         lhs.kernel_alignments == rhs.kernel_alignments &&
         lhs.coercivity_gap == rhs.coercivity_gap &&
         lhs.total_kernel_dim == rhs.total_kernel_dim &&
         lhs.tol_kernel == rhs.tol_kernel &&
         lhs.convergence == rhs.convergence && lhs.notes == rhs.notes;
}

bool operator==(const CliReport& lhs, const CliReport& rhs) {
  return lhs.config == rhs.config && lhs.body == rhs.body &&
         lhs.spectrum == rhs.spectrum && lhs.timestamp == rhs.timestamp;
}

std::string format_g17(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

std::string current_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm parts{};
  gmtime_r(&now, &parts);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &parts);
  return buffer;
}

CliReport cmd_constants(const RunConfig& config) {
  CliReport report = stamp(config);
  VerificationReport& body = report.body;
  body.status = Status::pass;

  const ScalingConstants constants = scaling_constants(config.params);
  const double kappa = contraction_ratio(config.params);
  note_value(body, "grad_energy", constants.grad_energy);
  note_value(body, "sqrt_c", constants.sqrt_c);
  note_value(body, "c", constants.c);
  note_value(body, "kappa", kappa);

  try {
    const FixedPointResult oracle = kirchhoff_fixed_point(config.params);
    const double diff = std::abs(oracle.c - constants.c) / constants.c;
    note_value(body, "fixed_point_c", oracle.c);
    body.notes.push_back("fixed_point_iterations = " +
                         std::to_string(oracle.iterations));
    push_check(body, "constants_fixed_point_rel", diff, 1e-10, diff <= 1e-10);
    push_check(body, "contraction_ratio", kappa, 0.5, kappa < 0.5);
  } catch (const std::runtime_error& error) {
    body.notes.push_back(std::string("fixed point aborted: ") + error.what());
    body.status = Status::fail;
  }
  return report;
}

CliReport cmd_kernel(const RunConfig& config) {
  CliReport report = stamp(config);
  const BubbleSpec spec{config.params, config.lambda, config.x0};
  try {
    report.body = kernel_report(natural_grid(spec, config.n), spec,
                                config.ell_max, tolerances_of(config));
  } catch (const std::runtime_error& error) {
    report.body.notes.push_back(std::string("kernel scan aborted: ") +
                                error.what());
    report.body.status = Status::fail;
  }
  return report;
}

CliReport cmd_verify(const RunConfig& config) {
  CliReport report = stamp(config);
  VerificationReport& body = report.body;
  body.status = Status::pass;
  const BubbleSpec spec{config.params, config.lambda, config.x0};

  const double width = scaling_constants(config.params).sqrt_c * config.lambda;
  const Vec3 center = bubble_center(spec);
  const Vec3 rays[4] = {{1.0, 0.0, 0.0},
                        {0.0, 1.0, 0.0},
                        {0.0, 0.0, 1.0},
                        {0.57735026918962576, 0.57735026918962576,
                         0.57735026918962576}};
  double residual_max = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double r = width * 40.0 * i / 99.0;
    const Vec3& ray = rays[i % 4];
    const Vec3 x = {center[0] + r * ray[0], center[1] + r * ray[1],
                    center[2] + r * ray[2]};
    residual_max = std::max(residual_max, std::abs(equation_residual(spec, x)));
  }
  push_check(body, "equation_residual_max", residual_max, 1e-10,
             residual_max <= 1e-10);
  const double kappa = contraction_ratio(config.params);
  push_check(body, "contraction_ratio", kappa, 0.5, kappa < 0.5);

  try {
    const RadialGrid grid = natural_grid(spec, config.n);
    merge(body, proof_chain_check(grid, spec));
    merge(body, kernel_report(grid, spec, config.ell_max, tolerances_of(config)));
  } catch (const std::runtime_error& error) {
    body.notes.push_back(std::string("operator stage aborted: ") + error.what());
    body.status = Status::fail;
  }
  return report;
}

CliReport cmd_spectrum(const RunConfig& config) {
  CliReport report = stamp(config);
  VerificationReport& body = report.body;
  body.status = Status::pass;
  const BubbleSpec spec{config.params, config.lambda, config.x0};
  if (config.count > config.n)
    throw std::domain_error("eigenvalue count exceeds the grid size");

  try {
    const RadialGrid grid = natural_grid(spec, config.n);
    const SectorOperator op = assemble_Lplus_sector(grid, spec, config.sector);
    const EigenResult eig = lowest_eigenpairs(op, config.count);

    const double scale = 4.0 * scaling_constants(config.params).c;
    const double flag_tol =
        config.tol_kernel > 0.0 ? config.tol_kernel : 1e-8 * scale;
    Eigen::VectorXd mode;
    if (config.sector == 0)
      mode = sampled_dilation_profile(grid, spec);
    else if (config.sector == 1)
      mode = sampled_translation_profile(grid, spec);
    double mode_norm = 0.0;
    if (mode.size() > 0)
      mode_norm = std::sqrt(mode.dot(op.gram * mode));

    int flagged = 0;
    for (int i = 0; i < eig.eigenvalues.size(); ++i) {
      SpectrumRow row;
      row.sector = config.sector;
      row.index = i;
      row.eigenvalue = eig.eigenvalues[i];
      row.kernel_flag = std::abs(row.eigenvalue) <= flag_tol;
      if (mode_norm > 0.0)
        row.alignment = std::min(
            1.0,
            std::abs(eig.eigenvectors.col(i).dot(op.gram * mode)) / mode_norm);
      flagged += row.kernel_flag ? 1 : 0;
      report.spectrum.push_back(row);
    }
    const int expected = config.sector <= 1 ? 1 : 0;
    push_check(body, "spectrum_kernel_count", flagged, expected,
               flagged == expected);
    note_value(body, "kernel_flag_threshold", flag_tol);
  } catch (const std::runtime_error& error) {
    body.notes.push_back(std::string("spectrum aborted: ") + error.what());
    body.status = Status::fail;
  }
  return report;
}

CliReport cmd_shoot(const RunConfig& config) {
  CliReport report = stamp(config);
  VerificationReport& body = report.body;
  body.status = Status::pass;

  try {
    const ShootResult probe = shoot_ground_state(1.0, bubble_value(0.0));
    push_check(body, "shoot_profile_error", probe.max_rel_err, 1e-6,
               probe.max_rel_err <= 1e-6);

    const double alpha = bubble_value(0.0) / std::sqrt(config.lambda);
    const ShootResult found = self_consistent_rediscovery(config.params, alpha);
    const double c_closed = scaling_constants(config.params).c;
    const double c_rel = std::abs(found.c - c_closed) / c_closed;
    push_check(body, "rediscovered_c_rel", c_rel, 1e-10, c_rel <= 1e-10);
    push_check(body, "rediscovery_profile_error", found.max_rel_err, 1e-5,
               found.max_rel_err <= 1e-5);
    const double scale_rel =
        std::abs(found.lambda_fit - config.lambda) / config.lambda;
    push_check(body, "family_scale_rel", scale_rel, 1e-12,
               scale_rel <= 1e-12);
    push_check(body, "fixed_point_iterations", found.iterations, 60,
               found.iterations <= 60);

    const ShootResult again =
        self_consistent_rediscovery(config.params, 1.7 * alpha);
    const double alpha_rel = std::abs(again.c - found.c) / found.c;
    push_check(body, "alpha_consistency", alpha_rel, 1e-10, alpha_rel <= 1e-10);

    note_value(body, "c", found.c);
    note_value(body, "decay_constant", found.decay_constant);
    note_value(body, "grad_energy", found.grad_energy);
    body.notes.push_back("samples = " + std::to_string(found.radii.size()));
  } catch (const std::runtime_error& error) {
    body.notes.push_back(std::string("shooting aborted: ") + error.what());
    body.status = Status::fail;
  }
  return report;
}

CliReport cmd_sweep(const RunConfig& config) {
  CliReport report = stamp(config);
  if (config.n < 64)
    throw std::domain_error("sweep needs a top grid size of at least 64");
  const BubbleSpec spec{config.params, config.lambda, config.x0};
  const std::vector<int> sizes = {config.n / 2, 3 * config.n / 4, config.n};
  try {
    report.body =
        convergence_sweep(spec, sizes, config.ell_max, tolerances_of(config));
  } catch (const std::runtime_error& error) {
    report.body.notes.push_back(std::string("sweep aborted: ") + error.what());
    report.body.status = Status::fail;
  }
  return report;
}

CliReport run_command(const RunConfig& config) {
  validate(config);
  if (config.command == "constants") return cmd_constants(config);
  if (config.command == "verify") return cmd_verify(config);
  if (config.command == "kernel") return cmd_kernel(config);
  if (config.command == "spectrum") return cmd_spectrum(config);
  if (config.command == "shoot") return cmd_shoot(config);
  if (config.command == "sweep") return cmd_sweep(config);
  throw std::domain_error("unknown command: " + config.command);
}

namespace {

// nlohmann's dump() renders doubles shortest-round-trip; the report contract
// pins 17 significant digits instead, so serialization walks the tree and
// formats number_float leaves itself.
void write_json(const ordered_json& node, std::string& out) {
  switch (node.type()) {
    case ordered_json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& item : node.items()) {
        if (!first) out += ',';
        first = false;
        out += ordered_json(item.key()).dump();
        out += ':';
        write_json(item.value(), out);
      }
      out += '}';
      break;
    }
    case ordered_json::value_t::array: {
      out += '[';
      for (size_t i = 0; i < node.size(); ++i) {
        if (i > 0) out += ',';
        write_json(node[i], out);
      }
      out += ']';
      break;
    }
    case ordered_json::value_t::number_float:
      out += format_g17(node.get<double>());
      break;
    default:
      out += node.dump();
      break;
  }
}

ordered_json config_json(const RunConfig& config) {
  ordered_json node;
  node["command"] = config.command;
  node["a"] = config.params.a;
  node["b"] = config.params.b;
  node["lambda"] = config.lambda;
  node["x0"] = {config.x0[0], config.x0[1], config.x0[2]};
  node["n"] = config.n;
  node["l_max"] = config.ell_max;
  node["sector"] = config.sector;
  node["k"] = config.count;
  node["tol_kernel"] = config.tol_kernel;
  node["format"] = config.format;
  node["out"] = config.out_path;
  return node;
}

RunConfig config_from_json(const nlohmann::json& node) {
  RunConfig config;
  config.command = node.at("command").get<std::string>();
  config.params.a = node.at("a").get<double>();
  config.params.b = node.at("b").get<double>();
  config.lambda = node.at("lambda").get<double>();
  for (int i = 0; i < 3; ++i) config.x0[i] = node.at("x0").at(i).get<double>();
  config.n = node.at("n").get<int>();
  config.ell_max = node.at("l_max").get<int>();
  config.sector = node.at("sector").get<int>();
  config.count = node.at("k").get<int>();
  config.tol_kernel = node.at("tol_kernel").get<double>();
  config.format = node.at("format").get<std::string>();
  config.out_path = node.at("out").get<std::string>();
  return config;
}

Status status_from_string(const std::string& text) {
  if (text == "PASS") return Status::pass;
  if (text == "FAIL") return Status::fail;
  if (text == "INCONCLUSIVE") return Status::inconclusive;
  throw std::domain_error("unknown status: " + text);
}

}  // namespace

std::string serialize_report(const CliReport& report) {
  ordered_json root;
  root["config"] = config_json(report.config);

  ordered_json checks = ordered_json::array();
  for (const IdentityCheck& check : report.body.identity_checks) {
    ordered_json node;
    node["name"] = check.name;
    node["value"] = check.value;
    node["tolerance"] = check.tolerance;
    node["pass"] = check.pass;
    checks.push_back(node);
  }
  root["checks"] = checks;

  ordered_json kernel;
  ordered_json counts = ordered_json::object();
  for (const auto& [ell, count] : report.body.kernel_counts)
    counts[std::to_string(ell)] = count;
  kernel["counts"] = counts;
  kernel["dim"] = report.body.total_kernel_dim;
  ordered_json alignments = ordered_json::object();
  for (const auto& [ell, cosine] : report.body.kernel_alignments)
    alignments[std::to_string(ell)] = cosine;
  kernel["alignments"] = alignments;
  kernel["gap"] = report.body.coercivity_gap;
  kernel["tol"] = report.body.tol_kernel;
  root["kernel"] = kernel;

  ordered_json convergence = ordered_json::array();
  for (const ConvergencePoint& point : report.body.convergence) {
    ordered_json node;
    node["n"] = point.n;
    node["kernel_magnitude"] = point.kernel_magnitude;
    node["coercivity_gap"] = point.coercivity_gap;
    node["worst_alignment"] = point.worst_alignment;
    node["spectral_scale"] = point.spectral_scale;
    convergence.push_back(node);
  }
  root["convergence"] = convergence;

  ordered_json spectrum = ordered_json::array();
  for (const SpectrumRow& row : report.spectrum) {
    ordered_json node;
    node["sector"] = row.sector;
    node["index"] = row.index;
    node["eigenvalue"] = row.eigenvalue;
    node["kernel_flag"] = row.kernel_flag;
    node["alignment"] = row.alignment;
    spectrum.push_back(node);
  }
  root["spectrum"] = spectrum;

  root["status"] = to_string(report.body.status);
  root["notes"] = report.body.notes;
  if (!report.timestamp.empty()) root["timestamp"] = report.timestamp;

  std::string out;
  write_json(root, out);
  out += '\n';
  return out;
}

CliReport parse_report(const std::string& text) {
  const nlohmann::json root = nlohmann::json::parse(text);
  CliReport report;
  report.config = config_from_json(root.at("config"));

  for (const auto& node : root.at("checks")) {
    IdentityCheck check;
    check.name = node.at("name").get<std::string>();
    check.value = node.at("value").get<double>();
    check.tolerance = node.at("tolerance").get<double>();
    check.pass = node.at("pass").get<bool>();
    report.body.identity_checks.push_back(check);
  }

  const auto& kernel = root.at("kernel");
  for (const auto& item : kernel.at("counts").items())
    report.body.kernel_counts[std::stoi(item.key())] = item.value().get<int>();
  for (const auto& item : kernel.at("alignments").items())
    report.body.kernel_alignments[std::stoi(item.key())] =
        item.value().get<double>();
  report.body.total_kernel_dim = kernel.at("dim").get<int>();
  report.body.coercivity_gap = kernel.at("gap").get<double>();
  report.body.tol_kernel = kernel.at("tol").get<double>();

  for (const auto& node : root.at("convergence")) {
    ConvergencePoint point;
    point.n = node.at("n").get<int>();
    point.kernel_magnitude = node.at("kernel_magnitude").get<double>();
    point.coercivity_gap = node.at("coercivity_gap").get<double>();
    point.worst_alignment = node.at("worst_alignment").get<double>();
    point.spectral_scale = node.at("spectral_scale").get<double>();
    report.body.convergence.push_back(point);
  }

  for (const auto& node : root.at("spectrum")) {
    SpectrumRow row;
    row.sector = node.at("sector").get<int>();
    row.index = node.at("index").get<int>();
    row.eigenvalue = node.at("eigenvalue").get<double>();
    row.kernel_flag = node.at("kernel_flag").get<bool>();
    row.alignment = node.at("alignment").get<double>();
    report.spectrum.push_back(row);
  }

  report.body.status = status_from_string(root.at("status").get<std::string>());
  for (const auto& node : root.at("notes"))
    report.body.notes.push_back(node.get<std::string>());
  report.config.with_timestamp = root.contains("timestamp");
  if (report.config.with_timestamp)
    report.timestamp = root.at("timestamp").get<std::string>();
  return report;
}

std::string spectrum_csv(const CliReport& report) {
  std::string out = "sector,index,eigenvalue,kernel_flag,alignment\n";
  for (const SpectrumRow& row : report.spectrum) {
    out += std::to_string(row.sector);
    out += ',';
    out += std::to_string(row.index);
    out += ',';
    out += format_g17(row.eigenvalue);
    out += ',';
    out += row.kernel_flag ? "KERNEL" : "";
    out += ',';
    out += format_g17(row.alignment);
    out += '\n';
  }
  return out;
}

std::string checks_csv(const CliReport& report) {
  std::string out = "name,value,tolerance,status\n";
  for (const IdentityCheck& check : report.body.identity_checks) {
    out += check.name;
    out += ',';
    out += format_g17(check.value);
    out += ',';
    out += format_g17(check.tolerance);
    out += ',';
    out += check.pass ? "PASS" : "FAIL";
    out += '\n';
  }
  return out;
}

}  // namespace kirchhoff
