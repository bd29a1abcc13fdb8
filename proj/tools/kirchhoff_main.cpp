#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "kirchhoff/report_io.hpp"

// Front end over the command pipelines in report_io.  Exit codes: 0 when all
// checks pass, 1 on verification failure or an inconclusive scan, 2 on usage
// errors.  KIRCHHOFF_THREADS caps the sector-scan parallelism.

namespace {

struct CommandSpec {
  const char* name;
  const char* help;
};

constexpr CommandSpec kCommands[] = {
    {"constants", "closed-form scaling constants against the fixed-point oracle"},
    {"verify", "pointwise residuals, radial proof chain and kernel scan"},
    {"kernel", "kernel dimensions, alignments and coercivity gap"},
    {"spectrum", "lowest eigenvalues of one angular sector"},
    {"shoot", "shooting oracle and self-consistent rediscovery"},
    {"sweep", "kernel scan over grid sizes n/2, 3n/4, n"},
};

kirchhoff::Vec3 parse_x0(const std::string& text) {
  kirchhoff::Vec3 x0 = {0.0, 0.0, 0.0};
  char tail = '\0';
  const int got = std::sscanf(text.c_str(), " %lf , %lf , %lf %c", &x0[0],
                              &x0[1], &x0[2], &tail);
  if (got != 3) throw std::domain_error("--x0 expects \"x,y,z\"");
  return x0;
}

int emit(const kirchhoff::CliReport& report) {
  const kirchhoff::RunConfig& config = report.config;
  std::string text;
  if (config.format == "csv")
    text = config.command == "spectrum" ? kirchhoff::spectrum_csv(report)
                                        : kirchhoff::checks_csv(report);
  else
    text = kirchhoff::serialize_report(report);

  if (config.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(config.out_path);
    if (!out) {
      std::cerr << "error: cannot open " << config.out_path << "\n";
      return 2;
    }
    out << text;
  }
  return report.body.status == kirchhoff::Status::pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Verification pipelines for the critical nonlocal ground state.\n"
      "Set KIRCHHOFF_THREADS to cap sector-scan parallelism."};
  app.require_subcommand(1);

  kirchhoff::RunConfig config;
  std::string x0_text;
  bool no_timestamp = false;

  for (const CommandSpec& command : kCommands) {
    CLI::App* sub = app.add_subcommand(command.name, command.help);
    sub->add_option("--a", config.params.a, "coefficient a > 0");
    sub->add_option("--b", config.params.b, "coefficient b >= 0");
    sub->add_option("--lambda", config.lambda, "family width");
    sub->add_option("--x0", x0_text, "family offset as \"x,y,z\"");
    sub->add_option("--n", config.n, "interior grid size");
    sub->add_option("--lmax", config.ell_max, "largest sector scanned");
    sub->add_option("--sector", config.sector, "sector for spectrum");
    sub->add_option("--k", config.count, "eigenvalues for spectrum");
    sub->add_option("--tol-kernel", config.tol_kernel,
                    "kernel threshold (default adaptive)");
    sub->add_option("--format", config.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", config.out_path, "output path (default stdout)");
    sub->add_flag("--no-timestamp", no_timestamp, "omit the timestamp field");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& error) {
    app.exit(error);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  config.command = sub->get_name();
  config.with_timestamp = !no_timestamp;
  if (config.command == "spectrum" && sub->count("--format") == 0)
    config.format = "csv";

  try {
    if (sub->count("--x0") > 0) config.x0 = parse_x0(x0_text);
    return emit(kirchhoff::run_command(config));
  } catch (const std::domain_error& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
}
