// Batch front end: one command per invocation, config from a JSON file.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "hadamard/hadamard.h"

namespace {

constexpr int kUsageError = 2;

std::vector<std::string> commands() {
  std::vector<std::string> out;
  std::istringstream in(hdm_command_names());
  for (std::string c; in >> c;) out.push_back(c);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hadamard operator verification and classification"};
  app.set_version_flag("--version", std::string(hdm_version()));

  std::string command, config_path, format = "text";
  int alpha_max = -1, grid_n = 0, workers = 1;
  double tol_quad = 0.0, tol_resid = 0.0;
  std::uint64_t seed = 0;

  app.add_option("command", command, "eigentable, verify, classify, omega-tilde, vstar, support-check, convolve, bench")
      ->required()
      ->check(CLI::IsMember(commands()));
  app.add_option("--config", config_path, "experiment config (JSON); `-` reads stdin")->required();
  app.add_option("--alpha-max", alpha_max, "largest |alpha|_inf in eigen tables")->check(CLI::Range(0, 24));
  app.add_option("--tol-quad", tol_quad, "absolute quadrature tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tol-resid", tol_resid, "relative residual tolerance")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"text", "json", "csv"}));
  auto* grid_opt = app.add_option("--grid-n", grid_n, "grid samples per axis for convolve and bench");
  auto* seed_opt = app.add_option("--seed", seed, "seed for random test functions");
  app.add_option("--workers", workers, "worker threads (never changes results)")->check(CLI::Range(1, 256));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }

  std::string text;
  {
    std::ostringstream buf;
    if (config_path == "-") {
      buf << std::cin.rdbuf();
    } else {
      std::ifstream in(config_path, std::ios::binary);
      if (!in) {
        std::cerr << "error: cannot read config file '" << config_path << "'\n";
        return kUsageError;
      }
      buf << in.rdbuf();
    }
    text = buf.str();
  }

  hdm_run_options opts;
  hdm_run_options_init(&opts);
  opts.alpha_max = alpha_max;
  opts.tol_quad = tol_quad;
  opts.tol_resid = tol_resid;
  opts.grid_n = grid_opt->count() ? grid_n : 0;
  opts.has_seed = seed_opt->count() ? 1 : 0;
  opts.seed = seed;
  opts.workers = workers;

  hdm_report* report = nullptr;
  hdm_status st = hdm_run(command.c_str(), text.c_str(), &opts, &report);
  if (st != HDM_OK) {
    std::cerr << "error: " << config_path << ": " << hdm_last_error() << "\n";
    return st == HDM_CONFIG_ERROR ? kUsageError : 1;
  }
  hdm_format f = format == "json" ? HDM_FORMAT_JSON : format == "csv" ? HDM_FORMAT_CSV : HDM_FORMAT_TEXT;
  std::fputs(hdm_report_render(report, f), stdout);
  int code = hdm_report_exit_code(report);
  hdm_report_free(report);
  return code;
}
