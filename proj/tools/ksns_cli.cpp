// ksns command-line front end.
//
//   ksns <run|eigen|decay|lipschitz|nonneg|version> --config FILE [--out DIR]
//        [--threads N] [--snapshot-stride K]
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 config/usage error,
// 3 blow-up (NaN/Inf, sup-norm ceiling or inner solver failure).

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ksns/config.hpp"
#include "ksns/io.hpp"
#include "ksns/scenario.hpp"
#include "ksns/simd.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

enum Exit { kOk = 0, kCheckFailed = 1, kConfigError = 2, kBlowUp = 3 };

struct Common {
  std::string config;
  std::string out;
  int threads = 1;
  int snapshot_stride = -1;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "configuration file")->required();
  sub->add_option("--out", c.out, "output directory (fallback: output.dir, then $KSNS_OUT)");
  sub->add_option("--threads", c.threads, "worker threads for independent runs")->check(CLI::Range(1, 256));
  sub->add_option("--snapshot-stride", c.snapshot_stride, "steps between snapshots (0: first and last only)")
      ->check(CLI::NonNegativeNumber);
}

std::filesystem::path output_dir(const Common& c, const ksns::RunConfig& cfg, const std::string& sub) {
  if (!c.out.empty()) return c.out;
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv("KSNS_OUT"); env && *env) return std::filesystem::path(env) / sub;
  return std::filesystem::path("ksns_out") / sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keller-Segel-Navier-Stokes laboratory"};
  app.require_subcommand(1);
  Common common;
  CLI::App* run = app.add_subcommand("run", "run the configured scenario and check invariants");
  CLI::App* eigen = app.add_subcommand("eigen", "print lambda_N,lambda_D,h,iterations,residual");
  CLI::App* decay = app.add_subcommand("decay", "fit decay rates (heat, Stokes, nonlinear run)");
  CLI::App* lip = app.add_subcommand("lipschitz", "Lipschitz experiment on perturbed data");
  CLI::App* nonneg = app.add_subcommand("nonneg", "non-negativity and invariants, configured and rotated S");
  CLI::App* version = app.add_subcommand("version", "print version and the active kernel set");
  for (CLI::App* s : {run, eigen, decay, lip, nonneg}) add_common(s, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kConfigError;
  }

  if (version->parsed()) {
    std::cout << "ksns " << kVersion << " (kernels: " << ksns::simd::to_string(ksns::simd::active_isa()) << ")\n";
    return kOk;
  }

  ksns::RunConfig cfg;
  try {
    cfg = ksns::load_config(common.config);
    if (common.snapshot_stride >= 0) cfg.snapshot_stride = common.snapshot_stride;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  std::cerr << "# resolved configuration\n" << ksns::echo(cfg);

  ksns::ScenarioReport report;
  try {
    if (run->parsed()) {
      report = ksns::scenario_run(cfg, output_dir(common, cfg, "run"));
    } else if (eigen->parsed()) {
      report = ksns::scenario_eigen(cfg, std::cout);
    } else if (decay->parsed()) {
      report = ksns::scenario_decay(cfg, output_dir(common, cfg, "decay"));
    } else if (lip->parsed()) {
      report = ksns::scenario_lipschitz(cfg, output_dir(common, cfg, "lipschitz"), common.threads);
    } else if (nonneg->parsed()) {
      report = ksns::scenario_nonneg(cfg, output_dir(common, cfg, "nonneg"));
    }
  } catch (const ksns::BlowUpError& e) {
    std::cerr << "blow-up: " << e.what() << " (last valid t = " << e.last_valid().t << ")\n";
    return kBlowUp;
  } catch (const ksns::SolverError& e) {
    std::cerr << "blow-up: " << e.what() << '\n';
    return kBlowUp;
  } catch (const ksns::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  // eigen keeps stdout to its single CSV line.
  ksns::print_report(eigen->parsed() ? std::cerr : std::cout, report);
  return report.passed() ? kOk : kCheckFailed;
}
