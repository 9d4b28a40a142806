#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "artifacts.hpp"
#include "config.hpp"
#include "run.hpp"

namespace sc = shadowlab::cli;

namespace {

int run_command(const std::string& file, const std::string& output_override) {
  sc::ExperimentConfig cfg;
  try {
    cfg = sc::load_config(file);
  } catch (const sc::ConfigError& e) {
    std::cerr << "shadowlab: " << e.what() << "\n";
    return sc::kExitConfigError;
  }
  if (!output_override.empty()) cfg.output = output_override;
  try {
    sc::RunOutcome out = sc::run_experiment(cfg, std::cerr);
    out.files.write_all(cfg.output);
    const auto& failed = out.report["failed_checks"];
    std::cout << "status: " << out.report["status"].get<std::string>() << " (exit "
              << out.exit_code << "), " << out.report["rows"].get<std::size_t>() << " rows -> "
              << cfg.output << "\n";
    for (const auto& [name, value] : out.report["checks"].items())
      std::cout << "  " << name << ": " << (value.get<bool>() ? "pass" : "FAIL") << "\n";
    if (!failed.empty()) std::cout << "failed checks: " << failed.dump() << "\n";
    return out.exit_code;
  } catch (const sc::ConfigError& e) {
    std::cerr << "shadowlab: " << e.what() << "\n";
    return sc::kExitConfigError;
  }
}

int replay_command(const std::string& cert_file, const std::string& orbit_file,
                   std::optional<double> eps) {
  std::ifstream cin(cert_file), oin(orbit_file);
  if (!cin) {
    std::cerr << "shadowlab: " << cert_file << ": cannot open\n";
    return sc::kExitConfigError;
  }
  if (!oin) {
    std::cerr << "shadowlab: " << orbit_file << ": cannot open\n";
    return sc::kExitConfigError;
  }
  std::ostringstream text;
  text << cin.rdbuf();
  try {
    const sc::CertificateFile f = sc::parse_certificate(text.str());
    const shadowlab::PseudoOrbit P = shadowlab::read_csv(oin);
    const auto sys = shadowlab::make_flow(f.model, f.params);
    const double e = eps.value_or(f.eps);
    if (!(e > 0.0)) {
      std::cerr << "shadowlab: --eps must be > 0\n";
      return sc::kExitConfigError;
    }
    try {
      const auto r = shadowlab::check_certificate(*sys, P, e, f.cert, f.max_step);
      std::cout << "replay: sup " << shadowlab::format_double(r.achieved_sup) << " at t = "
                << shadowlab::format_double(r.worst_time) << ", eps "
                << shadowlab::format_double(e) << ": " << (r.ok ? "ok" : "REJECTED") << "\n";
      return r.ok ? sc::kExitOk : sc::kExitCheckFailed;
    } catch (const shadowlab::GridTooCoarse& g) {
      std::cout << "replay: REJECTED: " << g.what() << "\n";
      return sc::kExitCheckFailed;
    }
  } catch (const std::exception& ex) {
    std::cerr << "shadowlab: " << ex.what() << "\n";
    return sc::kExitConfigError;
  }
}

int models_command() {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& m : shadowlab::model_registry()) {
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.defaults) params[k] = v;
    out.push_back({{"name", m.name},
                   {"space", m.space},
                   {"kind", m.kind},
                   {"claim", m.claim},
                   {"params", params}});
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int config_command(const std::string& file, bool json) {
  try {
    const auto cfg = sc::load_config(file);
    std::cout << (json ? sc::config_json(cfg).dump(2) + "\n" : sc::emit_config(cfg));
    return 0;
  } catch (const sc::ConfigError& e) {
    std::cerr << "shadowlab: " << e.what() << "\n";
    return sc::kExitConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shadowlab: pointwise shadowing experiments on flows"};
  app.require_subcommand(1);

  std::string config_file, output;
  auto* run = app.add_subcommand("run", "Run the experiment described by a TOML config");
  run->add_option("config", config_file, "Config file")->required();
  run->add_option("-o,--output", output, "Output directory (overrides the config)");

  std::string cert_file, orbit_file;
  std::optional<double> eps;
  auto* replay = app.add_subcommand("replay", "Re-check a certificate against a pseudo-orbit");
  replay->add_option("certificate", cert_file, "Certificate JSON")->required();
  replay->add_option("orbit", orbit_file, "Pseudo-orbit CSV")->required();
  replay->add_option("--eps", eps, "Shadowing radius (default: the certificate's)");

  auto* models = app.add_subcommand("models", "Model registry");
  models->require_subcommand(1);
  models->add_subcommand("list", "Print the registered models as JSON");

  bool as_json = false;
  auto* config = app.add_subcommand("config", "Print a config in normalized form");
  config->add_option("config", config_file, "Config file")->required();
  config->add_flag("--json", as_json, "Print JSON instead of TOML");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return sc::kExitConfigError;
  }

  if (run->parsed()) return run_command(config_file, output);
  if (replay->parsed()) return replay_command(cert_file, orbit_file, eps);
  if (models->parsed()) return models_command();
  if (config->parsed()) return config_command(config_file, as_json);
  return sc::kExitConfigError;
}
