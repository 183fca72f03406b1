#include <functional>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "scenario.hpp"
#include "wavetrace/errors.hpp"

namespace {

using namespace wavetrace;
using namespace wavetrace::cli;

using Command = std::function<int(const Scenario&, const RunOptions&, std::ostream&)>;

int classify(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const Cond2Violation*>(&e) ||
      dynamic_cast<const ProfileBoxMismatch*>(&e) || dynamic_cast<const MarginError*>(&e) ||
      dynamic_cast<const ProfileAssumptionError*>(&e)) {
    return kExitValidation;
  }
  return kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavetrace: ray and normal-form analysis of rotating shallow-water waves"};
  app.set_version_flag("--version", WAVETRACE_VERSION);
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps;
  bool check = false;

  const std::map<std::string, std::pair<std::string, Command>> commands{
      {"eig", {"eigenvalues and eigenvectors of the principal symbol at points", cmd_eig}},
      {"hamiltonians", {"mode Hamiltonians and the Rossby subprincipal cross-check", cmd_hamiltonians}},
      {"trace", {"integrate individual rays with invariant logging", cmd_trace}},
      {"ensemble", {"propagate a sampled ensemble of rays", cmd_ensemble}},
      {"quantize-check", {"grid quantization, diagonalization and stability study", cmd_quantize_check}},
      {"mourre", {"Mourre bracket bound over a sampled set", cmd_mourre}},
  };
  std::map<CLI::App*, Command> handlers;
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    sub->add_option("-c,--config", config, "scenario TOML file")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out, "output directory (default: the scenario's `out`)");
    sub->add_option("--seed", seed, "override the sampler and stability seeds");
    sub->add_option("--eps", eps, "override eps");
    sub->add_flag("--check", check, "exit with code 4 when an acceptance criterion fails");
    handlers[sub] = entry.second;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    const Scenario sc = load_scenario(config, Overrides{seed, eps});
    const RunOptions opt{out, check};
    for (const auto& [sub, handler] : handlers) {
      if (sub->parsed()) return handler(sc, opt, std::cout);
    }
    return kExitValidation;
  } catch (const wavetrace::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return classify(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
