#pragma once

#include <iosfwd>
#include <string>

#include "scenario.hpp"

namespace wavetrace::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitCriterion = 4;

struct RunOptions {
  std::string out_dir;  // overrides the scenario's `out`
  bool check = false;   // criterion failures become exit code 4
};

// Each command writes its files under the output directory, prints a short
// summary to `log` and returns the process exit code.
int cmd_eig(const Scenario& sc, const RunOptions& opt, std::ostream& log);
int cmd_hamiltonians(const Scenario& sc, const RunOptions& opt, std::ostream& log);
int cmd_trace(const Scenario& sc, const RunOptions& opt, std::ostream& log);
int cmd_ensemble(const Scenario& sc, const RunOptions& opt, std::ostream& log);
int cmd_quantize_check(const Scenario& sc, const RunOptions& opt, std::ostream& log);
int cmd_mourre(const Scenario& sc, const RunOptions& opt, std::ostream& log);

}  // namespace wavetrace::cli
