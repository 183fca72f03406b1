#pragma once

// Deterministic CSV/JSON output. Every file starts with the same header block:
// tool version, scenario hash, seed, eps and profile id.

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenario.hpp"

namespace wavetrace::cli {

using Json = nlohmann::ordered_json;

struct OutputHeader {
  std::string command;
  std::string version;
  std::uint64_t scenario_hash = 0;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps;
  std::string profile_id;
};

OutputHeader make_header(const Scenario& sc, const std::string& command);
Json header_json(const OutputHeader& h);

/// NaN and infinities become null.
Json number(double v);
Json point_json(const PhasePoint& p);

using Cell = std::variant<double, std::int64_t, std::string>;

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const OutputHeader& header, const std::vector<std::string>& columns);
  void row(const std::vector<Cell>& cells);
  std::size_t rows() const { return rows_; }

 private:
  std::ofstream out_;
  std::size_t columns_;
  std::size_t rows_ = 0;
};

void write_json(const std::string& path, const Json& j);

/// %.17g.
std::string format_double(double v);

}  // namespace wavetrace::cli
