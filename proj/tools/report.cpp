#include "report.hpp"

#include <cmath>
#include <cstdio>

#include "wavetrace/errors.hpp"

#ifndef WAVETRACE_VERSION
#define WAVETRACE_VERSION "unknown"
#endif

namespace wavetrace::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

OutputHeader make_header(const Scenario& sc, const std::string& command) {
  OutputHeader h;
  h.command = command;
  h.version = WAVETRACE_VERSION;
  h.scenario_hash = sc.hash;
  h.seed = sc.seed();
  h.eps = sc.eps;
  if (!h.eps && sc.grid) h.eps = sc.grid->stability.eps;
  h.profile_id = sc.profile()->id();
  return h;
}

namespace {
std::string hash_hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}
}  // namespace

Json header_json(const OutputHeader& h) {
  Json j;
  j["tool"] = "wavetrace";
  j["version"] = h.version;
  j["command"] = h.command;
  j["scenario_hash"] = hash_hex(h.scenario_hash);
  j["seed"] = h.seed ? Json(*h.seed) : Json(nullptr);
  j["eps"] = h.eps ? number(*h.eps) : Json(nullptr);
  j["profile"] = h.profile_id;
  return j;
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json point_json(const PhasePoint& p) { return Json::array({number(p.x1), number(p.x2), number(p.xi1), number(p.xi2)}); }

CsvWriter::CsvWriter(const std::string& path, const OutputHeader& h, const std::vector<std::string>& columns)
    : out_(path, std::ios::binary), columns_(columns.size()) {
  if (!out_) throw ConfigError(path + ": cannot open for writing");
  out_ << "# wavetrace " << h.version << " " << h.command << "\n";
  out_ << "# scenario_hash " << hash_hex(h.scenario_hash) << "\n";
  out_ << "# seed " << (h.seed ? std::to_string(*h.seed) : std::string("none")) << "\n";
  out_ << "# eps " << (h.eps ? format_double(*h.eps) : std::string("none")) << "\n";
  out_ << "# profile " << h.profile_id << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) throw Error("csv row has the wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ",";
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            out_ << format_double(v);
          } else {
            out_ << v;
          }
        },
        cells[i]);
  }
  out_ << "\n";
  ++rows_;
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path + ": cannot open for writing");
  out << j.dump(2) << "\n";
}

}  // namespace wavetrace::cli
