#pragma once

// Scenario files: TOML documents describing a profile, initial data and the
// analysis settings. The schema is documented in configs/README.md.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wavetrace/profile.hpp"
#include "wavetrace/quantize.hpp"
#include "wavetrace/raytrace.hpp"
#include "wavetrace/sampling.hpp"

namespace wavetrace::cli {

struct SamplerSpec {
  PhaseBox box;
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

/// Escape window for Poincare rays: x1 in [u_minus, u_plus].
struct EscapeSpec {
  double u_minus = 0.0;
  double u_plus = 0.0;
};

struct GridSpec {
  int n = 16;
  double L = 6.283185307179586;
  std::vector<double> eps_list{0.4, 0.2, 0.1};
  int band_margin = 3;
  bool rossby_packet = true;
  MicrolocOptions microloc;
  StabilityOptions stability;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> eps;
};

struct Scenario {
  std::string source;  // file name, for diagnostics
  CoriolisSpec coriolis = ShiftedSineCoriolis{};
  FlowSpec flow = ZeroFlow{};
  ModeId mode = ModeId::Rossby;
  std::optional<double> eps;
  std::vector<PhasePoint> points;
  std::optional<SamplerSpec> sampler;
  RayConfig ray;
  std::vector<double> horizons;
  std::optional<EscapeSpec> escape;
  std::optional<double> eta;  // Rossby floor parameter
  bool trapping = false;
  std::optional<GridSpec> grid;
  std::string out_dir = "out";
  std::uint64_t hash = 0;

  std::shared_ptr<const Profile> profile() const;
  /// Explicit points followed by the sampler's points.
  std::vector<PhasePoint> initial_points() const;
  std::optional<std::uint64_t> seed() const;
};

/// Parses and validates a scenario. Throws ConfigError with "source:line: field 'a.b': ..."
/// diagnostics for malformed or inconsistent input.
Scenario parse_scenario(std::string_view text, const std::string& source, const Overrides& ov = {});
Scenario load_scenario(const std::string& path, const Overrides& ov = {});

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 14695981039346656037ull);

}  // namespace wavetrace::cli
