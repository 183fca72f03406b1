#include "scenario.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "wavetrace/errors.hpp"

namespace wavetrace::cli {

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const toml::node* node, const std::string& field, const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    if (node != nullptr && node->source().begin) os << ":" << node->source().begin.line;
    os << ": field '" << field << "': " << msg;
    throw ConfigError(os.str());
  }

  void only_keys(const toml::table& t, const std::string& prefix, const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : t) {
      const std::string key(k.str());
      if (!allowed.count(key)) fail(&v, prefix + key, "unknown key");
    }
  }

  const toml::table* table(const toml::table& t, const std::string& key, const std::string& prefix) const {
    const toml::node* n = t.get(key);
    if (n == nullptr) return nullptr;
    if (!n->is_table()) fail(n, prefix + key, "expected a table");
    return n->as_table();
  }

  std::optional<double> number(const toml::table& t, const std::string& key, const std::string& prefix) const {
    const toml::node* n = t.get(key);
    if (n == nullptr) return std::nullopt;
    if (!n->is_number()) fail(n, prefix + key, "expected a number");
    const double v = n->value<double>().value();
    if (!std::isfinite(v)) fail(n, prefix + key, "must be finite");
    return v;
  }

  double number_or(const toml::table& t, const std::string& key, const std::string& prefix, double def) const {
    return number(t, key, prefix).value_or(def);
  }

  std::optional<std::int64_t> integer(const toml::table& t, const std::string& key, const std::string& prefix) const {
    const toml::node* n = t.get(key);
    if (n == nullptr) return std::nullopt;
    if (!n->is_integer()) fail(n, prefix + key, "expected an integer");
    return n->value<std::int64_t>().value();
  }

  std::optional<std::string> string(const toml::table& t, const std::string& key, const std::string& prefix) const {
    const toml::node* n = t.get(key);
    if (n == nullptr) return std::nullopt;
    if (!n->is_string()) fail(n, prefix + key, "expected a string");
    return n->value<std::string>().value();
  }

  std::optional<bool> boolean(const toml::table& t, const std::string& key, const std::string& prefix) const {
    const toml::node* n = t.get(key);
    if (n == nullptr) return std::nullopt;
    if (!n->is_boolean()) fail(n, prefix + key, "expected true or false");
    return n->value<bool>().value();
  }

  std::vector<double> numbers(const toml::node& n, const std::string& field, std::size_t expect = 0) const {
    if (!n.is_array()) fail(&n, field, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : *n.as_array()) {
      if (!e.is_number()) fail(&e, field, "expected an array of numbers");
      out.push_back(e.value<double>().value());
      if (!std::isfinite(out.back())) fail(&e, field, "entries must be finite");
    }
    if (expect != 0 && out.size() != expect) {
      fail(&n, field, "expected " + std::to_string(expect) + " entries, got " + std::to_string(out.size()));
    }
    return out;
  }

  std::optional<std::vector<double>> numbers(const toml::table& t, const std::string& key,
                                             const std::string& prefix, std::size_t expect = 0) const {
    const toml::node* n = t.get(key);
    if (n == nullptr) return std::nullopt;
    return numbers(*n, prefix + key, expect);
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

template <std::size_t N>
std::array<double, N> to_array(const std::vector<double>& v) {
  std::array<double, N> a{};
  for (std::size_t i = 0; i < N; ++i) a[i] = v[i];
  return a;
}

ModeId parse_mode(const Reader& r, const toml::table& t) {
  const auto s = r.string(t, "mode", "");
  if (!s || *s == "rossby") return ModeId::Rossby;
  if (*s == "poincare+") return ModeId::PoincarePlus;
  if (*s == "poincare-") return ModeId::PoincareMinus;
  r.fail(t.get("mode"), "mode", "expected rossby, poincare+ or poincare-");
}

void parse_profile(const Reader& r, const toml::table& root, Scenario& sc) {
  const toml::table* t = r.table(root, "profile", "");
  if (t == nullptr) return;  // defaults: 2 + sin(x2), no flow
  const std::string p = "profile.";
  r.only_keys(*t, p, {"coriolis", "beta", "offset", "amplitude", "wavenumber", "flow", "bump_center",
                      "bump_radius", "bump_amplitude"});
  const std::string kind = r.string(*t, "coriolis", p).value_or("shifted-sine");
  if (kind == "linear") {
    sc.coriolis = LinearCoriolis{r.number_or(*t, "beta", p, 1.0)};
  } else if (kind == "shifted-sine") {
    ShiftedSineCoriolis c;
    c.offset = r.number_or(*t, "offset", p, c.offset);
    c.amplitude = r.number_or(*t, "amplitude", p, c.amplitude);
    c.wavenumber = r.number_or(*t, "wavenumber", p, c.wavenumber);
    if (c.wavenumber == 0.0) r.fail(t->get("wavenumber"), p + "wavenumber", "must be nonzero");
    sc.coriolis = c;
  } else if (kind == "tanh") {
    sc.coriolis = TanhCoriolis{};
  } else {
    r.fail(t->get("coriolis"), p + "coriolis", "expected linear, shifted-sine or tanh");
  }
  const std::string flow = r.string(*t, "flow", p).value_or("zero");
  if (flow == "zero") {
    sc.flow = ZeroFlow{};
  } else if (flow == "bump") {
    BumpFlow b;
    if (auto c = r.numbers(*t, "bump_center", p, 2)) {
      b.center1 = (*c)[0];
      b.center2 = (*c)[1];
    }
    b.radius = r.number_or(*t, "bump_radius", p, b.radius);
    b.amplitude = r.number_or(*t, "bump_amplitude", p, b.amplitude);
    if (!(b.radius > 0.0)) r.fail(t->get("bump_radius"), p + "bump_radius", "must be positive");
    sc.flow = b;
  } else {
    r.fail(t->get("flow"), p + "flow", "expected zero or bump");
  }
}

void parse_initial(const Reader& r, const toml::table& root, Scenario& sc) {
  const toml::table* t = r.table(root, "initial", "");
  if (t == nullptr) return;
  const std::string p = "initial.";
  r.only_keys(*t, p, {"points", "sampler"});
  if (const toml::node* pts = t->get("points")) {
    if (!pts->is_array()) r.fail(pts, p + "points", "expected an array of [x1, x2, xi1, xi2]");
    for (const auto& e : *pts->as_array()) {
      const auto v = r.numbers(e, p + "points", 4);
      sc.points.push_back(PhasePoint{v[0], v[1], v[2], v[3]});
    }
  }
  if (const toml::table* s = r.table(*t, "sampler", p)) {
    const std::string q = p + "sampler.";
    r.only_keys(*s, q, {"lo", "hi", "count", "seed"});
    SamplerSpec smp;
    const auto lo = r.numbers(*s, "lo", q, 4);
    const auto hi = r.numbers(*s, "hi", q, 4);
    if (!lo || !hi) r.fail(s, q + (lo ? "hi" : "lo"), "required");
    smp.box.lo = to_array<4>(*lo);
    smp.box.hi = to_array<4>(*hi);
    for (int i = 0; i < 4; ++i) {
      if (smp.box.lo[i] > smp.box.hi[i]) r.fail(s->get("lo"), q + "lo", "must not exceed hi componentwise");
    }
    const auto count = r.integer(*s, "count", q);
    if (!count || *count <= 0) r.fail(count ? s->get("count") : s, q + "count", "required, positive");
    smp.count = static_cast<std::size_t>(*count);
    const auto seed = r.integer(*s, "seed", q);
    if (!seed) r.fail(s, q + "seed", "required whenever a sampler is used (reproducibility)");
    if (*seed < 0) r.fail(s->get("seed"), q + "seed", "must be non-negative");
    smp.seed = static_cast<std::uint64_t>(*seed);
    sc.sampler = smp;
  }
}

void parse_ray(const Reader& r, const toml::table& root, Scenario& sc) {
  sc.ray.hamiltonian = sc.mode;
  const toml::table* t = r.table(root, "ray", "");
  if (t == nullptr) return;
  const std::string p = "ray.";
  r.only_keys(*t, p, {"rtol", "atol", "t_max", "max_steps", "gap_tol", "reverse", "horizons"});
  sc.ray.rtol = r.number_or(*t, "rtol", p, sc.ray.rtol);
  sc.ray.atol = r.number_or(*t, "atol", p, sc.ray.atol);
  sc.ray.t_max = r.number_or(*t, "t_max", p, sc.ray.t_max);
  sc.ray.gap_tol = r.number_or(*t, "gap_tol", p, sc.ray.gap_tol);
  sc.ray.reverse = r.boolean(*t, "reverse", p).value_or(false);
  if (auto ms = r.integer(*t, "max_steps", p)) {
    if (*ms <= 0) r.fail(t->get("max_steps"), p + "max_steps", "must be positive");
    sc.ray.max_steps = static_cast<std::size_t>(*ms);
  }
  if (!(sc.ray.rtol > 0.0)) r.fail(t->get("rtol"), p + "rtol", "must be positive");
  if (!(sc.ray.atol > 0.0)) r.fail(t->get("atol"), p + "atol", "must be positive");
  if (!(sc.ray.t_max > 0.0)) r.fail(t->get("t_max"), p + "t_max", "must be positive");
  if (!(sc.ray.gap_tol >= 0.0)) r.fail(t->get("gap_tol"), p + "gap_tol", "must be non-negative");
  if (auto h = r.numbers(*t, "horizons", p)) {
    for (double v : *h) {
      if (!(v > 0.0 && v <= sc.ray.t_max)) r.fail(t->get("horizons"), p + "horizons", "entries must lie in (0, t_max]");
    }
    sc.horizons = *h;
  }
}

void parse_analysis(const Reader& r, const toml::table& root, Scenario& sc) {
  if (const toml::table* t = r.table(root, "escape", "")) {
    const std::string p = "escape.";
    r.only_keys(*t, p, {"u_minus", "u_plus"});
    const auto lo = r.number(*t, "u_minus", p);
    const auto hi = r.number(*t, "u_plus", p);
    if (!lo || !hi) r.fail(t, p + (lo ? "u_plus" : "u_minus"), "required");
    if (!(*lo < *hi)) r.fail(t->get("u_minus"), p + "u_minus", "must be below u_plus");
    sc.escape = EscapeSpec{*lo, *hi};
  }
  if (const toml::table* t = r.table(root, "rossby", "")) {
    const std::string p = "rossby.";
    r.only_keys(*t, p, {"eta", "trapping"});
    sc.eta = r.number(*t, "eta", p);
    if (sc.eta && !(*sc.eta > 0.0)) r.fail(t->get("eta"), p + "eta", "must be positive");
    sc.trapping = r.boolean(*t, "trapping", p).value_or(false);
  }
}

void parse_grid(const Reader& r, const toml::table& root, Scenario& sc) {
  const toml::table* t = r.table(root, "grid", "");
  if (t == nullptr) return;
  const std::string p = "grid.";
  r.only_keys(*t, p, {"n", "L", "eps_list", "band_margin", "rossby_packet", "microloc", "stability"});
  GridSpec g;
  if (auto n = r.integer(*t, "n", p)) {
    if (*n < 8 || *n > 64 || (*n & (*n - 1)) != 0) {
      r.fail(t->get("n"), p + "n", "must be a power of two in [8, 64]");
    }
    g.n = static_cast<int>(*n);
  }
  g.L = r.number_or(*t, "L", p, g.L);
  if (!(g.L > 0.0)) r.fail(t->get("L"), p + "L", "must be positive");
  if (auto e = r.numbers(*t, "eps_list", p)) {
    if (e->size() < 3) r.fail(t->get("eps_list"), p + "eps_list", "needs at least three values");
    for (double v : *e) {
      if (!(v > 0.0 && v < 1.0)) r.fail(t->get("eps_list"), p + "eps_list", "values must lie in (0, 1)");
    }
    g.eps_list = *e;
  }
  if (auto m = r.integer(*t, "band_margin", p)) {
    if (*m < 0 || *m >= g.n / 2) r.fail(t->get("band_margin"), p + "band_margin", "must lie in [0, n/2)");
    g.band_margin = static_cast<int>(*m);
  }
  g.rossby_packet = r.boolean(*t, "rossby_packet", p).value_or(true);

  g.microloc.n = g.n;
  g.microloc.L = g.L;
  g.microloc.eps_list = g.eps_list;
  if (const toml::table* m = r.table(*t, "microloc", p)) {
    const std::string q = p + "microloc.";
    r.only_keys(*m, q, {"offset", "radius", "x0_frac", "xi0"});
    g.microloc.offset = r.number_or(*m, "offset", q, g.microloc.offset);
    g.microloc.radius = r.number_or(*m, "radius", q, g.microloc.radius);
    if (auto v = r.numbers(*m, "x0_frac", q, 2)) g.microloc.x0_frac = to_array<2>(*v);
    if (auto v = r.numbers(*m, "xi0", q, 2)) g.microloc.xi0 = to_array<2>(*v);
    if (!(g.microloc.radius > 0.0)) r.fail(m->get("radius"), q + "radius", "must be positive");
    if (!(g.microloc.offset - g.microloc.radius >= 1.0)) {
      r.fail(m->get("offset"), q + "offset", "cutoff support must stay at phase-space distance >= 1 from the packet");
    }
  }
  g.stability.n = g.n;
  g.stability.L = g.L;
  g.stability.eps = sc.eps.value_or(g.stability.eps);
  if (const toml::table* s = r.table(*t, "stability", p)) {
    const std::string q = p + "stability.";
    r.only_keys(*s, q, {"t_max", "samples", "seed"});
    g.stability.t_max = r.number_or(*s, "t_max", q, g.stability.t_max);
    if (!(g.stability.t_max > 0.0)) r.fail(s->get("t_max"), q + "t_max", "must be positive");
    if (auto n = r.integer(*s, "samples", q)) {
      if (*n < 2) r.fail(s->get("samples"), q + "samples", "must be >= 2");
      g.stability.samples = static_cast<int>(*n);
    }
    if (auto n = r.integer(*s, "seed", q)) {
      if (*n < 0) r.fail(s->get("seed"), q + "seed", "must be non-negative");
      g.stability.seed = static_cast<std::uint64_t>(*n);
    }
  }
  sc.grid = g;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::shared_ptr<const Profile> Scenario::profile() const { return std::make_shared<const Profile>(coriolis, flow); }

std::vector<PhasePoint> Scenario::initial_points() const {
  std::vector<PhasePoint> pts = points;
  if (sampler) {
    const auto more = sample_box(sampler->box, sampler->count, sampler->seed);
    pts.insert(pts.end(), more.begin(), more.end());
  }
  return pts;
}

std::optional<std::uint64_t> Scenario::seed() const {
  if (sampler) return sampler->seed;
  if (grid) return grid->stability.seed;
  return std::nullopt;
}

Scenario parse_scenario(std::string_view text, const std::string& source, const Overrides& ov) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
    throw ConfigError(os.str());
  }
  const Reader r(source);
  r.only_keys(root, "", {"mode", "eps", "out", "profile", "initial", "ray", "escape", "rossby", "grid"});

  Scenario sc;
  sc.source = source;
  sc.mode = parse_mode(r, root);
  sc.eps = r.number(root, "eps", "");
  if (ov.eps) sc.eps = *ov.eps;
  if (sc.eps && !(*sc.eps > 0.0 && *sc.eps < 1.0)) r.fail(root.get("eps"), "eps", "must lie in (0, 1)");
  sc.out_dir = r.string(root, "out", "").value_or(sc.out_dir);
  parse_profile(r, root, sc);
  parse_initial(r, root, sc);
  parse_ray(r, root, sc);
  parse_analysis(r, root, sc);
  parse_grid(r, root, sc);
  if (ov.seed) {
    if (sc.sampler) sc.sampler->seed = *ov.seed;
    if (sc.grid) sc.grid->stability.seed = *ov.seed;
  }

  std::string key(text);
  key += "\n#seed=" + (ov.seed ? std::to_string(*ov.seed) : std::string("-"));
  key += "\n#eps=" + (ov.eps ? hex64(std::bit_cast<std::uint64_t>(*ov.eps)) : std::string("-"));
  sc.hash = fnv1a(key);
  return sc;
}

Scenario load_scenario(const std::string& path, const Overrides& ov) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open scenario file");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_scenario(os.str(), path, ov);
}

}  // namespace wavetrace::cli
