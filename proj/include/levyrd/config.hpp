#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "levyrd/coefficients.hpp"
#include "levyrd/levy_measure.hpp"
#include "levyrd/noise.hpp"
#include "levyrd/solver.hpp"
#include "levyrd/spectral.hpp"
#include "levyrd/util.hpp"

namespace levyrd {

// Minimal TOML subset: [table.sub] headers, key = value lines, values are
// strings, integers, floats, booleans and (nested) arrays.  Enough for run
// configs; parse errors carry the line number and key.
struct TomlValue {
  enum class Type { String, Int, Float, Bool, Array };
  Type type = Type::String;
  std::string s;
  long long i = 0;
  double f = 0.0;
  bool b = false;
  std::vector<TomlValue> arr;
  int line = 0;

  double number() const {
    if (type == Type::Int) return static_cast<double>(i);
    if (type == Type::Float) return f;
    throw ConfigError("line " + std::to_string(line) + ": expected a number");
  }
  long long integer() const {
    if (type == Type::Int) return i;
    throw ConfigError("line " + std::to_string(line) + ": expected an integer");
  }
  const std::string& string() const {
    if (type == Type::String) return s;
    throw ConfigError("line " + std::to_string(line) + ": expected a string");
  }
  bool boolean() const {
    if (type == Type::Bool) return b;
    throw ConfigError("line " + std::to_string(line) + ": expected a boolean");
  }
};

using TomlTable = std::map<std::string, TomlValue>;

namespace detail {

inline void skip_ws(const std::string& s, std::size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

inline TomlValue parse_value(const std::string& s, std::size_t& i, int line);

inline TomlValue parse_array(const std::string& s, std::size_t& i, int line) {
  TomlValue v;
  v.type = TomlValue::Type::Array;
  v.line = line;
  ++i;  // '['
  skip_ws(s, i);
  if (i < s.size() && s[i] == ']') {
    ++i;
    return v;
  }
  while (true) {
    skip_ws(s, i);
    v.arr.push_back(parse_value(s, i, line));
    skip_ws(s, i);
    if (i < s.size() && s[i] == ',') {
      ++i;
      continue;
    }
    if (i < s.size() && s[i] == ']') {
      ++i;
      return v;
    }
    throw ConfigError("line " + std::to_string(line) + ": malformed array");
  }
}

inline TomlValue parse_value(const std::string& s, std::size_t& i, int line) {
  skip_ws(s, i);
  if (i >= s.size())
    throw ConfigError("line " + std::to_string(line) + ": missing value");
  TomlValue v;
  v.line = line;
  char c = s[i];
  if (c == '"') {
    v.type = TomlValue::Type::String;
    ++i;
    while (i < s.size() && s[i] != '"') v.s += s[i++];
    if (i >= s.size())
      throw ConfigError("line " + std::to_string(line) + ": unterminated string");
    ++i;
    return v;
  }
  if (c == '[') return parse_array(s, i, line);
  std::string tok;
  while (i < s.size() && s[i] != ',' && s[i] != ']' && s[i] != '#' &&
         s[i] != ' ' && s[i] != '\t')
    tok += s[i++];
  if (tok == "true" || tok == "false") {
    v.type = TomlValue::Type::Bool;
    v.b = (tok == "true");
    return v;
  }
  if (tok.find_first_of(".eE") == std::string::npos ||
      (tok.size() > 1 && (tok.substr(0, 2) == "0x"))) {
    try {
      std::size_t pos = 0;
      long long n = std::stoll(tok, &pos, 0);
      if (pos == tok.size()) {
        v.type = TomlValue::Type::Int;
        v.i = n;
        return v;
      }
    } catch (...) {
    }
  }
  try {
    std::size_t pos = 0;
    double d = std::stod(tok, &pos);
    if (pos == tok.size()) {
      v.type = TomlValue::Type::Float;
      v.f = d;
      return v;
    }
  } catch (...) {
  }
  throw ConfigError("line " + std::to_string(line) + ": cannot parse value '" +
                    tok + "'");
}

}  // namespace detail

inline TomlTable parse_toml(const std::string& text) {
  TomlTable table;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    // strip comments outside strings
    std::string s;
    bool in_str = false;
    for (char c : raw) {
      if (c == '"') in_str = !in_str;
      if (c == '#' && !in_str) break;
      s += c;
    }
    std::size_t i = 0;
    detail::skip_ws(s, i);
    if (i >= s.size() || s[i] == '\r') continue;
    if (s[i] == '[') {
      std::size_t close = s.find(']', i);
      if (close == std::string::npos)
        throw ConfigError("line " + std::to_string(line) + ": unterminated table header");
      section = s.substr(i + 1, close - i - 1);
      continue;
    }
    std::size_t eq = s.find('=', i);
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    std::string key = s.substr(i, eq - i);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    if (key.empty())
      throw ConfigError("line " + std::to_string(line) + ": empty key");
    std::size_t j = eq + 1;
    TomlValue v = detail::parse_value(s, j, line);
    detail::skip_ws(s, j);
    if (j < s.size() && s[j] != '\r')
      throw ConfigError("line " + std::to_string(line) + ": trailing characters");
    std::string full = section.empty() ? key : section + "." + key;
    table[full] = std::move(v);
  }
  return table;
}

struct MeasureConfig {
  std::string kind = "finite_atomic";
  std::vector<std::pair<double, double>> atoms;  // (z, mass)
  double lo = -1.0, hi = 1.0, height = 1.0;
  double beta = 0.5, eta = 1.0, scale = 1.0, epsilon = 0.0;
  std::string side = "both";
  double p_for_epsilon = 2.0;

  LevyMeasure build() const {
    if (kind == "finite_atomic") return LevyMeasure::finite_atomic(atoms);
    if (kind == "density") return LevyMeasure::density_on_interval(lo, hi, height);
    if (kind == "tempered") {
      TailSide ts = side == "both" ? TailSide::Both
                    : side == "pos" ? TailSide::Positive
                    : side == "neg" ? TailSide::Negative
                                    : throw ConfigError("measure.side: both|pos|neg");
      return LevyMeasure::tempered_power_law(beta, eta, scale, epsilon,
                                             p_for_epsilon, ts);
    }
    throw ConfigError("measure.kind: finite_atomic|density|tempered");
  }
};

struct GateConfig {
  std::string theorem;  // "", "main", "ex01", "stpn", "claim"
  double d = 1.0, p = 2.0, q = 2.0, r = 2.0;
  double alpha = 3.0, delta = 0.5, gamma = 1.0;
  double delta_F = 0.0, delta_G = 0.0, delta_I = 0.0;
  int k_order = 1;
};

struct RunConfig {
  int schema = 1;

  int modes = 16;
  std::string eigenvalue_law = "dirichlet";
  double shift = 0.0;
  int grid_points = 0;

  std::string noise_kind = "none";  // none|scalar|spectral|spacetime
  double noise_alpha = 1.0;
  double domain_length = 1.0;
  MeasureConfig measure;

  std::string drift_kind = "none";  // none|poly
  double drift_q = 3.0;
  double drift_beta = 0.0;
  long drift_truncation = 0;  // 0 = none
  double drift_k = 0.0;
  double drift_k0 = 1.0;

  std::string diffusion_kind = "none";  // none|sin|sinsininv|const
  double diffusion_value = 1.0;

  int level = 6;
  std::vector<int> levels;  // ladder
  double horizon = 1.0;
  double lambda = 0.0;  // 0 -> default 1 + beta + max(0, -k)

  std::string initial_kind = "single_mode";  // zero|single_mode|coeffs
  int initial_mode = 1;
  double initial_amplitude = 1.0;
  std::vector<double> initial_coeffs;
  int initial_cutoff = 0;

  long replicas = 100;
  std::uint64_t base_seed = 1;

  std::string out_directory = "out";
  bool save_paths = false;

  GateConfig gate;

  static RunConfig from_toml(const std::string& text) {
    TomlTable t = parse_toml(text);
    RunConfig c;
    auto get = [&](const char* key) -> const TomlValue* {
      auto it = t.find(key);
      return it == t.end() ? nullptr : &it->second;
    };
    auto num = [&](const char* key, double& dst) {
      if (auto* v = get(key)) dst = v->number();
    };
    auto integer = [&](const char* key, auto& dst) {
      if (auto* v = get(key)) dst = static_cast<std::decay_t<decltype(dst)>>(v->integer());
    };
    auto str = [&](const char* key, std::string& dst) {
      if (auto* v = get(key)) dst = v->string();
    };
    auto boolean = [&](const char* key, bool& dst) {
      if (auto* v = get(key)) dst = v->boolean();
    };

    integer("schema", c.schema);
    integer("operator.modes", c.modes);
    str("operator.law", c.eigenvalue_law);
    num("operator.shift", c.shift);
    integer("operator.grid_points", c.grid_points);

    str("noise.kind", c.noise_kind);
    num("noise.alpha", c.noise_alpha);
    num("noise.domain_length", c.domain_length);
    str("noise.measure.kind", c.measure.kind);
    if (auto* v = get("noise.measure.atoms")) {
      c.measure.atoms.clear();
      for (const auto& e : v->arr) {
        if (e.type != TomlValue::Type::Array || e.arr.size() != 2)
          throw ConfigError("line " + std::to_string(e.line) +
                            ": noise.measure.atoms entries must be [z, mass]");
        c.measure.atoms.push_back({e.arr[0].number(), e.arr[1].number()});
      }
    }
    num("noise.measure.lo", c.measure.lo);
    num("noise.measure.hi", c.measure.hi);
    num("noise.measure.height", c.measure.height);
    num("noise.measure.beta", c.measure.beta);
    num("noise.measure.eta", c.measure.eta);
    num("noise.measure.scale", c.measure.scale);
    num("noise.measure.epsilon", c.measure.epsilon);
    num("noise.measure.p_for_epsilon", c.measure.p_for_epsilon);
    str("noise.measure.side", c.measure.side);

    str("drift.kind", c.drift_kind);
    num("drift.q", c.drift_q);
    num("drift.beta", c.drift_beta);
    integer("drift.truncation", c.drift_truncation);
    num("drift.k", c.drift_k);
    num("drift.k0", c.drift_k0);

    str("diffusion.kind", c.diffusion_kind);
    num("diffusion.value", c.diffusion_value);

    integer("scheme.level", c.level);
    if (auto* v = get("scheme.levels")) {
      c.levels.clear();
      for (const auto& e : v->arr) c.levels.push_back(static_cast<int>(e.integer()));
    }
    num("scheme.horizon", c.horizon);
    num("scheme.lambda", c.lambda);

    str("initial.kind", c.initial_kind);
    integer("initial.mode", c.initial_mode);
    num("initial.amplitude", c.initial_amplitude);
    if (auto* v = get("initial.coeffs")) {
      c.initial_coeffs.clear();
      for (const auto& e : v->arr) c.initial_coeffs.push_back(e.number());
    }
    integer("initial.cutoff", c.initial_cutoff);

    integer("mc.replicas", c.replicas);
    integer("mc.base_seed", c.base_seed);

    str("outputs.directory", c.out_directory);
    boolean("outputs.save_paths", c.save_paths);

    str("gate.theorem", c.gate.theorem);
    num("gate.d", c.gate.d);
    num("gate.p", c.gate.p);
    num("gate.q", c.gate.q);
    num("gate.r", c.gate.r);
    num("gate.alpha", c.gate.alpha);
    num("gate.delta", c.gate.delta);
    num("gate.gamma", c.gate.gamma);
    num("gate.delta_F", c.gate.delta_F);
    num("gate.delta_G", c.gate.delta_G);
    num("gate.delta_I", c.gate.delta_I);
    integer("gate.k_order", c.gate.k_order);

    c.validate();
    return c;
  }

  void validate() const {
    if (schema != 1) throw ConfigError("schema: only version 1 is supported");
    if (modes < 1) throw ConfigError("operator.modes: must be >= 1");
    if (eigenvalue_law != "dirichlet")
      throw ConfigError("operator.law: only 'dirichlet' is available");
    if (noise_kind != "none" && noise_kind != "scalar" && noise_kind != "spectral" &&
        noise_kind != "spacetime")
      throw ConfigError("noise.kind: none|scalar|spectral|spacetime");
    if (drift_kind != "none" && drift_kind != "poly")
      throw ConfigError("drift.kind: none|poly");
    if (diffusion_kind != "none" && diffusion_kind != "sin" &&
        diffusion_kind != "sinsininv" && diffusion_kind != "const")
      throw ConfigError("diffusion.kind: none|sin|sinsininv|const");
    if (noise_kind != "none" && diffusion_kind == "none")
      throw ConfigError("diffusion.kind: required when noise is enabled");
    if (!(horizon > 0.0)) throw ConfigError("scheme.horizon: must be positive");
    if (level < 1 || level > 24) throw ConfigError("scheme.level: must be in [1, 24]");
    if (replicas < 1) throw ConfigError("mc.replicas: must be >= 1");
    if (initial_kind != "zero" && initial_kind != "single_mode" &&
        initial_kind != "coeffs")
      throw ConfigError("initial.kind: zero|single_mode|coeffs");
    if (initial_kind == "single_mode" && (initial_mode < 1 || initial_mode > modes))
      throw ConfigError("initial.mode: out of range");
    if (effective_lambda() <= 0.0)
      throw ConfigError("scheme.lambda: effective weight must be positive");
  }

  double effective_lambda() const {
    if (lambda > 0.0) return lambda;
    double k = drift_kind == "poly" ? drift_k : 0.0;
    double beta = drift_kind == "poly" ? drift_beta : 0.0;
    return 1.0 + beta + std::max(0.0, -k);
  }

  SpectralOperator make_operator() const {
    return SpectralOperator::dirichlet_laplacian(modes, shift, grid_points);
  }

  DriftSpec make_drift() const {
    if (drift_kind == "none") return DriftSpec::none();
    auto d = DriftSpec::poly(drift_q, drift_beta,
                             drift_truncation > 0
                                 ? std::optional<int>(static_cast<int>(drift_truncation))
                                 : std::nullopt);
    d.k = drift_k;
    d.k0 = drift_k0;
    return d;
  }

  DiffusionSpec make_diffusion() const {
    if (diffusion_kind == "none") return DiffusionSpec::none();
    if (diffusion_kind == "sin") return DiffusionSpec::sin();
    if (diffusion_kind == "sinsininv") return DiffusionSpec::sinsininv();
    return DiffusionSpec::constant(diffusion_value);
  }

  NoiseBlock make_noise() const {
    if (noise_kind == "none") return std::monostate{};
    if (noise_kind == "scalar") return ScalarNoiseSpec{measure.build()};
    if (noise_kind == "spectral")
      return SpectralNoiseSpec{noise_alpha, modes, measure.build()};
    return SpaceTimeNoiseSpec{domain_length, measure.build()};
  }

  SpectralField make_initial(const SpectralOperator& op) const {
    SpectralField x(op.modes());
    if (initial_kind == "single_mode") {
      x.c[initial_mode - 1] = initial_amplitude;
    } else if (initial_kind == "coeffs") {
      for (std::size_t i = 0; i < initial_coeffs.size() && i < x.c.size(); ++i)
        x.c[i] = initial_coeffs[i];
    }
    return x;
  }

  GridScheme make_scheme(const SpectralOperator& op) const {
    GridScheme s;
    s.level = level;
    s.horizon = horizon;
    s.x0 = make_initial(op);
    s.drift = make_drift();
    s.diffusion = make_diffusion();
    s.noise = make_noise();
    s.initial_cutoff = initial_cutoff;
    return s;
  }

  // Full key-value echo with every default explicit.
  std::string resolved_toml() const {
    std::ostringstream os;
    os.precision(17);
    os << "schema = " << schema << "\n\n";
    os << "[operator]\nmodes = " << modes << "\nlaw = \"" << eigenvalue_law
       << "\"\nshift = " << shift << "\ngrid_points = " << grid_points << "\n\n";
    os << "[noise]\nkind = \"" << noise_kind << "\"\nalpha = " << noise_alpha
       << "\ndomain_length = " << domain_length << "\n\n";
    os << "[noise.measure]\nkind = \"" << measure.kind << "\"\n";
    os << "atoms = [";
    for (std::size_t j = 0; j < measure.atoms.size(); ++j) {
      if (j) os << ", ";
      os << "[" << measure.atoms[j].first << ", " << measure.atoms[j].second << "]";
    }
    os << "]\n";
    os << "lo = " << measure.lo << "\nhi = " << measure.hi
       << "\nheight = " << measure.height << "\nbeta = " << measure.beta
       << "\neta = " << measure.eta << "\nscale = " << measure.scale
       << "\nepsilon = " << measure.epsilon
       << "\np_for_epsilon = " << measure.p_for_epsilon << "\nside = \""
       << measure.side << "\"\n\n";
    os << "[drift]\nkind = \"" << drift_kind << "\"\nq = " << drift_q
       << "\nbeta = " << drift_beta << "\ntruncation = " << drift_truncation
       << "\nk = " << drift_k << "\nk0 = " << drift_k0 << "\n\n";
    os << "[diffusion]\nkind = \"" << diffusion_kind
       << "\"\nvalue = " << diffusion_value << "\n\n";
    os << "[scheme]\nlevel = " << level << "\nlevels = [";
    for (std::size_t j = 0; j < levels.size(); ++j) {
      if (j) os << ", ";
      os << levels[j];
    }
    os << "]\nhorizon = " << horizon << "\nlambda = " << lambda
       << "\n# effective lambda = " << effective_lambda() << "\n\n";
    os << "[initial]\nkind = \"" << initial_kind << "\"\nmode = " << initial_mode
       << "\namplitude = " << initial_amplitude << "\ncoeffs = [";
    for (std::size_t j = 0; j < initial_coeffs.size(); ++j) {
      if (j) os << ", ";
      os << initial_coeffs[j];
    }
    os << "]\ncutoff = " << initial_cutoff << "\n\n";
    os << "[mc]\nreplicas = " << replicas << "\nbase_seed = " << base_seed
       << "\n\n";
    // outputs.directory is placement, not content: omitted so artifacts are
    // relocatable and the manifest hash depends only on semantic inputs
    os << "[outputs]\nsave_paths = " << (save_paths ? "true" : "false")
       << "\n\n";
    os << "[gate]\ntheorem = \"" << gate.theorem << "\"\nd = " << gate.d
       << "\np = " << gate.p << "\nq = " << gate.q << "\nr = " << gate.r
       << "\nalpha = " << gate.alpha << "\ndelta = " << gate.delta
       << "\ngamma = " << gate.gamma << "\ndelta_F = " << gate.delta_F
       << "\ndelta_G = " << gate.delta_G << "\ndelta_I = " << gate.delta_I
       << "\nk_order = " << gate.k_order << "\n";
    return os.str();
  }
};

}  // namespace levyrd
