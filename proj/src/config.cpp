#include "ksns/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

namespace ksns {

double discrete_lambda_neumann(const DomainSpec& d) {
  auto mode = [](double h, double l) {
    const double s = std::sin(std::numbers::pi * h / (2.0 * l));
    return 4.0 / (h * h) * s * s;
  };
  return std::min(mode(d.lx / d.nx, d.lx), mode(d.ly / d.ny, d.ly));
}

double discrete_lambda_dirichlet(const DomainSpec& d) {
  auto mode = [](double h, double l) {
    const double s = std::sin(std::numbers::pi * h / (2.0 * l));
    return 4.0 / (h * h) * s * s;
  };
  return mode(d.lx / d.nx, d.lx) + mode(d.ly / d.ny, d.ly);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& text) {
  auto one = [&](const std::string& s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size()) {
      throw ConfigError(key + ": not a number: '" + text + "'");
    }
    return v;
  };
  const auto slash = text.find('/');
  double v = slash == std::string::npos ? one(text) : one(trim(text.substr(0, slash))) / one(trim(text.substr(slash + 1)));
  if (!std::isfinite(v)) throw ConfigError(key + ": value must be finite");
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_number(key, text);
  if (v != std::floor(v) || std::fabs(v) > 1e9) throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
  if (text == "false" || text == "no" || text == "off" || text == "0") return false;
  throw ConfigError(key + ": expected true/false, got '" + text + "'");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

struct Registry {
  std::map<std::string, Setter> setters;  // section.key
  std::map<std::string, std::vector<std::string>> by_name;
  bool* lambda1_given = nullptr;

  void add(const std::string& path, Setter s) {
    setters[path] = std::move(s);
    by_name[path.substr(path.find('.') + 1)].push_back(path);
  }
};

Registry make_registry(bool& lambda1_given) {
  Registry r;
  r.lambda1_given = &lambda1_given;
  auto num = [](double RunConfig::*field) {
    return [field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = parse_number(k, v); };
  };
  auto integer = [](int RunConfig::*field) {
    return [field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = parse_int(k, v); };
  };
  r.add("domain.lx", [](RunConfig& c, const std::string& k, const std::string& v) { c.domain.lx = parse_number(k, v); });
  r.add("domain.ly", [](RunConfig& c, const std::string& k, const std::string& v) { c.domain.ly = parse_number(k, v); });
  r.add("domain.nx", [](RunConfig& c, const std::string& k, const std::string& v) { c.domain.nx = parse_int(k, v); });
  r.add("domain.ny", [](RunConfig& c, const std::string& k, const std::string& v) { c.domain.ny = parse_int(k, v); });
  r.add("time.dt", num(&RunConfig::dt));
  r.add("time.T", num(&RunConfig::T));
  r.add("time.theta", num(&RunConfig::theta));
  r.add("solver.tol", num(&RunConfig::tol));
  r.add("solver.max_iter", integer(&RunConfig::max_iter));
  r.add("solver.eigen_tol", num(&RunConfig::eigen_tol));
  r.add("picard.enabled", [](RunConfig& c, const std::string& k, const std::string& v) { c.picard = parse_bool(k, v); });
  r.add("picard.k_max", integer(&RunConfig::picard_k_max));
  r.add("picard.tol", num(&RunConfig::picard_tol));
  r.add("data.preset", [](RunConfig& c, const std::string& k, const std::string& v) {
    try {
      c.data.preset = parse_data_preset(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(k + ": " + e.what() + " (constant|small|mixed|vortex)");
    }
  });
  r.add("data.amplitude", [](RunConfig& c, const std::string& k, const std::string& v) { c.data.amplitude = parse_number(k, v); });
  r.add("data.n_mean", [](RunConfig& c, const std::string& k, const std::string& v) { c.data.n_mean = parse_number(k, v); });
  r.add("data.c_mean", [](RunConfig& c, const std::string& k, const std::string& v) { c.data.c_mean = parse_number(k, v); });
  r.add("sensitivity.kind", [](RunConfig& c, const std::string& k, const std::string& v) {
    using K = SensitivitySpec::Kind;
    if (v == "identity") c.sensitivity.kind = K::identity;
    else if (v == "scaled") c.sensitivity.kind = K::scaled_identity;
    else if (v == "rotation") c.sensitivity.kind = K::rotation;
    else throw ConfigError(k + ": expected identity|scaled|rotation, got '" + v + "'");
  });
  r.add("sensitivity.a", [](RunConfig& c, const std::string& k, const std::string& v) { c.sensitivity.a = parse_number(k, v); });
  r.add("sensitivity.b", [](RunConfig& c, const std::string& k, const std::string& v) { c.sensitivity.b = parse_number(k, v); });
  r.add("potential.kind", [](RunConfig& c, const std::string& k, const std::string& v) {
    if (v == "zero") c.potential.kind = PotentialSelector::Kind::zero;
    else if (v == "linear_gravity") c.potential.kind = PotentialSelector::Kind::linear_gravity;
    else throw ConfigError(k + ": expected zero|linear_gravity, got '" + v + "'");
  });
  r.add("potential.g", [](RunConfig& c, const std::string& k, const std::string& v) { c.potential.g = parse_number(k, v); });
  r.add("forcing.kind", [](RunConfig& c, const std::string& k, const std::string& v) {
    if (v == "zero") c.forcing.kind = ForcingSelector::Kind::zero;
    else if (v == "decaying") c.forcing.kind = ForcingSelector::Kind::decaying;
    else throw ConfigError(k + ": expected zero|decaying, got '" + v + "'");
  });
  r.add("forcing.amplitude", [](RunConfig& c, const std::string& k, const std::string& v) { c.forcing.amplitude = parse_number(k, v); });
  r.add("forcing.rate", [](RunConfig& c, const std::string& k, const std::string& v) { c.forcing.rate = parse_number(k, v); });
  r.add("diagnostics.r", [](RunConfig& c, const std::string& k, const std::string& v) { c.diagnostics.r = parse_number(k, v); });
  r.add("diagnostics.q", [](RunConfig& c, const std::string& k, const std::string& v) { c.diagnostics.q = parse_number(k, v); });
  r.add("diagnostics.lambda1", [&lambda1_given](RunConfig& c, const std::string& k, const std::string& v) {
    c.diagnostics.lambda1 = parse_number(k, v);
    lambda1_given = true;
  });
  r.add("diagnostics.lambda2", [](RunConfig& c, const std::string& k, const std::string& v) { c.diagnostics.lambda2 = parse_number(k, v); });
  r.add("diagnostics.window_start", num(&RunConfig::window_start));
  r.add("output.dir", [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; });
  r.add("output.snapshot_stride", integer(&RunConfig::snapshot_stride));
  r.add("output.blowup_ceiling", num(&RunConfig::blowup_ceiling));
  r.add("lipschitz.delta", num(&RunConfig::lipschitz_delta));
  r.add("lipschitz.delta_small", num(&RunConfig::lipschitz_delta_small));
  r.add("lipschitz.ratio_ceiling", num(&RunConfig::lipschitz_ratio_ceiling));
  return r;
}

void require(bool ok, const std::string& key, const std::string& msg) {
  if (!ok) throw ConfigError(key + ": " + msg);
}

}  // namespace

void validate(RunConfig& c, bool lambda1_given) {
  require(c.domain.lx > 0.0, "domain.lx", "must be > 0");
  require(c.domain.ly > 0.0, "domain.ly", "must be > 0");
  require(c.domain.nx >= 4, "domain.nx", "must be >= 4");
  require(c.domain.ny >= 4, "domain.ny", "must be >= 4");
  require(c.dt > 0.0, "time.dt", "must be > 0");
  require(c.T > 0.0, "time.T", "must be > 0");
  require(c.dt <= c.T, "time.dt", "must not exceed time.T");
  require(c.theta == 1.0 || c.theta == 0.5, "time.theta", "must be 1 or 1/2");
  require(c.tol > 0.0 && c.tol <= 1e-3, "solver.tol", "must lie in (0, 1e-3]");
  require(c.max_iter >= 1, "solver.max_iter", "must be >= 1");
  require(c.eigen_tol > 0.0 && c.eigen_tol <= 1e-3, "solver.eigen_tol", "must lie in (0, 1e-3]");
  require(c.picard_k_max >= 1, "picard.k_max", "must be >= 1");
  require(c.picard_tol > 0.0, "picard.tol", "must be > 0");
  require(c.data.amplitude >= 0.0, "data.amplitude", "must be >= 0");
  require(c.data.n_mean >= 0.0, "data.n_mean", "must be >= 0");
  require(c.data.c_mean >= 0.0, "data.c_mean", "must be >= 0");
  if (c.sensitivity.kind == SensitivitySpec::Kind::rotation) {
    require(c.sensitivity.a > 0.0, "sensitivity.a", "rotation form needs a > 0");
  }
  require(c.window_start >= 0.0 && c.window_start < 1.0, "diagnostics.window_start", "must lie in [0, 1)");
  require(c.snapshot_stride >= 0, "output.snapshot_stride", "must be >= 0");
  require(c.blowup_ceiling > 0.0, "output.blowup_ceiling", "must be > 0");
  require(c.lipschitz_delta > 0.0, "lipschitz.delta", "must be > 0");
  require(c.lipschitz_delta_small > 0.0, "lipschitz.delta_small", "must be > 0");
  require(c.lipschitz_ratio_ceiling > 0.0, "lipschitz.ratio_ceiling", "must be > 0");

  const double ln = discrete_lambda_neumann(c.domain);
  const double ld = discrete_lambda_dirichlet(c.domain);
  try {
    validate_exponents(c.diagnostics);
    if (!lambda1_given) c.diagnostics.lambda1 = default_lambda1(ln, c.diagnostics.q);
    ksns::validate(c.diagnostics, ln, ld);
  } catch (const DiagnosticsError& e) {
    throw ConfigError(e.what());
  }
  if (c.forcing.kind == ForcingSelector::Kind::decaying) {
    require(c.forcing.rate > c.diagnostics.lambda2, "forcing.rate",
            "must exceed diagnostics.lambda2 so that e^{lambda2 t} f is integrable");
  }
}

RunConfig parse_config(std::istream& is, const std::string& source) {
  RunConfig cfg;
  bool lambda1_given = false;
  Registry reg = make_registry(lambda1_given);
  std::set<std::string> seen;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const auto& [path, _] : reg.setters) known = known || path.rfind(section + ".", 0) == 0;
      if (!known) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "empty key");
    std::string path;
    if (!section.empty()) {
      path = section + "." + key;
      if (!reg.setters.count(path)) throw ConfigError(where + "unknown key " + path);
    } else {
      const auto it = reg.by_name.find(key);
      if (it == reg.by_name.end()) throw ConfigError(where + "unknown key " + key);
      if (it->second.size() != 1) throw ConfigError(where + "ambiguous key " + key + " outside a section");
      path = it->second.front();
    }
    if (!seen.insert(path).second) throw ConfigError(where + "repeated key " + path);
    if (value.empty()) throw ConfigError(where + path + ": missing value");
    try {
      reg.setters.at(path)(cfg, path, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  validate(cfg, lambda1_given);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  return parse_config(is, path.string());
}

std::string echo(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  auto kind = [](SensitivitySpec::Kind k) {
    switch (k) {
      case SensitivitySpec::Kind::identity: return "identity";
      case SensitivitySpec::Kind::scaled_identity: return "scaled";
      case SensitivitySpec::Kind::rotation: return "rotation";
      default: return "custom";
    }
  };
  os << "[domain]\nlx = " << c.domain.lx << "\nly = " << c.domain.ly << "\nnx = " << c.domain.nx
     << "\nny = " << c.domain.ny << "\n";
  os << "[time]\ndt = " << c.dt << "\nT = " << c.T << "\ntheta = " << c.theta << "\n";
  os << "[solver]\ntol = " << c.tol << "\nmax_iter = " << c.max_iter << "\neigen_tol = " << c.eigen_tol << "\n";
  os << "[picard]\nenabled = " << (c.picard ? "true" : "false") << "\nk_max = " << c.picard_k_max
     << "\ntol = " << c.picard_tol << "\n";
  os << "[data]\npreset = " << to_string(c.data.preset) << "\namplitude = " << c.data.amplitude
     << "\nn_mean = " << c.data.n_mean << "\nc_mean = " << c.data.c_mean << "\n";
  os << "[sensitivity]\nkind = " << kind(c.sensitivity.kind) << "\na = " << c.sensitivity.a
     << "\nb = " << c.sensitivity.b << "\n";
  os << "[potential]\nkind = "
     << (c.potential.kind == PotentialSelector::Kind::zero ? "zero" : "linear_gravity") << "\ng = " << c.potential.g
     << "\n";
  os << "[forcing]\nkind = " << (c.forcing.kind == ForcingSelector::Kind::zero ? "zero" : "decaying")
     << "\namplitude = " << c.forcing.amplitude << "\nrate = " << c.forcing.rate << "\n";
  os << "[diagnostics]\nr = " << c.diagnostics.r << "\nq = " << c.diagnostics.q
     << "\nlambda1 = " << c.diagnostics.lambda1 << "\nlambda2 = " << c.diagnostics.lambda2
     << "\nwindow_start = " << c.window_start << "\n";
  os << "[output]\n";
  if (!c.out_dir.empty()) os << "dir = " << c.out_dir << "\n";
  os << "snapshot_stride = " << c.snapshot_stride << "\nblowup_ceiling = " << c.blowup_ceiling << "\n";
  os << "[lipschitz]\ndelta = " << c.lipschitz_delta << "\ndelta_small = " << c.lipschitz_delta_small
     << "\nratio_ceiling = " << c.lipschitz_ratio_ceiling << "\n";
  return os.str();
}

}  // namespace ksns
