#include "crflow/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace crflow {

namespace {

constexpr double kTwoPi = 6.28318530717958647692529;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

struct KeyValues {
  std::map<std::string, std::string> kv;
  mutable std::map<std::string, bool> used;

  bool has(const std::string& k) const { return kv.count(k) > 0; }

  std::string get(const std::string& k, const std::string& fallback) const {
    auto it = kv.find(k);
    if (it == kv.end()) return fallback;
    used[k] = true;
    return it->second;
  }

  double get_double(const std::string& k, double fallback) const {
    auto it = kv.find(k);
    if (it == kv.end()) return fallback;
    used[k] = true;
    try {
      std::size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("field '" + k + "': not a number: " + it->second);
    }
  }

  long long get_int(const std::string& k, long long fallback) const {
    auto it = kv.find(k);
    if (it == kv.end()) return fallback;
    used[k] = true;
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("field '" + k + "': not an integer: " + it->second);
    }
  }

  void check_all_used() const {
    for (const auto& [k, v] : kv)
      if (!used.count(k)) throw ConfigError("unknown field '" + k + "'");
  }
};

KeyValues parse_lines(const std::string& text) {
  KeyValues out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (out.kv.count(key))
      throw ConfigError("duplicate field '" + key + "'");
    out.kv[key] = val;
  }
  return out;
}

std::vector<TrigFactor> parse_factors(const std::string& key, const std::string& text,
                                      const std::vector<double>& periods) {
  std::vector<TrigFactor> out;
  if (trim(text).empty()) return out;
  for (const std::string& part : split(text, ',')) {
    const auto bits = split(part, ':');
    if (bits.size() < 2 || bits.size() > 3)
      throw ConfigError("field '" + key + "': factor must be axis:harmonic[:phase]");
    TrigFactor f;
    try {
      f.axis = std::stoi(bits[0]);
      const double harmonic = std::stod(bits[1]);
      if (f.axis < 0 || f.axis >= 2 * static_cast<int>(periods.size()))
        throw std::out_of_range("axis");
      f.freq = kTwoPi * harmonic / periods[static_cast<std::size_t>(f.axis / 2)];
      f.phase = bits.size() == 3 ? std::stod(bits[2]) : 0.0;
    } catch (const std::exception&) {
      throw ConfigError("field '" + key + "': bad factor '" + part + "'");
    }
    out.push_back(f);
  }
  return out;
}

cplx parse_coeff(const std::string& key, const std::string& text) {
  const auto bits = split(text, ',');
  try {
    if (bits.size() == 1) return cplx(std::stod(bits[0]), 0.0);
    if (bits.size() == 2) return cplx(std::stod(bits[0]), std::stod(bits[1]));
  } catch (const std::exception&) {
  }
  throw ConfigError("field '" + key + "': expected re or re,im");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  const KeyValues kv = parse_lines(text);
  RunConfig cfg;

  const std::string model_type = kv.get("model.type", "torus");
  if (model_type == "hopf")
    cfg.model_kind = RunConfig::ModelKind::hopf;
  else if (model_type == "torus")
    cfg.model_kind = RunConfig::ModelKind::torus;
  else
    throw ConfigError("field 'model.type': expected hopf or torus");

  cfg.n = static_cast<int>(kv.get_int("model.n", cfg.model_kind == RunConfig::ModelKind::hopf ? 2 : 1));
  cfg.alpha_modulus = kv.get_double("model.alpha", 2.0);
  cfg.N = static_cast<int>(kv.get_int("model.N", 32));

  if (kv.has("model.periods")) {
    for (const std::string& p : split(kv.get("model.periods", ""), ','))
      cfg.periods.push_back(std::stod(p));
  } else {
    const double P = kv.get_double("model.period", kTwoPi);
    cfg.periods.assign(static_cast<std::size_t>(std::max(cfg.n, 1)), P);
  }

  const long long pert_count = kv.get_int("perturbation.count", 0);
  for (long long i = 0; i < pert_count; ++i) {
    const std::string base = "perturbation." + std::to_string(i) + ".";
    CosineEntry e;
    const auto rc = split(kv.get(base + "entry", "0,0"), ',');
    if (rc.size() != 2) throw ConfigError("field '" + base + "entry': expected i,j");
    e.row = std::stoi(rc[0]);
    e.col = std::stoi(rc[1]);
    e.coeff = parse_coeff(base + "coeff", kv.get(base + "coeff", "0"));
    e.factors = parse_factors(base + "factors", kv.get(base + "factors", ""), cfg.periods);
    cfg.entries.push_back(std::move(e));
  }

  const long long pot_count = kv.get_int("potential.count", 0);
  for (long long i = 0; i < pot_count; ++i) {
    const std::string base = "potential." + std::to_string(i) + ".";
    TrigTerm t;
    t.coeff = parse_coeff(base + "coeff", kv.get(base + "coeff", "0"));
    t.factors = parse_factors(base + "factors", kv.get(base + "factors", ""), cfg.periods);
    cfg.potential.push_back(std::move(t));
  }

  const std::string form = kv.get("flow.formulation", "tensor");
  if (form == "tensor") {
    cfg.formulation = Formulation::tensor;
  } else if (form == "potential") {
    cfg.formulation = Formulation::potential;
  } else if (form == "closed_form") {
    cfg.formulation = Formulation::closed_form;
  } else if (form == "both") {
    cfg.formulation = Formulation::tensor;
    cfg.run_both = true;
  } else {
    throw ConfigError("field 'flow.formulation': expected tensor|potential|both|closed_form");
  }

  cfg.dt0 = kv.get_double("flow.dt0", cfg.dt0);
  cfg.dt_min = kv.get_double("flow.dt_min", cfg.dt_min);
  cfg.t_end = kv.get_double("flow.t_end", cfg.t_end);
  cfg.checkpoint_every = static_cast<int>(kv.get_int("flow.checkpoint_every", cfg.checkpoint_every));
  cfg.seed = static_cast<std::uint64_t>(kv.get_int("flow.seed", 1));
  cfg.hopf_samples = static_cast<int>(kv.get_int("flow.samples", cfg.hopf_samples));
  cfg.positivity_tol = kv.get_double("flow.positivity_tol", cfg.positivity_tol);

  cfg.output_dir = kv.get("output.dir", "");
  cfg.locus_threshold = kv.get_double("output.locus_threshold", 0.0);
  const std::string quiet = kv.get("output.quiet", "false");
  cfg.quiet = (quiet == "true" || quiet == "1");

  kv.check_all_used();
  cfg.validate();
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void RunConfig::validate() const {
  if (model_kind == ModelKind::hopf) {
    if (n < 2) throw ConfigError("field 'model.n': hopf needs n >= 2");
    if (!(alpha_modulus > 0.0) || alpha_modulus == 1.0)
      throw ConfigError("field 'model.alpha': must be positive and != 1");
    if (formulation != Formulation::closed_form)
      throw ConfigError("field 'flow.formulation': hopf runs use closed_form");
    if (run_both) throw ConfigError("field 'flow.formulation': both requires a torus model");
    if (hopf_samples < 4) throw ConfigError("field 'flow.samples': need >= 4");
  } else {
    if (n < 1) throw ConfigError("field 'model.n': must be >= 1");
    if (N < 5) throw ConfigError("field 'model.N': need >= 5 points per axis");
    if (static_cast<int>(periods.size()) != n)
      throw ConfigError("field 'model.periods': need one period per coordinate");
    for (double P : periods)
      if (!(P > 0.0)) throw ConfigError("field 'model.periods': must be positive");
    if (formulation == Formulation::closed_form)
      throw ConfigError("field 'flow.formulation': closed_form is only valid with hopf");
  }
  if (!(dt0 > 0.0)) throw ConfigError("field 'flow.dt0': must be positive");
  if (!(dt_min > 0.0) || dt_min >= dt0)
    throw ConfigError("field 'flow.dt_min': must satisfy 0 < dt_min < dt0");
  if (!(t_end > 0.0)) throw ConfigError("field 'flow.t_end': must be positive");
  if (checkpoint_every < 1)
    throw ConfigError("field 'flow.checkpoint_every': must be >= 1");
  if (!(positivity_tol > 0.0) || positivity_tol > 1e-3)
    throw ConfigError("field 'flow.positivity_tol': must be in (0, 1e-3]");
}

TorusModel RunConfig::torus_model() const {
  if (model_kind != ModelKind::torus)
    throw ContractViolation("torus_model() called on a hopf config");
  return TorusModel(n, periods, entries, potential);
}

HopfModel RunConfig::hopf_model() const {
  if (model_kind != ModelKind::hopf)
    throw ContractViolation("hopf_model() called on a torus config");
  return HopfModel(n, alpha_modulus);
}

// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, RunConfig>> builtin_scenarios() {
  std::vector<std::pair<std::string, RunConfig>> out;

  {
    RunConfig c;
    c.model_kind = RunConfig::ModelKind::torus;
    c.n = 1;
    c.N = 32;
    c.periods = {kTwoPi};
    c.formulation = Formulation::tensor;
    c.dt0 = 1e-2;
    c.dt_min = 1e-6;
    c.t_end = 1.0;
    c.checkpoint_every = 10;
    out.emplace_back("flat-torus", c);
  }
  {
    // The canonical smoothing run used by the formulation-equivalence and
    // identity checks: mixed harmonics keep the truncation signal above
    // roundoff while the explicit stepper stays comfortably stable at
    // N = 64, dt = 1e-3.
    RunConfig c;
    c.model_kind = RunConfig::ModelKind::torus;
    c.n = 1;
    c.N = 64;
    c.periods = {kTwoPi};
    c.entries.push_back(CosineEntry{0, 0, cplx(0.10, 0.0), {TrigFactor{0, 1.0, 0.0}}});
    c.entries.push_back(
        CosineEntry{0, 0, cplx(0.05, 0.0), {TrigFactor{0, 2.0, 0.0}, TrigFactor{1, 2.0, 0.0}}});
    c.entries.push_back(CosineEntry{0, 0, cplx(0.02, 0.0), {TrigFactor{1, 3.0, 0.5}}});
    c.formulation = Formulation::tensor;
    c.run_both = true;
    c.dt0 = 1e-3;
    c.dt_min = 1e-7;
    c.t_end = 0.2;
    c.checkpoint_every = 5;
    out.emplace_back("smooth-torus-n1", c);
  }
  {
    RunConfig c;
    c.model_kind = RunConfig::ModelKind::torus;
    c.n = 2;
    c.N = 16;
    c.periods = {kTwoPi, kTwoPi};
    c.potential.push_back(TrigTerm{cplx(0.2, 0.0), {TrigFactor{0, 1.0, 0.0}, TrigFactor{3, 1.0, 0.0}}});
    c.formulation = Formulation::tensor;
    c.dt0 = 5e-3;
    c.dt_min = 1e-6;
    c.t_end = 0.25;
    c.checkpoint_every = 5;
    out.emplace_back("kahler-torus-n2", c);
  }
  {
    RunConfig c;
    c.model_kind = RunConfig::ModelKind::torus;
    c.n = 2;
    c.N = 16;
    c.periods = {kTwoPi, kTwoPi};
    c.entries.push_back(CosineEntry{0, 0, cplx(0.1, 0.0), {TrigFactor{2, 1.0, 0.0}}});
    c.formulation = Formulation::tensor;
    c.dt0 = 5e-3;
    c.dt_min = 1e-6;
    c.t_end = 0.25;
    c.checkpoint_every = 5;
    out.emplace_back("nonkahler-torus-n2", c);
  }
  for (int n : {2, 3}) {
    // dt_min keeps the terminal conditioning ~1/(n (T - t)) inside the range
    // where curvature diagnostics are still numerically meaningful.
    RunConfig c;
    c.model_kind = RunConfig::ModelKind::hopf;
    c.n = n;
    c.alpha_modulus = 2.0;
    c.formulation = Formulation::closed_form;
    c.dt0 = 1e-3;
    c.dt_min = 1e-6;
    c.t_end = 1.0;
    c.checkpoint_every = 5;
    c.hopf_samples = 64;
    c.seed = 7;
    out.emplace_back("hopf-n" + std::to_string(n), c);
  }
  return out;
}

RunConfig builtin_scenario(const std::string& name) {
  for (auto& [key, cfg] : builtin_scenarios())
    if (key == name) return cfg;
  throw ConfigError("unknown builtin scenario '" + name + "'");
}

}  // namespace crflow
