#include "ssrg/config_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ssrg/kernel.hpp"

#ifndef SSRG_VERSION
#define SSRG_VERSION "0.0.0"
#endif

namespace ssrg {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path, message);
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double read_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

int read_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

std::uint64_t read_u64(const json& v, const std::string& path) {
  if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)))
    fail(path, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string read_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

const json& as_object(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
  return v;
}

void parse_lattice(const json& j, LoadedConfig& lc) {
  const json& obj = as_object(j, "lattice");
  reject_unknown(obj, "lattice", {"d", "L", "T", "dx", "dt"});
  LatticeSpec& lat = lc.model.lattice;
  if (const json* v = find(obj, "d")) {
    lat.d = read_int(*v, "lattice.d");
    if (lat.d < 1 || lat.d > 3) fail("lattice.d", "spatial dimension must be 1, 2, or 3");
  }
  if (const json* v = find(obj, "L")) {
    lat.L = read_int(*v, "lattice.L");
    if (lat.L < 1) fail("lattice.L", "need at least one site per axis");
  }
  if (const json* v = find(obj, "T")) {
    lat.T = read_int(*v, "lattice.T");
    if (lat.T < 1) fail("lattice.T", "need at least one time slice");
  }
  if (const json* v = find(obj, "dx")) {
    lat.dx = read_number(*v, "lattice.dx");
    if (!(lat.dx > 0)) fail("lattice.dx", "lattice spacing must be positive");
  }
  if (const json* v = find(obj, "dt")) {
    lat.dt = read_number(*v, "lattice.dt");
    if (!(lat.dt > 0)) fail("lattice.dt", "time step must be positive");
  }
}

void parse_dispersion(const json& j, LoadedConfig& lc) {
  const json& obj = as_object(j, "dispersion");
  reject_unknown(obj, "dispersion", {"type", "params", "mu"});
  if (const json* v = find(obj, "type")) {
    if (read_string(*v, "dispersion.type") != "cosine")
      fail("dispersion.type", "the only supported band shape is \"cosine\"");
  }
  if (const json* v = find(obj, "params")) {
    const json& p = as_object(*v, "dispersion.params");
    reject_unknown(p, "dispersion.params", {"c0", "amp"});
    if (const json* w = find(p, "c0"))
      lc.model.dispersion.c0 = read_number(*w, "dispersion.params.c0");
    if (const json* w = find(p, "amp")) {
      if (!w->is_array()) fail("dispersion.params.amp", "expected an array of numbers");
      std::vector<double> amp;
      for (std::size_t i = 0; i < w->size(); ++i)
        amp.push_back(read_number((*w)[i], "dispersion.params.amp[" + std::to_string(i) + "]"));
      if (static_cast<int>(amp.size()) != lc.model.lattice.d)
        fail("dispersion.params.amp", "need one amplitude per spatial axis");
      lc.model.dispersion.amp = std::move(amp);
    }
  }
  if (const json* v = find(obj, "mu")) {
    lc.model.mu = read_number(*v, "dispersion.mu");
    if (!(lc.model.mu > 0)) fail("dispersion.mu", "the gap parameter must be positive");
  }
}

void parse_cutoff(const json& j, LoadedConfig& lc) {
  const json& obj = as_object(j, "cutoff");
  reject_unknown(obj, "cutoff", {"type", "params", "chi"});
  CutoffSpec& cut = lc.model.cutoff;
  if (const json* v = find(obj, "type")) {
    const std::string t = read_string(*v, "cutoff.type");
    if (t == "one")
      cut.uv = UvType::one;
    else if (t == "plateau")
      cut.uv = UvType::plateau;
    else
      fail("cutoff.type", "expected \"one\" or \"plateau\"");
  }
  if (const json* v = find(obj, "params")) {
    const json& p = as_object(*v, "cutoff.params");
    reject_unknown(p, "cutoff.params", {"inner", "outer", "ec"});
    if (const json* w = find(p, "inner")) cut.inner = read_number(*w, "cutoff.params.inner");
    if (const json* w = find(p, "outer")) cut.outer = read_number(*w, "cutoff.params.outer");
    if (const json* w = find(p, "ec")) cut.ec = read_number(*w, "cutoff.params.ec");
    if (!(cut.inner > 0)) fail("cutoff.params.inner", "must be positive");
    if (!(cut.outer > cut.inner)) fail("cutoff.params.outer", "must exceed inner");
    if (cut.outer > 1.0) fail("cutoff.params.outer", "must not exceed 1");
    if (!(cut.ec > 0)) fail("cutoff.params.ec", "must be positive");
  }
  if (const json* v = find(obj, "chi")) {
    const std::string t = read_string(*v, "cutoff.chi");
    if (t == "none")
      cut.chi = ChiType::none;
    else if (t == "k0_sharp")
      cut.chi = ChiType::k0_sharp;
    else if (t == "k0_bump")
      cut.chi = ChiType::k0_bump;
    else
      fail("cutoff.chi", "expected \"none\", \"k0_sharp\", or \"k0_bump\"");
  }
}

void parse_interaction(const json& j, LoadedConfig& lc) {
  const json& obj = as_object(j, "interaction");
  reject_unknown(obj, "interaction", {"type", "params", "lambda"});
  InteractionSpec& sp = lc.interaction;
  if (const json* v = find(obj, "type")) {
    sp.type = read_string(*v, "interaction.type");
    if (sp.type != "onsite" && sp.type != "nearest" && sp.type != "exponential")
      fail("interaction.type", "expected \"onsite\", \"nearest\", or \"exponential\"");
  }
  if (const json* v = find(obj, "params")) {
    const json& p = as_object(*v, "interaction.params");
    if (sp.type == "onsite")
      reject_unknown(p, "interaction.params", {"v0"});
    else if (sp.type == "nearest")
      reject_unknown(p, "interaction.params", {"v0", "v1"});
    else
      reject_unknown(p, "interaction.params", {"v0", "rate"});
    if (const json* w = find(p, "v0")) sp.v0 = read_number(*w, "interaction.params.v0");
    if (const json* w = find(p, "v1")) sp.v1 = read_number(*w, "interaction.params.v1");
    if (const json* w = find(p, "rate")) {
      sp.rate = read_number(*w, "interaction.params.rate");
      if (!(sp.rate > 0)) fail("interaction.params.rate", "decay rate must be positive");
    }
  }
  if (const json* v = find(obj, "lambda"))
    lc.model.lambda = read_number(*v, "interaction.lambda");
}

void parse_truncation(const json& j, LoadedConfig& lc) {
  const json& obj = as_object(j, "truncation");
  reject_unknown(obj, "truncation", {"r", "r0", "delta_max", "lambda_order", "m_max"});
  if (const json* v = find(obj, "r")) {
    lc.model.r = read_int(*v, "truncation.r");
    if (lc.model.r < 0) fail("truncation.r", "decay budget must be non-negative");
  }
  if (const json* v = find(obj, "r0")) {
    lc.model.r0 = read_int(*v, "truncation.r0");
    if (lc.model.r0 < 0) fail("truncation.r0", "decay budget must be non-negative");
  }
  if (const json* v = find(obj, "delta_max")) {
    lc.model.delta_max = read_int(*v, "truncation.delta_max");
    if (lc.model.delta_max < 0) fail("truncation.delta_max", "enumeration cap must be non-negative");
  }
  if (const json* v = find(obj, "lambda_order")) {
    lc.model.n_max = read_int(*v, "truncation.lambda_order");
    if (lc.model.n_max < 1) fail("truncation.lambda_order", "need at least first order");
  }
  if (const json* v = find(obj, "m_max")) {
    lc.run.m_max = read_int(*v, "truncation.m_max");
    if (lc.run.m_max != 2 && lc.run.m_max != 4 && lc.run.m_max != 6)
      fail("truncation.m_max", "expected 2, 4, or 6 external legs");
  }
}

void parse_run(const json& j, LoadedConfig& lc) {
  const json& obj = as_object(j, "run");
  reject_unknown(obj, "run", {"mode", "seed", "epsilon", "out", "format"});
  if (const json* v = find(obj, "mode")) lc.run.mode = parse_run_mode(read_string(*v, "run.mode"));
  if (const json* v = find(obj, "seed")) lc.model.seed = read_u64(*v, "run.seed");
  if (const json* v = find(obj, "epsilon")) {
    lc.model.epsilon = read_number(*v, "run.epsilon");
    if (!(lc.model.epsilon > 0)) fail("run.epsilon", "tolerance must be positive");
  }
  if (const json* v = find(obj, "out")) lc.run.out = read_string(*v, "run.out");
  if (const json* v = find(obj, "format"))
    lc.run.format = parse_report_format(read_string(*v, "run.format"));
}

const char* chi_name(ChiType chi) {
  switch (chi) {
    case ChiType::none:
      return "none";
    case ChiType::k0_sharp:
      return "k0_sharp";
    case ChiType::k0_bump:
      return "k0_bump";
  }
  return "none";
}

json config_json(const LoadedConfig& lc) {
  json j;
  json lat;
  lat["d"] = lc.model.lattice.d;
  lat["L"] = lc.model.lattice.L;
  lat["T"] = lc.model.lattice.T;
  lat["dx"] = lc.model.lattice.dx;
  lat["dt"] = lc.model.lattice.dt;
  j["lattice"] = lat;

  json disp;
  disp["type"] = "cosine";
  disp["params"]["c0"] = lc.model.dispersion.c0;
  disp["params"]["amp"] = lc.model.dispersion.amp;
  disp["mu"] = lc.model.mu;
  j["dispersion"] = disp;

  json cut;
  cut["type"] = lc.model.cutoff.uv == UvType::one ? "one" : "plateau";
  cut["params"]["inner"] = lc.model.cutoff.inner;
  cut["params"]["outer"] = lc.model.cutoff.outer;
  cut["params"]["ec"] = lc.model.cutoff.ec;
  cut["chi"] = chi_name(lc.model.cutoff.chi);
  j["cutoff"] = cut;

  json inter;
  inter["type"] = lc.interaction.type;
  inter["params"]["v0"] = lc.interaction.v0;
  if (lc.interaction.type == "nearest") inter["params"]["v1"] = lc.interaction.v1;
  if (lc.interaction.type == "exponential") inter["params"]["rate"] = lc.interaction.rate;
  inter["lambda"] = lc.model.lambda;
  j["interaction"] = inter;

  json trunc;
  trunc["r"] = lc.model.r;
  trunc["r0"] = lc.model.r0;
  trunc["delta_max"] = lc.model.delta_max;
  trunc["lambda_order"] = lc.model.n_max;
  trunc["m_max"] = lc.run.m_max;
  j["truncation"] = trunc;

  json run;
  run["mode"] = run_mode_name(lc.run.mode);
  run["seed"] = lc.model.seed;
  run["epsilon"] = lc.model.epsilon;
  run["out"] = lc.run.out;
  run["format"] = report_format_name(lc.run.format);
  j["run"] = run;
  return j;
}

json norm_element_obj(const NormElement& x) {
  json j;
  j["axes"] = x.valid() ? x.domain()->axes() : 0;
  json entries = json::array();
  if (x.valid()) {
    const SaturatedSet& dom = *x.domain();
    for (int i = 0; i < dom.size(); ++i) {
      json e;
      json delta = json::array();
      for (int a = 0; a < dom.at(i).size(); ++a) delta.push_back(dom.at(i)[a]);
      e["delta"] = delta;
      e["value"] = fmt17(x.at_index(i));
      entries.push_back(e);
    }
  }
  j["entries"] = entries;
  return j;
}

json manifest_obj(const RunManifest& m) {
  json j;
  j["version"] = m.version;
  j["mode"] = m.mode;
  j["config_digest"] = m.config_digest;
  j["seed"] = m.seed;
  j["epsilon"] = fmt17(m.epsilon);
  j["interaction"] = m.interaction;
  json lat;
  lat["d"] = m.lattice.d;
  lat["L"] = m.lattice.L;
  lat["T"] = m.lattice.T;
  lat["dx"] = fmt17(m.lattice.dx);
  lat["dt"] = fmt17(m.lattice.dt);
  j["lattice"] = lat;
  return j;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

}  // namespace

RunMode parse_run_mode(const std::string& name) {
  if (name == "verify") return RunMode::verify;
  if (name == "bounds") return RunMode::bounds;
  if (name == "greens") return RunMode::greens;
  if (name == "scaling") return RunMode::scaling;
  throw ConfigError("run.mode", "expected \"verify\", \"bounds\", \"greens\", or \"scaling\"");
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  throw ConfigError("run.format", "expected \"json\" or \"csv\"");
}

const char* run_mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::verify:
      return "verify";
    case RunMode::bounds:
      return "bounds";
    case RunMode::greens:
      return "greens";
    case RunMode::scaling:
      return "scaling";
  }
  return "verify";
}

const char* report_format_name(ReportFormat format) {
  return format == ReportFormat::csv ? "csv" : "json";
}

SpatialPotential make_potential(const InteractionSpec& spec, double dx) {
  const double v0 = spec.v0;
  if (spec.type == "onsite") {
    const double half = 0.5 * dx;
    return [v0, half](const std::vector<double>& x) {
      for (const double c : x)
        if (std::abs(c) >= half) return 0.0;
      return v0;
    };
  }
  if (spec.type == "nearest") {
    const double v1 = spec.v1;
    return [v0, v1, dx](const std::vector<double>& x) {
      long steps = 0;
      for (const double c : x) steps += std::lround(std::abs(c) / dx);
      if (steps == 0) return v0;
      return steps == 1 ? v1 : 0.0;
    };
  }
  if (spec.type == "exponential") {
    const double rate = spec.rate;
    return [v0, rate](const std::vector<double>& x) {
      double r2 = 0.0;
      for (const double c : x) r2 += c * c;
      return v0 * std::exp(-rate * std::sqrt(r2));
    };
  }
  throw ConfigError("interaction.type", "unknown preset \"" + spec.type + "\"");
}

LoadedConfig default_loaded_config() {
  LoadedConfig lc;
  // The default frequency cutoff is the smooth bump: it makes the covariance
  // two-sided in time.  Without any frequency factor the gapped time kernel
  // is supported on one side only, every equal-time loop vanishes, and the
  // deviation studies have nothing to measure.
  lc.model.cutoff.chi = ChiType::k0_bump;
  lc.model.potential = make_potential(lc.interaction, lc.model.lattice.dx);
  return lc;
}

LoadedConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", e.what());
  }
  if (!j.is_object()) throw ConfigError("config", "top level must be an object");
  reject_unknown(j, "", {"lattice", "dispersion", "cutoff", "interaction", "truncation", "run"});
  LoadedConfig lc = default_loaded_config();
  if (const json* v = find(j, "lattice")) parse_lattice(*v, lc);
  lc.model.dispersion.amp.assign(static_cast<std::size_t>(lc.model.lattice.d), 1.0);
  if (const json* v = find(j, "dispersion")) parse_dispersion(*v, lc);
  if (const json* v = find(j, "cutoff")) parse_cutoff(*v, lc);
  if (const json* v = find(j, "interaction")) parse_interaction(*v, lc);
  if (const json* v = find(j, "truncation")) parse_truncation(*v, lc);
  if (const json* v = find(j, "run")) parse_run(*v, lc);
  lc.model.potential = make_potential(lc.interaction, lc.model.lattice.dx);
  return lc;
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot open \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_text(const LoadedConfig& lc) { return config_json(lc).dump(2) + "\n"; }

std::string default_config_text() { return config_text(default_loaded_config()); }

std::string config_digest(const LoadedConfig& lc) {
  json j = config_json(lc);
  j["run"].erase("out");
  const std::string dump = j.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double parse17(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text.empty()) throw std::invalid_argument("parse17: empty string");
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size())
    throw std::invalid_argument("parse17: malformed number \"" + text + "\"");
  return v;
}

std::string norm_element_json(const NormElement& x) { return norm_element_obj(x).dump(2) + "\n"; }

NormElement norm_element_from_json(const std::string& text, const SaturatedSetPtr& dom) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("element", e.what());
  }
  if (!j.is_object()) throw ConfigError("element", "expected an object");
  reject_unknown(j, "element", {"axes", "entries"});
  const json* ax = find(j, "axes");
  if (!ax) throw ConfigError("element.axes", "missing");
  if (read_int(*ax, "element.axes") != dom->axes())
    throw ConfigError("element.axes", "does not match the domain");
  const json* en = find(j, "entries");
  if (!en || !en->is_array()) throw ConfigError("element.entries", "expected an array");
  if (static_cast<int>(en->size()) != dom->size())
    throw ConfigError("element.entries", "entry count does not match the domain");
  NormElement x(dom);
  for (int i = 0; i < dom->size(); ++i) {
    const std::string path = "element.entries[" + std::to_string(i) + "]";
    const json& e = (*en)[static_cast<std::size_t>(i)];
    if (!e.is_object()) throw ConfigError(path, "expected an object");
    reject_unknown(e, path, {"delta", "value"});
    const json* dl = find(e, "delta");
    if (!dl || !dl->is_array() || static_cast<int>(dl->size()) != dom->axes())
      throw ConfigError(path + ".delta", "expected one order per axis");
    MultiIndex mi(dom->axes());
    for (int a = 0; a < dom->axes(); ++a)
      mi.set(a, read_int((*dl)[static_cast<std::size_t>(a)],
                         path + ".delta[" + std::to_string(a) + "]"));
    if (!(mi == dom->at(i)))
      throw ConfigError(path + ".delta", "entries must follow the domain's enumeration order");
    const json* vl = find(e, "value");
    if (!vl || !vl->is_string()) throw ConfigError(path + ".value", "expected a decimal string");
    try {
      x.set_index(i, parse17(vl->get<std::string>()));
    } catch (const std::invalid_argument& bad) {
      throw ConfigError(path + ".value", bad.what());
    }
  }
  return x;
}

RunManifest make_manifest(const LoadedConfig& lc) {
  RunManifest m;
  m.version = SSRG_VERSION;
  m.mode = run_mode_name(lc.run.mode);
  m.config_digest = config_digest(lc);
  m.seed = lc.model.seed;
  m.epsilon = lc.model.epsilon;
  m.interaction = lc.interaction.type;
  m.lattice = lc.model.lattice;
  return m;
}

std::string verification_report_json(const std::vector<CheckResult>& checks,
                                     const RunManifest& m) {
  json j;
  j["manifest"] = manifest_obj(m);
  json arr = json::array();
  int passed = 0, failed = 0, skipped = 0;
  for (const CheckResult& c : checks) {
    json e;
    e["module"] = c.module;
    e["property"] = c.property;
    e["status"] = c.skipped ? "skip" : (c.pass ? "pass" : "fail");
    e["detail"] = c.detail;
    arr.push_back(e);
    if (c.skipped)
      ++skipped;
    else if (c.pass)
      ++passed;
    else
      ++failed;
  }
  j["checks"] = arr;
  json s;
  s["total"] = static_cast<int>(checks.size());
  s["passed"] = passed;
  s["failed"] = failed;
  s["skipped"] = skipped;
  s["all_passed"] = all_passed(checks);
  j["summary"] = s;
  return j.dump(2) + "\n";
}

std::string verification_csv(const std::vector<CheckResult>& checks) {
  std::string out = "module,property,status,detail\n";
  for (const CheckResult& c : checks) {
    out += csv_escape(c.module);
    out += ',';
    out += csv_escape(c.property);
    out += ',';
    out += c.skipped ? "skip" : (c.pass ? "pass" : "fail");
    out += ',';
    out += csv_escape(c.detail);
    out += '\n';
  }
  return out;
}

std::string bounds_report_json(const BoundsReport& br, const RunManifest& m) {
  json j;
  j["manifest"] = manifest_obj(m);
  json sc;
  sc["g"] = fmt17(br.scalars.g);
  sc["gamma"] = fmt17(br.scalars.gamma);
  sc["E"] = fmt17(br.scalars.E);
  sc["mu"] = fmt17(br.scalars.mu);
  j["scalars"] = sc;
  json in;
  in["v0_norm_unit"] = fmt17(br.v0_norm_unit);
  in["upsilon_unit"] = fmt17(br.upsilon_unit);
  in["lambda"] = fmt17(br.lambda);
  j["interaction"] = in;
  json ct;
  ct["gram_sq"] = fmt17(br.gram_sq);
  ct["gapped_sq"] = fmt17(br.gapped_sq);
  ct["b"] = fmt17(br.b);
  ct["alpha"] = fmt17(br.alpha);
  ct["frak_c"] = norm_element_obj(br.frak_c);
  j["contraction"] = ct;
  json nv = json::array();
  for (const NormElement& x : br.n_values) nv.push_back(norm_element_obj(x));
  j["n_values"] = nv;
  json vd;
  vd["v0_norm"] = fmt17(br.verdict.v0_norm);
  vd["upsilon"] = fmt17(br.verdict.upsilon);
  vd["threshold"] = fmt17(br.verdict.threshold);
  vd["part_i"] = br.verdict.part_i;
  vd["part_ii"] = br.verdict.part_ii;
  vd["epsilon"] = fmt17(br.epsilon);
  j["verdict"] = vd;
  json bd;
  bd["r"] = br.r;
  bd["r0"] = br.r0;
  bd["delta_max"] = br.delta_max;
  j["budgets"] = bd;
  return j.dump(2) + "\n";
}

std::string bounds_csv(const BoundsReport& br) {
  std::string out = "name,value\n";
  const auto row = [&out](const std::string& name, const std::string& value) {
    out += name;
    out += ',';
    out += value;
    out += '\n';
  };
  row("g", fmt17(br.scalars.g));
  row("gamma", fmt17(br.scalars.gamma));
  row("E", fmt17(br.scalars.E));
  row("mu", fmt17(br.scalars.mu));
  row("v0_norm_unit", fmt17(br.v0_norm_unit));
  row("upsilon_unit", fmt17(br.upsilon_unit));
  row("lambda", fmt17(br.lambda));
  row("gram_sq", fmt17(br.gram_sq));
  row("gapped_sq", fmt17(br.gapped_sq));
  row("b", fmt17(br.b));
  row("alpha", fmt17(br.alpha));
  row("threshold", fmt17(br.verdict.threshold));
  row("v0_norm", fmt17(br.verdict.v0_norm));
  row("upsilon", fmt17(br.verdict.upsilon));
  row("part_i", br.verdict.part_i ? "1" : "0");
  row("part_ii", br.verdict.part_ii ? "1" : "0");
  row("epsilon", fmt17(br.epsilon));
  row("r", std::to_string(br.r));
  row("r0", std::to_string(br.r0));
  row("delta_max", std::to_string(br.delta_max));
  for (std::size_t k = 0; k < br.n_values.size(); ++k)
    row("n_const_" + std::to_string(k),
        fmt17(br.n_values[k].valid() ? br.n_values[k].constant_term() : 0.0));
  return out;
}

std::string greens_report_json(const GreensSet& gs, const std::vector<DeviationRow>& rows,
                               double lambda, int m_max, const RunManifest& m) {
  json j;
  j["manifest"] = manifest_obj(m);
  j["lambda"] = fmt17(lambda);
  j["coupling_order_max"] = gs.n_max;
  json channels = json::array();
  for (int n = 1; n <= 3 && 2 * n <= m_max; ++n) {
    json ch;
    ch["legs"] = 2 * n;
    json orders = json::array();
    const auto& per_order = gs.orders[static_cast<std::size_t>(n - 1)];
    for (std::size_t k = 0; k < per_order.size(); ++k) {
      const Kernel& g = per_order[k];
      json o;
      o["order"] = static_cast<int>(k);
      o["entries"] = static_cast<int>(g.entries().size());
      o["sup"] = fmt17(sup_abs(g));
      o["scalar_norm"] = fmt17(norm_1inf_scalar(g));
      orders.push_back(o);
    }
    ch["orders"] = orders;
    channels.push_back(ch);
  }
  j["channels"] = channels;
  json lz = json::array();
  for (const Complex& c : gs.log_z) {
    json t;
    t["re"] = fmt17(c.real());
    t["im"] = fmt17(c.imag());
    lz.push_back(t);
  }
  j["log_z"] = lz;
  json dr = json::array();
  for (const DeviationRow& row : rows) {
    if (row.channel > m_max) continue;
    json e;
    e["channel"] = row.channel;
    json delta = json::array();
    for (int a = 0; a < row.delta.size(); ++a) delta.push_back(row.delta[a]);
    e["delta"] = delta;
    e["value"] = fmt17(row.value);
    e["bound_shape"] = fmt17(row.bound_shape);
    e["measured_const"] = fmt17(row.measured_const);
    dr.push_back(e);
  }
  j["deviations"] = dr;
  return j.dump(2) + "\n";
}

std::string deviation_rows_csv(const std::vector<DeviationRow>& rows) {
  std::string out = "channel,delta,value,bound_shape,measured_const\n";
  for (const DeviationRow& row : rows) {
    out += std::to_string(row.channel);
    out += ',';
    for (int a = 0; a < row.delta.size(); ++a) {
      if (a > 0) out += ';';
      out += std::to_string(row.delta[a]);
    }
    out += ',';
    out += fmt17(row.value);
    out += ',';
    out += fmt17(row.bound_shape);
    out += ',';
    out += fmt17(row.measured_const);
    out += '\n';
  }
  return out;
}

std::string scaling_report_json(const ScalingResult& sr, const RunManifest& m) {
  json j;
  j["manifest"] = manifest_obj(m);
  json ls = json::array();
  for (const double l : sr.lambdas) ls.push_back(fmt17(l));
  j["lambdas"] = ls;
  json channels = json::array();
  for (int n = 0; n < 3; ++n) {
    json ch;
    ch["legs"] = 2 * (n + 1);
    json vs = json::array();
    for (const double v : sr.values[static_cast<std::size_t>(n)]) vs.push_back(fmt17(v));
    ch["values"] = vs;
    ch["slope"] = fmt17(sr.slopes[static_cast<std::size_t>(n)]);
    channels.push_back(ch);
  }
  j["channels"] = channels;
  return j.dump(2) + "\n";
}

std::string scaling_csv(const ScalingResult& sr) {
  std::string out = "lambda,two_leg,four_leg,six_leg\n";
  for (std::size_t i = 0; i < sr.lambdas.size(); ++i) {
    out += fmt17(sr.lambdas[i]);
    for (int n = 0; n < 3; ++n) {
      out += ',';
      out += fmt17(sr.values[static_cast<std::size_t>(n)][i]);
    }
    out += '\n';
  }
  out += "slope";
  for (int n = 0; n < 3; ++n) {
    out += ',';
    out += fmt17(sr.slopes[static_cast<std::size_t>(n)]);
  }
  out += '\n';
  return out;
}

}  // namespace ssrg
