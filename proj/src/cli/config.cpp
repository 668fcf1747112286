#include "config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "semm/analysis.hpp"
#include "semm/error.hpp"

namespace semm::cli {

namespace {

namespace fs = std::filesystem;

void check_keys(const Json& j, const std::string& field, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ValidationError(field, "must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError(field + "." + key, "unknown key");
  }
}

double number(const Json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      return parse_number(j.get<std::string>());
    } catch (const SyntaxError& e) {
      throw ValidationError(field, e.what());
    }
  }
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  throw ValidationError(field, "must be a number");
}

double number_or(const Json& j, const char* key, const std::string& field, double fallback) {
  return j.contains(key) ? number(j.at(key), field + "." + key) : fallback;
}

double required(const Json& j, const char* key, const std::string& field) {
  if (!j.contains(key)) throw ValidationError(field + "." + key, "is required");
  return number(j.at(key), field + "." + key);
}

std::uint64_t integer(const Json& j, const std::string& field) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw ValidationError(field, "must be a nonnegative integer");
}

bool boolean(const Json& j, const std::string& field) {
  if (!j.is_boolean()) throw ValidationError(field, "must be true or false");
  return j.get<bool>();
}

std::string string(const Json& j, const std::string& field) {
  if (!j.is_string()) throw ValidationError(field, "must be a string");
  return j.get<std::string>();
}

// Infinite lifetimes are written as null.
Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

RfSpec rf_from_json(const Json& j, const std::string& field, RfSpec fallback) {
  if (j.is_string()) return prepare_input(parse_input_state(j.get<std::string>()), fallback.rabi);
  check_keys(j, field, {"area", "phase", "rabi", "state"});
  RfSpec rf = fallback;
  if (j.contains("state")) {
    const auto rabi = j.contains("rabi") ? std::optional<double>(number(j.at("rabi"), field + ".rabi")) : fallback.rabi;
    return prepare_input(parse_input_state(string(j.at("state"), field + ".state")), rabi);
  }
  rf.area = number_or(j, "area", field, rf.area);
  rf.phase = number_or(j, "phase", field, rf.phase);
  if (j.contains("rabi")) {
    if (j.at("rabi").is_null()) {
      rf.rabi.reset();
    } else {
      rf.rabi = number(j.at("rabi"), field + ".rabi");
      if (!(*rf.rabi > 0.0)) throw ValidationError(field + ".rabi", "must be positive");
    }
  }
  return rf;
}

Json rf_to_json(const RfSpec& rf) {
  Json j;
  j["area"] = rf.area;
  j["phase"] = rf.phase;
  j["rabi"] = rf.rabi ? Json(*rf.rabi) : Json(nullptr);
  return j;
}

SemmParams semm_from_json(const Json& j) {
  const std::string f = "semm";
  check_keys(j, f,
             {"t1", "t2", "t3", "t5_offset", "stark", "pi", "input", "half_window", "sample_rate", "flip_second_stark",
              "acquire_output"});
  SemmParams p;
  p.t1 = number_or(j, "t1", f, p.t1);
  p.t2 = number_or(j, "t2", f, p.t2);
  p.t3 = number_or(j, "t3", f, p.t3);
  p.t5_offset = number_or(j, "t5_offset", f, p.t5_offset);
  if (j.contains("stark")) {
    const Json& s = j.at("stark");
    check_keys(s, f + ".stark", {"E", "Ts", "sign"});
    p.stark.amplitude = number_or(s, "E", f + ".stark", 0.0);
    p.stark.ts = number_or(s, "Ts", f + ".stark", 0.0);
    const double sign = number_or(s, "sign", f + ".stark", 1.0);
    if (sign != 1.0 && sign != -1.0) throw ValidationError(f + ".stark.sign", "must be +1 or -1");
    p.stark.sign = static_cast<int>(sign);
  }
  if (j.contains("pi")) p.pi_pulse = rf_from_json(j.at("pi"), f + ".pi", p.pi_pulse);
  if (j.contains("input")) p.input = rf_from_json(j.at("input"), f + ".input", p.input);
  p.options.half_window = number_or(j, "half_window", f, p.options.half_window);
  p.options.sample_rate = number_or(j, "sample_rate", f, p.options.sample_rate);
  if (j.contains("flip_second_stark"))
    p.options.flip_second_stark = boolean(j.at("flip_second_stark"), f + ".flip_second_stark");
  if (j.contains("acquire_output")) p.options.acquire_output = boolean(j.at("acquire_output"), f + ".acquire_output");
  return p;
}

Json semm_to_json(const SemmParams& p) {
  Json j;
  j["t1"] = p.t1;
  j["t2"] = p.t2;
  j["t3"] = p.t3;
  j["t5_offset"] = p.t5_offset;
  j["stark"] = {{"E", p.stark.amplitude}, {"Ts", p.stark.ts}, {"sign", p.stark.sign}};
  j["pi"] = rf_to_json(p.pi_pulse);
  j["input"] = rf_to_json(p.input);
  j["half_window"] = p.options.half_window;
  j["sample_rate"] = p.options.sample_rate;
  j["flip_second_stark"] = p.options.flip_second_stark;
  j["acquire_output"] = p.options.acquire_output;
  return j;
}

EnsembleSpec ensemble_from_json(const Json& j, const fs::path& base_dir, std::uint64_t seed) {
  const std::string f = "ensemble";
  check_keys(j, f, {"n_centers", "sampling", "stark_nodes", "line_shape", "stark_shape", "relaxation"});
  EnsembleSpec spec;
  if (!j.contains("n_centers")) throw ValidationError("ensemble.n_centers", "is required");
  spec.n_centers = integer(j.at("n_centers"), "ensemble.n_centers");
  const std::string sampling = j.contains("sampling") ? string(j.at("sampling"), "ensemble.sampling") : "quadrature";
  if (sampling == "quadrature") {
    QuadratureSampling q;
    if (j.contains("stark_nodes")) q.stark_nodes = integer(j.at("stark_nodes"), "ensemble.stark_nodes");
    spec.sampling = q;
  } else if (sampling == "monte_carlo") {
    spec.sampling = MonteCarloSampling{seed};
  } else {
    throw ValidationError("ensemble.sampling", "must be \"quadrature\" or \"monte_carlo\"");
  }
  if (j.contains("line_shape")) spec.line_shape = distribution_from_json(j.at("line_shape"), "ensemble.line_shape", base_dir);
  if (j.contains("stark_shape"))
    spec.stark_shape = distribution_from_json(j.at("stark_shape"), "ensemble.stark_shape", base_dir);
  if (j.contains("relaxation")) {
    const Json& r = j.at("relaxation");
    check_keys(r, "ensemble.relaxation", {"t1", "t2"});
    if (r.contains("t1")) spec.relaxation.t1 = number(r.at("t1"), "ensemble.relaxation.t1");
    if (r.contains("t2")) spec.relaxation.t2 = number(r.at("t2"), "ensemble.relaxation.t2");
  }
  spec.validate();
  return spec;
}

Json ensemble_to_json(const EnsembleSpec& spec) {
  Json j;
  j["n_centers"] = spec.n_centers;
  if (const auto* q = std::get_if<QuadratureSampling>(&spec.sampling)) {
    j["sampling"] = "quadrature";
    j["stark_nodes"] = resolved_stark_nodes(spec);
    (void)q;
  } else {
    j["sampling"] = "monte_carlo";
  }
  j["line_shape"] = to_json(spec.line_shape);
  j["stark_shape"] = to_json(spec.stark_shape);
  j["relaxation"] = {{"t1", finite_or_null(spec.relaxation.t1)}, {"t2", finite_or_null(spec.relaxation.t2)}};
  return j;
}

std::vector<double> ts_values(const Json& j, const std::string& field) {
  std::vector<double> out;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
  } else {
    check_keys(j, field, {"from", "to", "count"});
    const double from = required(j, "from", field);
    const double to = required(j, "to", field);
    if (!j.contains("count")) throw ValidationError(field + ".count", "is required");
    const auto count = integer(j.at("count"), field + ".count");
    if (count < 1) throw ValidationError(field + ".count", "must be at least 1");
    for (std::uint64_t i = 0; i < count; ++i)
      out.push_back(count == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  if (out.empty()) throw ValidationError(field, "must not be empty");
  return out;
}

}  // namespace

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open " + path.string());
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ValidationError("config", std::string("malformed JSON: ") + e.what());
  }
}

Json to_json(const DistributionSpec& d) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Delta>) {
          return {{"kind", "delta"}, {"k0", v.k0}};
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return {{"kind", "gaussian"}, {"mean", v.mean}, {"sigma", v.sigma}};
        } else if constexpr (std::is_same_v<T, Lorentzian>) {
          return {{"kind", "lorentzian"}, {"center", v.center}, {"gamma", v.gamma}};
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return {{"kind", "uniform"}, {"lo", v.lo}, {"hi", v.hi}};
        } else if constexpr (std::is_same_v<T, Mixture>) {
          Json comps = Json::array();
          for (const auto& c : v.components) comps.push_back({{"weight", c.weight}, {"dist", to_json(c.dist)}});
          return {{"kind", "mixture"}, {"components", comps}};
        } else {
          Json rows = Json::array();
          for (std::size_t i = 0; i < v.k.size(); ++i) rows.push_back({v.k[i], v.density[i]});
          return {{"kind", "table"}, {"rows", rows}};
        }
      },
      d.kind);
}

DistributionSpec distribution_from_json(const Json& j, const std::string& field, const fs::path& base_dir) {
  if (!j.is_object() || !j.contains("kind")) throw ValidationError(field + ".kind", "is required");
  const std::string kind = string(j.at("kind"), field + ".kind");
  if (kind == "delta") {
    check_keys(j, field, {"kind", "k0"});
    return delta(required(j, "k0", field));
  }
  if (kind == "gaussian") {
    check_keys(j, field, {"kind", "mean", "sigma", "fwhm"});
    const double mean = number_or(j, "mean", field, 0.0);
    if (j.contains("fwhm") == j.contains("sigma")) throw ValidationError(field + ".sigma", "give exactly one of sigma, fwhm");
    if (j.contains("fwhm")) return gaussian_fwhm(mean, required(j, "fwhm", field));
    return gaussian(mean, required(j, "sigma", field));
  }
  if (kind == "lorentzian") {
    check_keys(j, field, {"kind", "center", "gamma", "fwhm"});
    const double center = number_or(j, "center", field, 0.0);
    if (j.contains("fwhm") == j.contains("gamma")) throw ValidationError(field + ".gamma", "give exactly one of gamma, fwhm");
    if (j.contains("fwhm")) return lorentzian(center, 0.5 * required(j, "fwhm", field));
    return lorentzian(center, required(j, "gamma", field));
  }
  if (kind == "uniform") {
    check_keys(j, field, {"kind", "lo", "hi"});
    return uniform(required(j, "lo", field), required(j, "hi", field));
  }
  if (kind == "mixture") {
    check_keys(j, field, {"kind", "components"});
    if (!j.contains("components") || !j.at("components").is_array())
      throw ValidationError(field + ".components", "must be an array");
    std::vector<MixtureComponent> comps;
    const Json& arr = j.at("components");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string item = field + ".components[" + std::to_string(i) + "]";
      check_keys(arr[i], item, {"weight", "dist"});
      if (!arr[i].contains("dist")) throw ValidationError(item + ".dist", "is required");
      comps.push_back({required(arr[i], "weight", item), distribution_from_json(arr[i].at("dist"), item + ".dist", base_dir)});
    }
    return mixture(std::move(comps));
  }
  if (kind == "table") {
    check_keys(j, field, {"kind", "rows", "file"});
    if (j.contains("file")) {
      fs::path p = string(j.at("file"), field + ".file");
      if (p.is_relative()) p = base_dir / p;
      if (!fs::exists(p)) throw ValidationError(field + ".file", "file not found: " + p.string());
      return table_from_csv(p);
    }
    if (!j.contains("rows") || !j.at("rows").is_array()) throw ValidationError(field + ".rows", "must be an array");
    std::vector<std::pair<double, double>> rows;
    for (std::size_t i = 0; i < j.at("rows").size(); ++i) {
      const Json& r = j.at("rows")[i];
      const std::string item = field + ".rows[" + std::to_string(i) + "]";
      if (!r.is_array() || r.size() != 2) throw ValidationError(item, "must be [k, density]");
      rows.emplace_back(number(r[0], item), number(r[1], item));
    }
    return table(std::move(rows));
  }
  throw ValidationError(field + ".kind", "unknown distribution kind '" + kind + "'");
}

RunConfig load_config(const Json& doc, const fs::path& base_dir, std::optional<std::uint64_t> seed) {
  check_keys(doc, "config",
             {"seed", "shots", "jitter", "ensemble", "sequence", "semm", "sweep", "suppression", "cancel", "noise",
              "table", "tomography", "run", "output", "format"});
  RunConfig cfg;
  cfg.seed = seed ? *seed : (doc.contains("seed") ? integer(doc.at("seed"), "seed") : 0);
  if (doc.contains("shots")) {
    cfg.shots = integer(doc.at("shots"), "shots");
    if (cfg.shots < 1) throw ValidationError("shots", "must be at least 1");
  }
  if (doc.contains("jitter")) {
    check_keys(doc.at("jitter"), "jitter", {"stark_amplitude"});
    cfg.stark_jitter = number_or(doc.at("jitter"), "stark_amplitude", "jitter", 0.0);
    if (!(cfg.stark_jitter >= 0.0)) throw ValidationError("jitter.stark_amplitude", "must be nonnegative");
  }
  if (doc.contains("output")) cfg.output = string(doc.at("output"), "output");
  if (doc.contains("format")) {
    const std::string f = string(doc.at("format"), "format");
    if (f != "csv" && f != "json") throw ValidationError("format", "must be csv or json");
    cfg.format = f == "csv" ? Format::Csv : Format::Json;
  }
  if (doc.contains("ensemble")) {
    cfg.ensemble = ensemble_from_json(doc.at("ensemble"), base_dir, cfg.seed);
    cfg.has_ensemble = true;
  }
  if (doc.contains("semm")) cfg.semm = semm_from_json(doc.at("semm"));
  if (doc.contains("sequence")) {
    const Json& s = doc.at("sequence");
    std::string text;
    if (s.is_string()) {
      text = s.get<std::string>();
    } else {
      check_keys(s, "sequence", {"file"});
      fs::path p = string(s.at("file"), "sequence.file");
      if (p.is_relative()) p = base_dir / p;
      std::ifstream in(p);
      if (!in) throw ValidationError("sequence.file", "file not found: " + p.string());
      std::ostringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
    try {
      cfg.sequence = parse_sequence(text);
    } catch (const SyntaxError& e) {
      throw ValidationError("sequence", e.what());
    }
  }
  if (doc.contains("run")) {
    const Json& r = doc.at("run");
    check_keys(r, "run", {"detuning_aware", "noise_sigma", "simd"});
    if (r.contains("detuning_aware")) cfg.run.detuning_aware = boolean(r.at("detuning_aware"), "run.detuning_aware");
    cfg.run.noise_sigma = number_or(r, "noise_sigma", "run", 0.0);
    if (!(cfg.run.noise_sigma >= 0.0)) throw ValidationError("run.noise_sigma", "must be nonnegative");
    if (r.contains("simd")) {
      const std::string level = string(r.at("simd"), "run.simd");
      if (level == "scalar") {
        cfg.run.simd = SimdLevel::Scalar;
      } else if (level == "avx2") {
        if (!simd_available(SimdLevel::Avx2)) throw ValidationError("run.simd", "avx2 is not available on this CPU");
        cfg.run.simd = SimdLevel::Avx2;
      } else {
        throw ValidationError("run.simd", "must be scalar or avx2");
      }
    }
  }
  cfg.run.noise_seed = cfg.seed;
  if (doc.contains("sweep")) {
    const Json& s = doc.at("sweep");
    check_keys(s, "sweep", {"E", "ts"});
    SweepConfig sw;
    sw.amplitude = required(s, "E", "sweep");
    if (!s.contains("ts")) throw ValidationError("sweep.ts", "is required");
    sw.ts = ts_values(s.at("ts"), "sweep.ts");
    cfg.sweep = sw;
  }
  if (doc.contains("suppression")) {
    const Json& s = doc.at("suppression");
    check_keys(s, "suppression", {"label", "expected_time", "window"});
    if (s.contains("label")) cfg.suppression.label = string(s.at("label"), "suppression.label");
    if (s.contains("expected_time")) cfg.suppression.expected_time = number(s.at("expected_time"), "suppression.expected_time");
    if (s.contains("window")) cfg.suppression.window = number(s.at("window"), "suppression.window");
  }
  if (doc.contains("cancel")) {
    const Json& c = doc.at("cancel");
    check_keys(c, "cancel", {"distribution", "x_max"});
    CancelConfig cc;
    if (c.contains("distribution")) {
      cc.distribution = distribution_from_json(c.at("distribution"), "cancel.distribution", base_dir);
    } else if (cfg.has_ensemble) {
      cc.distribution = cfg.ensemble.stark_shape;
    } else {
      throw ValidationError("cancel.distribution", "is required without an ensemble section");
    }
    cc.x_max = number_or(c, "x_max", "cancel", 0.0);
    cfg.cancel = cc;
  }
  if (doc.contains("noise")) {
    const Json& n = doc.at("noise");
    check_keys(n, "noise", {"finesse", "opacity", "mu", "threshold"});
    cfg.noise.cavity.finesse = number_or(n, "finesse", "noise", cfg.noise.cavity.finesse);
    cfg.noise.cavity.opacity = number_or(n, "opacity", "noise", cfg.noise.cavity.opacity);
    cfg.noise.mu = number_or(n, "mu", "noise", cfg.noise.mu);
    cfg.noise.threshold = number_or(n, "threshold", "noise", cfg.noise.threshold);
    cfg.noise.cavity.validate();
  }
  cfg.table.rows = builtin_systems();
  if (doc.contains("table")) {
    const Json& t = doc.at("table");
    check_keys(t, "table", {"rows", "tolerance"});
    cfg.table.tolerance = number_or(t, "tolerance", "table", cfg.table.tolerance);
    if (t.contains("rows")) {
      cfg.table.rows.clear();
      const Json& rows = t.at("rows");
      if (!rows.is_array()) throw ValidationError("table.rows", "must be an array");
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string item = "table.rows[" + std::to_string(i) + "]";
        check_keys(rows[i], item, {"name", "t2", "k", "expected_e0"});
        SystemInput in;
        in.name = rows[i].contains("name") ? string(rows[i].at("name"), item + ".name") : "row" + std::to_string(i);
        in.t2 = required(rows[i], "t2", item);
        in.k = required(rows[i], "k", item);
        if (rows[i].contains("expected_e0")) in.expected_e0 = number(rows[i].at("expected_e0"), item + ".expected_e0");
        cfg.table.rows.push_back(in);
      }
    }
  }
  if (doc.contains("tomography")) {
    const Json& t = doc.at("tomography");
    check_keys(t, "tomography", {"z_mode", "input_rabi", "with_stark"});
    if (t.contains("z_mode")) {
      const std::string m = string(t.at("z_mode"), "tomography.z_mode");
      if (m != "direct" && m != "sequence") throw ValidationError("tomography.z_mode", "must be direct or sequence");
      cfg.tomography.z_mode = m == "direct" ? ZReadout::Direct : ZReadout::Sequence;
    }
    if (t.contains("input_rabi")) cfg.tomography.input_rabi = number(t.at("input_rabi"), "tomography.input_rabi");
    if (t.contains("with_stark")) cfg.tomography.with_stark = boolean(t.at("with_stark"), "tomography.with_stark");
  }

  // Canonical form with defaults filled in.
  Json& r = cfg.resolved;
  r["seed"] = cfg.seed;
  r["shots"] = cfg.shots;
  r["jitter"] = {{"stark_amplitude", cfg.stark_jitter}};
  if (cfg.has_ensemble) r["ensemble"] = ensemble_to_json(cfg.ensemble);
  if (cfg.semm) r["semm"] = semm_to_json(*cfg.semm);
  if (cfg.sequence) r["sequence"] = render(*cfg.sequence);
  r["run"] = {{"detuning_aware", cfg.run.detuning_aware},
              {"noise_sigma", cfg.run.noise_sigma},
              {"simd", cfg.run.simd ? std::string(to_string(*cfg.run.simd)) : std::string("auto")}};
  if (cfg.sweep) r["sweep"] = {{"E", cfg.sweep->amplitude}, {"ts", cfg.sweep->ts}};
  r["suppression"] = {{"label", cfg.suppression.label},
                      {"expected_time", cfg.suppression.expected_time ? Json(*cfg.suppression.expected_time) : Json()},
                      {"window", cfg.suppression.window ? Json(*cfg.suppression.window) : Json()}};
  if (cfg.cancel) r["cancel"] = {{"distribution", to_json(cfg.cancel->distribution)}, {"x_max", cfg.cancel->x_max}};
  r["noise"] = {{"finesse", cfg.noise.cavity.finesse},
                {"opacity", cfg.noise.cavity.opacity},
                {"mu", cfg.noise.mu},
                {"threshold", cfg.noise.threshold}};
  Json rows = Json::array();
  for (const auto& row : cfg.table.rows)
    rows.push_back({{"name", row.name},
                    {"t2", row.t2},
                    {"k", row.k},
                    {"expected_e0", row.expected_e0 ? Json(*row.expected_e0) : Json()}});
  r["table"] = {{"rows", rows}, {"tolerance", cfg.table.tolerance}};
  r["tomography"] = {{"z_mode", cfg.tomography.z_mode == ZReadout::Direct ? "direct" : "sequence"},
                     {"input_rabi", cfg.tomography.input_rabi ? Json(*cfg.tomography.input_rabi) : Json()},
                     {"with_stark", cfg.tomography.with_stark}};
  return cfg;
}

}  // namespace semm::cli
