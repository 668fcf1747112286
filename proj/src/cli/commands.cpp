#include <CLI11.hpp>

#include <cstdio>
#include <ostream>

#include "config.hpp"
#include "io.hpp"
#include "semm/analysis.hpp"
#include "semm/cli.hpp"
#include "semm/error.hpp"
#include "semm/noise.hpp"
#include "semm/tomography.hpp"

namespace semm::cli {

namespace {

namespace fs = std::filesystem;

struct Context {
  RunConfig cfg;
  bool dry_run = false;
  std::ostream& out;
};

std::string printf_string(const char* fmt, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, a);
  return buf;
}

Json report_header(const Context& ctx, const char* command) {
  Json j;
  j["command"] = command;
  j["seed"] = ctx.cfg.seed;
  j["config"] = ctx.cfg.resolved;
  return j;
}

void prepare_output(const Context& ctx) {
  std::error_code ec;
  fs::create_directories(ctx.cfg.output, ec);
  if (ec || !fs::is_directory(ctx.cfg.output))
    throw ValidationError("output", "cannot create directory " + ctx.cfg.output.string());
}

const EnsembleSpec& need_ensemble(const Context& ctx) {
  if (!ctx.cfg.has_ensemble) throw ValidationError("ensemble", "section is required for this command");
  return ctx.cfg.ensemble;
}

const SemmParams& need_semm(const Context& ctx) {
  if (!ctx.cfg.semm) throw ValidationError("semm", "section is required for this command");
  return *ctx.cfg.semm;
}

// The explicit sequence if given, otherwise the SEMM timeline.
std::pair<Sequence, std::optional<SemmTimes>> resolve_sequence(const Context& ctx) {
  if (ctx.cfg.sequence) return {*ctx.cfg.sequence, std::nullopt};
  if (ctx.cfg.semm) {
    SemmSequence s = make_semm(*ctx.cfg.semm);
    return {s.sequence, s.times};
  }
  throw ValidationError("sequence", "either sequence or semm is required");
}

Sequence without_field(Sequence seq) {
  for (PulseEvent& e : seq.events)
    if (auto* s = std::get_if<StarkPulse>(&e.kind)) s->amplitude = 0.0;
  return seq;
}

Json times_json(const SemmTimes& t) {
  return {{"t1", t.t1}, {"t2", t.t2}, {"t3", t.t3},         {"t4", t.t4},
          {"t5", t.t5}, {"t6", t.t6}, {"t7", t.t7}, {"stimulated", t.stimulated}};
}

std::optional<double> nominal_time(const SemmTimes& t, const std::string& label) {
  if (label == "echo1") return t.t4;
  if (label == "echo2") return t.t7;
  if (label == "stimulated") return t.stimulated;
  return std::nullopt;
}

int cmd_simulate(Context& ctx) {
  const EnsembleSpec& spec = need_ensemble(ctx);
  const auto [seq, times] = resolve_sequence(ctx);
  if (ctx.dry_run) return kOk;
  prepare_output(ctx);
  const RunResult result = run_sequence(build_ensemble(spec), seq, ctx.cfg.run);
  Json report = report_header(ctx, "simulate");
  Json files = Json::array();
  Json echoes = Json::object();
  for (const auto& [label, trace] : result.traces) {
    const std::string name = label + (ctx.cfg.format == Format::Csv ? ".csv" : ".json");
    if (ctx.cfg.format == Format::Csv) {
      write_text(ctx.cfg.output / name, trace_csv(trace));
    } else {
      write_json(ctx.cfg.output / name, trace_json(trace));
    }
    files.push_back(name);
    const double span = trace.times.empty() ? 0.0 : trace.times.back() - trace.times.front();
    double expected = trace.times.empty() ? 0.0 : trace.times.front() + 0.5 * span;
    if (times) expected = nominal_time(*times, label).value_or(expected);
    const EchoRecord rec = detect_echo(trace, expected, 2.0 * span + 1e-300);
    echoes[label] = echo_json(rec);
    ctx.out << label << ": peak |P| = " << format_double(std::abs(rec.amplitude)) << " at t = "
            << format_double(rec.peak_time) << " s -> " << (ctx.cfg.output / name).string() << "\n";
  }
  if (times) report["times"] = times_json(*times);
  report["files"] = files;
  report["echoes"] = echoes;
  report["final_population"] = result.ensemble.population();
  write_json(ctx.cfg.output / "simulate_report.json", report);
  return kOk;
}

int cmd_sweep(Context& ctx) {
  const EnsembleSpec& spec = need_ensemble(ctx);
  const SemmParams& semm = need_semm(ctx);
  if (!ctx.cfg.sweep) throw ValidationError("sweep", "section is required for this command");
  for (double ts : ctx.cfg.sweep->ts) {
    SemmParams p = semm;
    p.stark.ts = ts;
    p.stark.amplitude = ctx.cfg.sweep->amplitude;
    make_semm(p);
  }
  if (ctx.dry_run) return kOk;
  prepare_output(ctx);
  const auto points =
      sweep_modulation(build_ensemble(spec), semm, ctx.cfg.sweep->amplitude, ctx.cfg.sweep->ts, spec.stark_shape,
                       ctx.cfg.run);
  double max_dev = 0.0;
  for (const auto& p : points) max_dev = std::max(max_dev, std::abs(p.normalized_intensity - p.oracle));
  Json report = report_header(ctx, "sweep");
  report["max_abs_deviation"] = max_dev;
  if (ctx.cfg.format == Format::Csv) {
    write_text(ctx.cfg.output / "sweep.csv", sweep_csv(points));
    report["files"] = {"sweep.csv"};
  } else {
    Json rows = Json::array();
    for (const auto& p : points)
      rows.push_back({{"Ts_s", p.ts}, {"normalized_intensity", p.normalized_intensity}, {"oracle_value", p.oracle}});
    report["points"] = rows;
  }
  write_json(ctx.cfg.output / "sweep_report.json", report);
  ctx.out << points.size() << " points, max |sim - oracle| = " << format_double(max_dev) << "\n";
  return kOk;
}

int cmd_suppression(Context& ctx) {
  const EnsembleSpec& spec = need_ensemble(ctx);
  const auto [seq_on, times] = resolve_sequence(ctx);
  const Sequence seq_off = without_field(seq_on);
  EchoProbe probe;
  probe.label = ctx.cfg.suppression.label;
  const PulseEvent* window = nullptr;
  for (const PulseEvent& e : seq_on.events)
    if (const auto* a = std::get_if<Acquire>(&e.kind); a != nullptr && a->label == probe.label) window = &e;
  if (window == nullptr) throw ValidationError("suppression.label", "no acquisition window named '" + probe.label + "'");
  std::optional<double> nominal = times ? nominal_time(*times, probe.label) : std::nullopt;
  probe.expected_time = ctx.cfg.suppression.expected_time.value_or(
      nominal.value_or(window->start + 0.5 * window->duration));
  probe.window = ctx.cfg.suppression.window.value_or(times ? 2.0 * ctx.cfg.semm->options.half_window : window->duration);
  if (ctx.dry_run) return kOk;
  prepare_output(ctx);
  const Ensemble ens = build_ensemble(spec);
  const bool jittered = ctx.cfg.shots > 1 || ctx.cfg.stark_jitter > 0.0;
  const SuppressionResult r =
      jittered ? suppression_jittered(ens, seq_on, seq_off, probe, ctx.cfg.stark_jitter, ctx.cfg.shots, ctx.cfg.seed,
                                      ctx.cfg.run)
               : suppression(ens, seq_on, seq_off, probe, ctx.cfg.run);
  Json report = report_header(ctx, "suppression");
  report["mu"] = r.mu;
  report["peak_on"] = echo_json(r.echo_on);
  report["peak_off"] = echo_json(r.echo_off);
  Json t = times ? times_json(*times) : Json::object();
  t["expected_time"] = probe.expected_time;
  t["window"] = probe.window;
  report["times"] = t;
  report["shots"] = ctx.cfg.shots;
  report["jitter"] = ctx.cfg.stark_jitter;
  write_json(ctx.cfg.output / "suppression.json", report);
  ctx.out << "mu = " << format_double(r.mu) << "\n";
  return kOk;
}

int cmd_tomography(Context& ctx) {
  const EnsembleSpec& spec = need_ensemble(ctx);
  const SemmParams& semm = need_semm(ctx);
  make_semm(semm);
  if (ctx.dry_run) return kOk;
  prepare_output(ctx);
  TomographyOptions opts = ctx.cfg.tomography;
  opts.run = ctx.cfg.run;
  const TomographyResult r = run_tomography(build_ensemble(spec), semm, opts);
  Json report = report_header(ctx, "tomography");
  Json states = Json::array();
  for (const auto& e : r.entries) {
    states.push_back({{"state", std::string(to_string(e.state))},
                      {"reference", density_json(e.reference)},
                      {"stark", density_json(e.stark)},
                      {"fidelity", e.fidelity}});
    ctx.out << to_string(e.state) << ": fidelity " << printf_string("%.12f", e.fidelity) << "\n";
  }
  report["states"] = states;
  report["average_fidelity"] = r.average_fidelity;
  write_json(ctx.cfg.output / "tomography.json", report);
  ctx.out << "average fidelity " << printf_string("%.12f", r.average_fidelity) << "\n";
  return kOk;
}

int cmd_cancel(Context& ctx) {
  if (!ctx.cfg.cancel) {
    if (!ctx.cfg.has_ensemble) throw ValidationError("cancel", "section or ensemble.stark_shape is required");
    ctx.cfg.cancel = CancelConfig{ctx.cfg.ensemble.stark_shape, 0.0};
  }
  CancelConfig c = *ctx.cfg.cancel;
  if (c.x_max == 0.0) {
    double m = 0.0;
    try {
      m = std::abs(mean(c.distribution));
    } catch (const UnsupportedOperation&) {
    }
    if (!(m > 0.0)) throw ValidationError("cancel.x_max", "is required for this distribution");
    c.x_max = 1.0 / m;
  }
  if (ctx.dry_run) return kOk;
  prepare_output(ctx);
  Json report = report_header(ctx, "cancel-solve");
  report["x_max"] = c.x_max;
  try {
    const double x = solve_cancellation(c.distribution, c.x_max);
    report["x_root"] = x;
    report["ft_real_at_root"] = ft_real(c.distribution, x);
    if (ctx.cfg.semm && ctx.cfg.semm->stark.amplitude != 0.0) report["Ts"] = x / ctx.cfg.semm->stark.amplitude;
    write_json(ctx.cfg.output / "cancel.json", report);
    ctx.out << "x_root = " << format_double(x) << " (V/cm)*s\n";
    return kOk;
  } catch (const NoRootFound& e) {
    report["x_root"] = nullptr;
    report["min_ft_real"] = e.min_value();
    report["argmin"] = e.argmin();
    write_json(ctx.cfg.output / "cancel.json", report);
    throw;
  }
}

int cmd_noise(Context& ctx) {
  const NoiseConfig& n = ctx.cfg.noise;
  n.cavity.validate();
  if (ctx.dry_run) return kOk;
  prepare_output(ctx);
  const double nsp = spontaneous_photons(n.cavity);
  const LeakedNoise leak = leaked_noise(n.mu, n.cavity, n.threshold);
  Json report = report_header(ctx, "noise");
  report["spontaneous_photons"] = nsp;
  report["leaked_noise"] = leak.photons;
  report["single_photon_ok"] = leak.single_photon_ok;
  write_json(ctx.cfg.output / "noise.json", report);
  ctx.out << "finesse          " << format_double(n.cavity.finesse) << "\n"
          << "opacity          " << format_double(n.cavity.opacity) << "\n"
          << "n_sp             " << printf_string("%.6g", nsp) << "\n"
          << "mu               " << format_double(n.mu) << "\n"
          << "mu * n_sp        " << printf_string("%.6g", leak.photons) << "\n"
          << "single photon ok " << (leak.single_photon_ok ? "yes" : "no") << "\n";
  return kOk;
}

int cmd_table(Context& ctx) {
  const auto rows = table_e0(ctx.cfg.table.rows, ctx.cfg.table.tolerance);
  if (ctx.dry_run) return kOk;
  prepare_output(ctx);
  Json report = report_header(ctx, "table");
  Json out_rows = Json::array();
  char line[160];
  std::snprintf(line, sizeof line, "%-20s %10s %12s %12s %10s %s\n", "system", "T2 (s)", "k (Hz cm/V)", "E0 (V/cm)",
                "expected", "flag");
  ctx.out << line;
  for (const auto& r : rows) {
    out_rows.push_back({{"name", r.name},
                        {"t2", r.t2},
                        {"k", r.k},
                        {"e0", r.e0},
                        {"expected_e0", r.expected_e0 ? Json(*r.expected_e0) : Json()},
                        {"deviation", r.deviation ? Json(*r.deviation) : Json()},
                        {"inconsistent", r.inconsistent}});
    std::snprintf(line, sizeof line, "%-20s %10.4g %12.4g %12.4g %10s %s\n", r.name.c_str(), r.t2, r.k, r.e0,
                  r.expected_e0 ? printf_string("%.4g", *r.expected_e0).c_str() : "-",
                  r.inconsistent ? "INCONSISTENT" : "ok");
    ctx.out << line;
  }
  report["rows"] = out_rows;
  write_json(ctx.cfg.output / "table.json", report);
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stark echo modulation memory simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string format;
  bool dry_run = false;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--seed", seed, "Random seed (overrides the config)");
  app.add_option("--output", output, "Output directory");
  app.add_option("--format", format, "Trace format")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--dry-run", dry_run, "Validate the configuration only");

  using Handler = int (*)(Context&);
  const std::pair<const char*, Handler> commands[] = {
      {"simulate", cmd_simulate},   {"sweep", cmd_sweep}, {"suppression", cmd_suppression},
      {"tomography", cmd_tomography}, {"cancel-solve", cmd_cancel}, {"noise", cmd_noise},
      {"table", cmd_table},
  };
  const char* help[] = {"Run a sequence and write one trace per acquisition window",
                        "Echo-1 intensity against Stark pulse length",
                        "Field-on over field-off echo intensity",
                        "Five-state tomography with and without Stark pulses",
                        "First zero of the Stark-distribution Fourier transform",
                        "Cavity spontaneous-emission budget",
                        "Operating field E0 = 1/(4 k T2) for several systems"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(commands); ++i) subs.push_back(app.add_subcommand(commands[i].first, help[i]));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    Json doc = Json::object();
    fs::path base_dir = fs::current_path();
    if (!config_path.empty()) {
      if (!fs::exists(config_path)) throw ValidationError("config", "file not found: " + config_path);
      doc = read_json_file(config_path);
      base_dir = fs::absolute(config_path).parent_path();
    }
    Context ctx{load_config(doc, base_dir, seed), dry_run, out};
    if (!output.empty()) ctx.cfg.output = output;
    if (!format.empty()) ctx.cfg.format = format == "csv" ? Format::Csv : Format::Json;
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      const int code = commands[i].second(ctx);
      if (dry_run && code == kOk) out << "config ok\n";
      return code;
    }
    return kInvalidInput;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const SyntaxError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const OverlapError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const ConstraintError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const nlohmann::json::exception& e) {
    err << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
}

}  // namespace semm::cli
