#include "io.hpp"

#include <charconv>
#include <fstream>

#include "semm/error.hpp"

namespace semm::cli {

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

std::string trace_csv(const SignalTrace& trace) {
  std::string out = "time_s,re_P,im_P,abs_P,abs2_P\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const auto& p = trace.values[i];
    out += format_double(trace.times[i]) + ',' + format_double(p.real()) + ',' + format_double(p.imag()) + ',' +
           format_double(std::abs(p)) + ',' + format_double(std::norm(p)) + '\n';
  }
  return out;
}

Json trace_json(const SignalTrace& trace) {
  Json j;
  j["label"] = trace.label;
  Json rows = Json::array();
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const auto& p = trace.values[i];
    rows.push_back({{"time_s", trace.times[i]},
                    {"re_P", p.real()},
                    {"im_P", p.imag()},
                    {"abs_P", std::abs(p)},
                    {"abs2_P", std::norm(p)}});
  }
  j["samples"] = rows;
  return j;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::string out = "Ts_s,normalized_intensity,oracle_value\n";
  for (const auto& p : points)
    out += format_double(p.ts) + ',' + format_double(p.normalized_intensity) + ',' + format_double(p.oracle) + '\n';
  return out;
}

Json echo_json(const EchoRecord& e) {
  return {{"label", e.label},
          {"peak_time", e.peak_time},
          {"amplitude", {{"re", e.amplitude.real()}, {"im", e.amplitude.imag()}}},
          {"intensity", e.intensity},
          {"integrated_intensity", e.integrated_intensity}};
}

Json density_json(const DensityMatrix2& rho) {
  Json re = Json::array();
  Json im = Json::array();
  for (int r = 0; r < 2; ++r) {
    re.push_back({rho(r, 0).real(), rho(r, 1).real()});
    im.push_back({rho(r, 0).imag(), rho(r, 1).imag()});
  }
  return {{"re", re}, {"im", im}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace semm::cli
