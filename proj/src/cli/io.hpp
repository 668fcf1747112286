#pragma once

#include <filesystem>
#include <string>

#include "config.hpp"
#include "semm/analysis.hpp"
#include "semm/dynamics.hpp"
#include "semm/tomography.hpp"

namespace semm::cli {

/// Shortest representation that round-trips a double.
std::string format_double(double x);

std::string trace_csv(const SignalTrace& trace);
Json trace_json(const SignalTrace& trace);
std::string sweep_csv(const std::vector<SweepPoint>& points);
Json echo_json(const EchoRecord& e);
Json density_json(const DensityMatrix2& rho);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace semm::cli
