#pragma once

// Run configuration: a JSON document with nested sections.
//
//   {
//     "seed": 7, "shots": 200, "jitter": {"stark_amplitude": 0.002},
//     "ensemble": {"n_centers": 4096, "sampling": "quadrature",
//                  "line_shape": {"kind": "gaussian", "mean": 0, "fwhm": 32e3},
//                  "stark_shape": {"kind": "delta", "k0": 0.43}},
//     "semm": {"t1": 0, "t2": 4.5e-3, "t3": 8e-3, "t5_offset": 11.5e-3,
//              "stark": {"E": 165, "Ts": 3.52e-3}, "pi": {"area": "pi"},
//              "input": {"area": "pi/2"}},
//     "sequence": "rf area=pi/2 at=0; ..."      (or {"file": "seq.txt"})
//   }
//
// Numeric fields also accept strings such as "pi/2".

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "semm/distributions.hpp"
#include "semm/dynamics.hpp"
#include "semm/ensemble.hpp"
#include "semm/noise.hpp"
#include "semm/sequence.hpp"
#include "semm/tomography.hpp"

namespace semm::cli {

using Json = nlohmann::ordered_json;

enum class Format { Csv, Json };

struct SweepConfig {
  double amplitude = 0.0;
  std::vector<double> ts;
};

struct SuppressionConfig {
  std::string label = "echo1";
  std::optional<double> expected_time;
  std::optional<double> window;
};

struct CancelConfig {
  DistributionSpec distribution;
  double x_max = 0.0;
};

struct NoiseConfig {
  CavityParams cavity;
  double mu = 1.5e-5;
  double threshold = 1.0;
};

struct TableConfig {
  std::vector<SystemInput> rows;
  double tolerance = 0.10;
};

struct RunConfig {
  EnsembleSpec ensemble;
  bool has_ensemble = false;
  std::optional<Sequence> sequence;
  std::optional<SemmParams> semm;
  std::uint64_t seed = 0;
  std::size_t shots = 1;
  double stark_jitter = 0.0;
  RunOptions run;
  std::optional<SweepConfig> sweep;
  SuppressionConfig suppression;
  std::optional<CancelConfig> cancel;
  NoiseConfig noise;
  TableConfig table;
  TomographyOptions tomography;
  std::filesystem::path output = ".";
  Format format = Format::Csv;

  /// Resolved configuration, echoed into every report.
  Json resolved;
};

/// Parses and validates; `base_dir` resolves relative file references.
/// Throws ValidationError for anything malformed.
RunConfig load_config(const Json& doc, const std::filesystem::path& base_dir, std::optional<std::uint64_t> seed);
Json read_json_file(const std::filesystem::path& path);

Json to_json(const DistributionSpec& d);
DistributionSpec distribution_from_json(const Json& j, const std::string& field,
                                        const std::filesystem::path& base_dir);

}  // namespace semm::cli
