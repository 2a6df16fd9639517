// Run manifests (everything needed to repeat a command) and CSV traces.
#ifndef SATV_MANIFEST_HPP_
#define SATV_MANIFEST_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "satv/admm.hpp"
#include "satv/problems.hpp"

namespace satv {

struct RunManifest {
  std::string command;  // denoise | deblur | inpaint | synth | metrics | analyze
  std::string input;
  std::string output;
  std::optional<std::string> reference;
  std::optional<std::string> trace;

  // Solver settings.
  double lambda = 100;
  double r1 = 1;
  double r2 = 2;
  double mu = 0;
  double gamma = 0;
  double tau = 0;
  double h = 5;
  int max_iter = 300;
  double tol = 2e-3;
  std::string weights = "dynamic";
  bool enable_first = true;
  bool enable_second = true;
  bool deltas = false;
  bool timing = true;

  // Problem settings; `kernel` is also the synth blur.
  std::optional<std::string> kernel;
  std::optional<std::string> mask;
  double r3 = 0.005;

  // Synthetic inputs.
  std::string scene;  // disk | bars | triangle | image
  double radius = 32;
  double contrast = 100;
  std::optional<std::int64_t> size;
  double noise_sigma = 0;
  double noise_mean = 0;
  std::optional<std::uint64_t> seed;
  double mask_fraction = 0;
  std::optional<std::string> mask_output;
  std::optional<std::string> clean_output;

  // Analysis sweep.
  std::vector<double> factors = {10, 100, 1000, 10000};

  bool operator==(const RunManifest&) const = default;
};

std::string to_json(const RunManifest& m);
/// Throws std::invalid_argument on malformed input or unknown keys.
RunManifest manifest_from_json(const std::string& text);

SolverConfig<double> solver_config(const RunManifest& m);

/// `gaussian:<size>:<sigma>` or `average:<size>`.
BlurKernel<double> parse_kernel(const std::string& spec);

/// `dynamic`, `observed`, `oracle:<image path>` or `constant:<alpha>:<beta>`.
struct WeightSpec {
  enum class Kind { Dynamic, Observed, Oracle, Constant } kind = Kind::Dynamic;
  std::string path;
  double alpha = 0, beta = 0;
};
WeightSpec parse_weights(const std::string& spec);

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite.
std::string format_number(double x);

inline constexpr const char* kTraceColumns =
    "k,R1,R2,L1,L2,Ru,E,delta1,delta2,psnr,ssim,wall_ms";

/// Writes "# manifest <json>", the column header, one row per record, and a
/// trailing "# raw ..." comment listing the ratios reported as raw numerators.
void write_trace_csv(std::ostream& out, const RunManifest& m,
                     const std::vector<TraceRecord>& trace);
void write_trace_csv(const std::string& path, const RunManifest& m,
                     const std::vector<TraceRecord>& trace);

/// Reads the manifest embedded in a trace file.
RunManifest manifest_from_trace(const std::string& path);

/// Reads a manifest from a JSON file or from a trace file's header.
RunManifest load_manifest(const std::string& path);

}  // namespace satv

#endif  // SATV_MANIFEST_HPP_
