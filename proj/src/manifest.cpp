#include "satv/manifest.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "satv/image_io.hpp"

namespace satv {

namespace {

using nlohmann::json;

template <typename T>
void put(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
void get(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->template get<T>();
}

template <typename T>
void get(const json& j, const char* key, std::optional<T>& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->template get<T>();
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "command",   "input",       "output",        "reference",    "trace",
      "lambda",    "r1",          "r2",            "mu",           "gamma",
      "tau",       "h",           "max_iter",      "tol",          "weights",
      "enable_first", "enable_second", "deltas",   "timing",       "kernel",
      "mask",      "r3",          "scene",         "radius",       "contrast",
      "size",      "noise_sigma", "noise_mean",    "seed",         "mask_fraction",
      "mask_output", "clean_output", "factors"};
  return keys;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  for (std::string p; std::getline(in, p, sep);) parts.push_back(p);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw std::invalid_argument(what + ": '" + s + "' is not a number");
  return v;
}

Index parse_size(const std::string& s, const std::string& what) {
  long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw std::invalid_argument(what + ": '" + s + "' is not an integer");
  return v;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr const char* kManifestTag = "# manifest ";

}  // namespace

std::string to_json(const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["input"] = m.input;
  j["output"] = m.output;
  put(j, "reference", m.reference);
  put(j, "trace", m.trace);
  j["lambda"] = m.lambda;
  j["r1"] = m.r1;
  j["r2"] = m.r2;
  j["mu"] = m.mu;
  j["gamma"] = m.gamma;
  j["tau"] = m.tau;
  j["h"] = m.h;
  j["max_iter"] = m.max_iter;
  j["tol"] = m.tol;
  j["weights"] = m.weights;
  j["enable_first"] = m.enable_first;
  j["enable_second"] = m.enable_second;
  j["deltas"] = m.deltas;
  j["timing"] = m.timing;
  put(j, "kernel", m.kernel);
  put(j, "mask", m.mask);
  j["r3"] = m.r3;
  j["scene"] = m.scene;
  j["radius"] = m.radius;
  j["contrast"] = m.contrast;
  put(j, "size", m.size);
  j["noise_sigma"] = m.noise_sigma;
  j["noise_mean"] = m.noise_mean;
  put(j, "seed", m.seed);
  j["mask_fraction"] = m.mask_fraction;
  put(j, "mask_output", m.mask_output);
  put(j, "clean_output", m.clean_output);
  j["factors"] = m.factors;
  return j.dump();
}

RunManifest manifest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("manifest must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known_keys().count(key)) throw std::invalid_argument("unknown manifest key '" + key + "'");

  RunManifest m;
  try {
    get(j, "command", m.command);
    get(j, "input", m.input);
    get(j, "output", m.output);
    get(j, "reference", m.reference);
    get(j, "trace", m.trace);
    get(j, "lambda", m.lambda);
    get(j, "r1", m.r1);
    get(j, "r2", m.r2);
    get(j, "mu", m.mu);
    get(j, "gamma", m.gamma);
    get(j, "tau", m.tau);
    get(j, "h", m.h);
    get(j, "max_iter", m.max_iter);
    get(j, "tol", m.tol);
    get(j, "weights", m.weights);
    get(j, "enable_first", m.enable_first);
    get(j, "enable_second", m.enable_second);
    get(j, "deltas", m.deltas);
    get(j, "timing", m.timing);
    get(j, "kernel", m.kernel);
    get(j, "mask", m.mask);
    get(j, "r3", m.r3);
    get(j, "scene", m.scene);
    get(j, "radius", m.radius);
    get(j, "contrast", m.contrast);
    get(j, "size", m.size);
    get(j, "noise_sigma", m.noise_sigma);
    get(j, "noise_mean", m.noise_mean);
    get(j, "seed", m.seed);
    get(j, "mask_fraction", m.mask_fraction);
    get(j, "mask_output", m.mask_output);
    get(j, "clean_output", m.clean_output);
    get(j, "factors", m.factors);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("manifest field has the wrong type: ") + e.what());
  }
  return m;
}

SolverConfig<double> solver_config(const RunManifest& m) {
  SolverConfig<double> c;
  c.lambda = m.lambda;
  c.r1 = m.r1;
  c.r2 = m.r2;
  c.mu = m.mu;
  c.gamma = m.gamma;
  c.tau = m.tau;
  c.h = m.h;
  c.max_iter = m.max_iter;
  c.tol = m.tol;
  c.enable_first = m.enable_first;
  c.enable_second = m.enable_second;
  const WeightSpec w = parse_weights(m.weights);
  switch (w.kind) {
    case WeightSpec::Kind::Dynamic:
      c.weights = weight_mode::Dynamic{};
      break;
    case WeightSpec::Kind::Observed:
      c.weights = weight_mode::Observed{};
      break;
    case WeightSpec::Kind::Oracle:
      c.weights = weight_mode::Oracle<double>{load_image(w.path, m.h)};
      break;
    case WeightSpec::Kind::Constant:
      c.weights = weight_mode::Constant<double>{w.alpha, w.beta};
      break;
  }
  c.validate();
  return c;
}

BlurKernel<double> parse_kernel(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() == 3 && parts[0] == "gaussian")
    return gaussian_kernel<double>(parse_size(parts[1], "kernel size"),
                                   parse_double(parts[2], "kernel sigma"));
  if (parts.size() == 2 && parts[0] == "average")
    return average_kernel<double>(parse_size(parts[1], "kernel size"));
  throw std::invalid_argument("kernel '" + spec +
                              "' must be gaussian:<size>:<sigma> or average:<size>");
}

WeightSpec parse_weights(const std::string& spec) {
  WeightSpec w;
  if (spec == "dynamic") return w;
  if (spec == "observed") {
    w.kind = WeightSpec::Kind::Observed;
    return w;
  }
  if (spec.rfind("oracle:", 0) == 0 && spec.size() > 7) {
    w.kind = WeightSpec::Kind::Oracle;
    w.path = spec.substr(7);
    return w;
  }
  const auto parts = split(spec, ':');
  if (parts.size() == 3 && parts[0] == "constant") {
    w.kind = WeightSpec::Kind::Constant;
    w.alpha = parse_double(parts[1], "constant alpha");
    w.beta = parse_double(parts[2], "constant beta");
    if (w.alpha < 0 || w.beta < 0)
      throw std::invalid_argument("constant weights must be nonnegative");
    return w;
  }
  throw std::invalid_argument("weights '" + spec +
                              "' must be dynamic, observed, oracle:<path> or "
                              "constant:<alpha>:<beta>");
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

void write_trace_csv(std::ostream& out, const RunManifest& m,
                     const std::vector<TraceRecord>& trace) {
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : ""; };
  out << kManifestTag << to_json(m) << '\n' << kTraceColumns << '\n';
  std::string raw;
  for (const TraceRecord& r : trace) {
    out << r.k << ',' << format_number(r.R1) << ',' << format_number(r.R2) << ','
        << opt(r.L1) << ',' << opt(r.L2) << ',' << opt(r.Ru) << ',' << format_number(r.E)
        << ',' << opt(r.delta1) << ',' << opt(r.delta2) << ',' << opt(r.psnr) << ','
        << opt(r.ssim) << ',' << opt(r.wall_ms) << '\n';
    if (r.L1_raw) raw += " " + std::to_string(r.k) + ":L1";
    if (r.L2_raw) raw += " " + std::to_string(r.k) + ":L2";
    if (r.Ru_raw) raw += " " + std::to_string(r.k) + ":Ru";
  }
  if (!raw.empty()) out << "# raw" << raw << '\n';
}

void write_trace_csv(const std::string& path, const RunManifest& m,
                     const std::vector<TraceRecord>& trace) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_trace_csv(out, m, trace);
  if (!out) throw IoError("write failed for " + path);
}

RunManifest manifest_from_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  const std::string tag = kManifestTag;
  if (line.rfind(tag, 0) != 0) throw std::invalid_argument(path + ": no embedded manifest");
  return manifest_from_json(line.substr(tag.size()));
}

RunManifest load_manifest(const std::string& path) {
  const std::string text = read_text(path);
  if (text.rfind(kManifestTag, 0) == 0) return manifest_from_trace(path);
  return manifest_from_json(text);
}

}  // namespace satv
