#include "satv/commands.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "satv/analysis.hpp"
#include "satv/image_io.hpp"
#include "satv/synth.hpp"

namespace satv {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

ProblemSpec<double> problem_for(const RunManifest& m) {
  if (m.command == "denoise") return problem::Denoise{};
  if (m.command == "deblur") {
    require(m.kernel.has_value(), "deblur needs a kernel");
    return problem::Deblur<double>{parse_kernel(*m.kernel)};
  }
  require(m.mask.has_value(), "inpaint needs a mask");
  return problem::Inpaint<double>{load_mask(*m.mask), m.r3};
}

void restore(const RunManifest& m, std::ostream& out) {
  require(!m.input.empty(), m.command + " needs an input image");
  require(!m.output.empty(), m.command + " needs an output path");
  const SolverConfig<double> cfg = solver_config(m);
  const ImageGrid<double> f = load_image(m.input, m.h);
  const ProblemSpec<double> problem = problem_for(m);
  std::optional<ImageGrid<double>> ref;
  if (m.reference) {
    ref = load_image(*m.reference, m.h);
    require(ref->same_shape(f), "reference image shape does not match the input");
  }

  RunOptions<double> opt;
  opt.reference = ref ? &*ref : nullptr;
  opt.record_timing = m.timing;
  const RunResult<double> res =
      m.deltas ? run_with_deltas(cfg, problem, f, opt) : run(cfg, problem, f, opt);

  save_image(res.u, m.output);
  if (m.trace) write_trace_csv(*m.trace, m, res.trace);

  const TraceRecord& last = res.trace.back();
  out << "iterations=" << last.k << " converged=" << (res.converged ? "yes" : "no")
      << " Ru=" << (last.Ru ? format_number(*last.Ru) : "") << '\n';
  if (ref) {
    const ImageGrid<double> saved(quantize(res.u.values), m.h);
    out << "psnr=" << format_number(psnr(*ref, saved));
    if (std::min(f.rows(), f.cols()) >= kSsimWindow)
      out << " ssim=" << format_number(ssim(*ref, saved));
    out << '\n';
  }
}

void synthesize(const RunManifest& m, std::ostream& out) {
  require(!m.output.empty(), "synth needs an output path");
  ImageGrid<double> clean;
  if (m.scene == "disk") {
    require(m.radius > 0, "disk radius must be positive");
    const Index n = m.size ? static_cast<Index>(*m.size)
                           : static_cast<Index>(std::ceil(4 * m.radius));
    require(n >= 2, "disk image size must be at least 2");
    clean = disk_image<double>(n, n, m.radius, m.contrast, m.h);
  } else if (m.scene == "bars") {
    clean = bars_image<double>(m.h);
  } else if (m.scene == "triangle") {
    clean = triangle_image<double>(m.h);
  } else if (m.scene == "image") {
    require(!m.input.empty(), "synth image needs an input image");
    clean = load_image(m.input, m.h);
  } else {
    throw std::invalid_argument("unknown scene '" + m.scene +
                                "' (expected disk, bars, triangle or image)");
  }

  ImageGrid<double> degraded = clean;
  if (m.kernel) degraded = apply_blur(degraded, parse_kernel(*m.kernel));
  if (m.noise_sigma != 0 || m.noise_mean != 0) {
    require(m.seed.has_value(), "noise requires --seed");
    require(m.noise_sigma >= 0, "noise sigma must be nonnegative");
    degraded = add_gaussian_noise(degraded, NoiseSpec{m.noise_sigma, m.noise_mean, *m.seed});
  }
  if (m.mask_output) {
    require(m.seed.has_value(), "a random mask requires --seed");
    // The mask draws from its own stream so it does not depend on the noise.
    save_mask(random_mask(clean.rows(), clean.cols(), m.mask_fraction, *m.seed + 1),
              *m.mask_output);
  }
  if (m.clean_output) save_image(clean, *m.clean_output);
  save_image(degraded, m.output);
  out << "wrote " << m.output << " (" << clean.rows() << "x" << clean.cols() << ")\n";
}

void metrics(const RunManifest& m, std::ostream& out) {
  require(m.reference.has_value() && !m.input.empty(), "metrics needs two images");
  const ImageGrid<double> ref = load_image(*m.reference);
  const ImageGrid<double> cand = load_image(m.input);
  require(ref.same_shape(cand), "metrics: image shapes differ");
  const QualityReport q = quality(ref, cand);
  out << "mse,psnr,ssim\n"
      << format_number(q.mse) << ',' << format_number(q.psnr_db) << ','
      << format_number(q.ssim) << '\n';
}

void analyze(const RunManifest& m, std::ostream& out) {
  require(!m.factors.empty(), "analyze needs at least one steepness factor");
  for (double f : m.factors) require(f > 1, "steepness factors must exceed 1");
  const auto rows = steepness_sweep(m.radius, m.contrast, m.factors);
  std::ofstream file;
  std::ostream* dst = &out;
  if (!m.output.empty()) {
    file.open(m.output);
    if (!file) throw IoError("cannot write " + m.output);
    dst = &file;
  }
  *dst << "factor,steepness,integral,target,rel_error,lower,upper,bounds_hold,"
          "fidelity_lhs,fidelity_rhs,fidelity_holds,weighted_lhs,weighted_rhs,"
          "tv,tv_target\n";
  for (const SweepRow& r : rows) {
    const FidelityBound wb = weighted_fidelity_bound(
        RadialProfile::smooth_disk(m.radius, m.contrast, r.steepness), m.lambda);
    *dst << format_number(r.factor) << ',' << format_number(r.steepness) << ','
         << format_number(r.integral) << ',' << format_number(r.target) << ','
         << format_number(r.rel_error) << ',' << format_number(r.bounds.lower) << ','
         << format_number(r.bounds.upper) << ',' << (r.bounds_hold ? 1 : 0) << ','
         << format_number(r.fidelity.lhs) << ',' << format_number(r.fidelity.rhs) << ','
         << (r.fidelity.holds() ? 1 : 0) << ',' << format_number(wb.lhs) << ','
         << format_number(wb.rhs) << ',' << format_number(r.tv) << ','
         << format_number(r.tv_target) << '\n';
  }
  if (file.is_open() && !file) throw IoError("write failed for " + m.output);
}

}  // namespace

void execute(const RunManifest& m, std::ostream& out) {
  if (m.command == "denoise" || m.command == "deblur" || m.command == "inpaint")
    restore(m, out);
  else if (m.command == "synth")
    synthesize(m, out);
  else if (m.command == "metrics")
    metrics(m, out);
  else if (m.command == "analyze")
    analyze(m, out);
  else
    throw std::invalid_argument("unknown command '" + m.command + "'");
}

int guarded(const std::function<void()>& body, std::ostream& err) {
  try {
    body();
    return kExitOk;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SolverAbort& e) {
    err << "solver aborted: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace satv
