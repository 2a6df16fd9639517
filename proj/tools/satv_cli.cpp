// satv: restore, synthesize and analyze grayscale images from the command line.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "satv/commands.hpp"
#include "satv/image_io.hpp"

namespace {

using satv::RunManifest;

void add_solver_options(CLI::App* cmd, RunManifest& m) {
  cmd->add_option("input", m.input, "Degraded input image (PGM or PNG)")->required();
  cmd->add_option("-o,--out", m.output, "Restored image path")->required();
  cmd->add_option("--ref", m.reference, "Clean reference image for PSNR/SSIM");
  cmd->add_option("--trace", m.trace, "Write the per-iteration trace as CSV");
  cmd->add_option("--lambda", m.lambda, "Fidelity parameter lambda")->capture_default_str();
  cmd->add_option("--r1", m.r1, "Penalty for v = grad u")->capture_default_str();
  cmd->add_option("--r2", m.r2, "Penalty for w = hess u")->capture_default_str();
  cmd->add_option("--mu", m.mu, "Proximal weight on u")->capture_default_str();
  cmd->add_option("--gamma", m.gamma, "Proximal weight on v")->capture_default_str();
  cmd->add_option("--tau", m.tau, "Proximal weight on w")->capture_default_str();
  cmd->add_option("--mesh", m.h, "Mesh size h")->capture_default_str();
  cmd->add_option("--max-iter", m.max_iter, "Iteration cap")->capture_default_str();
  cmd->add_option("--tol", m.tol, "Stop when Ru <= tol")->capture_default_str();
  cmd->add_option("--weights", m.weights,
                  "dynamic | observed | oracle:<image> | constant:<alpha>:<beta>")
      ->capture_default_str();
  cmd->add_flag("--no-first{false}", m.enable_first, "Drop the first-order term");
  cmd->add_flag("--no-second{false}", m.enable_second, "Drop the second-order term");
  cmd->add_flag("--deltas", m.deltas, "Record delta1/delta2 (runs the solver twice)");
  cmd->add_flag("--no-timing{false}", m.timing, "Leave the wall_ms column empty");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatially adapted first and second order restoration"};
  app.require_subcommand(1);
  app.fallthrough();
  RunManifest m;
  std::string save_manifest;
  app.add_option("--save-manifest", save_manifest, "Write the run manifest as JSON");

  auto* denoise = app.add_subcommand("denoise", "Remove Gaussian noise");
  add_solver_options(denoise, m);

  auto* deblur = app.add_subcommand("deblur", "Remove blur and noise");
  add_solver_options(deblur, m);
  deblur->add_option("--kernel", m.kernel, "gaussian:<size>:<sigma> | average:<size>")
      ->required();

  auto* inpaint = app.add_subcommand("inpaint", "Fill masked pixels");
  add_solver_options(inpaint, m);
  inpaint->add_option("--mask", m.mask, "Mask image, >= 128 marks a missing pixel")->required();
  inpaint->add_option("--r3", m.r3, "Penalty for z = u")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Generate a test image");
  synth->add_option("scene", m.scene, "disk | bars | triangle | image")->required();
  synth->add_option("--in", m.input, "Source image for the 'image' scene");
  synth->add_option("-o,--out", m.output, "Degraded output image");
  synth->add_option("--R", m.radius, "Disk radius in pixels")->capture_default_str();
  synth->add_option("--contrast", m.contrast, "Disk height")->capture_default_str();
  synth->add_option("--size", m.size, "Disk image side (default 4R)");
  synth->add_option("--blur", m.kernel, "Blur kernel applied before noise");
  synth->add_option("--noise", m.noise_sigma, "Gaussian noise standard deviation");
  synth->add_option("--noise-mean", m.noise_mean, "Gaussian noise mean");
  synth->add_option("--seed", m.seed, "Random seed (required with noise or a mask)");
  synth->add_option("--mask-fraction", m.mask_fraction, "Missing-pixel probability");
  synth->add_option("--mask-out", m.mask_output, "Write a random inpainting mask");
  synth->add_option("--clean-out", m.clean_output, "Write the undegraded image");
  synth->add_option("--mesh", m.h, "Mesh size h")->capture_default_str();

  auto* metrics = app.add_subcommand("metrics", "PSNR and SSIM of an image against a reference");
  metrics->add_option("reference", m.reference, "Reference image")->required();
  metrics->add_option("candidate", m.input, "Candidate image")->required();

  auto* analyze = app.add_subcommand("analyze", "Radial profile sweep as CSV");
  analyze->add_option("--R", m.radius, "Disk radius")->capture_default_str();
  analyze->add_option("--contrast", m.contrast, "Disk height")->capture_default_str();
  analyze->add_option("--factors", m.factors, "Steepness in units of 2h/R")
      ->capture_default_str();
  analyze->add_option("--lambda", m.lambda, "lambda for the weighted fidelity bound")
      ->capture_default_str();
  analyze->add_option("-o,--out", m.output, "CSV path (default stdout)");

  std::string manifest_path;
  auto* rerun = app.add_subcommand("rerun", "Repeat a run from a manifest or trace file");
  rerun->add_option("manifest", manifest_path, "JSON manifest or CSV trace")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return satv::kExitConfig;
  }

  return satv::guarded(
      [&] {
        if (rerun->parsed()) {
          m = satv::load_manifest(manifest_path);
        } else {
          m.command = app.get_subcommands().front()->get_name();
          if (m.command == "synth" && m.output.empty()) m.output = m.scene + ".pgm";
        }
        if (!save_manifest.empty()) {
          std::ofstream out(save_manifest);
          if (!out || !(out << satv::to_json(m) << '\n'))
            throw satv::IoError("cannot write " + save_manifest);
        }
        satv::execute(m, std::cout);
      },
      std::cerr);
}
