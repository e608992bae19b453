// nli — simulate and reconstruct nonlinear-interferometry IR images.
//
// Subcommands: target, simulate, reconstruct, truncate, info.
// Exit codes: 0 success, 2 bad arguments, 3 bad input data, 4 numeric failure.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nli/nli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = all hardware threads
  bool quiet = false;
  std::string out;
  std::vector<std::string> argv;
};

std::ostream& note(const GlobalOpts& g) {
  static std::ostringstream sink;
  if (g.quiet) {
    sink.str({});
    return sink;
  }
  return std::cout;
}

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(clock::now() - start_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_ = clock::now();
};

nli::RunManifest make_manifest(const GlobalOpts& g) {
  nli::RunManifest m;
  m.command_line = g.argv;
  m.seed = g.seed;
  return m;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto dots = tok.find("..");
    if (dots != std::string::npos) {
      const int a = std::stoi(tok.substr(0, dots));
      const int b = std::stoi(tok.substr(dots + 2));
      if (b < a) throw nli::ValueError("bad range: " + tok);
      for (int v = a; v <= b; ++v) out.push_back(v);
    } else if (!tok.empty()) {
      out.push_back(std::stoi(tok));
    }
  }
  if (out.empty()) throw nli::ValueError("empty list: " + s);
  return out;
}

void print_plane_range(std::ostream& os, const char* name, const nli::Plane<float>& p) {
  float lo = p[0], hi = p[0];
  for (float v : p.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  os << "  " << name << ": [" << lo << ", " << hi << "]\n";
}

void print_sample_summary(const GlobalOpts& g, const nli::SampleMap& m) {
  auto& os = note(g);
  os << "sample '" << m.name << "': " << m.width << "x" << m.height << " px, "
     << m.pixel_pitch << " um/px\n";
  print_plane_range(os, "r", m.r);
  print_plane_range(os, "tau", m.tau);
  print_plane_range(os, "height_nm", m.height_nm);
  std::size_t scattering = 0;
  for (auto v : m.scatter.values()) scattering += v ? 1 : 0;
  os << "  scatter fraction: "
     << static_cast<double>(scattering) / static_cast<double>(m.scatter.size()) << "\n";
}

// ---------------------------------------------------------------- target ---

struct TargetArgs {
  std::string type = "chip";
  int width = 256, height = 256;
  double pitch_um = 3.25;
  double line_width_um = 39.0;
  int bars = 3;
  double cap_t = 0.7;
  double bend_nm = 200.0;
  double immersion = 3.5;
  bool no_speckle = false;
  double speckle_grain_um = 10.0;
  double speckle_floor = 0.1;
  double r_silicon = 0.55;
  double r_metal = 0.10;
};

void run_target(const GlobalOpts& g, const TargetArgs& a) {
  if (g.out.empty()) throw nli::ValueError("target requires --out <file>");
  Stopwatch watch;

  nli::SampleMap sample;
  const double lambda_idler = nli::OpticalConfig::nominal().lambda_idler;
  auto speckled_chip = [&](double width_um, double height_um) {
    nli::ChipLayout layout = nli::default_chip_layout(width_um, height_um);
    layout.r_silicon = a.r_silicon;
    layout.r_metal = a.r_metal;
    nli::SampleMap chip = nli::gen_chip_contacts(layout, a.width, a.height, a.pitch_um);
    if (!a.no_speckle) {
      nli::SpeckleModel speckle;
      speckle.grain_size = a.speckle_grain_um;
      speckle.amplitude_floor = a.speckle_floor;
      speckle.seed = nli::seed_for(g.seed, "speckle");
      chip = nli::apply_speckle(chip, speckle, lambda_idler);
    }
    return chip;
  };

  if (a.type == "usaf-bars") {
    sample = nli::gen_bar_target(a.line_width_um, a.bars, a.width, a.height, a.pitch_um);
  } else if (a.type == "chip") {
    sample = speckled_chip(a.width * a.pitch_um, a.height * a.pitch_um);
  } else if (a.type == "capped-chip") {
    sample = speckled_chip(a.width * a.pitch_um, a.height * a.pitch_um);
    sample = nli::gen_capped_chip(sample, a.cap_t, a.bend_nm, a.immersion);
  } else {
    throw nli::ValueError("unknown generator '" + a.type +
                          "' (expected usaf-bars, chip or capped-chip)");
  }

  nli::write_sample(g.out, sample);
  print_sample_summary(g, sample);
  note(g) << "wrote " << g.out << "\n";

  nli::RunManifest manifest = make_manifest(g);
  manifest.outputs = {g.out};
  manifest.duration_ms = watch.ms();
  nli::write_manifest(g.out + ".manifest.json", manifest);
}

// -------------------------------------------------------------- simulate ---

struct SimulateArgs {
  std::string sample_path;
  std::string optics_path;
  double f3 = 25.0;
  bool f3_set = false;
  double mu = 1.0;
  bool mu_set = false;
  double phi_ref = 0.0;
  bool phi_ref_set = false;
  double immersion = 1.0;
  int frames = 64;
  double z_start = 0.0;
  double z_step = 0.0;
  bool z_step_set = false;
  double z_span = 1550.0;
  double exposure_ms = 300.0;
  double mean_counts = 1000.0;
  double read_noise = 2.0;
  bool no_shot = false;
  bool no_quantize = false;
  bool noiseless = false;
  bool no_psf = false;
  bool dry_run = false;
};

void run_simulate(const GlobalOpts& g, const SimulateArgs& a) {
  Stopwatch watch;

  nli::ScanPlan plan;
  plan.z_start = a.z_start;
  plan.n_frames = a.frames;
  plan.exposure = a.exposure_ms;
  plan.z_step = a.z_step_set ? a.z_step
                             : (a.frames > 0 ? a.z_span / a.frames : 0.0);
  if (plan.n_frames == 1) plan.z_step = a.z_step_set ? a.z_step : 0.0;
  plan.validate();

  if (a.dry_run) {
    note(g) << "frames: " << plan.n_frames << "\n";
    std::cout << "acquisition: "
              << nli::acquisition_time(plan.n_frames, plan.exposure) << " s\n";
    return;
  }
  if (g.out.empty()) throw nli::ValueError("simulate requires --out <dir>");
  if (a.sample_path.empty()) throw nli::ValueError("simulate requires --sample <file>");

  const nli::SampleMap sample = nli::read_sample(a.sample_path);

  nli::OpticalConfig optics;
  if (!a.optics_path.empty()) {
    try {
      optics = json::parse(nli::read_file_bytes(a.optics_path)).get<nli::OpticalConfig>();
    } catch (const json::exception& e) {
      throw nli::IoError("bad optics config " + a.optics_path + ": " + e.what());
    }
  } else {
    optics = nli::OpticalConfig::nominal(a.f3, std::max(a.immersion, sample.immersion_index));
  }
  if (a.f3_set && !a.optics_path.empty()) optics.f3 = a.f3;
  if (a.mu_set) optics.mu = a.mu;
  if (a.phi_ref_set) optics.phi_ref = a.phi_ref;
  optics.validate();

  nli::NoiseModel noise;
  if (a.noiseless) {
    noise = nli::NoiseModel::none(a.mean_counts);
  } else {
    noise.mean_counts = a.mean_counts;
    noise.shot_noise = !a.no_shot;
    noise.read_noise_sigma = a.read_noise;
    noise.quantize = !a.no_quantize;
  }
  noise.seed = nli::seed_for(g.seed, "noise");

  const std::string sample_id =
      sample.name.empty() ? fs::path(a.sample_path).stem().string() : sample.name;
  const nli::FrameStack stack =
      nli::render_stack(sample, optics, plan, !a.no_psf, noise, sample_id,
                        nli::resolve_threads(g.threads));
  nli::write_stack(g.out, stack);

  note(g) << "rendered " << stack.count() << " frames (" << stack.width() << "x"
          << stack.height() << "), z = [" << stack.z_positions.front() << ", "
          << stack.z_positions.back() << "] nm\n"
          << "acquisition: " << stack.acquisition_seconds() << " s\n"
          << "wrote " << g.out << "\n";

  nli::RunManifest manifest = make_manifest(g);
  manifest.input_digests[a.sample_path] = nli::file_digest(a.sample_path);
  if (!a.optics_path.empty()) {
    manifest.input_digests[a.optics_path] = nli::file_digest(a.optics_path);
  }
  manifest.outputs = {(fs::path(g.out) / "meta.json").string(),
                      (fs::path(g.out) / "frames.bin").string()};
  manifest.duration_ms = watch.ms();
  nli::write_manifest(fs::path(g.out) / "manifest.json", manifest);
}

// ----------------------------------------------------------- reconstruct ---

struct ReconstructArgs {
  std::string stack_dir;
  std::string modes = "variance";
  bool raw = false;
  double tau = 1.0;
  double mu = 1.0;
  double amp_floor = 0.0;
  double amp_floor_rel = 1e-6;
};

void run_reconstruct(const GlobalOpts& g, const ReconstructArgs& a) {
  if (g.out.empty()) throw nli::ValueError("reconstruct requires --out <dir>");
  if (a.stack_dir.empty()) throw nli::ValueError("reconstruct requires --stack <dir>");
  Stopwatch watch;

  const nli::FrameStack stack = nli::read_stack(a.stack_dir);
  const int threads = nli::resolve_threads(g.threads);

  const double bias =
      nli::expected_variance_bias(stack.z_positions, stack.optics.lambda_idler);
  note(g) << "stack: " << stack.count() << " frames, expected variance bias factor "
          << bias << "\n";

  nli::RunManifest manifest = make_manifest(g);
  manifest.input_digests[(fs::path(a.stack_dir) / "meta.json").string()] =
      nli::file_digest(fs::path(a.stack_dir) / "meta.json");
  manifest.input_digests[(fs::path(a.stack_dir) / "frames.bin").string()] =
      nli::file_digest(fs::path(a.stack_dir) / "frames.bin");

  std::stringstream modes(a.modes);
  std::string mode;
  bool any_mode = false;
  while (std::getline(modes, mode, ',')) {
    if (mode.empty()) continue;
    any_mode = true;
    const nli::ImageKind kind = nli::image_kind_from_string(mode);
    nli::ScalarImage img;
    nli::VarianceOptions vopts;
    vopts.normalized = !a.raw;
    vopts.threads = threads;
    switch (kind) {
      case nli::ImageKind::mean: img = nli::mean_image(stack); break;
      case nli::ImageKind::variance: img = nli::variance_image(stack, vopts); break;
      case nli::ImageKind::std: img = nli::std_image(stack, vopts); break;
      case nli::ImageKind::visibility: img = nli::visibility_image(stack, threads); break;
      case nli::ImageKind::reflectivity:
        img = nli::reflectivity_image(stack, a.tau, a.mu, threads);
        break;
      case nli::ImageKind::phase: {
        nli::PhaseMapOptions popts;
        popts.amplitude_floor = a.amp_floor;
        popts.amplitude_floor_rel = a.amp_floor_rel;
        popts.threads = threads;
        img = nli::phase_map(stack, stack.optics.lambda_idler, popts);
        break;
      }
    }
    const nli::ImageExportPaths paths = nli::export_image(g.out, mode, img);
    manifest.outputs.push_back(paths.pgm.string());
    manifest.outputs.push_back(paths.csv.string());
    manifest.outputs.push_back(paths.sidecar.string());
    note(g) << "wrote " << paths.pgm.string() << " (+csv, +json)\n";
  }
  if (!any_mode) throw nli::ValueError("--mode parsed to an empty list");

  manifest.duration_ms = watch.ms();
  nli::write_manifest(fs::path(g.out) / "manifest.json", manifest);
}

// -------------------------------------------------------------- truncate ---

struct TruncateArgs {
  std::string stack_dir;
  std::string continuous, gapped, random;
  int repeats = 20;
  bool raw = false;
};

void run_truncate(const GlobalOpts& g, const TruncateArgs& a) {
  if (g.out.empty()) throw nli::ValueError("truncate requires --out <dir>");
  if (a.stack_dir.empty()) throw nli::ValueError("truncate requires --stack <dir>");
  if (a.continuous.empty() && a.gapped.empty() && a.random.empty()) {
    throw nli::ValueError("truncate needs at least one of --continuous/--gapped/--random");
  }
  Stopwatch watch;

  const nli::FrameStack stack = nli::read_stack(a.stack_dir);

  std::vector<nli::SelectionSpec> specs;
  if (!a.continuous.empty()) {
    for (int n : parse_int_list(a.continuous)) {
      specs.push_back(nli::SelectionSpec::make_continuous(n));
    }
  }
  if (!a.gapped.empty()) {
    for (int gap : parse_int_list(a.gapped)) {
      specs.push_back(nli::SelectionSpec::make_gapped(gap));
    }
  }
  if (!a.random.empty()) {
    for (int k : parse_int_list(a.random)) {
      specs.push_back(nli::SelectionSpec::make_random(
          k, nli::seed_for(g.seed, "selection:random-" + std::to_string(k))));
    }
  }

  nli::StudyOptions sopts;
  sopts.normalized = !a.raw;
  sopts.repeats = a.repeats;
  sopts.threads = nli::resolve_threads(g.threads);
  const nli::TruncationReport report = nli::run_truncation_study(stack, specs, sopts);

  fs::create_directories(g.out);
  nli::atomic_write_file(fs::path(g.out) / "report.json",
                         json(report).dump(2) + "\n");
  {
    std::ostringstream csv;
    nli::write_report_csv(csv, report);
    nli::atomic_write_file(fs::path(g.out) / "report.csv", csv.str());
  }
  {
    std::ostringstream dat;
    nli::write_report_gnuplot(dat, report);
    nli::atomic_write_file(fs::path(g.out) / "report.dat", dat.str());
  }

  auto& os = note(g);
  os << "baseline Frobenius norm: " << report.baseline_norm << "\n";
  for (const nli::TruncationGroup& grp : report.groups) {
    os << "  " << grp.label << ": mean relative diff " << grp.mean_relative_diff;
    if (grp.realizations > 1) {
      os << " +- " << grp.std_relative_diff << " (" << grp.realizations << " runs)";
    }
    os << "\n";
  }
  std::size_t failed = 0;
  for (const nli::TruncationRow& r : report.rows) failed += r.error.empty() ? 0 : 1;
  if (failed > 0) {
    std::cerr << "warning: " << failed << " study rows failed (see report)\n";
  }
  if (failed == report.rows.size()) {
    throw nli::NumericError("all truncation study rows failed");
  }

  nli::RunManifest manifest = make_manifest(g);
  manifest.input_digests[(fs::path(a.stack_dir) / "meta.json").string()] =
      nli::file_digest(fs::path(a.stack_dir) / "meta.json");
  manifest.input_digests[(fs::path(a.stack_dir) / "frames.bin").string()] =
      nli::file_digest(fs::path(a.stack_dir) / "frames.bin");
  manifest.outputs = {(fs::path(g.out) / "report.json").string(),
                      (fs::path(g.out) / "report.csv").string(),
                      (fs::path(g.out) / "report.dat").string()};
  manifest.duration_ms = watch.ms();
  nli::write_manifest(fs::path(g.out) / "manifest.json", manifest);
}

// ------------------------------------------------------------------ info ---

struct InfoArgs {
  std::string stack_dir;
  std::string sample_path;
};

void run_info(const GlobalOpts& g, const InfoArgs& a) {
  if (a.stack_dir.empty() && a.sample_path.empty()) {
    throw nli::ValueError("info requires --stack <dir> or --sample <file>");
  }
  if (!a.sample_path.empty()) {
    print_sample_summary(g, nli::read_sample(a.sample_path));
  }
  if (!a.stack_dir.empty()) {
    const nli::FrameStack stack = nli::read_stack(a.stack_dir);
    auto& os = note(g);
    os << "stack '" << stack.sample_id << "': " << stack.count() << " frames of "
       << stack.width() << "x" << stack.height() << " ("
       << (stack.quantized ? "u16" : "f32") << ")\n"
       << "  z: [" << stack.z_positions.front() << ", " << stack.z_positions.back()
       << "] nm, exposure " << stack.exposure_ms << " ms, acquisition "
       << stack.acquisition_seconds() << " s\n"
       << "  probe wavelength: " << stack.optics.lambda_idler << " nm\n"
       << "  expected variance bias factor: "
       << nli::expected_variance_bias(stack.z_positions, stack.optics.lambda_idler)
       << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  GlobalOpts g;
  g.argv.assign(argv, argv + argc);

  CLI::App app{"nonlinear-interferometry IR imaging: simulation and reconstruction"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", g.seed, "master seed; all randomness derives from it");
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)");
  app.add_option("--out", g.out, "output file or directory");
  app.add_flag("--quiet", g.quiet, "suppress progress output");

  TargetArgs targs;
  CLI::App* target = app.add_subcommand("target", "generate a synthetic sample");
  target->add_option("--type", targs.type, "usaf-bars | chip | capped-chip");
  target->add_option("--width", targs.width, "canvas width, px");
  target->add_option("--height", targs.height, "canvas height, px");
  target->add_option("--pitch-um", targs.pitch_um, "object-plane pixel pitch, um");
  target->add_option("--line-width-um", targs.line_width_um, "bar width, um");
  target->add_option("--bars", targs.bars, "number of bars");
  target->add_option("--cap-t", targs.cap_t, "cap amplitude transmission");
  target->add_option("--bend-nm", targs.bend_nm, "cap bow peak-to-edge sag, nm");
  target->add_option("--immersion", targs.immersion, "cap refractive index");
  target->add_flag("--no-speckle", targs.no_speckle, "disable metal granularity");
  target->add_option("--speckle-grain-um", targs.speckle_grain_um, "speckle grain size");
  target->add_option("--speckle-floor", targs.speckle_floor, "speckle amplitude floor");
  target->add_option("--r-silicon", targs.r_silicon, "substrate amplitude reflectivity");
  target->add_option("--r-metal", targs.r_metal, "metal effective reflectivity");

  SimulateArgs sargs;
  CLI::App* simulate = app.add_subcommand("simulate", "render an interference scan");
  simulate->add_option("--sample", sargs.sample_path, "sample container file");
  simulate->add_option("--optics", sargs.optics_path, "optics config JSON");
  simulate->add_option("--f3", sargs.f3, "objective focal length, mm")
      ->each([&](const std::string&) { sargs.f3_set = true; });
  simulate->add_option("--mu", sargs.mu, "correlation magnitude")
      ->each([&](const std::string&) { sargs.mu_set = true; });
  simulate->add_option("--phi-ref", sargs.phi_ref, "reference arm phase, rad")
      ->each([&](const std::string&) { sargs.phi_ref_set = true; });
  simulate->add_option("--immersion", sargs.immersion, "immersion index for nominal optics");
  simulate->add_option("--frames", sargs.frames, "number of frames");
  simulate->add_option("--z-start", sargs.z_start, "scan start, nm");
  simulate->add_option("--z-step", sargs.z_step, "scan step, nm")
      ->each([&](const std::string&) { sargs.z_step_set = true; });
  simulate->add_option("--z-span", sargs.z_span, "scan span, nm (step = span/frames)");
  simulate->add_option("--exposure-ms", sargs.exposure_ms, "per-frame exposure, ms");
  simulate->add_option("--mean-counts", sargs.mean_counts, "counts at the fringe offset");
  simulate->add_option("--read-noise", sargs.read_noise, "read noise sigma, counts");
  simulate->add_flag("--no-shot", sargs.no_shot, "disable shot noise");
  simulate->add_flag("--no-quantize", sargs.no_quantize, "keep float frames");
  simulate->add_flag("--noiseless", sargs.noiseless, "disable the whole noise chain");
  simulate->add_flag("--no-psf", sargs.no_psf, "skip the resolution blur");
  simulate->add_flag("--dry-run", sargs.dry_run, "print frame count and time, render nothing");

  ReconstructArgs rargs;
  CLI::App* reconstruct = app.add_subcommand("reconstruct", "turn a stack into images");
  reconstruct->add_option("--stack", rargs.stack_dir, "stack directory");
  reconstruct->add_option("--mode", rargs.modes,
                          "comma list of mean,variance,std,visibility,reflectivity,phase");
  reconstruct->add_flag("--raw", rargs.raw, "skip per-pixel mean normalization");
  reconstruct->add_option("--tau", rargs.tau, "assumed amplitude transmission");
  reconstruct->add_option("--mu", rargs.mu, "assumed correlation magnitude");
  reconstruct->add_option("--amp-floor", rargs.amp_floor, "phase amplitude floor, counts");
  reconstruct->add_option("--amp-floor-rel", rargs.amp_floor_rel,
                          "phase amplitude floor relative to the stack mean");

  TruncateArgs targs2;
  CLI::App* truncate = app.add_subcommand("truncate", "frame-subset degradation study");
  truncate->add_option("--stack", targs2.stack_dir, "stack directory");
  truncate->add_option("--continuous", targs2.continuous, "frame counts, e.g. 32,64");
  truncate->add_option("--gapped", targs2.gapped, "gap sizes, e.g. 1..7");
  truncate->add_option("--random", targs2.random, "random frame counts, e.g. 10,5,2");
  truncate->add_option("--repeats", targs2.repeats, "realizations per random selection");
  truncate->add_flag("--raw", targs2.raw, "study raw (unnormalized) variance");

  InfoArgs iargs;
  CLI::App* info = app.add_subcommand("info", "print sample or stack metadata");
  info->add_option("--stack", iargs.stack_dir, "stack directory");
  info->add_option("--sample", iargs.sample_path, "sample container file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (target->parsed()) run_target(g, targs);
    if (simulate->parsed()) run_simulate(g, sargs);
    if (reconstruct->parsed()) run_reconstruct(g, rargs);
    if (truncate->parsed()) run_truncate(g, targs2);
    if (info->parsed()) run_info(g, iargs);
  } catch (const nli::ValueError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nli::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const nli::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
