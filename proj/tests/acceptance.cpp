// Acceptance suite: one check per release criterion, each printing a
// [PASS]/[FAIL] line. Exits nonzero if any criterion fails.
//
// Run through ctest (which points NLI_CLI at the built binary) or set
// NLI_CLI manually for the reproducibility criterion.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "nli/nli.hpp"

namespace fs = std::filesystem;
using namespace nli;

namespace {

int g_failures = 0;

void report(const char* id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] %s %-24s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

OpticalConfig flat_optics(double phi_ref = 0.0) {
  OpticalConfig c = OpticalConfig::nominal();
  c.phi_ref = phi_ref;
  return c;
}

// z_k = k * lambda / n: n samples covering exactly two fringe periods
ScanPlan exact_two_periods(double lambda, int n = 64) {
  ScanPlan p;
  p.z_start = 0.0;
  p.z_step = lambda / n;
  p.n_frames = n;
  p.exposure = 300.0;
  return p;
}

// --------------------------------------------------------------------------
// C1: energy conservation fixes the probe wavelength near the nominal 1550.
// Oracle: direct evaluation of 1/(1/532 - 1/810) = 532*810/278
//       = 1550.0719424460433 nm.
// --------------------------------------------------------------------------
void c1_energy_conservation() {
  const double li = idler_wavelength(532.0, 810.0);
  const double residual = std::fabs(1.0 / 532.0 - 1.0 / 810.0 - 1.0 / li);
  const bool conserved = residual < 1e-15;
  const bool matches_oracle = std::fabs(li - 1550.0719424460433) <= 0.01;
  const bool near_nominal = std::fabs(li - 1550.0) < 0.5;
  report("C01", "energy-conservation", conserved && matches_oracle && near_nominal,
         fmt("idler = %.6f nm, conservation residual %.2e", li, residual));
}

// --------------------------------------------------------------------------
// C2: normalized STD of noiseless fringes over exactly two periods equals
// V/sqrt(2): 1/sqrt(2) at unit visibility, 0.49/sqrt(2) at tau = 0.7.
// --------------------------------------------------------------------------
void c2_std_constant() {
  const OpticalConfig optics = flat_optics(0.35);
  const ScanPlan plan = exact_two_periods(optics.lambda_idler);

  const SampleMap unit = SampleMap::uniform(6, 6, 2.0, 1.0f);
  const ScalarImage sd1 =
      std_image(render_stack(unit, optics, plan, false, NoiseModel::none()));
  double err1 = 0.0;
  for (double v : sd1.values) err1 = std::max(err1, std::fabs(v - 1.0 / std::sqrt(2.0)));

  const SampleMap capped = SampleMap::uniform(6, 6, 2.0, 1.0f, 0.7f);
  const ScalarImage sd2 =
      std_image(render_stack(capped, optics, plan, false, NoiseModel::none()));
  double err2 = 0.0;
  for (double v : sd2.values) err2 = std::max(err2, std::fabs(v - 0.49 / std::sqrt(2.0)));

  report("C02", "std-fringe-constant", err1 <= 1e-6 && err2 <= 1e-6,
         fmt("max |std - 1/sqrt2| = %.2e, max |std - 0.49/sqrt2| = %.2e", err1, err2));
}

// --------------------------------------------------------------------------
// C3: variance ratios reproduce intensity-reflectivity ratios; the inversion
// recovers R itself.
// --------------------------------------------------------------------------
void c3_variance_ratio() {
  const OpticalConfig optics = flat_optics(1.2);
  const ScanPlan plan = exact_two_periods(optics.lambda_idler);
  SampleMap sample = SampleMap::uniform(8, 8, 2.0, 1.0f);  // R = 1.0
  for (int y = 4; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) sample.r.at(x, y) = 0.5f;  // R = 0.25
  }
  const FrameStack stack = render_stack(sample, optics, plan, false, NoiseModel::none());
  const ScalarImage var = variance_image(stack);
  const double ratio = var.at(2, 1) / var.at(2, 6);
  const bool ratio_ok = std::fabs(ratio - 4.0) <= 0.08;  // 2%

  const ScalarImage refl = reflectivity_image(stack, 1.0, 1.0);
  double err = 0.0;
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      err = std::max(err, std::fabs(refl.at(x, y) - (y < 4 ? 1.0 : 0.25)));
    }
  }
  report("C03", "reflectivity-ratio", ratio_ok && err <= 0.01,
         fmt("variance ratio = %.4f, max |R - expected| = %.2e", ratio, err));
}

// --------------------------------------------------------------------------
// C4: a 1550 nm sweep spans two fringe periods. A frequency scan (own 2-par
// least squares per candidate, independent of the production fitter) must
// land at 2.000 +- 0.001 cycles per sweep.
// --------------------------------------------------------------------------
double ssr_at_cycles(const std::vector<double>& y, const std::vector<double>& z,
                     double span, double cycles) {
  const std::size_t n = y.size();
  double sc = 0, ss = 0, scc = 0, sss = 0, scs = 0, sy = 0, syc = 0, sys = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = kTwoPi * cycles * z[k] / span;
    const double c = std::cos(x), s = std::sin(x);
    sc += c; ss += s; scc += c * c; sss += s * s; scs += c * s;
    sy += y[k]; syc += y[k] * c; sys += y[k] * s;
  }
  // solve [n sc ss; sc scc scs; ss scs sss] [a b c]' = [sy syc sys]'
  const double nn = static_cast<double>(n);
  double m[3][4] = {{nn, sc, ss, sy}, {sc, scc, scs, syc}, {ss, scs, sss, sys}};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    }
    std::swap(m[col], m[piv]);
    if (std::fabs(m[col][col]) < 1e-12) return 1e300;
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int cc = col; cc < 4; ++cc) m[r][cc] -= f * m[col][cc];
    }
  }
  const double a = m[0][3] / m[0][0], b = m[1][3] / m[1][1], c2 = m[2][3] / m[2][2];
  double ssr = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = kTwoPi * cycles * z[k] / span;
    const double r = y[k] - (a + b * std::cos(x) + c2 * std::sin(x));
    ssr += r * r;
  }
  return ssr;
}

void c4_scan_phase_anchor() {
  const OpticalConfig optics = flat_optics(0.8);
  const double span = 1550.0;
  ScanPlan plan;
  plan.z_step = span / 64.0;
  plan.n_frames = 64;
  const SampleMap flat = SampleMap::uniform(3, 3, 2.0, 0.9f);
  const FrameStack stack = render_stack(flat, optics, plan, false, NoiseModel::none());

  std::vector<double> trace(stack.frames.size());
  for (std::size_t k = 0; k < trace.size(); ++k) trace[k] = stack.frames[k].at(1, 1);

  double best_c = 0.0, best_ssr = 1e300;
  for (double c = 1.8; c <= 2.2 + 1e-12; c += 1e-3) {
    const double ssr = ssr_at_cycles(trace, stack.z_positions, span, c);
    if (ssr < best_ssr) {
      best_ssr = ssr;
      best_c = c;
    }
  }
  for (double c = best_c - 2e-3; c <= best_c + 2e-3; c += 1e-5) {
    const double ssr = ssr_at_cycles(trace, stack.z_positions, span, c);
    if (ssr < best_ssr) {
      best_ssr = ssr;
      best_c = c;
    }
  }
  report("C04", "scan-phase-anchor", std::fabs(best_c - 2.0) <= 1e-3,
         fmt("fitted %.5f cycles per 1550 nm sweep", best_c));
}

// --------------------------------------------------------------------------
// C5: acquisition-time arithmetic.
// --------------------------------------------------------------------------
void c5_acquisition_time() {
  const double five = acquisition_time(5, 300.0);
  const double sixty_four = acquisition_time(64, 300.0);
  report("C05", "acquisition-time", five == 1.5 && std::fabs(sixty_four - 19.2) < 1e-12,
         fmt("5 frames -> %g s, 64 frames -> %g s", five, sixty_four));
}

// --------------------------------------------------------------------------
// C6: streaming variance equals a textbook two-pass reference on 50 random
// stacks.
// --------------------------------------------------------------------------
void c6_streaming_variance() {
  SplitMix64 g(606);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int w = 2 + static_cast<int>(g.bounded(7));
    const int h = 2 + static_cast<int>(g.bounded(7));
    const int n = 2 + static_cast<int>(g.bounded(40));
    FrameStack s;
    s.optics = flat_optics();
    for (int k = 0; k < n; ++k) {
      Frame f(w, h);
      for (auto& v : f.values()) v = 1000.0 * g.uniform();
      s.frames.push_back(std::move(f));
      s.z_positions.push_back(k * 10.0);
    }
    VarianceOptions raw;
    raw.normalized = false;
    const ScalarImage var = variance_image(s, raw);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double mean = 0.0;
        for (int k = 0; k < n; ++k) mean += s.frames[static_cast<std::size_t>(k)].at(x, y);
        mean /= n;
        double acc = 0.0;
        for (int k = 0; k < n; ++k) {
          const double d = s.frames[static_cast<std::size_t>(k)].at(x, y) - mean;
          acc += d * d;
        }
        const double ref = acc / n;
        const double rel = std::fabs(var.at(x, y) - ref) / std::max(ref, 1e-300);
        worst = std::max(worst, rel);
      }
    }
  }
  report("C06", "streaming-variance", worst <= 1e-9,
         fmt("max |welford - two-pass| relative = %.2e over 50 stacks", worst));
}

// --------------------------------------------------------------------------
// C7: the closed-form fringe fit recovers noiseless parameters to 1e-6,
// beats a brute-force grid search, and sits at a residual minimum.
// --------------------------------------------------------------------------
double model_ssr(const FringeFit& fit, const std::vector<double>& y,
                 const std::vector<double>& z, double lambda) {
  double ssr = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double x = 2.0 * kTwoPi * z[k] / lambda;
    const double r = y[k] - (fit.offset + fit.amplitude * std::cos(x + fit.phase));
    ssr += r * r;
  }
  return ssr;
}

void c7_fringe_fit() {
  const double lambda = OpticalConfig::nominal().lambda_idler;
  std::vector<double> z(64);
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = static_cast<double>(k) * lambda / 64.0;

  SplitMix64 g(707);
  bool ok = true;
  std::string detail;
  for (int trial = 0; trial < 10 && ok; ++trial) {
    const double amp = 100.0 + 900.0 * g.uniform();
    const double phase = wrap_phase(kTwoPi * g.uniform());
    const double offset = 500.0 + 1000.0 * g.uniform();
    std::vector<double> y(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
      y[k] = offset + amp * std::cos(2.0 * kTwoPi * z[k] / lambda + phase);
    }
    const FringeFit fit = fit_fringe(y, z, lambda);
    const double aerr = std::fabs(fit.amplitude - amp);
    const double perr = std::fabs(wrap_phase(fit.phase - phase));
    const double oerr = std::fabs(fit.offset - offset);
    if (aerr > 1e-6 || perr > 1e-6 || oerr > 1e-6 || fit.rms_residual > 1e-6) {
      ok = false;
      detail = fmt("parameter recovery failed: da=%.2e dphi=%.2e doff=%.2e", aerr, perr, oerr);
      break;
    }

    // brute-force oracle: dense phase scan with a linear solve at each step
    const double fit_ssr = model_ssr(fit, y, z, lambda);
    double oracle_ssr = 1e300;
    for (int i = 0; i < 2048; ++i) {
      FringeFit cand;
      cand.phase = -kPi + kTwoPi * i / 2048.0;
      double sc = 0, scc = 0, sy = 0, syc = 0;
      for (std::size_t k = 0; k < z.size(); ++k) {
        const double c = std::cos(2.0 * kTwoPi * z[k] / lambda + cand.phase);
        sc += c;
        scc += c * c;
        sy += y[k];
        syc += y[k] * c;
      }
      const double n = static_cast<double>(z.size());
      const double det = n * scc - sc * sc;
      if (std::fabs(det) < 1e-12) continue;
      cand.offset = (scc * sy - sc * syc) / det;
      cand.amplitude = (n * syc - sc * sy) / det;
      oracle_ssr = std::min(oracle_ssr, model_ssr(cand, y, z, lambda));
    }
    if (fit_ssr > oracle_ssr + 1e-9) {
      ok = false;
      detail = fmt("grid oracle beat the fit: %.3e vs %.3e", oracle_ssr, fit_ssr);
      break;
    }

    // finite-difference check: perturbations never lower the residual
    for (double delta : {1e-5, -1e-5, 1e-3, -1e-3}) {
      FringeFit p = fit;
      p.amplitude += delta * std::max(fit.amplitude, 1.0);
      if (model_ssr(p, y, z, lambda) < fit_ssr - 1e-12) ok = false;
      p = fit;
      p.phase += delta;
      if (model_ssr(p, y, z, lambda) < fit_ssr - 1e-12) ok = false;
      p = fit;
      p.offset += delta * std::max(fit.offset, 1.0);
      if (model_ssr(p, y, z, lambda) < fit_ssr - 1e-12) ok = false;
    }
    if (!ok) detail = "a perturbed parameter set had a lower residual";
  }
  if (ok) detail = "10 random noiseless traces recovered to 1e-6; minimum verified";
  report("C07", "fringe-fit", ok, detail);
}

// --------------------------------------------------------------------------
// C8: sparser random subsets give strictly larger mean Frobenius error
// (random-2 > random-5 > random-10 > full), each gap above one Monte-Carlo
// standard error, and continuous runs beat equal-count random picks.
// --------------------------------------------------------------------------
void c8_truncation_trend() {
  OpticalConfig optics = flat_optics();
  ChipLayout layout = default_chip_layout(32 * 3.0, 32 * 3.0);
  SampleMap chip = gen_chip_contacts(layout, 32, 32, 3.0);
  SpeckleModel speckle;
  speckle.seed = 808;
  speckle.grain_size = 9.0;
  chip = apply_speckle(chip, speckle, optics.lambda_idler);
  const ScanPlan plan = exact_two_periods(optics.lambda_idler);
  const FrameStack stack = render_stack(chip, optics, plan, false, NoiseModel::none());

  const std::vector<SelectionSpec> specs = {
      SelectionSpec::make_random(10, 1),
      SelectionSpec::make_random(5, 2),
      SelectionSpec::make_random(2, 3),
      SelectionSpec::make_random(32, 4),
      SelectionSpec::make_continuous(32),
  };
  StudyOptions opts;
  opts.repeats = 120;
  const TruncationReport rep = run_truncation_study(stack, specs, opts);

  auto group = [&](const std::string& label) -> const TruncationGroup& {
    for (const auto& g : rep.groups) {
      if (g.label == label) return g;
    }
    throw Error("missing group " + label);
  };
  const TruncationGroup& r10 = group("random-10");
  const TruncationGroup& r5 = group("random-5");
  const TruncationGroup& r2 = group("random-2");
  const TruncationGroup& r32 = group("random-32");
  const TruncationGroup& c32 = group("continuous-32");

  auto se = [](const TruncationGroup& g) {
    return g.std_relative_diff / std::sqrt(static_cast<double>(g.realizations));
  };
  auto gap_ok = [&](const TruncationGroup& hi, const TruncationGroup& lo) {
    return hi.mean_relative_diff - lo.mean_relative_diff >
           std::sqrt(se(hi) * se(hi) + se(lo) * se(lo));
  };

  const bool ordered = gap_ok(r2, r5) && gap_ok(r5, r10) &&
                       r10.mean_relative_diff > se(r10);  // full stack has zero error
  const bool continuous_wins =
      c32.mean_relative_diff < r32.mean_relative_diff - se(r32);
  report("C08", "truncation-trend", ordered && continuous_wins,
         fmt("mean rel diff: r2=%.4f r5=%.4f r10=%.4f r32=%.4f c32=%.2e",
             r2.mean_relative_diff, r5.mean_relative_diff, r10.mean_relative_diff,
             r32.mean_relative_diff, c32.mean_relative_diff));
}

// --------------------------------------------------------------------------
// C9: with a 39 um FWHM blur, a 78 um-period bar target keeps Michelson
// contrast above 0.2 in the variance image while a 19.5 um-period target
// drops below 0.05.
//
// Gaussian-MTF oracle (computed before the build): sigma = 39/2.35482 um;
// M(1/78) = exp(-2 pi^2 sigma^2 / 78^2) = 0.411, fundamental of the 0/1
// square wave = 2/pi, so V = 0.5 +- 0.261 and the variance-image contrast
// (V+^2 - V-^2)/(V+^2 + V-^2) = 0.82. M(1/19.5) = 6.6e-7 -> contrast ~ 2e-6.
// --------------------------------------------------------------------------
double bar_variance_contrast(double line_width_um) {
  const OpticalConfig optics = flat_optics();  // 39 um FWHM
  const double pitch = 3.25;
  const int n_bars = 5;
  const int px = 128;
  const SampleMap target = gen_bar_target(line_width_um, n_bars, px, px, pitch);
  const ScanPlan plan = exact_two_periods(optics.lambda_idler);
  const FrameStack stack = render_stack(target, optics, plan, true, NoiseModel::none());
  const ScalarImage var = variance_image(stack);

  const double canvas_h = px * pitch;
  const double pattern_h = (2 * n_bars - 1) * line_width_um;
  const double y0 = (canvas_h - pattern_h) / 2.0;
  auto row_of = [&](double y_um) {
    return std::clamp(static_cast<int>(y_um / pitch), 0, px - 1);
  };
  const int x_mid = px / 2;
  // interior bar centers (bars 1..3) and the two central gap centers
  double bar_mean = 0.0;
  for (int i : {1, 2, 3}) {
    bar_mean += var.at(x_mid, row_of(y0 + (2 * i + 0.5) * line_width_um));
  }
  bar_mean /= 3.0;
  double gap_mean = 0.0;
  for (int j : {1, 2}) {
    gap_mean += var.at(x_mid, row_of(y0 + (2 * j + 1.5) * line_width_um));
  }
  gap_mean /= 2.0;
  return (bar_mean - gap_mean) / (bar_mean + gap_mean);
}

void c9_resolution() {
  const double coarse = bar_variance_contrast(39.0);    // 78 um period
  const double fine = bar_variance_contrast(9.75);      // 19.5 um period
  // oracle prediction for the coarse target
  const double sigma = 39.0 / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const double m1 = std::exp(-2.0 * kPi * kPi * sigma * sigma / (78.0 * 78.0));
  const double vhi = 0.5 + (2.0 / kPi) * m1, vlo = 0.5 - (2.0 / kPi) * m1;
  const double predicted = (vhi * vhi - vlo * vlo) / (vhi * vhi + vlo * vlo);
  const bool ok = coarse > 0.2 && fine < 0.05 && std::fabs(coarse - predicted) < 0.1;
  report("C09", "resolution-mtf", ok,
         fmt("contrast: 78 um period %.3f (oracle %.3f), 19.5 um period %.2e",
             coarse, predicted, fine));
}

// --------------------------------------------------------------------------
// C10: at the dark fringe the scattering metal reads brighter than silicon
// in a single noiseless frame; at the bright fringe the ordering inverts.
// --------------------------------------------------------------------------
void c10_phase_slices() {
  const OpticalConfig optics = flat_optics();
  ChipLayout layout = default_chip_layout(48 * 3.0, 48 * 3.0);
  SampleMap chip = gen_chip_contacts(layout, 48, 48, 3.0);
  SpeckleModel speckle;
  speckle.seed = 1010;
  speckle.grain_size = 9.0;
  chip = apply_speckle(chip, speckle, optics.lambda_idler);

  auto region_means = [&](double z) {
    const Frame f = render_frame(chip, optics, z, 1000.0);
    double metal = 0.0, silicon = 0.0;
    std::size_t nm = 0, ns = 0;
    for (int y = 0; y < chip.height; ++y) {
      for (int x = 0; x < chip.width; ++x) {
        if (chip.scatter.at(x, y)) {
          metal += f.at(x, y);
          ++nm;
        } else {
          silicon += f.at(x, y);
          ++ns;
        }
      }
    }
    return std::pair<double, double>(metal / nm, silicon / ns);
  };

  // phi = phi_ref - 4 pi z / lambda: pi at a quarter wavelength, 0 at z = 0
  const auto [metal_dark, si_dark] = region_means(optics.lambda_idler / 4.0);
  const auto [metal_bright, si_bright] = region_means(0.0);
  const bool ok = metal_dark > si_dark && metal_bright < si_bright;
  report("C10", "dark-fringe-slice", ok,
         fmt("dark: metal %.0f vs Si %.0f; bright: metal %.0f vs Si %.0f",
             metal_dark, si_dark, metal_bright, si_bright));
}

// --------------------------------------------------------------------------
// C11: identical seeds reproduce every pipeline artifact byte for byte.
// --------------------------------------------------------------------------
int run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = "'" + cli + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void c11_reproducibility() {
  const char* cli = std::getenv("NLI_CLI");
  if (cli == nullptr) {
    report("C11", "reproducibility", false,
           "NLI_CLI is not set; run through ctest or export NLI_CLI");
    return;
  }
  SplitMix64 g(fnv1a64("acceptance") ^ static_cast<std::uint64_t>(::getpid()));
  const fs::path root = fs::temp_directory_path() /
                        ("nli_accept_" + std::to_string(g.next() >> 32));

  auto pipeline = [&](const fs::path& dir) -> bool {
    fs::create_directories(dir);
    const std::string chip = (dir / "chip.nls").string();
    const std::string stack = (dir / "stack").string();
    const std::string maps = (dir / "maps").string();
    const std::string study = (dir / "study").string();
    if (run_cli(cli, "target --type chip --width 48 --height 48 --seed 7 --quiet --out " +
                         chip) != 0) return false;
    if (run_cli(cli, "simulate --sample " + chip +
                         " --frames 16 --seed 7 --quiet --out " + stack) != 0) return false;
    if (run_cli(cli, "reconstruct --stack " + stack +
                         " --mode variance,phase --quiet --out " + maps) != 0) return false;
    if (run_cli(cli, "truncate --stack " + stack +
                         " --continuous 8 --random 4,2 --repeats 5 --seed 7 --quiet --out " +
                         study) != 0) return false;
    return true;
  };

  bool ok = pipeline(root / "a") && pipeline(root / "b");
  std::string detail = ok ? "" : "a pipeline run failed";
  if (ok) {
    for (const char* rel :
         {"chip.nls", "stack/frames.bin", "maps/variance.pgm", "maps/variance.csv",
          "maps/phase.pgm", "maps/phase.csv", "study/report.json", "study/report.csv"}) {
      const std::string a = read_file_bytes(root / "a" / rel);
      const std::string b = read_file_bytes(root / "b" / rel);
      if (a != b || a.empty()) {
        ok = false;
        detail = fmt("%s differs between identical runs", rel);
        break;
      }
    }
  }
  if (ok) detail = "target/simulate/reconstruct/truncate artifacts byte-identical";
  std::error_code ec;
  fs::remove_all(root, ec);
  report("C11", "reproducibility", ok, detail);
}

}  // namespace

int main() {
  c1_energy_conservation();
  c2_std_constant();
  c3_variance_ratio();
  c4_scan_phase_anchor();
  c5_acquisition_time();
  c6_streaming_variance();
  c7_fringe_fit();
  c8_truncation_trend();
  c9_resolution();
  c10_phase_slices();
  c11_reproducibility();

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all 11 criteria passed\n");
  return 0;
}
