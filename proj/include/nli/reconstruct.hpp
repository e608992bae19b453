#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "nli/common.hpp"
#include "nli/forward.hpp"

namespace nli {

enum class ImageKind { mean, variance, std, visibility, reflectivity, phase };

inline const char* to_string(ImageKind k) {
  switch (k) {
    case ImageKind::mean: return "mean";
    case ImageKind::variance: return "variance";
    case ImageKind::std: return "std";
    case ImageKind::visibility: return "visibility";
    case ImageKind::reflectivity: return "reflectivity";
    case ImageKind::phase: return "phase";
  }
  return "unknown";
}

inline ImageKind image_kind_from_string(const std::string& s) {
  if (s == "mean") return ImageKind::mean;
  if (s == "variance") return ImageKind::variance;
  if (s == "std") return ImageKind::std;
  if (s == "visibility") return ImageKind::visibility;
  if (s == "reflectivity") return ImageKind::reflectivity;
  if (s == "phase") return ImageKind::phase;
  throw ValueError("unknown image kind: " + s);
}

/// A reconstructed per-pixel map with its provenance. flags marks pixels
/// whose value is not trustworthy (near-zero mean under normalization, fringe
/// amplitude under the floor, or estimator output clamped to its physical
/// range).
struct ScalarImage {
  int width = 0;
  int height = 0;
  std::vector<double> values;
  ImageKind kind = ImageKind::mean;
  std::string source;
  int frames_used = 0;
  bool normalized = false;
  std::vector<std::uint8_t> flags;
  std::int64_t flagged_count = 0;

  ScalarImage() = default;
  ScalarImage(int w, int h, ImageKind k)
      : width(w), height(h),
        values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0.0), kind(k),
        flags(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0) {
    require(w > 0 && h > 0, "image dimensions must be positive");
  }

  std::size_t size() const { return values.size(); }
  double& at(int x, int y) { return values[idx(x, y)]; }
  double at(int x, int y) const { return values[idx(x, y)]; }
  std::uint8_t& flag_at(int x, int y) { return flags[idx(x, y)]; }

 private:
  std::size_t idx(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }
};

struct VarianceOptions {
  bool normalized = true;
  // Pixels whose mean falls below mean_epsilon_rel * (global stack mean) give
  // a normalized variance of 0 and are flagged instead of dividing by ~0.
  double mean_epsilon_rel = 1e-9;
  int threads = 1;
};

/// Per-pixel arithmetic mean over the scan.
inline ScalarImage mean_image(const FrameStack& stack) {
  stack.validate();
  ScalarImage img(stack.width(), stack.height(), ImageKind::mean);
  img.source = stack.sample_id;
  img.frames_used = stack.count();
  const std::size_t npx = img.size();
  for (const Frame& f : stack.frames) {
    for (std::size_t i = 0; i < npx; ++i) img.values[i] += f[i];
  }
  const double inv = 1.0 / stack.count();
  for (double& v : img.values) v *= inv;
  return img;
}

/// Per-pixel population variance of the scan, computed in a single streaming
/// pass (Welford). With normalized set, each pixel's trace is referred to its
/// own mean first, which for a fringe of visibility V gives V^2/2 over an
/// integer number of periods.
inline ScalarImage variance_image(const FrameStack& stack,
                                  const VarianceOptions& opts = {}) {
  stack.validate();
  require(stack.count() >= 2, "variance needs at least two frames");

  const std::size_t npx =
      static_cast<std::size_t>(stack.width()) * static_cast<std::size_t>(stack.height());
  std::vector<double> mean(npx, 0.0);
  std::vector<double> m2(npx, 0.0);

  const int n = stack.count();
  parallel_for(npx, opts.threads, [&](std::size_t begin, std::size_t end) {
    for (int k = 0; k < n; ++k) {
      const auto& vals = stack.frames[static_cast<std::size_t>(k)].values();
      const double inv_n = 1.0 / (k + 1);
      for (std::size_t i = begin; i < end; ++i) {
        const double x = vals[i];
        const double d = x - mean[i];
        mean[i] += d * inv_n;
        m2[i] += d * (x - mean[i]);
      }
    }
  });

  double global_mean = 0.0;
  for (std::size_t i = 0; i < npx; ++i) global_mean += mean[i];
  global_mean /= static_cast<double>(npx);
  const double eps = opts.mean_epsilon_rel * global_mean;

  ScalarImage img(stack.width(), stack.height(), ImageKind::variance);
  img.source = stack.sample_id;
  img.frames_used = n;
  img.normalized = opts.normalized;
  for (std::size_t i = 0; i < npx; ++i) {
    const double var = m2[i] / n;
    if (!opts.normalized) {
      img.values[i] = var;
    } else if (mean[i] > eps) {
      img.values[i] = var / (mean[i] * mean[i]);
    } else {
      img.values[i] = 0.0;
      img.flags[i] = 1;
      ++img.flagged_count;
    }
  }
  return img;
}

/// Element-wise square root of the variance image (the fringe STD map).
inline ScalarImage std_image(const FrameStack& stack, const VarianceOptions& opts = {}) {
  ScalarImage img = variance_image(stack, opts);
  img.kind = ImageKind::std;
  for (double& v : img.values) v = std::sqrt(v);
  return img;
}

/// Fringe visibility map: sqrt(2) times the normalized STD, clamped to [0,1].
/// Valid when the scan spans at least one full fringe period.
inline ScalarImage visibility_image(const FrameStack& stack, int threads = 1) {
  VarianceOptions opts;
  opts.normalized = true;
  opts.threads = threads;
  ScalarImage img = std_image(stack, opts);
  img.kind = ImageKind::visibility;
  const double root2 = std::sqrt(2.0);
  for (std::size_t i = 0; i < img.size(); ++i) {
    double v = root2 * img.values[i];
    if (v > 1.0) {
      v = 1.0;
      if (!img.flags[i]) {
        img.flags[i] = 1;
        ++img.flagged_count;
      }
    }
    img.values[i] = v;
  }
  return img;
}

/// Intensity reflectivity map: inverts the visibility for the assumed
/// transmission and correlation, R = (V / (mu * tau^2))^2, clamped to [0,1].
inline ScalarImage reflectivity_image(const FrameStack& stack, double tau_assumed,
                                      double mu_assumed, int threads = 1) {
  require(tau_assumed > 0.0 && tau_assumed <= 1.0, "tau_assumed must lie in (0,1]");
  require(mu_assumed > 0.0 && mu_assumed <= 1.0, "mu_assumed must lie in (0,1]");
  ScalarImage img = visibility_image(stack, threads);
  img.kind = ImageKind::reflectivity;
  const double scale = 1.0 / (mu_assumed * tau_assumed * tau_assumed);
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double amp = img.values[i] * scale;  // recovered |r|
    double rr = amp * amp;
    if (rr > 1.0) {
      rr = 1.0;
      if (!img.flags[i]) {
        img.flags[i] = 1;
        ++img.flagged_count;
      }
    }
    img.values[i] = rr;
  }
  return img;
}

/// Result of a known-frequency cosine fit to one pixel trace.
struct FringeFit {
  double amplitude = 0.0;    // counts
  double phase = 0.0;        // rad, in (-pi, pi]
  double offset = 0.0;       // counts
  double rms_residual = 0.0; // counts
};

namespace detail {

/// Shared least-squares machinery for one z grid: basis values and the
/// inverted 3x3 normal matrix of the model a + b cos(x) + c sin(x) with
/// x = 4*pi*z/lambda. The fit is linear because the fringe frequency is fixed
/// by the wavelength.
struct FringeDesign {
  std::vector<double> c, s;
  double inv[3][3] = {};

  FringeDesign(const std::vector<double>& z_nm, double lambda_nm) {
    require(lambda_nm > 0, "wavelength must be positive");
    if (z_nm.size() < 3) {
      throw RankDeficientFit("fringe fit needs at least 3 frames");
    }
    const std::size_t n = z_nm.size();
    c.resize(n);
    s.resize(n);
    double sc = 0, ss = 0, scc = 0, sss = 0, scs = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double x = 2.0 * kTwoPi * z_nm[k] / lambda_nm;
      c[k] = std::cos(x);
      s[k] = std::sin(x);
      sc += c[k];
      ss += s[k];
      scc += c[k] * c[k];
      sss += s[k] * s[k];
      scs += c[k] * s[k];
    }
    const double nn = static_cast<double>(n);
    const double m[3][3] = {{nn, sc, ss}, {sc, scc, scs}, {ss, scs, sss}};
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if (std::fabs(det) < 1e-10 * nn * nn * nn) {
      throw RankDeficientFit(
          "fringe fit design is rank deficient: scan positions cover fewer than "
          "3 distinct phases");
    }
    const double id = 1.0 / det;
    inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * id;
    inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * id;
    inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * id;
    inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * id;
    inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * id;
    inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * id;
    inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * id;
    inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * id;
    inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * id;
  }

  template <typename Trace>
  FringeFit fit(const Trace& y) const {
    const std::size_t n = c.size();
    double sy = 0, syc = 0, sys = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double v = y[k];
      sy += v;
      syc += v * c[k];
      sys += v * s[k];
    }
    const double a = inv[0][0] * sy + inv[0][1] * syc + inv[0][2] * sys;
    const double b = inv[1][0] * sy + inv[1][1] * syc + inv[1][2] * sys;
    const double cc = inv[2][0] * sy + inv[2][1] * syc + inv[2][2] * sys;
    double ssr = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = y[k] - (a + b * c[k] + cc * s[k]);
      ssr += r * r;
    }
    FringeFit out;
    out.offset = a;
    out.amplitude = std::hypot(b, cc);
    // a + b cos x + c sin x == offset + amplitude * cos(x + phase)
    out.phase = out.amplitude > 0.0 ? wrap_phase(std::atan2(-cc, b)) : 0.0;
    out.rms_residual = std::sqrt(ssr / static_cast<double>(n));
    return out;
  }
};

}  // namespace detail

/// Least-squares cosine fit of one pixel trace at the known fringe frequency.
/// Rejects scans that do not reach 3 distinct phases (RankDeficientFit).
inline FringeFit fit_fringe(const std::vector<double>& trace,
                            const std::vector<double>& z_positions_nm,
                            double lambda_idler_nm) {
  require(trace.size() == z_positions_nm.size(), "trace/z length mismatch");
  detail::FringeDesign design(z_positions_nm, lambda_idler_nm);
  return design.fit(trace);
}

struct PhaseMapOptions {
  // A pixel is flagged undefined (value 0) when its fitted fringe amplitude
  // falls below max(amplitude_floor, amplitude_floor_rel * global mean).
  double amplitude_floor = 0.0;
  double amplitude_floor_rel = 1e-6;
  int threads = 1;
};

/// Fitted fringe phase per pixel, wrapped to (-pi, pi].
inline ScalarImage phase_map(const FrameStack& stack, double lambda_idler_nm,
                             const PhaseMapOptions& opts = {}) {
  stack.validate();
  detail::FringeDesign design(stack.z_positions, lambda_idler_nm);

  double global_mean = 0.0;
  for (const Frame& f : stack.frames) {
    for (double v : f.values()) global_mean += v;
  }
  global_mean /= static_cast<double>(stack.frames.size()) * static_cast<double>(stack.frames.front().size());
  const double floor = std::max(opts.amplitude_floor, opts.amplitude_floor_rel * global_mean);

  ScalarImage img(stack.width(), stack.height(), ImageKind::phase);
  img.source = stack.sample_id;
  img.frames_used = stack.count();
  const std::size_t npx = img.size();
  const std::size_t n = stack.frames.size();

  parallel_for(npx, opts.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> trace(n);
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t k = 0; k < n; ++k) trace[k] = stack.frames[k][i];
      const FringeFit fit = design.fit(trace);
      if (fit.amplitude < floor) {
        img.values[i] = 0.0;
        img.flags[i] = 1;
      } else {
        img.values[i] = fit.phase;
      }
    }
  });
  for (std::uint8_t f : img.flags) img.flagged_count += f ? 1 : 0;
  return img;
}

/// Expected multiplicative bias of the normalized variance for an arbitrary
/// z grid, relative to the integer-period value V^2/2, averaged over the
/// unknown fringe phase: 1 - |sum_k exp(i*4*pi*z_k/lambda)|^2 / N^2. Equals 1
/// for integer-period sampling and drops below 1 for truncated scans.
inline double expected_variance_bias(const std::vector<double>& z_positions_nm,
                                     double lambda_idler_nm) {
  require(lambda_idler_nm > 0, "wavelength must be positive");
  require(!z_positions_nm.empty(), "empty scan");
  std::complex<double> s1(0.0, 0.0);
  for (double z : z_positions_nm) {
    const double x = 2.0 * kTwoPi * z / lambda_idler_nm;
    s1 += std::complex<double>(std::cos(x), std::sin(x));
  }
  const double n = static_cast<double>(z_positions_nm.size());
  return 1.0 - std::norm(s1) / (n * n);
}

}  // namespace nli
