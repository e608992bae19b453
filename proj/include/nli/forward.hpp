#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nli/common.hpp"
#include "nli/optics.hpp"
#include "nli/plane.hpp"
#include "nli/rng.hpp"
#include "nli/sample.hpp"

namespace nli {

/// One camera exposure, in detector counts. Values are kept at double
/// precision in memory so downstream estimators are limited by the data, not
/// the carrier; after quantization they are whole numbers in [0, 65535].
using Frame = Plane<double>;

/// Camera model. mean_counts is the expected count level of the interference
/// offset (the intensity at zero visibility); shot noise is Poisson at the
/// per-pixel expectation, read noise additive Gaussian, quantization clamps
/// and rounds to 16 bits.
struct NoiseModel {
  double mean_counts = 1000.0;
  bool shot_noise = true;
  double read_noise_sigma = 2.0;
  bool quantize = true;
  std::uint64_t seed = 0;

  void validate() const {
    require(mean_counts > 0, "mean_counts must be positive");
    require(read_noise_sigma >= 0, "read noise sigma must be non-negative");
  }

  /// Noise-free rendering at the given count level.
  static NoiseModel none(double counts = 1000.0) {
    NoiseModel n;
    n.mean_counts = counts;
    n.shot_noise = false;
    n.read_noise_sigma = 0.0;
    n.quantize = false;
    return n;
  }
};

/// An ordered scan of interference frames with their z positions.
///
/// plan is present on freshly rendered stacks; frame subsets (whose spacing
/// is no longer arithmetic) drop it but keep the per-frame exposure so
/// acquisition accounting survives subsetting.
struct FrameStack {
  std::vector<Frame> frames;
  std::vector<double> z_positions;  // nm, one per frame
  OpticalConfig optics;
  std::optional<ScanPlan> plan;
  double exposure_ms = 300.0;
  std::uint64_t seed = 0;
  std::string sample_id;
  bool quantized = false;

  int count() const { return static_cast<int>(frames.size()); }
  int width() const { return frames.empty() ? 0 : frames.front().width(); }
  int height() const { return frames.empty() ? 0 : frames.front().height(); }

  double acquisition_seconds() const { return acquisition_time(count(), exposure_ms); }

  void validate() const {
    require(!frames.empty(), "stack has no frames");
    require(frames.size() == z_positions.size(), "frame/z count mismatch");
    if (plan) {
      plan->validate();
      require(static_cast<int>(frames.size()) == plan->n_frames,
              "frame count does not match the scan plan");
    }
    for (const Frame& f : frames) {
      require(f.width() == width() && f.height() == height(),
              "frames must share one shape");
    }
    optics.validate();
  }
};

/// Interference intensity of one pixel: i0 * (1 + mu * tau^2 * r * cos(phi)).
/// The modulation depth mu*tau^2*r is the fringe visibility, so the result
/// stays within [0, 2*i0].
inline double pixel_intensity(double r, double tau, double mu, double phi_total,
                              double i0) {
  require(r >= 0.0 && r <= 1.0, "r out of [0,1]");
  require(tau >= 0.0 && tau <= 1.0, "tau out of [0,1]");
  require(mu >= 0.0 && mu <= 1.0, "mu out of [0,1]");
  require(i0 > 0.0, "i0 must be positive");
  return i0 * (1.0 + mu * tau * tau * r * std::cos(phi_total));
}

namespace detail {
// Assumes sample/optics already validated.
inline Frame render_frame_impl(const SampleMap& sample, const OpticalConfig& optics,
                               double z_nm, double i0) {
  Frame f(sample.width, sample.height);
  const double k = 2.0 * kTwoPi / optics.lambda_idler;
  for (int y = 0; y < sample.height; ++y) {
    for (int x = 0; x < sample.width; ++x) {
      const double depth = z_nm + sample.height_nm.at(x, y);
      const double phi = optics.phi_ref - k * depth;
      const double tau = sample.tau.at(x, y);
      const double vis = optics.mu * tau * tau * sample.r.at(x, y);
      f.at(x, y) = i0 * (1.0 + vis * std::cos(phi));
    }
  }
  return f;
}
}  // namespace detail

/// Noiseless, unblurred frame at sample position z. The per-pixel surface
/// height adds to z inside the phase term only.
inline Frame render_frame(const SampleMap& sample, const OpticalConfig& optics,
                          double z_nm, double i0) {
  sample.validate();
  optics.validate();
  require(i0 > 0.0, "i0 must be positive");
  return detail::render_frame_impl(sample, optics, z_nm, i0);
}

/// Gaussian blur of the given FWHM (um at the object plane), separable, with
/// symmetric edge reflection. The kernel is normalized, so total flux is
/// conserved; fwhm 0 is the identity.
template <typename T>
Plane<T> apply_psf(const Plane<T>& src, double fwhm_um, double pixel_pitch_um) {
  require(fwhm_um >= 0.0, "fwhm must be non-negative");
  require(pixel_pitch_um > 0.0, "pixel pitch must be positive");
  if (fwhm_um == 0.0 || src.empty()) return src;

  const double sigma_px = fwhm_um / (2.0 * std::sqrt(2.0 * std::log(2.0))) / pixel_pitch_um;
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma_px)));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-0.5 * (i / sigma_px) * (i / sigma_px));
    kernel[static_cast<std::size_t>(i + radius)] = w;
    sum += w;
  }
  for (double& w : kernel) w /= sum;

  // Symmetric reflection keeps every tap inside the image; repeated folding
  // covers kernels wider than the image.
  auto reflect = [](int i, int n) {
    while (i < 0 || i >= n) {
      if (i < 0) i = -i - 1;
      if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
  };

  const int w = src.width();
  const int h = src.height();
  Plane<double> tmp(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[static_cast<std::size_t>(i + radius)] *
               static_cast<double>(src.at(reflect(x + i, w), y));
      }
      tmp.at(x, y) = acc;
    }
  }
  Plane<T> dst(w, h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[static_cast<std::size_t>(i + radius)] * tmp.at(x, reflect(y + i, h));
      }
      dst.at(x, y) = static_cast<T>(acc);
    }
  }
  return dst;
}

namespace detail {
inline void apply_noise(Frame& f, const NoiseModel& noise, std::uint64_t frame_seed) {
  SplitMix64 rng(frame_seed);
  for (double& v : f.values()) {
    double x = v;
    if (noise.shot_noise) x = static_cast<double>(rng.poisson(x));
    if (noise.read_noise_sigma > 0.0) x += noise.read_noise_sigma * rng.normal();
    if (noise.quantize) {
      x = std::clamp(std::round(x), 0.0, 65535.0);
    } else if (x < 0.0) {
      x = 0.0;
    }
    v = x;
  }
}
}  // namespace detail

/// Renders the full scan: one frame per plan position, optional blur of the
/// intensity image, then the camera noise chain. Each frame draws from its
/// own RNG substream keyed by (noise.seed, frame index), so rendering order
/// and parallelism do not change the result.
inline FrameStack render_stack(const SampleMap& sample, const OpticalConfig& optics,
                               const ScanPlan& plan, bool psf_enabled,
                               const NoiseModel& noise, std::string sample_id = "",
                               int threads = 1) {
  sample.validate();
  optics.validate();
  plan.validate();
  noise.validate();

  FrameStack stack;
  stack.z_positions = scan_positions(plan);
  stack.optics = optics;
  stack.plan = plan;
  stack.exposure_ms = plan.exposure;
  stack.seed = noise.seed;
  stack.sample_id = std::move(sample_id);
  stack.quantized = noise.quantize;
  stack.frames.resize(static_cast<std::size_t>(plan.n_frames));

  const bool noisy = noise.shot_noise || noise.read_noise_sigma > 0.0 || noise.quantize;
  parallel_for(static_cast<std::size_t>(plan.n_frames), threads,
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t k = begin; k < end; ++k) {
                   Frame f = detail::render_frame_impl(sample, optics, stack.z_positions[k],
                                                       noise.mean_counts);
                   if (psf_enabled) {
                     f = apply_psf(f, optics.resolution_fwhm, sample.pixel_pitch);
                   }
                   if (noisy) detail::apply_noise(f, noise, derive_seed(noise.seed, k));
                   stack.frames[k] = std::move(f);
                 }
               });
  return stack;
}

}  // namespace nli
