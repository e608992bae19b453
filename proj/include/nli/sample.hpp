#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "nli/common.hpp"
#include "nli/plane.hpp"
#include "nli/rng.hpp"

namespace nli {

/// Per-pixel description of the sample probed by the IR beam.
///
/// r is the amplitude reflectivity, tau the single-pass amplitude
/// transmission towards the reflecting surface (unity for bare samples,
/// below one under a cap), height_nm the surface height added to the scanned
/// z, and scatter marks strongly scattering (metal) regions.
struct SampleMap {
  int width = 0;
  int height = 0;
  double pixel_pitch = 1.0;  // um per pixel at the object plane
  Plane<float> r;
  Plane<float> tau;
  Plane<float> height_nm;
  Plane<std::uint8_t> scatter;
  double immersion_index = 1.0;  // display-scale metadata for through-cap views
  std::uint64_t seed = 0;        // generator seed, 0 when deterministic
  std::string name;

  void validate() const {
    require(width > 0 && height > 0, "sample dimensions must be positive");
    require(pixel_pitch > 0, "pixel_pitch must be positive");
    require(r.width() == width && r.height() == height, "r plane shape mismatch");
    require(r.same_shape(tau) && r.same_shape(height_nm) && r.same_shape(scatter),
            "sample planes must share one shape");
    for (std::size_t i = 0; i < r.size(); ++i) {
      require(r[i] >= 0.0f && r[i] <= 1.0f, "r out of [0,1]");
      require(tau[i] >= 0.0f && tau[i] <= 1.0f, "tau out of [0,1]");
    }
    require(immersion_index >= 1.0, "immersion_index must be >= 1");
  }

  static SampleMap uniform(int width, int height, double pixel_pitch, float r_value,
                           float tau_value = 1.0f) {
    require(width > 0 && height > 0, "sample dimensions must be positive");
    require(pixel_pitch > 0, "pixel_pitch must be positive");
    SampleMap m;
    m.width = width;
    m.height = height;
    m.pixel_pitch = pixel_pitch;
    m.r = Plane<float>(width, height, r_value);
    m.tau = Plane<float>(width, height, tau_value);
    m.height_nm = Plane<float>(width, height, 0.0f);
    m.scatter = Plane<std::uint8_t>(width, height, 0);
    return m;
  }
};

/// Granularity model for scattering metal: a correlated random field knocks
/// the coherent return down and the surface height becomes random at the
/// scale of the probe wavelength.
struct SpeckleModel {
  bool enabled = true;
  double grain_size = 10.0;      // um, correlation length
  double amplitude_floor = 0.1;  // lowest surviving fraction of r
  std::uint64_t seed = 1;

  void validate() const {
    require(grain_size > 0, "grain_size must be positive");
    require(amplitude_floor >= 0.0 && amplitude_floor <= 1.0,
            "amplitude_floor must lie in [0,1]");
  }
};

/// One metal line of a contact layout, in object-plane um.
struct Stroke {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double width = 0;
};

struct ChipLayout {
  std::vector<Stroke> strokes;
  double r_silicon = 0.55;  // amplitude reflectivity of the bare substrate
  double r_metal = 0.10;    // effective coherent return of scattering metal
};

/// Interdigitated contact fingers with top/bottom bus bars; the stock scene
/// for chip imaging runs.
inline ChipLayout default_chip_layout(double width_um, double height_um) {
  require(width_um > 0 && height_um > 0, "layout extent must be positive");
  ChipLayout layout;
  const double margin = 0.06 * std::min(width_um, height_um);
  const double bus_w = 0.05 * height_um;
  const double finger_w = std::max(2.0, 0.03 * width_um);
  const int n_fingers = 7;
  const double y_top = margin + bus_w / 2;
  const double y_bot = height_um - margin - bus_w / 2;
  layout.strokes.push_back({margin, y_top, width_um - margin, y_top, bus_w});
  layout.strokes.push_back({margin, y_bot, width_um - margin, y_bot, bus_w});
  const double span = width_um - 2 * margin - finger_w;
  for (int i = 0; i < n_fingers; ++i) {
    const double x = margin + finger_w / 2 + span * i / (n_fingers - 1);
    const double reach = 0.72 * (y_bot - y_top);
    if (i % 2 == 0) {
      layout.strokes.push_back({x, y_top, x, y_top + reach, finger_w});
    } else {
      layout.strokes.push_back({x, y_bot - reach, x, y_bot, finger_w});
    }
  }
  return layout;
}

/// Bar resolution target: n_bars horizontal reflective bars (r=1) of the
/// given width, separated by equal gaps (r=0), centered on the canvas.
inline SampleMap gen_bar_target(double line_width_um, int n_bars, int width, int height,
                                double pixel_pitch_um) {
  require(line_width_um > 0, "line width must be positive");
  require(n_bars >= 0, "bar count must be non-negative");
  SampleMap m = SampleMap::uniform(width, height, pixel_pitch_um, 0.0f);
  m.name = "bar-target";
  if (n_bars == 0) return m;

  const double pattern_h = (2 * n_bars - 1) * line_width_um;
  const double canvas_h = height * pixel_pitch_um;
  require(pattern_h <= canvas_h, "bar pattern does not fit the canvas height");

  const double y0 = (canvas_h - pattern_h) / 2.0;
  for (int y = 0; y < height; ++y) {
    const double yc = (y + 0.5) * pixel_pitch_um - y0;
    if (yc < 0 || yc >= pattern_h) continue;
    const int band = static_cast<int>(yc / line_width_um);
    if (band % 2 == 0) {
      for (int x = 0; x < width; ++x) m.r.at(x, y) = 1.0f;
    }
  }
  return m;
}

namespace detail {
inline double dist_to_segment(double px, double py, const Stroke& s) {
  const double dx = s.x1 - s.x0;
  const double dy = s.y1 - s.y0;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((px - s.x0) * dx + (py - s.y0) * dy) / len2, 0.0, 1.0);
  const double cx = s.x0 + t * dx;
  const double cy = s.y0 + t * dy;
  return std::hypot(px - cx, py - cy);
}
}  // namespace detail

/// Contact pattern on a silicon substrate: metal strokes are marked as
/// scattering and carry a low effective reflectivity, so they come out darker
/// than the silicon in variance images.
inline SampleMap gen_chip_contacts(const ChipLayout& layout, int width, int height,
                                   double pixel_pitch_um) {
  require(width > 0 && height > 0, "canvas must have non-zero area");
  require(layout.r_silicon >= 0 && layout.r_silicon <= 1, "r_silicon out of [0,1]");
  require(layout.r_metal >= 0 && layout.r_metal <= 1, "r_metal out of [0,1]");
  const double w_um = width * pixel_pitch_um;
  const double h_um = height * pixel_pitch_um;
  for (const Stroke& s : layout.strokes) {
    require(s.width > 0, "stroke width must be positive");
    require(s.x0 >= 0 && s.x0 <= w_um && s.x1 >= 0 && s.x1 <= w_um && s.y0 >= 0 &&
                s.y0 <= h_um && s.y1 >= 0 && s.y1 <= h_um,
            "stroke endpoints must lie within the canvas");
  }

  SampleMap m = SampleMap::uniform(width, height, pixel_pitch_um,
                                   static_cast<float>(layout.r_silicon));
  m.name = "chip-contacts";
  for (int y = 0; y < height; ++y) {
    const double py = (y + 0.5) * pixel_pitch_um;
    for (int x = 0; x < width; ++x) {
      const double px = (x + 0.5) * pixel_pitch_um;
      for (const Stroke& s : layout.strokes) {
        if (detail::dist_to_segment(px, py, s) <= s.width / 2.0) {
          m.r.at(x, y) = static_cast<float>(layout.r_metal);
          m.scatter.at(x, y) = 1;
          break;
        }
      }
    }
  }
  return m;
}

/// Puts a partially transmitting cap over a sample: tau scales everywhere,
/// the surface bows parabolically (peak at the center, sagging bend_sag_nm
/// towards the corners), and the immersion index is recorded for display
/// scaling.
inline SampleMap gen_capped_chip(const SampleMap& base, double cap_transmission,
                                 double bend_sag_nm, double immersion_index) {
  base.validate();
  require(cap_transmission >= 0.0 && cap_transmission <= 1.0,
          "cap transmission must lie in [0,1]");
  require(bend_sag_nm >= 0.0, "bend sag must be non-negative");
  require(immersion_index >= 1.0, "immersion_index must be >= 1");

  SampleMap m = base;
  m.name = base.name.empty() ? "capped" : base.name + "-capped";
  m.immersion_index = immersion_index;
  for (std::size_t i = 0; i < m.tau.size(); ++i) {
    m.tau[i] = static_cast<float>(m.tau[i] * cap_transmission);
  }
  if (bend_sag_nm > 0.0) {
    for (int y = 0; y < m.height; ++y) {
      const double v = m.height > 1 ? 2.0 * y / (m.height - 1) - 1.0 : 0.0;
      for (int x = 0; x < m.width; ++x) {
        const double u = m.width > 1 ? 2.0 * x / (m.width - 1) - 1.0 : 0.0;
        const double bow = bend_sag_nm * (1.0 - (u * u + v * v) / 2.0);
        m.height_nm.at(x, y) = static_cast<float>(m.height_nm.at(x, y) + bow);
      }
    }
  }
  return m;
}

namespace detail {
inline double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

/// Value noise in [0,1): random lattice values at grain_size spacing,
/// smoothly interpolated. Deterministic in (seed, position).
inline double value_noise(std::uint64_t seed, double u, double v) {
  const double fu = std::floor(u);
  const double fv = std::floor(v);
  const auto iu = static_cast<std::int64_t>(fu);
  const auto iv = static_cast<std::int64_t>(fv);
  const double tu = smoothstep(u - fu);
  const double tv = smoothstep(v - fv);
  auto corner = [&](std::int64_t a, std::int64_t b) {
    return static_cast<double>(hash_coords(seed, a, b) >> 11) * 0x1.0p-53;
  };
  const double c00 = corner(iu, iv);
  const double c10 = corner(iu + 1, iv);
  const double c01 = corner(iu, iv + 1);
  const double c11 = corner(iu + 1, iv + 1);
  const double top = c00 + (c10 - c00) * tu;
  const double bot = c01 + (c11 - c01) * tu;
  return top + (bot - top) * tv;
}
}  // namespace detail

/// Applies granularity to scattering regions only: r is multiplied by a
/// correlated field in [amplitude_floor, 1] and the surface height gains a
/// uniform random offset spanning half the probe wavelength, which fully
/// randomizes the fringe phase. Pixels outside scatter are untouched.
inline SampleMap apply_speckle(const SampleMap& map, const SpeckleModel& model,
                               double lambda_idler_nm) {
  map.validate();
  model.validate();
  require(lambda_idler_nm > 0, "wavelength must be positive");
  if (!model.enabled) return map;
  require(model.grain_size >= map.pixel_pitch,
          "speckle grain must be at least one pixel");

  SampleMap m = map;
  m.seed = model.seed;
  const std::uint64_t amp_seed = derive_seed(model.seed, 0);
  const std::uint64_t height_seed = derive_seed(model.seed, 1);
  const double inv_grain = 1.0 / model.grain_size;
  const double height_span = lambda_idler_nm / 2.0;
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      if (!m.scatter.at(x, y)) continue;
      const double u = (x + 0.5) * map.pixel_pitch * inv_grain;
      const double v = (y + 0.5) * map.pixel_pitch * inv_grain;
      const double field = detail::value_noise(amp_seed, u, v);
      const double s = model.amplitude_floor + (1.0 - model.amplitude_floor) * field;
      m.r.at(x, y) = static_cast<float>(m.r.at(x, y) * s);
      const double h =
          static_cast<double>(hash_coords(height_seed, x, y) >> 11) * 0x1.0p-53;
      m.height_nm.at(x, y) = static_cast<float>(m.height_nm.at(x, y) + h * height_span);
    }
  }
  return m;
}

}  // namespace nli
