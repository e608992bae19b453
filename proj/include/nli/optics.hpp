#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "nli/common.hpp"

namespace nli {

/// Down-conversion and interferometer geometry. Wavelengths in nm, focal
/// lengths in mm, the point-spread FWHM in um at the object plane.
///
/// phi_ref lumps the pump and reference-arm phase into one constant: during a
/// sample scan only the total phase difference matters, and the mirror arm
/// never moves.
struct OpticalConfig {
  double lambda_pump = 532.0;
  double lambda_signal = 810.0;
  double lambda_idler = 1550.0719424460433;
  double mu = 1.0;        // normalized first-order correlation magnitude
  double phi_ref = 0.0;   // rad
  double f1 = 75.0;
  double f2 = 75.0;
  double f3 = 25.0;
  double resolution_fwhm = 39.0;
  double magnification = 25.0 / 75.0;
  double immersion_index = 1.0;

  void validate() const {
    require(lambda_pump > 0 && lambda_signal > 0 && lambda_idler > 0,
            "wavelengths must be positive");
    require(lambda_pump < lambda_signal && lambda_signal < lambda_idler,
            "expected lambda_pump < lambda_signal < lambda_idler");
    const double residual =
        std::fabs(1.0 / lambda_pump - 1.0 / lambda_signal - 1.0 / lambda_idler);
    require(residual <= 1e-4, "wavelengths violate energy conservation");
    require(mu >= 0.0 && mu <= 1.0, "mu must lie in [0,1]");
    require(f1 > 0 && f2 > 0 && f3 > 0, "focal lengths must be positive");
    require(resolution_fwhm > 0, "resolution_fwhm must be positive");
    require(magnification > 0, "magnification must be positive");
    require(immersion_index >= 1.0, "immersion_index must be >= 1");
  }

  /// Stock configuration of the instrument this models: 532 nm pump,
  /// 810 nm detection, probe wavelength from energy conservation. The
  /// objective lens f3 sets resolution and scale; 25 mm gives 39 um FWHM
  /// and the resolution scales down with f3.
  static OpticalConfig nominal(double f3_mm = 25.0, double immersion = 1.0) {
    OpticalConfig c;
    c.f3 = f3_mm;
    c.resolution_fwhm = 39.0 * f3_mm / 25.0;
    c.immersion_index = immersion;
    c.magnification = (f3_mm / c.f1) * immersion;
    c.validate();
    return c;
  }
};

/// Piezo scan of the sample along the beam axis. Positions in nm, exposure
/// per frame in ms.
struct ScanPlan {
  double z_start = 0.0;
  double z_step = 20.0;
  int n_frames = 78;
  double exposure = 300.0;

  void validate() const {
    require(n_frames >= 1, "n_frames must be >= 1");
    require(z_step >= 0.0, "z_step must be non-negative");
    require(z_step > 0.0 || n_frames == 1, "z_step 0 requires a single frame");
    require(exposure >= 0.0, "exposure must be non-negative");
  }
};

/// Probe wavelength from energy conservation: 1/lp = 1/ls + 1/li.
inline double idler_wavelength(double lambda_pump, double lambda_signal) {
  require(lambda_pump > 0, "pump wavelength must be positive");
  require(lambda_signal > lambda_pump,
          "signal wavelength must exceed the pump wavelength");
  return 1.0 / (1.0 / lambda_pump - 1.0 / lambda_signal);
}

/// Round-trip interferometric phase of a reflection at depth z: moving the
/// sample by half a wavelength advances the phase by a full cycle, so a
/// travel of one wavelength spans two fringe periods.
inline double phase_from_z(double z_nm, double lambda_idler_nm, double phi0) {
  require(lambda_idler_nm > 0, "wavelength must be positive");
  return phi0 + 2.0 * kTwoPi * z_nm / lambda_idler_nm;
}

inline std::vector<double> scan_positions(const ScanPlan& plan) {
  plan.validate();
  std::vector<double> z(static_cast<std::size_t>(plan.n_frames));
  for (int k = 0; k < plan.n_frames; ++k) z[static_cast<std::size_t>(k)] = plan.z_start + k * plan.z_step;
  return z;
}

/// Total acquisition time in seconds for a scan of n frames.
inline double acquisition_time(int n_frames, double exposure_ms) {
  require(n_frames >= 0, "frame count must be non-negative");
  require(exposure_ms >= 0, "exposure must be non-negative");
  return static_cast<double>(n_frames) * exposure_ms / 1000.0;
}

inline void to_json(nlohmann::json& j, const OpticalConfig& c) {
  j = nlohmann::json{{"lambda_pump", c.lambda_pump},
                     {"lambda_signal", c.lambda_signal},
                     {"lambda_idler", c.lambda_idler},
                     {"mu", c.mu},
                     {"phi_ref", c.phi_ref},
                     {"f1", c.f1},
                     {"f2", c.f2},
                     {"f3", c.f3},
                     {"resolution_fwhm", c.resolution_fwhm},
                     {"magnification", c.magnification},
                     {"immersion_index", c.immersion_index}};
}

inline void from_json(const nlohmann::json& j, OpticalConfig& c) {
  j.at("lambda_pump").get_to(c.lambda_pump);
  j.at("lambda_signal").get_to(c.lambda_signal);
  j.at("lambda_idler").get_to(c.lambda_idler);
  j.at("mu").get_to(c.mu);
  j.at("phi_ref").get_to(c.phi_ref);
  j.at("f1").get_to(c.f1);
  j.at("f2").get_to(c.f2);
  j.at("f3").get_to(c.f3);
  j.at("resolution_fwhm").get_to(c.resolution_fwhm);
  j.at("magnification").get_to(c.magnification);
  c.immersion_index = j.value("immersion_index", 1.0);
}

inline void to_json(nlohmann::json& j, const ScanPlan& p) {
  j = nlohmann::json{{"z_start", p.z_start},
                     {"z_step", p.z_step},
                     {"n_frames", p.n_frames},
                     {"exposure", p.exposure}};
}

inline void from_json(const nlohmann::json& j, ScanPlan& p) {
  j.at("z_start").get_to(p.z_start);
  j.at("z_step").get_to(p.z_step);
  j.at("n_frames").get_to(p.n_frames);
  j.at("exposure").get_to(p.exposure);
}

}  // namespace nli
