#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace nli {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Error taxonomy. The CLI maps these onto exit codes:
//   ValueError -> 2 (bad arguments), IoError -> 3 (bad input data),
//   NumericError -> 4 (internal numeric failure).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValueError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct NumericError : Error {
  using Error::Error;
};
// Thrown by the fringe fitter when the design matrix is singular, e.g. all
// scan positions coincide modulo half the probe wavelength.
struct RankDeficientFit : NumericError {
  using NumericError::NumericError;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValueError(msg);
}

/// Wraps an angle to (-pi, pi].
inline double wrap_phase(double phi) {
  double r = std::remainder(phi, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

/// Runs fn(begin, end) over disjoint chunks of [0, n). threads <= 1 (or a
/// small n) degrades to a single direct call on the calling thread.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t workers = threads <= 1 ? 1 : static_cast<std::size_t>(threads);
  workers = std::min(workers, n);
  if (workers <= 1 || n < 2) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace nli
