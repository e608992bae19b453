#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nli/common.hpp"
#include "nli/forward.hpp"
#include "nli/reconstruct.hpp"
#include "nli/rng.hpp"

namespace nli {

/// How to pick a frame subset out of a full scan: the first n frames
/// (continuous), every (gap+1)-th frame (gapped), or k frames drawn at
/// random without replacement (random, seeded).
struct SelectionSpec {
  enum class Strategy { continuous, gapped, random };

  Strategy strategy = Strategy::continuous;
  int n = 0;
  int gap = 0;
  int k = 0;
  std::uint64_t seed = 0;

  static SelectionSpec make_continuous(int n) {
    SelectionSpec s;
    s.strategy = Strategy::continuous;
    s.n = n;
    s.validate();
    return s;
  }
  static SelectionSpec make_gapped(int gap) {
    SelectionSpec s;
    s.strategy = Strategy::gapped;
    s.gap = gap;
    s.validate();
    return s;
  }
  static SelectionSpec make_random(int k, std::uint64_t seed) {
    SelectionSpec s;
    s.strategy = Strategy::random;
    s.k = k;
    s.seed = seed;
    s.validate();
    return s;
  }

  void validate() const {
    switch (strategy) {
      case Strategy::continuous:
        require(n >= 1, "continuous selection needs n >= 1");
        break;
      case Strategy::gapped:
        require(gap >= 1, "gapped selection needs gap >= 1");
        break;
      case Strategy::random:
        require(k >= 1, "random selection needs k >= 1");
        break;
    }
  }

  std::string label() const {
    switch (strategy) {
      case Strategy::continuous: return "continuous-" + std::to_string(n);
      case Strategy::gapped: return "gapped-" + std::to_string(gap);
      case Strategy::random: return "random-" + std::to_string(k);
    }
    return "?";
  }

  const char* strategy_name() const {
    switch (strategy) {
      case Strategy::continuous: return "continuous";
      case Strategy::gapped: return "gapped";
      case Strategy::random: return "random";
    }
    return "?";
  }
};

/// Frame indices kept by a selection, ascending.
inline std::vector<int> selection_indices(int total_frames, const SelectionSpec& spec) {
  spec.validate();
  require(total_frames >= 1, "empty stack");
  std::vector<int> idx;
  switch (spec.strategy) {
    case SelectionSpec::Strategy::continuous: {
      require(spec.n <= total_frames, "continuous selection exceeds available frames");
      idx.resize(static_cast<std::size_t>(spec.n));
      std::iota(idx.begin(), idx.end(), 0);
      break;
    }
    case SelectionSpec::Strategy::gapped: {
      for (int i = 0; i < total_frames; i += spec.gap + 1) idx.push_back(i);
      break;
    }
    case SelectionSpec::Strategy::random: {
      require(spec.k <= total_frames, "random selection exceeds available frames");
      std::vector<int> pool(static_cast<std::size_t>(total_frames));
      std::iota(pool.begin(), pool.end(), 0);
      SplitMix64 rng(spec.seed);
      for (int i = 0; i < spec.k; ++i) {
        const auto j =
            i + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(total_frames - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
      }
      idx.assign(pool.begin(), pool.begin() + spec.k);
      std::sort(idx.begin(), idx.end());
      break;
    }
  }
  return idx;
}

/// Subset of a stack, original frame order and z alignment preserved. The
/// result keeps the source exposure but no scan plan (spacing is generally no
/// longer arithmetic).
inline FrameStack select_frames(const FrameStack& stack, const SelectionSpec& spec) {
  stack.validate();
  const std::vector<int> idx = selection_indices(stack.count(), spec);
  FrameStack out;
  out.optics = stack.optics;
  out.exposure_ms = stack.exposure_ms;
  out.seed = stack.seed;
  out.sample_id = stack.sample_id;
  out.quantized = stack.quantized;
  out.frames.reserve(idx.size());
  out.z_positions.reserve(idx.size());
  for (int i : idx) {
    out.frames.push_back(stack.frames[static_cast<std::size_t>(i)]);
    out.z_positions.push_back(stack.z_positions[static_cast<std::size_t>(i)]);
  }
  return out;
}

/// Frobenius norm: square root of the sum of squared elements.
inline double frobenius_norm(const ScalarImage& image) {
  double acc = 0.0;
  for (double v : image.values) acc += v * v;
  return std::sqrt(acc);
}

/// Frobenius norm of the element-wise difference of two equally sized images.
inline double frobenius_diff(const ScalarImage& a, const ScalarImage& b) {
  require(a.width == b.width && a.height == b.height,
          "image dimensions differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

/// One realized subset reconstruction compared against the full-stack image.
struct TruncationRow {
  std::string label;
  std::string strategy;
  int n = 0, gap = 0, k = 0;
  std::uint64_t seed_used = 0;
  int frames_used = 0;
  double frobenius_diff = 0.0;
  double relative_diff = 0.0;
  double acquisition_seconds = 0.0;
  std::string error;  // empty on success
};

/// Aggregate over the Monte-Carlo repetitions of one spec.
struct TruncationGroup {
  std::string label;
  int realizations = 0;
  double mean_relative_diff = 0.0;
  double std_relative_diff = 0.0;
  double mean_frobenius_diff = 0.0;
};

struct TruncationReport {
  double baseline_norm = 0.0;
  int total_frames = 0;
  double exposure_ms = 0.0;
  bool normalized = true;
  std::vector<TruncationRow> rows;
  std::vector<TruncationGroup> groups;
};

struct StudyOptions {
  bool normalized = true;
  int repeats = 1;  // Monte-Carlo realizations per random spec
  int threads = 1;
};

/// Reconstructs the variance image from each requested subset and reports the
/// Frobenius distance to the full-stack image. Random specs are repeated with
/// derived sub-seeds; failures are recorded per row without aborting the rest.
inline TruncationReport run_truncation_study(const FrameStack& stack,
                                             const std::vector<SelectionSpec>& specs,
                                             const StudyOptions& opts = {}) {
  stack.validate();
  require(opts.repeats >= 1, "repeats must be >= 1");

  VarianceOptions vopts;
  vopts.normalized = opts.normalized;
  vopts.threads = opts.threads;
  const ScalarImage baseline = variance_image(stack, vopts);

  TruncationReport report;
  report.baseline_norm = frobenius_norm(baseline);
  report.total_frames = stack.count();
  report.exposure_ms = stack.exposure_ms;
  report.normalized = opts.normalized;

  for (const SelectionSpec& spec : specs) {
    const int reps = spec.strategy == SelectionSpec::Strategy::random ? opts.repeats : 1;
    std::vector<double> rel_diffs;
    double fro_sum = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      SelectionSpec eff = spec;
      if (reps > 1) eff.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(rep));
      TruncationRow row;
      row.label = spec.label();
      row.strategy = spec.strategy_name();
      row.n = spec.n;
      row.gap = spec.gap;
      row.k = spec.k;
      row.seed_used = eff.seed;
      try {
        const FrameStack subset = select_frames(stack, eff);
        row.frames_used = subset.count();
        row.acquisition_seconds = acquisition_time(subset.count(), stack.exposure_ms);
        const ScalarImage img = variance_image(subset, vopts);
        row.frobenius_diff = frobenius_diff(img, baseline);
        row.relative_diff =
            report.baseline_norm > 0.0 ? row.frobenius_diff / report.baseline_norm : 0.0;
        rel_diffs.push_back(row.relative_diff);
        fro_sum += row.frobenius_diff;
      } catch (const Error& e) {
        row.error = e.what();
      }
      report.rows.push_back(std::move(row));
    }
    if (!rel_diffs.empty()) {
      TruncationGroup g;
      g.label = spec.label();
      g.realizations = static_cast<int>(rel_diffs.size());
      const double n = static_cast<double>(rel_diffs.size());
      const double mean =
          std::accumulate(rel_diffs.begin(), rel_diffs.end(), 0.0) / n;
      double ss = 0.0;
      for (double d : rel_diffs) ss += (d - mean) * (d - mean);
      g.mean_relative_diff = mean;
      g.std_relative_diff = rel_diffs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
      g.mean_frobenius_diff = fro_sum / n;
      report.groups.push_back(std::move(g));
    }
  }
  return report;
}

inline void to_json(nlohmann::json& j, const TruncationRow& r) {
  j = nlohmann::json{{"label", r.label},
                     {"strategy", r.strategy},
                     {"frames_used", r.frames_used},
                     {"frobenius_diff", r.frobenius_diff},
                     {"relative_diff", r.relative_diff},
                     {"acquisition_seconds", r.acquisition_seconds},
                     {"seed", r.seed_used}};
  if (r.strategy == "continuous") j["n"] = r.n;
  if (r.strategy == "gapped") j["gap"] = r.gap;
  if (r.strategy == "random") j["k"] = r.k;
  if (!r.error.empty()) j["error"] = r.error;
}

inline void to_json(nlohmann::json& j, const TruncationGroup& g) {
  j = nlohmann::json{{"label", g.label},
                     {"realizations", g.realizations},
                     {"mean_relative_diff", g.mean_relative_diff},
                     {"std_relative_diff", g.std_relative_diff},
                     {"mean_frobenius_diff", g.mean_frobenius_diff}};
}

inline void to_json(nlohmann::json& j, const TruncationReport& rep) {
  j = nlohmann::json{{"baseline_norm", rep.baseline_norm},
                     {"total_frames", rep.total_frames},
                     {"exposure_ms", rep.exposure_ms},
                     {"normalized", rep.normalized},
                     {"rows", rep.rows},
                     {"groups", rep.groups}};
}

inline void write_report_csv(std::ostream& os, const TruncationReport& rep) {
  os << "label,strategy,frames_used,frobenius_diff,relative_diff,"
        "acquisition_seconds,seed,error\n";
  char buf[512];
  for (const TruncationRow& r : rep.rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%d,%.17g,%.17g,%.17g,%llu,%s\n",
                  r.label.c_str(), r.strategy.c_str(), r.frames_used, r.frobenius_diff,
                  r.relative_diff, r.acquisition_seconds,
                  static_cast<unsigned long long>(r.seed_used), r.error.c_str());
    os << buf;
  }
}

/// Plot-friendly dump: one block per strategy, columns are frames kept, mean
/// and spread of the relative Frobenius difference.
inline void write_report_gnuplot(std::ostream& os, const TruncationReport& rep) {
  os << "# truncation study; baseline Frobenius norm = " << rep.baseline_norm << "\n";
  os << "# columns: frames_used mean_relative_diff std_relative_diff label\n";
  for (const char* strat : {"continuous", "gapped", "random"}) {
    bool any = false;
    for (std::size_t gi = 0; gi < rep.groups.size(); ++gi) {
      const TruncationGroup& g = rep.groups[gi];
      // recover strategy/frames from the first matching row
      for (const TruncationRow& r : rep.rows) {
        if (r.label == g.label && r.strategy == strat && r.error.empty()) {
          if (!any) {
            os << "\n\n# strategy: " << strat << "\n";
            any = true;
          }
          char buf[256];
          std::snprintf(buf, sizeof(buf), "%d %.17g %.17g %s\n", r.frames_used,
                        g.mean_relative_diff, g.std_relative_diff, g.label.c_str());
          os << buf;
          break;
        }
      }
    }
  }
}

}  // namespace nli
