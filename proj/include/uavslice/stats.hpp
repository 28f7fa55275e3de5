#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace uavslice {

struct MeanCi {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double std_error = 0.0;
};

// Normal-approximation 95% interval over independent samples.
inline MeanCi mean_ci95(std::span<const double> xs) {
  MeanCi r;
  if (xs.empty()) return r;
  double sum = 0.0;
  for (double x : xs) sum += x;
  r.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    r.std_error = sd / std::sqrt(static_cast<double>(xs.size()));
  }
  r.ci_low = r.mean - 1.96 * r.std_error;
  r.ci_high = r.mean + 1.96 * r.std_error;
  return r;
}

// out[i] = mean of xs[max(0, i-window+1) .. i].
inline std::vector<double> trailing_mean(std::span<const double> xs, std::size_t window) {
  std::vector<double> out(xs.size());
  double running = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    running += xs[i];
    if (i >= window) running -= xs[i - window];
    const std::size_t n = i + 1 < window ? i + 1 : window;
    out[i] = running / static_cast<double>(n);
  }
  return out;
}

}  // namespace uavslice
