#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "wsnphm/errors.hpp"
#include "wsnphm/experiment.hpp"

namespace wsnphm {

namespace {

double mean_first_death(const ExperimentConfig& config, TopologyKind kind, const RadioModel& radio) {
  const std::vector<LifetimeRecord> lives = simulate_lifetimes(config, kind, radio, true);
  double total = 0.0;
  for (const LifetimeRecord& life : lives) {
    total += life.first_death;
  }
  return total / static_cast<double>(lives.size());
}

double midpoint(double lo, double hi) noexcept { return lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi); }

}  // namespace

CalibrationReport calibrate(const ExperimentConfig& config, const std::array<double, 4>& targets,
                            const CalibrationOptions& options) {
  for (std::size_t i = 1; i < targets.size(); ++i) {
    if (!(targets[i - 1] < targets[i])) {
      throw ConfigError(fmt::format("targets must increase (centralized < hierarchical < distributed < "
                                    "decentralized), got {}",
                                    fmt::join(targets, ",")));
    }
  }
  if (!(options.scale_low >= 0.0) || !(options.scale_high >= options.scale_low)) {
    throw ConfigError(fmt::format("bad scale bounds [{}, {}]", options.scale_low, options.scale_high));
  }

  CalibrationReport report;
  report.targets = targets;
  const double target = targets[0];
  auto first_death = [&](double scale) {
    return mean_first_death(config, TopologyKind::Centralized, config.radio.scaled(scale));
  };

  double lo = options.scale_low;
  double hi = options.scale_high;
  const double at_high = first_death(hi);
  const double at_low = first_death(lo);
  double scale = hi;
  if (at_high > target + options.tolerance) {
    report.message = fmt::format("centralized first death {:.2f} at the upper scale bound {} is still later than {}",
                                 at_high, hi, target);
  } else if (at_low < target - options.tolerance) {
    report.message = fmt::format("centralized first death {:.2f} at the lower scale bound {} is already before {}",
                                 at_low, lo, target);
  } else {
    // Keep halving the bracket and report the closest scale seen; the
    // tolerance only decides success.
    double best_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < options.max_iterations && hi > lo * (1.0 + 1e-9); ++i) {
      const double mid = midpoint(lo, hi);
      const double fd = first_death(mid);
      const double gap = std::abs(fd - target);
      if (gap < best_gap) {
        best_gap = gap;
        scale = mid;
      }
      if (gap == 0.0) {
        break;
      }
      // First death comes earlier as the radio gets more expensive.
      (fd > target ? lo : hi) = mid;
    }
    report.success = best_gap <= options.tolerance;
    if (!report.success) {
      report.message = fmt::format("no scale within {} iterations put the centralized first death within {} of {}",
                                   options.max_iterations, options.tolerance, target);
    }
  }

  report.scale = scale;
  report.radio = config.radio.scaled(scale);
  for (std::size_t i = 0; i < kCalibrationOrder.size(); ++i) {
    report.achieved[i] = mean_first_death(config, kCalibrationOrder[i], report.radio);
  }
  if (report.success) {
    report.message = fmt::format("scale {} puts the centralized first death at {:.2f}", scale, report.achieved[0]);
  }
  return report;
}

nlohmann::json calibration_fragment(const CalibrationReport& report) {
  return {{"radio",
           {{"e_elec", report.radio.e_elec},
            {"e_rx", report.radio.e_rx},
            {"e_amp", report.radio.e_amp},
            {"e_da", report.radio.e_da}}}};
}

}  // namespace wsnphm
