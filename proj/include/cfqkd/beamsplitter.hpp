#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "cfqkd/errors.hpp"

namespace cfqkd {

// Lossless beamsplitter. Convention: a reflected amplitude picks up a factor
// i*sqrt(R), a transmitted amplitude picks up sqrt(T).
struct BeamSplitter {
  double reflectivity = 0.5;
  double transmissivity = 0.5;

  static BeamSplitter from_reflectivity(double r) {
    BeamSplitter bs{r, 1.0 - r};
    bs.validate();
    return bs;
  }

  void validate() const {
    if (!(reflectivity >= 0.0 && reflectivity <= 1.0) ||
        !(transmissivity >= 0.0 && transmissivity <= 1.0)) {
      throw ConfigError("beamsplitter coefficients must lie in [0,1]");
    }
    if (std::abs(reflectivity + transmissivity - 1.0) > 1e-12) {
      throw ConfigError("beamsplitter must satisfy R + T = 1");
    }
  }
};

struct InterferometerConfig {
  BeamSplitter bs;
  double round_trip_phase = std::numbers::pi;  // phase on arm b

  void validate() const {
    bs.validate();
    if (!std::isfinite(round_trip_phase)) {
      throw ConfigError("round-trip phase must be finite");
    }
  }

  // e^{i*phase}, with components snapped to exact 0/±1 so that the default
  // phase pi produces exact destructive interference at D1.
  std::complex<double> phase_factor() const {
    double re = std::cos(round_trip_phase);
    double im = std::sin(round_trip_phase);
    auto snap = [](double x) {
      if (std::abs(x) < 1e-12) return 0.0;
      if (std::abs(x - 1.0) < 1e-12) return 1.0;
      if (std::abs(x + 1.0) < 1e-12) return -1.0;
      return x;
    };
    return {snap(re), snap(im)};
  }
};

}  // namespace cfqkd
