#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "cfqkd/errors.hpp"
#include "cfqkd/polarization.hpp"

namespace cfqkd {

// Interferometer arm. Path a stays inside Alice's station; path b is the
// quantum channel toward Bob.
enum class Path : int { A = 0, B = 1 };

// Single-photon amplitudes over the four (path, polarization) modes of one
// probability branch. Branch weights, not sub-normalization, carry consumed
// probability, so a live state always has unit norm.
class PulseState {
 public:
  PulseState() = default;

  static PulseState basis(Path path, Polarization pol) {
    PulseState s;
    s.amp_[index(path, pol)] = 1.0;
    return s;
  }

  std::complex<double> amp(Path path, Polarization pol) const {
    return amp_[index(path, pol)];
  }
  void set_amp(Path path, Polarization pol, std::complex<double> v) {
    amp_[index(path, pol)] = v;
  }

  double norm2() const {
    double n = 0.0;
    for (const auto& a : amp_) n += std::norm(a);
    return n;
  }

  double path_norm2(Path path) const {
    return std::norm(amp(path, Polarization::H)) +
           std::norm(amp(path, Polarization::V));
  }

  bool is_normalized(double tol = 1e-12) const {
    return std::abs(norm2() - 1.0) <= tol;
  }

  void require_normalized() const {
    if (!is_normalized()) {
      throw ValidationError("pulse state is not normalized");
    }
  }

  void renormalize() {
    const double n = std::sqrt(norm2());
    if (n <= 0.0) throw InternalError("cannot renormalize a zero state");
    for (auto& a : amp_) a /= n;
  }

  friend bool operator==(const PulseState&, const PulseState&) = default;

 private:
  static int index(Path path, Polarization pol) {
    return static_cast<int>(path) * 2 + static_cast<int>(pol);
  }

  std::array<std::complex<double>, 4> amp_{};
};

}  // namespace cfqkd
