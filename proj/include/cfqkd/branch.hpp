#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "cfqkd/errors.hpp"
#include "cfqkd/polarization.hpp"

namespace cfqkd {

enum class Outcome : int { D1 = 0, D2 = 1, D3 = 2, Loss = 3 };

constexpr const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::D1: return "D1";
    case Outcome::D2: return "D2";
    case Outcome::D3: return "D3";
    default: return "Loss";
  }
}

// Terminal of the measurement-collapse tree for one round, with audit flags.
// eve_forward_detected covers both polarization-analyzer clicks (I-R attacks)
// and the presence detection of the channel-identification probe.
struct Branch {
  double weight = 0.0;
  Outcome outcome = Outcome::Loss;
  Polarization detected_pol = Polarization::H;  // meaningless for Loss
  bool photon_entered_b = false;
  bool eve_forward_detected = false;
  bool eve_return_detected = false;
  std::optional<int> eve_bit_knowledge;  // Alice's bit, when Eve pinned it down

  friend bool operator==(const Branch&, const Branch&) = default;
};

struct BranchTree {
  std::vector<Branch> branches;

  double total_weight() const {
    double w = 0.0;
    for (const auto& b : branches) w += b.weight;
    return w;
  }

  void validate() const {
    for (const auto& b : branches) {
      if (b.weight < 0.0) throw ValidationError("negative branch weight");
      if (b.outcome == Outcome::D3 && !b.photon_entered_b) {
        throw ValidationError("D3 outcome without photon in path b");
      }
    }
    if (std::abs(total_weight() - 1.0) > 1e-12) {
      throw ValidationError("branch weights do not sum to 1");
    }
  }
};

}  // namespace cfqkd
