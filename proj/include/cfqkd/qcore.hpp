#pragma once

#include <array>
#include <complex>
#include <optional>

#include "cfqkd/adversary.hpp"
#include "cfqkd/beamsplitter.hpp"
#include "cfqkd/branch.hpp"
#include "cfqkd/pulse_state.hpp"
#include "cfqkd/rng.hpp"

namespace cfqkd {

// State right after the first beamsplitter pass: sqrt(T) on (b, pol),
// i*sqrt(R) on (a, pol).
PulseState initial_split(Polarization pol, const BeamSplitter& bs);

struct BlockResult {
  double d3_weight = 0.0;
  Polarization d3_pol = Polarization::H;
  std::optional<PulseState> survivor;
};

// Bob's polarization-selective block: the (b, bob_pol) amplitude is measured
// out to D3; everything else is untouched (renormalized into the survivor).
BlockResult apply_bob_block(const PulseState& state, Polarization bob_pol);

struct DetectionProbs {
  double p_d1 = 0.0;
  double p_d2 = 0.0;
  std::array<double, 2> p_d1_pol{};  // indexed by Polarization
  std::array<double, 2> p_d2_pol{};
};

// Per-polarization complex amplitudes at D1/D2 after the second beamsplitter
// pass, with the round-trip phase applied to arm b.
struct RecombinedAmplitudes {
  std::array<std::complex<double>, 2> d1{};
  std::array<std::complex<double>, 2> d2{};
};
RecombinedAmplitudes recombine_amplitudes(const PulseState& state,
                                          const InterferometerConfig& cfg);

// Probability view of the recombination; p_d1 + p_d2 = 1.
DetectionProbs recombine(const PulseState& state, const InterferometerConfig& cfg);

// Exhaustive collapse tree for one round: Eve's forward tap, Bob's block,
// Eve's return tap, recombination. Deterministic branch order.
BranchTree enumerate_round(const InterferometerConfig& cfg, Polarization alice_pol,
                           Polarization bob_pol, EveStrategy strategy,
                           std::optional<Polarization> eve_pol = std::nullopt);

// Weight-proportional draw from the tree; reproducible given the stream.
const Branch& sample_branch(const BranchTree& tree, SplitMix64& rng);

}  // namespace cfqkd
