#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cfqkd/branch.hpp"
#include "cfqkd/polarization.hpp"
#include "cfqkd/pulse_state.hpp"

namespace cfqkd {

// Closed enumeration of adversary models acting on the path-b segment.
enum class EveStrategy : int { None = 0, SimpleIR = 1, ModifiedIR = 2, QCIProbe = 3 };

constexpr bool requires_eve_pol(EveStrategy s) {
  return s == EveStrategy::SimpleIR || s == EveStrategy::ModifiedIR;
}

const char* strategy_name(EveStrategy s);
std::optional<EveStrategy> strategy_from_name(const std::string& name);

// Everything Eve observed in one round.
struct EveRoundView {
  std::optional<Polarization> eve_pol;
  bool forward_detection = false;
  bool return_detection = false;
  bool qci_success = false;
  std::optional<int> inferred_alice_bit;
  std::optional<int> inferred_bob_bit;
};

// One fork of Eve's forward-pass action: either she detected the photon in
// path b and re-emitted a substitute, or the branch passed her apparatus.
struct ForwardFork {
  double weight = 0.0;
  PulseState state;
  bool detected = false;
  std::optional<Polarization> resent_pol;
};

// Polarization-selective intercept: the (b, eve_pol) amplitude is measured
// out. On detection Eve re-emits toward Bob with the detected polarization
// (flipped when flip_resend is set); on the no-detection fork she sends
// nothing, so the tapped amplitude is simply gone.
std::vector<ForwardFork> intercept_resend_forward(const PulseState& state,
                                                  Polarization eve_pol,
                                                  bool flip_resend);

// Photon-presence measurement on path b that leaves the internal state alone:
// forks into photon-in-b (qci success) and vacuum-in-b.
std::vector<ForwardFork> qci_probe_forward(const PulseState& state);

// Return-pass resend polarization after Eve intercepts all returning light on
// a forward-detected round.
inline Polarization intercept_resend_return(Polarization returning_pol,
                                            bool flip_resend) {
  return flip_resend ? flip(returning_pol) : returning_pol;
}

}  // namespace cfqkd
