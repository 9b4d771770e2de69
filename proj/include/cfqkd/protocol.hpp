#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "cfqkd/adversary.hpp"
#include "cfqkd/beamsplitter.hpp"
#include "cfqkd/branch.hpp"
#include "cfqkd/qcore.hpp"
#include "cfqkd/rng.hpp"

namespace cfqkd {

// Public classical-channel record for one round. keep_flag rounds disclose
// nothing about polarizations.
struct Announcement {
  bool d1 = false, d2 = false, d3 = false;
  std::optional<Polarization> disclosed_detected_pol;
  std::optional<std::pair<Polarization, Polarization>> disclosed_initial_pols;
  bool keep_flag = false;
};

struct RoundRecord {
  int alice_bit = 0;
  Polarization alice_pol = Polarization::H;
  int bob_bit = 0;
  Polarization bob_pol = Polarization::H;
  Branch branch;
  EveRoundView eve;
  Announcement announcement;
  bool sifted = false;
  std::optional<bool> error_bit;
  bool counterfactual = false;
};

Announcement make_announcement(Outcome outcome, Polarization detected_pol,
                               Polarization alice_pol, Polarization bob_pol);

// Derives announcement, sift decision and Eve's view for a sampled branch.
RoundRecord evaluate_round(Polarization alice_pol, Polarization bob_pol,
                           std::optional<Polarization> eve_pol,
                           EveStrategy strategy, const Branch& branch);

// Fully random round: Alice, Bob (and Eve, when the strategy calls for one)
// each draw a uniform polarization, then a branch is sampled.
RoundRecord run_round(const InterferometerConfig& cfg, EveStrategy strategy,
                      SplitMix64& rng);

struct SiftResult {
  std::vector<int> alice_key;
  std::vector<int> bob_key;
  std::vector<std::size_t> kept_indices;
};
SiftResult sift(const std::vector<RoundRecord>& records);

struct ErrorEstimate {
  std::optional<double> qber;
  std::size_t sample_size = 0;
  std::vector<int> alice_remaining;
  std::vector<int> bob_remaining;
};
ErrorEstimate estimate_error_rate(const std::vector<int>& alice_key,
                                  const std::vector<int>& bob_key, double fraction,
                                  SplitMix64& rng);

struct SessionParams {
  InterferometerConfig cfg;
  EveStrategy strategy = EveStrategy::None;
  long n_rounds = 0;
  std::uint64_t seed = 0;
  double error_fraction = 0.5;
  int workers = 1;
  // Invoked once per round, in round order. Forces record buffering when
  // workers > 1.
  std::function<void(const RoundRecord&)> observer;
};

struct SessionReport {
  double reflectivity = 0.0;
  double round_trip_phase = 0.0;
  EveStrategy strategy = EveStrategy::None;
  std::uint64_t seed = 0;
  double error_fraction = 0.0;

  long rounds = 0;
  long d1_clicks = 0, d2_clicks = 0, d3_clicks = 0, loss_events = 0;
  long sifted_count = 0;
  double sift_rate = 0.0;
  long d3_anomalies = 0;
  long d2_pol_anomalies = 0;  // includes discarded D1-wrong-polarization rounds
  long agreed_sifted = 0;
  long eve_known_agreed = 0;
  std::optional<double> eve_info_fraction;
  long counterfactual_sifted = 0;
  double counterfactual_fraction = 0.0;
  long counterfactual_detections = 0;
  // Joint (channel-identification success, bit error) counts:
  // [0]=success/no-error [1]=success/error [2]=fail/no-error [3]=fail/error
  std::array<long, 4> qci_counts{};
  std::optional<double> qber;
  long qber_sample = 0;
  long key_length = 0;  // after error estimation
};

SessionReport run_session(const SessionParams& params);

// Streaming per-record accumulators, exposed so the audit functions below and
// the session share one definition of each statistic.
double eve_info_fraction(const std::vector<RoundRecord>& records);
long counterfactual_detection_events(const std::vector<RoundRecord>& records);

}  // namespace cfqkd
