#include "cfqkd/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace cfqkd {

Announcement make_announcement(Outcome outcome, Polarization detected_pol,
                               Polarization alice_pol, Polarization bob_pol) {
  Announcement a;
  a.d1 = outcome == Outcome::D1;
  a.d2 = outcome == Outcome::D2;
  a.d3 = outcome == Outcome::D3;
  if (outcome == Outcome::D1 && detected_pol == alice_pol) {
    a.keep_flag = true;  // nothing else leaves Alice's station
  } else if (outcome != Outcome::Loss) {
    a.disclosed_detected_pol = detected_pol;
    a.disclosed_initial_pols = std::make_pair(alice_pol, bob_pol);
  }
  return a;
}

RoundRecord evaluate_round(Polarization alice_pol, Polarization bob_pol,
                           std::optional<Polarization> eve_pol,
                           EveStrategy strategy, const Branch& branch) {
  RoundRecord r;
  r.alice_pol = alice_pol;
  r.alice_bit = bit_value(alice_pol);
  r.bob_pol = bob_pol;
  r.bob_bit = bit_value(bob_pol);
  r.branch = branch;

  r.eve.eve_pol = eve_pol;
  r.eve.forward_detection = branch.eve_forward_detected;
  r.eve.return_detection = branch.eve_return_detected;
  if (strategy == EveStrategy::QCIProbe) {
    r.eve.qci_success = branch.eve_forward_detected;
  }
  r.eve.inferred_alice_bit = branch.eve_bit_knowledge;
  if (branch.eve_forward_detected && branch.eve_return_detected && eve_pol) {
    // The resent photon survived Bob's block, so Bob chose its orthogonal.
    const Polarization resent =
        strategy == EveStrategy::ModifiedIR ? flip(*eve_pol) : *eve_pol;
    r.eve.inferred_bob_bit = bit_value(flip(resent));
  }

  r.announcement = make_announcement(branch.outcome, branch.detected_pol,
                                     alice_pol, bob_pol);
  r.sifted = r.announcement.keep_flag;
  if (r.sifted) r.error_bit = r.alice_bit != r.bob_bit;
  r.counterfactual = r.sifted && !branch.photon_entered_b;
  return r;
}

RoundRecord run_round(const InterferometerConfig& cfg, EveStrategy strategy,
                      SplitMix64& rng) {
  const Polarization alice = pol_from_bit(rng.bit());
  const Polarization bob = pol_from_bit(rng.bit());
  std::optional<Polarization> eve;
  if (requires_eve_pol(strategy)) eve = pol_from_bit(rng.bit());
  const BranchTree tree = enumerate_round(cfg, alice, bob, strategy, eve);
  const Branch& branch = sample_branch(tree, rng);
  return evaluate_round(alice, bob, eve, strategy, branch);
}

SiftResult sift(const std::vector<RoundRecord>& records) {
  SiftResult out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].sifted) continue;
    out.alice_key.push_back(records[i].alice_bit);
    out.bob_key.push_back(records[i].bob_bit);
    out.kept_indices.push_back(i);
  }
  return out;
}

ErrorEstimate estimate_error_rate(const std::vector<int>& alice_key,
                                  const std::vector<int>& bob_key, double fraction,
                                  SplitMix64& rng) {
  if (alice_key.size() != bob_key.size()) {
    throw ValidationError("sifted keys differ in length");
  }
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("error-estimation fraction must lie in (0,1]");
  }
  ErrorEstimate est;
  const std::size_t n = alice_key.size();
  if (n == 0) return est;

  std::size_t k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  k = std::clamp<std::size_t>(k, 1, n);

  // Partial Fisher-Yates draw of k positions without replacement.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<bool> sampled(n, false);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
    sampled[idx[i]] = true;
  }

  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (sampled[i]) {
      if (alice_key[i] != bob_key[i]) ++mismatches;
    } else {
      est.alice_remaining.push_back(alice_key[i]);
      est.bob_remaining.push_back(bob_key[i]);
    }
  }
  est.sample_size = k;
  est.qber = static_cast<double>(mismatches) / static_cast<double>(k);
  return est;
}

namespace {

// Mergeable per-shard aggregate; merging in shard order reproduces the
// sequential session exactly.
struct ShardAgg {
  long d1 = 0, d2 = 0, d3 = 0, loss = 0;
  long sifted = 0, agreed = 0, known_agreed = 0;
  long counterfactual = 0, counterfactual_detections = 0;
  long d3_anomalies = 0, d2_pol_anomalies = 0;
  std::array<long, 4> qci_counts{};
  std::vector<int> alice_bits, bob_bits;
  std::vector<RoundRecord> records;  // only kept when an observer is set

  void absorb(const RoundRecord& r, bool keep_record) {
    switch (r.branch.outcome) {
      case Outcome::D1: ++d1; break;
      case Outcome::D2: ++d2; break;
      case Outcome::D3: ++d3; break;
      default: ++loss; break;
    }
    if (r.branch.outcome == Outcome::D3 &&
        (r.alice_pol != r.bob_pol || r.branch.detected_pol != r.bob_pol)) {
      ++d3_anomalies;
    }
    if (r.branch.outcome == Outcome::D2 && r.branch.detected_pol != r.alice_pol) {
      ++d2_pol_anomalies;
    }
    if (r.branch.outcome == Outcome::D1 && r.branch.detected_pol != r.alice_pol) {
      ++d2_pol_anomalies;  // discarded wrong-polarization D1 round
    }
    const bool error = r.sifted && r.error_bit.value_or(false);
    if (r.sifted) {
      alice_bits.push_back(r.alice_bit);
      bob_bits.push_back(r.bob_bit);
      ++sifted;
      if (r.counterfactual) ++counterfactual;
      if (!*r.error_bit) {
        ++agreed;
        if (r.branch.eve_bit_knowledge) ++known_agreed;
      }
    }
    if (error && !r.branch.eve_forward_detected) ++counterfactual_detections;
    const int qci = (r.branch.eve_forward_detected ? 0 : 2) + (error ? 1 : 0);
    ++qci_counts[qci];
    if (keep_record) records.push_back(r);
  }

  void merge(ShardAgg&& o) {
    d1 += o.d1; d2 += o.d2; d3 += o.d3; loss += o.loss;
    sifted += o.sifted; agreed += o.agreed; known_agreed += o.known_agreed;
    counterfactual += o.counterfactual;
    counterfactual_detections += o.counterfactual_detections;
    d3_anomalies += o.d3_anomalies; d2_pol_anomalies += o.d2_pol_anomalies;
    for (int i = 0; i < 4; ++i) qci_counts[i] += o.qci_counts[i];
    alice_bits.insert(alice_bits.end(), o.alice_bits.begin(), o.alice_bits.end());
    bob_bits.insert(bob_bits.end(), o.bob_bits.begin(), o.bob_bits.end());
    records.insert(records.end(), std::make_move_iterator(o.records.begin()),
                   std::make_move_iterator(o.records.end()));
  }
};

// All trees a session can need: 2 alice x 2 bob x (2 eve | 1) choices.
struct TreeCache {
  std::vector<BranchTree> trees;
  bool with_eve = false;

  TreeCache(const InterferometerConfig& cfg, EveStrategy strategy)
      : with_eve(requires_eve_pol(strategy)) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        if (with_eve) {
          for (int e = 0; e < 2; ++e) {
            trees.push_back(enumerate_round(cfg, pol_from_bit(a), pol_from_bit(b),
                                            strategy, pol_from_bit(e)));
          }
        } else {
          trees.push_back(enumerate_round(cfg, pol_from_bit(a), pol_from_bit(b),
                                          strategy, std::nullopt));
        }
      }
    }
  }

  const BranchTree& at(int a, int b, int e) const {
    return with_eve ? trees[(a * 2 + b) * 2 + e] : trees[a * 2 + b];
  }
};

ShardAgg run_shard(const SessionParams& p, const TreeCache& cache, long lo, long hi,
                   bool keep_records) {
  ShardAgg agg;
  for (long i = lo; i < hi; ++i) {
    SplitMix64 rng(derive_stream_seed(p.seed, static_cast<std::uint64_t>(i)));
    const int a = rng.bit();
    const int b = rng.bit();
    const int e = cache.with_eve ? rng.bit() : 0;
    std::optional<Polarization> eve;
    if (cache.with_eve) eve = pol_from_bit(e);
    const Branch& branch = sample_branch(cache.at(a, b, e), rng);
    agg.absorb(evaluate_round(pol_from_bit(a), pol_from_bit(b), eve, p.strategy, branch),
               keep_records);
  }
  return agg;
}

}  // namespace

SessionReport run_session(const SessionParams& params) {
  params.cfg.validate();
  if (params.n_rounds < 1) throw ConfigError("a session needs at least one round");
  if (!(params.error_fraction > 0.0 && params.error_fraction <= 1.0)) {
    throw ConfigError("error-estimation fraction must lie in (0,1]");
  }

  const TreeCache cache(params.cfg, params.strategy);
  const bool keep_records = static_cast<bool>(params.observer);
  const int workers = std::max(1, params.workers);

  ShardAgg agg;
  if (workers == 1) {
    agg = run_shard(params, cache, 0, params.n_rounds, keep_records);
  } else {
    std::vector<ShardAgg> parts(workers);
    std::vector<std::thread> threads;
    const long chunk = (params.n_rounds + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const long lo = std::min<long>(static_cast<long>(w) * chunk, params.n_rounds);
      const long hi = std::min<long>(lo + chunk, params.n_rounds);
      threads.emplace_back([&, w, lo, hi] {
        parts[w] = run_shard(params, cache, lo, hi, keep_records);
      });
    }
    for (auto& t : threads) t.join();
    for (auto& part : parts) agg.merge(std::move(part));
  }

  if (params.observer) {
    for (const auto& r : agg.records) params.observer(r);
  }

  SessionReport rep;
  rep.reflectivity = params.cfg.bs.reflectivity;
  rep.round_trip_phase = params.cfg.round_trip_phase;
  rep.strategy = params.strategy;
  rep.seed = params.seed;
  rep.error_fraction = params.error_fraction;
  rep.rounds = params.n_rounds;
  rep.d1_clicks = agg.d1;
  rep.d2_clicks = agg.d2;
  rep.d3_clicks = agg.d3;
  rep.loss_events = agg.loss;
  rep.sifted_count = agg.sifted;
  rep.sift_rate = static_cast<double>(agg.sifted) / static_cast<double>(params.n_rounds);
  rep.d3_anomalies = agg.d3_anomalies;
  rep.d2_pol_anomalies = agg.d2_pol_anomalies;
  rep.agreed_sifted = agg.agreed;
  rep.eve_known_agreed = agg.known_agreed;
  rep.counterfactual_sifted = agg.counterfactual;
  rep.counterfactual_detections = agg.counterfactual_detections;
  rep.qci_counts = agg.qci_counts;
  if (agg.sifted > 0) {
    rep.eve_info_fraction =
        static_cast<double>(agg.known_agreed) / static_cast<double>(agg.sifted);
    rep.counterfactual_fraction =
        static_cast<double>(agg.counterfactual) / static_cast<double>(agg.sifted);
  }

  SplitMix64 est_rng(derive_stream_seed(params.seed, 0xffffffffffffffffULL));
  const ErrorEstimate est =
      estimate_error_rate(agg.alice_bits, agg.bob_bits, params.error_fraction, est_rng);
  rep.qber = est.qber;
  rep.qber_sample = static_cast<long>(est.sample_size);
  rep.key_length = static_cast<long>(est.alice_remaining.size());
  return rep;
}

double eve_info_fraction(const std::vector<RoundRecord>& records) {
  long sifted = 0, known_agreed = 0;
  for (const auto& r : records) {
    if (!r.sifted) continue;
    ++sifted;
    if (!*r.error_bit && r.branch.eve_bit_knowledge) ++known_agreed;
  }
  if (sifted == 0) return 0.0;
  return static_cast<double>(known_agreed) / static_cast<double>(sifted);
}

long counterfactual_detection_events(const std::vector<RoundRecord>& records) {
  long count = 0;
  for (const auto& r : records) {
    if (r.sifted && r.error_bit.value_or(false) && !r.branch.eve_forward_detected) {
      ++count;
    }
  }
  return count;
}

}  // namespace cfqkd
