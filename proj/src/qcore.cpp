#include "cfqkd/qcore.hpp"

#include <cmath>
#include <vector>

namespace cfqkd {

namespace {

constexpr double kProbEps = 1e-15;

// Branch under construction, before the photon reaches a detector.
struct Working {
  double weight = 1.0;
  PulseState state;
  bool entered_b = false;
  bool forward_detected = false;
  bool return_detected = false;
  std::optional<int> knowledge;
};

Branch terminal(const Working& w, double prob, Outcome outcome, Polarization pol) {
  Branch b;
  b.weight = w.weight * prob;
  b.outcome = outcome;
  b.detected_pol = pol;
  b.photon_entered_b = w.entered_b;
  b.eve_forward_detected = w.forward_detected;
  b.eve_return_detected = w.return_detected;
  b.eve_bit_knowledge = w.knowledge;
  return b;
}

}  // namespace

PulseState initial_split(Polarization pol, const BeamSplitter& bs) {
  bs.validate();
  PulseState s;
  s.set_amp(Path::B, pol, std::sqrt(bs.transmissivity));
  s.set_amp(Path::A, pol, std::complex<double>(0.0, std::sqrt(bs.reflectivity)));
  return s;
}

BlockResult apply_bob_block(const PulseState& state, Polarization bob_pol) {
  state.require_normalized();
  BlockResult r;
  r.d3_weight = std::norm(state.amp(Path::B, bob_pol));
  r.d3_pol = bob_pol;
  if (r.d3_weight < 1.0 - kProbEps) {
    PulseState survivor = state;
    survivor.set_amp(Path::B, bob_pol, 0.0);
    survivor.renormalize();
    r.survivor = survivor;
  }
  return r;
}

RecombinedAmplitudes recombine_amplitudes(const PulseState& state,
                                          const InterferometerConfig& cfg) {
  cfg.validate();
  const double sr = std::sqrt(cfg.bs.reflectivity);
  const double st = std::sqrt(cfg.bs.transmissivity);
  const std::complex<double> i_sr(0.0, sr);
  const std::complex<double> phase = cfg.phase_factor();

  RecombinedAmplitudes out;
  for (Polarization p : {Polarization::H, Polarization::V}) {
    const auto a = state.amp(Path::A, p);
    const auto b = state.amp(Path::B, p);
    out.d1[bit_value(p)] = st * a + i_sr * phase * b;
    out.d2[bit_value(p)] = i_sr * a + st * phase * b;
  }
  return out;
}

DetectionProbs recombine(const PulseState& state, const InterferometerConfig& cfg) {
  state.require_normalized();
  const auto amps = recombine_amplitudes(state, cfg);
  DetectionProbs probs;
  for (int p = 0; p < 2; ++p) {
    probs.p_d1_pol[p] = std::norm(amps.d1[p]);
    probs.p_d2_pol[p] = std::norm(amps.d2[p]);
    probs.p_d1 += probs.p_d1_pol[p];
    probs.p_d2 += probs.p_d2_pol[p];
  }
  return probs;
}

BranchTree enumerate_round(const InterferometerConfig& cfg, Polarization alice_pol,
                           Polarization bob_pol, EveStrategy strategy,
                           std::optional<Polarization> eve_pol) {
  cfg.validate();
  if (requires_eve_pol(strategy) && !eve_pol) {
    throw ConfigError("strategy requires a per-round eve polarization");
  }
  if (!requires_eve_pol(strategy) && eve_pol) {
    throw ConfigError("strategy does not take an eve polarization");
  }

  const bool flip_resend = strategy == EveStrategy::ModifiedIR;
  const PulseState initial = initial_split(alice_pol, cfg.bs);

  // Stage 1: Eve's forward tap.
  std::vector<Working> stage;
  if (strategy == EveStrategy::None) {
    stage.push_back(Working{1.0, initial});
  } else if (strategy == EveStrategy::QCIProbe) {
    for (const auto& fork : qci_probe_forward(initial)) {
      Working w;
      w.weight = fork.weight;
      w.state = fork.state;
      w.entered_b = fork.detected;
      w.forward_detected = fork.detected;
      stage.push_back(w);
    }
  } else {
    for (const auto& fork : intercept_resend_forward(initial, *eve_pol, flip_resend)) {
      Working w;
      w.weight = fork.weight;
      w.state = fork.state;
      if (fork.detected) {
        w.entered_b = true;
        w.forward_detected = true;
        // The photon she caught in path b carried Alice's polarization.
        w.knowledge = bit_value(*eve_pol);
      }
      stage.push_back(w);
    }
  }

  BranchTree tree;
  for (const auto& w1 : stage) {
    // Stage 2: Bob's polarization-selective block.
    const BlockResult block = apply_bob_block(w1.state, bob_pol);
    if (block.d3_weight > kProbEps) {
      Working w = w1;
      w.entered_b = true;
      tree.branches.push_back(terminal(w, block.d3_weight, Outcome::D3, block.d3_pol));
    }
    if (!block.survivor) continue;

    Working w2 = w1;
    w2.weight *= 1.0 - block.d3_weight;
    w2.state = *block.survivor;

    // Stage 3: Eve's return tap (intercept-resend only).
    if (strategy == EveStrategy::SimpleIR || strategy == EveStrategy::ModifiedIR) {
      if (w2.forward_detected) {
        // Eve knows a photon is in flight and intercepts everything returning.
        // Not being blocked meant the survivor is entirely in path b.
        for (Polarization p : {Polarization::H, Polarization::V}) {
          if (std::norm(w2.state.amp(Path::B, p)) > 0.5) {
            w2.return_detected = true;
            // The photon outlived Bob's block, so Bob's choice is flip(p).
            w2.state = PulseState::basis(Path::B, intercept_resend_return(p, flip_resend));
            break;
          }
        }
      } else {
        const double tapped = std::norm(w2.state.amp(Path::B, *eve_pol));
        if (tapped > kProbEps) {
          Working hit = w2;
          hit.weight *= tapped;
          hit.entered_b = true;
          hit.return_detected = true;
          hit.knowledge = bit_value(*eve_pol);
          hit.state = PulseState::basis(Path::B, intercept_resend_return(*eve_pol, flip_resend));

          w2.weight *= 1.0 - tapped;
          w2.state.set_amp(Path::B, *eve_pol, 0.0);
          if (w2.weight > kProbEps) w2.state.renormalize();

          // Stage 4 for the detected fork.
          const auto probs = recombine(hit.state, cfg);
          for (int p = 0; p < 2; ++p) {
            if (probs.p_d1_pol[p] > kProbEps)
              tree.branches.push_back(terminal(hit, probs.p_d1_pol[p], Outcome::D1, pol_from_bit(p)));
            if (probs.p_d2_pol[p] > kProbEps)
              tree.branches.push_back(terminal(hit, probs.p_d2_pol[p], Outcome::D2, pol_from_bit(p)));
          }
          if (w2.weight <= kProbEps) continue;
        }
      }
    }

    // Stage 4: recombination at the beamsplitter.
    const auto probs = recombine(w2.state, cfg);
    for (int p = 0; p < 2; ++p) {
      if (probs.p_d1_pol[p] > kProbEps)
        tree.branches.push_back(terminal(w2, probs.p_d1_pol[p], Outcome::D1, pol_from_bit(p)));
      if (probs.p_d2_pol[p] > kProbEps)
        tree.branches.push_back(terminal(w2, probs.p_d2_pol[p], Outcome::D2, pol_from_bit(p)));
    }
  }

  tree.validate();
  return tree;
}

const Branch& sample_branch(const BranchTree& tree, SplitMix64& rng) {
  if (tree.branches.empty()) throw InternalError("sampling from an empty branch tree");
  const double u = rng.uniform() * tree.total_weight();
  double acc = 0.0;
  for (const auto& b : tree.branches) {
    acc += b.weight;
    if (u < acc) return b;
  }
  return tree.branches.back();
}

}  // namespace cfqkd
