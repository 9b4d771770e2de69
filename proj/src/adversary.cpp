#include "cfqkd/adversary.hpp"

namespace cfqkd {

namespace {
constexpr double kProbEps = 1e-15;
}

const char* strategy_name(EveStrategy s) {
  switch (s) {
    case EveStrategy::None: return "none";
    case EveStrategy::SimpleIR: return "simple-ir";
    case EveStrategy::ModifiedIR: return "modified-ir";
    default: return "qci-probe";
  }
}

std::optional<EveStrategy> strategy_from_name(const std::string& name) {
  if (name == "none") return EveStrategy::None;
  if (name == "simple-ir") return EveStrategy::SimpleIR;
  if (name == "modified-ir") return EveStrategy::ModifiedIR;
  if (name == "qci-probe") return EveStrategy::QCIProbe;
  return std::nullopt;
}

std::vector<ForwardFork> intercept_resend_forward(const PulseState& state,
                                                  Polarization eve_pol,
                                                  bool flip_resend) {
  std::vector<ForwardFork> forks;
  const double tapped = std::norm(state.amp(Path::B, eve_pol));

  if (tapped > kProbEps) {
    ForwardFork det;
    det.weight = tapped;
    det.detected = true;
    det.resent_pol = flip_resend ? flip(eve_pol) : eve_pol;
    det.state = PulseState::basis(Path::B, *det.resent_pol);
    forks.push_back(det);
  }
  const double rest = 1.0 - tapped;
  if (rest > kProbEps) {
    ForwardFork pass;
    pass.weight = rest;
    pass.state = state;
    pass.state.set_amp(Path::B, eve_pol, 0.0);
    pass.state.renormalize();
    forks.push_back(pass);
  }
  return forks;
}

std::vector<ForwardFork> qci_probe_forward(const PulseState& state) {
  std::vector<ForwardFork> forks;
  const double in_b = state.path_norm2(Path::B);

  if (in_b > kProbEps) {
    ForwardFork hit;
    hit.weight = in_b;
    hit.detected = true;  // presence only; polarization untouched
    hit.state = state;
    hit.state.set_amp(Path::A, Polarization::H, 0.0);
    hit.state.set_amp(Path::A, Polarization::V, 0.0);
    hit.state.renormalize();
    forks.push_back(hit);
  }
  const double in_a = 1.0 - in_b;
  if (in_a > kProbEps) {
    ForwardFork miss;
    miss.weight = in_a;
    miss.state = state;
    miss.state.set_amp(Path::B, Polarization::H, 0.0);
    miss.state.set_amp(Path::B, Polarization::V, 0.0);
    miss.state.renormalize();
    forks.push_back(miss);
  }
  return forks;
}

}  // namespace cfqkd
