#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "cfqkd/oracle.hpp"
#include "cfqkd/protocol.hpp"
#include "cfqkd/qcore.hpp"

using namespace cfqkd;

namespace {

InterferometerConfig config(double r) {
  InterferometerConfig cfg;
  cfg.bs = BeamSplitter::from_reflectivity(r);
  return cfg;
}

SessionReport session(double r, EveStrategy s, long n, std::uint64_t seed) {
  SessionParams p;
  p.cfg = config(r);
  p.strategy = s;
  p.n_rounds = n;
  p.seed = seed;
  return run_session(p);
}

double binom_sigma(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

}  // namespace

TEST_CASE("strategy names round-trip") {
  for (EveStrategy s : {EveStrategy::None, EveStrategy::SimpleIR,
                        EveStrategy::ModifiedIR, EveStrategy::QCIProbe}) {
    CHECK(strategy_from_name(strategy_name(s)) == s);
  }
  CHECK(!strategy_from_name("bogus").has_value());
}

TEST_CASE("intercept_resend_forward") {
  SUBCASE("matching analyzer forks detection and pass") {
    const auto s = initial_split(Polarization::H, BeamSplitter::from_reflectivity(0.5));
    const auto forks = intercept_resend_forward(s, Polarization::H, false);
    REQUIRE(forks.size() == 2);
    CHECK(forks[0].detected);
    CHECK(forks[0].weight == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(forks[0].resent_pol == Polarization::H);
    CHECK(std::norm(forks[0].state.amp(Path::B, Polarization::H)) == doctest::Approx(1.0));
    CHECK(!forks[1].detected);
    CHECK(forks[1].weight == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::norm(forks[1].state.amp(Path::A, Polarization::H)) == doctest::Approx(1.0));
  }
  SUBCASE("orthogonal analyzer passes the state untouched") {
    const auto s = initial_split(Polarization::H, BeamSplitter::from_reflectivity(0.5));
    const auto forks = intercept_resend_forward(s, Polarization::V, false);
    REQUIRE(forks.size() == 1);
    CHECK(!forks[0].detected);
    CHECK(forks[0].state == s);
  }
  SUBCASE("no channel amplitude means no fork") {
    const auto s = PulseState::basis(Path::A, Polarization::H);
    const auto forks = intercept_resend_forward(s, Polarization::H, false);
    REQUIRE(forks.size() == 1);
    CHECK(!forks[0].detected);
    CHECK(forks[0].state == s);
  }
  SUBCASE("modified variant resends the orthogonal polarization") {
    const auto s = initial_split(Polarization::H, BeamSplitter::from_reflectivity(0.5));
    const auto forks = intercept_resend_forward(s, Polarization::H, true);
    CHECK(forks[0].resent_pol == Polarization::V);
    CHECK(std::norm(forks[0].state.amp(Path::B, Polarization::V)) == doctest::Approx(1.0));
  }
}

TEST_CASE("qci_probe_forward") {
  SUBCASE("balanced split forks half and half") {
    const auto s = initial_split(Polarization::H, BeamSplitter::from_reflectivity(0.5));
    const auto forks = qci_probe_forward(s);
    REQUIRE(forks.size() == 2);
    CHECK(forks[0].detected);
    CHECK(forks[0].weight == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::norm(forks[0].state.amp(Path::B, Polarization::H)) == doctest::Approx(1.0));
    CHECK(!forks[1].detected);
    CHECK(std::norm(forks[1].state.amp(Path::A, Polarization::H)) == doctest::Approx(1.0));
  }
  SUBCASE("photon confined to arm a never triggers the probe") {
    const auto forks = qci_probe_forward(PulseState::basis(Path::A, Polarization::H));
    REQUIRE(forks.size() == 1);
    CHECK(!forks[0].detected);
  }
}

TEST_CASE("simple I-R return handling inside the round tree") {
  // Forward detection, Bob does not block: Eve re-detects on the return leg.
  const auto tree = enumerate_round(config(0.5), Polarization::H, Polarization::V,
                                    EveStrategy::SimpleIR, Polarization::H);
  bool saw_return_branch = false;
  for (const auto& b : tree.branches) {
    if (b.eve_forward_detected) {
      CHECK(b.eve_return_detected);
      CHECK(b.detected_pol == Polarization::H);  // resent unchanged
      saw_return_branch = true;
    }
  }
  CHECK(saw_return_branch);

  // Forward detection, Bob blocks: branch terminates at D3, no return.
  const auto blocked = enumerate_round(config(0.5), Polarization::H, Polarization::H,
                                       EveStrategy::SimpleIR, Polarization::H);
  for (const auto& b : blocked.branches) {
    if (b.eve_forward_detected) {
      CHECK(b.outcome == Outcome::D3);
      CHECK(!b.eve_return_detected);
    }
  }
}

TEST_CASE("simple I-R leaves equal-polarization detection rates unchanged") {
  for (double r : {0.3, 0.5, 0.7}) {
    const double t = 1.0 - r;
    for (Polarization e : {Polarization::H, Polarization::V}) {
      const auto tree = enumerate_round(config(r), Polarization::H, Polarization::H,
                                        EveStrategy::SimpleIR, e);
      std::map<Outcome, double> agg;
      for (const auto& b : tree.branches) agg[b.outcome] += b.weight;
      CHECK(agg[Outcome::D1] == doctest::Approx(r * t).epsilon(1e-12));
      CHECK(agg[Outcome::D2] == doctest::Approx(r * r).epsilon(1e-12));
      CHECK(agg[Outcome::D3] == doctest::Approx(t).epsilon(1e-12));
    }
  }
}

TEST_CASE("modified I-R produces the D3 announcement anomaly") {
  // Eve aligned with Alice, Bob orthogonal: the flipped fake photon matches
  // Bob's blocking polarization and lands on D3 despite differing choices.
  const auto tree = enumerate_round(config(0.5), Polarization::H, Polarization::V,
                                    EveStrategy::ModifiedIR, Polarization::H);
  double d3_weight = 0.0;
  for (const auto& b : tree.branches) {
    if (b.outcome == Outcome::D3) {
      d3_weight += b.weight;
      CHECK(b.detected_pol == Polarization::V);
      CHECK(b.eve_forward_detected);
    }
  }
  CHECK(d3_weight == doctest::Approx(0.5).epsilon(1e-12));  // T
}

TEST_CASE("modified I-R known-bit branch") {
  // Equal polarizations, Eve aligned: her flipped photon survives the block,
  // she re-detects it on the way back, and the final D1 click is a correct
  // sifted bit whose value she knows.
  const auto tree = enumerate_round(config(0.5), Polarization::H, Polarization::H,
                                    EveStrategy::ModifiedIR, Polarization::H);
  double known_d1 = 0.0, unknown_d1 = 0.0;
  for (const auto& b : tree.branches) {
    CHECK(b.outcome != Outcome::D3);  // nothing matches Bob's analyzer
    if (b.outcome != Outcome::D1) continue;
    CHECK(b.detected_pol == Polarization::H);
    if (b.eve_bit_knowledge) {
      CHECK(*b.eve_bit_knowledge == 0);
      CHECK(b.eve_return_detected);
      known_d1 += b.weight;
    } else {
      unknown_d1 += b.weight;
    }
  }
  CHECK(known_d1 == doctest::Approx(0.25).epsilon(1e-12));    // TR
  CHECK(unknown_d1 == doctest::Approx(0.25).epsilon(1e-12));  // RT
}

TEST_CASE("orthogonal analyzer makes modified I-R collapse to pass-through") {
  const auto modified = enumerate_round(config(0.5), Polarization::H, Polarization::H,
                                        EveStrategy::ModifiedIR, Polarization::V);
  const auto simple = enumerate_round(config(0.5), Polarization::H, Polarization::H,
                                      EveStrategy::SimpleIR, Polarization::V);
  REQUIRE(modified.branches.size() == simple.branches.size());
  for (std::size_t i = 0; i < modified.branches.size(); ++i) {
    CHECK(modified.branches[i] == simple.branches[i]);
  }
}

TEST_CASE("eve information fraction") {
  SUBCASE("simple I-R knows nothing about agreed bits") {
    const auto rep = session(0.5, EveStrategy::SimpleIR, 200000, 11);
    REQUIRE(rep.eve_info_fraction.has_value());
    CHECK(*rep.eve_info_fraction == 0.0);
    CHECK(rep.eve_known_agreed == 0);
  }
  SUBCASE("modified I-R knows a quarter of the sifted key") {
    const auto rep = session(0.5, EveStrategy::ModifiedIR, 1000000, 12);
    REQUIRE(rep.eve_info_fraction.has_value());
    CHECK(std::abs(*rep.eve_info_fraction - 0.25) <= 0.01);
  }
  SUBCASE("absent adversary knows nothing") {
    const auto rep = session(0.5, EveStrategy::None, 50000, 13);
    REQUIRE(rep.eve_info_fraction.has_value());
    CHECK(*rep.eve_info_fraction == 0.0);
  }
  SUBCASE("record-level accumulator agrees with the session") {
    SessionParams p;
    p.cfg = config(0.5);
    p.strategy = EveStrategy::ModifiedIR;
    p.n_rounds = 50000;
    p.seed = 14;
    std::vector<RoundRecord> records;
    p.observer = [&records](const RoundRecord& r) { records.push_back(r); };
    const auto rep = run_session(p);
    CHECK(eve_info_fraction(records) == doctest::Approx(*rep.eve_info_fraction));
    CHECK(counterfactual_detection_events(records) == rep.counterfactual_detections);
  }
}

TEST_CASE("counterfactual detection events") {
  SUBCASE("qci probe at R = 0.5") {
    const long n = 1000000;
    const auto rep = session(0.5, EveStrategy::QCIProbe, n, 15);
    const double rate = static_cast<double>(rep.counterfactual_detections) / n;
    CHECK(std::abs(rate - 0.125) <= 4.0 * binom_sigma(0.125, n));
  }
  SUBCASE("no adversary, no counterfactual detections") {
    const auto rep = session(0.5, EveStrategy::None, 100000, 16);
    CHECK(rep.counterfactual_detections == 0);
  }
  SUBCASE("small-R grid point follows RT/2") {
    const long n = 2000000;
    const double r = 0.01, expect = r * (1.0 - r) / 2.0;
    const auto rep = session(r, EveStrategy::QCIProbe, n, 17);
    const double rate = static_cast<double>(rep.counterfactual_detections) / n;
    CHECK(std::abs(rate - expect) <= 4.0 * binom_sigma(expect, n));
  }
}

TEST_CASE("qci joint frequencies match the four-way decomposition") {
  const long n = 1000000;
  const auto rep = session(0.5, EveStrategy::QCIProbe, n, 18);
  const auto q = oracle::qci_table(0.5);
  const double expect[4] = {q.p1, q.p2, q.p3, q.p4};
  for (int i = 0; i < 4; ++i) {
    const double freq = static_cast<double>(rep.qci_counts[i]) / n;
    CHECK(std::abs(freq - expect[i]) <= 4.0 * binom_sigma(expect[i], n));
  }
}
