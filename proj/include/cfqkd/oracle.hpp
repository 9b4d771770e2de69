#pragma once

#include <string>
#include <vector>

#include "cfqkd/adversary.hpp"
#include "cfqkd/protocol.hpp"

namespace cfqkd {
namespace oracle {

// Closed-form tables transcribed from the protocol analysis. Deliberately not
// derived from the branch engine: the two implementations cross-check each
// other.

enum class Scenario { Blocked, Unblocked };

struct DetectionTable {
  Scenario scenario = Scenario::Blocked;
  double p_d1 = 0.0, p_d2 = 0.0, p_d3 = 0.0;
};

struct AttackReport {
  EveStrategy strategy = EveStrategy::SimpleIR;
  double sift_rate = 0.0;
  double qber = 0.0;
  double eve_info = 0.0;
  double d3_anomaly_rate = 0.0;
  double d1_rate = 0.0;
};

struct QciTable {
  double p1 = 0.0, p2 = 0.0, p3 = 0.0, p4 = 0.0;
};

DetectionTable detection_table(double reflectivity, Scenario scenario);
double sift_rate(double reflectivity, EveStrategy strategy);
AttackReport attack_report(double reflectivity, EveStrategy strategy);
QciTable qci_table(double reflectivity);

struct Bb84Reference {
  double qber = 0.25;
  double eve_info = 0.5;
};
Bb84Reference bb84_reference();

struct StatCheck {
  std::string name;
  double observed = 0.0;
  double expected = 0.0;
  double z = 0.0;
  bool pass = true;
};

struct Verdict {
  std::vector<StatCheck> checks;
  bool pass = true;
};

// Compares every statistic a session reports against the closed forms, with
// binomial standard errors; fails when any |z| > 4.
Verdict cross_validate(const SessionReport& report);

}  // namespace oracle
}  // namespace cfqkd
