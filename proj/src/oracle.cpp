#include "cfqkd/oracle.hpp"

#include <cmath>
#include <limits>

#include "cfqkd/errors.hpp"

namespace cfqkd {
namespace oracle {

namespace {

void check_reflectivity(double r) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw ConfigError("reflectivity must lie in [0,1]");
  }
}

// Exact proportion z-test. A zero (or unit) expectation admits no spread, so
// any deviation fails outright.
StatCheck rate_check(std::string name, double count, double n, double expected) {
  StatCheck c;
  c.name = std::move(name);
  c.expected = expected;
  if (n <= 0.0) {
    c.observed = 0.0;
    c.pass = true;
    return c;
  }
  c.observed = count / n;
  if (expected <= 0.0 || expected >= 1.0) {
    c.pass = c.observed == c.expected;
    c.z = c.pass ? 0.0 : std::numeric_limits<double>::infinity();
    return c;
  }
  const double se = std::sqrt(expected * (1.0 - expected) / n);
  c.z = (c.observed - expected) / se;
  c.pass = std::abs(c.z) <= 4.0;
  return c;
}

}  // namespace

DetectionTable detection_table(double reflectivity, Scenario scenario) {
  check_reflectivity(reflectivity);
  const double r = reflectivity;
  const double t = 1.0 - r;
  DetectionTable tab;
  tab.scenario = scenario;
  if (scenario == Scenario::Blocked) {
    tab.p_d1 = r * t;
    tab.p_d2 = r * r;
    tab.p_d3 = t;
  } else {
    tab.p_d1 = 0.0;
    tab.p_d2 = 1.0;
    tab.p_d3 = 0.0;
  }
  return tab;
}

double sift_rate(double reflectivity, EveStrategy strategy) {
  check_reflectivity(reflectivity);
  const double rt = reflectivity * (1.0 - reflectivity);
  switch (strategy) {
    case EveStrategy::None:
      return rt / 2.0;
    case EveStrategy::SimpleIR:
    case EveStrategy::ModifiedIR:
      return rt;
    case EveStrategy::QCIProbe:
      // Equal-polarization rounds keep their RT rate; unequal-polarization
      // rounds contribute the probe-induced error clicks TR + RT.
      return 1.5 * rt;
  }
  throw ConfigError("unknown strategy");
}

AttackReport attack_report(double reflectivity, EveStrategy strategy) {
  check_reflectivity(reflectivity);
  if (strategy != EveStrategy::SimpleIR && strategy != EveStrategy::ModifiedIR) {
    throw ConfigError("attack report covers the intercept-resend strategies only");
  }
  const double r = reflectivity;
  const double t = 1.0 - r;
  AttackReport rep;
  rep.strategy = strategy;
  rep.sift_rate = r * t;
  rep.d1_rate = r * t;
  if (strategy == EveStrategy::SimpleIR) {
    rep.qber = 0.5;
    rep.eve_info = 0.0;
    rep.d3_anomaly_rate = 0.0;
  } else {
    rep.qber = 0.25;
    rep.eve_info = 0.25;
    rep.d3_anomaly_rate = t / 4.0;
  }
  return rep;
}

QciTable qci_table(double reflectivity) {
  check_reflectivity(reflectivity);
  const double r = reflectivity;
  const double t = 1.0 - r;
  return QciTable{t / 2.0 + t * t / 2.0, t * r / 2.0, r / 2.0 + r * r / 2.0,
                  r * t / 2.0};
}

Bb84Reference bb84_reference() { return Bb84Reference{}; }

Verdict cross_validate(const SessionReport& rep) {
  const double r = rep.reflectivity;
  const double t = 1.0 - r;
  const double rt = r * t;
  const double n = static_cast<double>(rep.rounds);
  const double sifted = static_cast<double>(rep.sifted_count);

  Verdict v;
  auto add = [&v](StatCheck c) { v.checks.push_back(std::move(c)); };

  add(rate_check("sift_rate", sifted, n, sift_rate(r, rep.strategy)));

  double d1 = 0.0, d2 = 0.0, d3 = 0.0;
  switch (rep.strategy) {
    case EveStrategy::None:
      d1 = rt / 2.0;
      d2 = (1.0 + r * r) / 2.0;
      d3 = t / 2.0;
      break;
    case EveStrategy::SimpleIR:
      d1 = rt;
      d2 = (3.0 * r * r + t * t + 1.0) / 4.0;
      d3 = t / 2.0;
      break;
    case EveStrategy::ModifiedIR:
      d1 = rt;
      d2 = (3.0 * r * r + t * t + 1.0) / 4.0;
      d3 = t / 2.0;
      break;
    case EveStrategy::QCIProbe:
      d1 = 1.5 * rt;
      d2 = r * r + t * t / 2.0;
      d3 = t / 2.0;
      break;
  }
  add(rate_check("d1_rate", static_cast<double>(rep.d1_clicks), n, d1));
  add(rate_check("d2_rate", static_cast<double>(rep.d2_clicks), n, d2));
  add(rate_check("d3_rate", static_cast<double>(rep.d3_clicks), n, d3));

  double qber = 0.0, eve_info = 0.0, d3_anom = 0.0, cf_detect = 0.0;
  switch (rep.strategy) {
    case EveStrategy::None:
      break;
    case EveStrategy::SimpleIR:
      qber = 0.5;
      cf_detect = rt / 4.0;
      break;
    case EveStrategy::ModifiedIR:
      qber = 0.25;
      eve_info = 0.25;
      d3_anom = t / 4.0;
      cf_detect = rt / 4.0;
      break;
    case EveStrategy::QCIProbe:
      qber = sifted > 0.0 ? (qci_table(r).p2 + qci_table(r).p4) / sift_rate(r, rep.strategy) : 0.0;
      cf_detect = rt / 2.0;
      break;
  }
  if (rep.qber) {
    add(rate_check("qber", *rep.qber * static_cast<double>(rep.qber_sample),
                   static_cast<double>(rep.qber_sample), qber));
  }
  add(rate_check("eve_info", static_cast<double>(rep.eve_known_agreed), sifted, eve_info));
  add(rate_check("d3_anomaly_rate", static_cast<double>(rep.d3_anomalies), n, d3_anom));
  add(rate_check("counterfactual_detections",
                 static_cast<double>(rep.counterfactual_detections), n, cf_detect));
  add(rate_check("d2_pol_anomaly_rate", static_cast<double>(rep.d2_pol_anomalies), n, 0.0));

  if (rep.strategy == EveStrategy::None) {
    add(rate_check("counterfactual_fraction",
                   static_cast<double>(rep.counterfactual_sifted), sifted, 1.0));
  }
  if (rep.strategy == EveStrategy::QCIProbe) {
    const QciTable q = qci_table(r);
    const double expect[4] = {q.p1, q.p2, q.p3, q.p4};
    const char* names[4] = {"qci_p1", "qci_p2", "qci_p3", "qci_p4"};
    for (int i = 0; i < 4; ++i) {
      add(rate_check(names[i], static_cast<double>(rep.qci_counts[i]), n, expect[i]));
    }
  }

  for (const auto& c : v.checks) v.pass = v.pass && c.pass;
  return v;
}

}  // namespace oracle
}  // namespace cfqkd
