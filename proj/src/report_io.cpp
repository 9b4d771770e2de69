#include "cfqkd/report_io.hpp"

#include <cstdio>
#include <sstream>

namespace cfqkd {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::string report_to_text(const SessionReport& rep) {
  std::ostringstream out;
  out << "reflectivity=" << fmt(rep.reflectivity) << "\n";
  out << "round_trip_phase=" << fmt(rep.round_trip_phase) << "\n";
  out << "strategy=" << strategy_name(rep.strategy) << "\n";
  out << "seed=" << rep.seed << "\n";
  out << "error_fraction=" << fmt(rep.error_fraction) << "\n";
  out << "rounds=" << rep.rounds << "\n";
  out << "d1_clicks=" << rep.d1_clicks << "\n";
  out << "d2_clicks=" << rep.d2_clicks << "\n";
  out << "d3_clicks=" << rep.d3_clicks << "\n";
  out << "loss_events=" << rep.loss_events << "\n";
  out << "sifted_count=" << rep.sifted_count << "\n";
  out << "sift_rate=" << fmt(rep.sift_rate) << "\n";
  out << "d3_anomalies=" << rep.d3_anomalies << "\n";
  out << "d2_pol_anomalies=" << rep.d2_pol_anomalies << "\n";
  out << "agreed_sifted=" << rep.agreed_sifted << "\n";
  out << "eve_known_agreed=" << rep.eve_known_agreed << "\n";
  out << "eve_info_fraction=" << (rep.eve_info_fraction ? fmt(*rep.eve_info_fraction) : "none") << "\n";
  out << "counterfactual_sifted=" << rep.counterfactual_sifted << "\n";
  out << "counterfactual_fraction=" << fmt(rep.counterfactual_fraction) << "\n";
  out << "counterfactual_detections=" << rep.counterfactual_detections << "\n";
  out << "qci_success_ok=" << rep.qci_counts[0] << "\n";
  out << "qci_success_error=" << rep.qci_counts[1] << "\n";
  out << "qci_fail_ok=" << rep.qci_counts[2] << "\n";
  out << "qci_fail_error=" << rep.qci_counts[3] << "\n";
  out << "qber=" << (rep.qber ? fmt(*rep.qber) : "none") << "\n";
  out << "qber_sample=" << rep.qber_sample << "\n";
  out << "key_length=" << rep.key_length << "\n";
  return out.str();
}

nlohmann::json report_to_json(const SessionReport& rep) {
  nlohmann::json j;
  j["reflectivity"] = rep.reflectivity;
  j["round_trip_phase"] = rep.round_trip_phase;
  j["strategy"] = strategy_name(rep.strategy);
  j["seed"] = rep.seed;
  j["error_fraction"] = rep.error_fraction;
  j["rounds"] = rep.rounds;
  j["d1_clicks"] = rep.d1_clicks;
  j["d2_clicks"] = rep.d2_clicks;
  j["d3_clicks"] = rep.d3_clicks;
  j["loss_events"] = rep.loss_events;
  j["sifted_count"] = rep.sifted_count;
  j["sift_rate"] = rep.sift_rate;
  j["d3_anomalies"] = rep.d3_anomalies;
  j["d2_pol_anomalies"] = rep.d2_pol_anomalies;
  j["agreed_sifted"] = rep.agreed_sifted;
  j["eve_known_agreed"] = rep.eve_known_agreed;
  if (rep.eve_info_fraction) {
    j["eve_info_fraction"] = *rep.eve_info_fraction;
  } else {
    j["eve_info_fraction"] = nullptr;
  }
  j["counterfactual_sifted"] = rep.counterfactual_sifted;
  j["counterfactual_fraction"] = rep.counterfactual_fraction;
  j["counterfactual_detections"] = rep.counterfactual_detections;
  j["qci_counts"] = {rep.qci_counts[0], rep.qci_counts[1], rep.qci_counts[2],
                     rep.qci_counts[3]};
  if (rep.qber) {
    j["qber"] = *rep.qber;
  } else {
    j["qber"] = nullptr;
  }
  j["qber_sample"] = rep.qber_sample;
  j["key_length"] = rep.key_length;
  return j;
}

nlohmann::json round_to_json(const RoundRecord& r) {
  nlohmann::json j;
  j["alice_bit"] = r.alice_bit;
  j["bob_bit"] = r.bob_bit;
  j["outcome"] = outcome_name(r.branch.outcome);
  j["detected_pol"] = std::string(1, pol_char(r.branch.detected_pol));
  j["photon_entered_b"] = r.branch.photon_entered_b;
  j["sifted"] = r.sifted;
  if (r.error_bit) j["error_bit"] = *r.error_bit;
  j["counterfactual"] = r.counterfactual;
  if (r.eve.eve_pol) j["eve_pol"] = std::string(1, pol_char(*r.eve.eve_pol));
  j["eve_forward_detection"] = r.eve.forward_detection;
  j["eve_return_detection"] = r.eve.return_detection;
  j["keep_flag"] = r.announcement.keep_flag;
  return j;
}

void write_detection_csv(std::ostream& out, const std::vector<double>& grid) {
  out << "R,T,scenario,p_d1,p_d2,p_d3\n";
  for (double r : grid) {
    for (auto sc : {oracle::Scenario::Blocked, oracle::Scenario::Unblocked}) {
      const auto tab = oracle::detection_table(r, sc);
      out << fmt(r) << ',' << fmt(1.0 - r) << ','
          << (sc == oracle::Scenario::Blocked ? "blocked" : "unblocked") << ','
          << fmt(tab.p_d1) << ',' << fmt(tab.p_d2) << ',' << fmt(tab.p_d3) << "\n";
    }
  }
}

void write_attack_csv(std::ostream& out, const std::vector<double>& grid) {
  out << "R,T,strategy,sift_rate,qber,eve_info,d3_anomaly_rate,d1_rate\n";
  for (double r : grid) {
    for (auto s : {EveStrategy::SimpleIR, EveStrategy::ModifiedIR}) {
      const auto rep = oracle::attack_report(r, s);
      out << fmt(r) << ',' << fmt(1.0 - r) << ',' << strategy_name(s) << ','
          << fmt(rep.sift_rate) << ',' << fmt(rep.qber) << ',' << fmt(rep.eve_info)
          << ',' << fmt(rep.d3_anomaly_rate) << ',' << fmt(rep.d1_rate) << "\n";
    }
  }
}

void write_qci_csv(std::ostream& out, const std::vector<double>& grid) {
  out << "R,T,p1,p2,p3,p4\n";
  for (double r : grid) {
    const auto q = oracle::qci_table(r);
    out << fmt(r) << ',' << fmt(1.0 - r) << ',' << fmt(q.p1) << ',' << fmt(q.p2)
        << ',' << fmt(q.p3) << ',' << fmt(q.p4) << "\n";
  }
}

std::string verdict_to_text(const oracle::Verdict& verdict) {
  std::ostringstream out;
  for (const auto& c : verdict.checks) {
    out << (c.pass ? "pass" : "FAIL") << "  " << c.name << "  observed="
        << fmt(c.observed) << "  expected=" << fmt(c.expected) << "  z=" << fmt(c.z)
        << "\n";
  }
  out << (verdict.pass ? "verdict: pass" : "verdict: FAIL") << "\n";
  return out.str();
}

}  // namespace cfqkd
