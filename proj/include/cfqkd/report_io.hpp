#pragma once

#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "cfqkd/oracle.hpp"
#include "cfqkd/protocol.hpp"

namespace cfqkd {

// Flat key=value form of a session summary. Field set and order are stable;
// golden files pin them.
std::string report_to_text(const SessionReport& rep);

nlohmann::json report_to_json(const SessionReport& rep);

// One line-delimited JSON record per round, for --round-log.
nlohmann::json round_to_json(const RoundRecord& r);

// CSV emitters for the closed-form tables, one row per grid point.
void write_detection_csv(std::ostream& out, const std::vector<double>& grid);
void write_attack_csv(std::ostream& out, const std::vector<double>& grid);
void write_qci_csv(std::ostream& out, const std::vector<double>& grid);

std::string verdict_to_text(const oracle::Verdict& verdict);

}  // namespace cfqkd
