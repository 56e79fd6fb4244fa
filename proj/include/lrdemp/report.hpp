// Deterministic JSON serialization of experiment reports. Key order is fixed
// so reruns with equal seed and config produce byte-identical documents.
#pragma once

#include <string>

#include <json.hpp>

#include "lrdemp/chain_grid.hpp"
#include "lrdemp/montecarlo.hpp"

namespace lrdemp {

using ordered_json = nlohmann::ordered_json;

ordered_json config_to_json(const ExperimentConfig& cfg);
ordered_json report_to_json(const ReductionReport& report);
ordered_json report_to_json(const MomentReport& report);
ordered_json report_to_json(const LimitReport& report);
ordered_json report_to_json(const ChainGridReport& report);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace lrdemp
