#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "funkmean/bootstrap.hpp"
#include "funkmean/diagnostics.hpp"
#include "funkmean/flrt.hpp"
#include "funkmean/simulate.hpp"

namespace funkmean {

inline constexpr const char* kToolVersion = "0.1.0";

// ExperimentConfig <-> JSON, field for field. Unknown keys are rejected.
void to_json(nlohmann::json& j, const MaternParams& m);
void from_json(const nlohmann::json& j, MaternParams& m);
void to_json(nlohmann::json& j, const MeanSpec& m);
void from_json(const nlohmann::json& j, MeanSpec& m);
void to_json(nlohmann::json& j, const GroupDesign& g);
void from_json(const nlohmann::json& j, GroupDesign& g);
void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

nlohmann::json to_json(const TestResult& r);
nlohmann::json to_json(const BootstrapResult& r);
nlohmann::json to_json(const HotellingResult& r);
nlohmann::json to_json(const RejectionTable& t);
nlohmann::json to_json(const DiagnosticCurve& c);
nlohmann::json to_json(const ReorderProfile& p);

/// Parses and validates. Throws ParseError for malformed JSON and InvalidConfig
/// for a bad schema or values.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig read_experiment_config(const std::string& path);

/// What a command did: enough to rerun it and compare the result payload.
struct RunRecord {
  std::string command;
  nlohmann::json config;
  std::uint64_t seed = 0;
  nlohmann::json timings = nlohmann::json::object();
  nlohmann::json result = nlohmann::json::object();
  std::string version = kToolVersion;

  nlohmann::json to_json() const;
  static RunRecord from_json(const nlohmann::json& j);
};

void write_json_file(const nlohmann::json& j, const std::string& path);
nlohmann::json read_json_file(const std::string& path);

}  // namespace funkmean
