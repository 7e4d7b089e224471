#include "funkmean/config_json.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "funkmean/error.hpp"
#include "funkmean/plot.hpp"

namespace funkmean {

using nlohmann::json;

namespace {

void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, where + ": expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) throw Error(ErrorCode::InvalidConfig, where + ": unknown key '" + item.key() + "'");
  }
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

SweepKind parse_sweep(const std::string& s) {
  if (s == "nu") return SweepKind::nu;
  if (s == "c") return SweepKind::c;
  throw Error(ErrorCode::InvalidConfig, "sweep must be 'nu' or 'c', got '" + s + "'");
}

}  // namespace

void to_json(json& j, const MaternParams& m) { j = json{{"sigma2", m.sigma2}, {"ell", m.ell}, {"nu", m.nu}}; }

void from_json(const json& j, MaternParams& m) {
  only_keys(j, {"sigma2", "ell", "nu"}, "matern");
  read_if(j, "sigma2", m.sigma2);
  read_if(j, "ell", m.ell);
  read_if(j, "nu", m.nu);
}

void to_json(json& j, const MeanSpec& m) {
  j = json{{"kind", to_string(m.kind)}, {"c", m.c}};
  if (m.kind == MeanSpec::Kind::custom_table) j["table"] = m.table;
}

void from_json(const json& j, MeanSpec& m) {
  only_keys(j, {"kind", "c", "table"}, "mean");
  if (j.contains("kind")) m.kind = parse_mean_kind(j.at("kind").get<std::string>());
  read_if(j, "c", m.c);
  read_if(j, "table", m.table);
}

void to_json(json& j, const GroupDesign& g) {
  j = json{{"matern", g.matern}, {"mean", g.mean}, {"follows_sweep", g.follows_sweep}};
}

void from_json(const json& j, GroupDesign& g) {
  only_keys(j, {"matern", "mean", "follows_sweep"}, "group");
  read_if(j, "matern", g.matern);
  read_if(j, "mean", g.mean);
  read_if(j, "follows_sweep", g.follows_sweep);
}

void to_json(json& j, const ExperimentConfig& c) {
  std::vector<std::string> bases;
  for (auto b : c.bases) bases.push_back(to_string(b));
  j = json{{"name", c.name},
           {"sizes", c.sizes},
           {"grid_points", c.grid_points},
           {"groups", c.groups},
           {"bases", bases},
           {"p_values", c.p_values},
           {"sweep", to_string(c.sweep)},
           {"sweep_values", c.sweep_values},
           {"replications", c.replications},
           {"bootstrap", c.bootstrap},
           {"alpha", c.alpha},
           {"seed", c.seed}};
}

void from_json(const json& j, ExperimentConfig& c) {
  only_keys(j,
            {"name", "sizes", "grid_points", "groups", "bases", "p_values", "sweep", "sweep_values", "replications",
             "bootstrap", "alpha", "seed"},
            "experiment");
  read_if(j, "name", c.name);
  read_if(j, "sizes", c.sizes);
  read_if(j, "grid_points", c.grid_points);
  read_if(j, "groups", c.groups);
  if (j.contains("bases")) {
    c.bases.clear();
    for (const auto& b : j.at("bases")) c.bases.push_back(parse_basis_family(b.get<std::string>()));
  }
  read_if(j, "p_values", c.p_values);
  if (j.contains("sweep")) c.sweep = parse_sweep(j.at("sweep").get<std::string>());
  read_if(j, "sweep_values", c.sweep_values);
  read_if(j, "replications", c.replications);
  read_if(j, "bootstrap", c.bootstrap);
  read_if(j, "alpha", c.alpha);
  read_if(j, "seed", c.seed);
}

json to_json(const TestResult& r) {
  json cond = json::array();
  for (const auto& e : r.condition_report) {
    cond.push_back({{"condition", e.condition}, {"lambda_min", e.lambda_min}, {"lambda_max", e.lambda_max}});
  }
  return json{{"t_flrt", r.t_flrt}, {"df", r.df},         {"w", r.w},
              {"p_normal", r.p_normal}, {"p_chisq", r.p_chisq}, {"condition_report", cond},
              {"warnings", r.warnings}};
}

json to_json(const BootstrapResult& r) {
  return json{{"p_boot", r.p_boot}, {"w_observed", r.w_observed}, {"reject", r.reject},
              {"seed", r.seed},     {"redraws", r.redraws},       {"B", r.w_star.size()},
              {"w_star", r.w_star}};
}

json to_json(const HotellingResult& r) {
  return json{{"t2", r.t2}, {"f", r.f}, {"df1", r.df1}, {"df2", r.df2}, {"p_value", r.p_value}};
}

json to_json(const RejectionTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"nu_or_c", r.sweep_value},
                    {"basis", r.basis},
                    {"p", r.p},
                    {"reject_rate", r.reject_rate},
                    {"R", r.R},
                    {"B", r.B},
                    {"seed", r.seed},
                    {"singular", r.singular}});
  }
  return json{{"sweep", to_string(t.sweep)}, {"rows", rows}};
}

json to_json(const DiagnosticCurve& c) {
  return json{{"basis", c.basis_label}, {"values", c.values}, {"warnings", c.warnings}};
}

json to_json(const ReorderProfile& p) {
  return json{{"basis", p.basis_label}, {"values", p.values}, {"p_values", p.p_values}, {"spikes", p.spikes}};
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  ExperimentConfig config;
  try {
    config = j.get<ExperimentConfig>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
  }
  validate(config);
  return config;
}

ExperimentConfig read_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOFailure, "cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_experiment_config(text.str());
}

json RunRecord::to_json() const {
  return json{{"command", command}, {"config", config}, {"seed", seed},
              {"timings", timings}, {"result", result}, {"version", version}};
}

RunRecord RunRecord::from_json(const json& j) {
  RunRecord r;
  try {
    r.command = j.at("command").get<std::string>();
    r.config = j.at("config");
    r.seed = j.at("seed").get<std::uint64_t>();
    r.timings = j.value("timings", json::object());
    r.result = j.at("result");
    r.version = j.value("version", std::string(kToolVersion));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("run record: ") + e.what());
  }
  return r;
}

void write_json_file(const json& j, const std::string& path) { write_text_file(path, j.dump(2) + "\n"); }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOFailure, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

}  // namespace funkmean
