#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kvg/scenarios.hpp"
#include "scenarios/embedded.hpp"

namespace kvg {

Registry Registry::builtin() {
  Registry r;
  for (const auto& s : embedded_scenarios()) r.add(s);
  return r;
}

std::string Registry::add(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("scenario JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("name") || !j["name"].is_string())
    throw ScenarioError("scenario JSON without a string 'name'");
  std::string name = j["name"].get<std::string>();
  sources_[name] = json_text;
  return name;
}

void Registry::load_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ScenarioError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      add(ss.str());
    } catch (const ScenarioError& e) {
      throw ScenarioError(f.filename().string() + ": " + e.what());
    }
  }
}

std::vector<std::string> Registry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : sources_) out.push_back(k);
  return out;
}

const std::string& Registry::source(const std::string& name) const {
  auto it = sources_.find(name);
  if (it == sources_.end()) throw UnknownScenario(name);
  return it->second;
}

Report run_scenario(const Registry& registry, const std::string& name, const ProbeConfig& cfg) {
  return run_scenario_text(registry.source(name), cfg);
}

std::vector<Report> run_all(const Registry& registry, const ProbeConfig& cfg) {
  std::vector<Report> out;
  for (const auto& n : registry.names()) out.push_back(run_scenario(registry, n, cfg));
  return out;
}

}  // namespace kvg
