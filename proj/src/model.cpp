#include "quantone/model.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace quantone {

int QubitAssignment::qubits(std::span<const BasicType> type) const {
  int total = 0;
  for (const auto& t : type) total += qubits(t);
  return total;
}

const std::vector<double>& Model::at(const std::string& snippet) const {
  auto it = params.find(snippet);
  if (it == params.end()) {
    throw MissingParameters("model has no parameters for snippet '" + snippet + "'");
  }
  return it->second;
}

Model init_model(const std::map<std::string, int>& layout, const QubitAssignment& qa,
                 const AnsatzConfig& ac, Rng& rng) {
  Model model;
  model.qa = qa;
  model.ac = ac;
  for (const auto& [name, count] : layout) {
    auto& v = model.params[name];
    v.resize(static_cast<std::size_t>(count));
    for (auto& x : v) x = 2.0 * std::numbers::pi * rng.uniform();
  }
  return model;
}

std::string model_to_json(const Model& model) {
  nlohmann::ordered_json j;
  j["format"] = "quantone-model/1";
  j["qubits"] = {{"n", model.qa.q_n}, {"s", model.qa.q_s}};
  j["ansatz"] = {{"iqp_layers", model.ac.iqp_layers}};
  j["epsilon"] = model.epsilon;
  j["threshold"] = model.threshold;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [name, v] : model.params) params[name] = v;
  j["params"] = std::move(params);
  return j.dump(2) + "\n";
}

Model model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ModelFormatError(std::string("malformed model file: ") + e.what());
  }
  if (j.value("format", "") != "quantone-model/1") {
    throw ModelFormatError("unsupported model format");
  }
  Model m;
  try {
    m.qa.q_n = j.at("qubits").at("n").get<int>();
    m.qa.q_s = j.at("qubits").at("s").get<int>();
    m.ac.iqp_layers = j.at("ansatz").at("iqp_layers").get<int>();
    m.epsilon = j.at("epsilon").get<double>();
    m.threshold = j.at("threshold").get<double>();
    for (const auto& [name, v] : j.at("params").items()) {
      m.params[name] = v.get<std::vector<double>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ModelFormatError(std::string("malformed model file: ") + e.what());
  }
  for (const auto& [name, v] : m.params) {
    for (double x : v) {
      if (!std::isfinite(x)) throw ModelFormatError("non-finite angle for '" + name + "'");
    }
  }
  return m;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file '" + path.string() + "'");
  out << model_to_json(model);
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace quantone
