#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "quantone/pregroup.hpp"
#include "quantone/random.hpp"

namespace quantone {

/// Qubits carried by each wire of a given base type.
struct QubitAssignment {
  int q_n = 2;
  int q_s = 1;

  int qubits(const BasicType& t) const { return t.base == Base::N ? q_n : q_s; }
  int qubits(std::span<const BasicType> type) const;

  friend bool operator==(const QubitAssignment&, const QubitAssignment&) = default;
};

/// Word blocks on one qubit use an Euler (RX, RZ, RX) triple; wider blocks
/// use `iqp_layers` IQP layers.
struct AnsatzConfig {
  int iqp_layers = 3;

  /// 3 for a single qubit, iqp_layers * (k - 1) otherwise.
  int param_count(int num_qubits) const {
    return num_qubits == 1 ? 3 : iqp_layers * (num_qubits - 1);
  }

  friend bool operator==(const AnsatzConfig&, const AnsatzConfig&) = default;
};

class MissingParameters : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Trained (or initial) classifier state: one angle vector per snippet.
struct Model {
  std::map<std::string, std::vector<double>> params;
  QubitAssignment qa;
  AnsatzConfig ac;
  double epsilon = 1e-9;
  double threshold = 0.5;

  /// Throws MissingParameters if the snippet has no parameters.
  const std::vector<double>& at(const std::string& snippet) const;

  friend bool operator==(const Model&, const Model&) = default;
};

/// Draws every slot of `layout` uniformly from [0, 2*pi).
Model init_model(const std::map<std::string, int>& layout, const QubitAssignment& qa,
                 const AnsatzConfig& ac, Rng& rng);

std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace quantone
