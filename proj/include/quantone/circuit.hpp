#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "quantone/diagram.hpp"
#include "quantone/model.hpp"
#include "quantone/sim.hpp"

namespace quantone {

/// Reference to one angle slot of a snippet's parameter vector.
struct ParamRef {
  std::string snippet;
  int slot = 0;

  friend bool operator==(const ParamRef&, const ParamRef&) = default;
};

struct Gate {
  GateKind kind = GateKind::H;
  int q0 = 0;
  int q1 = -1;
  std::optional<ParamRef> param;

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Parameterised circuit for one composition.
struct ParamCircuit {
  int width = 0;
  std::vector<Gate> gates;
  std::vector<int> postselect;  // each must read 0, ascending
  int readout = 0;
  std::map<std::string, int> param_table;  // snippet -> slot count

  friend bool operator==(const ParamCircuit&, const ParamCircuit&) = default;
};

class NonSentenceDiagram : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SlotCountMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Word preparation block on local qubits 0..num_qubits-1: an Euler
/// RX-RZ-RX triple for one qubit, otherwise `iqp_layers` layers of H on
/// every qubit followed by CRZ on each adjacent pair.
std::vector<Gate> word_block(const std::string& snippet, int num_qubits, const AnsatzConfig& ac);

/// Slot count per lexicon entry, from the qubit width of its functor type.
std::map<std::string, int> param_vector_layout(const Lexicon& lexicon, const QubitAssignment& qa,
                                               const AnsatzConfig& ac);

/// Qubits a compiled diagram needs: the wires of every unrotated word.
int diagram_width(const PregroupDiagram& d, const QubitAssignment& qa);

/// Appends a Bell effect on (a, b): CNOT(a -> b), H(a), postselect both.
void append_bell_effect(ParamCircuit& circuit, int a, int b);

/// Compiles a sentence diagram. Unrotated words become preparation blocks
/// on fresh qubits in word order; each cup becomes one Bell effect per
/// qubit pair; each rotated word replays its block in reverse on the
/// qubits it is linked to and postselects them. The open s wire (which must
/// carry a single qubit) is the readout. Throws NonSentenceDiagram.
ParamCircuit compile(const PregroupDiagram& d, const QubitAssignment& qa, const AnsatzConfig& ac);

/// Substitutes model angles. Throws MissingParameters or SlotCountMismatch.
BoundCircuit bind(const ParamCircuit& circuit, const Model& model);

std::string dump(const ParamCircuit& circuit);

/// Flat parameter vector layout over snippets (ordered by name).
class ParamLayout {
 public:
  ParamLayout() = default;
  explicit ParamLayout(const std::map<std::string, int>& slots);

  std::size_t size() const { return total_; }
  std::size_t offset(const std::string& snippet) const;
  int count(const std::string& snippet) const;
  bool contains(const std::string& snippet) const { return entries_.count(snippet) != 0; }
  const std::map<std::string, std::pair<std::size_t, int>>& entries() const { return entries_; }

  std::vector<double> flatten(const Model& model) const;
  void unflatten(std::span<const double> flat, Model& model) const;

 private:
  std::map<std::string, std::pair<std::size_t, int>> entries_;
  std::size_t total_ = 0;
};

/// A circuit with every parameter resolved to a flat index, for repeated
/// binding inside optimisation loops.
class CompiledCircuit {
 public:
  CompiledCircuit(ParamCircuit circuit, const ParamLayout& layout);

  const ParamCircuit& circuit() const { return circuit_; }
  BoundCircuit bind(std::span<const double> flat) const;

 private:
  ParamCircuit circuit_;
  std::vector<long> index_;  // per gate, -1 when unparameterised
};

}  // namespace quantone
