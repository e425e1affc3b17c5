#include "quantone/circuit.hpp"

#include <algorithm>
#include <sstream>

namespace quantone {

std::vector<Gate> word_block(const std::string& snippet, int num_qubits, const AnsatzConfig& ac) {
  std::vector<Gate> gates;
  if (num_qubits == 1) {
    gates.push_back({GateKind::RX, 0, -1, ParamRef{snippet, 0}});
    gates.push_back({GateKind::RZ, 0, -1, ParamRef{snippet, 1}});
    gates.push_back({GateKind::RX, 0, -1, ParamRef{snippet, 2}});
    return gates;
  }
  int slot = 0;
  for (int layer = 0; layer < ac.iqp_layers; ++layer) {
    for (int q = 0; q < num_qubits; ++q) gates.push_back({GateKind::H, q, -1, std::nullopt});
    for (int q = 0; q + 1 < num_qubits; ++q) {
      gates.push_back({GateKind::CRZ, q, q + 1, ParamRef{snippet, slot++}});
    }
  }
  return gates;
}

std::map<std::string, int> param_vector_layout(const Lexicon& lexicon, const QubitAssignment& qa,
                                               const AnsatzConfig& ac) {
  std::map<std::string, int> layout;
  for (const auto& t : lexicon.entries()) {
    layout[t.name] = ac.param_count(qa.qubits(functor_type(t.type)));
  }
  return layout;
}

int diagram_width(const PregroupDiagram& d, const QubitAssignment& qa) {
  int width = 0;
  for (const auto& w : d.words) {
    if (!w.rotated) width += qa.qubits(w.type);
  }
  return width;
}

void append_bell_effect(ParamCircuit& circuit, int a, int b) {
  circuit.gates.push_back({GateKind::CNOT, a, b, std::nullopt});
  circuit.gates.push_back({GateKind::H, a, -1, std::nullopt});
  circuit.postselect.push_back(a);
  circuit.postselect.push_back(b);
}

namespace {

void note_params(ParamCircuit& c, const std::string& snippet, int count) {
  auto [it, inserted] = c.param_table.emplace(snippet, count);
  if (!inserted && it->second != count) {
    throw SlotCountMismatch("snippet '" + snippet + "' used with different block widths");
  }
}

}  // namespace

ParamCircuit compile(const PregroupDiagram& d, const QubitAssignment& qa, const AnsatzConfig& ac) {
  if (d.open.size() != 1 || d.open_wires().front() != kS || !reduces_to_s(d)) {
    throw NonSentenceDiagram("diagram does not reduce to a single open sentence wire");
  }
  if (qa.q_s != 1) {
    throw std::invalid_argument("compilation needs a one-qubit sentence wire (q_s = 1)");
  }
  if (!is_well_wired(d)) throw std::invalid_argument("diagram wiring is inconsistent");

  const auto offs = d.offsets();
  const auto types = d.wires();
  const auto owner = [&](int occ) -> const WordBox& {
    return d.words[static_cast<std::size_t>(d.word_of(occ))];
  };

  ParamCircuit c;
  std::vector<std::vector<int>> qubits(types.size());
  for (std::size_t i = 0; i < d.words.size(); ++i) {
    if (d.words[i].rotated) continue;
    for (std::size_t k = 0; k < d.words[i].type.size(); ++k) {
      auto& q = qubits[static_cast<std::size_t>(offs[i]) + k];
      for (int j = 0; j < qa.qubits(d.words[i].type[k]); ++j) q.push_back(c.width++);
    }
  }
  for (const auto& link : d.links) {
    const bool left_effect = owner(link.left).rotated;
    const bool right_effect = owner(link.right).rotated;
    if (left_effect == right_effect) {
      throw std::invalid_argument("link must join a state wire to an effect wire");
    }
    const int state = left_effect ? link.right : link.left;
    const int effect = left_effect ? link.left : link.right;
    qubits[static_cast<std::size_t>(effect)] = qubits[static_cast<std::size_t>(state)];
  }

  auto global_qubits = [&](std::size_t word) {
    std::vector<int> out;
    for (std::size_t k = 0; k < d.words[word].type.size(); ++k) {
      const auto& q = qubits[static_cast<std::size_t>(offs[word]) + k];
      if (q.empty()) throw std::invalid_argument("effect wire is not linked to any state");
      out.insert(out.end(), q.begin(), q.end());
    }
    return out;
  };
  auto emit = [&](const std::vector<Gate>& block, const std::vector<int>& map) {
    for (Gate g : block) {
      g.q0 = map[static_cast<std::size_t>(g.q0)];
      if (g.q1 >= 0) g.q1 = map[static_cast<std::size_t>(g.q1)];
      c.gates.push_back(std::move(g));
    }
  };

  for (std::size_t i = 0; i < d.words.size(); ++i) {
    const auto& w = d.words[i];
    if (w.rotated) continue;
    const int k = qa.qubits(w.type);
    note_params(c, w.token.name, ac.param_count(k));
    emit(word_block(w.token.name, k, ac), global_qubits(i));
  }
  for (const auto& cup : d.cups) {
    if (owner(cup.left).rotated || owner(cup.right).rotated) {
      throw std::invalid_argument("cup touches a rotated word");
    }
    const auto& a = qubits[static_cast<std::size_t>(cup.left)];
    const auto& b = qubits[static_cast<std::size_t>(cup.right)];
    for (std::size_t j = 0; j < a.size(); ++j) append_bell_effect(c, a[j], b[j]);
  }
  for (std::size_t i = 0; i < d.words.size(); ++i) {
    const auto& w = d.words[i];
    if (!w.rotated) continue;
    const int k = qa.qubits(w.type);
    note_params(c, w.token.name, ac.param_count(k));
    auto block = word_block(w.token.name, k, ac);
    std::reverse(block.begin(), block.end());  // every gate in the set is symmetric
    const auto map = global_qubits(i);
    emit(block, map);
    c.postselect.insert(c.postselect.end(), map.begin(), map.end());
  }

  c.readout = qubits[static_cast<std::size_t>(d.open.front())].front();
  std::sort(c.postselect.begin(), c.postselect.end());
  return c;
}

BoundCircuit bind(const ParamCircuit& circuit, const Model& model) {
  for (const auto& [name, count] : circuit.param_table) {
    const auto& v = model.at(name);
    if (static_cast<int>(v.size()) != count) {
      throw SlotCountMismatch("snippet '" + name + "' has " + std::to_string(v.size()) +
                              " angles, circuit expects " + std::to_string(count));
    }
  }
  BoundCircuit b{circuit.width, {}, circuit.postselect, circuit.readout};
  b.gates.reserve(circuit.gates.size());
  for (const auto& g : circuit.gates) {
    const double angle =
        g.param ? model.at(g.param->snippet)[static_cast<std::size_t>(g.param->slot)] : 0.0;
    b.gates.push_back({g.kind, g.q0, g.q1, angle});
  }
  return b;
}

std::string dump(const ParamCircuit& circuit) {
  std::ostringstream out;
  out << "width " << circuit.width << '\n';
  out << "readout " << circuit.readout << '\n';
  out << "gates " << circuit.gates.size() << '\n';
  for (const auto& g : circuit.gates) {
    out << to_string(g.kind) << ' ' << g.q0;
    if (g.q1 >= 0) out << ' ' << g.q1;
    if (g.param) out << ' ' << g.param->snippet << '[' << g.param->slot << ']';
    out << '\n';
  }
  out << "postselect " << circuit.postselect.size();
  for (int q : circuit.postselect) out << ' ' << q;
  out << '\n';
  out << "params";
  for (const auto& [name, count] : circuit.param_table) out << ' ' << name << ':' << count;
  out << '\n';
  return out.str();
}

ParamLayout::ParamLayout(const std::map<std::string, int>& slots) {
  for (const auto& [name, count] : slots) {
    entries_[name] = {total_, count};
    total_ += static_cast<std::size_t>(count);
  }
}

std::size_t ParamLayout::offset(const std::string& snippet) const {
  auto it = entries_.find(snippet);
  if (it == entries_.end()) throw MissingParameters("no parameter slots for '" + snippet + "'");
  return it->second.first;
}

int ParamLayout::count(const std::string& snippet) const {
  auto it = entries_.find(snippet);
  if (it == entries_.end()) throw MissingParameters("no parameter slots for '" + snippet + "'");
  return it->second.second;
}

std::vector<double> ParamLayout::flatten(const Model& model) const {
  std::vector<double> flat(total_);
  for (const auto& [name, entry] : entries_) {
    const auto& v = model.at(name);
    if (static_cast<int>(v.size()) != entry.second) {
      throw SlotCountMismatch("snippet '" + name + "' has the wrong number of angles");
    }
    std::copy(v.begin(), v.end(), flat.begin() + static_cast<long>(entry.first));
  }
  return flat;
}

void ParamLayout::unflatten(std::span<const double> flat, Model& model) const {
  for (const auto& [name, entry] : entries_) {
    auto first = flat.begin() + static_cast<long>(entry.first);
    model.params[name].assign(first, first + entry.second);
  }
}

CompiledCircuit::CompiledCircuit(ParamCircuit circuit, const ParamLayout& layout)
    : circuit_(std::move(circuit)) {
  for (const auto& [name, count] : circuit_.param_table) {
    if (layout.count(name) != count) {
      throw SlotCountMismatch("layout slot count for '" + name + "' does not match circuit");
    }
  }
  index_.reserve(circuit_.gates.size());
  for (const auto& g : circuit_.gates) {
    index_.push_back(g.param ? static_cast<long>(layout.offset(g.param->snippet)) + g.param->slot
                             : -1);
  }
}

BoundCircuit CompiledCircuit::bind(std::span<const double> flat) const {
  BoundCircuit b{circuit_.width, {}, circuit_.postselect, circuit_.readout};
  b.gates.reserve(circuit_.gates.size());
  for (std::size_t i = 0; i < circuit_.gates.size(); ++i) {
    const auto& g = circuit_.gates[i];
    b.gates.push_back(
        {g.kind, g.q0, g.q1, index_[i] >= 0 ? flat[static_cast<std::size_t>(index_[i])] : 0.0});
  }
  return b;
}

}  // namespace quantone
