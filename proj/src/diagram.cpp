#include "quantone/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "quantone/circuit.hpp"
#include "quantone/sim.hpp"
#include "tensor.hpp"

namespace quantone {

int PregroupDiagram::wire_count() const {
  int n = 0;
  for (const auto& w : words) n += static_cast<int>(w.type.size());
  return n;
}

std::vector<BasicType> PregroupDiagram::wires() const {
  std::vector<BasicType> out;
  for (const auto& w : words) out.insert(out.end(), w.type.begin(), w.type.end());
  return out;
}

std::vector<BasicType> PregroupDiagram::open_wires() const {
  const auto all = wires();
  std::vector<BasicType> out;
  for (int o : open) out.push_back(all.at(static_cast<std::size_t>(o)));
  return out;
}

std::vector<int> PregroupDiagram::offsets() const {
  std::vector<int> out;
  int acc = 0;
  for (const auto& w : words) {
    out.push_back(acc);
    acc += static_cast<int>(w.type.size());
  }
  return out;
}

int PregroupDiagram::word_of(int occurrence) const {
  int acc = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    acc += static_cast<int>(words[i].type.size());
    if (occurrence < acc) return static_cast<int>(i);
  }
  throw std::out_of_range("wire occurrence out of range");
}

namespace {

void add_word(PregroupDiagram& d, int& next, const Token& token) {
  d.words.push_back(WordBox{token, functor_type(token.type), false});
  next += static_cast<int>(d.words.back().type.size());
}

/// Appends the words of `tree`; returns the occurrence of its open s wire.
int build(const DerivationTree& tree, PregroupDiagram& d, int& next) {
  if (const auto* g = std::get_if<GroundLeaf>(&tree.node)) {
    const int o = next;
    add_word(d, next, g->token);
    return o;
  }
  if (const auto* b = std::get_if<BasicSeq>(&tree.node)) {
    const int o = next;
    for (const auto& p : b->motif.primaries) add_word(d, next, p);
    add_word(d, next, b->secondary);
    // n n n n | n.r n.r n.r n.r s : nested cups around the motif boundary.
    for (int i = 0; i < 4; ++i) d.cups.push_back({o + 3 - i, o + 4 + i});
    return o + 8;
  }
  const auto& c = std::get<CompositeSeq>(tree.node);
  const int o = next;
  add_word(d, next, c.tertiary);
  const int first = build(c.parts[0], d, next);
  const int second = build(c.parts[1], d, next);
  // s s.l s.l : the inner s.l takes the first sentence, the outer the second.
  d.cups.push_back({o + 2, first});
  d.cups.push_back({o + 1, second});
  return o;
}

bool by_left(const WirePair& a, const WirePair& b) { return a.left < b.left; }

}  // namespace

PregroupDiagram cfg_to_pregroup(const DerivationTree& tree) {
  PregroupDiagram d;
  int next = 0;
  d.open.push_back(build(tree, d, next));
  std::sort(d.cups.begin(), d.cups.end(), by_left);
  return d;
}

bool reduces_to_s(const PregroupDiagram& d) { return reduces_to_s(d.wires()); }

bool is_planar(const std::vector<WirePair>& pairs) {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      const auto& a = pairs[i];
      const auto& b = pairs[j];
      const bool cross1 = a.left < b.left && b.left < a.right && a.right < b.right;
      const bool cross2 = b.left < a.left && a.left < b.right && b.right < a.right;
      if (cross1 || cross2) return false;
    }
  }
  return true;
}

bool is_well_wired(const PregroupDiagram& d) {
  std::vector<int> uses(static_cast<std::size_t>(d.wire_count()), 0);
  auto mark = [&](int o) {
    if (o < 0 || o >= static_cast<int>(uses.size())) return false;
    ++uses[static_cast<std::size_t>(o)];
    return true;
  };
  for (const auto* set : {&d.cups, &d.links}) {
    for (const auto& p : *set) {
      if (p.left >= p.right || !mark(p.left) || !mark(p.right)) return false;
    }
  }
  for (int o : d.open) {
    if (!mark(o)) return false;
  }
  return std::all_of(uses.begin(), uses.end(), [](int u) { return u == 1; });
}

PregroupDiagram rewrite(const PregroupDiagram& d) {
  if (d.cups.empty()) return d;
  if (d.open.size() != 1) {
    throw std::invalid_argument("rewrite expects a sentence diagram with one open wire");
  }
  const std::size_t n = d.words.size();
  std::vector<std::vector<int>> adjacent(n);
  for (const auto& cup : d.cups) {
    const int a = d.word_of(cup.left);
    const int b = d.word_of(cup.right);
    adjacent[static_cast<std::size_t>(a)].push_back(b);
    adjacent[static_cast<std::size_t>(b)].push_back(a);
  }

  // Two-colour the cup graph from the sentence head: states and effects
  // alternate, so every cup joins a state wire to an effect wire.
  std::vector<int> colour(n, -1);
  const int root = d.word_of(d.open.front());
  colour[static_cast<std::size_t>(root)] = d.words[static_cast<std::size_t>(root)].rotated ? 1 : 0;
  std::queue<int> frontier;
  frontier.push(root);
  while (!frontier.empty()) {
    const int w = frontier.front();
    frontier.pop();
    for (int v : adjacent[static_cast<std::size_t>(w)]) {
      auto& cv = colour[static_cast<std::size_t>(v)];
      const int want = 1 - colour[static_cast<std::size_t>(w)];
      if (cv < 0) {
        cv = want;
        frontier.push(v);
      } else if (cv != want) {
        throw std::logic_error("cup graph is not bipartite; cannot straighten cups");
      }
    }
  }

  PregroupDiagram out = d;
  for (std::size_t i = 0; i < n; ++i) {
    if (colour[i] >= 0) out.words[i].rotated = colour[i] == 1;
  }
  out.links.insert(out.links.end(), d.cups.begin(), d.cups.end());
  out.cups.clear();
  std::sort(out.links.begin(), out.links.end(), by_left);
  return out;
}

std::string dump(const PregroupDiagram& d) {
  std::ostringstream out;
  const auto offs = d.offsets();
  out << "words " << d.words.size() << '\n';
  for (std::size_t i = 0; i < d.words.size(); ++i) {
    const auto& w = d.words[i];
    out << offs[i] << ' ' << w.token.name;
    for (const auto& t : w.type) out << ' ' << t.str();
    out << ' ' << (w.rotated ? "effect" : "state") << '\n';
  }
  out << "cups " << d.cups.size() << '\n';
  for (const auto& c : d.cups) out << c.left << ' ' << c.right << '\n';
  out << "links " << d.links.size() << '\n';
  for (const auto& c : d.links) out << c.left << ' ' << c.right << '\n';
  out << "open";
  const auto all = d.wires();
  for (int o : d.open) out << ' ' << o << ':' << all.at(static_cast<std::size_t>(o)).str();
  out << '\n';
  return out.str();
}

namespace {

using cd = std::complex<double>;
using Mat2 = std::array<cd, 4>;   // row-major
using Mat4 = std::array<cd, 16>;  // row-major, index = bit(q0) + 2 * bit(q1)

std::vector<BoundGate> bound_block(const WordBox& word, const Model& model, int& width) {
  width = model.qa.qubits(word.type);
  const auto gates = word_block(word.token.name, width, model.ac);
  const auto& theta = model.at(word.token.name);
  if (static_cast<int>(theta.size()) != model.ac.param_count(width)) {
    throw SlotCountMismatch("snippet '" + word.token.name + "' has " +
                            std::to_string(theta.size()) + " angles, block needs " +
                            std::to_string(model.ac.param_count(width)));
  }
  std::vector<BoundGate> out;
  for (const auto& g : gates) {
    out.push_back({g.kind, g.q0, g.q1,
                   g.param ? theta[static_cast<std::size_t>(g.param->slot)] : 0.0});
  }
  return out;
}

Mat2 matrix_1q(const BoundGate& g) {
  using namespace std::complex_literals;
  const double r = 1.0 / std::sqrt(2.0);
  switch (g.kind) {
    case GateKind::H: return {r, r, r, -r};
    case GateKind::RX: {
      const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
      return {c, -1i * s, -1i * s, c};
    }
    case GateKind::RZ:
      return {std::polar(1.0, -g.angle / 2), 0.0, 0.0, std::polar(1.0, g.angle / 2)};
    default: throw std::logic_error("not a single-qubit gate");
  }
}

Mat4 matrix_2q(const BoundGate& g) {
  Mat4 m{};
  if (g.kind == GateKind::CRZ) {
    m[0] = 1.0;
    m[5] = std::polar(1.0, -g.angle / 2);  // control=1, target=0
    m[10] = 1.0;
    m[15] = std::polar(1.0, g.angle / 2);
  } else if (g.kind == GateKind::CNOT) {
    m[0 * 4 + 0] = 1.0;
    m[3 * 4 + 1] = 1.0;  // |c=1,t=0> -> |c=1,t=1>
    m[2 * 4 + 2] = 1.0;
    m[1 * 4 + 3] = 1.0;
  } else {
    throw std::logic_error("not a two-qubit gate");
  }
  return m;
}

template <std::size_t N>
std::array<cd, N * N> transpose(const std::array<cd, N * N>& m) {
  std::array<cd, N * N> t{};
  for (std::size_t r = 0; r < N; ++r) {
    for (std::size_t c = 0; c < N; ++c) t[c * N + r] = m[r * N + c];
  }
  return t;
}

/// row <- row * M for M acting on the given qubits.
void row_times(std::vector<cd>& row, const std::vector<int>& qubits, const cd* m, int dim) {
  std::vector<cd> out(row.size(), 0.0);
  std::size_t mask = 0;
  for (int q : qubits) mask |= std::size_t{1} << q;
  auto local = [&](std::size_t idx) {
    int v = 0;
    for (std::size_t k = 0; k < qubits.size(); ++k) v |= static_cast<int>((idx >> qubits[k]) & 1U) << k;
    return v;
  };
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] == cd{}) continue;
    const int li = local(i);
    const std::size_t rest = i & ~mask;
    for (int lj = 0; lj < dim; ++lj) {
      std::size_t j = rest;
      for (std::size_t k = 0; k < qubits.size(); ++k) {
        j |= static_cast<std::size_t>((lj >> k) & 1) << qubits[k];
      }
      out[j] += row[i] * m[li * dim + lj];
    }
  }
  row = std::move(out);
}

}  // namespace

std::vector<std::complex<double>> word_state(const WordBox& word, const Model& model) {
  int width = 0;
  const auto gates = bound_block(word, model, width);
  StateVector state(width);
  for (const auto& g : gates) state.apply(g);
  auto amps = state.amplitudes();
  return {amps.begin(), amps.end()};
}

std::vector<std::complex<double>> word_effect(const WordBox& word, const Model& model) {
  // <0| C^T with C^T = G_1^T G_2^T ... G_m^T for C = G_m ... G_1.
  int width = 0;
  const auto gates = bound_block(word, model, width);
  std::vector<cd> row(std::size_t{1} << width, 0.0);
  row[0] = 1.0;
  for (const auto& g : gates) {
    if (arity(g.kind) == 1) {
      const auto t = transpose<2>(matrix_1q(g));
      row_times(row, {g.q0}, t.data(), 2);
    } else {
      const auto t = transpose<4>(matrix_2q(g));
      row_times(row, {g.q0, g.q1}, t.data(), 4);
    }
  }
  return row;
}

std::vector<std::complex<double>> tensor_eval(const PregroupDiagram& d, const Model& model) {
  const auto offs = d.offsets();
  std::vector<int> rename(static_cast<std::size_t>(d.wire_count()));
  for (std::size_t i = 0; i < rename.size(); ++i) rename[i] = static_cast<int>(i);
  for (const auto* set : {&d.cups, &d.links}) {
    for (const auto& p : *set) {
      if (d.word_of(p.left) == d.word_of(p.right)) {
        throw std::logic_error("cup joins two wires of the same word");
      }
      rename[static_cast<std::size_t>(p.right)] = p.left;
    }
  }

  std::vector<detail::Tensor> tensors;
  for (std::size_t i = 0; i < d.words.size(); ++i) {
    const auto& w = d.words[i];
    detail::Tensor t;
    for (std::size_t k = 0; k < w.type.size(); ++k) {
      const int occ = offs[i] + static_cast<int>(k);
      t.legs.push_back({rename[static_cast<std::size_t>(occ)], model.qa.qubits(w.type[k])});
    }
    t.data = w.rotated ? word_effect(w, model) : word_state(w, model);
    tensors.push_back(std::move(t));
  }
  auto result = detail::contract_network(std::move(tensors));
  std::vector<int> order;
  for (int o : d.open) order.push_back(rename[static_cast<std::size_t>(o)]);
  return detail::permute(result, order).data;
}

}  // namespace quantone
