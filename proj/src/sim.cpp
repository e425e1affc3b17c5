#include "quantone/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace quantone {

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "H";
    case GateKind::RX: return "RX";
    case GateKind::RZ: return "RZ";
    case GateKind::CRZ: return "CRZ";
    case GateKind::CNOT: return "CNOT";
  }
  return "?";
}

int arity(GateKind kind) {
  return kind == GateKind::CRZ || kind == GateKind::CNOT ? 2 : 1;
}

bool is_parameterized(GateKind kind) {
  return kind == GateKind::RX || kind == GateKind::RZ || kind == GateKind::CRZ;
}

StateVector::StateVector(int width) : width_(width), amps_(std::size_t{1} << width) {
  amps_[0] = 1.0;
}

void StateVector::apply_1q(int q, const Amplitude m[4]) {
  const std::size_t stride = std::size_t{1} << q;
  const std::size_t n = amps_.size();
  for (std::size_t base = 0; base < n; base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const Amplitude a0 = amps_[i];
      const Amplitude a1 = amps_[i + stride];
      amps_[i] = m[0] * a0 + m[1] * a1;
      amps_[i + stride] = m[2] * a0 + m[3] * a1;
    }
  }
}

void StateVector::apply(const BoundGate& g) {
  using namespace std::complex_literals;
  switch (g.kind) {
    case GateKind::H: {
      const double r = 1.0 / std::sqrt(2.0);
      const Amplitude m[4] = {r, r, r, -r};
      apply_1q(g.q0, m);
      return;
    }
    case GateKind::RX: {
      const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
      const Amplitude m[4] = {c, -1i * s, -1i * s, c};
      apply_1q(g.q0, m);
      return;
    }
    case GateKind::RZ: {
      const Amplitude m[4] = {std::polar(1.0, -g.angle / 2), 0.0, 0.0,
                              std::polar(1.0, g.angle / 2)};
      apply_1q(g.q0, m);
      return;
    }
    case GateKind::CRZ: {
      const std::size_t cbit = std::size_t{1} << g.q0;
      const std::size_t tbit = std::size_t{1} << g.q1;
      const Amplitude ph0 = std::polar(1.0, -g.angle / 2);
      const Amplitude ph1 = std::polar(1.0, g.angle / 2);
      for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & cbit) amps_[i] *= (i & tbit) ? ph1 : ph0;
      }
      return;
    }
    case GateKind::CNOT: {
      const std::size_t cbit = std::size_t{1} << g.q0;
      const std::size_t tbit = std::size_t{1} << g.q1;
      for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & cbit) && !(i & tbit)) std::swap(amps_[i], amps_[i | tbit]);
      }
      return;
    }
  }
}

void StateVector::apply_pauli(Pauli p, int q) {
  using namespace std::complex_literals;
  switch (p) {
    case Pauli::I: return;
    case Pauli::X: {
      const Amplitude m[4] = {0.0, 1.0, 1.0, 0.0};
      apply_1q(q, m);
      return;
    }
    case Pauli::Y: {
      const Amplitude m[4] = {0.0, -1i, 1i, 0.0};
      apply_1q(q, m);
      return;
    }
    case Pauli::Z: {
      const Amplitude m[4] = {1.0, 0.0, 0.0, -1.0};
      apply_1q(q, m);
      return;
    }
  }
}

double StateVector::norm2() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

namespace {

void check_width(const BoundCircuit& c, int cap) {
  if (c.width > cap) {
    throw WidthExceeded("circuit width " + std::to_string(c.width) + " exceeds cap " +
                        std::to_string(cap));
  }
}

std::size_t postselect_mask(const BoundCircuit& c) {
  std::size_t mask = 0;
  for (int q : c.postselect) mask |= std::size_t{1} << q;
  return mask;
}

}  // namespace

StateVector simulate(const BoundCircuit& circuit, int width_cap) {
  check_width(circuit, width_cap);
  StateVector state(circuit.width);
  for (const auto& g : circuit.gates) state.apply(g);
  return state;
}

ReadoutWeights readout_weights(const StateVector& state, const BoundCircuit& circuit) {
  const std::size_t mask = postselect_mask(circuit);
  const std::size_t rbit = std::size_t{1} << circuit.readout;
  ReadoutWeights w;
  auto amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & mask) continue;
    (i & rbit ? w.p1 : w.p0) += std::norm(amps[i]);
  }
  return w;
}

ReadoutWeights evaluate_exact(const BoundCircuit& circuit, int width_cap) {
  return readout_weights(simulate(circuit, width_cap), circuit);
}

void NoiseConfig::validate() const {
  for (double p : {p1, p2, p_read}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("noise probabilities must lie in [0, 1]");
    }
  }
}

int sample_noise_event(const BoundGate& gate, const NoiseConfig& noise, Rng& rng) {
  if (!noise.enabled) return 0;
  const int a = arity(gate.kind);
  const double p = a == 1 ? noise.p1 : noise.p2;
  if (p <= 0.0 || !rng.bernoulli(p)) return 0;
  const std::size_t choices = a == 1 ? 3 : 15;
  return 1 + static_cast<int>(rng.below(choices));
}

void apply_noise_code(StateVector& state, const BoundGate& gate, int code) {
  if (code == 0) return;
  state.apply_pauli(static_cast<Pauli>(code % 4), gate.q0);
  if (arity(gate.kind) == 2) state.apply_pauli(static_cast<Pauli>(code / 4), gate.q1);
}

void apply_noise_channel(StateVector& state, const BoundGate& gate, const NoiseConfig& noise,
                         Rng& rng) {
  apply_noise_code(state, gate, sample_noise_event(gate, noise, rng));
}

namespace {

/// Cumulative outcome distribution of one trajectory.
std::vector<double> cumulative(const StateVector& state) {
  auto amps = state.amplitudes();
  std::vector<double> cdf(amps.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    acc += std::norm(amps[i]);
    cdf[i] = acc;
  }
  return cdf;
}

std::size_t draw(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.uniform() * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

}  // namespace

ShotResult sample(const BoundCircuit& circuit, std::int64_t shots, const NoiseConfig& noise,
                  Rng& rng, int width_cap) {
  if (shots < 1) throw std::invalid_argument("shots must be at least 1");
  noise.validate();
  check_width(circuit, width_cap);

  // Error patterns are drawn for every shot first, then each distinct
  // pattern is simulated once and its shots are measured together.
  using Pattern = std::vector<std::pair<int, int>>;  // (gate index, code)
  std::map<Pattern, std::int64_t> patterns;
  if (noise.gate_noise()) {
    for (std::int64_t s = 0; s < shots; ++s) {
      Pattern p;
      for (std::size_t g = 0; g < circuit.gates.size(); ++g) {
        if (int code = sample_noise_event(circuit.gates[g], noise, rng)) {
          p.emplace_back(static_cast<int>(g), code);
        }
      }
      ++patterns[p];
    }
  } else {
    patterns[{}] = shots;
  }

  const std::size_t mask = postselect_mask(circuit);
  const std::size_t rbit = std::size_t{1} << circuit.readout;
  const double p_read = noise.enabled ? noise.p_read : 0.0;

  ShotResult result;
  result.shots_requested = shots;
  for (const auto& [pattern, count] : patterns) {
    StateVector state(circuit.width);
    std::size_t next = 0;
    for (std::size_t g = 0; g < circuit.gates.size(); ++g) {
      state.apply(circuit.gates[g]);
      if (next < pattern.size() && pattern[next].first == static_cast<int>(g)) {
        apply_noise_code(state, circuit.gates[g], pattern[next].second);
        ++next;
      }
    }
    const auto cdf = cumulative(state);
    for (std::int64_t s = 0; s < count; ++s) {
      std::size_t outcome = draw(cdf, rng);
      if (p_read > 0.0) {
        for (int q = 0; q < circuit.width; ++q) {
          if (rng.bernoulli(p_read)) outcome ^= std::size_t{1} << q;
        }
      }
      if (outcome & mask) continue;
      ++result.shots_usable;
      ++(outcome & rbit ? result.count1 : result.count0);
    }
  }
  if (result.shots_usable == 0) throw ZeroUsableShots(result);
  return result;
}

}  // namespace quantone
