#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "quantone/random.hpp"

namespace quantone {

using Amplitude = std::complex<double>;

enum class GateKind { H, RX, RZ, CRZ, CNOT };

std::string_view to_string(GateKind kind);
int arity(GateKind kind);
bool is_parameterized(GateKind kind);

/// Gate with a numeric angle. For CRZ and CNOT, q0 is the control.
struct BoundGate {
  GateKind kind = GateKind::H;
  int q0 = 0;
  int q1 = -1;
  double angle = 0.0;

  friend bool operator==(const BoundGate&, const BoundGate&) = default;
};

/// Fully numeric circuit: all qubits start in |0>, every qubit in
/// `postselect` must read 0, and `readout` carries the class outcome.
struct BoundCircuit {
  int width = 0;
  std::vector<BoundGate> gates;
  std::vector<int> postselect;
  int readout = 0;

  friend bool operator==(const BoundCircuit&, const BoundCircuit&) = default;
};

enum class Pauli { I, X, Y, Z };

/// Dense state over `width` qubits. Qubit q is bit q of the basis index
/// (qubit 0 least significant).
class StateVector {
 public:
  explicit StateVector(int width);

  int width() const { return width_; }
  std::span<const Amplitude> amplitudes() const { return amps_; }
  std::span<Amplitude> amplitudes() { return amps_; }

  void apply(const BoundGate& gate);
  void apply_pauli(Pauli p, int qubit);
  double norm2() const;

 private:
  void apply_1q(int q, const Amplitude m[4]);

  int width_;
  std::vector<Amplitude> amps_;
};

class WidthExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultWidthCap = 26;

/// Unnormalised weights of the two readout outcomes restricted to the
/// branch where every postselected qubit reads 0.
struct ReadoutWeights {
  double p0 = 0.0;
  double p1 = 0.0;

  double survival() const { return p0 + p1; }
};

StateVector simulate(const BoundCircuit& circuit, int width_cap = kDefaultWidthCap);
ReadoutWeights readout_weights(const StateVector& state, const BoundCircuit& circuit);
/// Born-rule weights of the postselected readout. Throws WidthExceeded.
ReadoutWeights evaluate_exact(const BoundCircuit& circuit, int width_cap = kDefaultWidthCap);

/// Synthetic device noise: depolarising Pauli errors after gates plus
/// independent readout bit flips.
struct NoiseConfig {
  double p1 = 0.001;
  double p2 = 0.01;
  double p_read = 0.02;
  bool enabled = false;

  /// Throws std::invalid_argument if a probability is outside [0, 1].
  void validate() const;
  bool gate_noise() const { return enabled && (p1 > 0.0 || p2 > 0.0); }
};

/// Draws the Pauli error (if any) following `gate`. Returns 0 for no error,
/// otherwise a code in [1, 4^arity): the Pauli on q0 is code % 4 and on q1
/// is code / 4 (0=I, 1=X, 2=Y, 3=Z).
int sample_noise_event(const BoundGate& gate, const NoiseConfig& noise, Rng& rng);
void apply_noise_code(StateVector& state, const BoundGate& gate, int code);
/// Trajectory step: with probability p1/p2 applies a uniformly chosen
/// non-identity Pauli on the gate's qubits.
void apply_noise_channel(StateVector& state, const BoundGate& gate, const NoiseConfig& noise,
                         Rng& rng);

struct ShotResult {
  std::int64_t shots_requested = 0;
  std::int64_t shots_usable = 0;
  std::int64_t count0 = 0;
  std::int64_t count1 = 0;

  friend bool operator==(const ShotResult&, const ShotResult&) = default;
};

class ZeroUsableShots : public std::runtime_error {
 public:
  explicit ZeroUsableShots(ShotResult result)
      : std::runtime_error("no shot survived postselection"), result_(result) {}
  const ShotResult& result() const { return result_; }

 private:
  ShotResult result_;
};

/// Runs `shots` measurement rounds, discarding rounds where a postselected
/// qubit reads 1. Throws ZeroUsableShots when nothing survives.
ShotResult sample(const BoundCircuit& circuit, std::int64_t shots, const NoiseConfig& noise,
                  Rng& rng, int width_cap = kDefaultWidthCap);

}  // namespace quantone
