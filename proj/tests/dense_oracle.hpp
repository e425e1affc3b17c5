#pragma once

// Dense reference simulator: builds the full 2^n x 2^n unitary of every gate
// by Kronecker products and multiplies the chain. Shares no code with the
// library's statevector kernels.

#include <cmath>
#include <complex>
#include <vector>

#include "quantone/sim.hpp"

namespace oracle {

using C = std::complex<double>;

struct Matrix {
  int dim = 1;
  std::vector<C> a;  // row-major

  explicit Matrix(int d) : dim(d), a(static_cast<std::size_t>(d) * d) {}
  C& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * dim + c]; }
  C operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * dim + c]; }

  static Matrix identity(int d) {
    Matrix m(d);
    for (int i = 0; i < d; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline Matrix multiply(const Matrix& x, const Matrix& y) {
  Matrix out(x.dim);
  for (int i = 0; i < x.dim; ++i)
    for (int k = 0; k < x.dim; ++k) {
      const C v = x(i, k);
      if (v == C{}) continue;
      for (int j = 0; j < x.dim; ++j) out(i, j) += v * y(k, j);
    }
  return out;
}

inline Matrix kron(const Matrix& x, const Matrix& y) {
  Matrix out(x.dim * y.dim);
  for (int i = 0; i < x.dim; ++i)
    for (int j = 0; j < x.dim; ++j)
      for (int k = 0; k < y.dim; ++k)
        for (int l = 0; l < y.dim; ++l) out(i * y.dim + k, j * y.dim + l) = x(i, j) * y(k, l);
  return out;
}

inline Matrix pauli_x() {
  Matrix m(2);
  m(0, 1) = m(1, 0) = 1.0;
  return m;
}
inline Matrix pauli_z() {
  Matrix m(2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

/// exp(-i theta/2 P) = cos(theta/2) I - i sin(theta/2) P for a Pauli P.
inline Matrix rotation(const Matrix& pauli, double theta) {
  Matrix m = Matrix::identity(2);
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  for (auto& v : m.a) v *= c;
  for (std::size_t i = 0; i < m.a.size(); ++i) m.a[i] += C(0, -s) * pauli.a[i];
  return m;
}

inline Matrix hadamard() {
  Matrix m(2);
  const double r = 1.0 / std::sqrt(2.0);
  m(0, 0) = m(0, 1) = m(1, 0) = r;
  m(1, 1) = -r;
  return m;
}

/// Embeds a one-qubit matrix on `qubit` of an n-qubit register where qubit
/// 0 is the least significant index bit (so it is the rightmost factor).
inline Matrix embed1(const Matrix& g, int qubit, int n) {
  Matrix out = Matrix::identity(1);
  for (int q = n - 1; q >= 0; --q) out = kron(out, q == qubit ? g : Matrix::identity(2));
  return out;
}

/// Controlled gate built from projectors: |0><0|_c (x) I + |1><1|_c (x) G_t.
inline Matrix controlled(const Matrix& g, int control, int target, int n) {
  Matrix p0(2), p1(2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  Matrix a = Matrix::identity(1);
  Matrix b = Matrix::identity(1);
  for (int q = n - 1; q >= 0; --q) {
    a = kron(a, q == control ? p0 : Matrix::identity(2));
    b = kron(b, q == control ? p1 : q == target ? g : Matrix::identity(2));
  }
  for (std::size_t i = 0; i < a.a.size(); ++i) a.a[i] += b.a[i];
  return a;
}

inline Matrix gate_matrix(const quantone::BoundGate& g, int n) {
  using quantone::GateKind;
  switch (g.kind) {
    case GateKind::H:
      return embed1(hadamard(), g.q0, n);
    case GateKind::RX:
      return embed1(rotation(pauli_x(), g.angle), g.q0, n);
    case GateKind::RZ:
      return embed1(rotation(pauli_z(), g.angle), g.q0, n);
    case GateKind::CRZ:
      return controlled(rotation(pauli_z(), g.angle), g.q0, g.q1, n);
    case GateKind::CNOT:
      return controlled(pauli_x(), g.q0, g.q1, n);
  }
  return Matrix::identity(1 << n);
}

/// Full circuit unitary U = G_m ... G_1.
inline Matrix circuit_unitary(const quantone::BoundCircuit& c) {
  Matrix u = Matrix::identity(1 << c.width);
  for (const auto& g : c.gates) u = multiply(gate_matrix(g, c.width), u);
  return u;
}

/// Projector weights: <psi| P_post (x) |i><i|_readout |psi> for i = 0, 1.
inline std::pair<double, double> readout_weights(const quantone::BoundCircuit& c) {
  const Matrix u = circuit_unitary(c);
  double w[2] = {0.0, 0.0};
  for (int b = 0; b < u.dim; ++b) {
    bool survives = true;
    for (int q : c.postselect) survives = survives && !((b >> q) & 1);
    if (!survives) continue;
    w[(b >> c.readout) & 1] += std::norm(u(b, 0));
  }
  return {w[0], w[1]};
}

}  // namespace oracle
