#pragma once

// Small dense tensors over qubit-register legs, for exact contraction of
// pregroup diagrams. Internal to the library.

#include <complex>
#include <cstddef>
#include <vector>

namespace quantone::detail {

struct Leg {
  int id = 0;
  int bits = 0;
};

/// Leg k occupies the bit field starting at the sum of the bit widths of
/// legs 0..k-1 in the flat index.
struct Tensor {
  std::vector<Leg> legs;
  std::vector<std::complex<double>> data;

  int total_bits() const;
};

/// Sums over every leg id present in both tensors. Result legs are the
/// remaining legs of `a` followed by those of `b`.
Tensor contract(const Tensor& a, const Tensor& b);

/// Reorders legs to the given id order (must be a permutation).
Tensor permute(const Tensor& t, const std::vector<int>& order);

/// Contracts a network greedily by smallest intermediate result, then takes
/// outer products of any disconnected pieces.
Tensor contract_network(std::vector<Tensor> tensors);

}  // namespace quantone::detail
