#include "tensor.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace quantone::detail {

int Tensor::total_bits() const {
  int b = 0;
  for (const auto& l : legs) b += l.bits;
  return b;
}

namespace {

struct Field {
  int offset;
  int bits;
};

/// Flat-index contributions of every packed value of the given fields.
std::vector<std::size_t> scatter_table(const std::vector<Field>& fields) {
  int total = 0;
  for (const auto& f : fields) total += f.bits;
  std::vector<std::size_t> table(std::size_t{1} << total);
  for (std::size_t packed = 0; packed < table.size(); ++packed) {
    std::size_t flat = 0;
    int shift = 0;
    for (const auto& f : fields) {
      const std::size_t v = (packed >> shift) & ((std::size_t{1} << f.bits) - 1);
      flat |= v << f.offset;
      shift += f.bits;
    }
    table[packed] = flat;
  }
  return table;
}

std::vector<int> leg_offsets(const Tensor& t) {
  std::vector<int> off;
  int acc = 0;
  for (const auto& l : t.legs) {
    off.push_back(acc);
    acc += l.bits;
  }
  return off;
}

int find_leg(const Tensor& t, int id) {
  for (std::size_t i = 0; i < t.legs.size(); ++i) {
    if (t.legs[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

Tensor contract(const Tensor& a, const Tensor& b) {
  const auto off_a = leg_offsets(a);
  const auto off_b = leg_offsets(b);
  std::vector<Field> free_a, free_b, common_a, common_b;
  Tensor out;
  for (std::size_t i = 0; i < a.legs.size(); ++i) {
    const int j = find_leg(b, a.legs[i].id);
    if (j >= 0) {
      if (b.legs[j].bits != a.legs[i].bits) {
        throw std::logic_error("contracted legs differ in dimension");
      }
      common_a.push_back({off_a[i], a.legs[i].bits});
      common_b.push_back({off_b[j], b.legs[j].bits});
    } else {
      free_a.push_back({off_a[i], a.legs[i].bits});
      out.legs.push_back(a.legs[i]);
    }
  }
  for (std::size_t j = 0; j < b.legs.size(); ++j) {
    if (find_leg(a, b.legs[j].id) < 0) {
      free_b.push_back({off_b[j], b.legs[j].bits});
      out.legs.push_back(b.legs[j]);
    }
  }
  const auto ta = scatter_table(free_a);
  const auto tb = scatter_table(free_b);
  const auto ca = scatter_table(common_a);
  const auto cb = scatter_table(common_b);
  out.data.assign(ta.size() * tb.size(), 0.0);
  for (std::size_t ib = 0; ib < tb.size(); ++ib) {
    for (std::size_t ia = 0; ia < ta.size(); ++ia) {
      std::complex<double> acc = 0.0;
      for (std::size_t c = 0; c < ca.size(); ++c) {
        acc += a.data[ta[ia] | ca[c]] * b.data[tb[ib] | cb[c]];
      }
      out.data[ia + ib * ta.size()] = acc;
    }
  }
  return out;
}

Tensor permute(const Tensor& t, const std::vector<int>& order) {
  if (order.size() != t.legs.size()) throw std::logic_error("permutation size mismatch");
  const auto off = leg_offsets(t);
  std::vector<Field> fields;
  Tensor out;
  for (int id : order) {
    const int i = find_leg(t, id);
    if (i < 0) throw std::logic_error("permutation names an unknown leg");
    fields.push_back({off[i], t.legs[i].bits});
    out.legs.push_back(t.legs[i]);
  }
  const auto table = scatter_table(fields);
  out.data.resize(table.size());
  for (std::size_t p = 0; p < table.size(); ++p) out.data[p] = t.data[table[p]];
  return out;
}

Tensor contract_network(std::vector<Tensor> tensors) {
  if (tensors.empty()) return Tensor{{}, {1.0}};
  while (tensors.size() > 1) {
    int best_i = -1, best_j = -1;
    int best_bits = std::numeric_limits<int>::max();
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      for (std::size_t j = i + 1; j < tensors.size(); ++j) {
        int shared_bits = 0;
        for (const auto& l : tensors[i].legs) {
          if (find_leg(tensors[j], l.id) >= 0) shared_bits += l.bits;
        }
        if (shared_bits == 0) continue;
        const int bits = tensors[i].total_bits() + tensors[j].total_bits() - 2 * shared_bits;
        if (bits < best_bits) {
          best_bits = bits;
          best_i = static_cast<int>(i);
          best_j = static_cast<int>(j);
        }
      }
    }
    if (best_i < 0) {
      // Disconnected: outer product of the first two pieces.
      best_i = 0;
      best_j = 1;
    }
    Tensor merged = contract(tensors[best_i], tensors[best_j]);
    tensors.erase(tensors.begin() + best_j);
    tensors[best_i] = std::move(merged);
  }
  return std::move(tensors.front());
}

}  // namespace quantone::detail
