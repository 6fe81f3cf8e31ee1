#pragma once

// Dense joint pmf over a few finite alphabets, with marginal entropies and
// conditional mutual information in bits. Axes are selected by bitmask
// (bit i = axis i).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ircr {

using AxisMask = std::uint32_t;

constexpr AxisMask axis_bit(std::size_t axis) {
  return AxisMask{1} << axis;
}

inline constexpr double kZeroInfoBits = 1e-12;

class JointPmf {
 public:
  JointPmf() = default;
  // Row-major: the last axis varies fastest.
  JointPmf(std::vector<std::size_t> dims, std::vector<double> p);

  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<double>& values() const { return p_; }
  std::vector<double>& mutable_values() { return p_; }
  std::size_t rank() const { return dims_.size(); }
  std::size_t size() const { return p_.size(); }
  double total() const;

  // Marginal over the kept axes, axis order preserved.
  JointPmf marginal(AxisMask keep) const;

  double entropy() const;
  double entropy_of(AxisMask axes) const;
  // I(A; B | C) = H(AC) + H(BC) - H(C) - H(ABC); values at or below
  // kZeroInfoBits are returned as 0.
  double cond_mutual_info(AxisMask a, AxisMask b, AxisMask c = 0) const;

 private:
  std::vector<std::size_t> dims_;
  std::vector<double> p_;
};

double entropy_bits(std::span<const double> p);
double binary_entropy(double p);

}  // namespace ircr
