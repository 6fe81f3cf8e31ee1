#include "ircr/pmf.hpp"

#include <cmath>
#include <numeric>

#include "ircr/errors.hpp"

namespace ircr {

JointPmf::JointPmf(std::vector<std::size_t> dims, std::vector<double> p)
    : dims_(std::move(dims)), p_(std::move(p)) {
  const std::size_t n = std::accumulate(dims_.begin(), dims_.end(),
                                        std::size_t{1}, std::multiplies<>());
  if (n != p_.size()) throw InputError("pmf size does not match its dimensions");
  if (dims_.size() > 31) throw InputError("too many pmf axes");
}

double JointPmf::total() const {
  return std::accumulate(p_.begin(), p_.end(), 0.0);
}

JointPmf JointPmf::marginal(AxisMask keep) const {
  std::vector<std::size_t> out_dims;
  for (std::size_t a = 0; a < dims_.size(); ++a) {
    if (keep & axis_bit(a)) out_dims.push_back(dims_[a]);
  }
  const std::size_t out_n = std::accumulate(
      out_dims.begin(), out_dims.end(), std::size_t{1}, std::multiplies<>());
  std::vector<double> out(out_n, 0.0);

  // Output stride of each input axis (0 when summed out).
  std::vector<std::size_t> stride(dims_.size(), 0);
  std::size_t s = 1;
  for (std::size_t a = dims_.size(); a-- > 0;) {
    if (keep & axis_bit(a)) {
      stride[a] = s;
      s *= dims_[a];
    }
  }

  std::vector<std::size_t> digit(dims_.size(), 0);
  std::size_t out_idx = 0;
  for (std::size_t i = 0; i < p_.size(); ++i) {
    out[out_idx] += p_[i];
    for (std::size_t a = dims_.size(); a-- > 0;) {
      if (++digit[a] < dims_[a]) {
        out_idx += stride[a];
        break;
      }
      out_idx -= stride[a] * (dims_[a] - 1);
      digit[a] = 0;
    }
  }
  return JointPmf(std::move(out_dims), std::move(out));
}

double JointPmf::entropy() const { return entropy_bits(p_); }

double JointPmf::entropy_of(AxisMask axes) const {
  if (axes == 0) return 0.0;
  return marginal(axes).entropy();
}

double JointPmf::cond_mutual_info(AxisMask a, AxisMask b, AxisMask c) const {
  if ((a & b) || (a & c) || (b & c)) {
    throw InputError("cond_mutual_info needs disjoint axis sets");
  }
  const double v = entropy_of(a | c) + entropy_of(b | c) - entropy_of(c) -
                   entropy_of(a | b | c);
  // Entropy differences leave ~1e-15 residue; snap it so that chains
  // carrying no information tie exactly.
  return v > kZeroInfoBits ? v : 0.0;
}

double entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

double binary_entropy(double p) {
  const double q[2] = {p, 1.0 - p};
  return entropy_bits(q);
}

}  // namespace ircr
