#pragma once

// Sparse kernels f(eta_1..eta_m; xi_1..xi_n) on powers of the base space,
// with the decay-operator calculus and the weighted L1-Linf seminorm built
// on top of them.
//
// Conventions:
//  * integral = cell_volume * sum over all base points (including the spin
//    and conjugation components);
//  * a decay operator multiplies by (xi_u - xi_v)^delta with minimal-image
//    separations; the seminorm's max over decay operators of a given total
//    order runs over the canonical assignments of that order to the n(n-1)/2
//    unordered slot pairs (signs are irrelevant under the absolute value);
//  * seminorm edge cases: m = n = 0 gives 0; n < 2 admits no decay operator,
//    so nonzero orders contribute 0; orders past the enumeration cap get +inf
//    (a bound may only ever be overstated, never understated).

#include <complex>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <unordered_map>
#include <vector>

#include "ssrg/lattice.hpp"
#include "ssrg/norm_domain.hpp"

namespace ssrg {

using Complex = std::complex<double>;

// One canonical decay factor: (xi_u - xi_v)^delta on internal slots u < v.
struct DecayFactor {
  int u = 0;
  int v = 1;
  MultiIndex delta;
};
using DecayOp = std::vector<DecayFactor>;

MultiIndex decay_order(const DecayOp& op, int axes);

class Kernel {
 public:
  static constexpr int kMaxSlots = 8;
  using Key = std::array<std::uint16_t, kMaxSlots>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };
  using Map = std::unordered_map<Key, Complex, KeyHash>;

  Kernel() = default;
  Kernel(BaseSpacePtr space, int m, int n);

  const BaseSpacePtr& space() const { return space_; }
  int ext_count() const { return m_; }
  int int_count() const { return n_; }
  int slot_count() const { return m_ + n_; }

  bool empty() const { return data_.empty(); }
  std::size_t entry_count() const { return data_.size(); }
  const Map& entries() const { return data_; }

  // Point indices per slot, externals first.  Missing keys read as 0.
  Complex at(const Key& k) const;
  Complex at(std::initializer_list<int> slots) const;
  void add(const Key& k, Complex v);  // accumulates
  void add(std::initializer_list<int> slots, Complex v);
  Key make_key(std::initializer_list<int> slots) const;

  void scale(Complex s);
  void prune(double abs_eps = 0.0);  // drop entries with |v| <= abs_eps

  // The m = n = 0 kernel is a single scalar; kept for completeness.
  Complex scalar_value() const;

 private:
  BaseSpacePtr space_;
  int m_ = 0;
  int n_ = 0;
  Map data_;
};

// f + s*g (same space and slot signature).
Kernel kadd(const Kernel& f, const Kernel& g, Complex s = 1.0);

// Largest |f - g| over all keys of either kernel.
double max_abs_diff(const Kernel& f, const Kernel& g);

// sup |f|; the constant-series version of it lives in seminorm land.
double sup_abs(const Kernel& f);

// f^pi(xi_0,...,xi_{n-1}) = f(xi_pi(0),...,xi_pi(n-1)) (pi is 0-based, size n).
Kernel permute_internal(const Kernel& f, const std::vector<int>& pi);

// Antisymmetrization 1/m! sum sgn(pi) f(eta_pi; xi) over external slots.
Kernel ant_ext(const Kernel& f);
// Same over internal slots.
Kernel ant_int(const Kernel& f);

// Tensor product: externals concatenated, internals concatenated.
Kernel tensor(const Kernel& f, const Kernel& g);

// Multiply by the decay factors (pointwise).
Kernel apply_decay(const Kernel& f, const DecayOp& op);

// ||| f |||_{1,inf}: for m = 0 the max over the pinned slot of the
// sup-integral, for m != 0 the sup over externals of the full internal
// integral.
double norm_1inf_scalar(const Kernel& f);

// || f ||_{1,inf} over dom: coefficient at delta is (1/delta!) times the max
// of ||| D f |||_{1,inf} over canonical decay operators of total order delta.
// Orders with |delta| > delta_max are set to +inf.
NormElement seminorm_1inf(const Kernel& f, SaturatedSetPtr dom, int delta_max);

// g = int dzeta f(...,zeta at internal slot mu,...) g(...,zeta at internal
// slot nu,...): externals concatenate, internals concatenate with mu and nu
// removed.
Kernel partial_convolution(const Kernel& f, int mu, const Kernel& g, int nu);

// int dxi_i dxi_j C(xi_i, xi_j) f(...): removes internal slots i < j.
Kernel pair_integrate(const Kernel& f, int i, int j, const Kernel& c);

// Contraction with sign (-1)^(j-i+1) on internal slots i < j (0-based).
Kernel contract(const Kernel& f, int i, int j, const Kernel& c);

// The two-line bubble: both f and g are purely internal with >= 3 slots;
//   h(rest_f, rest_g) = int dzeta dx2 dx2' dx3 dx3'
//     f(zeta,x2,x3,rest_f) C2(x2,x2') C3(x3,x3') g(zeta,x2',x3',rest_g).
Kernel bubble_compose(const Kernel& f, const Kernel& c2, const Kernel& c3, const Kernel& g);

// All canonical assignments of total order delta to the slot pairs of an
// n-slot kernel; calls cb once per decay operator.
void for_each_decay_op(int n, const MultiIndex& delta, const std::function<void(const DecayOp&)>& cb);

}  // namespace ssrg
