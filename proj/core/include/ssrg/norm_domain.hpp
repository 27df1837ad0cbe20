#pragma once

// Formal power series with coefficients in [0, +inf], indexed by multiindices
// over d+1 axes (axis 0 is the time direction), truncated to a finite
// downward-closed ("saturated") index set.  These series are the carrier for
// every weighted seminorm and every majorant bound in this library: addition
// and comparison are componentwise, multiplication is the Cauchy product, and
// +inf coefficients mark directions in which nothing is controlled.
//
// Conventions that matter and are easy to get wrong:
//  * 0 * inf = inf.  This keeps "uncontrolled" absorbing under products.  Two
//    semiring laws fail as a consequence, both covered by property tests:
//    zero is not absorbing (0 * inf = inf), and the constant 1 is a
//    multiplicative unit only on elements with finite coefficients (an inf
//    coefficient at beta poisons every index above beta via 0 * inf).  The
//    remaining commutative-semiring laws hold for arbitrary elements.
//  * Coefficients outside the index set are implicitly +inf.  Reading such an
//    index (e.g. while differentiating) yields inf, never throws.
//  * Products and geometric inverses are exact on the index set: a saturated
//    set is closed under splitting delta = beta + gamma, and (X - X_0)^n has
//    no coefficient inside the set once n exceeds the maximal total degree.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace ssrg {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Coefficient arithmetic on [0, inf] with the 0*inf = inf convention.
inline double nc_add(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return kInf;
  return a + b;
}
inline double nc_mul(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return kInf;  // covers 0*inf = inf
  return a * b;
}

// ---------------------------------------------------------------------------
// MultiIndex: delta = (delta_0, delta_1, ..., delta_d), axis 0 = time.
// ---------------------------------------------------------------------------
struct MultiIndex {
  static constexpr int kMaxAxes = 4;  // supports d <= 3 spatial dimensions

  std::array<std::uint8_t, kMaxAxes> v{};
  std::uint8_t axes = 0;  // number of stored axes = d + 1

  MultiIndex() = default;
  explicit MultiIndex(int n_axes) : axes(static_cast<std::uint8_t>(n_axes)) {}
  MultiIndex(std::initializer_list<int> entries);

  int size() const { return axes; }
  int operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
  void set(int i, int value);

  int order() const;          // |delta| = sum of all entries
  int spatial_order() const;  // |delta_vec| = sum of entries 1..d
  double factorial() const;   // delta! = prod delta_i!

  bool is_zero() const { return order() == 0; }
  bool leq(const MultiIndex& o) const;  // componentwise <=
  MultiIndex plus(const MultiIndex& o) const;
  MultiIndex minus(const MultiIndex& o) const;  // requires o.leq(*this)
  MultiIndex scaled(int n) const;               // n * delta (saturating at 255)
  MultiIndex plus_unit(int axis) const;         // delta + e_axis

  std::uint32_t packed() const;
  bool operator==(const MultiIndex& o) const { return packed() == o.packed() && axes == o.axes; }
  bool operator<(const MultiIndex& o) const;  // lexicographic
  std::string to_string() const;
};

// binom(delta; alpha, delta-alpha) = prod_i binom(delta_i, alpha_i)
double multi_binomial(const MultiIndex& delta, const MultiIndex& alpha);

// ---------------------------------------------------------------------------
// SaturatedSet: finite, downward-closed set of multiindices, enumerated in
// lexicographic order.  Construction verifies downward closure.
// ---------------------------------------------------------------------------
class SaturatedSet {
 public:
  // {delta : delta_0 <= r0 and |delta_vec| <= r} over d spatial axes.
  static SaturatedSet box(int d, int r0, int r);
  // {delta : |delta| <= degree} over d spatial axes.
  static SaturatedSet total_degree(int d, int degree);
  // Downward closure of an arbitrary list of generators.
  static SaturatedSet downward_closure(int d, const std::vector<MultiIndex>& generators);

  int axes() const { return axes_; }              // d + 1
  int dim_spatial() const { return axes_ - 1; }   // d
  int size() const { return static_cast<int>(idx_.size()); }
  const MultiIndex& at(int i) const { return idx_[static_cast<std::size_t>(i)]; }
  const std::vector<MultiIndex>& indices() const { return idx_; }

  bool contains(const MultiIndex& m) const;
  int index_of(const MultiIndex& m) const;  // -1 if absent

  // Largest total degree present; products of zero-constant-term elements
  // vanish on the set beyond this order.
  int max_total_degree() const { return max_total_degree_; }

  // Smallest n such that n*delta lies outside the set for every nonzero
  // member delta (brute force; equals max{r0+1, r+1} for box sets).
  int nilpotency_order() const;

  bool operator==(const SaturatedSet& o) const;
  std::string describe() const;

 private:
  SaturatedSet(int axes, std::vector<MultiIndex> sorted);
  std::vector<MultiIndex> idx_;  // sorted lexicographically
  int axes_ = 0;
  int max_total_degree_ = 0;
};

using SaturatedSetPtr = std::shared_ptr<const SaturatedSet>;

SaturatedSetPtr make_box_set(int d, int r0, int r);
SaturatedSetPtr make_total_degree_set(int d, int degree);

// ---------------------------------------------------------------------------
// NormElement: coefficient vector over a SaturatedSet.
// ---------------------------------------------------------------------------
class NormElement {
 public:
  NormElement() = default;
  explicit NormElement(SaturatedSetPtr dom);  // all zero

  static NormElement zeros(SaturatedSetPtr dom);
  static NormElement constant(SaturatedSetPtr dom, double c);
  static NormElement monomial(SaturatedSetPtr dom, const MultiIndex& delta, double c);

  const SaturatedSetPtr& domain() const { return dom_; }
  bool valid() const { return dom_ != nullptr; }

  // Coefficient at delta; +inf outside the domain.
  double at(const MultiIndex& delta) const;
  double at_index(int i) const { return c_[static_cast<std::size_t>(i)]; }
  void set(const MultiIndex& delta, double value);  // throws if outside domain
  void set_index(int i, double value);

  double constant_term() const;  // coefficient at delta = 0

  bool all_finite() const;
  std::string to_string(int max_terms = 24) const;

 private:
  SaturatedSetPtr dom_;
  std::vector<double> c_;
};

// Componentwise operations (domains must match).
NormElement add(const NormElement& x, const NormElement& y);
NormElement smul(double s, const NormElement& x);  // s in [0, inf]
NormElement elem_max(const NormElement& x, const NormElement& y);
NormElement elem_min(const NormElement& x, const NormElement& y);

// Cauchy product; exact on the shared domain.  Summation over splits runs in
// lexicographic order of the left factor's index (documented evaluation order
// so comparisons are reproducible bit-for-bit).
NormElement mul(const NormElement& x, const NormElement& y);

// Result of a componentwise comparison, with the first offending index kept
// for diagnostics.
struct LeqResult {
  bool ok = true;
  MultiIndex where{};
  double lhs = 0.0;
  double rhs = 0.0;
  std::string to_string() const;
};
LeqResult leq(const NormElement& x, const NormElement& y);

// (a - X)^{-1} = (1/(a - X_0)) sum_{n>=0} ((X - X_0)/(a - X_0))^n, truncated
// exactly at the domain's max total degree.  Requires a > 0 finite, X_0 finite
// and a - X_0 > 0 (throws std::domain_error otherwise).
NormElement geom_inverse(double a, const NormElement& x);

// Formal derivative: (d/dt_j X)_delta = (delta_j + 1) X_{delta + e_j}.
// Reads outside the domain yield +inf coefficients.
NormElement derive(const NormElement& x, int axis);

// X / mu^{d+1} + (mu/(d+1)) * sum_j d_{t_0} ... d_{t_d} d_{t_j} X.
NormElement t_mu_transform(const NormElement& x, double mu);

// ---------------------------------------------------------------------------
// Stock majorants.
// ---------------------------------------------------------------------------

// prod_{i=0}^{d} (1 - a t_i)^{-p}, exact Taylor coefficients on dom.
NormElement majorant_geom_pow(SaturatedSetPtr dom, double a, int p);
// lam * prod_{i=0}^{d} (1 - a t_i)^{-1}.
NormElement majorant_lambda_geom(SaturatedSetPtr dom, double lam, double a);
// f / (1 - g); requires g_0 < 1.
NormElement majorant_quotient(const NormElement& f, const NormElement& g);

// Coefficient lam^{delta_0} * Lam^{|delta_vec|} at every index of dom.
NormElement weight_element(SaturatedSetPtr dom, double lam, double Lam);

// Weighted filled-box majorant: coefficient lam^{delta_0} * Lam^{|delta_vec|}
// on {delta_0 <= r0, |delta_vec| <= r}, +inf outside (implicit).
NormElement frak_c(int d, int r0, int r, double lam, double Lam);

// frak_e(X) = c * (1 - Lam*X)^{-1}; requires Lam * X_0 < 1.
NormElement frak_e(const NormElement& c, const NormElement& x, double Lam);

// Analytic-function majorant: for f with all derivatives >= 0 at X_0 and
// 0 < beta < 1/X_0, the series of f(X) through order N(Delta)-1 is bounded by
// C / (1 - beta X) with C = max_{n < N(Delta)} f^{(n)}(X_0) / (n! beta^n).
struct AnalyticMajorant {
  NormElement truncated_series;  // sum_{n < N(Delta)} f^(n)(X_0)/n! * (X-X_0)^n
  NormElement majorant;          // C * (1 - beta X)^{-1}
  double big_c = 0.0;
};
// f = exp
AnalyticMajorant analytic_majorant_exp(const NormElement& x, double beta);
// f(u) = 1/(1-u); requires X_0 < 1.
AnalyticMajorant analytic_majorant_geom(const NormElement& x, double beta);

}  // namespace ssrg
