#pragma once

// Finite-dimensional Grassmann algebra with Gaussian calculus:
//  * generators are bits of a 64-bit mask, split into an exterior family
//    [0, E) and an integrated family [E, gens);
//  * coefficients are polynomials in a coupling parameter (truncated at a
//    fixed cap), so perturbative orders can be read off exactly;
//  * the Gaussian integral and the shift convolution
//      (Conv_C F)(phi, psi) = int F(phi, psi + zeta) dmu_C(zeta)
//    are evaluated exactly through Pfaffians of covariance submatrices;
//  * the effective-interaction map
//      Omega_C(W) = log (1/Z) Conv_C e^W,  Z fixed by Omega(0) = 0,
//    is built from these pieces, together with Wick ordering (the shift
//    convolution with the negated covariance).
//
// Elements translate to and from position-space kernels: the coefficient of
// the ascending monomial with exterior set K and integrated set S is
// cellvol^{m+n} m! n! f(K sorted; S sorted) for the per-block antisymmetric
// kernel f.

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ssrg/kernel.hpp"
#include "ssrg/lattice.hpp"
#include "ssrg/norm_domain.hpp"

namespace ssrg {

// ---------------------------------------------------------------------------
// Coupling-constant polynomials (index = power), always trimmed of trailing
// zeros and truncated at the algebra's cap.

using LambdaPoly = std::vector<Complex>;

LambdaPoly lp_const(Complex v);
void lp_trim(LambdaPoly& a);
bool lp_is_zero(const LambdaPoly& a);
LambdaPoly lp_add(const LambdaPoly& a, const LambdaPoly& b, Complex s = 1.0);
LambdaPoly lp_scale(const LambdaPoly& a, Complex s);
LambdaPoly lp_mul(const LambdaPoly& a, const LambdaPoly& b, int cap);
// Multiplicative inverse / logarithm of a series with nonzero constant term.
LambdaPoly lp_inverse(const LambdaPoly& a, int cap);
LambdaPoly lp_log(const LambdaPoly& a, int cap);

// ---------------------------------------------------------------------------
// Skew-symmetric covariance matrices over generator indices.

class SkewMatrix {
 public:
  SkewMatrix() = default;
  explicit SkewMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {}
  int size() const { return n_; }
  Complex at(int i, int j) const { return a_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)]; }
  // sets (i,j) and (j,i) = -v; diagonal must stay zero
  void set(int i, int j, Complex v);

 private:
  int n_ = 0;
  std::vector<Complex> a_;
};

SkewMatrix sm_add(const SkewMatrix& a, const SkewMatrix& b, Complex s = 1.0);
SkewMatrix sm_scale(const SkewMatrix& a, Complex s);

// Pfaffian of the submatrix indexed by the bits of mask (ascending order).
// Expansion along the lowest index; exact for small supports.
Complex pfaffian_recursive(const SkewMatrix& c, std::uint64_t mask);
// O(n^3) skew elimination with pivoting on a full matrix.
Complex pfaffian_elimination(SkewMatrix m);
// Dispatch: small supports use the recursion, large ones elimination.
Complex pfaffian_mask(const SkewMatrix& c, std::uint64_t mask);

// int psi(i_1)...psi(i_k) dmu_C = Pf of the k x k matrix C(i_a, i_b);
// zero for odd k or repeated indices.
Complex gaussian_moment(const SkewMatrix& c, const std::vector<int>& idx);

// sup over even-popcount submasks of |Pf(C_S)|^{1/|S|} (exhaustive; exact
// value of the moment growth constant on small generator sets).
double s_value(const SkewMatrix& c);

// ---------------------------------------------------------------------------
// Grassmann elements.

struct GrContext {
  int gens = 0;             // total generators, <= 64
  int integrated_first = 0; // family split: [0, integrated_first) exterior
  int lambda_cap = 0;       // keep coupling powers <= cap
  int psi_cap = -1;         // drop monomials of degree > cap; -1 = no cap
  bool operator==(const GrContext& o) const {
    return gens == o.gens && integrated_first == o.integrated_first &&
           lambda_cap == o.lambda_cap && psi_cap == o.psi_cap;
  }
};

class GrElement {
 public:
  using Terms = std::unordered_map<std::uint64_t, LambdaPoly>;

  GrElement() = default;
  explicit GrElement(GrContext ctx);

  const GrContext& ctx() const { return ctx_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  LambdaPoly at(std::uint64_t mask) const;
  void add(std::uint64_t mask, const LambdaPoly& p, Complex s = 1.0);
  void add(std::uint64_t mask, Complex v, int lambda_power = 0);
  void erase(std::uint64_t mask) { terms_.erase(mask); }
  void scale(Complex s);
  void scale_poly(const LambdaPoly& p);
  bool is_even() const;  // every monomial has even degree
  int max_degree() const;

 private:
  GrContext ctx_;
  Terms terms_;
};

GrElement gr_add(const GrElement& a, const GrElement& b, Complex s = 1.0);
GrElement gr_mul(const GrElement& a, const GrElement& b);
double gr_max_abs_diff(const GrElement& a, const GrElement& b);

// exp of a nilpotent element (zero body required).
GrElement grexp(const GrElement& w);
// log of an element whose body has nonzero constant term; includes the
// scalar log of the body at mask 0.
GrElement grlog(const GrElement& f);

// Gaussian integral over the integrated family: every integrated generator
// is integrated out, exterior ones survive.  c is indexed by
// (gen - integrated_first).
GrElement gr_integrate(const GrElement& f, const SkewMatrix& c);
// Shift convolution int F(phi, psi + zeta) dmu_c(zeta) over the integrated
// family; with integrated_first == 0 this is the convolution in all fields.
GrElement gr_conv(const GrElement& f, const SkewMatrix& c);
// Wick ordering with respect to c (shift convolution with -c).
GrElement wick_order(const GrElement& f, const SkewMatrix& c);

// Omega_c(w) = log (1/Z) Conv_c e^w with Z = body of Conv_c e^w, so the
// result has zero body.  If log_z is non-null it receives log Z.
GrElement omega(const GrElement& w, const SkewMatrix& c, LambdaPoly* log_z = nullptr);

// Same map for interactions carrying coupling order >= 1 in every monomial
// (throws otherwise).  The log series is assembled from per-coupling-order
// slices, so the work scales with the slice sizes instead of the square of
// the full term count — the difference between seconds and hours once the
// convolution output holds ~10^5 monomials.
GrElement omega_graded(const GrElement& w, const SkewMatrix& c, LambdaPoly* log_z = nullptr);

// V(phi) on a one-family context of E generators -> V(phi + psi) on the
// two-family context with E exterior and E integrated generators (caps
// copied from v).
GrElement substitute_sum(const GrElement& v, int family_size);

// ---------------------------------------------------------------------------
// Kernels <-> elements.  Exterior generator g < E is the point g of space;
// integrated generator g >= E is the point g - E.

GrElement gr_from_kernel(const Kernel& f, const GrContext& ctx, int lambda_power);
// The per-block antisymmetric kernel of the (m, n) part at a coupling power.
Kernel kernel_from_gr(const GrElement& el, const BaseSpacePtr& space, int m, int n,
                      int lambda_power);

// ---------------------------------------------------------------------------
// Norm machinery on top of the algebra.

// Contraction-bound element for a covariance given as a two-slot kernel:
// componentwise max of its weighted seminorm and the constant series of its
// sup norm.
NormElement contraction_bound_element(const Kernel& c, SaturatedSetPtr dom, int delta_max);

// f'(eta; xi_{n'+1}..) = int f(eta; xi_1..xi_n) psi(xi_1)..psi(xi_n') dmu_c:
// the moment-integrated kernel of the integral-bound axiom.
Kernel moment_integrate(const Kernel& f, int nprime, const SkewMatrix& c);

// N(W; c, b, alpha) = (1/b^2) c sum_{m,n} alpha^n b^n ||W_{m,n}|| at a fixed
// coupling power.
NormElement n_functional(const GrElement& w, const BaseSpacePtr& space, const NormElement& frak_c,
                         double b, double alpha, int delta_max, int lambda_power);

}  // namespace ssrg
