#pragma once

// Momentum-space propagators C(k) = (U(k) - chi(k0,k)) / (i k0 - e(k)) on the
// Brillouin zone of a spatial lattice, with continuum frequency k0:
//  - pointwise values, derivatives and the analytic time kernel,
//  - position-space kernels (infinite lattice via quadrature, finite desk
//    lattices via discrete mode sums with true time differences),
//  - the scalar bound quantities g1, g2, E, gamma, Gram and gapped moment
//    bounds, and the decay-series contraction bound element.

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "ssrg/grassmann.hpp"
#include "ssrg/kernel.hpp"
#include "ssrg/lattice.hpp"
#include "ssrg/norm_domain.hpp"

namespace ssrg {

// e(k) = c0 + sum_j amp[j] cos(k_j dx)
struct DispersionSpec {
  double c0 = 2.0;
  std::vector<double> amp{1.0};
};

enum class UvType { one, plateau };
enum class ChiType { none, k0_sharp, k0_bump };

struct CutoffSpec {
  UvType uv = UvType::one;
  double inner = 0.5;  // plateau: U = 1 for |k_j| <= inner * pi/dx
  double outer = 0.9;  //          U = 0 for |k_j| >= outer * pi/dx
  ChiType chi = ChiType::none;
  double ec = 1.0;  // frequency scale of the chi cutoff
};

struct PropagatorSpec {
  int d = 1;
  double dx = 1.0;
  DispersionSpec dispersion;
  CutoffSpec cutoff;
  double mu = 1.0;  // gap parameter, must satisfy mu <= min |e| on supp U
  int r = 3;        // spatial derivative budget
  int r0 = 2;       // temporal derivative budget
};

// smooth step: 0 for x <= 0, 1 for x >= 1, built from exp(-1/x)
double smooth_step(double x);
// even plateau: 1 for |x| <= inner, 0 for |x| >= outer
double plateau(double x, double inner, double outer);

// Derivative-norm series of a momentum-space function f(k0, k1): the
// coefficient at delta is (1/delta!) sup_B |D^delta f| or
// (1/delta!) int_B d^2k/(2pi)^2 |D^delta f|, with B the box
// [-k0_halfwidth, k0_halfwidth] x [-k_halfwidth, k_halfwidth].  The caller
// supplies the derivatives; orders past (r0_cap, r_cap) get +inf, mirroring
// the infinite tails of the bound series.
enum class MomentumNormMode { sup, integral };
NormElement momentum_norm(
    const std::function<Complex(const MultiIndex&, double, double)>& deriv, SaturatedSetPtr dom,
    MomentumNormMode mode, double k0_halfwidth, double k_halfwidth, int r0_cap, int r_cap);

class Propagator {
 public:
  explicit Propagator(PropagatorSpec spec);
  const PropagatorSpec& spec() const { return spec_; }

  double dispersion(const std::vector<double>& k) const;
  double uv_cutoff(const std::vector<double>& k) const;
  double chi(double k0, const std::vector<double>& k) const;
  Complex momentum_value(double k0, const std::vector<double>& k) const;

  // D^delta C(k) for d == 1 (delta = (time, space)); requires chi == none.
  Complex momentum_derivative(const MultiIndex& delta, double k0, double k1) const;

  // int dk0/(2pi) e^{-i k0 t} s(k0)/(i k0 - e)  with s the chi-induced
  // frequency profile; analytic for chi == none (limit t -> 0- at t = 0).
  double time_kernel(double t, double e) const;

  // d == 1 infinite-lattice position kernel: the scalar C(x,x') at
  // x - x' = (t, n dx), via Brillouin-zone quadrature.
  double position_value(int n, double t) const;

  // Desk realization: discrete spatial modes of the finite lattice, true time
  // differences between window slices.  space may or may not carry
  // conjugation; only lattice geometry and spins are read here.
  double lattice_scalar(const BaseSpacePtr& space, const BasePoint& p, const BasePoint& q) const;
  Kernel scalar_kernel(const BaseSpacePtr& space) const;      // (0,2), no conjugation
  Kernel covariance_kernel(const BaseSpacePtr& space) const;  // (0,2), conjugated space
  SkewMatrix covariance_matrix(const BaseSpacePtr& space) const;

  // Scalar bound quantities.  L == 0 integrates over the continuum Brillouin
  // zone; L > 0 uses the L^d discrete modes with matching cell weights.
  double integral_u(int L = 0) const;  // int d^dk/(2pi)^d U
  double g1(int L = 0) const;          // int_{supp U} d^dk / |e|
  double g2(int L = 0) const;          // int_{supp U} d^dk mu/e^2
  double sup_abs_e() const;            // sup_{supp U} |e|
  double gap_E() const;                // max{1, sup_abs_e}
  double gamma(int L = 0) const;       // max{1, sqrt(int d^dk U log(gap_E/|e|))}
  double min_abs_e() const;            // min_{supp U} |e|, for gap checks
  double gram_bound_sq(int L = 0) const;  // int d^{d+1}k/(2pi)^{d+1} |C(k)|
  double s_gapped_sq(int L = 0) const;    // 9 iU + (3/E) ichi + 6 int_{|k0|<=E} (U-chi)/|ik0-e|

  // (g1/mu^d) ( sum_{|spatial part| <= r-d-1} (2/mu)^{|delta|} t^delta
  //             + sum over the rest of +inf )
  NormElement contraction_element(SaturatedSetPtr dom, int L = 0) const;

  // max_s sqrt( int d^{d+1}k/(2pi)^{d+1} |C(k)| chi_s(k_vec)^2 ) over a family
  // of spatial partition functions; finite only for the sharp frequency form.
  double gram_bound_partitioned(
      const std::vector<std::function<double(const std::vector<double>&)>>& parts,
      int L = 0) const;

  // Momentum derivative-norm series of C itself over |k0| <= k0_halfwidth
  // (0 selects the default window 50 * gap_E) times supp U; orders past the
  // spec's (r0, r) budget get +inf.  d == 1, chi == none.
  NormElement momentum_norm_element(SaturatedSetPtr dom, MomentumNormMode mode,
                                    double k0_halfwidth = 0.0) const;

 private:
  double spatial_accumulate(int L, const std::function<double(const std::vector<double>&)>& f,
                            bool plain_measure) const;
  double support_halfwidth() const;  // per-axis |k_j| bound of supp U

  PropagatorSpec spec_;
};

// Position-space kernel of a dispersion shift de(k_vec): diagonal in spin and
// conjugation, local in time (lattice delta 1/dt), spatial part the discrete
// Fourier sum with phase sign (-1)^a on the conjugate-field entries.
Kernel delta_e_kernel(const BaseSpacePtr& space,
                      const std::function<double(const std::vector<double>&)>& de);

// Counterterm helpers (pointwise in momentum space).
Complex resolvent(double k0, double num, double e_eff);  // num/(i k0 - e_eff)
// Partial sum C0 sum_{n=0..nterms} (-de/(i k0 - e))^n of num/(i k0 - e + de)
Complex counterterm_series(double k0, double num, double e, double de, int nterms);
// d/ds num/(i k0 - e + de + s de') at s = 0
Complex counterterm_derivative(double k0, double num, double e, double de, double deprime);

// Norm-series majorant of the shifted propagator: c0 / (1 - de_norm),
// valid when the constant term of de_norm is < 1.
NormElement counterterm_majorant(const NormElement& c0, const NormElement& de_norm);

}  // namespace ssrg
