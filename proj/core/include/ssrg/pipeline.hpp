#pragma once

// Desk-scale assembly of the single-scale fermion study: the quartic
// interaction kernel built from a spatial potential, the scalar inputs
// (g, gamma, E) with the smallness verdict, amputated correlation kernels
// through the effective-action map, the quadratic tadpole kernel, deviation
// norms against the second-order bound shapes, and the coupling-scaling check.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ssrg/propagator.hpp"

namespace ssrg {

// Two-body potential v(x - y), evaluated at the minimal-image physical
// displacement (d components); must decay fast enough that the lattice sums
// are meaningful.
using SpatialPotential = std::function<double(const std::vector<double>&)>;

struct ModelConfig {
  LatticeSpec lattice;        // desk default: d = 1, 4 sites, 4 slices
  DispersionSpec dispersion;  // default 2 + cos k
  CutoffSpec cutoff;          // default U == 1, no frequency factor
  double mu = 1.0;            // gap parameter
  SpatialPotential potential; // must be set before use
  double lambda = 1e-2;       // coupling strength
  int n_max = 2;              // coupling-order cap of the truncated backend
  int r = 3;                  // spatial decay budget
  int r0 = 2;                 // temporal decay budget
  int delta_max = 2;          // canonical decay-operator enumeration cap
  double epsilon = 1.0;       // smallness tolerance (an input, never derived)
  std::uint64_t seed = 0;     // master seed recorded with every report
};

// Throws std::invalid_argument unless the dispersion clears the gap mu
// everywhere on the cutoff's support, the potential is set, and
// n_max >= min_order (second-order studies need two coupling orders).
void validate_model(const ModelConfig& cfg, int min_order = 2);

PropagatorSpec make_propagator_spec(const ModelConfig& cfg);

// -1/2 delta(x1,y1) delta(x2,y2) delta(t1 - t2) v(x1_vec - x2_vec) on lattice
// deltas (one 1/cell weight per delta), then antisymmetrized within the
// (x1,x2) and (y1,y2) slot pairs.  Slots (x1, y1, x2, y2) over the plain
// space; the x-slots carry the conjugate field, the y-slots the plain one.
Kernel v0_from_potential(const SpatialPotential& v, const BaseSpacePtr& space);

struct ScalarInputs {
  double g = 0.0;      // int_{supp U} d^dk / |e|
  double gamma = 1.0;  // max{1, sqrt(int U log(E/|e|))}
  double E = 1.0;      // max{1, sup_{supp U} |e|}
  double mu = 1.0;
};

// modes_L = 0 integrates over the continuum zone, > 0 uses the discrete
// spatial modes; the desk study matches the lattice it actually runs on.
ScalarInputs scalar_inputs(const Propagator& prop, int modes_L);

// sup over canonical decay operators with delta_0 <= r0, |delta_vec| <= r and
// |delta| <= delta_max of mu^{|delta|} ||| D V0 |||_{1,inf}.  The enumeration
// cap truncates the sup from below, so it is recorded alongside every report.
double upsilon(const Kernel& v0, double mu, int r, int r0, int delta_max);

struct SmallnessVerdict {
  double v0_norm = 0.0;    // ||| V0 |||_{1,inf} of the actual interaction
  double upsilon = 0.0;    // decay-weighted sup of the actual interaction
  double threshold = 0.0;  // epsilon mu^d / (g gamma^2)
  bool part_i = false;     // v0_norm <= threshold
  bool part_ii = false;    // upsilon <= threshold
};

SmallnessVerdict smallness_check(double v0_norm, double upsilon_value, const ScalarInputs& s,
                                 int d, double epsilon);

// K(x, y) = 4 int dx' dy' V0(x, y, x', y') C(x', y') as weighted lattice
// sums; c must carry its first slot on the conjugate side (x'), its second on
// the plain side (y').
Kernel k_kernel(const Kernel& v0, const Kernel& c);

// The scalar covariance oriented for k_kernel and the quadratic shift: entry
// (a, b) pairs the conjugate field at a with the plain field at b, i.e. minus
// the transpose of the plain (field, conjugate) scalar kernel.
Kernel tadpole_covariance(const Propagator& prop, const BaseSpacePtr& plain_space);

// ---------------------------------------------------------------------------
// Pair-kernel <-> element conversion: the one normalization authority.
//
// A degree-2n monomial family with antisymmetric weight kernel w corresponds
// to the pair kernel G(x1,y1,...,xn,yn) = binom(2n,n) * sgn * w read at the
// interleaved tuple whose x-slots sit on the conjugate side; conversely a
// pair kernel embeds by writing its values verbatim on those tuples.  The two
// maps are exact mutual inverses (tested degree by degree), and generator
// index = 2 * plain index + conjugation bit.
// ---------------------------------------------------------------------------

// Embed a pair kernel (slots x1,y1,...,xn,yn over the plain space) as the
// element sum over its interleaved conjugate tuples at one coupling power.
GrElement element_from_pairs(const Kernel& pair_kernel, const BaseSpacePtr& conj_space,
                             const GrContext& ctx, int lambda_power);

// Read the degree-2n pair kernel of an element at one coupling power.  Throws
// std::invalid_argument when a monomial mixes particle-number sectors.
Kernel pairs_from_element(const GrElement& el, const BaseSpacePtr& plain_space, int n_pairs,
                          int lambda_power);

struct GreensSet {
  int n_max = 0;
  // orders[k][j] = coupling-order-j coefficient kernel of the 2(k+1)-point
  // function, slots (x1, y1, ..., xn, yn) over the plain space, antisymmetric
  // within the x-group and within the y-group by construction.
  std::array<std::vector<Kernel>, 3> orders;
  LambdaPoly log_z;                 // coupling series of the partition scalar
  bool antisymmetric_pairs = true;  // construction guarantees group antisymmetry
};

// Build the interaction element lambda * V0 over the conjugated generators,
// apply the effective-action map against the desk covariance, and read the
// two-, four-, and six-point pair kernels per coupling order.  Throws
// std::invalid_argument when the lattice needs more than 64 generators.
GreensSet greens(const ModelConfig& cfg);

// sum_j lambda^j orders[n_pairs - 1][j].
Kernel greens_eval(const GreensSet& gs, int n_pairs, double lambda);

// Exact backend: folds the numeric coupling into the interaction element and
// runs the effective-action map with no series truncation (the generator
// algebra is nilpotent, so the result is exact up to roundoff).  Intended for
// validating the coupling-truncated backend on small instances.
Kernel greens_numeric(const ModelConfig& cfg, int n_pairs, double lambda);

struct DeviationRow {
  int channel = 0;              // 2, 4, or 6 external legs
  MultiIndex delta;             // decay order of the row
  double value = 0.0;           // max over canonical D of ||| D dev |||_{1,inf}
  double bound_shape = 0.0;     // g gamma^{6-channel} upsilon^2 / mu^{d+|delta|}
  double measured_const = 0.0;  // value / bound_shape (0 when the shape is 0)
};

// Deviation table: channel 2 against lambda * K, channel 4 against
// lambda * V0, channel 6 against zero.  upsilon_unit is the decay-weighted
// sup of V0 per unit coupling.  delta_max_g6 slims the six-slot channel's
// decay budget (its enumeration cost grows steeply with the order); the
// default -1 caps it at min(delta_max, 1).
std::vector<DeviationRow> deviation_norms(const ModelConfig& cfg, const GreensSet& gs,
                                          const Kernel& k1, const Kernel& v0,
                                          const ScalarInputs& s, double upsilon_unit,
                                          int delta_max_g6 = -1);

struct ScalingResult {
  std::vector<double> lambdas;
  std::array<std::vector<double>, 3> values;  // per-channel deviation norms
  std::array<double, 3> slopes;               // log-log least-squares slopes
};

// Deviation norms at delta = 0 across a coupling sweep with the least-squares
// slope per channel.  Throws std::invalid_argument for fewer than two
// couplings or nonpositive entries, std::domain_error on a degenerate fit.
ScalingResult scaling_study(const ModelConfig& cfg, const std::vector<double>& lambdas);

struct BoundsReport {
  ScalarInputs scalars;
  double v0_norm_unit = 0.0;  // ||| V0 |||_{1,inf} per unit coupling
  double upsilon_unit = 0.0;  // upsilon per unit coupling
  double lambda = 0.0;
  double gram_sq = 0.0;       // squared Gram route for the contraction scale
  double gapped_sq = 0.0;     // squared gapped-moment route
  double b = 0.0;             // 2 * min of the two routes' square roots
  double alpha = 2.0;
  NormElement frak_c;         // contraction-bound element of the desk covariance
  std::vector<NormElement> n_values;  // N(lambda V; frak_c, b, alpha) per order
  SmallnessVerdict verdict;
  double epsilon = 0.0;
  int r = 0;
  int r0 = 0;
  int delta_max = 0;  // the recorded enumeration cap behind upsilon
};

BoundsReport bounds_report(const ModelConfig& cfg);

}  // namespace ssrg
