#include "ssrg/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ssrg {

namespace {

double factorial_of(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double binomial_of(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

// Parity of the permutation sorting the first n entries ascending (entries
// distinct); leaves the array sorted.
int sort_parity(std::array<int, 8>& a, int n) {
  int sign = 1;
  for (int i = 1; i < n; ++i)
    for (int j = i; j > 0 && a[static_cast<std::size_t>(j - 1)] > a[static_cast<std::size_t>(j)];
         --j) {
      std::swap(a[static_cast<std::size_t>(j - 1)], a[static_cast<std::size_t>(j)]);
      sign = -sign;
    }
  return sign;
}

}  // namespace

void validate_model(const ModelConfig& cfg, int min_order) {
  if (!cfg.potential) throw std::invalid_argument("validate_model: potential is not set");
  if (cfg.n_max < min_order)
    throw std::invalid_argument("validate_model: n_max = " + std::to_string(cfg.n_max) +
                                " is below the required coupling order " +
                                std::to_string(min_order));
  if (!(cfg.mu > 0.0)) throw std::invalid_argument("validate_model: mu must be positive");
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("validate_model: epsilon must be positive");
  if (cfg.r < 0 || cfg.r0 < 0 || cfg.delta_max < 0)
    throw std::invalid_argument("validate_model: decay budgets must be nonnegative");
  const Propagator prop(make_propagator_spec(cfg));
  // |e| >= mu on the closed support plus positivity at the zone center force
  // e >= mu throughout: the support box is connected and e is continuous.
  if (prop.min_abs_e() < cfg.mu)
    throw std::invalid_argument("validate_model: dispersion dips below the gap mu on supp U");
  const std::vector<double> center(static_cast<std::size_t>(cfg.lattice.d), 0.0);
  if (!(prop.dispersion(center) > 0.0))
    throw std::invalid_argument("validate_model: dispersion must be positive on supp U");
}

PropagatorSpec make_propagator_spec(const ModelConfig& cfg) {
  PropagatorSpec ps;
  ps.d = cfg.lattice.d;
  ps.dx = cfg.lattice.dx;
  ps.dispersion = cfg.dispersion;
  ps.cutoff = cfg.cutoff;
  ps.mu = cfg.mu;
  ps.r = cfg.r;
  ps.r0 = cfg.r0;
  return ps;
}

Kernel v0_from_potential(const SpatialPotential& v, const BaseSpacePtr& space) {
  if (!v) throw std::invalid_argument("v0_from_potential: potential is not set");
  if (space->with_conjugation())
    throw std::invalid_argument("v0_from_potential: expects the plain space");
  const LatticeSpec& lat = space->lattice();
  const double cv = space->cell_volume();
  const int sz = space->size();
  Kernel q(space, 0, 4);
  std::vector<double> disp(static_cast<std::size_t>(lat.d));
  for (int a = 0; a < sz; ++a) {
    const BasePoint pa = space->point(a);
    for (int b = 0; b < sz; ++b) {
      const BasePoint pb = space->point(b);
      if (pb.x[0] != pa.x[0]) continue;  // the two densities meet at equal times
      for (int ax = 1; ax <= lat.d; ++ax)
        disp[static_cast<std::size_t>(ax - 1)] = space->separation(pa, pb, ax);
      const double val = v(disp);
      if (val == 0.0) continue;
      // two full lattice deltas (1/cell each) and one time delta (1/dt)
      q.add({a, a, b, b}, Complex(-0.5 * val / (cv * cv * lat.dt)));
    }
  }
  // antisymmetrize within the (x1, x2) and (y1, y2) slot pairs
  const Kernel xs = permute_internal(q, {2, 1, 0, 3});
  const Kernel ys = permute_internal(q, {0, 3, 2, 1});
  const Kernel both = permute_internal(q, {2, 3, 0, 1});
  Kernel out = kadd(kadd(q, xs, -1.0), kadd(ys, both, -1.0), -1.0);
  out.scale(0.25);
  return out;
}

ScalarInputs scalar_inputs(const Propagator& prop, int modes_L) {
  ScalarInputs s;
  s.g = prop.g1(modes_L);
  s.gamma = prop.gamma(modes_L);
  s.E = prop.gap_E();
  s.mu = prop.spec().mu;
  return s;
}

double upsilon(const Kernel& v0, double mu, int r, int r0, int delta_max) {
  const auto dom = make_box_set(v0.space()->lattice().d, r0, r);
  const NormElement sn = seminorm_1inf(v0, dom, delta_max);
  double best = 0.0;
  for (int i = 0; i < dom->size(); ++i) {
    const MultiIndex& del = dom->at(i);
    if (del.order() > delta_max) continue;  // beyond the enumeration cap
    // the seminorm coefficient carries 1/delta!; the sup over operators does not
    best = std::max(best, std::pow(mu, del.order()) * del.factorial() * sn.at_index(i));
  }
  return best;
}

SmallnessVerdict smallness_check(double v0_norm, double upsilon_value, const ScalarInputs& s,
                                 int d, double epsilon) {
  SmallnessVerdict out;
  out.v0_norm = v0_norm;
  out.upsilon = upsilon_value;
  out.threshold = epsilon * std::pow(s.mu, d) / (s.g * s.gamma * s.gamma);
  out.part_i = v0_norm <= out.threshold;
  out.part_ii = upsilon_value <= out.threshold;
  return out;
}

Kernel k_kernel(const Kernel& v0, const Kernel& c) {
  if (v0.ext_count() != 0 || v0.int_count() != 4 || c.ext_count() != 0 || c.int_count() != 2)
    throw std::invalid_argument("k_kernel: expects a (0,4) kernel and a (0,2) covariance");
  Kernel out = pair_integrate(v0, 2, 3, c);
  out.scale(4.0);
  return out;
}

Kernel tadpole_covariance(const Propagator& prop, const BaseSpacePtr& plain_space) {
  Kernel t = permute_internal(prop.scalar_kernel(plain_space), {1, 0});
  t.scale(-1.0);
  return t;
}

GrElement element_from_pairs(const Kernel& pair_kernel, const BaseSpacePtr& conj_space,
                             const GrContext& ctx, int lambda_power) {
  const int slots = pair_kernel.int_count();
  if (pair_kernel.ext_count() != 0 || slots <= 0 || slots % 2 != 0)
    throw std::invalid_argument("element_from_pairs: expects a purely internal pair kernel");
  if (!conj_space->with_conjugation() ||
      conj_space->size() != 2 * pair_kernel.space()->size() || ctx.gens != conj_space->size())
    throw std::invalid_argument("element_from_pairs: generator layout mismatch");
  Kernel lifted(conj_space, 0, slots);
  for (const auto& kv : pair_kernel.entries()) {
    Kernel::Key key{};
    for (int s = 0; s < slots; ++s)
      key[static_cast<std::size_t>(s)] = static_cast<std::uint16_t>(
          kv.first[static_cast<std::size_t>(s)] * 2 + (s % 2 == 0 ? 1 : 0));
    lifted.add(key, kv.second);
  }
  return gr_from_kernel(lifted, ctx, lambda_power);
}

Kernel pairs_from_element(const GrElement& el, const BaseSpacePtr& plain_space, int n_pairs,
                          int lambda_power) {
  if (n_pairs < 1 || 2 * n_pairs > Kernel::kMaxSlots)
    throw std::invalid_argument("pairs_from_element: unsupported pair count");
  if (plain_space->with_conjugation() || el.ctx().gens != 2 * plain_space->size())
    throw std::invalid_argument("pairs_from_element: generator layout mismatch");
  const int deg = 2 * n_pairs;
  double cvk = 1.0;
  for (int i = 0; i < deg; ++i) cvk *= plain_space->cell_volume();
  const double readout = binomial_of(deg, n_pairs) / (cvk * factorial_of(deg));

  Kernel out(plain_space, 0, deg);
  std::array<int, 8> conj_g{}, plain_g{}, tuple{}, scratch{};
  for (const auto& kv : el.terms()) {
    if (std::popcount(kv.first) != deg) continue;
    if (lambda_power >= static_cast<int>(kv.second.size())) continue;
    const Complex w = kv.second[static_cast<std::size_t>(lambda_power)];
    if (w == Complex(0.0)) continue;
    int nc = 0;
    int np = 0;
    for (std::uint64_t m = kv.first; m != 0; m &= m - 1) {
      const int g = std::countr_zero(m);
      if (g & 1)
        conj_g[static_cast<std::size_t>(nc++)] = g;
      else
        plain_g[static_cast<std::size_t>(np++)] = g;
    }
    if (nc != np)
      throw std::invalid_argument("pairs_from_element: monomial mixes particle-number sectors");
    const Complex base = w * readout;
    // the set-bit scan leaves both groups ascending, so the permutation loops
    // sweep every ordering exactly once
    std::array<int, 8> sig = conj_g;
    do {
      std::array<int, 8> tau = plain_g;
      do {
        for (int i = 0; i < n_pairs; ++i) {
          tuple[static_cast<std::size_t>(2 * i)] = sig[static_cast<std::size_t>(i)];
          tuple[static_cast<std::size_t>(2 * i + 1)] = tau[static_cast<std::size_t>(i)];
        }
        scratch = tuple;
        const int sgn = sort_parity(scratch, deg);
        Kernel::Key key{};
        for (int i = 0; i < deg; ++i)
          key[static_cast<std::size_t>(i)] =
              static_cast<std::uint16_t>(tuple[static_cast<std::size_t>(i)] >> 1);
        out.add(key, static_cast<double>(sgn) * base);
      } while (std::next_permutation(tau.begin(), tau.begin() + n_pairs));
    } while (std::next_permutation(sig.begin(), sig.begin() + n_pairs));
  }
  return out;
}

GreensSet greens(const ModelConfig& cfg) {
  validate_model(cfg, 1);
  const auto plain = make_base_space(cfg.lattice, false);
  const auto conj = make_base_space(cfg.lattice, true);
  if (conj->size() > 64)
    throw std::invalid_argument("greens: the model needs " + std::to_string(conj->size()) +
                                " generators but the element backend holds at most 64");
  const Kernel v0 = v0_from_potential(cfg.potential, plain);
  const Propagator prop(make_propagator_spec(cfg));
  const SkewMatrix c = prop.covariance_matrix(conj);
  GrContext ctx;
  ctx.gens = conj->size();
  ctx.integrated_first = 0;  // every generator is convolved over
  ctx.lambda_cap = cfg.n_max;
  ctx.psi_cap = 4 * cfg.n_max;  // degree 4 n_max is the most n_max vertices carry
  const GrElement v_el = element_from_pairs(v0, conj, ctx, 1);

  GreensSet gs;
  gs.n_max = cfg.n_max;
  const GrElement w = omega_graded(v_el, c, &gs.log_z);
  for (int n = 1; n <= 3; ++n) {
    auto& vec = gs.orders[static_cast<std::size_t>(n - 1)];
    vec.reserve(static_cast<std::size_t>(cfg.n_max) + 1);
    for (int j = 0; j <= cfg.n_max; ++j) vec.push_back(pairs_from_element(w, plain, n, j));
  }
  return gs;
}

Kernel greens_eval(const GreensSet& gs, int n_pairs, double lambda) {
  if (n_pairs < 1 || n_pairs > 3)
    throw std::invalid_argument("greens_eval: channel out of range");
  const auto& vec = gs.orders[static_cast<std::size_t>(n_pairs - 1)];
  if (vec.empty()) throw std::invalid_argument("greens_eval: empty Green's set");
  Kernel acc = vec[0];
  double lp = 1.0;
  for (std::size_t j = 1; j < vec.size(); ++j) {
    lp *= lambda;
    acc = kadd(acc, vec[j], Complex(lp));
  }
  return acc;
}

Kernel greens_numeric(const ModelConfig& cfg, int n_pairs, double lambda) {
  if (n_pairs < 1 || n_pairs > 3)
    throw std::invalid_argument("greens_numeric: channel out of range");
  validate_model(cfg, 1);
  const auto plain = make_base_space(cfg.lattice, false);
  const auto conj = make_base_space(cfg.lattice, true);
  if (conj->size() > 64)
    throw std::invalid_argument("greens_numeric: the model needs " +
                                std::to_string(conj->size()) +
                                " generators but the element backend holds at most 64");
  Kernel v0 = v0_from_potential(cfg.potential, plain);
  v0.scale(Complex(lambda));
  const Propagator prop(make_propagator_spec(cfg));
  const SkewMatrix c = prop.covariance_matrix(conj);
  GrContext ctx;
  ctx.gens = conj->size();
  ctx.integrated_first = 0;
  ctx.lambda_cap = 0;  // plain numeric coefficients: no series truncation at all
  ctx.psi_cap = -1;
  const GrElement v_el = element_from_pairs(v0, conj, ctx, 0);
  const GrElement w = omega(v_el, c);
  return pairs_from_element(w, plain, n_pairs, 0);
}

namespace {

// channel deviation kernel: the evaluated Green's kernel minus its
// coupling-linear reference (K for two legs, V0 for four, zero for six)
Kernel channel_deviation(const GreensSet& gs, int n, double lambda, const Kernel& k1,
                         const Kernel& v0) {
  Kernel dev = greens_eval(gs, n, lambda);
  if (n == 1) {
    Kernel ref = k1;
    ref.scale(Complex(lambda));
    dev = kadd(dev, ref, -1.0);
  } else if (n == 2) {
    Kernel ref = v0;
    ref.scale(Complex(lambda));
    dev = kadd(dev, ref, -1.0);
  }
  return dev;
}

}  // namespace

std::vector<DeviationRow> deviation_norms(const ModelConfig& cfg, const GreensSet& gs,
                                          const Kernel& k1, const Kernel& v0,
                                          const ScalarInputs& s, double upsilon_unit,
                                          int delta_max_g6) {
  if (gs.n_max < 2)
    throw std::invalid_argument("deviation_norms: needs at least two coupling orders");
  const int d = cfg.lattice.d;
  const auto dom = make_box_set(d, cfg.r0, cfg.r);
  if (delta_max_g6 < 0) delta_max_g6 = std::min(cfg.delta_max, 1);
  const double ups = std::abs(cfg.lambda) * upsilon_unit;
  std::vector<DeviationRow> rows;
  for (int n = 1; n <= 3; ++n) {
    const Kernel dev = channel_deviation(gs, n, cfg.lambda, k1, v0);
    const int cap = n == 3 ? delta_max_g6 : cfg.delta_max;
    const NormElement sn = seminorm_1inf(dev, dom, cap);
    for (int i = 0; i < dom->size(); ++i) {
      const MultiIndex& del = dom->at(i);
      if (del.order() > cap) continue;
      DeviationRow row;
      row.channel = 2 * n;
      row.delta = del;
      row.value = del.factorial() * sn.at_index(i);
      row.bound_shape =
          s.g * std::pow(s.gamma, 6 - 2 * n) * ups * ups / std::pow(s.mu, d + del.order());
      row.measured_const = row.bound_shape > 0.0 ? row.value / row.bound_shape : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

ScalingResult scaling_study(const ModelConfig& cfg, const std::vector<double>& lambdas) {
  validate_model(cfg, 2);
  if (lambdas.size() < 2)
    throw std::invalid_argument("scaling_study: needs at least two couplings");
  for (const double l : lambdas)
    if (!(l > 0.0)) throw std::invalid_argument("scaling_study: couplings must be positive");

  const GreensSet gs = greens(cfg);
  const auto plain = make_base_space(cfg.lattice, false);
  const Kernel v0 = v0_from_potential(cfg.potential, plain);
  const Propagator prop(make_propagator_spec(cfg));
  const Kernel k1 = k_kernel(v0, tadpole_covariance(prop, plain));

  ScalingResult res;
  res.lambdas = lambdas;
  for (const double l : lambdas)
    for (int n = 1; n <= 3; ++n)
      res.values[static_cast<std::size_t>(n - 1)].push_back(
          norm_1inf_scalar(channel_deviation(gs, n, l, k1, v0)));

  for (std::size_t ch = 0; ch < 3; ++ch) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      const double val = res.values[ch][i];
      if (!(val > 0.0) || !std::isfinite(val))
        throw std::domain_error("scaling_study: degenerate fit (vanishing deviation norm)");
      const double x = std::log(lambdas[i]);
      const double y = std::log(val);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double count = static_cast<double>(lambdas.size());
    const double denom = sxx - sx * sx / count;
    if (!(denom > 0.0))
      throw std::domain_error("scaling_study: degenerate fit (repeated couplings)");
    res.slopes[ch] = (sxy - sx * sy / count) / denom;
  }
  return res;
}

BoundsReport bounds_report(const ModelConfig& cfg) {
  validate_model(cfg, 1);
  const auto plain = make_base_space(cfg.lattice, false);
  const auto conj = make_base_space(cfg.lattice, true);
  const Kernel v0 = v0_from_potential(cfg.potential, plain);
  const Propagator prop(make_propagator_spec(cfg));

  BoundsReport rep;
  rep.scalars = scalar_inputs(prop, cfg.lattice.L);
  rep.lambda = cfg.lambda;
  rep.v0_norm_unit = norm_1inf_scalar(v0);
  rep.upsilon_unit = upsilon(v0, cfg.mu, cfg.r, cfg.r0, cfg.delta_max);
  rep.verdict =
      smallness_check(std::abs(cfg.lambda) * rep.v0_norm_unit,
                      std::abs(cfg.lambda) * rep.upsilon_unit, rep.scalars, cfg.lattice.d,
                      cfg.epsilon);
  rep.gram_sq = prop.gram_bound_sq(cfg.lattice.L);
  rep.gapped_sq = prop.s_gapped_sq(cfg.lattice.L);
  rep.b = 2.0 * std::sqrt(std::min(rep.gram_sq, rep.gapped_sq));
  rep.alpha = 2.0;
  const auto dom = make_box_set(cfg.lattice.d, cfg.r0, cfg.r);
  rep.frak_c = contraction_bound_element(prop.covariance_kernel(conj), dom, cfg.delta_max);

  if (conj->size() <= 64) {
    GrContext ctx;
    ctx.gens = conj->size();
    ctx.integrated_first = 0;
    ctx.lambda_cap = cfg.n_max;
    ctx.psi_cap = 4 * cfg.n_max;
    Kernel v0l = v0;
    v0l.scale(Complex(cfg.lambda));
    const GrElement v_el = element_from_pairs(v0l, conj, ctx, 1);
    rep.n_values.reserve(static_cast<std::size_t>(cfg.n_max) + 1);
    // the doubled-weight reading of the contraction norm; the quartic
    // interaction carries coupling order one only
    for (int j = 0; j <= cfg.n_max; ++j)
      rep.n_values.push_back(
          smul(2.0, n_functional(v_el, conj, rep.frak_c, rep.b, rep.alpha, cfg.delta_max, j)));
  }

  rep.epsilon = cfg.epsilon;
  rep.r = cfg.r;
  rep.r0 = cfg.r0;
  rep.delta_max = cfg.delta_max;
  return rep;
}

}  // namespace ssrg
