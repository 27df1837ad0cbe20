#include "ssrg/propagator.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <stdexcept>

#include "ssrg/jet.hpp"

namespace ssrg {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Adaptive Gauss-Kronrod on a finite interval; tight enough that quadrature
// error stays well below the 1e-8 tolerances of the scalar-bound tests.
double quad(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 14, 1e-13);
}

}  // namespace

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double h0 = std::exp(-1.0 / x);
  const double h1 = std::exp(-1.0 / (1.0 - x));
  return h0 / (h0 + h1);
}

double plateau(double x, double inner, double outer) {
  if (!(0.0 < inner && inner < outer)) throw std::invalid_argument("plateau: need 0 < inner < outer");
  return smooth_step((outer - std::abs(x)) / (outer - inner));
}

Propagator::Propagator(PropagatorSpec spec) : spec_(std::move(spec)) {
  if (spec_.d < 1 || spec_.d > 3) throw std::invalid_argument("Propagator: d must be 1..3");
  if (spec_.dx <= 0.0) throw std::invalid_argument("Propagator: dx must be positive");
  if (spec_.mu <= 0.0) throw std::invalid_argument("Propagator: mu must be positive");
  if (static_cast<int>(spec_.dispersion.amp.size()) != spec_.d)
    throw std::invalid_argument("Propagator: need one cosine amplitude per spatial axis");
  if (spec_.cutoff.uv == UvType::plateau &&
      !(0.0 < spec_.cutoff.inner && spec_.cutoff.inner < spec_.cutoff.outer &&
        spec_.cutoff.outer <= 1.0))
    throw std::invalid_argument("Propagator: plateau needs 0 < inner < outer <= 1");
  if (spec_.cutoff.chi != ChiType::none && spec_.cutoff.ec <= 0.0)
    throw std::invalid_argument("Propagator: chi cutoff needs ec > 0");
}

double Propagator::dispersion(const std::vector<double>& k) const {
  double e = spec_.dispersion.c0;
  for (int j = 0; j < spec_.d; ++j) e += spec_.dispersion.amp[static_cast<std::size_t>(j)] * std::cos(k[static_cast<std::size_t>(j)] * spec_.dx);
  return e;
}

double Propagator::uv_cutoff(const std::vector<double>& k) const {
  if (spec_.cutoff.uv == UvType::one) return 1.0;
  const double kmax = kPi / spec_.dx;
  double u = 1.0;
  for (int j = 0; j < spec_.d; ++j)
    u *= plateau(k[static_cast<std::size_t>(j)], spec_.cutoff.inner * kmax, spec_.cutoff.outer * kmax);
  return u;
}

double Propagator::chi(double k0, const std::vector<double>& k) const {
  switch (spec_.cutoff.chi) {
    case ChiType::none:
      return 0.0;
    case ChiType::k0_sharp:
      return std::abs(k0) > spec_.cutoff.ec ? uv_cutoff(k) : 0.0;
    case ChiType::k0_bump:
      return uv_cutoff(k) * plateau(k0, spec_.cutoff.ec, 2.0 * spec_.cutoff.ec);
  }
  return 0.0;
}

Complex Propagator::momentum_value(double k0, const std::vector<double>& k) const {
  const double num = uv_cutoff(k) - chi(k0, k);
  return num / Complex(-dispersion(k), k0);
}

Complex Propagator::momentum_derivative(const MultiIndex& delta, double k0, double k1) const {
  if (spec_.d != 1) throw std::invalid_argument("momentum_derivative: implemented for d == 1");
  if (spec_.cutoff.chi != ChiType::none)
    throw std::invalid_argument("momentum_derivative: implemented for chi == none");
  if (delta.axes != 2) throw std::invalid_argument("momentum_derivative: delta must have 2 axes");
  const int d0 = delta.v[0];
  const int d1 = delta.v[1];
  using C = Jet::C;

  // Spatial jet in k1 of U(k1) / (i k0 - e(k1))^{d0+1}; the k0 derivatives of
  // 1/(i k0 - e) contribute the closed-form factor (-i)^{d0} d0!.
  const Jet kj = Jet::variable(d1, k1);
  Jet ej = Jet::constant(d1, C(spec_.dispersion.c0));
  ej += C(spec_.dispersion.amp[0]) * (C(spec_.dx) * kj).cos();

  Jet uj = Jet::constant(d1, C(1.0));
  if (spec_.cutoff.uv == UvType::plateau) {
    const double kmax = kPi / spec_.dx;
    const double inner = spec_.cutoff.inner * kmax;
    const double outer = spec_.cutoff.outer * kmax;
    const double a = (outer - std::abs(k1)) / (outer - inner);
    if (a <= 0.0) {
      uj = Jet::constant(d1, C(0.0));
    } else if (a >= 1.0) {
      // flat region: all derivatives of U vanish (smooth_step is identically
      // 1 there, and every derivative of smooth_step vanishes at a = 1)
      uj = Jet::constant(d1, C(1.0));
    } else {
      const Jet absj = k1 >= 0.0 ? kj : -kj;
      const Jet aj = C(1.0 / (outer - inner)) * (Jet::constant(d1, C(outer)) - absj);
      const Jet h0 = (-aj.reciprocal()).exp();
      const Jet h1 = (-(Jet::constant(d1, C(1.0)) - aj).reciprocal()).exp();
      uj = h0 * (h0 + h1).reciprocal();
    }
  }

  const Jet denom_inv = (Jet::constant(d1, C(0.0, k0)) - ej).reciprocal();
  C factor(1.0);
  for (int i = 0; i < d0; ++i) factor *= C(0.0, -1.0);
  for (int i = 2; i <= d0; ++i) factor *= static_cast<double>(i);
  const Jet cj = factor * (uj * denom_inv.ipow(d0 + 1));
  return cj.derivative(d1);
}

double Propagator::time_kernel(double t, double e) const {
  // chi == none closed form; the t = 0 value is the limit t -> 0-.
  const double analytic = (t > 0.0) ? (e > 0.0 ? -std::exp(-e * t) : 0.0)
                                    : (e < 0.0 ? std::exp(-e * t) : 0.0);
  if (spec_.cutoff.chi == ChiType::none) return analytic;

  const double ec = spec_.cutoff.ec;
  // Re[e^{-i k0 t} / (i k0 - e)] = (-e cos(k0 t) - k0 sin(k0 t)) / (k0^2 + e^2)
  const auto base = [&](double k0) {
    return (-e * std::cos(k0 * t) - k0 * std::sin(k0 * t)) / (k0 * k0 + e * e);
  };
  if (spec_.cutoff.chi == ChiType::k0_sharp) {
    // s(k0) = [|k0| <= ec]: a single finite window
    return quad(base, -ec, ec) / (2.0 * kPi);
  }
  // s(k0) = 1 - plateau(k0; ec, 2 ec): the full-line part is the analytic
  // kernel, minus the compactly supported plateau correction
  const auto corr = [&](double k0) { return plateau(k0, ec, 2.0 * ec) * base(k0); };
  return analytic - quad(corr, -2.0 * ec, 2.0 * ec) / (2.0 * kPi);
}

double Propagator::position_value(int n, double t) const {
  if (spec_.d != 1) throw std::invalid_argument("position_value: implemented for d == 1");
  const double hw = support_halfwidth();
  const double x = n * spec_.dx;
  // U and e are even in k1, so only the cosine survives
  const auto f = [&](double k1) {
    const std::vector<double> k{k1};
    return std::cos(k1 * x) * uv_cutoff(k) * time_kernel(t, dispersion(k));
  };
  return quad(f, -hw, hw) / (2.0 * kPi);
}

double Propagator::lattice_scalar(const BaseSpacePtr& space, const BasePoint& p,
                                  const BasePoint& q) const {
  const LatticeSpec& lat = space->lattice();
  if (lat.d != spec_.d) throw std::invalid_argument("lattice_scalar: dimension mismatch");
  if (lat.dx != spec_.dx) throw std::invalid_argument("lattice_scalar: spacing mismatch");
  if (p.spin != q.spin) return 0.0;

  // True (window) time difference; only the spatial directions are periodic
  // momentum sums.
  const double dt = (p.x[0] - q.x[0]) * lat.dt;
  const int L = lat.L;
  const double kstep = 2.0 * kPi / (L * spec_.dx);

  long modes = 1;
  for (int j = 0; j < spec_.d; ++j) modes *= L;

  double acc = 0.0;
  std::vector<double> k(static_cast<std::size_t>(spec_.d));
  for (long m = 0; m < modes; ++m) {
    long rest = m;
    double phase = 0.0;
    for (int j = 0; j < spec_.d; ++j) {
      const int mj = static_cast<int>(rest % L);
      rest /= L;
      const double kj = kstep * minimal_image(mj, L);
      k[static_cast<std::size_t>(j)] = kj;
      phase += kj * (p.x[j + 1] - q.x[j + 1]) * spec_.dx;
    }
    const double u = uv_cutoff(k);
    if (u == 0.0) continue;
    // the k -> -k mode pairing cancels the sine part exactly
    acc += std::cos(phase) * u * time_kernel(dt, dispersion(k));
  }
  double cell = 1.0;
  for (int j = 0; j < spec_.d; ++j) cell /= (L * spec_.dx);
  return cell * acc;
}

Kernel Propagator::scalar_kernel(const BaseSpacePtr& space) const {
  if (space->with_conjugation())
    throw std::invalid_argument("scalar_kernel: expects a space without conjugation");
  Kernel f(space, 0, 2);
  const int sz = space->size();
  for (int i = 0; i < sz; ++i) {
    const BasePoint p = space->point(i);
    for (int j = 0; j < sz; ++j) {
      const BasePoint q = space->point(j);
      if (p.spin != q.spin) continue;
      const double v = lattice_scalar(space, p, q);
      if (v != 0.0) f.add({i, j}, Complex(v));
    }
  }
  return f;
}

Kernel Propagator::covariance_kernel(const BaseSpacePtr& space) const {
  if (!space->with_conjugation())
    throw std::invalid_argument("covariance_kernel: expects a conjugated space");
  Kernel f(space, 0, 2);
  const int sz = space->size();
  for (int i = 0; i < sz; ++i) {
    const BasePoint p = space->point(i);
    for (int j = 0; j < sz; ++j) {
      const BasePoint q = space->point(j);
      if (p.spin != q.spin) continue;
      double v = 0.0;
      if (p.conj == 0 && q.conj == 1)
        v = lattice_scalar(space, p, q);
      else if (p.conj == 1 && q.conj == 0)
        v = -lattice_scalar(space, q, p);
      else
        continue;
      if (v != 0.0) f.add({i, j}, Complex(v));
    }
  }
  return f;
}

SkewMatrix Propagator::covariance_matrix(const BaseSpacePtr& space) const {
  if (!space->with_conjugation())
    throw std::invalid_argument("covariance_matrix: expects a conjugated space");
  const int sz = space->size();
  SkewMatrix a(sz);
  for (int i = 0; i < sz; ++i) {
    const BasePoint p = space->point(i);
    for (int j = i + 1; j < sz; ++j) {
      const BasePoint q = space->point(j);
      if (p.spin != q.spin) continue;
      double v = 0.0;
      if (p.conj == 0 && q.conj == 1)
        v = lattice_scalar(space, p, q);
      else if (p.conj == 1 && q.conj == 0)
        v = -lattice_scalar(space, q, p);
      else
        continue;
      if (v != 0.0) a.set(i, j, Complex(v));
    }
  }
  return a;
}

double Propagator::support_halfwidth() const {
  const double kmax = kPi / spec_.dx;
  return spec_.cutoff.uv == UvType::plateau ? spec_.cutoff.outer * kmax : kmax;
}

double Propagator::spatial_accumulate(int L,
                                      const std::function<double(const std::vector<double>&)>& f,
                                      bool plain_measure) const {
  if (L == 0) {
    const double hw = support_halfwidth();
    std::vector<double> k(static_cast<std::size_t>(spec_.d));
    // nested adaptive quadrature over the support box
    std::function<double(int)> axis = [&](int j) -> double {
      const auto g = [&](double kj) {
        k[static_cast<std::size_t>(j)] = kj;
        return j + 1 < spec_.d ? axis(j + 1) : f(k);
      };
      return quad(g, -hw, hw);
    };
    double total = axis(0);
    if (!plain_measure)
      for (int j = 0; j < spec_.d; ++j) total /= 2.0 * kPi;
    return total;
  }

  const double kstep = 2.0 * kPi / (L * spec_.dx);
  long modes = 1;
  for (int j = 0; j < spec_.d; ++j) modes *= L;
  double acc = 0.0;
  std::vector<double> k(static_cast<std::size_t>(spec_.d));
  for (long m = 0; m < modes; ++m) {
    long rest = m;
    for (int j = 0; j < spec_.d; ++j) {
      k[static_cast<std::size_t>(j)] = kstep * minimal_image(static_cast<int>(rest % L), L);
      rest /= L;
    }
    acc += f(k);
  }
  double w = 1.0;
  for (int j = 0; j < spec_.d; ++j) w *= plain_measure ? kstep : 1.0 / (L * spec_.dx);
  return acc * w;
}

double Propagator::integral_u(int L) const {
  return spatial_accumulate(L, [&](const std::vector<double>& k) { return uv_cutoff(k); }, false);
}

double Propagator::g1(int L) const {
  return spatial_accumulate(
      L,
      [&](const std::vector<double>& k) {
        return uv_cutoff(k) > 0.0 ? 1.0 / std::abs(dispersion(k)) : 0.0;
      },
      true);
}

double Propagator::g2(int L) const {
  return spatial_accumulate(
      L,
      [&](const std::vector<double>& k) {
        if (uv_cutoff(k) <= 0.0) return 0.0;
        const double e = dispersion(k);
        return spec_.mu / (e * e);
      },
      true);
}

namespace {

// Scan grid per axis for dispersion extrema over supp U.  Exact whenever the
// extrema of the cosine dispersion sit on scan points (k = 0 and the support
// edges always do).
int scan_points(int d) { return d == 1 ? 4096 : (d == 2 ? 256 : 64); }

}  // namespace

double Propagator::sup_abs_e() const {
  const double hw = support_halfwidth();
  const int n = scan_points(spec_.d);
  long total = 1;
  for (int j = 0; j < spec_.d; ++j) total *= n + 1;
  double best = 0.0;
  std::vector<double> k(static_cast<std::size_t>(spec_.d));
  for (long m = 0; m < total; ++m) {
    long rest = m;
    for (int j = 0; j < spec_.d; ++j) {
      k[static_cast<std::size_t>(j)] = -hw + (2.0 * hw / n) * static_cast<double>(rest % (n + 1));
      rest /= n + 1;
    }
    best = std::max(best, std::abs(dispersion(k)));
  }
  return best;
}

double Propagator::min_abs_e() const {
  const double hw = support_halfwidth();
  const int n = scan_points(spec_.d);
  long total = 1;
  for (int j = 0; j < spec_.d; ++j) total *= n + 1;
  double best = kInf;
  std::vector<double> k(static_cast<std::size_t>(spec_.d));
  for (long m = 0; m < total; ++m) {
    long rest = m;
    for (int j = 0; j < spec_.d; ++j) {
      k[static_cast<std::size_t>(j)] = -hw + (2.0 * hw / n) * static_cast<double>(rest % (n + 1));
      rest /= n + 1;
    }
    best = std::min(best, std::abs(dispersion(k)));
  }
  return best;
}

double Propagator::gap_E() const { return std::max(1.0, sup_abs_e()); }

double Propagator::gamma(int L) const {
  const double e_top = gap_E();
  const double val = spatial_accumulate(
      L,
      [&](const std::vector<double>& k) {
        const double u = uv_cutoff(k);
        if (u <= 0.0) return 0.0;
        return u * std::log(e_top / std::abs(dispersion(k)));
      },
      true);
  return std::max(1.0, std::sqrt(val));
}

double Propagator::gram_bound_sq(int L) const {
  // Only the sharp frequency cutoff makes |C| integrable over all k0:
  // int dk0/(2pi) over |k0| <= ec of 1/sqrt(k0^2+e^2) = asinh(ec/|e|)/pi.
  if (spec_.cutoff.chi != ChiType::k0_sharp) return kInf;
  const double ec = spec_.cutoff.ec;
  return spatial_accumulate(
      L,
      [&](const std::vector<double>& k) {
        const double u = uv_cutoff(k);
        if (u <= 0.0) return 0.0;
        return u * std::asinh(ec / std::abs(dispersion(k))) / kPi;
      },
      false);
}

double Propagator::s_gapped_sq(int L) const {
  const double e_top = sup_abs_e();
  const double i_u = integral_u(L);

  double i_chi = 0.0;
  switch (spec_.cutoff.chi) {
    case ChiType::none:
      i_chi = 0.0;
      break;
    case ChiType::k0_sharp:
      // chi = U [|k0| > ec] has divergent k0 integral
      return kInf;
    case ChiType::k0_bump: {
      const double ec = spec_.cutoff.ec;
      const double w =
          quad([&](double k0) { return plateau(k0, ec, 2.0 * ec); }, -2.0 * ec, 2.0 * ec) /
          (2.0 * kPi);
      i_chi = w * i_u;
      break;
    }
  }

  const auto third = [&](const std::vector<double>& k) {
    const double u = uv_cutoff(k);
    if (u <= 0.0) return 0.0;
    const double e = std::abs(dispersion(k));
    switch (spec_.cutoff.chi) {
      case ChiType::none:
        return u * std::asinh(e_top / e) / kPi;
      case ChiType::k0_sharp:
        return u * std::asinh(std::min(e_top, spec_.cutoff.ec) / e) / kPi;
      case ChiType::k0_bump: {
        const double ec = spec_.cutoff.ec;
        return u *
               quad(
                   [&](double k0) {
                     return (1.0 - plateau(k0, ec, 2.0 * ec)) / std::sqrt(k0 * k0 + e * e);
                   },
                   -e_top, e_top) /
               (2.0 * kPi);
      }
    }
    return 0.0;
  };
  const double i_third = spatial_accumulate(L, third, false);

  const double chi_term = i_chi == 0.0 ? 0.0 : (e_top > 0.0 ? 3.0 / e_top * i_chi : kInf);
  return 9.0 * i_u + chi_term + 6.0 * i_third;
}

NormElement Propagator::contraction_element(SaturatedSetPtr dom, int L) const {
  if (dom->axes() != spec_.d + 1)
    throw std::invalid_argument("contraction_element: domain axes must be d + 1");
  const double g1v = g1(L);
  const double scale = g1v / std::pow(spec_.mu, spec_.d);
  NormElement x(dom);
  for (int i = 0; i < dom->size(); ++i) {
    const MultiIndex& delta = dom->at(i);
    int spatial = 0;
    for (int j = 1; j < delta.axes; ++j) spatial += delta.v[j];
    const double val = spatial <= spec_.r - spec_.d - 1
                           ? scale * std::pow(2.0 / spec_.mu, delta.order())
                           : kInf;
    x.set_index(i, val);
  }
  return x;
}

double Propagator::gram_bound_partitioned(
    const std::vector<std::function<double(const std::vector<double>&)>>& parts, int L) const {
  if (parts.empty()) return 0.0;
  if (spec_.cutoff.chi != ChiType::k0_sharp) return kInf;
  const double ec = spec_.cutoff.ec;
  double best = 0.0;
  for (const auto& part : parts) {
    const double val = spatial_accumulate(
        L,
        [&](const std::vector<double>& k) {
          const double u = uv_cutoff(k);
          if (u <= 0.0) return 0.0;
          const double p = part(k);
          return u * p * p * std::asinh(ec / std::abs(dispersion(k))) / kPi;
        },
        false);
    best = std::max(best, std::sqrt(val));
  }
  return best;
}

NormElement momentum_norm(
    const std::function<Complex(const MultiIndex&, double, double)>& deriv, SaturatedSetPtr dom,
    MomentumNormMode mode, double k0_halfwidth, double k_halfwidth, int r0_cap, int r_cap) {
  if (dom->axes() != 2) throw std::invalid_argument("momentum_norm: needs a 2-axis domain");
  if (!(k0_halfwidth > 0.0 && k_halfwidth > 0.0))
    throw std::invalid_argument("momentum_norm: halfwidths must be positive");
  NormElement x(dom);
  for (int i = 0; i < dom->size(); ++i) {
    const MultiIndex& delta = dom->at(i);
    if (delta.v[0] > r0_cap || delta.v[1] > r_cap) {
      x.set_index(i, kInf);
      continue;
    }
    double fact = 1.0;
    for (int a = 0; a < delta.axes; ++a)
      for (int m = 2; m <= delta.v[a]; ++m) fact *= m;
    double val = 0.0;
    if (mode == MomentumNormMode::sup) {
      const int n = 256;
      for (int a = 0; a <= n; ++a) {
        const double k0 = -k0_halfwidth + (2.0 * k0_halfwidth / n) * a;
        for (int b = 0; b <= n; ++b) {
          const double k1 = -k_halfwidth + (2.0 * k_halfwidth / n) * b;
          val = std::max(val, std::abs(deriv(delta, k0, k1)));
        }
      }
    } else {
      // region-restricted double integral; the consumers compare at 1e-9, so a
      // matching tolerance keeps the nested adaptation shallow
      const auto q9 = [](const std::function<double(double)>& f, double a, double b) {
        return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 8, 1e-9);
      };
      val = q9(
                [&](double k1) {
                  return q9([&](double k0) { return std::abs(deriv(delta, k0, k1)); },
                            -k0_halfwidth, k0_halfwidth);
                },
                -k_halfwidth, k_halfwidth) /
            (4.0 * kPi * kPi);
    }
    x.set_index(i, val / fact);
  }
  return x;
}

NormElement Propagator::momentum_norm_element(SaturatedSetPtr dom, MomentumNormMode mode,
                                              double k0_halfwidth) const {
  if (k0_halfwidth <= 0.0) k0_halfwidth = 50.0 * gap_E();
  return momentum_norm(
      [this](const MultiIndex& delta, double k0, double k1) {
        return momentum_derivative(delta, k0, k1);
      },
      dom, mode, k0_halfwidth, support_halfwidth(), spec_.r0, spec_.r);
}

Kernel delta_e_kernel(const BaseSpacePtr& space,
                      const std::function<double(const std::vector<double>&)>& de) {
  const LatticeSpec& lat = space->lattice();
  const int d = lat.d;
  const int L = lat.L;
  const double kstep = 2.0 * kPi / (L * lat.dx);

  long modes = 1;
  for (int j = 0; j < d; ++j) modes *= L;
  std::vector<std::vector<double>> mode_k(static_cast<std::size_t>(modes));
  std::vector<double> mode_de(static_cast<std::size_t>(modes));
  for (long m = 0; m < modes; ++m) {
    std::vector<double> k(static_cast<std::size_t>(d));
    long rest = m;
    for (int j = 0; j < d; ++j) {
      k[static_cast<std::size_t>(j)] = kstep * minimal_image(static_cast<int>(rest % L), L);
      rest /= L;
    }
    mode_de[static_cast<std::size_t>(m)] = de(k);
    mode_k[static_cast<std::size_t>(m)] = std::move(k);
  }

  double cell = 1.0 / lat.dt;
  for (int j = 0; j < d; ++j) cell /= (L * lat.dx);

  Kernel f(space, 0, 2);
  const int sz = space->size();
  for (int i = 0; i < sz; ++i) {
    const BasePoint p = space->point(i);
    for (int j = 0; j < sz; ++j) {
      const BasePoint q = space->point(j);
      if (p.spin != q.spin || p.conj != q.conj || p.x[0] != q.x[0]) continue;
      const double sign = p.conj == 0 ? 1.0 : -1.0;
      Complex acc(0.0);
      for (long m = 0; m < modes; ++m) {
        double phase = 0.0;
        for (int a = 0; a < d; ++a)
          phase += mode_k[static_cast<std::size_t>(m)][static_cast<std::size_t>(a)] *
                   (p.x[a + 1] - q.x[a + 1]) * lat.dx;
        acc += mode_de[static_cast<std::size_t>(m)] *
               Complex(std::cos(sign * phase), std::sin(sign * phase));
      }
      const Complex v = cell * acc;
      if (v != Complex(0.0)) f.add({i, j}, v);
    }
  }
  // drop pure phase-cancellation residue so lattice deltas come out sparse
  double top = 0.0;
  for (const auto& [key, v] : f.entries()) top = std::max(top, std::abs(v));
  f.prune(1e-12 * top);
  return f;
}

Complex resolvent(double k0, double num, double e_eff) { return num / Complex(-e_eff, k0); }

Complex counterterm_series(double k0, double num, double e, double de, int nterms) {
  const Complex c0 = resolvent(k0, num, e);
  const Complex q = -de / Complex(-e, k0);
  Complex acc(0.0);
  Complex pow(1.0);
  for (int n = 0; n <= nterms; ++n) {
    acc += pow;
    pow *= q;
  }
  return c0 * acc;
}

Complex counterterm_derivative(double k0, double num, double e, double de, double deprime) {
  const Complex denom(-(e - de), k0);
  return -num * deprime / (denom * denom);
}

NormElement counterterm_majorant(const NormElement& c0, const NormElement& de_norm) {
  return majorant_quotient(c0, de_norm);
}

}  // namespace ssrg
