#include "ssrg/norm_domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ssrg {

// ---------------------------------------------------------------------------
// MultiIndex
// ---------------------------------------------------------------------------

MultiIndex::MultiIndex(std::initializer_list<int> entries) {
  if (entries.size() > kMaxAxes) throw std::invalid_argument("MultiIndex: too many axes");
  axes = static_cast<std::uint8_t>(entries.size());
  int i = 0;
  for (int e : entries) set(i++, e);
}

void MultiIndex::set(int i, int value) {
  if (i < 0 || i >= axes) throw std::invalid_argument("MultiIndex::set: axis out of range");
  if (value < 0 || value > 255) throw std::invalid_argument("MultiIndex::set: entry out of range");
  v[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value);
}

int MultiIndex::order() const {
  int s = 0;
  for (int i = 0; i < axes; ++i) s += v[static_cast<std::size_t>(i)];
  return s;
}

int MultiIndex::spatial_order() const {
  int s = 0;
  for (int i = 1; i < axes; ++i) s += v[static_cast<std::size_t>(i)];
  return s;
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int i = 0; i < axes; ++i)
    for (int k = 2; k <= v[static_cast<std::size_t>(i)]; ++k) f *= k;
  return f;
}

bool MultiIndex::leq(const MultiIndex& o) const {
  if (axes != o.axes) throw std::invalid_argument("MultiIndex::leq: axis mismatch");
  for (int i = 0; i < axes; ++i)
    if (v[static_cast<std::size_t>(i)] > o.v[static_cast<std::size_t>(i)]) return false;
  return true;
}

MultiIndex MultiIndex::plus(const MultiIndex& o) const {
  if (axes != o.axes) throw std::invalid_argument("MultiIndex::plus: axis mismatch");
  MultiIndex r(axes);
  for (int i = 0; i < axes; ++i) r.set(i, (*this)[i] + o[i]);
  return r;
}

MultiIndex MultiIndex::minus(const MultiIndex& o) const {
  if (!o.leq(*this)) throw std::invalid_argument("MultiIndex::minus: not componentwise <=");
  MultiIndex r(axes);
  for (int i = 0; i < axes; ++i) r.set(i, (*this)[i] - o[i]);
  return r;
}

MultiIndex MultiIndex::scaled(int n) const {
  MultiIndex r(axes);
  for (int i = 0; i < axes; ++i) r.set(i, std::min(255, n * (*this)[i]));
  return r;
}

MultiIndex MultiIndex::plus_unit(int axis) const {
  MultiIndex r = *this;
  r.set(axis, (*this)[axis] + 1);
  return r;
}

std::uint32_t MultiIndex::packed() const {
  std::uint32_t k = 0;
  for (int i = 0; i < kMaxAxes; ++i) k = (k << 8) | v[static_cast<std::size_t>(i)];
  return k;
}

bool MultiIndex::operator<(const MultiIndex& o) const {
  for (int i = 0; i < std::max<int>(axes, o.axes); ++i) {
    int a = i < axes ? (*this)[i] : 0;
    int b = i < o.axes ? o[i] : 0;
    if (a != b) return a < b;
  }
  return false;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < axes; ++i) os << (i ? "," : "") << (*this)[i];
  os << ')';
  return os.str();
}

double multi_binomial(const MultiIndex& delta, const MultiIndex& alpha) {
  if (!alpha.leq(delta)) return 0.0;
  double b = 1.0;
  for (int i = 0; i < delta.size(); ++i) {
    int n = delta[i], k = alpha[i];
    // binom(n, k) iteratively; entries are tiny so double is exact.
    double c = 1.0;
    for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
    b *= c;
  }
  return b;
}

// ---------------------------------------------------------------------------
// SaturatedSet
// ---------------------------------------------------------------------------

SaturatedSet::SaturatedSet(int axes, std::vector<MultiIndex> sorted)
    : idx_(std::move(sorted)), axes_(axes) {
  for (const auto& m : idx_) max_total_degree_ = std::max(max_total_degree_, m.order());
  // Verify downward closure: every delta - e_i must be present.
  for (const auto& m : idx_) {
    for (int i = 0; i < axes_; ++i) {
      if (m[i] == 0) continue;
      MultiIndex down = m;
      down.set(i, m[i] - 1);
      if (index_of(down) < 0)
        throw std::invalid_argument("SaturatedSet: index set is not downward closed at " +
                                    m.to_string());
    }
  }
}

static void enumerate_box(int axes, const std::function<int(int, const MultiIndex&)>& limit,
                          const std::function<bool(const MultiIndex&)>& keep,
                          std::vector<MultiIndex>* out) {
  MultiIndex cur(axes);
  // Odometer enumeration; final order comes from an explicit sort.
  std::function<void(int)> rec = [&](int axis) {
    if (axis == axes) {
      if (keep(cur)) out->push_back(cur);
      return;
    }
    for (int v = 0; v <= limit(axis, cur); ++v) {
      cur.set(axis, v);
      rec(axis + 1);
    }
    cur.set(axis, 0);
  };
  rec(0);
}

SaturatedSet SaturatedSet::box(int d, int r0, int r) {
  if (d < 0 || d + 1 > MultiIndex::kMaxAxes || r0 < 0 || r < 0)
    throw std::invalid_argument("SaturatedSet::box: bad parameters");
  std::vector<MultiIndex> all;
  enumerate_box(
      d + 1, [&](int axis, const MultiIndex&) { return axis == 0 ? r0 : r; },
      [&](const MultiIndex& m) { return m.spatial_order() <= r; }, &all);
  std::sort(all.begin(), all.end());
  return SaturatedSet(d + 1, std::move(all));
}

SaturatedSet SaturatedSet::total_degree(int d, int degree) {
  if (d < 0 || d + 1 > MultiIndex::kMaxAxes || degree < 0)
    throw std::invalid_argument("SaturatedSet::total_degree: bad parameters");
  std::vector<MultiIndex> all;
  enumerate_box(
      d + 1, [&](int, const MultiIndex&) { return degree; },
      [&](const MultiIndex& m) { return m.order() <= degree; }, &all);
  std::sort(all.begin(), all.end());
  return SaturatedSet(d + 1, std::move(all));
}

SaturatedSet SaturatedSet::downward_closure(int d, const std::vector<MultiIndex>& generators) {
  std::vector<MultiIndex> all;
  for (const auto& g : generators) {
    if (g.size() != d + 1)
      throw std::invalid_argument("SaturatedSet::downward_closure: axis mismatch");
    enumerate_box(
        d + 1, [&](int axis, const MultiIndex&) { return g[axis]; },
        [](const MultiIndex&) { return true; }, &all);
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return SaturatedSet(d + 1, std::move(all));
}

bool SaturatedSet::contains(const MultiIndex& m) const { return index_of(m) >= 0; }

int SaturatedSet::index_of(const MultiIndex& m) const {
  if (m.size() != axes_) return -1;
  // Binary search over the lexicographically sorted list.
  auto it = std::lower_bound(idx_.begin(), idx_.end(), m);
  if (it != idx_.end() && *it == m) return static_cast<int>(it - idx_.begin());
  return -1;
}

int SaturatedSet::nilpotency_order() const {
  for (int n = 1; n <= max_total_degree_ + 1; ++n) {
    bool all_out = true;
    for (const auto& m : idx_) {
      if (m.is_zero()) continue;
      if (contains(m.scaled(n))) {
        all_out = false;
        break;
      }
    }
    if (all_out) return n;
  }
  return max_total_degree_ + 1;  // unreachable: n = D_max + 1 always succeeds
}

bool SaturatedSet::operator==(const SaturatedSet& o) const {
  return axes_ == o.axes_ && idx_ == o.idx_;
}

std::string SaturatedSet::describe() const {
  std::ostringstream os;
  os << "SaturatedSet(axes=" << axes_ << ", size=" << size()
     << ", max_degree=" << max_total_degree_ << ")";
  return os.str();
}

SaturatedSetPtr make_box_set(int d, int r0, int r) {
  return std::make_shared<const SaturatedSet>(SaturatedSet::box(d, r0, r));
}
SaturatedSetPtr make_total_degree_set(int d, int degree) {
  return std::make_shared<const SaturatedSet>(SaturatedSet::total_degree(d, degree));
}

// ---------------------------------------------------------------------------
// NormElement
// ---------------------------------------------------------------------------

NormElement::NormElement(SaturatedSetPtr dom) : dom_(std::move(dom)) {
  if (!dom_) throw std::invalid_argument("NormElement: null domain");
  c_.assign(static_cast<std::size_t>(dom_->size()), 0.0);
}

NormElement NormElement::zeros(SaturatedSetPtr dom) { return NormElement(std::move(dom)); }

NormElement NormElement::constant(SaturatedSetPtr dom, double c) {
  NormElement e(std::move(dom));
  e.set(MultiIndex(e.dom_->axes()), c);
  return e;
}

NormElement NormElement::monomial(SaturatedSetPtr dom, const MultiIndex& delta, double c) {
  NormElement e(std::move(dom));
  e.set(delta, c);
  return e;
}

double NormElement::at(const MultiIndex& delta) const {
  int i = dom_->index_of(delta);
  return i < 0 ? kInf : c_[static_cast<std::size_t>(i)];
}

void NormElement::set(const MultiIndex& delta, double value) {
  int i = dom_->index_of(delta);
  if (i < 0) throw std::invalid_argument("NormElement::set: index outside domain");
  set_index(i, value);
}

void NormElement::set_index(int i, double value) {
  if (value < 0.0 || std::isnan(value))
    throw std::invalid_argument("NormElement: coefficients must lie in [0, inf]");
  c_[static_cast<std::size_t>(i)] = value;
}

double NormElement::constant_term() const { return at(MultiIndex(dom_->axes())); }

bool NormElement::all_finite() const {
  for (double x : c_)
    if (std::isinf(x)) return false;
  return true;
}

std::string NormElement::to_string(int max_terms) const {
  std::ostringstream os;
  int shown = 0;
  for (int i = 0; i < dom_->size() && shown < max_terms; ++i) {
    double v = c_[static_cast<std::size_t>(i)];
    if (v == 0.0) continue;
    if (shown++) os << " + ";
    os << v << "*t^" << dom_->at(i).to_string();
  }
  if (shown == 0) os << "0";
  return os.str();
}

static void check_same_domain(const NormElement& x, const NormElement& y, const char* op) {
  if (!x.valid() || !y.valid() || !(*x.domain() == *y.domain()))
    throw std::invalid_argument(std::string(op) + ": domain mismatch");
}

NormElement add(const NormElement& x, const NormElement& y) {
  check_same_domain(x, y, "add");
  NormElement r(x.domain());
  for (int i = 0; i < x.domain()->size(); ++i)
    r.set_index(i, nc_add(x.at_index(i), y.at_index(i)));
  return r;
}

NormElement smul(double s, const NormElement& x) {
  if (s < 0.0 || std::isnan(s)) throw std::invalid_argument("smul: scalar must be in [0, inf]");
  NormElement r(x.domain());
  for (int i = 0; i < x.domain()->size(); ++i) r.set_index(i, nc_mul(s, x.at_index(i)));
  return r;
}

NormElement elem_max(const NormElement& x, const NormElement& y) {
  check_same_domain(x, y, "elem_max");
  NormElement r(x.domain());
  for (int i = 0; i < x.domain()->size(); ++i)
    r.set_index(i, std::max(x.at_index(i), y.at_index(i)));
  return r;
}

NormElement elem_min(const NormElement& x, const NormElement& y) {
  check_same_domain(x, y, "elem_min");
  NormElement r(x.domain());
  for (int i = 0; i < x.domain()->size(); ++i)
    r.set_index(i, std::min(x.at_index(i), y.at_index(i)));
  return r;
}

NormElement mul(const NormElement& x, const NormElement& y) {
  check_same_domain(x, y, "mul");
  const SaturatedSet& dom = *x.domain();
  NormElement r(x.domain());
  // For each result index delta, sum over beta <= delta with beta drawn in the
  // set's lexicographic enumeration order (fixed summation order).
  for (int i = 0; i < dom.size(); ++i) {
    const MultiIndex& delta = dom.at(i);
    double acc = 0.0;
    for (int j = 0; j < dom.size(); ++j) {
      const MultiIndex& beta = dom.at(j);
      if (!beta.leq(delta)) continue;
      int k = dom.index_of(delta.minus(beta));
      // k >= 0 is guaranteed: saturated sets are downward closed.
      acc = nc_add(acc, nc_mul(x.at_index(j), y.at_index(k)));
    }
    r.set_index(i, acc);
  }
  return r;
}

std::string LeqResult::to_string() const {
  if (ok) return "ok";
  std::ostringstream os;
  os << "violated at " << where.to_string() << ": " << lhs << " > " << rhs;
  return os.str();
}

LeqResult leq(const NormElement& x, const NormElement& y) {
  check_same_domain(x, y, "leq");
  LeqResult res;
  for (int i = 0; i < x.domain()->size(); ++i) {
    double a = x.at_index(i), b = y.at_index(i);
    if (std::isinf(b)) continue;  // anything <= inf
    if (std::isinf(a) || a > b) {
      res.ok = false;
      res.where = x.domain()->at(i);
      res.lhs = a;
      res.rhs = b;
      return res;
    }
  }
  return res;
}

NormElement geom_inverse(double a, const NormElement& x) {
  if (!(a > 0.0) || std::isinf(a)) throw std::domain_error("geom_inverse: need finite a > 0");
  double x0 = x.constant_term();
  if (std::isinf(x0)) throw std::domain_error("geom_inverse: constant term is inf");
  if (!(a - x0 > 0.0)) throw std::domain_error("geom_inverse: need a - X_0 > 0");
  const double g = 1.0 / (a - x0);

  // Y = (X - X_0) / (a - X_0): zero constant term, so Y^n has no coefficient
  // in the domain once n exceeds the max total degree; the truncation below is
  // exact, not an approximation.
  NormElement y = smul(g, x);
  y.set(MultiIndex(x.domain()->axes()), 0.0);

  NormElement sum = NormElement::constant(x.domain(), 1.0);
  NormElement term = NormElement::constant(x.domain(), 1.0);
  const int nmax = x.domain()->max_total_degree();
  for (int n = 1; n <= nmax; ++n) {
    term = mul(term, y);
    sum = add(sum, term);
  }
  return smul(g, sum);
}

NormElement derive(const NormElement& x, int axis) {
  if (axis < 0 || axis >= x.domain()->axes()) throw std::invalid_argument("derive: bad axis");
  NormElement r(x.domain());
  for (int i = 0; i < x.domain()->size(); ++i) {
    const MultiIndex& delta = x.domain()->at(i);
    double up = x.at(delta.plus_unit(axis));  // +inf when outside the domain
    r.set_index(i, nc_mul(static_cast<double>(delta[axis] + 1), up));
  }
  return r;
}

NormElement t_mu_transform(const NormElement& x, double mu) {
  if (!(mu > 0.0) || std::isinf(mu)) throw std::domain_error("t_mu_transform: need finite mu > 0");
  const int axes = x.domain()->axes();
  NormElement r = smul(std::pow(mu, -axes), x);
  for (int j = 0; j < axes; ++j) {
    NormElement y = derive(x, j);
    for (int a = 0; a < axes; ++a) y = derive(y, a);
    r = add(r, smul(mu / static_cast<double>(axes), y));
  }
  return r;
}

NormElement majorant_geom_pow(SaturatedSetPtr dom, double a, int p) {
  if (a < 0.0 || p < 1) throw std::invalid_argument("majorant_geom_pow: need a >= 0, p >= 1");
  NormElement r = NormElement::constant(dom, 1.0);
  for (int axis = 0; axis < dom->axes(); ++axis) {
    // (1 - a t_axis)^{-1} has coefficient a^n at n*e_axis.
    NormElement g(dom);
    for (int i = 0; i < dom->size(); ++i) {
      const MultiIndex& m = dom->at(i);
      bool pure = true;
      for (int k = 0; k < dom->axes(); ++k)
        if (k != axis && m[k] != 0) pure = false;
      if (pure) g.set_index(i, std::pow(a, m[axis]));
    }
    for (int q = 0; q < p; ++q) r = mul(r, g);
  }
  return r;
}

NormElement majorant_lambda_geom(SaturatedSetPtr dom, double lam, double a) {
  if (lam < 0.0) throw std::invalid_argument("majorant_lambda_geom: need lam >= 0");
  return smul(lam, majorant_geom_pow(std::move(dom), a, 1));
}

NormElement majorant_quotient(const NormElement& f, const NormElement& g) {
  return mul(f, geom_inverse(1.0, g));
}

NormElement weight_element(SaturatedSetPtr dom, double lam, double Lam) {
  if (lam < 0.0 || Lam < 0.0)
    throw std::invalid_argument("weight_element: need nonnegative weights");
  NormElement e(dom);
  for (int i = 0; i < dom->size(); ++i) {
    const MultiIndex& m = dom->at(i);
    // pow with integer exponents; 0^0 = 1 as needed at delta = 0.
    e.set_index(i, std::pow(lam, m[0]) * std::pow(Lam, m.spatial_order()));
  }
  return e;
}

NormElement frak_c(int d, int r0, int r, double lam, double Lam) {
  return weight_element(make_box_set(d, r0, r), lam, Lam);
}

NormElement frak_e(const NormElement& c, const NormElement& x, double Lam) {
  check_same_domain(c, x, "frak_e");
  return mul(c, geom_inverse(1.0, smul(Lam, x)));
}

// Shared worker: series sum_{n < N(Delta)} coeff(n) * (X - X_0)^n plus the
// rational majorant C * (1 - beta X)^{-1}.
static AnalyticMajorant analytic_majorant_impl(const NormElement& x, double beta,
                                               const std::function<double(int)>& deriv_over_fact) {
  double x0 = x.constant_term();
  if (std::isinf(x0)) throw std::domain_error("analytic_majorant: constant term is inf");
  if (!(beta > 0.0)) throw std::domain_error("analytic_majorant: need beta > 0");
  if (x0 > 0.0 && !(beta < 1.0 / x0))
    throw std::domain_error("analytic_majorant: need beta < 1/X_0");

  const int n_cap = x.domain()->nilpotency_order();
  NormElement xhat = x;
  xhat.set(MultiIndex(x.domain()->axes()), 0.0);

  NormElement series = NormElement::constant(x.domain(), deriv_over_fact(0));
  NormElement power = NormElement::constant(x.domain(), 1.0);
  double big_c = deriv_over_fact(0);
  for (int n = 1; n < n_cap; ++n) {
    power = mul(power, xhat);
    series = add(series, smul(deriv_over_fact(n), power));
    big_c = std::max(big_c, deriv_over_fact(n) / std::pow(beta, n));
  }
  AnalyticMajorant out{series, smul(big_c, geom_inverse(1.0, smul(beta, x))), big_c};
  return out;
}

AnalyticMajorant analytic_majorant_exp(const NormElement& x, double beta) {
  double x0 = x.constant_term();
  return analytic_majorant_impl(x, beta, [x0](int n) {
    // exp^{(n)}(x0)/n! = e^{x0}/n!
    double f = std::exp(x0);
    for (int k = 2; k <= n; ++k) f /= k;
    return f;
  });
}

AnalyticMajorant analytic_majorant_geom(const NormElement& x, double beta) {
  double x0 = x.constant_term();
  if (!(x0 < 1.0)) throw std::domain_error("analytic_majorant_geom: need X_0 < 1");
  return analytic_majorant_impl(x, beta, [x0](int n) {
    // (1/(1-u))^{(n)}/n! = (1-u)^{-(n+1)}
    return std::pow(1.0 - x0, -(n + 1));
  });
}

}  // namespace ssrg
