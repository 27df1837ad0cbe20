#include "ssrg/grassmann.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ssrg {

// ---------------------------------------------------------------------------
// Coupling polynomials.

LambdaPoly lp_const(Complex v) {
  LambdaPoly p{v};
  lp_trim(p);
  return p;
}

void lp_trim(LambdaPoly& a) {
  while (!a.empty() && a.back() == Complex(0.0)) a.pop_back();
}

bool lp_is_zero(const LambdaPoly& a) {
  for (const Complex& v : a)
    if (v != Complex(0.0)) return false;
  return true;
}

LambdaPoly lp_add(const LambdaPoly& a, const LambdaPoly& b, Complex s) {
  LambdaPoly r(std::max(a.size(), b.size()), Complex(0.0));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += s * b[i];
  lp_trim(r);
  return r;
}

LambdaPoly lp_scale(const LambdaPoly& a, Complex s) {
  LambdaPoly r = a;
  for (Complex& v : r) v *= s;
  lp_trim(r);
  return r;
}

LambdaPoly lp_mul(const LambdaPoly& a, const LambdaPoly& b, int cap) {
  if (a.empty() || b.empty()) return {};
  std::size_t limit = std::min(a.size() + b.size() - 1, static_cast<std::size_t>(cap) + 1);
  LambdaPoly r(limit, Complex(0.0));
  for (std::size_t i = 0; i < a.size() && i < limit; ++i) {
    if (a[i] == Complex(0.0)) continue;
    for (std::size_t j = 0; j < b.size() && i + j < limit; ++j) r[i + j] += a[i] * b[j];
  }
  lp_trim(r);
  return r;
}

LambdaPoly lp_inverse(const LambdaPoly& a, int cap) {
  if (a.empty() || a[0] == Complex(0.0))
    throw std::invalid_argument("lp_inverse: constant term must be nonzero");
  LambdaPoly r(static_cast<std::size_t>(cap) + 1, Complex(0.0));
  r[0] = Complex(1.0) / a[0];
  for (int k = 1; k <= cap; ++k) {
    Complex acc(0.0);
    for (int j = 1; j <= k && j < static_cast<int>(a.size()); ++j)
      acc += a[static_cast<std::size_t>(j)] * r[static_cast<std::size_t>(k - j)];
    r[static_cast<std::size_t>(k)] = -acc / a[0];
  }
  lp_trim(r);
  return r;
}

LambdaPoly lp_log(const LambdaPoly& a, int cap) {
  if (a.empty() || a[0] == Complex(0.0))
    throw std::invalid_argument("lp_log: constant term must be nonzero");
  LambdaPoly u = lp_scale(a, Complex(1.0) / a[0]);
  if (!u.empty()) u[0] = Complex(0.0);  // u = a/a0 - 1
  lp_trim(u);
  LambdaPoly r = lp_const(std::log(a[0]));
  LambdaPoly power = lp_const(Complex(1.0));
  for (int k = 1; k <= cap && !power.empty(); ++k) {
    power = lp_mul(power, u, cap);
    double sign = (k % 2 == 0) ? -1.0 : 1.0;
    r = lp_add(r, power, sign / k);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Skew matrices and Pfaffians.

void SkewMatrix::set(int i, int j, Complex v) {
  if (i == j) {
    if (v != Complex(0.0)) throw std::invalid_argument("SkewMatrix: diagonal must be zero");
    return;
  }
  a_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)] = v;
  a_[static_cast<std::size_t>(j) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i)] = -v;
}

SkewMatrix sm_add(const SkewMatrix& a, const SkewMatrix& b, Complex s) {
  if (a.size() != b.size()) throw std::invalid_argument("sm_add: size mismatch");
  SkewMatrix r(a.size());
  for (int i = 0; i < a.size(); ++i)
    for (int j = i + 1; j < a.size(); ++j) r.set(i, j, a.at(i, j) + s * b.at(i, j));
  return r;
}

SkewMatrix sm_scale(const SkewMatrix& a, Complex s) {
  SkewMatrix r(a.size());
  for (int i = 0; i < a.size(); ++i)
    for (int j = i + 1; j < a.size(); ++j) r.set(i, j, s * a.at(i, j));
  return r;
}

Complex pfaffian_recursive(const SkewMatrix& c, std::uint64_t mask) {
  int k = std::popcount(mask);
  if (k % 2 != 0) return Complex(0.0);
  if (k == 0) return Complex(1.0);
  int i = std::countr_zero(mask);
  std::uint64_t rest = mask & (mask - 1);
  Complex sum(0.0);
  double sign = 1.0;
  for (std::uint64_t r = rest; r != 0; r &= r - 1) {
    int j = std::countr_zero(r);
    Complex cij = c.at(i, j);
    if (cij != Complex(0.0)) sum += sign * cij * pfaffian_recursive(c, rest ^ (1ull << j));
    sign = -sign;
  }
  return sum;
}

Complex pfaffian_elimination(SkewMatrix m) {
  const int n = m.size();
  if (n % 2 != 0) return Complex(0.0);
  if (n == 0) return Complex(1.0);
  std::vector<Complex> a(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(i * n + j)] = m.at(i, j);
  auto A = [&](int i, int j) -> Complex& { return a[static_cast<std::size_t>(i * n + j)]; };
  Complex pf(1.0);
  for (int k = 0; k + 1 < n; k += 2) {
    int p = k + 1;
    double best = std::abs(A(k, k + 1));
    for (int q = k + 2; q < n; ++q)
      if (std::abs(A(k, q)) > best) {
        best = std::abs(A(k, q));
        p = q;
      }
    if (best == 0.0) return Complex(0.0);
    if (p != k + 1) {
      for (int j = 0; j < n; ++j) std::swap(A(k + 1, j), A(p, j));
      for (int i = 0; i < n; ++i) std::swap(A(i, k + 1), A(i, p));
      pf = -pf;
    }
    Complex piv = A(k, k + 1);
    pf *= piv;
    for (int i = k + 2; i < n; ++i)
      for (int j = k + 2; j < n; ++j)
        A(i, j) -= (A(k, i) * A(k + 1, j) - A(k, j) * A(k + 1, i)) / piv;
  }
  return pf;
}

Complex pfaffian_mask(const SkewMatrix& c, std::uint64_t mask) {
  int k = std::popcount(mask);
  if (k <= 8) return pfaffian_recursive(c, mask);
  std::vector<int> idx;
  for (std::uint64_t r = mask; r != 0; r &= r - 1) idx.push_back(std::countr_zero(r));
  SkewMatrix sub(k);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      sub.set(i, j, c.at(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]));
  return pfaffian_elimination(sub);
}

Complex gaussian_moment(const SkewMatrix& c, const std::vector<int>& idx) {
  const int k = static_cast<int>(idx.size());
  if (k % 2 != 0) return Complex(0.0);
  std::vector<int> sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return Complex(0.0);
  SkewMatrix sub(k);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      sub.set(i, j, c.at(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]));
  if (k <= 10) return pfaffian_recursive(sub, (k == 64 ? ~0ull : (1ull << k) - 1));
  return pfaffian_elimination(sub);
}

double s_value(const SkewMatrix& c) {
  const int n = c.size();
  if (n > 16) throw std::invalid_argument("s_value: exhaustive scan limited to 16 generators");
  double best = 0.0;
  for (std::uint64_t mask = 3; mask < (1ull << n); ++mask) {
    int k = std::popcount(mask);
    if (k % 2 != 0 || k == 0) continue;
    double v = std::abs(pfaffian_mask(c, mask));
    if (v > 0.0) best = std::max(best, std::pow(v, 1.0 / k));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Elements.

namespace {

constexpr std::uint64_t low_bits(int k) { return k >= 64 ? ~0ull : (1ull << k) - 1; }

// parity of #{(x, y) : x in a, y in b, x > y}
int interleave_parity(std::uint64_t a, std::uint64_t b) {
  int swaps = 0;
  for (std::uint64_t r = b; r != 0; r &= r - 1) {
    int pos = std::countr_zero(r);
    swaps += std::popcount(a & ~low_bits(pos + 1));
  }
  return swaps & 1;
}

int list_sort_parity(std::vector<int>& v) {  // sorts v, returns parity of the permutation
  int swaps = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (v[i] > v[j]) {
        std::swap(v[i], v[j]);
        ++swaps;
      }
  return swaps & 1;
}

}  // namespace

GrElement::GrElement(GrContext ctx) : ctx_(ctx) {
  if (ctx_.gens < 0 || ctx_.gens > 64) throw std::invalid_argument("GrElement: gens must be 0..64");
  if (ctx_.integrated_first < 0 || ctx_.integrated_first > ctx_.gens)
    throw std::invalid_argument("GrElement: bad family split");
  if (ctx_.lambda_cap < 0) throw std::invalid_argument("GrElement: bad coupling cap");
}

LambdaPoly GrElement::at(std::uint64_t mask) const {
  auto it = terms_.find(mask);
  return it == terms_.end() ? LambdaPoly{} : it->second;
}

void GrElement::add(std::uint64_t mask, const LambdaPoly& p, Complex s) {
  if ((mask & ~low_bits(ctx_.gens)) != 0) throw std::invalid_argument("GrElement: mask out of range");
  if (ctx_.psi_cap >= 0 && std::popcount(mask) > ctx_.psi_cap) return;
  LambdaPoly q = p;
  if (static_cast<int>(q.size()) > ctx_.lambda_cap + 1) q.resize(static_cast<std::size_t>(ctx_.lambda_cap) + 1);
  if (s != Complex(1.0)) q = lp_scale(q, s);
  lp_trim(q);
  if (q.empty()) return;
  auto it = terms_.find(mask);
  if (it == terms_.end()) {
    terms_.emplace(mask, std::move(q));
    return;
  }
  it->second = lp_add(it->second, q);
  if (it->second.empty()) terms_.erase(it);
}

void GrElement::add(std::uint64_t mask, Complex v, int lambda_power) {
  if (lambda_power < 0) throw std::invalid_argument("GrElement: negative coupling power");
  if (lambda_power > ctx_.lambda_cap) return;
  LambdaPoly p(static_cast<std::size_t>(lambda_power) + 1, Complex(0.0));
  p[static_cast<std::size_t>(lambda_power)] = v;
  add(mask, p);
}

void GrElement::scale(Complex s) {
  if (s == Complex(0.0)) {
    terms_.clear();
    return;
  }
  for (auto& kv : terms_) kv.second = lp_scale(kv.second, s);
}

void GrElement::scale_poly(const LambdaPoly& p) {
  Terms out;
  for (const auto& kv : terms_) {
    LambdaPoly q = lp_mul(kv.second, p, ctx_.lambda_cap);
    if (!q.empty()) out.emplace(kv.first, std::move(q));
  }
  terms_ = std::move(out);
}

bool GrElement::is_even() const {
  for (const auto& kv : terms_)
    if (std::popcount(kv.first) % 2 != 0) return false;
  return true;
}

int GrElement::max_degree() const {
  int d = 0;
  for (const auto& kv : terms_) d = std::max(d, std::popcount(kv.first));
  return d;
}

GrElement gr_add(const GrElement& a, const GrElement& b, Complex s) {
  if (!(a.ctx() == b.ctx())) throw std::invalid_argument("gr_add: context mismatch");
  GrElement r = a;
  for (const auto& kv : b.terms()) r.add(kv.first, kv.second, s);
  return r;
}

GrElement gr_mul(const GrElement& a, const GrElement& b) {
  if (!(a.ctx() == b.ctx())) throw std::invalid_argument("gr_mul: context mismatch");
  GrElement r(a.ctx());
  for (const auto& ka : a.terms()) {
    for (const auto& kb : b.terms()) {
      if ((ka.first & kb.first) != 0) continue;  // repeated generator
      std::uint64_t mask = ka.first | kb.first;
      if (a.ctx().psi_cap >= 0 && std::popcount(mask) > a.ctx().psi_cap) continue;
      LambdaPoly p = lp_mul(ka.second, kb.second, a.ctx().lambda_cap);
      if (p.empty()) continue;
      double sign = interleave_parity(ka.first, kb.first) ? -1.0 : 1.0;
      r.add(mask, p, sign);
    }
  }
  return r;
}

double gr_max_abs_diff(const GrElement& a, const GrElement& b) {
  if (!(a.ctx() == b.ctx())) throw std::invalid_argument("gr_max_abs_diff: context mismatch");
  double m = 0.0;
  auto scan = [&m](const LambdaPoly& x, const LambdaPoly& y) {
    for (std::size_t i = 0; i < std::max(x.size(), y.size()); ++i) {
      Complex xv = i < x.size() ? x[i] : Complex(0.0);
      Complex yv = i < y.size() ? y[i] : Complex(0.0);
      m = std::max(m, std::abs(xv - yv));
    }
  };
  for (const auto& kv : a.terms()) scan(kv.second, b.at(kv.first));
  for (const auto& kv : b.terms()) scan(a.at(kv.first), kv.second);
  return m;
}

GrElement grexp(const GrElement& w) {
  if (!lp_is_zero(w.at(0))) throw std::invalid_argument("grexp: body must vanish");
  GrElement e(w.ctx());
  e.add(0, Complex(1.0), 0);
  GrElement term = e;
  for (int k = 1; k <= 2 * (w.ctx().gens + w.ctx().lambda_cap) + 2; ++k) {
    term = gr_mul(term, w);
    term.scale(Complex(1.0 / k));
    if (term.is_zero()) return e;
    e = gr_add(e, term);
  }
  throw std::runtime_error("grexp: series failed to terminate");
}

GrElement grlog(const GrElement& f) {
  LambdaPoly body = f.at(0);
  if (body.empty() || body[0] == Complex(0.0))
    throw std::invalid_argument("grlog: body must have nonzero constant term");
  GrElement a = f;  // a = f / body - 1, with the body dropped exactly:
  a.scale_poly(lp_inverse(body, f.ctx().lambda_cap));
  a.erase(0);  // mathematically 1; erasing avoids one-ulp residue from b * (1/b)
  GrElement r(f.ctx());
  r.add(0, lp_log(body, f.ctx().lambda_cap));
  GrElement power = a;
  for (int k = 1; k <= 2 * (f.ctx().gens + f.ctx().lambda_cap) + 2; ++k) {
    double sign = (k % 2 == 0) ? -1.0 : 1.0;
    r = gr_add(r, power, Complex(sign / k));
    power = gr_mul(power, a);
    if (power.is_zero()) return r;
  }
  throw std::runtime_error("grlog: series failed to terminate");
}

namespace {

// Shared body of the plain integral (every family generator integrated) and
// the shift convolution (even subsets of family generators integrated).
GrElement integrate_impl(const GrElement& f, const SkewMatrix& c, bool shift) {
  const GrContext& ctx = f.ctx();
  const int e = ctx.integrated_first;
  if (c.size() != ctx.gens - e)
    throw std::invalid_argument("integrate: covariance size must match the integrated family");
  const std::uint64_t family = low_bits(ctx.gens) & ~low_bits(e);
  GrElement r(ctx);
  std::unordered_map<std::uint64_t, Complex> pf_cache;
  auto pf = [&](std::uint64_t t_local) {
    auto it = pf_cache.find(t_local);
    if (it != pf_cache.end()) return it->second;
    Complex v = pfaffian_mask(c, t_local);
    pf_cache.emplace(t_local, v);
    return v;
  };
  for (const auto& kv : f.terms()) {
    const std::uint64_t s = kv.first & family;
    if (!shift) {
      std::uint64_t kept = kv.first ^ s;
      Complex w = pf(s >> e);
      if (w == Complex(0.0)) continue;
      double sign = interleave_parity(s, kept) ? -1.0 : 1.0;
      r.add(kept, kv.second, sign * w);
      continue;
    }
    std::uint64_t t = s;
    while (true) {  // all submasks of s, descending
      if (std::popcount(t) % 2 == 0) {
        Complex w = pf(t >> e);
        if (w != Complex(0.0)) {
          std::uint64_t kept = kv.first ^ t;
          double sign = interleave_parity(t, kept) ? -1.0 : 1.0;
          r.add(kept, kv.second, sign * w);
        }
      }
      if (t == 0) break;
      t = (t - 1) & s;
    }
  }
  return r;
}

}  // namespace

GrElement gr_integrate(const GrElement& f, const SkewMatrix& c) { return integrate_impl(f, c, false); }

GrElement gr_conv(const GrElement& f, const SkewMatrix& c) { return integrate_impl(f, c, true); }

GrElement wick_order(const GrElement& f, const SkewMatrix& c) {
  return gr_conv(f, sm_scale(c, Complex(-1.0)));
}

GrElement omega(const GrElement& w, const SkewMatrix& c, LambdaPoly* log_z) {
  // A constant part of w commutes with everything and passes through the
  // map additively, so split it off before exponentiating.
  GrElement body_free = w;
  body_free.erase(0);
  GrElement full = grlog(gr_conv(grexp(body_free), c));
  if (log_z) *log_z = lp_add(w.at(0), full.at(0));
  full.erase(0);
  return full;
}

GrElement omega_graded(const GrElement& w, const SkewMatrix& c, LambdaPoly* log_z) {
  const GrContext& ctx = w.ctx();
  GrElement body_free = w;
  body_free.erase(0);
  for (const auto& kv : body_free.terms())
    if (!kv.second.empty() && kv.second[0] != Complex(0.0))
      throw std::invalid_argument("omega_graded: monomials must carry coupling order >= 1");

  GrElement f = gr_conv(grexp(body_free), c);
  const LambdaPoly z = f.at(0);
  if (log_z) *log_z = lp_add(w.at(0), lp_log(z, ctx.lambda_cap));
  f.scale_poly(lp_inverse(z, ctx.lambda_cap));
  f.erase(0);

  // x[k] = the pure coupling-order-k slice of f/Z - 1; every slice has
  // order >= 1, so the log series terminates at power lambda_cap.
  const int cap = ctx.lambda_cap;
  std::vector<GrElement> x(static_cast<std::size_t>(cap) + 1, GrElement(ctx));
  for (const auto& kv : f.terms())
    for (int k = 1; k < static_cast<int>(kv.second.size()) && k <= cap; ++k)
      if (kv.second[static_cast<std::size_t>(k)] != Complex(0.0))
        x[static_cast<std::size_t>(k)].add(kv.first, kv.second[static_cast<std::size_t>(k)], k);

  GrElement r(ctx);
  std::vector<GrElement> pow = x;  // graded slices of x^j
  for (int k = 1; k <= cap; ++k) r = gr_add(r, pow[static_cast<std::size_t>(k)]);
  for (int j = 2; j <= cap; ++j) {
    std::vector<GrElement> next(static_cast<std::size_t>(cap) + 1, GrElement(ctx));
    bool any = false;
    for (int o = j; o <= cap; ++o)
      for (int k = 1; k <= o - (j - 1); ++k) {
        const GrElement& p = pow[static_cast<std::size_t>(o - k)];
        const GrElement& q = x[static_cast<std::size_t>(k)];
        if (p.is_zero() || q.is_zero()) continue;
        next[static_cast<std::size_t>(o)] =
            gr_add(next[static_cast<std::size_t>(o)], gr_mul(p, q));
        any = true;
      }
    if (!any) break;
    pow = std::move(next);
    const double sign = (j % 2 == 0) ? -1.0 : 1.0;
    for (int o = j; o <= cap; ++o)
      r = gr_add(r, pow[static_cast<std::size_t>(o)], Complex(sign / j));
  }
  return r;
}

GrElement substitute_sum(const GrElement& v, int family_size) {
  if (v.ctx().gens != family_size)
    throw std::invalid_argument("substitute_sum: element must live on the single family");
  if (2 * family_size > 64) throw std::invalid_argument("substitute_sum: too many generators");
  GrContext ctx;
  ctx.gens = 2 * family_size;
  ctx.integrated_first = family_size;
  ctx.lambda_cap = v.ctx().lambda_cap;
  ctx.psi_cap = v.ctx().psi_cap;
  GrElement r(ctx);
  for (const auto& kv : v.terms()) {
    const std::uint64_t s = kv.first;
    std::uint64_t u = s;
    while (true) {  // u = generators replaced by the integrated copy
      std::uint64_t mask = (s ^ u) | (u << family_size);
      double sign = interleave_parity(s ^ u, u) ? -1.0 : 1.0;
      r.add(mask, kv.second, sign);
      if (u == 0) break;
      u = (u - 1) & s;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Kernels <-> elements.

GrElement gr_from_kernel(const Kernel& f, const GrContext& ctx, int lambda_power) {
  const int m = f.ext_count(), n = f.int_count();
  const int e = ctx.integrated_first;
  const double cv = f.space()->cell_volume();
  double w = 1.0;
  for (int i = 0; i < m + n; ++i) w *= cv;
  if (m > 0 && f.space()->size() > e)
    throw std::invalid_argument("gr_from_kernel: space larger than the exterior family");
  if (n > 0 && e + f.space()->size() > ctx.gens)
    throw std::invalid_argument("gr_from_kernel: space larger than the integrated family");
  GrElement r(ctx);
  std::vector<int> word;
  for (const auto& kv : f.entries()) {
    word.clear();
    bool dead = false;
    for (int s = 0; s < m; ++s) word.push_back(kv.first[static_cast<std::size_t>(s)]);
    for (int s = 0; s < n; ++s) {
      int g = e + kv.first[static_cast<std::size_t>(m + s)];
      if (g >= ctx.gens) throw std::invalid_argument("gr_from_kernel: generator out of range");
      word.push_back(g);
    }
    std::uint64_t mask = 0;
    for (int g : word) {
      if (mask & (1ull << g)) {
        dead = true;  // repeated generator
        break;
      }
      mask |= 1ull << g;
    }
    if (dead) continue;
    double sign = list_sort_parity(word) ? -1.0 : 1.0;
    r.add(mask, kv.second * (sign * w), lambda_power);
  }
  return r;
}

Kernel kernel_from_gr(const GrElement& el, const BaseSpacePtr& space, int m, int n,
                      int lambda_power) {
  const GrContext& ctx = el.ctx();
  const int e = ctx.integrated_first;
  const std::uint64_t ext_mask = low_bits(e);
  const double cv = space->cell_volume();
  double w = 1.0;
  for (int i = 0; i < m + n; ++i) w *= cv;
  double mfact = 1.0, nfact = 1.0;
  for (int i = 2; i <= m; ++i) mfact *= i;
  for (int i = 2; i <= n; ++i) nfact *= i;
  Kernel r(space, m, n);
  for (const auto& kv : el.terms()) {
    std::uint64_t kbits = kv.first & ext_mask;
    std::uint64_t sbits = kv.first & ~ext_mask;
    if (std::popcount(kbits) != m || std::popcount(sbits) != n) continue;
    if (lambda_power >= static_cast<int>(kv.second.size())) continue;
    Complex c = kv.second[static_cast<std::size_t>(lambda_power)];
    if (c == Complex(0.0)) continue;
    std::vector<int> ext, in;
    for (std::uint64_t t = kbits; t != 0; t &= t - 1) ext.push_back(std::countr_zero(t));
    for (std::uint64_t t = sbits; t != 0; t &= t - 1) in.push_back(std::countr_zero(t) - e);
    for (int p : ext)
      if (p >= space->size()) throw std::invalid_argument("kernel_from_gr: point out of range");
    for (int p : in)
      if (p >= space->size()) throw std::invalid_argument("kernel_from_gr: point out of range");
    const Complex base = c / (w * mfact * nfact);
    // fill every permutation of each block with its signature
    std::vector<int> pe(ext.size()), pi(in.size());
    std::iota(pe.begin(), pe.end(), 0);
    do {
      std::vector<int> check_e = pe;
      double se = list_sort_parity(check_e) ? -1.0 : 1.0;
      std::iota(pi.begin(), pi.end(), 0);
      do {
        std::vector<int> check_i = pi;
        double si = list_sort_parity(check_i) ? -1.0 : 1.0;
        Kernel::Key key{};
        for (std::size_t s = 0; s < pe.size(); ++s)
          key[s] = static_cast<std::uint16_t>(ext[static_cast<std::size_t>(pe[s])]);
        for (std::size_t s = 0; s < pi.size(); ++s)
          key[pe.size() + s] = static_cast<std::uint16_t>(in[static_cast<std::size_t>(pi[s])]);
        r.add(key, base * (se * si));
      } while (std::next_permutation(pi.begin(), pi.end()));
    } while (std::next_permutation(pe.begin(), pe.end()));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Norm machinery.

NormElement contraction_bound_element(const Kernel& c, SaturatedSetPtr dom, int delta_max) {
  NormElement nrm = seminorm_1inf(c, dom, delta_max);
  return elem_max(nrm, NormElement::constant(std::move(dom), sup_abs(c)));
}

Kernel moment_integrate(const Kernel& f, int nprime, const SkewMatrix& c) {
  if (nprime < 0 || nprime > f.int_count())
    throw std::invalid_argument("moment_integrate: bad moment count");
  if (c.size() != f.space()->size())
    throw std::invalid_argument("moment_integrate: covariance must be indexed by base points");
  const int m = f.ext_count();
  const double cv = f.space()->cell_volume();
  double w = 1.0;
  for (int i = 0; i < nprime; ++i) w *= cv;
  Kernel r(f.space(), m, f.int_count() - nprime);
  std::vector<int> idx(static_cast<std::size_t>(nprime));
  for (const auto& kv : f.entries()) {
    for (int s = 0; s < nprime; ++s) idx[static_cast<std::size_t>(s)] = kv.first[static_cast<std::size_t>(m + s)];
    Complex mom = gaussian_moment(c, idx);
    if (mom == Complex(0.0)) continue;
    Kernel::Key key{};
    int p = 0;
    for (int s = 0; s < m; ++s) key[static_cast<std::size_t>(p++)] = kv.first[static_cast<std::size_t>(s)];
    for (int s = nprime; s < f.int_count(); ++s)
      key[static_cast<std::size_t>(p++)] = kv.first[static_cast<std::size_t>(m + s)];
    r.add(key, w * mom * kv.second);
  }
  return r;
}

NormElement n_functional(const GrElement& w, const BaseSpacePtr& space, const NormElement& frak_c,
                         double b, double alpha, int delta_max, int lambda_power) {
  if (!(b > 0.0)) throw std::invalid_argument("n_functional: b must be positive");
  const std::uint64_t ext_mask = low_bits(w.ctx().integrated_first);
  std::vector<std::pair<int, int>> classes;
  for (const auto& kv : w.terms()) {
    int m = std::popcount(kv.first & ext_mask);
    int n = std::popcount(kv.first & ~ext_mask);
    if (std::find(classes.begin(), classes.end(), std::make_pair(m, n)) == classes.end())
      classes.emplace_back(m, n);
  }
  std::sort(classes.begin(), classes.end());
  NormElement acc = NormElement::zeros(frak_c.domain());
  for (const auto& mn : classes) {
    Kernel k = kernel_from_gr(w, space, mn.first, mn.second, lambda_power);
    if (k.empty()) continue;
    double weight = 1.0;
    for (int i = 0; i < mn.second; ++i) weight *= alpha * b;
    acc = add(acc, smul(weight, seminorm_1inf(k, frak_c.domain(), delta_max)));
  }
  return smul(1.0 / (b * b), mul(frak_c, acc));
}

}  // namespace ssrg
