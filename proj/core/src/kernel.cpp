#include "ssrg/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "ssrg/rng.hpp"  // splitmix64 for key hashing

namespace ssrg {

std::size_t Kernel::KeyHash::operator()(const Key& k) const {
  std::uint64_t a, b;
  static_assert(sizeof(Key) == 16, "key packs into two words");
  std::memcpy(&a, k.data(), 8);
  std::memcpy(&b, k.data() + 4, 8);
  return static_cast<std::size_t>(splitmix64(a ^ splitmix64(b)));
}

Kernel::Kernel(BaseSpacePtr space, int m, int n) : space_(std::move(space)), m_(m), n_(n) {
  if (!space_) throw std::invalid_argument("Kernel: null space");
  if (m < 0 || n < 0 || m + n > kMaxSlots)
    throw std::invalid_argument("Kernel: slot signature out of range");
}

Complex Kernel::at(const Key& k) const {
  auto it = data_.find(k);
  return it == data_.end() ? Complex(0.0) : it->second;
}

Kernel::Key Kernel::make_key(std::initializer_list<int> slots) const {
  if (static_cast<int>(slots.size()) != slot_count())
    throw std::invalid_argument("Kernel: wrong number of slots");
  Key k{};
  int i = 0;
  for (int s : slots) {
    if (s < 0 || s >= space_->size()) throw std::invalid_argument("Kernel: slot index out of range");
    k[static_cast<std::size_t>(i++)] = static_cast<std::uint16_t>(s);
  }
  return k;
}

Complex Kernel::at(std::initializer_list<int> slots) const { return at(make_key(slots)); }

void Kernel::add(const Key& k, Complex v) {
  Complex& slot = data_[k];
  slot += v;
  if (slot == Complex(0.0)) data_.erase(k);
}

void Kernel::add(std::initializer_list<int> slots, Complex v) { add(make_key(slots), v); }

void Kernel::scale(Complex s) {
  for (auto& kv : data_) kv.second *= s;
}

void Kernel::prune(double abs_eps) {
  for (auto it = data_.begin(); it != data_.end();) {
    if (std::abs(it->second) <= abs_eps)
      it = data_.erase(it);
    else
      ++it;
  }
}

Complex Kernel::scalar_value() const {
  if (slot_count() != 0) throw std::invalid_argument("scalar_value: kernel has slots");
  return at(Key{});
}

static void check_same_signature(const Kernel& f, const Kernel& g, const char* op) {
  if (f.ext_count() != g.ext_count() || f.int_count() != g.int_count() ||
      f.space()->size() != g.space()->size())
    throw std::invalid_argument(std::string(op) + ": signature mismatch");
}

Kernel kadd(const Kernel& f, const Kernel& g, Complex s) {
  check_same_signature(f, g, "kadd");
  Kernel r = f;
  for (const auto& kv : g.entries()) r.add(kv.first, s * kv.second);
  return r;
}

double max_abs_diff(const Kernel& f, const Kernel& g) {
  check_same_signature(f, g, "max_abs_diff");
  double m = 0.0;
  for (const auto& kv : f.entries()) m = std::max(m, std::abs(kv.second - g.at(kv.first)));
  for (const auto& kv : g.entries()) m = std::max(m, std::abs(f.at(kv.first) - kv.second));
  return m;
}

double sup_abs(const Kernel& f) {
  double m = 0.0;
  for (const auto& kv : f.entries()) m = std::max(m, std::abs(kv.second));
  return m;
}

MultiIndex decay_order(const DecayOp& op, int axes) {
  MultiIndex total(axes);
  for (const auto& fac : op) total = total.plus(fac.delta);
  return total;
}

namespace {

int permutation_sign(const std::vector<int>& pi) {
  int sign = 1;
  for (std::size_t i = 0; i < pi.size(); ++i)
    for (std::size_t j = i + 1; j < pi.size(); ++j)
      if (pi[i] > pi[j]) sign = -sign;
  return sign;
}

}  // namespace

Kernel permute_internal(const Kernel& f, const std::vector<int>& pi) {
  if (static_cast<int>(pi.size()) != f.int_count())
    throw std::invalid_argument("permute_internal: permutation size mismatch");
  const int m = f.ext_count();
  Kernel r(f.space(), m, f.int_count());
  for (const auto& kv : f.entries()) {
    Kernel::Key k{};
    for (int e = 0; e < m; ++e) k[static_cast<std::size_t>(e)] = kv.first[static_cast<std::size_t>(e)];
    // f^pi(xi) = f(xi_pi(0), ..., xi_pi(n-1)): an entry of f at argument i
    // appears in f^pi at argument position pi(i).
    for (int i = 0; i < f.int_count(); ++i)
      k[static_cast<std::size_t>(m + pi[static_cast<std::size_t>(i)])] =
          kv.first[static_cast<std::size_t>(m + i)];
    r.add(k, kv.second);
  }
  return r;
}

static Kernel ant_block(const Kernel& f, int first, int count) {
  Kernel r(f.space(), f.ext_count(), f.int_count());
  if (count <= 1) return f;
  std::vector<int> pi(static_cast<std::size_t>(count));
  std::iota(pi.begin(), pi.end(), 0);
  double norm = 1.0;
  for (int i = 2; i <= count; ++i) norm *= i;
  do {
    const double s = permutation_sign(pi) / norm;
    for (const auto& kv : f.entries()) {
      Kernel::Key k = kv.first;
      for (int i = 0; i < count; ++i)
        k[static_cast<std::size_t>(first + pi[static_cast<std::size_t>(i)])] =
            kv.first[static_cast<std::size_t>(first + i)];
      r.add(k, s * kv.second);
    }
  } while (std::next_permutation(pi.begin(), pi.end()));
  r.prune(0.0);
  return r;
}

Kernel ant_ext(const Kernel& f) { return ant_block(f, 0, f.ext_count()); }
Kernel ant_int(const Kernel& f) { return ant_block(f, f.ext_count(), f.int_count()); }

Kernel tensor(const Kernel& f, const Kernel& g) {
  if (f.space()->size() != g.space()->size())
    throw std::invalid_argument("tensor: space mismatch");
  const int m = f.ext_count() + g.ext_count();
  const int n = f.int_count() + g.int_count();
  Kernel r(f.space(), m, n);
  for (const auto& fa : f.entries())
    for (const auto& ga : g.entries()) {
      Kernel::Key k{};
      int p = 0;
      for (int e = 0; e < f.ext_count(); ++e) k[static_cast<std::size_t>(p++)] = fa.first[static_cast<std::size_t>(e)];
      for (int e = 0; e < g.ext_count(); ++e) k[static_cast<std::size_t>(p++)] = ga.first[static_cast<std::size_t>(e)];
      for (int i = 0; i < f.int_count(); ++i)
        k[static_cast<std::size_t>(p++)] = fa.first[static_cast<std::size_t>(f.ext_count() + i)];
      for (int i = 0; i < g.int_count(); ++i)
        k[static_cast<std::size_t>(p++)] = ga.first[static_cast<std::size_t>(g.ext_count() + i)];
      r.add(k, fa.second * ga.second);
    }
  return r;
}

// Decay factor of one entry under a full decay operator.
static double entry_decay_factor(const Kernel& f, const Kernel::Key& key, const DecayOp& op) {
  const BaseSpace& sp = *f.space();
  const int m = f.ext_count();
  double factor = 1.0;
  for (const auto& fac : op) {
    BasePoint a = sp.point(key[static_cast<std::size_t>(m + fac.u)]);
    BasePoint b = sp.point(key[static_cast<std::size_t>(m + fac.v)]);
    factor *= sp.decay_factor(a, b, fac.delta);
  }
  return factor;
}

Kernel apply_decay(const Kernel& f, const DecayOp& op) {
  for (const auto& fac : op)
    if (fac.u < 0 || fac.v <= fac.u || fac.v >= f.int_count())
      throw std::invalid_argument("apply_decay: bad slot pair");
  Kernel r(f.space(), f.ext_count(), f.int_count());
  for (const auto& kv : f.entries()) {
    double factor = entry_decay_factor(f, kv.first, op);
    if (factor != 0.0) r.add(kv.first, factor * kv.second);
  }
  return r;
}

// Addends are sorted before summation so the result depends only on their
// multiset: permuting slots then reading off the norm reproduces the exact
// same floating-point value, and results never depend on hash-map order.
static double sorted_bucket_max(std::unordered_map<std::uint64_t, std::vector<double>>& buckets) {
  double best = 0.0;
  for (auto& kv : buckets) {
    std::sort(kv.second.begin(), kv.second.end());
    double sum = 0.0;
    for (double a : kv.second) sum += a;
    best = std::max(best, sum);
  }
  return best;
}

// Shared accumulation for ||| . |||: returns the norm of f with each entry
// additionally weighted by its decay factor under op.
static double norm_1inf_decayed(const Kernel& f, const DecayOp& op) {
  const int m = f.ext_count(), n = f.int_count();
  const double cv = f.space()->cell_volume();
  if (m == 0 && n == 0) return 0.0;

  std::unordered_map<std::uint64_t, std::vector<double>> buckets;
  if (m != 0) {
    // sup over externals of cellvol^n * sum over internals.
    double w = 1.0;
    for (int i = 0; i < n; ++i) w *= cv;
    for (const auto& kv : f.entries()) {
      std::uint64_t ext_key = 0;
      for (int e = 0; e < m; ++e) ext_key = (ext_key << 16) | kv.first[static_cast<std::size_t>(e)];
      buckets[ext_key].push_back(w * std::abs(kv.second) *
                                 std::abs(entry_decay_factor(f, kv.first, op)));
    }
    return sorted_bucket_max(buckets);
  }

  // m == 0: max over the pinned slot j0 of sup_{xi_j0} cellvol^{n-1} * sum.
  double w = 1.0;
  for (int i = 0; i + 1 < n; ++i) w *= cv;
  double best = 0.0;
  for (int j0 = 0; j0 < n; ++j0) {
    buckets.clear();
    for (const auto& kv : f.entries())
      buckets[kv.first[static_cast<std::size_t>(j0)]].push_back(
          w * std::abs(kv.second) * std::abs(entry_decay_factor(f, kv.first, op)));
    best = std::max(best, sorted_bucket_max(buckets));
  }
  return best;
}

double norm_1inf_scalar(const Kernel& f) { return norm_1inf_decayed(f, DecayOp{}); }

void for_each_decay_op(int n, const MultiIndex& delta,
                       const std::function<void(const DecayOp&)>& cb) {
  std::vector<std::pair<int, int>> pairs;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  const int P = static_cast<int>(pairs.size());
  if (P == 0) {
    if (delta.is_zero()) cb(DecayOp{});
    return;
  }
  std::vector<MultiIndex> assign(static_cast<std::size_t>(P), MultiIndex(delta.size()));

  std::function<void(int)> per_component = [&](int c) {
    if (c == delta.size()) {
      DecayOp op;
      for (int p = 0; p < P; ++p)
        if (!assign[static_cast<std::size_t>(p)].is_zero())
          op.push_back({pairs[static_cast<std::size_t>(p)].first,
                        pairs[static_cast<std::size_t>(p)].second,
                        assign[static_cast<std::size_t>(p)]});
      cb(op);
      return;
    }
    // distribute delta[c] over the P pair slots (stars and bars)
    std::function<void(int, int)> distribute = [&](int p, int remaining) {
      if (p == P - 1) {
        assign[static_cast<std::size_t>(p)].set(c, remaining);
        per_component(c + 1);
        assign[static_cast<std::size_t>(p)].set(c, 0);
        return;
      }
      for (int v = 0; v <= remaining; ++v) {
        assign[static_cast<std::size_t>(p)].set(c, v);
        distribute(p + 1, remaining - v);
      }
      assign[static_cast<std::size_t>(p)].set(c, 0);
    };
    distribute(0, delta[c]);
  };
  per_component(0);
}

NormElement seminorm_1inf(const Kernel& f, SaturatedSetPtr dom, int delta_max) {
  const int m = f.ext_count(), n = f.int_count();
  NormElement r(dom);
  if (m == 0 && n == 0) return r;
  if (m != 0) return NormElement::constant(dom, norm_1inf_scalar(f));

  for (int i = 0; i < dom->size(); ++i) {
    const MultiIndex& delta = dom->at(i);
    if (delta.is_zero()) {
      r.set_index(i, norm_1inf_scalar(f));
      continue;
    }
    if (n < 2) continue;  // no decay operators exist; max over empty set is 0
    if (delta.order() > delta_max) {
      r.set_index(i, kInf);
      continue;
    }
    double best = 0.0;
    for_each_decay_op(n, delta, [&](const DecayOp& op) {
      best = std::max(best, norm_1inf_decayed(f, op));
    });
    r.set_index(i, best / delta.factorial());
  }
  return r;
}

Kernel partial_convolution(const Kernel& f, int mu, const Kernel& g, int nu) {
  if (f.space()->size() != g.space()->size())
    throw std::invalid_argument("partial_convolution: space mismatch");
  if (mu < 0 || mu >= f.int_count() || nu < 0 || nu >= g.int_count())
    throw std::invalid_argument("partial_convolution: bad slots");
  const int m = f.ext_count() + g.ext_count();
  const int n = f.int_count() + g.int_count() - 2;
  Kernel r(f.space(), m, n);
  const double cv = f.space()->cell_volume();

  // Bucket g's entries by the value in the contracted slot.
  std::unordered_map<std::uint16_t, std::vector<const Kernel::Map::value_type*>> by_zeta;
  for (const auto& kv : g.entries())
    by_zeta[kv.first[static_cast<std::size_t>(g.ext_count() + nu)]].push_back(&kv);

  for (const auto& fa : f.entries()) {
    auto it = by_zeta.find(fa.first[static_cast<std::size_t>(f.ext_count() + mu)]);
    if (it == by_zeta.end()) continue;
    for (const auto* ga : it->second) {
      Kernel::Key k{};
      int p = 0;
      for (int e = 0; e < f.ext_count(); ++e) k[static_cast<std::size_t>(p++)] = fa.first[static_cast<std::size_t>(e)];
      for (int e = 0; e < g.ext_count(); ++e) k[static_cast<std::size_t>(p++)] = ga->first[static_cast<std::size_t>(e)];
      for (int i = 0; i < f.int_count(); ++i)
        if (i != mu) k[static_cast<std::size_t>(p++)] = fa.first[static_cast<std::size_t>(f.ext_count() + i)];
      for (int i = 0; i < g.int_count(); ++i)
        if (i != nu) k[static_cast<std::size_t>(p++)] = ga->first[static_cast<std::size_t>(g.ext_count() + i)];
      r.add(k, cv * fa.second * ga->second);
    }
  }
  return r;
}

Kernel pair_integrate(const Kernel& f, int i, int j, const Kernel& c) {
  if (i < 0 || j <= i || j >= f.int_count())
    throw std::invalid_argument("pair_integrate: need internal slots i < j");
  if (c.ext_count() != 0 || c.int_count() != 2)
    throw std::invalid_argument("pair_integrate: weight must be a two-slot kernel");
  const int m = f.ext_count();
  Kernel r(f.space(), m, f.int_count() - 2);
  const double cv = f.space()->cell_volume();
  for (const auto& kv : f.entries()) {
    Complex w = c.at(Kernel::Key{kv.first[static_cast<std::size_t>(m + i)],
                                 kv.first[static_cast<std::size_t>(m + j)]});
    if (w == Complex(0.0)) continue;
    Kernel::Key k{};
    int p = 0;
    for (int e = 0; e < m; ++e) k[static_cast<std::size_t>(p++)] = kv.first[static_cast<std::size_t>(e)];
    for (int s = 0; s < f.int_count(); ++s)
      if (s != i && s != j) k[static_cast<std::size_t>(p++)] = kv.first[static_cast<std::size_t>(m + s)];
    r.add(k, cv * cv * w * kv.second);
  }
  return r;
}

Kernel contract(const Kernel& f, int i, int j, const Kernel& c) {
  Kernel r = pair_integrate(f, i, j, c);
  if ((j - i + 1) % 2 != 0) r.scale(-1.0);
  return r;
}

Kernel bubble_compose(const Kernel& f, const Kernel& c2, const Kernel& c3, const Kernel& g) {
  if (f.ext_count() != 0 || g.ext_count() != 0)
    throw std::invalid_argument("bubble_compose: f and g must be purely internal");
  const int n = f.int_count(), np = g.int_count();
  if (n < 3 || np < 3) throw std::invalid_argument("bubble_compose: need >= 3 slots each");
  // q(x2,x3,rest_f, x2',x3',rest_g) = int dzeta f(zeta,...) g(zeta,...)
  Kernel q = partial_convolution(f, 0, g, 0);
  // integrate out (x2, x2') through c2: x2 is slot 0, x2' is slot n-1
  Kernel q2 = pair_integrate(q, 0, n - 1, c2);
  // now x3 is slot 0 and x3' is slot n-2
  return pair_integrate(q2, 0, n - 2, c3);
}

}  // namespace ssrg
