#pragma once

// Univariate truncated Taylor jets with complex coefficients.  Used to
// evaluate momentum-space derivatives D^delta C(k) of propagators, where the
// denominator (i k0 - e(k)) makes the coefficients genuinely complex.

#include <complex>
#include <stdexcept>
#include <vector>

namespace ssrg {

class Jet {
 public:
  using C = std::complex<double>;

  Jet() = default;
  Jet(int order, C v) : c_(static_cast<std::size_t>(order) + 1, C(0.0)) { c_[0] = v; }

  static Jet constant(int order, C v) { return Jet(order, v); }
  static Jet variable(int order, double x0) {
    Jet j(order, C(x0));
    if (order >= 1) j.c_[1] = C(1.0);
    return j;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  C coeff(int n) const { return c_[static_cast<std::size_t>(n)]; }
  C value() const { return c_[0]; }
  // n-th derivative of the represented function at the expansion point
  C derivative(int n) const {
    double fact = 1.0;
    for (int i = 2; i <= n; ++i) fact *= i;
    return c_[static_cast<std::size_t>(n)] * fact;
  }

  Jet& operator+=(const Jet& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b) {
    a.check(b);
    Jet r(a.order(), 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; i + j < a.c_.size(); ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
    return r;
  }
  friend Jet operator*(C s, Jet a) {
    for (auto& v : a.c_) v *= s;
    return a;
  }
  friend Jet operator-(Jet a) { return C(-1.0) * a; }

  // 1 / f, requires f(x0) != 0
  Jet reciprocal() const {
    if (c_[0] == C(0.0)) throw std::domain_error("Jet: reciprocal of zero value");
    Jet r(order(), 1.0 / c_[0]);
    for (int n = 1; n <= order(); ++n) {
      C acc(0.0);
      for (int k = 1; k <= n; ++k)
        acc += c_[static_cast<std::size_t>(k)] * r.c_[static_cast<std::size_t>(n - k)];
      r.c_[static_cast<std::size_t>(n)] = -acc / c_[0];
    }
    return r;
  }

  // f^p for positive integer p via repeated multiplication
  Jet ipow(int p) const {
    if (p < 1) throw std::invalid_argument("Jet: ipow needs p >= 1");
    Jet r = *this;
    for (int i = 1; i < p; ++i) r = r * (*this);
    return r;
  }

  // exp(f): r' = f' r  =>  n r_n = sum_{k=1..n} k f_k r_{n-k}
  Jet exp() const {
    Jet r(order(), std::exp(c_[0]));
    for (int n = 1; n <= order(); ++n) {
      C acc(0.0);
      for (int k = 1; k <= n; ++k)
        acc += static_cast<double>(k) * c_[static_cast<std::size_t>(k)] *
               r.c_[static_cast<std::size_t>(n - k)];
      r.c_[static_cast<std::size_t>(n)] = acc / static_cast<double>(n);
    }
    return r;
  }

  // cos(f) = (exp(i f) + exp(-i f)) / 2
  Jet cos() const {
    const C i(0.0, 1.0);
    Jet a = (i * (*this)).exp();
    Jet b = ((-i) * (*this)).exp();
    return C(0.5) * (a + b);
  }

 private:
  void check(const Jet& o) const {
    if (c_.size() != o.c_.size()) throw std::invalid_argument("Jet: mixed orders");
  }
  std::vector<C> c_{C(0.0)};
};

}  // namespace ssrg
