#include "ssrg/lattice.hpp"

#include <cmath>

namespace ssrg {

int minimal_image(int k, int n) {
  int r = ((k % n) + n) % n;  // in [0, n)
  if (2 * r > n) r -= n;      // now in (-n/2, n/2]; r == n/2 stays positive
  return r;
}

BaseSpace::BaseSpace(LatticeSpec lat, bool with_conjugation)
    : lat_(lat), with_conj_(with_conjugation) {
  if (lat_.d < 1 || lat_.d > 3) throw std::invalid_argument("BaseSpace: d must be 1..3");
  if (lat_.L < 1 || lat_.T < 1) throw std::invalid_argument("BaseSpace: L, T must be >= 1");
  if (!(lat_.dx > 0.0) || !(lat_.dt > 0.0))
    throw std::invalid_argument("BaseSpace: spacings must be positive");
  sites_ = lat_.T;
  cell_volume_ = lat_.dt;
  for (int i = 0; i < lat_.d; ++i) {
    sites_ *= lat_.L;
    cell_volume_ *= lat_.dx;
  }
  size_ = sites_ * 2 * (with_conj_ ? 2 : 1);
  if (size_ > 0xFFFF) throw std::invalid_argument("BaseSpace: too many points for 16-bit slots");
}

int BaseSpace::index_of(const BasePoint& p) const {
  int site = p.x[0];
  for (int i = 1; i <= lat_.d; ++i) site = site * lat_.L + p.x[static_cast<std::size_t>(i)];
  int idx = site * 2 + p.spin;
  if (with_conj_) idx = idx * 2 + p.conj;
  return idx;
}

BasePoint BaseSpace::point(int index) const {
  BasePoint p;
  if (with_conj_) {
    p.conj = static_cast<std::int8_t>(index & 1);
    index >>= 1;
  }
  p.spin = static_cast<std::int8_t>(index & 1);
  index >>= 1;
  for (int i = lat_.d; i >= 1; --i) {
    p.x[static_cast<std::size_t>(i)] = static_cast<std::int16_t>(index % lat_.L);
    index /= lat_.L;
  }
  p.x[0] = static_cast<std::int16_t>(index);
  return p;
}

double BaseSpace::separation(const BasePoint& a, const BasePoint& b, int axis) const {
  int extent = axis == 0 ? lat_.T : lat_.L;
  double h = axis == 0 ? lat_.dt : lat_.dx;
  int k = a.x[static_cast<std::size_t>(axis)] - b.x[static_cast<std::size_t>(axis)];
  return h * minimal_image(k, extent);
}

double BaseSpace::decay_factor(const BasePoint& a, const BasePoint& b,
                               const MultiIndex& delta) const {
  double f = 1.0;
  for (int axis = 0; axis < delta.size(); ++axis) {
    int p = delta[axis];
    if (p == 0) continue;
    double s = separation(a, b, axis);
    for (int q = 0; q < p; ++q) f *= s;
  }
  return f;
}

BaseSpacePtr make_base_space(const LatticeSpec& lat, bool with_conjugation) {
  return std::make_shared<const BaseSpace>(lat, with_conjugation);
}

}  // namespace ssrg
