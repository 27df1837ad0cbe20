#pragma once

// Finite periodic space(-time) lattice underlying all position-space kernels:
// T time slices of spacing dt, L sites of spacing dx per spatial axis, spin
// up/down, and (optionally) a field/conjugate-field index.  Points carry
// integer coordinates; separations use the minimal periodic image, with the
// half-period tie resolved to the nonnegative representative.

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "ssrg/norm_domain.hpp"

namespace ssrg {

struct LatticeSpec {
  int d = 1;       // spatial dimensions (1..3)
  int L = 4;       // sites per spatial axis
  int T = 4;       // time slices
  double dx = 1.0; // spatial spacing
  double dt = 1.0; // temporal spacing
};

struct BasePoint {
  std::array<std::int16_t, 4> x{};  // x[0] = time index, x[1..d] = spatial indices
  std::int8_t spin = 0;             // 0 = up, 1 = down
  std::int8_t conj = 0;             // 0 = field, 1 = conjugate field

  bool operator==(const BasePoint& o) const { return x == o.x && spin == o.spin && conj == o.conj; }
};

class BaseSpace {
 public:
  // with_conjugation = false gives the plain position-spin space used by
  // two-sided (x, y) kernels; true appends the field/conjugate index.
  BaseSpace(LatticeSpec lat, bool with_conjugation);

  const LatticeSpec& lattice() const { return lat_; }
  bool with_conjugation() const { return with_conj_; }

  int size() const { return size_; }
  int sites() const { return sites_; }                  // T * L^d
  double cell_volume() const { return cell_volume_; }   // dt * dx^d

  int index_of(const BasePoint& p) const;
  BasePoint point(int index) const;

  // Minimal-image separation along an axis (0 = time), in physical units.
  // Integer tie at half period resolves to the nonnegative image.
  double separation(const BasePoint& a, const BasePoint& b, int axis) const;

  // (xi - xi')^delta: product over axes of separation^delta_axis.  The spin
  // and conjugation components do not enter.
  double decay_factor(const BasePoint& a, const BasePoint& b, const MultiIndex& delta) const;

 private:
  LatticeSpec lat_;
  bool with_conj_ = true;
  int size_ = 0;
  int sites_ = 0;
  double cell_volume_ = 0.0;
};

using BaseSpacePtr = std::shared_ptr<const BaseSpace>;

BaseSpacePtr make_base_space(const LatticeSpec& lat, bool with_conjugation);

// Minimal periodic image of an integer difference for extent n: the
// representative of k mod n in (-n/2, n/2], so the half-period tie is the
// nonnegative one.
int minimal_image(int k, int n);

}  // namespace ssrg
