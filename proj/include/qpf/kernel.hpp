#pragma once

// Fibre-map kernels templated on the scalar type, so the same formulas run
// at double precision for plotting and at extended precision inside the
// parameter solvers.  Unqualified calls (atan, sqrt, ...) resolve through
// ADL for multiprecision types; the std:: using-declarations cover double.

#include <cmath>

#include "qpf/errors.hpp"

namespace qpf {

template <class Real>
Real pi_const() {
  using std::atan;
  return 4 * atan(Real(1));
}

// Golden mean rotation number (sqrt(5)-1)/2 at full working precision.
template <class Real>
Real golden_omega() {
  using std::sqrt;
  return (sqrt(Real(5)) - 1) / 2;
}

template <class Real>
Real wrap_unit_r(const Real& x) {
  using std::floor;
  Real y = x - floor(x);
  if (y >= 1) y -= 1;
  if (y < 0) y += 1;
  return y;
}

// Distance to 0 on the circle; the argument must already lie in [0,1).
template <class Real>
Real dist_to_zero(const Real& t) {
  return t <= Real(1) / 2 ? t : 1 - t;
}

// x -> arctan(a x) / arctan(a).  Fixed points -1, 0, 1.
template <class Real>
struct ArctanPlainKernel {
  Real a;
  Real inv_atan_a;

  static ArctanPlainKernel make(const Real& a) {
    using std::atan;
    return {a, 1 / atan(a)};
  }
  Real value(const Real& x) const {
    using std::atan;
    return atan(a * x) * inv_atan_a;
  }
  Real derivative(const Real& x) const {
    return a * inv_atan_a / (1 + a * a * x * x);
  }
};

// x -> c(a) * arctan(a^(4/3) x) with c(a) chosen so that +-x_a are fixed,
// x_a = 1 + 2/sqrt(a).  The slope at x_a is then below 1 for every a > 1,
// and the origin stays a fixed point.
template <class Real>
struct ArctanRescaledKernel {
  Real a;
  Real a43;  // a^(4/3)
  Real c;
  Real xa;

  static ArctanRescaledKernel make(const Real& a) {
    using std::atan;
    using std::pow;
    using std::sqrt;
    ArctanRescaledKernel k;
    k.a = a;
    k.a43 = pow(a, Real(4) / 3);
    k.xa = 1 + 2 / sqrt(a);
    k.c = k.xa / atan(k.a43 * k.xa);
    return k;
  }
  Real value(const Real& x) const {
    using std::atan;
    return c * atan(a43 * x);
  }
  Real derivative(const Real& x) const {
    Real u = a43 * x;
    return c * a43 / (1 + u * u);
  }
};

// x -> arctan(a x), the odd fibre base of the symmetric family.
template <class Real>
struct ArctanSymmetricKernel {
  Real a;

  Real value(const Real& x) const {
    using std::atan;
    return atan(a * x);
  }
  Real derivative(const Real& x) const {
    return a / (1 + a * a * x * x);
  }
};

// Moebius fibre base of the Schroedinger interval model.  On x >= 0 this is
// the rescaled map h . F1 . h^{-1} with F1(y) = -1/y + e, h(y) = (y - x1) s;
// x1 < x2 are the fixed points of F1 and s = (1 + 2/sqrt(alpha))/(x2 - x1)
// with alpha = e^(3/2), so 0 and 1 + 2/sqrt(alpha) are fixed.  The Moebius
// form has no third fixed point, so the negative half is replaced by a
// C^1 contracting tail k x / (1 - (k-1) x) that fixes -1 and matches the
// slope k = 1/x1^2 at the origin.
template <class Real>
struct HarperIntervalKernel {
  Real e;
  Real alpha;
  Real x1, x2;
  Real s;
  Real k;  // slope at 0, both halves

  static HarperIntervalKernel make(const Real& e) {
    using std::pow;
    using std::sqrt;
    if (!(e > 2))
      throw EBelowThreshold("interval model needs two positive fixed points (e > 2)");
    HarperIntervalKernel m;
    m.e = e;
    m.alpha = pow(e, Real(3) / 2);
    Real disc = sqrt(e * e - 4);
    m.x2 = (e + disc) / 2;
    m.x1 = 1 / m.x2;  // x1 x2 = 1; avoids cancellation in e - disc for large e
    m.s = (1 + 2 / sqrt(m.alpha)) / (m.x2 - m.x1);
    m.k = m.x2 * m.x2;
    return m;
  }
  Real x_plus() const { return s * (x2 - x1); }
  Real value(const Real& x) const {
    if (x >= 0) return s * x2 - s / (x / s + x1);  // e - x1 = x2
    return k * x / (1 - (k - 1) * x);
  }
  Real derivative(const Real& x) const {
    if (x >= 0) {
      Real d = x / s + x1;
      return 1 / (d * d);
    }
    Real d = 1 - (k - 1) * x;
    return k / (d * d);
  }
};

// g(theta) = 1 - sin(pi theta) on the representative [0,1): peak value 1 at
// theta = 0, Lipschitz constant pi, linear decay rate 2 at the peak.
template <class Real>
struct OneSidedSinForcing {
  Real value(const Real& theta) const {
    using std::sin;
    return 1 - sin(pi_const<Real>() * theta);
  }
};

// g(theta) = 1 - 4 d(theta, 0): odd under a half rotation, peaks +-1 at 0
// and 1/2.
template <class Real>
struct SymmetricTentForcing {
  Real value(const Real& theta) const {
    return 1 - 4 * dist_to_zero(theta);
  }
};

// g(theta) = max{0, 1 - slope * d(theta, peak)}.
template <class Real>
struct PeakForcing {
  Real peak;
  Real slope;

  Real value(const Real& theta) const {
    using std::fabs;
    Real d = theta - peak;
    d = dist_to_zero(wrap_unit_r(d));
    Real v = 1 - slope * d;
    return v > 0 ? v : Real(0);
  }
};

}  // namespace qpf
