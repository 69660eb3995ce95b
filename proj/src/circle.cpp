#include "qpf/circle.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace qpf {

double wrap_unit(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r -= 1.0;  // floor rounding can leave exactly 1.0
  if (r < 0.0) r = 0.0;    // and -0.0
  return r;
}

double circle_dist(double a, double b) {
  double r = std::fabs(wrap_unit(a) - wrap_unit(b));
  return r <= 0.5 ? r : 1.0 - r;
}

double RotationSpec::orbit_point(long long n) const {
  double nn = static_cast<double>(n);  // exact for |n| < 2^53
  double p = nn * omega;
  double e = std::fma(nn, omega, -p);  // exact residual of the product
  // p - floor(p) is exact (same binade), so the only error left is in
  // re-adding the residual: a few ulp of 1 in total.
  double f = p - std::floor(p);
  return wrap_unit(f + e);
}

RotationSpec RotationSpec::golden_mean() {
  RotationSpec r;
  r.omega = (std::sqrt(5.0) - 1.0) / 2.0;
  r.cf.assign(40, 1);
  // d(n*omega, 0) >= c * n^{-1} holds with c = 0.38 on checked ranges; the
  // sharp constant is 1/sqrt(5) in the limit along Fibonacci denominators.
  r.dioph_c = 0.38;
  r.dioph_d = 1.0;
  return r;
}

RotationSpec RotationSpec::make(double omega, int cf_terms) {
  RotationSpec r;
  r.omega = wrap_unit(omega);
  r.cf = continued_fraction(r.omega, cf_terms).terms;
  return r;
}

ContinuedFraction continued_fraction(double omega, int max_terms) {
  ContinuedFraction out;
  double x = wrap_unit(omega);
  // Convergent denominators q_k; once q_k^2 * eps reaches x's scale the next
  // quotient is no longer certified by the input precision.
  double q_prev = 0.0, q_cur = 1.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (int k = 0; k < max_terms; ++k) {
    if (x <= 0.0) return out;  // rational within precision, expansion ended
    if (q_cur * q_cur * eps > 0.1) {
      out.truncated = true;
      return out;
    }
    double inv = 1.0 / x;
    double a = std::floor(inv);
    if (a < 1.0 || a > 9e15) {
      out.truncated = true;
      return out;
    }
    out.terms.push_back(static_cast<long long>(a));
    x = inv - a;
    double q_next = a * q_cur + q_prev;
    q_prev = q_cur;
    q_cur = q_next;
  }
  return out;
}

DiophantineFit estimate_dioph(const RotationSpec& rot, long long N) {
  DiophantineFit fit;
  if (N < 2) return fit;
  // Record-closest returns; for badly approximable omega these sit at the
  // convergent denominators.
  double best = 1.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long long records = 0;
  for (long long n = 1; n <= N; ++n) {
    double d = circle_dist(rot.orbit_point(n), 0.0);
    if (d < best) {
      best = d;
      double lx = std::log(static_cast<double>(n)), ly = std::log(d);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++records;
    }
  }
  if (records >= 2) {
    double denom = records * sxx - sx * sx;
    double slope = denom != 0.0 ? (records * sxy - sx * sy) / denom : 0.0;
    fit.d = slope < 0.0 ? -slope : 0.0;
  } else {
    fit.d = 1.0;
  }
  double d_claim = rot.dioph_d > 0.0 ? rot.dioph_d : fit.d;
  double c_min = std::numeric_limits<double>::infinity();
  for (long long n = 1; n <= N; ++n) {
    double d = circle_dist(rot.orbit_point(n), 0.0);
    double c = d * std::pow(static_cast<double>(n), d_claim);
    if (c < c_min) c_min = c;
  }
  if (rot.dioph_c > 0.0 && rot.dioph_d > 0.0) {
    fit.c = rot.dioph_c;
    fit.d = rot.dioph_d;
    fit.holds = c_min >= rot.dioph_c;
  } else {
    fit.c = c_min;
    fit.holds = c_min > 0.0;
  }
  return fit;
}

double UniformRng::next() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

std::uint64_t UniformRng::next_u64() { return eng_(); }

long long UniformRng::next_index(long long n) {
  // Rejection keeps the distribution exactly uniform.
  std::uint64_t bound = static_cast<std::uint64_t>(n);
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = eng_();
  } while (x >= limit);
  return static_cast<long long>(x % bound);
}

}  // namespace qpf
