#include "qpf/cocycle.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <string>

#include "qpf/circle.hpp"
#include "qpf/errors.hpp"

namespace qpf {

namespace {

constexpr int kRenormStride = 32;
constexpr double kHalfPi = 1.5707963267948966;

double norm2(const std::array<double, 2>& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1]);
}

// Projective coordinate of a direction, matching the convention of the
// projective system (x = arctan(-v2/v1), the vertical direction at +pi/2).
double projective_coord(const std::array<double, 2>& v) {
  if (v[0] == 0) return kHalfPi;
  return std::atan(-v[1] / v[0]);
}

std::string fmt(const char* pattern, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), pattern, a, b);
  return buf;
}

}  // namespace

Mat2 mat2_mul(const Mat2& lhs, const Mat2& rhs) {
  return {lhs.a * rhs.a + lhs.b * rhs.c, lhs.a * rhs.b + lhs.b * rhs.d,
          lhs.c * rhs.a + lhs.d * rhs.c, lhs.c * rhs.b + lhs.d * rhs.d};
}

Mat2 mat2_inverse(const Mat2& m) { return {m.d, -m.b, -m.c, m.a}; }

std::array<double, 2> mat2_apply(const Mat2& m, const std::array<double, 2>& v) {
  return {m.a * v[0] + m.b * v[1], m.c * v[0] + m.d * v[1]};
}

double mat2_det(const Mat2& m) { return m.a * m.d - m.b * m.c; }

Mat2 schrodinger_matrix(double theta, double e, double lambda,
                        const ForcingFunction& v) {
  return {e - lambda * v(wrap_unit(theta)), -1.0, 1.0, 0.0};
}

CocycleRun run_cocycle(double theta0, double e, double lambda,
                       const ForcingFunction& v, const RotationSpec& spec,
                       long long n, std::optional<std::array<double, 2>> v0) {
  if (n < 0) throw ConfigError("cocycle run needs n >= 0");
  if (v0 && (*v0)[0] == 0 && (*v0)[1] == 0)
    throw ConfigError("cocycle run needs v0 != 0");
  theta0 = wrap_unit(theta0);

  CocycleRun out;
  out.theta0 = theta0;
  out.n = n;
  out.log_norm_trace.reserve(static_cast<size_t>(n));

  std::array<double, 2> u = v0 ? *v0 : std::array<double, 2>{1, 0};
  std::array<double, 2> w{0, 1};  // second basis vector, matrix mode only
  const bool matrix_mode = !v0;
  double acc = 0;

  for (long long k = 0; k < n; ++k) {
    Mat2 m = schrodinger_matrix(wrap_unit(theta0 + static_cast<double>(k) * spec.omega),
                                e, lambda, v);
    u = mat2_apply(m, u);
    if (matrix_mode) w = mat2_apply(m, w);
    double top = matrix_mode ? std::max(norm2(u), norm2(w)) : norm2(u);
    out.log_norm_trace.push_back(acc + std::log(top));
    if ((k + 1) % kRenormStride == 0) {
      double c = top;
      u[0] /= c;
      u[1] /= c;
      if (matrix_mode) {
        w[0] /= c;
        w[1] /= c;
      }
      acc += std::log(c);
    }
  }
  return out;
}

CocycleEstimate cocycle_lyapunov(double e, double lambda, const ForcingFunction& v,
                                 const RotationSpec& spec, long long n, int samples,
                                 std::uint64_t seed) {
  if (n < 1000) throw ConfigError("cocycle exponent estimate needs n >= 1000");
  if (samples < 1) throw ConfigError("cocycle exponent estimate needs samples >= 1");

  UniformRng rng(seed);
  std::vector<double> thetas(samples);
  for (double& t : thetas) t = rng.next();

  std::vector<double> lam(samples, 0.0);
  std::atomic<bool> failed{false};
  std::exception_ptr error;

#pragma omp parallel for schedule(static)
  for (int i = 0; i < samples; ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      std::array<double, 2> u{1, 0}, w{0, 1};
      double acc = 0;
      for (long long k = 0; k < n; ++k) {
        Mat2 m = schrodinger_matrix(
            wrap_unit(thetas[i] + static_cast<double>(k) * spec.omega), e, lambda, v);
        u = mat2_apply(m, u);
        w = mat2_apply(m, w);
        if ((k + 1) % kRenormStride == 0) {
          double c = std::max(norm2(u), norm2(w));
          u[0] /= c;
          u[1] /= c;
          w[0] /= c;
          w[1] /= c;
          acc += std::log(c);
        }
      }
      lam[i] = (acc + std::log(std::max(norm2(u), norm2(w)))) /
               static_cast<double>(n);
    } catch (...) {
#pragma omp critical
      {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  }
  if (failed) std::rethrow_exception(error);

  CocycleEstimate out;
  out.n = n;
  out.samples = samples;
  double mean = 0;
  for (double x : lam) mean += x;
  mean /= samples;
  out.lambda = mean;
  if (samples > 1) {
    double ss = 0;
    for (double x : lam) ss += (x - mean) * (x - mean);
    out.std_error = std::sqrt(ss / (static_cast<double>(samples) *
                                    static_cast<double>(samples - 1)));
  }
  return out;
}

DerivativeIdentity projective_derivative_identity(double theta,
                                                  std::array<double, 2> v0, double e,
                                                  double lambda,
                                                  const ForcingFunction& v,
                                                  long long n,
                                                  const RotationSpec& spec) {
  if (v0[0] == 0 && v0[1] == 0)
    throw ConfigError("projective identity needs v0 != 0");
  if (n < 0) throw ConfigError("projective identity needs n >= 0");
  theta = wrap_unit(theta);

  // Normalize each step and track log norms; the derivative product is
  // accumulated independently through the projective slope t = v2/v1.
  std::array<double, 2> u = v0;
  double s0 = norm2(u);
  u[0] /= s0;
  u[1] /= s0;
  double log_lhs = 0, acc = 0;

  for (long long k = 0; k < n; ++k) {
    double c = e - lambda * v(wrap_unit(theta + static_cast<double>(k) * spec.omega));
    double dt;
    if (u[0] == 0) {
      dt = 1;  // vertical direction: (0,v2) -> (-v2,0) preserves the norm
    } else {
      double t = u[1] / u[0];  // the projective slope tan(x_k)
      double num = 1 + t * t;
      double den = 1 + (t - c) * (t - c);
      dt = (std::isfinite(num) && std::isfinite(den)) ? num / den : 1;
    }
    log_lhs += std::log(dt);

    std::array<double, 2> w{c * u[0] - u[1], u[0]};
    double s = norm2(w);
    acc += std::log(s);
    u[0] = w[0] / s;
    u[1] = w[1] / s;
  }

  DerivativeIdentity out;
  out.lhs = std::exp(log_lhs);
  out.rhs = std::exp(-2 * acc);
  out.gap = std::abs(std::expm1(log_lhs + 2 * acc));
  return out;
}

GraphSample cocycle_direction_graph(double e, double lambda, const ForcingFunction& v,
                                    const RotationSpec& spec, int g, int m,
                                    CocycleDirection which) {
  if (m < 1) throw ConfigError("direction graph needs m >= 1");
  const double omega = spec.omega;

  GraphSample out;
  out.grid = midpoint_grid(g);
  out.values.assign(g, 0.0);
  out.kind = which == CocycleDirection::kUnstable ? GraphKind::kUpper
                                                  : GraphKind::kMiddle;
  out.iterates_used = m;

  std::atomic<bool> failed{false};
  std::exception_ptr error;

#pragma omp parallel for schedule(static)
  for (int k = 0; k < g; ++k) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      const double theta = out.grid[k];
      std::array<double, 2> u{1, 0};
      if (which == CocycleDirection::kUnstable) {
        for (int i = 0; i < m; ++i) {
          Mat2 a = schrodinger_matrix(
              wrap_unit(theta + static_cast<double>(i - m) * omega), e, lambda, v);
          u = mat2_apply(a, u);
          double s = norm2(u);
          u[0] /= s;
          u[1] /= s;
        }
      } else {
        for (int i = m - 1; i >= 0; --i) {
          Mat2 a = schrodinger_matrix(
              wrap_unit(theta + static_cast<double>(i) * omega), e, lambda, v);
          u = mat2_apply(mat2_inverse(a), u);
          double s = norm2(u);
          u[0] /= s;
          u[1] /= s;
        }
      }
      out.values[k] = projective_coord(u);
    } catch (...) {
#pragma omp critical
      {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  }
  if (failed) std::rethrow_exception(error);
  return out;
}

std::vector<CriticalLambdaRow> lambda_c_curve(const std::vector<double>& e_values,
                                              const ForcingFunction& v,
                                              const RotationSpec& spec, double tol,
                                              long long n_max, int g) {
  std::vector<CriticalLambdaRow> out;
  out.reserve(e_values.size());
  for (double e : e_values) {
    harper_interval_model(e);  // energy threshold check up front
    FamilyFactory factory = [e, &v, &spec](double lam) {
      return make_harper_interval_system(e, lam, v, spec);
    };
    CriticalLambdaRow row;
    row.e = e;
    row.lambda_c = critical_beta(factory, {}, tol, n_max, g);
    row.lambda_c.target = fmt("critical lambda at e=%.17g (tol=%.3g)", e, tol) +
                          ", " + row.lambda_c.target;
    out.push_back(std::move(row));
  }
  return out;
}

BetaBracket critical_e(double lambda, const ForcingFunction& v,
                       const RotationSpec& spec, double tol, double e_lo,
                       double e_hi, long long n_max, int g) {
  if (!(tol > 0)) throw ConfigError("critical energy bisection needs tol > 0");
  if (!(e_lo < e_hi)) throw ConfigError("critical energy bisection needs e_lo < e_hi");
  auto survives = [&](double e) {
    return upper_line_survives(make_harper_interval_system(e, lambda, v, spec), n_max,
                               g);
  };
  if (survives(e_lo))
    throw NoCrossing(fmt("two graphs already present at e_lo = %.17g (lambda %.17g)",
                         e_lo, lambda));
  if (!survives(e_hi))
    throw NoCrossing(fmt("no surviving graphs at e_hi = %.17g (lambda %.17g)", e_hi,
                         lambda));

  double lo = e_lo, hi = e_hi;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    (survives(mid) ? hi : lo) = mid;
  }

  BetaBracket out;
  out.lo = lo;
  out.hi = hi;
  out.width = hi - lo;
  out.target = fmt("critical energy at lambda=%.17g (tol=%.3g)", lambda, tol);
  return out;
}

}  // namespace qpf
