#include "qpf/graphs.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>

#include "qpf/errors.hpp"

namespace qpf {

namespace {

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

Interval state_box(const QpfSystem& sys) {
  if (sys.geometry != FibreGeometry::kInterval)
    throw ConfigError("boundary iteration needs an interval fibre geometry");
  return sys.base ? sys.base->domain : Interval{-3.0, 3.0};
}

// Orbit angle at signed step offset k from a grid angle. Recomputed from the
// integer offset every step, never accumulated: for grid points wrap(j omega)
// the products k*omega and j*omega then round identically, so the orbit meets
// the fibre over 0 exactly and pinched fibres stay exactly pinched.
inline double orbit_angle(double theta, long long k, double omega) {
  return wrap_unit(theta + static_cast<double>(k) * omega);
}

// Runs body(k) for k in [0, g) in parallel, rethrowing the first failure
// after the loop; OpenMP regions must not leak exceptions.
template <class Body>
void parallel_over_grid(int g, const Body& body) {
  std::exception_ptr err = nullptr;
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(static)
  for (int k = 0; k < g; ++k) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      body(k);
    } catch (...) {
#pragma omp critical(qpf_grid_error)
      if (!failed.exchange(true)) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

void require_same_grid(const GraphSample& a, const GraphSample& b) {
  if (a.grid != b.grid || a.values.size() != b.values.size())
    throw GridMismatch("graphs sampled on different grids");
}

}  // namespace

std::vector<double> midpoint_grid(int g) {
  if (g < 2) throw ConfigError("grid needs at least 2 points");
  std::vector<double> grid(g);
  for (int k = 0; k < g; ++k) grid[k] = (k + 0.5) / g;
  return grid;
}

std::vector<double> orbit_grid(const RotationSpec& rot, int n) {
  if (n < 1) throw ConfigError("orbit grid needs n >= 1");
  std::vector<double> grid(n);
  for (int j = 1; j <= n; ++j)
    grid[j - 1] = wrap_unit(static_cast<double>(j) * rot.omega);
  std::sort(grid.begin(), grid.end());
  return grid;
}

GraphSample iterate_boundary_at(const QpfSystem& sys, GraphKind which, int n,
                                std::vector<double> grid) {
  if (which == GraphKind::kMiddle)
    throw ConfigError("boundary iteration starts from the upper or lower line");
  if (n < 0) throw ConfigError("iterate count must be non-negative");
  const Interval box = state_box(sys);
  std::sort(grid.begin(), grid.end());
  if (grid.size() < 2 || std::adjacent_find(grid.begin(), grid.end()) != grid.end())
    throw ConfigError("grid needs at least 2 distinct angles");

  const double x0 = which == GraphKind::kUpper ? box.hi : box.lo;
  const double omega = sys.spec.omega;
  const int g = static_cast<int>(grid.size());

  GraphSample out;
  out.grid = std::move(grid);
  out.values.assign(g, x0);
  out.kind = which;
  out.iterates_used = n;
  std::vector<double> sums(g, 0.0);

  parallel_over_grid(g, [&](int k) {
    double x = x0;
    double s = 0;
    for (long long i = 0; i < n; ++i) {
      double th = orbit_angle(out.grid[k], i - n, omega);
      s += std::log(fibre_derivative(sys, th, x));
      x = fibre_apply(sys, th, x);
    }
    out.values[k] = x;
    sums[k] = s;
  });

  if (n > 0) {
    double acc = 0;
    for (int k = 0; k < g; ++k) acc += sums[k] / n;
    out.lyap = acc / g;
  }
  return out;
}

GraphSample iterate_boundary(const QpfSystem& sys, GraphKind which, int n, int g) {
  return iterate_boundary_at(sys, which, n, midpoint_grid(g));
}

GraphExponent graph_lyapunov(const QpfSystem& sys, const GraphSample& graph,
                             std::optional<double> tol) {
  const auto& th = graph.grid;
  const auto& v = graph.values;
  const int g = static_cast<int>(th.size());
  if (g < 2 || v.size() != th.size())
    throw ConfigError("graph sample needs a grid of >= 2 angles with values");

  // Interpolation scale of the sample itself: the residual of a genuinely
  // invariant graph cannot be resolved below this.
  double scale = 0;
  for (int k = 0; k < g; ++k)
    scale = std::max(scale, std::abs(v[(k + 1) % g] - v[k]));

  // Linear interpolation on the circle, cells wrap from the last angle back
  // to the first.
  auto interpolate = [&](double t) {
    int j = static_cast<int>(std::upper_bound(th.begin(), th.end(), t) - th.begin()) - 1;
    double tl, tr, vl, vr;
    if (j < 0 || j == g - 1) {
      tl = th[g - 1];
      tr = th[0] + 1;
      vl = v[g - 1];
      vr = v[0];
      if (j < 0) t += 1;
    } else {
      tl = th[j];
      tr = th[j + 1];
      vl = v[j];
      vr = v[j + 1];
    }
    return vl + (t - tl) / (tr - tl) * (vr - vl);
  };

  double residual = 0;
  for (int k = 0; k < g; ++k) {
    double image = fibre_apply(sys, th[k], v[k]);
    double target = interpolate(wrap_unit(th[k] + sys.spec.omega));
    residual = std::max(residual, std::abs(image - target));
  }
  const double allowed = tol ? *tol : 10 * scale + 1e-9;
  if (residual > allowed)
    throw NotInvariant(fmt("graph invariance residual %.6g exceeds %.6g", residual,
                           allowed));

  double lambda = 0;
  for (int k = 0; k < g; ++k) lambda += std::log(fibre_derivative(sys, th[k], v[k]));
  return {lambda / g, residual};
}

double invert_fibre(const QpfSystem& sys, double theta, double target) {
  theta = wrap_unit(theta);
  double lo, hi;
  switch (sys.geometry) {
    case FibreGeometry::kInterval: {
      const Interval box = state_box(sys);
      lo = box.lo;
      hi = box.hi;
      if (target < sys.fibre(theta, lo) - 1e-12 || target > sys.fibre(theta, hi) + 1e-12)
        throw InverseOutOfRange(sys.family + ": no preimage of " +
                                fmt("%.17g", target) + " on fibre " + fmt("%.17g", theta));
      break;
    }
    case FibreGeometry::kCircle: {
      // The fibre closure is the lift; solve on the real line and wrap. The
      // bracket widens until it straddles, which must happen for a lift.
      double w = 2;
      lo = target - w;
      hi = target + w;
      while (sys.fibre(theta, lo) > target || sys.fibre(theta, hi) < target) {
        w *= 2;
        if (w > 64)
          throw InverseOutOfRange(sys.family + ": lift bracket failed at fibre " +
                                  fmt("%.17g", theta));
        lo = target - w;
        hi = target + w;
      }
      break;
    }
    default:
      throw ConfigError("fibre inversion needs an interval or circle fibre");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    double mid = 0.5 * (lo + hi);
    (sys.fibre(theta, mid) < target ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  return sys.geometry == FibreGeometry::kCircle ? wrap_unit(x) : x;
}

ExponentProfile finite_time_exponents(const QpfSystem& sys, double theta, double x,
                                      std::vector<long long> horizons) {
  if (horizons.empty()) throw ConfigError("need at least one horizon");
  for (size_t j = 0; j < horizons.size(); ++j)
    if (horizons[j] < 1 || (j > 0 && horizons[j] <= horizons[j - 1]))
      throw ConfigError("horizons must be positive and strictly increasing");
  const long long nmax = horizons.back();
  const double omega = sys.spec.omega;
  theta = wrap_unit(theta);

  ExponentProfile out;
  out.horizons = std::move(horizons);

  double s = 0, xx = x;
  size_t j = 0;
  for (long long i = 0; i < nmax; ++i) {
    double th = orbit_angle(theta, i, omega);
    s += std::log(fibre_derivative(sys, th, xx));
    xx = fibre_apply(sys, th, xx);
    if (i + 1 == out.horizons[j]) {
      out.forward.push_back(s / static_cast<double>(i + 1));
      ++j;
    }
  }

  s = 0;
  xx = x;
  j = 0;
  for (long long i = 1; i <= nmax; ++i) {
    double th = orbit_angle(theta, -i, omega);
    xx = invert_fibre(sys, th, xx);
    s += std::log(fibre_derivative(sys, th, xx));
    if (i == out.horizons[j]) {
      out.backward.push_back(-s / static_cast<double>(i));
      ++j;
    }
  }
  return out;
}

GraphSample middle_graph(const QpfSystem& sys, int g, int n_test) {
  if (n_test < 1) throw ConfigError("middle graph needs n_test >= 1");
  const Interval box = state_box(sys);
  const double omega = sys.spec.omega;
  const long long cap = 8LL * n_test;
  std::vector<double> grid = midpoint_grid(g);

  GraphSample out;
  out.grid = std::move(grid);
  out.values.assign(g, 0.0);
  out.kind = GraphKind::kMiddle;
  out.iterates_used = n_test;
  std::vector<int> used(g, n_test);

  parallel_over_grid(g, [&](int k) {
    const double theta = out.grid[k];

    // Orbit of the upper boundary line over this fibre. If it reaches the
    // trapping region there is nothing above the lower attractor any more.
    std::vector<double> upper(cap + 1);
    upper[0] = box.hi;
    for (long long i = 0; i < cap; ++i) {
      upper[i + 1] = fibre_apply(sys, orbit_angle(theta, i, omega), upper[i]);
      if (upper[i + 1] <= 0)
        throw NoBasinBoundary(fmt("upper boundary orbit enters x <= 0 over theta = "
                                  "%.12g after %.17g steps",
                                  theta, static_cast<double>(i + 1)));
    }

    // descends(x): the orbit enters x <= 0 within the adaptive budget. An
    // orbit that collapses onto the upper boundary orbit at a checkpoint is
    // decisively upper; one still undecided at the cap counts as upper too.
    auto descends = [&](double x) {
      if (x <= 0) return true;
      long long checkpoint = n_test;
      for (long long i = 0; i < cap; ++i) {
        x = fibre_apply(sys, orbit_angle(theta, i, omega), x);
        if (x <= 0) {
          if (i + 1 > used[k]) used[k] = static_cast<int>(i + 1);
          return true;
        }
        if (i + 1 == checkpoint) {
          if (std::abs(x - upper[i + 1]) <= 1e-12 * std::max(1.0, std::abs(upper[i + 1])))
            return false;
          checkpoint *= 2;
          if (checkpoint > used[k]) used[k] = static_cast<int>(std::min(checkpoint, cap));
        }
      }
      return false;
    };

    double lo = 0, hi = box.hi;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      (descends(mid) ? lo : hi) = mid;
    }
    out.values[k] = 0.5 * (lo + hi);
  });

  out.iterates_used = *std::max_element(used.begin(), used.end());
  return out;
}

std::pair<double, double> min_graph_distance(const GraphSample& a,
                                             const GraphSample& b) {
  require_same_grid(a, b);
  double best = b.values[0] - a.values[0];
  double arg = a.grid[0];
  for (size_t k = 1; k < a.grid.size(); ++k) {
    double d = b.values[k] - a.values[k];
    if (d < best) {
      best = d;
      arg = a.grid[k];
    }
  }
  return {best, arg};
}

double pinched_fraction(const GraphSample& a, const GraphSample& b, double tol) {
  require_same_grid(a, b);
  size_t hits = 0;
  for (size_t k = 0; k < a.grid.size(); ++k)
    if (std::abs(a.values[k] - b.values[k]) < tol) ++hits;
  return static_cast<double>(hits) / static_cast<double>(a.grid.size());
}

}  // namespace qpf
