#include "qpf/reference.hpp"

#include <algorithm>
#include <cmath>

#include "qpf/errors.hpp"

namespace qpf::reference {

namespace {

// Same angle scheme as the parallel kernels: offsets are multiplied out,
// never accumulated, so the two implementations agree bit for bit.
double angle(double theta, long long k, double omega) {
  return wrap_unit(theta + static_cast<double>(k) * omega);
}

Interval state_box(const QpfSystem& sys) {
  if (sys.geometry != FibreGeometry::kInterval)
    throw ConfigError("boundary iteration needs an interval fibre geometry");
  return sys.base ? sys.base->domain : Interval{-3.0, 3.0};
}

}  // namespace

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
  GraphSample out;
  out.grid = std::move(grid);
  out.values.assign(out.grid.size(), x0);
  out.kind = which;
  out.iterates_used = n;

  double acc = 0;
  for (size_t k = 0; k < out.grid.size(); ++k) {
    double x = x0;
    double s = 0;
    for (long long i = 0; i < n; ++i) {
      double th = angle(out.grid[k], i - n, sys.spec.omega);
      s += std::log(fibre_derivative(sys, th, x));
      x = fibre_apply(sys, th, x);
    }
    out.values[k] = x;
    if (n > 0) acc += s / n;
  }
  if (n > 0) out.lyap = acc / static_cast<double>(out.grid.size());
  return out;
}

GraphSample iterate_boundary(const QpfSystem& sys, GraphKind which, int n, int g) {
  return reference::iterate_boundary_at(sys, which, n, midpoint_grid(g));
}

GraphSample middle_graph(const QpfSystem& sys, int g, int n_test) {
  if (n_test < 1) throw ConfigError("middle graph needs n_test >= 1");
  const Interval box = state_box(sys);
  const long long cap = 8LL * n_test;

  GraphSample out;
  out.grid = midpoint_grid(g);
  out.values.assign(g, 0.0);
  out.kind = GraphKind::kMiddle;
  out.iterates_used = n_test;
  int used = n_test;

  for (int k = 0; k < g; ++k) {
    const double theta = out.grid[k];
    std::vector<double> upper(cap + 1);
    upper[0] = box.hi;
    for (long long i = 0; i < cap; ++i) {
      upper[i + 1] = fibre_apply(sys, angle(theta, i, sys.spec.omega), upper[i]);
      if (upper[i + 1] <= 0)
        throw NoBasinBoundary("upper boundary orbit enters x <= 0");
    }

    auto descends = [&](double x) {
      if (x <= 0) return true;
      long long checkpoint = n_test;
      for (long long i = 0; i < cap; ++i) {
        x = fibre_apply(sys, angle(theta, i, sys.spec.omega), x);
        if (x <= 0) {
          if (i + 1 > used) used = static_cast<int>(i + 1);
          return true;
        }
        if (i + 1 == checkpoint) {
          if (std::abs(x - upper[i + 1]) <= 1e-12 * std::max(1.0, std::abs(upper[i + 1])))
            return false;
          checkpoint *= 2;
          if (checkpoint > used) used = static_cast<int>(std::min(checkpoint, cap));
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
  }
  out.iterates_used = used;
  return out;
}

}  // namespace qpf::reference
