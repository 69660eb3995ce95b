#pragma once
// Invariant graphs sampled on circle grids: boundary-line iteration, Lyapunov
// exponents, middle (basin boundary) graphs, and pinching diagnostics.
//
// Graph values at off-grid angles are always obtained by recomputing the full
// orbit for that grid point; orbits are never interpolated. Interpolation only
// enters the invariance residual of graph_lyapunov, where it is unavoidable.

#include <optional>
#include <utility>
#include <vector>

#include "qpf/systems.hpp"

namespace qpf {

enum class GraphKind { kUpper, kLower, kMiddle };

struct GraphSample {
  std::vector<double> grid;  // strictly increasing angles in [0,1)
  std::vector<double> values;
  GraphKind kind = GraphKind::kUpper;
  int iterates_used = 0;
  // Mean log-derivative along the generating orbits, when the construction
  // produced one. -inf is possible when an orbit crosses a degenerate fibre.
  std::optional<double> lyap;
};

// Midpoint grid (k + 1/2)/g. Keeps grid angles off the forcing peak at 0 and,
// for pinched systems, off the degenerate fibre, so log-derivatives stay
// finite.
std::vector<double> midpoint_grid(int g);

// The fibre angles wrap(j omega), j = 1..n, sorted. The n-th upper boundary
// iterate of a pinched system vanishes exactly on these fibres, provided the
// angles are produced by this function (same rounding as the internal orbit
// angles).
std::vector<double> orbit_grid(const RotationSpec& rot, int n);

// n-th forward image of the constant upper/lower boundary line: value at grid
// angle theta is T^n applied to the boundary value, started on fibre
// theta - n omega. Fills lyap with the grid mean of the per-orbit averages of
// log DT. Interval fibre geometry only.
GraphSample iterate_boundary(const QpfSystem& sys, GraphKind which, int n, int g);
GraphSample iterate_boundary_at(const QpfSystem& sys, GraphKind which, int n,
                                std::vector<double> grid);

struct GraphExponent {
  double lambda;    // grid average of log DT_theta(graph(theta))
  double residual;  // sup |T(graph) - shift(graph)| against linear interpolation
};

// Lyapunov exponent of a sampled (approximately) invariant graph. Throws
// NotInvariant when the residual exceeds tol; the default tolerance is ten
// times the measured grid interpolation scale, so converged bounding graphs
// pass and arbitrary non-invariant lines do not.
GraphExponent graph_lyapunov(const QpfSystem& sys, const GraphSample& graph,
                             std::optional<double> tol = std::nullopt);

// Preimage of target under the fibre map over theta, by bracketed bisection of
// the monotone fibre map to 1e-13. Interval and circle geometries.
double invert_fibre(const QpfSystem& sys, double theta, double target);

struct ExponentProfile {
  std::vector<long long> horizons;
  std::vector<double> forward;   // (1/n) sum_{i=0}^{n-1} log DT_{theta+i w}(T^i x)
  std::vector<double> backward;  // -(1/n) sum_{i=1}^{n} log DT_{theta-i w}(T^-i x)
};

// Finite-time forward and backward exponents at one point, for each horizon.
// Horizons must be positive and strictly increasing. Backward orbits are
// computed through invert_fibre; on a stable invariant graph the backward
// exponent is positive (the backward orbit stays in contracting territory).
ExponentProfile finite_time_exponents(const QpfSystem& sys, double theta, double x,
                                      std::vector<long long> horizons);

// Largest x over each fibre whose orbit reaches the trapping region x <= 0,
// located by 60 bisection steps on [0, top]. The escape certificate is
// adaptive: the orbit budget starts at n_test and doubles (up to 8 n_test)
// until the orbit either enters x <= 0 or collapses onto the orbit of the
// upper boundary line; an orbit still undecided at the cap counts as upper.
// Designed for one-sided forcing, where x <= 0 is forward invariant. Throws
// NoBasinBoundary when the upper boundary line itself descends (no invariant
// graph above the trapping region: past the bifurcation).
GraphSample middle_graph(const QpfSystem& sys, int g, int n_test);

// Minimum of b - a over the (shared) grid and the angle attaining it.
std::pair<double, double> min_graph_distance(const GraphSample& a,
                                             const GraphSample& b);

// Fraction of grid angles with |a - b| < tol.
double pinched_fraction(const GraphSample& a, const GraphSample& b, double tol);

}  // namespace qpf
