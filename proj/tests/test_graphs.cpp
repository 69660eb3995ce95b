#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qpf/circle.hpp"
#include "qpf/errors.hpp"
#include "qpf/graphs.hpp"
#include "qpf/reference.hpp"
#include "qpf/systems.hpp"

using namespace qpf;

namespace {
const RotationSpec kRot = RotationSpec::golden_mean();

QpfSystem plain(double beta) { return make_arctan_family(10.0, beta, kRot); }
}  // namespace

TEST_CASE("grids") {
  std::vector<double> mid = midpoint_grid(4);
  CHECK(mid == std::vector<double>{0.125, 0.375, 0.625, 0.875});
  CHECK_THROWS_AS(midpoint_grid(1), ConfigError);

  std::vector<double> orb = orbit_grid(kRot, 5);
  CHECK(orb.size() == 5);
  for (size_t k = 1; k < orb.size(); ++k) CHECK(orb[k] > orb[k - 1]);
  // contains wrap(j omega) for each j
  for (int j = 1; j <= 5; ++j) {
    double target = wrap_unit(j * kRot.omega);
    bool found = false;
    for (double t : orb) found = found || t == target;
    CHECK(found);
  }
}

TEST_CASE("boundary iteration") {
  // n = 0 reproduces the constant boundary line.
  GraphSample top0 = iterate_boundary(plain(0.7), GraphKind::kUpper, 0, 16);
  GraphSample bot0 = iterate_boundary(plain(0.7), GraphKind::kLower, 0, 16);
  for (double v : top0.values) CHECK(v == 3.0);
  for (double v : bot0.values) CHECK(v == -3.0);
  CHECK_FALSE(top0.lyap.has_value());

  // Unforced rescaled family: the upper line settles on the stable fixed
  // point 1.2 everywhere, and the orbit-mean log-derivative approaches the
  // exponent of that fixed point.
  QpfSystem r100 = make_rescaled_arctan_system(100.0, 0.0, kRot);
  GraphSample up = iterate_boundary(r100, GraphKind::kUpper, 60, 32);
  for (double v : up.values) CHECK(std::abs(v - 1.2) <= 1e-12);
  CHECK(up.lyap.has_value());
  CHECK(std::abs(*up.lyap - (-6.7729907845019464)) <= 0.05);

  // Frozen 200-step upper boundary value of the forced family.
  GraphSample two = iterate_boundary_at(plain(0.9), GraphKind::kUpper, 200,
                                        {0.0625, 0.5625});
  CHECK(two.grid[0] == 0.0625);
  CHECK(two.values[0] == doctest::Approx(0.92612535351226792).epsilon(1e-10));

  // The upper line is pointwise non-increasing in the iterate count and in
  // the coupling.
  GraphSample u10 = iterate_boundary(plain(0.9), GraphKind::kUpper, 10, 32);
  GraphSample u20 = iterate_boundary(plain(0.9), GraphKind::kUpper, 20, 32);
  GraphSample u40 = iterate_boundary(plain(0.9), GraphKind::kUpper, 40, 32);
  for (int k = 0; k < 32; ++k) {
    CHECK(u20.values[k] <= u10.values[k] + 1e-12);
    CHECK(u40.values[k] <= u20.values[k] + 1e-12);
  }
  GraphSample b2 = iterate_boundary(plain(0.2), GraphKind::kUpper, 100, 32);
  GraphSample b5 = iterate_boundary(plain(0.5), GraphKind::kUpper, 100, 32);
  GraphSample b9 = iterate_boundary(plain(0.9), GraphKind::kUpper, 100, 32);
  for (int k = 0; k < 32; ++k) {
    CHECK(b5.values[k] <= b2.values[k] + 1e-12);
    CHECK(b9.values[k] <= b5.values[k] + 1e-12);
  }

  // The expanded state box admits boundary orbits of the strongly coupled
  // symmetric family.
  QpfSystem sym = make_symmetric(10.0, 1.66, kRot);
  GraphSample su = iterate_boundary(sym, GraphKind::kUpper, 300, 16);
  for (double v : su.values) CHECK(std::abs(v) <= sym.base->domain.hi);

  CHECK_THROWS_AS(iterate_boundary(plain(0.7), GraphKind::kMiddle, 5, 8), ConfigError);
  CHECK_THROWS_AS(iterate_boundary(plain(0.7), GraphKind::kUpper, -1, 8), ConfigError);
  CHECK_THROWS_AS(
      iterate_boundary(make_harper(4.4, 4.0, make_cos_potential(), kRot),
                       GraphKind::kUpper, 5, 8),
      ConfigError);
  CHECK_THROWS_AS(iterate_boundary_at(plain(0.7), GraphKind::kUpper, 5, {0.25, 0.25}),
                  ConfigError);
}

TEST_CASE("pinched fibres vanish exactly") {
  QpfSystem pin = make_pinched(10.0, kRot);
  GraphSample g30 = iterate_boundary_at(pin, GraphKind::kUpper, 30, orbit_grid(kRot, 30));
  for (double v : g30.values) CHECK(v == 0.0);

  GraphSample g5 = iterate_boundary_at(pin, GraphKind::kUpper, 5, orbit_grid(kRot, 5));
  for (double v : g5.values) CHECK(v == 0.0);

  // Off the pinched fibres the iterate stays strictly inside (0, 1].
  GraphSample off = iterate_boundary(pin, GraphKind::kUpper, 10, 64);
  for (double v : off.values) {
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("graph exponents") {
  // A fabricated neutral system: identity fibre maps leave every constant
  // graph invariant with zero exponent.
  FibreBase id;
  id.evaluator = [](double x) { return x; };
  id.derivative = [](double) { return 1.0; };
  id.fixed_points = {-1.0, 0.0, 1.0};
  QpfSystem neutral = make_custom_interval(id, make_peak_potential(), 0.0, kRot,
                                           "neutral");
  GraphSample flat;
  flat.grid = midpoint_grid(64);
  flat.values.assign(64, 0.4);
  GraphExponent ne = graph_lyapunov(neutral, flat);
  CHECK(ne.lambda == 0.0);
  CHECK(ne.residual == 0.0);

  // Unforced lower graph of the plain family sits at the stable fixed point
  // -1; its exponent is the log-derivative there.
  GraphSample low = iterate_boundary(plain(0.0), GraphKind::kLower, 200, 64);
  GraphExponent le = graph_lyapunov(plain(0.0), low);
  CHECK(le.lambda == doctest::Approx(-2.6985646559242703).epsilon(1e-9));

  // Unforced rescaled family: the 0-line is the repeller.
  QpfSystem r100 = make_rescaled_arctan_system(100.0, 0.0, kRot);
  GraphSample zero;
  zero.grid = midpoint_grid(128);
  zero.values.assign(128, 0.0);
  GraphExponent re = graph_lyapunov(r100, zero);
  CHECK(re.lambda == doctest::Approx(5.8721093817079238).epsilon(1e-12));
  CHECK(re.residual == 0.0);

  // Pinched 0-line: log alpha plus the integral of log sin(pi theta), which
  // is log alpha - log 2.
  QpfSystem pin = make_pinched(10.0, kRot);
  GraphSample pzero;
  pzero.grid = midpoint_grid(100000);
  pzero.values.assign(100000, 0.0);
  GraphExponent pe = graph_lyapunov(pin, pzero);
  CHECK(pe.lambda == doctest::Approx(1.6094379124341004).epsilon(1e-4));
  CHECK(pe.residual == 0.0);

  // A constant line that is not invariant is rejected.
  GraphSample half;
  half.grid = midpoint_grid(64);
  half.values.assign(64, 0.5);
  CHECK_THROWS_AS(graph_lyapunov(plain(0.7), half), NotInvariant);

  // Converged upper bounding graph: residual passes the default tolerance
  // (ten times the interpolation scale) and the exponent is non-positive.
  GraphSample up = iterate_boundary(plain(0.9), GraphKind::kUpper, 500, 256);
  GraphExponent ue = graph_lyapunov(plain(0.9), up);
  CHECK(ue.lambda < 0.02);
  CHECK(ue.residual >= 0.0);
}

TEST_CASE("finite-time exponents and fibre inversion") {
  QpfSystem sys = plain(0.7);

  // One-step forward exponent is the log-derivative itself.
  ExponentProfile one = finite_time_exponents(sys, 0.2, 0.1, {1});
  CHECK(one.forward[0] ==
        doctest::Approx(std::log(fibre_derivative(sys, 0.2, 0.1))).epsilon(1e-14));

  // Frozen 5-step forward exponent, and the backward exponent at the orbit
  // endpoint, which retraces the same five factors with opposite sign.
  ExponentProfile fwd = finite_time_exponents(sys, 0.2, 0.1, {1, 5});
  CHECK(fwd.forward[1] == doctest::Approx(-0.71621958506062389).epsilon(1e-12));
  ExponentProfile back = finite_time_exponents(
      sys, 0.29016994374947451, 0.80606664005667306, {5});
  CHECK(back.backward[0] == doctest::Approx(0.71621958506062389).epsilon(1e-8));

  // Applying the fibre map to a computed preimage recovers the point.
  double y = fibre_apply(sys, 0.37, 0.8);
  double x = invert_fibre(sys, 0.37, y);
  CHECK(std::abs(x - 0.8) <= 1e-10);
  CHECK(std::abs(fibre_apply(sys, 0.37, x) - y) <= 1e-10);

  // Constant orbits make the forward exponents exact at every horizon.  The
  // backward exponent of a forward-stable fixed point is only usable at short
  // horizons: the inversion error is amplified by 1/DF per step, so the
  // computed backward orbit peels off the fixed point after a few steps.
  QpfSystem r100 = make_rescaled_arctan_system(100.0, 0.0, kRot);
  ExponentProfile fixed = finite_time_exponents(r100, 0.3, 1.2, {1, 10, 100});
  for (double lam : fixed.forward)
    CHECK(lam == doctest::Approx(-6.7729907845019464).epsilon(1e-9));
  CHECK(fixed.backward[0] == doctest::Approx(6.7729907845019464).epsilon(1e-9));

  // On the repelling 0-line the roles swap: backward iteration contracts, so
  // every backward horizon is exact, with exponent -log DF(0).
  ExponentProfile rep = finite_time_exponents(r100, 0.3, 0.0, {1, 10, 100});
  for (double lam : rep.forward)
    CHECK(lam == doctest::Approx(5.8721093817079238).epsilon(1e-9));
  for (double lam : rep.backward)
    CHECK(lam == doctest::Approx(-5.8721093817079238).epsilon(1e-9));

  // Ergodic averages from a point between the repeller and the upper
  // attractor: forward settles on the attractor exponent, backward tracks
  // the repeller (where log DT > 0), so it comes out negative.
  QpfSystem s9 = plain(0.9);
  ExponentProfile erg = finite_time_exponents(s9, 0.0625, 0.6, {2000});
  GraphSample up = iterate_boundary(s9, GraphKind::kUpper, 2000, 64);
  CHECK(std::abs(erg.forward[0] - *up.lyap) <= 0.05);
  CHECK(erg.backward[0] < 0.0);

  // Circle fibres invert through the lift.
  QpfSystem arn = make_arnold(0.3373547962, 0.99, 0.6, kRot);
  double ay = fibre_apply(arn, 0.2, 0.4);
  double ax = invert_fibre(arn, 0.2, ay);
  CHECK(std::abs(ax - 0.4) <= 1e-10);
  ExponentProfile aprof = finite_time_exponents(arn, 0.3, 0.7, {8});
  CHECK(std::isfinite(aprof.forward[0]));
  CHECK(std::isfinite(aprof.backward[0]));

  CHECK_THROWS_AS(invert_fibre(r100, 0.3, 2.0), InverseOutOfRange);
  CHECK_THROWS_AS(finite_time_exponents(sys, 0.2, 0.1, {3, 2}), ConfigError);
  CHECK_THROWS_AS(finite_time_exponents(sys, 0.2, 0.1, {0}), ConfigError);
  CHECK_THROWS_AS(
      invert_fibre(make_harper(4.4, 4.0, make_cos_potential(), kRot), 0.2, 0.3),
      ConfigError);
}

TEST_CASE("middle graph") {
  // Unforced: the basin boundary is the unstable 0-line.
  GraphSample m0 = middle_graph(plain(0.0), 16, 200);
  for (double v : m0.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1e-9);
  }

  // Frozen bisected value at theta = 0.0625 (first fibre of an 8-point
  // midpoint grid) for beta = 0.9, certificate budget 8 x 250 = 2000.
  GraphSample m9 = middle_graph(plain(0.9), 8, 250);
  CHECK(m9.grid[0] == 0.0625);
  CHECK(m9.values[0] == doctest::Approx(0.20086713206934936).epsilon(1e-9));

  // The middle graph separates the trapping region from the upper attractor.
  GraphSample u9 = iterate_boundary(plain(0.9), GraphKind::kUpper, 800, 8);
  for (int k = 0; k < 8; ++k) {
    CHECK(m9.values[k] > 0.0);
    CHECK(m9.values[k] < u9.values[k]);
  }

  // Its exponent is positive (it samples the repeller).
  GraphExponent me = graph_lyapunov(plain(0.9), m9);
  CHECK(me.lambda > 0.05);

  // Past the bifurcation everything converges down.
  CHECK_THROWS_AS(middle_graph(plain(1.2), 8, 500), NoBasinBoundary);
  CHECK_THROWS_AS(middle_graph(plain(0.9), 8, 0), ConfigError);
}

TEST_CASE("graph distances and pinching fractions") {
  GraphSample a, b;
  a.grid = b.grid = midpoint_grid(4);
  a.values = {0.0, 0.1, 0.2, 0.3};
  b.values = {0.5, 0.4, 0.25, 0.6};
  auto [delta, arg] = min_graph_distance(a, b);
  CHECK(delta == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(arg == a.grid[2]);
  auto [zero, arg0] = min_graph_distance(a, a);
  CHECK(zero == 0.0);
  CHECK(arg0 == a.grid[0]);

  CHECK(pinched_fraction(a, a, 1e-12) == 1.0);
  CHECK(pinched_fraction(a, b, 1e-3) == 0.0);
  CHECK(pinched_fraction(a, b, 0.06) == doctest::Approx(0.25).epsilon(1e-15));

  GraphSample c;
  c.grid = midpoint_grid(8);
  c.values.assign(8, 0.0);
  CHECK_THROWS_AS(min_graph_distance(a, c), GridMismatch);
  CHECK_THROWS_AS(pinched_fraction(a, c, 1e-3), GridMismatch);

  // The gap between the middle graph and the upper graph closes as the
  // coupling approaches the bifurcation.
  double prev = 1e9;
  for (double beta : {0.9, 0.95, 0.967}) {
    GraphSample mid = middle_graph(plain(beta), 64, 250);
    GraphSample up = iterate_boundary(plain(beta), GraphKind::kUpper, 800, 64);
    auto [gap, where] = min_graph_distance(mid, up);
    (void)where;
    CHECK(gap > 0.0);
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("serial reference matches the parallel kernels bitwise") {
  GraphSample p1 = iterate_boundary(plain(0.9), GraphKind::kUpper, 100, 64);
  GraphSample r1 = reference::iterate_boundary(plain(0.9), GraphKind::kUpper, 100, 64);
  CHECK(p1.grid == r1.grid);
  CHECK(p1.values == r1.values);
  CHECK(*p1.lyap == *r1.lyap);

  QpfSystem pin = make_pinched(10.0, kRot);
  GraphSample p2 = iterate_boundary_at(pin, GraphKind::kUpper, 20, orbit_grid(kRot, 20));
  GraphSample r2 =
      reference::iterate_boundary_at(pin, GraphKind::kUpper, 20, orbit_grid(kRot, 20));
  CHECK(p2.values == r2.values);

  GraphSample p3 = middle_graph(plain(0.9), 8, 100);
  GraphSample r3 = reference::middle_graph(plain(0.9), 8, 100);
  CHECK(p3.values == r3.values);
  CHECK(p3.iterates_used == r3.iterates_used);
}
