#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "qpf/circle.hpp"
#include "qpf/errors.hpp"
#include "qpf/kernel.hpp"
#include "qpf/systems.hpp"

using namespace qpf;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Central difference against the analytic derivative on random core points.
// reject filters out points too close to kinks or poles for a second-order
// stencil to resolve.
void check_derivative(const QpfSystem& sys, double xlo, double xhi, UniformRng& rng,
                      const std::function<bool(double, double)>& reject = {}) {
  int accepted = 0;
  while (accepted < 1000) {
    double theta = rng.next();
    double x = xlo + (xhi - xlo) * rng.next();
    if (reject && reject(theta, x)) continue;
    ++accepted;
    const double h = 1e-6;
    double fd = (sys.fibre(theta, x + h) - sys.fibre(theta, x - h)) / (2 * h);
    double an = sys.fibre_dx(theta, x);
    CHECK(std::abs(fd - an) <= 1e-6 * std::max(std::abs(an), 1e-12));
  }
}

}  // namespace

TEST_CASE("analytic fibre derivatives match finite differences") {
  RotationSpec rot = RotationSpec::golden_mean();
  UniformRng rng(20260816u);

  check_derivative(make_arctan_family(10.0, 0.7, rot), -3.0, 3.0, rng);
  check_derivative(make_rescaled_arctan_system(100.0, 1.0, rot), -1.5, 1.5, rng);
  check_derivative(make_symmetric(10.0, 1.645, rot), -kPi, kPi, rng);
  check_derivative(make_pinched(10.0, rot), -0.3, 0.3, rng,
                   [](double theta, double) { return std::sin(kPi * theta) < 0.01; });
  check_derivative(make_arnold(0.3373547962, 0.99, 0.6, rot), 0.0, 1.0, rng);
  check_derivative(make_arnold(0.0, 0.99, -0.45, rot, ArnoldForcing::kPeak), 0.0, 1.0, rng);
  check_derivative(make_harper(4.4, 4.0, make_cos_potential(), rot), -1.4, 1.4, rng,
                   [](double theta, double x) {
                     double w = std::tan(-x) - 4.4 + 4.0 * std::cos(2 * kPi * theta);
                     return std::abs(std::cos(x)) < 0.1 || std::abs(w) < 0.1;
                   });
  check_derivative(make_riccati(4.4, 4.0, make_cos_potential(), rot), 0.5, 5.0, rng);
  check_derivative(make_harper_interval_system(10.0, 1.0, make_peak_potential(), rot),
                   -1.5, 1.3, rng,
                   [](double, double x) { return std::abs(x) < 1e-4; });
  check_derivative(make_system_from_config(
                       "tanh-sine", {{"alpha", 5.0}, {"beta", 1.2015}}, rot),
                   -1.0, 1.0, rng);
}

TEST_CASE("separable fibre values") {
  RotationSpec rot = RotationSpec::golden_mean();

  // F(0) = 0 and g(0) = 1, so full coupling pulls the origin down by beta.
  QpfSystem r100 = make_rescaled_arctan_system(100.0, 1.0, rot);
  CHECK(fibre_apply(r100, 0.0, 0.0) == doctest::Approx(-1.0).epsilon(1e-14));

  QpfSystem plain = make_arctan_family(10.0, 0.7, rot);
  CHECK(fibre_apply(plain, 0.3, 0.2) ==
        doctest::Approx(0.61889696201745548).epsilon(1e-14));

  // beta = 0 keeps every fixed point of the base in place.
  QpfSystem frozen = make_arctan_family(10.0, 0.0, rot);
  for (double x : {-1.0, 0.0, 1.0}) {
    for (double theta : {0.0, 0.25, 0.8})
      CHECK(fibre_apply(frozen, theta, x) == doctest::Approx(x).epsilon(1e-12));
  }

  // One-sided monotonicity: images never increase with beta, and strictly
  // decrease wherever the forcing is positive.
  for (double theta : {0.0, 0.2, 0.45}) {
    double g = plain.forcing->evaluator(theta);
    double prev = fibre_apply(make_arctan_family(10.0, 0.0, rot), theta, 0.4);
    for (double beta : {0.2, 0.5, 0.8, 1.1}) {
      double cur = fibre_apply(make_arctan_family(10.0, beta, rot), theta, 0.4);
      CHECK(cur <= prev + 1e-15);
      if (g > 1e-6) CHECK(cur < prev);
      prev = cur;
    }
  }
  // theta = 1/2 is the forcing zero: beta has no effect there.
  CHECK(fibre_apply(make_arctan_family(10.0, 1.4, rot), 0.5, 0.4) ==
        doctest::Approx(fibre_apply(plain, 0.5, 0.4)).epsilon(1e-14));
}

TEST_CASE("rescaled arctan base") {
  RotationSpec rot = RotationSpec::golden_mean();
  CHECK_THROWS_AS(make_rescaled_arctan(0.5, rot), ConfigError);

  for (double alpha : {10.0, 20.0, 40.0, 100.0, 1e4}) {
    QpfSystem sys = make_rescaled_arctan_system(alpha, 0.0, rot);
    double xa = 1 + 2 / std::sqrt(alpha);
    CHECK(sys.base->fixed_points[0] == doctest::Approx(-xa).epsilon(1e-15));
    CHECK(sys.base->fixed_points[2] == doctest::Approx(xa).epsilon(1e-15));
    CHECK(std::abs((*sys.base)(xa) - xa) <= 1e-12);
    CHECK(std::abs((*sys.base)(-xa) + xa) <= 1e-12);
    CHECK((*sys.base)(0.0) == 0.0);
  }

  QpfSystem r100 = make_rescaled_arctan_system(100.0, 0.0, rot);
  CHECK((*r100.base)(1.2) == doctest::Approx(1.2).epsilon(1e-13));
  CHECK((*r100.base)(0.01) == doctest::Approx(1.0390787710787369).epsilon(1e-13));
  QpfSystem r10 = make_rescaled_arctan_system(10.0, 0.0, rot);
  CHECK((*r10.base)(0.35) == doctest::Approx(1.5229930423295617).epsilon(1e-13));

  // Image bound: from alpha = 20 on the base stays inside [-3/2, 3/2]; at
  // alpha = 10 it still overshoots.
  auto sup_base = [&rot](double alpha) {
    QpfSystem sys = make_rescaled_arctan_system(alpha, 0.0, rot);
    double m = 0;
    for (int i = 0; i <= 6000; ++i) m = std::max(m, std::abs((*sys.base)(-3 + i * 1e-3)));
    return m;
  };
  CHECK(sup_base(10.0) == doctest::Approx(1.6461669624083236).epsilon(1e-7));
  CHECK(sup_base(20.0) < 1.5);
  CHECK(sup_base(40.0) < 1.5);
  CHECK(sup_base(100.0) < 1.5);

  // System invariance for beta in [0, 3/2]: images of [-3,3] stay in
  // [-3, 3/2], so iteration never leaves the driven interval.
  for (double alpha : {20.0, 40.0, 100.0}) {
    FamilyFactory fam = make_rescaled_arctan(alpha, rot);
    for (double beta : {0.0, 0.75, 1.5}) {
      QpfSystem sys = fam(beta);
      for (int i = 0; i <= 600; ++i) {
        double x = -3 + i * 0.01;
        for (double theta : {0.0, 0.31, 0.62, 0.93}) {
          double y = fibre_apply(sys, theta, x);
          CHECK(y >= -3.0);
          CHECK(y <= 1.5);
        }
      }
    }
  }
}

TEST_CASE("conjugacy between plain and rescaled arctan") {
  ConjugacyMaps m10 = conjugacy_maps_arctan(10.0);
  CHECK(m10.sigma1 == doctest::Approx(6.7975065486636764).epsilon(1e-12));
  CHECK(m10.tau1 == doctest::Approx(1.4711276743037346).epsilon(1e-12));
  CHECK(m10.sigma == doctest::Approx(3.203679718138548).epsilon(1e-10));
  CHECK(m10.tau == doctest::Approx(2.1173917223048641).epsilon(1e-10));

  ConjugacyMaps m20 = conjugacy_maps_arctan(20.0);
  ConjugacyMaps m40 = conjugacy_maps_arctan(40.0);
  CHECK(m20.sigma == doctest::Approx(6.0533167094906968).epsilon(1e-10));
  CHECK(m40.sigma == doctest::Approx(11.191694289436754).epsilon(1e-10));
  CHECK(m40.tau == doctest::Approx(1.5978360177851104).epsilon(1e-10));
  CHECK(m10.sigma < m20.sigma);
  CHECK(m20.sigma < m40.sigma);

  // Scaling the fibre by tau intertwines the two families pointwise:
  // rescaled at (sigma, tau beta) applied to tau x equals tau times the
  // plain fibre at (alpha, beta).
  RotationSpec rot = RotationSpec::golden_mean();
  for (double alpha : {10.0, 25.0}) {
    ConjugacyMaps m = conjugacy_maps_arctan(alpha);
    QpfSystem tilde = make_rescaled_arctan_system(m.sigma, 0.0, rot);
    for (double beta : {0.0, 0.3, 0.7, 1.0}) {
      QpfSystem tsys = make_arctan_family(alpha, beta, rot);
      QpfSystem tilde_b = make_rescaled_arctan_system(m.sigma, m.tau * beta, rot);
      for (int i = 0; i <= 20; ++i) {
        double x = -2.9 + i * 0.29;
        for (double theta : {0.0, 0.17, 0.5, 0.83}) {
          double lhs = tilde_b.fibre(theta, m.tau * x);
          double rhs = m.tau * tsys.fibre(theta, x);
          CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
        }
      }
    }
    (void)tilde;
  }
}

TEST_CASE("schroedinger interval model") {
  CHECK_THROWS_AS(harper_interval_model(2.0), EBelowThreshold);
  CHECK_THROWS_AS(harper_interval_model(1.5), EBelowThreshold);

  HarperIntervalModel m = harper_interval_model(10.0);
  CHECK(m.alpha == doctest::Approx(31.622776601683793).epsilon(1e-14));
  CHECK(m.x1 == doctest::Approx(0.10102051443364380).epsilon(1e-13));
  CHECK(m.x2 == doctest::Approx(9.8989794855663562).epsilon(1e-14));
  CHECK(m.x2 - m.x1 == doctest::Approx(std::sqrt(96.0)).epsilon(1e-14));
  CHECK(m.s == doctest::Approx(0.13836104907173961).epsilon(1e-13));
  CHECK(m.s >= 1.0 / 10);
  CHECK(m.s <= 2.0 / 10);
  CHECK(m.beta_of_lambda(4.0) == doctest::Approx(4 * m.s).epsilon(1e-15));
  CHECK(m.lambda_of_beta(m.beta_of_lambda(4.0)) == doctest::Approx(4.0).epsilon(1e-13));

  double xp = 1 + 2 / std::sqrt(m.alpha);
  CHECK(m.base.fixed_points[2] == doctest::Approx(xp).epsilon(1e-14));
  CHECK(std::abs(m.base(0.0)) <= 1e-13);
  CHECK(std::abs(m.base(xp) - xp) <= 1e-12);
  CHECK(std::abs(m.base(-1.0) + 1.0) <= 1e-12);
  CHECK(m.base(0.5) == doctest::Approx(1.3323868337745836).epsilon(1e-13));
  CHECK(m.base.derivative(0.0) == doctest::Approx(97.989794855663562).epsilon(1e-12));

  // The base is monotone and continuous across the junction at 0.
  double prev = m.base(-3.0);
  for (int i = 1; i <= 1200; ++i) {
    double cur = m.base(-3.0 + i * 5e-3);
    CHECK(cur > prev);
    prev = cur;
  }

  // Strict-mode derivative bounds hold once the energy is large.
  RotationSpec rot = RotationSpec::golden_mean();
  HypothesisReport rep =
      check_hypotheses(make_harper_interval_system(1e4, 1.0, make_peak_potential(), rot));
  for (const char* name :
       {"derivative-global-bounds", "expansion-near-zero", "contraction-off-core",
        "maps-over", "fixed-points", "codomain-bound"}) {
    INFO(name, ": ", rep.find(name)->witness);
    CHECK(rep.find(name)->holds);
  }
  CHECK(rep.all_hold());
}

TEST_CASE("projective and riccati forms") {
  RotationSpec rot = RotationSpec::golden_mean();
  ForcingFunction v = make_cos_potential();
  QpfSystem harper = make_harper(4.4, 4.0, v, rot);
  QpfSystem riccati = make_riccati(4.4, 4.0, v, rot);

  CHECK(fibre_apply(harper, 0.0, 0.3) ==
        doctest::Approx(-0.95383186738019811).epsilon(1e-13));
  CHECK(fibre_apply(riccati, 0.0, 2.0) ==
        doctest::Approx(6.8494755123132796).epsilon(1e-13));
  CHECK(fibre_derivative(riccati, 0.37, 2.0) == doctest::Approx(0.25).epsilon(1e-15));

  // The projective image y satisfies tan(-y) (tan(-x) - e + lambda V) = -1,
  // which is the x -> tan(-x) change of variable behind the Riccati form.
  UniformRng rng(7u);
  int tested = 0;
  while (tested < 100) {
    double theta = rng.next();
    double x = -kPi / 2 + kPi * rng.next();
    double w = std::tan(-x) - 4.4 + 4.0 * v(theta);
    if (std::abs(w) < 0.05 || std::abs(std::cos(x)) < 0.05) continue;
    ++tested;
    double y = fibre_apply(harper, theta, x);
    CHECK(std::abs(std::tan(-y) * w + 1.0) <= 1e-9 * std::max(1.0, std::abs(w)));
  }

  // Projective values live in (-pi/2, pi/2] and the map accepts any
  // representative of the fibre circle.
  for (int i = 0; i < 50; ++i) {
    double x = -8 + 0.32 * i;
    double y = fibre_apply(harper, 0.13, x);
    CHECK(y > -kPi / 2);
    CHECK(y <= kPi / 2);
  }

  // Pole handling: a zero fibre value maps through infinity and lands on
  // e - lambda V one step later.
  double inf = fibre_apply(riccati, 0.2, 0.0);
  CHECK(std::isinf(inf));
  double back = fibre_apply(riccati, 0.2 + rot.omega, inf);
  CHECK(back == doctest::Approx(4.4 - 4.0 * v.evaluator(wrap_unit(0.2 + 2 * rot.omega)))
                    .epsilon(1e-12));

  // Unforced case: the fibre map is autonomous Moebius and its attracting
  // fixed point is the larger root of x^2 - e x + 1.
  QpfSystem free = make_riccati(10.0, 0.0, v, rot);
  double x2 = (10 + std::sqrt(96.0)) / 2;
  CHECK(fibre_apply(free, 0.4, x2) == doctest::Approx(x2).epsilon(1e-12));
  double x = 5.0;
  for (int i = 0; i < 60; ++i) x = fibre_apply(free, 0.0, x);
  CHECK(x == doctest::Approx(x2).epsilon(1e-12));
}

TEST_CASE("pinched and arnold maps") {
  RotationSpec rot = RotationSpec::golden_mean();
  QpfSystem pinched = make_pinched(10.0, rot);

  for (double x : {-2.0, -0.3, 0.1, 2.9})
    CHECK(fibre_apply(pinched, 0.0, x) == 0.0);
  CHECK(fibre_apply(pinched, 0.25, 0.0) == 0.0);  // zero line is invariant
  CHECK(fibre_derivative(pinched, 0.25, 0.0) ==
        doctest::Approx(7.0710678118654752).epsilon(1e-14));

  QpfSystem arnold = make_arnold(0.3373547962, 0.99, 0.6, rot);
  for (int i = 0; i < 40; ++i) {
    double theta = 0.025 * i;
    double y = fibre_apply(arnold, theta, 3.7);  // wraps the input first
    CHECK(y >= 0.0);
    CHECK(y < 1.0);
    CHECK(fibre_derivative(arnold, theta, 0.025 * i) > 0.0);  // alpha < 1
  }

  QpfSystem peak = make_arnold(0.0, 0.99, -0.45, rot, ArnoldForcing::kPeak);
  // At theta = 1/2 the peak forcing contributes its full weight beta.
  double base_only = make_arnold(0.0, 0.99, 0.0, rot, ArnoldForcing::kPeak).fibre(0.5, 0.2);
  CHECK(peak.fibre(0.5, 0.2) == doctest::Approx(base_only + 0.45).epsilon(1e-14));
  // ... and none at distance 1/10 or more from the peak.
  CHECK(peak.fibre(0.25, 0.2) == doctest::Approx(base_only).epsilon(1e-14));
  CHECK(peak.forcing->evaluator(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(peak.forcing->evaluator(0.65) == 0.0);
}

TEST_CASE("symmetric family equivariance") {
  RotationSpec rot = RotationSpec::golden_mean();
  QpfSystem sys = make_symmetric(10.0, 1.645, rot);

  CHECK(sys.base->fixed_points[2] == doctest::Approx(1.5044233118570537).epsilon(1e-12));
  // The state box expands with the coupling so boundary orbits stay inside.
  CHECK(sys.base->domain.lo == doctest::Approx(-(kPi / 2 + 1.645)).epsilon(1e-15));
  CHECK(make_symmetric(10.0, 0.0, rot).base->domain.hi ==
        doctest::Approx(kPi).epsilon(1e-15));
  CHECK(make_symmetric(32.0, 0.0, rot).base->fixed_points[2] ==
        doctest::Approx(1.5506461654538710).epsilon(1e-12));
  CHECK_THROWS_AS(make_symmetric(0.9, 0.0, rot), ConfigError);

  CHECK(sys.forcing->evaluator(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sys.forcing->evaluator(0.5) == doctest::Approx(-1.0).epsilon(1e-15));

  // -T_theta(x) = T_{theta+1/2}(-x)
  UniformRng rng(99u);
  for (int i = 0; i < 1000; ++i) {
    double theta = rng.next();
    double x = -3 + 6 * rng.next();
    double lhs = -sys.fibre(theta, x);
    double rhs = sys.fibre(wrap_unit(theta + 0.5), -x);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("hypothesis report") {
  RotationSpec rot = RotationSpec::golden_mean();

  // alpha = 10 is far below the strict regime: sqrt(alpha) < 4/gamma.
  HypothesisReport r10 = check_hypotheses(make_rescaled_arctan_system(10.0, 1.0, rot));
  CHECK_FALSE(r10.find("alpha-vs-gamma")->holds);
  CHECK_FALSE(r10.find("codomain-bound")->holds);
  CHECK(r10.find("maps-over")->holds);
  CHECK(r10.find("forcing-range")->holds);
  CHECK(r10.find("forcing-lipschitz")->holds);
  CHECK(r10.find("forcing-peak-decay")->holds);
  CHECK(r10.find("fixed-points")->holds);
  CHECK_FALSE(r10.all_hold());
  CHECK_FALSE(r10.find("codomain-bound")->witness.empty());

  // At alpha = 1e4 only the expansion band is still too slow; by 1e7 every
  // condition on the list holds.
  HypothesisReport r4 = check_hypotheses(make_rescaled_arctan_system(1e4, 1.0, rot));
  CHECK(r4.find("alpha-vs-gamma")->holds);
  CHECK(r4.find("codomain-bound")->holds);
  CHECK(r4.find("derivative-global-bounds")->holds);
  CHECK(r4.find("contraction-off-core")->holds);
  CHECK(r4.find("maps-over")->holds);
  CHECK_FALSE(r4.find("expansion-near-zero")->holds);
  CHECK_FALSE(r4.all_hold());

  HypothesisReport r7 = check_hypotheses(make_rescaled_arctan_system(1e7, 1.0, rot));
  for (const auto& item : r7.items) {
    INFO(item.name, ": ", item.witness);
    CHECK(item.holds);
  }
  CHECK(r7.all_hold());

  // The error-propagation constant of the sine forcing is K = 3 pi/2 + 2,
  // so sqrt(alpha) >= 2K turns over between alpha = 180 and 181.
  double k2 = 2 * (3 * kPi / 2 + 2);
  CHECK(k2 == doctest::Approx(13.424777960769380).epsilon(1e-14));
  HypothesisReport lo = check_hypotheses(make_rescaled_arctan_system(180.0, 1.0, rot));
  HypothesisReport hi = check_hypotheses(make_rescaled_arctan_system(181.0, 1.0, rot));
  CHECK_FALSE(lo.find("alpha-vs-errorterm")->holds);
  CHECK(hi.find("alpha-vs-errorterm")->holds);

  CHECK_THROWS_AS(check_hypotheses(make_pinched(10.0, rot)), ConfigError);
}

TEST_CASE("config construction") {
  RotationSpec rot = RotationSpec::golden_mean();

  QpfSystem a = make_system_from_config("rescaled-arctan",
                                        {{"alpha", 100.0}, {"beta", 1.0}}, rot);
  QpfSystem b = make_rescaled_arctan_system(100.0, 1.0, rot);
  for (double x : {-1.0, 0.0, 0.5})
    CHECK(a.fibre(0.2, x) == doctest::Approx(b.fibre(0.2, x)).epsilon(1e-15));

  // Coupling of the symmetric family may be spelled tau.
  QpfSystem s1 = make_system_from_config("symmetric", {{"alpha", 10.0}, {"tau", 1.645}}, rot);
  QpfSystem s2 = make_symmetric(10.0, 1.645, rot);
  CHECK(s1.fibre(0.3, 0.4) == doctest::Approx(s2.fibre(0.3, 0.4)).epsilon(1e-15));

  QpfSystem t = make_system_from_config("tanh-sine",
                                        {{"alpha", 5.0}, {"beta", 1.2015}}, rot);
  CHECK(t.fibre(0.2, 0.1) == doctest::Approx(std::tanh(0.5) +
                                             1.2015 * std::sin(2 * kPi * 0.2))
                                 .epsilon(1e-14));
  CHECK(t.base->fixed_points[2] == doctest::Approx(0.99990912171523255).epsilon(1e-12));

  CHECK_THROWS_AS(make_system_from_config("unknown", {}, rot), ConfigError);
  CHECK_THROWS_AS(make_system_from_config("arctan", {{"alpha", 10.0}}, rot), ConfigError);
  try {
    make_system_from_config("nope", {}, rot);
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("unknown family") != std::string::npos);
  }
}

TEST_CASE("domain handling") {
  RotationSpec rot = RotationSpec::golden_mean();
  QpfSystem plain = make_arctan_family(10.0, 0.7, rot);
  CHECK_THROWS_AS(fibre_apply(plain, 0.2, 5.0), DomainExit);

  // An image below -3 is rejected too: force hard enough and the origin
  // fibre leaves the driven interval.
  QpfSystem hard = make_arctan_family(10.0, 4.0, rot);
  CHECK_THROWS_AS(fibre_apply(hard, 0.0, 0.0), DomainExit);

  // Circle and projective fibres wrap instead.
  QpfSystem arnold = make_arnold(0.2, 0.99, 0.6, rot);
  CHECK_NOTHROW(fibre_apply(arnold, 0.1, 17.3));
  QpfSystem harper = make_harper(4.4, 4.0, make_cos_potential(), rot);
  CHECK_NOTHROW(fibre_apply(harper, 0.1, 9.0));
}

TEST_CASE("multiprecision kernels agree with the double instantiation") {
  // The templated kernels are the single source of the fibre formulas; spot
  // check that double instantiation reproduces the catalog values.
  auto k = ArctanRescaledKernel<double>::make(100.0);
  CHECK(k.value(1.2) == doctest::Approx(1.2).epsilon(1e-13));
  CHECK(k.c == doctest::Approx(0.7648178845233392).epsilon(1e-13));
  auto h = HarperIntervalKernel<double>::make(10.0);
  CHECK(h.value(0.5) == doctest::Approx(1.3323868337745836).epsilon(1e-13));
  CHECK(golden_omega<double>() == doctest::Approx(0.61803398874989485).epsilon(1e-15));
  CHECK(pi_const<double>() == doctest::Approx(kPi).epsilon(1e-16));
}
