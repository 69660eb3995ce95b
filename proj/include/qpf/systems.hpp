#pragma once

// Catalog of quasiperiodically forced one-dimensional map families.  All
// systems share the skew-product form (theta, x) -> (theta + omega, f(theta, x));
// the interval families used by the bifurcation machinery additionally expose
// the separable structure f(theta, x) = F(x) - beta g(theta).
//
// Systems are immutable after construction and safe to share across threads;
// evaluators must be pure.

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qpf/circle.hpp"

namespace qpf {

struct Interval {
  double lo = 0;
  double hi = 0;

  bool contains(double x, double tol = 0) const { return x >= lo - tol && x <= hi + tol; }
  double length() const { return hi - lo; }
};

// Forcing profile g together with the regularity data the hypothesis checks
// need.  peak_l2 == 0 means no linear-decay certificate at the peak (smooth
// forcings such as sine have none).
struct ForcingFunction {
  std::function<double(double)> evaluator;
  double lipschitz_l1 = 0;
  double peak_l2 = 0;
  std::vector<double> peak_location;
  Interval range{0, 1};
  bool symmetric = false;  // range [-1,1] with g(theta + 1/2) = -g(theta)

  double operator()(double theta) const { return evaluator(theta); }
};

// Fibre base F of a separable family.  The triple of fixed points is
// x_- < 0 < x_+; domain is the driven interval [-2C, 2C] and codomain the
// target band [-C, C] (the hypothesis check reports where F escapes it).
struct FibreBase {
  std::function<double(double)> evaluator;
  std::function<double(double)> derivative;
  std::array<double, 3> fixed_points{0, 0, 0};
  Interval domain{-3.0, 3.0};
  Interval codomain{-1.5, 1.5};
  bool negative_schwarzian = false;

  double operator()(double x) const { return evaluator(x); }
};

enum class FibreGeometry {
  kInterval,    // x in domain, DomainExit when an image leaves it
  kCircle,      // x mod 1
  kProjective,  // x in (-pi/2, pi/2], wrapped
  kExtended,    // extended reals; poles follow IEEE infinity arithmetic
};

struct QpfSystem {
  std::string family;
  FibreGeometry geometry = FibreGeometry::kInterval;
  std::function<double(double, double)> fibre;     // (theta, x) -> next x
  std::function<double(double, double)> fibre_dx;  // analytic d(next x)/dx
  std::optional<FibreBase> base;                   // separable families only
  std::optional<ForcingFunction> forcing;
  double beta = 0;
  RotationSpec spec;
  std::optional<double> alpha;  // expansion/contraction scale, where defined
  std::optional<double> gamma;  // contraction core radius, where defined
};

// One fibre step.  Interval geometry checks the input and the image against
// the domain and throws DomainExit; circle and projective geometry wrap;
// extended geometry passes infinities through.
double fibre_apply(const QpfSystem& sys, double theta, double x);

double fibre_derivative(const QpfSystem& sys, double theta, double x);

// Full skew-product step (theta + omega mod 1, fibre image).
std::pair<double, double> step(const QpfSystem& sys, double theta, double x);

using FamilyFactory = std::function<QpfSystem(double beta)>;

// (theta, x) -> (theta + omega, arctan(a x)/arctan(a) - beta (1 - sin pi theta)).
QpfSystem make_arctan_family(double alpha, double beta, const RotationSpec& spec);

// Rescaled variant c(a) arctan(a^(4/3) x) with fixed points 0, +-(1 + 2/sqrt(a)),
// same forcing.  Returns the family as a function of beta; gamma defaults to 1/16.
FamilyFactory make_rescaled_arctan(double alpha, const RotationSpec& spec,
                                   double gamma = 1.0 / 16);
QpfSystem make_rescaled_arctan_system(double alpha, double beta, const RotationSpec& spec,
                                      double gamma = 1.0 / 16);

// Parameter change linking the plain and the rescaled arctan families:
// scaling the fibre by tau maps T_{alpha,beta} onto the rescaled system at
// (sigma, tau beta).  sigma2^{-1} is evaluated by bisection.
struct ConjugacyMaps {
  double sigma1, tau1;  // plain -> unnormalised arctan(a x) family
  double sigma, tau;    // plain -> rescaled family
};
ConjugacyMaps conjugacy_maps_arctan(double alpha);

// Potentials for the Schroedinger forms.
ForcingFunction make_cos_potential();
ForcingFunction make_peak_potential(double peak = 0.0, double slope = 10.0);

// Projective Schroedinger system: x in (-pi/2, pi/2],
// (theta, x) -> (theta + omega, arctan(1/(tan(-x) - e + lambda V(theta)))).
QpfSystem make_harper(double e, double lambda, const ForcingFunction& v,
                      const RotationSpec& spec);

// Riccati form on the extended reals:
// (theta, x) -> (theta + omega, -1/x + e - lambda V(theta + omega)).
// A pole maps to infinity and from there to e - lambda V on the next step.
QpfSystem make_riccati(double e, double lambda, const ForcingFunction& v,
                       const RotationSpec& spec);

// Rescaled interval model of the Riccati map: F1(y) = -1/y + e conjugated by
// h(y) = (y - x1) s so that the expanding and the contracting fixed point
// land on 0 and 1 + 2/sqrt(alpha), alpha = e^(3/2).  The potential enters as
// g(theta) = V(theta + omega) and the coupling becomes beta = s lambda.
struct HarperIntervalModel {
  double e = 0;
  double alpha = 0;
  double x1 = 0, x2 = 0;  // fixed points of F1, x1 expanding
  double s = 0;
  FibreBase base;

  double beta_of_lambda(double lambda) const { return s * lambda; }
  double lambda_of_beta(double beta) const { return beta / s; }
};
HarperIntervalModel harper_interval_model(double e);
QpfSystem make_harper_interval_system(double e, double lambda, const ForcingFunction& v,
                                      const RotationSpec& spec);
FamilyFactory make_harper_interval_family(double e, const ForcingFunction& v,
                                          const RotationSpec& spec);

// (theta, x) -> (theta + omega, tanh(a x) sin(pi theta)); the zero line is
// invariant and the fibre over theta = 0 collapses to it.
QpfSystem make_pinched(double alpha, const RotationSpec& spec);

enum class ArnoldForcing { kSine, kPeak };

// Forced circle map x + tau + a/(2 pi) sin(2 pi x) + beta sin(2 pi theta)
// (mod 1); the kPeak variant forces by -beta max{0, 1 - 10 d(theta, 1/2)}
// instead of the sine term.
QpfSystem make_arnold(double tau, double alpha, double beta, const RotationSpec& spec,
                      ArnoldForcing variant = ArnoldForcing::kSine);

// (theta, x) -> (theta + omega, arctan(a x) - beta (1 - 4 d(theta, 0))),
// equivariant under (theta, x) -> (theta + 1/2, -x).
QpfSystem make_symmetric(double alpha, double beta, const RotationSpec& spec);

// Assemble a separable interval system from caller-supplied parts, so new
// families need no catalog entry.
QpfSystem make_custom_interval(FibreBase base, ForcingFunction forcing, double beta,
                               const RotationSpec& spec, std::string name = "custom");

struct ConditionCheck {
  std::string name;
  bool holds = false;
  std::string witness;  // first violating point, or the decisive numbers
};

struct HypothesisReport {
  std::vector<ConditionCheck> items;

  bool all_hold() const;
  const ConditionCheck* find(const std::string& name) const;
};

// Evaluate the standing assumptions of the bifurcation theory on a separable
// system: parameter inequalities, fixed points, derivative bounds on a grid,
// and the forcing peak profile.  Needs base, forcing and alpha; gamma
// defaults to 1/16.  grid is the number of sample cells per scan.
HypothesisReport check_hypotheses(const QpfSystem& sys, int grid = 10000);

// Config-file entry point: family name plus named numeric parameters.
// Known names: arctan, rescaled-arctan, symmetric, pinched, arnold,
// arnold-peak, harper, harper-peak, riccati, riccati-peak, harper-interval,
// tanh-sine.
QpfSystem make_system_from_config(const std::string& family,
                                  const std::map<std::string, double>& params,
                                  const RotationSpec& spec);

}  // namespace qpf
