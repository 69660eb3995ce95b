#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qpf/graphs.hpp"
#include "qpf/systems.hpp"
#include "qpf/timesets.hpp"

namespace qpf {

// Bracket produced by a parameter bisection: the defining property holds at
// one end and fails at the other, so the transition lies inside. Solvers
// that run in extended precision resolve the endpoints far below one double
// ulp; lo_full/hi_full then carry the decimal expansions and lo == hi is
// possible after rounding.
struct BetaBracket {
  double lo = 0;
  double hi = 0;
  std::string target;  // what the bisection solved for, with its settings
  double width = 0;
  std::string lo_full;  // exact decimal endpoints; empty for double solvers
  std::string hi_full;
};

// Escape test for the trapping-region predicate; (theta, x) -> escaped.
// An empty function means the default test x <= 0, the entry condition of
// the trapping region that feeds the lower attractor.
using EscapeTest = std::function<bool(double, double)>;

// True when the orbit of the upper boundary line over each of g midpoint
// fibres survives n_max steps without triggering the escape test. Interval
// geometry only.
bool upper_line_survives(const QpfSystem& sys, long long n_max, int g,
                         const EscapeTest& escape = {});

// Bisect beta over the survival predicate: it holds at beta = 0 and fails at
// some larger beta found by doubling, so the critical parameter is pinned to
// a bracket of width <= tol. n_max and g are recorded in the target string.
BetaBracket critical_beta(const FamilyFactory& family, const EscapeTest& escape,
                          double tol, long long n_max = 20000, int g = 2048);

// The two forced families the parameter machinery handles: the rescaled
// arctan fibre with the one-sided forcing 1 - sin(pi theta), and the odd
// arctan fibre with the symmetric tent forcing 1 - 4 d(theta, 0). The
// solvers need closed-form kernels because they re-run the iteration in
// extended precision, where the double-based system callables cannot go.
struct InductionFamily {
  enum class Kind { kOneSided, kSymmetric };

  Kind kind = Kind::kOneSided;
  double alpha = 100.0;
  double gamma = 1.0 / 32;
  RotationSpec rot = RotationSpec::golden_mean();

  bool symmetric() const { return kind == Kind::kSymmetric; }
  // Lipschitz constant of the forcing and its decay rate at the peak.
  double l1() const;
  double l2() const;
  // K = 3 L1/L2 + 2, the error-term constant of the comparison lemmas.
  double error_constant() const;

  // Double-precision view of the same family, for the graph routines.
  QpfSystem system(double beta) const;
  FamilyFactory factory() const;
};

// Working precision for the xi iteration. An orbit pinned near the repeller
// for k steps amplifies parameter and rounding errors by sup F'^k, so the
// digits must grow linearly with the horizon; kAuto picks the smallest tier
// that keeps the full trajectory meaningful.
enum class PrecisionTier { kAuto, kDouble, kWide, kDeep };

// Decimal digits carried by a tier (15 / 140 / 700).
int tier_digits(PrecisionTier tier);

// Digits needed so that rounding amplified over `steps` iteration steps
// stays below the answer, and the smallest sufficient tier. Throws
// ConfigError when even the deep tier is too short.
int digits_needed(const InductionFamily& fam, long long steps);
PrecisionTier tier_for(const InductionFamily& fam, long long steps);

// Forward orbit of (omega_{-l}, 3) with the theta coordinate suppressed:
// xi_n = value after n + l steps, living on fibre omega_n. Angles are
// recomputed from the integer offset each step, never accumulated.
struct XiRequest {
  InductionFamily family;
  long long l = 0;   // >= 0
  long long n = 0;   // >= -l

  void validate() const;  // throws ConfigError
};

// xi_n(beta, l), the full trajectory xi_{-l}..xi_n (size n + l + 1), and
// the derivative d xi_n / d beta propagated alongside the orbit. The
// derivative is returned as sign * 10^log10; near critical parameters its
// magnitude overflows double.
double xi(const XiRequest& req, double beta, PrecisionTier tier = PrecisionTier::kAuto);
std::vector<double> xi_trajectory(const XiRequest& req, double beta,
                                  PrecisionTier tier = PrecisionTier::kAuto);
struct XiDerivative {
  int sign = 0;        // -1, 0, +1
  double log10_mag = 0;  // log10 |d xi_n / d beta|; meaningless when sign == 0
  double value() const;  // sign * 10^log10_mag, +-inf on overflow
};
XiDerivative xi_beta_derivative(const XiRequest& req, double beta,
                                PrecisionTier tier = PrecisionTier::kAuto);

// Solve xi_n(beta, l) = target by bisection over [lo, hi]. One-sided
// families only: there beta -> xi_n is strictly decreasing, so the root is
// unique; symmetric families throw NotMonotone and route through
// solve_beta_symmetric. TargetUnreachable when the target is not enclosed.
// The bracket is narrowed to width <= 2^-60 (hi - lo), or to
// 10^-resolve_digits when that is finer; pass resolve_digits high enough
// that the trajectory at the returned parameter still hugs the repelling
// set over the horizon of interest (digits_needed gives the scale).
BetaBracket solve_beta(const XiRequest& req, double target, double lo, double hi,
                       int resolve_digits = 0,
                       PrecisionTier tier = PrecisionTier::kAuto);

// Symmetric min/max construction on a parent interval: beta_minus is the
// smallest root of xi_n = -1/alpha in the parent, beta_plus the largest
// root of xi_n = +1/alpha below beta_minus. The returned bracket is the
// interval I^q_n = [beta_plus, beta_minus], on which xi_n decreases from
// +1/alpha to -1/alpha. The parent is scanned at scan_steps points to
// locate the crossings, then each endpoint is bisected. NoCrossing when a
// target is never crossed.
BetaBracket solve_beta_symmetric(const XiRequest& req, double parent_lo,
                                 double parent_hi, long long scan_steps = 1 << 20,
                                 PrecisionTier tier = PrecisionTier::kAuto);

// Sink-source candidate at level p: beta_p solves xi_{l+_p + 1}(beta, l-_p)
// = 1/alpha, the candidate point is (omega, x_p) with x_p = xi_1(beta_p,
// l-_p), and the profile carries the finite-time exponents along the solved
// trajectory: profile.forward[j-1] = lambda+(j) for j in [1, l+_p] and
// profile.backward[j-1] = lambda-(j) for j in [1, l-_p] (the two vectors
// have different lengths; profile.horizons runs to the longer one). The
// strict floor is (7/24) log alpha; empirical mode only asks for a positive
// sign.
struct SinkSourceCandidate {
  int p = 0;
  double beta_p = 0;
  std::string beta_p_full;
  double theta_p = 0;
  double x_p = 0;
  long long l_minus = 0;
  long long l_plus = 0;
  ExponentProfile profile;
  double floor_strict = 0;
  double min_forward = 0;   // min over tested horizons; 0 when none
  double min_backward = 0;
  bool strict_pass = false;
  bool empirical_pass = false;
};

// Candidates for p = 0..p_max, each solved to the precision its horizon
// demands. Strict mode refuses (ConfigError, message lists the failures)
// unless check_hypotheses on the family and the scalar parameter predicates
// of the table all hold; empirical mode runs regardless. SolveFailed
// bubbles from the bisection. The table must carry levels up to p_max.
std::vector<SinkSourceCandidate> sink_source_search(const InductionFamily& fam,
                                                    const TimeSetTable& table,
                                                    int p_max, bool strict = false);

// One sampled parameter in an induction check. Only samples whose xi_n
// lands in B_{1/alpha}(0) test anything; the rest pass vacuously.
struct InductionCheckRow {
  double beta = 0;
  double xi_n = 0;
  bool precondition = false;  // |xi_n| <= 1/alpha
  bool window_ok = true;      // beta in [1 + 1/sqrt a, 1 + 3/sqrt a]
  bool past_ok = true;        // xi_j >= gamma for j in [-l-_q, 0] off Omega_inf
  bool regular_ok = true;     // |xi_j| <= 1/alpha for j in R_n
  long long witness = 0;      // first failing j, when a check fails
};

struct InductionReport {
  int q = 0;
  long long n = 0;
  long long l_minus = 0;
  std::vector<InductionCheckRow> rows;
  int preconditioned = 0;  // rows with the precondition satisfied
  int failures = 0;        // rows with any check failed
  // Derivative of xi_n at the solved beta+_{q,n}: finite-difference value
  // against the bound -alpha^{(n-1)/4}, both as log10 magnitudes of
  // negative quantities.
  double slope_log10 = 0;
  double slope_bound_log10 = 0;
  bool slope_ok = false;
  bool derivative_consistent = false;  // finite difference vs propagated
  bool pass = false;                   // no failures and slope_ok
};

// Check induction statements I and II over the sampled parameters: for each
// beta with xi_n(beta, l-_q) in B_{1/alpha}(0), the past [-l-_q, 0] off
// Omega_inf stays >= gamma, the regular times R_n stay in B_{1/alpha}(0),
// and beta lies in the admissible window. Violations are findings, not
// errors. n must be admissible and in [l+_q + 1, nu(q+1)] where the table
// can see nu(q+1).
InductionReport verify_induction(const InductionFamily& fam, const TimeSetTable& table,
                                 int q, long long n, const std::vector<double>& betas);

// Same checks for an arbitrary double-precision family (used to exhibit
// failures on systems that break the contraction hypotheses). The factory's
// system supplies the forcing and fibre; alpha and gamma are read from it.
InductionReport verify_induction(const FamilyFactory& family, const TimeSetTable& table,
                                 int q, long long n, const std::vector<double>& betas);

// Two finite orbits under slightly different parameters and starting
// fibres, compared against the bounds of the contraction/throw-out lemmas.
// x1[i], x2[i] hold the orbit values x^1_{i+1}, x^2_{i+1}; both must have
// equal length n + 1 (so that x^{1,2}_{n+1} is the last entry).
struct ComparisonInput {
  InductionFamily family;
  std::vector<double> x1, x2;
  double beta1 = 0, beta2 = 0;
  double theta1 = 0, theta2 = 0;
  double eps = 0;
  int q = 0;            // throw-out scale: eps in [alpha^-(q+1), alpha^-q)
  int offsets = 1000;   // error-term sup is scanned over |n| <= offsets
};

struct LemmaBound {
  std::string name;
  bool hypotheses = false;  // all hypotheses hold on the given data
  bool conclusion = false;  // conclusion verified (meaningful when hypotheses)
  double lhs = 0, rhs = 0;  // the decisive comparison
  std::string note;         // first hypothesis that failed, when any
};

struct ComparisonReport {
  double err = 0;        // sup_n |beta1 g(theta1 + omega_n) - beta2 g(theta2 + omega_n)|
  double err_bound = 0;  // K eps
  bool err_ok = false;
  LemmaBound contraction;  // |x1_{n+1} - x2_{n+1}| <= eps (6 + K sum alpha^{-j/4})
  LemmaBound throwout_a;   // x2_1 >= 2/alpha propagates to x2_{n+1} >= 2/alpha
  LemmaBound throwout_b;   // x2_1 >= x1_1 + eps/2 forces x2_{n+1} >= 2/alpha
};

ComparisonReport comparison_oracles(const ComparisonInput& in);

// Saddle-node classification at the bracket midpoint plus the scaling law
// of the graph gap. classification is "non-smooth" when the upper graph
// contracts and the repeller expands beyond eps_cls, "smooth" when both
// exponents vanish within eps_cls; anything else throws Inconclusive.
// points holds (beta_c - beta, gap) for each offset; the fit is log-log.
struct ScalingReport {
  std::string classification;
  double lambda_upper = 0;
  double lambda_middle = 0;
  double exponent = 0;
  double r2 = 0;
  std::vector<std::pair<double, double>> points;
};

ScalingReport classify_and_scale(const FamilyFactory& family, const BetaBracket& beta_c,
                                 const std::vector<double>& offsets, double eps_cls = 0.05,
                                 int g = 512, long long n_iter = 4000, int n_test = 400);

// Max over 0 <= k <= n + l of |zeta_k + xi_k| where zeta is the orbit of
// (omega_{-l} + 1/2, -3): identically zero for the symmetric family, so the
// result measures pure arithmetic error. Runs in the tier the horizon
// demands; one-sided families throw ConfigError.
double symmetric_zeta_check(const InductionFamily& fam, double beta, long long l,
                            long long n, PrecisionTier tier = PrecisionTier::kAuto);

// Same comparison through an arbitrary system's double arithmetic, for
// forcings that break the symmetry: the gap then measures the asymmetry
// itself. The system must use interval geometry.
double symmetric_zeta_check(const QpfSystem& sys, long long l, long long n);

}  // namespace qpf
