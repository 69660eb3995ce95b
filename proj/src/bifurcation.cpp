#include "qpf/bifurcation.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qpf/circle.hpp"
#include "qpf/errors.hpp"
#include "qpf/graphs.hpp"
#include "qpf/kernel.hpp"

namespace qpf {

namespace {

Interval state_box(const QpfSystem& sys) {
  if (sys.geometry != FibreGeometry::kInterval)
    throw ConfigError("escape predicate needs an interval fibre");
  return sys.base ? sys.base->domain : Interval{-3.0, 3.0};
}

bool default_escape(double, double x) { return x <= 0; }

}  // namespace

bool upper_line_survives(const QpfSystem& sys, long long n_max, int g,
                         const EscapeTest& escape) {
  if (n_max < 1) throw ConfigError("survival predicate needs n_max >= 1");
  const EscapeTest& esc = escape ? escape : EscapeTest(default_escape);
  const Interval box = state_box(sys);
  const double omega = sys.spec.omega;
  std::vector<double> grid = midpoint_grid(g);

  std::atomic<bool> escaped{false};
  std::atomic<bool> failed{false};
  std::exception_ptr error;

#pragma omp parallel for schedule(static)
  for (int k = 0; k < g; ++k) {
    if (escaped.load(std::memory_order_relaxed) ||
        failed.load(std::memory_order_relaxed))
      continue;
    try {
      const double theta = grid[k];
      double x = box.hi;
      for (long long i = 0; i < n_max; ++i) {
        // Leaving the state box counts as not surviving: at probe couplings
        // far past the bifurcation one step can overshoot the box before the
        // escape test ever sees the orbit at x <= 0.
        try {
          x = fibre_apply(sys, wrap_unit(theta + static_cast<double>(i) * omega), x);
        } catch (const DomainExit&) {
          escaped.store(true, std::memory_order_relaxed);
          break;
        }
        if (esc(wrap_unit(theta + static_cast<double>(i + 1) * omega), x)) {
          escaped.store(true, std::memory_order_relaxed);
          break;
        }
      }
    } catch (...) {
#pragma omp critical
      {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  }
  if (failed) std::rethrow_exception(error);
  return !escaped.load();
}

BetaBracket critical_beta(const FamilyFactory& family, const EscapeTest& escape,
                          double tol, long long n_max, int g) {
  if (!(tol > 0)) throw ConfigError("critical beta bisection needs tol > 0");
  auto survives = [&](double beta) {
    return upper_line_survives(family(beta), n_max, g, escape);
  };

  double lo = 0;
  if (!survives(lo))
    throw SolveFailed("survival predicate already fails at beta = 0");
  double hi = 1;
  while (survives(hi)) {
    lo = hi;
    hi *= 2;
    if (hi > 64) throw SolveFailed("survival predicate still holds at beta = 64");
  }

  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    (survives(mid) ? lo : hi) = mid;
  }

  BetaBracket out;
  out.lo = lo;
  out.hi = hi;
  out.width = hi - lo;
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "critical beta, escape bisection (n_max=%lld, grid=%d)",
                n_max, g);
  out.target = buf;
  return out;
}

// ---------------------------------------------------------------------------
// Named families and precision tiers

double InductionFamily::l1() const {
  const QpfSystem sys = system(1.0);
  if (!sys.forcing) throw ConfigError("family carries no forcing");
  return sys.forcing->lipschitz_l1;
}

double InductionFamily::l2() const {
  const QpfSystem sys = system(1.0);
  if (!sys.forcing) throw ConfigError("family carries no forcing");
  return sys.forcing->peak_l2;
}

double InductionFamily::error_constant() const { return 3 * l1() / l2() + 2; }

QpfSystem InductionFamily::system(double beta) const {
  return kind == Kind::kSymmetric
             ? make_symmetric(alpha, beta, rot)
             : make_rescaled_arctan_system(alpha, beta, rot, gamma);
}

FamilyFactory InductionFamily::factory() const {
  const InductionFamily fam = *this;
  return [fam](double beta) { return fam.system(beta); };
}

void XiRequest::validate() const {
  if (!(family.alpha > 1)) throw ConfigError("family needs alpha > 1");
  if (!(family.gamma > 0)) throw ConfigError("family needs gamma > 0");
  if (l < 0) throw ConfigError("xi needs l >= 0");
  if (n < -l) throw ConfigError("xi needs n >= -l");
}

namespace {

namespace mp = boost::multiprecision;
using Wide = mp::number<mp::mpfr_float_backend<140>, mp::et_off>;
using Deep = mp::number<mp::mpfr_float_backend<700>, mp::et_off>;

constexpr int kDoubleDigits = 15;
constexpr int kWideDigits = 140;
constexpr int kDeepDigits = 700;

// log10 of the steepest fibre slope. An orbit pinned near the repelling
// fixed point multiplies parameter and rounding perturbations by up to this
// factor every step, so required digits grow linearly at this rate.
double amplification_rate(const InductionFamily& fam) {
  if (fam.kind == InductionFamily::Kind::kSymmetric) return std::log10(fam.alpha);
  const auto kernel = ArctanRescaledKernel<double>::make(fam.alpha);
  return std::log10(kernel.derivative(0.0));
}

template <class Fn>
decltype(auto) with_real(PrecisionTier tier, Fn&& fn) {
  switch (tier) {
    case PrecisionTier::kDouble:
      return fn(double{});
    case PrecisionTier::kWide:
      return fn(Wide{});
    case PrecisionTier::kDeep:
      return fn(Deep{});
    case PrecisionTier::kAuto:
      break;
  }
  throw ConfigError("precision tier must be resolved before dispatch");
}

PrecisionTier resolve_tier(const InductionFamily& fam, long long steps,
                           PrecisionTier tier) {
  return tier == PrecisionTier::kAuto ? tier_for(fam, steps) : tier;
}

int print_digits(PrecisionTier tier) {
  return tier == PrecisionTier::kDouble ? 17 : tier_digits(tier);
}

template <class Real>
std::string decimal_str(const Real& x, int digits) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

// The golden mean is rebuilt at working precision; any other rotation number
// only exists as the double it was specified with.
template <class Real>
Real family_omega(const RotationSpec& rot) {
  if (rot.omega == golden_omega<double>()) return golden_omega<Real>();
  return Real(rot.omega);
}

template <class Real>
class XiEngine {
 public:
  explicit XiEngine(const InductionFamily& fam)
      : symmetric_(fam.kind == InductionFamily::Kind::kSymmetric),
        alpha_(fam.alpha),
        inv_alpha_(Real(1) / Real(fam.alpha)),
        pi_(pi_const<Real>()),
        omega_(family_omega<Real>(fam.rot)) {
    if (symmetric_) {
      sym_ = ArctanSymmetricKernel<Real>{alpha_};
    } else {
      resc_ = ArctanRescaledKernel<Real>::make(alpha_);
      // Once below -1/alpha the one-sided orbit is stuck: g >= 0 and
      // F(-1/alpha) < -1/alpha, so the next value is below F(-1/alpha) again.
      trap_valid_ = resc_->value(-inv_alpha_) < -inv_alpha_;
    }
  }

  bool symmetric() const { return symmetric_; }
  const Real& inv_alpha() const { return inv_alpha_; }

  Real value(const Real& x) const {
    return symmetric_ ? sym_->value(x) : resc_->value(x);
  }
  Real slope(const Real& x) const {
    return symmetric_ ? sym_->derivative(x) : resc_->derivative(x);
  }
  Real forcing(const Real& theta) const {
    using std::sin;
    return symmetric_ ? 1 - 4 * dist_to_zero(theta) : 1 - sin(pi_ * theta);
  }
  // Fibre angle at integer time k; the zeta companion shifts by a half turn.
  Real angle(long long k, bool half) const {
    Real t = wrap_unit_r(Real(static_cast<double>(k)) * omega_);
    if (half) t = wrap_unit_r(t + Real(1) / 2);
    return t;
  }
  // Whether the trapping shortcut may stand in for the exact final value
  // when solving xi_n = target over beta in [lo, inf).
  bool trap_enabled(const Real& target, const Real& lo) const {
    return !symmetric_ && trap_valid_ && target >= -inv_alpha_ && lo >= 0;
  }

 private:
  bool symmetric_;
  Real alpha_;
  Real inv_alpha_;
  Real pi_;
  Real omega_;
  std::optional<ArctanRescaledKernel<Real>> resc_;
  std::optional<ArctanSymmetricKernel<Real>> sym_;
  bool trap_valid_ = false;
};

// Full orbit xs[m] = xi_{m-l} for m = 0..n+l (or the zeta companion, which
// starts at -3 and shifts every angle by a half turn).
template <class Real>
std::vector<Real> run_orbit(const XiEngine<Real>& eng, long long l, long long n,
                            const Real& beta, bool zeta) {
  std::vector<Real> xs;
  xs.reserve(static_cast<size_t>(n + l + 1));
  Real x = zeta ? Real(-3) : Real(3);
  xs.push_back(x);
  for (long long k = -l; k < n; ++k) {
    x = eng.value(x) - beta * eng.forcing(eng.angle(k, zeta));
    xs.push_back(x);
  }
  return xs;
}

template <class Real>
struct FinalValue {
  Real x{};
  bool trapped = false;
};

template <class Real>
FinalValue<Real> run_final(const XiEngine<Real>& eng, long long l, long long n,
                           const Real& beta, bool allow_trap) {
  Real x(3);
  for (long long k = -l; k < n; ++k) {
    x = eng.value(x) - beta * eng.forcing(eng.angle(k, false));
    if (allow_trap && x < -eng.inv_alpha()) return {x, true};
  }
  return {x, false};
}

// d xi_n / d beta, propagated alongside the orbit. The slope factor uses the
// pre-step value.
template <class Real>
Real run_deriv(const XiEngine<Real>& eng, long long l, long long n,
               const Real& beta) {
  Real x(3);
  Real d(0);
  for (long long k = -l; k < n; ++k) {
    const Real theta = eng.angle(k, false);
    const Real force = eng.forcing(theta);
    d = eng.slope(x) * d - force;
    x = eng.value(x) - beta * force;
  }
  return d;
}

template <class Real>
struct RealBracket {
  Real lo, hi;
};

// Bisect the strictly decreasing map beta -> xi_n(beta, l) to the target,
// stopping at bracket width goal (or at the tier's resolution floor).
template <class Real>
RealBracket<Real> bisect_decreasing(const XiEngine<Real>& eng, long long l,
                                    long long n, const Real& target, Real lo,
                                    Real hi, const Real& goal) {
  const bool trap = eng.trap_enabled(target, lo);
  const FinalValue<Real> flo = run_final(eng, l, n, lo, trap);
  const FinalValue<Real> fhi = run_final(eng, l, n, hi, trap);
  const bool lo_ok = !flo.trapped && flo.x >= target;
  const bool hi_ok = fhi.trapped || fhi.x <= target;
  if (!lo_ok || !hi_ok) {
    char buf[192];
    std::snprintf(buf, sizeof(buf),
                  "xi does not enclose the target %.17g: xi(%.17g) = %.17g, "
                  "xi(%.17g) = %.17g",
                  static_cast<double>(target), static_cast<double>(lo),
                  static_cast<double>(flo.x), static_cast<double>(hi),
                  static_cast<double>(fhi.x));
    throw TargetUnreachable(buf);
  }
  for (int it = 0; it < 20000 && hi - lo > goal; ++it) {
    const Real mid = lo + (hi - lo) / 2;
    if (!(mid > lo && mid < hi)) break;
    const FinalValue<Real> fm = run_final(eng, l, n, mid, trap);
    if (!fm.trapped && fm.x >= target)
      lo = mid;
    else
      hi = mid;
  }
  return {lo, hi};
}

void check_family_matches_table(const InductionFamily& fam,
                                const TimeSetTable& table) {
  const TimeSetParams& par = table.params();
  if (std::fabs(par.alpha - fam.alpha) > 1e-12 * std::max(1.0, fam.alpha))
    throw ConfigError("family alpha differs from the time-set table's");
  if (std::fabs(par.gamma - fam.gamma) > 1e-15)
    throw ConfigError("family gamma differs from the time-set table's");
  if (par.symmetric != (fam.kind == InductionFamily::Kind::kSymmetric))
    throw ConfigError("family symmetry differs from the time-set table's");
  if (par.rot.omega != fam.rot.omega)
    throw ConfigError("family rotation differs from the time-set table's");
}

}  // namespace

int tier_digits(PrecisionTier tier) {
  switch (tier) {
    case PrecisionTier::kDouble:
      return kDoubleDigits;
    case PrecisionTier::kWide:
      return kWideDigits;
    case PrecisionTier::kDeep:
      return kDeepDigits;
    case PrecisionTier::kAuto:
      break;
  }
  throw ConfigError("the auto tier has no fixed digit count");
}

int digits_needed(const InductionFamily& fam, long long steps) {
  if (steps < 0) throw ConfigError("step count must be >= 0");
  const double d = 25 + static_cast<double>(steps) * amplification_rate(fam);
  if (d > 1e9) throw ConfigError("horizon is far beyond any supported tier");
  return static_cast<int>(std::ceil(d));
}

PrecisionTier tier_for(const InductionFamily& fam, long long steps) {
  const int need = digits_needed(fam, steps);
  if (need <= kDoubleDigits) return PrecisionTier::kDouble;
  if (need <= kWideDigits - 2) return PrecisionTier::kWide;
  if (need <= kDeepDigits - 3) return PrecisionTier::kDeep;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "a %lld step horizon needs %d decimal digits, above the "
                "deepest tier (%d)",
                steps, need, kDeepDigits);
  throw ConfigError(buf);
}

double xi(const XiRequest& req, double beta, PrecisionTier tier) {
  req.validate();
  const PrecisionTier use = resolve_tier(req.family, req.n + req.l, tier);
  return with_real(use, [&](auto zero) -> double {
    using Real = decltype(zero);
    const XiEngine<Real> eng(req.family);
    return static_cast<double>(
        run_final(eng, req.l, req.n, Real(beta), false).x);
  });
}

std::vector<double> xi_trajectory(const XiRequest& req, double beta,
                                  PrecisionTier tier) {
  req.validate();
  const PrecisionTier use = resolve_tier(req.family, req.n + req.l, tier);
  return with_real(use, [&](auto zero) -> std::vector<double> {
    using Real = decltype(zero);
    const XiEngine<Real> eng(req.family);
    const auto xs = run_orbit(eng, req.l, req.n, Real(beta), false);
    std::vector<double> out(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) out[i] = static_cast<double>(xs[i]);
    return out;
  });
}

double XiDerivative::value() const {
  if (sign == 0) return 0;
  return sign * std::pow(10.0, log10_mag);
}

XiDerivative xi_beta_derivative(const XiRequest& req, double beta,
                                PrecisionTier tier) {
  req.validate();
  const PrecisionTier use = resolve_tier(req.family, req.n + req.l, tier);
  return with_real(use, [&](auto zero) -> XiDerivative {
    using Real = decltype(zero);
    const XiEngine<Real> eng(req.family);
    const Real d = run_deriv(eng, req.l, req.n, Real(beta));
    XiDerivative out;
    if (d > 0)
      out.sign = 1;
    else if (d < 0)
      out.sign = -1;
    if (out.sign != 0) {
      using std::abs;
      using std::log10;
      out.log10_mag = static_cast<double>(log10(abs(d)));
    }
    return out;
  });
}

BetaBracket solve_beta(const XiRequest& req, double target, double lo, double hi,
                       int resolve_digits, PrecisionTier tier) {
  req.validate();
  if (req.n < 1) throw ConfigError("parameter solve needs n >= 1");
  if (req.family.kind == InductionFamily::Kind::kSymmetric)
    throw NotMonotone(
        "beta -> xi_n is not monotone under the symmetric forcing; use "
        "solve_beta_symmetric");
  if (!(lo < hi)) throw ConfigError("parameter bracket is empty");
  if (resolve_digits < 0) throw ConfigError("resolve_digits must be >= 0");
  const long long steps = req.n + req.l;
  const PrecisionTier use = resolve_tier(req.family, steps, tier);
  if (resolve_digits > tier_digits(use) - 8)
    throw ConfigError("requested bracket width is below the tier's resolution");
  return with_real(use, [&](auto zero) -> BetaBracket {
    using Real = decltype(zero);
    using std::ldexp;
    using std::pow;
    const XiEngine<Real> eng(req.family);
    Real goal = ldexp(Real(hi) - Real(lo), -60);
    if (resolve_digits > 0) {
      const Real alt = pow(Real(10), -resolve_digits);
      if (alt < goal) goal = alt;
    }
    const auto iv = bisect_decreasing(eng, req.l, req.n, Real(target), Real(lo),
                                      Real(hi), goal);
    BetaBracket out;
    out.lo = static_cast<double>(iv.lo);
    out.hi = static_cast<double>(iv.hi);
    out.width = static_cast<double>(iv.hi - iv.lo);
    out.lo_full = decimal_str(iv.lo, print_digits(use));
    out.hi_full = decimal_str(iv.hi, print_digits(use));
    char buf[176];
    std::snprintf(buf, sizeof(buf),
                  "xi_%lld(beta, l=%lld) = %.17g (one-sided, alpha=%.17g, "
                  "%d digit tier)",
                  req.n, req.l, target, req.family.alpha, tier_digits(use));
    out.target = buf;
    return out;
  });
}

BetaBracket solve_beta_symmetric(const XiRequest& req, double parent_lo,
                                 double parent_hi, long long scan_steps,
                                 PrecisionTier tier) {
  req.validate();
  if (req.n < 1) throw ConfigError("parameter solve needs n >= 1");
  if (req.family.kind != InductionFamily::Kind::kSymmetric)
    throw ConfigError(
        "the min/max parameter construction is specific to the symmetric "
        "forcing; the one-sided family goes through solve_beta");
  if (!(parent_lo < parent_hi)) throw ConfigError("parent interval is empty");
  if (scan_steps < 8 || scan_steps > (1LL << 26))
    throw ConfigError("scan_steps must lie in [8, 2^26]");
  const long long steps = req.n + req.l;
  const PrecisionTier use = resolve_tier(req.family, steps, tier);
  return with_real(use, [&](auto zero) -> BetaBracket {
    using Real = decltype(zero);
    using std::ldexp;
    const XiEngine<Real> eng(req.family);
    const Real tp = eng.inv_alpha();
    const Real tm = -eng.inv_alpha();
    const Real a(parent_lo), b(parent_hi);
    const Real h = (b - a) / Real(static_cast<double>(scan_steps));
    const Real goal = ldexp(b - a, -60);

    const auto value_at = [&](const Real& beta) {
      return run_final(eng, req.l, req.n, beta, false).x;
    };
    const auto grid_point = [&](long long k) {
      return k == scan_steps ? b : a + h * Real(static_cast<double>(k));
    };
    // Sign-change bisection inside one scan cell; v_left = xi at the left end.
    const auto root_in = [&](Real left, const Real& v_left, Real right,
                             const Real& target) {
      const bool left_ge = v_left >= target;
      for (int it = 0; it < 20000 && right - left > goal; ++it) {
        const Real mid = left + (right - left) / 2;
        if (!(mid > left && mid < right)) break;
        if ((value_at(mid) >= target) == left_ge)
          left = mid;
        else
          right = mid;
      }
      return RealBracket<Real>{left, right};
    };

    // Upward scan: the first cell where xi crosses -1/alpha holds beta-.
    long long cell = -1;
    Real cell_lo, v_cell_lo;
    {
      Real prev = a, v_prev = value_at(a);
      for (long long k = 1; k <= scan_steps; ++k) {
        const Real cur = grid_point(k);
        const Real v_cur = value_at(cur);
        if ((v_prev >= tm) != (v_cur >= tm)) {
          cell = k;
          cell_lo = prev;
          v_cell_lo = v_prev;
          break;
        }
        prev = cur;
        v_prev = v_cur;
      }
    }
    if (cell < 0)
      throw NoCrossing("xi never crosses -1/alpha on the parent interval");
    const auto minus_iv = root_in(cell_lo, v_cell_lo, grid_point(cell), tm);
    const Real beta_minus = (minus_iv.lo + minus_iv.hi) / 2;

    // beta+ is the last crossing of +1/alpha below beta-; it can share the
    // cell with beta- or sit in an earlier one.
    RealBracket<Real> plus_iv;
    bool found = false;
    if (v_cell_lo >= tp) {
      plus_iv = root_in(cell_lo, v_cell_lo, minus_iv.lo, tp);
      found = true;
    } else {
      Real right = cell_lo, v_right = v_cell_lo;
      for (long long j = cell - 1; j >= 1 && !found; --j) {
        const Real left = grid_point(j - 1);
        const Real v_left = value_at(left);
        if ((v_left >= tp) != (v_right >= tp)) {
          plus_iv = root_in(left, v_left, right, tp);
          found = true;
        }
        right = left;
        v_right = v_left;
      }
    }
    if (!found)
      throw NoCrossing(
          "xi never crosses +1/alpha below beta- on the parent interval");
    const Real beta_plus = (plus_iv.lo + plus_iv.hi) / 2;
    if (!(beta_plus < beta_minus))
      throw SolveFailed("the symmetric interval endpoints collapsed");

    BetaBracket out;
    out.lo = static_cast<double>(beta_plus);
    out.hi = static_cast<double>(beta_minus);
    out.width = static_cast<double>(beta_minus - beta_plus);
    out.lo_full = decimal_str(beta_plus, print_digits(use));
    out.hi_full = decimal_str(beta_minus, print_digits(use));
    char buf[192];
    std::snprintf(buf, sizeof(buf),
                  "[beta+, beta-]: xi_%lld(beta, l=%lld) = +-1/alpha "
                  "(symmetric, alpha=%.17g, %lld scan cells, %d digit tier)",
                  req.n, req.l, req.family.alpha, scan_steps, tier_digits(use));
    out.target = buf;
    return out;
  });
}

namespace {

// Finite-horizon exponents along the solved orbit, accumulated at working
// precision: forward over xi_1..xi_{l+}, backward over xi_0..xi_{1-l-}.
template <class Real>
void fill_profile(const XiEngine<Real>& eng, const std::vector<Real>& xs,
                  long long l, long long l_plus, long long l_minus,
                  ExponentProfile* profile) {
  using std::log;
  profile->horizons.clear();
  profile->forward.clear();
  profile->backward.clear();
  for (long long j = 1; j <= std::max(l_plus, l_minus); ++j)
    profile->horizons.push_back(j);
  Real acc(0);
  for (long long j = 1; j <= l_plus; ++j) {
    acc += log(eng.slope(xs[static_cast<size_t>(l + j)]));
    profile->forward.push_back(
        static_cast<double>(acc / Real(static_cast<double>(j))));
  }
  acc = 0;
  for (long long j = 1; j <= l_minus; ++j) {
    acc += log(eng.slope(xs[static_cast<size_t>(l + 1 - j)]));
    profile->backward.push_back(
        static_cast<double>(-acc / Real(static_cast<double>(j))));
  }
}

double min_or_zero(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

}  // namespace

std::vector<SinkSourceCandidate> sink_source_search(const InductionFamily& fam,
                                                    const TimeSetTable& table,
                                                    int p_max, bool strict) {
  if (p_max < 0) throw ConfigError("p_max must be >= 0");
  if (fam.kind != InductionFamily::Kind::kOneSided)
    throw ConfigError(
        "the sink-source construction solves a monotone parameter problem "
        "and runs on the one-sided family; the symmetric analogue goes "
        "through solve_beta_symmetric");
  check_family_matches_table(fam, table);
  if (table.l_levels() < p_max)
    throw ConfigError("time-set table carries levels up to " +
                      std::to_string(table.l_levels()) + ", need p_max = " +
                      std::to_string(p_max));

  if (strict) {
    std::string failing;
    const auto flag = [&failing](bool ok, const char* name) {
      if (!ok) {
        failing += name;
        failing += "; ";
      }
    };
    const ParamPredicates pred = check_param_predicates(table.params());
    flag(pred.gamma_small, "gamma <= 1/16");
    flag(pred.alpha_vs_gamma, "sqrt(alpha) > 4/gamma >= 64");
    flag(pred.u_ok, "u >= 8");
    flag(pred.v_ok, "v >= 8");
    flag(pred.sigma_ok, "(u+3)/(u+v) <= 1/6");
    flag(std::sqrt(fam.alpha) >= 2 * fam.error_constant(), "sqrt(alpha) >= 2K");
    for (int q = 1; q <= p_max; ++q)
      flag(table.level_valid(q) && table.pair_clean(q),
           ("interval pair at level " + std::to_string(q)).c_str());
    const HypothesisReport hyp =
        check_hypotheses(fam.system(1 + 2 / std::sqrt(fam.alpha)), 10000);
    for (const auto& item : hyp.items) flag(item.holds, item.name.c_str());
    if (!failing.empty())
      throw ConfigError("strict sink-source search refused; failing: " + failing);
  }

  std::vector<SinkSourceCandidate> out;
  out.reserve(static_cast<size_t>(p_max) + 1);
  for (int p = 0; p <= p_max; ++p) {
    const long long lm = table.l_minus(p);
    const long long lp = table.l_plus(p);
    const long long n = lp + 1;
    const long long steps = n + lm;
    const int need = digits_needed(fam, steps);
    const PrecisionTier use = tier_for(fam, steps);
    const int resolve = std::max(0, need - 15);
    const double window_hi = 1 + 3 / std::sqrt(fam.alpha);

    SinkSourceCandidate cand;
    cand.p = p;
    cand.theta_p = wrap_unit(fam.rot.omega);
    cand.l_minus = lm;
    cand.l_plus = lp;
    cand.floor_strict = (7.0 / 24.0) * std::log(fam.alpha);
    try {
      with_real(use, [&](auto zero) {
        using Real = decltype(zero);
        using std::pow;
        const XiEngine<Real> eng(fam);
        const Real goal = pow(Real(10), -resolve);
        const auto iv = bisect_decreasing(eng, lm, n, eng.inv_alpha(), Real(1),
                                          Real(window_hi), goal);
        const Real beta_mid = (iv.lo + iv.hi) / 2;
        const auto xs = run_orbit(eng, lm, n, beta_mid, false);
        cand.beta_p = static_cast<double>(beta_mid);
        cand.beta_p_full = decimal_str(beta_mid, print_digits(use));
        cand.x_p = static_cast<double>(xs[static_cast<size_t>(lm + 1)]);
        fill_profile(eng, xs, lm, lp, lm, &cand.profile);
      });
    } catch (const TargetUnreachable& e) {
      throw SolveFailed("sink-source level " + std::to_string(p) + ": " +
                        e.what());
    }
    cand.min_forward = min_or_zero(cand.profile.forward);
    cand.min_backward = min_or_zero(cand.profile.backward);
    cand.strict_pass = (lp == 0 || cand.min_forward >= cand.floor_strict) &&
                       (lm == 0 || cand.min_backward >= cand.floor_strict);
    cand.empirical_pass = (lp == 0 || cand.min_forward > 0) &&
                          (lm == 0 || cand.min_backward > 0);
    out.push_back(std::move(cand));
  }
  return out;
}

namespace {

// Shared admissibility gate for the induction checks.
void check_induction_range(const TimeSetTable& table, int q, long long n,
                           long long l_plus_q) {
  if (n < l_plus_q + 1)
    throw NotAdmissible("n must be at least l_plus(q) + 1");
  if (q + 1 <= table.l_levels()) {
    try {
      if (n > table.nu(q + 1))
        throw NotAdmissible("n reaches past the first order-(q+1) return");
    } catch (const TargetUnreachable&) {
      // The window shows no order-(q+1) return, so the cap is vacuous.
    }
  }
}

}  // namespace

InductionReport verify_induction(const InductionFamily& fam,
                                 const TimeSetTable& table, int q, long long n,
                                 const std::vector<double>& betas) {
  check_family_matches_table(fam, table);
  if (q < 0 || q > table.l_levels())
    throw ConfigError("q is outside the table's levels");
  const long long lm = table.l_minus(q);
  check_induction_range(table, q, n, table.l_plus(q));
  const RegularSet reg = regular_set(n, table);
  const std::vector<long long> regular = reg.set.list();

  InductionReport rep;
  rep.q = q;
  rep.n = n;
  rep.l_minus = lm;
  const double inv_a = 1 / fam.alpha;
  const double window_lo = 1 + 1 / std::sqrt(fam.alpha);
  const double window_hi = 1 + 3 / std::sqrt(fam.alpha);
  const long long steps = n + lm;
  const int need = digits_needed(fam, steps);
  const PrecisionTier use = tier_for(fam, steps);

  with_real(use, [&](auto zero) {
    using Real = decltype(zero);
    using std::abs;
    using std::log10;
    using std::pow;
    const XiEngine<Real> eng(fam);
    for (double beta : betas) {
      InductionCheckRow row;
      row.beta = beta;
      const auto xs = run_orbit(eng, lm, n, Real(beta), false);
      row.xi_n = static_cast<double>(xs.back());
      row.precondition = std::fabs(row.xi_n) <= inv_a;
      if (row.precondition) {
        ++rep.preconditioned;
        row.window_ok = beta >= window_lo && beta <= window_hi;
        for (long long j = -lm; j <= 0 && row.past_ok; ++j) {
          if (table.in_omega_inf(j)) continue;
          if (static_cast<double>(xs[static_cast<size_t>(lm + j)]) < fam.gamma) {
            row.past_ok = false;
            row.witness = j;
          }
        }
        for (size_t i = 0; i < regular.size() && row.regular_ok; ++i) {
          const long long j = regular[i];
          if (std::fabs(static_cast<double>(xs[static_cast<size_t>(lm + j)])) >
              inv_a) {
            row.regular_ok = false;
            row.witness = j;
          }
        }
        if (!row.window_ok || !row.past_ok || !row.regular_ok) ++rep.failures;
      }
      rep.rows.push_back(row);
    }

    // Slope of xi_n at the solved critical parameter of this level. The
    // difference step is sized so that h |dxi/dbeta| ~ 1e-5: well above the
    // arithmetic noise, well inside the linear regime.
    const int resolve = std::max(0, need - 15);
    const Real goal = pow(Real(10), -resolve);
    const auto iv = bisect_decreasing(eng, lm, n, eng.inv_alpha(), Real(1),
                                      Real(window_hi), goal);
    const Real beta_star = (iv.lo + iv.hi) / 2;
    const Real dprop = run_deriv(eng, lm, n, beta_star);
    const double prop_log10 = static_cast<double>(log10(abs(dprop)));
    const int h_exp = 5 + static_cast<int>(std::ceil(prop_log10));
    const Real h = pow(Real(10), -h_exp);
    const Real f_up = run_final(eng, lm, n, beta_star + h, false).x;
    const Real f_dn = run_final(eng, lm, n, beta_star - h, false).x;
    const Real fd = (f_up - f_dn) / (2 * h);
    rep.slope_bound_log10 =
        (static_cast<double>(n - 1) / 4) * std::log10(fam.alpha);
    if (fd < 0) {
      rep.slope_log10 = static_cast<double>(log10(-fd));
      rep.slope_ok = rep.slope_log10 >= rep.slope_bound_log10 - 1e-9;
      rep.derivative_consistent =
          dprop < 0 && std::fabs(rep.slope_log10 - prop_log10) <= 1e-6;
    }
  });
  rep.pass = rep.failures == 0 && rep.slope_ok;
  return rep;
}

InductionReport verify_induction(const FamilyFactory& family,
                                 const TimeSetTable& table, int q, long long n,
                                 const std::vector<double>& betas) {
  if (q < 0 || q > table.l_levels())
    throw ConfigError("q is outside the table's levels");
  const QpfSystem probe = family(1.0);
  if (probe.geometry != FibreGeometry::kInterval)
    throw ConfigError("induction checks need an interval fibre");
  if (!probe.alpha)
    throw ConfigError("induction checks need the family's alpha");
  const double alpha = *probe.alpha;
  const double gamma = probe.gamma ? *probe.gamma : table.params().gamma;
  const long long lm = table.l_minus(q);
  check_induction_range(table, q, n, table.l_plus(q));
  const RegularSet reg = regular_set(n, table);
  const std::vector<long long> regular = reg.set.list();

  const auto orbit = [&](const QpfSystem& sys) {
    std::vector<double> xs;
    xs.reserve(static_cast<size_t>(n + lm + 1));
    double x = 3;
    xs.push_back(x);
    for (long long k = -lm; k < n; ++k) {
      x = fibre_apply(sys, sys.spec.orbit_point(k), x);
      xs.push_back(x);
    }
    return xs;
  };

  InductionReport rep;
  rep.q = q;
  rep.n = n;
  rep.l_minus = lm;
  const double inv_a = 1 / alpha;
  const double window_lo = 1 + 1 / std::sqrt(alpha);
  const double window_hi = 1 + 3 / std::sqrt(alpha);
  for (double beta : betas) {
    InductionCheckRow row;
    row.beta = beta;
    const auto xs = orbit(family(beta));
    row.xi_n = xs.back();
    row.precondition = std::fabs(row.xi_n) <= inv_a;
    if (row.precondition) {
      ++rep.preconditioned;
      row.window_ok = beta >= window_lo && beta <= window_hi;
      for (long long j = -lm; j <= 0 && row.past_ok; ++j) {
        if (table.in_omega_inf(j)) continue;
        if (xs[static_cast<size_t>(lm + j)] < gamma) {
          row.past_ok = false;
          row.witness = j;
        }
      }
      for (size_t i = 0; i < regular.size() && row.regular_ok; ++i) {
        const long long j = regular[i];
        if (std::fabs(xs[static_cast<size_t>(lm + j)]) > inv_a) {
          row.regular_ok = false;
          row.witness = j;
        }
      }
      if (!row.window_ok || !row.past_ok || !row.regular_ok) ++rep.failures;
    }
    rep.rows.push_back(row);
  }

  rep.slope_bound_log10 =
      (static_cast<double>(n - 1) / 4) * std::log10(alpha);
  rep.slope_log10 = std::numeric_limits<double>::quiet_NaN();
  try {
    const double target = inv_a;
    const auto xi_n_at = [&](double b) { return orbit(family(b)).back(); };
    double lo = 1, hi = window_hi;
    if (!(xi_n_at(lo) >= target && xi_n_at(hi) <= target))
      throw TargetUnreachable("xi_n does not enclose 1/alpha on the window");
    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (xi_n_at(mid) >= target ? lo : hi) = mid;
    }
    const double beta_star = 0.5 * (lo + hi);
    double dprop = std::numeric_limits<double>::quiet_NaN();
    const QpfSystem sys = family(beta_star);
    if (sys.forcing) {
      double x = 3, d = 0;
      for (long long k = -lm; k < n; ++k) {
        const double th = sys.spec.orbit_point(k);
        d = fibre_derivative(sys, th, x) * d - sys.forcing->evaluator(th);
        x = fibre_apply(sys, th, x);
      }
      dprop = d;
    }
    const double h =
        (std::isfinite(dprop) && dprop != 0)
            ? std::pow(10.0, -(5 + std::ceil(std::log10(std::fabs(dprop)))))
            : 1e-8;
    const double fd = (xi_n_at(beta_star + h) - xi_n_at(beta_star - h)) / (2 * h);
    if (fd < 0) {
      rep.slope_log10 = std::log10(-fd);
      rep.slope_ok = rep.slope_log10 >= rep.slope_bound_log10 - 1e-6;
      rep.derivative_consistent =
          std::isfinite(dprop) && dprop < 0 &&
          std::fabs(rep.slope_log10 - std::log10(-dprop)) <= 1e-4;
    }
  } catch (const Error&) {
    // The solve is diagnostic; a family that breaks it simply reports no
    // slope. The row findings above stand on their own.
  }
  rep.pass = rep.failures == 0 && rep.slope_ok;
  return rep;
}

ComparisonReport comparison_oracles(const ComparisonInput& in) {
  if (in.x1.size() != in.x2.size())
    throw ConfigError("orbit comparison needs equal lengths");
  if (in.x1.size() < 2)
    throw ConfigError("orbit comparison needs at least two entries");
  if (!(in.eps > 0)) throw ConfigError("eps must be positive");
  if (in.offsets < 0) throw ConfigError("offsets must be >= 0");
  const long long n = static_cast<long long>(in.x1.size()) - 1;
  const double alpha = in.family.alpha;
  const double gamma = in.family.gamma;
  const double K = in.family.error_constant();
  const double inv_a = 1 / alpha;
  const bool sym = in.family.kind == InductionFamily::Kind::kSymmetric;

  const auto g = [&](double th) {
    return sym ? SymmetricTentForcing<double>{}.value(th)
               : OneSidedSinForcing<double>{}.value(th);
  };

  ComparisonReport rep;
  for (long long m = -in.offsets; m <= in.offsets; ++m) {
    const double shift = in.family.rot.orbit_point(m);
    rep.err = std::max(rep.err,
                       std::fabs(in.beta1 * g(wrap_unit(in.theta1 + shift)) -
                                 in.beta2 * g(wrap_unit(in.theta2 + shift))));
  }
  rep.err_bound = K * in.eps;
  rep.err_ok = rep.err <= rep.err_bound * (1 + 1e-12);

  // tau counts reference-orbit exits from B(1/alpha); eta counts steps where
  // either orbit sits below gamma. x?[j-1] holds the orbit value at time j.
  std::vector<long long> tau(static_cast<size_t>(n) + 1, 0);
  for (long long j = 1; j <= n; ++j)
    tau[static_cast<size_t>(j)] =
        tau[static_cast<size_t>(j - 1)] +
        (std::fabs(in.x1[static_cast<size_t>(j - 1)]) > inv_a ? 1 : 0);
  std::vector<long long> eta(static_cast<size_t>(n) + 2, 0);
  for (long long j = n; j >= 1; --j)
    eta[static_cast<size_t>(j)] =
        eta[static_cast<size_t>(j + 1)] +
        ((in.x1[static_cast<size_t>(j - 1)] < gamma ||
          in.x2[static_cast<size_t>(j - 1)] < gamma)
             ? 1
             : 0);

  {
    LemmaBound& L = rep.contraction;
    L.name = "orbit contraction";
    std::string bad;
    if (!rep.err_ok) bad = "err <= K eps";
    if (bad.empty())
      for (long long j = 1; j <= n; ++j)
        if (static_cast<double>(eta[static_cast<size_t>(j)]) >
            static_cast<double>(n + 1 - j) / 10) {
          bad = "eta(j,n) <= (n+1-j)/10";
          break;
        }
    if (bad.empty() && !(std::pow(alpha, -static_cast<double>(n) / 4) <= in.eps))
      bad = "alpha^(-n/4) <= eps";
    L.hypotheses = bad.empty();
    L.note = bad;
    L.lhs = std::fabs(in.x1[static_cast<size_t>(n)] -
                      in.x2[static_cast<size_t>(n)]);
    L.rhs = in.eps * (6 + K / (1 - std::pow(alpha, -0.25)));
    L.conclusion = L.lhs <= L.rhs * (1 + 1e-12);
  }

  const auto common_bad = [&]() -> std::string {
    if (!rep.err_ok) return "err <= K eps";
    if (in.q < 1) return "q >= 1";
    if (!(in.eps >= std::pow(alpha, -static_cast<double>(in.q + 1)) &&
          in.eps < std::pow(alpha, -static_cast<double>(in.q))))
      return "eps in [alpha^-(q+1), alpha^-q)";
    if (!(std::fabs(in.x1[static_cast<size_t>(n)]) <= inv_a))
      return "x1_{n+1} in B(1/alpha)";
    if (static_cast<double>(tau[static_cast<size_t>(n)]) >
        std::max(0.0, (2.0 * in.q - 3) / 4))
      return "tau(n) <= max{0,(2q-3)/4}";
    for (long long j = 1; j <= n; ++j)
      if (static_cast<double>(tau[static_cast<size_t>(n)] -
                              tau[static_cast<size_t>(j)]) >
          static_cast<double>(n - j) / 6)
        return "tau(n)-tau(j) <= (n-j)/6";
    return "";
  }();

  {
    LemmaBound& L = rep.throwout_a;
    L.name = "throw-out (a)";
    std::string bad = common_bad;
    if (bad.empty() && !(std::fabs(in.x1[0]) <= inv_a)) bad = "x1_1 in B(1/alpha)";
    if (bad.empty() && !(in.x2[0] >= 2 * inv_a)) bad = "x2_1 >= 2/alpha";
    L.hypotheses = bad.empty();
    L.note = bad;
    L.lhs = in.x2[static_cast<size_t>(n)];
    L.rhs = 2 * inv_a;
    L.conclusion = L.lhs >= L.rhs * (1 - 1e-12);
  }
  {
    LemmaBound& L = rep.throwout_b;
    L.name = "throw-out (b)";
    std::string bad = common_bad;
    if (bad.empty() && !(n >= 5LL * in.q)) bad = "n >= 5q";
    if (bad.empty())
      for (long long j = 1; j <= n; ++j)
        if (static_cast<double>(tau[static_cast<size_t>(j)]) >
            static_cast<double>(j) / 8) {
          bad = "tau(j) <= j/8";
          break;
        }
    if (bad.empty() && !(in.x2[0] >= in.x1[0] + in.eps / 2))
      bad = "x2_1 >= x1_1 + eps/2";
    L.hypotheses = bad.empty();
    L.note = bad;
    L.lhs = in.x2[static_cast<size_t>(n)];
    L.rhs = 2 * inv_a;
    L.conclusion = L.lhs >= L.rhs * (1 - 1e-12);
  }
  return rep;
}

ScalingReport classify_and_scale(const FamilyFactory& family,
                                 const BetaBracket& beta_c,
                                 const std::vector<double>& offsets,
                                 double eps_cls, int g, long long n_iter,
                                 int n_test) {
  if (offsets.size() < 2)
    throw ConfigError("the scaling fit needs at least two offsets");
  if (!(eps_cls > 0)) throw ConfigError("eps_cls must be positive");
  if (n_iter < 1 || n_iter > std::numeric_limits<int>::max())
    throw ConfigError("n_iter out of range");
  const double bc = 0.5 * (beta_c.lo + beta_c.hi);

  ScalingReport rep;
  {
    const QpfSystem sys = family(bc);
    const GraphSample upper =
        iterate_boundary(sys, GraphKind::kUpper, static_cast<int>(n_iter), g);
    rep.lambda_upper = graph_lyapunov(sys, upper).lambda;
    const GraphSample middle = middle_graph(sys, g, n_test);
    rep.lambda_middle = graph_lyapunov(sys, middle).lambda;
    const bool nonsmooth =
        rep.lambda_upper < -eps_cls && rep.lambda_middle > eps_cls;
    const bool smooth = std::fabs(rep.lambda_upper) < eps_cls &&
                        std::fabs(rep.lambda_middle) < eps_cls;
    if (nonsmooth) {
      rep.classification = "non-smooth";
    } else if (smooth) {
      rep.classification = "smooth";
    } else {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "graph exponents straddle the threshold: upper %.6g, "
                    "middle %.6g, eps %.3g",
                    rep.lambda_upper, rep.lambda_middle, eps_cls);
      throw Inconclusive(buf);
    }
  }

  for (double d : offsets) {
    if (!(d > 0))
      throw ConfigError("offsets are positive distances below critical");
    const double beta = bc - d;
    if (!(beta > 0)) throw ConfigError("offset reaches past beta = 0");
    const QpfSystem sys = family(beta);
    const GraphSample upper =
        iterate_boundary(sys, GraphKind::kUpper, static_cast<int>(n_iter), g);
    const GraphSample middle = middle_graph(sys, g, n_test);
    const double gap = min_graph_distance(middle, upper).first;
    if (!(gap > 0)) {
      char buf[96];
      std::snprintf(buf, sizeof(buf),
                    "graph gap is not positive at offset %.6g", d);
      throw Inconclusive(buf);
    }
    rep.points.emplace_back(d, gap);
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double m = static_cast<double>(rep.points.size());
  for (const auto& [d, gap] : rep.points) {
    const double x = std::log(d), y = std::log(gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double det = m * sxx - sx * sx;
  if (!(det > 0)) throw ConfigError("offsets must be distinct for the fit");
  rep.exponent = (m * sxy - sx * sy) / det;
  const double var_y = m * syy - sy * sy;
  rep.r2 = var_y > 0 ? (m * sxy - sx * sy) * (m * sxy - sx * sy) / (det * var_y)
                     : 1.0;
  return rep;
}

double symmetric_zeta_check(const InductionFamily& fam, double beta, long long l,
                            long long n, PrecisionTier tier) {
  if (fam.kind != InductionFamily::Kind::kSymmetric)
    throw ConfigError("the zeta companion orbit needs the symmetric forcing");
  XiRequest req;
  req.family = fam;
  req.l = l;
  req.n = n;
  req.validate();
  const PrecisionTier use = resolve_tier(fam, n + l, tier);
  return with_real(use, [&](auto zero) -> double {
    using Real = decltype(zero);
    using std::abs;
    const XiEngine<Real> eng(fam);
    const auto xs = run_orbit(eng, l, n, Real(beta), false);
    const auto zs = run_orbit(eng, l, n, Real(beta), true);
    Real worst(0);
    for (size_t i = 0; i < xs.size(); ++i) {
      const Real d = abs(zs[i] + xs[i]);
      if (d > worst) worst = d;
    }
    return static_cast<double>(worst);
  });
}

double symmetric_zeta_check(const QpfSystem& sys, long long l, long long n) {
  if (sys.geometry != FibreGeometry::kInterval)
    throw ConfigError("the zeta companion orbit needs an interval fibre");
  if (l < 0) throw ConfigError("zeta check needs l >= 0");
  if (n < -l) throw ConfigError("zeta check needs n >= -l");
  double x = 3, z = -3, worst = 0;
  for (long long k = -l; k < n; ++k) {
    const double th = sys.spec.orbit_point(k);
    x = fibre_apply(sys, th, x);
    z = fibre_apply(sys, wrap_unit(th + 0.5), z);
    worst = std::max(worst, std::fabs(z + x));
  }
  return worst;
}

}  // namespace qpf
