#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qpf/circle.hpp"

namespace qpf {

// Sentinel for "p = infinity" in the approximating-set order parameter.
inline constexpr int kPInf = std::numeric_limits<int>::max();

// Geometric partial sum 1 + 1/alpha + ... + alpha^{-(n-1)}.
// n <= 0 yields 1 by convention, n == kPInf yields alpha/(alpha-1).
double s_alpha(int n, double alpha);

// Parameters of the return-time combinatorics. alpha is the expansion
// strength of the underlying family, gamma the close-return scale, l2 the
// slope of the forcing peak. u and v size the exceptional intervals to the
// left and right of a close return. With symmetric set, distances are
// measured to {0, 1/2} instead of {0}.
struct TimeSetParams {
  double alpha = 100.0;
  double gamma = 1.0 / 16.0;
  double l2 = 2.0;
  int u = 8;
  int v = 58;
  RotationSpec rot = RotationSpec::golden_mean();
  bool symmetric = false;

  int u_tilde() const { return u + 2; }
  int v_tilde() const { return v + 2; }
  int w() const { return u + v + 5; }
  double sigma() const { return double(u + 3) / double(u + v); }

  // d(omega_j, 0), or d(omega_j, {0, 1/2}) in symmetric mode.
  double dist(long long j) const;

  void validate() const;  // throws ConfigError on out-of-domain fields
};

// The scalar parameter conditions, reported individually so callers can
// gate stronger claims on exactly the ones that hold.
struct ParamPredicates {
  bool gamma_small = false;       // gamma <= 1/16
  bool alpha_vs_gamma = false;    // sqrt(alpha) > 4/gamma and 4/gamma >= 64
  bool alpha_dominates_sum = false;  // alpha >= S_inf(alpha) + 1
  bool gamma_above_tail = false;     // gamma >= (S_inf(alpha) + 1)/alpha
  bool u_ok = false;                 // u >= 8
  bool v_ok = false;                 // v >= 8
  bool sigma_ok = false;             // (u+3)/(u+v) <= 1/6

  bool strict_params() const {
    return gamma_small && alpha_vs_gamma && u_ok && v_ok && sigma_ok;
  }
};
ParamPredicates check_param_predicates(const TimeSetParams& par);

// Order of the close return at j relative to level p: 0 if omega_j is far
// from the peak set, otherwise the depth q >= 1 of the band that d(omega_j)
// falls into. p == kPInf gives the limiting bands. Total for every j; when
// the bands are ill-formed (gamma_above_tail fails) the far branch wins and
// ties go to the smallest q.
int q_p(long long j, int p, const TimeSetParams& par);

// Interval half-lengths attached to close returns of order q, together with
// flags recording whether the strict scan produced them.
struct LPair {
  int l_minus = 0;
  int l_plus = 0;
  bool clean_minus = true;
  bool clean_plus = true;
};

// Smallest pair in [u q, (u+2) q) x [v q, (v+2) q) whose flanking integers
// -l, -l-1 resp. l, l+1 avoid the limiting recurrence set, respecting
// monotonicity against prev. q == 0 returns (0, 0). When no such pair
// exists: empirical mode falls back to the in-range pair farthest from the
// peak (flagged not clean), strict mode throws NoValidL.
LPair choose_l(int q, const TimeSetParams& par,
               const std::function<bool(long long)>& in_omega_inf,
               const LPair* prev = nullptr, bool empirical = false);

// Integer window [1, n] with a membership mask. Also used for the regular
// sets; gaps() lists the maximal intervals of the complement.
struct IndexSet {
  long long n = 0;
  std::vector<char> member;  // member[j-1] for j in [1, n]

  bool contains(long long j) const {
    return j >= 1 && j <= n && member[static_cast<size_t>(j - 1)] != 0;
  }
  std::vector<long long> list() const;
  std::vector<long long> complement_list() const;
  std::vector<std::pair<long long, long long>> gaps() const;
  long long count() const;
};

struct RegularSet {
  IndexSet set;
  bool clean = true;                // recursion ran without fallbacks
  std::vector<std::string> notes;  // fallback reasons, if any
};

// Precomputed return-time combinatorics over an integer window [lo, hi].
// The table pads the window internally so that membership in the recurrence
// sets is exact for every queried index; queries outside the padded range
// throw ConfigError. Strict mode refuses (NoValidL) when the interval
// half-lengths cannot be chosen by the exact scan; empirical mode falls
// back and flags the affected levels.
class TimeSetTable {
 public:
  enum class Mode { kStrict, kEmpirical };

  TimeSetTable(const TimeSetParams& par, long long lo, long long hi,
               Mode mode = Mode::kEmpirical, int min_l_levels = 4);

  const TimeSetParams& params() const { return par_; }
  long long lo() const { return lo_; }
  long long hi() const { return hi_; }
  long long padded_lo() const { return plo_; }
  long long padded_hi() const { return phi_; }
  Mode mode() const { return mode_; }

  int max_q() const { return max_q_; }  // max limiting order on the padded range
  int max_p() const { return max_p_; }  // max order at level 0 on [1, hi]
  int l_levels() const { return static_cast<int>(lm_.size()) - 1; }

  double dist(long long j) const { return par_.dist(j); }
  int p_of(long long j) const;    // order at level 0
  int q_inf(long long j) const;   // limiting order
  int q_at(long long j, int p) const;

  // Membership in the order-p recurrence set (union over all j of the
  // intervals around returns), and in its restricted variant that only
  // collects returns of order <= p (empty for p <= 0).
  bool in_omega(long long k, int p) const;
  bool in_omega_tilde(long long k, int p) const;
  bool in_omega_inf(long long k) const;
  // The interval contributed by j at level p: [j - (u+2) q, j + (v+2) q],
  // or nullopt when q_at(j, p) == 0.
  std::optional<std::pair<long long, long long>> omega_interval(long long j,
                                                                int p) const;

  // Interval half-lengths per order q in [0, l_levels()].
  int l_minus(int q) const;
  int l_plus(int q) const;
  bool pair_clean(int q) const;
  bool level_valid(int q) const;

  // Endpoints of the exceptional interval around a close return m with
  // p_of(m) >= 1: [m - l_minus, m + l_plus]. j_interval is nullopt when
  // p_of(m) == 0.
  long long lambda_minus(long long m) const;
  long long lambda_plus(long long m) const;
  std::optional<std::pair<long long, long long>> j_interval(long long m) const;

  // n is admissible when no exceptional interval of an earlier return
  // reaches n. O(1) after construction; n in [1, hi].
  bool admissible(long long n) const;

  // First j >= 1 whose order at level 0 is >= q, and the first j whose
  // distance drops below the order-q closeness threshold. Throw
  // TargetUnreachable when the window contains no such j.
  long long nu(int q) const;
  long long nu_tilde(int q) const;

 private:
  friend RegularSet regular_set(long long n, const TimeSetTable& t);

  TimeSetParams par_;
  Mode mode_;
  long long lo_ = 0, hi_ = 0;    // requested window
  long long plo_ = 0, phi_ = 0;  // padded window
  int q_cap_ = 0;                // provable bound on orders near the window
  int p_tables_ = 0;             // plain/tilde membership built for p <= this

  std::vector<int> qinf_, p0_;  // indexed by j - plo_
  int max_q_ = 0, max_p_ = 0;

  std::vector<std::vector<char>> omega_, omega_tilde_;  // [p][k - plo_]
  std::vector<char> omega_inf_;

  std::vector<int> lm_, lp_;
  std::vector<char> clm_, clp_, lvalid_;

  std::vector<long long> reach_runmax_;  // over [1, hi]

  mutable std::map<long long, std::shared_ptr<const RegularSet>> rcache_;

  size_t idx(long long j) const { return static_cast<size_t>(j - plo_); }
  void require_padded(long long k) const;
  int level_of(long long m) const;  // p_of(m), validated for interval use
};

// A_n: the part of [1, n] not covered by exceptional intervals of returns
// m < n. The complement gaps() are the maximal covered intervals.
IndexSet admissible_set(long long n, const TimeSetTable& t);

// R_n for admissible n: A_n plus, per maximal covered interval with central
// return m, a translate of R_{l_plus(p(m))} into (m, m + l_plus(p(m))].
// Intervals whose structure does not match that pattern contribute nothing
// and are flagged. Throws NotAdmissible when n is not admissible.
RegularSet regular_set(long long n, const TimeSetTable& t);

// Empirical density check of the recurrence set and the closeness
// thresholds over [1, n] (and [-n, -1]).
struct DensityReport {
  double h_emp = 0.0;     // min over certified q of nu_tilde(q) / ((q+2) w)
  double big_h_emp = 0.0;  // max over N <= n of #(recurrence cap [1,N]) / N
  bool thresholds_hold = false;   // nu_tilde(q) >= (q+2) w for certified q
  bool density_holds = false;     // big_h_emp <= 1/(12 w), both sides
  int q_certified = 0;
  long long first_density_violation = 0;  // 0 when none
};
DensityReport density_functions(const TimeSetParams& par, long long n);

// One structural property checked over the table's window. enforced means
// the property's hypotheses hold for these parameters, so violations count
// as real failures; with enforced false the counts are informational.
struct LemmaCheck {
  std::string name;
  bool enforced = false;
  long long cases = 0;
  long long violations = 0;
  std::string first_counterexample;
};

struct LemmaBudget {
  long long max_cases_per_item = 2000000;
  int n_samples = 240;
  std::uint64_t seed = 20260816ull;
};

struct LemmaReport {
  std::vector<LemmaCheck> items;
  ParamPredicates predicates;
  bool thresholds_hold = false;  // order thresholds grow fast enough
  bool density_holds = false;    // recurrence set sparse enough
  bool standing = false;  // gamma_small && alpha_vs_gamma && both above

  bool enforced_ok() const;
  const LemmaCheck* find(const std::string& name) const;
};

LemmaReport verify_timeset_lemmas(const TimeSetTable& t,
                                  const LemmaBudget& budget = {});

}  // namespace qpf
