#include "qpf/timesets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "qpf/errors.hpp"

namespace qpf {

double s_alpha(int n, double alpha) {
  if (!(alpha > 1.0)) throw ConfigError("s_alpha needs alpha > 1");
  if (n == kPInf) return alpha / (alpha - 1.0);
  if (n <= 0) return 1.0;
  const double r = 1.0 / alpha;
  return (1.0 - std::pow(r, double(n))) / (1.0 - r);
}

double TimeSetParams::dist(long long j) const {
  const double t = rot.orbit_point(j);
  const double d0 = circle_dist(t, 0.0);
  if (!symmetric) return d0;
  return std::min(d0, circle_dist(t, 0.5));
}

void TimeSetParams::validate() const {
  if (!(alpha > 1.0)) throw ConfigError("alpha must exceed 1");
  if (!(gamma > 0.0) || gamma > 1.0)
    throw ConfigError("gamma must lie in (0, 1]");
  if (!(l2 > 0.0)) throw ConfigError("l2 must be positive");
  if (u < 1 || v < 1) throw ConfigError("u and v must be positive");
  if (!(rot.omega > 0.0) || !(rot.omega < 1.0))
    throw ConfigError("rotation number must lie in (0, 1)");
}

ParamPredicates check_param_predicates(const TimeSetParams& par) {
  ParamPredicates out;
  out.gamma_small = par.gamma <= 1.0 / 16.0;
  out.alpha_vs_gamma =
      std::sqrt(par.alpha) > 4.0 / par.gamma && 4.0 / par.gamma >= 64.0;
  const double sinf = s_alpha(kPInf, par.alpha);
  out.alpha_dominates_sum = par.alpha >= sinf + 1.0;
  out.gamma_above_tail = par.gamma >= (sinf + 1.0) / par.alpha;
  out.u_ok = par.u >= 8;
  out.v_ok = par.v >= 8;
  out.sigma_ok = par.sigma() <= 1.0 / 6.0 + 1e-15;
  return out;
}

namespace {

// Band edges of the order function at a fixed level p. An index has order
// >= 1 when its distance drops below t0, and its order is the first band
// whose lower edge lies at or below the distance.
struct Edges {
  double t0 = 0.0;
  std::vector<double> low;  // low[q], q >= 1
};

Edges make_edges(const TimeSetParams& par, int p, int qmax) {
  Edges e;
  const double a = par.alpha, l2 = par.l2;
  const double sp = s_alpha(p, a);
  e.t0 = 4.0 * par.gamma / l2 + (p != 0 ? sp / (a * l2) : 0.0);
  e.low.assign(size_t(qmax) + 2, 0.0);
  for (int q = 1; q <= qmax + 1; ++q) {
    e.low[size_t(q)] =
        (q == 1) ? sp / (a * l2)
                 : s_alpha(p == kPInf ? kPInf : p - q + 1, a) *
                       std::pow(a, -double(q)) / l2;
  }
  return e;
}

// -1 when the distance lies below every tabulated band edge.
int q_from_edges(const Edges& e, double d, int qmax) {
  if (d >= e.t0) return 0;
  for (int q = 1; q <= qmax + 1; ++q)
    if (d >= e.low[size_t(q)]) return q;
  return -1;
}

// Largest order any index of absolute value <= jmax can attain, from the
// rotation's Diophantine claim. Symmetric distances halve the constant and
// double the index.
int allowed_order(const TimeSetParams& par, double jmax) {
  const double c = par.rot.dioph_c, dd = par.rot.dioph_d;
  double dmin = c * std::pow(std::max(jmax, 1.0), -dd);
  if (par.symmetric)
    dmin = std::min(dmin, 0.5 * c * std::pow(std::max(2.0 * jmax, 1.0), -dd));
  const double a = par.alpha, l2 = par.l2;
  const double sinf = s_alpha(kPInf, a);
  if (4.0 * par.gamma / l2 + sinf / (a * l2) <= dmin) return 0;
  int q = 1;
  while (q < 400 && sinf * std::pow(a, -double(q)) / l2 > dmin) ++q;
  return q;
}

std::string cex(long long j, const std::string& what) {
  std::ostringstream os;
  os << what << " at j=" << j;
  return os.str();
}

}  // namespace

int q_p(long long j, int p, const TimeSetParams& par) {
  if (j == 0) return 0;
  if (p < 0) throw ConfigError("level must be >= 0");
  const double d = par.dist(j);
  const double a = par.alpha, l2 = par.l2;
  const double sp = s_alpha(p, a);
  if (d >= 4.0 * par.gamma / l2 + (p != 0 ? sp / (a * l2) : 0.0)) return 0;
  if (d >= sp / (a * l2)) return 1;
  for (int q = 2; q <= 399; ++q) {
    const double lo = s_alpha(p == kPInf ? kPInf : p - q + 1, a) *
                      std::pow(a, -double(q)) / l2;
    if (d >= lo) return q;
  }
  throw ConfigError("close return beyond supported order at j=" +
                    std::to_string(j));
}

LPair choose_l(int q, const TimeSetParams& par,
               const std::function<bool(long long)>& in_omega_inf,
               const LPair* prev, bool empirical) {
  if (q < 0) throw ConfigError("order must be >= 0");
  LPair out;
  if (q == 0) return out;

  struct Side {
    long long base, tilde, prev, sign;
    int* slot;
    bool* clean;
  };
  Side sides[2] = {
      {par.u, par.u_tilde(), prev ? prev->l_minus : 0, -1, &out.l_minus,
       &out.clean_minus},
      {par.v, par.v_tilde(), prev ? prev->l_plus : 0, +1, &out.l_plus,
       &out.clean_plus},
  };
  for (const Side& s : sides) {
    const long long lo = std::max(s.base * q, s.prev);
    const long long hi = s.tilde * q;  // exclusive
    if (lo >= hi)
      throw ConfigError("previous interval length exceeds the scan range");
    long long found = -1;
    for (long long k = lo; k < hi; ++k) {
      if (!in_omega_inf(s.sign * k) && !in_omega_inf(s.sign * (k + 1))) {
        found = k;
        break;
      }
    }
    if (found >= 0) {
      *s.slot = int(found);
      *s.clean = true;
    } else if (empirical) {
      double best = -1.0;
      long long bk = lo;
      for (long long k = lo; k < hi; ++k) {
        const double m =
            std::min(par.dist(s.sign * k), par.dist(s.sign * (k + 1)));
        if (m > best) {
          best = m;
          bk = k;
        }
      }
      *s.slot = int(bk);
      *s.clean = false;
    } else {
      throw NoValidL(
          "no two consecutive integers outside the recurrence set in the "
          "mandated range; the recurrence set is too dense for the exact "
          "construction");
    }
  }
  return out;
}

std::vector<long long> IndexSet::list() const {
  std::vector<long long> out;
  for (long long j = 1; j <= n; ++j)
    if (member[size_t(j - 1)]) out.push_back(j);
  return out;
}

std::vector<long long> IndexSet::complement_list() const {
  std::vector<long long> out;
  for (long long j = 1; j <= n; ++j)
    if (!member[size_t(j - 1)]) out.push_back(j);
  return out;
}

std::vector<std::pair<long long, long long>> IndexSet::gaps() const {
  std::vector<std::pair<long long, long long>> out;
  long long run = 0;
  for (long long j = 1; j <= n + 1; ++j) {
    const bool covered = j <= n && !member[size_t(j - 1)];
    if (covered && run == 0) run = j;
    if (!covered && run != 0) {
      out.emplace_back(run, j - 1);
      run = 0;
    }
  }
  return out;
}

long long IndexSet::count() const {
  long long c = 0;
  for (char m : member) c += m != 0;
  return c;
}

TimeSetTable::TimeSetTable(const TimeSetParams& par, long long lo,
                           long long hi, Mode mode, int min_l_levels)
    : par_(par), mode_(mode), lo_(lo), hi_(hi) {
  par_.validate();
  if (lo_ > hi_) throw ConfigError("window is empty");
  if (hi_ < 1)
    throw ConfigError("window must reach into the positive integers");
  if (par_.rot.dioph_c <= 0.0 || par_.rot.dioph_d <= 0.0)
    throw ConfigError(
        "rotation carries no Diophantine claim; cannot bound the padding");
  min_l_levels = std::max(min_l_levels, 1);

  // Interval lengths are needed for every order that occurs in the window,
  // so pre-scan the level-0 orders before sizing anything.
  {
    const Edges e0 = make_edges(par_, 0, 398);
    for (long long j = 1; j <= hi_; ++j) {
      const int q = q_from_edges(e0, par_.dist(j), 398);
      if (q < 0) throw ConfigError("close return beyond supported order");
      max_p_ = std::max(max_p_, q);
    }
  }
  const int levels = std::max(min_l_levels, max_p_);

  const long long reach = std::max(par_.u_tilde(), par_.v_tilde());
  const long long lo_eff =
      std::min(lo_, -(long long)par_.u_tilde() * (levels + 1) - 2);
  const long long hi_eff =
      std::max(hi_, (long long)par_.v_tilde() * (levels + 1) + 2);
  const double maxabs = double(std::max(std::llabs(lo_eff), std::llabs(hi_eff)));

  // Provable order cap: once jmax + reach*(q+1) admits no order above q,
  // nothing outside the padded range can contribute to membership inside it.
  q_cap_ = std::max(2, max_p_ + 1);
  bool settled = false;
  for (int iter = 0; iter < 64 && !settled; ++iter) {
    const int qa =
        allowed_order(par_, maxabs + double(reach) * double(q_cap_ + 1));
    if (qa <= q_cap_)
      settled = true;
    else
      q_cap_ = qa;
  }
  if (!settled) throw ConfigError("order cap iteration did not settle");

  const long long pad = reach * (q_cap_ + 1);
  plo_ = lo_eff - pad;
  phi_ = hi_eff + pad;
  const size_t W = size_t(phi_ - plo_ + 1);

  qinf_.assign(W, 0);
  p0_.assign(W, 0);
  {
    const Edges einf = make_edges(par_, kPInf, q_cap_);
    const Edges e0 = make_edges(par_, 0, q_cap_);
    for (long long j = plo_; j <= phi_; ++j) {
      if (j == 0) continue;
      const double d = par_.dist(j);
      const int qi = q_from_edges(einf, d, q_cap_);
      const int q0 = q_from_edges(e0, d, q_cap_);
      if (qi < 0 || q0 < 0)
        throw ConfigError(
            "observed order exceeds the Diophantine cap; the rotation's "
            "claimed constants are wrong");
      qinf_[idx(j)] = qi;
      p0_[idx(j)] = q0;
      max_q_ = std::max(max_q_, qi);
    }
  }

  p_tables_ = std::min(std::max(6, max_q_ + 2), 12);
  omega_.assign(size_t(p_tables_) + 1, std::vector<char>(W, 0));
  omega_tilde_.assign(size_t(p_tables_) + 1, std::vector<char>(W, 0));
  omega_inf_.assign(W, 0);
  auto mark = [&](std::vector<char>& bits, long long a, long long b) {
    a = std::max(a, plo_);
    b = std::min(b, phi_);
    for (long long k = a; k <= b; ++k) bits[idx(k)] = 1;
  };
  for (int p = 0; p <= p_tables_; ++p) {
    const Edges e = make_edges(par_, p, q_cap_);
    for (long long j = plo_; j <= phi_; ++j) {
      if (j == 0) continue;
      const int q =
          p == 0 ? p0_[idx(j)] : q_from_edges(e, par_.dist(j), q_cap_);
      if (q < 0) throw ConfigError("order cap breached while building tables");
      if (q < 1) continue;
      mark(omega_[size_t(p)], j - (long long)par_.u_tilde() * q,
           j + (long long)par_.v_tilde() * q);
      if (q <= p)
        mark(omega_tilde_[size_t(p)], j - (long long)par_.u_tilde() * q,
             j + (long long)par_.v_tilde() * q);
    }
  }
  for (long long j = plo_; j <= phi_; ++j) {
    const int q = qinf_[idx(j)];
    if (q >= 1)
      mark(omega_inf_, j - (long long)par_.u_tilde() * q,
           j + (long long)par_.v_tilde() * q);
  }

  lm_.assign(size_t(levels) + 1, 0);
  lp_.assign(size_t(levels) + 1, 0);
  clm_.assign(size_t(levels) + 1, 1);
  clp_.assign(size_t(levels) + 1, 1);
  lvalid_.assign(size_t(levels) + 1, 1);
  LPair prev;
  for (int q = 1; q <= levels; ++q) {
    const LPair cur = choose_l(
        q, par_, [&](long long k) { return in_omega_inf(k); }, &prev,
        mode_ == Mode::kEmpirical);
    lm_[size_t(q)] = cur.l_minus;
    lp_[size_t(q)] = cur.l_plus;
    clm_[size_t(q)] = cur.clean_minus;
    clp_[size_t(q)] = cur.clean_plus;
    prev = cur;
  }

  reach_runmax_.assign(size_t(hi_) + 1, 0);
  long long run = 0;
  for (long long m = 1; m <= hi_; ++m) {
    const int p = p0_[idx(m)];
    if (p >= 1) run = std::max(run, m + lp_[size_t(p)]);
    reach_runmax_[size_t(m)] = run;
  }
}

void TimeSetTable::require_padded(long long k) const {
  if (k < plo_ || k > phi_)
    throw ConfigError("index outside the padded window of this table");
}

int TimeSetTable::p_of(long long j) const {
  if (j >= plo_ && j <= phi_) return p0_[idx(j)];
  return q_p(j, 0, par_);
}

int TimeSetTable::q_inf(long long j) const {
  if (j >= plo_ && j <= phi_) return qinf_[idx(j)];
  return q_p(j, kPInf, par_);
}

int TimeSetTable::q_at(long long j, int p) const {
  if (p == 0) return p_of(j);
  if (p == kPInf) return q_inf(j);
  return q_p(j, p, par_);
}

bool TimeSetTable::in_omega(long long k, int p) const {
  require_padded(k);
  if (p == kPInf) return omega_inf_[idx(k)] != 0;
  if (p < 0 || p > p_tables_)
    throw ConfigError("membership tables cover levels 0.." +
                      std::to_string(p_tables_) + " and infinity");
  return omega_[size_t(p)][idx(k)] != 0;
}

bool TimeSetTable::in_omega_tilde(long long k, int p) const {
  if (p <= 0 && p != kPInf) return false;
  require_padded(k);
  if (p == kPInf) return omega_inf_[idx(k)] != 0;
  if (p > p_tables_)
    throw ConfigError("membership tables cover levels 0.." +
                      std::to_string(p_tables_) + " and infinity");
  return omega_tilde_[size_t(p)][idx(k)] != 0;
}

bool TimeSetTable::in_omega_inf(long long k) const {
  require_padded(k);
  return omega_inf_[idx(k)] != 0;
}

std::optional<std::pair<long long, long long>> TimeSetTable::omega_interval(
    long long j, int p) const {
  const int q = q_at(j, p);
  if (q < 1) return std::nullopt;
  return std::make_pair(j - (long long)par_.u_tilde() * q,
                        j + (long long)par_.v_tilde() * q);
}

int TimeSetTable::l_minus(int q) const {
  if (q < 0 || q > l_levels())
    throw ConfigError("order outside the length table");
  return lm_[size_t(q)];
}

int TimeSetTable::l_plus(int q) const {
  if (q < 0 || q > l_levels())
    throw ConfigError("order outside the length table");
  return lp_[size_t(q)];
}

bool TimeSetTable::pair_clean(int q) const {
  if (q < 0 || q > l_levels())
    throw ConfigError("order outside the length table");
  return clm_[size_t(q)] != 0 && clp_[size_t(q)] != 0;
}

bool TimeSetTable::level_valid(int q) const {
  return q >= 0 && q <= l_levels() && lvalid_[size_t(q)] != 0;
}

int TimeSetTable::level_of(long long m) const {
  const int p = p_of(m);
  if (p < 1) throw ConfigError("no exceptional interval at this index");
  if (p > l_levels())
    throw ConfigError("interval lengths not built to this order");
  return p;
}

long long TimeSetTable::lambda_minus(long long m) const {
  return m - lm_[size_t(level_of(m))];
}

long long TimeSetTable::lambda_plus(long long m) const {
  return m + lp_[size_t(level_of(m))];
}

std::optional<std::pair<long long, long long>> TimeSetTable::j_interval(
    long long m) const {
  if (p_of(m) < 1) return std::nullopt;
  return std::make_pair(lambda_minus(m), lambda_plus(m));
}

bool TimeSetTable::admissible(long long n) const {
  if (n < 1 || n > hi_) throw ConfigError("n outside the table window");
  if (n == 1) return true;
  return reach_runmax_[size_t(n - 1)] < n;
}

long long TimeSetTable::nu(int q) const {
  if (q < 1) throw ConfigError("order must be >= 1");
  for (long long j = 1; j <= hi_; ++j)
    if (p_of(j) >= q) return j;
  throw TargetUnreachable("no close return of that order in the window");
}

long long TimeSetTable::nu_tilde(int q) const {
  if (q < 1) throw ConfigError("order must be >= 1");
  const double a = par_.alpha, l2 = par_.l2;
  const double thr =
      q == 1 ? 3.0 * (4.0 * par_.gamma / l2 + s_alpha(kPInf, a) / (a * l2))
             : 3.0 * s_alpha(kPInf, a) * std::pow(a, -double(q - 1)) / l2;
  for (long long j = 1; j <= hi_; ++j)
    if (par_.dist(j) < thr) return j;
  throw TargetUnreachable("no approach below that threshold in the window");
}

IndexSet admissible_set(long long n, const TimeSetTable& t) {
  if (n < 1 || n > t.hi()) throw ConfigError("n outside the table window");
  IndexSet out;
  out.n = n;
  out.member.assign(size_t(n), 1);
  long long run = 0;  // max right endpoint over returns m <= j-1
  for (long long j = 1; j <= n; ++j) {
    const int p = t.p_of(j);
    const bool own = p >= 1 && j <= n - 1;
    if (own || run >= j) out.member[size_t(j - 1)] = 0;
    if (p >= 1) run = std::max(run, j + t.l_plus(p));
  }
  long long mn = std::numeric_limits<long long>::max();  // min left endpoint over returns m > j
  for (long long j = n; j >= 1; --j) {
    if (mn <= j) out.member[size_t(j - 1)] = 0;
    if (j <= n - 1) {
      const int p = t.p_of(j);
      if (p >= 1) mn = std::min(mn, j - t.l_minus(p));
    }
  }
  return out;
}

RegularSet regular_set(long long n, const TimeSetTable& t) {
  if (n < 1 || n > t.hi()) throw ConfigError("n outside the table window");
  auto it = t.rcache_.find(n);
  if (it != t.rcache_.end()) return *it->second;
  if (!t.admissible(n))
    throw NotAdmissible(
        "n lies inside the exceptional interval of an earlier close return");

  RegularSet out;
  out.set = admissible_set(n, t);
  for (const auto& [klo, khi] : out.set.gaps()) {
    int pk = 0, count = 0;
    long long m = -1;
    for (long long j = klo; j <= khi; ++j) {
      const int pj = t.p_of(j);
      if (pj > pk) {
        pk = pj;
        m = j;
        count = 1;
      } else if (pj == pk && pj > 0) {
        ++count;
      }
    }
    bool ok = count == 1 && pk >= 1 && pk <= t.l_levels();
    if (ok) {
      const auto ji = t.j_interval(m);
      ok = ji && ji->first == klo && ji->second == khi;
    }
    if (!ok) {
      out.clean = false;
      out.notes.push_back("unresolved covered interval [" +
                          std::to_string(klo) + "," + std::to_string(khi) +
                          "]");
      continue;
    }
    long long base = t.l_plus(pk);
    while (base >= 1 && !t.admissible(base)) --base;
    if (base != t.l_plus(pk)) {
      out.clean = false;
      out.notes.push_back("translate base lowered to " + std::to_string(base) +
                          " for interval at " + std::to_string(m));
    }
    if (base >= 1) {
      const RegularSet sub = regular_set(base, t);
      if (!sub.clean) out.clean = false;
      for (long long x : sub.set.list()) {
        const long long y = m + x;
        if (y > m && y <= khi) {
          out.set.member[size_t(y - 1)] = 1;
        } else {
          out.clean = false;
          out.notes.push_back("translate clipped at " + std::to_string(y));
        }
      }
    }
  }
  t.rcache_[n] = std::make_shared<const RegularSet>(out);
  return out;
}

DensityReport density_functions(const TimeSetParams& par, long long n) {
  if (n < 1) throw ConfigError("window must be positive");
  const TimeSetTable t(par, -n, n, TimeSetTable::Mode::kEmpirical, 1);
  DensityReport out;
  const long long w = par.w();
  out.h_emp = std::numeric_limits<double>::infinity();
  out.thresholds_hold = true;
  for (int q = 1; (long long)(q + 2) * w <= n && q < 200; ++q) {
    long long nt;
    try {
      nt = t.nu_tilde(q);
    } catch (const TargetUnreachable&) {
      out.q_certified = q;  // first approach of this depth lies beyond n
      continue;
    }
    out.h_emp = std::min(out.h_emp, double(nt) / (double(q + 2) * double(w)));
    if (nt < (long long)(q + 2) * w) out.thresholds_hold = false;
    out.q_certified = q;
  }
  if (std::isinf(out.h_emp)) out.h_emp = 0.0;

  out.density_holds = true;
  for (int side = 0; side < 2; ++side) {
    long long cnt = 0;
    for (long long k = 1; k <= n; ++k) {
      cnt += t.in_omega_inf(side == 0 ? k : -k) ? 1 : 0;
      out.big_h_emp = std::max(out.big_h_emp, double(cnt) / double(k));
      if (double(cnt) > double(k) / (12.0 * double(w)) && out.density_holds) {
        out.density_holds = false;
        out.first_density_violation = side == 0 ? k : -k;
      }
    }
  }
  return out;
}

bool LemmaReport::enforced_ok() const {
  for (const auto& it : items)
    if (it.enforced && it.violations > 0) return false;
  return true;
}

const LemmaCheck* LemmaReport::find(const std::string& name) const {
  for (const auto& it : items)
    if (it.name == name) return &it;
  return nullptr;
}

namespace {

class ItemScope {
 public:
  ItemScope(LemmaReport& rep, std::string name, bool enforced, long long cap)
      : rep_(rep), cap_(cap) {
    item_.name = std::move(name);
    item_.enforced = enforced;
  }
  ~ItemScope() { rep_.items.push_back(item_); }

  bool budget() const { return item_.cases < cap_; }
  void record(bool ok, const std::string& counterexample) {
    ++item_.cases;
    if (!ok) {
      ++item_.violations;
      if (item_.first_counterexample.empty())
        item_.first_counterexample = counterexample;
    }
  }

 private:
  LemmaReport& rep_;
  LemmaCheck item_;
  long long cap_;
};

std::vector<long long> fibonacci_upto(long long hi) {
  std::vector<long long> out;
  long long a = 1, b = 2;
  while (a <= hi) {
    out.push_back(a);
    const long long c = a + b;
    a = b;
    b = c;
  }
  return out;
}

}  // namespace

LemmaReport verify_timeset_lemmas(const TimeSetTable& t,
                                  const LemmaBudget& budget) {
  LemmaReport rep;
  const TimeSetParams& par = t.params();
  const long long H = t.hi();
  const long long L = t.lo();
  const long long w = par.w();
  rep.predicates = check_param_predicates(par);

  // First times of each depth, with hi+1 standing in for "beyond the window".
  const int qtrack = t.l_levels() + 2;
  std::vector<long long> nu_of(size_t(qtrack) + 1, H + 1);
  std::vector<long long> nut_of(size_t(qtrack) + 1, H + 1);
  for (int q = 1; q <= qtrack; ++q) {
    try {
      nu_of[size_t(q)] = t.nu(q);
    } catch (const TargetUnreachable&) {
    }
    try {
      nut_of[size_t(q)] = t.nu_tilde(q);
    } catch (const TargetUnreachable&) {
    }
  }

  // Empirical threshold growth and recurrence density over this window.
  {
    rep.thresholds_hold = true;
    for (int q = 1; q <= qtrack; ++q) {
      if ((long long)(q + 2) * w > H) break;
      if (nut_of[size_t(q)] < (long long)(q + 2) * w)
        rep.thresholds_hold = false;
    }
    rep.density_holds = true;
    for (int side = 0; side < 2; ++side) {
      const long long extent = side == 0 ? H : std::max<long long>(0, -L);
      long long cnt = 0;
      for (long long k = 1; k <= extent && rep.density_holds; ++k) {
        cnt += t.in_omega_inf(side == 0 ? k : -k) ? 1 : 0;
        if (double(cnt) > double(k) / (12.0 * double(w)))
          rep.density_holds = false;
      }
    }
  }
  rep.standing = rep.predicates.gamma_small && rep.predicates.alpha_vs_gamma &&
                 rep.thresholds_hold && rep.density_holds;
  const bool chain_gate =
      rep.predicates.alpha_dominates_sum && rep.predicates.gamma_above_tail;
  const bool shift_gate =
      rep.predicates.gamma_small && rep.predicates.alpha_vs_gamma;
  const bool stand_gate = rep.standing;
  const bool regs_gate =
      rep.standing && rep.predicates.u_ok && rep.predicates.v_ok;
  const long long cap = budget.max_cases_per_item;

  std::vector<int> plist;
  for (int p = 0; p <= 6; ++p) plist.push_back(p);

  // Orders grow with the level and are pinned between p(j) and p(j)+1.
  {
    ItemScope item(rep, "order-chain", chain_gate, cap);
    for (long long j = L; j <= H && item.budget(); ++j) {
      const int p0 = t.p_of(j);
      const int qi = t.q_inf(j);
      bool ok = p0 <= qi && qi <= p0 + 1;
      int prev = p0;
      for (int p : plist) {
        const int qp = t.q_at(j, p);
        ok = ok && qp >= prev && qp <= qi;
        prev = qp;
      }
      item.record(ok, cex(j, "order chain broken"));
    }
  }

  // Shifting by a deep close return moves level p-2 orders to level p-1.
  {
    ItemScope item(rep, "shift-compatibility", shift_gate, cap);
    for (long long m = 1; m <= H; ++m) {
      const int pm = t.p_of(m);
      if (pm < 2) continue;
      const long long klo = L + m, khi = H - m;
      if (klo > khi) continue;
      const long long stride = std::max<long long>(1, (khi - klo + 1) / 4096);
      for (int p = 2; p <= pm && item.budget(); ++p) {
        for (long long k = klo; k <= khi && item.budget(); k += stride) {
          if (k == 0) continue;
          const int qlow = t.q_at(k, p - 2);
          if (qlow > p - 2) continue;
          bool ok = true;
          for (int sgn : {-1, +1}) {
            const int qs = t.q_at(k + sgn * m, p - 1);
            ok = ok && qlow <= qs && qs <= qlow + 1;
          }
          if (t.in_omega_tilde(k, p - 2)) {
            for (int sgn : {-1, +1})
              ok = ok && t.in_omega_tilde(k + sgn * m, p - 1);
          }
          item.record(ok, cex(k, "shift by " + std::to_string(m) +
                                     " broke level " + std::to_string(p)));
        }
      }
    }
  }

  // A fixed gap around the origin stays clear of the recurrence set.
  {
    ItemScope item(rep, "origin-gap", stand_gate, cap);
    for (long long k = -2; k <= 2; ++k)
      item.record(!t.in_omega_inf(k), cex(k, "origin neighborhood covered"));
  }

  // The interval of a return of order q avoids a box around the origin.
  {
    ItemScope item(rep, "self-exclusion", stand_gate, cap);
    for (long long j = L; j <= H && item.budget(); ++j) {
      const int q = t.q_inf(j);
      if (q < 1) continue;
      const long long a = j - (long long)par.u_tilde() * q;
      const long long b = j + (long long)par.v_tilde() * q;
      const long long boxa = -(long long)par.u_tilde() * (q + 2);
      const long long boxb = (long long)par.v_tilde() * (q + 2);
      item.record(std::max(a, boxa) > std::min(b, boxb),
                  cex(j, "interval reaches the origin box"));
    }
  }

  // Returns of comparable order have disjoint intervals.
  {
    ItemScope item(rep, "far-return-disjointness", stand_gate, cap);
    std::vector<long long> S;
    for (long long j = L; j <= H; ++j)
      if (t.q_inf(j) >= 1) S.push_back(j);
    for (size_t i = 0; i < S.size(); ++i) {
      const long long m = S[i];
      const int qm = t.q_inf(m);
      for (size_t k = i + 1; k < S.size() && item.budget(); ++k) {
        const long long n = S[k];
        const int qn = t.q_inf(n);
        if (n - m > (long long)par.v_tilde() * qm +
                        (long long)par.u_tilde() * t.max_q() + 1)
          break;
        bool close = std::abs(qm - qn) <= 2;
        for (int p : plist)
          close = close || std::abs(t.q_at(m, p) - t.q_at(n, p)) <= 1;
        if (!close) continue;
        const bool overlap =
            std::max(m - (long long)par.u_tilde() * qm,
                     n - (long long)par.u_tilde() * qn) <=
            std::min(m + (long long)par.v_tilde() * qm,
                     n + (long long)par.v_tilde() * qn);
        item.record(!overlap,
                    cex(m, "interval collides with j=" + std::to_string(n)));
      }
    }
  }

  // The interval half-lengths exist in their mandated ranges with clear
  // flanks, monotonically in the order.
  {
    ItemScope item(rep, "interval-choices", stand_gate, cap);
    for (int q = 1; q <= t.l_levels(); ++q) {
      const long long lm = t.l_minus(q), lp = t.l_plus(q);
      bool ok = t.pair_clean(q);
      ok = ok && lm >= (long long)par.u * q && lm < (long long)par.u_tilde() * q;
      ok = ok && lp >= (long long)par.v * q && lp < (long long)par.v_tilde() * q;
      ok = ok && !t.in_omega_inf(-lm) && !t.in_omega_inf(-lm - 1);
      ok = ok && !t.in_omega_inf(lp) && !t.in_omega_inf(lp + 1);
      if (q > 1) ok = ok && lm >= t.l_minus(q - 1) && lp >= t.l_plus(q - 1);
      item.record(ok, cex(q, "length pair out of contract"));
    }
  }

  // Exceptional intervals sit inside the level-0 interval of their return.
  {
    ItemScope item(rep, "interval-envelope", stand_gate, cap);
    for (long long m = 1; m <= H - 1 && item.budget(); ++m) {
      const int p = t.p_of(m);
      if (p < 1 || p > t.l_levels()) continue;
      const auto ji = t.j_interval(m);
      const bool ok = ji && ji->first - 1 >= m - (long long)par.u_tilde() * p &&
                      ji->second + 1 <= m + (long long)par.v_tilde() * p;
      item.record(ok, cex(m, "exceptional interval escapes its envelope"));
    }
  }

  // Exceptional intervals of returns with neighboring order are disjoint.
  {
    ItemScope item(rep, "exceptional-disjointness", stand_gate, cap);
    std::vector<long long> S;
    for (long long m = 1; m <= H - 1; ++m)
      if (t.p_of(m) >= 1 && t.p_of(m) <= t.l_levels()) S.push_back(m);
    const long long lmax = t.l_levels() >= 1 ? t.l_minus(t.l_levels()) : 0;
    for (size_t i = 0; i < S.size(); ++i) {
      const long long m = S[i];
      const auto a = *t.j_interval(m);
      for (size_t k = i + 1; k < S.size() && item.budget(); ++k) {
        const long long n = S[k];
        if (n - m > (long long)t.l_plus(t.p_of(m)) + lmax + 1) break;
        if (std::abs(t.p_of(m) - t.p_of(n)) > 1) continue;
        const auto b = *t.j_interval(n);
        item.record(std::max(a.first, b.first) > std::min(a.second, b.second),
                    cex(m, "exceptional interval collides with m=" +
                               std::to_string(n)));
      }
    }
  }

  // Sample times for the set-level checks.
  std::vector<long long> ns;
  for (long long n = 1; n <= std::min<long long>(H, 384); ++n) ns.push_back(n);
  for (long long f : fibonacci_upto(H)) ns.push_back(f);
  for (int q = 1; q <= t.l_levels(); ++q) {
    for (long long d = -1; d <= 2; ++d) {
      const long long n = t.l_plus(q) + d;
      if (n >= 1 && n <= H) ns.push_back(n);
    }
  }
  for (int q = 1; q <= qtrack; ++q) {
    if (nu_of[size_t(q)] <= H) ns.push_back(nu_of[size_t(q)]);
    if (nut_of[size_t(q)] <= H) ns.push_back(nut_of[size_t(q)]);
  }
  for (long long d = 0; d <= 4 && H - d >= 1; ++d) ns.push_back(H - d);
  {
    UniformRng rng(budget.seed);
    for (int i = 0; i < budget.n_samples; ++i)
      ns.push_back(1 + rng.next_index(H));
  }
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  std::vector<long long> adm;
  for (long long n : ns)
    if (t.admissible(n)) adm.push_back(n);

  std::map<long long, IndexSet> aset;
  auto aset_at = [&](long long n) -> const IndexSet& {
    auto it = aset.find(n);
    if (it == aset.end()) it = aset.emplace(n, admissible_set(n, t)).first;
    return it->second;
  };

  // Restricting to a smaller window can only add members.
  {
    ItemScope item(rep, "restriction-consistency", true, cap);
    for (size_t i = 0; i + 1 < ns.size() && item.budget(); ++i) {
      const IndexSet& small = aset_at(ns[i]);
      const IndexSet& big = aset_at(ns[i + 1]);
      bool ok = true;
      long long bad = 0;
      for (long long j = 1; j <= small.n; ++j) {
        if (big.contains(j) && !small.contains(j)) {
          ok = false;
          bad = j;
          break;
        }
      }
      item.record(ok, cex(bad, "restriction lost a member"));
    }
  }

  // Below a time that survives in a larger window, all windows agree.
  {
    ItemScope item(rep, "prefix-stabilization", true, cap);
    UniformRng rng(budget.seed + 1);
    for (int trial = 0; trial < budget.n_samples && item.budget(); ++trial) {
      const long long n2 = ns[size_t(rng.next_index((long long)ns.size()))];
      const auto members = aset_at(n2).list();
      if (members.empty()) continue;
      const long long n0 =
          members[size_t(rng.next_index((long long)members.size()))];
      const long long n1 = n0 + rng.next_index(n2 - n0 + 1);
      const IndexSet a1 = admissible_set(n1, t);
      const IndexSet& a0 = aset_at(n0);
      const IndexSet& a2 = aset_at(n2);
      bool ok = true;
      for (long long j = 1; j <= n0 && ok; ++j)
        ok = a1.contains(j) == a0.contains(j) &&
             a2.contains(j) == a0.contains(j);
      item.record(ok, cex(n0, "prefix differs under windows " +
                                  std::to_string(n1) + "," +
                                  std::to_string(n2)));
    }
    // Times outside the level-0 recurrence set stabilize every later window.
    const size_t stride0 = std::max<size_t>(1, adm.size() / 16);
    const size_t stride1 = std::max<size_t>(1, ns.size() / 8);
    for (size_t i0 = 0; i0 < adm.size() && item.budget(); i0 += stride0) {
      const long long n0 = adm[i0];
      if (t.in_omega(n0, 0)) continue;
      const IndexSet& a0 = aset_at(n0);
      for (size_t k = 0; k < ns.size() && item.budget(); k += stride1) {
        const long long n = ns[k];
        if (n < n0) continue;
        const IndexSet& an = aset_at(n);
        bool ok = true;
        for (long long j = 1; j <= n0 && ok; ++j)
          ok = an.contains(j) == a0.contains(j);
        item.record(ok,
                    cex(n0, "prefix moved under window " + std::to_string(n)));
      }
    }
  }

  // Times outside the level-0 recurrence set are admissible.
  {
    ItemScope item(rep, "outside-implies-admissible", stand_gate, cap);
    for (long long n = 1; n <= H && item.budget(); ++n) {
      if (t.in_omega(n, 0)) continue;
      item.record(t.admissible(n), cex(n, "uncovered time not admissible"));
    }
  }

  // Membership in any admissible-set window implies admissibility.
  {
    ItemScope item(rep, "hereditary-admissibility", true, cap);
    for (long long n : ns) {
      if (!item.budget()) break;
      for (long long j : aset_at(n).list()) {
        if (!item.budget()) break;
        item.record(t.admissible(j),
                    cex(j, "member of window " + std::to_string(n) +
                               " not admissible"));
      }
    }
  }

  // For admissible n the covered part is exactly the union of the
  // exceptional intervals of earlier returns, none of which reaches n.
  {
    ItemScope item(rep, "covered-decomposition", true, cap);
    for (long long n : adm) {
      if (!item.budget()) break;
      const IndexSet& a = aset_at(n);
      std::vector<char> cover(size_t(n), 0);
      bool unclipped = true;
      for (long long m = 1; m <= n - 1; ++m) {
        const auto ji = t.j_interval(m);
        if (!ji) continue;
        if (ji->second >= n) unclipped = false;
        for (long long j = std::max<long long>(1, ji->first);
             j <= std::min(n, ji->second); ++j)
          cover[size_t(j - 1)] = 1;
      }
      bool match = true;
      for (long long j = 1; j <= n && match; ++j)
        match = (cover[size_t(j - 1)] != 0) == !a.contains(j);
      item.record(match && unclipped, cex(n, "covered part mismatched"));
    }
  }

  // Each maximal covered interval has a unique deepest return, equals that
  // return's exceptional interval, and is shallow away from the center.
  std::vector<std::pair<long long, int>> centrals;
  {
    ItemScope item(rep, "central-points", stand_gate, cap);
    for (long long n : adm) {
      const IndexSet& a = aset_at(n);
      for (const auto& [klo, khi] : a.gaps()) {
        if (!item.budget()) break;
        int pk = 0, count = 0;
        long long m = -1;
        for (long long j = klo; j <= khi; ++j) {
          const int pj = t.p_of(j);
          if (pj > pk) {
            pk = pj;
            m = j;
            count = 1;
          } else if (pj == pk && pj > 0) {
            ++count;
          }
        }
        bool ok = count == 1 && pk >= 1 && pk <= t.l_levels();
        if (ok) {
          const auto ji = t.j_interval(m);
          ok = ji && ji->first == klo && ji->second == khi;
          for (long long j = klo; j <= khi && ok; ++j) {
            if (j == m) continue;
            ok = t.p_of(j) <= t.q_inf(j) && t.q_inf(j) <= std::max(0, pk - 2);
          }
          if (ok) centrals.emplace_back(m, pk);
        }
        item.record(ok, cex(klo, "covered interval without clean center"));
      }
    }
    std::sort(centrals.begin(), centrals.end());
    centrals.erase(std::unique(centrals.begin(), centrals.end()),
                   centrals.end());
  }

  // Central returns and their left approach times are admissible; the
  // interval around them is shallow at every order up to the center's.
  {
    ItemScope item(rep, "central-admissible", stand_gate, cap);
    for (const auto& [m, pk] : centrals) {
      if (!item.budget()) break;
      const IndexSet am = admissible_set(m, t);
      bool ok = am.contains(m);
      for (int q = 1; q <= pk; ++q) {
        const long long lm = t.l_minus(q);
        ok = ok && m - lm >= 1 && am.contains(m - lm) && am.contains(m - lm - 1);
        for (long long j = m - lm; j <= m + t.l_plus(q); ++j) {
          if (j == m) continue;
          ok = ok && t.q_inf(j) <= std::max(0, q - 2);
        }
      }
      if (m + t.l_plus(pk) + 1 <= H)
        ok = ok && t.admissible(m + t.l_plus(pk) + 1);
      item.record(ok, cex(m, "central point block not admissible"));
    }
    for (int q = 1; q <= t.l_levels() && item.budget(); ++q) {
      const long long nq = nu_of[size_t(q)];
      if (nq > H) continue;
      const IndexSet an = admissible_set(nq, t);
      bool ok = an.contains(nq);
      const long long lm = t.l_minus(q);
      if (nq - lm >= 1)
        ok = ok && an.contains(nq - lm) &&
             (nq - lm - 1 < 1 || an.contains(nq - lm - 1));
      for (long long j = nq - lm; j <= nq + t.l_plus(q); ++j) {
        if (j == nq) continue;
        ok = ok && t.q_inf(j) <= std::max(0, q - 2);
      }
      item.record(ok, cex(nq, "first return of the order not admissible"));
    }
  }

  // Regular sets contain the admissible set and stay inside [1, n].
  {
    ItemScope item(rep, "regular-base", true, cap);
    for (long long n : adm) {
      if (!item.budget()) break;
      const RegularSet r = regular_set(n, t);
      const IndexSet& a = aset_at(n);
      bool ok = r.set.n == n;
      for (long long j = 1; j <= n && ok; ++j)
        ok = !a.contains(j) || r.set.contains(j);
      item.record(ok, cex(n, "regular set dropped an admissible time"));
    }
  }

  // Inside each resolved covered interval the regular points are a clean
  // translate of the regular set at the interval's length scale.
  {
    ItemScope item(rep, "regular-translate", true, cap);
    for (long long n : adm) {
      if (!item.budget()) break;
      const RegularSet r = regular_set(n, t);
      if (!r.clean) continue;
      const IndexSet& a = aset_at(n);
      for (const auto& [klo, khi] : a.gaps()) {
        if (!item.budget()) break;
        int pk = 0;
        long long m = -1;
        for (long long j = klo; j <= khi; ++j)
          if (t.p_of(j) > pk) {
            pk = t.p_of(j);
            m = j;
          }
        if (pk < 1 || pk > t.l_levels()) continue;
        const long long base = t.l_plus(pk);
        if (base < 1 || base > t.hi() || !t.admissible(base)) continue;
        const RegularSet sub = regular_set(base, t);
        bool ok = true;
        for (long long x = 1; x <= base && ok; ++x)
          ok = sub.set.contains(x) == r.set.contains(m + x);
        for (long long y = klo; y <= m && ok; ++y) ok = !r.set.contains(y);
        item.record(ok, cex(m, "translate mismatch inside covered interval"));
      }
    }
  }

  // Regular prefixes stabilize below a surviving time.
  {
    ItemScope item(rep, "regular-stabilization", true, cap);
    UniformRng rng(budget.seed + 2);
    for (int trial = 0; trial < budget.n_samples && item.budget(); ++trial) {
      if (adm.empty()) break;
      const long long n2 = adm[size_t(rng.next_index((long long)adm.size()))];
      const auto mem = aset_at(n2).list();
      if (mem.empty()) continue;
      const long long n0 = mem[size_t(rng.next_index((long long)mem.size()))];
      long long n1 = -1;
      for (long long c : adm)
        if (c >= n0 && c <= n2) {
          n1 = c;
          if (rng.next() < 0.5) break;
        }
      if (n1 < 0) continue;
      const RegularSet r0 = regular_set(n0, t);
      const RegularSet r1 = regular_set(n1, t);
      const RegularSet r2 = regular_set(n2, t);
      bool ok = true;
      for (long long j = 1; j <= n0 && ok; ++j) {
        const bool v = r0.set.contains(j);
        ok = r1.set.contains(j) == v && r2.set.contains(j) == v;
      }
      item.record(ok, cex(n0, "regular prefix differs under " +
                                  std::to_string(n1) + "," +
                                  std::to_string(n2)));
    }
  }

  // The first times, and both flanks of each length scale, stay admissible;
  // the mandated members of each translate are present.
  {
    ItemScope item(rep, "regular-endpoints", stand_gate, cap);
    for (long long n : adm) {
      if (!item.budget()) break;
      const IndexSet& a = aset_at(n);
      bool ok = a.contains(1) && (n < 2 || a.contains(2));
      for (int q = 1; q <= t.l_levels(); ++q) {
        const long long lp = t.l_plus(q);
        if (n >= lp + 1) ok = ok && a.contains(lp) && a.contains(lp + 1);
      }
      item.record(ok, cex(n, "endpoint missing from admissible window"));
    }
    for (const auto& [m, pk] : centrals) {
      if (!item.budget()) break;
      const long long n = m + t.l_plus(pk) + 1;
      if (n > H || !t.admissible(n)) continue;
      const RegularSet r = regular_set(n, t);
      bool ok = r.set.contains(m + 1) && r.set.contains(m + 2);
      for (int q = 1; q <= pk; ++q) {
        ok = ok && r.set.contains(m + t.l_plus(q));
        if (q < pk) ok = ok && r.set.contains(m + t.l_plus(q) + 1);
      }
      item.record(ok, cex(m, "translate lost a mandated member"));
    }
  }

  // The non-regular part is unchanged when the window grows past a length
  // scale by one.
  {
    ItemScope item(rep, "nonregular-tail-match", stand_gate, cap);
    for (int q = 1; q <= t.l_levels(); ++q) {
      const long long lp = t.l_plus(q);
      if (lp + 1 > H) continue;
      if (!t.admissible(lp) || !t.admissible(lp + 1)) {
        item.record(false, cex(lp, "length scale not admissible"));
        continue;
      }
      const RegularSet ra = regular_set(lp, t);
      const RegularSet rb = regular_set(lp + 1, t);
      bool ok = rb.set.contains(lp + 1);
      for (long long j = 1; j <= lp && ok; ++j)
        ok = ra.set.contains(j) == rb.set.contains(j);
      item.record(ok, cex(lp, "non-regular part moved across the scale"));
    }
  }

  // Non-regular times live inside the recurrence hierarchy.
  {
    ItemScope item(rep, "nonregular-envelope", stand_gate, cap);
    for (long long n : adm) {
      if (!item.budget()) break;
      const RegularSet r = regular_set(n, t);
      const auto gam = r.set.complement_list();
      bool ok = true;
      long long bad = 0;
      for (long long j : gam) {
        if (!t.in_omega(j, 0)) {
          ok = false;
          bad = j;
          break;
        }
      }
      for (int q = 1; q <= qtrack && ok; ++q) {
        if (n > nut_of[size_t(q)] || q - 1 > 6) continue;
        for (long long j : gam) {
          if (!t.in_omega_tilde(j, q - 1)) {
            ok = false;
            bad = j;
            break;
          }
        }
      }
      item.record(ok, cex(bad, "non-regular time escapes the hierarchy"));
    }
  }

  // Regular times keep their distance from the peak.
  {
    ItemScope item(rep, "regular-distance-floor", stand_gate, cap);
    for (long long n : adm) {
      if (!item.budget()) break;
      int qstar = 0;
      for (int q = 1; q <= qtrack; ++q)
        if (nu_of[size_t(q)] >= n) {
          qstar = q;
          break;
        }
      if (qstar == 0) continue;
      const double bound = 4.0 * par.gamma / par.l2 -
                           s_alpha(qstar - 1, par.alpha) / (par.alpha * par.l2);
      bool ok = bound >= 3.0 * par.gamma / par.l2 - 1e-15;
      long long bad = 0;
      const RegularSet r = regular_set(n, t);
      for (long long j : r.set.list()) {
        if (j == n) continue;
        if (par.dist(j) < bound) {
          ok = false;
          bad = j;
          break;
        }
      }
      item.record(ok, cex(bad, "regular time too close to the peak"));
    }
  }

  // Non-regular times are sparse in every prefix and behind every length
  // scale.
  {
    ItemScope item(rep, "sparse-nonregular", regs_gate, cap);
    for (long long n : adm) {
      if (!item.budget()) break;
      const RegularSet r = regular_set(n, t);
      long long cnt = 0;
      bool ok = true;
      long long bad = 0;
      for (long long j = 1; j <= n; ++j) {
        cnt += r.set.contains(j) ? 0 : 1;
        if (double(cnt) > double(j) / (12.0 * double(w))) {
          ok = false;
          bad = j;
          break;
        }
      }
      for (int q = 1; q <= t.l_levels() && ok; ++q) {
        const long long lp = t.l_plus(q);
        if (lp > n) continue;
        long long c = 0;
        for (long long j = 1; j <= lp; ++j) c += r.set.contains(j) ? 0 : 1;
        if (c > q / 12) {
          ok = false;
          bad = lp;
        }
      }
      item.record(ok, cex(bad, "non-regular excess in a prefix"));
    }
  }

  // Every suffix of a length-scale window, and every suffix ending at a
  // covered interval, stays mostly regular.
  {
    ItemScope item(rep, "tail-density", regs_gate, cap);
    const double sigma = par.sigma();
    for (int q = 1; q <= t.l_levels(); ++q) {
      const long long lp = t.l_plus(q);
      if (lp > H || !t.admissible(lp)) continue;
      const RegularSet r = regular_set(lp, t);
      long long cnt = 0;
      bool ok = true;
      long long bad = 0;
      for (long long j = lp - 1; j >= 0; --j) {
        cnt += r.set.contains(j + 1) ? 0 : 1;
        if (double(cnt) > sigma * double(lp - j) + 1e-12) {
          ok = false;
          bad = j;
          break;
        }
      }
      item.record(ok, cex(bad, "suffix of the scale window too irregular"));
    }
    for (long long n : adm) {
      if (!item.budget()) break;
      const RegularSet r = regular_set(n, t);
      const IndexSet& a = aset_at(n);
      const auto gam = r.set.complement_list();  // ascending
      for (const auto& [klo, khi] : a.gaps()) {
        if (!item.budget()) break;
        // The suffix count only changes at non-regular times and the bound
        // tightens as j grows, so checking j = 0 and j = g - 1 for each
        // non-regular g <= khi is exhaustive.
        long long total = 0;
        for (long long g : gam) total += g <= khi ? 1 : 0;
        bool ok = double(total) <= sigma * double(khi) + 1e-12;
        long long bad = ok ? 0 : -1;
        long long seen = 0;
        for (long long g : gam) {
          if (g > khi) break;
          if (g - 1 >= 1 &&
              double(total - seen) > sigma * double(khi - (g - 1)) + 1e-12) {
            ok = false;
            bad = g - 1;
            break;
          }
          ++seen;
        }
        item.record(ok,
                    cex(bad, "suffix before an interval end too irregular"));
      }
    }
  }

  // The approach to a central return is mostly regular.
  {
    ItemScope item(rep, "approach-density", regs_gate, cap);
    for (const auto& [m, pk] : centrals) {
      if (!item.budget()) break;
      if (!t.admissible(m)) {
        item.record(false, cex(m, "central return not admissible"));
        continue;
      }
      const RegularSet r = regular_set(m, t);
      for (int q = 1; q <= pk; ++q) {
        long long cnt = 0;
        for (long long j = m - t.l_minus(q); j <= m; ++j)
          cnt += (j >= 1 && r.set.contains(j)) ? 0 : 1;
        item.record(double(cnt) <= double(q) / 12.0 + 1e-12,
                    cex(m, "approach window too irregular"));
      }
    }
  }

  // The first deep return comes after the closeness threshold of its order,
  // and the length scales sit below the thresholds two orders down.
  {
    ItemScope item(rep, "order-thresholds", stand_gate, cap);
    for (int q = 1; q <= t.l_levels(); ++q) {
      const long long nq = nu_of[size_t(q)];
      const long long ntq = nut_of[size_t(q)];
      const long long ntq2 = nut_of[size_t(std::max(1, q - 2))];
      bool ok = ntq <= nq;
      ok = ok && t.l_minus(q) >= std::min(par.u, par.v) * q &&
           t.l_plus(q) >= std::min(par.u, par.v) * q;
      ok = ok && t.l_minus(q) < ntq2 && t.l_plus(q) < ntq2;
      item.record(ok, cex(q, "threshold ordering broken"));
    }
  }

  return rep;
}

}  // namespace qpf
