#include "qpf/systems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "qpf/errors.hpp"
#include "qpf/kernel.hpp"

namespace qpf {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

// Positive root of f on (lo, hi]; f must be positive at lo and negative at hi.
double bisect_root(const std::function<double(double)>& f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ForcingFunction one_sided_sin_forcing() {
  ForcingFunction g;
  g.evaluator = [](double theta) {
    return OneSidedSinForcing<double>{}.value(wrap_unit(theta));
  };
  g.lipschitz_l1 = kPi;
  g.peak_l2 = 2.0;
  g.peak_location = {0.0};
  g.range = {0.0, 1.0};
  return g;
}

ForcingFunction symmetric_tent_forcing() {
  ForcingFunction g;
  g.evaluator = [](double theta) { return 1 - 4 * circle_dist(theta, 0.0); };
  g.lipschitz_l1 = 4.0;
  g.peak_l2 = 4.0;
  g.peak_location = {0.0, 0.5};
  g.range = {-1.0, 1.0};
  g.symmetric = true;
  return g;
}

double wrap_projective(double x) {
  double y = x - kPi * std::round(x / kPi);
  if (y <= -kPi / 2) y += kPi;
  return y;
}

}  // namespace

double fibre_apply(const QpfSystem& sys, double theta, double x) {
  theta = wrap_unit(theta);
  switch (sys.geometry) {
    case FibreGeometry::kInterval: {
      const Interval dom = sys.base ? sys.base->domain : Interval{-3.0, 3.0};
      if (!dom.contains(x, 1e-9))
        throw DomainExit(sys.family + ": fibre input " + fmt("%.17g", x) +
                         " outside " + fmt("[%g, %g]", dom.lo, dom.hi));
      double y = sys.fibre(theta, x);
      if (!dom.contains(y, 1e-9))
        throw DomainExit(sys.family + ": image " + fmt("%.17g", y) + " of x = " +
                         fmt("%.17g", x) + " leaves " + fmt("[%g, %g]", dom.lo, dom.hi));
      return y;
    }
    case FibreGeometry::kCircle:
      return wrap_unit(sys.fibre(theta, wrap_unit(x)));
    case FibreGeometry::kProjective:
      return wrap_projective(sys.fibre(theta, wrap_projective(x)));
    case FibreGeometry::kExtended:
      return sys.fibre(theta, x);
  }
  throw ConfigError("unhandled fibre geometry");
}

double fibre_derivative(const QpfSystem& sys, double theta, double x) {
  theta = wrap_unit(theta);
  if (sys.geometry == FibreGeometry::kCircle) x = wrap_unit(x);
  if (sys.geometry == FibreGeometry::kProjective) x = wrap_projective(x);
  return sys.fibre_dx(theta, x);
}

std::pair<double, double> step(const QpfSystem& sys, double theta, double x) {
  return {wrap_unit(theta + sys.spec.omega), fibre_apply(sys, theta, x)};
}

QpfSystem make_custom_interval(FibreBase base, ForcingFunction forcing, double beta,
                               const RotationSpec& spec, std::string name) {
  QpfSystem sys;
  sys.family = std::move(name);
  sys.geometry = FibreGeometry::kInterval;
  auto f = base.evaluator;
  auto df = base.derivative;
  auto g = forcing.evaluator;
  sys.fibre = [f, g, beta](double theta, double x) { return f(x) - beta * g(theta); };
  sys.fibre_dx = [df](double, double x) { return df(x); };
  sys.base = std::move(base);
  sys.forcing = std::move(forcing);
  sys.beta = beta;
  sys.spec = spec;
  return sys;
}

QpfSystem make_arctan_family(double alpha, double beta, const RotationSpec& spec) {
  if (!(alpha > 0)) throw ConfigError("arctan family needs alpha > 0");
  auto k = ArctanPlainKernel<double>::make(alpha);
  FibreBase base;
  base.evaluator = [k](double x) { return k.value(x); };
  base.derivative = [k](double x) { return k.derivative(x); };
  base.fixed_points = {-1.0, 0.0, 1.0};
  base.negative_schwarzian = true;
  QpfSystem sys = make_custom_interval(std::move(base), one_sided_sin_forcing(), beta,
                                       spec, "arctan");
  sys.alpha = alpha;
  return sys;
}

QpfSystem make_rescaled_arctan_system(double alpha, double beta, const RotationSpec& spec,
                                      double gamma) {
  if (!(alpha >= 1)) throw ConfigError("rescaled arctan family needs alpha >= 1");
  auto k = ArctanRescaledKernel<double>::make(alpha);
  FibreBase base;
  base.evaluator = [k](double x) { return k.value(x); };
  base.derivative = [k](double x) { return k.derivative(x); };
  base.fixed_points = {-k.xa, 0.0, k.xa};
  base.negative_schwarzian = true;
  QpfSystem sys = make_custom_interval(std::move(base), one_sided_sin_forcing(), beta,
                                       spec, "rescaled-arctan");
  sys.alpha = alpha;
  sys.gamma = gamma;
  return sys;
}

FamilyFactory make_rescaled_arctan(double alpha, const RotationSpec& spec, double gamma) {
  if (!(alpha >= 1)) throw ConfigError("rescaled arctan family needs alpha >= 1");
  return [alpha, spec, gamma](double beta) {
    return make_rescaled_arctan_system(alpha, beta, spec, gamma);
  };
}

ConjugacyMaps conjugacy_maps_arctan(double alpha) {
  if (!(alpha > 0)) throw ConfigError("conjugacy maps need alpha > 0");
  ConjugacyMaps m;
  m.tau1 = std::atan(alpha);
  m.sigma1 = alpha / m.tau1;
  // sigma2(a) = c(a) a^(4/3) increases from 1 to infinity, so the preimage
  // of sigma1 under it exists and bisection applies.
  auto sigma2 = [](double a) {
    double xa = 1 + 2 / std::sqrt(a);
    double a43 = std::pow(a, 4.0 / 3);
    return xa * a43 / std::atan(a43 * xa);
  };
  double lo = 1e-12, hi = std::max(alpha, 2.0);
  while (sigma2(hi) < m.sigma1) hi *= 2;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (sigma2(mid) < m.sigma1 ? lo : hi) = mid;
  }
  m.sigma = 0.5 * (lo + hi);
  double xa = 1 + 2 / std::sqrt(m.sigma);
  double c_sigma = xa / std::atan(std::pow(m.sigma, 4.0 / 3) * xa);
  m.tau = m.tau1 * c_sigma;
  return m;
}

ForcingFunction make_cos_potential() {
  ForcingFunction v;
  v.evaluator = [](double theta) { return std::cos(2 * kPi * theta); };
  v.lipschitz_l1 = 2 * kPi;
  v.peak_l2 = 0.0;  // quadratic at the top, no linear decay rate
  v.peak_location = {0.0};
  v.range = {-1.0, 1.0};
  v.symmetric = true;
  return v;
}

ForcingFunction make_peak_potential(double peak, double slope) {
  if (!(slope > 0)) throw ConfigError("peak potential needs slope > 0");
  ForcingFunction v;
  PeakForcing<double> k{peak, slope};
  v.evaluator = [k](double theta) { return k.value(wrap_unit(theta)); };
  v.lipschitz_l1 = slope;
  v.peak_l2 = slope;
  v.peak_location = {wrap_unit(peak)};
  v.range = {0.0, 1.0};
  return v;
}

QpfSystem make_harper(double e, double lambda, const ForcingFunction& v,
                      const RotationSpec& spec) {
  QpfSystem sys;
  sys.family = "harper";
  sys.geometry = FibreGeometry::kProjective;
  auto vf = v.evaluator;
  sys.fibre = [e, lambda, vf](double theta, double x) {
    double w = std::tan(-x) - e + lambda * vf(theta);
    return std::atan(1.0 / w);
  };
  sys.fibre_dx = [e, lambda, vf](double theta, double x) {
    double c = std::cos(x);
    double w = std::tan(-x) - e + lambda * vf(theta);
    return 1.0 / (c * c * (w * w + 1.0));
  };
  sys.forcing = v;
  sys.beta = lambda;
  sys.spec = spec;
  return sys;
}

QpfSystem make_riccati(double e, double lambda, const ForcingFunction& v,
                       const RotationSpec& spec) {
  QpfSystem sys;
  sys.family = "riccati";
  sys.geometry = FibreGeometry::kExtended;
  auto vf = v.evaluator;
  double omega = spec.omega;
  // The potential is read one rotation step ahead; a pole maps to infinity
  // and from there to e - lambda V on the following step.
  sys.fibre = [e, lambda, vf, omega](double theta, double x) {
    return -1.0 / x + e - lambda * vf(wrap_unit(theta + omega));
  };
  sys.fibre_dx = [](double, double x) { return 1.0 / (x * x); };
  sys.forcing = v;
  sys.beta = lambda;
  sys.spec = spec;
  return sys;
}

HarperIntervalModel harper_interval_model(double e) {
  auto k = HarperIntervalKernel<double>::make(e);
  HarperIntervalModel m;
  m.e = e;
  m.alpha = k.alpha;
  m.x1 = k.x1;
  m.x2 = k.x2;
  m.s = k.s;
  m.base.evaluator = [k](double x) { return k.value(x); };
  m.base.derivative = [k](double x) { return k.derivative(x); };
  m.base.fixed_points = {-1.0, 0.0, k.x_plus()};
  m.base.negative_schwarzian = false;  // Moebius pieces; concavity does the work
  return m;
}

QpfSystem make_harper_interval_system(double e, double lambda, const ForcingFunction& v,
                                      const RotationSpec& spec) {
  HarperIntervalModel m = harper_interval_model(e);
  ForcingFunction g = v;
  auto vf = v.evaluator;
  double omega = spec.omega;
  g.evaluator = [vf, omega](double theta) { return vf(wrap_unit(theta + omega)); };
  for (double& p : g.peak_location) p = wrap_unit(p - omega);
  QpfSystem sys = make_custom_interval(std::move(m.base), std::move(g),
                                       m.beta_of_lambda(lambda), spec, "harper-interval");
  sys.alpha = m.alpha;
  return sys;
}

FamilyFactory make_harper_interval_family(double e, const ForcingFunction& v,
                                          const RotationSpec& spec) {
  HarperIntervalModel m = harper_interval_model(e);
  return [e, v, spec, m](double beta) {
    return make_harper_interval_system(e, m.lambda_of_beta(beta), v, spec);
  };
}

QpfSystem make_pinched(double alpha, const RotationSpec& spec) {
  if (!(alpha > 0)) throw ConfigError("pinched family needs alpha > 0");
  QpfSystem sys;
  sys.family = "pinched";
  sys.geometry = FibreGeometry::kInterval;
  sys.fibre = [alpha](double theta, double x) {
    return std::tanh(alpha * x) * std::sin(kPi * wrap_unit(theta));
  };
  sys.fibre_dx = [alpha](double theta, double x) {
    double t = std::tanh(alpha * x);
    return alpha * (1 - t * t) * std::sin(kPi * wrap_unit(theta));
  };
  sys.spec = spec;
  sys.alpha = alpha;
  return sys;
}

QpfSystem make_arnold(double tau, double alpha, double beta, const RotationSpec& spec,
                      ArnoldForcing variant) {
  QpfSystem sys;
  sys.geometry = FibreGeometry::kCircle;
  auto basef = [tau, alpha](double x) {
    return x + tau + alpha / (2 * kPi) * std::sin(2 * kPi * x);
  };
  if (variant == ArnoldForcing::kSine) {
    sys.family = "arnold";
    sys.fibre = [basef, beta](double theta, double x) {
      return basef(x) + beta * std::sin(2 * kPi * theta);
    };
    ForcingFunction g;  // written as -beta g with g = -sin(2 pi theta)
    g.evaluator = [](double theta) { return -std::sin(2 * kPi * theta); };
    g.lipschitz_l1 = 2 * kPi;
    g.peak_l2 = 0.0;
    g.peak_location = {0.75};
    g.range = {-1.0, 1.0};
    g.symmetric = true;
    sys.forcing = std::move(g);
  } else {
    sys.family = "arnold-peak";
    ForcingFunction g = make_peak_potential(0.5, 10.0);
    auto gf = g.evaluator;
    sys.fibre = [basef, beta, gf](double theta, double x) {
      return basef(x) - beta * gf(theta);
    };
    sys.forcing = std::move(g);
  }
  sys.fibre_dx = [alpha](double, double x) { return 1 + alpha * std::cos(2 * kPi * x); };
  sys.beta = beta;
  sys.spec = spec;
  return sys;
}

QpfSystem make_symmetric(double alpha, double beta, const RotationSpec& spec) {
  if (!(alpha > 1)) throw ConfigError("symmetric family needs alpha > 1 for three fixed points");
  ArctanSymmetricKernel<double> k{alpha};
  double xp = bisect_root([&](double x) { return std::atan(alpha * x) - x; }, 1e-8, kPi / 2);
  FibreBase base;
  base.evaluator = [k](double x) { return k.value(x); };
  base.derivative = [k](double x) { return k.derivative(x); };
  base.fixed_points = {-xp, 0.0, xp};
  // Forward invariance: images lie in [-pi/2 - |beta|, pi/2 + |beta|], so the
  // box must grow with the coupling (the interesting couplings exceed pi/2).
  double half = kPi / 2 + std::max(kPi / 2, std::abs(beta));
  base.domain = {-half, half};
  base.codomain = {-kPi / 2, kPi / 2};
  base.negative_schwarzian = true;
  QpfSystem sys = make_custom_interval(std::move(base), symmetric_tent_forcing(), beta,
                                       spec, "symmetric");
  sys.alpha = alpha;
  return sys;
}

bool HypothesisReport::all_hold() const {
  return std::all_of(items.begin(), items.end(),
                     [](const ConditionCheck& c) { return c.holds; });
}

const ConditionCheck* HypothesisReport::find(const std::string& name) const {
  for (const auto& c : items)
    if (c.name == name) return &c;
  return nullptr;
}

HypothesisReport check_hypotheses(const QpfSystem& sys, int grid) {
  if (!sys.base || !sys.forcing)
    throw ConfigError("hypothesis check needs the separable interval form");
  if (!sys.alpha) throw ConfigError("hypothesis check needs the expansion scale alpha");
  if (grid < 16) throw ConfigError("hypothesis check needs grid >= 16");
  const FibreBase& base = *sys.base;
  const ForcingFunction& g = *sys.forcing;
  const double alpha = *sys.alpha;
  const double gamma = sys.gamma.value_or(1.0 / 16);
  const double root_alpha = std::sqrt(alpha);

  HypothesisReport rep;
  auto add = [&rep](std::string name, bool holds, std::string witness) {
    rep.items.push_back({std::move(name), holds, std::move(witness)});
  };

  add("gamma-small", gamma <= 1.0 / 16, fmt("gamma = %g", gamma));
  add("alpha-vs-gamma", root_alpha > 4 / gamma && 4 / gamma >= 64,
      fmt("sqrt(alpha) = %g vs 4/gamma = %g", root_alpha, 4 / gamma));

  // Scans over the fibre base.
  const double lo = base.domain.lo, hi = base.domain.hi;
  const double h = (hi - lo) / grid;
  double worst_img = 0, worst_img_x = lo;
  ConditionCheck uni{"derivative-global-bounds", true, ""};
  ConditionCheck con{"contraction-off-core", true, ""};
  for (int i = 0; i <= grid; ++i) {
    double x = lo + i * h;
    double y = base(x);
    double excess = std::max(base.codomain.lo - y, y - base.codomain.hi);
    if (excess > worst_img) {
      worst_img = excess;
      worst_img_x = x;
    }
    double d = base.derivative(x);
    if (uni.holds && !(d >= 2 / (alpha * alpha) && d <= alpha * alpha)) {
      uni.holds = false;
      uni.witness = fmt("F'(%.12g) = %.12g outside [2 alpha^-2, alpha^2]", x, d);
    }
    if (con.holds && std::abs(x) >= gamma && d > 0.5 / root_alpha) {
      con.holds = false;
      con.witness = fmt("F'(%.12g) = %.12g above alpha^-1/2 / 2", x, d);
    }
  }
  add("codomain-bound", worst_img <= 1e-12,
      fmt("max codomain excess %.12g at x = %.12g", worst_img, worst_img_x));

  const double xm = base.fixed_points[0], xp = base.fixed_points[2];
  const double xa = 1 + 2 / root_alpha;
  double fp_err = std::max({std::abs(base(xm) - xm), std::abs(base(0.0)),
                            std::abs(base(xp) - xp), std::abs(xp - xa)});
  add("fixed-points", xm < 0 && xp > 0 && fp_err <= 1e-9,
      fmt("max defect %.12g (outer fixed points %.12g, %.12g)", fp_err, xm, xp));

  rep.items.push_back(uni);

  ConditionCheck exp{"expansion-near-zero", true, ""};
  int fine = std::max(grid / 10, 100);
  for (int i = 0; i <= fine; ++i) {
    double x = -2 / alpha + 4 / alpha * i / fine;
    double d = base.derivative(x);
    if (!(d >= 2 * root_alpha)) {
      exp.holds = false;
      exp.witness = fmt("F'(%.12g) = %.12g below 2 sqrt(alpha)", x, d);
      break;
    }
  }
  rep.items.push_back(exp);
  rep.items.push_back(con);

  add("maps-over", base(1 / alpha) >= 1 - gamma && base(-1 / alpha) <= -(1 - gamma),
      fmt("F(1/alpha) = %.12g, F(-1/alpha) = %.12g vs 1 - gamma = %g", base(1 / alpha),
          base(-1 / alpha), 1 - gamma));

  // Forcing profile scans on the circle.
  auto peak_dist = [&g](double theta) {
    double d = 1.0;
    for (double p : g.peak_location) {
      d = std::min(d, circle_dist(theta, p));
      if (g.symmetric) d = std::min(d, circle_dist(theta, p + 0.5));
    }
    return d;
  };
  bool range_ok = true, peak_ok = g.peak_l2 > 0, lips_ok = true;
  std::string range_w, peak_w = "no linear decay rate declared at the peak", lips_w;
  double gmax = -2.0;
  double prev = g(0.0);
  for (int i = 0; i <= grid; ++i) {
    double theta = static_cast<double>(i) / grid;
    double v = g(theta);
    gmax = std::max(gmax, v);
    double floor_v = g.symmetric ? -1.0 : 0.0;
    if (range_ok && !(v >= floor_v - 1e-12 && v <= 1 + 1e-12)) {
      range_ok = false;
      range_w = fmt("g(%.12g) = %.12g outside the declared range", theta, v);
    }
    if (peak_ok) {
      double bound = std::max(1 - 3 * gamma, 1 - g.peak_l2 * peak_dist(theta));
      double mag = g.symmetric ? std::abs(v) : v;
      if (mag > bound + 1e-12) {
        peak_ok = false;
        peak_w = fmt("|g|(%.12g) = %.12g above the peak decay bound %.12g", theta,
                     mag, bound);
      }
    }
    if (i > 0 && lips_ok) {
      if (std::abs(v - prev) > g.lipschitz_l1 / grid + 1e-9) {
        lips_ok = false;
        lips_w = fmt("slope near theta = %.12g exceeds L1 = %g", theta, g.lipschitz_l1);
      }
    }
    prev = v;
  }
  for (double p : g.peak_location) gmax = std::max(gmax, g(wrap_unit(p)));
  if (range_ok && gmax < 1 - 1e-9) {
    range_ok = false;
    range_w = fmt("maximum of g is %.12g, never reaches 1", gmax);
  }
  if (range_ok && g.symmetric && std::abs(g(0.0) - 1) > 1e-9) {
    range_ok = false;
    range_w = fmt("symmetric forcing must peak at 0, g(0) = %.12g", g(0.0));
  }
  add("forcing-range", range_ok, range_w.empty() ? fmt("max g = %.12g", gmax) : range_w);
  add("forcing-lipschitz", lips_ok,
      lips_ok ? fmt("L1 = %g certified on %g cells", g.lipschitz_l1, double(grid)) : lips_w);
  add("forcing-peak-decay", peak_ok,
      peak_ok ? fmt("decay rate L2 = %g", g.peak_l2) : peak_w);

  // Error-propagation constant K = 3 L1/L2 + 2 and the horizon sum
  // S = a/(a-1) at a = alpha^(1/4).
  if (g.peak_l2 > 0) {
    double k_const = 3 * g.lipschitz_l1 / g.peak_l2 + 2;
    add("alpha-vs-errorterm", root_alpha >= 2 * k_const,
        fmt("sqrt(alpha) = %g vs 2K = %g", root_alpha, 2 * k_const));
    double a14 = std::pow(alpha, 0.25);
    bool ok = a14 > 1 && 0.5 * root_alpha >= 6 + k_const * a14 / (a14 - 1);
    add("alpha-vs-horizon", ok,
        a14 > 1 ? fmt("sqrt(alpha)/2 = %g vs %g", 0.5 * root_alpha,
                      6 + k_const * a14 / (a14 - 1))
                : "alpha^(1/4) <= 1, horizon sum diverges");
  } else {
    add("alpha-vs-errorterm", false, "K undefined without a peak decay rate");
    add("alpha-vs-horizon", false, "K undefined without a peak decay rate");
  }
  return rep;
}

QpfSystem make_system_from_config(const std::string& family,
                                  const std::map<std::string, double>& params,
                                  const RotationSpec& spec) {
  auto get = [&params, &family](const std::string& key) {
    auto it = params.find(key);
    if (it == params.end())
      throw ConfigError("family '" + family + "' needs parameter '" + key + "'");
    return it->second;
  };
  auto get_or = [&params](const std::string& key, double dflt) {
    auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
  };
  // Some configs name the symmetric coupling tau; treat it as beta.
  auto coupling = [&]() {
    auto it = params.find("beta");
    if (it != params.end()) return it->second;
    it = params.find("tau");
    if (it != params.end()) return it->second;
    throw ConfigError("family '" + family + "' needs parameter 'beta'");
  };

  if (family == "arctan") return make_arctan_family(get("alpha"), get("beta"), spec);
  if (family == "rescaled-arctan")
    return make_rescaled_arctan_system(get("alpha"), get("beta"), spec,
                                       get_or("gamma", 1.0 / 16));
  if (family == "symmetric") return make_symmetric(get("alpha"), coupling(), spec);
  if (family == "pinched") return make_pinched(get("alpha"), spec);
  if (family == "arnold")
    return make_arnold(get("tau"), get("alpha"), get("beta"), spec, ArnoldForcing::kSine);
  if (family == "arnold-peak")
    return make_arnold(get("tau"), get("alpha"), get("beta"), spec, ArnoldForcing::kPeak);
  if (family == "harper")
    return make_harper(get("e"), get("lambda"), make_cos_potential(), spec);
  if (family == "harper-peak")
    return make_harper(get("e"), get("lambda"),
                       make_peak_potential(get_or("peak", 0.0), get_or("slope", 10.0)),
                       spec);
  if (family == "riccati")
    return make_riccati(get("e"), get("lambda"), make_cos_potential(), spec);
  if (family == "riccati-peak")
    return make_riccati(get("e"), get("lambda"),
                        make_peak_potential(get_or("peak", 0.0), get_or("slope", 10.0)),
                        spec);
  if (family == "harper-interval")
    return make_harper_interval_system(
        get("e"), get("lambda"),
        make_peak_potential(get_or("peak", 0.0), get_or("slope", 10.0)), spec);
  if (family == "harper-interval-cos")
    return make_harper_interval_system(get("e"), get("lambda"), make_cos_potential(), spec);
  if (family == "tanh-sine") {
    double a = get("alpha"), b = get("beta");
    if (!(a > 1)) throw ConfigError("tanh-sine needs alpha > 1 for three fixed points");
    double xp = bisect_root([a](double x) { return std::tanh(a * x) - x; }, 1e-8, 1.0 + 1e-9);
    FibreBase base;
    base.evaluator = [a](double x) { return std::tanh(a * x); };
    base.derivative = [a](double x) {
      double t = std::tanh(a * x);
      return a * (1 - t * t);
    };
    base.fixed_points = {-xp, 0.0, xp};
    base.negative_schwarzian = true;
    ForcingFunction g;
    g.evaluator = [](double theta) { return -std::sin(2 * kPi * theta); };
    g.lipschitz_l1 = 2 * kPi;
    g.peak_l2 = 0.0;
    g.peak_location = {0.75};
    g.range = {-1.0, 1.0};
    g.symmetric = true;
    QpfSystem sys = make_custom_interval(std::move(base), std::move(g), b, spec, "tanh-sine");
    sys.alpha = a;
    return sys;
  }
  throw ConfigError(
      "unknown family '" + family +
      "' (known: arctan, rescaled-arctan, symmetric, pinched, arnold, arnold-peak, "
      "harper, harper-peak, riccati, riccati-peak, harper-interval, harper-interval-cos, "
      "tanh-sine)");
}

}  // namespace qpf
