#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace qpf {

// Reduce to the fundamental domain [0,1). Handles negatives and the
// rounding case where x - floor(x) lands exactly on 1.
double wrap_unit(double x);

// d(a,b) on T^1 = R/Z, i.e. min(|a-b|, 1-|a-b|) after wrapping. Symmetric,
// satisfies the triangle inequality, range [0, 1/2].
double circle_dist(double a, double b);

struct ContinuedFraction {
  std::vector<long long> terms;  // omega = 1/(a1 + 1/(a2 + ...)), omega in (0,1)
  bool truncated = false;        // precision exhausted before the requested length
};

// Partial quotients of omega in (0,1). Stops early (truncated = true) once
// the convergent denominators outrun what a double can certify.
ContinuedFraction continued_fraction(double omega, int max_terms);

struct DiophantineFit {
  double c = 0.0;
  double d = 0.0;
  bool holds = false;  // min_{1<=n<=N} d(n*omega, 0) * n^d >= c on the scanned range
};

struct RotationSpec {
  double omega = 0.0;
  std::vector<long long> cf = {};  // leading partial quotients, informational
  double dioph_c = 0.0;            // claimed d(n*omega,0) >= c * n^{-d}; 0 = unclaimed
  double dioph_d = 0.0;

  // n*omega mod 1 with a compensated product, so the result is within a few
  // ulp of the exact value for the stored double omega, for all |n| < 2^53.
  double orbit_point(long long n) const;

  static RotationSpec golden_mean();
  static RotationSpec make(double omega, int cf_terms = 40);
};

// Scans n = 1..N, fits (c, d) to the record-closest returns by least squares
// in log-log, then verifies the claimed (or fitted) bound over the whole range.
DiophantineFit estimate_dioph(const RotationSpec& rot, long long N);

// Deterministic uniforms on [0,1). The engine is fully specified by the
// standard; the bits-to-double mapping is ours because
// std::uniform_real_distribution is implementation-defined, which would
// break byte-identical reruns.
class UniformRng {
 public:
  explicit UniformRng(std::uint64_t seed) : eng_(seed) {}
  double next();            // [0,1), 53 random bits
  std::uint64_t next_u64();
  long long next_index(long long n);  // uniform on [0, n), rejection sampled

 private:
  std::mt19937_64 eng_;
};

}  // namespace qpf
