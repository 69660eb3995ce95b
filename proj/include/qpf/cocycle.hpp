#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "qpf/bifurcation.hpp"
#include "qpf/graphs.hpp"
#include "qpf/systems.hpp"

namespace qpf {

// Row-major 2x2 real matrix ((a, b), (c, d)).
struct Mat2 {
  double a = 0, b = 0, c = 0, d = 0;
};

Mat2 mat2_mul(const Mat2& lhs, const Mat2& rhs);
Mat2 mat2_inverse(const Mat2& m);  // assumes det = 1
std::array<double, 2> mat2_apply(const Mat2& m, const std::array<double, 2>& v);
double mat2_det(const Mat2& m);

// One-step transfer matrix ((E - lambda V(theta), -1), (1, 0)); det = 1.
Mat2 schrodinger_matrix(double theta, double e, double lambda,
                        const ForcingFunction& v);

// Log-norm history of one orbit of the matrix products A_k(theta0).
// log_norm_trace[k-1] holds log ||A_k v0|| when a start vector is given, and
// log max(||A_k e1||, ||A_k e2||) otherwise (within log sqrt(2) of the true
// operator norm, which the 1/n average absorbs). The propagated vectors are
// renormalized every 32 steps so no intermediate overflows.
struct CocycleRun {
  double theta0 = 0;
  long long n = 0;
  std::vector<double> log_norm_trace;
};

CocycleRun run_cocycle(double theta0, double e, double lambda,
                       const ForcingFunction& v, const RotationSpec& spec,
                       long long n,
                       std::optional<std::array<double, 2>> v0 = std::nullopt);

// Lyapunov exponent estimate averaged over random sample fibres, with the
// standard error of the sample mean. Deterministic for a fixed seed; the
// samples are reduced in index order regardless of thread count.
struct CocycleEstimate {
  double lambda = 0;
  double std_error = 0;
  long long n = 0;
  int samples = 0;
};

CocycleEstimate cocycle_lyapunov(double e, double lambda, const ForcingFunction& v,
                                 const RotationSpec& spec, long long n, int samples,
                                 std::uint64_t seed = 1);

// Product of the projective one-step derivatives along x_k = arctan(v2/v1)
// against the collapse ratio |v0|^2/|vn|^2 of the driving vectors. The two
// agree identically for the transfer matrices above; gap is their relative
// difference, computed in log space so it stays meaningful when lhs and rhs
// underflow.
struct DerivativeIdentity {
  double lhs = 1;
  double rhs = 1;
  double gap = 0;
};

DerivativeIdentity projective_derivative_identity(double theta,
                                                  std::array<double, 2> v0, double e,
                                                  double lambda,
                                                  const ForcingFunction& v,
                                                  long long n,
                                                  const RotationSpec& spec);

// Invariant direction fields of a hyperbolic cocycle, sampled over a midpoint
// grid and expressed in the projective coordinate of the corresponding
// projective system. kUnstable propagates a generic vector forward for m
// steps (the attracting graph of the projective action); kStable propagates
// backward through the inverse matrices (the repelling graph).
enum class CocycleDirection { kStable, kUnstable };

GraphSample cocycle_direction_graph(double e, double lambda, const ForcingFunction& v,
                                    const RotationSpec& spec, int g, int m,
                                    CocycleDirection which);

// Critical coupling curve of the interval model: per energy, bisect lambda
// over whether the upper boundary line survives (two invariant graphs above
// the trapping region). Delegates the bisection to critical_beta.
struct CriticalLambdaRow {
  double e = 0;
  BetaBracket lambda_c;
};

std::vector<CriticalLambdaRow> lambda_c_curve(const std::vector<double>& e_values,
                                              const ForcingFunction& v,
                                              const RotationSpec& spec, double tol,
                                              long long n_max = 20000, int g = 2048);

// Inverse of the curve above: bisect the energy at fixed lambda. The
// survival predicate fails at e_lo and holds at e_hi, and both must sit
// above the interval-model threshold.
BetaBracket critical_e(double lambda, const ForcingFunction& v,
                       const RotationSpec& spec, double tol, double e_lo,
                       double e_hi, long long n_max = 20000, int g = 2048);

}  // namespace qpf
