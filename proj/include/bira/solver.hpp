#pragma once

#include <vector>

#include "bira/assembly.hpp"
#include "bira/types.hpp"

namespace bira {

enum class SolveMethod { Direct, Neumann };

/// Solution of the state and measurement equations at one Laplace point.
/// `residual_norm` is the exact relative state residual ||q - Aq - Bx|| /
/// ||Bx||, reported honestly for both methods.
struct StateSolution {
  LaplacePoint s;
  CVector q;
  CVector p;
  SolveMethod method = SolveMethod::Direct;
  int neumann_order = 0;
  double residual_norm = 0.0;
  double condition_estimate = 0.0;  // kappa_2(I - A), direct only
  double sigma_min = 0.0;           // smallest singular value of I - A, direct only
  bool near_singular = false;       // condition estimate above threshold (resonance signature)
};

/// Per-order receiver contributions [Dx, CBx, CABx, ..., CA^K B x] of the
/// truncated series solve, with running cumulative sums. The final
/// cumulative sum reproduces the series solution bitwise.
struct ScatteringDecomposition {
  std::vector<CVector> terms;
  std::vector<CVector> cumulative;
};

struct NeumannResult {
  StateSolution solution;
  ScatteringDecomposition decomposition;
};

struct SpectralRadiusEstimate {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Dominant-modulus eigenvalue estimate by power iteration with a
/// deterministic random start.
SpectralRadiusEstimate spectral_radius(const CMatrix& A, double tol = 1e-6, int max_iters = 500,
                                       std::uint64_t seed = 0x9E3779B97F4A7C15ull);

struct DirectOptions {
  bool estimate_conditioning = true;       // sigma_min / condition via power iteration
  double near_singular_threshold = 1e12;
};

/// LU solve of (I - A) q = B x with partial pivoting, p = C q + D x.
/// Near-singular systems (condition estimate above the threshold) are still
/// solved and flagged: the minima of sigma_min across frequency are the
/// modal-detection signal, so refusing to solve would destroy the diagnostic.
StateSolution solve_direct(const OperatorSet& ops, Complex x, const DirectOptions& options = {});

/// Truncated series solve q = sum_{k=0..K} A^k B x by repeated matrix-vector
/// products (never explicit powers). The receiver pressure is accumulated as
/// p = Dx, then p += C(A^k B x) for k = 0..K in order; the per-order terms
/// and cumulative sums are retained. Divergence (term norms growing over 5
/// consecutive orders) aborts with the spectral-radius estimate in the
/// message.
NeumannResult solve_neumann(const OperatorSet& ops, Complex x, int max_order);

/// Markov parameters [CB, CAB, ..., CA^{K-1}B], via v <- Av from v = B.
std::vector<CVector> markov_parameters(const OperatorSet& ops, int count);

struct RankedMatrix {
  CMatrix matrix;
  std::vector<double> singular_values;
  Eigen::Index numerical_rank = 0;  // threshold sigma_max * 1e-10
};

/// Stacked observability matrix [C; CA; ...; CA^{K-1}], (K*M) x N, with its
/// singular values and numerical rank.
RankedMatrix observability_matrix(const OperatorSet& ops, int order_count);

/// Controllability matrix [B, AB, ..., A^{K-1}B], N x K, with its singular
/// values and numerical rank.
RankedMatrix controllability_matrix(const OperatorSet& ops, int order_count);

}  // namespace bira
