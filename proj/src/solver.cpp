#include "bira/solver.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "bira/errors.hpp"

namespace bira {

namespace {

CVector deterministic_unit_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(uni(rng), uni(rng));
  const double norm = v.norm();
  return norm > 0.0 ? CVector(v / norm) : v;
}

// Largest singular value of M by power iteration on M^H M.
double sigma_max_estimate(const CMatrix& M, double tol, int max_iters) {
  CVector v = deterministic_unit_vector(M.cols(), 0xA5A5A5A5ull);
  double est = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    CVector w = M * v;
    v = M.adjoint() * w;
    const double nv = v.norm();
    if (nv == 0.0) return 0.0;
    v /= nv;
    const double next = std::sqrt(nv);
    if (std::abs(next - est) <= tol * std::max(1.0, next)) return next;
    est = next;
  }
  return est;
}

// Smallest singular value of M through its LU factorization: inverse power
// iteration on (M^H M)^{-1}, one adjoint solve and one solve per step.
double sigma_min_estimate(const Eigen::PartialPivLU<CMatrix>& lu, Eigen::Index n, double tol,
                          int max_iters) {
  CVector v = deterministic_unit_vector(n, 0xC3C3C3C3ull);
  double est = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    CVector y = lu.adjoint().solve(v);
    CVector z = lu.solve(y);
    const double nz = z.norm();
    if (!std::isfinite(nz) || nz == 0.0) return 0.0;
    v = z / nz;
    const double next = 1.0 / std::sqrt(nz);
    if (std::abs(next - est) <= tol * std::max(next, 1e-300)) return next;
    est = next;
  }
  return est;
}

}  // namespace

SpectralRadiusEstimate spectral_radius(const CMatrix& A, double tol, int max_iters,
                                       std::uint64_t seed) {
  SpectralRadiusEstimate out;
  if (A.rows() == 0) {
    out.converged = true;
    return out;
  }
  CVector v = deterministic_unit_vector(A.rows(), seed);
  double est = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    CVector w = A * v;
    const double nw = w.norm();
    out.iterations = it;
    if (nw == 0.0) {
      // Reached the kernel of A (nilpotent directions): the dominant
      // modulus along this orbit is 0.
      out.value = 0.0;
      out.converged = true;
      return out;
    }
    const double next = nw;  // ||Av|| with ||v|| = 1
    v = w / nw;
    if (it > 1 && std::abs(next - est) <= tol * std::max(1.0, next)) {
      out.value = next;
      out.converged = true;
      return out;
    }
    est = next;
  }
  out.value = est;
  out.converged = false;
  return out;
}

StateSolution solve_direct(const OperatorSet& ops, Complex x, const DirectOptions& options) {
  const Eigen::Index n = ops.state_size();
  StateSolution sol;
  sol.s = ops.s;
  sol.method = SolveMethod::Direct;

  CMatrix ImA = -ops.A;
  ImA.diagonal().array() += 1.0;
  const CVector rhs = ops.B * x;
  Eigen::PartialPivLU<CMatrix> lu(ImA);
  sol.q = lu.solve(rhs);
  sol.p = ops.C * sol.q + ops.D * x;

  const double rhs_norm = rhs.norm();
  sol.residual_norm = rhs_norm > 0.0 ? (sol.q - ops.A * sol.q - rhs).norm() / rhs_norm : 0.0;

  if (options.estimate_conditioning) {
    const double smax = sigma_max_estimate(ImA, 1e-4, 200);
    sol.sigma_min = sigma_min_estimate(lu, n, 1e-6, 200);
    sol.condition_estimate =
        sol.sigma_min > 0.0 ? smax / sol.sigma_min : std::numeric_limits<double>::infinity();
    sol.near_singular = sol.condition_estimate > options.near_singular_threshold;
  }
  return sol;
}

NeumannResult solve_neumann(const OperatorSet& ops, Complex x, int max_order) {
  if (max_order < 0) throw SolveError("solve_neumann: order must be >= 0");
  NeumannResult out;
  StateSolution& sol = out.solution;
  sol.s = ops.s;
  sol.method = SolveMethod::Neumann;
  sol.neumann_order = max_order;

  // Fixed summation order (documented contract): p starts from the direct
  // term Dx, then accumulates C(A^k B x) for k = 0, 1, ..., K. The
  // decomposition stores exactly these addends, so its cumulative sums match
  // the solution bitwise.
  CVector v = ops.B * x;  // A^k B x
  CVector q = v;
  CVector p = ops.D * x;
  out.decomposition.terms.push_back(p);
  out.decomposition.cumulative.push_back(p);

  int growth_streak = 0;
  double prev_norm = v.norm();
  for (int k = 0; k <= max_order; ++k) {
    if (k > 0) {
      v = ops.A * v;
      q += v;
      const double norm_k = v.norm();
      growth_streak = norm_k > prev_norm ? growth_streak + 1 : 0;
      prev_norm = norm_k;
      if (growth_streak >= 5) {
        const SpectralRadiusEstimate rho = spectral_radius(ops.A);
        std::ostringstream os;
        os << "solve_neumann: diverging series, term norms grew over 5 consecutive orders "
           << "(order " << k << ", spectral radius estimate " << rho.value
           << (rho.converged ? "" : " [not converged]") << ")";
        throw SolveError(os.str());
      }
    }
    const CVector term = ops.C * v;
    p += term;
    out.decomposition.terms.push_back(term);
    out.decomposition.cumulative.push_back(p);
  }
  sol.q = q;
  sol.p = p;

  const CVector rhs = ops.B * x;
  const double rhs_norm = rhs.norm();
  sol.residual_norm = rhs_norm > 0.0 ? (sol.q - ops.A * sol.q - rhs).norm() / rhs_norm : 0.0;
  return out;
}

std::vector<CVector> markov_parameters(const OperatorSet& ops, int count) {
  if (count < 1) throw SolveError("markov_parameters: count must be >= 1");
  std::vector<CVector> params;
  params.reserve(count);
  CVector v = ops.B;
  for (int k = 0; k < count; ++k) {
    if (k > 0) v = ops.A * v;
    params.push_back(ops.C * v);
  }
  return params;
}

namespace {
RankedMatrix with_rank(CMatrix m) {
  RankedMatrix out;
  out.matrix = std::move(m);
  Eigen::BDCSVD<CMatrix> svd(out.matrix);
  out.singular_values.assign(svd.singularValues().data(),
                             svd.singularValues().data() + svd.singularValues().size());
  const double cutoff = out.singular_values.empty() ? 0.0 : out.singular_values.front() * 1e-10;
  out.numerical_rank = 0;
  for (double s : out.singular_values)
    if (s > cutoff) ++out.numerical_rank;
  return out;
}
}  // namespace

RankedMatrix observability_matrix(const OperatorSet& ops, int order_count) {
  if (order_count < 1) throw SolveError("observability_matrix: order count must be >= 1");
  const Eigen::Index m = ops.receiver_count(), n = ops.state_size();
  CMatrix stacked(order_count * m, n);
  CMatrix block = ops.C;
  for (int k = 0; k < order_count; ++k) {
    if (k > 0) block = block * ops.A;  // C A^k
    stacked.middleRows(k * m, m) = block;
  }
  return with_rank(std::move(stacked));
}

RankedMatrix controllability_matrix(const OperatorSet& ops, int order_count) {
  if (order_count < 1) throw SolveError("controllability_matrix: order count must be >= 1");
  const Eigen::Index n = ops.state_size();
  CMatrix cols(n, order_count);
  CVector v = ops.B;
  for (int k = 0; k < order_count; ++k) {
    if (k > 0) v = ops.A * v;  // A^k B
    cols.col(k) = v;
  }
  return with_rank(std::move(cols));
}

}  // namespace bira
