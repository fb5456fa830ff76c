#include "foldlab/norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "foldlab/errors.hpp"

namespace foldlab {

namespace {

CMatrix orthonormalize(const CMatrix& z) {
  Eigen::HouseholderQR<CMatrix> qr(z);
  return qr.householderQ() * CMatrix::Identity(z.rows(), z.cols());
}

CMatrix gaussian_block(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CMatrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = Complex(nd(rng), nd(rng));
  return m;
}

}  // namespace

NormEstimate operator_norm(const DiscreteOperator& op, const NormOptions& opts) {
  if (!(opts.tol > 0.0)) throw ConfigError("norm tolerance must be positive");
  if (opts.max_iter < 1) throw ConfigError("max_iter must be >= 1");
  const auto nt = static_cast<Eigen::Index>(op.cols());
  const auto nx = static_cast<Eigen::Index>(op.rows());
  const Eigen::Index b = std::max<Eigen::Index>(1, std::min<Eigen::Index>({opts.block, nt, nx}));
  const double fwd = std::sqrt(op.weight_x() / op.weight_theta());
  const double bwd = 1.0 / fwd;

  CMatrix q = gaussian_block(nt, b, opts.seed);
  if (opts.warm_start && opts.warm_start->rows() == nt) {
    const Eigen::Index wc = std::min(b, opts.warm_start->cols());
    const double scale = opts.warm_start->leftCols(wc).norm() / std::sqrt(static_cast<double>(nt * wc));
    q *= 1e-3 * scale;
    q.leftCols(wc) += opts.warm_start->leftCols(wc);
  }
  q = orthonormalize(q);

  NormEstimate est;
  est.grid_x = op.rows();
  est.grid_theta = op.cols();
  for (const auto& a : op.grid_x().axes()) est.counts.push_back(a.count);
  for (const auto& a : op.grid_theta().axes()) est.counts.push_back(a.count);

  CMatrix y = fwd * op.apply(q, opts.path);
  double prev = -1.0, prev_change = -1.0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const CMatrix g = y.adjoint() * y;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (g + g.adjoint()));
    // Ritz vectors in descending order.
    const CMatrix v = es.eigenvectors().rowwise().reverse();
    q = q * v;
    y = y * v;
    const double s2 = std::max(0.0, es.eigenvalues()(b - 1));
    est.iterations = it;
    if (s2 == 0.0) {
      est.sigma_max = 0.0;
      est.residual = 0.0;
      est.converged = true;
      break;
    }
    if (prev >= 0.0) {
      const double change = std::abs(s2 - prev) / s2;
      est.residual = change;
      const double rho = prev_change > 0.0 ? change / prev_change : 0.0;
      const double tail = rho < 1.0 ? change * rho / (1.0 - rho) : std::numeric_limits<double>::infinity();
      // A rate near 1 means a flat top: the geometric tail bound is void and
      // convergence is sublinear, so the looser flat_tol applies.
      const bool flat = rho >= 0.99;
      if ((change <= opts.tol && (tail <= opts.tol || change <= 1e-2 * opts.tol)) ||
          (flat && change <= std::max(opts.tol, opts.flat_tol))) {
        est.sigma_max = std::sqrt(s2);
        est.converged = true;
        break;
      }
      prev_change = change;
    }
    prev = s2;
    est.sigma_max = std::sqrt(s2);
    if (it == opts.max_iter) break;
    q = orthonormalize(bwd * op.apply_adjoint(y, opts.path));
    y = fwd * op.apply(q, opts.path);
  }
  est.basis = q;
  est.top_right = q.col(0) / std::sqrt(op.weight_theta());
  return est;
}

Eigen::VectorXd dense_singular_values(const CMatrix& m) {
  Eigen::BDCSVD<CMatrix> svd(m);
  return svd.singularValues();
}

Eigen::VectorXd dense_oracle(const DiscreteOperator& op) {
  if (!op.dense_eligible()) throw ConfigError("operator exceeds the dense threshold");
  return dense_singular_values(op.symmetrized_dense());
}

double hilbert_schmidt_bound(const DiscreteOperator& op) {
  const Amplitude& amp = op.amplitude();
  const std::size_t nx = op.rows(), nt = op.cols();
  const std::size_t nxd = op.grid_x().dims();
  if (amp.separable()) {
    const auto r = kernels::axis_profile_product(amp.base, op.grid_x(), 0);
    const auto c = kernels::axis_profile_product(amp.base, op.grid_theta(), nxd);
    double sr = 0.0, sc = 0.0;
    for (double v : r) sr += v * v;
    for (double v : c) sc += v * v;
    return std::sqrt(op.weight_x() * op.weight_theta() * sr * sc);
  }
  std::vector<double> rowsum(nx, 0.0);
#pragma omp parallel
  {
    std::vector<double> p(2 * nxd);
#pragma omp for schedule(dynamic, 8)
    for (std::size_t i = 0; i < nx; ++i) {
      op.grid_x().node(i, std::span<double>(p).first(nxd));
      double s = 0.0;
      for (std::size_t j = 0; j < nt; ++j) {
        op.grid_theta().node(j, std::span<double>(p).subspan(nxd));
        const double a = amp(p);
        s += a * a;
      }
      rowsum[i] = s;
    }
  }
  double total = 0.0;
  for (double s : rowsum) total += s;
  return std::sqrt(op.weight_x() * op.weight_theta() * total);
}

std::vector<std::size_t> refinement_start(const AxisDemand& demand, const DiscretizationPolicy& policy) {
  const std::size_t cap = std::max(policy.min_count, policy.max_count / 4);
  std::vector<std::size_t> counts;
  for (std::size_t r : demand.requested) counts.push_back(std::clamp<std::size_t>(r / 8, policy.min_count, cap));
  return counts;
}

CMatrix prolong(const Grid& coarse, const Grid& fine, const CMatrix& values) {
  if (coarse.dims() != fine.dims()) throw ShapeError("prolongation between grids of different dimension");
  CMatrix out(static_cast<Eigen::Index>(fine.size()), values.cols());
  const std::size_t d = fine.dims();
  for (std::size_t idx = 0; idx < fine.size(); ++idx) {
    std::size_t rem = idx, cidx = 0, stride = 1;
    for (std::size_t a = d; a-- > 0;) {
      const std::size_t fc = fine.axis(a).count, cc = coarse.axis(a).count;
      const std::size_t i = rem % fc;
      rem /= fc;
      cidx += (i * cc / fc) * stride;
      stride *= cc;
    }
    out.row(static_cast<Eigen::Index>(idx)) = values.row(static_cast<Eigen::Index>(cidx));
  }
  return out;
}

NormEstimate refine_until_stable(const PolynomialPhase& phase, const Amplitude& amplitude, double lambda,
                                 const RefineOptions& opts) {
  if (!(opts.stability_tol > 0.0)) throw ConfigError("stability tolerance must be positive");
  amplitude.base.validate();
  const auto demand = axis_demand(phase, amplitude.base.support(), lambda, opts.policy);
  auto counts = refinement_start(demand, opts.policy);
  const std::size_t top = std::max(opts.policy.min_count, opts.policy.max_count);

  std::vector<RefinementStep> history;
  NormEstimate est;
  CMatrix warm;
  Grid prev_theta;
  for (;;) {
    const auto op = discretize_with_counts(phase, amplitude, lambda, counts);
    NormOptions nopts = opts.norm;
    CMatrix start;
    if (warm.size() > 0) {
      start = prolong(prev_theta, op.grid_theta(), warm);
      nopts.warm_start = &start;
    }
    est = operator_norm(op, nopts);
    history.push_back({counts, est.sigma_max, est.iterations, est.converged});
    warm = est.basis;
    prev_theta = op.grid_theta();
    if (history.size() >= 2) {
      const double a = history[history.size() - 2].sigma_max, b = history.back().sigma_max;
      const double rel = b > 0.0 ? std::abs(b - a) / b : std::abs(b - a);
      if (rel <= opts.stability_tol) {
        est.stable = est.converged;
        break;
      }
    }
    auto next = counts;
    for (auto& c : next) c = std::min(top, 2 * c);
    if (next == counts) break;
    counts = next;
  }
  est.history = std::move(history);
  return est;
}

}  // namespace foldlab
