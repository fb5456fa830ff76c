#include "foldlab/singularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "foldlab/errors.hpp"

namespace foldlab {

std::string side_name(ProjectionSide side) { return side == ProjectionSide::Left ? "left" : "right"; }

int corank(const Eigen::MatrixXd& m, double tol_rank) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  if (smax == 0.0) return static_cast<int>(std::min(m.rows(), m.cols()));
  int c = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= tol_rank * smax) ++c;
  return c + static_cast<int>(std::max(m.rows(), m.cols()) - sv.size());
}

int projection_corank(const PhaseCalculus& calc, std::span<const double> point, ProjectionSide side,
                      double tol_rank) {
  const int n = calc.dim();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  // Rows: the n identity coordinates, then the n momentum coordinates.
  for (int i = 0; i < n; ++i) {
    const int keep = side == ProjectionSide::Left ? x_var(i) : theta_var(n, i);
    jac(i, keep) = 1.0;
    const PolynomialPhase& momentum = side == ProjectionSide::Left ? calc.dx(i) : calc.dtheta(i);
    for (int v = 0; v < 2 * n; ++v) jac(n + i, v) = momentum.derivative(v).evaluate(point);
  }
  return corank(jac, tol_rank);
}

namespace {

std::vector<int> complement(int n, int skip) {
  std::vector<int> idx;
  for (int i = 0; i < n; ++i)
    if (i != skip) idx.push_back(i);
  return idx;
}

}  // namespace

Eigen::MatrixXd primed_block(const Eigen::MatrixXd& mixed, int x_index, int theta_index) {
  const int n = static_cast<int>(mixed.rows());
  const auto rows = complement(n, x_index);
  const auto cols = complement(n, theta_index);
  Eigen::MatrixXd p(n - 1, n - 1);
  for (int r = 0; r < n - 1; ++r)
    for (int c = 0; c < n - 1; ++c) p(r, c) = mixed(rows[r], cols[c]);
  return p;
}

double primed_determinant(const Eigen::MatrixXd& mixed, int x_index, int theta_index) {
  if (mixed.rows() == 1) return 1.0;
  return primed_block(mixed, x_index, theta_index).determinant();
}

CoordinateSplit adapt_coordinates(const PhaseCalculus& calc, std::span<const double> point, double tol_rank) {
  const int n = calc.dim();
  const Eigen::MatrixXd mixed = calc.mixed_hessian(point);
  if (corank(mixed, tol_rank) >= 2)
    throw DegenerateCoordinatesError("mixed Hessian has corank >= 2; no admissible coordinate split");
  CoordinateSplit best{n - 1, n - 1, 0.0};
  double best_abs = -1.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double d = primed_determinant(mixed, a, b);
      if (std::abs(d) > best_abs) {
        best_abs = std::abs(d);
        best = {a, b, d};
      }
    }
  }
  return best;
}

Eigen::VectorXd kernel_field(const PhaseCalculus& calc, std::span<const double> point, ProjectionSide side,
                             const CoordinateSplit& split) {
  const int n = calc.dim();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * n);
  if (side == ProjectionSide::Right)
    v(x_var(split.x_index)) = 1.0;
  else
    v(theta_var(n, split.theta_index)) = 1.0;
  if (n == 1) return v;

  const Eigen::MatrixXd mixed = calc.mixed_hessian(point);
  const Eigen::MatrixXd p = primed_block(mixed, split.x_index, split.theta_index);
  if (corank(p) > 0) throw DegenerateCoordinatesError("primed block S_x't' is singular at this point");
  const auto xs = complement(n, split.x_index);
  const auto ts = complement(n, split.theta_index);
  Eigen::VectorXd rhs(n - 1);
  if (side == ProjectionSide::Right) {
    for (int c = 0; c < n - 1; ++c) rhs(c) = -mixed(split.x_index, ts[c]);
    const Eigen::VectorXd vp = p.transpose().partialPivLu().solve(rhs);
    for (int r = 0; r < n - 1; ++r) v(x_var(xs[r])) = vp(r);
  } else {
    for (int r = 0; r < n - 1; ++r) rhs(r) = -mixed(xs[r], split.theta_index);
    const Eigen::VectorXd vp = p.partialPivLu().solve(rhs);
    for (int c = 0; c < n - 1; ++c) v(theta_var(n, ts[c])) = vp(c);
  }
  return v;
}

Eigen::VectorXd kernel_field(const PhaseCalculus& calc, std::span<const double> point, ProjectionSide side) {
  return kernel_field(calc, point, side, adapt_coordinates(calc, point));
}

namespace {

class KernelDerivative {
 public:
  KernelDerivative(const PhaseCalculus& calc, ProjectionSide side, CoordinateSplit split,
                   const KernelDerivativeOptions& opts)
      : calc_(calc), side_(side), split_(split), opts_(opts) {}

  Eigen::VectorXd field(std::span<const double> p) const {
    Eigen::VectorXd v = kernel_field(calc_, p, side_, split_);
    if (opts_.field_scale) v *= opts_.field_scale(p);
    return v;
  }

  // K^{depth+1} h at p.
  double eval(std::span<const double> p, int depth, double step) const {
    const Eigen::VectorXd v = field(p);
    if (depth == 0) return calc_.grad_h(p).dot(v);
    std::vector<double> fwd(p.begin(), p.end()), bwd(p.begin(), p.end());
    for (std::size_t i = 0; i < fwd.size(); ++i) {
      fwd[i] += step * v(static_cast<Eigen::Index>(i));
      bwd[i] -= step * v(static_cast<Eigen::Index>(i));
    }
    return (eval(fwd, depth - 1, step) - eval(bwd, depth - 1, step)) / (2.0 * step);
  }

 private:
  const PhaseCalculus& calc_;
  ProjectionSide side_;
  CoordinateSplit split_;
  const KernelDerivativeOptions& opts_;
};

double difference_step(int j, double length_scale) {
  return std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (j + 2)) * length_scale;
}

}  // namespace

double iterated_kernel_derivative(const PhaseCalculus& calc, std::span<const double> point, ProjectionSide side,
                                  int j, const KernelDerivativeOptions& opts) {
  if (j < 1) throw ConfigError("kernel derivative order must be >= 1");
  const CoordinateSplit split = opts.split ? *opts.split : adapt_coordinates(calc, point);
  KernelDerivative kd(calc, side, split, opts);
  return kd.eval(point, j - 1, difference_step(j, opts.length_scale));
}

int classify_type(const PhaseCalculus& calc, std::span<const double> point, ProjectionSide side,
                  const ClassifyOptions& opts) {
  if (std::abs(calc.h_at(point)) > opts.crit_tol) return 0;
  const CoordinateSplit split = opts.derivative.split ? *opts.derivative.split : adapt_coordinates(calc, point);
  KernelDerivative kd(calc, side, split, opts.derivative);
  double scale = std::max(1.0, calc.grad_h(point).norm() * kd.field(point).norm());
  for (int j = 1; j <= opts.j_max; ++j) {
    const double value = kd.eval(point, j - 1, difference_step(j, opts.derivative.length_scale));
    if (std::abs(value) > opts.rel_tol * scale) return j;
    scale = std::max(scale, std::abs(value));
  }
  throw UnclassifiedSingularityError("no nonvanishing kernel derivative up to order " + std::to_string(opts.j_max));
}

namespace {

struct SampleRecord {
  std::vector<double> point;
  double h = 0.0;
  int corank = 0;
  bool critical = false;
};

std::vector<std::vector<double>> grid_samples(const Box& region, std::size_t per_axis) {
  const std::size_t dims = region.dims();
  std::size_t total = 1;
  for (std::size_t d = 0; d < dims; ++d) total *= per_axis;
  std::vector<std::vector<double>> pts(total, std::vector<double>(dims));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t d = dims; d-- > 0;) {
      const std::size_t i = rem % per_axis;
      rem /= per_axis;
      const double t = static_cast<double>(i) / static_cast<double>(per_axis - 1);
      pts[idx][d] = region.lo[d] + t * (region.hi[d] - region.lo[d]);
    }
  }
  return pts;
}

// Newton iteration along grad h towards {h = 0}; empty when it fails or leaves the region.
std::optional<std::vector<double>> project_to_critical(const PhaseCalculus& calc, std::vector<double> p,
                                                       const Box& region, double crit_tol) {
  for (int it = 0; it < 40; ++it) {
    const double h = calc.h_at(p);
    if (std::abs(h) <= crit_tol) return region.contains(p) ? std::optional(p) : std::nullopt;
    const Eigen::VectorXd g = calc.grad_h(p);
    const double g2 = g.squaredNorm();
    if (g2 == 0.0) return std::nullopt;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= h * g(static_cast<Eigen::Index>(i)) / g2;
    if (!region.contains(p, 1e-9)) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

SingularityReport scan_region(const PhaseCalculus& calc, ProjectionSide side, const Box& region,
                              std::size_t samples_per_axis, const ScanOptions& opts) {
  const int n = calc.dim();
  if (region.dims() != static_cast<std::size_t>(2 * n)) throw ConfigError("scan region must have 2n dimensions");
  if (samples_per_axis < 2) throw ConfigError("scan needs at least 2 samples per axis");
  for (std::size_t d = 0; d < region.dims(); ++d)
    if (!(region.hi[d] > region.lo[d])) throw ConfigError("scan region must be a nondegenerate box");

  SingularityReport rep;
  rep.side = side;
  rep.region = region;

  const auto pts = grid_samples(region, samples_per_axis);
  rep.samples = pts.size();

  double sup_h = 0.0, sup_grad = 0.0;
  std::vector<double> hs(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    hs[i] = calc.h_at(pts[i]);
    sup_h = std::max(sup_h, std::abs(hs[i]));
    sup_grad = std::max(sup_grad, calc.grad_h(pts[i]).norm());
  }
  const double crit_tol = opts.crit_rel_tol * (sup_h > 0.0 ? sup_h : 1.0);
  rep.crit_tol = crit_tol;

  // Grid samples plus their projections onto the critical variety.
  std::vector<SampleRecord> records(pts.size());
  std::vector<std::optional<std::vector<double>>> projected(pts.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t i = 0; i < pts.size(); ++i) {
    records[i] = {pts[i], hs[i], corank(calc.mixed_hessian(pts[i]), opts.tol_rank), std::abs(hs[i]) <= crit_tol};
    if (opts.project_onto_critical && !records[i].critical)
      projected[i] = project_to_critical(calc, pts[i], region, crit_tol);
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!projected[i]) continue;
    const auto& p = *projected[i];
    records.push_back({p, calc.h_at(p), corank(calc.mixed_hessian(p), opts.tol_rank), true});
  }

  std::vector<const SampleRecord*> critical;
  for (const auto& r : records) {
    rep.max_corank = std::max(rep.max_corank, r.corank);
    if (r.critical) critical.push_back(&r);
  }
  rep.critical_samples = critical.size();

  // One coordinate split for the whole region: maximize the smallest |det S_x't'|.
  std::optional<CoordinateSplit> split;
  if (n == 1) {
    split = CoordinateSplit{0, 0, 1.0};
  } else {
    std::vector<std::vector<double>> anchors;
    for (const auto* r : critical) anchors.push_back(r->point);
    if (anchors.empty()) {
      std::vector<double> center(region.dims());
      for (std::size_t d = 0; d < region.dims(); ++d) center[d] = 0.5 * (region.lo[d] + region.hi[d]);
      anchors.push_back(center);
    }
    double best = -1.0;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& p : anchors) worst = std::min(worst, std::abs(primed_determinant(calc.mixed_hessian(p), a, b)));
        if (worst > best) {
          best = worst;
          split = CoordinateSplit{a, b, worst};
        }
      }
    }
  }
  rep.split = split;

  const double length_scale = [&] {
    double ext = 0.0;
    for (std::size_t d = 0; d < region.dims(); ++d) ext = std::max(ext, region.hi[d] - region.lo[d]);
    return 0.5 * ext;
  }();

  ClassifyOptions copts;
  copts.crit_tol = crit_tol;
  copts.rel_tol = opts.rel_tol;
  copts.j_max = opts.j_max;
  copts.derivative.split = split;
  copts.derivative.length_scale = length_scale;

  std::vector<int> types(critical.size(), -1);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::size_t c = 0; c < critical.size(); ++c) {
    try {
      types[c] = std::max(1, classify_type(calc, critical[c]->point, side, copts));
    } catch (const std::runtime_error&) {
      types[c] = -1;
    }
  }
  double min_grad = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < critical.size(); ++c) {
    if (types[c] < 0)
      ++rep.unclassified_samples;
    else
      rep.type_k = std::max(rep.type_k, types[c]);
    min_grad = std::min(min_grad, calc.grad_h(critical[c]->point).norm());
  }
  rep.min_grad_h = critical.empty() ? 0.0 : min_grad;
  rep.rank_drops_simply =
      rep.max_corank <= 1 && (critical.empty() || min_grad > 1e-8 * std::max(1.0, sup_grad));

  if (rep.type_k > 0) {
    std::vector<double> vals(records.size(), std::numeric_limits<double>::infinity());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t i = 0; i < records.size(); ++i) {
      try {
        vals[i] = std::abs(iterated_kernel_derivative(calc, records[i].point, side, rep.type_k, copts.derivative));
      } catch (const std::runtime_error&) {
      }
    }
    double kappa = std::numeric_limits<double>::infinity();
    for (double v : vals) kappa = std::min(kappa, v);
    rep.kappa = std::isfinite(kappa) ? kappa : 0.0;
  }
  return rep;
}

}  // namespace foldlab
