#include "foldlab/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "foldlab/errors.hpp"

namespace foldlab {

std::string component_kind_name(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::DyadicShell: return "dyadic-shell";
    case ComponentKind::NearCritical: return "near-critical";
    case ComponentKind::SigmaRefined: return "sigma-refined";
    case ComponentKind::LatticePiece: return "lattice-piece";
  }
  return "?";
}

std::optional<ComponentKind> parse_component_kind(const std::string& name) {
  if (name == "dyadic-shell" || name == "shell") return ComponentKind::DyadicShell;
  if (name == "near-critical") return ComponentKind::NearCritical;
  if (name == "sigma-refined") return ComponentKind::SigmaRefined;
  if (name == "lattice-piece") return ComponentKind::LatticePiece;
  return std::nullopt;
}

double ComponentDescriptor::hbar() const { return std::ldexp(1.0, -hbar_exp); }

std::string ComponentDescriptor::label() const {
  std::string s = component_kind_name(kind) + "(N=" + std::to_string(hbar_exp);
  if (kind != ComponentKind::NearCritical) s += ",sign=" + std::to_string(sign);
  if (!sigma.empty()) {
    s += ",sigma=";
    for (int v : sigma) s += v > 0 ? '+' : '-';
  }
  if (lattice) {
    s += ",Theta=[";
    for (std::size_t i = 0; i < lattice->theta.size(); ++i) s += (i ? "," : "") + std::to_string(lattice->theta[i]);
    s += "]";
    if (lattice->x) {
      s += ",X=[";
      for (std::size_t i = 0; i < lattice->x->size(); ++i) s += (i ? "," : "") + std::to_string((*lattice->x)[i]);
      s += "]";
    }
  }
  return s + ")";
}

namespace {

std::vector<std::vector<double>> box_samples(const Box& box, std::size_t per_axis) {
  const std::size_t d = box.dims();
  std::size_t total = 1;
  for (std::size_t a = 0; a < d; ++a) total *= per_axis;
  std::vector<std::vector<double>> pts(total, std::vector<double>(d));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t a = d; a-- > 0;) {
      const double t = static_cast<double>(rem % per_axis) / static_cast<double>(per_axis - 1);
      rem /= per_axis;
      pts[idx][a] = box.lo[a] + t * (box.hi[a] - box.lo[a]);
    }
  }
  return pts;
}

std::size_t samples_per_axis(std::size_t dims, double budget, std::size_t hi) {
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::pow(budget, 1.0 / static_cast<double>(dims))), 3, hi);
}

PolynomialPhase directional(const PolynomialPhase& p, const Eigen::VectorXd& v) {
  PolynomialPhase out = PolynomialPhase::constant(p.dim(), 0.0);
  for (int var = 0; var < p.num_vars(); ++var)
    if (v(var) != 0.0) out += v(var) * p.derivative(var);
  return out;
}

// Normalized lattice partition of unity on Z.
double lattice_chi(double v, long m) {
  const double num = lattice_bump(v - static_cast<double>(m));
  if (num == 0.0) return 0.0;
  const long f = static_cast<long>(std::floor(v));
  double den = 0.0;
  for (long q = f - 1; q <= f + 2; ++q) den += lattice_bump(v - static_cast<double>(q));
  return num / den;
}

}  // namespace

double DecompositionContext::kernel_derivative(std::span<const double> p, int j) const {
  if (j < static_cast<int>(kernel_powers.size())) return kernel_powers[j].evaluate(p);
  KernelDerivativeOptions o;
  o.split = split;
  double ext = 0.0;
  for (std::size_t a = 0; a < support.dims(); ++a) ext = std::max(ext, support.hi[a] - support.lo[a]);
  o.length_scale = 0.5 * ext;
  return iterated_kernel_derivative(*calc, p, side, j, o);
}

DecompositionContext make_context(PhaseCalculusPtr calc, const TensorBump& base, int k, ProjectionSide side) {
  if (!calc) throw ConfigError("decomposition needs a phase");
  if (k < 1) throw ConfigError("type k must be >= 1");
  base.validate();
  const int n = calc->dim();
  DecompositionContext ctx;
  ctx.calc = calc;
  ctx.side = side;
  ctx.k = k;
  ctx.support = base.support();

  const auto pts = box_samples(ctx.support, samples_per_axis(ctx.support.dims(), 2e5, 129));
  double sup_h = 0.0;
  for (const auto& p : pts) sup_h = std::max(sup_h, std::abs(calc->h_at(p)));
  ctx.D = 2.0 * sup_h;
  if (!(ctx.D > 0.0)) throw ConfigError("h vanishes identically on the amplitude support");

  if (n == 1) {
    ctx.split = CoordinateSplit{0, 0, 1.0};
  } else {
    double best = -1.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& p : pts) worst = std::min(worst, std::abs(primed_determinant(calc->mixed_hessian(p), a, b)));
        if (worst > best) {
          best = worst;
          ctx.split = CoordinateSplit{a, b, worst};
        }
      }
  }

  // Constant kernel field: the primed block and the coupling row/column are constants.
  bool constant = true;
  if (n > 1) {
    const int a = ctx.split->x_index, b = ctx.split->theta_index;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const bool used = side == ProjectionSide::Right ? (j != b) : (i != a);
        if (used && calc->dxdtheta(i, j).degree() > 0) constant = false;
      }
  }
  if (constant) {
    std::vector<double> center(ctx.support.dims());
    for (std::size_t d = 0; d < center.size(); ++d) center[d] = 0.5 * (ctx.support.lo[d] + ctx.support.hi[d]);
    const Eigen::VectorXd v = kernel_field(*calc, center, side, *ctx.split);
    ctx.kernel_powers.push_back(calc->h());
    for (int j = 1; j <= k; ++j) ctx.kernel_powers.push_back(directional(ctx.kernel_powers.back(), v));
  }
  return ctx;
}

double hbar_star(double lambda, int k) {
  if (!(lambda >= 1.0)) throw ConfigError("hbar_star needs lambda >= 1");
  if (k < 1) throw ConfigError("hbar_star needs k >= 1");
  return std::exp2(-(k * std::log2(lambda)) / (2.0 * k + 1.0));
}

int crossover_exp(double lambda, int k) {
  const double e = static_cast<double>(k) / (2.0 * k + 1.0) * std::log2(lambda);
  return static_cast<int>(std::floor(e + 1e-12));
}

int coarsest_shell_exp(const DecompositionContext& ctx) { return static_cast<int>(std::floor(-std::log2(ctx.D))); }

void validate_descriptor(const DecompositionContext& ctx, const ComponentDescriptor& d) {
  const int n = ctx.calc->dim();
  if (!(d.hbar() <= 2.0 * ctx.D)) throw ConfigError("hbar = 2^-" + std::to_string(d.hbar_exp) + " exceeds 2D");
  auto check_sigma = [&](bool allow_empty) {
    if (d.sigma.empty() && allow_empty) return;
    if (static_cast<int>(d.sigma.size()) != ctx.k - 1)
      throw ConfigError("sigma must have length k-1 = " + std::to_string(ctx.k - 1));
    for (int s : d.sigma)
      if (s != 1 && s != -1) throw ConfigError("sigma entries must be +1 or -1");
  };
  switch (d.kind) {
    case ComponentKind::DyadicShell:
      if (d.sign != 1 && d.sign != -1) throw ConfigError("shell sign must be +1 or -1");
      if (!d.sigma.empty() || d.lattice) throw ConfigError("shell descriptors take no sigma or lattice");
      break;
    case ComponentKind::NearCritical:
      if (!d.sigma.empty() || d.lattice) throw ConfigError("near-critical descriptors take no sigma or lattice");
      break;
    case ComponentKind::SigmaRefined:
      if (d.sign < -1 || d.sign > 1) throw ConfigError("sign must be -1, 0 or +1");
      if (d.lattice) throw ConfigError("sigma-refined descriptors take no lattice");
      check_sigma(false);
      break;
    case ComponentKind::LatticePiece:
      if (d.sign < -1 || d.sign > 1) throw ConfigError("sign must be -1, 0 or +1");
      if (!d.lattice) throw ConfigError("lattice piece needs a lattice index");
      if (static_cast<int>(d.lattice->theta.size()) != n) throw ConfigError("Theta must have n entries");
      if (d.lattice->x && static_cast<int>(d.lattice->x->size()) != n) throw ConfigError("X must have n entries");
      check_sigma(true);
      break;
  }
}

AmplitudeFactor amplitude_factor(const DecompositionContext& ctx, const ComponentDescriptor& d) {
  validate_descriptor(ctx, d);
  const int n = ctx.calc->dim();
  const int N = d.hbar_exp;
  const int sign = d.kind == ComponentKind::NearCritical ? 0 : d.sign;
  const double xscale = std::exp2(static_cast<double>(N) / static_cast<double>(ctx.k));
  return {d.label(), [ctx, d, n, N, sign, xscale](std::span<const double> p) {
            const CutoffFamily& cf = ctx.cutoffs;
            const double t = std::ldexp(ctx.calc->h_at(p), N);
            double v = sign == 0 ? cf.beta_bar(t) : cf.beta_signed(t, sign);
            if (v == 0.0) return 0.0;
            if (d.lattice) {
              for (int b = 0; b < n && v != 0.0; ++b) v *= lattice_chi(std::ldexp(p[n + b], N), d.lattice->theta[b]);
              if (d.lattice->x)
                for (int a = 0; a < n && v != 0.0; ++a) v *= lattice_chi(xscale * p[a], (*d.lattice->x)[a]);
              if (v == 0.0) return 0.0;
            }
            for (std::size_t j = 0; j < d.sigma.size() && v != 0.0; ++j)
              v *= cf.rho(d.sigma[j], std::ldexp(ctx.kernel_derivative(p, static_cast<int>(j) + 1), N));
            return v;
          }};
}

std::vector<ComponentDescriptor> decompose(const DecompositionContext& ctx, int hbar_o_exp, bool refine_sigma) {
  const int nmin = coarsest_shell_exp(ctx);
  const int no = std::max(hbar_o_exp, nmin);
  std::vector<ComponentDescriptor> out;
  for (int N = nmin; N < no; ++N)
    for (int s : {1, -1}) out.push_back({ComponentKind::DyadicShell, N, s, {}, std::nullopt});
  if (!refine_sigma || ctx.k == 1) {
    out.push_back({ComponentKind::NearCritical, no, 0, {}, std::nullopt});
    return out;
  }
  const int m = ctx.k - 1;
  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<int> sigma(m);
    for (int j = 0; j < m; ++j) sigma[j] = (mask >> j) & 1 ? -1 : 1;
    out.push_back({ComponentKind::SigmaRefined, no, 0, sigma, std::nullopt});
  }
  return out;
}

std::vector<std::vector<long>> lattice_points(const DecompositionContext& ctx, int hbar_exp) {
  const int n = ctx.calc->dim();
  std::vector<std::pair<long, long>> ranges;
  for (int b = 0; b < n; ++b) {
    const double lo = std::ldexp(ctx.support.lo[n + b], hbar_exp), hi = std::ldexp(ctx.support.hi[n + b], hbar_exp);
    ranges.emplace_back(static_cast<long>(std::ceil(lo - 0.625)), static_cast<long>(std::floor(hi + 0.625)));
  }
  std::vector<std::vector<long>> pts{{}};
  for (const auto& [lo, hi] : ranges) {
    std::vector<std::vector<long>> next;
    for (const auto& p : pts)
      for (long m = lo; m <= hi; ++m) {
        auto q = p;
        q.push_back(m);
        next.push_back(std::move(q));
      }
    pts = std::move(next);
  }
  return pts;
}

std::vector<ComponentDescriptor> lattice_refine(const DecompositionContext& ctx, const ComponentDescriptor& d) {
  validate_descriptor(ctx, d);
  if (d.kind == ComponentKind::LatticePiece) throw ConfigError("descriptor is already a lattice piece");
  const int sign = d.kind == ComponentKind::NearCritical ? 0 : d.sign;
  std::vector<ComponentDescriptor> out;
  for (auto& theta : lattice_points(ctx, d.hbar_exp))
    out.push_back({ComponentKind::LatticePiece, d.hbar_exp, sign, d.sigma, LatticeIndex{theta, std::nullopt}});
  return out;
}

double reconstruct_check(const DiscreteOperator& op, const DecompositionContext& ctx,
                         const std::vector<ComponentDescriptor>& components, int probes, std::uint64_t seed) {
  if (probes < 1) throw ConfigError("need at least one probe");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CMatrix u(static_cast<Eigen::Index>(op.cols()), probes);
  for (Eigen::Index c = 0; c < u.cols(); ++c)
    for (Eigen::Index r = 0; r < u.rows(); ++r) u(r, c) = Complex(nd(rng), nd(rng));
  const CMatrix full = op.apply(u);
  CMatrix sum = CMatrix::Zero(full.rows(), full.cols());
  for (const auto& d : components) {
    const auto piece = op.with_amplitude(op.amplitude().with_factor(amplitude_factor(ctx, d)));
    sum += piece.apply(u);
  }
  double worst = 0.0;
  for (Eigen::Index c = 0; c < full.cols(); ++c) {
    const double den = full.col(c).norm();
    const double num = (full.col(c) - sum.col(c)).norm();
    worst = std::max(worst, den > 0.0 ? num / den : num);
  }
  return worst;
}

double reconstruct_check(const DiscreteOperator& op, const DecompositionContext& ctx, int hbar_o_exp, int probes,
                         std::uint64_t seed) {
  return reconstruct_check(op, ctx, decompose(ctx, hbar_o_exp), probes, seed);
}

namespace {

// Solves S_t'(y, t) = eta' for the primed x coordinates of y, the
// distinguished coordinate held fixed. Returns false when Newton fails.
bool invert_primed(const PhaseCalculus& calc, const CoordinateSplit& split, std::vector<double>& y,
                   const Eigen::VectorXd& eta) {
  const int n = calc.dim();
  std::vector<int> xs, ts;
  for (int i = 0; i < n; ++i) {
    if (i != split.x_index) xs.push_back(i);
    if (i != split.theta_index) ts.push_back(i);
  }
  const int m = n - 1;
  for (int it = 0; it < 50; ++it) {
    Eigen::VectorXd r(m);
    for (int q = 0; q < m; ++q) r(q) = calc.dtheta(ts[q]).evaluate(y) - eta(q);
    if (r.norm() <= 1e-13 * std::max(1.0, eta.norm())) return true;
    Eigen::MatrixXd jac(m, m);
    for (int q = 0; q < m; ++q)
      for (int c = 0; c < m; ++c) jac(q, c) = calc.dxdtheta(xs[c], ts[q]).evaluate(y);
    const Eigen::VectorXd step = jac.partialPivLu().solve(r);
    if (!step.allFinite()) return false;
    for (int c = 0; c < m; ++c) y[xs[c]] -= step(c);
  }
  return false;
}

Eigen::VectorXd primed_eta(const PhaseCalculus& calc, const CoordinateSplit& split, std::span<const double> p) {
  const int n = calc.dim();
  Eigen::VectorXd eta(n - 1);
  for (int j = 0, q = 0; j < n; ++j)
    if (j != split.theta_index) eta(q++) = calc.dtheta(j).evaluate(p);
  return eta;
}

}  // namespace

ConvexityResult verify_convexity(const DecompositionContext& ctx, const ComponentDescriptor& d, std::size_t pairs,
                                 std::uint64_t seed, double max_length) {
  if (d.kind != ComponentKind::SigmaRefined) throw ConfigError("convexity check needs a sigma-refined descriptor");
  if (d.sign == 0) throw ConfigError("convexity check needs a shell base (sign +1 or -1)");
  if (!(max_length > 0.0)) throw ConfigError("segment length must be positive");
  const PhaseCalculus& calc = *ctx.calc;
  const int n = calc.dim();
  const auto factor = amplitude_factor(ctx, d);
  auto on_support = [&](std::span<const double> p) { return ctx.support.contains(p) && factor.eval(p) > 0.0; };

  // Support cells of a uniform cell grid, visited cyclically (stratification).
  const std::size_t dims = ctx.support.dims();
  const std::size_t m = n == 1 ? 128 : samples_per_axis(dims, 6.6e4, 128);
  std::vector<double> width(dims);
  for (std::size_t a = 0; a < dims; ++a) width[a] = (ctx.support.hi[a] - ctx.support.lo[a]) / static_cast<double>(m);
  std::vector<std::vector<double>> cells;
  {
    std::size_t total = 1;
    for (std::size_t a = 0; a < dims; ++a) total *= m;
    std::vector<double> c(dims);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rem = idx;
      for (std::size_t a = dims; a-- > 0;) {
        c[a] = ctx.support.lo[a] + (static_cast<double>(rem % m) + 0.5) * width[a];
        rem /= m;
      }
      if (factor.eval(c) > 0.0) cells.push_back(c);
    }
  }

  ConvexityResult res;
  if (cells.empty()) {
    res.no_samples = true;
    return res;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-0.5, 0.5), len(0.0, 1.0);
  std::normal_distribution<double> nd;
  const double hbar = d.hbar();
  res.min_ratio = std::numeric_limits<double>::infinity();
  res.min_h_over_hbar = std::numeric_limits<double>::infinity();
  const CoordinateSplit split = ctx.split.value_or(CoordinateSplit{n - 1, n - 1, 1.0});
  const std::size_t budget = 200 * pairs + 1000;
  constexpr int kSegmentPoints = 17;

  for (std::size_t attempt = 0; attempt < budget && res.pairs < pairs; ++attempt) {
    const auto& cell = cells[attempt % cells.size()];
    std::vector<double> p(dims);
    for (std::size_t a = 0; a < dims; ++a) p[a] = cell[a] + unit(rng) * width[a];
    if (!on_support(p)) continue;

    // Target endpoint in (eta', x_n) coordinates at fixed theta.
    Eigen::VectorXd dir(n);
    for (int q = 0; q < n; ++q) dir(q) = nd(rng);
    if (dir.norm() == 0.0) continue;
    dir *= max_length * len(rng) / dir.norm();
    if (dir.norm() == 0.0) continue;
    const Eigen::VectorXd eta0 = n > 1 ? primed_eta(calc, split, p) : Eigen::VectorXd();

    auto point_at = [&](double s, std::vector<double>& out) {
      out = p;
      out[split.x_index] = p[split.x_index] + s * dir(n - 1);
      if (n == 1) return true;
      return invert_primed(calc, split, out, eta0 + s * dir.head(n - 1));
    };
    std::vector<double> q;
    if (!point_at(1.0, q) || !on_support(q)) continue;

    double dx2 = 0.0, ds2 = 0.0;
    for (int a = 0; a < n; ++a) {
      dx2 += (p[a] - q[a]) * (p[a] - q[a]);
      const double ds = calc.dtheta(a).evaluate(p) - calc.dtheta(a).evaluate(q);
      ds2 += ds * ds;
    }
    if (dx2 == 0.0) continue;
    double seg_min = std::numeric_limits<double>::infinity();
    bool ok = true;
    std::vector<double> r;
    for (int s = 0; s < kSegmentPoints && ok; ++s) {
      ok = point_at(static_cast<double>(s) / (kSegmentPoints - 1), r);
      if (ok) seg_min = std::min(seg_min, d.sign * calc.h_at(r) / hbar);
    }
    if (!ok) continue;
    ++res.pairs;
    res.min_ratio = std::min(res.min_ratio, std::sqrt(ds2) / (hbar * std::sqrt(dx2)));
    res.min_h_over_hbar = std::min(res.min_h_over_hbar, seg_min);
  }
  if (res.pairs == 0) {
    res.no_samples = true;
    res.min_ratio = res.min_h_over_hbar = 0.0;
    return res;
  }
  res.lemma2_holds = res.min_h_over_hbar >= 0.25;
  return res;
}

Lemma1Result verify_lemma1(const PhaseCalculus& calc, std::span<const double> point, double fd_step) {
  if (!(fd_step > 0.0)) throw ConfigError("finite-difference step must be positive");
  const int n = calc.dim();
  Lemma1Result r;
  r.split = adapt_coordinates(calc, point);
  const Eigen::MatrixXd mixed = calc.mixed_hessian(point);
  if (n > 1 && corank(primed_block(mixed, r.split.x_index, r.split.theta_index)) > 0)
    throw DegenerateCoordinatesError("primed block is singular at this point");
  const int a = r.split.x_index, b = r.split.theta_index;
  const double eps = fd_step * std::max(1.0, std::abs(point[a]));
  const std::vector<double> base(point.begin(), point.end());
  const Eigen::VectorXd eta0 = n > 1 ? primed_eta(calc, r.split, base) : Eigen::VectorXd();
  auto eta_n = [&](double s) {
    std::vector<double> y = base;
    y[a] += s;
    if (n > 1 && !invert_primed(calc, r.split, y, eta0))
      throw DegenerateCoordinatesError("could not hold eta' fixed along the x_n direction");
    return calc.dtheta(b).evaluate(y);
  };
  r.lhs = (eta_n(eps) - eta_n(-eps)) / (2.0 * eps);
  const double det_primed = primed_determinant(mixed, a, b);
  const double cofactor_sign = (a + b) % 2 == 0 ? 1.0 : -1.0;
  r.rhs = cofactor_sign * calc.h_at(point) / det_primed;
  r.rel_error = std::abs(r.lhs - r.rhs) / std::max(std::abs(r.rhs), std::numeric_limits<double>::min());
  return r;
}

}  // namespace foldlab
