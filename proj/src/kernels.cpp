#include "foldlab/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "foldlab/errors.hpp"

namespace foldlab::kernels {

namespace {

constexpr int kTable = kMaxLineDegree + 1;

// stirling[k][m] = m! S2(k, m): k-th power in terms of falling factorials,
// i.e. the m-th forward difference at 0 of s -> s^k.
struct Tables {
  double stirling[kTable][kTable] = {};
  double binom[kTable][kTable] = {};

  Tables() {
    double s2[kTable][kTable] = {};
    s2[0][0] = 1.0;
    for (int k = 1; k < kTable; ++k)
      for (int m = 1; m <= k; ++m) s2[k][m] = m * s2[k - 1][m] + s2[k - 1][m - 1];
    for (int k = 0; k < kTable; ++k) {
      double fact = 1.0;
      for (int m = 0; m <= k; ++m) {
        if (m > 0) fact *= m;
        stirling[k][m] = fact * s2[k][m];
      }
      binom[k][0] = 1.0;
      for (int m = 1; m <= k; ++m) binom[k][m] = binom[k - 1][m - 1] + (m <= k - 1 ? binom[k - 1][m] : 0.0);
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

// e^{i lambda phi(s)} along one grid line, advanced by the forward-difference
// recurrence z_m <- z_m z_{m+1} (d complex products per node).
class LineRecurrence {
 public:
  LineRecurrence(std::vector<double> coeffs, double lambda, const GridAxis& axis)
      : c_(std::move(coeffs)), lambda_(lambda), axis_(axis) {
    while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
    if (c_.empty()) c_.push_back(0.0);
    d_ = static_cast<int>(c_.size()) - 1;
    if (d_ > kMaxLineDegree) throw ConfigError("phase degree along a grid line exceeds the recurrence limit");
  }

  void seed(std::size_t s0) {
    const Tables& tb = tables();
    const double t0 = axis_.node(s0);
    const double h = axis_.spacing();
    std::array<double, kTable> pw{}, q{};
    pw[0] = 1.0;
    for (int k = 1; k <= d_; ++k) pw[k] = pw[k - 1] * t0;
    // Taylor coefficients at t0, rescaled to the node index.
    double hm = 1.0;
    for (int m = 0; m <= d_; ++m) {
      double a = 0.0;
      for (int k = m; k <= d_; ++k) a += c_[k] * tb.binom[k][m] * pw[k - m];
      q[m] = a * hm;
      hm *= h;
    }
    for (int m = 0; m <= d_; ++m) {
      double diff = 0.0;
      for (int k = m; k <= d_; ++k) diff += q[k] * tb.stirling[k][m];
      const double ph = lambda_ * diff;
      re_[m] = std::cos(ph);
      im_[m] = std::sin(ph);
    }
  }

  double re() const { return re_[0]; }
  double im() const { return im_[0]; }

  void advance() {
    for (int m = 0; m < d_; ++m) {
      const double r = re_[m] * re_[m + 1] - im_[m] * im_[m + 1];
      const double i = re_[m] * im_[m + 1] + im_[m] * re_[m + 1];
      re_[m] = r;
      im_[m] = i;
    }
  }

 private:
  std::vector<double> c_;
  double lambda_;
  GridAxis axis_;
  int d_ = 0;
  std::array<double, kTable> re_{}, im_{};
};

std::vector<std::uint8_t> column_block_mask(const KernelView& kv) {
  const std::size_t L = kv.gt->line_length(), nb = kv.blocks_per_line();
  std::vector<std::uint8_t> mask(kv.blocks_per_row(), 0);
  const auto& col = *kv.col_profile;
  for (std::size_t l = 0; l < kv.gt->line_count(); ++l)
    for (std::size_t s = 0; s < L; ++s)
      if (col[l * L + s] != 0.0) mask[l * nb + s / kBlock] = 1;
  return mask;
}

// Visits every potentially nonzero entry of row i in line/block order and
// calls f(j, re, im) with the unit phasor scaled by the non-separable amplitude.
template <class F>
void sweep_row(const KernelView& kv, std::size_t i, std::span<double> p, const std::vector<std::uint8_t>* colmask,
               F&& f) {
  const int n = kv.phase->dim();
  const std::size_t L = kv.gt->line_length(), nb = kv.blocks_per_line(), bpr = kv.blocks_per_row();
  const std::size_t nt = kv.cols();
  const GridAxis& last = kv.gt->axes().back();
  const int tv = theta_var(n, n - 1);
  kv.gx->node(i, p.first(static_cast<std::size_t>(n)));
  for (std::size_t l = 0; l < kv.gt->line_count(); ++l) {
    bool any = false;
    for (std::size_t blk = 0; blk < nb && !any; ++blk) {
      if (kv.mode == AmplitudeMode::Separable) any = (*colmask)[l * nb + blk];
      else if (kv.mode == AmplitudeMode::Cached) any = (*kv.block_mask)[i * bpr + l * nb + blk];
      else any = true;
    }
    if (!any) continue;
    kv.gt->node(l * L, p.subspan(static_cast<std::size_t>(n)));
    LineRecurrence rec(kv.phase->restrict_to(tv, p), kv.lambda, last);
    for (std::size_t blk = 0; blk < nb; ++blk) {
      if (kv.mode == AmplitudeMode::Separable && !(*colmask)[l * nb + blk]) continue;
      if (kv.mode == AmplitudeMode::Cached && !(*kv.block_mask)[i * bpr + l * nb + blk]) continue;
      const std::size_t s0 = blk * kBlock, s1 = std::min(s0 + kBlock, L);
      rec.seed(s0);
      for (std::size_t s = s0; s < s1; ++s, rec.advance()) {
        const std::size_t j = l * L + s;
        double a = 1.0;
        if (kv.mode == AmplitudeMode::Cached) {
          a = (*kv.amp_cache)[i * nt + j];
        } else if (kv.mode == AmplitudeMode::Generic) {
          p[p.size() - 1] = last.node(s);
          a = (*kv.amplitude)(p);
        }
        if (a == 0.0) continue;
        f(j, a * rec.re(), a * rec.im());
      }
    }
  }
}

void check_view(const KernelView& kv) {
  if (!kv.phase || !kv.gx || !kv.gt || !kv.amplitude) throw ConfigError("incomplete kernel view");
  if (kv.mode == AmplitudeMode::Separable && (!kv.row_profile || !kv.col_profile))
    throw ConfigError("separable kernel view without profiles");
  if (kv.mode == AmplitudeMode::Cached && (!kv.amp_cache || !kv.block_mask))
    throw ConfigError("cached kernel view without amplitude cache");
}

}  // namespace

std::vector<double> axis_profile_product(const TensorBump& bump, const Grid& g, std::size_t first_axis) {
  std::vector<double> out(g.size());
  std::vector<double> node(g.dims());
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    g.node(idx, node);
    double v = 1.0;
    for (std::size_t a = 0; a < g.dims(); ++a) v *= bump.profile(first_axis + a, node[a]);
    out[idx] = v;
  }
  return out;
}

void materialize_amplitude(const KernelView& kv, std::vector<double>& amp, std::vector<std::uint8_t>& mask) {
  const std::size_t nx = kv.rows(), nt = kv.cols(), n2 = kv.gx->dims() + kv.gt->dims();
  const std::size_t nb = kv.blocks_per_line(), bpr = kv.blocks_per_row(), L = kv.gt->line_length();
  amp.assign(nx * nt, 0.0);
  mask.assign(nx * bpr, 0);
#pragma omp parallel
  {
    std::vector<double> p(n2);
#pragma omp for schedule(dynamic, 8)
    for (std::size_t i = 0; i < nx; ++i) {
      kv.gx->node(i, std::span<double>(p).first(kv.gx->dims()));
      for (std::size_t j = 0; j < nt; ++j) {
        kv.gt->node(j, std::span<double>(p).subspan(kv.gx->dims()));
        const double a = (*kv.amplitude)(p);
        amp[i * nt + j] = a;
        if (a != 0.0) mask[i * bpr + (j / L) * nb + (j % L) / kBlock] = 1;
      }
    }
  }
}

Complex entry(const KernelView& kv, std::size_t i, std::size_t j) {
  std::vector<double> p(kv.gx->dims() + kv.gt->dims());
  kv.gx->node(i, std::span<double>(p).first(kv.gx->dims()));
  kv.gt->node(j, std::span<double>(p).subspan(kv.gx->dims()));
  return std::polar((*kv.amplitude)(p), kv.lambda * kv.phase->evaluate(p));
}

void forward(const KernelView& kv, const Complex* u, std::size_t b, Complex* y) {
  check_view(kv);
  const std::size_t nx = kv.rows(), nt = kv.cols(), n2 = kv.gx->dims() + kv.gt->dims();
  std::vector<Complex> scaled;
  std::vector<std::uint8_t> colmask;
  const Complex* src = u;
  if (kv.mode == AmplitudeMode::Separable) {
    scaled.resize(nt * b);
    for (std::size_t j = 0; j < nt; ++j)
      for (std::size_t c = 0; c < b; ++c) scaled[j * b + c] = u[j * b + c] * (*kv.col_profile)[j];
    src = scaled.data();
    colmask = column_block_mask(kv);
  }
  const double* us = reinterpret_cast<const double*>(src);
#pragma omp parallel
  {
    std::vector<double> p(n2), acc(2 * b);
#pragma omp for schedule(dynamic, 4)
    for (std::size_t i = 0; i < nx; ++i) {
      std::fill(acc.begin(), acc.end(), 0.0);
      const double rowscale = kv.mode == AmplitudeMode::Separable ? (*kv.row_profile)[i] : 1.0;
      if (rowscale != 0.0) {
        sweep_row(kv, i, p, &colmask, [&](std::size_t j, double er, double ei) {
          const double* uj = us + 2 * j * b;
          for (std::size_t c = 0; c < b; ++c) {
            acc[2 * c] += er * uj[2 * c] - ei * uj[2 * c + 1];
            acc[2 * c + 1] += er * uj[2 * c + 1] + ei * uj[2 * c];
          }
        });
      }
      for (std::size_t c = 0; c < b; ++c) y[i * b + c] = Complex(acc[2 * c], acc[2 * c + 1]) * rowscale;
    }
  }
}

void adjoint(const KernelView& kv, const Complex* v, std::size_t b, Complex* z) {
  check_view(kv);
  const std::size_t nx = kv.rows(), nt = kv.cols(), n2 = kv.gx->dims() + kv.gt->dims();
  std::vector<std::uint8_t> colmask;
  if (kv.mode == AmplitudeMode::Separable) colmask = column_block_mask(kv);
  // Row chunks with private accumulators, summed in chunk order, so the
  // result does not depend on the thread count.
  const std::size_t budget = std::size_t{1} << 25;
  const std::size_t nchunks = std::max<std::size_t>(1, std::min({std::size_t{64}, nx, budget / std::max<std::size_t>(1, nt * b)}));
  std::vector<double> buf(nchunks * nt * b * 2, 0.0);
#pragma omp parallel
  {
    std::vector<double> p(n2), vi(2 * b);
#pragma omp for schedule(dynamic, 1)
    for (std::size_t ch = 0; ch < nchunks; ++ch) {
      double* out = buf.data() + ch * nt * b * 2;
      const std::size_t i0 = nx * ch / nchunks, i1 = nx * (ch + 1) / nchunks;
      for (std::size_t i = i0; i < i1; ++i) {
        const double rowscale = kv.mode == AmplitudeMode::Separable ? (*kv.row_profile)[i] : 1.0;
        if (rowscale == 0.0) continue;
        for (std::size_t c = 0; c < b; ++c) {
          vi[2 * c] = v[i * b + c].real() * rowscale;
          vi[2 * c + 1] = v[i * b + c].imag() * rowscale;
        }
        sweep_row(kv, i, p, &colmask, [&](std::size_t j, double er, double ei) {
          double* zj = out + 2 * j * b;
          for (std::size_t c = 0; c < b; ++c) {
            zj[2 * c] += er * vi[2 * c] + ei * vi[2 * c + 1];
            zj[2 * c + 1] += er * vi[2 * c + 1] - ei * vi[2 * c];
          }
        });
      }
    }
#pragma omp for schedule(static)
    for (std::size_t j = 0; j < nt; ++j) {
      const double colscale = kv.mode == AmplitudeMode::Separable ? (*kv.col_profile)[j] : 1.0;
      for (std::size_t c = 0; c < b; ++c) {
        double re = 0.0, im = 0.0;
        for (std::size_t ch = 0; ch < nchunks; ++ch) {
          const double* src = buf.data() + (ch * nt + j) * b * 2;
          re += src[2 * c];
          im += src[2 * c + 1];
        }
        z[j * b + c] = Complex(re, im) * colscale;
      }
    }
  }
}

void forward_reference(const KernelView& kv, const Complex* u, std::size_t b, Complex* y) {
  check_view(kv);
  const std::size_t nx = kv.rows(), nt = kv.cols();
  std::vector<double> p(kv.gx->dims() + kv.gt->dims());
  for (std::size_t i = 0; i < nx; ++i) {
    kv.gx->node(i, std::span<double>(p).first(kv.gx->dims()));
    for (std::size_t c = 0; c < b; ++c) y[i * b + c] = 0.0;
    for (std::size_t j = 0; j < nt; ++j) {
      kv.gt->node(j, std::span<double>(p).subspan(kv.gx->dims()));
      const double a = (*kv.amplitude)(p);
      if (a == 0.0) continue;
      const Complex k = std::polar(a, kv.lambda * kv.phase->evaluate(p));
      for (std::size_t c = 0; c < b; ++c) y[i * b + c] += k * u[j * b + c];
    }
  }
}

void adjoint_reference(const KernelView& kv, const Complex* v, std::size_t b, Complex* z) {
  check_view(kv);
  const std::size_t nx = kv.rows(), nt = kv.cols();
  std::vector<double> p(kv.gx->dims() + kv.gt->dims());
  for (std::size_t j = 0; j < nt; ++j) {
    kv.gt->node(j, std::span<double>(p).subspan(kv.gx->dims()));
    for (std::size_t c = 0; c < b; ++c) z[j * b + c] = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
      kv.gx->node(i, std::span<double>(p).first(kv.gx->dims()));
      const double a = (*kv.amplitude)(p);
      if (a == 0.0) continue;
      const Complex k = std::polar(a, -kv.lambda * kv.phase->evaluate(p));
      for (std::size_t c = 0; c < b; ++c) z[j * b + c] += k * v[i * b + c];
    }
  }
}

std::vector<Complex> materialize_kernel(const KernelView& kv) {
  check_view(kv);
  const std::size_t nx = kv.rows(), nt = kv.cols();
  std::vector<Complex> k(nx * nt);
#pragma omp parallel
  {
    std::vector<double> p(kv.gx->dims() + kv.gt->dims());
#pragma omp for schedule(dynamic, 8)
    for (std::size_t i = 0; i < nx; ++i) {
      kv.gx->node(i, std::span<double>(p).first(kv.gx->dims()));
      for (std::size_t j = 0; j < nt; ++j) {
        kv.gt->node(j, std::span<double>(p).subspan(kv.gx->dims()));
        const double a = (*kv.amplitude)(p);
        k[i * nt + j] = a == 0.0 ? Complex(0.0) : std::polar(a, kv.lambda * kv.phase->evaluate(p));
      }
    }
  }
  return k;
}

}  // namespace foldlab::kernels
