#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "foldlab/amplitude.hpp"
#include "foldlab/grid.hpp"
#include "foldlab/polynomial.hpp"

namespace foldlab {

using Complex = std::complex<double>;

namespace kernels {

// Entries are re-seeded from exact sincos at the start of every block of
// this many nodes along a theta line.
constexpr std::size_t kBlock = 32;
// Highest degree in the last theta variable the recurrence supports.
constexpr int kMaxLineDegree = 24;

enum class AmplitudeMode { Separable, Cached, Generic };

// Read-only description of the unweighted kernel K_ij = e^{i lambda S} A.
struct KernelView {
  const PolynomialPhase* phase = nullptr;
  double lambda = 0.0;
  const Grid* gx = nullptr;
  const Grid* gt = nullptr;
  const Amplitude* amplitude = nullptr;
  AmplitudeMode mode = AmplitudeMode::Generic;
  // Separable: base bump split into row and column profiles.
  const std::vector<double>* row_profile = nullptr;
  const std::vector<double>* col_profile = nullptr;
  // Cached: row-major Nx x Nt amplitude and a per (row, block) nonzero mask.
  const std::vector<double>* amp_cache = nullptr;
  const std::vector<std::uint8_t>* block_mask = nullptr;

  std::size_t rows() const { return gx->size(); }
  std::size_t cols() const { return gt->size(); }
  std::size_t blocks_per_line() const { return (gt->line_length() + kBlock - 1) / kBlock; }
  std::size_t blocks_per_row() const { return gt->line_count() * blocks_per_line(); }
};

// Products of the per-axis profiles of the base bump over the x and theta grids.
std::vector<double> axis_profile_product(const TensorBump& bump, const Grid& g, std::size_t first_axis);

// Full amplitude on the tensor grid together with its block mask.
void materialize_amplitude(const KernelView& kv, std::vector<double>& amp, std::vector<std::uint8_t>& mask);

// Exact single entry.
Complex entry(const KernelView& kv, std::size_t i, std::size_t j);

// u, y, v, z are interleaved blocks: element (node, c) at [node * b + c].
// y_i = sum_j K_ij u_j
void forward(const KernelView& kv, const Complex* u, std::size_t b, Complex* y);
// z_j = sum_i conj(K_ij) v_i
void adjoint(const KernelView& kv, const Complex* v, std::size_t b, Complex* z);

// Serial per-entry sincos with the generic amplitude; test and benchmark reference.
void forward_reference(const KernelView& kv, const Complex* u, std::size_t b, Complex* y);
void adjoint_reference(const KernelView& kv, const Complex* v, std::size_t b, Complex* z);

// Dense row-major K, rows in parallel.
std::vector<Complex> materialize_kernel(const KernelView& kv);

}  // namespace kernels
}  // namespace foldlab
