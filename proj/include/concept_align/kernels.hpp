#pragma once

// Numeric kernels behind pooling, class means and pairwise similarity.
//
// Every kernel exists twice: a serial reference and an OpenMP version. The
// OpenMP versions only split work across independent output elements; each
// output keeps the serial summation order, so both produce bit-identical
// results for any thread count.

#include <cstddef>
#include <span>

namespace concept_align {

enum class ExecPolicy { Serial, Parallel };

namespace kernels {

// Maximum worker count for the parallel kernels. Reads CONCEPT_ALIGN_THREADS
// (positive integer); falls back to the OpenMP default.
int thread_cap() noexcept;

// Sequential double-precision reductions shared by all kernels and by
// cosine(), so a single pair always gives the same bits on every path.
inline double dot(const double* u, const double* v, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += u[i] * v[i];
  return acc;
}

inline double sum_squares(const double* u, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += u[i] * u[i];
  return acc;
}

inline double clamp_unit(double x) noexcept { return x > 1.0 ? 1.0 : (x < -1.0 ? -1.0 : x); }

namespace serial {

// data is (layers, tokens, dim) row-major; out is (layers, dim).
// out[l][d] = float((sum_k data[l][k][d]) / tokens), summed in double over k.
void token_mean(std::span<const float> data, std::size_t layers, std::size_t tokens,
                std::size_t dim, std::span<float> out);

// Elementwise mean of equally sized float arrays, accumulated in double in
// input order.
void stacked_mean(std::span<const std::span<const float>> inputs, std::span<double> out);

// rows is (layers, dim); out[d] = (sum_l rows[l][d]) / layers.
void layer_mean(std::span<const double> rows, std::size_t layers, std::size_t dim,
                std::span<double> out);

// Euclidean norm of each row of a (count, dim) array.
void row_norms(std::span<const double> vectors, std::size_t count, std::size_t dim,
               std::span<double> out);

// Full (count, count) cosine matrix from precomputed row norms. Norms must be
// non-zero. Diagonal is exactly 1; out[i][j] and out[j][i] are one value.
void pairwise_cosine(std::span<const double> vectors, std::span<const double> norms,
                     std::size_t count, std::size_t dim, std::span<double> out);

}  // namespace serial

namespace parallel {

void token_mean(std::span<const float> data, std::size_t layers, std::size_t tokens,
                std::size_t dim, std::span<float> out);
void stacked_mean(std::span<const std::span<const float>> inputs, std::span<double> out);
void layer_mean(std::span<const double> rows, std::size_t layers, std::size_t dim,
                std::span<double> out);
void row_norms(std::span<const double> vectors, std::size_t count, std::size_t dim,
               std::span<double> out);
void pairwise_cosine(std::span<const double> vectors, std::span<const double> norms,
                     std::size_t count, std::size_t dim, std::span<double> out);

}  // namespace parallel

// Dispatchers.
void token_mean(ExecPolicy policy, std::span<const float> data, std::size_t layers,
                std::size_t tokens, std::size_t dim, std::span<float> out);
void stacked_mean(ExecPolicy policy, std::span<const std::span<const float>> inputs,
                  std::span<double> out);
void layer_mean(ExecPolicy policy, std::span<const double> rows, std::size_t layers,
                std::size_t dim, std::span<double> out);
void row_norms(ExecPolicy policy, std::span<const double> vectors, std::size_t count,
               std::size_t dim, std::span<double> out);
void pairwise_cosine(ExecPolicy policy, std::span<const double> vectors,
                     std::span<const double> norms, std::size_t count, std::size_t dim,
                     std::span<double> out);

}  // namespace kernels
}  // namespace concept_align
