#include "concept_align/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>

namespace concept_align::kernels {

int thread_cap() noexcept {
  if (const char* env = std::getenv("CONCEPT_ALIGN_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(n);
  }
  return omp_get_max_threads();
}

namespace serial {

void token_mean(std::span<const float> data, std::size_t layers, std::size_t tokens,
                std::size_t dim, std::span<float> out) {
  for (std::size_t l = 0; l < layers; ++l) {
    const float* layer = data.data() + l * tokens * dim;
    for (std::size_t d = 0; d < dim; ++d) {
      double acc = 0.0;
      for (std::size_t k = 0; k < tokens; ++k) acc += static_cast<double>(layer[k * dim + d]);
      out[l * dim + d] = static_cast<float>(acc / static_cast<double>(tokens));
    }
  }
}

void stacked_mean(std::span<const std::span<const float>> inputs, std::span<double> out) {
  const double n = static_cast<double>(inputs.size());
  for (std::size_t e = 0; e < out.size(); ++e) {
    double acc = 0.0;
    for (const auto& in : inputs) acc += static_cast<double>(in[e]);
    out[e] = acc / n;
  }
}

void layer_mean(std::span<const double> rows, std::size_t layers, std::size_t dim,
                std::span<double> out) {
  for (std::size_t d = 0; d < dim; ++d) {
    double acc = 0.0;
    for (std::size_t l = 0; l < layers; ++l) acc += rows[l * dim + d];
    out[d] = acc / static_cast<double>(layers);
  }
}

void row_norms(std::span<const double> vectors, std::size_t count, std::size_t dim,
               std::span<double> out) {
  for (std::size_t i = 0; i < count; ++i) out[i] = std::sqrt(sum_squares(vectors.data() + i * dim, dim));
}

void pairwise_cosine(std::span<const double> vectors, std::span<const double> norms,
                     std::size_t count, std::size_t dim, std::span<double> out) {
  for (std::size_t i = 0; i < count; ++i) {
    out[i * count + i] = 1.0;
    for (std::size_t j = i + 1; j < count; ++j) {
      const double c = clamp_unit(dot(vectors.data() + i * dim, vectors.data() + j * dim, dim) /
                                  (norms[i] * norms[j]));
      out[i * count + j] = c;
      out[j * count + i] = c;
    }
  }
}

}  // namespace serial

namespace parallel {

void token_mean(std::span<const float> data, std::size_t layers, std::size_t tokens,
                std::size_t dim, std::span<float> out) {
  const auto total = static_cast<std::int64_t>(layers * dim);
#pragma omp parallel for num_threads(thread_cap()) schedule(static)
  for (std::int64_t e = 0; e < total; ++e) {
    const std::size_t l = static_cast<std::size_t>(e) / dim;
    const std::size_t d = static_cast<std::size_t>(e) % dim;
    const float* layer = data.data() + l * tokens * dim;
    double acc = 0.0;
    for (std::size_t k = 0; k < tokens; ++k) acc += static_cast<double>(layer[k * dim + d]);
    out[e] = static_cast<float>(acc / static_cast<double>(tokens));
  }
}

void stacked_mean(std::span<const std::span<const float>> inputs, std::span<double> out) {
  const double n = static_cast<double>(inputs.size());
  const auto total = static_cast<std::int64_t>(out.size());
#pragma omp parallel for num_threads(thread_cap()) schedule(static)
  for (std::int64_t e = 0; e < total; ++e) {
    double acc = 0.0;
    for (const auto& in : inputs) acc += static_cast<double>(in[e]);
    out[e] = acc / n;
  }
}

void layer_mean(std::span<const double> rows, std::size_t layers, std::size_t dim,
                std::span<double> out) {
  const auto total = static_cast<std::int64_t>(dim);
#pragma omp parallel for num_threads(thread_cap()) schedule(static)
  for (std::int64_t d = 0; d < total; ++d) {
    double acc = 0.0;
    for (std::size_t l = 0; l < layers; ++l) acc += rows[l * dim + d];
    out[d] = acc / static_cast<double>(layers);
  }
}

void row_norms(std::span<const double> vectors, std::size_t count, std::size_t dim,
               std::span<double> out) {
  const auto total = static_cast<std::int64_t>(count);
#pragma omp parallel for num_threads(thread_cap()) schedule(static)
  for (std::int64_t i = 0; i < total; ++i) out[i] = std::sqrt(sum_squares(vectors.data() + i * dim, dim));
}

void pairwise_cosine(std::span<const double> vectors, std::span<const double> norms,
                     std::size_t count, std::size_t dim, std::span<double> out) {
  const auto rows = static_cast<std::int64_t>(count);
  // Row i owns the pairs (i, j > i); rows shrink, hence dynamic scheduling.
#pragma omp parallel for num_threads(thread_cap()) schedule(dynamic, 4)
  for (std::int64_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    out[i * count + i] = 1.0;
    for (std::size_t j = i + 1; j < count; ++j) {
      const double c = clamp_unit(dot(vectors.data() + i * dim, vectors.data() + j * dim, dim) /
                                  (norms[i] * norms[j]));
      out[i * count + j] = c;
      out[j * count + i] = c;
    }
  }
}

}  // namespace parallel

void token_mean(ExecPolicy policy, std::span<const float> data, std::size_t layers,
                std::size_t tokens, std::size_t dim, std::span<float> out) {
  policy == ExecPolicy::Serial ? serial::token_mean(data, layers, tokens, dim, out)
                               : parallel::token_mean(data, layers, tokens, dim, out);
}

void stacked_mean(ExecPolicy policy, std::span<const std::span<const float>> inputs,
                  std::span<double> out) {
  policy == ExecPolicy::Serial ? serial::stacked_mean(inputs, out) : parallel::stacked_mean(inputs, out);
}

void layer_mean(ExecPolicy policy, std::span<const double> rows, std::size_t layers,
                std::size_t dim, std::span<double> out) {
  policy == ExecPolicy::Serial ? serial::layer_mean(rows, layers, dim, out)
                               : parallel::layer_mean(rows, layers, dim, out);
}

void row_norms(ExecPolicy policy, std::span<const double> vectors, std::size_t count,
               std::size_t dim, std::span<double> out) {
  policy == ExecPolicy::Serial ? serial::row_norms(vectors, count, dim, out)
                               : parallel::row_norms(vectors, count, dim, out);
}

void pairwise_cosine(ExecPolicy policy, std::span<const double> vectors,
                     std::span<const double> norms, std::size_t count, std::size_t dim,
                     std::span<double> out) {
  policy == ExecPolicy::Serial ? serial::pairwise_cosine(vectors, norms, count, dim, out)
                               : parallel::pairwise_cosine(vectors, norms, count, dim, out);
}

}  // namespace concept_align::kernels
