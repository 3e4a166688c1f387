#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "concept_align/dense.hpp"
#include "concept_align/kernels.hpp"
#include "concept_align/vectors.hpp"

namespace concept_align {

struct SimilarityMatrix {
  std::vector<std::string> concept_ids;
  Dense<double> values;  // N x N

  std::size_t size() const noexcept { return concept_ids.size(); }
  std::optional<std::size_t> index_of(std::string_view concept_id) const;

  // Symmetric, unit diagonal, entries in [-1, 1].
  void validate() const;
};

// Cosine of every pair of layer-averaged vectors; diagonal exactly 1.
// Needs >= 2 vectors of one dimension; throws DegenerateVector naming the
// concept on a zero vector.
SimilarityMatrix pairwise_matrix(std::span<const ConceptVector> vectors,
                                 ExecPolicy policy = ExecPolicy::Parallel);

// Strict upper triangle, row-major: N(N-1)/2 values.
std::vector<double> off_diagonal_values(const SimilarityMatrix& m);

struct Histogram {
  std::vector<double> bin_edges;  // B + 1 ascending edges spanning [-1, 1]
  std::vector<std::size_t> counts;
};

inline constexpr std::size_t kDefaultBins = 40;

// Uniform bins over [-1, 1]; half-open except the last, which includes 1.
// Throws EmptyInput on no values, Validation on n_bins == 0 or a value
// outside [-1, 1].
Histogram histogram(std::span<const double> values, std::size_t n_bins = kDefaultBins);

inline constexpr std::string_view kPercentileMethod = "linear_interpolation_closest_ranks";
inline constexpr std::string_view kPinnedMethod = "pinned";
inline constexpr double kDefaultPercentile = 80.0;

struct ThresholdResult {
  double percentile = kDefaultPercentile;
  double value = 0.0;
  std::size_t n_pairs = 0;
  std::string method;
  // Set when `value` was pinned: the percentile value it replaced.
  std::optional<double> computed_value;
};

// Sorted ascending, rank r = p/100 * (n - 1), value interpolated linearly
// between ranks floor(r) and ceil(r). Requires 0 < p < 100.
ThresholdResult percentile_threshold(std::span<const double> values, double p);

// Replaces the value by a fixed constant, keeping the computed one.
ThresholdResult pin_threshold(ThresholdResult computed, double pinned_value);

// CSV with a header row and column of concept ids, 6 decimals.
std::string matrix_to_csv(const SimilarityMatrix& m);
SimilarityMatrix matrix_from_csv(std::string_view csv);

// Rows of bin_start,bin_end,count.
std::string histogram_to_csv(const Histogram& h);

nlohmann::ordered_json threshold_to_json(const ThresholdResult& t);
ThresholdResult threshold_from_json(const nlohmann::ordered_json& doc);

}  // namespace concept_align
