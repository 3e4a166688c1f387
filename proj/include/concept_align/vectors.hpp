#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "concept_align/activations.hpp"
#include "concept_align/dense.hpp"
#include "concept_align/kernels.hpp"

namespace concept_align {

// Difference of class means, per layer, plus its mean over layers.
struct ConceptVector {
  std::string concept_id;
  Dense<double> per_layer;      // n_layers x hidden_dim
  std::vector<double> averaged;  // hidden_dim
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;

  std::size_t n_layers() const noexcept { return per_layer.rows(); }
  std::size_t hidden_dim() const noexcept { return per_layer.cols(); }

  // Checks shapes, finiteness, class sizes and that `averaged` is exactly
  // the layer mean of `per_layer`.
  void validate() const;
};

// Elementwise mean over statements, per layer. Throws EmptyClass on an
// empty list and ShapeMismatch on inconsistent statements.
Dense<double> class_mean(std::span<const StatementVector> statements,
                         ExecPolicy policy = ExecPolicy::Parallel);

ConceptVector concept_vector(std::string concept_id, std::span<const StatementVector> positives,
                             std::span<const StatementVector> negatives,
                             ExecPolicy policy = ExecPolicy::Parallel);

// u.v / (|u| |v|) in double, clamped to [-1, 1]. Throws DegenerateVector
// when either norm is zero and ShapeMismatch on differing lengths.
double cosine(std::span<const double> u, std::span<const double> v);

// Writes <dir>/<id>.layers.actv (per-layer rows) and <dir>/<id>.mean.actv
// (single row), both pooled f32 dumps tagged {"kind": "concept_vector"}.
void export_concept_vector(const ConceptVector& cv, const std::filesystem::path& dir);

// Reads the pair written above. `averaged` is recomputed from the stored
// rows; the stored mean must agree within float rounding.
ConceptVector import_concept_vector(const std::filesystem::path& dir, std::string_view concept_id);

// Concept ids with a .layers.actv file in dir, sorted.
std::vector<std::string> list_concept_vectors(const std::filesystem::path& dir);

}  // namespace concept_align
