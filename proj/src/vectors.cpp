#include "concept_align/vectors.hpp"

#include <algorithm>
#include <cmath>

#include "concept_align/error.hpp"

namespace concept_align {

namespace {

constexpr std::string_view kLayersSuffix = ".layers.actv";
constexpr std::string_view kMeanSuffix = ".mean.actv";

void check_consistent(std::span<const StatementVector> statements, std::string_view what) {
  if (statements.empty()) throw Error(ErrorKind::EmptyClass, std::string(what) + " class is empty");
  const auto layers = statements.front().n_layers();
  const auto dim = statements.front().hidden_dim();
  for (const auto& s : statements) {
    if (s.n_layers() != layers || s.hidden_dim() != dim) {
      throw Error(ErrorKind::ShapeMismatch, s.key.str() + ": statement shape differs within " + std::string(what));
    }
  }
}

ActivationTensor as_tensor(std::string_view concept_id, const Dense<double>& rows, const ConceptVector& cv) {
  ActivationTensor t;
  t.key = {std::string(concept_id), Polarity::Positive, 0};
  t.n_layers = rows.rows();
  t.n_tokens = 1;
  t.hidden_dim = rows.cols();
  t.pooled = true;
  t.data.reserve(rows.size());
  for (const double v : rows.flat()) t.data.push_back(static_cast<float>(v));
  t.extensions = {{"kind", "concept_vector"}, {"n_pos", cv.n_pos}, {"n_neg", cv.n_neg}};
  return t;
}

ActivationTensor read_vector_dump(const std::filesystem::path& path, std::string_view concept_id) {
  ActivationTensor t = read_dump(path);
  const auto kind = t.extensions.find("kind");
  if (kind == t.extensions.end() || *kind != "concept_vector") {
    throw Error(ErrorKind::Validation, path.string() + ": not a concept vector dump");
  }
  if (t.key.concept_id != concept_id || !t.pooled) {
    throw Error(ErrorKind::Validation, path.string() + ": header does not describe " + std::string(concept_id));
  }
  return t;
}

}  // namespace

void ConceptVector::validate() const {
  if (n_pos == 0 || n_neg == 0) throw Error(ErrorKind::EmptyClass, concept_id + ": class sizes must be >= 1");
  if (per_layer.empty() || averaged.size() != per_layer.cols()) {
    throw Error(ErrorKind::ShapeMismatch, concept_id + ": averaged length differs from hidden_dim");
  }
  for (const double v : per_layer.flat()) {
    if (!std::isfinite(v)) throw Error(ErrorKind::Data, concept_id + ": non-finite per-layer value");
  }
  std::vector<double> recomputed(hidden_dim());
  kernels::serial::layer_mean(per_layer.flat(), n_layers(), hidden_dim(), recomputed);
  if (recomputed != averaged) {
    throw Error(ErrorKind::Validation, concept_id + ": averaged is not the layer mean of per_layer");
  }
}

Dense<double> class_mean(std::span<const StatementVector> statements, ExecPolicy policy) {
  check_consistent(statements, "statement");
  const auto& first = statements.front();
  Dense<double> mean(first.n_layers(), first.hidden_dim());
  std::vector<std::span<const float>> inputs;
  inputs.reserve(statements.size());
  for (const auto& s : statements) inputs.push_back(s.rows.flat());
  kernels::stacked_mean(policy, inputs, mean.flat());
  return mean;
}

ConceptVector concept_vector(std::string concept_id, std::span<const StatementVector> positives,
                             std::span<const StatementVector> negatives, ExecPolicy policy) {
  check_consistent(positives, concept_id + " positive");
  check_consistent(negatives, concept_id + " negative");
  if (positives.front().n_layers() != negatives.front().n_layers() ||
      positives.front().hidden_dim() != negatives.front().hidden_dim()) {
    throw Error(ErrorKind::ShapeMismatch, concept_id + ": positive and negative statements differ in shape");
  }
  ConceptVector cv;
  cv.per_layer = class_mean(positives, policy);
  const Dense<double> neg = class_mean(negatives, policy);
  auto diff = cv.per_layer.flat();
  const auto sub = neg.flat();
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= sub[i];
  cv.averaged.resize(cv.per_layer.cols());
  kernels::layer_mean(policy, cv.per_layer.flat(), cv.per_layer.rows(), cv.per_layer.cols(), cv.averaged);
  cv.concept_id = std::move(concept_id);
  cv.n_pos = positives.size();
  cv.n_neg = negatives.size();
  return cv;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error(ErrorKind::ShapeMismatch, "cosine: vector lengths differ");
  const double nu = kernels::sum_squares(u.data(), u.size());
  const double nv = kernels::sum_squares(v.data(), v.size());
  if (!(nu > 0.0) || !(nv > 0.0)) throw Error(ErrorKind::DegenerateVector, "cosine: zero-norm vector");
  return kernels::clamp_unit(kernels::dot(u.data(), v.data(), u.size()) / (std::sqrt(nu) * std::sqrt(nv)));
}

void export_concept_vector(const ConceptVector& cv, const std::filesystem::path& dir) {
  cv.validate();
  write_dump(as_tensor(cv.concept_id, cv.per_layer, cv), dir / (cv.concept_id + std::string(kLayersSuffix)));
  const Dense<double> mean(1, cv.hidden_dim(), cv.averaged);
  write_dump(as_tensor(cv.concept_id, mean, cv), dir / (cv.concept_id + std::string(kMeanSuffix)));
}

ConceptVector import_concept_vector(const std::filesystem::path& dir, std::string_view concept_id) {
  const auto id = std::string(concept_id);
  const ActivationTensor layers = read_vector_dump(dir / (id + std::string(kLayersSuffix)), concept_id);
  const ActivationTensor mean = read_vector_dump(dir / (id + std::string(kMeanSuffix)), concept_id);
  if (mean.n_layers != 1 || mean.hidden_dim != layers.hidden_dim) {
    throw Error(ErrorKind::ShapeMismatch, id + ": mean dump shape does not match layer dump");
  }

  ConceptVector cv;
  cv.concept_id = id;
  std::vector<double> rows(layers.data.begin(), layers.data.end());
  cv.per_layer = Dense<double>(layers.n_layers, layers.hidden_dim, std::move(rows));
  cv.averaged.resize(layers.hidden_dim);
  kernels::serial::layer_mean(cv.per_layer.flat(), cv.n_layers(), cv.hidden_dim(), cv.averaged);
  for (std::size_t d = 0; d < cv.averaged.size(); ++d) {
    const double stored = mean.data[d];
    const double scale = std::max({std::abs(cv.averaged[d]), std::abs(stored), 1e-30});
    if (std::abs(stored - cv.averaged[d]) > 1e-6 * scale + 1e-30) {
      throw Error(ErrorKind::Validation, id + ": stored mean disagrees with per-layer rows");
    }
  }
  const auto count = [&](const char* key) -> std::size_t {
    const auto it = layers.extensions.find(key);
    return it != layers.extensions.end() && it->is_number_unsigned() ? it->get<std::size_t>() : 0;
  };
  cv.n_pos = count("n_pos");
  cv.n_neg = count("n_neg");
  cv.validate();
  return cv;
}

std::vector<std::string> list_concept_vectors(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw Error(ErrorKind::Io, "not a directory: " + dir.string());
  std::vector<std::string> ids;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > kLayersSuffix.size() && name.ends_with(kLayersSuffix)) {
      ids.push_back(name.substr(0, name.size() - kLayersSuffix.size()));
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace concept_align
