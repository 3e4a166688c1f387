#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "concept_align/corpus.hpp"
#include "concept_align/dense.hpp"
#include "concept_align/kernels.hpp"

namespace concept_align {

struct StatementKey {
  std::string concept_id;
  Polarity polarity = Polarity::Positive;
  std::int64_t index = 0;

  std::string str() const;

  auto operator<=>(const StatementKey&) const = default;
};

// Hidden states of one statement: n_layers x n_tokens x hidden_dim floats,
// row-major (layer, token, dim).
struct ActivationTensor {
  StatementKey key;
  std::size_t n_layers = 0;
  std::size_t n_tokens = 0;
  std::size_t hidden_dim = 0;
  // Token axis already averaged by the producer; implies n_tokens == 1.
  bool pooled = false;
  std::vector<float> data;
  // Header keys beyond the standard set, written back verbatim.
  nlohmann::ordered_json extensions = nlohmann::ordered_json::object();

  // Throws ShapeMismatch / Validation / Data (non-finite values).
  void validate() const;

  float at(std::size_t layer, std::size_t token, std::size_t dim) const noexcept {
    return data[(layer * n_tokens + token) * hidden_dim + dim];
  }

  // Data compared bitwise.
  bool operator==(const ActivationTensor& other) const;
};

// One token-pooled vector per layer.
struct StatementVector {
  StatementKey key;
  Dense<float> rows;  // n_layers x hidden_dim

  std::size_t n_layers() const noexcept { return rows.rows(); }
  std::size_t hidden_dim() const noexcept { return rows.cols(); }
};

// rows[l][d] = mean over tokens of data[l][k][d]; sequential double
// accumulation over k, then one rounding to float. Identity for pooled
// tensors. Throws Data naming the statement on non-finite input.
StatementVector mean_pool(const ActivationTensor& t, ExecPolicy policy = ExecPolicy::Parallel);

// ACTV1:
//   bytes 0-5   "ACTV1\n"
//   bytes 6-9   header length H, uint32 little-endian
//   next H      UTF-8 JSON header {concept_id, polarity, index, n_layers,
//               n_tokens, hidden_dim, dtype:"f32le", pooled, ...extensions}
//   remainder   n_layers*n_tokens*hidden_dim float32 little-endian
inline constexpr std::string_view kActvMagic = "ACTV1\n";
inline constexpr std::string_view kActvDtype = "f32le";

std::vector<std::uint8_t> encode_dump(const ActivationTensor& t);
ActivationTensor decode_dump(std::span<const std::uint8_t> bytes, std::string_view source = "<memory>");

void write_dump(const ActivationTensor& t, const std::filesystem::path& path);
ActivationTensor read_dump(const std::filesystem::path& path);

// <root>/<concept_id>/<polarity>/<index>.actv
std::filesystem::path dump_path(const std::filesystem::path& root, const StatementKey& key);

struct ClassVectors {
  std::vector<StatementVector> positives;
  std::vector<StatementVector> negatives;
};

// Reads and pools every dump of one concept, each class ordered by index.
// Throws MissingData when the concept directory is absent, EmptyClass when a
// class has no dumps, ShapeMismatch when L or D differ between files, and
// Validation when a header disagrees with its path.
ClassVectors load_statement_vectors(const std::filesystem::path& root, std::string_view concept_id,
                                    ExecPolicy policy = ExecPolicy::Parallel);

}  // namespace concept_align
