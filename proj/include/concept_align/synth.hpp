#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "concept_align/activations.hpp"
#include "concept_align/corpus.hpp"

namespace concept_align {

// Deterministic random source, reproducible in any language.
//
// A stream is keyed by (seed, concept id, tag, statement index):
//   h    = FNV-1a-64(concept id bytes)
//   key  = mix(seed ^ mix(h ^ mix(tag * G + index)))
// and its i-th output (i = 0, 1, ...) is mix(key + (i + 1) * G), where
// G = 0x9E3779B97F4A7C15 and mix is the SplitMix64 finaliser
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   z =  z ^ (z >> 31)
// All arithmetic is modulo 2^64. uniform() = (out >> 11) * 2^-53.
namespace rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix(std::uint64_t z) noexcept;
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

enum class Tag : std::uint64_t { Positive = 1, Negative = 2, Direction = 3 };

std::uint64_t stream_key(std::uint64_t seed, std::string_view concept_id, Tag tag,
                         std::uint64_t index) noexcept;

class CounterStream {
 public:
  explicit CounterStream(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t next() noexcept { return mix(key_ + (++counter_) * kGolden); }
  // [0, 1)
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // [-1, 1)
  double symmetric() noexcept { return 2.0 * uniform() - 1.0; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rng

struct PlantedConcept {
  std::string concept_id;
  // Explicit direction (normalised on use); empty means seed-derived.
  std::vector<double> direction;
};

struct SynthConfig {
  std::uint64_t seed = 7;
  std::size_t n_layers = 4;
  std::size_t hidden_dim = 8;
  std::size_t n_statements_per_class = 10;
  double noise_scale = 0.1;
  std::vector<PlantedConcept> planted;

  void validate() const;
};

// Seed-derived planted concepts for the given ids.
std::vector<PlantedConcept> seeded_concepts(const std::vector<std::string>& concept_ids);

// Unit planted direction, rounded to float.
std::vector<float> planted_direction(const SynthConfig& cfg, const PlantedConcept& planted);

inline constexpr std::size_t kMinTokens = 3;
inline constexpr std::size_t kMaxTokens = 12;

struct SynthDataset {
  std::vector<ActivationTensor> tensors;
  std::vector<StoryRecord> stories;
};

// Per statement: n_tokens drawn in [3, 12], then every element is
// float(sign * planted[d] + noise_scale * symmetric()), sign +1 for
// positives and -1 for negatives. Tensors ordered by concept, polarity,
// index.
SynthDataset generate(const SynthConfig& cfg);

// Dumps under root/<concept_id>/<polarity>/<index>.actv plus root/corpus.jsonl.
void write_dataset(const SynthDataset& dataset, const std::filesystem::path& root);

}  // namespace concept_align
