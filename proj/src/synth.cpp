#include "concept_align/synth.hpp"

#include <cmath>
#include <set>

#include "concept_align/error.hpp"
#include "concept_align/io.hpp"

namespace concept_align {

namespace rng {

std::uint64_t mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t stream_key(std::uint64_t seed, std::string_view concept_id, Tag tag,
                         std::uint64_t index) noexcept {
  const auto t = static_cast<std::uint64_t>(tag);
  return mix(seed ^ mix(fnv1a64(concept_id) ^ mix(t * kGolden + index)));
}

}  // namespace rng

void SynthConfig::validate() const {
  if (n_layers == 0 || hidden_dim == 0 || n_statements_per_class == 0) {
    throw Error(ErrorKind::Validation, "synth: layers, dim and statements per class must be >= 1");
  }
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
    throw Error(ErrorKind::Validation, "synth: noise scale must be finite and non-negative");
  }
  std::set<std::string_view> seen;
  for (const auto& p : planted) {
    (void)ConceptId::parse(p.concept_id);
    if (!seen.insert(p.concept_id).second) {
      throw Error(ErrorKind::Validation, "synth: duplicate planted concept " + p.concept_id);
    }
    if (!p.direction.empty() && p.direction.size() != hidden_dim) {
      throw Error(ErrorKind::Validation, "synth: direction for " + p.concept_id + " has wrong length");
    }
  }
}

std::vector<PlantedConcept> seeded_concepts(const std::vector<std::string>& concept_ids) {
  std::vector<PlantedConcept> out;
  out.reserve(concept_ids.size());
  for (const auto& id : concept_ids) out.push_back({id, {}});
  return out;
}

std::vector<float> planted_direction(const SynthConfig& cfg, const PlantedConcept& planted) {
  std::vector<double> dir = planted.direction;
  if (dir.empty()) {
    rng::CounterStream s(rng::stream_key(cfg.seed, planted.concept_id, rng::Tag::Direction, 0));
    dir.resize(cfg.hidden_dim);
    for (auto& x : dir) x = s.symmetric();
  }
  double sq = 0.0;
  for (const double x : dir) sq += x * x;
  if (!(sq > 0.0) || !std::isfinite(sq)) {
    throw Error(ErrorKind::DegenerateVector, "synth: planted direction for " + planted.concept_id + " is zero");
  }
  const double norm = std::sqrt(sq);
  std::vector<float> out(dir.size());
  for (std::size_t d = 0; d < dir.size(); ++d) out[d] = static_cast<float>(dir[d] / norm);
  return out;
}

namespace {

ActivationTensor make_statement(const SynthConfig& cfg, const std::string& concept_id,
                                const std::vector<float>& planted, Polarity pol, std::size_t index) {
  const auto tag = pol == Polarity::Positive ? rng::Tag::Positive : rng::Tag::Negative;
  rng::CounterStream s(rng::stream_key(cfg.seed, concept_id, tag, index));
  ActivationTensor t;
  t.key = {concept_id, pol, static_cast<std::int64_t>(index)};
  t.n_layers = cfg.n_layers;
  t.n_tokens = kMinTokens + static_cast<std::size_t>(s.next() % (kMaxTokens - kMinTokens + 1));
  t.hidden_dim = cfg.hidden_dim;
  t.data.resize(t.n_layers * t.n_tokens * t.hidden_dim);
  const double sign = pol == Polarity::Positive ? 1.0 : -1.0;
  std::size_t e = 0;
  for (std::size_t l = 0; l < t.n_layers; ++l) {
    for (std::size_t k = 0; k < t.n_tokens; ++k) {
      for (std::size_t d = 0; d < t.hidden_dim; ++d) {
        const double noise = cfg.noise_scale * s.symmetric();
        t.data[e++] = static_cast<float>(sign * static_cast<double>(planted[d]) + noise);
      }
    }
  }
  return t;
}

}  // namespace

SynthDataset generate(const SynthConfig& cfg) {
  cfg.validate();
  const std::size_t per_class = cfg.n_statements_per_class;
  const std::size_t per_concept = 2 * per_class;
  const auto n_concepts = static_cast<std::int64_t>(cfg.planted.size());

  std::vector<std::vector<float>> directions;
  directions.reserve(cfg.planted.size());
  for (const auto& p : cfg.planted) directions.push_back(planted_direction(cfg, p));

  SynthDataset ds;
  ds.tensors.resize(cfg.planted.size() * per_concept);
  // Streams are keyed per statement, so the output does not depend on the
  // schedule.
#pragma omp parallel for num_threads(kernels::thread_cap()) schedule(static)
  for (std::int64_t c = 0; c < n_concepts; ++c) {
    const auto& spec = cfg.planted[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < per_concept; ++i) {
      const Polarity pol = i < per_class ? Polarity::Positive : Polarity::Negative;
      ds.tensors[static_cast<std::size_t>(c) * per_concept + i] =
          make_statement(cfg, spec.concept_id, directions[static_cast<std::size_t>(c)], pol, i % per_class);
    }
  }
  ds.stories.reserve(ds.tensors.size());
  for (const auto& t : ds.tensors) {
    ds.stories.push_back({t.key.concept_id, t.key.polarity, t.key.index,
                          "Placeholder " + std::string(to_string(t.key.polarity)) + " story " +
                              std::to_string(t.key.index) + " for " + t.key.concept_id + "."});
  }
  return ds;
}

void write_dataset(const SynthDataset& dataset, const std::filesystem::path& root) {
  for (const auto& t : dataset.tensors) write_dump(t, dump_path(root, t.key));
  std::string corpus;
  for (const auto& s : dataset.stories) corpus += story_to_json_line(s) + "\n";
  io::write_text(root / "corpus.jsonl", corpus);
}

}  // namespace concept_align
