#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "concept_align/vectors.hpp"

namespace concept_align {

// A theoretical trust model as an ordered list of directional concept ids.
struct TrustModelSpec {
  std::string name;
  std::vector<std::string> members;

  // Non-empty name and members, well-formed ids, no duplicates.
  void validate() const;
};

// Marsh, Mayer, McAllister, McKnight, Castelfranchi with directed members.
std::vector<TrustModelSpec> builtin_models();
std::vector<TrustModelSpec> parse_models(std::string_view json_text);
std::vector<TrustModelSpec> load_models(const std::filesystem::path& path);
std::string builtin_models_json();

// The same five models with undirected concept names only.
struct UndirectedModel {
  std::string name;
  std::vector<std::string> concepts;
};
std::vector<UndirectedModel> builtin_undirected_models();

struct MembershipDiscrepancy {
  std::string model;
  std::vector<std::string> only_directed;    // base names scored but not listed undirected
  std::vector<std::string> only_undirected;  // listed undirected but not scored
};

// Per model, base names that differ between the directed and undirected
// membership. Models with no difference are omitted.
std::vector<MembershipDiscrepancy> membership_discrepancies(std::span<const TrustModelSpec> directed,
                                                            std::span<const UndirectedModel> undirected);

using SimilarityMap = std::map<std::string, double, std::less<>>;

struct ConceptSimilarity {
  std::string concept_id;
  double similarity = 0.0;
};

struct AlignmentScore {
  std::string model_name;
  std::vector<ConceptSimilarity> per_concept;  // member order
  double average = 0.0;                        // signed mean, negatives included
  std::vector<std::string> above_threshold;    // similarity > threshold_used
  std::size_t n_above = 0;
  std::vector<std::string> negative;           // similarity < 0
  double threshold_used = 0.0;
};

// Throws MissingData naming the first member without a similarity and
// Validation on a threshold outside [-1, 1].
AlignmentScore score_model(const TrustModelSpec& model, const SimilarityMap& sims, double threshold);

struct AlignmentReport {
  std::string anchor_concept_id;
  double threshold = 0.0;
  std::vector<AlignmentScore> scores;  // model order
  std::vector<std::string> ranking_by_average;
  std::vector<std::string> ranking_by_count;
  // Groups of models sharing the primary measure of a ranking; their order
  // came from the tie-break (other measure, then name).
  std::vector<std::vector<std::string>> ties_by_average;
  std::vector<std::vector<std::string>> ties_by_count;
  // Concepts with a negative similarity to the anchor, first-seen order.
  std::vector<std::string> negative_associations;
};

inline constexpr std::string_view kDefaultAnchor = "trust1";

// Similarities come from cosine() on the layer-averaged vectors; the anchor
// scored against itself is exactly 1.
AlignmentReport build_report(const ConceptVector& anchor, std::span<const ConceptVector> concepts,
                             std::span<const TrustModelSpec> models, double threshold);

// Same report from precomputed anchor similarities.
AlignmentReport build_report_from_similarities(std::string anchor_concept_id, const SimilarityMap& sims,
                                               std::span<const TrustModelSpec> models, double threshold);

// JSON map concept_id -> similarity.
SimilarityMap parse_similarity_map(std::string_view json_text);

// Report fields with similarities and averages at 4 decimals.
nlohmann::ordered_json report_to_json(const AlignmentReport& report);

}  // namespace concept_align
