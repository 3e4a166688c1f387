#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "concept_align/alignment.hpp"
#include "concept_align/similarity.hpp"

namespace concept_align {

inline constexpr std::string_view kEngineVersion = "1.0.0";
inline constexpr std::string_view kStudySchemaId = "concept-align/study/v1";

// Writes the matrix CSV to csv_path and {"concept_ids": [...]} next to it
// as <stem>.order.json.
void export_heatmap(const SimilarityMatrix& m, const std::filesystem::path& csv_path);
std::filesystem::path heatmap_order_path(const std::filesystem::path& csv_path);

// One object per model: {model, axes: [concept ids], values: [similarities]}.
nlohmann::ordered_json radar_json(const AlignmentReport& report);
void export_radar(const AlignmentReport& report, const std::filesystem::path& path);

struct Provenance {
  std::string dataset_root;
  std::string registry_hash;
  std::string threshold_method;
  std::string engine_version = std::string(kEngineVersion);
};

// Bundle of everything one study run produced. A missing histogram is
// written as null and listed under "warnings". Output is a pure function of
// the inputs.
std::string study_json(const AlignmentReport& report, const SimilarityMatrix& matrix,
                       const std::optional<Histogram>& hist, const ThresholdResult& threshold,
                       const Provenance& provenance);
void export_study(const AlignmentReport& report, const SimilarityMatrix& matrix,
                  const std::optional<Histogram>& hist, const ThresholdResult& threshold,
                  const Provenance& provenance, const std::filesystem::path& path);

}  // namespace concept_align
