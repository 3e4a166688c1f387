#include "concept_align/report.hpp"

#include "concept_align/io.hpp"

namespace concept_align {

using nlohmann::ordered_json;

std::filesystem::path heatmap_order_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".order.json");
  return p;
}

void export_heatmap(const SimilarityMatrix& m, const std::filesystem::path& csv_path) {
  m.validate();
  io::write_text(csv_path, matrix_to_csv(m));
  const ordered_json order = {{"concept_ids", m.concept_ids}};
  io::write_text(heatmap_order_path(csv_path), order.dump(2) + "\n");
}

ordered_json radar_json(const AlignmentReport& report) {
  ordered_json out = ordered_json::array();
  for (const auto& s : report.scores) {
    ordered_json axes = ordered_json::array();
    ordered_json values = ordered_json::array();
    for (const auto& c : s.per_concept) {
      axes.push_back(c.concept_id);
      values.push_back(io::round_to(c.similarity, 4));
    }
    out.push_back({{"model", s.model_name}, {"axes", axes}, {"values", values}});
  }
  return out;
}

void export_radar(const AlignmentReport& report, const std::filesystem::path& path) {
  io::write_text(path, radar_json(report).dump(2) + "\n");
}

std::string study_json(const AlignmentReport& report, const SimilarityMatrix& matrix,
                       const std::optional<Histogram>& hist, const ThresholdResult& threshold,
                       const Provenance& provenance) {
  ordered_json warnings = ordered_json::array();

  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    ordered_json row = ordered_json::array();
    for (const double v : matrix.values.row(i)) row.push_back(io::round_to(v, 6));
    rows.push_back(std::move(row));
  }

  ordered_json histogram = nullptr;
  if (hist) {
    ordered_json edges = ordered_json::array();
    for (const double e : hist->bin_edges) edges.push_back(io::round_to(e, 6));
    histogram = {{"bin_edges", edges}, {"counts", hist->counts}};
  } else {
    warnings.push_back("histogram_missing");
  }

  const ordered_json doc = {
      {"schema", kStudySchemaId},
      {"provenance",
       {{"dataset_root", provenance.dataset_root},
        {"registry_hash", provenance.registry_hash},
        {"threshold_method", provenance.threshold_method},
        {"engine_version", provenance.engine_version}}},
      {"threshold", threshold_to_json(threshold)},
      {"histogram", histogram},
      {"matrix", {{"concept_ids", matrix.concept_ids}, {"values", rows}}},
      {"alignment", report_to_json(report)},
      {"radar", radar_json(report)},
      {"warnings", warnings},
  };
  return doc.dump(2) + "\n";
}

void export_study(const AlignmentReport& report, const SimilarityMatrix& matrix,
                  const std::optional<Histogram>& hist, const ThresholdResult& threshold,
                  const Provenance& provenance, const std::filesystem::path& path) {
  io::write_text(path, study_json(report, matrix, hist, threshold, provenance));
}

}  // namespace concept_align
