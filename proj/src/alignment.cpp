#include "concept_align/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "builtin_data.hpp"
#include "concept_align/corpus.hpp"
#include "concept_align/error.hpp"
#include "concept_align/io.hpp"

namespace concept_align {

using nlohmann::ordered_json;

namespace {

ordered_json parse_json(std::string_view text, std::string_view what) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string(what) + ": " + e.what());
  }
}

std::vector<std::string> string_list(const ordered_json& obj, const char* key, std::string_view what) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_array()) {
    throw Error(ErrorKind::Parse, std::string(what) + ": \"" + key + "\" missing or not an array");
  }
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) throw Error(ErrorKind::Parse, std::string(what) + ": non-string entry in " + key);
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string model_name(const ordered_json& obj, std::string_view what) {
  if (!obj.is_object() || !obj.contains("name") || !obj["name"].is_string()) {
    throw Error(ErrorKind::Parse, std::string(what) + ": entry lacks a string \"name\"");
  }
  return obj["name"].get<std::string>();
}

// Orders model indices by (primary desc, secondary desc, name asc) and
// collects groups that share the primary value.
template <typename Primary, typename Secondary>
void rank(const std::vector<AlignmentScore>& scores, Primary primary, Secondary secondary,
          std::vector<std::string>& ranking, std::vector<std::vector<std::string>>& ties) {
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = scores[a];
    const auto& y = scores[b];
    if (primary(x) != primary(y)) return primary(x) > primary(y);
    if (secondary(x) != secondary(y)) return secondary(x) > secondary(y);
    return x.model_name < y.model_name;
  });
  ranking.clear();
  ties.clear();
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && primary(scores[order[j]]) == primary(scores[order[i]])) ++j;
    if (j - i > 1) {
      auto& group = ties.emplace_back();
      for (std::size_t k = i; k < j; ++k) group.push_back(scores[order[k]].model_name);
    }
    for (std::size_t k = i; k < j; ++k) ranking.push_back(scores[order[k]].model_name);
    i = j;
  }
}

}  // namespace

void TrustModelSpec::validate() const {
  if (name.empty()) throw Error(ErrorKind::Validation, "trust model without a name");
  if (members.empty()) throw Error(ErrorKind::Validation, name + ": trust model has no members");
  std::set<std::string_view> seen;
  for (const auto& m : members) {
    (void)ConceptId::parse(m);
    if (!seen.insert(m).second) throw Error(ErrorKind::Validation, name + ": duplicate member " + m);
  }
}

std::vector<TrustModelSpec> parse_models(std::string_view json_text) {
  const ordered_json doc = parse_json(json_text, "trust models");
  if (!doc.is_array()) throw Error(ErrorKind::Parse, "trust models must be a JSON array");
  std::vector<TrustModelSpec> models;
  std::set<std::string> names;
  for (const auto& obj : doc) {
    TrustModelSpec m{model_name(obj, "trust models"), string_list(obj, "members", "trust models")};
    m.validate();
    if (!names.insert(m.name).second) throw Error(ErrorKind::Validation, "duplicate trust model " + m.name);
    models.push_back(std::move(m));
  }
  return models;
}

std::vector<TrustModelSpec> load_models(const std::filesystem::path& path) {
  return parse_models(io::read_text(path));
}

std::vector<TrustModelSpec> builtin_models() { return parse_models(builtin::kTrustModels); }

std::string builtin_models_json() { return std::string(builtin::kTrustModels); }

std::vector<UndirectedModel> builtin_undirected_models() {
  const ordered_json doc = parse_json(builtin::kTrustModelsUndirected, "undirected trust models");
  std::vector<UndirectedModel> out;
  for (const auto& obj : doc) {
    out.push_back({model_name(obj, "undirected trust models"),
                   string_list(obj, "concepts", "undirected trust models")});
  }
  return out;
}

std::vector<MembershipDiscrepancy> membership_discrepancies(std::span<const TrustModelSpec> directed,
                                                            std::span<const UndirectedModel> undirected) {
  std::vector<MembershipDiscrepancy> out;
  for (const auto& d : directed) {
    const auto u = std::find_if(undirected.begin(), undirected.end(),
                                [&](const UndirectedModel& m) { return m.name == d.name; });
    std::set<std::string> scored;
    for (const auto& id : d.members) scored.insert(ConceptId::parse(id).base_name);
    const std::set<std::string> listed =
        u == undirected.end() ? std::set<std::string>{} : std::set<std::string>(u->concepts.begin(), u->concepts.end());
    MembershipDiscrepancy diff{d.name, {}, {}};
    std::set_difference(scored.begin(), scored.end(), listed.begin(), listed.end(),
                        std::back_inserter(diff.only_directed));
    std::set_difference(listed.begin(), listed.end(), scored.begin(), scored.end(),
                        std::back_inserter(diff.only_undirected));
    if (!diff.only_directed.empty() || !diff.only_undirected.empty()) out.push_back(std::move(diff));
  }
  return out;
}

AlignmentScore score_model(const TrustModelSpec& model, const SimilarityMap& sims, double threshold) {
  if (!(threshold >= -1.0 && threshold <= 1.0)) {
    throw Error(ErrorKind::Validation, "threshold must lie in [-1, 1]");
  }
  model.validate();
  AlignmentScore s;
  s.model_name = model.name;
  s.threshold_used = threshold;
  double sum = 0.0;
  for (const auto& id : model.members) {
    const auto it = sims.find(id);
    if (it == sims.end()) throw Error(ErrorKind::MissingData, model.name + ": no similarity for " + id);
    const double sim = it->second;
    if (!std::isfinite(sim)) throw Error(ErrorKind::Data, model.name + ": non-finite similarity for " + id);
    s.per_concept.push_back({id, sim});
    sum += sim;
    if (sim > threshold) s.above_threshold.push_back(id);
    if (sim < 0.0) s.negative.push_back(id);
  }
  s.average = sum / static_cast<double>(model.members.size());
  s.n_above = s.above_threshold.size();
  return s;
}

AlignmentReport build_report_from_similarities(std::string anchor_concept_id, const SimilarityMap& sims,
                                               std::span<const TrustModelSpec> models, double threshold) {
  if (models.empty()) throw Error(ErrorKind::EmptyInput, "no trust models to score");
  AlignmentReport r;
  r.anchor_concept_id = std::move(anchor_concept_id);
  r.threshold = threshold;
  std::set<std::string> negatives_seen;
  for (const auto& m : models) {
    r.scores.push_back(score_model(m, sims, threshold));
    for (const auto& id : r.scores.back().negative) {
      if (negatives_seen.insert(id).second) r.negative_associations.push_back(id);
    }
  }
  const auto by_average = [](const AlignmentScore& s) { return s.average; };
  const auto by_count = [](const AlignmentScore& s) { return static_cast<double>(s.n_above); };
  rank(r.scores, by_average, by_count, r.ranking_by_average, r.ties_by_average);
  rank(r.scores, by_count, by_average, r.ranking_by_count, r.ties_by_count);
  return r;
}

AlignmentReport build_report(const ConceptVector& anchor, std::span<const ConceptVector> concepts,
                             std::span<const TrustModelSpec> models, double threshold) {
  if (!(kernels::sum_squares(anchor.averaged.data(), anchor.averaged.size()) > 0.0)) {
    throw Error(ErrorKind::DegenerateVector, anchor.concept_id + ": zero-norm anchor vector");
  }
  std::set<std::string_view> needed;
  for (const auto& m : models) needed.insert(m.members.begin(), m.members.end());
  SimilarityMap sims;
  for (const auto id : needed) {
    if (id == anchor.concept_id) {
      sims.emplace(std::string(id), 1.0);
      continue;
    }
    const auto it = std::find_if(concepts.begin(), concepts.end(),
                                 [&](const ConceptVector& cv) { return cv.concept_id == id; });
    if (it == concepts.end()) throw Error(ErrorKind::MissingData, "no concept vector for " + std::string(id));
    try {
      sims.emplace(std::string(id), cosine(anchor.averaged, it->averaged));
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(id) + " vs " + anchor.concept_id + ": " + e.what());
    }
  }
  return build_report_from_similarities(anchor.concept_id, sims, models, threshold);
}

SimilarityMap parse_similarity_map(std::string_view json_text) {
  const ordered_json doc = parse_json(json_text, "similarity map");
  if (!doc.is_object()) throw Error(ErrorKind::Parse, "similarity map must be a JSON object");
  SimilarityMap out;
  for (const auto& [k, v] : doc.items()) {
    if (!v.is_number()) throw Error(ErrorKind::Parse, "similarity for " + k + " is not a number");
    const double sim = v.get<double>();
    if (!(sim >= -1.0 && sim <= 1.0)) throw Error(ErrorKind::Validation, "similarity for " + k + " outside [-1, 1]");
    out.emplace(k, sim);
  }
  return out;
}

ordered_json report_to_json(const AlignmentReport& report) {
  ordered_json scores = ordered_json::array();
  for (const auto& s : report.scores) {
    ordered_json per = ordered_json::array();
    for (const auto& c : s.per_concept) {
      per.push_back({{"concept_id", c.concept_id}, {"similarity", io::round_to(c.similarity, 4)}});
    }
    scores.push_back({{"model", s.model_name},
                      {"per_concept", per},
                      {"average", io::round_to(s.average, 4)},
                      {"above_threshold", s.above_threshold},
                      {"n_above", s.n_above},
                      {"negative", s.negative},
                      {"threshold_used", s.threshold_used}});
  }
  return {{"anchor_concept_id", report.anchor_concept_id},
          {"threshold", report.threshold},
          {"scores", scores},
          {"ranking_by_average", report.ranking_by_average},
          {"ranking_by_count", report.ranking_by_count},
          {"ties", {{"by_average", report.ties_by_average}, {"by_count", report.ties_by_count}}},
          {"negative_associations", report.negative_associations}};
}

}  // namespace concept_align
