#include "concept_align/similarity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "concept_align/error.hpp"
#include "concept_align/io.hpp"

namespace concept_align {

using nlohmann::ordered_json;

std::optional<std::size_t> SimilarityMatrix::index_of(std::string_view concept_id) const {
  const auto it = std::find(concept_ids.begin(), concept_ids.end(), concept_id);
  if (it == concept_ids.end()) return std::nullopt;
  return static_cast<std::size_t>(it - concept_ids.begin());
}

void SimilarityMatrix::validate() const {
  const std::size_t n = size();
  if (values.rows() != n || values.cols() != n) {
    throw Error(ErrorKind::ShapeMismatch, "similarity matrix is not N x N for N concept ids");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (values(i, i) != 1.0) throw Error(ErrorKind::Validation, concept_ids[i] + ": diagonal is not 1");
    for (std::size_t j = 0; j < n; ++j) {
      const double v = values(i, j);
      if (!(v >= -1.0 && v <= 1.0)) {
        throw Error(ErrorKind::Validation, "similarity outside [-1, 1] at " + concept_ids[i] + "," + concept_ids[j]);
      }
      if (v != values(j, i)) {
        throw Error(ErrorKind::Validation, "similarity matrix not symmetric at " + concept_ids[i] + "," +
                                               concept_ids[j]);
      }
    }
  }
}

SimilarityMatrix pairwise_matrix(std::span<const ConceptVector> vectors, ExecPolicy policy) {
  if (vectors.size() < 2) throw Error(ErrorKind::EmptyInput, "pairwise similarity needs at least two vectors");
  const std::size_t n = vectors.size();
  const std::size_t dim = vectors.front().averaged.size();
  std::vector<double> packed;
  packed.reserve(n * dim);
  SimilarityMatrix m;
  m.concept_ids.reserve(n);
  for (const auto& cv : vectors) {
    if (cv.averaged.size() != dim) {
      throw Error(ErrorKind::ShapeMismatch, cv.concept_id + ": hidden_dim differs from " +
                                                vectors.front().concept_id);
    }
    packed.insert(packed.end(), cv.averaged.begin(), cv.averaged.end());
    m.concept_ids.push_back(cv.concept_id);
  }
  std::vector<double> norms(n);
  kernels::row_norms(policy, packed, n, dim, norms);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(norms[i] > 0.0)) throw Error(ErrorKind::DegenerateVector, m.concept_ids[i] + ": zero-norm concept vector");
  }
  m.values = Dense<double>(n, n);
  kernels::pairwise_cosine(policy, packed, norms, n, dim, m.values.flat());
  return m;
}

std::vector<double> off_diagonal_values(const SimilarityMatrix& m) {
  const std::size_t n = m.size();
  std::vector<double> out;
  out.reserve(n * (n > 0 ? n - 1 : 0) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out.push_back(m.values(i, j));
  }
  return out;
}

Histogram histogram(std::span<const double> values, std::size_t n_bins) {
  if (n_bins == 0) throw Error(ErrorKind::Validation, "histogram needs at least one bin");
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "histogram of no values");
  Histogram h;
  h.bin_edges.resize(n_bins + 1);
  const double bins = static_cast<double>(n_bins);
  for (std::size_t i = 0; i <= n_bins; ++i) h.bin_edges[i] = -1.0 + 2.0 * static_cast<double>(i) / bins;
  h.counts.assign(n_bins, 0);
  for (const double v : values) {
    if (!(v >= -1.0 && v <= 1.0)) throw Error(ErrorKind::Validation, "histogram value outside [-1, 1]");
    auto bin = static_cast<std::size_t>(std::floor((v + 1.0) * bins / 2.0));
    ++h.counts[std::min(bin, n_bins - 1)];
  }
  return h;
}

ThresholdResult percentile_threshold(std::span<const double> values, double p) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "percentile of no values");
  if (!(p > 0.0 && p < 100.0)) throw Error(ErrorKind::Validation, "percentile must lie in (0, 100)");
  std::vector<double> sorted(values.begin(), values.end());
  for (const double v : sorted) {
    if (!std::isfinite(v)) throw Error(ErrorKind::Data, "percentile input contains non-finite values");
  }
  std::sort(sorted.begin(), sorted.end());
  const double rank = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = static_cast<std::size_t>(std::ceil(rank));
  const double a = sorted[lo];
  const double b = sorted[hi];
  const double value = std::clamp(a + (rank - static_cast<double>(lo)) * (b - a), a, b);
  return {p, value, sorted.size(), std::string(kPercentileMethod), std::nullopt};
}

ThresholdResult pin_threshold(ThresholdResult computed, double pinned_value) {
  if (!(pinned_value >= -1.0 && pinned_value <= 1.0)) {
    throw Error(ErrorKind::Validation, "pinned threshold must lie in [-1, 1]");
  }
  computed.computed_value = computed.value;
  computed.value = pinned_value;
  computed.method = std::string(kPinnedMethod);
  return computed;
}

std::string matrix_to_csv(const SimilarityMatrix& m) {
  std::string out = "concept_id";
  for (const auto& id : m.concept_ids) out += "," + id;
  out += "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += m.concept_ids[i];
    for (std::size_t j = 0; j < m.size(); ++j) out += "," + io::fixed(m.values(i, j), 6);
    out += "\n";
  }
  return out;
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

double parse_double(std::string_view text, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, err] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (err != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::Parse, "matrix csv line " + std::to_string(line_no) + ": bad number \"" +
                                      std::string(text) + "\"");
  }
  return v;
}

}  // namespace

SimilarityMatrix matrix_from_csv(std::string_view csv) {
  std::vector<std::string_view> lines;
  for (auto line : split(csv, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw Error(ErrorKind::Parse, "matrix csv is empty");
  const auto header = split(lines.front(), ',');
  SimilarityMatrix m;
  for (std::size_t j = 1; j < header.size(); ++j) m.concept_ids.emplace_back(header[j]);
  const std::size_t n = m.concept_ids.size();
  if (lines.size() != n + 1) throw Error(ErrorKind::Parse, "matrix csv must have one row per concept");
  m.values = Dense<double>(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto cells = split(lines[i + 1], ',');
    if (cells.size() != n + 1 || cells.front() != m.concept_ids[i]) {
      throw Error(ErrorKind::Parse, "matrix csv line " + std::to_string(i + 2) + ": expected row " +
                                        m.concept_ids[i] + " with " + std::to_string(n) + " values");
    }
    for (std::size_t j = 0; j < n; ++j) m.values(i, j) = parse_double(cells[j + 1], i + 2);
  }
  m.validate();
  return m;
}

std::string histogram_to_csv(const Histogram& h) {
  std::string out = "bin_start,bin_end,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out += io::fixed(h.bin_edges[i], 6) + "," + io::fixed(h.bin_edges[i + 1], 6) + "," +
           std::to_string(h.counts[i]) + "\n";
  }
  return out;
}

ordered_json threshold_to_json(const ThresholdResult& t) {
  ordered_json doc = {{"percentile", t.percentile},
                      {"value", t.value},
                      {"n_pairs", t.n_pairs},
                      {"method", t.method}};
  if (t.computed_value) doc["computed_value"] = *t.computed_value;
  return doc;
}

ThresholdResult threshold_from_json(const ordered_json& doc) {
  try {
    ThresholdResult t;
    t.percentile = doc.at("percentile").get<double>();
    t.value = doc.at("value").get<double>();
    t.n_pairs = doc.at("n_pairs").get<std::size_t>();
    t.method = doc.at("method").get<std::string>();
    if (doc.contains("computed_value")) t.computed_value = doc.at("computed_value").get<double>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("threshold json: ") + e.what());
  }
}

}  // namespace concept_align
