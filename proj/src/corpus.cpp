#include "concept_align/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

#include <json.hpp>

#include "builtin_data.hpp"
#include "concept_align/error.hpp"
#include "concept_align/io.hpp"

namespace concept_align {

using nlohmann::ordered_json;

namespace {

bool is_identifier(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_';
  });
}

std::string require_string(const ordered_json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorKind::Parse, std::string("field \"") + key + "\" missing or not a string");
  }
  return it->get<std::string>();
}

ordered_json parse_json(std::string_view text, std::string_view what) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string_view to_string(Direction d) noexcept { return d == Direction::AtoB ? "AtoB" : "BtoA"; }

std::string_view to_string(Category c) noexcept {
  switch (c) {
    case Category::BaselinePositive: return "baseline_positive";
    case Category::BaselineNegative: return "baseline_negative";
    case Category::TrustRelated: return "trust_related";
  }
  return "";
}

std::string_view to_string(Polarity p) noexcept { return p == Polarity::Positive ? "positive" : "negative"; }

Direction parse_direction(std::string_view text) {
  if (text == "AtoB") return Direction::AtoB;
  if (text == "BtoA") return Direction::BtoA;
  throw Error(ErrorKind::Parse, "unknown direction \"" + std::string(text) + "\"");
}

Category parse_category(std::string_view text) {
  if (text == "baseline_positive") return Category::BaselinePositive;
  if (text == "baseline_negative") return Category::BaselineNegative;
  if (text == "trust_related") return Category::TrustRelated;
  throw Error(ErrorKind::Parse, "unknown category \"" + std::string(text) + "\"");
}

Polarity parse_polarity(std::string_view text) {
  if (text == "positive") return Polarity::Positive;
  if (text == "negative") return Polarity::Negative;
  throw Error(ErrorKind::Parse, "unknown polarity \"" + std::string(text) + "\"");
}

void DyadContext::validate() const {
  if (person_a.empty() || person_b.empty() || background.empty()) {
    throw Error(ErrorKind::Validation, "dyad context fields must be non-empty");
  }
  if (person_a == person_b) throw Error(ErrorKind::Validation, "dyad participants must differ");
}

DyadContext DyadContext::standard() { return parse_context(builtin::kContext); }

std::string ConceptId::str() const {
  return base_name + (direction == Direction::AtoB ? "1" : "2");
}

ConceptId ConceptId::parse(std::string_view id) {
  if (id.size() < 2 || (id.back() != '1' && id.back() != '2') ||
      !is_identifier(id.substr(0, id.size() - 1))) {
    throw Error(ErrorKind::Validation, "malformed concept id \"" + std::string(id) + "\"");
  }
  return {std::string(id.substr(0, id.size() - 1)), id.back() == '1' ? Direction::AtoB : Direction::BtoA};
}

std::string render_template(std::string_view tmpl, const DyadContext& ctx) {
  std::string out;
  out.reserve(tmpl.size() + 32);
  bool named = false;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    const char c = tmpl[i];
    if (c == '}') throw Error(ErrorKind::Template, "unbalanced '}' in \"" + std::string(tmpl) + "\"");
    if (c != '{') {
      out.push_back(c);
      continue;
    }
    const std::size_t close = tmpl.find('}', i);
    if (close == std::string_view::npos) {
      throw Error(ErrorKind::Template, "unbalanced '{' in \"" + std::string(tmpl) + "\"");
    }
    const std::string_view name = tmpl.substr(i + 1, close - i - 1);
    if (name == "A") {
      out += ctx.person_a;
    } else if (name == "B") {
      out += ctx.person_b;
    } else {
      throw Error(ErrorKind::Template, "unknown placeholder {" + std::string(name) + "}");
    }
    named = true;
    i = close;
  }
  if (!named) throw Error(ErrorKind::Template, "template has no {A} or {B}: \"" + std::string(tmpl) + "\"");
  return out;
}

void ConceptSpec::validate() const {
  if (!is_identifier(base_name)) {
    throw Error(ErrorKind::Validation, "concept base name must be an identifier: \"" + base_name + "\"");
  }
  // Rendering against a throwaway context checks the placeholder rules.
  const DyadContext probe{"a", "b", "x"};
  (void)render_template(positive_template, probe);
  (void)render_template(negative_template, probe);
}

PromptPair render_prompts(const ConceptSpec& spec, const DyadContext& ctx) {
  ctx.validate();
  return {ctx.background + " " + render_template(spec.positive_template, ctx),
          ctx.background + " " + render_template(spec.negative_template, ctx)};
}

ConceptRegistry::ConceptRegistry(std::vector<ConceptSpec> specs) {
  for (auto& s : specs) add(std::move(s));
}

void ConceptRegistry::add(ConceptSpec spec) {
  spec.validate();
  std::string id = spec.concept_id();
  if (index_.contains(id)) throw Error(ErrorKind::Validation, "duplicate concept id " + id);
  index_.emplace(std::move(id), specs_.size());
  specs_.push_back(std::move(spec));
}

void ConceptRegistry::merge(const std::vector<ConceptSpec>& specs) {
  for (const auto& s : specs) {
    if (!contains(s.concept_id())) add(s);
  }
}

bool ConceptRegistry::contains(std::string_view concept_id) const {
  return index_.find(concept_id) != index_.end();
}

const ConceptSpec& ConceptRegistry::at(std::string_view concept_id) const {
  const auto it = index_.find(concept_id);
  if (it == index_.end()) throw Error(ErrorKind::MissingData, "unknown concept " + std::string(concept_id));
  return specs_[it->second];
}

std::vector<std::string> ConceptRegistry::ids() const {
  std::vector<std::string> out;
  out.reserve(specs_.size());
  for (const auto& s : specs_) out.push_back(s.concept_id());
  return out;
}

std::vector<ConceptSpec> parse_registry(std::string_view json_text) {
  const ordered_json doc = parse_json(json_text, "concept registry");
  if (!doc.is_array()) throw Error(ErrorKind::Parse, "concept registry must be a JSON array");
  std::vector<ConceptSpec> specs;
  specs.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& obj = doc[i];
    try {
      if (!obj.is_object()) throw Error(ErrorKind::Parse, "entry is not an object");
      ConceptSpec s{require_string(obj, "base_name"), parse_direction(require_string(obj, "direction")),
                    require_string(obj, "positive_template"), require_string(obj, "negative_template"),
                    parse_category(require_string(obj, "category"))};
      specs.push_back(std::move(s));
    } catch (const Error& e) {
      throw Error(e.kind(), "registry entry " + std::to_string(i) + ": " + e.what());
    }
  }
  return specs;
}

std::string registry_to_json(const std::vector<ConceptSpec>& specs) {
  ordered_json doc = ordered_json::array();
  for (const auto& s : specs) {
    doc.push_back({{"base_name", s.base_name},
                   {"direction", to_string(s.direction)},
                   {"positive_template", s.positive_template},
                   {"negative_template", s.negative_template},
                   {"category", to_string(s.category)}});
  }
  return doc.dump(2) + "\n";
}

ConceptRegistry load_registry(const std::filesystem::path& path) {
  return ConceptRegistry(parse_registry(io::read_text(path)));
}

std::vector<ConceptSpec> builtin_baseline_concepts() { return parse_registry(builtin::kBaselineConcepts); }

std::vector<ConceptSpec> builtin_trust_concepts() { return parse_registry(builtin::kTrustConcepts); }

ConceptRegistry builtin_registry() {
  ConceptRegistry reg(builtin_baseline_concepts());
  reg.merge(builtin_trust_concepts());
  return reg;
}

std::string builtin_registry_json() { return registry_to_json(builtin_registry().specs()); }

DyadContext parse_context(std::string_view json_text) {
  const ordered_json doc = parse_json(json_text, "dyad context");
  if (!doc.is_object()) throw Error(ErrorKind::Parse, "dyad context must be a JSON object");
  DyadContext ctx{require_string(doc, "person_a"), require_string(doc, "person_b"),
                  require_string(doc, "background")};
  ctx.validate();
  return ctx;
}

DyadContext load_context(const std::filesystem::path& path) { return parse_context(io::read_text(path)); }

Corpus parse_corpus(std::string_view text, const ConceptRegistry* registry, std::size_t expected_per_class) {
  Corpus corpus;
  std::set<std::tuple<std::string, Polarity, std::int64_t>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    const std::string where = "line " + std::to_string(line_no);
    StoryRecord rec;
    try {
      const ordered_json obj = parse_json(line, "corpus");
      if (!obj.is_object()) throw Error(ErrorKind::Parse, "story is not a JSON object");
      rec.concept_id = require_string(obj, "concept_id");
      (void)ConceptId::parse(rec.concept_id);
      rec.polarity = parse_polarity(require_string(obj, "polarity"));
      const auto idx = obj.find("index");
      if (idx == obj.end() || !idx->is_number_integer() || idx->get<std::int64_t>() < 0) {
        throw Error(ErrorKind::Parse, "field \"index\" missing or not a non-negative integer");
      }
      rec.index = idx->get<std::int64_t>();
      rec.text = require_string(obj, "text");
      if (rec.text.empty()) throw Error(ErrorKind::Parse, "story text is empty");
      if (rec.text.find_first_of("\r\n") != std::string::npos) {
        throw Error(ErrorKind::Parse, "story text spans several lines");
      }
    } catch (const Error& e) {
      throw Error(ErrorKind::Parse, where + ": " + e.what());
    }
    if (registry && !registry->contains(rec.concept_id)) {
      throw Error(ErrorKind::Validation, where + ": unknown concept " + rec.concept_id);
    }
    if (!seen.emplace(rec.concept_id, rec.polarity, rec.index).second) {
      throw Error(ErrorKind::Validation, where + ": duplicate story " + rec.concept_id + "/" +
                                             std::string(to_string(rec.polarity)) + "/" +
                                             std::to_string(rec.index));
    }
    auto& counts = corpus.manifest[rec.concept_id];
    ++(rec.polarity == Polarity::Positive ? counts.n_positive : counts.n_negative);
    corpus.records.push_back(std::move(rec));
  }
  for (const auto& [id, counts] : corpus.manifest) {
    if (counts.n_positive != expected_per_class || counts.n_negative != expected_per_class) {
      corpus.warnings.push_back(id + ": " + std::to_string(counts.n_positive) + " positive / " +
                                std::to_string(counts.n_negative) + " negative stories (expected " +
                                std::to_string(expected_per_class) + " each)");
    }
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, const ConceptRegistry* registry,
                   std::size_t expected_per_class) {
  return parse_corpus(io::read_text(path), registry, expected_per_class);
}

std::string story_to_json_line(const StoryRecord& story) {
  const ordered_json obj = {{"concept_id", story.concept_id},
                            {"polarity", to_string(story.polarity)},
                            {"index", story.index},
                            {"text", story.text}};
  return obj.dump();
}

}  // namespace concept_align
