#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace concept_align {

// Which participant holds the attitude: suffix 1 is A towards B, suffix 2 is
// B towards A.
enum class Direction { AtoB, BtoA };
enum class Category { BaselinePositive, BaselineNegative, TrustRelated };
enum class Polarity { Positive, Negative };

std::string_view to_string(Direction d) noexcept;
std::string_view to_string(Category c) noexcept;
std::string_view to_string(Polarity p) noexcept;
Direction parse_direction(std::string_view text);
Category parse_category(std::string_view text);
Polarity parse_polarity(std::string_view text);

struct DyadContext {
  std::string person_a;
  std::string person_b;
  std::string background;

  void validate() const;
  static DyadContext standard();

  bool operator==(const DyadContext&) const = default;
};

struct ConceptId {
  std::string base_name;
  Direction direction = Direction::AtoB;

  std::string str() const;
  static ConceptId parse(std::string_view id);

  bool operator==(const ConceptId&) const = default;
};

struct ConceptSpec {
  std::string base_name;
  Direction direction = Direction::AtoB;
  std::string positive_template;
  std::string negative_template;
  Category category = Category::BaselinePositive;

  std::string concept_id() const { return ConceptId{base_name, direction}.str(); }
  void validate() const;

  bool operator==(const ConceptSpec&) const = default;
};

struct PromptPair {
  std::string positive;
  std::string negative;
};

// Substitutes {A} and {B}. Throws Template on any other brace group, on an
// unbalanced brace, or when the template names neither participant.
std::string render_template(std::string_view tmpl, const DyadContext& ctx);

// background + " " + rendered template, for each polarity. Templates are
// authored per direction; nothing is swapped here.
PromptPair render_prompts(const ConceptSpec& spec, const DyadContext& ctx);

// Ordered set of concept specs with unique concept ids.
class ConceptRegistry {
 public:
  ConceptRegistry() = default;
  explicit ConceptRegistry(std::vector<ConceptSpec> specs);

  // Throws Validation on a duplicate concept id or an invalid spec.
  void add(ConceptSpec spec);
  // Adds only the specs whose ids are not present yet.
  void merge(const std::vector<ConceptSpec>& specs);

  bool contains(std::string_view concept_id) const;
  const ConceptSpec& at(std::string_view concept_id) const;
  const std::vector<ConceptSpec>& specs() const noexcept { return specs_; }
  std::vector<std::string> ids() const;
  std::size_t size() const noexcept { return specs_.size(); }

 private:
  std::vector<ConceptSpec> specs_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// The 30 emotional concepts in both directions (60 specs).
std::vector<ConceptSpec> builtin_baseline_concepts();
// The 20 directional trust-related concepts scored against the anchor.
std::vector<ConceptSpec> builtin_trust_concepts();
// Baseline plus the trust concepts not already in it.
ConceptRegistry builtin_registry();
// Raw JSON text the built-in registries were loaded from.
std::string builtin_registry_json();

std::vector<ConceptSpec> parse_registry(std::string_view json_text);
std::string registry_to_json(const std::vector<ConceptSpec>& specs);
ConceptRegistry load_registry(const std::filesystem::path& path);

DyadContext parse_context(std::string_view json_text);
DyadContext load_context(const std::filesystem::path& path);

struct StoryRecord {
  std::string concept_id;
  Polarity polarity = Polarity::Positive;
  std::int64_t index = 0;
  std::string text;

  bool operator==(const StoryRecord&) const = default;
};

struct ClassCounts {
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;

  bool operator==(const ClassCounts&) const = default;
};

using CorpusManifest = std::map<std::string, ClassCounts, std::less<>>;

struct Corpus {
  std::vector<StoryRecord> records;
  CorpusManifest manifest;
  // Non-fatal findings, e.g. class sizes other than the expected count.
  std::vector<std::string> warnings;
};

inline constexpr std::size_t kStoriesPerClass = 100;

// JSON-lines, one story per line; blank lines are skipped. Throws Parse
// naming the 1-based line on malformed input, Validation on an unknown
// concept id (when a registry is given) or a duplicate story key.
Corpus parse_corpus(std::string_view text, const ConceptRegistry* registry = nullptr,
                    std::size_t expected_per_class = kStoriesPerClass);
Corpus load_corpus(const std::filesystem::path& path, const ConceptRegistry* registry = nullptr,
                   std::size_t expected_per_class = kStoriesPerClass);

std::string story_to_json_line(const StoryRecord& story);

}  // namespace concept_align
