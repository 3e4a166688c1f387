#include "concept_align/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "concept_align/activations.hpp"
#include "concept_align/alignment.hpp"
#include "concept_align/corpus.hpp"
#include "concept_align/error.hpp"
#include "concept_align/io.hpp"
#include "concept_align/report.hpp"
#include "concept_align/similarity.hpp"
#include "concept_align/synth.hpp"
#include "concept_align/vectors.hpp"

namespace concept_align::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr double kGptjPinnedThreshold = 0.6;
constexpr std::size_t kGptjLayers = 28;
constexpr std::size_t kGptjHiddenDim = 4096;

struct Options {
  // prompts
  std::string registry;
  std::string context;
  std::string out;
  // synth
  std::uint64_t seed = 7;
  std::size_t layers = 4;
  std::size_t dim = 8;
  std::size_t per_class = 10;
  double noise = 0.1;
  std::string concept_set = "all";
  // vectors / matrix / align / report
  std::string data;
  std::string vectors;
  std::string matrix;
  std::string histogram_out;
  std::size_t bins = kDefaultBins;
  double percentile = kDefaultPercentile;
  std::optional<double> pin;
  std::string anchor = std::string(kDefaultAnchor);
  std::string threshold;
  std::string sims_file;
  std::string models;
  std::string radar_out;
  std::string heatmap_out;
  std::string profile;
  bool no_histogram = false;
};

ConceptRegistry registry_from(const std::string& path) {
  return path.empty() ? builtin_registry() : load_registry(path);
}

std::string registry_hash(const std::string& path) {
  return io::fnv1a_hex(path.empty() ? builtin_registry_json() : io::read_text(path));
}

std::vector<TrustModelSpec> models_from(const std::string& path) {
  return path.empty() ? builtin_models() : load_models(path);
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    io::write_text(path, text);
  }
}

std::vector<std::string> select_ids(const ConceptRegistry& registry, const std::string& set) {
  std::vector<std::string> ids;
  for (const auto& spec : registry.specs()) {
    const bool baseline = spec.category != Category::TrustRelated;
    if (set == "all" || (set == "baseline" && baseline) || (set == "trust" && !baseline)) {
      ids.push_back(spec.concept_id());
    }
  }
  return ids;
}

// Vectors in `dir`, restricted to `set` (registry order) unless set == "all".
std::vector<ConceptVector> load_vector_set(const std::string& dir, const std::string& set,
                                           const std::string& registry_path) {
  const auto available = list_concept_vectors(dir);
  std::vector<std::string> ids;
  if (set == "all") {
    ids = available;
  } else {
    for (auto& id : select_ids(registry_from(registry_path), set)) {
      if (!std::binary_search(available.begin(), available.end(), id)) {
        throw Error(ErrorKind::MissingData, "no concept vector for " + id + " in " + dir);
      }
      ids.push_back(std::move(id));
    }
  }
  std::vector<ConceptVector> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(import_concept_vector(dir, id));
  return out;
}

double parse_threshold_arg(const std::string& arg) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), v);
  if (ec == std::errc{} && ptr == arg.data() + arg.size()) return v;
  try {
    return threshold_from_json(ordered_json::parse(io::read_text(arg))).value;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, arg + ": " + e.what());
  }
}

void check_gptj_shape(const ConceptVector& cv) {
  if (cv.n_layers() != kGptjLayers || cv.hidden_dim() != kGptjHiddenDim) {
    throw Error(ErrorKind::Validation, cv.concept_id + ": gptj profile expects (28, 4096) vectors, got (" +
                                           std::to_string(cv.n_layers()) + ", " +
                                           std::to_string(cv.hidden_dim()) + ")");
  }
}

int cmd_prompts(const Options& o, std::ostream& out) {
  const ConceptRegistry registry = registry_from(o.registry);
  const DyadContext ctx = o.context.empty() ? DyadContext::standard() : load_context(o.context);
  std::string text;
  for (const auto& spec : registry.specs()) {
    const PromptPair p = render_prompts(spec, ctx);
    const ordered_json line = {{"concept_id", spec.concept_id()},
                               {"direction", to_string(spec.direction)},
                               {"category", to_string(spec.category)},
                               {"positive_prompt", p.positive},
                               {"negative_prompt", p.negative}};
    text += line.dump() + "\n";
  }
  emit(text, o.out, out);
  return kExitOk;
}

int cmd_synth(const Options& o, std::ostream& out) {
  SynthConfig cfg;
  cfg.seed = o.seed;
  cfg.n_layers = o.layers;
  cfg.hidden_dim = o.dim;
  cfg.n_statements_per_class = o.per_class;
  cfg.noise_scale = o.noise;
  cfg.planted = seeded_concepts(select_ids(registry_from(o.registry), o.concept_set));
  const SynthDataset ds = generate(cfg);
  write_dataset(ds, o.out);
  out << "wrote " << ds.tensors.size() << " dumps for " << cfg.planted.size() << " concepts to " << o.out << "\n";
  return kExitOk;
}

int cmd_vectors(const Options& o, std::ostream& out, std::ostream& err) {
  const ConceptRegistry registry = registry_from(o.registry);
  std::size_t built = 0;
  for (const auto& id : registry.ids()) {
    if (!fs::is_directory(fs::path(o.data) / id)) {
      err << "warning: no activation dumps for " << id << ", skipped\n";
      continue;
    }
    const ClassVectors classes = load_statement_vectors(o.data, id);
    export_concept_vector(concept_vector(id, classes.positives, classes.negatives), o.out);
    ++built;
  }
  if (built == 0) throw Error(ErrorKind::MissingData, "no concept in the registry has dumps under " + o.data);
  out << "built " << built << " concept vectors in " << o.out << "\n";
  return kExitOk;
}

int cmd_matrix(const Options& o, std::ostream& out) {
  const auto vectors = load_vector_set(o.vectors, o.concept_set, o.registry);
  const SimilarityMatrix m = pairwise_matrix(vectors);
  export_heatmap(m, o.out);
  if (!o.histogram_out.empty()) {
    io::write_text(o.histogram_out, histogram_to_csv(histogram(off_diagonal_values(m), o.bins)));
  }
  out << "wrote " << m.size() << "x" << m.size() << " similarity matrix to " << o.out << "\n";
  return kExitOk;
}

int cmd_threshold(const Options& o, std::ostream& out) {
  const SimilarityMatrix m = matrix_from_csv(io::read_text(o.matrix));
  const auto values = off_diagonal_values(m);
  ThresholdResult t = percentile_threshold(values, o.percentile);
  if (o.pin) t = pin_threshold(t, *o.pin);
  if (!o.histogram_out.empty()) io::write_text(o.histogram_out, histogram_to_csv(histogram(values, o.bins)));
  const std::string text = threshold_to_json(t).dump(2) + "\n";
  if (!o.out.empty()) io::write_text(o.out, text);
  out << text;
  return kExitOk;
}

int cmd_align(const Options& o, std::ostream& out) {
  const auto models = models_from(o.models);
  const double threshold = parse_threshold_arg(o.threshold);
  AlignmentReport report;
  if (!o.sims_file.empty()) {
    report = build_report_from_similarities(o.anchor, parse_similarity_map(io::read_text(o.sims_file)), models,
                                            threshold);
  } else {
    std::set<std::string> needed;
    for (const auto& m : models) needed.insert(m.members.begin(), m.members.end());
    needed.erase(o.anchor);
    const ConceptVector anchor = import_concept_vector(o.vectors, o.anchor);
    std::vector<ConceptVector> concepts;
    for (const auto& id : needed) concepts.push_back(import_concept_vector(o.vectors, id));
    report = build_report(anchor, concepts, models, threshold);
  }
  const std::string text = report_to_json(report).dump(2) + "\n";
  if (!o.out.empty()) io::write_text(o.out, text);
  if (!o.radar_out.empty()) export_radar(report, o.radar_out);
  out << text;
  return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out) {
  const bool gptj = o.profile == "gptj";
  const auto models = models_from(o.models);
  const auto baseline = load_vector_set(o.vectors, "baseline", o.registry);
  if (gptj) std::for_each(baseline.begin(), baseline.end(), check_gptj_shape);

  const SimilarityMatrix m = pairwise_matrix(baseline);
  const auto values = off_diagonal_values(m);
  ThresholdResult t = percentile_threshold(values, o.percentile);
  if (o.pin) {
    t = pin_threshold(t, *o.pin);
  } else if (gptj) {
    t = pin_threshold(t, kGptjPinnedThreshold);
  }
  std::optional<Histogram> hist;
  if (!o.no_histogram) hist = histogram(values, o.bins);

  std::set<std::string> needed;
  for (const auto& model : models) needed.insert(model.members.begin(), model.members.end());
  needed.erase(o.anchor);
  const ConceptVector anchor = import_concept_vector(o.vectors, o.anchor);
  if (gptj) check_gptj_shape(anchor);
  std::vector<ConceptVector> concepts;
  for (const auto& id : needed) concepts.push_back(import_concept_vector(o.vectors, id));
  const AlignmentReport report = build_report(anchor, concepts, models, t.value);

  const Provenance prov{o.vectors, registry_hash(o.registry), t.method, std::string(kEngineVersion)};
  export_study(report, m, hist, t, prov, o.out);
  if (!o.heatmap_out.empty()) export_heatmap(m, o.heatmap_out);
  if (!o.radar_out.empty()) export_radar(report, o.radar_out);
  if (!o.histogram_out.empty() && hist) io::write_text(o.histogram_out, histogram_to_csv(*hist));
  out << "threshold " << io::fixed(t.value, 4) << " (" << t.method << "); ranking by average:";
  for (const auto& name : report.ranking_by_average) out << " " << name;
  out << "\n";
  return kExitOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Concept-vector similarity and trust-model alignment toolkit", "concept_align"};
  app.require_subcommand(1);
  Options o;

  auto* prompts = app.add_subcommand("prompts", "Render contrastive story-generation prompts as JSON lines");
  prompts->add_option("--registry", o.registry, "Concept registry JSON (default: built-in)");
  prompts->add_option("--context", o.context, "Dyad context JSON (default: built-in)");
  prompts->add_option("--out", o.out, "Output JSONL (default: stdout)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic activation dataset with planted directions");
  synth->add_option("--seed", o.seed, "Random seed");
  synth->add_option("--layers", o.layers, "Number of layers")->check(CLI::PositiveNumber);
  synth->add_option("--dim", o.dim, "Hidden dimension")->check(CLI::PositiveNumber);
  synth->add_option("--per-class", o.per_class, "Statements per class")->check(CLI::PositiveNumber);
  synth->add_option("--noise", o.noise, "Uniform noise half-width")->check(CLI::NonNegativeNumber);
  synth->add_option("--registry", o.registry, "Concept registry JSON (default: built-in)");
  synth->add_option("--set", o.concept_set, "Concepts to generate")->check(CLI::IsMember({"all", "baseline", "trust"}));
  synth->add_option("--out", o.out, "Dataset root")->required();

  auto* vectors = app.add_subcommand("vectors", "Build concept vectors from an activation dataset");
  vectors->add_option("--data", o.data, "Dataset root")->required();
  vectors->add_option("--registry", o.registry, "Concept registry JSON (default: built-in)");
  vectors->add_option("--out", o.out, "Output directory")->required();

  auto* matrix = app.add_subcommand("matrix", "Pairwise cosine similarity matrix over concept vectors");
  matrix->add_option("--vectors", o.vectors, "Concept vector directory")->required();
  matrix->add_option("--set", o.concept_set, "Concepts to include")->check(CLI::IsMember({"all", "baseline", "trust"}));
  matrix->add_option("--registry", o.registry, "Concept registry JSON (default: built-in)");
  matrix->add_option("--histogram", o.histogram_out, "Also write histogram CSV");
  matrix->add_option("--bins", o.bins, "Histogram bins")->check(CLI::PositiveNumber);
  matrix->add_option("--out", o.out, "Matrix CSV")->required();

  auto* threshold = app.add_subcommand("threshold", "Percentile threshold over off-diagonal similarities");
  threshold->add_option("--matrix", o.matrix, "Matrix CSV")->required();
  threshold->add_option("--percentile", o.percentile, "Percentile in (0, 100)");
  threshold->add_option("--pin", o.pin, "Pin the operational threshold to this value");
  threshold->add_option("--histogram", o.histogram_out, "Also write histogram CSV");
  threshold->add_option("--bins", o.bins, "Histogram bins")->check(CLI::PositiveNumber);
  threshold->add_option("--out", o.out, "Also write the JSON here");

  auto* align = app.add_subcommand("align", "Score trust models against the anchor concept");
  auto* align_vectors = align->add_option("--vectors", o.vectors, "Concept vector directory");
  auto* align_sims = align->add_option("--sims-file", o.sims_file, "JSON map concept_id -> similarity");
  align_vectors->excludes(align_sims);
  align->add_option("--anchor", o.anchor, "Anchor concept id");
  align->add_option("--threshold", o.threshold, "Threshold value or threshold JSON file")->required();
  align->add_option("--models", o.models, "Trust model JSON (default: built-in)");
  align->add_option("--radar", o.radar_out, "Also write radar data JSON");
  align->add_option("--out", o.out, "Also write the report JSON here");

  auto* report = app.add_subcommand("report", "Full study: matrix, threshold, histogram, alignment bundle");
  report->add_option("--vectors", o.vectors, "Concept vector directory")->required();
  report->add_option("--registry", o.registry, "Concept registry JSON (default: built-in)");
  report->add_option("--models", o.models, "Trust model JSON (default: built-in)");
  report->add_option("--anchor", o.anchor, "Anchor concept id");
  report->add_option("--percentile", o.percentile, "Percentile in (0, 100)");
  report->add_option("--pin", o.pin, "Pin the operational threshold to this value");
  report->add_option("--profile", o.profile, "Reproduction profile")->check(CLI::IsMember({"gptj"}));
  report->add_option("--bins", o.bins, "Histogram bins")->check(CLI::PositiveNumber);
  report->add_flag("--no-histogram", o.no_histogram, "Omit the histogram from the bundle");
  report->add_option("--heatmap", o.heatmap_out, "Also write the matrix CSV");
  report->add_option("--histogram", o.histogram_out, "Also write histogram CSV");
  report->add_option("--radar", o.radar_out, "Also write radar data JSON");
  report->add_option("--out", o.out, "Study bundle JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (prompts->parsed()) return cmd_prompts(o, out);
    if (synth->parsed()) return cmd_synth(o, out);
    if (vectors->parsed()) return cmd_vectors(o, out, err);
    if (matrix->parsed()) return cmd_matrix(o, out);
    if (threshold->parsed()) return cmd_threshold(o, out);
    if (align->parsed()) {
      if (o.sims_file.empty() && o.vectors.empty()) {
        err << "error: align needs --vectors or --sims-file\n\n" << align->help();
        return kExitUsage;
      }
      return cmd_align(o, out);
    }
    if (report->parsed()) return cmd_report(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_io_or_parse(e.kind()) ? kExitIo : kExitValidation;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace concept_align::cli
