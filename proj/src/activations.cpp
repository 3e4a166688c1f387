#include "concept_align/activations.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>

#include "concept_align/error.hpp"
#include "concept_align/io.hpp"

namespace concept_align {

using nlohmann::ordered_json;

namespace {

constexpr const char* kStandardKeys[] = {"concept_id", "polarity", "index",  "n_layers",
                                         "n_tokens",   "hidden_dim", "dtype", "pooled"};

bool is_standard_key(std::string_view key) {
  return std::any_of(std::begin(kStandardKeys), std::end(kStandardKeys),
                     [&](const char* k) { return key == k; });
}

std::size_t checked_volume(std::size_t l, std::size_t t, std::size_t d) {
  constexpr auto max = std::numeric_limits<std::size_t>::max() / sizeof(float);
  if (l != 0 && t > max / l) throw Error(ErrorKind::Parse, "tensor shape overflows");
  if (l * t != 0 && d > max / (l * t)) throw Error(ErrorKind::Parse, "tensor shape overflows");
  return l * t * d;
}

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::size_t header_dim(const ordered_json& h, const char* key, std::string_view source) {
  const auto it = h.find(key);
  if (it == h.end() || !it->is_number_unsigned() || it->get<std::uint64_t>() == 0) {
    throw Error(ErrorKind::Parse, std::string(source) + ": header field \"" + key +
                                      "\" missing or not a positive integer");
  }
  return static_cast<std::size_t>(it->get<std::uint64_t>());
}

}  // namespace

std::string StatementKey::str() const {
  return concept_id + "/" + std::string(to_string(polarity)) + "/" + std::to_string(index);
}

void ActivationTensor::validate() const {
  if (n_layers == 0 || n_tokens == 0 || hidden_dim == 0) {
    throw Error(ErrorKind::ShapeMismatch, key.str() + ": tensor dimensions must be positive");
  }
  if (pooled && n_tokens != 1) {
    throw Error(ErrorKind::Validation, key.str() + ": pooled tensor must have exactly one token");
  }
  if (data.size() != checked_volume(n_layers, n_tokens, hidden_dim)) {
    throw Error(ErrorKind::ShapeMismatch, key.str() + ": data length does not match L*T*D");
  }
  if (key.index < 0) throw Error(ErrorKind::Validation, key.str() + ": negative statement index");
  for (const float v : data) {
    if (!std::isfinite(v)) throw Error(ErrorKind::Data, key.str() + ": non-finite activation value");
  }
}

bool ActivationTensor::operator==(const ActivationTensor& other) const {
  return key == other.key && n_layers == other.n_layers && n_tokens == other.n_tokens &&
         hidden_dim == other.hidden_dim && pooled == other.pooled && extensions == other.extensions &&
         data.size() == other.data.size() &&
         std::memcmp(data.data(), other.data.data(), data.size() * sizeof(float)) == 0;
}

StatementVector mean_pool(const ActivationTensor& t, ExecPolicy policy) {
  t.validate();
  StatementVector out{t.key, Dense<float>(t.n_layers, t.hidden_dim)};
  if (t.pooled) {
    std::copy(t.data.begin(), t.data.end(), out.rows.flat().begin());
  } else {
    kernels::token_mean(policy, t.data, t.n_layers, t.n_tokens, t.hidden_dim, out.rows.flat());
  }
  return out;
}

std::vector<std::uint8_t> encode_dump(const ActivationTensor& t) {
  t.validate();
  ordered_json header = {{"concept_id", t.key.concept_id},
                         {"polarity", to_string(t.key.polarity)},
                         {"index", t.key.index},
                         {"n_layers", t.n_layers},
                         {"n_tokens", t.n_tokens},
                         {"hidden_dim", t.hidden_dim},
                         {"dtype", kActvDtype},
                         {"pooled", t.pooled}};
  for (const auto& [k, v] : t.extensions.items()) {
    if (is_standard_key(k)) throw Error(ErrorKind::Validation, "header extension shadows \"" + k + "\"");
    header[k] = v;
  }
  const std::string text = header.dump();

  std::vector<std::uint8_t> out;
  out.reserve(kActvMagic.size() + 4 + text.size() + t.data.size() * 4);
  out.insert(out.end(), kActvMagic.begin(), kActvMagic.end());
  put_u32le(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (const float v : t.data) put_u32le(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

ActivationTensor decode_dump(std::span<const std::uint8_t> bytes, std::string_view source) {
  const std::string src(source);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kActvMagic.data(), 4) != 0) {
    throw Error(ErrorKind::BadMagic, src + ": not an ACTV file");
  }
  if (bytes.size() < kActvMagic.size() ||
      std::memcmp(bytes.data(), kActvMagic.data(), kActvMagic.size()) != 0) {
    throw Error(ErrorKind::UnsupportedVersion, src + ": unsupported ACTV version");
  }
  std::size_t pos = kActvMagic.size();
  if (bytes.size() < pos + 4) throw Error(ErrorKind::HeaderLength, src + ": missing header length");
  const std::size_t header_len = get_u32le(bytes.data() + pos);
  pos += 4;
  if (bytes.size() - pos < header_len) {
    throw Error(ErrorKind::HeaderLength, src + ": header length exceeds file size");
  }

  ordered_json h;
  try {
    h = ordered_json::parse(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                            bytes.begin() + static_cast<std::ptrdiff_t>(pos + header_len));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, src + ": header is not valid JSON: " + e.what());
  }
  pos += header_len;
  if (!h.is_object()) throw Error(ErrorKind::Parse, src + ": header is not a JSON object");

  const auto dtype = h.find("dtype");
  if (dtype == h.end() || !dtype->is_string()) throw Error(ErrorKind::Parse, src + ": header lacks dtype");
  if (dtype->get<std::string>() != kActvDtype) {
    throw Error(ErrorKind::UnsupportedDtype, src + ": dtype \"" + dtype->get<std::string>() + "\"");
  }

  ActivationTensor t;
  try {
    const auto cid = h.find("concept_id");
    const auto pol = h.find("polarity");
    const auto idx = h.find("index");
    const auto pooled = h.find("pooled");
    if (cid == h.end() || !cid->is_string()) throw Error(ErrorKind::Parse, "header lacks concept_id");
    if (pol == h.end() || !pol->is_string()) throw Error(ErrorKind::Parse, "header lacks polarity");
    if (idx == h.end() || !idx->is_number_integer() || idx->get<std::int64_t>() < 0) {
      throw Error(ErrorKind::Parse, "header index missing or negative");
    }
    if (pooled == h.end() || !pooled->is_boolean()) throw Error(ErrorKind::Parse, "header lacks pooled");
    t.key = {cid->get<std::string>(), parse_polarity(pol->get<std::string>()), idx->get<std::int64_t>()};
    t.pooled = pooled->get<bool>();
  } catch (const Error& e) {
    throw Error(ErrorKind::Parse, src + ": " + e.what());
  }
  t.n_layers = header_dim(h, "n_layers", src);
  t.n_tokens = header_dim(h, "n_tokens", src);
  t.hidden_dim = header_dim(h, "hidden_dim", src);
  if (t.pooled && t.n_tokens != 1) throw Error(ErrorKind::Parse, src + ": pooled header with n_tokens != 1");
  for (const auto& [k, v] : h.items()) {
    if (!is_standard_key(k)) t.extensions[k] = v;
  }

  const std::size_t count = checked_volume(t.n_layers, t.n_tokens, t.hidden_dim);
  const std::size_t remaining = bytes.size() - pos;
  if (remaining / 4 < count) {
    throw Error(ErrorKind::TruncatedPayload, src + ": payload has " + std::to_string(remaining) +
                                                 " bytes, expected " + std::to_string(count * 4));
  }
  if (remaining != count * 4) {
    throw Error(ErrorKind::TrailingBytes, src + ": " + std::to_string(remaining - count * 4) +
                                              " bytes after payload");
  }
  t.data.resize(count);
  for (std::size_t i = 0; i < count; ++i, pos += 4) {
    const float v = std::bit_cast<float>(get_u32le(bytes.data() + pos));
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NonFinite, src + ": non-finite value at element " + std::to_string(i));
    }
    t.data[i] = v;
  }
  return t;
}

void write_dump(const ActivationTensor& t, const std::filesystem::path& path) {
  io::write_bytes(path, encode_dump(t));
}

ActivationTensor read_dump(const std::filesystem::path& path) {
  const auto bytes = io::read_bytes(path);
  return decode_dump(bytes, path.string());
}

std::filesystem::path dump_path(const std::filesystem::path& root, const StatementKey& key) {
  return root / key.concept_id / std::string(to_string(key.polarity)) /
         (std::to_string(key.index) + ".actv");
}

namespace {

std::vector<std::pair<std::int64_t, std::filesystem::path>> list_dumps(const std::filesystem::path& dir) {
  std::vector<std::pair<std::int64_t, std::filesystem::path>> files;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) return files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".actv") continue;
    const std::string stem = entry.path().stem().string();
    std::int64_t index = -1;
    const auto [ptr, err] = std::from_chars(stem.data(), stem.data() + stem.size(), index);
    if (err != std::errc{} || ptr != stem.data() + stem.size() || index < 0) {
      throw Error(ErrorKind::Validation, entry.path().string() + ": file name is not a statement index");
    }
    files.emplace_back(index, entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

ClassVectors load_statement_vectors(const std::filesystem::path& root, std::string_view concept_id,
                                    ExecPolicy policy) {
  const auto concept_dir = root / std::string(concept_id);
  std::error_code ec;
  if (!std::filesystem::is_directory(concept_dir, ec)) {
    throw Error(ErrorKind::MissingData, "no activation dumps for " + std::string(concept_id) + " under " +
                                            root.string());
  }

  ClassVectors out;
  std::size_t layers = 0;
  std::size_t dim = 0;
  for (const Polarity pol : {Polarity::Positive, Polarity::Negative}) {
    auto& dest = pol == Polarity::Positive ? out.positives : out.negatives;
    for (const auto& [index, path] : list_dumps(concept_dir / std::string(to_string(pol)))) {
      ActivationTensor t = read_dump(path);
      const StatementKey expected{std::string(concept_id), pol, index};
      if (t.key != expected) {
        throw Error(ErrorKind::Validation, path.string() + ": header names " + t.key.str());
      }
      if (layers == 0) {
        layers = t.n_layers;
        dim = t.hidden_dim;
      } else if (t.n_layers != layers || t.hidden_dim != dim) {
        throw Error(ErrorKind::ShapeMismatch,
                    path.string() + ": shape (" + std::to_string(t.n_layers) + ", " +
                        std::to_string(t.hidden_dim) + ") differs from (" + std::to_string(layers) + ", " +
                        std::to_string(dim) + ")");
      }
      dest.push_back(mean_pool(t, policy));
    }
    if (dest.empty()) {
      throw Error(ErrorKind::EmptyClass, std::string(concept_id) + " has no " +
                                             std::string(to_string(pol)) + " statements");
    }
  }
  return out;
}

}  // namespace concept_align
