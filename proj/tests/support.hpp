#pragma once

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>

#include "concept_align/activations.hpp"

namespace test_support {

// Fresh directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("concept_align_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline concept_align::ActivationTensor random_tensor(std::mt19937_64& rng, std::size_t max_layers = 4,
                                                     std::size_t max_tokens = 6, std::size_t max_dim = 8) {
  std::uniform_int_distribution<std::size_t> layers(1, max_layers), tokens(1, max_tokens), dim(1, max_dim);
  std::uniform_real_distribution<float> value(-4.0f, 4.0f);
  concept_align::ActivationTensor t;
  t.key = {"c" + std::to_string(rng() % 50) + (rng() % 2 ? "1" : "2"),
           rng() % 2 ? concept_align::Polarity::Positive : concept_align::Polarity::Negative,
           static_cast<std::int64_t>(rng() % 1000)};
  t.n_layers = layers(rng);
  t.pooled = rng() % 4 == 0;
  t.n_tokens = t.pooled ? 1 : tokens(rng);
  t.hidden_dim = dim(rng);
  t.data.resize(t.n_layers * t.n_tokens * t.hidden_dim);
  for (auto& v : t.data) v = value(rng);
  return t;
}

}  // namespace test_support
