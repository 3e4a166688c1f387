#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "concept_align/error.hpp"
#include "concept_align/io.hpp"
#include "concept_align/synth.hpp"
#include "concept_align/vectors.hpp"
#include "oracle/naive.hpp"
#include "support.hpp"

using namespace concept_align;

namespace {

StatementVector statement(std::size_t layers, std::size_t dim, std::vector<float> values,
                          Polarity pol = Polarity::Positive, std::int64_t index = 0) {
  return {{"x1", pol, index}, Dense<float>(layers, dim, std::move(values))};
}

std::vector<StatementVector> random_class(std::mt19937_64& rng, std::size_t n, std::size_t L, std::size_t D,
                                          Polarity pol) {
  std::uniform_real_distribution<float> u(-2.0f, 2.0f);
  std::vector<StatementVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<float> v(L * D);
    for (auto& x : v) x = u(rng);
    out.push_back(statement(L, D, v, pol, static_cast<std::int64_t>(i)));
  }
  return out;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  throw;
}

}  // namespace

TEST_CASE("class_mean examples") {
  const std::vector<StatementVector> s = {statement(1, 2, {1, 2}), statement(1, 2, {3, 6})};
  const auto m = class_mean(s);
  CHECK(m(0, 0) == 2.0);
  CHECK(m(0, 1) == 4.0);
  CHECK(kind_of([] { class_mean({}); }) == ErrorKind::EmptyClass);
  const std::vector<StatementVector> bad = {statement(1, 2, {1, 2}), statement(2, 1, {3, 6})};
  CHECK(kind_of([&] { class_mean(bad); }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("concept_vector example") {
  const std::vector<StatementVector> pos = {statement(2, 1, {1, 5}), statement(2, 1, {3, 7})};
  const std::vector<StatementVector> neg = {statement(2, 1, {0, 1}, Polarity::Negative)};
  const auto cv = concept_vector("x1", pos, neg);
  CHECK(cv.per_layer(0, 0) == 2.0);
  CHECK(cv.per_layer(1, 0) == 5.0);
  CHECK(cv.averaged == std::vector<double>{3.5});
  CHECK(cv.n_pos == 2);
  CHECK(cv.n_neg == 1);
  CHECK_NOTHROW(cv.validate());
}

TEST_CASE("concept_vector properties") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t L = 1 + rng() % 4, D = 1 + rng() % 8;
    const auto pos = random_class(rng, 1 + rng() % 10, L, D, Polarity::Positive);
    const auto neg = random_class(rng, 1 + rng() % 10, L, D, Polarity::Negative);
    const auto serial = concept_vector("x1", pos, neg, ExecPolicy::Serial);
    const auto parallel = concept_vector("x1", pos, neg, ExecPolicy::Parallel);
    CHECK(serial.per_layer == parallel.per_layer);
    CHECK(serial.averaged == parallel.averaged);

    // Same statements on both sides cancel exactly.
    const auto zero = concept_vector("x1", pos, pos);
    for (const double v : zero.per_layer.flat()) CHECK(v == 0.0);

    // Swapping classes negates.
    const auto swapped = concept_vector("x1", neg, pos);
    for (std::size_t i = 0; i < serial.per_layer.size(); ++i)
      CHECK(swapped.per_layer.flat()[i] == -serial.per_layer.flat()[i]);

    // averaged is the exact layer mean of per_layer.
    for (std::size_t d = 0; d < D; ++d) {
      double s = 0.0;
      for (std::size_t l = 0; l < L; ++l) s += serial.per_layer(l, d);
      CHECK(serial.averaged[d] == s / static_cast<double>(L));
    }
  }
}

TEST_CASE("concept vectors match the brute-force reference on synthetic data") {
  SynthConfig cfg;
  cfg.seed = 7;
  cfg.planted = seeded_concepts({"trust1", "fear2", "honesty2", "risk1", "joy1"});
  const auto ds = generate(cfg);
  std::map<std::string, std::vector<const ActivationTensor*>> by_concept;
  for (const auto& t : ds.tensors) by_concept[t.key.concept_id].push_back(&t);
  REQUIRE(by_concept.size() == 5);
  for (const auto& [id, tensors] : by_concept) {
    CAPTURE(id);
    std::vector<StatementVector> pos, neg;
    for (const auto* t : tensors) (t->key.polarity == Polarity::Positive ? pos : neg).push_back(mean_pool(*t));
    const auto cv = concept_vector(id, pos, neg);
    const auto ref = oracle::concept_vector(tensors);
    for (std::size_t i = 0; i < ref.per_layer.size(); ++i)
      CHECK(oracle::close(cv.per_layer.flat()[i], ref.per_layer[i], 1e-12));
    for (std::size_t d = 0; d < ref.averaged.size(); ++d) CHECK(oracle::close(cv.averaged[d], ref.averaged[d], 1e-12));
  }
}

TEST_CASE("cosine") {
  const std::vector<double> x = {1, 0}, y = {0, 1}, z = {3, 4};
  CHECK(cosine(x, x) == 1.0);
  CHECK(cosine(x, y) == 0.0);
  CHECK(cosine(x, std::vector<double>{-2, 0}) == -1.0);
  CHECK(cosine(x, z) == doctest::Approx(0.6));
  CHECK(kind_of([&] { cosine(x, std::vector<double>{0, 0}); }) == ErrorKind::DegenerateVector);
  CHECK(kind_of([&] { cosine(x, std::vector<double>{1, 0, 0}); }) == ErrorKind::ShapeMismatch);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> u(1 + rng() % 40), v(u.size());
    for (auto& e : u) e = g(rng);
    for (auto& e : v) e = g(rng);
    const double c = cosine(u, v);
    CHECK(c == cosine(v, u));
    CHECK(c >= -1.0);
    CHECK(c <= 1.0);
    CHECK(oracle::close(c, oracle::cosine(u, v), 1e-12));
    auto scaled = u;
    for (auto& e : scaled) e *= 8.0;
    CHECK(cosine(scaled, v) == c);
    CHECK(cosine(u, u) == doctest::Approx(1.0).epsilon(1e-15));
  }
  // Parallel vectors of large magnitude still land inside [-1, 1].
  const std::vector<double> big = {1e150, 3e150, 7e149};
  CHECK(cosine(big, big) <= 1.0);
}

TEST_CASE("concept vector export and import") {
  std::mt19937_64 rng(17);
  test_support::TempDir dir("cv");
  const auto pos = random_class(rng, 4, 3, 5, Polarity::Positive);
  const auto neg = random_class(rng, 6, 3, 5, Polarity::Negative);
  const auto cv = concept_vector("fear2", pos, neg);
  export_concept_vector(cv, dir.path());
  CHECK(std::filesystem::exists(dir.path() / "fear2.layers.actv"));
  CHECK(std::filesystem::exists(dir.path() / "fear2.mean.actv"));

  const auto back = import_concept_vector(dir.path(), "fear2");
  CHECK(back.concept_id == "fear2");
  CHECK(back.n_pos == 4);
  CHECK(back.n_neg == 6);
  REQUIRE(back.n_layers() == 3);
  REQUIRE(back.hidden_dim() == 5);
  for (std::size_t i = 0; i < cv.per_layer.size(); ++i)
    CHECK(back.per_layer.flat()[i] == static_cast<double>(static_cast<float>(cv.per_layer.flat()[i])));
  CHECK_NOTHROW(back.validate());
  CHECK(list_concept_vectors(dir.path()) == std::vector<std::string>{"fear2"});

  // Re-export of an imported vector reproduces the files.
  test_support::TempDir again("cv2");
  export_concept_vector(back, again.path());
  CHECK(io::read_bytes(again.path() / "fear2.layers.actv") == io::read_bytes(dir.path() / "fear2.layers.actv"));

  CHECK(kind_of([&] { import_concept_vector(dir.path(), "joy1"); }) == ErrorKind::Io);

  // A tampered mean dump is rejected.
  auto mean = read_dump(dir.path() / "fear2.mean.actv");
  mean.data[0] += 1.0f;
  write_dump(mean, dir.path() / "fear2.mean.actv");
  CHECK(kind_of([&] { import_concept_vector(dir.path(), "fear2"); }) == ErrorKind::Validation);
}

TEST_CASE("ConceptVector::validate") {
  ConceptVector cv;
  cv.concept_id = "x1";
  cv.per_layer = Dense<double>(2, 1, std::vector<double>{1, 2});
  cv.averaged = {1.5};
  cv.n_pos = cv.n_neg = 1;
  CHECK_NOTHROW(cv.validate());
  cv.averaged = {1.25};
  CHECK(kind_of([&] { cv.validate(); }) == ErrorKind::Validation);
  cv.averaged = {1.5, 0};
  CHECK(kind_of([&] { cv.validate(); }) == ErrorKind::ShapeMismatch);
  cv.averaged = {1.5};
  cv.n_neg = 0;
  CHECK(kind_of([&] { cv.validate(); }) == ErrorKind::EmptyClass);
  cv.n_neg = 1;
  cv.per_layer(0, 0) = std::numeric_limits<double>::infinity();
  CHECK(kind_of([&] { cv.validate(); }) == ErrorKind::Data);
}
