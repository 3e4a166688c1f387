#include <doctest.h>

#include <cstdlib>
#include <random>
#include <vector>

#include <omp.h>

#include "concept_align/kernels.hpp"

using namespace concept_align;

namespace {

std::vector<double> random_doubles(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

}  // namespace

TEST_CASE("serial and parallel kernels agree bitwise") {
  std::mt19937_64 rng(5);
  for (const int threads : {1, 2, 3, 8}) {
    omp_set_num_threads(threads);
    CAPTURE(threads);

    const std::size_t L = 5, T = 17, D = 33;
    std::vector<float> data(L * T * D);
    std::uniform_real_distribution<float> u(-3.0f, 3.0f);
    for (auto& x : data) x = u(rng);
    std::vector<float> a(L * D), b(L * D);
    kernels::serial::token_mean(data, L, T, D, a);
    kernels::parallel::token_mean(data, L, T, D, b);
    CHECK(a == b);

    std::vector<std::vector<float>> stack(9, std::vector<float>(L * D));
    for (auto& s : stack)
      for (auto& x : s) x = u(rng);
    std::vector<std::span<const float>> views(stack.begin(), stack.end());
    std::vector<double> ma(L * D), mb(L * D);
    kernels::serial::stacked_mean(views, ma);
    kernels::parallel::stacked_mean(views, mb);
    CHECK(ma == mb);

    std::vector<double> la(D), lb(D);
    kernels::serial::layer_mean(ma, L, D, la);
    kernels::parallel::layer_mean(ma, L, D, lb);
    CHECK(la == lb);

    const std::size_t N = 61;
    const auto vecs = random_doubles(rng, N * D);
    std::vector<double> na(N), nb(N);
    kernels::serial::row_norms(vecs, N, D, na);
    kernels::parallel::row_norms(vecs, N, D, nb);
    CHECK(na == nb);

    std::vector<double> ca(N * N), cb(N * N);
    kernels::serial::pairwise_cosine(vecs, na, N, D, ca);
    kernels::parallel::pairwise_cosine(vecs, nb, N, D, cb);
    CHECK(ca == cb);
    for (std::size_t i = 0; i < N; ++i) {
      CHECK(ca[i * N + i] == 1.0);
      for (std::size_t j = 0; j < N; ++j) CHECK(ca[i * N + j] == ca[j * N + i]);
    }
  }
}

TEST_CASE("kernel examples") {
  const std::vector<float> data = {1, 3, 3, 1};
  std::vector<float> out(2);
  kernels::token_mean(ExecPolicy::Parallel, data, 1, 2, 2, out);
  CHECK(out == std::vector<float>{2, 2});

  const std::vector<double> rows = {1, 2, 3, 6};
  std::vector<double> mean(2);
  kernels::layer_mean(ExecPolicy::Serial, rows, 2, 2, mean);
  CHECK(mean == std::vector<double>{2, 4});

  const std::vector<double> vecs = {3, 4, 0, 2};
  std::vector<double> norms(2);
  kernels::row_norms(ExecPolicy::Parallel, vecs, 2, 2, norms);
  CHECK(norms == std::vector<double>{5, 2});
  std::vector<double> cos(4);
  kernels::pairwise_cosine(ExecPolicy::Parallel, vecs, norms, 2, 2, cos);
  CHECK(cos[1] == doctest::Approx(0.8));
  CHECK(cos[2] == cos[1]);
}

TEST_CASE("thread cap follows the environment") {
  ::setenv("CONCEPT_ALIGN_THREADS", "3", 1);
  CHECK(kernels::thread_cap() == 3);
  ::setenv("CONCEPT_ALIGN_THREADS", "junk", 1);
  CHECK(kernels::thread_cap() >= 1);
  ::setenv("CONCEPT_ALIGN_THREADS", "0", 1);
  CHECK(kernels::thread_cap() >= 1);
  ::unsetenv("CONCEPT_ALIGN_THREADS");
  CHECK(kernels::thread_cap() >= 1);
}
