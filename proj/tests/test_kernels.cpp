#include "lindex/kernels/kernels.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <random>
#include <string>
#include <vector>

using namespace lindex;
using kernels::cplx;

namespace {

std::mt19937 rng(20240811);

std::vector<cplx> random_cvec(std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> v(n);
    for (auto& x : v) x = cplx(u(rng), u(rng));
    return v;
}

std::vector<double> random_dvec(std::size_t n) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

} // namespace

TEST_CASE("scalar and dispatched kernels agree on random data") {
    const auto& simd = kernels::active();
    const auto& ref = kernels::scalar_table();
    INFO("active kernel set: ", simd.name);

    for (std::size_t n : {std::size_t(1), std::size_t(7), std::size_t(64), std::size_t(257)}) {
        const auto lam = random_dvec(n);
        std::vector<double> w1(n), w2(n);
        ref.exp_sq_weights(lam.data(), 0.37, w1.data(), n);
        simd.exp_sq_weights(lam.data(), 0.37, w2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(w1[i] == doctest::Approx(w2[i]).epsilon(1e-14));

        const auto v = random_cvec(n);
        std::vector<cplx> acc1(n * n, cplx(0.1, -0.2)), acc2 = acc1;
        ref.herk1_acc(acc1.data(), v.data(), 0.8, n);
        simd.herk1_acc(acc2.data(), v.data(), 0.8, n);
        double worst = 0;
        for (std::size_t i = 0; i < n * n; ++i) worst = std::max(worst, rel_err(acc2[i], acc1[i]));
        CHECK(worst < 1e-13);

        std::vector<double> d1(n, 0.5), d2(n, 0.5);
        ref.diag_acc(d1.data(), v.data(), 1.3, n);
        simd.diag_acc(d2.data(), v.data(), 1.3, n);
        for (std::size_t i = 0; i < n; ++i) CHECK(d1[i] == doctest::Approx(d2[i]).epsilon(1e-13));

        const auto b = random_cvec(n);
        CHECK(rel_err(simd.dotc(v.data(), b.data(), n), ref.dotc(v.data(), b.data(), n)) < 1e-13);

        std::vector<cplx> y1 = b, y2 = b;
        const cplx alpha(0.3, -1.1);
        ref.axpy(y1.data(), alpha, v.data(), n);
        simd.axpy(y2.data(), alpha, v.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(rel_err(y2[i], y1[i]) < 1e-13);

        const auto wts = random_dvec(n);
        CHECK(simd.wsum(wts.data(), lam.data(), n) ==
              doctest::Approx(ref.wsum(wts.data(), lam.data(), n)).epsilon(1e-13));
    }
}

TEST_CASE("force_scalar pins the reference table") {
    const auto& pinned = kernels::force_scalar(true);
    CHECK(std::string(pinned.name) == "scalar");
    const auto& restored = kernels::force_scalar(false);
    if (kernels::avx2_available()) CHECK(std::string(restored.name) == "avx2");
}

TEST_CASE("parallel_for covers the range once per index, any thread count") {
    for (int threads : {1, 3, 8}) {
        kernels::set_thread_count(threads);
        std::vector<std::atomic<int>> hits(1000);
        for (auto& h : hits) h = 0;
        kernels::parallel_for(0, hits.size(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) hits[i]++;
        });
        for (const auto& h : hits) CHECK(h.load() == 1);
    }
    kernels::set_thread_count(1);
}
