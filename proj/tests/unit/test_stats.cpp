#include <cmath>
#include <random>

#include "doctest.h"

#include "bosegas/stats.hpp"

using namespace bosegas;

TEST_CASE("running stats pooling is associative") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(1.0, 2.0);
    RunningStats a, b, c, all;
    for (int i = 0; i < 1000; ++i) {
        double x = g(rng);
        (i < 300 ? a : i < 750 ? b : c).add(x);
        all.add(x);
    }
    RunningStats left = a, right = b;
    left.merge(b);
    left.merge(c);
    right.merge(c);
    RunningStats r2 = a;
    r2.merge(right);
    CHECK(left.n == all.n);
    CHECK(left.mean == doctest::Approx(all.mean).epsilon(1e-12));
    CHECK(left.m2 == doctest::Approx(all.m2).epsilon(1e-12));
    CHECK(r2.mean == doctest::Approx(left.mean).epsilon(1e-12));
    CHECK(r2.m2 == doctest::Approx(left.m2).epsilon(1e-12));
}

TEST_CASE("seed splitting") {
    CHECK(chain_seed(5, 0) != chain_seed(5, 1));
    CHECK(chain_seed(5, 1) == chain_seed(5, 1));
    CHECK(stream_seed(5, 0) != stream_seed(5, 1));
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("batch means errors track the iid standard error") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::complex<double>> x(1 << 14);
    for (auto& v : x) v = {g(rng), 3.0 * g(rng)};
    auto e = batch_mean(x);
    double iid = 1.0 / std::sqrt(double(x.size()));
    CHECK(e.stderr_re == doctest::Approx(iid).epsilon(0.3));
    CHECK(e.stderr_im == doctest::Approx(3 * iid).epsilon(0.3));
    CHECK(std::abs(e.value.real()) < 4 * iid);
    CHECK(batch_count(x.size()) >= 16);
    CHECK(batch_count(256) == 16);
}

TEST_CASE("ratio estimator and effective sample size") {
    std::vector<std::complex<double>> num, den;
    for (int i = 0; i < 512; ++i) {
        den.push_back(1.0 + 0.5 * ((i % 2) ? 1.0 : -1.0));
        num.push_back(den.back() * 2.0);
    }
    auto e = batch_ratio(num, den);
    CHECK(e.value.real() == doctest::Approx(2.0));
    CHECK(e.stderr_re == doctest::Approx(0.0));
    std::vector<std::complex<double>> flat(100, 1.0);
    CHECK(effective_sample_size(flat) == doctest::Approx(100.0));
    flat[0] = 1e6;
    CHECK(effective_sample_size(flat) < 1.01);
}

TEST_CASE("autocorrelation of an AR(1) chain") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    double phi = 0.8, x = 0.0;
    std::vector<double> s;
    for (int i = 0; i < 200000; ++i) {
        x = phi * x + g(rng);
        s.push_back(x);
    }
    // tau_int = (1 + phi) / (2 (1 - phi)) = 4.5
    CHECK(integrated_autocorrelation(s) == doctest::Approx(4.5).epsilon(0.1));
}
