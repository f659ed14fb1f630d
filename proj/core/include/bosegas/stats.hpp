#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace bosegas {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
// per-chain seed: chain streams never depend on the chain count
std::uint64_t chain_seed(std::uint64_t seed, std::uint64_t chain);
// independent sub-stream for a named stage inside one chain
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

// count / mean / M2 accumulator (Welford, Chan et al. pooling)
struct RunningStats {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x);
    void merge(const RunningStats& o);
    double variance() const { return n > 1 ? m2 / double(n - 1) : 0.0; }
    double stderr_mean() const;
};

struct ComplexEstimate {
    std::complex<double> value{0.0, 0.0};
    double stderr_re = 0.0;
    double stderr_im = 0.0;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    double ess = 0.0;
    bool unreliable = false;

    double stderr_abs() const;
};

int batch_count(std::size_t n);

// plain mean with batch-means standard errors
ComplexEstimate batch_mean(const std::vector<std::complex<double>>& x);
// sum(num) / sum(den) with delta-method batch errors
ComplexEstimate batch_ratio(const std::vector<std::complex<double>>& num,
                            const std::vector<std::complex<double>>& den);
// (sum |w|)^2 / sum |w|^2
double effective_sample_size(const std::vector<std::complex<double>>& w);

// Sokal self-consistent window, c = 5
double integrated_autocorrelation(const std::vector<double>& x);

// larger of the real/imaginary distances in combined standard errors
double z_score(std::complex<double> a, double sa_re, double sa_im, std::complex<double> b, double sb_re,
               double sb_im);

}  // namespace bosegas
