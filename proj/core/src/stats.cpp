#include "bosegas/stats.hpp"

#include <algorithm>
#include <cmath>

namespace bosegas {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t chain_seed(std::uint64_t seed, std::uint64_t chain) { return splitmix64(seed + chain); }

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ (0xd1b54a32d192ed03ULL * (stream + 1)));
}

void RunningStats::add(double x) {
    ++n;
    double d = x - mean;
    mean += d / double(n);
    m2 += d * (x - mean);
}

void RunningStats::merge(const RunningStats& o) {
    if (o.n == 0) return;
    if (n == 0) {
        *this = o;
        return;
    }
    double na = double(n), nb = double(o.n), nt = na + nb;
    double d = o.mean - mean;
    mean += d * nb / nt;
    m2 += o.m2 + d * d * na * nb / nt;
    n += o.n;
}

double RunningStats::stderr_mean() const { return n > 1 ? std::sqrt(variance() / double(n)) : 0.0; }

double ComplexEstimate::stderr_abs() const { return std::hypot(stderr_re, stderr_im); }

int batch_count(std::size_t n) {
    if (n >= 64 * 64) return 64;
    if (n >= 32 * 32) return 32;
    return 16;
}

namespace {

struct Batches {
    std::vector<std::size_t> bounds;
};

Batches make_batches(std::size_t n) {
    Batches b;
    int B = batch_count(n);
    for (int i = 0; i <= B; ++i) b.bounds.push_back(n * std::size_t(i) / std::size_t(B));
    return b;
}

double spread(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= double(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / double(v.size() - 1) / double(v.size()));
}

}  // namespace

ComplexEstimate batch_mean(const std::vector<std::complex<double>>& x) {
    ComplexEstimate e;
    e.n = x.size();
    if (x.empty()) return e;
    std::complex<double> s = 0.0;
    for (auto v : x) s += v;
    e.value = s / double(x.size());
    e.ess = double(x.size());
    if (x.size() < 16) return e;
    auto b = make_batches(x.size());
    std::vector<double> re, im;
    for (std::size_t i = 0; i + 1 < b.bounds.size(); ++i) {
        std::complex<double> bs = 0.0;
        for (std::size_t k = b.bounds[i]; k < b.bounds[i + 1]; ++k) bs += x[k];
        bs /= double(b.bounds[i + 1] - b.bounds[i]);
        re.push_back(bs.real());
        im.push_back(bs.imag());
    }
    e.stderr_re = spread(re);
    e.stderr_im = spread(im);
    return e;
}

ComplexEstimate batch_ratio(const std::vector<std::complex<double>>& num,
                            const std::vector<std::complex<double>>& den) {
    ComplexEstimate e;
    e.n = num.size();
    if (num.empty()) return e;
    std::complex<double> sn = 0.0, sd = 0.0;
    for (std::size_t i = 0; i < num.size(); ++i) {
        sn += num[i];
        sd += den[i];
    }
    e.value = sn / sd;
    e.ess = effective_sample_size(den);
    if (num.size() < 16) return e;
    std::complex<double> dbar = sd / double(num.size());
    auto b = make_batches(num.size());
    std::vector<double> re, im;
    for (std::size_t i = 0; i + 1 < b.bounds.size(); ++i) {
        std::complex<double> bn = 0.0, bd = 0.0;
        for (std::size_t k = b.bounds[i]; k < b.bounds[i + 1]; ++k) {
            bn += num[k];
            bd += den[k];
        }
        double len = double(b.bounds[i + 1] - b.bounds[i]);
        std::complex<double> r = (bn / len - e.value * (bd / len)) / dbar;
        re.push_back(r.real());
        im.push_back(r.imag());
    }
    e.stderr_re = spread(re);
    e.stderr_im = spread(im);
    return e;
}

double effective_sample_size(const std::vector<std::complex<double>>& w) {
    double s1 = 0.0, s2 = 0.0;
    for (auto v : w) {
        double a = std::abs(v);
        s1 += a;
        s2 += a * a;
    }
    return s2 > 0.0 ? s1 * s1 / s2 : 0.0;
}

double integrated_autocorrelation(const std::vector<double>& x) {
    std::size_t n = x.size();
    if (n < 4) return 0.5;
    double m = 0.0;
    for (double v : x) m += v;
    m /= double(n);
    double c0 = 0.0;
    for (double v : x) c0 += (v - m) * (v - m);
    c0 /= double(n);
    if (c0 <= 0.0) return 0.5;
    double tau = 0.5;
    for (std::size_t t = 1; t < n / 2; ++t) {
        double c = 0.0;
        for (std::size_t i = 0; i + t < n; ++i) c += (x[i] - m) * (x[i + t] - m);
        c /= double(n);
        tau += c / c0;
        if (double(t) >= 5.0 * tau) break;
    }
    return std::max(tau, 0.5);
}

double z_score(std::complex<double> a, double sa_re, double sa_im, std::complex<double> b, double sb_re,
               double sb_im) {
    double zr = 0.0, zi = 0.0;
    double er = std::hypot(sa_re, sb_re), ei = std::hypot(sa_im, sb_im);
    double dr = std::abs(a.real() - b.real()), di = std::abs(a.imag() - b.imag());
    zr = er > 0.0 ? dr / er : (dr > 0.0 ? INFINITY : 0.0);
    zi = ei > 0.0 ? di / ei : (di > 0.0 ? INFINITY : 0.0);
    return std::max(zr, zi);
}

}  // namespace bosegas
