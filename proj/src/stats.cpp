#include "sdreg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "sdreg/errors.hpp"

namespace sdreg {

namespace {

constexpr double kLn10 = 2.302585092994045684;

double ln_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

double log10_binomial_tail(int n, int t) {
    if (n < 0) throw DimensionMismatch("log10_binomial_tail: negative n");
    if (t <= 0) return 0.0;
    if (t > n) return -std::numeric_limits<double>::infinity();
    // log-sum-exp over ln C(n,i) - n ln 2
    double peak = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(n - t + 1));
    for (int i = t; i <= n; ++i) {
        const double v = ln_choose(n, i) - n * std::log(2.0);
        terms.push_back(v);
        peak = std::max(peak, v);
    }
    double acc = 0.0;
    for (double v : terms) acc += std::exp(v - peak);
    const double log10_p = (peak + std::log(acc)) / kLn10;
    return std::min(log10_p, 0.0);
}

double log10_normal_tail(double z) {
    if (z < 35.0) {
        return std::log10(0.5 * std::erfc(z / std::sqrt(2.0)));
    }
    // asymptotic tail: Q(z) ~ phi(z)/z * (1 - 1/z^2 + 3/z^4)
    const double ln_phi = -0.5 * z * z - 0.5 * std::log(2.0 * std::acos(-1.0));
    const double corr = std::log1p(-1.0 / (z * z) + 3.0 / (z * z * z * z));
    return (ln_phi - std::log(z) + corr) / kLn10;
}

SignTestResult sign_test_details(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw DimensionMismatch("sign_test: sample sizes differ");
    if (a.empty()) throw DimensionMismatch("sign_test: empty samples");
    SignTestResult res;
    res.n = static_cast<int>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) res.wins += 1;
    res.log10_p = log10_binomial_tail(res.n, res.wins);
    return res;
}

double sign_test(const std::vector<double>& a, const std::vector<double>& b) {
    return sign_test_details(a, b).log10_p;
}

WilcoxonResult wilcoxon_details(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw DimensionMismatch("wilcoxon: sample sizes differ");
    if (a.empty()) throw DimensionMismatch("wilcoxon: empty samples");

    std::vector<double> diff;
    diff.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diff.push_back(d);
    }
    if (diff.empty()) throw AllTies("wilcoxon: every pair is tied");

    const int n = static_cast<int>(diff.size());
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        return std::abs(diff[static_cast<std::size_t>(i)]) <
               std::abs(diff[static_cast<std::size_t>(j)]);
    });

    // average ranks over runs of equal magnitudes
    std::vector<double> rank(static_cast<std::size_t>(n), 0.0);
    int pos = 0;
    while (pos < n) {
        int end = pos;
        const double mag = std::abs(diff[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])]);
        while (end < n &&
               std::abs(diff[static_cast<std::size_t>(order[static_cast<std::size_t>(end)])]) == mag)
            ++end;
        const double avg = 0.5 * static_cast<double>(pos + 1 + end);  // mean of ranks pos+1..end
        for (int i = pos; i < end; ++i) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = avg;
        pos = end;
    }

    WilcoxonResult res;
    res.n_reduced = n;
    for (int i = 0; i < n; ++i)
        res.t_w += diff[static_cast<std::size_t>(i)] > 0.0 ? rank[static_cast<std::size_t>(i)]
                                                           : -rank[static_cast<std::size_t>(i)];
    res.sigma = std::sqrt(static_cast<double>(n) * (n + 1.0) * (2.0 * n + 1.0) / 6.0);

    if (n < 20) {
        res.exact = true;
        // doubled ranks are integers even with ties; count sign patterns whose
        // positive-rank sum reaches the observed statistic
        std::vector<long> r2(static_cast<std::size_t>(n));
        long total2 = 0;
        for (int i = 0; i < n; ++i) {
            r2[static_cast<std::size_t>(i)] = std::lround(2.0 * rank[static_cast<std::size_t>(i)]);
            total2 += r2[static_cast<std::size_t>(i)];
        }
        const long t2 = std::lround(2.0 * res.t_w);
        const long need = (t2 + total2) / 2;  // t2 and total2 share parity
        std::vector<double> ways(static_cast<std::size_t>(total2 + 1), 0.0);
        ways[0] = 1.0;
        long reach = 0;
        for (int i = 0; i < n; ++i) {
            const long r = r2[static_cast<std::size_t>(i)];
            reach += r;
            for (long w = reach; w >= r; --w)
                ways[static_cast<std::size_t>(w)] += ways[static_cast<std::size_t>(w - r)];
        }
        double favorable = 0.0;
        for (long w = std::max(need, 0L); w <= total2; ++w)
            favorable += ways[static_cast<std::size_t>(w)];
        res.log10_p = std::log10(favorable) - n * std::log10(2.0);
    } else {
        res.exact = false;
        res.log10_p = log10_normal_tail(res.t_w / res.sigma);
    }
    res.log10_p = std::min(res.log10_p, 0.0);
    return res;
}

double wilcoxon_test(const std::vector<double>& a, const std::vector<double>& b) {
    return wilcoxon_details(a, b).log10_p;
}

}  // namespace sdreg
