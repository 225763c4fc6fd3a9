#pragma once

#include <vector>

namespace sdreg {

// log10 of the upper binomial tail sum_{i>=t} C(n,i) / 2^n, evaluated in
// log space so large n cannot underflow.
double log10_binomial_tail(int n, int t);

// log10 of the standard normal upper tail P(Z >= z), safe for large z.
double log10_normal_tail(double z);

struct SignTestResult {
    int n = 0;     // all pairs, ties included
    int wins = 0;  // strict a > b
    double log10_p = 0.0;
};

// One-sided sign test for "a tends to exceed b".
SignTestResult sign_test_details(const std::vector<double>& a, const std::vector<double>& b);
double sign_test(const std::vector<double>& a, const std::vector<double>& b);

struct WilcoxonResult {
    int n_reduced = 0;   // pairs left after dropping zero differences
    double t_w = 0.0;    // signed rank sum
    double sigma = 0.0;  // null standard deviation of t_w
    bool exact = false;  // exact distribution (small n) vs normal tail
    double log10_p = 0.0;
};

// One-sided Wilcoxon signed-rank test for "a tends to exceed b".  Zero
// differences are dropped; tied magnitudes share their average rank.
// Throws AllTies when no nonzero difference remains.
WilcoxonResult wilcoxon_details(const std::vector<double>& a, const std::vector<double>& b);
double wilcoxon_test(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace sdreg
