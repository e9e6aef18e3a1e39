#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace scatter {

struct ExperimentTable; // harness.hpp

namespace stats {

// Paired observations: x = Method A, y = Method B, aligned by round.
struct PairedSample {
    std::vector<double> x;
    std::vector<double> y;

    // Throws LengthMismatch / TooFewPairs.
    static PairedSample make(std::vector<double> x, std::vector<double> y);
    std::size_t n() const { return x.size(); }
};

struct PairedTestResult {
    double t = 0.0;
    int df = 0;
    double p = 1.0; // two-tailed
    double mean_x = 0.0;
    double mean_y = 0.0;
    double mean_diff = 0.0; // mean(y - x); sign(t) == sign(mean_diff)
};

struct EffectSizes {
    double d_z = 0.0;      // mean_diff / sd(diff)
    double d_pooled = 0.0; // mean_diff / sqrt((var_x + var_y) / 2)
};

double mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v); // n-1 denominator

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
// https://en.wikipedia.org/wiki/Beta_function#Incomplete_beta_function
double regularized_incomplete_beta(double x, double a, double b);

// Student t CDF with df degrees of freedom, accurate to ~1e-9 over the
// reporting range (|t| <= 50, df 1..40).
double student_t_cdf(double t, double df);

// Two-tailed p for observed statistic t at df degrees of freedom.
double two_tailed_p(double t, double df);

// Paired two-tailed t-test on y - x. Throws ZeroVariance when all diffs equal.
PairedTestResult paired_t_test(const PairedSample& sample);

// Throws ZeroVariance when sd(diff) or the pooled sd is zero.
EffectSizes cohens_d(const PairedSample& sample);

// Conventional magnitude bands: small / medium / large at 0.2 / 0.5 / 0.8.
std::string effect_label(double d);

// One analyzed metric. When the diffs are degenerate the test and effect
// slots stay empty and `note` explains why no significance is claimed.
struct MetricAnalysis {
    std::string metric; // "items" or "stages"
    double mean_a = 0.0;
    double mean_b = 0.0;
    std::optional<PairedTestResult> test;
    std::optional<EffectSizes> effect;
    std::string note;
};

// Reference values as printed in the source report, kept verbatim for the
// divergence section. They do not match what the per-round data yields
// under the standard formulas, so the report shows both side by side.
struct PrintedReference {
    double mean_items_a = 5.85;
    double mean_stages_a = 1.95;
    double mean_items_b = 6.35;
    double mean_stages_b = 4.20;
    double p_items = 0.043;
    double p_stages = 2.34e-6;
    double d_items = 0.42;
    double d_stages = 1.95;
};

struct SignificanceReport {
    std::size_t rounds = 0;
    MetricAnalysis items;
    MetricAnalysis stages;
    PrintedReference printed;

    std::string to_markdown() const;
    // CSV of (metric, mean_A, mean_B, t, df, p, d_z, d_pooled).
    std::string to_csv() const;
};

// Requires >= 2 rounds (TooFewPairs otherwise).
SignificanceReport summarize(const ExperimentTable& table);

} // namespace stats
} // namespace scatter
