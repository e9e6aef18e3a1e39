#include "scatter/stats.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "scatter/errors.hpp"
#include "scatter/harness.hpp"

namespace scatter::stats {

PairedSample PairedSample::make(std::vector<double> x, std::vector<double> y) {
    if (x.size() != y.size()) throw LengthMismatch(x.size(), y.size());
    if (x.size() < 2) throw TooFewPairs(x.size());
    return {std::move(x), std::move(y)};
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
    double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

// Modified Lentz evaluation of the textbook continued fraction for I_x(a,b).
static double incomplete_beta_cf(double x, double a, double b) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    constexpr int max_terms = 200000;

    auto numer = [x, a, b](int n) {
        if (n % 2 == 0) {
            double m = n / 2;
            return m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
        }
        double m = (n - 1) / 2;
        return -(a + m) * (a + b + m) * x / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
    };

    double ret = 1.0; // denom(0)
    double c = ret;
    double d = 0.0;
    for (int n = 1; n < max_terms; ++n) {
        d = 1.0 + numer(n) * d;
        if (d == 0.0) d = tiny;
        c = 1.0 + numer(n) / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        double mult = c * d;
        ret *= mult;
        if (std::fabs(mult - 1.0) <= eps) break;
    }
    return ret;
}

static double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double regularized_incomplete_beta(double x, double a, double b) {
    if (!(x >= 0.0 && x <= 1.0 && a > 0.0 && b > 0.0)) return NAN;
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    // Use the symmetry relation on the slow-converging side of the split point.
    if (x <= (a + 1.0) / (a + b + 2.0)) {
        return front / (a * incomplete_beta_cf(x, a, b));
    }
    return 1.0 - front / (b * incomplete_beta_cf(1.0 - x, b, a));
}

double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) return NAN;
    double tail = regularized_incomplete_beta(df / (t * t + df), df / 2.0, 0.5) / 2.0;
    return t >= 0.0 ? 1.0 - tail : tail;
}

double two_tailed_p(double t, double df) {
    double p = 2.0 * (1.0 - student_t_cdf(std::fabs(t), df));
    return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

static std::vector<double> diffs(const PairedSample& s) {
    std::vector<double> d(s.n());
    for (std::size_t i = 0; i < s.n(); ++i) d[i] = s.y[i] - s.x[i];
    return d;
}

PairedTestResult paired_t_test(const PairedSample& sample) {
    auto d = diffs(sample);
    double var_d = sample_variance(d);
    if (var_d == 0.0) throw ZeroVariance("paired differences");

    PairedTestResult r;
    r.mean_x = mean(sample.x);
    r.mean_y = mean(sample.y);
    r.mean_diff = mean(d);
    r.df = static_cast<int>(sample.n()) - 1;
    r.t = r.mean_diff / (std::sqrt(var_d) / std::sqrt(static_cast<double>(sample.n())));
    r.p = two_tailed_p(r.t, static_cast<double>(r.df));
    return r;
}

EffectSizes cohens_d(const PairedSample& sample) {
    auto d = diffs(sample);
    double sd_d = std::sqrt(sample_variance(d));
    if (sd_d == 0.0) throw ZeroVariance("paired differences");
    double pooled = std::sqrt((sample_variance(sample.x) + sample_variance(sample.y)) / 2.0);
    if (pooled == 0.0) throw ZeroVariance("pooled sample");

    EffectSizes e;
    e.d_z = mean(d) / sd_d;
    e.d_pooled = mean(d) / pooled;
    return e;
}

std::string effect_label(double d) {
    double m = std::fabs(d);
    if (m < 0.2) return "negligible";
    if (m < 0.5) return "small";
    if (m < 0.8) return "medium";
    return "large";
}

static std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

static std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2e", v);
    return buf;
}

static std::string p_string(double p) {
    return p < 1e-3 ? sci(p) : fixed(p, 4);
}

static MetricAnalysis analyze_metric(const std::string& name, std::vector<double> x,
                                     std::vector<double> y) {
    MetricAnalysis m;
    m.metric = name;
    m.mean_a = mean(x);
    m.mean_b = mean(y);
    auto sample = PairedSample::make(std::move(x), std::move(y));
    try {
        m.test = paired_t_test(sample);
        m.effect = cohens_d(sample);
    } catch (const ZeroVariance& e) {
        m.note = std::string("zero variance; no significance claimed (") + e.what() + ")";
    }
    return m;
}

SignificanceReport summarize(const ExperimentTable& table) {
    if (table.rows.size() < 2) throw TooFewPairs(table.rows.size());

    std::vector<double> items_a, items_b, stages_a, stages_b;
    for (const auto& row : table.rows) {
        items_a.push_back(row.a.metrics.items_count);
        items_b.push_back(row.b.metrics.items_count);
        stages_a.push_back(row.a.metrics.stages_covered);
        stages_b.push_back(row.b.metrics.stages_covered);
    }

    SignificanceReport rep;
    rep.rounds = table.rows.size();
    rep.items = analyze_metric("items", std::move(items_a), std::move(items_b));
    rep.stages = analyze_metric("stages", std::move(stages_a), std::move(stages_b));
    return rep;
}

static void metric_section(std::ostringstream& out, const MetricAnalysis& m) {
    out << "### Metric: " << m.metric << "\n\n";
    out << "- mean A = " << fixed(m.mean_a, 2) << ", mean B = " << fixed(m.mean_b, 2) << "\n";
    if (m.test) {
        out << "- paired two-tailed t-test: t = " << fixed(m.test->t, 4) << ", df = " << m.test->df
            << ", p = " << p_string(m.test->p) << "\n";
        out << "- mean difference (B - A) = " << fixed(m.test->mean_diff, 4) << "\n";
    }
    if (m.effect) {
        out << "- Cohen's d_z = " << fixed(m.effect->d_z, 4) << " (" << effect_label(m.effect->d_z)
            << "), d_pooled = " << fixed(m.effect->d_pooled, 4) << " ("
            << effect_label(m.effect->d_pooled) << ")\n";
    }
    if (!m.note.empty()) out << "- " << m.note << "\n";
    out << "\n";
}

std::string SignificanceReport::to_markdown() const {
    std::ostringstream out;
    out << "# Significance report\n\n";
    out << "Rounds analyzed: " << rounds << "\n\n";
    metric_section(out, items);
    metric_section(out, stages);

    out << "## Divergence from the published summary\n\n";
    out << "The published summary statistics do not match what the per-round data\n";
    out << "yields under the standard paired-test formulas. Both are shown; nothing\n";
    out << "is silently corrected.\n\n";
    out << "| quantity | computed from rounds | published |\n";
    out << "|---|---|---|\n";
    out << "| mean items A | " << fixed(items.mean_a, 2) << " | " << fixed(printed.mean_items_a, 2)
        << " |\n";
    out << "| mean stages A | " << fixed(stages.mean_a, 2) << " | "
        << fixed(printed.mean_stages_a, 2) << " |\n";
    out << "| mean items B | " << fixed(items.mean_b, 2) << " | " << fixed(printed.mean_items_b, 2)
        << " |\n";
    out << "| mean stages B | " << fixed(stages.mean_b, 2) << " | "
        << fixed(printed.mean_stages_b, 2) << " |\n";
    out << "| p (items) | " << (items.test ? p_string(items.test->p) : "n/a") << " | "
        << fixed(printed.p_items, 3) << " |\n";
    out << "| p (stages) | " << (stages.test ? p_string(stages.test->p) : "n/a") << " | "
        << sci(printed.p_stages) << " |\n";
    out << "| d (items) | " << (items.effect ? fixed(items.effect->d_z, 2) : "n/a") << " (d_z) | "
        << fixed(printed.d_items, 2) << " |\n";
    out << "| d (stages) | " << (stages.effect ? fixed(stages.effect->d_z, 2) : "n/a")
        << " (d_z) | " << fixed(printed.d_stages, 2) << " |\n";
    return out.str();
}

static void csv_row(std::ostringstream& out, const MetricAnalysis& m) {
    out << m.metric << "," << fixed(m.mean_a, 6) << "," << fixed(m.mean_b, 6) << ",";
    if (m.test) {
        out << fixed(m.test->t, 6) << "," << m.test->df << "," << sci(m.test->p) << ",";
    } else {
        out << "na,na,na,";
    }
    if (m.effect) {
        out << fixed(m.effect->d_z, 6) << "," << fixed(m.effect->d_pooled, 6);
    } else {
        out << "na,na";
    }
    out << "\n";
}

std::string SignificanceReport::to_csv() const {
    std::ostringstream out;
    out << "metric,mean_A,mean_B,t,df,p,d_z,d_pooled\n";
    csv_row(out, items);
    csv_row(out, stages);
    return out.str();
}

} // namespace scatter::stats
