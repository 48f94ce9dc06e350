#pragma once
// Two-sample t-tests (Student and Welch) from raw samples or summary
// statistics, with two-sided p-values from the Student t distribution.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "framesim/error.hpp"

namespace framesim::stats {

struct SummaryStats {
    double mean = 0.0;
    double stdev = 0.0;  // sample standard deviation, n - 1 denominator
    std::size_t n = 0;

    void check() const {
        if (n < 2) throw InvalidArgument("summary statistics need n >= 2");
        if (!(stdev >= 0.0)) throw InvalidArgument("standard deviation must be non-negative");
        if (!std::isfinite(mean)) throw InvalidArgument("mean must be finite");
    }
};

enum class TestKind { student, welch };

inline std::string_view to_string(TestKind k) { return k == TestKind::student ? "student" : "welch"; }

inline std::optional<TestKind> parse_test_kind(std::string_view s) {
    if (s == "student") return TestKind::student;
    if (s == "welch") return TestKind::welch;
    return std::nullopt;
}

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p_two_sided = 1.0;
    TestKind kind = TestKind::welch;
};

inline SummaryStats summarize(std::span<const double> sample) {
    if (sample.size() < 2) throw InvalidArgument("summarize: need at least two values");
    double sum = 0.0;
    for (double x : sample) sum += x;
    const double mean = sum / static_cast<double>(sample.size());
    double ss = 0.0;
    for (double x : sample) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(sample.size() - 1)), sample.size()};
}

namespace detail {

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-16;
    constexpr int kMaxIter = 100000;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw Error("incomplete beta continued fraction did not converge");
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b). Takes x and 1 - x separately so that
// callers can pass an accurately computed complement.
inline double incomplete_beta(double a, double b, double x, double one_minus_x) {
    if (!(a > 0.0 && b > 0.0)) throw InvalidArgument("incomplete_beta: a and b must be positive");
    if (x <= 0.0) return 0.0;
    if (one_minus_x <= 0.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                             b * std::log(one_minus_x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * detail::beta_continued_fraction(b, a, one_minus_x) / b;
}

inline double incomplete_beta(double a, double b, double x) { return incomplete_beta(a, b, x, 1.0 - x); }

// P(T > |t|) * 2 for T ~ t(df).
inline double student_t_two_sided(double t, double df) {
    if (!(df > 0.0)) throw InvalidArgument("degrees of freedom must be positive");
    if (std::isnan(t)) throw InvalidArgument("t is NaN");
    if (std::isinf(t)) return 0.0;
    const double t2 = t * t;
    return incomplete_beta(df / 2.0, 0.5, df / (df + t2), t2 / (df + t2));
}

inline double student_t_cdf(double t, double df) {
    const double tail = 0.5 * student_t_two_sided(t, df);
    return t > 0.0 ? 1.0 - tail : tail;
}

inline TTestResult t_test(const SummaryStats& a, const SummaryStats& b, TestKind kind) {
    a.check();
    b.check();
    if (a.stdev == 0.0 && b.stdev == 0.0) throw InvalidArgument("t-test undefined: both samples have zero variance");
    const double n1 = static_cast<double>(a.n), n2 = static_cast<double>(b.n);
    const double v1 = a.stdev * a.stdev, v2 = b.stdev * b.stdev;

    TTestResult r;
    r.kind = kind;
    double se = 0.0;
    if (kind == TestKind::student) {
        const double pooled = ((n1 - 1.0) * v1 + (n2 - 1.0) * v2) / (n1 + n2 - 2.0);
        se = std::sqrt(pooled * (1.0 / n1 + 1.0 / n2));
        r.df = n1 + n2 - 2.0;
    } else {
        const double q1 = v1 / n1, q2 = v2 / n2;
        const double se2 = q1 + q2;
        se = std::sqrt(se2);
        r.df = se2 * se2 / (q1 * q1 / (n1 - 1.0) + q2 * q2 / (n2 - 1.0));
        // Mathematically within these bounds; clamp away rounding at the edges.
        r.df = std::clamp(r.df, std::min(n1, n2) - 1.0, n1 + n2 - 2.0);
    }
    r.t = (a.mean - b.mean) / se;
    r.p_two_sided = student_t_two_sided(r.t, r.df);
    return r;
}

inline TTestResult t_test_raw(std::span<const double> a, std::span<const double> b, TestKind kind) {
    return t_test(summarize(a), summarize(b), kind);
}

}  // namespace framesim::stats
