#include "rwre/tail.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rwre {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

bool TailIndexEstimate::bounded_below() const { return std::isinf(estimate) && !inconclusive; }

namespace {

/// Hill estimator on the largest order statistics of log-values.
TailIndexEstimate hill(std::vector<double> logs, const TailOptions& opt) {
    TailIndexEstimate r;
    r.n = logs.size();
    const auto default_k = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(r.n), 2.0 / 3.0)));
    r.k = std::min(opt.k.value_or(default_k), r.n > 0 ? r.n - 1 : 0);
    if (r.k < opt.min_tail) {
        r.inconclusive = true;
        r.estimate = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    std::nth_element(logs.begin(), logs.begin() + static_cast<std::ptrdiff_t>(r.k), logs.end(), std::greater<>());
    const double threshold = logs[r.k];
    double sum = 0;
    for (std::size_t i = 0; i < r.k; ++i) sum += logs[i] - threshold;
    const double mean = sum / static_cast<double>(r.k);
    if (std::isinf(threshold) || std::isinf(mean)) {
        r.estimate = 0;  // atom at zero: no negative moment is finite
        return r;
    }
    const double est = mean > 0.0 ? 1.0 / mean : std::numeric_limits<double>::infinity();
    if (est > opt.bounded_cap) {
        r.estimate = std::numeric_limits<double>::infinity();
        r.half_width = 0;
        return r;
    }
    r.estimate = est;
    r.half_width = opt.z * est / std::sqrt(static_cast<double>(r.k));
    return r;
}

}  // namespace

TailIndexEstimate estimate_tail_index(std::span<const double> samples, const TailOptions& opt) {
    std::vector<double> logs;
    logs.reserve(samples.size());
    for (double v : samples) {
        if (!(v >= 0.0)) throw std::invalid_argument("tail index needs non-negative samples");
        logs.push_back(v > 0.0 ? -std::log(v) : std::numeric_limits<double>::infinity());
    }
    return hill(std::move(logs), opt);
}

TailIndexEstimate estimate_tail_index_from_logs(std::vector<double> logs, const TailOptions& opt) {
    return hill(std::move(logs), opt);
}

TailIndexEstimate estimate_upper_tail_index(std::span<const double> samples, const TailOptions& opt) {
    std::vector<double> logs;
    logs.reserve(samples.size());
    for (double v : samples) {
        if (!(v > 0.0)) throw std::invalid_argument("tail index needs positive samples");
        logs.push_back(std::log(v));
    }
    return hill(std::move(logs), opt);
}

Verdict moment_verdict(const TailIndexEstimate& est, double gamma) {
    if (est.inconclusive) return Verdict::inconclusive;
    if (std::isinf(est.estimate)) return Verdict::pass;
    if (gamma <= est.estimate - est.half_width) return Verdict::pass;
    if (gamma >= est.estimate + est.half_width) return Verdict::fail;
    return Verdict::inconclusive;
}

Verdict exponent_verdict(const TailIndexEstimate& est, double gamma) {
    if (est.inconclusive) return Verdict::inconclusive;
    if (std::isinf(est.estimate)) return Verdict::pass;
    return gamma <= est.estimate + est.half_width ? Verdict::pass : Verdict::fail;
}

}  // namespace rwre
