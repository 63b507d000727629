#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rwre {

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

struct TailOptions {
    std::optional<std::size_t> k;  // order statistics used; default floor(n^(2/3))
    double z = 3.0;                // half-width in standard errors
    double bounded_cap = 20.0;     // estimates above this read as "bounded away from zero"
    std::size_t min_tail = 50;     // fewer tail points is inconclusive
};

/// Singularity at zero of a positive variable V: sup{γ : E[V^-γ] < ∞}, estimated with the Hill
/// estimator applied to 1/V. +inf is the sentinel for V bounded away from zero.
struct TailIndexEstimate {
    double estimate = 0;
    double half_width = 0;
    std::size_t k = 0;
    std::size_t n = 0;
    bool inconclusive = false;
    [[nodiscard]] bool bounded_below() const;
};

/// Zero samples are allowed and give the estimate 0 (an atom at zero).
TailIndexEstimate estimate_tail_index(std::span<const double> samples, const TailOptions& opt = {});
/// Hill estimate from log-scale values, large meaning deep in the tail (e.g. -log V).
TailIndexEstimate estimate_tail_index_from_logs(std::vector<double> logs, const TailOptions& opt = {});
/// Tail index of a positive variable at infinity, P(T > t) ~ t^-η.
TailIndexEstimate estimate_upper_tail_index(std::span<const double> samples, const TailOptions& opt = {});

/// E[V^-γ] finite (pass) iff γ <= est - hw, infinite (fail) iff γ >= est + hw.
Verdict moment_verdict(const TailIndexEstimate& est, double gamma);
/// γ read as a singularity exponent (the supremum of admissible powers): pass iff γ <= est + hw,
/// fail iff γ > est + hw.
Verdict exponent_verdict(const TailIndexEstimate& est, double gamma);

}  // namespace rwre
