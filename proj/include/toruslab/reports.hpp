#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace toruslab {

/// Observability Gramian summary. K = 1/lambda_min is the observability
/// constant of the truncated model; lambda_max <= T always (unit indicator,
/// unitary flow).
struct GramianReport {
    int dimension = 0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double K = 0.0;
    double T = 0.0;
    int cutoff = 0;
    std::string region;
    bool numerical_failure = false;  // lambda_min < -tol * lambda_max
};

/// Extremal-ratio scan record for one parameter point. The witness seed
/// replays the extremal draw bit-exactly.
struct RatioReport {
    std::string parameter;
    int trials = 0;
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
    uint64_t witness_seed = 0;
    bool skipped = false;
    std::string note;
};

/// Stationary resolvent-ratio record (one tau, one right-hand side).
struct StationaryCheck {
    double tau = 0.0;
    double ratio = 0.0;
    double solve_residual = 0.0;
    double eigenvalue_distance = 0.0;
    bool shifted = false;  // tau landed on an eigenvalue and was nudged
};

}  // namespace toruslab
