#pragma once

#include <functional>
#include <string>
#include <vector>

namespace sinklab::metrics {

struct SweepPoint {
    double tau = 0.0;
    double rho = 0.0;
    double p = 0.0;
};

enum class SweepDirection { maximize, minimize };

struct SweepResult {
    struct Row {
        SweepPoint point;
        double score = 0.0;
    };
    std::vector<Row> table;  // grid order: tau, then rho, then p
    SweepPoint best;
    double best_score = 0.0;
};

using SweepEvalFn =
    std::function<double(const SweepPoint&, const std::vector<std::string>& validation_ids)>;

// Evaluates eval on every grid point over the validation ids. Score
// direction is the caller's choice; ties break toward the smaller
// (tau, rho, p) lexicographically. Eval failures rethrow with the offending
// parameters attached.
SweepResult hp_sweep(const std::vector<double>& tau_grid, const std::vector<double>& rho_grid,
                     const std::vector<double>& p_grid, const SweepEvalFn& eval,
                     const std::vector<std::string>& validation_ids,
                     SweepDirection direction = SweepDirection::maximize);

void write_sweep_csv(const SweepResult& result, const std::string& path);

}  // namespace sinklab::metrics
