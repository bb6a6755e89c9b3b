#include "sinklab/metrics/sweep.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <tuple>

namespace sinklab::metrics {

SweepResult hp_sweep(const std::vector<double>& tau_grid, const std::vector<double>& rho_grid,
                     const std::vector<double>& p_grid, const SweepEvalFn& eval,
                     const std::vector<std::string>& validation_ids, SweepDirection direction) {
    if (tau_grid.empty() || rho_grid.empty() || p_grid.empty()) {
        throw std::invalid_argument("hp_sweep: empty grid");
    }
    SweepResult result;
    bool have_best = false;
    for (double tau : tau_grid) {
        for (double rho : rho_grid) {
            for (double p : p_grid) {
                const SweepPoint point{tau, rho, p};
                double score = 0.0;
                try {
                    score = eval(point, validation_ids);
                } catch (const std::exception& e) {
                    char buf[128];
                    std::snprintf(buf, sizeof buf, "hp_sweep: eval failed at tau=%g rho=%g p=%g: ",
                                  tau, rho, p);
                    throw std::runtime_error(std::string(buf) + e.what());
                }
                result.table.push_back({point, score});
                const auto key = std::make_tuple(point.tau, point.rho, point.p);
                const auto best_key = std::make_tuple(result.best.tau, result.best.rho, result.best.p);
                const bool strictly = direction == SweepDirection::maximize ? score > result.best_score
                                                                            : score < result.best_score;
                const bool better = !have_best || strictly ||
                                    (score == result.best_score && key < best_key);
                if (better) {
                    result.best = point;
                    result.best_score = score;
                    have_best = true;
                }
            }
        }
    }
    return result;
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_sweep_csv: cannot write " + path);
    out << "tau,rho,p,score\n";
    char buf[160];
    for (const auto& row : result.table) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", row.point.tau, row.point.rho,
                      row.point.p, row.score);
        out << buf;
    }
}

}  // namespace sinklab::metrics
