#include "sinklab/tinylmm/attention.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sinklab::tinylmm {

Matrix attention_weights(const Matrix& q, const Matrix& k, const CausalMaskOverlay& overlay,
                         int layer, int head) {
    if (q.cols() != k.cols()) {
        throw std::invalid_argument("attention_weights: Q and K head dims differ");
    }
    if (q.rows() != k.rows()) {
        throw std::invalid_argument("attention_weights: Q and K sequence lengths differ");
    }
    if (q.cols() == 0) throw std::invalid_argument("attention_weights: head dim must be >= 1");

    const std::size_t n = q.rows();
    const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(q.cols()));
    Matrix weights(n, n);
    std::vector<double> scores(n);

    for (std::size_t i = 0; i < n; ++i) {
        double max_score = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j <= i; ++j) {
            if (overlay.blocked(layer, head, static_cast<int>(i), static_cast<int>(j))) {
                scores[j] = -std::numeric_limits<double>::infinity();
                continue;
            }
            scores[j] = dot(q.row(i), k.row(j)) * inv_sqrt_dk;
            if (scores[j] > max_score) max_score = scores[j];
        }
        if (!std::isfinite(max_score)) {
            throw std::runtime_error("attention_weights: every permitted key for query " +
                                     std::to_string(i) + " is blocked");
        }
        double sum = 0.0;
        double* out = weights.row_ptr(i);
        for (std::size_t j = 0; j <= i; ++j) {
            if (std::isfinite(scores[j])) {
                out[j] = std::exp(scores[j] - max_score);
                sum += out[j];
            }
            // Blocked entries stay exactly 0.
        }
        for (std::size_t j = 0; j <= i; ++j) {
            if (out[j] != 0.0) out[j] /= sum;
        }
    }
    return weights;
}

Matrix attention_weights(const Matrix& q, const Matrix& k) {
    return attention_weights(q, k, CausalMaskOverlay{}, 0, 0);
}

}  // namespace sinklab::tinylmm
