#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sinklab/tinylmm/attention.hpp"

using namespace sinklab;
using tinylmm::attention_weights;
using tinylmm::CausalMaskOverlay;

TEST_CASE("equal scores give uniform rows") {
    // Zero queries make every permitted score identical.
    Matrix q(2, 2);
    Matrix k(2, 2);
    k(0, 0) = 1.0;
    k(1, 1) = 1.0;
    const Matrix w = attention_weights(q, k);
    CHECK(w(0, 0) == doctest::Approx(1.0));
    CHECK(w(0, 1) == 0.0);
    CHECK(w(1, 0) == doctest::Approx(0.5));
    CHECK(w(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("hand-evaluated softmax for a 2x2 case") {
    // Row 1 scores are [1/sqrt(2), 0].
    Matrix q(2, 2);
    q(1, 0) = 1.0;
    Matrix k(2, 2);
    k(0, 0) = 1.0;
    k(1, 1) = 1.0;
    const Matrix w = attention_weights(q, k);
    const double s = 1.0 / std::sqrt(2.0);
    const double e = std::exp(s);
    CHECK(w(1, 0) == doctest::Approx(e / (e + 1.0)).epsilon(1e-12));
    CHECK(w(1, 1) == doctest::Approx(1.0 / (e + 1.0)).epsilon(1e-12));
    CHECK(w(1, 0) == doctest::Approx(0.6698).epsilon(1e-4));
    CHECK(w(1, 1) == doctest::Approx(0.3302).epsilon(1e-4));
}

TEST_CASE("overlay block forces the remaining key to take the row") {
    Matrix q(2, 2, 0.5);
    Matrix k(2, 2, 0.5);
    CausalMaskOverlay overlay;
    overlay.block_all_heads(0, 1, 0);
    const Matrix w = attention_weights(q, k, overlay, 0, 0);
    CHECK(w(1, 0) == 0.0);
    CHECK(w(1, 1) == 1.0);
}

TEST_CASE("head-specific overlay leaves other heads alone") {
    Matrix q(2, 2, 0.5);
    Matrix k(2, 2, 0.5);
    CausalMaskOverlay overlay;
    overlay.block(0, 1, 1, 0);
    const Matrix blocked = attention_weights(q, k, overlay, 0, 1);
    CHECK(blocked(1, 0) == 0.0);
    const Matrix other_head = attention_weights(q, k, overlay, 0, 0);
    CHECK(other_head(1, 0) > 0.0);
    const Matrix other_layer = attention_weights(q, k, overlay, 1, 1);
    CHECK(other_layer(1, 0) > 0.0);
}

TEST_CASE("fully blocked row is an error, not NaN") {
    Matrix q(2, 2, 1.0);
    Matrix k(2, 2, 1.0);
    CausalMaskOverlay overlay;
    overlay.block_all_heads(0, 1, 0);
    overlay.block_all_heads(0, 1, 1);
    CHECK_THROWS_AS(attention_weights(q, k, overlay, 0, 0), std::runtime_error);
}

TEST_CASE("shape mismatches are rejected") {
    CHECK_THROWS_AS(attention_weights(Matrix(2, 3), Matrix(2, 4)), std::invalid_argument);
    CHECK_THROWS_AS(attention_weights(Matrix(2, 3), Matrix(3, 3)), std::invalid_argument);
}

TEST_CASE("extreme scores stay finite thanks to row-max stabilization") {
    Matrix q(2, 1);
    q(0, 0) = 1.0;
    q(1, 0) = 1.0;
    Matrix k(2, 1);
    k(0, 0) = 5000.0;
    k(1, 0) = -5000.0;
    const Matrix w = attention_weights(q, k);
    CHECK(std::isfinite(w(1, 0)));
    CHECK(w(1, 0) == doctest::Approx(1.0));
    CHECK(w(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("fuzz: rows are stochastic, causal and zero at blocked cells") {
    Rng rng(20240811);
    for (int iter = 0; iter < 300; ++iter) {
        const int n = rng.uniform_int(1, 12);
        const int dk = rng.uniform_int(1, 6);
        Matrix q(static_cast<std::size_t>(n), static_cast<std::size_t>(dk));
        Matrix k(static_cast<std::size_t>(n), static_cast<std::size_t>(dk));
        testing::fill_gaussian(q, rng, 1.5);
        testing::fill_gaussian(k, rng, 1.5);
        CausalMaskOverlay overlay;
        for (int b = 0; b < rng.uniform_int(0, 4); ++b) {
            const int i = rng.uniform_int(1, n - 1 > 0 ? n - 1 : 1);
            const int j = rng.uniform_int(0, i - 1 >= 0 ? i - 1 : 0);
            if (i > 0 && j < i) overlay.block_all_heads(0, i, j);
        }
        Matrix w;
        try {
            w = attention_weights(q, k, overlay, 0, 0);
        } catch (const std::runtime_error&) {
            continue;  // a fully blocked row is a legal generator outcome
        }
        for (int i = 0; i < n; ++i) {
            double sum = 0.0;
            for (int j = 0; j < n; ++j) {
                const auto ii = static_cast<std::size_t>(i);
                const auto jj = static_cast<std::size_t>(j);
                if (j > i) CHECK(w(ii, jj) == 0.0);
                if (overlay.blocked(0, 0, i, j)) CHECK(w(ii, jj) == 0.0);
                CHECK(w(ii, jj) >= 0.0);
                CHECK(w(ii, jj) <= 1.0);
                sum += w(ii, jj);
            }
            CHECK(std::abs(sum - 1.0) <= 1e-6);
        }
    }
}
