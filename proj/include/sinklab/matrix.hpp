#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sinklab {

// Dense row-major matrix of doubles. All model math runs in 64-bit floats.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) return Matrix();
        Matrix m(rows.size(), rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols_) {
                throw std::invalid_argument("Matrix::from_rows: ragged rows");
            }
            for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }
    const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }
    std::span<double> row(std::size_t i) { return {row_ptr(i), cols_}; }
    std::span<const double> row(std::size_t i) const { return {row_ptr(i), cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// out = a * b, (n x k) * (k x m). ikj order so the inner loop streams rows.
inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: inner dimensions disagree (" +
                                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + ")");
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* out_row = out.row_ptr(i);
        for (std::size_t l = 0; l < a.cols(); ++l) {
            const double s = a(i, l);
            if (s == 0.0) continue;
            const double* b_row = b.row_ptr(l);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out_row[j] += s * b_row[j];
            }
        }
    }
    return out;
}

inline void add_inplace(Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("add_inplace: shape mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] += b.data()[i];
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double l2_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double rms(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("rms: empty vector");
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace sinklab
