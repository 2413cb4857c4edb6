#pragma once

// Small dense matrices over either scalar lane. Everything in this library is
// desk-scale (dims <= a few dozen), so the representation is a flat vector and
// the algorithms are the naive ones.

#include "banlab/rational.hpp"

#include <algorithm>
#include <span>
#include <vector>

namespace banlab {

template <class S>
class matrix {
  public:
    matrix() = default;
    matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols, S(0)) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("matrix: negative dimension");
    }

    static matrix identity(int n) {
        matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = S(1);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    S& operator()(int r, int c) { return a_[std::size_t(r) * cols_ + c]; }
    const S& operator()(int r, int c) const { return a_[std::size_t(r) * cols_ + c]; }

    const std::vector<S>& data() const { return a_; }

    matrix transposed() const {
        matrix t(cols_, rows_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    matrix operator*(const matrix& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("matrix multiply: shape mismatch");
        matrix p(rows_, o.cols_);
        for (int r = 0; r < rows_; ++r)
            for (int k = 0; k < cols_; ++k) {
                const S& x = (*this)(r, k);
                if (x == S(0)) continue;
                for (int c = 0; c < o.cols_; ++c) p(r, c) += x * o(k, c);
            }
        return p;
    }

    matrix& operator+=(const matrix& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }

    matrix& operator-=(const matrix& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }

    matrix& operator*=(const S& c) {
        for (auto& x : a_) x *= c;
        return *this;
    }

    friend matrix operator+(matrix a, const matrix& b) { return a += b; }
    friend matrix operator-(matrix a, const matrix& b) { return a -= b; }
    friend matrix operator*(const S& c, matrix a) { return a *= c; }

    bool operator==(const matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    std::vector<S> apply(std::span<const S> v) const {
        if (int(v.size()) != cols_) throw std::invalid_argument("matrix apply: length mismatch");
        std::vector<S> out(rows_, S(0));
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c)
                if ((*this)(r, c) != S(0)) out[r] += (*this)(r, c) * v[c];
        return out;
    }

    std::vector<S> col(int c) const {
        std::vector<S> v(rows_);
        for (int r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
        return v;
    }

    S max_abs() const {
        S m(0);
        for (const auto& x : a_) m = std::max(m, abs_val(x));
        return m;
    }

    bool is_zero() const {
        return std::all_of(a_.begin(), a_.end(), [](const S& x) { return x == S(0); });
    }

  private:
    void check_same_shape(const matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("matrix op: shape mismatch");
    }

    int rows_ = 0, cols_ = 0;
    std::vector<S> a_;
};

// At most one nonzero per row and per column.
template <class S>
bool is_monomial(const matrix<S>& m) {
    std::vector<int> row_used(m.rows(), 0), col_used(m.cols(), 0);
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
            if (m(r, c) != S(0)) {
                if (row_used[r]++ || col_used[c]++) return false;
            }
    return true;
}

inline matrix<double> widened(const matrix<rational>& m) {
    matrix<double> w(m.rows(), m.cols());
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) w(r, c) = to_double(m(r, c));
    return w;
}

inline const matrix<double>& widened(const matrix<double>& m) { return m; }

template <class S>
std::vector<double> widened(const std::vector<S>& v) {
    std::vector<double> w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = to_double(v[i]);
    return w;
}

} // namespace banlab
