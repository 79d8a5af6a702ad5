#pragma once

// Exact integer matrices and Smith normal form.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace dunce {

using BigInt = boost::multiprecision::cpp_int;

class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    IntMatrix(std::initializer_list<std::initializer_list<long>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        for (auto& row : init)
            for (long v : row) data_.emplace_back(v);
    }

    static IntMatrix identity(std::size_t n) {
        IntMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    BigInt& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const BigInt& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    bool is_zero() const {
        for (const auto& v : data_)
            if (v != 0) return false;
        return true;
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
    }
    void swap_cols(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, a), (*this)(r, b));
    }
    /// row[dst] += k * row[src]
    void add_row(std::size_t dst, std::size_t src, const BigInt& k) {
        for (std::size_t c = 0; c < cols_; ++c) (*this)(dst, c) += k * (*this)(src, c);
    }
    /// col[dst] += k * col[src]
    void add_col(std::size_t dst, std::size_t src, const BigInt& k) {
        for (std::size_t r = 0; r < rows_; ++r) (*this)(r, dst) += k * (*this)(r, src);
    }
    void negate_row(std::size_t r) {
        for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) = -(*this)(r, c);
    }

    bool operator==(const IntMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<BigInt> data_;
};

inline IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    IntMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (a(i, k) == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
        }
    return out;
}

struct SmithForm {
    IntMatrix diagonal; // D
    IntMatrix left;     // U, unimodular
    IntMatrix right;    // V, unimodular
    /// Nonzero diagonal entries, each dividing the next.
    std::vector<BigInt> invariant_factors;
    std::size_t rank() const { return invariant_factors.size(); }
};

/// U * M * V = D with D diagonal, d_i | d_{i+1}, d_i >= 0.
inline SmithForm smith_normal_form(const IntMatrix& m) {
    IntMatrix d = m;
    IntMatrix u = IntMatrix::identity(m.rows());
    IntMatrix v = IntMatrix::identity(m.cols());
    const std::size_t limit = std::min(m.rows(), m.cols());
    std::size_t t = 0;
    for (; t < limit; ++t) {
        for (;;) {
            // smallest nonzero |entry| in the trailing block goes to (t, t)
            std::size_t pr = 0, pc = 0;
            bool found = false;
            BigInt best;
            for (std::size_t r = t; r < d.rows(); ++r)
                for (std::size_t c = t; c < d.cols(); ++c)
                    if (d(r, c) != 0 && (!found || abs(d(r, c)) < best)) {
                        best = abs(d(r, c));
                        pr = r;
                        pc = c;
                        found = true;
                    }
            if (!found) goto done;
            d.swap_rows(t, pr);
            u.swap_rows(t, pr);
            d.swap_cols(t, pc);
            v.swap_cols(t, pc);

            bool clean = true;
            for (std::size_t r = t + 1; r < d.rows(); ++r) {
                if (d(r, t) == 0) continue;
                BigInt q = d(r, t) / d(t, t);
                d.add_row(r, t, -q);
                u.add_row(r, t, -q);
                if (d(r, t) != 0) clean = false;
            }
            for (std::size_t c = t + 1; c < d.cols(); ++c) {
                if (d(t, c) == 0) continue;
                BigInt q = d(t, c) / d(t, t);
                d.add_col(c, t, -q);
                v.add_col(c, t, -q);
                if (d(t, c) != 0) clean = false;
            }
            if (!clean) continue;
            // pivot must divide the whole trailing block
            bool divides = true;
            for (std::size_t r = t + 1; r < d.rows() && divides; ++r)
                for (std::size_t c = t + 1; c < d.cols(); ++c)
                    if (d(r, c) % d(t, t) != 0) {
                        d.add_row(t, r, 1);
                        u.add_row(t, r, 1);
                        divides = false;
                        break;
                    }
            if (divides) break;
        }
        if (d(t, t) < 0) {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
done:
    SmithForm out{d, u, v, {}};
    for (std::size_t i = 0; i < limit; ++i)
        if (d(i, i) != 0) out.invariant_factors.push_back(d(i, i));
    return out;
}

/// Index of the sublattice spanned by the given integer vectors in Z^d, or 0
/// when they do not span a full-rank sublattice.
inline BigInt lattice_span_index(const std::vector<std::vector<long>>& vectors) {
    if (vectors.empty()) return 0;
    const std::size_t dim = vectors.front().size();
    IntMatrix m(vectors.size(), dim);
    for (std::size_t i = 0; i < vectors.size(); ++i)
        for (std::size_t j = 0; j < dim; ++j) m(i, j) = vectors[i].at(j);
    auto snf = smith_normal_form(m);
    if (snf.rank() < dim) return 0;
    BigInt index = 1;
    for (const auto& f : snf.invariant_factors) index *= f;
    return index;
}

} // namespace dunce
