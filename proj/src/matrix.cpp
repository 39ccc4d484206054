#include "jamdet/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jamdet/errors.hpp"

namespace jamdet {

namespace {

void check_dim(std::size_t dim) {
    if (dim == 0 || dim > kMaxDim) {
        throw InvalidArgumentError("dimension must be in [1, " + std::to_string(kMaxDim) + "], got " +
                                   std::to_string(dim));
    }
}

}  // namespace

Vec::Vec(std::size_t dim) : dim_(dim) { check_dim(dim); }

Vec::Vec(std::initializer_list<double> values) : dim_(values.size()) {
    check_dim(dim_);
    std::copy(values.begin(), values.end(), data_.begin());
}

Vec Vec::from(std::span<const double> values) {
    Vec v(values.size());
    std::copy(values.begin(), values.end(), v.data_.begin());
    return v;
}

Vec& Vec::operator+=(const Vec& other) noexcept {
    for (std::size_t i = 0; i < dim_; ++i) data_[i] += other.data_[i];
    return *this;
}

Vec& Vec::operator-=(const Vec& other) noexcept {
    for (std::size_t i = 0; i < dim_; ++i) data_[i] -= other.data_[i];
    return *this;
}

Vec& Vec::operator*=(double s) noexcept {
    for (std::size_t i = 0; i < dim_; ++i) data_[i] *= s;
    return *this;
}

bool operator==(const Vec& a, const Vec& b) noexcept {
    return a.dim_ == b.dim_ && std::equal(a.data_.begin(), a.data_.begin() + a.dim_, b.data_.begin());
}

SymmetricMatrix::SymmetricMatrix(std::size_t dim) : dim_(dim) { check_dim(dim); }

SymmetricMatrix SymmetricMatrix::identity(std::size_t dim) {
    SymmetricMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m.set(i, i, 1.0);
    return m;
}

SymmetricMatrix SymmetricMatrix::diagonal(std::span<const double> diag) {
    SymmetricMatrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m.set(i, i, diag[i]);
    return m;
}

SymmetricMatrix SymmetricMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t n = rows.size();
    std::array<double, kMaxDim * kMaxDim> dense{};
    check_dim(n);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != n) throw InvalidArgumentError("matrix rows must all have length " + std::to_string(n));
        std::copy(row.begin(), row.end(), dense.begin() + static_cast<std::ptrdiff_t>(i * n));
        ++i;
    }
    return from_dense({dense.data(), n * n}, n);
}

SymmetricMatrix SymmetricMatrix::from_dense(std::span<const double> row_major, std::size_t dim) {
    if (row_major.size() != dim * dim) throw InvalidArgumentError("dense matrix has wrong number of entries");
    SymmetricMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = i; j < dim; ++j) {
            const double a = row_major[i * dim + j];
            const double b = row_major[j * dim + i];
            if (std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)})) {
                throw InvalidArgumentError("matrix is not symmetric");
            }
            m.set(i, j, a);
        }
    }
    return m;
}

SymmetricMatrix SymmetricMatrix::outer(const Vec& v) {
    SymmetricMatrix m(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = i; j < v.size(); ++j) m.set(i, j, v[i] * v[j]);
    }
    return m;
}

double SymmetricMatrix::trace() const noexcept {
    double t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double SymmetricMatrix::max_abs() const noexcept {
    double m = 0.0;
    for (double x : packed()) m = std::max(m, std::abs(x));
    return m;
}

bool SymmetricMatrix::is_finite() const noexcept {
    return std::all_of(packed().begin(), packed().end(), [](double x) { return std::isfinite(x); });
}

SymmetricMatrix& SymmetricMatrix::operator+=(const SymmetricMatrix& other) noexcept {
    for (std::size_t i = 0; i < packed_size(dim_); ++i) packed_[i] += other.packed_[i];
    return *this;
}

SymmetricMatrix& SymmetricMatrix::operator-=(const SymmetricMatrix& other) noexcept {
    for (std::size_t i = 0; i < packed_size(dim_); ++i) packed_[i] -= other.packed_[i];
    return *this;
}

SymmetricMatrix& SymmetricMatrix::operator*=(double s) noexcept {
    for (std::size_t i = 0; i < packed_size(dim_); ++i) packed_[i] *= s;
    return *this;
}

bool operator==(const SymmetricMatrix& a, const SymmetricMatrix& b) noexcept {
    return a.dim_ == b.dim_ && std::equal(a.packed().begin(), a.packed().end(), b.packed().begin());
}

struct LdlAccess {
    static LdlFactor make(std::size_t dim) {
        LdlFactor f;
        f.dim_ = dim;
        return f;
    }
    static double& lower(LdlFactor& f, std::size_t i, std::size_t j) { return f.lower_[i * kMaxDim + j]; }
    static double& pivot(LdlFactor& f, std::size_t i) { return f.d_[i]; }
};

double LdlFactor::logdet() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) s += std::log(d_[i]);
    return s;
}

Vec LdlFactor::solve(const Vec& b) const noexcept {
    Vec y = b;
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t k = 0; k < i; ++k) y[i] -= lower_[i * kMaxDim + k] * y[k];
    }
    for (std::size_t i = 0; i < dim_; ++i) y[i] /= d_[i];
    for (std::size_t i = dim_; i-- > 0;) {
        for (std::size_t k = i + 1; k < dim_; ++k) y[i] -= lower_[k * kMaxDim + i] * y[k];
    }
    return y;
}

LdlResult ldl_factor(const SymmetricMatrix& m, double rel_tol) noexcept {
    const std::size_t n = m.dim();
    LdlResult result;
    const double trace = m.trace();
    if (!(trace > 0.0) || !std::isfinite(trace)) {
        result.failed_pivot = 0;
        result.failed_value = n > 0 ? m(0, 0) : 0.0;
        return result;
    }
    const double tol = rel_tol * trace / static_cast<double>(n);

    LdlFactor f = LdlAccess::make(n);
    for (std::size_t j = 0; j < n; ++j) {
        double dj = m(j, j);
        for (std::size_t k = 0; k < j; ++k) {
            const double ljk = LdlAccess::lower(f, j, k);
            dj -= ljk * ljk * LdlAccess::pivot(f, k);
        }
        if (!(dj > tol)) {
            result.failed_pivot = j;
            result.failed_value = dj;
            return result;
        }
        LdlAccess::pivot(f, j) = dj;
        LdlAccess::lower(f, j, j) = 1.0;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = m(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                v -= LdlAccess::lower(f, i, k) * LdlAccess::lower(f, j, k) * LdlAccess::pivot(f, k);
            }
            LdlAccess::lower(f, i, j) = v / dj;
        }
    }
    result.factor = f;
    return result;
}

double logdet_pd(const SymmetricMatrix& m, double rel_tol) {
    auto r = ldl_factor(m, rel_tol);
    if (!r.factor) throw SingularMatrixError(r.failed_pivot, r.failed_value);
    return r.factor->logdet();
}

std::optional<double> try_logdet_pd(const SymmetricMatrix& m, double rel_tol) noexcept {
    auto r = ldl_factor(m, rel_tol);
    if (!r.factor) return std::nullopt;
    return r.factor->logdet();
}

}  // namespace jamdet
