#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>

namespace jamdet {

/// Largest measurement dimension handled by the fixed-capacity types below.
inline constexpr std::size_t kMaxDim = 3;

/// Default scale-relative pivot tolerance for positive-definiteness checks.
inline constexpr double kPdRelativeTolerance = 1e-10;

/// Fixed-capacity real vector of dimension 1..kMaxDim.
class Vec {
public:
    Vec() = default;
    explicit Vec(std::size_t dim);
    Vec(std::initializer_list<double> values);
    static Vec from(std::span<const double> values);

    std::size_t size() const noexcept { return dim_; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }
    double& operator[](std::size_t i) noexcept { return data_[i]; }
    std::span<const double> values() const noexcept { return {data_.data(), dim_}; }

    Vec& operator+=(const Vec& other) noexcept;
    Vec& operator-=(const Vec& other) noexcept;
    Vec& operator*=(double s) noexcept;

    friend Vec operator+(Vec a, const Vec& b) noexcept { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) noexcept { return a -= b; }
    friend Vec operator*(Vec a, double s) noexcept { return a *= s; }
    friend bool operator==(const Vec& a, const Vec& b) noexcept;

private:
    std::size_t dim_ = 0;
    std::array<double, kMaxDim> data_{};
};

/// Symmetric N x N matrix in packed upper-triangle storage (N(N+1)/2 entries).
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::size_t dim);

    static SymmetricMatrix identity(std::size_t dim);
    static SymmetricMatrix diagonal(std::span<const double> diag);
    /// Builds from full row-major rows; throws InvalidArgumentError if not symmetric.
    static SymmetricMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static SymmetricMatrix from_dense(std::span<const double> row_major, std::size_t dim);
    /// v v^T
    static SymmetricMatrix outer(const Vec& v);

    std::size_t dim() const noexcept { return dim_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return packed_[index(i, j)]; }
    void set(std::size_t i, std::size_t j, double value) noexcept { packed_[index(i, j)] = value; }
    void add(std::size_t i, std::size_t j, double value) noexcept { packed_[index(i, j)] += value; }

    std::span<const double> packed() const noexcept { return {packed_.data(), packed_size(dim_)}; }
    std::span<double> packed() noexcept { return {packed_.data(), packed_size(dim_)}; }

    double trace() const noexcept;
    double max_abs() const noexcept;
    bool is_finite() const noexcept;

    SymmetricMatrix& operator+=(const SymmetricMatrix& other) noexcept;
    SymmetricMatrix& operator-=(const SymmetricMatrix& other) noexcept;
    SymmetricMatrix& operator*=(double s) noexcept;

    friend SymmetricMatrix operator+(SymmetricMatrix a, const SymmetricMatrix& b) noexcept { return a += b; }
    friend SymmetricMatrix operator-(SymmetricMatrix a, const SymmetricMatrix& b) noexcept { return a -= b; }
    friend SymmetricMatrix operator*(SymmetricMatrix a, double s) noexcept { return a *= s; }
    friend SymmetricMatrix operator*(double s, SymmetricMatrix a) noexcept { return a *= s; }
    friend bool operator==(const SymmetricMatrix& a, const SymmetricMatrix& b) noexcept;

    static constexpr std::size_t packed_size(std::size_t dim) noexcept { return dim * (dim + 1) / 2; }

private:
    std::size_t index(std::size_t i, std::size_t j) const noexcept {
        if (i > j) {
            std::size_t t = i;
            i = j;
            j = t;
        }
        return i * dim_ - i * (i - 1) / 2 + (j - i);
    }

    std::size_t dim_ = 0;
    std::array<double, kMaxDim * (kMaxDim + 1) / 2> packed_{};
};

/// LDL^T factor of a symmetric positive-definite matrix (unit lower L, diagonal pivots d).
class LdlFactor {
public:
    std::size_t dim() const noexcept { return dim_; }
    double pivot(std::size_t i) const noexcept { return d_[i]; }
    /// Entry (i, j) of the unit lower-triangular factor, i >= j.
    double lower(std::size_t i, std::size_t j) const noexcept { return lower_[i * kMaxDim + j]; }
    double logdet() const noexcept;
    /// Solves M x = b.
    Vec solve(const Vec& b) const noexcept;

private:
    friend struct LdlAccess;
    std::size_t dim_ = 0;
    std::array<double, kMaxDim * kMaxDim> lower_{};
    std::array<double, kMaxDim> d_{};
};

struct LdlResult {
    std::optional<LdlFactor> factor;
    std::size_t failed_pivot = 0;
    double failed_value = 0.0;
};

/// Factorizes `m`; a pivot <= rel_tol * trace(m) / N marks the matrix singular.
LdlResult ldl_factor(const SymmetricMatrix& m, double rel_tol = kPdRelativeTolerance) noexcept;

/// log det(m) for positive-definite m; throws SingularMatrixError with the failing pivot index.
double logdet_pd(const SymmetricMatrix& m, double rel_tol = kPdRelativeTolerance);

/// Non-throwing variant used on hot paths.
std::optional<double> try_logdet_pd(const SymmetricMatrix& m, double rel_tol = kPdRelativeTolerance) noexcept;

}  // namespace jamdet
