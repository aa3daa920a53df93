#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace dirac_spectra {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Errors. Every domain failure derives from Error so callers (the CLI in
// particular) can map the whole family to one exit code.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error {
    using Error::Error;
};
struct NoSolitaryWave : Error {
    using Error::Error;
};
struct NegativeRadicand : Error {
    using Error::Error;
};
struct DegenerateDirection : Error {
    using Error::Error;
};
struct StepUnderflow : Error {
    using Error::Error;
};
struct NonConvergence : Error {
    using Error::Error;
};
struct NoConvergence : Error {
    using Error::Error;
};
struct NoCrossing : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Small fixed-size linear algebra. The systems here are 2x2, 4x4 and 6x6, so
// plain arrays beat a general matrix library on both speed and readability.

template <typename T, std::size_t N>
using Vec = std::array<T, N>;

template <typename T, std::size_t N>
using Mat = std::array<std::array<T, N>, N>;

inline double abs_value(double x) { return std::abs(x); }
inline double abs_value(const cplx& z) { return std::abs(z); }

template <typename T, std::size_t N>
Vec<T, N> operator*(const Mat<T, N>& a, const Vec<T, N>& x) {
    Vec<T, N> y{};
    for (std::size_t i = 0; i < N; ++i) {
        T s{};
        for (std::size_t j = 0; j < N; ++j) s += a[i][j] * x[j];
        y[i] = s;
    }
    return y;
}

template <typename T, std::size_t N>
Vec<T, N> operator+(Vec<T, N> a, const Vec<T, N>& b) {
    for (std::size_t i = 0; i < N; ++i) a[i] += b[i];
    return a;
}

template <typename T, std::size_t N>
Vec<T, N> operator-(Vec<T, N> a, const Vec<T, N>& b) {
    for (std::size_t i = 0; i < N; ++i) a[i] -= b[i];
    return a;
}

template <typename T, std::size_t N, typename S>
Vec<T, N> scaled(Vec<T, N> a, S s) {
    for (auto& x : a) x *= s;
    return a;
}

template <typename T, std::size_t N>
double norm_inf(const Vec<T, N>& a) {
    double m = 0.0;
    for (const auto& x : a) m = std::max(m, abs_value(x));
    return m;
}

template <typename T, std::size_t N>
double norm2(const Vec<T, N>& a) {
    double s = 0.0;
    for (const auto& x : a) s += std::norm(x);
    return std::sqrt(s);
}

/// Determinant by Gaussian elimination with partial pivoting.
template <typename T, std::size_t N>
T determinant(Mat<T, N> a) {
    T det{1};
    for (std::size_t k = 0; k < N; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < N; ++i)
            if (abs_value(a[i][k]) > abs_value(a[p][k])) p = i;
        if (abs_value(a[p][k]) == 0.0) return T{0};
        if (p != k) {
            std::swap(a[p], a[k]);
            det = -det;
        }
        det *= a[k][k];
        for (std::size_t i = k + 1; i < N; ++i) {
            const T f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < N; ++j) a[i][j] -= f * a[k][j];
        }
    }
    return det;
}

/// Matrix whose columns are the given vectors.
template <typename T, std::size_t N>
Mat<T, N> from_columns(const std::array<Vec<T, N>, N>& cols) {
    Mat<T, N> m{};
    for (std::size_t j = 0; j < N; ++j)
        for (std::size_t i = 0; i < N; ++i) m[i][j] = cols[j][i];
    return m;
}

}  // namespace dirac_spectra
