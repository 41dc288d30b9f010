#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

namespace marc {

using Complex = std::complex<double>;

/**
 * Dense complex column vector. Holds channel vectors and eigenvectors.
 */
class ComplexVector
{
  public:
    ComplexVector() = default;
    explicit ComplexVector(std::size_t n);
    ComplexVector(std::initializer_list<Complex> values);
    explicit ComplexVector(std::vector<Complex> values);

    std::size_t size() const noexcept { return m_data.size(); }
    bool empty() const noexcept { return m_data.empty(); }

    Complex& operator[](std::size_t i) { return m_data[i]; }
    const Complex& operator[](std::size_t i) const { return m_data[i]; }

    std::span<const Complex> values() const noexcept { return m_data; }
    auto begin() const noexcept { return m_data.begin(); }
    auto end() const noexcept { return m_data.end(); }

    double squared_norm() const noexcept;
    double norm() const noexcept;
    bool is_finite() const noexcept;
    bool is_zero() const noexcept;

    ComplexVector& operator+=(const ComplexVector& other);
    ComplexVector& operator*=(Complex factor);

  private:
    std::vector<Complex> m_data;
};

ComplexVector operator*(Complex factor, ComplexVector v);
ComplexVector operator-(const ComplexVector& a, const ComplexVector& b);

/// x^H y
Complex inner(const ComplexVector& x, const ComplexVector& y);

/**
 * Dense row-major complex matrix. Used for relay amplification matrices and
 * as the storage behind HermitianMatrix.
 */
class ComplexMatrix
{
  public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);

    static ComplexMatrix identity(std::size_t n);
    /// u v^H
    static ComplexMatrix outer(const ComplexVector& u, const ComplexVector& v);

    std::size_t rows() const noexcept { return m_rows; }
    std::size_t cols() const noexcept { return m_cols; }

    Complex& operator()(std::size_t r, std::size_t c) { return m_data[r * m_cols + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const
    {
        return m_data[r * m_cols + c];
    }

    ComplexMatrix adjoint() const;
    double frobenius_norm() const noexcept;
    double max_abs() const noexcept;
    bool is_finite() const noexcept;

    ComplexMatrix& operator*=(Complex factor);

  private:
    std::size_t m_rows = 0;
    std::size_t m_cols = 0;
    std::vector<Complex> m_data;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex factor, ComplexMatrix m);
ComplexVector operator*(const ComplexMatrix& a, const ComplexVector& x);
/// A^H x without forming A^H.
ComplexVector adjoint_times(const ComplexMatrix& a, const ComplexVector& x);

/**
 * Square complex matrix equal to its conjugate transpose.
 *
 * The symmetry is checked on construction from a general matrix: every pair
 * must satisfy |a_ij - conj(a_ji)| <= 1e-12 * max|a|. Sums and products built
 * through the helpers below are Hermitian by construction and skip the check.
 */
class HermitianMatrix
{
  public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(ComplexMatrix m);

    static HermitianMatrix zero(std::size_t n);
    static HermitianMatrix identity(std::size_t n);

    std::size_t size() const noexcept { return m_m.rows(); }
    const Complex& operator()(std::size_t r, std::size_t c) const { return m_m(r, c); }
    const ComplexMatrix& matrix() const noexcept { return m_m; }

    double trace() const noexcept;
    double frobenius_norm() const noexcept { return m_m.frobenius_norm(); }
    double max_diagonal() const noexcept;

    HermitianMatrix& operator+=(const HermitianMatrix& other);
    HermitianMatrix& operator-=(const HermitianMatrix& other);
    HermitianMatrix& operator*=(double factor);

    /// this += scale * u u^H
    void add_rank_one(const ComplexVector& u, double scale);

  private:
    struct Trusted
    {
    };
    HermitianMatrix(ComplexMatrix m, Trusted);

    ComplexMatrix m_m;
};

HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b);
HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b);
HermitianMatrix operator*(double factor, HermitianMatrix a);
ComplexVector operator*(const HermitianMatrix& a, const ComplexVector& x);

struct EigenPair
{
    double value = 0.0;
    ComplexVector vector;
    double residual = 0.0;    ///< ||A v - lambda v||
    int iterations = 0;       ///< power iterations spent
    bool used_jacobi = false; ///< power iteration did not settle
};

inline constexpr double kDefaultEigenTolerance = 1e-12;

/**
 * Largest eigenvalue and a unit eigenvector of a Hermitian positive
 * semidefinite matrix.
 *
 * Power iteration from the normalized all-ones vector, stopped once
 * ||A v - lambda v|| <= tol * max(1, ||A||_F). If that does not happen within
 * 10000 iterations, or the iterate lands on an eigenvalue below the largest
 * diagonal entry (seed orthogonal to the dominant eigenspace), a cyclic Jacobi
 * diagonalization takes over. Deterministic for a given input.
 *
 * Throws ValidationError for tol <= 0 or a clearly indefinite input and
 * NumericalError when even the Jacobi result misses the residual bound.
 */
EigenPair dominant_eigenpair(const HermitianMatrix& a, double tol = kDefaultEigenTolerance);

struct HermitianEigensystem
{
    std::vector<double> values;  ///< ascending
    std::vector<ComplexVector> vectors;
};

/// Full eigendecomposition by cyclic complex Jacobi rotations.
HermitianEigensystem jacobi_eigensystem(const HermitianMatrix& a);

/// x^H A x, with the rounding-level imaginary part dropped.
double quadratic_form(const ComplexVector& x, const HermitianMatrix& a);

/// scale * u u^H
HermitianMatrix rank_one(const ComplexVector& u, double scale);

} // namespace marc
