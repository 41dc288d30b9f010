#include "marc/numerics.hpp"

#include "marc/errors.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <string>

namespace marc {

namespace {

constexpr int kMaxPowerIterations = 10000;
constexpr int kMaxJacobiSweeps = 100;
constexpr double kHermitianTolerance = 1e-12;

void
require_same_size(std::size_t a, std::size_t b, const char* what)
{
    if (a != b)
    {
        throw ValidationError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                              " vs " + std::to_string(b) + ")");
    }
}

} // namespace

// ---------------------------------------------------------------------------
// ComplexVector

ComplexVector::ComplexVector(std::size_t n)
    : m_data(n)
{
}

ComplexVector::ComplexVector(std::initializer_list<Complex> values)
    : m_data(values)
{
}

ComplexVector::ComplexVector(std::vector<Complex> values)
    : m_data(std::move(values))
{
}

double
ComplexVector::squared_norm() const noexcept
{
    double acc = 0.0;
    for (const auto& z : m_data)
    {
        acc += std::norm(z);
    }
    return acc;
}

double
ComplexVector::norm() const noexcept
{
    return std::sqrt(squared_norm());
}

bool
ComplexVector::is_finite() const noexcept
{
    return std::all_of(m_data.begin(), m_data.end(), [](const Complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

bool
ComplexVector::is_zero() const noexcept
{
    return std::all_of(m_data.begin(), m_data.end(), [](const Complex& z) {
        return z == Complex{};
    });
}

ComplexVector&
ComplexVector::operator+=(const ComplexVector& other)
{
    require_same_size(size(), other.size(), "vector addition");
    for (std::size_t i = 0; i < size(); ++i)
    {
        m_data[i] += other.m_data[i];
    }
    return *this;
}

ComplexVector&
ComplexVector::operator*=(Complex factor)
{
    for (auto& z : m_data)
    {
        z *= factor;
    }
    return *this;
}

ComplexVector
operator*(Complex factor, ComplexVector v)
{
    v *= factor;
    return v;
}

ComplexVector
operator-(const ComplexVector& a, const ComplexVector& b)
{
    require_same_size(a.size(), b.size(), "vector subtraction");
    ComplexVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        out[i] = a[i] - b[i];
    }
    return out;
}

Complex
inner(const ComplexVector& x, const ComplexVector& y)
{
    require_same_size(x.size(), y.size(), "inner product");
    Complex acc{};
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        acc += std::conj(x[i]) * y[i];
    }
    return acc;
}

// ---------------------------------------------------------------------------
// ComplexMatrix

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : m_rows(rows),
      m_cols(cols),
      m_data(rows * cols)
{
}

ComplexMatrix
ComplexMatrix::identity(std::size_t n)
{
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
    {
        m(i, i) = 1.0;
    }
    return m;
}

ComplexMatrix
ComplexMatrix::outer(const ComplexVector& u, const ComplexVector& v)
{
    ComplexMatrix m(u.size(), v.size());
    for (std::size_t r = 0; r < u.size(); ++r)
    {
        for (std::size_t c = 0; c < v.size(); ++c)
        {
            m(r, c) = u[r] * std::conj(v[c]);
        }
    }
    return m;
}

ComplexMatrix
ComplexMatrix::adjoint() const
{
    ComplexMatrix out(m_cols, m_rows);
    for (std::size_t r = 0; r < m_rows; ++r)
    {
        for (std::size_t c = 0; c < m_cols; ++c)
        {
            out(c, r) = std::conj((*this)(r, c));
        }
    }
    return out;
}

double
ComplexMatrix::frobenius_norm() const noexcept
{
    double acc = 0.0;
    for (const auto& z : m_data)
    {
        acc += std::norm(z);
    }
    return std::sqrt(acc);
}

double
ComplexMatrix::max_abs() const noexcept
{
    double best = 0.0;
    for (const auto& z : m_data)
    {
        best = std::max(best, std::abs(z));
    }
    return best;
}

bool
ComplexMatrix::is_finite() const noexcept
{
    return std::all_of(m_data.begin(), m_data.end(), [](const Complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

ComplexMatrix&
ComplexMatrix::operator*=(Complex factor)
{
    for (auto& z : m_data)
    {
        z *= factor;
    }
    return *this;
}

ComplexMatrix
operator*(const ComplexMatrix& a, const ComplexMatrix& b)
{
    require_same_size(a.cols(), b.rows(), "matrix product");
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
    {
        for (std::size_t k = 0; k < a.cols(); ++k)
        {
            const Complex lhs = a(r, k);
            for (std::size_t c = 0; c < b.cols(); ++c)
            {
                out(r, c) += lhs * b(k, c);
            }
        }
    }
    return out;
}

ComplexMatrix
operator*(Complex factor, ComplexMatrix m)
{
    m *= factor;
    return m;
}

ComplexVector
operator*(const ComplexMatrix& a, const ComplexVector& x)
{
    require_same_size(a.cols(), x.size(), "matrix-vector product");
    ComplexVector out(a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
    {
        Complex acc{};
        for (std::size_t c = 0; c < a.cols(); ++c)
        {
            acc += a(r, c) * x[c];
        }
        out[r] = acc;
    }
    return out;
}

ComplexVector
adjoint_times(const ComplexMatrix& a, const ComplexVector& x)
{
    require_same_size(a.rows(), x.size(), "adjoint-vector product");
    ComplexVector out(a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
    {
        for (std::size_t c = 0; c < a.cols(); ++c)
        {
            out[c] += std::conj(a(r, c)) * x[r];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// HermitianMatrix

HermitianMatrix::HermitianMatrix(ComplexMatrix m)
    : m_m(std::move(m))
{
    if (m_m.rows() != m_m.cols() || m_m.rows() == 0)
    {
        throw ValidationError("Hermitian matrix must be square and non-empty");
    }
    if (!m_m.is_finite())
    {
        throw ValidationError("Hermitian matrix has non-finite entries");
    }
    const double scale = m_m.max_abs();
    const std::size_t n = m_m.rows();
    for (std::size_t r = 0; r < n; ++r)
    {
        for (std::size_t c = r; c < n; ++c)
        {
            if (std::abs(m_m(r, c) - std::conj(m_m(c, r))) > kHermitianTolerance * scale)
            {
                throw ValidationError("matrix is not Hermitian at (" + std::to_string(r) + ", " +
                                      std::to_string(c) + ")");
            }
        }
    }
}

HermitianMatrix::HermitianMatrix(ComplexMatrix m, Trusted)
    : m_m(std::move(m))
{
}

HermitianMatrix
HermitianMatrix::zero(std::size_t n)
{
    return HermitianMatrix(ComplexMatrix(n, n), Trusted{});
}

HermitianMatrix
HermitianMatrix::identity(std::size_t n)
{
    return HermitianMatrix(ComplexMatrix::identity(n), Trusted{});
}

double
HermitianMatrix::trace() const noexcept
{
    double acc = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
    {
        acc += m_m(i, i).real();
    }
    return acc;
}

double
HermitianMatrix::max_diagonal() const noexcept
{
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < size(); ++i)
    {
        best = std::max(best, m_m(i, i).real());
    }
    return best;
}

HermitianMatrix&
HermitianMatrix::operator+=(const HermitianMatrix& other)
{
    require_same_size(size(), other.size(), "Hermitian addition");
    for (std::size_t r = 0; r < size(); ++r)
    {
        for (std::size_t c = 0; c < size(); ++c)
        {
            m_m(r, c) += other(r, c);
        }
    }
    return *this;
}

HermitianMatrix&
HermitianMatrix::operator-=(const HermitianMatrix& other)
{
    require_same_size(size(), other.size(), "Hermitian subtraction");
    for (std::size_t r = 0; r < size(); ++r)
    {
        for (std::size_t c = 0; c < size(); ++c)
        {
            m_m(r, c) -= other(r, c);
        }
    }
    return *this;
}

HermitianMatrix&
HermitianMatrix::operator*=(double factor)
{
    m_m *= factor;
    return *this;
}

void
HermitianMatrix::add_rank_one(const ComplexVector& u, double scale)
{
    require_same_size(size(), u.size(), "rank-one update");
    const std::size_t n = size();
    for (std::size_t r = 0; r < n; ++r)
    {
        m_m(r, r) += scale * std::norm(u[r]);
        for (std::size_t c = r + 1; c < n; ++c)
        {
            const Complex z = scale * u[r] * std::conj(u[c]);
            m_m(r, c) += z;
            m_m(c, r) += std::conj(z);
        }
    }
}

HermitianMatrix
operator+(HermitianMatrix a, const HermitianMatrix& b)
{
    a += b;
    return a;
}

HermitianMatrix
operator-(HermitianMatrix a, const HermitianMatrix& b)
{
    a -= b;
    return a;
}

HermitianMatrix
operator*(double factor, HermitianMatrix a)
{
    a *= factor;
    return a;
}

ComplexVector
operator*(const HermitianMatrix& a, const ComplexVector& x)
{
    return a.matrix() * x;
}

HermitianMatrix
rank_one(const ComplexVector& u, double scale)
{
    if (!(scale >= 0.0))
    {
        throw ValidationError("rank_one: scale must be non-negative");
    }
    if (u.empty())
    {
        throw ValidationError("rank_one: empty vector");
    }
    HermitianMatrix out = HermitianMatrix::zero(u.size());
    out.add_rank_one(u, scale);
    return out;
}

double
quadratic_form(const ComplexVector& x, const HermitianMatrix& a)
{
    require_same_size(x.size(), a.size(), "quadratic form");
    Complex acc{};
    for (std::size_t r = 0; r < a.size(); ++r)
    {
        Complex row{};
        for (std::size_t c = 0; c < a.size(); ++c)
        {
            row += a(r, c) * x[c];
        }
        acc += std::conj(x[r]) * row;
    }
    return acc.real();
}

// ---------------------------------------------------------------------------
// Eigen solvers

HermitianEigensystem
jacobi_eigensystem(const HermitianMatrix& a)
{
    const std::size_t n = a.size();
    ComplexMatrix m = a.matrix();
    ComplexMatrix v = ComplexMatrix::identity(n);

    const double scale = std::max(a.frobenius_norm(), std::numeric_limits<double>::min());
    for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep)
    {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
        {
            for (std::size_t q = p + 1; q < n; ++q)
            {
                off += std::norm(m(p, q));
            }
        }
        if (std::sqrt(off) <= 1e-15 * scale)
        {
            break;
        }

        for (std::size_t p = 0; p < n; ++p)
        {
            for (std::size_t q = p + 1; q < n; ++q)
            {
                const double mag = std::abs(m(p, q));
                if (mag == 0.0)
                {
                    continue;
                }
                // Rotate the phase out of m(p, q), then apply a real rotation
                // to the symmetric 2x2 block [[app, mag], [mag, aqq]].
                const Complex phase = m(p, q) / mag;
                const double app = m(p, p).real();
                const double aqq = m(q, q).real();
                const double theta = (aqq - app) / (2.0 * mag);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * cs;

                // U = [[cs, sn], [-sn * conj(phase), cs * conj(phase)]] on (p, q)
                const Complex u_qp = -sn * std::conj(phase);
                const Complex u_qq = cs * std::conj(phase);

                for (std::size_t r = 0; r < n; ++r)
                {
                    const Complex mp = m(r, p);
                    const Complex mq = m(r, q);
                    m(r, p) = cs * mp + u_qp * mq;
                    m(r, q) = sn * mp + u_qq * mq;

                    const Complex vp = v(r, p);
                    const Complex vq = v(r, q);
                    v(r, p) = cs * vp + u_qp * vq;
                    v(r, q) = sn * vp + u_qq * vq;
                }
                for (std::size_t c = 0; c < n; ++c)
                {
                    const Complex mp = m(p, c);
                    const Complex mq = m(q, c);
                    m(p, c) = cs * mp + std::conj(u_qp) * mq;
                    m(q, c) = sn * mp + std::conj(u_qq) * mq;
                }
                m(p, q) = 0.0;
                m(q, p) = 0.0;
                m(p, p) = m(p, p).real();
                m(q, q) = m(q, q).real();
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return m(x, x).real() < m(y, y).real();
    });

    HermitianEigensystem out;
    out.values.reserve(n);
    out.vectors.reserve(n);
    for (std::size_t idx : order)
    {
        out.values.push_back(m(idx, idx).real());
        ComplexVector col(n);
        for (std::size_t r = 0; r < n; ++r)
        {
            col[r] = v(r, idx);
        }
        out.vectors.push_back(std::move(col));
    }
    return out;
}

namespace {

double
eigen_residual(const HermitianMatrix& a, const ComplexVector& v, double lambda)
{
    ComplexVector av = a * v;
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        acc += std::norm(av[i] - lambda * v[i]);
    }
    return std::sqrt(acc);
}

} // namespace

EigenPair
dominant_eigenpair(const HermitianMatrix& a, double tol)
{
    if (!(tol > 0.0))
    {
        throw ValidationError("dominant_eigenpair: tolerance must be positive");
    }
    const std::size_t n = a.size();
    if (n == 0)
    {
        throw ValidationError("dominant_eigenpair: empty matrix");
    }

    const double frob = a.frobenius_norm();
    const double bound = tol * std::max(1.0, frob);

    EigenPair out;
    out.vector = ComplexVector(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        out.vector[i] = 1.0 / std::sqrt(static_cast<double>(n));
    }
    if (frob == 0.0)
    {
        return out;
    }

    bool settled = false;
    ComplexVector v = out.vector;
    for (int it = 1; it <= kMaxPowerIterations; ++it)
    {
        ComplexVector w = a * v;
        const double lambda = inner(v, w).real();
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            res += std::norm(w[i] - lambda * v[i]);
        }
        res = std::sqrt(res);
        out.iterations = it;
        if (res <= bound)
        {
            out.value = lambda;
            out.vector = v;
            out.residual = res;
            settled = lambda >= a.max_diagonal() - bound;
            break;
        }
        const double wn = w.norm();
        if (wn == 0.0)
        {
            break;
        }
        v = (1.0 / wn) * std::move(w);
    }

    if (!settled)
    {
        HermitianEigensystem sys = jacobi_eigensystem(a);
        out.value = sys.values.back();
        out.vector = std::move(sys.vectors.back());
        out.residual = eigen_residual(a, out.vector, out.value);
        out.used_jacobi = true;
    }

    if (out.value < 0.0)
    {
        if (out.value < -bound)
        {
            throw ValidationError("dominant_eigenpair: matrix is not positive semidefinite");
        }
        out.value = 0.0;
    }
    if (!(out.residual <= bound))
    {
        throw NumericalError("dominant_eigenpair: residual above tolerance", out.residual);
    }
    return out;
}

} // namespace marc
