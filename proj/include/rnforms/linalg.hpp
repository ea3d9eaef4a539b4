#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace rnforms {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/**
 * @brief Numerical thresholds shared by every module.
 *
 * An eigenvalue λ of a PSD matrix counts as zero iff
 * λ <= tol_rank * max(λ_max, 1). All modules route rank decisions through
 * rank_cutoff() so kernels agree across the library.
 */
struct ToleranceConfig {
    double tol_rank = 1e-10;
    double tol_psd = 1e-10;
    double tol_ortho = 1e-10;
    double tol_eq = 1e-8;
    int max_parallel_sum_doublings = 60;

    /// Throws std::invalid_argument unless every field is strictly positive.
    void validate() const;
};

/// Absolute cutoff below which an eigenvalue of a matrix with top eigenvalue
/// @p lambda_max is treated as zero.
double rank_cutoff(double lambda_max, const ToleranceConfig& tol);

/**
 * @brief A complex Hermitian matrix.
 *
 * Construction rejects inputs whose anti-Hermitian part exceeds
 * tol_eq * max(1, max|entry|) and stores the exact Hermitian part, so
 * entries(i,j) == conj(entries(j,i)) holds bit-for-bit afterwards.
 */
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(const Matrix& m, const ToleranceConfig& tol = {});

    static HermitianMatrix zero(Eigen::Index dim);
    static HermitianMatrix identity(Eigen::Index dim);
    static HermitianMatrix diagonal(const RealVector& d);

    Eigen::Index dim() const { return m_.rows(); }
    const Matrix& matrix() const { return m_; }
    Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

    HermitianMatrix operator+(const HermitianMatrix& o) const;
    HermitianMatrix operator-(const HermitianMatrix& o) const;
    HermitianMatrix scaled(double c) const;

private:
    struct Trusted {};
    HermitianMatrix(Matrix m, Trusted) : m_(std::move(m)) {}
    friend HermitianMatrix hermitian_part(const Matrix& m);

    Matrix m_;
};

/// (M + M*) / 2 without a tolerance check. For products that are Hermitian
/// in exact arithmetic.
HermitianMatrix hermitian_part(const Matrix& m);

/// Orthonormal columns spanning a subspace of C^ambient_dim (possibly none).
class SubspaceBasis {
public:
    SubspaceBasis() = default;
    /// Rejects columns that are not orthonormal to tol_ortho.
    SubspaceBasis(const Matrix& columns, const ToleranceConfig& tol = {});
    static SubspaceBasis empty(Eigen::Index ambient_dim);

    Eigen::Index ambient_dim() const { return cols_.rows(); }
    Eigen::Index size() const { return cols_.cols(); }
    bool is_empty() const { return cols_.cols() == 0; }
    const Matrix& columns() const { return cols_; }

private:
    Matrix cols_;
};

struct EigenDecomposition {
    RealVector values;  ///< ascending
    Matrix vectors;     ///< orthonormal columns, vectors.col(i) pairs with values(i)
};

/**
 * @brief Cyclic Jacobi eigensolver for Hermitian matrices.
 *
 * Each rotation first removes the phase of the pivot entry with a diagonal
 * unitary, then applies a real Givens rotation. Deterministic: the sweep
 * order is fixed and ties in the sorted output keep their index order.
 */
EigenDecomposition eigh(const HermitianMatrix& h);

/// Smallest eigenvalue, or 0 for an empty matrix.
double min_eigenvalue(const HermitianMatrix& h);
double max_eigenvalue(const HermitianMatrix& h);

/// True iff min eigenvalue >= -tol_psd * max(λ_max, 1).
bool is_psd(const HermitianMatrix& h, const ToleranceConfig& tol = {});

/// A ⪯ B in the Loewner order, up to tol_eq.
bool loewner_leq(const HermitianMatrix& a, const HermitianMatrix& b,
                 const ToleranceConfig& tol = {});

/// PSD square root. Throws std::domain_error when some eigenvalue is below
/// -tol_psd * scale; smaller negative eigenvalues are clamped to zero.
HermitianMatrix psd_sqrt(const HermitianMatrix& h, const ToleranceConfig& tol = {});

/// Moore–Penrose pseudoinverse; |λ| <= rank_cutoff(max|λ|) is dropped.
HermitianMatrix pinv(const HermitianMatrix& h, const ToleranceConfig& tol = {});

SubspaceBasis kernel_basis(const HermitianMatrix& h, const ToleranceConfig& tol = {});
SubspaceBasis range_basis(const HermitianMatrix& h, const ToleranceConfig& tol = {});

/// Orthonormal basis of span of the given (arbitrary) columns.
SubspaceBasis span_of(const Matrix& columns, const ToleranceConfig& tol = {});

/// Orthogonal projection onto span(b).
HermitianMatrix project_onto(const SubspaceBasis& b);

/**
 * @brief Parallel sum A:B = A (A+B)^+ B of PSD matrices.
 *
 * Evaluated as A - A^{1/2} U_top U_top^* A^{1/2}, where U is an orthonormal
 * basis of range([A^{1/2}; B^{1/2}]) and U_top its upper block; this equals
 * A - A (A+B)^+ A because [A^{1/2}; B^{1/2}]^* [A^{1/2}; B^{1/2}] = A + B.
 * The rank of the stacked matrix is dim(range A + range B), each range
 * decided from its own spectrum, so scaling B by a large constant does not
 * push small directions of A under the cutoff.
 *
 * Throws std::invalid_argument on dimension mismatch.
 */
HermitianMatrix parallel_sum(const HermitianMatrix& a, const HermitianMatrix& b,
                             const ToleranceConfig& tol = {});

double frobenius(const Matrix& m);
double max_abs(const Matrix& m);

}  // namespace rnforms
