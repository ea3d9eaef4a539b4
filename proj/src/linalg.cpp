#include "rnforms/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace rnforms {

void ToleranceConfig::validate() const {
    if (!(tol_rank > 0) || !(tol_psd > 0) || !(tol_ortho > 0) || !(tol_eq > 0)) {
        throw std::invalid_argument("tolerances must be strictly positive");
    }
    if (max_parallel_sum_doublings < 1) {
        throw std::invalid_argument("max_parallel_sum_doublings must be >= 1");
    }
}

double rank_cutoff(double lambda_max, const ToleranceConfig& tol) {
    return tol.tol_rank * std::max(lambda_max, 1.0);
}

double frobenius(const Matrix& m) { return m.size() == 0 ? 0.0 : m.norm(); }

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// HermitianMatrix

HermitianMatrix::HermitianMatrix(const Matrix& m, const ToleranceConfig& tol) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("Hermitian matrix must be square");
    }
    const double scale = std::max(1.0, max_abs(m));
    const double skew = max_abs(m - m.adjoint());
    if (skew > tol.tol_eq * scale) {
        throw std::invalid_argument("matrix is not Hermitian (max |M - M*| = " +
                                    std::to_string(skew) + ")");
    }
    m_ = (m + m.adjoint()) * 0.5;
}

HermitianMatrix hermitian_part(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("Hermitian matrix must be square");
    }
    return HermitianMatrix(Matrix((m + m.adjoint()) * 0.5), HermitianMatrix::Trusted{});
}

HermitianMatrix HermitianMatrix::zero(Eigen::Index dim) {
    return HermitianMatrix(Matrix::Zero(dim, dim), Trusted{});
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index dim) {
    return HermitianMatrix(Matrix::Identity(dim, dim), Trusted{});
}

HermitianMatrix HermitianMatrix::diagonal(const RealVector& d) {
    return HermitianMatrix(Matrix(d.cast<Complex>().asDiagonal()), Trusted{});
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
    if (dim() != o.dim()) throw std::invalid_argument("dimension mismatch");
    return HermitianMatrix(Matrix(m_ + o.m_), Trusted{});
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
    if (dim() != o.dim()) throw std::invalid_argument("dimension mismatch");
    return HermitianMatrix(Matrix(m_ - o.m_), Trusted{});
}

HermitianMatrix HermitianMatrix::scaled(double c) const {
    return HermitianMatrix(Matrix(m_ * c), Trusted{});
}

// ---------------------------------------------------------------------------
// SubspaceBasis

SubspaceBasis::SubspaceBasis(const Matrix& columns, const ToleranceConfig& tol)
    : cols_(columns) {
    if (cols_.cols() > cols_.rows()) {
        throw std::invalid_argument("more basis vectors than ambient dimension");
    }
    if (cols_.cols() > 0) {
        const Matrix gram = cols_.adjoint() * cols_;
        const double err = max_abs(gram - Matrix::Identity(gram.rows(), gram.cols()));
        if (err > tol.tol_ortho) {
            throw std::invalid_argument("basis columns are not orthonormal (residual " +
                                        std::to_string(err) + ")");
        }
    }
}

SubspaceBasis SubspaceBasis::empty(Eigen::Index ambient_dim) {
    SubspaceBasis b;
    b.cols_ = Matrix::Zero(ambient_dim, 0);
    return b;
}

// ---------------------------------------------------------------------------
// Cyclic Jacobi

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const Matrix& a) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (i != j) sum += std::norm(a(i, j));
        }
    }
    return std::sqrt(sum);
}

}  // namespace

EigenDecomposition eigh(const HermitianMatrix& h) {
    const Eigen::Index n = h.dim();
    Matrix a = h.matrix();
    Matrix v = Matrix::Identity(n, n);
    const double eps = std::numeric_limits<double>::epsilon();
    const double total = frobenius(a);

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        const double off = off_diagonal_norm(a);
        if (off == 0.0 || off <= eps * 1e-3 * total) break;

        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double r = std::abs(apq);
                if (r == 0.0) continue;
                const double alpha = a(p, p).real();
                const double beta = a(q, q).real();
                // Once converging, entries below the diagonal's resolution are noise.
                if (sweep > 3 && std::abs(alpha) + 100.0 * r == std::abs(alpha) &&
                    std::abs(beta) + 100.0 * r == std::abs(beta)) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                const Complex phase = apq / r;
                const double theta = (beta - alpha) / (2.0 * r);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::hypot(theta, 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                // G = diag(1, conj(phase)) * [[c, s], [-s, c]] on coordinates (p, q).
                const Complex gpp = c;
                const Complex gpq = s;
                const Complex gqp = -s * std::conj(phase);
                const Complex gqq = c * std::conj(phase);

                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = akp * gpp + akq * gqp;
                    a(k, q) = akp * gpq + akq * gqq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
                    a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p) = vkp * gpp + vkq * gqp;
                    v(k, q) = vkp * gpq + vkq * gqq;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
        return a(i, i).real() < a(j, j).real();
    });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto src = order[static_cast<std::size_t>(k)];
        out.values(k) = a(src, src).real();
        out.vectors.col(k) = v.col(src);
    }
    return out;
}

double min_eigenvalue(const HermitianMatrix& h) {
    if (h.dim() == 0) return 0.0;
    return eigh(h).values(0);
}

double max_eigenvalue(const HermitianMatrix& h) {
    if (h.dim() == 0) return 0.0;
    return eigh(h).values(h.dim() - 1);
}

bool is_psd(const HermitianMatrix& h, const ToleranceConfig& tol) {
    if (h.dim() == 0) return true;
    const auto e = eigh(h);
    const double top = e.values(h.dim() - 1);
    return e.values(0) >= -tol.tol_psd * std::max(top, 1.0);
}

bool loewner_leq(const HermitianMatrix& a, const HermitianMatrix& b,
                 const ToleranceConfig& tol) {
    if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
    if (a.dim() == 0) return true;
    const double scale = std::max({1.0, max_abs(a.matrix()), max_abs(b.matrix())});
    return min_eigenvalue(b - a) >= -tol.tol_eq * scale;
}

HermitianMatrix psd_sqrt(const HermitianMatrix& h, const ToleranceConfig& tol) {
    const Eigen::Index n = h.dim();
    if (n == 0) return h;
    const auto e = eigh(h);
    const double top = e.values(n - 1);
    if (e.values(0) < -tol.tol_psd * std::max(top, 1.0)) {
        throw std::domain_error("matrix is not positive semidefinite (min eigenvalue " +
                                std::to_string(e.values(0)) + ")");
    }
    const RealVector roots = e.values.cwiseMax(0.0).cwiseSqrt();
    return hermitian_part(e.vectors * roots.cast<Complex>().asDiagonal() *
                          e.vectors.adjoint());
}

HermitianMatrix pinv(const HermitianMatrix& h, const ToleranceConfig& tol) {
    const Eigen::Index n = h.dim();
    if (n == 0) return h;
    const auto e = eigh(h);
    const double cutoff = rank_cutoff(e.values.cwiseAbs().maxCoeff(), tol);
    RealVector inv = RealVector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(e.values(i)) > cutoff) inv(i) = 1.0 / e.values(i);
    }
    return hermitian_part(e.vectors * inv.cast<Complex>().asDiagonal() *
                          e.vectors.adjoint());
}

namespace {

SubspaceBasis split_spectrum(const HermitianMatrix& h, const ToleranceConfig& tol,
                             bool want_kernel) {
    const Eigen::Index n = h.dim();
    if (n == 0) return SubspaceBasis::empty(0);
    const auto e = eigh(h);
    const double cutoff = rank_cutoff(e.values.cwiseAbs().maxCoeff(), tol);
    std::vector<Eigen::Index> picked;
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool null = std::abs(e.values(i)) <= cutoff;
        if (null == want_kernel) picked.push_back(i);
    }
    Matrix cols(n, static_cast<Eigen::Index>(picked.size()));
    for (std::size_t k = 0; k < picked.size(); ++k) {
        cols.col(static_cast<Eigen::Index>(k)) = e.vectors.col(picked[k]);
    }
    return SubspaceBasis(cols, tol);
}

}  // namespace

SubspaceBasis kernel_basis(const HermitianMatrix& h, const ToleranceConfig& tol) {
    return split_spectrum(h, tol, true);
}

SubspaceBasis range_basis(const HermitianMatrix& h, const ToleranceConfig& tol) {
    return split_spectrum(h, tol, false);
}

SubspaceBasis span_of(const Matrix& columns, const ToleranceConfig& tol) {
    if (columns.cols() == 0) return SubspaceBasis::empty(columns.rows());
    return range_basis(hermitian_part(columns * columns.adjoint()), tol);
}

HermitianMatrix project_onto(const SubspaceBasis& b) {
    return hermitian_part(b.columns() * b.columns().adjoint());
}

namespace {

// Square root with eigenvalues under the rank cutoff set to zero, so rounding
// noise in a kernel is not amplified when the argument is scaled up.
Matrix truncated_sqrt(const HermitianMatrix& h, const ToleranceConfig& tol) {
    const auto e = eigh(h);
    const double cutoff = rank_cutoff(e.values.cwiseAbs().maxCoeff(), tol);
    RealVector roots = RealVector::Zero(h.dim());
    for (Eigen::Index i = 0; i < h.dim(); ++i) {
        if (e.values(i) > cutoff) roots(i) = std::sqrt(e.values(i));
    }
    return e.vectors * roots.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

}  // namespace

HermitianMatrix parallel_sum(const HermitianMatrix& a, const HermitianMatrix& b,
                             const ToleranceConfig& tol) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("parallel_sum: dimension mismatch");
    }
    const Eigen::Index n = a.dim();
    if (n == 0) return a;

    const auto joint = project_onto(range_basis(a, tol)) + project_onto(range_basis(b, tol));
    const Eigen::Index rank = range_basis(joint, tol).size();
    if (rank == 0) return HermitianMatrix::zero(n);

    if (!is_psd(a, tol) || !is_psd(b, tol)) {
        throw std::domain_error("parallel_sum: arguments must be positive semidefinite");
    }
    const Matrix root_a = truncated_sqrt(a, tol);
    Matrix stacked(2 * n, n);
    stacked.topRows(n) = root_a;
    stacked.bottomRows(n) = truncated_sqrt(b, tol);

    const Eigen::ColPivHouseholderQR<Matrix> qr(stacked);
    const Matrix q = qr.householderQ() * Matrix::Identity(2 * n, rank);
    const Matrix top = q.topRows(n);
    const Matrix inner = root_a * top;
    return hermitian_part(root_a * root_a - inner * inner.adjoint());
}

}  // namespace rnforms
