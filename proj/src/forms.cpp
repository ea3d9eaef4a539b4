#include "rnforms/forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rnforms {

NonnegativeForm::NonnegativeForm(HermitianMatrix gram, const ToleranceConfig& tol)
    : gram_(std::move(gram)) {
    if (!is_psd(gram_, tol)) {
        throw std::invalid_argument("Gram matrix is not positive semidefinite");
    }
}

NonnegativeForm NonnegativeForm::trusted(HermitianMatrix gram) {
    NonnegativeForm f;
    f.gram_ = std::move(gram);
    return f;
}

NonnegativeForm NonnegativeForm::zero(Eigen::Index dim) {
    return trusted(HermitianMatrix::zero(dim));
}

Complex NonnegativeForm::operator()(const Vector& x, const Vector& y) const {
    if (x.size() != dim() || y.size() != dim()) {
        throw std::invalid_argument("form argument has wrong dimension");
    }
    return y.dot(gram_.matrix() * x);
}

NonnegativeForm NonnegativeForm::scaled(double c) const {
    if (c < 0) throw std::invalid_argument("forms can only be scaled by c >= 0");
    return trusted(gram_.scaled(c));
}

QuotientHilbert quotient_space(const NonnegativeForm& s, const ToleranceConfig& tol) {
    const Eigen::Index n = s.dim();
    QuotientHilbert q;
    if (n == 0) {
        q.coord_map = Matrix::Zero(0, 0);
        q.lift = Matrix::Zero(0, 0);
        return q;
    }
    const auto e = eigh(s.gram());
    const double cutoff = rank_cutoff(e.values(n - 1), tol);
    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (e.values(i) > cutoff) kept.push_back(i);
    }
    const auto r = static_cast<Eigen::Index>(kept.size());
    q.coord_map.resize(r, n);
    q.lift.resize(n, r);
    for (Eigen::Index k = 0; k < r; ++k) {
        const auto i = kept[static_cast<std::size_t>(k)];
        const double root = std::sqrt(e.values(i));
        q.coord_map.row(k) = root * e.vectors.col(i).adjoint();
        q.lift.col(k) = e.vectors.col(i) / root;
    }
    return q;
}

namespace {

void require_same_dim(const NonnegativeForm& s, const NonnegativeForm& t) {
    if (s.dim() != t.dim()) {
        throw std::invalid_argument("forms live on spaces of different dimension");
    }
}

}  // namespace

AbsoluteContinuity is_absolutely_continuous(const NonnegativeForm& s, const NonnegativeForm& t,
                                            const ToleranceConfig& tol) {
    require_same_dim(s, t);
    AbsoluteContinuity out;
    const auto kernel_t = kernel_basis(t.gram(), tol);
    if (kernel_t.is_empty()) return out;

    const Matrix& k = kernel_t.columns();
    const auto compressed = eigh(hermitian_part(k.adjoint() * s.gram().matrix() * k));
    const double top = compressed.values(compressed.values.size() - 1);
    if (top > rank_cutoff(max_eigenvalue(s.gram()), tol)) {
        out.absolutely_continuous = false;
        out.witness = k * compressed.vectors.col(compressed.vectors.cols() - 1);
    }
    return out;
}

namespace {

void require_absolutely_continuous(const NonnegativeForm& s, const NonnegativeForm& t,
                                   const ToleranceConfig& tol) {
    const auto ac = is_absolutely_continuous(s, t, tol);
    if (!ac.absolutely_continuous) {
        const Vector& x = *ac.witness;
        std::ostringstream msg;
        msg << "s is not absolutely continuous with respect to t: t(x,x) = "
            << t(x, x).real() << ", s(x,x) = " << s(x, x).real();
        throw DomainError(msg.str(), Witness{"x in ker t with s(x,x) > 0", x, {}});
    }
}

}  // namespace

EmbeddingOperator embedding(const NonnegativeForm& s, const NonnegativeForm& t,
                            const ToleranceConfig& tol) {
    require_absolutely_continuous(s, t, tol);
    EmbeddingOperator j;
    j.domain = quotient_space(t, tol);
    j.codomain = quotient_space(s, tol);
    j.matrix = j.codomain.coord_map * j.domain.lift;
    return j;
}

ParallelSumLimit parallel_sum_limit(const NonnegativeForm& s, const NonnegativeForm& t,
                                    const ToleranceConfig& tol) {
    require_same_dim(s, t);
    ParallelSumLimit out;
    out.limit = parallel_sum(s.gram(), t.gram(), tol);
    double scale = 1.0;
    for (int k = 1; k <= tol.max_parallel_sum_doublings; ++k) {
        scale *= 2.0;
        auto next = parallel_sum(s.gram(), t.gram().scaled(scale), tol);
        out.last_increment = frobenius(next.matrix() - out.limit.matrix());
        out.limit = std::move(next);
        out.doublings = k;
        if (out.last_increment < tol.tol_eq) break;
    }
    return out;
}

Decomposition lebesgue_decompose(const NonnegativeForm& s, const NonnegativeForm& t,
                                 const ToleranceConfig& tol) {
    require_same_dim(s, t);
    const Matrix root = psd_sqrt(s.gram(), tol).matrix();
    const auto kernel_t = kernel_basis(t.gram(), tol);
    const auto p = project_onto(span_of(root * kernel_t.columns(), tol));

    const HermitianMatrix sing = hermitian_part(root * p.matrix() * root);
    const HermitianMatrix ac = s.gram() - sing;

    const auto oracle = parallel_sum_limit(s, t, tol);
    Decomposition d;
    d.oracle_gap = frobenius(ac.matrix() - oracle.limit.matrix());
    d.oracle_doublings = oracle.doublings;
    const double allowed = 1e-6 * std::max(1.0, frobenius(s.gram().matrix()));
    if (d.oracle_gap > allowed) {
        std::ostringstream msg;
        msg << "Lebesgue decomposition: projection formula and parallel-sum limit disagree by "
            << d.oracle_gap << " (Frobenius) after " << oracle.doublings
            << " doublings; check tol_rank";
        throw std::runtime_error(msg.str());
    }
    d.ac_part = NonnegativeForm(ac, tol);
    d.sing_part = NonnegativeForm(sing, tol);
    return d;
}

bool is_singular(const NonnegativeForm& s, const NonnegativeForm& t,
                 const ToleranceConfig& tol) {
    require_same_dim(s, t);
    const double scale = std::max(
        {1.0, frobenius(s.gram().matrix()), frobenius(t.gram().matrix())});
    return frobenius(parallel_sum(s.gram(), t.gram(), tol).matrix()) <= tol.tol_eq * scale;
}

RNOperator rn_operator(const NonnegativeForm& s, const NonnegativeForm& t,
                       const ToleranceConfig& tol) {
    auto j = embedding(s, t, tol);
    // J^{**} = J: every operator between finite-dimensional spaces is closed.
    return RNOperator{hermitian_part(j.matrix.adjoint() * j.matrix), std::move(j.domain)};
}

double rn_identity_residual(const NonnegativeForm& s, const RNOperator& rn,
                            const ToleranceConfig& tol) {
    const Matrix images = psd_sqrt(rn.matrix, tol).matrix() * rn.base.coord_map;
    return max_abs(images.adjoint() * images - s.gram().matrix());
}

Vector representing_vector(const NonnegativeForm& s, const NonnegativeForm& t, const Vector& f,
                           const ToleranceConfig& tol) {
    const auto j = embedding(s, t, tol);
    if (f.size() != j.codomain.hilbert_dim()) {
        throw std::invalid_argument("f must be given in H_s coordinates");
    }
    return j.domain.lift * (j.matrix.adjoint() * f);
}

Vector representing_vector_of(const NonnegativeForm& s, const NonnegativeForm& t,
                              const Vector& y, const ToleranceConfig& tol) {
    return representing_vector(s, t, quotient_space(s, tol).coords(y), tol);
}

double uniform_defect(const NonnegativeForm& s, const NonnegativeForm& t, const Vector& f,
                      const Vector& x_cand, const ToleranceConfig& tol) {
    require_same_dim(s, t);
    const auto hs = quotient_space(s, tol);
    if (f.size() != hs.hilbert_dim() || x_cand.size() != s.dim()) {
        throw std::invalid_argument("uniform_defect: argument dimension mismatch");
    }
    // x -> <coord_s x, f> - <x, x_cand>_t  is  x -> l^* x.
    const Vector l = hs.coord_map.adjoint() * f - t.gram().matrix() * x_cand;
    const HermitianMatrix joint = s.gram() + t.gram();

    const auto kernel = kernel_basis(joint, tol);
    if (!kernel.is_empty()) {
        const double leak = (kernel.columns().adjoint() * l).norm();
        if (leak > tol.tol_eq * std::max(1.0, l.norm())) {
            return std::numeric_limits<double>::infinity();
        }
    }
    const double q = l.dot(pinv(joint, tol).matrix() * l).real();
    return std::sqrt(std::max(0.0, q));
}

DiracLebesgueStage dirac_lebesgue_family(int k) {
    if (k < 2) throw std::invalid_argument("dirac_lebesgue_family: k must be >= 2");
    const Eigen::Index n = 2 * k + 1;
    const Eigen::Index centre = k;
    const double h = 1.0 / k;

    // Hat mass matrix: h/3 at the two boundary nodes, 2h/3 inside, h/6 off-diagonal.
    std::vector<double> diag(static_cast<std::size_t>(n), 2.0 * h / 3.0);
    diag.front() = diag.back() = h / 3.0;
    const double off = h / 6.0;

    Matrix mass = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        mass(i, i) = diag[static_cast<std::size_t>(i)];
        if (i + 1 < n) mass(i, i + 1) = mass(i + 1, i) = off;
    }

    Vector evaluation = Vector::Zero(n);
    evaluation(centre) = 1.0;

    // Thomas algorithm for mass * phi = e_centre.
    std::vector<double> c_prime(static_cast<std::size_t>(n));
    std::vector<double> d_prime(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double rhs = i == centre ? 1.0 : 0.0;
        if (i == 0) {
            c_prime[u] = off / diag[u];
            d_prime[u] = rhs / diag[u];
        } else {
            const double denom = diag[u] - off * c_prime[u - 1];
            c_prime[u] = off / denom;
            d_prime[u] = (rhs - off * d_prime[u - 1]) / denom;
        }
    }
    std::vector<double> phi(static_cast<std::size_t>(n));
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        const auto u = static_cast<std::size_t>(i);
        phi[u] = d_prime[u] - (i + 1 < n ? c_prime[u] * phi[u + 1] : 0.0);
    }

    DiracLebesgueStage out;
    out.k = k;
    out.s = NonnegativeForm::trusted(hermitian_part(evaluation * evaluation.adjoint()));
    out.t = NonnegativeForm::trusted(hermitian_part(mass));
    out.psi = evaluation;  // the tent is the hat at node 0
    out.phi.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) out.phi(i) = phi[static_cast<std::size_t>(i)];

    double residual = 0.0;
    double integral = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        double row = diag[u] * phi[u];
        if (i > 0) row += off * phi[u - 1];
        if (i + 1 < n) row += off * phi[u + 1];
        residual = std::max(residual, std::abs((i == centre ? 1.0 : 0.0) - row));
        integral += row;
    }
    out.represent_residual = residual;
    out.phi_integral = integral;
    return out;
}

}  // namespace rnforms
