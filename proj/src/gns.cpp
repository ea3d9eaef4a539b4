#include "rnforms/gns.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rnforms::gns {

namespace {

struct Layout {
    std::vector<Vector> products;
    Matrix involution;
    Vector unit;
};

Vector unit_vector(Eigen::Index n, Eigen::Index i) {
    Vector e = Vector::Zero(n);
    e(i) = 1.0;
    return e;
}

Layout block_layout(const std::vector<int>& sizes) {
    if (sizes.empty()) throw std::invalid_argument("direct sum needs at least one block");
    Eigen::Index n = 0;
    for (const int k : sizes) {
        if (k < 1) throw std::invalid_argument("matrix blocks must have size >= 1");
        n += static_cast<Eigen::Index>(k) * k;
    }
    Layout out;
    out.products.assign(static_cast<std::size_t>(n * n), Vector::Zero(n));
    out.involution = Matrix::Zero(n, n);
    out.unit = Vector::Zero(n);

    Eigen::Index offset = 0;
    for (const int k : sizes) {
        const auto idx = [&](int p, int q) { return offset + static_cast<Eigen::Index>(p) * k + q; };
        for (int p = 0; p < k; ++p) {
            out.unit(idx(p, p)) = 1.0;
            for (int q = 0; q < k; ++q) {
                out.involution(idx(q, p), idx(p, q)) = 1.0;
                // E_pq E_qs = E_ps
                for (int s = 0; s < k; ++s) {
                    out.products[static_cast<std::size_t>(idx(p, q) * n + idx(q, s))](idx(p, s)) = 1.0;
                }
            }
        }
        offset += static_cast<Eigen::Index>(k) * k;
    }
    return out;
}

double max_abs_of(const std::vector<Matrix>& ms) {
    double m = 0.0;
    for (const auto& x : ms) m = std::max(m, max_abs(x));
    return m;
}

}  // namespace

StarAlgebra::StarAlgebra(std::vector<Vector> products, Matrix involution,
                         std::optional<Vector> unit, std::optional<std::vector<int>> block_sizes)
    : dim_(involution.rows()),
      products_(std::move(products)),
      involution_(std::move(involution)),
      unit_(std::move(unit)),
      blocks_(std::move(block_sizes)) {
    const Eigen::Index n = dim_;
    if (n < 1 || involution_.cols() != n) {
        throw std::invalid_argument("involution must be a nonempty square matrix");
    }
    if (products_.size() != static_cast<std::size_t>(n * n)) {
        throw std::invalid_argument("structure needs dim*dim products");
    }
    for (const auto& p : products_) {
        if (p.size() != n) throw std::invalid_argument("structure constant vector has wrong size");
    }

    left_.assign(static_cast<std::size_t>(n), Matrix::Zero(n, n));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            left_[static_cast<std::size_t>(i)].col(j) = products_[static_cast<std::size_t>(i * n + j)];
        }
    }

    const double scale = std::max(1.0, max_abs_of(left_));
    const double tol = 1e-12 * scale * scale;

    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const Matrix lhs = left_matrix(products_[static_cast<std::size_t>(i * n + j)]);
            const Matrix rhs = left_[static_cast<std::size_t>(i)] * left_[static_cast<std::size_t>(j)];
            if (max_abs(lhs - rhs) > tol) {
                throw std::invalid_argument("structure constants are not associative");
            }
        }
    }
    if (max_abs(involution_ * involution_.conjugate() - Matrix::Identity(n, n)) > 1e-12) {
        throw std::invalid_argument("involution is not involutive");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const Vector lhs = star(products_[static_cast<std::size_t>(i * n + j)]);
            const Vector rhs = multiply(star(basis(j)), star(basis(i)));
            if (max_abs(lhs - rhs) > tol) {
                throw std::invalid_argument("involution is not anti-multiplicative");
            }
        }
    }
    if (unit_) {
        if (unit_->size() != n) throw std::invalid_argument("unit has wrong size");
        for (Eigen::Index i = 0; i < n; ++i) {
            const Vector e = basis(i);
            if (max_abs(multiply(*unit_, e) - e) > tol || max_abs(multiply(e, *unit_) - e) > tol) {
                throw std::invalid_argument("declared unit is not a unit");
            }
        }
    }
    if (blocks_) {
        const auto layout = block_layout(*blocks_);
        bool same = static_cast<Eigen::Index>(layout.involution.rows()) == n;
        for (std::size_t k = 0; same && k < products_.size(); ++k) {
            same = max_abs(products_[k] - layout.products[k]) == 0.0;
        }
        if (!same || max_abs(involution_ - layout.involution) != 0.0) {
            throw std::invalid_argument("declared matrix blocks do not match the structure");
        }
    }
}

StarAlgebra StarAlgebra::matrix_algebra(int k) { return direct_sum({k}); }

StarAlgebra StarAlgebra::direct_sum(const std::vector<int>& block_sizes) {
    auto layout = block_layout(block_sizes);
    return StarAlgebra(std::move(layout.products), std::move(layout.involution),
                       std::move(layout.unit), block_sizes);
}

StarAlgebra StarAlgebra::group_algebra_cyclic(int k) {
    if (k < 1) throw std::invalid_argument("cyclic group order must be >= 1");
    const Eigen::Index n = k;
    std::vector<Vector> products(static_cast<std::size_t>(n * n));
    Matrix involution = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        involution((n - i) % n, i) = 1.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            products[static_cast<std::size_t>(i * n + j)] = unit_vector(n, (i + j) % n);
        }
    }
    return StarAlgebra(std::move(products), std::move(involution), unit_vector(n, 0));
}

Vector StarAlgebra::basis(Eigen::Index i) const {
    if (i < 0 || i >= dim_) throw std::out_of_range("basis index out of range");
    return unit_vector(dim_, i);
}

Matrix StarAlgebra::left_matrix(const Vector& a) const {
    if (a.size() != dim_) throw std::invalid_argument("element has wrong dimension");
    Matrix out = Matrix::Zero(dim_, dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) {
        if (a(i) != Complex{}) out += a(i) * left_[static_cast<std::size_t>(i)];
    }
    return out;
}

Matrix StarAlgebra::right_matrix(const Vector& b) const {
    if (b.size() != dim_) throw std::invalid_argument("element has wrong dimension");
    Matrix out(dim_, dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) out.col(i) = left_[static_cast<std::size_t>(i)] * b;
    return out;
}

Vector StarAlgebra::multiply(const Vector& a, const Vector& b) const {
    if (b.size() != dim_) throw std::invalid_argument("element has wrong dimension");
    return left_matrix(a) * b;
}

Vector StarAlgebra::star(const Vector& a) const {
    if (a.size() != dim_) throw std::invalid_argument("element has wrong dimension");
    return involution_ * a.conjugate();
}

// ---------------------------------------------------------------------------
// Functionals

namespace {

void require_cstar(const StarAlgebra& alg, const char* what) {
    if (!alg.is_cstar_type()) {
        throw std::invalid_argument(std::string(what) +
                                    " needs a direct sum of full matrix algebras");
    }
}

void require_functional(const StarAlgebra& alg, const Functional& f) {
    if (f.coeffs.size() != alg.dim()) {
        throw std::invalid_argument("functional does not match the algebra dimension");
    }
}

}  // namespace

Functional density_functional(const StarAlgebra& alg, const std::vector<Matrix>& densities) {
    require_cstar(alg, "density_functional");
    const auto& blocks = *alg.block_sizes();
    if (densities.size() != blocks.size()) {
        throw std::invalid_argument("one density per block is required");
    }
    Functional f{Vector::Zero(alg.dim())};
    Eigen::Index offset = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const int k = blocks[b];
        if (densities[b].rows() != k || densities[b].cols() != k) {
            throw std::invalid_argument("density has the wrong block size");
        }
        for (int p = 0; p < k; ++p) {
            for (int q = 0; q < k; ++q) f.coeffs(offset + p * k + q) = densities[b](q, p);
        }
        offset += static_cast<Eigen::Index>(k) * k;
    }
    return f;
}

std::vector<Matrix> block_densities(const StarAlgebra& alg, const Functional& w) {
    require_cstar(alg, "block_densities");
    require_functional(alg, w);
    std::vector<Matrix> out;
    Eigen::Index offset = 0;
    for (const int k : *alg.block_sizes()) {
        Matrix rho(k, k);
        for (int p = 0; p < k; ++p) {
            for (int q = 0; q < k; ++q) rho(q, p) = w.coeffs(offset + p * k + q);
        }
        out.push_back(rho);
        offset += static_cast<Eigen::Index>(k) * k;
    }
    return out;
}

Functional trace_functional(const StarAlgebra& alg) {
    require_cstar(alg, "trace_functional");
    std::vector<Matrix> rhos;
    for (const int k : *alg.block_sizes()) rhos.push_back(Matrix::Identity(k, k));
    return density_functional(alg, rhos);
}

Functional vector_state(const StarAlgebra& alg, const Vector& psi, std::size_t block) {
    require_cstar(alg, "vector_state");
    const auto& blocks = *alg.block_sizes();
    if (block >= blocks.size()) throw std::out_of_range("block index out of range");
    std::vector<Matrix> rhos;
    for (const int k : blocks) rhos.push_back(Matrix::Zero(k, k));
    if (psi.size() != blocks[block]) throw std::invalid_argument("state vector has wrong size");
    rhos[block] = psi * psi.adjoint();
    return density_functional(alg, rhos);
}

Matrix gram_matrix(const StarAlgebra& alg, const Functional& v) {
    require_functional(alg, v);
    const Eigen::Index n = alg.dim();
    Matrix g(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        g.row(j) = v.coeffs.transpose() * alg.left_matrix(alg.star(alg.basis(j)));
    }
    return g;
}

NonnegativeForm gram_form(const StarAlgebra& alg, const Functional& v,
                          const ToleranceConfig& tol) {
    return NonnegativeForm(HermitianMatrix(gram_matrix(alg, v), tol), tol);
}

Representability is_representable(const StarAlgebra& alg, const Functional& v,
                                  const ToleranceConfig& tol) {
    Representability r;
    const Matrix g = gram_matrix(alg, v);
    const double scale = std::max(1.0, max_abs(g));
    const Matrix skew = g - g.adjoint();
    if (max_abs(skew) > tol.tol_eq * scale) {
        Eigen::Index row = 0, col = 0;
        skew.cwiseAbs().maxCoeff(&row, &col);
        r.representable = false;
        r.reason = "v(b* a) is not conjugate-symmetric";
        r.witness = alg.basis(col);
        return r;
    }
    const HermitianMatrix h(g, tol);
    const auto e = eigh(h);
    const double top = e.values(e.values.size() - 1);
    if (e.values(0) < -tol.tol_psd * std::max(top, 1.0)) {
        r.representable = false;
        r.reason = "v(a* a) < 0 for some a";
        r.witness = e.vectors.col(0);
        return r;
    }
    const auto kernel = kernel_basis(h, tol);
    if (!kernel.is_empty()) {
        const Vector proj = kernel.columns().adjoint() * v.coeffs.conjugate();
        if (proj.norm() > tol.tol_eq * std::max(1.0, v.coeffs.norm())) {
            r.representable = false;
            r.reason = "v does not vanish on the null space of its form";
            r.witness = kernel.columns() * proj;
        }
    }
    return r;
}

Matrix GNSTriple::represent(const StarAlgebra& alg, const Vector& a) const {
    if (a.size() != alg.dim()) throw std::invalid_argument("element has wrong dimension");
    const Eigen::Index r = space.hilbert_dim();
    Matrix out = Matrix::Zero(r, r);
    for (Eigen::Index i = 0; i < a.size(); ++i) out += a(i) * rep[static_cast<std::size_t>(i)];
    return out;
}

GNSTriple gns(const StarAlgebra& alg, const Functional& v, const ToleranceConfig& tol) {
    const auto repr = is_representable(alg, v, tol);
    if (!repr.representable) {
        throw DomainError("functional is not representable: " + repr.reason,
                          Witness{repr.reason, *repr.witness, {}});
    }
    const Eigen::Index n = alg.dim();
    GNSTriple t;
    t.space = quotient_space(gram_form(alg, v, tol), tol);
    const Matrix& c = t.space.coord_map;
    const Matrix& lift = t.space.lift;

    t.rep.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        t.rep.push_back(c * alg.left_matrix(alg.basis(i)) * lift);
    }
    // <coord(a), ζ> = v(a) for all a  <=>  C^* ζ = conj(coeffs).
    t.cyclic = lift.adjoint() * v.coeffs.conjugate();

    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& pi = t.rep[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < n; ++j) {
            const Matrix prod = t.represent(alg, alg.products()[static_cast<std::size_t>(i * n + j)]);
            t.homomorphism_residual = std::max(
                t.homomorphism_residual, max_abs(prod - pi * t.rep[static_cast<std::size_t>(j)]));
        }
        t.star_residual = std::max(
            t.star_residual, max_abs(t.represent(alg, alg.star(alg.basis(i))) - pi.adjoint()));
        const Complex rebuilt = t.cyclic.dot(pi * t.cyclic);
        t.reconstruction_residual = std::max(t.reconstruction_residual, std::abs(v.coeffs(i) - rebuilt));
    }

    Matrix orbit(t.space.hilbert_dim(), n);
    for (Eigen::Index i = 0; i < n; ++i) orbit.col(i) = t.rep[static_cast<std::size_t>(i)] * t.cyclic;
    t.cyclic_spans = span_of(orbit, tol).size() == t.space.hilbert_dim();
    return t;
}

AbsoluteContinuity is_strongly_ac(const StarAlgebra& alg, const Functional& w,
                                  const Functional& v, const ToleranceConfig& tol) {
    return is_absolutely_continuous(gram_form(alg, w, tol), gram_form(alg, v, tol), tol);
}

RnElement rn_element(const StarAlgebra& alg, const Functional& w, const Functional& v,
                     const ToleranceConfig& tol) {
    const auto gw = gram_form(alg, w, tol);
    const auto gv = gram_form(alg, v, tol);
    const auto tw = gns(alg, w, tol);

    RnElement out;
    out.a0 = representing_vector(gw, gv, tw.cyclic, tol);
    out.x = quotient_space(gv, tol).coords(out.a0);
    const Vector a0_star = alg.star(out.a0);
    for (Eigen::Index i = 0; i < alg.dim(); ++i) {
        const Complex rhs = v(alg.multiply(a0_star, alg.basis(i)));
        out.residual = std::max(out.residual, std::abs(w.coeffs(i) - rhs));
    }
    out.uniform_defect = uniform_defect(gw, gv, tw.cyclic, out.a0, tol);
    return out;
}

WOperator rn_operator_w(const StarAlgebra& alg, const Functional& w, const Functional& v,
                        const ToleranceConfig& tol) {
    const auto gw = gram_form(alg, w, tol);
    const auto gv = gram_form(alg, v, tol);
    const auto rn = rn_operator(gw, gv, tol);
    const auto tv = gns(alg, v, tol);
    const auto tw = gns(alg, w, tol);
    const Eigen::Index n = alg.dim();

    WOperator out{psd_sqrt(rn.matrix, tol), rn.matrix, embedding(gw, gv, tol).matrix};

    Matrix images(tv.space.hilbert_dim(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
        images.col(i) = out.w.matrix() * (tv.rep[static_cast<std::size_t>(i)] * tv.cyclic);
    }
    out.w1_residual = max_abs(images.adjoint() * images - gw.gram().matrix());

    const Matrix& s = out.s.matrix();
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        out.intertwining_residual = std::max(
            out.intertwining_residual, max_abs(out.j * tv.rep[u] - tw.rep[u] * out.j));
        const Matrix pi_star = tv.represent(alg, alg.star(alg.basis(i)));
        out.w2_residual = std::max(out.w2_residual, max_abs(s * tv.rep[u] - pi_star.adjoint() * s));
    }
    return out;
}

ZetaTransport zeta_transport(const StarAlgebra& alg, const Functional& w, const Functional& v,
                             const ToleranceConfig& tol) {
    const auto op = rn_operator_w(alg, w, v, tol);
    const auto tv = gns(alg, v, tol);
    const auto tw = gns(alg, w, tol);
    ZetaTransport out;
    out.j_zeta_residual = (op.j * tv.cyclic - tw.cyclic).norm();
    const Vector w_zeta = op.w.matrix() * tv.cyclic;
    for (Eigen::Index i = 0; i < alg.dim(); ++i) {
        const Complex rhs = w_zeta.dot(op.w.matrix() * (tv.rep[static_cast<std::size_t>(i)] * tv.cyclic));
        out.identity_residual = std::max(out.identity_residual, std::abs(w.coeffs(i) - rhs));
    }
    return out;
}

int commutant_dimension(const std::vector<Matrix>& rep, const ToleranceConfig& tol) {
    if (rep.empty()) return 0;
    const Eigen::Index r = rep.front().rows();
    if (r == 0) return 0;
    const Eigen::Index r2 = r * r;
    // vec(X P - P X) = (P^T ⊗ I - I ⊗ P) vec(X), column-major vec.
    Matrix normal = Matrix::Zero(r2, r2);
    for (const auto& p : rep) {
        Matrix m = Matrix::Zero(r2, r2);
        for (Eigen::Index a = 0; a < r; ++a) {
            for (Eigen::Index b = 0; b < r; ++b) {
                m.block(a * r, b * r, r, r) -= (a == b ? p : Matrix::Zero(r, r));
                m.block(a * r, b * r, r, r).diagonal().array() += p(b, a);
            }
        }
        normal += m.adjoint() * m;
    }
    return static_cast<int>(kernel_basis(hermitian_part(normal), tol).size());
}

Domination domination_check(const StarAlgebra& alg, const Functional& w, const Functional& v,
                            const ToleranceConfig& tol) {
    const auto gw = gram_form(alg, w, tol);
    const auto gv = gram_form(alg, v, tol);
    const auto rn = rn_operator(gw, gv, tol);
    const auto tv = gns(alg, v, tol);

    Domination d;
    d.c_min = std::max(0.0, max_eigenvalue(rn.matrix));
    d.dominated = loewner_leq(gw.gram(), gv.gram().scaled(d.c_min), tol);
    if (d.c_min > 0.0) {
        const auto relaxed = gv.gram().scaled((1.0 - 1e-6) * d.c_min) - gw.gram();
        const double scale = std::max(1.0, max_abs(gw.gram().matrix()));
        d.c_min_tight = min_eigenvalue(relaxed) < -1e-13 * scale;
    }
    const Matrix& s = rn.matrix.matrix();
    double worst = 0.0;
    for (const auto& p : tv.rep) worst = std::max(worst, max_abs(s * p - p * s));
    d.in_commutant = worst <= tol.tol_eq * std::max(1.0, max_abs(s));
    d.commutant_dim = commutant_dimension(tv.rep, tol);
    return d;
}

Rigidity pure_rigidity(const StarAlgebra& alg, const Functional& w, const Functional& v,
                       const ToleranceConfig& tol) {
    require_cstar(alg, "pure_rigidity");
    const auto tv = gns(alg, v, tol);
    Rigidity out;
    out.is_irreducible = commutant_dimension(tv.rep, tol) == 1;
    out.absolutely_continuous = is_strongly_ac(alg, w, v, tol).absolutely_continuous;
    if (!out.is_irreducible || !out.absolutely_continuous) return out;

    const auto rn = rn_operator(gram_form(alg, w, tol), gram_form(alg, v, tol), tol);
    const Eigen::Index r = rn.matrix.dim();
    const double alpha = rn.matrix.matrix().trace().real() / static_cast<double>(r);
    const auto spread = eigh(rn.matrix.scaled(1.0) - HermitianMatrix::identity(r).scaled(alpha));
    out.alpha = alpha;
    out.w_squared_deviation = spread.values.cwiseAbs().maxCoeff();
    out.alpha_least_squares = v.coeffs.dot(w.coeffs).real() / v.coeffs.squaredNorm();
    out.proportionality_residual = (w.coeffs - alpha * v.coeffs).cwiseAbs().maxCoeff();
    return out;
}

double functional_norm(const StarAlgebra& alg, const Functional& w) {
    require_cstar(alg, "functional_norm");
    double total = 0.0;
    for (const auto& rho : block_densities(alg, w)) {
        // Singular values of ρ are the positive eigenvalues of [[0, ρ], [ρ^*, 0]].
        const Eigen::Index k = rho.rows();
        Matrix dilation = Matrix::Zero(2 * k, 2 * k);
        dilation.topRightCorner(k, k) = rho;
        dilation.bottomLeftCorner(k, k) = rho.adjoint();
        const auto e = eigh(hermitian_part(dilation));
        for (Eigen::Index i = 0; i < e.values.size(); ++i) total += std::max(0.0, e.values(i));
    }
    return total;
}

std::vector<double> approximation_norms(const StarAlgebra& alg, const Functional& w,
                                        const Functional& v, std::optional<int> stages,
                                        const ToleranceConfig& tol) {
    require_cstar(alg, "approximation_norms");
    const auto gw = gram_form(alg, w, tol);
    const auto gv = gram_form(alg, v, tol);
    const auto rn = rn_operator(gw, gv, tol);
    const auto tv = gns(alg, v, tol);
    const Matrix& s = rn.matrix.matrix();
    const Eigen::Index r = s.rows();

    // Ordered basis of range(S): spectral clusters by decreasing eigenvalue, each
    // rotated so its first vector points along the cluster's share of ζ_v.
    Matrix ordered(r, 0);
    if (r > 0) {
        const auto e = eigh(rn.matrix);
        const double top = e.values(r - 1);
        const double cutoff = rank_cutoff(top, tol);
        const double gap = tol.tol_eq * std::max(1.0, top);
        Eigen::Index i = r - 1;
        while (i >= 0 && e.values(i) > cutoff) {
            Eigen::Index j = i;
            while (j - 1 >= 0 && e.values(j - 1) > cutoff && e.values(i) - e.values(j - 1) <= gap) --j;
            const Matrix cluster = e.vectors.middleCols(j, i - j + 1);
            const Vector share = cluster.adjoint() * tv.cyclic;
            Matrix rotated = cluster;
            if (share.norm() > 1e-14) {
                const Eigen::HouseholderQR<Matrix> qr{Matrix(share)};
                rotated = cluster * Matrix(qr.householderQ());
            }
            ordered.conservativeResize(r, ordered.cols() + rotated.cols());
            ordered.rightCols(rotated.cols()) = rotated;
            i = j - 1;
        }
    }
    const auto rank = static_cast<int>(ordered.cols());
    const int last = stages.value_or(rank);
    if (last < 0) throw std::invalid_argument("stages must be >= 0");

    std::vector<double> norms;
    for (int n = 0; n <= last; ++n) {
        const Matrix basis = ordered.leftCols(std::min(n, rank));
        const Matrix proj = basis * basis.adjoint();
        const Vector x = proj * s * proj * tv.cyclic;
        const Vector a_n_star = alg.star(tv.space.lift * x);
        Functional w_n{Vector(alg.dim())};
        for (Eigen::Index k = 0; k < alg.dim(); ++k) {
            w_n.coeffs(k) = v(alg.multiply(a_n_star, alg.basis(k)));
        }
        norms.push_back(functional_norm(alg, w - w_n));
    }
    return norms;
}

}  // namespace rnforms::gns
