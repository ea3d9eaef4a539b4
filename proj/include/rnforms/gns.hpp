#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rnforms/forms.hpp"

namespace rnforms::gns {

/**
 * @brief Finite-dimensional *-algebra in a fixed basis e_0 .. e_{n-1}.
 *
 * products[i*n + j] holds the coordinates of e_i e_j. The involution is
 * conjugate-linear: a^* = involution * conj(a). Associativity, involutivity
 * and (ab)^* = b^* a^* are checked on construction to 1e-12 (relative to the
 * largest structure constant).
 */
class StarAlgebra {
public:
    StarAlgebra(std::vector<Vector> products, Matrix involution,
                std::optional<Vector> unit = std::nullopt,
                std::optional<std::vector<int>> block_sizes = std::nullopt);

    /// Full matrix algebra M_k in the matrix-unit basis E_pq, index p*k + q.
    static StarAlgebra matrix_algebra(int k);
    /// M_{k_1} ⊕ ... ⊕ M_{k_r}, matrix units block after block.
    static StarAlgebra direct_sum(const std::vector<int>& block_sizes);
    /// Group algebra of Z_k in the basis g^0 .. g^{k-1}; (g^j)^* = g^{-j}.
    static StarAlgebra group_algebra_cyclic(int k);

    Eigen::Index dim() const { return dim_; }
    const std::vector<Vector>& products() const { return products_; }
    const Matrix& involution() const { return involution_; }
    const std::optional<Vector>& unit() const { return unit_; }

    /// Present iff the algebra is a direct sum of full matrix blocks in the
    /// matrix-unit basis (a C*-algebra with its canonical norm).
    const std::optional<std::vector<int>>& block_sizes() const { return blocks_; }
    bool is_cstar_type() const { return blocks_.has_value(); }

    Vector basis(Eigen::Index i) const;
    Vector multiply(const Vector& a, const Vector& b) const;
    Vector star(const Vector& a) const;
    /// Matrix of b -> a b.
    Matrix left_matrix(const Vector& a) const;
    /// Matrix of a -> a b.
    Matrix right_matrix(const Vector& b) const;

private:
    Eigen::Index dim_ = 0;
    std::vector<Vector> products_;
    Matrix involution_;
    std::optional<Vector> unit_;
    std::optional<std::vector<int>> blocks_;
    std::vector<Matrix> left_;  // left_[i] = left_matrix(e_i)
};

/// Linear functional v(a) = Σ coeffs_i a_i.
struct Functional {
    Vector coeffs;
    Complex operator()(const Vector& a) const { return coeffs.transpose() * a; }
    Functional operator-(const Functional& o) const { return {coeffs - o.coeffs}; }
    Functional scaled(double c) const { return {coeffs * c}; }
};

/// a -> Σ_b Tr(ρ_b a_b) on a C*-type algebra; one density per block.
Functional density_functional(const StarAlgebra& alg, const std::vector<Matrix>& densities);
/// Trace summed over blocks.
Functional trace_functional(const StarAlgebra& alg);
/// a -> <a ψ, ψ> on block @p block.
Functional vector_state(const StarAlgebra& alg, const Vector& psi, std::size_t block = 0);
/// Block densities ρ_b with ρ_b(q, p) = w(E_pq).
std::vector<Matrix> block_densities(const StarAlgebra& alg, const Functional& w);

/// G(j, i) = v(e_j^* e_i), so v(b^* a) = b^* G a in coordinates.
Matrix gram_matrix(const StarAlgebra& alg, const Functional& v);

/// The form a, b -> v(b^* a). Throws std::invalid_argument unless positive.
NonnegativeForm gram_form(const StarAlgebra& alg, const Functional& v,
                          const ToleranceConfig& tol = {});

struct Representability {
    bool representable = true;
    std::string reason;
    std::optional<Vector> witness;  ///< algebra element exhibiting the failure
};

/**
 * @brief Does v admit a GNS triple?
 *
 * Requires the Gram matrix to be Hermitian PSD and the Riesz functional
 * a + N_v -> v(a) to be well defined, which in finite dimension means
 * conj(v(e_i))_i ∈ range(G): v must vanish on the null space of its form.
 */
Representability is_representable(const StarAlgebra& alg, const Functional& v,
                                  const ToleranceConfig& tol = {});

struct GNSTriple {
    QuotientHilbert space;
    std::vector<Matrix> rep;  ///< π(e_i) in H_v coordinates
    Vector cyclic;            ///< ζ_v

    double homomorphism_residual = 0.0;   ///< max |π(e_i e_j) - π(e_i) π(e_j)|
    double star_residual = 0.0;           ///< max |π(e_i^*) - π(e_i)^*|
    double reconstruction_residual = 0.0; ///< max |v(e_i) - <π(e_i) ζ, ζ>|
    bool cyclic_spans = true;             ///< span{π(e_i) ζ} = H_v

    Matrix represent(const StarAlgebra& alg, const Vector& a) const;
};

/// GNS construction. Throws DomainError (witness: algebra element) when v is
/// not representable.
GNSTriple gns(const StarAlgebra& alg, const Functional& v, const ToleranceConfig& tol = {});

/// w ≪ v in the strong sense: the form of w is absolutely continuous with
/// respect to the form of v. The witness is an algebra element a with
/// v(a^* a) = 0 < w(a^* a).
AbsoluteContinuity is_strongly_ac(const StarAlgebra& alg, const Functional& w,
                                  const Functional& v, const ToleranceConfig& tol = {});

struct RnElement {
    Vector x;   ///< in H_v: w(a) = <coord_v(a), x>
    Vector a0;  ///< algebra element with w(a) = v(a0^* a)
    double residual = 0.0;        ///< max_i |w(e_i) - v(a0^* e_i)|
    double uniform_defect = 0.0;  ///< sup over {w(a^*a) + v(a^*a) <= 1}
};

RnElement rn_element(const StarAlgebra& alg, const Functional& w, const Functional& v,
                     const ToleranceConfig& tol = {});

struct WOperator {
    HermitianMatrix w;       ///< W = S^{1/2} on H_v
    HermitianMatrix s;       ///< S = W^2 = J^* J
    Matrix j;                ///< J : H_v -> H_w
    double w1_residual = 0.0;            ///< w(b^* a) vs <W π(a) ζ, W π(b) ζ>
    double intertwining_residual = 0.0;  ///< max |J π_v(e_i) - π_w(e_i) J|
    double w2_residual = 0.0;            ///< <W π(a) ξ, W η> vs <W ξ, W π(a^*) η>
};

WOperator rn_operator_w(const StarAlgebra& alg, const Functional& w, const Functional& v,
                        const ToleranceConfig& tol = {});

struct ZetaTransport {
    double j_zeta_residual = 0.0;  ///< |J ζ_v - ζ_w|
    double identity_residual = 0.0;  ///< max_i |w(e_i) - <W π(e_i) ζ_v, W ζ_v>|
};

ZetaTransport zeta_transport(const StarAlgebra& alg, const Functional& w, const Functional& v,
                             const ToleranceConfig& tol = {});

/// Dimension of {X : X π_i = π_i X for all i}.
int commutant_dimension(const std::vector<Matrix>& rep, const ToleranceConfig& tol = {});

struct Domination {
    bool dominated = false;   ///< w <= c_min v verified
    double c_min = 0.0;       ///< λ_max(W^2)
    bool c_min_tight = true;  ///< (1 - 1e-6) c_min v - w is not PSD
    bool in_commutant = false;
    int commutant_dim = 0;
};

Domination domination_check(const StarAlgebra& alg, const Functional& w, const Functional& v,
                            const ToleranceConfig& tol = {});

struct Rigidity {
    bool is_irreducible = false;
    bool absolutely_continuous = false;
    std::optional<double> alpha;            ///< from W^2 = α I
    std::optional<double> alpha_least_squares;
    double proportionality_residual = 0.0;  ///< max_i |w(e_i) - α v(e_i)|
    double w_squared_deviation = 0.0;       ///< |W^2 - α I| in operator norm
};

/// Requires a C*-type algebra (std::invalid_argument otherwise).
Rigidity pure_rigidity(const StarAlgebra& alg, const Functional& w, const Functional& v,
                       const ToleranceConfig& tol = {});

/**
 * @brief Norm of w as a functional on a C*-type algebra.
 *
 * The dual of the block-max operator norm is the sum of block trace norms
 * of the densities. Requires a C*-type algebra.
 */
double functional_norm(const StarAlgebra& alg, const Functional& w);

/**
 * @brief |w - w_n| for w_n(a) = v(a_n^* a), n = 0 .. stages.
 *
 * a_n lifts S_n ζ_v where S_n keeps the n largest spectral pieces of
 * S = W^2. Inside a degenerate eigenspace the first basis vector is the
 * direction of ζ_v, so each S_n agrees on ζ_v with a spectral projection
 * and the sequence is nonincreasing. @p stages defaults to rank(W).
 */
std::vector<double> approximation_norms(const StarAlgebra& alg, const Functional& w,
                                        const Functional& v,
                                        std::optional<int> stages = std::nullopt,
                                        const ToleranceConfig& tol = {});

}  // namespace rnforms::gns
