#pragma once

#include <optional>

#include "rnforms/errors.hpp"
#include "rnforms/linalg.hpp"

namespace rnforms {

/**
 * @brief Nonnegative Hermitian form s(x, y) = y^* G x on C^dim.
 *
 * The Gram matrix is validated PSD to tol_psd at construction.
 */
class NonnegativeForm {
public:
    NonnegativeForm() = default;
    explicit NonnegativeForm(HermitianMatrix gram, const ToleranceConfig& tol = {});

    /// Skips the PSD check; for Gram matrices that are PSD by construction.
    static NonnegativeForm trusted(HermitianMatrix gram);
    static NonnegativeForm zero(Eigen::Index dim);

    Eigen::Index dim() const { return gram_.dim(); }
    const HermitianMatrix& gram() const { return gram_; }

    Complex operator()(const Vector& x, const Vector& y) const;
    NonnegativeForm scaled(double c) const;

private:
    HermitianMatrix gram_;
};

/**
 * @brief The Hilbert space H_s = D / N_s in explicit coordinates.
 *
 * coord_map has one row sqrt(λ_i) v_i^* per eigenpair of the Gram matrix
 * above the rank cutoff, so <coord(x), coord(y)> = s(x, y) exactly.
 * lift is the minimum-norm right inverse (the pseudoinverse) of coord_map.
 */
struct QuotientHilbert {
    Matrix coord_map;  ///< hilbert_dim x ambient_dim
    Matrix lift;       ///< ambient_dim x hilbert_dim

    Eigen::Index ambient_dim() const { return coord_map.cols(); }
    Eigen::Index hilbert_dim() const { return coord_map.rows(); }
    Vector coords(const Vector& x) const { return coord_map * x; }
};

QuotientHilbert quotient_space(const NonnegativeForm& s, const ToleranceConfig& tol = {});

/// Canonical embedding x + N_t -> x + N_s from H_t into H_s.
struct EmbeddingOperator {
    Matrix matrix;  ///< hilbert_dim(s) x hilbert_dim(t)
    QuotientHilbert domain;    ///< H_t
    QuotientHilbert codomain;  ///< H_s
};

struct AbsoluteContinuity {
    bool absolutely_continuous = true;
    /// When not absolutely continuous: x with t(x,x) = 0 < s(x,x), a constant
    /// (t,s)-sequence along which s does not vanish.
    std::optional<Vector> witness;
};

/**
 * @brief Is s absolutely continuous with respect to t?
 *
 * In finite dimension every (t,s)-sequence converges in the s-seminorm, and
 * the definition reduces to ker t ⊆ ker s: if some x has t(x,x) = 0 but
 * s(x,x) > 0 the constant sequence x_n = x violates it; conversely a
 * t-null sequence has its ker t-complement component going to zero, on which
 * s is bounded by a multiple of t.
 */
AbsoluteContinuity is_absolutely_continuous(const NonnegativeForm& s, const NonnegativeForm& t,
                                            const ToleranceConfig& tol = {});

/// Throws DomainError (witness: a vector of ker t outside ker s) unless s ≪ t.
EmbeddingOperator embedding(const NonnegativeForm& s, const NonnegativeForm& t,
                            const ToleranceConfig& tol = {});

struct ParallelSumLimit {
    HermitianMatrix limit;
    int doublings = 0;
    double last_increment = 0.0;
};

/// lim_k s : (2^k t), doubling until the Frobenius increment drops below
/// tol_eq or max_parallel_sum_doublings is reached.
ParallelSumLimit parallel_sum_limit(const NonnegativeForm& s, const NonnegativeForm& t,
                                    const ToleranceConfig& tol = {});

struct Decomposition {
    NonnegativeForm ac_part;
    NonnegativeForm sing_part;
    /// Frobenius distance between the projection formula and the
    /// parallel-sum limit for the absolutely continuous part.
    double oracle_gap = 0.0;
    int oracle_doublings = 0;
};

/**
 * @brief Lebesgue decomposition s = s_a + s_s relative to t.
 *
 * With A = s^{1/2} and P the projection onto span(A ker t):
 * s_s = A P A and s_a = s - s_s. Cross-checked against the parallel-sum
 * limit; a gap above 1e-6 * max(1, |s|_F) throws std::runtime_error.
 */
Decomposition lebesgue_decompose(const NonnegativeForm& s, const NonnegativeForm& t,
                                 const ToleranceConfig& tol = {});

/// True iff s : t vanishes, i.e. range(s^{1/2}) ∩ range(t^{1/2}) = {0}.
bool is_singular(const NonnegativeForm& s, const NonnegativeForm& t,
                 const ToleranceConfig& tol = {});

struct RNOperator {
    HermitianMatrix matrix;  ///< S = J^* J on H_t coordinates
    QuotientHilbert base;    ///< H_t
};

/// S with <S^{1/2} x, S^{1/2} y>_t = s(x, y). Throws DomainError unless s ≪ t.
RNOperator rn_operator(const NonnegativeForm& s, const NonnegativeForm& t,
                       const ToleranceConfig& tol = {});

/// max over basis pairs |<S^{1/2} e_i, S^{1/2} e_j>_t - s(e_i, e_j)|.
double rn_identity_residual(const NonnegativeForm& s, const RNOperator& rn,
                            const ToleranceConfig& tol = {});

/**
 * @brief x* in D with <x, f>_s = <x, x*>_t for every x in D.
 *
 * @p f is given in H_s coordinates. Finite dimension puts all of H_s in the
 * domain of J^*, so x* = lift_t(J^* f) is exact and no approximating
 * sequence is needed.
 */
Vector representing_vector(const NonnegativeForm& s, const NonnegativeForm& t, const Vector& f,
                           const ToleranceConfig& tol = {});

/// Same, for the class of @p y ∈ D in H_s.
Vector representing_vector_of(const NonnegativeForm& s, const NonnegativeForm& t,
                              const Vector& y, const ToleranceConfig& tol = {});

/**
 * @brief sup over {x : s(x,x) + t(x,x) <= 1} of |<x, f>_s - <x, x_cand>_t|.
 *
 * The difference is a linear functional x -> l^* x; its sup over the
 * ellipsoid is sqrt(l^* (G_s + G_t)^+ l). Returns +infinity when l has a
 * component in ker(G_s + G_t), where the set is unbounded.
 */
double uniform_defect(const NonnegativeForm& s, const NonnegativeForm& t, const Vector& f,
                      const Vector& x_cand, const ToleranceConfig& tol = {});

/**
 * @brief Point evaluation at 0 versus L^2[-1,1], discretised on hat functions.
 *
 * D_k is spanned by the piecewise-linear hats on the 2k+1 uniform nodes of
 * [-1, 1]; node k sits at 0. s_k evaluates at 0, t_k is the exact hat mass
 * matrix, psi_k is the tent max(0, 1 - k|x|) and phi_k the discrete
 * representer of evaluation at 0, t_k^{-1} e_k, which integrates to 1.
 */
struct DiracLebesgueStage {
    int k = 0;
    NonnegativeForm s;
    NonnegativeForm t;
    Vector psi;
    Vector phi;
    /// max over hats φ_j of |φ_j(0) - <φ_j, phi>_t|.
    double represent_residual = 0.0;
    /// ∫ phi dλ, computed as <phi, 1>_t.
    double phi_integral = 0.0;
};

DiracLebesgueStage dirac_lebesgue_family(int k);

}  // namespace rnforms
