#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rnforms/errors.hpp"
#include "rnforms/linalg.hpp"

namespace rnforms::measures {

/// Finite measure on m atoms. Zero weights are exact zeros: a weight is
/// null only when it equals 0.0, so geometric test families with tiny
/// masses are not truncated by a rank cutoff.
class FiniteMeasureSpace {
public:
    FiniteMeasureSpace() = default;
    explicit FiniteMeasureSpace(RealVector weights);

    std::size_t atom_count() const { return static_cast<std::size_t>(weights_.size()); }
    const RealVector& weights() const { return weights_; }
    double operator[](std::size_t a) const { return weights_(static_cast<Eigen::Index>(a)); }
    double total_mass() const { return weights_.sum(); }
    double measure(const std::vector<std::size_t>& set) const;

private:
    RealVector weights_;
};

/// Atomwise function on a finite measure space.
using MeasurableFunction = Vector;

/// ∫ f conj(g) dμ.
Complex inner(const FiniteMeasureSpace& mu, const MeasurableFunction& f,
              const MeasurableFunction& g);

/// Throws DomainError (witness: the offending atom) unless μ(a) = 0 ⟹ ν(a) = 0.
void require_absolutely_continuous(const FiniteMeasureSpace& mu, const FiniteMeasureSpace& nu);

/**
 * @brief Adjoint of the embedding J : L^2(μ) -> L^2(ν).
 *
 * <Jφ, f>_ν = Σ φ conj(f) ν = <φ, f ν/μ>_μ, so (J^* f)(a) = f(a) ν(a)/μ(a)
 * on the μ-support and 0 off it.
 */
MeasurableFunction adjoint_apply(const FiniteMeasureSpace& mu, const FiniteMeasureSpace& nu,
                                 const MeasurableFunction& f);

/// max over indicators χ_E of |<Jχ_E, f>_ν - <χ_E, J^* f>_μ|, over all 2^m sets
/// when m <= 16 and over singletons otherwise.
double adjoint_identity_residual(const FiniteMeasureSpace& mu, const FiniteMeasureSpace& nu,
                                 const MeasurableFunction& f);

struct LatticeReport {
    MeasurableFunction abs_f;
    MeasurableFunction f_meet_g;
    MeasurableFunction one_meet_f;
    double max_identity_residual = 0.0;  ///< adjoint identity over |f|, f∧g, 1∧f
    bool positivity_holds = true;        ///< J^* maps the nonnegative inputs to nonnegative outputs
    /// |<|f|, φ>_ν| <= sup_{|ψ| <= |φ|} |<f, ψ>_ν| on the supplied test functions;
    /// the sup is attained at ψ = |φ| · phase(f) atomwise.
    bool abs_inequality_holds = true;
};

/// Closure of dom J^* under |·|, ∧ and the Stone property 1 ∧ f. @p f and @p g
/// must be real-valued.
LatticeReport lattice_closure_checks(const FiniteMeasureSpace& mu, const FiniteMeasureSpace& nu,
                                     const MeasurableFunction& f, const MeasurableFunction& g,
                                     const std::vector<MeasurableFunction>& test_functions = {});

struct RnStage {
    MeasurableFunction f_n;        ///< 1 ∧ max_{k<=n} |g_k|
    MeasurableFunction adjoint_f;  ///< J^* f_n
};

struct RnDerivative {
    MeasurableFunction derivative;
    std::vector<RnStage> stages;
    bool monotone = true;
    /// max over n >= m of | ∫|J^*f_n - J^*f_m| dμ - <f_n - f_m, 1>_ν |.
    double cauchy_residual = 0.0;
    /// max over all sets E of |ν(E) - ∫_E f dμ| (singletons when m > 16).
    double representation_residual = 0.0;
};

/**
 * @brief dν/dμ through the embedding-operator construction.
 *
 * Forms f_n = 1 ∧ (⋁_{k<=n} |g_k|) from an approximating sequence g_n -> 1
 * in L^2(ν), applies J^*, and takes the last stage as the limit. The
 * sequence must reach 1 on the ν-support at its final stage (it is finite,
 * so its limit must be attained); an empty sequence means g_1 = 1.
 */
RnDerivative rn_derivative(const FiniteMeasureSpace& mu, const FiniteMeasureSpace& nu,
                           const std::vector<MeasurableFunction>& approximating_sequence = {});

/// Stock approximating sequences for testing the staged construction.
std::vector<MeasurableFunction> indicator_growth_sequence(std::size_t atom_count);
std::vector<MeasurableFunction> phase_ramp_sequence(std::size_t atom_count, std::size_t stages);

struct L2Report {
    bool in_l2 = true;
    /// Smallest C with |∫φ dν|^2 <= C ∫|φ|^2 dμ. By Cauchy–Schwarz
    /// |<φ, dν/dμ>_μ|^2 <= |φ|_μ^2 |dν/dμ|_μ^2 with equality at φ = dν/dμ,
    /// so C_min = ∫ (dν/dμ)^2 dμ = Σ ν(a)^2 / μ(a).
    double c_min = 0.0;
    MeasurableFunction adjoint_of_one;  ///< J^* 1
    double witness_ratio = 0.0;         ///< ratio attained at φ = J^* 1
};

L2Report l2_report(const FiniteMeasureSpace& mu, const FiniteMeasureSpace& nu);

/// |∫φ dν|^2 / ∫|φ|^2 dμ (0 when the denominator vanishes).
double domination_ratio(const FiniteMeasureSpace& mu, const FiniteMeasureSpace& nu,
                        const MeasurableFunction& phi);

/// Member k of a family of finite spaces with growing atom count.
struct TruncationFamily {
    std::string name;
    std::function<std::pair<FiniteMeasureSpace, FiniteMeasureSpace>(int k)> member;

    /// μ(a_j) = 2^{-j}/j^2, ν(a_j) = 2^{-j}/j; derivative j, C_min_k = Σ 2^{-j}.
    static TruncationFamily convergent();
    /// μ(a_j) = 4^{-j}, ν(a_j) = 2^{-j}; derivative 2^j, C_min_k = k.
    static TruncationFamily divergent();
    /// ν = μ with μ(a_j) = 2^{-j}; C_min_k = μ_k(T).
    static TruncationFamily identity();
    /// Throws std::invalid_argument for names other than the three above.
    static TruncationFamily preset(const std::string& name);
};

/// (k, C_min_k) for k = 1..max_k.
std::vector<std::pair<int, double>> truncation_divergence(const TruncationFamily& family,
                                                          int max_k);

}  // namespace rnforms::measures
