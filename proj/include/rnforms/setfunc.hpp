#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rnforms/forms.hpp"

namespace rnforms::setfunc {

/// Index set of atoms; a member of the ring is the union of these atoms.
using AtomSet = std::vector<std::size_t>;

/**
 * A finite ring of sets, kept as its atoms. Every finite ring is the set of
 * unions of its atoms, so members are addressed by atom-index sets and the
 * 2^m elements are enumerated on demand.
 */
class FiniteRing {
public:
    FiniteRing() = default;
    explicit FiniteRing(std::vector<std::string> atom_labels);
    static FiniteRing unlabeled(std::size_t atom_count);

    std::size_t atom_count() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }

    /// Index of the atom with this label; throws std::out_of_range if absent.
    std::size_t index_of(const std::string& label) const;
    AtomSet from_labels(const std::vector<std::string>& labels) const;
    /// Members of the ring as bitmasks 0 .. 2^m - 1 (m <= 30).
    AtomSet from_mask(std::uint64_t mask) const;
    std::uint64_t element_count() const;

    bool operator==(const FiniteRing& o) const { return labels_ == o.labels_; }

private:
    std::vector<std::string> labels_;
};

/// Complex additive set function: β(E) = Σ_{a ∈ E} β(a).
class AdditiveSetFunction {
public:
    AdditiveSetFunction() = default;
    AdditiveSetFunction(FiniteRing ring, Vector atom_values);

    const FiniteRing& ring() const { return ring_; }
    const Vector& atom_values() const { return values_; }
    std::size_t atom_count() const { return ring_.atom_count(); }

    bool is_nonnegative() const;
    /// M = sup_E |β(E)|. The optimal E for a complex β is a half-plane
    /// selection {a : Re(e^{-iθ} β(a)) > 0}; all critical θ are scanned.
    double sup_abs() const;

    AdditiveSetFunction operator-(const AdditiveSetFunction& o) const;

private:
    FiniteRing ring_;
    Vector values_;
};

/// ℛ-simple function: constant on atoms.
class SimpleFunction {
public:
    SimpleFunction() = default;
    SimpleFunction(FiniteRing ring, Vector atom_values);
    static SimpleFunction indicator(const FiniteRing& ring, const AtomSet& e);

    const FiniteRing& ring() const { return ring_; }
    const Vector& atom_values() const { return values_; }

    /// ∫ f dβ.
    Complex integrate(const AdditiveSetFunction& beta) const;

private:
    FiniteRing ring_;
    Vector values_;
};

Complex evaluate(const AdditiveSetFunction& f, const AtomSet& e);

/// |β| on the finite ring: atomwise modulus.
AdditiveSetFunction total_variation(const AdditiveSetFunction& beta);

/// 𝔟(φ, ψ) = ∫ φ conj(ψ) d|β|, diagonal in the atom basis.
NonnegativeForm form_of(const AdditiveSetFunction& beta);

/// β̂ with ∫ φ dβ = <φ, β̂>_𝔟: conj(β(a)) / |β|(a) on the support, 0 off it.
SimpleFunction riesz_vector(const AdditiveSetFunction& beta, const ToleranceConfig& tol = {});

/// Atoms carrying mass above the shared rank cutoff.
std::vector<bool> support(const AdditiveSetFunction& f, const ToleranceConfig& tol = {});

struct AbsContinuity {
    bool absolutely_continuous = true;
    std::optional<AtomSet> witness;  ///< E with α(E) = 0 < |β|(E)
};

/**
 * @brief ε–δ absolute continuity of β with respect to nonnegative α.
 *
 * On a finite ring inf{α(E) : |β|(E) >= ε} is a minimum over finitely many
 * sets, so the ε–δ condition holds iff α(E) = 0 forces |β|(E) = 0, i.e.
 * support(|β|) ⊆ support(α) atomwise.
 */
AbsContinuity is_abs_continuous(const AdditiveSetFunction& beta,
                                const AdditiveSetFunction& alpha,
                                const ToleranceConfig& tol = {});

/// Outcome of the literal ε–δ search over all 2^m ring elements.
struct EpsilonDeltaSearch {
    bool absolutely_continuous = true;
    /// For each ε tried: the largest admissible δ = min{α(E) : |β|(E) >= ε}
    /// (infinite when no set reaches ε). A zero δ means the condition fails.
    std::vector<std::pair<double, double>> eps_delta;
    std::optional<AtomSet> witness;
};

/// Scans ε = M·10^{-j}, j = 0..12, plus the smallest positive |β|(atom).
/// Requires m <= 12.
EpsilonDeltaSearch epsilon_delta_search(const AdditiveSetFunction& beta,
                                        const AdditiveSetFunction& alpha,
                                        const ToleranceConfig& tol = {});

/// β_n(a) = min(β(a), n·α(a)).
AdditiveSetFunction dominated_approximation(const AdditiveSetFunction& beta,
                                            const AdditiveSetFunction& alpha, double n);

struct DarstReport {
    SimpleFunction density_direct;      ///< β(a)/α(a) on support(α)
    SimpleFunction density_via_forms;   ///< conj(representing vector of β̂)
    double sup_variation_direct = 0.0;  ///< |β - β_φ|(T)
    double sup_variation_via_forms = 0.0;
    double route_gap = 0.0;             ///< max over support(α) of |φ_1 - φ_2|
};

/**
 * @brief Density φ with β(E) = ∫_E φ dα, computed two ways.
 *
 * The second route goes through the forms machinery: β̂ ∈ H_𝔟, its
 * representing vector ψ in D relative to 𝔞, and φ = conj(ψ).
 * Throws DomainError (witness: atom set) unless β ≪ α.
 */
DarstReport darst_representation(const AdditiveSetFunction& beta,
                                 const AdditiveSetFunction& alpha,
                                 const ToleranceConfig& tol = {});

struct BridgeReport {
    bool set_function_ac = false;
    bool form_ac = false;
    bool agree() const { return set_function_ac == form_ac; }
};

/// Compares ε–δ absolute continuity of β w.r.t. α with 𝔟 ≪ 𝔞.
BridgeReport bridge_check(const AdditiveSetFunction& beta, const AdditiveSetFunction& alpha,
                          const ToleranceConfig& tol = {});

}  // namespace rnforms::setfunc
