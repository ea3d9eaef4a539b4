#include "rnforms/setfunc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rnforms::setfunc {

FiniteRing::FiniteRing(std::vector<std::string> atom_labels) : labels_(std::move(atom_labels)) {
    if (labels_.empty()) throw std::invalid_argument("a ring needs at least one atom");
    const std::set<std::string> unique(labels_.begin(), labels_.end());
    if (unique.size() != labels_.size()) {
        throw std::invalid_argument("atom labels must be distinct");
    }
}

FiniteRing FiniteRing::unlabeled(std::size_t atom_count) {
    std::vector<std::string> labels;
    labels.reserve(atom_count);
    for (std::size_t i = 0; i < atom_count; ++i) labels.push_back("a" + std::to_string(i));
    return FiniteRing(std::move(labels));
}

std::size_t FiniteRing::index_of(const std::string& label) const {
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw std::out_of_range("unknown atom label '" + label + "'");
    return static_cast<std::size_t>(it - labels_.begin());
}

AtomSet FiniteRing::from_labels(const std::vector<std::string>& labels) const {
    AtomSet out;
    for (const auto& l : labels) out.push_back(index_of(l));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

AtomSet FiniteRing::from_mask(std::uint64_t mask) const {
    AtomSet out;
    for (std::size_t i = 0; i < atom_count(); ++i) {
        if (mask & (std::uint64_t{1} << i)) out.push_back(i);
    }
    return out;
}

std::uint64_t FiniteRing::element_count() const {
    if (atom_count() > 30) throw std::length_error("too many atoms to enumerate the ring");
    return std::uint64_t{1} << atom_count();
}

// ---------------------------------------------------------------------------

AdditiveSetFunction::AdditiveSetFunction(FiniteRing ring, Vector atom_values)
    : ring_(std::move(ring)), values_(std::move(atom_values)) {
    if (static_cast<std::size_t>(values_.size()) != ring_.atom_count()) {
        throw std::invalid_argument("one value per atom is required");
    }
}

bool AdditiveSetFunction::is_nonnegative() const {
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
        if (values_(i).imag() != 0.0 || values_(i).real() < 0.0) return false;
    }
    return true;
}

double AdditiveSetFunction::sup_abs() const {
    std::vector<double> critical;
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
        if (values_(i) == Complex{}) continue;
        // Re(e^{-iθ} β(a)) changes sign at θ = arg β(a) ± π/2.
        for (const double shift : {-std::numbers::pi / 2, std::numbers::pi / 2}) {
            critical.push_back(std::remainder(std::arg(values_(i)) + shift, 2 * std::numbers::pi));
        }
    }
    if (critical.empty()) return 0.0;
    std::sort(critical.begin(), critical.end());

    double best = 0.0;
    for (std::size_t k = 0; k < critical.size(); ++k) {
        const double next = k + 1 < critical.size() ? critical[k + 1]
                                                    : critical.front() + 2 * std::numbers::pi;
        const Complex dir = std::polar(1.0, -(critical[k] + next) / 2);
        Complex sum{};
        for (Eigen::Index i = 0; i < values_.size(); ++i) {
            if ((dir * values_(i)).real() > 0) sum += values_(i);
        }
        best = std::max(best, std::abs(sum));
    }
    return best;
}

AdditiveSetFunction AdditiveSetFunction::operator-(const AdditiveSetFunction& o) const {
    if (!(ring_ == o.ring_)) throw std::invalid_argument("set functions on different rings");
    return AdditiveSetFunction(ring_, values_ - o.values_);
}

SimpleFunction::SimpleFunction(FiniteRing ring, Vector atom_values)
    : ring_(std::move(ring)), values_(std::move(atom_values)) {
    if (static_cast<std::size_t>(values_.size()) != ring_.atom_count()) {
        throw std::invalid_argument("one value per atom is required");
    }
}

SimpleFunction SimpleFunction::indicator(const FiniteRing& ring, const AtomSet& e) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(ring.atom_count()));
    for (const auto a : e) {
        if (a >= ring.atom_count()) throw std::out_of_range("atom index out of range");
        v(static_cast<Eigen::Index>(a)) = 1.0;
    }
    return SimpleFunction(ring, v);
}

Complex SimpleFunction::integrate(const AdditiveSetFunction& beta) const {
    if (!(ring_ == beta.ring())) throw std::invalid_argument("functions on different rings");
    return (values_.array() * beta.atom_values().array()).sum();
}

// ---------------------------------------------------------------------------

Complex evaluate(const AdditiveSetFunction& f, const AtomSet& e) {
    Complex sum{};
    for (const auto a : e) {
        if (a >= f.atom_count()) {
            throw std::out_of_range("atom index " + std::to_string(a) + " out of range");
        }
        sum += f.atom_values()(static_cast<Eigen::Index>(a));
    }
    return sum;
}

AdditiveSetFunction total_variation(const AdditiveSetFunction& beta) {
    return AdditiveSetFunction(beta.ring(), beta.atom_values().cwiseAbs().cast<Complex>());
}

NonnegativeForm form_of(const AdditiveSetFunction& beta) {
    return NonnegativeForm::trusted(HermitianMatrix::diagonal(beta.atom_values().cwiseAbs()));
}

std::vector<bool> support(const AdditiveSetFunction& f, const ToleranceConfig& tol) {
    const RealVector mod = f.atom_values().cwiseAbs();
    const double cutoff = rank_cutoff(mod.size() ? mod.maxCoeff() : 0.0, tol);
    std::vector<bool> out(static_cast<std::size_t>(mod.size()));
    for (Eigen::Index i = 0; i < mod.size(); ++i) {
        out[static_cast<std::size_t>(i)] = mod(i) > cutoff;
    }
    return out;
}

SimpleFunction riesz_vector(const AdditiveSetFunction& beta, const ToleranceConfig& tol) {
    const auto supp = support(beta, tol);
    Vector hat = Vector::Zero(beta.atom_values().size());
    for (Eigen::Index i = 0; i < hat.size(); ++i) {
        if (supp[static_cast<std::size_t>(i)]) {
            const Complex b = beta.atom_values()(i);
            hat(i) = std::conj(b) / std::abs(b);
        }
    }
    return SimpleFunction(beta.ring(), hat);
}

namespace {

void require_nonnegative(const AdditiveSetFunction& alpha, const char* what) {
    if (!alpha.is_nonnegative()) {
        throw std::invalid_argument(std::string(what) + " must be nonnegative");
    }
}

void require_same_ring(const AdditiveSetFunction& a, const AdditiveSetFunction& b) {
    if (!(a.ring() == b.ring())) throw std::invalid_argument("set functions on different rings");
}

}  // namespace

AbsContinuity is_abs_continuous(const AdditiveSetFunction& beta,
                                const AdditiveSetFunction& alpha, const ToleranceConfig& tol) {
    require_same_ring(beta, alpha);
    require_nonnegative(alpha, "alpha");
    const auto supp_b = support(beta, tol);
    const auto supp_a = support(alpha, tol);
    AbsContinuity out;
    AtomSet bad;
    for (std::size_t i = 0; i < supp_b.size(); ++i) {
        if (supp_b[i] && !supp_a[i]) bad.push_back(i);
    }
    if (!bad.empty()) {
        out.absolutely_continuous = false;
        out.witness = bad;
    }
    return out;
}

EpsilonDeltaSearch epsilon_delta_search(const AdditiveSetFunction& beta,
                                        const AdditiveSetFunction& alpha,
                                        const ToleranceConfig& tol) {
    require_same_ring(beta, alpha);
    require_nonnegative(alpha, "alpha");
    const std::size_t m = beta.atom_count();
    if (m > 12) throw std::length_error("epsilon_delta_search is limited to 12 atoms");

    const auto var = total_variation(beta);
    const RealVector mod = beta.atom_values().cwiseAbs();
    const double top = mod.maxCoeff();
    const double beta_cutoff = rank_cutoff(top, tol);
    const double alpha_cutoff = rank_cutoff(alpha.atom_values().real().maxCoeff(), tol);

    std::vector<double> eps;
    const double big = var.atom_values().real().sum();
    if (big > beta_cutoff) {
        for (int j = 0; j <= 12; ++j) eps.push_back(big * std::pow(10.0, -j));
        double smallest = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < mod.size(); ++i) {
            if (mod(i) > beta_cutoff) smallest = std::min(smallest, mod(i));
        }
        eps.push_back(smallest);
    }

    EpsilonDeltaSearch out;
    const std::uint64_t count = std::uint64_t{1} << m;
    for (const double e : eps) {
        double delta = std::numeric_limits<double>::infinity();
        std::uint64_t arg = 0;
        for (std::uint64_t mask = 1; mask < count; ++mask) {
            const auto set = beta.ring().from_mask(mask);
            if (evaluate(var, set).real() >= e) {
                const double a = evaluate(alpha, set).real();
                if (a < delta) {
                    delta = a;
                    arg = mask;
                }
            }
        }
        out.eps_delta.emplace_back(e, delta);
        if (delta <= alpha_cutoff && !out.witness) {
            out.absolutely_continuous = false;
            out.witness = beta.ring().from_mask(arg);
        }
    }
    return out;
}

AdditiveSetFunction dominated_approximation(const AdditiveSetFunction& beta,
                                            const AdditiveSetFunction& alpha, double n) {
    require_same_ring(beta, alpha);
    require_nonnegative(beta, "beta");
    require_nonnegative(alpha, "alpha");
    Vector out(beta.atom_values().size());
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        out(i) = std::min(beta.atom_values()(i).real(), n * alpha.atom_values()(i).real());
    }
    return AdditiveSetFunction(beta.ring(), out);
}

DarstReport darst_representation(const AdditiveSetFunction& beta,
                                 const AdditiveSetFunction& alpha, const ToleranceConfig& tol) {
    const auto ac = is_abs_continuous(beta, alpha, tol);
    if (!ac.absolutely_continuous) {
        std::ostringstream msg;
        msg << "beta is not absolutely continuous with respect to alpha: alpha vanishes on {";
        for (std::size_t i = 0; i < ac.witness->size(); ++i) {
            msg << (i ? "," : "") << beta.ring().labels()[(*ac.witness)[i]];
        }
        msg << "} where |beta| does not";
        throw DomainError(msg.str(), Witness{"E with alpha(E) = 0 < |beta|(E)", {}, *ac.witness});
    }

    const auto supp_a = support(alpha, tol);
    const Eigen::Index m = beta.atom_values().size();
    const auto& ring = beta.ring();

    Vector direct = Vector::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (supp_a[static_cast<std::size_t>(i)]) {
            direct(i) = beta.atom_values()(i) / alpha.atom_values()(i).real();
        }
    }

    const auto b = form_of(beta);
    const auto a = form_of(alpha);
    const Vector hat = quotient_space(b, tol).coords(riesz_vector(beta, tol).atom_values());
    const Vector via_forms = representing_vector(b, a, hat, tol).conjugate();

    const auto sup_variation = [&](const Vector& phi) {
        const Vector induced = phi.cwiseProduct(alpha.atom_values());
        return total_variation(beta - AdditiveSetFunction(ring, induced)).atom_values().real().sum();
    };

    DarstReport out;
    out.density_direct = SimpleFunction(ring, direct);
    out.density_via_forms = SimpleFunction(ring, via_forms);
    out.sup_variation_direct = sup_variation(direct);
    out.sup_variation_via_forms = sup_variation(via_forms);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (supp_a[static_cast<std::size_t>(i)]) {
            out.route_gap = std::max(out.route_gap, std::abs(direct(i) - via_forms(i)));
        }
    }
    return out;
}

BridgeReport bridge_check(const AdditiveSetFunction& beta, const AdditiveSetFunction& alpha,
                          const ToleranceConfig& tol) {
    BridgeReport r;
    r.set_function_ac = is_abs_continuous(beta, alpha, tol).absolutely_continuous;
    r.form_ac = is_absolutely_continuous(form_of(beta), form_of(alpha), tol).absolutely_continuous;
    return r;
}

}  // namespace rnforms::setfunc
