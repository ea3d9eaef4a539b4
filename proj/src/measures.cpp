#include "rnforms/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rnforms::measures {

FiniteMeasureSpace::FiniteMeasureSpace(RealVector weights) : weights_(std::move(weights)) {
    if (weights_.size() == 0) throw std::invalid_argument("a measure space needs atoms");
    for (Eigen::Index i = 0; i < weights_.size(); ++i) {
        if (!(weights_(i) >= 0.0) || !std::isfinite(weights_(i))) {
            throw std::invalid_argument("atom weights must be finite and nonnegative");
        }
    }
}

double FiniteMeasureSpace::measure(const std::vector<std::size_t>& set) const {
    double sum = 0.0;
    for (const auto a : set) {
        if (a >= atom_count()) throw std::out_of_range("atom index out of range");
        sum += (*this)[a];
    }
    return sum;
}

Complex inner(const FiniteMeasureSpace& mu, const MeasurableFunction& f,
              const MeasurableFunction& g) {
    if (f.size() != mu.weights().size() || g.size() != mu.weights().size()) {
        throw std::invalid_argument("function does not match the measure space");
    }
    return (f.array() * g.conjugate().array() * mu.weights().cast<Complex>().array()).sum();
}

namespace {

void require_compatible(const FiniteMeasureSpace& mu, const FiniteMeasureSpace& nu) {
    if (mu.atom_count() != nu.atom_count()) {
        throw std::invalid_argument("measures live on different atom sets");
    }
}

template <typename Visit>
void for_each_test_set(std::size_t m, Visit visit) {
    if (m <= 16) {
        for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
            Vector chi = Vector::Zero(static_cast<Eigen::Index>(m));
            for (std::size_t i = 0; i < m; ++i) {
                if (mask & (std::uint64_t{1} << i)) chi(static_cast<Eigen::Index>(i)) = 1.0;
            }
            visit(chi);
        }
    } else {
        for (std::size_t i = 0; i < m; ++i) {
            Vector chi = Vector::Zero(static_cast<Eigen::Index>(m));
            chi(static_cast<Eigen::Index>(i)) = 1.0;
            visit(chi);
        }
    }
}

}  // namespace

void require_absolutely_continuous(const FiniteMeasureSpace& mu, const FiniteMeasureSpace& nu) {
    require_compatible(mu, nu);
    for (std::size_t a = 0; a < mu.atom_count(); ++a) {
        if (mu[a] == 0.0 && nu[a] != 0.0) {
            std::ostringstream msg;
            msg << "nu is not absolutely continuous with respect to mu: atom " << a
                << " has mu = 0, nu = " << nu[a];
            throw DomainError(msg.str(), Witness{"atom with mu = 0 < nu", {}, {a}});
        }
    }
}

MeasurableFunction adjoint_apply(const FiniteMeasureSpace& mu, const FiniteMeasureSpace& nu,
                                 const MeasurableFunction& f) {
    require_absolutely_continuous(mu, nu);
    if (static_cast<std::size_t>(f.size()) != mu.atom_count()) {
        throw std::invalid_argument("function does not match the measure space");
    }
    MeasurableFunction out = MeasurableFunction::Zero(f.size());
    for (Eigen::Index a = 0; a < f.size(); ++a) {
        const auto u = static_cast<std::size_t>(a);
        if (mu[u] != 0.0) out(a) = f(a) * (nu[u] / mu[u]);
    }
    return out;
}

double adjoint_identity_residual(const FiniteMeasureSpace& mu, const FiniteMeasureSpace& nu,
                                 const MeasurableFunction& f) {
    const MeasurableFunction jf = adjoint_apply(mu, nu, f);
    double worst = 0.0;
    for_each_test_set(mu.atom_count(), [&](const Vector& chi) {
        worst = std::max(worst, std::abs(inner(nu, chi, f) - inner(mu, chi, jf)));
    });
    return worst;
}

LatticeReport lattice_closure_checks(const FiniteMeasureSpace& mu, const FiniteMeasureSpace& nu,
                                     const MeasurableFunction& f, const MeasurableFunction& g,
                                     const std::vector<MeasurableFunction>& test_functions) {
    require_absolutely_continuous(mu, nu);
    if (f.size() != g.size() || static_cast<std::size_t>(f.size()) != mu.atom_count()) {
        throw std::invalid_argument("functions do not match the measure space");
    }
    if (f.imag().cwiseAbs().maxCoeff() != 0.0 || g.imag().cwiseAbs().maxCoeff() != 0.0) {
        throw std::invalid_argument("lattice operations need real-valued functions");
    }

    LatticeReport r;
    r.abs_f = f.cwiseAbs().cast<Complex>();
    r.f_meet_g = f.real().cwiseMin(g.real()).cast<Complex>();
    r.one_meet_f = f.real().cwiseMin(1.0).cast<Complex>();

    for (const MeasurableFunction* h :
         std::vector<const MeasurableFunction*>{&f, &r.abs_f, &r.f_meet_g, &r.one_meet_f}) {
        r.max_identity_residual =
            std::max(r.max_identity_residual, adjoint_identity_residual(mu, nu, *h));
    }

    const MeasurableFunction image = adjoint_apply(mu, nu, r.abs_f);
    r.positivity_holds = !(image.real().array() < 0.0).any();

    auto tests = test_functions;
    if (tests.empty()) for_each_test_set(mu.atom_count(), [&](const Vector& chi) { tests.push_back(chi); });
    for (const auto& phi : tests) {
        const double lhs = std::abs(inner(nu, r.abs_f, phi));
        // Best ψ with |ψ| <= |φ|: modulus |φ|, phase of f.
        MeasurableFunction psi(phi.size());
        for (Eigen::Index a = 0; a < phi.size(); ++a) {
            psi(a) = f(a) == Complex{} ? Complex{} : std::abs(phi(a)) * f(a) / std::abs(f(a));
        }
        const double rhs = std::abs(inner(nu, f, psi));
        if (lhs > rhs + 1e-12 * std::max(1.0, rhs)) r.abs_inequality_holds = false;
    }
    return r;
}

RnDerivative rn_derivative(const FiniteMeasureSpace& mu, const FiniteMeasureSpace& nu,
                           const std::vector<MeasurableFunction>& approximating_sequence) {
    require_absolutely_continuous(mu, nu);
    const auto m = static_cast<Eigen::Index>(mu.atom_count());
    std::vector<MeasurableFunction> g = approximating_sequence;
    if (g.empty()) g.push_back(MeasurableFunction::Ones(m));

    RnDerivative out;
    RealVector running = RealVector::Zero(m);
    for (const auto& gn : g) {
        if (gn.size() != m) throw std::invalid_argument("approximating function has wrong size");
        running = running.cwiseMax(gn.cwiseAbs());
        RnStage stage;
        stage.f_n = running.cwiseMin(1.0).cast<Complex>();
        stage.adjoint_f = adjoint_apply(mu, nu, stage.f_n);
        if (!out.stages.empty() &&
            (stage.f_n.real().array() < out.stages.back().f_n.real().array()).any()) {
            out.monotone = false;
        }
        out.stages.push_back(std::move(stage));
    }

    const auto& last = out.stages.back();
    for (Eigen::Index a = 0; a < m; ++a) {
        if (nu[static_cast<std::size_t>(a)] != 0.0 && std::abs(last.f_n(a) - 1.0) > 1e-12) {
            throw std::invalid_argument(
                "approximating sequence does not reach 1 on the support of nu");
        }
    }

    const MeasurableFunction one = MeasurableFunction::Ones(m);
    for (std::size_t n = 0; n < out.stages.size(); ++n) {
        for (std::size_t k = 0; k <= n; ++k) {
            const MeasurableFunction diff = out.stages[n].adjoint_f - out.stages[k].adjoint_f;
            const double l1 = (diff.cwiseAbs().array() * mu.weights().array()).sum();
            const Complex rhs = inner(nu, out.stages[n].f_n - out.stages[k].f_n, one);
            out.cauchy_residual = std::max(out.cauchy_residual, std::abs(l1 - rhs));
        }
    }

    out.derivative = last.adjoint_f;
    for_each_test_set(mu.atom_count(), [&](const Vector& chi) {
        const Complex lhs = inner(nu, one, chi);
        const Complex rhs = inner(mu, out.derivative, chi);
        out.representation_residual = std::max(out.representation_residual, std::abs(lhs - rhs));
    });
    return out;
}

std::vector<MeasurableFunction> indicator_growth_sequence(std::size_t atom_count) {
    std::vector<MeasurableFunction> seq;
    const auto m = static_cast<Eigen::Index>(atom_count);
    for (Eigen::Index n = 1; n <= m; ++n) {
        MeasurableFunction g = MeasurableFunction::Zero(m);
        g.head(n).setOnes();
        seq.push_back(g);
    }
    return seq;
}

std::vector<MeasurableFunction> phase_ramp_sequence(std::size_t atom_count, std::size_t stages) {
    std::vector<MeasurableFunction> seq;
    const auto m = static_cast<Eigen::Index>(atom_count);
    for (std::size_t n = 1; n <= stages; ++n) {
        MeasurableFunction g(m);
        const double radius = static_cast<double>(n) / static_cast<double>(stages);
        for (Eigen::Index a = 0; a < m; ++a) {
            g(a) = std::polar(radius, 2.0 * std::numbers::pi * static_cast<double>(a) /
                                          static_cast<double>(m + 1));
        }
        seq.push_back(g);
    }
    return seq;
}

double domination_ratio(const FiniteMeasureSpace& mu, const FiniteMeasureSpace& nu,
                        const MeasurableFunction& phi) {
    require_compatible(mu, nu);
    const MeasurableFunction one = MeasurableFunction::Ones(phi.size());
    const double num = std::norm(inner(nu, phi, one));
    const double den = inner(mu, phi, phi).real();
    return den > 0.0 ? num / den : 0.0;
}

L2Report l2_report(const FiniteMeasureSpace& mu, const FiniteMeasureSpace& nu) {
    require_absolutely_continuous(mu, nu);
    L2Report r;
    const auto m = static_cast<Eigen::Index>(mu.atom_count());
    r.adjoint_of_one = adjoint_apply(mu, nu, MeasurableFunction::Ones(m));
    for (std::size_t a = 0; a < mu.atom_count(); ++a) {
        if (mu[a] != 0.0) r.c_min += nu[a] * nu[a] / mu[a];
    }
    r.witness_ratio = domination_ratio(mu, nu, r.adjoint_of_one);
    return r;
}

TruncationFamily TruncationFamily::convergent() {
    return {"convergent", [](int k) {
                RealVector mu(k), nu(k);
                for (int j = 1; j <= k; ++j) {
                    const double p = std::ldexp(1.0, -j);
                    mu(j - 1) = p / (static_cast<double>(j) * j);
                    nu(j - 1) = p / j;
                }
                return std::make_pair(FiniteMeasureSpace(mu), FiniteMeasureSpace(nu));
            }};
}

TruncationFamily TruncationFamily::divergent() {
    return {"divergent", [](int k) {
                RealVector mu(k), nu(k);
                for (int j = 1; j <= k; ++j) {
                    mu(j - 1) = std::ldexp(1.0, -2 * j);
                    nu(j - 1) = std::ldexp(1.0, -j);
                }
                return std::make_pair(FiniteMeasureSpace(mu), FiniteMeasureSpace(nu));
            }};
}

TruncationFamily TruncationFamily::identity() {
    return {"identity", [](int k) {
                RealVector mu(k);
                for (int j = 1; j <= k; ++j) mu(j - 1) = std::ldexp(1.0, -j);
                return std::make_pair(FiniteMeasureSpace(mu), FiniteMeasureSpace(mu));
            }};
}

TruncationFamily TruncationFamily::preset(const std::string& name) {
    if (name == "convergent") return convergent();
    if (name == "divergent") return divergent();
    if (name == "identity") return identity();
    throw std::invalid_argument("unknown truncation preset '" + name + "'");
}

std::vector<std::pair<int, double>> truncation_divergence(const TruncationFamily& family,
                                                          int max_k) {
    if (max_k < 1) throw std::invalid_argument("max_k must be >= 1");
    std::vector<std::pair<int, double>> table;
    for (int k = 1; k <= max_k; ++k) {
        const auto [mu, nu] = family.member(k);
        table.emplace_back(k, l2_report(mu, nu).c_min);
    }
    return table;
}

}  // namespace rnforms::measures
