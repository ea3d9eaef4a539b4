#include "rnforms/cli.hpp"

#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <regex>
#include <sstream>

#include <CLI11.hpp>

#include "rnforms/io.hpp"

namespace rnforms::cli {

namespace {

using io::json;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

struct Outcome {
    json report = json::object();
    std::optional<Table> table;
    int code = kOk;
    std::optional<Witness> witness;
};

json witness_json(const Witness& w) {
    json j = {{"description", w.description}};
    if (w.vector.size() > 0) j["vector"] = io::to_json(w.vector);
    if (!w.atoms.empty()) j["atoms"] = w.atoms;
    return j;
}

Outcome negative(Outcome o, Witness w) {
    o.code = kDomainNegative;
    o.witness = std::move(w);
    return o;
}

std::string csv_cell(const json& v) {
    if (v.is_number_float()) return io::format_double(v.get<double>());
    if (v.is_primitive() && !v.is_string()) return v.dump();
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (const char c : s) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    return quoted + "\"";
}

void emit(const Outcome& o, const RunConfig& cfg, std::ostream& out) {
    OutputFormat fmt = cfg.format;
    if (o.table && !cfg.format_explicit) fmt = OutputFormat::Csv;

    if (o.table) {
        const auto& t = *o.table;
        if (fmt == OutputFormat::Json) {
            json rows = json::array();
            for (const auto& r : t.rows) {
                json row = json::object();
                for (std::size_t c = 0; c < t.header.size(); ++c) row[t.header[c]] = r[c];
                rows.push_back(row);
            }
            json doc = o.report;
            doc["rows"] = rows;
            out << doc.dump(2) << '\n';
            return;
        }
        for (std::size_t c = 0; c < t.header.size(); ++c) out << (c ? "," : "") << t.header[c];
        out << '\n';
        for (const auto& r : t.rows) {
            for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << io::format_double(r[c]);
            out << '\n';
        }
        return;
    }

    json doc = o.report;
    if (o.witness) doc["witness"] = witness_json(*o.witness);
    switch (fmt) {
        case OutputFormat::Json:
            out << doc.dump(2) << '\n';
            break;
        case OutputFormat::Csv:
            out << "key,value\n";
            for (const auto& [k, v] : doc.items()) out << csv_cell(k) << ',' << csv_cell(v) << '\n';
            break;
        case OutputFormat::Human:
            for (const auto& [k, v] : doc.items()) {
                out << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
            }
            break;
    }
}

// ---------------------------------------------------------------------------
// forms

Outcome forms_ac(const std::string& s_path, const std::string& t_path, const RunConfig& cfg) {
    const auto s = io::form_from_json(io::load_file(s_path), cfg.tol);
    const auto t = io::form_from_json(io::load_file(t_path), cfg.tol);
    if (s.dim() != t.dim()) throw io::InputError("forms have different dimensions");
    const auto r = is_absolutely_continuous(s, t, cfg.tol);
    Outcome o;
    o.report["absolutely_continuous"] = r.absolutely_continuous;
    if (!r.absolutely_continuous) {
        return negative(o, {"t(x,x) = 0 < s(x,x)", *r.witness, {}});
    }
    return o;
}

Outcome forms_decompose(const std::string& s_path, const std::string& t_path, const RunConfig& cfg) {
    const auto s = io::form_from_json(io::load_file(s_path), cfg.tol);
    const auto t = io::form_from_json(io::load_file(t_path), cfg.tol);
    if (s.dim() != t.dim()) throw io::InputError("forms have different dimensions");
    const auto d = lebesgue_decompose(s, t, cfg.tol);
    Outcome o;
    o.report["ac"] = io::to_json(d.ac_part.gram().matrix());
    o.report["sing"] = io::to_json(d.sing_part.gram().matrix());
    o.report["residuals"] = {
        {"sum", max_abs(d.ac_part.gram().matrix() + d.sing_part.gram().matrix() - s.gram().matrix())},
        {"oracle_gap", d.oracle_gap},
        {"oracle_doublings", d.oracle_doublings},
    };
    o.report["ac_is_absolutely_continuous"] =
        is_absolutely_continuous(d.ac_part, t, cfg.tol).absolutely_continuous;
    o.report["sing_is_singular"] = is_singular(d.sing_part, t, cfg.tol);
    return o;
}

Outcome forms_rn(const std::string& s_path, const std::string& t_path, const RunConfig& cfg) {
    const auto s = io::form_from_json(io::load_file(s_path), cfg.tol);
    const auto t = io::form_from_json(io::load_file(t_path), cfg.tol);
    if (s.dim() != t.dim()) throw io::InputError("forms have different dimensions");
    const auto rn = rn_operator(s, t, cfg.tol);
    Outcome o;
    o.report["hilbert_dim"] = rn.base.hilbert_dim();
    o.report["S"] = io::to_json(rn.matrix.matrix());
    o.report["coord_map"] = io::to_json(rn.base.coord_map);
    o.report["identity_residual"] = rn_identity_residual(s, rn, cfg.tol);
    return o;
}

Outcome forms_represent(const std::string& s_path, const std::string& t_path, const std::string& y_text,
                        const RunConfig& cfg) {
    const auto s = io::form_from_json(io::load_file(s_path), cfg.tol);
    const auto t = io::form_from_json(io::load_file(t_path), cfg.tol);
    if (s.dim() != t.dim()) throw io::InputError("forms have different dimensions");
    const Vector y = io::vector_from_json(io::parse_text(y_text));
    if (y.size() != s.dim()) throw io::InputError("--y has the wrong dimension");
    const Vector x = representing_vector_of(s, t, y, cfg.tol);
    const Vector f = quotient_space(s, cfg.tol).coords(y);
    Outcome o;
    o.report["representing_vector"] = io::to_json(x);
    o.report["uniform_defect"] = uniform_defect(s, t, f, x, cfg.tol);
    return o;
}

// ---------------------------------------------------------------------------
// setfunc

setfunc::AtomSet parse_set(const setfunc::FiniteRing& ring, const std::string& labels) {
    std::vector<std::string> names;
    std::stringstream ss(labels);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) names.push_back(item);
    }
    try {
        return ring.from_labels(names);
    } catch (const std::exception& e) {
        throw io::InputError(e.what());
    }
}

json labels_json(const setfunc::FiniteRing& ring, const setfunc::AtomSet& set) {
    json out = json::array();
    for (const auto a : set) out.push_back(ring.labels()[a]);
    return out;
}

void require_same_ring(const setfunc::AdditiveSetFunction& a, const setfunc::AdditiveSetFunction& b) {
    if (!(a.ring() == b.ring())) throw io::InputError("set functions live on different rings");
}

Outcome setfunc_tv(const std::string& path, const std::optional<std::string>& set, const RunConfig&) {
    const auto beta = io::set_function_from_json(io::load_file(path));
    const auto tv = setfunc::total_variation(beta);
    Outcome o;
    o.report["atoms"] = beta.ring().labels();
    o.report["total_variation"] = io::to_json(tv.atom_values().real().eval());
    o.report["total_mass"] = tv.atom_values().real().sum();
    if (set) {
        const auto e = parse_set(beta.ring(), *set);
        o.report["set"] = labels_json(beta.ring(), e);
        o.report["beta_of_set"] = io::to_json(setfunc::evaluate(beta, e));
        o.report["variation_of_set"] = setfunc::evaluate(tv, e).real();
    }
    return o;
}

Outcome setfunc_ac(const std::string& b_path, const std::string& a_path,
                   const std::optional<std::string>& set, const RunConfig& cfg) {
    const auto beta = io::set_function_from_json(io::load_file(b_path));
    const auto alpha = io::set_function_from_json(io::load_file(a_path));
    require_same_ring(beta, alpha);
    if (!alpha.is_nonnegative()) throw io::InputError("alpha must be nonnegative");
    Outcome o;
    if (set) {
        const auto e = parse_set(beta.ring(), *set);
        o.report["set"] = labels_json(beta.ring(), e);
        o.report["alpha_of_set"] = setfunc::evaluate(alpha, e).real();
        o.report["variation_of_set"] = setfunc::evaluate(setfunc::total_variation(beta), e).real();
    }
    if (beta.atom_count() <= 12) {
        const auto search = setfunc::epsilon_delta_search(beta, alpha, cfg.tol);
        json pairs = json::array();
        for (const auto& [eps, delta] : search.eps_delta) pairs.push_back({eps, delta});
        o.report["absolutely_continuous"] = search.absolutely_continuous;
        o.report["eps_delta"] = pairs;
        if (!search.absolutely_continuous) {
            return negative(o, {"alpha(E) = 0 < |beta|(E)", {}, *search.witness});
        }
        return o;
    }
    const auto r = setfunc::is_abs_continuous(beta, alpha, cfg.tol);
    o.report["absolutely_continuous"] = r.absolutely_continuous;
    if (!r.absolutely_continuous) return negative(o, {"alpha(E) = 0 < |beta|(E)", {}, *r.witness});
    return o;
}

Outcome setfunc_darst(const std::string& b_path, const std::string& a_path, const RunConfig& cfg) {
    const auto beta = io::set_function_from_json(io::load_file(b_path));
    const auto alpha = io::set_function_from_json(io::load_file(a_path));
    require_same_ring(beta, alpha);
    if (!alpha.is_nonnegative()) throw io::InputError("alpha must be nonnegative");
    const auto d = setfunc::darst_representation(beta, alpha, cfg.tol);
    Outcome o;
    o.report["atoms"] = beta.ring().labels();
    o.report["density"] = io::to_json(d.density_direct.atom_values());
    o.report["density_via_forms"] = io::to_json(d.density_via_forms.atom_values());
    o.report["sup_variation"] = d.sup_variation_direct;
    o.report["sup_variation_via_forms"] = d.sup_variation_via_forms;
    o.report["route_gap"] = d.route_gap;
    return o;
}

Outcome setfunc_bridge(const std::string& b_path, const std::string& a_path, const RunConfig& cfg) {
    const auto beta = io::set_function_from_json(io::load_file(b_path));
    const auto alpha = io::set_function_from_json(io::load_file(a_path));
    require_same_ring(beta, alpha);
    if (!alpha.is_nonnegative()) throw io::InputError("alpha must be nonnegative");
    const auto r = setfunc::bridge_check(beta, alpha, cfg.tol);
    Outcome o;
    o.report["set_function_ac"] = r.set_function_ac;
    o.report["form_ac"] = r.form_ac;
    o.report["agree"] = r.agree();
    return o;
}

// ---------------------------------------------------------------------------
// measure

Outcome measure_rn(const std::string& path, const std::string& sequence, const RunConfig&) {
    const auto [mu, nu] = io::measures_from_json(io::load_file(path));
    std::vector<measures::MeasurableFunction> g;
    if (sequence == "indicator") g = measures::indicator_growth_sequence(mu.atom_count());
    else if (sequence == "phase") g = measures::phase_ramp_sequence(mu.atom_count(), 8);
    Outcome o;
    try {
        const auto r = measures::rn_derivative(mu, nu, g);
        o.report["derivative"] = io::to_json(r.derivative.real().eval());
        o.report["stages"] = r.stages.size();
        o.report["monotone"] = r.monotone;
        o.report["cauchy_residual"] = r.cauchy_residual;
        o.report["representation_residual"] = r.representation_residual;
    } catch (const DomainError& e) {
        o.report["absolutely_continuous"] = false;
        return negative(o, e.witness());
    }
    return o;
}

Outcome measure_l2(const std::string& path, const RunConfig&) {
    const auto [mu, nu] = io::measures_from_json(io::load_file(path));
    Outcome o;
    try {
        const auto r = measures::l2_report(mu, nu);
        o.report["in_l2"] = r.in_l2;
        o.report["c_min"] = r.c_min;
        o.report["adjoint_of_one"] = io::to_json(r.adjoint_of_one.real().eval());
        o.report["witness_ratio"] = r.witness_ratio;
    } catch (const DomainError& e) {
        o.report["absolutely_continuous"] = false;
        return negative(o, e.witness());
    }
    return o;
}

Outcome measure_truncate(const std::string& preset, int k, const RunConfig&) {
    if (k < 1) throw io::InputError("--k must be >= 1");
    measures::TruncationFamily family;
    try {
        family = measures::TruncationFamily::preset(preset);
    } catch (const std::invalid_argument& e) {
        throw io::InputError(e.what());
    }
    Outcome o;
    o.report["preset"] = preset;
    Table t{{"k", "C_min"}, {}};
    for (const auto& [kk, c] : measures::truncation_divergence(family, k)) {
        t.rows.push_back({static_cast<double>(kk), c});
    }
    o.table = t;
    return o;
}

// ---------------------------------------------------------------------------
// gns

gns::Functional functional_from_spec(const gns::StarAlgebra& alg, const std::string& spec,
                                     std::mt19937_64& rng) {
    static const std::regex state_re(R"(\s*vector_state\(\s*(\d+)\s*(?:,\s*(\d+)\s*)?\)\s*)");
    static const std::regex dual_re(R"(\s*basis_dual\(\s*(\d+)\s*\)\s*)");
    std::smatch m;
    try {
        if (spec == "trace") return gns::trace_functional(alg);
        if (std::regex_match(spec, m, state_re)) {
            const std::size_t block = m[2].matched ? std::stoul(m[2]) : 0;
            if (!alg.is_cstar_type() || block >= alg.block_sizes()->size()) {
                throw io::InputError("vector_state needs a matrix block");
            }
            const int k = (*alg.block_sizes())[block];
            const int i = std::stoi(m[1]);
            if (i >= k) throw io::InputError("vector_state index out of range");
            return gns::vector_state(alg, Vector::Unit(k, i), block);
        }
        if (std::regex_match(spec, m, dual_re)) {
            const auto i = std::stol(m[1]);
            if (i >= alg.dim()) throw io::InputError("basis_dual index out of range");
            return gns::Functional{Vector::Unit(alg.dim(), i)};
        }
        if (spec == "random") {
            if (!alg.is_cstar_type()) throw io::InputError("random functionals need a matrix-block algebra");
            std::normal_distribution<double> gauss;
            std::vector<Matrix> rhos;
            for (const int k : *alg.block_sizes()) {
                Matrix b(k, k);
                for (int r = 0; r < k; ++r) {
                    for (int c = 0; c < k; ++c) b(r, c) = Complex(gauss(rng), gauss(rng));
                }
                rhos.push_back(b * b.adjoint());
            }
            return gns::density_functional(alg, rhos);
        }
    } catch (const std::invalid_argument& e) {
        throw io::InputError(e.what());
    }
    return io::functional_from_json(io::load_file(spec), alg);
}

struct GnsInputs {
    std::string algebra;
    std::string v;
    std::string w;
    std::optional<int> stages;
};

Outcome gns_build(const GnsInputs& in, const RunConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    const auto alg = io::algebra_from_spec(in.algebra);
    const auto v = functional_from_spec(alg, in.v, rng);
    Outcome o;
    const auto r = gns::is_representable(alg, v, cfg.tol);
    o.report["representable"] = r.representable;
    if (!r.representable) return negative(o, {r.reason, *r.witness, {}});
    const auto t = gns::gns(alg, v, cfg.tol);
    o.report["hilbert_dim"] = t.space.hilbert_dim();
    o.report["cyclic"] = io::to_json(t.cyclic);
    json rep = json::array();
    for (const auto& p : t.rep) rep.push_back(io::to_json(p));
    o.report["rep"] = rep;
    o.report["homomorphism_residual"] = t.homomorphism_residual;
    o.report["star_residual"] = t.star_residual;
    o.report["reconstruction_residual"] = t.reconstruction_residual;
    o.report["cyclic_spans"] = t.cyclic_spans;
    return o;
}

std::pair<gns::Functional, gns::Functional> load_pair(const gns::StarAlgebra& alg, const GnsInputs& in,
                                                      const RunConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    auto w = functional_from_spec(alg, in.w, rng);
    auto v = functional_from_spec(alg, in.v, rng);
    return {std::move(w), std::move(v)};
}

Outcome gns_ac(const GnsInputs& in, const RunConfig& cfg) {
    const auto alg = io::algebra_from_spec(in.algebra);
    const auto [w, v] = load_pair(alg, in, cfg);
    const auto r = gns::is_strongly_ac(alg, w, v, cfg.tol);
    Outcome o;
    o.report["absolutely_continuous"] = r.absolutely_continuous;
    if (!r.absolutely_continuous) return negative(o, {"v(a*a) = 0 < w(a*a)", *r.witness, {}});
    return o;
}

Outcome gns_rn(const GnsInputs& in, const RunConfig& cfg) {
    const auto alg = io::algebra_from_spec(in.algebra);
    const auto [w, v] = load_pair(alg, in, cfg);
    const auto e = gns::rn_element(alg, w, v, cfg.tol);
    const auto op = gns::rn_operator_w(alg, w, v, cfg.tol);
    const auto z = gns::zeta_transport(alg, w, v, cfg.tol);
    Outcome o;
    o.report["a0"] = io::to_json(e.a0);
    o.report["x"] = io::to_json(e.x);
    o.report["residual"] = e.residual;
    o.report["uniform_defect"] = e.uniform_defect;
    o.report["W"] = io::to_json(op.w.matrix());
    o.report["w1_residual"] = op.w1_residual;
    o.report["intertwining_residual"] = op.intertwining_residual;
    o.report["w2_residual"] = op.w2_residual;
    o.report["j_zeta_residual"] = z.j_zeta_residual;
    o.report["zeta_identity_residual"] = z.identity_residual;
    return o;
}

Outcome gns_dominate(const GnsInputs& in, const RunConfig& cfg) {
    const auto alg = io::algebra_from_spec(in.algebra);
    const auto [w, v] = load_pair(alg, in, cfg);
    const auto d = gns::domination_check(alg, w, v, cfg.tol);
    Outcome o;
    o.report["dominated"] = d.dominated;
    o.report["c_min"] = d.c_min;
    o.report["c_min_tight"] = d.c_min_tight;
    o.report["in_commutant"] = d.in_commutant;
    o.report["commutant_dim"] = d.commutant_dim;
    return o;
}

Outcome gns_pure(const GnsInputs& in, const RunConfig& cfg) {
    const auto alg = io::algebra_from_spec(in.algebra);
    const auto [w, v] = load_pair(alg, in, cfg);
    const auto r = gns::pure_rigidity(alg, w, v, cfg.tol);
    Outcome o;
    o.report["irreducible"] = r.is_irreducible;
    o.report["absolutely_continuous"] = r.absolutely_continuous;
    if (!r.absolutely_continuous) {
        const auto ac = gns::is_strongly_ac(alg, w, v, cfg.tol);
        return negative(o, {"v(a*a) = 0 < w(a*a)", *ac.witness, {}});
    }
    if (!r.is_irreducible) {
        return negative(o, {"the GNS representation of v is reducible", {}, {}});
    }
    o.report["alpha"] = *r.alpha;
    o.report["alpha_least_squares"] = *r.alpha_least_squares;
    o.report["proportionality_residual"] = r.proportionality_residual;
    o.report["w_squared_deviation"] = r.w_squared_deviation;
    return o;
}

Outcome gns_norms(const GnsInputs& in, const RunConfig& cfg) {
    const auto alg = io::algebra_from_spec(in.algebra);
    const auto [w, v] = load_pair(alg, in, cfg);
    const auto norms = gns::approximation_norms(alg, w, v, in.stages, cfg.tol);
    Outcome o;
    Table t{{"n", "norm"}, {}};
    for (std::size_t n = 0; n < norms.size(); ++n) t.rows.push_back({static_cast<double>(n), norms[n]});
    o.table = t;
    return o;
}

// ---------------------------------------------------------------------------
// demo

Outcome demo_dirac(int max_k, const RunConfig&) {
    if (max_k < 4) throw io::InputError("--max-k must be >= 4");
    Outcome o;
    Table t{{"k", "t_psi", "s_psi", "represent_residual"}, {}};
    for (long long kk = 4; kk <= max_k; kk *= 2) {
        const int k = static_cast<int>(kk);
        const auto stage = dirac_lebesgue_family(k);
        t.rows.push_back({static_cast<double>(k), stage.t(stage.psi, stage.psi).real(),
                          stage.s(stage.psi, stage.psi).real(), stage.represent_residual});
    }
    o.table = t;
    return o;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Radon-Nikodym toolkit for forms, set functions, measures and functionals"};
    app.name("rnforms");
    app.fallthrough();
    app.require_subcommand(1);

    RunConfig cfg;
    std::string format = "human";
    auto* format_opt = app.add_option("--format", format, "human | json | csv")
                           ->check(CLI::IsMember({"human", "json", "csv"}));
    app.add_option("--tol-rank", cfg.tol.tol_rank, "relative eigenvalue cutoff");
    app.add_option("--tol-eq", cfg.tol.tol_eq, "equality tolerance");
    app.add_option("--seed", cfg.seed, "seed for random functionals");

    std::function<Outcome()> action;
    std::string path_a, path_b, y_text, preset = "divergent", sequence = "constant";
    std::optional<std::string> set;
    int k = 10, max_k = 64;
    GnsInputs gin;

    const auto two_files = [&](CLI::App* sub) {
        sub->add_option("first", path_a)->required();
        sub->add_option("second", path_b)->required();
    };

    auto* forms = app.add_subcommand("forms", "nonnegative Hermitian forms")->require_subcommand(1);
    auto* f_ac = forms->add_subcommand("ac", "is s absolutely continuous w.r.t. t");
    two_files(f_ac);
    f_ac->callback([&] { action = [&] { return forms_ac(path_a, path_b, cfg); }; });
    auto* f_dec = forms->add_subcommand("decompose", "Lebesgue decomposition of s w.r.t. t");
    two_files(f_dec);
    f_dec->callback([&] { action = [&] { return forms_decompose(path_a, path_b, cfg); }; });
    auto* f_rn = forms->add_subcommand("rn", "Radon-Nikodym operator of s w.r.t. t");
    two_files(f_rn);
    f_rn->callback([&] { action = [&] { return forms_rn(path_a, path_b, cfg); }; });
    auto* f_rep = forms->add_subcommand("represent", "representing vector of y in D");
    two_files(f_rep);
    f_rep->add_option("--y", y_text, "JSON vector")->required();
    f_rep->callback([&] { action = [&] { return forms_represent(path_a, path_b, y_text, cfg); }; });

    auto* sf = app.add_subcommand("setfunc", "additive set functions on finite rings")->require_subcommand(1);
    auto* s_tv = sf->add_subcommand("tv", "total variation");
    s_tv->add_option("beta", path_a)->required();
    s_tv->add_option("--set", set, "comma-separated atom labels");
    s_tv->callback([&] { action = [&] { return setfunc_tv(path_a, set, cfg); }; });
    auto* s_ac = sf->add_subcommand("ac", "epsilon-delta absolute continuity of beta w.r.t. alpha");
    two_files(s_ac);
    s_ac->add_option("--set", set, "comma-separated atom labels");
    s_ac->callback([&] { action = [&] { return setfunc_ac(path_a, path_b, set, cfg); }; });
    auto* s_darst = sf->add_subcommand("darst", "density of beta w.r.t. alpha");
    two_files(s_darst);
    s_darst->callback([&] { action = [&] { return setfunc_darst(path_a, path_b, cfg); }; });
    auto* s_bridge = sf->add_subcommand("bridge", "set-function vs form absolute continuity");
    two_files(s_bridge);
    s_bridge->callback([&] { action = [&] { return setfunc_bridge(path_a, path_b, cfg); }; });

    auto* ms = app.add_subcommand("measure", "finite measure spaces")->require_subcommand(1);
    auto* m_rn = ms->add_subcommand("rn", "d nu / d mu");
    m_rn->add_option("measures", path_a)->required();
    m_rn->add_option("--sequence", sequence, "constant | indicator | phase")
        ->check(CLI::IsMember({"constant", "indicator", "phase"}));
    m_rn->callback([&] { action = [&] { return measure_rn(path_a, sequence, cfg); }; });
    auto* m_l2 = ms->add_subcommand("l2", "L2 criterion and C_min");
    m_l2->add_option("measures", path_a)->required();
    m_l2->callback([&] { action = [&] { return measure_l2(path_a, cfg); }; });
    auto* m_tr = ms->add_subcommand("truncate", "C_min along a truncation family");
    m_tr->add_option("--preset", preset, "convergent | divergent | identity");
    m_tr->add_option("--k", k, "largest truncation");
    m_tr->callback([&] { action = [&] { return measure_truncate(preset, k, cfg); }; });

    auto* g = app.add_subcommand("gns", "functionals on finite-dimensional *-algebras")->require_subcommand(1);
    const auto gns_verb = [&](const char* name, const char* help, bool needs_w,
                              Outcome (*fn)(const GnsInputs&, const RunConfig&)) {
        auto* sub = g->add_subcommand(name, help);
        sub->add_option("--algebra", gin.algebra, "matrix_algebra(k) | direct_sum([..]) | group_algebra(cyclic k) | file")
            ->required();
        sub->add_option("--v", gin.v, "file | trace | vector_state(i[,block]) | basis_dual(i) | random")
            ->required();
        if (needs_w) sub->add_option("--w", gin.w, "same forms as --v")->required();
        return sub->callback([&, fn] { action = [&, fn] { return fn(gin, cfg); }; });
    };
    gns_verb("build", "GNS triple of v", false, gns_build);
    gns_verb("ac", "strong absolute continuity of w w.r.t. v", true, gns_ac);
    gns_verb("rn", "Radon-Nikodym element and operator", true, gns_rn);
    gns_verb("dominate", "domination constant", true, gns_dominate);
    gns_verb("pure", "rigidity over a pure v", true, gns_pure);
    gns_verb("norms", "norm approximation by w_n", true, gns_norms)
        ->add_option("--stages", gin.stages, "number of stages (default rank W)");

    auto* demo = app.add_subcommand("demo", "worked examples")->require_subcommand(1);
    auto* dirac = demo->add_subcommand("dirac-lebesgue", "point evaluation versus Lebesgue measure");
    dirac->add_option("--max-k", max_k, "largest k (k doubles from 4)");
    dirac->callback([&] { action = [&] { return demo_dirac(max_k, cfg); }; });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return kBadInput;
    }

    cfg.format_explicit = format_opt->count() > 0;
    cfg.format = format == "json" ? OutputFormat::Json : format == "csv" ? OutputFormat::Csv : OutputFormat::Human;
    try {
        cfg.tol.validate();
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    }
    if (!action) {
        err << app.help();
        return kBadInput;
    }

    try {
        const Outcome o = action();
        emit(o, cfg, out);
        if (o.witness) err << "negative: " << o.witness->description << '\n';
        return o.code;
    } catch (const DomainError& e) {
        Outcome o;
        o.code = kDomainNegative;
        o.report["error"] = e.what();
        o.witness = e.witness();
        emit(o, cfg, out);
        err << "negative: " << e.what() << '\n';
        return kDomainNegative;
    } catch (const io::InputError& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const io::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const std::logic_error& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const std::exception& e) {
        // Numerical routes that disagree beyond their tolerance.
        err << "failure: " << e.what() << '\n';
        return kDomainNegative;
    }
}

}  // namespace rnforms::cli
