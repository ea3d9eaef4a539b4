#include "rnforms/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

namespace rnforms::io {

namespace {

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw InputError(std::string("missing field \"") + key + "\"");
    }
    return j.at(key);
}

std::size_t array_size(const json& j, const char* what) {
    if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
    return j.size();
}

}  // namespace

json load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(e.what());
    }
}

Complex complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw InputError("expected a number or [re, im], got " + j.dump());
}

Vector vector_from_json(const json& j) {
    const auto n = array_size(j, "vector");
    Vector v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
    return v;
}

Matrix matrix_from_json(const json& j) {
    const auto rows = array_size(j, "matrix");
    if (rows == 0) return Matrix(0, 0);
    const auto cols = array_size(j[0], "matrix row");
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        if (array_size(j[r], "matrix row") != cols) throw InputError("ragged matrix");
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from_json(j[r][c]);
        }
    }
    return m;
}

json to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
    return out;
}

json to_json(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(to_json(Vector(m.row(r).transpose())));
    return out;
}

json to_json(const RealVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

NonnegativeForm form_from_json(const json& j, const ToleranceConfig& tol) {
    const Matrix g = matrix_from_json(field(j, "gram"));
    if (g.rows() != g.cols()) throw InputError("gram must be square");
    if (j.contains("dim") && j.at("dim").get<Eigen::Index>() != g.rows()) {
        throw InputError("dim does not match gram");
    }
    try {
        return NonnegativeForm(HermitianMatrix(g, tol), tol);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    } catch (const std::domain_error& e) {
        throw InputError(e.what());
    }
}

json form_to_json(const NonnegativeForm& f) {
    return {{"dim", f.dim()}, {"gram", to_json(f.gram().matrix())}};
}

setfunc::AdditiveSetFunction set_function_from_json(const json& j) {
    const auto& atoms = field(j, "atoms");
    const Vector values = vector_from_json(field(j, "values"));
    try {
        if (atoms.is_number_integer()) {
            return {setfunc::FiniteRing::unlabeled(atoms.get<std::size_t>()), values};
        }
        return {setfunc::FiniteRing(atoms.get<std::vector<std::string>>()), values};
    } catch (const json::exception& e) {
        throw InputError(e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

std::pair<measures::FiniteMeasureSpace, measures::FiniteMeasureSpace> measures_from_json(
    const json& j) {
    try {
        const auto mu = field(j, "mu").get<std::vector<double>>();
        const auto nu = field(j, "nu").get<std::vector<double>>();
        if (mu.size() != nu.size()) throw InputError("mu and nu have different atom counts");
        if (j.contains("atoms") && j.at("atoms").get<std::size_t>() != mu.size()) {
            throw InputError("atoms does not match the weight lists");
        }
        const auto to_vec = [](const std::vector<double>& w) {
            return RealVector(Eigen::Map<const RealVector>(w.data(), static_cast<Eigen::Index>(w.size())));
        };
        return {measures::FiniteMeasureSpace(to_vec(mu)), measures::FiniteMeasureSpace(to_vec(nu))};
    } catch (const json::exception& e) {
        throw InputError(e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

gns::StarAlgebra algebra_from_json(const json& j) {
    const auto n = field(j, "dim").get<std::size_t>();
    const auto& structure = field(j, "structure");
    std::vector<Vector> products;
    array_size(structure, "structure");
    // Flat lists have dim*dim entries; for dim = 1 the two layouts differ in depth.
    const auto is_scalar = [](const json& x) {
        return x.is_number() || (x.is_array() && x.size() == 2 && x[0].is_number());
    };
    const bool flat = n == 1 ? structure.size() == 1 && structure[0].is_array() &&
                                   structure[0].size() == 1 && is_scalar(structure[0][0])
                             : structure.size() == n * n;
    if (flat) {
        for (const auto& p : structure) products.push_back(vector_from_json(p));
    } else if (structure.size() == n) {
        for (const auto& row : structure) {
            if (array_size(row, "structure row") != n) throw InputError("structure row has wrong length");
            for (const auto& p : row) products.push_back(vector_from_json(p));
        }
    } else {
        throw InputError("structure must list dim*dim products");
    }
    const Matrix involution = matrix_from_json(field(j, "involution"));

    std::optional<Vector> unit;
    if (j.contains("unit") && !j.at("unit").is_null()) {
        const auto& u = j.at("unit");
        if (u.is_number_integer()) {
            const auto i = u.get<std::size_t>();
            if (i >= n) throw InputError("unit index out of range");
            unit = Vector::Zero(static_cast<Eigen::Index>(n));
            (*unit)(static_cast<Eigen::Index>(i)) = 1.0;
        } else {
            unit = vector_from_json(u);
        }
    }
    std::optional<std::vector<int>> blocks;
    if (j.contains("blocks") && !j.at("blocks").is_null()) blocks = j.at("blocks").get<std::vector<int>>();

    try {
        return gns::StarAlgebra(std::move(products), involution, std::move(unit), std::move(blocks));
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

gns::StarAlgebra algebra_from_spec(const std::string& spec) {
    static const std::regex matrix_re(R"(\s*matrix_algebra\(\s*(\d+)\s*\)\s*)");
    static const std::regex sum_re(R"(\s*direct_sum\(\s*\[([\d\s,]*)\]\s*\)\s*)");
    static const std::regex cyclic_re(R"(\s*group_algebra\(\s*cyclic\s+(\d+)\s*\)\s*)");
    std::smatch m;
    try {
        if (std::regex_match(spec, m, matrix_re)) return gns::StarAlgebra::matrix_algebra(std::stoi(m[1]));
        if (std::regex_match(spec, m, cyclic_re)) {
            return gns::StarAlgebra::group_algebra_cyclic(std::stoi(m[1]));
        }
        if (std::regex_match(spec, m, sum_re)) {
            std::vector<int> sizes;
            std::stringstream ss(m[1].str());
            std::string item;
            while (std::getline(ss, item, ',')) sizes.push_back(std::stoi(item));
            return gns::StarAlgebra::direct_sum(sizes);
        }
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    } catch (const std::out_of_range& e) {
        throw InputError(e.what());
    }
    return algebra_from_json(load_file(spec));
}

gns::Functional functional_from_json(const json& j, const gns::StarAlgebra& alg) {
    gns::Functional f{vector_from_json(field(j, "coeffs"))};
    if (f.coeffs.size() != alg.dim()) throw InputError("functional does not match the algebra");
    return f;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace rnforms::io
