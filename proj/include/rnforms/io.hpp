#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

#include "rnforms/forms.hpp"
#include "rnforms/gns.hpp"
#include "rnforms/measures.hpp"
#include "rnforms/setfunc.hpp"

namespace rnforms::io {

using json = nlohmann::ordered_json;

/// Malformed or unreadable input (as opposed to a mathematical negative).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

json load_file(const std::string& path);
json parse_text(const std::string& text);

/// Complex numbers are written [re, im]; a bare number is accepted as real.
Complex complex_from_json(const json& j);
Vector vector_from_json(const json& j);
/// Row-major nested arrays.
Matrix matrix_from_json(const json& j);

json to_json(const Complex& z);
json to_json(const Vector& v);
json to_json(const Matrix& m);
json to_json(const RealVector& v);

/// { "dim": n, "gram": [[ [re,im], ... ], ...] }
NonnegativeForm form_from_json(const json& j, const ToleranceConfig& tol = {});
json form_to_json(const NonnegativeForm& f);

/// { "atoms": ["a", ...], "values": [[re,im], ...] }
setfunc::AdditiveSetFunction set_function_from_json(const json& j);

/// { "atoms": m, "mu": [...], "nu": [...] }
std::pair<measures::FiniteMeasureSpace, measures::FiniteMeasureSpace> measures_from_json(
    const json& j);

/**
 * { "dim": n, "structure": [...], "involution": [[...]], "unit": i | null | [...],
 *   "blocks": [k_1, ...] (optional) }
 *
 * "structure" lists the coordinates of e_i e_j, either flat in the order
 * i*n + j or nested as structure[i][j].
 */
gns::StarAlgebra algebra_from_json(const json& j);

/// "matrix_algebra(k)", "direct_sum([k1,k2,...])", "group_algebra(cyclic k)".
/// Anything else is read as a file path.
gns::StarAlgebra algebra_from_spec(const std::string& spec);

/// { "coeffs": [[re,im], ...] }
gns::Functional functional_from_json(const json& j, const gns::StarAlgebra& alg);

/// Shortest round-trip decimal form, independent of the C locale.
std::string format_double(double x);

}  // namespace rnforms::io
