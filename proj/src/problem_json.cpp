#include "eblab/problem_json.hpp"

#include "eblab/dual.hpp"
#include "eblab/problems.hpp"

#include <fstream>
#include <sstream>

namespace eblab {

namespace {

using nlohmann::json;

const json& field(const json& params, const char* key) {
    if (!params.contains(key)) throw InvalidArgument(std::string("problem params missing '") + key + "'");
    return params.at(key);
}

double number(const json& params, const char* key, std::optional<double> fallback = std::nullopt) {
    if (!params.contains(key)) {
        if (fallback) return *fallback;
        throw InvalidArgument(std::string("problem params missing '") + key + "'");
    }
    const auto& v = params.at(key);
    if (!v.is_number()) throw InvalidArgument(std::string("param '") + key + "' must be a number");
    return v.get<double>();
}

problems::BlockSimpleKind block_kind_from_json(const json& j) {
    const std::string kind = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
    if (kind == "zero") return problems::block_kind::Zero{};
    if (kind == "l1") return problems::block_kind::L1{number(j, "weight")};
    if (kind == "box") return problems::block_kind::Box{number(j, "lower"), number(j, "upper")};
    throw InvalidArgument("unknown block kind '" + kind + "'");
}

}  // namespace

Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw InvalidArgument("matrix must be a non-empty array of rows");
    // a flat array is read as a column
    if (!j.front().is_array()) {
        const Vector v = vector_from_json(j);
        return Matrix(v);
    }
    const Index rows = static_cast<Index>(j.size());
    const Index cols = static_cast<Index>(j.front().size());
    Matrix M(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const auto& row = j.at(static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw InvalidArgument("ragged matrix rows");
        for (Index k = 0; k < cols; ++k) M(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
    }
    return M;
}

Vector vector_from_json(const json& j) {
    if (j.is_number()) return Vector::Constant(1, j.get<double>());
    if (!j.is_array() || j.empty()) throw InvalidArgument("vector must be a non-empty array");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = j.at(i).get<double>();
    return v;
}

LoadedProblem load_problem(const json& doc) {
    if (!doc.is_object()) throw InvalidArgument("problem document must be a JSON object");
    LoadedProblem out;
    out.document = doc;
    out.constructor = doc.value("constructor", std::string());
    out.name = doc.value("name", out.constructor);
    const json params = doc.value("params", json::object());
    const std::string& c = out.constructor;

    try {
        if (c == "strongly_convex_quadratic") {
            out.model = problems::make_strongly_convex_quadratic(matrix_from_json(field(params, "Q")),
                                                                 vector_from_json(field(params, "b")));
        } else if (c == "least_squares" || c == "rank_deficient_least_squares") {
            out.model = problems::make_rank_deficient_least_squares(matrix_from_json(field(params, "A")),
                                                                    vector_from_json(field(params, "b")));
        } else if (c == "lasso") {
            out.model = problems::make_lasso(matrix_from_json(field(params, "A")), vector_from_json(field(params, "b")),
                                             number(params, "w"));
        } else if (c == "random_lasso") {
            out.model = problems::make_random_lasso(static_cast<Index>(number(params, "m")),
                                                    static_cast<Index>(number(params, "n")), number(params, "w"),
                                                    static_cast<std::uint64_t>(number(params, "seed", 0.0)));
        } else if (c == "box_l1_scalar") {
            out.model = problems::make_box_l1_scalar(number(params, "curvature", 0.0));
        } else if (c == "composite_counterexample") {
            out.composite = problems::make_composite_counterexample();
            out.model = out.composite->model;
        } else if (c == "palm") {
            std::vector<Index> sizes;
            for (const auto& s : field(params, "blocks")) sizes.push_back(s.get<Index>());
            std::vector<problems::BlockSimpleKind> kinds;
            if (params.contains("g")) {
                for (const auto& g : params.at("g")) kinds.push_back(block_kind_from_json(g));
            } else {
                kinds.assign(sizes.size(), problems::block_kind::Zero{});
            }
            out.model = problems::make_palm_problem(matrix_from_json(field(params, "A")),
                                                    vector_from_json(field(params, "b")), sizes, kinds);
        } else if (c == "invex_1d") {
            out.model = problems::make_invex_1d();
        } else if (c == "abs_1d") {
            out.model = problems::make_abs_1d();
        } else if (c == "quartic_1d") {
            out.model = problems::make_quartic_1d(number(params, "L", 12.0));
        } else if (c == "dual") {
            const std::string primal = field(params, "primal").get<std::string>();
            const Matrix A = matrix_from_json(field(params, "A"));
            const double cc = number(params, "c", 1.0);
            dual::ConjugatePair pair;
            if (primal == "quadratic") {
                const Vector y0 = params.contains("y0") ? vector_from_json(params.at("y0")) : Vector::Zero(A.cols());
                pair = dual::quadratic_pair(cc, y0);
            } else if (primal == "elastic-net") {
                pair = dual::elastic_net_pair(cc, A.cols());
            } else {
                throw InvalidArgument("unknown primal '" + primal + "'");
            }
            out.model = dual::build_dual(std::move(pair), A, vector_from_json(field(params, "b"))).model;
        } else {
            throw InvalidArgument("unknown constructor '" + c + "'");
        }
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed problem params: ") + e.what());
    }
    if (!out.composite && out.model.composite.outer_dim == 1 && out.model.composite.outer_linear) {
        out.composite = composite_from_model(out.model);
    }
    return out;
}

LoadedProblem load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open problem file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("cannot parse problem file '" + path + "': " + e.what());
    }
    return load_problem(doc);
}

}  // namespace eblab
