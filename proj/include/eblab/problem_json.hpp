#pragma once

#include "eblab/core.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace eblab {

/// A model built from a JSON document
///   {"name": ..., "constructor": ..., "params": {...}}
/// with dense matrices as row-major nested arrays.
struct LoadedProblem {
    std::string name;
    std::string constructor;
    nlohmann::json document;
    ObjectiveModel model;
    /// Set for constructors with a linearized-prox map (every m = 1 model
    /// and the composite counterexample).
    std::optional<CompositeSpec> composite;
};

LoadedProblem load_problem(const nlohmann::json& doc);

/// Reads and parses a file; InvalidArgument names the path on failure.
LoadedProblem load_problem_file(const std::string& path);

Matrix matrix_from_json(const nlohmann::json& j);
Vector vector_from_json(const nlohmann::json& j);

}  // namespace eblab
