#pragma once

#include "uand/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>

namespace uand {

/// A model plus the provenance recorded in its file.
struct StoredModel {
    Model model;
    ProblemConfig cfg;
    std::string origin;  // "trained", "binary", "cis" or "frozen_random"
};

/// Single-document JSON schema:
/// {m, d, W (row-major), b, R (row-major), c,
///  metadata{seed, construction|trained, config{m,d,s,seed}}}.
nlohmann::json model_to_json(const Model& model, const ProblemConfig& cfg,
                             const std::string& origin);
StoredModel model_from_json(const nlohmann::json& doc);

void save_model(const std::string& path, const Model& model, const ProblemConfig& cfg,
                const std::string& origin);
StoredModel load_model(const std::string& path);

}  // namespace uand
