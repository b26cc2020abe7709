#include "uand/serialize.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace uand {

namespace {

using nlohmann::json;

json matrix_rowmajor(const Matrix& M) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) arr.push_back(M(i, j));
    return arr;
}

Matrix matrix_from(const json& arr, Eigen::Index rows, Eigen::Index cols) {
    if (static_cast<Eigen::Index>(arr.size()) != rows * cols)
        throw ConfigError("model JSON: matrix size mismatch");
    Matrix M(rows, cols);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = arr[k++].get<double>();
    return M;
}

Vector vector_from(const json& arr, Eigen::Index n) {
    if (static_cast<Eigen::Index>(arr.size()) != n)
        throw ConfigError("model JSON: vector size mismatch");
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = arr[i].get<double>();
    return v;
}

}  // namespace

nlohmann::json model_to_json(const Model& model, const ProblemConfig& cfg,
                             const std::string& origin) {
    model.check_shapes(cfg);
    json meta = {
        {"seed", cfg.seed},
        {"config", {{"m", cfg.m}, {"d", cfg.d}, {"s", cfg.s}, {"seed", cfg.seed}}},
    };
    if (origin == "trained")
        meta["trained"] = true;
    else
        meta["construction"] = origin;
    return json{
        {"m", cfg.m},
        {"d", cfg.d},
        {"W", matrix_rowmajor(model.compute.W)},
        {"b", json(std::vector<double>(model.compute.b.begin(), model.compute.b.end()))},
        {"R", matrix_rowmajor(model.readout.R)},
        {"c", json(std::vector<double>(model.readout.c.begin(), model.readout.c.end()))},
        {"metadata", meta},
    };
}

StoredModel model_from_json(const nlohmann::json& doc) {
    StoredModel sm;
    const auto& meta = doc.at("metadata");
    const auto& cfgj = meta.at("config");
    sm.cfg.m = cfgj.at("m").get<int>();
    sm.cfg.d = cfgj.at("d").get<int>();
    sm.cfg.s = cfgj.at("s").get<int>();
    sm.cfg.seed = cfgj.at("seed").get<std::uint64_t>();
    sm.cfg.validate();
    if (doc.at("m").get<int>() != sm.cfg.m || doc.at("d").get<int>() != sm.cfg.d)
        throw ConfigError("model JSON: top-level m/d disagree with metadata.config");

    sm.model.compute.W = matrix_from(doc.at("W"), sm.cfg.d, sm.cfg.m);
    sm.model.compute.b = vector_from(doc.at("b"), sm.cfg.d);
    sm.model.readout.R = matrix_from(doc.at("R"), sm.cfg.output_dim(), sm.cfg.d);
    sm.model.readout.c = vector_from(doc.at("c"), sm.cfg.output_dim());
    sm.origin = meta.contains("construction")
                    ? meta.at("construction").get<std::string>()
                    : (meta.value("trained", false) ? "trained" : "unknown");
    if (!sm.model.compute.W.allFinite() || !sm.model.readout.R.allFinite())
        throw ConfigError("model JSON: non-finite entries");
    return sm;
}

void save_model(const std::string& path, const Model& model, const ProblemConfig& cfg,
                const std::string& origin) {
    std::ofstream os(path);
    if (!os) throw ConfigError("save_model: cannot open " + path);
    os << model_to_json(model, cfg, origin).dump() << "\n";
}

StoredModel load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("load_model: cannot open " + path);
    nlohmann::json doc;
    is >> doc;
    return model_from_json(doc);
}

}  // namespace uand
