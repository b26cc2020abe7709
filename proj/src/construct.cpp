#include "uand/construct.hpp"

#include "uand/datagen.hpp"
#include "uand/rng.hpp"

#include <cmath>
#include <string>

namespace uand {

std::array<int, 4> ConstructedModel::class_counts(int i, int j) const {
    std::array<int, 4> counts{0, 0, 0, 0};
    for (int n = 0; n < cfg.d; ++n)
        ++counts[static_cast<int>(neuron_class(n, i, j))];
    return counts;
}

ConstructedModel build_binary_circuit(const ProblemConfig& cfg,
                                      const BinaryWeightSpec& spec) {
    cfg.validate();
    spec.validate();
    auto rng = rng_for(cfg.seed, kConstructStream);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    ConstructedModel cm;
    cm.cfg = cfg;
    cm.spec = spec;
    cm.model = Model::zeros(cfg);
    cm.upper = BoolMatrix(cfg.d, cfg.m);
    for (int n = 0; n < cfg.d; ++n) {
        for (int i = 0; i < cfg.m; ++i) {
            const bool up = unit(rng) < spec.p;
            cm.upper(n, i) = up;
            cm.model.compute.W(n, i) = up ? spec.u : spec.l;
        }
        cm.model.compute.b[n] = spec.bias;
    }
    return cm;
}

double cis_density(int m, int d) {
    const double lm = std::log(static_cast<double>(m));
    return lm * lm / std::sqrt(static_cast<double>(d));
}

ConstructedModel build_cis_construction(const ProblemConfig& cfg, double bias) {
    cfg.validate();
    const double p = cis_density(cfg.m, cfg.d);
    if (p > 1.0)
        throw ConfigError("build_cis_construction: density ln^2(m)/sqrt(d) = " +
                          std::to_string(p) + " exceeds 1; increase d");

    BinaryWeightSpec spec{1.0, 0.0, p, bias};
    ConstructedModel cm = build_binary_circuit(cfg, spec);

    // Readout per pair: mean over class-A neurons (weight 1 on both).
    for (int i = 0; i < cfg.m; ++i) {
        for (int j = 0; j < cfg.m; ++j) {
            if (i == j) continue;
            int count = 0;
            for (int n = 0; n < cfg.d; ++n)
                if (cm.upper(n, i) && cm.upper(n, j)) ++count;
            if (count == 0)
                throw ConfigError("build_cis_construction: pair (" + std::to_string(i) +
                                  "," + std::to_string(j) + ") has no class-A neurons");
            const int row = cfg.pair_index(i, j);
            for (int n = 0; n < cfg.d; ++n)
                if (cm.upper(n, i) && cm.upper(n, j))
                    cm.model.readout.R(row, n) = 1.0 / count;
            // Noiseless (0,0) reads count * ReLU(bias) / count.
            cm.model.readout.c[row] = -std::max(bias, 0.0);
        }
    }
    return cm;
}

ClassTruthTable class_truth_table(const BinaryWeightSpec& spec) {
    const double wi[4] = {spec.u, spec.u, spec.l, spec.l};
    const double wj[4] = {spec.u, spec.l, spec.u, spec.l};
    ClassTruthTable t;
    for (int c = 0; c < 4; ++c) {
        const double vi = (c >> 1) & 1, vj = c & 1;  // rows: 00, 01, 10, 11
        for (int k = 0; k < 4; ++k)
            t.values(c, k) = std::max(wi[k] * vi + wj[k] * vj + spec.bias, 0.0);
    }
    return t;
}

Eigen::Vector4d solve_readout(const ClassTruthTable& table, const TruthTable2& target) {
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(table.values);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(3);
    if (smin <= 0 || smax / smin > 1e12)
        throw ConfigError("solve_readout: class truth table is singular or "
                          "near-degenerate (condition number > 1e12)");
    return Eigen::PartialPivLU<Eigen::Matrix4d>(table.values).solve(target);
}

void install_readout(ConstructedModel& cm, int i, int j, const Eigen::Vector4d& coeffs) {
    const ProblemConfig& cfg = cm.cfg;
    if (i == j || i < 0 || j < 0 || i >= cfg.m || j >= cfg.m)
        throw ConfigError("install_readout: bad pair");
    const auto counts = cm.class_counts(i, j);
    static const char* names[4] = {"A", "B1", "B2", "C"};
    for (int k = 0; k < 4; ++k)
        if (counts[k] == 0 && coeffs[k] != 0.0)
            throw ConfigError(std::string("install_readout: class ") + names[k] +
                              " is empty for pair (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");

    const int row = cfg.pair_index(i, j);
    for (int n = 0; n < cfg.d; ++n) {
        const int k = static_cast<int>(cm.neuron_class(n, i, j));
        cm.model.readout.R(row, n) = counts[k] > 0 ? coeffs[k] / counts[k] : 0.0;
    }
    // Calibrate c so the noiseless (0,0) case reads exactly 0.
    const ClassTruthTable t = class_truth_table(cm.spec);
    cm.model.readout.c[row] = -t.values.row(0).dot(coeffs);
}

void install_readout_all(ConstructedModel& cm, const Eigen::Vector4d& coeffs) {
    for (int i = 0; i < cm.cfg.m; ++i)
        for (int j = 0; j < cm.cfg.m; ++j)
            if (i != j) install_readout(cm, i, j, coeffs);
}

Model build_frozen_random(const ProblemConfig& cfg, const InitSpec& init) {
    Model mdl = init_model(cfg, init, cfg.seed);
    mdl.readout.R.setZero();
    mdl.readout.c.setZero();
    return mdl;
}

}  // namespace uand
