#pragma once

#include "uand/train.hpp"
#include "uand/types.hpp"

#include <array>

namespace uand {

/// Two-valued neuron weight pattern: each entry is u with probability
/// p, else l, plus a shared bias.
struct BinaryWeightSpec {
    double u = 0.1;
    double l = -0.25;
    double p = 0.75;
    double bias = 0.05;

    void validate() const {
        if (l > u) throw ConfigError("BinaryWeightSpec: requires l <= u");
        if (p < 0 || p > 1) throw ConfigError("BinaryWeightSpec: requires 0 <= p <= 1");
    }
};

/// Neuron class relative to an ordered pair (i, j): which of (u, l)
/// the neuron assigns to each input.
enum class NeuronClass { A, B1, B2, C };

inline NeuronClass classify(bool upper_i, bool upper_j) {
    if (upper_i && upper_j) return NeuronClass::A;
    if (upper_i) return NeuronClass::B1;
    if (upper_j) return NeuronClass::B2;
    return NeuronClass::C;
}

/// 2-input truth table: target values for cases (0,0), (0,1), (1,0),
/// (1,1) in that order.
using TruthTable2 = Eigen::Vector4d;

inline TruthTable2 table_and() { return {0, 0, 0, 1}; }
inline TruthTable2 table_xor() { return {0, 1, 1, 0}; }
inline TruthTable2 table_first_input() { return {0, 0, 1, 1}; }  // v1 regardless of v2

/// Noiseless mean activation of each class for each input case.
/// values(case, class); case rows ordered (0,0),(0,1),(1,0),(1,1) and
/// class columns ordered A, B1, B2, C.
struct ClassTruthTable {
    Eigen::Matrix4d values;
};

/// A constructed model plus the exact per-(neuron, input) choice made
/// by the builder, for class lookup without inference.
struct ConstructedModel {
    Model model;
    BoolMatrix upper;  // d x m, true where the entry took the upper value
    BinaryWeightSpec spec;
    ProblemConfig cfg;

    NeuronClass neuron_class(int neuron, int i, int j) const {
        return classify(upper(neuron, i), upper(neuron, j));
    }
    std::array<int, 4> class_counts(int i, int j) const;
};

/// Random two-valued compute layer; readout starts at zero.
ConstructedModel build_binary_circuit(const ProblemConfig& cfg, const BinaryWeightSpec& spec);

/// Density of the sparse 0/1 construction: ln^2(m) / sqrt(d).
double cis_density(int m, int d);

/// Sparse 0/1 compute layer at density cis_density, with the readout
/// for every off-diagonal pair set to the mean of its class-A neurons.
ConstructedModel build_cis_construction(const ProblemConfig& cfg, double bias = 0.0);

/// Noiseless class activations: ReLU(w_i v_i + w_j v_j + bias).
ClassTruthTable class_truth_table(const BinaryWeightSpec& spec);

/// Coefficients (A, B1, B2, C) whose linear combination of class
/// activations reproduces the target table exactly in the noiseless
/// model. Throws ConfigError when the class columns are degenerate
/// (condition number above 1e12).
Eigen::Vector4d solve_readout(const ClassTruthTable& table, const TruthTable2& target);

/// Set the readout row for pair (i, j): every neuron gets
/// coeff(class) / count(class); the bias entry is calibrated so the
/// (0,0) case reads 0 in the noiseless model. Throws on empty classes.
void install_readout(ConstructedModel& cm, int i, int j, const Eigen::Vector4d& coeffs);

/// install_readout for every off-diagonal ordered pair with one shared
/// coefficient vector (classes are relative to each pair).
void install_readout_all(ConstructedModel& cm, const Eigen::Vector4d& coeffs);

/// Random compute layer for the frozen-first-layer experiment; readout
/// zero, intended for train_from with freeze_compute = true.
Model build_frozen_random(const ProblemConfig& cfg, const InitSpec& init);

}  // namespace uand
