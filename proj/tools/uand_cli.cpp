// Command-line harness: single training runs, parameter sweeps,
// construction benchmarks and model analysis.

#include "uand/analyze.hpp"
#include "uand/construct.hpp"
#include "uand/model.hpp"
#include "uand/serialize.hpp"
#include "uand/svg.hpp"
#include "uand/train.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace uand;

#ifndef UAND_VERSION
#define UAND_VERSION "0.1.0"
#endif

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

json load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    try {
        json doc;
        is >> doc;
        return doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
}

const json& require(const json& j, const std::string& key, const std::string& context) {
    if (!j.contains(key))
        throw ConfigError("missing required field '" + context + "." + key + "'");
    return j.at(key);
}

ProblemConfig parse_problem(const json& j) {
    const json& p = require(j, "problem", "");
    ProblemConfig cfg;
    cfg.m = require(p, "m", "problem").get<int>();
    cfg.d = require(p, "d", "problem").get<int>();
    cfg.s = require(p, "s", "problem").get<int>();
    cfg.seed = require(p, "seed", "problem").get<std::uint64_t>();
    cfg.validate();
    return cfg;
}

TrainConfig parse_train(const json& j) {
    TrainConfig tc;
    const json t = j.value("train", json::object());
    tc.epochs = t.value("epochs", tc.epochs);
    tc.batches_per_epoch = t.value("batches_per_epoch", tc.batches_per_epoch);
    tc.batch_size = t.value("batch_size", tc.batch_size);
    tc.learning_rate = t.value("learning_rate", tc.learning_rate);
    tc.weight_decay = t.value("weight_decay", tc.weight_decay);
    tc.freeze_compute = t.value("freeze_compute", tc.freeze_compute);
    tc.train_readout_bias = t.value("train_readout_bias", tc.train_readout_bias);
    if (t.contains("optimizer")) {
        const json& o = t.at("optimizer");
        const std::string name = o.value("name", "adam");
        if (name == "adam") {
            tc.optimizer = OptimizerKind::Adam;
            tc.adam.beta1 = o.value("beta1", tc.adam.beta1);
            tc.adam.beta2 = o.value("beta2", tc.adam.beta2);
            tc.adam.eps = o.value("eps", tc.adam.eps);
        } else if (name == "sgd") {
            tc.optimizer = OptimizerKind::Sgd;
        } else {
            throw ConfigError("train.optimizer.name must be 'adam' or 'sgd'");
        }
    }
    if (t.contains("init")) {
        const json& i = t.at("init");
        tc.init.w_scale = i.value("w_scale", tc.init.w_scale);
        tc.init.r_scale = i.value("r_scale", tc.init.r_scale);
        tc.init.b_scale = i.value("b_scale", tc.init.b_scale);
        tc.init.c_scale = i.value("c_scale", tc.init.c_scale);
    }
    if (t.contains("loss_weights")) {
        const json& w = t.at("loss_weights");
        tc.loss_weights = LossWeights{w.value("w00", 1.0), w.value("w01", 1.0),
                                      w.value("w11", 1.0)};
        tc.loss_weights->validate();
    }
    tc.validate();
    return tc;
}

json train_config_json(const ProblemConfig& cfg, const TrainConfig& tc) {
    json opt = {{"name", tc.optimizer == OptimizerKind::Adam ? "adam" : "sgd"}};
    if (tc.optimizer == OptimizerKind::Adam) {
        opt["beta1"] = tc.adam.beta1;
        opt["beta2"] = tc.adam.beta2;
        opt["eps"] = tc.adam.eps;
    }
    json doc = {
        {"problem", {{"m", cfg.m}, {"d", cfg.d}, {"s", cfg.s}, {"seed", cfg.seed}}},
        {"train",
         {{"epochs", tc.epochs},
          {"batches_per_epoch", tc.batches_per_epoch},
          {"batch_size", tc.batch_size},
          {"learning_rate", tc.learning_rate},
          {"weight_decay", tc.weight_decay},
          {"freeze_compute", tc.freeze_compute},
          {"train_readout_bias", tc.train_readout_bias},
          {"optimizer", opt},
          {"init",
           {{"w_scale", tc.init.resolved_w_scale(cfg)},
            {"r_scale", tc.init.resolved_r_scale(cfg)},
            {"b_scale", tc.init.b_scale},
            {"c_scale", tc.init.c_scale}}}}},
    };
    if (tc.loss_weights)
        doc["train"]["loss_weights"] = {{"w00", tc.loss_weights->w00},
                                        {"w01", tc.loss_weights->w01},
                                        {"w11", tc.loss_weights->w11}};
    return doc;
}

std::string config_hash(const json& doc) {
    // FNV-1a over the canonical dump; enough to name a directory.
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : doc.dump()) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf, 16);
}

std::ofstream open_csv(const fs::path& path, const json& config, const std::string& header) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << "# version: " << UAND_VERSION << "\n";
    os << "# config: " << config.dump() << "\n";
    os << header << "\n";
    os.precision(12);
    return os;
}

fs::path resolve_out_dir(const json& doc, const std::string& cli_override,
                         const std::string& fallback) {
    if (const char* env = std::getenv("UAND_OUTPUT_DIR")) return env;
    if (!cli_override.empty()) return cli_override;
    return doc.value("output_dir", fallback);
}

int resolve_threads(const json& doc) {
    if (const char* env = std::getenv("UAND_THREADS")) return std::max(1, std::atoi(env));
    return std::max(1, doc.value("parallelism", 1));
}

void write_scatter_artifacts(const fs::path& dir, const Model& model,
                             const ProblemConfig& cfg, int pi, int pj, const json& config) {
    auto pts = readout_scatter(model, cfg, pi, pj);
    auto csv = open_csv(dir / "scatter.csv", config, "w_i,w_j,readout_weight");
    std::vector<svg::Point> spts;
    spts.reserve(pts.size());
    for (const auto& p : pts) {
        csv << p.wi << "," << p.wj << "," << p.readout << "\n";
        spts.push_back({p.wi, p.wj, p.readout});
    }
    svg::write_scatter((dir / "scatter.svg").string(), spts,
                       "readout weights for pair (" + std::to_string(pi) + "," +
                           std::to_string(pj) + ")",
                       "W_i", "W_j");
}

void write_binarity_csv(const fs::path& dir, const BinarityReport& rep, const json& config) {
    auto os = open_csv(dir / "binarity.csv", config,
                       "neuron,upper,lower,p_hat,deviation_q90");
    os << "# score: " << rep.score << "\n";
    for (Eigen::Index i = 0; i < rep.upper.size(); ++i)
        os << i << "," << rep.upper[i] << "," << rep.lower[i] << "," << rep.p_hat[i]
           << "," << rep.deviation_q90[i] << "\n";
}

// One full training run with all artifacts; shared by train and sweep.
json run_train_cell(const ProblemConfig& cfg, const TrainConfig& tc, const fs::path& dir,
                    int pair_i, int pair_j) {
    fs::create_directories(dir);
    const json config = train_config_json(cfg, tc);

    const auto t0 = std::chrono::steady_clock::now();
    Model init = init_model(cfg, tc.init, cfg.seed);
    Matrix w0 = init.compute.W;
    TrainResult res = train_from(std::move(init), cfg, tc);
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - t0)
                               .count();

    {
        auto os = open_csv(dir / "history.csv", config,
                           "epoch,loss,binarity_score,loss00,loss01,loss11");
        for (const auto& r : res.history)
            os << r.epoch << "," << r.loss << "," << r.binarity << "," << r.cases.loss00
               << "," << r.cases.loss01 << "," << r.cases.loss11 << "\n";
    }
    save_model((dir / "model.json").string(), res.model, cfg, "trained");
    write_binarity_csv(dir, binarity_score(res.model.compute.W), config);
    write_scatter_artifacts(dir, res.model, cfg, pair_i, pair_j, config);

    const auto ev = detect_solution_type(res.model, cfg, &w0);
    json record = {
        {"version", UAND_VERSION},
        {"config", config},
        {"diverged", res.diverged},
        {"final_loss", res.final_loss},
        {"case_losses",
         {{"loss00", res.final_cases.loss00},
          {"loss01", res.final_cases.loss01},
          {"loss11", res.final_cases.loss11}}},
        {"binarity_score", binarity_score(res.model.compute.W).score},
        {"solution_type", to_string(ev.type)},
        {"evidence",
         {{"binarity", ev.binarity},
          {"additive_alpha", ev.additive_alpha},
          {"additive_r2", ev.additive_r2},
          {"init_distance", ev.init_distance}}},
        {"wall_seconds", seconds},
    };
    std::ofstream(dir / "record.json") << record.dump(2) << "\n";
    return record;
}

std::pair<int, int> parse_pair(const json& doc, const ProblemConfig& cfg) {
    int pi = 0, pj = 1;
    if (doc.contains("scatter_pair")) {
        pi = doc["scatter_pair"].at(0).get<int>();
        pj = doc["scatter_pair"].at(1).get<int>();
    }
    if (pi == pj || pi < 0 || pj < 0 || pi >= cfg.m || pj >= cfg.m)
        throw ConfigError("scatter_pair must be two distinct indices below m");
    return {pi, pj};
}

int cmd_train(const std::string& cfg_path, const std::string& out_override) {
    const json doc = load_json(cfg_path);
    const ProblemConfig cfg = parse_problem(doc);
    const TrainConfig tc = parse_train(doc);
    const auto [pi, pj] = parse_pair(doc, cfg);
    const fs::path out = resolve_out_dir(doc, out_override, "runs");
    const fs::path dir = out / ("run-" + config_hash(train_config_json(cfg, tc)));

    const json record = run_train_cell(cfg, tc, dir, pi, pj);
    std::cout << "run dir: " << dir.string() << "\n";
    std::cout << record.dump(2) << "\n";
    if (record.at("diverged").get<bool>()) {
        std::cerr << "training diverged; partial artifacts written\n";
        return kExitNumeric;
    }
    return 0;
}

int cmd_sweep(const std::string& cfg_path, const std::string& out_override) {
    const json doc = load_json(cfg_path);
    const json& base = require(doc, "base", "");
    const json& grid = require(doc, "grid", "");
    const ProblemConfig base_cfg = parse_problem(base);
    const TrainConfig tc = parse_train(base);
    const fs::path out = resolve_out_dir(doc, out_override, "sweep");
    const int threads = resolve_threads(doc);

    auto axis = [&](const char* name, long fallback) {
        std::vector<long> vals;
        if (grid.contains(name))
            for (const auto& v : grid.at(name)) vals.push_back(v.get<long>());
        else
            vals.push_back(fallback);
        return vals;
    };
    const auto ms = axis("m", base_cfg.m);
    const auto ds = axis("d", base_cfg.d);
    const auto ss = axis("s", base_cfg.s);

    struct Cell {
        ProblemConfig cfg;
        json record;
        bool failed = false;
        std::string error;
    };
    std::vector<Cell> cells;
    for (long m : ms)
        for (long d : ds)
            for (long s : ss) {
                Cell c;
                c.cfg = base_cfg;
                c.cfg.m = static_cast<int>(m);
                c.cfg.d = static_cast<int>(d);
                c.cfg.s = static_cast<int>(s);
                cells.push_back(std::move(c));
            }
    if (cells.empty()) throw ConfigError("sweep grid is empty");

    fs::create_directories(out);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t k; (k = next.fetch_add(1)) < cells.size();) {
            Cell& c = cells[k];
            try {
                c.cfg.validate();
                char name[64];
                std::snprintf(name, sizeof(name), "m%d_d%d_s%d", c.cfg.m, c.cfg.d, c.cfg.s);
                c.record = run_train_cell(c.cfg, tc, out / name, 0, 1);
            } catch (const std::exception& e) {
                c.failed = true;
                c.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(threads, cells.size()); ++t)
        pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    json config = {{"base", train_config_json(base_cfg, tc)}, {"grid", grid}};
    auto os = open_csv(out / "aggregate.csv", config,
                       "m,d,s,seed,final_loss,loss00,loss01,loss11,binarity_score,"
                       "solution_type,wall_seconds,status");
    for (const auto& c : cells) {
        os << c.cfg.m << "," << c.cfg.d << "," << c.cfg.s << "," << c.cfg.seed << ",";
        if (c.failed) {
            os << ",,,,,," << "error:" << c.error << "\n";
            continue;
        }
        os << c.record.at("final_loss").get<double>() << ","
           << c.record.at("case_losses").at("loss00").get<double>() << ","
           << c.record.at("case_losses").at("loss01").get<double>() << ","
           << c.record.at("case_losses").at("loss11").get<double>() << ","
           << c.record.at("binarity_score").get<double>() << ","
           << c.record.at("solution_type").get<std::string>() << ","
           << c.record.at("wall_seconds").get<double>() << ","
           << (c.record.at("diverged").get<bool>() ? "diverged" : "ok") << "\n";
    }
    std::cout << "sweep aggregate: " << (out / "aggregate.csv").string() << "\n";
    return 0;
}

int cmd_bench(const std::string& cfg_path, const std::string& out_override) {
    const json doc = load_json(cfg_path);
    const ProblemConfig cfg = parse_problem(doc);
    const int n_samples = doc.value("n_samples", 20000);
    const json sj = doc.value("spec", json::object());
    BinaryWeightSpec spec;
    spec.u = sj.value("u", spec.u);
    spec.l = sj.value("l", spec.l);
    spec.p = sj.value("p", spec.p);
    spec.bias = sj.value("bias", spec.bias);
    spec.validate();
    const fs::path out = resolve_out_dir(doc, out_override, "bench");
    fs::create_directories(out);
    const LossWeights lw = compute_loss_weights(cfg);
    json config = doc;
    config["resolved_spec"] = {{"u", spec.u}, {"l", spec.l}, {"p", spec.p}, {"bias", spec.bias}};

    struct Row {
        std::string name;
        double loss_mc = -1, loss_exhaustive = -1, theory_var = -1;
        std::string error;
    };
    std::vector<Row> rows;

    // Dense two-valued circuit with the solved AND readout.
    try {
        auto cm = build_binary_circuit(cfg, spec);
        install_readout_all(cm, solve_readout(class_truth_table(spec), table_and()));
        Row r{"binary"};
        r.loss_mc = mc_balanced_loss(cm.model, cfg, lw, n_samples);
        if (cfg.m <= 12) r.loss_exhaustive = exhaustive_balanced_loss(cm.model, cfg, lw);
        const double beta = calibrate_beta(spec, std::max(1, cfg.s), spec.bias);
        r.theory_var = theory_var_binary(cfg.s, cfg.d, spec.p, spec.u, spec.l, beta);
        save_model((out / "binary.json").string(), cm.model, cfg, "binary");
        rows.push_back(r);
    } catch (const std::exception& e) {
        rows.push_back({"binary", -1, -1, -1, e.what()});
    }

    // Sparse 0/1 construction with class-A mean readout.
    try {
        auto cm = build_cis_construction(cfg);
        Row r{"cis"};
        r.loss_mc = mc_balanced_loss(cm.model, cfg, lw, n_samples);
        if (cfg.m <= 12) r.loss_exhaustive = exhaustive_balanced_loss(cm.model, cfg, lw);
        const double p = cis_density(cfg.m, cfg.d);
        const double beta = calibrate_beta(BinaryWeightSpec{1.0, 0.0, p, 0.0},
                                           std::max(1, cfg.s), 0.0);
        r.theory_var = theory_var_cis(cfg.s, cfg.d, p, beta);
        save_model((out / "cis.json").string(), cm.model, cfg, "cis");
        rows.push_back(r);
    } catch (const std::exception& e) {
        rows.push_back({"cis", -1, -1, -1, e.what()});
    }

    // Frozen-random compute layer with a trained readout.
    try {
        TrainConfig rt;
        if (doc.contains("readout_train")) {
            rt = parse_train(json{{"train", doc.at("readout_train")}});
        } else {
            rt.epochs = 5;
            rt.batches_per_epoch = 50;
            rt.batch_size = 128;
        }
        rt.freeze_compute = true;
        Model frozen = build_frozen_random(cfg, rt.init);
        TrainResult res = train_from(std::move(frozen), cfg, rt);
        Row r{"frozen_random"};
        r.loss_mc = mc_balanced_loss(res.model, cfg, lw, n_samples);
        if (cfg.m <= 12) r.loss_exhaustive = exhaustive_balanced_loss(res.model, cfg, lw);
        save_model((out / "frozen_random.json").string(), res.model, cfg, "frozen_random");
        rows.push_back(r);
    } catch (const std::exception& e) {
        rows.push_back({"frozen_random", -1, -1, -1, e.what()});
    }

    auto os = open_csv(out / "comparison.csv", config,
                       "model,loss_mc,loss_exhaustive,theory_var,error");
    for (const auto& r : rows) {
        os << r.name << ",";
        if (r.loss_mc >= 0) os << r.loss_mc;
        os << ",";
        if (r.loss_exhaustive >= 0) os << r.loss_exhaustive;
        os << ",";
        if (r.theory_var >= 0) os << r.theory_var;
        os << "," << r.error << "\n";
        std::cout << r.name << ": loss_mc="
                  << (r.loss_mc >= 0 ? std::to_string(r.loss_mc) : "n/a")
                  << (r.error.empty() ? "" : " error=" + r.error) << "\n";
    }
    return 0;
}

int cmd_analyze(const std::string& model_path, int pi, int pj) {
    StoredModel sm = load_model(model_path);
    const ProblemConfig& cfg = sm.cfg;
    if (pi == pj || pi < 0 || pj < 0 || pi >= cfg.m || pj >= cfg.m)
        throw ConfigError("--pair must name two distinct indices below m");

    const fs::path dir = fs::path(model_path).parent_path().empty()
                             ? fs::path(".")
                             : fs::path(model_path).parent_path();
    json config = {{"model", model_path},
                   {"origin", sm.origin},
                   {"problem", {{"m", cfg.m}, {"d", cfg.d}, {"s", cfg.s}, {"seed", cfg.seed}}}};

    const auto rep = binarity_score(sm.model.compute.W);
    write_binarity_csv(dir, rep, config);
    write_scatter_artifacts(dir, sm.model, cfg, pi, pj, config);
    const auto ev = detect_solution_type(sm.model, cfg);

    json result = {
        {"version", UAND_VERSION},
        {"config", config},
        {"binarity_score", rep.score},
        {"solution_type", to_string(ev.type)},
        {"evidence",
         {{"binarity", ev.binarity},
          {"additive_alpha", ev.additive_alpha},
          {"additive_r2", ev.additive_r2}}},
    };
    std::ofstream(dir / "analysis.json") << result.dump(2) << "\n";
    std::cout << result.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Universal-AND toy model laboratory"};
    app.set_version_flag("--version", UAND_VERSION);
    app.require_subcommand(1);

    std::string cfg_path, model_path, out_dir;
    std::vector<int> pair{0, 1};

    auto* t = app.add_subcommand("train", "run one training experiment from a JSON config");
    t->add_option("config", cfg_path, "JSON config file")->required();
    t->add_option("--output-dir", out_dir, "override output directory");

    auto* s = app.add_subcommand("sweep", "run a (m, d, s) grid of training experiments");
    s->add_option("config", cfg_path, "JSON sweep file")->required();
    s->add_option("--output-dir", out_dir, "override output directory");

    auto* b = app.add_subcommand("bench", "compare analytic constructions");
    b->add_option("config", cfg_path, "JSON config file")->required();
    b->add_option("--output-dir", out_dir, "override output directory");

    auto* a = app.add_subcommand("analyze", "analyze a saved model file");
    a->add_option("model", model_path, "model JSON file")->required();
    a->add_option("--pair", pair, "input pair for the readout chart")->expected(2);

    CLI11_PARSE(app, argc, argv);

    try {
        if (t->parsed()) return cmd_train(cfg_path, out_dir);
        if (s->parsed()) return cmd_sweep(cfg_path, out_dir);
        if (b->parsed()) return cmd_bench(cfg_path, out_dir);
        if (a->parsed()) return cmd_analyze(model_path, pair[0], pair[1]);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const TrainingError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
