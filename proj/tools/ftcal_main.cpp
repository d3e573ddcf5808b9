// ftcal: batch calibration front end for six-axis F/T sensors.
//
// Subcommands: simulate, fit, eval, predict, inspect, sweep.
// Exit codes: 0 success, 1 usage/spec error, 2 data error, 3 numerical failure.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ftcal/ftcal.hpp"

namespace {

using namespace ftcal;

struct CommonModelFlags {
    int degree = 1;
    double lambda = 0;
    int na = 0;
    int nb = 0;
    bool no_temperature = false;
};

ModelSpec make_spec(const CommonModelFlags& f, const Dataset& d) {
    ModelSpec spec;
    spec.np = f.degree;
    spec.ny = 6;
    spec.nu = (!f.no_temperature && d.has_temperature()) ? 7 : 6;
    spec.lambda = f.lambda;
    spec.na = f.na;
    spec.nb = f.nb;
    spec.validate();
    return spec;
}

void print_report(const std::string& title, const EvalReport& r) {
    std::cout << title << ":\n";
    std::cout << "  samples:                " << r.samples << "\n";
    std::cout << "  force-norm RMSE [N]:    " << r.force_norm_rmse << "\n";
    std::cout << "  torque-norm RMSE [Nm]:  " << r.torque_norm_rmse << "\n";
    std::cout << "  max |force-norm err|:   " << r.max_abs_force_norm_error << "\n";
    std::cout << "  effective coefficients: " << r.effective_coefficients << " / "
              << r.total_coefficients << "\n";
    static const char* names[] = {"fx", "fy", "fz", "tx", "ty", "tz"};
    for (int c = 0; c < 6; ++c) {
        std::cout << "  " << names[c] << ": RMSE " << r.channel_rmse[c] << ", BestFit ";
        if (r.channel_best_fit[c])
            std::cout << *r.channel_best_fit[c];
        else
            std::cout << "undefined (constant channel)";
        std::cout << "\n";
    }
}

void write_model(const CalibrationModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write model file: " + path);
    out << serialize(m).dump(2) << "\n";
}

CalibrationModel read_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed model document: ") + e.what());
    }
    return deserialize(j);
}

int worker_count() {
    if (const char* env = std::getenv("FTCAL_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// --- simulate ---------------------------------------------------------------

int cmd_simulate(const std::string& out_path, const std::string& config_path,
                 const std::string& save_config, std::uint64_t seed,
                 const std::string& trajectory, std::vector<double> weights_kg,
                 int directions, double peak, int points, double noise) {
    GroundTruthTransducer t =
        config_path.empty() ? default_transducer(noise) : [&] {
            std::ifstream in(config_path);
            if (!in) throw DataError("cannot open transducer config: " + config_path);
            nlohmann::json j;
            in >> j;
            return transducer_from_json(j);
        }();
    if (!save_config.empty()) {
        std::ofstream out(save_config);
        if (!out) throw DataError("cannot write transducer config: " + save_config);
        out << transducer_to_json(t).dump(2) << "\n";
    }
    const double g = 9.81;
    const double support_kg = 0.8;
    std::vector<double> norms;
    for (double w : weights_kg) norms.push_back((w + support_kg) * g);

    Trajectory traj;
    if (trajectory == "grid") {
        traj = grid_trajectory(norms, directions, t.envelope);
    } else if (trajectory == "lifting") {
        traj = lifting_trajectory(peak, points, t.envelope);
    } else if (trajectory == "mixed") {
        traj = grid_trajectory(norms, directions, t.envelope);
        auto lift = lifting_trajectory(peak, points, t.envelope);
        traj.insert(traj.end(), lift.begin(), lift.end());
    } else {
        throw SpecError("unknown trajectory type: " + trajectory);
    }
    Dataset d = simulate(t, traj, seed);
    save_dataset(d, out_path);
    std::cout << "wrote " << d.size() << " samples to " << out_path << "\n";
    return 0;
}

// --- fit --------------------------------------------------------------------

struct SplitFlags {
    double fraction = 0.7;
    std::string mode = "chronological";
    std::uint64_t seed = 0;
};

std::pair<Dataset, Dataset> resolve_datasets(const std::string& train_path,
                                             const std::string& val_path,
                                             const std::string& data_path,
                                             const SplitFlags& split) {
    if (!data_path.empty()) {
        Dataset all = load_dataset(data_path);
        SplitMode mode;
        if (split.mode == "chronological")
            mode = SplitMode::Chronological;
        else if (split.mode == "random")
            mode = SplitMode::Random;
        else
            throw SpecError("split mode must be 'chronological' or 'random'");
        return split_dataset(all, split.fraction, mode, split.seed);
    }
    if (train_path.empty()) throw SpecError("either --train or --data is required");
    Dataset train = load_dataset(train_path);
    Dataset val = val_path.empty() ? Dataset{} : load_dataset(val_path);
    return {std::move(train), std::move(val)};
}

int cmd_fit(const std::string& train_path, const std::string& val_path,
            const std::string& data_path, const SplitFlags& split, const CommonModelFlags& mf,
            const std::string& out_path, double prune_threshold, bool deterministic) {
    auto [train, val] = resolve_datasets(train_path, val_path, data_path, split);
    ModelSpec spec = make_spec(mf, train);
    FitOptions opts;
    opts.deterministic = deterministic;
    CalibrationModel model = fit_model(train, spec, opts);
    if (prune_threshold > 0) model = prune(model, prune_threshold);
    for (const auto& w : model.metadata.solver_warnings)
        std::cerr << "warning: " << w << "\n";
    if (!out_path.empty()) write_model(model, out_path);
    print_report("training", evaluate(model, train));
    if (val.size() > 0) print_report("validation", evaluate(model, val));
    return 0;
}

// --- eval / predict / inspect ----------------------------------------------

int cmd_eval(const std::string& model_path, const std::string& data_path,
             const std::string& out_path) {
    CalibrationModel model = read_model(model_path);
    Dataset d = load_dataset(data_path);
    EvalReport r = evaluate(model, d);
    print_report("evaluation", r);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw DataError("cannot write report file: " + out_path);
        out << report_to_json(r).dump(2) << "\n";
    }
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path) {
    CalibrationModel model = read_model(model_path);
    Dataset d = load_dataset(data_path);
    auto rows = d.model_inputs(model.spec.nu);
    const auto depth = static_cast<std::size_t>(std::max(model.spec.na, model.spec.nb));
    std::ofstream out(out_path);
    if (!out) throw DataError("cannot write prediction file: " + out_path);
    out.precision(17);
    out << "fx,fy,fz,tx,ty,tz\n";
    for (std::size_t k = depth; k < rows.size(); ++k) {
        History h;
        const History* hp = nullptr;
        if (model.spec.is_arx()) {
            for (std::size_t j = k - depth; j < k; ++j) {
                h.inputs.push_back(rows[j]);
                h.outputs.push_back(d.outputs[j]);
            }
            hp = &h;
        }
        Wrench y = model.predict(rows[k], hp);
        for (int c = 0; c < 6; ++c) out << y[c] << (c < 5 ? "," : "\n");
    }
    return 0;
}

int cmd_inspect(const std::string& model_path, double threshold) {
    CalibrationModel model = read_model(model_path);
    const bool with_temp = model.spec.nu == 7;
    static const char* out_names[] = {"fx", "fy", "fz", "tx", "ty", "tz"};
    struct Entry {
        double value;
        int output;
        std::string name;
    };
    std::vector<Entry> entries;
    for (int i = 0; i < model.spec.ny; ++i) {
        for (std::size_t c = 0; c < model.columns.size(); ++c) {
            double v = model.coefficients[i][static_cast<Eigen::Index>(c)];
            if (std::abs(v) <= threshold) continue;
            const Column& col = model.columns[c];
            std::string name;
            switch (col.kind) {
                case Column::Kind::Constant: name = "offset"; break;
                case Column::Kind::OutputLag:
                    name = std::string(out_names[col.channel]) + "(k-" +
                           std::to_string(col.lag) + ")";
                    break;
                case Column::Kind::InputMonomial:
                    name = model.monomials[col.monomial].name(with_temp);
                    if (col.lag > 0) name += " @k-" + std::to_string(col.lag);
                    break;
            }
            entries.push_back({v, i, std::move(name)});
        }
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return std::abs(a.value) > std::abs(b.value); });
    std::cout << entries.size() << " coefficients with |value| > " << threshold << "\n";
    std::cout.precision(12);
    for (const auto& e : entries)
        std::cout << out_names[e.output] << "  " << e.name << "  " << e.value << "\n";
    return 0;
}

// --- sweep ------------------------------------------------------------------

int cmd_sweep(const std::string& train_path, const std::string& val_path,
              const std::string& data_path, const SplitFlags& split, bool no_temperature,
              const std::string& out_path, bool deterministic) {
    auto [train, val] = resolve_datasets(train_path, val_path, data_path, split);
    if (val.size() == 0) throw SpecError("sweep needs a validation set (--val or --data + --split)");

    struct Config {
        int degree;
        double lambda;
    };
    std::vector<Config> configs;
    for (int d = 1; d <= 5; ++d) configs.push_back({d, 0});
    for (double lam : {0.5, 1.0, 10.0, 50.0, 100.0, 200.0}) configs.push_back({4, lam});

    std::vector<std::string> rows(configs.size());
    std::atomic<std::size_t> next{0};
    std::mutex io;
    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= configs.size()) return;
            CommonModelFlags mf;
            mf.degree = configs[i].degree;
            mf.lambda = configs[i].lambda;
            mf.no_temperature = no_temperature;
            ModelSpec spec = make_spec(mf, train);
            FitOptions opts;
            opts.deterministic = deterministic;
            opts.parallel = false;  // sweep-level pool already saturates the cores
            CalibrationModel model = fit_model(train, spec, opts);
            EvalReport tr = evaluate(model, train);
            EvalReport vr = evaluate(model, val);
            std::ostringstream os;
            os.precision(17);
            os << configs[i].degree << "," << configs[i].lambda << "," << tr.total_coefficients
               << "," << tr.effective_coefficients << "," << tr.force_norm_rmse << ","
               << vr.force_norm_rmse << "," << tr.torque_norm_rmse << ","
               << vr.torque_norm_rmse;
            rows[i] = os.str();
            std::lock_guard<std::mutex> lock(io);
            std::cerr << "sweep: degree " << configs[i].degree << " lambda "
                      << configs[i].lambda << " done\n";
        }
    };
    int n_workers = std::min<int>(worker_count(), static_cast<int>(configs.size()));
    std::vector<std::thread> pool;
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();

    std::ofstream out(out_path);
    if (!out) throw DataError("cannot write sweep file: " + out_path);
    out << report_csv_header() << "\n";
    for (const auto& r : rows) out << r << "\n";
    std::cout << "wrote " << rows.size() << " sweep rows to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polynomial calibration toolkit for six-axis force/torque sensors"};
    app.require_subcommand(1);

    // simulate
    std::string sim_out, sim_config, sim_save_config, sim_traj = "mixed";
    std::uint64_t sim_seed = 0;
    std::vector<double> sim_weights = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    int sim_directions = 64;
    double sim_peak = 98.1;
    int sim_points = 501;
    double sim_noise = 0.005 * 32768 * 0.01;
    auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset CSV");
    sim->add_option("--out", sim_out, "output dataset CSV")->required();
    sim->add_option("--config", sim_config, "transducer config JSON");
    sim->add_option("--save-config", sim_save_config, "write the transducer config used");
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--trajectory", sim_traj, "grid | lifting | mixed");
    sim->add_option("--weights", sim_weights, "grid weight groups [kg]");
    sim->add_option("--directions", sim_directions, "directions per weight group");
    sim->add_option("--peak", sim_peak, "lifting peak force [N]");
    sim->add_option("--points", sim_points, "lifting trajectory points");
    sim->add_option("--noise", sim_noise, "noise scale [bit] for the default transducer");

    // shared fit/sweep flags
    std::string train_path, val_path, data_path, model_out, sweep_out;
    SplitFlags split;
    CommonModelFlags mf;
    double prune_threshold = 0;
    bool deterministic = false;

    auto* fit = app.add_subcommand("fit", "Fit a calibration model");
    fit->add_option("--train", train_path, "training dataset CSV");
    fit->add_option("--val", val_path, "validation dataset CSV");
    fit->add_option("--data", data_path, "single dataset CSV, split via --split");
    fit->add_option("--split", split.fraction, "training fraction when using --data");
    fit->add_option("--split-mode", split.mode, "chronological | random");
    fit->add_option("--seed", split.seed, "random-split seed");
    fit->add_option("--degree", mf.degree, "polynomial degree np");
    fit->add_option("--lambda", mf.lambda, "L1 weight (normalized feature units; 0 = OLS)");
    fit->add_option("--na", mf.na, "ARX output-lag order");
    fit->add_option("--nb", mf.nb, "ARX input-lag order");
    fit->add_flag("--no-temperature", mf.no_temperature, "ignore the temp column");
    fit->add_option("--out", model_out, "model JSON output path");
    fit->add_option("--prune", prune_threshold, "zero coefficients at or below this magnitude");
    fit->add_flag("--deterministic", deterministic, "omit timestamps for byte-stable outputs");

    std::string eval_model, eval_data, eval_out;
    auto* ev = app.add_subcommand("eval", "Evaluate a model on a dataset");
    ev->add_option("--model", eval_model, "model JSON")->required();
    ev->add_option("--data", eval_data, "dataset CSV")->required();
    ev->add_option("--out", eval_out, "report JSON output path");

    std::string pred_model, pred_data, pred_out;
    auto* pred = app.add_subcommand("predict", "Write predicted wrenches as CSV");
    pred->add_option("--model", pred_model, "model JSON")->required();
    pred->add_option("--data", pred_data, "dataset CSV")->required();
    pred->add_option("--out", pred_out, "prediction CSV output path")->required();

    std::string insp_model;
    double insp_threshold = 0;
    auto* insp = app.add_subcommand("inspect", "List coefficients sorted by magnitude");
    insp->add_option("--model", insp_model, "model JSON")->required();
    insp->add_option("--threshold", insp_threshold, "hide coefficients at or below this magnitude");

    auto* sweep = app.add_subcommand("sweep", "Fit degrees 1..5 plus the degree-4 lambda ladder");
    sweep->add_option("--train", train_path, "training dataset CSV");
    sweep->add_option("--val", val_path, "validation dataset CSV");
    sweep->add_option("--data", data_path, "single dataset CSV, split via --split");
    sweep->add_option("--split", split.fraction, "training fraction when using --data");
    sweep->add_option("--split-mode", split.mode, "chronological | random");
    sweep->add_option("--seed", split.seed, "random-split seed");
    sweep->add_flag("--no-temperature", mf.no_temperature, "ignore the temp column");
    sweep->add_option("--out", sweep_out, "sweep CSV output path")->required();
    sweep->add_flag("--deterministic", deterministic, "omit timestamps for byte-stable outputs");

    try {
        app.parse(argc, argv);
        if (sim->parsed())
            return cmd_simulate(sim_out, sim_config, sim_save_config, sim_seed, sim_traj,
                                sim_weights, sim_directions, sim_peak, sim_points, sim_noise);
        if (fit->parsed())
            return cmd_fit(train_path, val_path, data_path, split, mf, model_out,
                           prune_threshold, deterministic);
        if (ev->parsed()) return cmd_eval(eval_model, eval_data, eval_out);
        if (pred->parsed()) return cmd_predict(pred_model, pred_data, pred_out);
        if (insp->parsed()) return cmd_inspect(insp_model, insp_threshold);
        if (sweep->parsed())
            return cmd_sweep(train_path, val_path, data_path, split, mf.no_temperature,
                             sweep_out, deterministic);
        return 1;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const SpecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
