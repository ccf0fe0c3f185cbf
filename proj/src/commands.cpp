#include "foca/commands.hpp"

#include <atomic>
#include <filesystem>
#include <iostream>
#include <map>
#include <thread>

#include <json.hpp>

#include "foca/csv_io.hpp"
#include "foca/diagnostics.hpp"

namespace foca {

namespace fs = std::filesystem;
using nlohmann::json;

LinearSystem linear_system_for_rho(double rho, int dim, double h) {
    const double lambda = (rho - 1.0) / h;
    std::vector<double> lambdas(static_cast<size_t>(dim), lambda);
    FeatureVector x0 = FeatureVector::zeros(dim);
    for (int i = 0; i < dim; ++i)
        x0[i] = 1.0;
    return LinearSystem::diagonal(lambdas, std::move(x0));
}

std::unique_ptr<TrajectorySource> make_source(const ExperimentConfig& config) {
    if (config.source_kind == "denoiser") {
        ToyDenoiser model = ToyDenoiser::load(config.weights_path);
        return std::make_unique<DenoiserSource>(std::move(model));
    }
    if (config.source_kind == "linear") {
        return std::make_unique<LinearSource>(linear_system_for_rho(config.source_rho, config.source_dim, config.h),
                                              config.h);
    }
    if (config.source_kind == "two_scale") {
        FeatureVector x0{1.0, 1.0};
        return std::make_unique<LinearSource>(
            LinearSystem::two_scale(config.source_lambda_fast, config.source_lambda_slow, std::move(x0)), config.h);
    }
    if (config.source_kind == "rotation") {
        FeatureVector x0{1.0, 0.0};
        return std::make_unique<LinearSource>(LinearSystem::rotation(config.source_omega, std::move(x0)), config.h);
    }
    if (config.source_kind == "vdp") {
        VanDerPol p;
        p.mu = config.source_mu;
        return std::make_unique<VanDerPolSource>(std::move(p), config.h);
    }
    throw ConfigError("config field 'source.kind': unknown source '" + config.source_kind + "'");
}

namespace {

void ensure_out_dir(const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw ConfigError("cannot create output directory " + out_dir + ": " + ec.message());
}

int checked_total_steps(const ExperimentConfig& config, const TrajectorySource& source) {
    if (config.source_kind == "denoiser" && config.total_steps > source.default_total_steps())
        throw ConfigError("config field 'schedule.total_steps': exceeds the denoiser's " +
                          std::to_string(source.default_total_steps()) + " timesteps");
    return config.total_steps;
}

}  // namespace

int cmd_train(const ExperimentConfig& config, const std::string& out_dir) {
    ensure_out_dir(out_dir);
    const DiffusionSchedule schedule = DiffusionSchedule::linear_beta_wobble(
        config.T, config.beta_start, config.beta_end, config.wobble_amp, config.wobble_freq, config.wobble_decay);
    schedule.validate();
    const TrainResult result = train_denoiser(schedule, config.train);

    const std::string weights_path = (fs::path(out_dir) / "denoiser.txt").string();
    result.model.save(weights_path);

    CsvBuilder log(config.normalized());
    log.header({"epoch", "holdout_mse"});
    for (const auto& [epoch, mse] : result.loss_trace)
        log.row({std::to_string(epoch), csv_double(mse)});
    write_text_file((fs::path(out_dir) / "training_log.csv").string(), log.str());

    std::cout << "train: epochs=" << result.loss_trace.size() << " final_mse=" << csv_double(result.final_mse)
              << " threshold=" << csv_double(config.train.mse_threshold)
              << (result.converged ? " converged" : " NOT converged") << "\n";
    if (!result.converged) {
        std::cerr << "train: holdout mse " << csv_double(result.final_mse) << " did not reach threshold "
                  << csv_double(config.train.mse_threshold) << " within " << config.train.max_epochs << " epochs\n";
        return kExitRuntimeError;
    }
    return kExitOk;
}

namespace {

struct CellKey {
    size_t kind_idx;
    size_t interval_idx;
    size_t seed_idx;
};

struct CellOutput {
    std::string steps_rows;
    std::string summary_row;
    bool failed = false;
    std::string error;
};

}  // namespace

int cmd_sweep(const ExperimentConfig& config, const std::string& out_dir) {
    config.validate();
    ensure_out_dir(out_dir);
    const auto prototype = make_source(config);
    const int total = checked_total_steps(config, *prototype);

    // One uncached reference per seed, shared by every (kind, N) cell.
    std::vector<ReferenceRun> references(config.seeds.size());
    for (size_t i = 0; i < config.seeds.size(); ++i) {
        auto src = prototype->clone();
        references[i] = run_uncached(*src, total, config.seeds[i]);
    }

    std::vector<FeatureVector> mmd_data;
    if (config.mmd_samples > 0 && config.source_kind == "denoiser")
        mmd_data = sample_dataset(config.mmd_samples, config.train.seed);

    std::vector<CellKey> cells;
    for (size_t ki = 0; ki < config.kinds.size(); ++ki)
        for (size_t ni = 0; ni < config.intervals.size(); ++ni)
            for (size_t si = 0; si < config.seeds.size(); ++si)
                cells.push_back(CellKey{ki, ni, si});
    std::vector<CellOutput> outputs(cells.size());

    auto run_cell = [&](size_t idx) {
        const CellKey key = cells[idx];
        CellOutput& out = outputs[idx];
        const PredictorKind kind = config.kinds[key.kind_idx];
        const int interval = config.intervals[key.interval_idx];
        const uint64_t seed = config.seeds[key.seed_idx];
        try {
            CacheSchedule schedule{interval, total, config.warmup_steps};
            RunOptions opts;
            opts.taylor_order = config.taylor_order;
            opts.seed = seed;
            opts.stiffness_window = config.stiffness_window;
            auto src = prototype->clone();
            const RunReport report = run_cached_sampler(*src, schedule, kind, opts, &references[key.seed_idx]);
            if (report.aborted)
                throw NumericError("run aborted at step " + std::to_string(report.abort_step));

            for (const auto& rec : report.records) {
                out.steps_rows += config.experiment;
                out.steps_rows += ',' + to_string(kind);
                out.steps_rows += ',' + std::to_string(interval);
                out.steps_rows += ',' + std::to_string(seed);
                out.steps_rows += ',' + std::to_string(rec.step_index);
                out.steps_rows += rec.is_full ? ",true" : ",false";
                out.steps_rows += ',' + csv_double(rec.rel_error);
                out.steps_rows += ',' + csv_double(rec.lte);
                out.steps_rows += ',' + csv_double(rec.stiffness_index);
                out.steps_rows += '\n';
            }

            std::string mmd_field;
            if (!mmd_data.empty()) {
                std::vector<FeatureVector> samples;
                samples.reserve(static_cast<size_t>(config.mmd_samples));
                for (int i = 0; i < config.mmd_samples; ++i) {
                    auto bsrc = prototype->clone();
                    const uint64_t bseed = seed * 0x100000ULL + static_cast<uint64_t>(i);
                    CacheSchedule bsched{interval, total, config.warmup_steps};
                    RunOptions bopts;
                    bopts.taylor_order = config.taylor_order;
                    bopts.seed = bseed;
                    const RunReport r = run_cached_sampler(*bsrc, bsched, kind, bopts);
                    if (r.aborted)
                        throw NumericError("batch run aborted");
                    samples.push_back(bsrc->current_state());
                }
                mmd_field = csv_double(mmd_sample_quality(samples, mmd_data));
            }

            std::string prop1_field;
            if (config.source_kind == "linear") {
                const LinearSystem system = linear_system_for_rho(config.source_rho, config.source_dim, config.h);
                const Prop1Report p1 =
                    verify_proposition1(system, config.h, std::max(2, config.warmup_steps), config.prop1_max_k, kind);
                prop1_field = p1.pass ? "true" : "false";
            }

            out.summary_row = config.experiment;
            out.summary_row += ',' + to_string(kind);
            out.summary_row += ',' + std::to_string(interval);
            out.summary_row += ',';
            if (kind == PredictorKind::Taylor)
                out.summary_row += std::to_string(config.taylor_order);
            out.summary_row += ',' + std::to_string(seed);
            out.summary_row += ',' + std::to_string(report.evaluation_count);
            out.summary_row += ',' + csv_double(report.acceleration_ratio);
            out.summary_row += ',' + csv_double(report.terminal_sample_deviation);
            out.summary_row += ',' + mmd_field;
            out.summary_row += ',' + prop1_field;
            out.summary_row += ',' + csv_double(report.max_rel_error());
            out.summary_row += '\n';
        } catch (const std::exception& e) {
            out.failed = true;
            out.error = to_string(kind) + ",N=" + std::to_string(interval) + ",seed=" + std::to_string(seed) + ": " +
                        e.what();
        }
    };

    if (config.threads <= 1) {
        for (size_t i = 0; i < cells.size(); ++i)
            run_cell(i);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&]() {
            for (size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
                run_cell(i);
        };
        std::vector<std::thread> pool;
        const size_t nthreads = std::min<size_t>(static_cast<size_t>(config.threads), cells.size());
        for (size_t i = 0; i < nthreads; ++i)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }

    CsvBuilder steps(config.normalized());
    steps.header({"experiment", "kind", "N", "seed", "step_index", "is_full", "rel_error", "lte", "stiffness_index"});
    CsvBuilder summary(config.normalized());
    summary.header({"experiment", "kind", "N", "m", "seed", "evaluation_count", "acceleration_ratio",
                    "terminal_deviation", "mmd", "prop1_pass", "max_rel_error"});
    std::string steps_body = steps.str();
    std::string summary_body = summary.str();
    bool any_failed = false;
    for (size_t i = 0; i < outputs.size(); ++i) {
        if (outputs[i].failed) {
            any_failed = true;
            std::cerr << "sweep: cell failed: " << outputs[i].error << "\n";
            continue;
        }
        steps_body += outputs[i].steps_rows;
        summary_body += outputs[i].summary_row;
    }
    write_text_file((fs::path(out_dir) / "steps.csv").string(), steps_body);
    write_text_file((fs::path(out_dir) / "summary.csv").string(), summary_body);
    std::cout << "sweep: " << outputs.size() << " cells, outputs in " << out_dir << "\n";
    return any_failed ? kExitPartialFailure : kExitOk;
}

int cmd_prop1(const ExperimentConfig& config, const std::string& out_dir) {
    config.validate();
    ensure_out_dir(out_dir);
    if (config.source_kind != "linear")
        throw ConfigError("prop1 requires source.kind = linear (contractive test system)");
    const LinearSystem system = linear_system_for_rho(config.source_rho, config.source_dim, config.h);
    const PredictorKind kind = predictor_kind_from_string(config.prop1_kind);
    const Prop1Report report =
        verify_proposition1(system, config.h, std::max(2, config.warmup_steps), config.prop1_max_k, kind);

    json j;
    j["format_version"] = kJsonFormatVersion;
    j["config"] = config.normalized();
    j["kind"] = to_string(kind);
    j["rho"] = report.rho;
    j["tau_max"] = report.tau_max;
    j["sup_bound"] = report.sup_bound;
    j["errors"] = report.errors;
    j["bounds"] = report.bounds;
    j["bound_ok"] = report.bound_ok;
    j["all_bounds_ok"] = report.all_bounds_ok;
    j["sup_ok"] = report.sup_ok;
    j["error_increasing_in_k"] = report.error_increasing_in_k;
    j["verdict"] = report.pass ? "pass" : "bound_violated";
    write_text_file((fs::path(out_dir) / "prop1.json").string(), j.dump(2) + "\n");
    std::cout << "prop1: rho=" << report.rho << " tau_max=" << report.tau_max
              << " verdict=" << (report.pass ? "pass" : "bound_violated") << "\n";
    return kExitOk;
}

int cmd_dump(const ExperimentConfig& config, const std::string& out_dir) {
    config.validate();
    ensure_out_dir(out_dir);
    auto source = make_source(config);
    const int total = checked_total_steps(config, *source);
    const uint64_t seed = config.seeds.front();

    auto ref_source = source->clone();
    const ReferenceRun ref = run_uncached(*ref_source, total, seed);

    CacheSchedule schedule{config.dump_interval, total, config.warmup_steps};
    RunOptions opts;
    opts.taylor_order = config.taylor_order;
    opts.seed = seed;
    const RunReport report =
        run_cached_sampler(*source, schedule, predictor_kind_from_string(config.dump_kind), opts, &ref);
    if (report.aborted)
        throw NumericError("dump: run aborted at step " + std::to_string(report.abort_step));

    const int d = source->feature_dim();
    CsvBuilder traj(config.normalized());
    std::vector<std::string> cols = {"step_index"};
    for (int i = 0; i < d; ++i)
        cols.push_back("c" + std::to_string(i));
    for (int i = 0; i < d; ++i)
        cols.push_back("u" + std::to_string(i));
    traj.header(cols);
    for (int s = 0; s < total; ++s) {
        std::vector<std::string> row;
        row.reserve(static_cast<size_t>(1 + 2 * d));
        row.push_back(std::to_string(s));
        const FeatureVector& cached = report.used_features[static_cast<size_t>(s)];
        const FeatureVector& uncached = ref.features[static_cast<size_t>(s)];
        for (int i = 0; i < d; ++i)
            row.push_back(csv_double(cached[i]));
        for (int i = 0; i < d; ++i)
            row.push_back(csv_double(uncached[i]));
        traj.row(row);
    }
    write_text_file((fs::path(out_dir) / "trajectory.csv").string(), traj.str());
    std::cout << "dump: " << total << " steps x " << (1 + 2 * d) << " columns in " << out_dir << "\n";
    return kExitOk;
}

}  // namespace foca
