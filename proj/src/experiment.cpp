#include "fedsched/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "fedsched/io.hpp"
#include "fedsched/rng.hpp"
#include "fedsched/svg.hpp"

namespace fedsched {

namespace {

using nlohmann::ordered_json;

std::unique_ptr<Policy> build_policy(const PolicyConfig& config, const SeedContext& context) {
    const SystemParams& params = context.scenario.params;
    const std::uint64_t label_hash = fnv1a(config.label);

    GeneralizationSpec spec = context.spec;
    if (config.beta.has_value()) {
        spec.beta = *config.beta;
        spec.validate();
    }
    SolverChoice solver;
    solver.kind = config.solver;
    solver.annealer.steps = config.anneal_steps;
    solver.annealer.temperature_scale = config.temperature_scale;

    auto solver_rng = make_stream(context.seed, StreamPurpose::kSolver, label_hash);
    auto policy_rng = make_stream(context.seed, StreamPurpose::kPolicy, label_hash);

    if (config.name == "bsfl") {
        return std::make_unique<BsflPolicy>(config.label, params, std::move(spec), solver,
                                            solver_rng, config.alpha);
    }
    if (config.name == "latency_ucb") {
        return std::make_unique<BsflPolicy>(config.label, params, std::move(spec), solver,
                                            solver_rng, 0.0);
    }
    if (config.name == "random_uniform") {
        return std::make_unique<RandomUniformPolicy>(config.label, params, policy_rng);
    }
    if (config.name == "random_proportional") {
        std::vector<double> weights;
        weights.reserve(context.scenario.profiles.size());
        for (const auto& profile : context.scenario.profiles) {
            weights.push_back(static_cast<double>(profile.data_size));
        }
        return std::make_unique<RandomProportionalPolicy>(config.label, params,
                                                          std::move(weights), policy_rng);
    }
    throw ConfigError("unknown policy '" + config.name + "'");
}

std::vector<double> history_rates(const SelectionHistory& history) {
    std::vector<double> rates(static_cast<std::size_t>(history.num_clients()), 0.0);
    if (history.rounds() == 0) {
        return rates;
    }
    for (int k = 0; k < history.num_clients(); ++k) {
        rates[static_cast<std::size_t>(k)] =
            static_cast<double>(history.count(k)) / history.rounds();
    }
    return rates;
}

double median(std::vector<double> values) {
    if (values.empty()) {
        return 0.0;
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string run_stem(const std::string& label, std::uint64_t seed) {
    return label + "_" + std::to_string(seed);
}

void write_metrics_csv(const std::filesystem::path& path, const RunResult& run,
                       int snapshot_cadence) {
    const MetricTable table = collect_metrics(run.records, run.rate_track, snapshot_cadence);
    CsvBuilder csv({"t", "policy", "seed", "cumulative_regret", "instantaneous_gap",
                    "realized_reward", "iteration_latency", "cumulative_clock", "chosen_set"});
    for (const auto& row : table.rows) {
        csv.begin_row();
        csv.add(row.round);
        csv.add(run.policy_label);
        csv.add(format_int(static_cast<long long>(run.seed)));
        csv.add(row.cumulative_regret);
        csv.add(row.instantaneous_gap);
        csv.add(row.realized_reward);
        csv.add(row.iteration_latency);
        csv.add(row.cumulative_clock);
        csv.add(row.chosen.to_string());
    }
    atomic_write(path, csv.str());
}

void write_rates_csv(const std::filesystem::path& path, const RunResult& run,
                     int snapshot_cadence) {
    const MetricTable table = collect_metrics(run.records, run.rate_track, snapshot_cadence);
    CsvBuilder csv({"t", "client", "rate"});
    for (const auto& snapshot : table.snapshots) {
        for (std::size_t k = 0; k < snapshot.rate.size(); ++k) {
            csv.begin_row();
            csv.add(snapshot.round);
            csv.add(static_cast<long long>(k));
            csv.add(snapshot.rate[k]);
        }
    }
    atomic_write(path, csv.str());
}

void write_fedtoy_csv(const std::filesystem::path& path, const RunResult& run) {
    CsvBuilder csv({"clock_seconds", "round", "test_loss", "policy_name", "seed"});
    for (const auto& point : run.loss_trace) {
        csv.begin_row();
        csv.add(point.clock);
        csv.add(point.round);
        csv.add(point.test_loss);
        csv.add(run.policy_label);
        csv.add(format_int(static_cast<long long>(run.seed)));
    }
    atomic_write(path, csv.str());
}

// Median across runs of a per-round series, truncated to the shortest run.
ChartSeries median_series(const std::string& name, const std::vector<const RunResult*>& runs,
                          bool regret_axis) {
    ChartSeries series{name, {}};
    if (runs.empty()) {
        return series;
    }
    std::size_t rounds = std::numeric_limits<std::size_t>::max();
    for (const RunResult* run : runs) {
        rounds = std::min(rounds, run->regret.cumulative.size());
    }
    if (rounds == std::numeric_limits<std::size_t>::max() || rounds == 0) {
        return series;
    }
    const std::size_t stride = std::max<std::size_t>(1, rounds / 800);
    for (std::size_t t = stride - 1; t < rounds; t += stride) {
        std::vector<double> values;
        values.reserve(runs.size());
        for (const RunResult* run : runs) {
            values.push_back(regret_axis ? run->regret.cumulative[t]
                                         : run->records[t].realized_reward);
        }
        series.points.emplace_back(static_cast<double>(t + 1), median(values));
    }
    return series;
}

ChartSeries median_loss_series(const std::string& name,
                               const std::vector<const RunResult*>& runs) {
    ChartSeries series{name, {}};
    double max_clock = 0.0;
    for (const RunResult* run : runs) {
        if (!run->loss_trace.empty()) {
            max_clock = std::max(max_clock, run->loss_trace.back().clock);
        }
    }
    if (max_clock <= 0.0) {
        return series;
    }
    const int grid = 240;
    for (int i = 1; i <= grid; ++i) {
        const double clock = max_clock * i / grid;
        std::vector<double> values;
        for (const RunResult* run : runs) {
            double loss = std::numeric_limits<double>::quiet_NaN();
            for (const auto& point : run->loss_trace) {
                if (point.clock <= clock) {
                    loss = point.test_loss;
                } else {
                    break;
                }
            }
            if (std::isfinite(loss)) {
                values.push_back(loss);
            }
        }
        if (!values.empty()) {
            series.points.emplace_back(clock, median(values));
        }
    }
    return series;
}

}  // namespace

SeedContext build_seed_context(const ExperimentConfig& config, std::uint64_t seed) {
    SeedContext context;
    context.seed = seed;
    context.scenario = build_scenario(config.scenario, seed);
    if (config.evaluation.fedtoy) {
        auto data_rng = make_stream(seed, StreamPurpose::kDataset);
        context.dataset = make_toy_dataset(config.data, config.scenario.params.num_clients,
                                           config.partition, data_rng);
        // The profiles must describe the data the clients actually hold.
        for (std::size_t k = 0; k < context.scenario.profiles.size(); ++k) {
            context.scenario.profiles[k].data_size = context.dataset->shards[k].size;
            context.scenario.profiles[k].data_quality = context.dataset->shards[k].quality;
        }
    }
    const SystemParams& params = context.scenario.params;
    context.spec = config.partition == PartitionMode::kIid
                       ? GeneralizationSpec::iid_balanced(params.num_clients, params.num_channels,
                                                          params.beta)
                       : GeneralizationSpec::non_iid_weighted(context.scenario.profiles,
                                                              params.num_channels, params.beta);
    return context;
}

RunResult execute_run(const ExperimentConfig& config, const SeedContext& context,
                      const PolicyConfig& policy_config) {
    const auto start_time = std::chrono::steady_clock::now();

    const SystemParams& params = context.scenario.params;
    const std::uint64_t label_hash = fnv1a(policy_config.label);
    auto env_rng = make_stream(context.seed, StreamPurpose::kEnvironment, label_hash);
    auto avail_rng = make_stream(context.seed, StreamPurpose::kAvailability, label_hash);
    std::unique_ptr<Policy> policy = build_policy(policy_config, context);

    const std::vector<double> mu = context.scenario.mean_speeds();
    const bool fedtoy_on = config.evaluation.fedtoy && context.dataset.has_value();
    const bool regret_on = config.evaluation.regret;
    const int cadence = config.evaluation.snapshot_cadence;

    RunResult result;
    result.policy_label = policy_config.label;
    result.seed = context.seed;
    result.fedtoy_ran = fedtoy_on;

    GlobalModel model;
    if (fedtoy_on) {
        model.weights.assign(static_cast<std::size_t>(context.dataset->dim), 0.0);
    }

    double clock = 0.0;
    for (int round = 1;; ++round) {
        if (config.horizon.rounds.has_value() && round > *config.horizon.rounds) {
            break;
        }
        const std::vector<int> present = availability(context.scenario.availability,
                                                      params.num_clients, params.num_channels,
                                                      avail_rng);
        const SelectionSet chosen = policy->select(present, round);
        const std::vector<double> latencies =
            sample_round(context.scenario.profiles, chosen, params, env_rng);
        const double tau = iteration_latency(latencies, params);
        if (config.horizon.seconds.has_value() && clock + tau > *config.horizon.seconds) {
            break;
        }

        RoundRecord record;
        record.round = round;
        record.chosen = chosen;
        record.latencies = latencies;
        record.iteration_latency = tau;
        if (regret_on) {
            const GenieResult genie =
                genie_select(mu, policy->history(), context.spec, present, params);
            record.genie_expected_reward = genie.expected_reward;
            record.policy_expected_reward =
                expected_set_reward(chosen, mu, policy->history(), context.spec, params);
            result.regret.append(instantaneous_gap(genie.set, chosen, mu, policy->history(),
                                                   context.spec, params,
                                                   &result.regret.negative_gap_warnings));
        }
        record.realized_reward =
            realized_reward(latencies, chosen, policy->history(), context.spec, params);

        if (fedtoy_on) {
            std::vector<std::vector<double>> locals;
            std::vector<std::int64_t> sizes;
            locals.reserve(chosen.members().size());
            sizes.reserve(chosen.members().size());
            for (int k : chosen.members()) {
                const ClientShard& shard = context.dataset->shards[static_cast<std::size_t>(k)];
                locals.push_back(local_train(model.weights, shard, context.dataset->dim,
                                             config.data.local_steps,
                                             config.data.learning_rate));
                sizes.push_back(shard.size);
            }
            model = aggregate(locals, sizes, round);
        }

        policy->observe(chosen, latencies, round);
        clock += tau;
        record.cumulative_clock = clock;
        result.records.push_back(std::move(record));

        if (fedtoy_on) {
            const double loss =
                mean_squared_error(model.weights, context.dataset->test_features,
                                   context.dataset->test_targets, context.dataset->dim);
            result.loss_trace.push_back({clock, round, loss});
            result.final_test_mse = loss;
        }
        if (cadence > 0 && round % cadence == 0) {
            result.rate_track.push_back({round, history_rates(policy->history())});
        }
    }

    result.final_rates = history_rates(policy->history());
    result.rounds_completed = static_cast<int>(result.records.size());
    result.final_clock = clock;
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
    return result;
}

std::filesystem::path metrics_csv_path(const std::filesystem::path& dir,
                                       const std::string& label, std::uint64_t seed) {
    return dir / ("metrics_" + run_stem(label, seed) + ".csv");
}

std::filesystem::path fedtoy_csv_path(const std::filesystem::path& dir, const std::string& label,
                                      std::uint64_t seed) {
    return dir / ("fedtoy_" + run_stem(label, seed) + ".csv");
}

std::vector<RunResult> run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    config.validate();
    const std::filesystem::path out_dir =
        options.output_dir_override.empty() ? config.output_dir : options.output_dir_override;
    std::filesystem::create_directories(out_dir);

    // Phase 1: one world per seed, shared by all policies.
    std::vector<SeedContext> contexts(config.seeds.size());
    {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < config.seeds.size();
                 i = next.fetch_add(1)) {
                try {
                    contexts[i] = build_seed_context(config, config.seeds[i]);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        };
        const int threads = std::max(1, options.parallelism);
        std::vector<std::thread> pool;
        for (int i = 1; i < threads; ++i) {
            pool.emplace_back(worker);
        }
        worker();
        for (auto& t : pool) {
            t.join();
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    // Phase 2: the (policy, seed) grid.
    struct Job {
        std::size_t policy_index;
        std::size_t seed_index;
    };
    std::vector<Job> jobs;
    for (std::size_t p = 0; p < config.policies.size(); ++p) {
        for (std::size_t s = 0; s < config.seeds.size(); ++s) {
            jobs.push_back({p, s});
        }
    }
    std::vector<RunResult> results(jobs.size());
    {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
                try {
                    const Job& job = jobs[i];
                    RunResult run = execute_run(config, contexts[job.seed_index],
                                                config.policies[job.policy_index]);
                    write_metrics_csv(
                        metrics_csv_path(out_dir, run.policy_label, run.seed), run,
                        config.evaluation.snapshot_cadence);
                    if (config.evaluation.snapshot_cadence > 0) {
                        write_rates_csv(out_dir / ("rates_" +
                                                   run_stem(run.policy_label, run.seed) + ".csv"),
                                        run, config.evaluation.snapshot_cadence);
                    }
                    if (run.fedtoy_ran) {
                        write_fedtoy_csv(fedtoy_csv_path(out_dir, run.policy_label, run.seed),
                                         run);
                    }
                    results[i] = std::move(run);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        };
        const int threads = std::max(1, options.parallelism);
        std::vector<std::thread> pool;
        for (int i = 1; i < threads; ++i) {
            pool.emplace_back(worker);
        }
        worker();
        for (auto& t : pool) {
            t.join();
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    // Phase 3: summary and plots, in deterministic (policy, seed) order.
    ordered_json summary;
    summary["output_dir"] = out_dir.string();
    summary["runs"] = ordered_json::array();
    for (const auto& run : results) {
        ordered_json entry;
        entry["policy"] = run.policy_label;
        entry["seed"] = run.seed;
        entry["rounds_completed"] = run.rounds_completed;
        entry["final_clock_seconds"] = run.final_clock;
        entry["final_cumulative_regret"] = run.regret.final_regret();
        entry["negative_gap_warnings"] = run.regret.negative_gap_warnings;
        if (run.fedtoy_ran) {
            entry["final_test_mse"] = run.final_test_mse;
        }
        entry["wall_seconds"] = run.wall_seconds;
        summary["runs"].push_back(std::move(entry));
    }
    summary["policies"] = ordered_json::object();
    for (const auto& policy : config.policies) {
        std::vector<double> regrets;
        std::vector<double> losses;
        for (const auto& run : results) {
            if (run.policy_label != policy.label) {
                continue;
            }
            regrets.push_back(run.regret.final_regret());
            if (run.fedtoy_ran) {
                losses.push_back(run.final_test_mse);
            }
        }
        ordered_json entry;
        entry["median_final_regret"] = median(regrets);
        if (!losses.empty()) {
            entry["median_final_test_mse"] = median(losses);
        }
        summary["policies"][policy.label] = std::move(entry);
    }
    if (config.evaluation.regret && !results.empty()) {
        // Bound report with the configured (nominal) reward grid.
        const double delta_min = config.evaluation.nominal_delta_min.value_or(
            config.scenario.params.delta_min);
        ordered_json bound;
        bound["delta_min"] = delta_min;
        bound["label"] = "nominal";
        ordered_json per_seed = ordered_json::array();
        for (std::size_t s = 0; s < config.seeds.size(); ++s) {
            const std::vector<double> mu = contexts[s].scenario.mean_speeds();
            SystemParams bound_params = contexts[s].scenario.params;
            bound_params.delta_min = delta_min;
            const double delta_max = delta_max_estimate(mu, bound_params.alpha);
            const int horizon = results[s].rounds_completed;
            ordered_json row;
            row["seed"] = config.seeds[s];
            row["delta_max"] = delta_max;
            row["bound_at_horizon"] =
                horizon >= 1 ? theorem1_bound(horizon, bound_params, delta_max) : 0.0;
            per_seed.push_back(std::move(row));
        }
        bound["per_seed"] = std::move(per_seed);
        summary["theorem_bound"] = std::move(bound);
    }
    atomic_write(out_dir / "summary.json", summary.dump(2) + "\n");

    if (options.plots) {
        if (config.evaluation.regret) {
            std::vector<ChartSeries> series;
            for (const auto& policy : config.policies) {
                std::vector<const RunResult*> runs;
                for (const auto& run : results) {
                    if (run.policy_label == policy.label) {
                        runs.push_back(&run);
                    }
                }
                series.push_back(median_series(policy.label, runs, true));
            }
            atomic_write(out_dir / "regret.svg",
                         line_chart_svg("Cumulative pseudo-regret (median across seeds)",
                                        "round", "cumulative regret", series));
        }
        if (config.evaluation.fedtoy) {
            std::vector<ChartSeries> series;
            for (const auto& policy : config.policies) {
                std::vector<const RunResult*> runs;
                for (const auto& run : results) {
                    if (run.policy_label == policy.label) {
                        runs.push_back(&run);
                    }
                }
                series.push_back(median_loss_series(policy.label, runs));
            }
            atomic_write(out_dir / "loss.svg",
                         line_chart_svg("Test loss vs simulated time (median across seeds)",
                                        "simulated seconds", "test MSE", series));
        }
    }
    return results;
}

RaceOutcome run_optimizer_race(const RaceConfig& race) {
    RaceOutcome outcome;
    outcome.instances = race.instances;
    outcome.budget = race.budget;
    outcome.mean_sa_current.assign(static_cast<std::size_t>(race.budget), 0.0);
    outcome.mean_sa_best.assign(static_cast<std::size_t>(race.budget), 0.0);
    outcome.mean_alsa_current.assign(static_cast<std::size_t>(race.budget), 0.0);
    outcome.mean_alsa_best.assign(static_cast<std::size_t>(race.budget), 0.0);

    for (int instance = 0; instance < race.instances; ++instance) {
        const auto idx = static_cast<std::uint64_t>(instance);
        ScoreTable table;
        table.num_clients = race.num_clients;
        table.subset_size = race.num_channels;
        table.alpha = race.alpha;
        auto table_rng = make_stream(race.seed, StreamPurpose::kRace, idx, 0);
        table.score.reserve(static_cast<std::size_t>(race.num_clients));
        table.g.reserve(static_cast<std::size_t>(race.num_clients));
        for (int k = 0; k < race.num_clients; ++k) {
            table.score.emplace_back(uniform_unit(table_rng));
            table.g.push_back(uniform_range(table_rng, -race.g_scale, race.g_scale));
            table.available.push_back(k);
        }

        auto init_rng = make_stream(race.seed, StreamPurpose::kRace, idx, 1);
        const SelectionSet initial =
            uniform_subset(table.available, race.num_channels, init_rng);

        AnnealerConfig config;
        config.steps = race.budget;
        config.temperature_scale = race.temperature_scale;

        config.neighborhood = Neighborhood::kClassic;
        auto sa_rng = make_stream(race.seed, StreamPurpose::kRace, idx, 2);
        const AnnealResult sa = anneal_from(table, config, initial, sa_rng);

        config.neighborhood = Neighborhood::kLightweight;
        auto alsa_rng = make_stream(race.seed, StreamPurpose::kRace, idx, 3);
        const AnnealResult alsa = anneal_from(table, config, initial, alsa_rng);

        outcome.sa_final.push_back(sa.best_energy.value());
        outcome.alsa_final.push_back(alsa.best_energy.value());
        if (alsa.best_energy >= sa.best_energy) {
            ++outcome.alsa_wins_or_ties;
        }
        for (std::size_t i = 0; i < static_cast<std::size_t>(race.budget); ++i) {
            outcome.mean_sa_current[i] += sa.trace[i].current.value() / race.instances;
            outcome.mean_sa_best[i] += sa.trace[i].best.value() / race.instances;
            outcome.mean_alsa_current[i] += alsa.trace[i].current.value() / race.instances;
            outcome.mean_alsa_best[i] += alsa.trace[i].best.value() / race.instances;
        }
    }
    return outcome;
}

RaceOutcome compare_optimizers(const ExperimentConfig& config, const RunOptions& options) {
    if (!config.race.has_value()) {
        throw ConfigError("race: this command needs a 'race' section in the config");
    }
    const RaceConfig& race = *config.race;
    const std::filesystem::path out_dir =
        options.output_dir_override.empty() ? config.output_dir : options.output_dir_override;
    std::filesystem::create_directories(out_dir);

    const RaceOutcome outcome = run_optimizer_race(race);

    {
        CsvBuilder csv({"instance", "sa_best_energy", "alsa_best_energy", "winner"});
        for (int i = 0; i < outcome.instances; ++i) {
            const double sa = outcome.sa_final[static_cast<std::size_t>(i)];
            const double alsa = outcome.alsa_final[static_cast<std::size_t>(i)];
            csv.begin_row();
            csv.add(i);
            csv.add(sa);
            csv.add(alsa);
            csv.add(alsa > sa ? "alsa" : (alsa < sa ? "sa" : "tie"));
        }
        atomic_write(out_dir / "race_results.csv", csv.str());
    }
    {
        CsvBuilder csv({"step", "sa_mean_current", "sa_mean_best", "alsa_mean_current",
                        "alsa_mean_best"});
        for (std::size_t i = 0; i < outcome.mean_sa_best.size(); ++i) {
            csv.begin_row();
            csv.add(static_cast<long long>(i + 1));
            csv.add(outcome.mean_sa_current[i]);
            csv.add(outcome.mean_sa_best[i]);
            csv.add(outcome.mean_alsa_current[i]);
            csv.add(outcome.mean_alsa_best[i]);
        }
        atomic_write(out_dir / "race_traces.csv", csv.str());
    }
    {
        ordered_json summary;
        summary["num_clients"] = race.num_clients;
        summary["num_channels"] = race.num_channels;
        summary["instances"] = outcome.instances;
        summary["budget"] = outcome.budget;
        summary["alsa_wins_or_ties"] = outcome.alsa_wins_or_ties;
        summary["alsa_win_or_tie_rate"] = outcome.win_or_tie_rate();
        atomic_write(out_dir / "race_summary.json", summary.dump(2) + "\n");
    }
    if (options.plots) {
        std::vector<ChartSeries> series(2);
        series[0].name = "sa";
        series[1].name = "alsa";
        const std::size_t stride =
            std::max<std::size_t>(1, outcome.mean_sa_best.size() / 800);
        for (std::size_t i = 0; i < outcome.mean_sa_best.size(); i += stride) {
            series[0].points.emplace_back(static_cast<double>(i + 1), outcome.mean_sa_best[i]);
            series[1].points.emplace_back(static_cast<double>(i + 1),
                                          outcome.mean_alsa_best[i]);
        }
        atomic_write(out_dir / "race.svg",
                     line_chart_svg("Annealer energy race (mean best-so-far)", "step", "energy",
                                    series));
    }
    return outcome;
}

void write_anneal_trace_csv(const std::filesystem::path& path,
                            const std::vector<AnnealStep>& trace) {
    CsvBuilder csv({"step", "current_energy", "best_energy", "temperature"});
    for (const auto& step : trace) {
        if (!step.current.is_finite() || !step.best.is_finite()) {
            throw std::invalid_argument(
                "trace export requires finite energies (fully observed table)");
        }
        csv.begin_row();
        csv.add(static_cast<long long>(step.step));
        csv.add(step.current.value());
        csv.add(step.best.value());
        csv.add(step.temperature);
    }
    atomic_write(path, csv.str());
}

}  // namespace fedsched
