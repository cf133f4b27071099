#include "fedsched/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace fedsched {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ConfigError(path + ": " + message);
}

void require_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
        fail(path, "expected an object");
    }
    for (const auto& item : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
                return item.key() == k;
            }) == allowed.end()) {
            fail(path + "." + item.key(), "unknown key");
        }
    }
}

template <typename T>
T get_field(const json& obj, const std::string& path, const char* key, T fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        fail(path + "." + key, "wrong type");
    }
}

template <typename T>
T get_required(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) {
        fail(path + "." + key, "missing required key");
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        fail(path + "." + key, "wrong type");
    }
}

std::pair<double, double> get_range(const json& obj, const std::string& path, const char* key,
                                    std::pair<double, double> fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const json& arr = obj.at(key);
    if (!arr.is_array() || arr.size() != 2 || !arr[0].is_number() || !arr[1].is_number()) {
        fail(path + "." + key, "expected [lo, hi]");
    }
    return {arr[0].get<double>(), arr[1].get<double>()};
}

LatencyFamily parse_family(const std::string& name, const std::string& path) {
    if (name == "fixed") {
        return LatencyFamily::kFixed;
    }
    if (name == "lognormal") {
        return LatencyFamily::kLogNormal;
    }
    if (name == "exponential") {
        return LatencyFamily::kExponential;
    }
    fail(path, "unknown latency family '" + name + "'");
}

ScenarioConfig parse_scenario(const json& obj, const std::string& path) {
    require_keys(obj, path,
                 {"num_clients", "num_channels", "alpha", "beta", "tau_min", "tau_max",
                  "delta_min", "latency", "availability", "data_size_range", "quality_range",
                  "mu_estimate_samples"});
    ScenarioConfig scenario;
    scenario.params.num_clients = get_required<int>(obj, path, "num_clients");
    scenario.params.num_channels = get_required<int>(obj, path, "num_channels");
    scenario.params.alpha = get_field<double>(obj, path, "alpha", 1.0);
    scenario.params.beta = get_field<int>(obj, path, "beta", 1);
    scenario.params.tau_min = get_field<double>(obj, path, "tau_min", 1.0);
    scenario.params.tau_max = get_field<double>(obj, path, "tau_max", 10.0);
    scenario.params.delta_min = get_field<double>(obj, path, "delta_min", 0.1);
    if (obj.contains("beta") && obj.at("beta").is_number_float()) {
        fail(path + ".beta", "beta must be a natural number");
    }

    if (obj.contains("latency")) {
        const json& law = obj.at("latency");
        const std::string law_path = path + ".latency";
        require_keys(law, law_path, {"family", "a_range", "b_range"});
        scenario.law_ranges.family =
            parse_family(get_required<std::string>(law, law_path, "family"), law_path);
        const auto a = get_range(law, law_path, "a_range",
                                 {scenario.law_ranges.a_lo, scenario.law_ranges.a_hi});
        scenario.law_ranges.a_lo = a.first;
        scenario.law_ranges.a_hi = a.second;
        const auto b = get_range(law, law_path, "b_range",
                                 {scenario.law_ranges.b_lo, scenario.law_ranges.b_hi});
        scenario.law_ranges.b_lo = b.first;
        scenario.law_ranges.b_hi = b.second;
    }

    if (obj.contains("availability")) {
        const json& avail = obj.at("availability");
        const std::string avail_path = path + ".availability";
        require_keys(avail, avail_path, {"mode", "presence_prob"});
        const std::string mode = get_required<std::string>(avail, avail_path, "mode");
        if (mode == "all") {
            scenario.availability.mode = AvailabilityConfig::Mode::kAll;
        } else if (mode == "bernoulli") {
            scenario.availability.mode = AvailabilityConfig::Mode::kBernoulli;
        } else {
            fail(avail_path + ".mode", "expected 'all' or 'bernoulli'");
        }
        scenario.availability.presence_prob =
            get_field<double>(avail, avail_path, "presence_prob", 1.0);
    }

    const auto sizes = get_range(obj, path, "data_size_range", {1.0, 1.0});
    scenario.data_size_lo = static_cast<std::int64_t>(sizes.first);
    scenario.data_size_hi = static_cast<std::int64_t>(sizes.second);
    const auto quality = get_range(obj, path, "quality_range", {1.0, 1.0});
    scenario.quality_lo = quality.first;
    scenario.quality_hi = quality.second;
    scenario.mu_estimate_samples = get_field<int>(obj, path, "mu_estimate_samples", 1'000'000);
    return scenario;
}

ToyDataConfig parse_data(const json& obj, const std::string& path) {
    require_keys(obj, path,
                 {"dim", "train_samples", "test_samples", "feature_sd", "weight_scale",
                  "noise_sd", "noise_sd_range", "size_spread", "local_steps", "learning_rate"});
    ToyDataConfig data;
    data.dim = get_field<int>(obj, path, "dim", data.dim);
    data.train_samples = get_field<int>(obj, path, "train_samples", data.train_samples);
    data.test_samples = get_field<int>(obj, path, "test_samples", data.test_samples);
    data.feature_sd = get_field<double>(obj, path, "feature_sd", data.feature_sd);
    data.weight_scale = get_field<double>(obj, path, "weight_scale", data.weight_scale);
    data.noise_sd = get_field<double>(obj, path, "noise_sd", data.noise_sd);
    const auto noise = get_range(obj, path, "noise_sd_range", {data.noise_sd_lo, data.noise_sd_hi});
    data.noise_sd_lo = noise.first;
    data.noise_sd_hi = noise.second;
    data.size_spread = get_field<double>(obj, path, "size_spread", data.size_spread);
    data.local_steps = get_field<int>(obj, path, "local_steps", data.local_steps);
    data.learning_rate = get_field<double>(obj, path, "learning_rate", data.learning_rate);
    return data;
}

PolicyConfig parse_policy(const json& obj, const std::string& path) {
    require_keys(obj, path,
                 {"name", "label", "alpha", "beta", "solver", "anneal_steps",
                  "temperature_scale"});
    PolicyConfig policy;
    policy.name = get_required<std::string>(obj, path, "name");
    policy.label = get_field<std::string>(obj, path, "label", policy.name);
    if (obj.contains("alpha")) {
        policy.alpha = get_required<double>(obj, path, "alpha");
    }
    if (obj.contains("beta")) {
        policy.beta = get_required<int>(obj, path, "beta");
    }
    const std::string solver = get_field<std::string>(obj, path, "solver", "exhaustive");
    if (solver == "exhaustive") {
        policy.solver = SolverChoice::Kind::kExhaustive;
    } else if (solver == "sa") {
        policy.solver = SolverChoice::Kind::kSa;
    } else if (solver == "alsa") {
        policy.solver = SolverChoice::Kind::kAlsa;
    } else {
        fail(path + ".solver", "expected 'exhaustive', 'sa' or 'alsa'");
    }
    policy.anneal_steps = get_field<std::int64_t>(obj, path, "anneal_steps", policy.anneal_steps);
    policy.temperature_scale =
        get_field<double>(obj, path, "temperature_scale", policy.temperature_scale);
    return policy;
}

RaceConfig parse_race(const json& obj, const std::string& path) {
    require_keys(obj, path,
                 {"num_clients", "num_channels", "instances", "budget", "alpha", "g_scale",
                  "temperature_scale", "seed"});
    RaceConfig race;
    race.num_clients = get_field<int>(obj, path, "num_clients", race.num_clients);
    race.num_channels = get_field<int>(obj, path, "num_channels", race.num_channels);
    race.instances = get_field<int>(obj, path, "instances", race.instances);
    race.budget = get_field<std::int64_t>(obj, path, "budget", race.budget);
    race.alpha = get_field<double>(obj, path, "alpha", race.alpha);
    race.g_scale = get_field<double>(obj, path, "g_scale", race.g_scale);
    race.temperature_scale = get_field<double>(obj, path, "temperature_scale", 0.0);
    race.seed = get_field<std::uint64_t>(obj, path, "seed", race.seed);
    return race;
}

}  // namespace

void ExperimentConfig::validate() const {
    scenario.params.validate();
    if (policies.empty()) {
        throw ConfigError("policies: at least one policy required");
    }
    std::set<std::string> labels;
    for (const auto& policy : policies) {
        static const std::set<std::string> known = {"bsfl", "latency_ucb", "random_uniform",
                                                    "random_proportional"};
        if (!known.contains(policy.name)) {
            throw ConfigError("policies.name: unknown policy '" + policy.name + "'");
        }
        if (!labels.insert(policy.label).second) {
            throw ConfigError("policies.label: duplicate label '" + policy.label + "'");
        }
        if (policy.label.empty() ||
            policy.label.find_first_not_of(
                "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-") !=
                std::string::npos) {
            throw ConfigError("policies.label: labels are limited to [A-Za-z0-9_-]");
        }
        if (policy.anneal_steps < 1) {
            throw ConfigError("policies.anneal_steps: must be >= 1");
        }
        if (policy.alpha.has_value() && !(*policy.alpha >= 0.0)) {
            throw ConfigError("policies.alpha: must be >= 0");
        }
        if (policy.beta.has_value() && *policy.beta < 1) {
            throw ConfigError("policies.beta: must be a natural number >= 1");
        }
    }
    if (seeds.empty()) {
        throw ConfigError("seeds: at least one seed required");
    }
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
        throw ConfigError("seeds: seeds must be distinct");
    }
    const bool has_rounds = horizon.rounds.has_value();
    const bool has_seconds = horizon.seconds.has_value();
    if (has_rounds == has_seconds) {
        throw ConfigError("horizon: exactly one of 'rounds' or 'seconds' required");
    }
    if (has_rounds && *horizon.rounds < 1) {
        throw ConfigError("horizon.rounds: must be >= 1");
    }
    if (has_seconds && !(*horizon.seconds > 0.0)) {
        throw ConfigError("horizon.seconds: must be > 0");
    }
    if (evaluation.fedtoy && !has_seconds) {
        throw ConfigError("evaluation.fedtoy: requires a simulated-seconds horizon");
    }
    if (evaluation.snapshot_cadence < 0) {
        throw ConfigError("evaluation.snapshot_cadence: must be >= 0");
    }
    if (evaluation.regret) {
        const std::int64_t candidates =
            binomial_capped(scenario.params.num_clients, scenario.params.num_channels,
                            kDefaultEnumerationCap);
        if (candidates > kDefaultEnumerationCap) {
            throw ConfigError(
                "evaluation.regret: the oracle needs (K choose m) within the enumeration cap; "
                "disable regret for this scenario size");
        }
    }
    if (evaluation.fedtoy && data.train_samples < scenario.params.num_clients) {
        throw ConfigError("data.train_samples: fewer samples than clients");
    }
    if (race.has_value()) {
        if (race->num_clients < 1 || race->num_channels < 1 ||
            race->num_channels > race->num_clients) {
            throw ConfigError("race: need 1 <= num_channels <= num_clients");
        }
        if (race->instances < 1 || race->budget < 1) {
            throw ConfigError("race: instances and budget must be >= 1");
        }
        if (!(race->alpha >= 0.0)) {
            throw ConfigError("race.alpha: must be >= 0");
        }
        if (!(race->g_scale > 0.0) || race->g_scale > 1.0) {
            throw ConfigError("race.g_scale: must be in (0, 1]");
        }
    }
    if (output_dir.empty()) {
        throw ConfigError("output_dir: must not be empty");
    }
}

ExperimentConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        const std::size_t limit = std::min(text.size(), static_cast<std::size_t>(e.byte));
        for (std::size_t i = 0; i < limit; ++i) {
            if (text[i] == '\n') {
                ++line;
            }
        }
        std::ostringstream message;
        message << "line " << line << ": " << e.what();
        throw ConfigError(message.str());
    }

    require_keys(doc, "config",
                 {"scenario", "partition", "data", "policies", "horizon", "seeds", "evaluation",
                  "output_dir", "race"});

    ExperimentConfig config;
    if (!doc.contains("scenario")) {
        fail("config.scenario", "missing required key");
    }
    config.scenario = parse_scenario(doc.at("scenario"), "scenario");

    const std::string partition = get_field<std::string>(doc, "config", "partition", "iid");
    if (partition == "iid") {
        config.partition = PartitionMode::kIid;
    } else if (partition == "non_iid") {
        config.partition = PartitionMode::kNonIid;
    } else {
        fail("config.partition", "expected 'iid' or 'non_iid'");
    }

    if (doc.contains("data")) {
        config.data = parse_data(doc.at("data"), "data");
    }

    if (!doc.contains("policies") || !doc.at("policies").is_array()) {
        fail("config.policies", "expected an array of policies");
    }
    int index = 0;
    for (const auto& entry : doc.at("policies")) {
        config.policies.push_back(
            parse_policy(entry, "policies[" + std::to_string(index) + "]"));
        ++index;
    }

    if (!doc.contains("horizon")) {
        fail("config.horizon", "missing required key");
    }
    const json& horizon = doc.at("horizon");
    require_keys(horizon, "horizon", {"rounds", "seconds"});
    if (horizon.contains("rounds")) {
        config.horizon.rounds = get_required<int>(horizon, "horizon", "rounds");
    }
    if (horizon.contains("seconds")) {
        config.horizon.seconds = get_required<double>(horizon, "horizon", "seconds");
    }

    if (!doc.contains("seeds") || !doc.at("seeds").is_array()) {
        fail("config.seeds", "expected an array of seeds");
    }
    for (const auto& seed : doc.at("seeds")) {
        if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
            fail("config.seeds", "seeds must be non-negative integers");
        }
        config.seeds.push_back(seed.get<std::uint64_t>());
    }

    if (doc.contains("evaluation")) {
        const json& evaluation = doc.at("evaluation");
        require_keys(evaluation, "evaluation",
                     {"regret", "fedtoy", "snapshot_cadence", "nominal_delta_min"});
        config.evaluation.regret = get_field<bool>(evaluation, "evaluation", "regret", true);
        config.evaluation.fedtoy = get_field<bool>(evaluation, "evaluation", "fedtoy", false);
        config.evaluation.snapshot_cadence =
            get_field<int>(evaluation, "evaluation", "snapshot_cadence", 0);
        if (evaluation.contains("nominal_delta_min")) {
            config.evaluation.nominal_delta_min =
                get_required<double>(evaluation, "evaluation", "nominal_delta_min");
        }
    }

    config.output_dir = get_field<std::string>(doc, "config", "output_dir", "out");

    if (doc.contains("race")) {
        config.race = parse_race(doc.at("race"), "race");
    }

    config.validate();
    return config;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

}  // namespace fedsched
