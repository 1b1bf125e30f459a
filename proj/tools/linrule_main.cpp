#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "linrule/linrule.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit : int { ok = 0, verdict_failed = 1, config_error = 2, runtime_error = 3 };

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::string law;
    std::vector<std::string> rules;
};

template <class T>
std::optional<T> env_number(const char* name) {
    const char* raw = std::getenv(name);
    if (!raw || !*raw) return std::nullopt;
    const std::string_view text(raw);
    T value{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size())
        throw linrule::ConfigError(std::string(name) + " is not a nonnegative integer: " + raw);
    return value;
}

// config file < environment < flags
linrule::ExperimentConfig resolve(const Options& o) {
    linrule::ExperimentConfig c = o.config.empty() ? linrule::ExperimentConfig{} : linrule::load_config(o.config);
    if (auto s = env_number<std::uint64_t>("LINRULE_SEED")) c.seed = *s;
    if (auto w = env_number<std::size_t>("LINRULE_WORKERS")) c.workers = *w;
    if (o.seed) c.seed = *o.seed;
    if (o.workers) c.workers = *o.workers;
    if (!o.law.empty()) c.law = o.law;
    if (!o.rules.empty()) c.rules = o.rules;
    if (!o.out.empty()) c.output = o.out;
    c.validate();
    return c;
}

fs::path prepare_output(const linrule::ExperimentConfig& c) {
    const fs::path dir(c.output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw linrule::IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

linrule::CsvTable concat(linrule::CsvTable a, const linrule::CsvTable& b) {
    a.rows.insert(a.rows.end(), b.rows.begin(), b.rows.end());
    return a;
}

int report(const std::vector<linrule::VerificationVerdict>& verdicts) {
    std::size_t failed = 0;
    for (const auto& v : verdicts) {
        if (v.pass) continue;
        ++failed;
        std::cerr << "FAIL " << v.inequality << " at " << v.point << ": margin " << v.margin << " std errors\n";
    }
    std::cout << "verdicts: " << verdicts.size() - failed << " passed, " << failed << " failed\n";
    return failed ? verdict_failed : ok;
}

int run_verify(const fs::path& dir) {
    const auto bounds = linrule::read_csv(dir / "bounds.csv");
    auto risk = linrule::read_csv(dir / "risk.csv");
    if (fs::exists(dir / "rule_risk.csv")) risk = concat(std::move(risk), linrule::read_csv(dir / "rule_risk.csv"));
    const auto verdicts = linrule::verify(bounds, risk);
    linrule::write_csv(dir / "verdicts.csv", linrule::verdict_table(verdicts));
    return report(verdicts);
}

int dispatch(const std::string& command, const Options& o) {
    const auto config = resolve(o);
    const fs::path dir = prepare_output(config);
    if (command == "verify") return run_verify(dir);

    linrule::write_text(dir / "manifest.json", linrule::manifest_json(config));
    if (command == "bounds") {
        linrule::write_csv(dir / "bounds.csv", linrule::bounds_table(config));
    } else if (command == "mc-risk") {
        linrule::write_csv(dir / "risk.csv", linrule::optimal_risk_table(config));
    } else if (command == "rule-risk") {
        linrule::write_csv(dir / "rule_risk.csv", linrule::rule_risk_table(config));
    } else {
        const auto bounds = linrule::bounds_table(config);
        const auto risk = concat(linrule::optimal_risk_table(config), linrule::rule_risk_table(config));
        linrule::write_csv(dir / "bounds.csv", bounds);
        linrule::write_csv(dir / "risk.csv", risk);
        std::error_code ec;
        fs::remove(dir / "rule_risk.csv", ec);
        const auto verdicts = linrule::verify(bounds, risk);
        linrule::write_csv(dir / "verdicts.csv", linrule::verdict_table(verdicts));
        return report(verdicts);
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"linrule: closed-form bounds and Monte Carlo risks of linear prediction rules"};
    app.set_version_flag("--version", linrule::library_version());
    app.require_subcommand(1);

    Options options;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"bounds", "write bounds.csv for every grid point"},
        {"mc-risk", "write risk.csv with the optimal-risk estimators"},
        {"rule-risk", "write rule_risk.csv with per-rule excess risks"},
        {"verify", "check bounds.csv against risk.csv (and rule_risk.csv) and write verdicts.csv"},
        {"all", "bounds, risks and verdicts in one run"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", options.config, "experiment JSON")->check(CLI::ExistingFile);
        sub->add_option("-o,--out", options.out, "output directory (overrides the config)");
        sub->add_option("--seed", options.seed, "master seed (overrides LINRULE_SEED)");
        sub->add_option("--workers", options.workers, "worker threads, 0 = all cores (overrides LINRULE_WORKERS)");
        sub->add_option("--law", options.law, "covariate law: gaussian | latent | adversarial");
        sub->add_option("--rule", options.rules, "rule spec, repeatable, e.g. ridge:lambda=0.1 or gf:t=100");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        return dispatch(app.get_subcommands().front()->get_name(), options);
    } catch (const linrule::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const linrule::InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return runtime_error;
    }
}
