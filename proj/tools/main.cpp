// Command-line front end: one subcommand per registered experiment plus a
// quick `selftest`. Exit codes: 0 ok, 2 config error, 3 runtime cap,
// 4 statistical-power failure, 5 I/O error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "frontlab/absorbed.hpp"
#include "frontlab/config.hpp"
#include "frontlab/levy.hpp"
#include "frontlab/parallel.hpp"
#include "frontlab/rng.hpp"
#include "frontlab/runner.hpp"
#include "frontlab/selection.hpp"
#include "frontlab/theta.hpp"

namespace {

int run_selftest() {
    using namespace frontlab;
    int failures = 0;
    auto check = [&](bool ok, const char* what) {
        std::printf("%-52s %s\n", what, ok ? "ok" : "FAIL");
        if (!ok) ++failures;
    };

    double max_jump = 0.0;  // representation agreement across the crossover
    for (int i = 0; i <= 20; ++i) {
        const double x = 2.0 * i / 20.0;
        max_jump = std::max(max_jump, std::fabs(theta(x, 0.5 - 1e-9) - theta(x, 0.5 + 1e-9)));
    }
    check(max_jump < 1e-8, "theta continuous across representation crossover");
    check(std::fabs(theta(1.0, 1.0) - 0.49280812) < 1e-7, "theta(1,1) reference value");
    check(std::fabs(theta(0.0, 50.0) - 0.5) < 1e-12, "theta flattens to 1/2 for large t");
    check(std::fabs(theta_bar(0.0)) == 0.0, "theta_bar(0) = 0");
    check(error_term(2.0) < error_term(1.0), "error term decreasing");

    bool injective = true;
    {
        std::uint64_t a = derive_seed(42, 1), b = derive_seed(42, 2);
        injective = a != b && derive_seed(42, 1) == a;
    }
    check(injective, "replica seed derivation is stable and distinct");

    check(std::fabs(x_alpha(1.0)) == 0.0, "x_alpha(1) = 0");
    check(std::fabs(levy_tail(std::log(2.0)) - 1.0) < 1e-12, "levy tail at log 2");
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace frontlab;

    CLI::App app{"frontlab: branching-particle front laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 1;
    std::uint64_t replicas = 1;
    int workers = default_workers();
    std::string out_dir = "out";
    std::string format = "both";

    app.add_option("--config", config_path, "configuration file (INI sections per experiment)");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--replicas", replicas, "replica count");
    app.add_option("--workers", workers, "worker threads");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", format, "csv | json | both")
        ->check(CLI::IsMember({"csv", "json", "both"}));

    auto* selftest = app.add_subcommand("selftest", "fast internal consistency checks");
    for (const auto& [name, exp] : experiment_registry())
        app.add_subcommand(name, exp.description);

    CLI11_PARSE(app, argc, argv);

    if (selftest->parsed()) return run_selftest();

    const std::string chosen = app.get_subcommands().front()->get_name();
    try {
        Config config = config_path.empty() ? Config{} : Config::parse_file(config_path);
        RunContext ctx;
        ctx.seed = seed;
        ctx.replicas = replicas;
        ctx.workers = workers;
        ctx.out_dir = out_dir;
        ctx.format = format;
        const RunManifest manifest = run_experiment(chosen, config, ctx);
        std::printf("%s: wrote %zu file(s) to %s\n", chosen.c_str(), manifest.outputs.size(),
                    out_dir.c_str());
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const CappedRunError& e) {
        std::fprintf(stderr, "runtime cap: %s\n", e.what());
        return 3;
    } catch (const CapExceededError& e) {
        std::fprintf(stderr, "runtime cap: %s\n", e.what());
        return 3;
    } catch (const StatisticalPowerError& e) {
        std::fprintf(stderr, "statistical power: %s\n", e.what());
        return 4;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 5;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
