// qpt_probe.cpp: command-line front end

#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "qpt/config.hpp"
#include "qpt/errors.hpp"
#include "qpt/runner.hpp"

namespace {

using Runner = std::function<qpt::RunResult(const qpt::RunConfig&, const qpt::RunOptions&)>;

struct Invocation {
    std::string config;
    std::string out;
    unsigned threads{0};
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Circuit-QED probe of the transverse-field Ising chain"};
    app.set_version_flag("--version", std::string("qpt-probe ") + qpt::version);
    app.require_subcommand(1);

    const std::map<std::string, std::pair<std::string, Runner>> commands{
        {"dispersion", {"write (k, epsilon_k, theta_k) for each lambda", qpt::run_dispersion}},
        {"correlation", {"write S(t) for each lambda", qpt::run_correlation}},
        {"spectrum", {"write S(omega) and broadening metrics for each lambda", qpt::run_spectrum}},
        {"sweep", {"broadening metrics over the sweep list", qpt::run_sweep}},
        {"lines", {"enumerate the spectral lines (Omega, F) of a small chain", qpt::run_lines}},
        {"oracle-check", {"compare the free-fermion paths with exact diagonalization", qpt::run_oracle_check}},
        {"params", {"derive dimensionless chain parameters from circuit values", qpt::run_params}},
    };

    Invocation inv;
    std::map<CLI::App*, const Runner*> dispatch;
    for (const auto& [name, entry] : commands) {
        CLI::App* sub = app.add_subcommand(name, entry.first);
        sub->add_option("--config", inv.config, "JSON configuration file")->required();
        sub->add_option("--out", inv.out, "output directory (overrides the config)");
        sub->add_option("--threads", inv.threads, "worker threads, 0 = all cores")->capture_default_str();
        dispatch[sub] = &entry.second;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return qpt::exit_code::config;
    }

    try {
        const qpt::RunConfig cfg = qpt::load_config(inv.config);
        qpt::RunOptions opt;
        if (!inv.out.empty()) opt.out_dir = inv.out;
        opt.threads = inv.threads;
        for (const auto& [sub, runner] : dispatch) {
            if (!sub->parsed()) continue;
            const qpt::RunResult result = (*runner)(cfg, opt);
            for (const auto& f : result.files) std::cout << f << '\n';
            return result.exit_code;
        }
    } catch (const qpt::CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << '\n';
        return qpt::exit_code::capacity;
    } catch (const qpt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return qpt::exit_code::config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return qpt::exit_code::config;
}
