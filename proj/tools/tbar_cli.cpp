#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tbar/error.hpp"
#include "tbar/experiment.hpp"
#include "tbar/io.hpp"

namespace {

struct Options {
    std::string config;
    std::string out = "out";
    int threads = 1;
    std::uint64_t seed = 0;
    bool has_seed = false;
};

int run(const std::string& command, const Options& o) {
    tbar::ExperimentConfig cfg = tbar::parse_experiment_config(tbar::Config::load(o.config));
    const tbar::ExperimentKind wanted = tbar::parse_experiment_kind(command);
    if (cfg.kind != wanted)
        throw tbar::Error(tbar::ErrorCode::Config, std::string("experiment.kind is ") + tbar::experiment_kind_name(cfg.kind) +
                                                       " but the subcommand is " + command);
    if (o.has_seed) {
        cfg.seed = o.seed;
        cfg.canonical += "[cli]\nseed = " + std::to_string(o.seed) + "\n";
        cfg.hash = tbar::hex64(tbar::fnv1a64(cfg.canonical));
    }
    const tbar::ExperimentOutcome res = tbar::run_experiment(cfg, o.out, o.threads);
    for (const auto& v : res.verdicts)
        std::cout << (v.passed ? "PASS " : "FAIL ") << v.name << ": " << v.inequality << " (lhs " << tbar::format_double(v.lhs)
                  << ", rhs " << tbar::format_double(v.rhs) << ")\n";
    std::cout << "wrote " << res.files.size() << " files to " << o.out << '\n';
    return res.passed ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete topological-barrier experiments on flat tori"};
    app.require_subcommand(1);
    Options o;
    const char* commands[] = {"energy", "jacobian", "balls", "flatnorm", "width", "hanglin", "mountainpass", "main-inequality"};
    for (const char* name : commands) {
        CLI::App* sub = app.add_subcommand(name, std::string("run a ") + name + " experiment");
        sub->add_option("--config", o.config, "experiment configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", o.seed, "override the configured seed");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    try {
        for (CLI::App* sub : app.get_subcommands()) {
            o.has_seed = sub->count("--seed") > 0;
            return run(sub->get_name(), o);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
