#include <iostream>

#include <CLI11.hpp>

#include "czw/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"czwave: continuous wavelet analysis of multilinear forms"};
    app.require_subcommand(1);

    czw::RunOptions opt;
    std::string out_dir;
    unsigned threads = 0;
    std::uint64_t seed = 0;
    auto* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("config", opt.config_path, "config file")->required();
    auto* out_opt = run->add_option("--out", out_dir, "output directory (default: the config's output key)");
    auto* thr_opt = run->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    auto* seed_opt = run->add_option("--seed", seed, "override the config seed");

    std::string which;
    auto* list = app.add_subcommand("list", "list experiments, or the keys of one experiment");
    list->add_option("experiment", which, "experiment name");

    CLI11_PARSE(app, argc, argv);

    if (*list) {
        if (which.empty()) {
            for (const auto& n : czw::experiment_names()) std::cout << n << "\n";
            return 0;
        }
        try {
            std::cout << "experiment = " << which << "\nseed = 1\noutput = out/" << which << "\n";
            std::string section;
            for (const auto& p : czw::experiment_params(which)) {
                auto dot = p.key.find('.');
                if (p.key.substr(0, dot) != section) {
                    section = p.key.substr(0, dot);
                    std::cout << "\n[" << section << "]\n";
                }
                std::cout << p.key.substr(dot + 1) << " = " << p.fallback << "    # " << p.doc << "\n";
            }
        } catch (const czw::ConfigError& e) {
            std::cerr << e.what() << "\n";
            return 2;
        }
        return 0;
    }
    if (*out_opt) opt.out_dir = out_dir;
    if (*thr_opt) opt.threads = threads;
    if (*seed_opt) opt.seed = seed;
    return czw::run_config(opt, std::cout, std::cerr);
}
