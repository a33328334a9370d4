#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "czw/cli.hpp"
#include "czw/parallel.hpp"

namespace czw {

int run_config(const RunOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        ExperimentConfig cfg(ConfigFile::load(opt.config_path), opt.seed);
        if (opt.threads) set_thread_count(*opt.threads);
        std::string dir = opt.out_dir.value_or(cfg.output());
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());

        ExperimentOutput result = run_experiment(cfg, dir);
        std::ofstream os(dir + "/report.json");
        if (!os) throw Error("cannot write " + dir + "/report.json");
        os << result.report.dump(2) << "\n";

        for (const auto& c : result.checks) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.6g %s %.6g", c.value, c.relation.c_str(), c.threshold);
            out << (c.passed ? "PASS " : "FAIL ") << c.name << " " << buf << "\n";
        }
        out << (result.passed() ? "PASS " : "FAIL ") << cfg.experiment() << " -> " << dir << "/report.json\n";
        return result.passed() ? 0 : 1;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace czw
