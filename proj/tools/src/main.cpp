// kacm: run Kac-moment configurations and compare the engine with Monte Carlo.
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "kacm/errors.hpp"
#include "report.hpp"
#include "run_config.hpp"

namespace {

using namespace kacm::cli;

enum Exit { kPass = 0, kFail = 1, kConfig = 2, kIo = 3 };

struct Args {
    std::string config;
    std::optional<std::string> task;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
};

void add_common(CLI::App* sub, Args& a, bool config_required) {
    auto* c = sub->add_option("--config,-c", a.config, "run configuration (JSON, schema kacm-run/1)");
    if (config_required) c->required();
    sub->add_option("--task", a.task, "run only the task with this id");
    sub->add_option("--out,-o", a.out, "report destination; '-' for stdout (default: the config's output.path)");
    sub->add_option("--format", a.format, "report format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed-override", a.seed, "replace mc.seed");
    sub->add_option("--workers", a.workers, "worker threads (default: KACM_WORKERS or 1)")->check(CLI::Range(1, 1024));
}

int run(const std::optional<Operation>& only, const Args& a) {
    RunConfig cfg = a.config.empty() ? builtin_kernel_check_config() : load_run_config(a.config);
    if (a.out) cfg.output.path = *a.out;
    if (a.format)
        cfg.output.format = *a.format;
    else if (a.out && a.out->size() > 5 && a.out->substr(a.out->size() - 5) == ".json")
        cfg.output.format = "json";

    RunOptions opt;
    opt.only = only;
    opt.task = a.task;
    opt.seed_override = a.seed;
    opt.workers = a.workers;
    opt.log = &std::cerr;
    apply_options(cfg, opt);

    std::ofstream file;
    if (cfg.output.path != "-") {
        file.open(cfg.output.path);
        if (!file) throw IoError("cannot open report file '" + cfg.output.path + "'");
    }
    std::ostream& os = cfg.output.path == "-" ? std::cout : file;

    const Report rep = execute(cfg, opt);
    if (cfg.output.format == "json")
        rep.write_json(os);
    else
        rep.write_csv(os);
    os.flush();
    if (!os) throw IoError("error writing report to '" + cfg.output.path + "'");
    return rep.any_fail() ? kFail : kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kac moment formulas for additive functionals of one-dimensional diffusions"};
    app.set_version_flag("--version", std::string("kacm ") + kToolVersion);
    app.require_subcommand(1);

    Args args;
    std::optional<Operation> only;
    struct Sub {
        const char* name;
        const char* help;
        std::optional<Operation> op;
    };
    const Sub subs[] = {
        {"run", "execute every task in the configuration", std::nullopt},
        {"kernel-check", "Chapman-Kolmogorov, symmetry, mass, resolvent and duality residuals (built-in suite without --config)",
         Operation::KernelCheck},
        {"kato", "sup-potential curves and extended Kato classification", Operation::Kato},
        {"moment", "engine moments only", Operation::Moment},
        {"mc-compare", "engine against the Monte Carlo oracle", Operation::McCompare},
        {"exp-bound", "truncated exponential-moment series against the Kato bound", Operation::ExpBound},
    };
    for (const auto& s : subs) {
        auto* sub = app.add_subcommand(s.name, s.help);
        add_common(sub, args, s.op != Operation::KernelCheck);
        sub->callback([&only, op = s.op] { only = op; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        return run(only, args);
    } catch (const kacm::ConfigError& e) {
        std::cerr << "kacm: " << e.what() << "\n";
        return kConfig;
    } catch (const IoError& e) {
        std::cerr << "kacm: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "kacm: " << e.what() << "\n";
        return kFail;
    }
}
