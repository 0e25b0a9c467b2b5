#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <qram/qram.hpp>

namespace {

struct Args
{
    std::string config;
    std::string out;
    std::string format;
    unsigned workers = 1;
    long seed = 0;
};

void add_common(CLI::App* sub, Args& a)
{
    sub->add_option("--config", a.config, "scenario file (YAML)")->required();
    sub->add_option("--out", a.out, "output file");
    sub->add_option("--format", a.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--workers", a.workers, "parallel sweep workers")
        ->check(CLI::Range(1u, 1024u));
    sub->add_option("--seed", a.seed, "reserved; all computation is deterministic");
}

std::string read_text(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw qram::config_error("cannot read '" + path + "'");
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simulator of the two-cavity time-bin qRAM"};
    app.set_version_flag("--version", qram::version_string);
    app.require_subcommand(1);

    Args args;
    const std::pair<const char*, qram::scenario_kind> commands[] = {
        {"spectra", qram::scenario_kind::spectra},
        {"check-matching", qram::scenario_kind::check_matching},
        {"store", qram::scenario_kind::store},
        {"echo", qram::scenario_kind::echo_cycle},
        {"blockade", qram::scenario_kind::blockade},
        {"address", qram::scenario_kind::address},
        {"sweep", qram::scenario_kind::sweep},
    };
    for (const auto& [name, kind] : commands)
        add_common(app.add_subcommand(name, "run a " + qram::to_string(kind) + " scenario"),
                   args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : qram::exit_config_error;
    }

    qram::scenario_kind wanted{};
    std::string command;
    for (const auto& [name, kind] : commands)
        if (app.got_subcommand(name)) {
            wanted = kind;
            command = name;
        }

    qram::ScenarioConfig cfg;
    try {
        cfg = qram::parse_config(read_text(args.config));
    } catch (const qram::config_error& e) {
        std::cerr << "error: " << args.config << ": " << e.what() << '\n';
        return qram::exit_config_error;
    }
    if (cfg.scenario != wanted) {
        std::cerr << "error: " << args.config << ": scenario '" << qram::to_string(cfg.scenario)
                  << "' does not match subcommand '" << command << "'\n";
        return qram::exit_config_error;
    }

    qram::RunOptions opt;
    opt.out_path = args.out;
    opt.workers = args.workers;
    if (!args.format.empty()) {
        opt.format_set = true;
        opt.format = qram::parse_output_format(args.format);
    }
    const auto result = qram::run_scenario(cfg, opt);
    if (result.exit_status != qram::exit_success) {
        std::cerr << "error: " << result.message << '\n';
        return result.exit_status;
    }
    std::cout << result.message;
    std::cout << "wrote " << result.artifact << '\n';
    return qram::exit_success;
}
