// multicav: command-line front end for the transfer-matrix engine.
//
//   multicav spectrum --config job.json --out spectrum.csv
//   multicav preset fig3 --format json --out fig3.json
//
// Exit status: 0 success, 1 configuration error, 2 computation error.

#include "multicav/errors.hpp"
#include "multicav/job.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using multicav::job::ConfigError;
using multicav::job::json;

constexpr int exit_config = 1;
constexpr int exit_compute = 2;

struct Options
{
    std::string config_path;
    std::string out;
    std::string format;
    int samples_per_fsr = 0;
    std::string preset_name;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Applies the verb and command-line overrides on top of the config document.
multicav::job::JobConfig load(const std::string& verb, const Options& opt)
{
    json doc;
    if (verb == "preset") {
        doc = multicav::job::preset_document(opt.preset_name);
    } else {
        if (opt.config_path.empty()) {
            throw ConfigError("--config is required for '" + verb + "'");
        }
        const auto text = read_file(opt.config_path);
        (void)multicav::job::parse_config(text); // line-referenced validation of the file as written
        doc = json::parse(text);
        doc["outputs"] = json::array({verb});
    }
    if (!opt.out.empty()) {
        doc["output"] = opt.out;
    }
    if (!opt.format.empty()) {
        doc["format"] = opt.format;
    }
    if (opt.samples_per_fsr > 0) {
        doc["samples_per_fsr"] = opt.samples_per_fsr;
    }
    return multicav::job::parse_config(doc);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Transfer-matrix spectra, resonances and couplings of 1D multi-element cavities"};
    app.set_version_flag("--version", multicav::job::version());
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&opt](CLI::App* cmd, bool needs_config) {
        auto* c = cmd->add_option("--config", opt.config_path, "JSON job description");
        if (needs_config) {
            c->required();
        }
        cmd->add_option("--out", opt.out, "output path (stem for multiple CSV files)");
        cmd->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--samples-per-fsr", opt.samples_per_fsr, "scan samples per pi/L_total (>= 16)")
            ->check(CLI::Range(16, 1 << 24));
    };

    for (const char* verb : {"spectrum", "resonances", "fields", "couplings", "sweep"}) {
        add_common(app.add_subcommand(verb, std::string("compute ") + verb), true);
    }
    auto* preset_cmd = app.add_subcommand("preset", "run a built-in figure parameter set");
    preset_cmd->add_option("name", opt.preset_name, "preset name")->required();
    add_common(preset_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }
    const std::string verb = app.get_subcommands().front()->get_name();

    multicav::job::JobConfig config;
    try {
        config = load(verb, opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }

    try {
        const auto result = multicav::job::run(config);
        for (const auto& path : multicav::job::write_outputs(config, result)) {
            std::cerr << "wrote " << path << '\n';
        }
    } catch (const multicav::Error& e) {
        std::cerr << e.name() << ": " << e.what() << '\n';
        return exit_compute;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_compute;
    }
    return 0;
}
