#include <CLI11.hpp>

#include <iostream>

#include "lamcon/pipeline.hpp"

namespace {

int run_step(const std::string& step, const std::string& config_path,
             const std::string& out_dir, long seed) {
    lamcon::ExperimentConfig cfg = lamcon::parse_config_file(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.pipeline = {step};
    lamcon::RunReport rep = lamcon::run(cfg);
    lamcon::print_rows(rep.rows, std::cout);
    std::cout << (rep.exit_code == 0 ? "OK" : "FAILED") << " (report in " << cfg.out_dir
              << "/report.json)\n";
    return rep.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lamcon: flat SL(2,C) lambda-connection families on discretized surfaces"};
    app.require_subcommand(1);

    std::string config_path, out_dir, level = "fast";
    long seed = -1;

    auto add_common = [&](CLI::App* sub, bool need_config) {
        auto* opt = sub->add_option("--config", config_path, "experiment config file");
        if (need_config) opt->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--seed", seed, "seed override");
    };

    CLI::App* cmd_build = app.add_subcommand("build", "build the configured solution and save it");
    CLI::App* cmd_energy = app.add_subcommand("energy", "energy report of the configured family");
    CLI::App* cmd_twist = app.add_subcommand("twist", "twist the family; before/after energies");
    CLI::App* cmd_dual = app.add_subcommand("dual", "dual surface family; before/after energies");
    CLI::App* cmd_light = app.add_subcommand("lightcone", "lightcone geometry checks + CSV");
    for (CLI::App* c : {cmd_build, cmd_energy, cmd_twist, cmd_dual, cmd_light})
        add_common(c, true);

    CLI::App* cmd_verify = app.add_subcommand("verify", "run the verification suite");
    cmd_verify->add_option("--level", level, "fast | full")
        ->check(CLI::IsMember({"fast", "full"}));
    add_common(cmd_verify, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_verify->parsed()) {
            const auto lvl = (level == "full") ? lamcon::VerifyLevel::Full
                                               : lamcon::VerifyLevel::Fast;
            const auto rows = lamcon::verify_suite(lvl);
            const int failures = lamcon::print_rows(rows, std::cout);
            if (!out_dir.empty()) {
                std::filesystem::create_directories(out_dir);
                lamcon::json doc;
                doc["level"] = level;
                lamcon::json jrows = lamcon::json::array();
                for (const auto& r : rows) jrows.push_back(lamcon::row_to_json(r));
                doc["rows"] = jrows;
                doc["pass"] = (failures == 0);
                std::ofstream os(out_dir + "/verify.json");
                os << doc.dump(2) << "\n";
            }
            std::cout << (failures == 0 ? "all checks passed" : "checks FAILED") << "\n";
            return failures == 0 ? 0 : 1;
        }
        for (auto [cmd, step] : {std::pair{cmd_build, "build"}, {cmd_energy, "energy"},
                                 {cmd_twist, "twist"}, {cmd_dual, "dual"},
                                 {cmd_light, "lightcone"}}) {
            if (cmd->parsed()) return run_step(step, config_path, out_dir, seed);
        }
    } catch (const lamcon::ConfigParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const lamcon::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
