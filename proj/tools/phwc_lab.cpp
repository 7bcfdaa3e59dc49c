// phwc-lab: run check suites on the built-in scenarios.
//
// Exit status: 0 every expected verdict matched, 1 verdict mismatch, 2 config error,
// 3 numerical failure, 4 unknown scenario.

#include "phwc/errors.hpp"
#include "phwc/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

enum Exit { kOk = 0, kMismatch = 1, kConfig = 2, kNumerical = 3, kUnknownScenario = 4 };

struct Flags {
    std::string config_path;
    std::string scenario;
    std::string checks;
    int n = 0;
    int order = 0;
    double fd_step = 0.0;
    double alpha = 0.0;
    double p = 0.0;
    unsigned long long seed = 0;
    int sample_points = 0;
    int random_fields = 0;
    std::string json_path;
    std::string csv_path;
    bool quiet = false;
};

void add_run_flags(CLI::App* app, Flags& f, bool with_checks, std::map<std::string, CLI::Option*>& opts) {
    opts["config"] = app->add_option("--config", f.config_path, "JSON config file; flags override it");
    opts["scenario"] = app->add_option("--scenario", f.scenario, "scenario id (see `list`)");
    if (with_checks) opts["checks"] = app->add_option("--checks", f.checks, "comma-separated subset of checks, or all");
    opts["n"] = app->add_option("--n", f.n, "complex dimension for hopf-s2n+1");
    opts["order"] = app->add_option("--order", f.order, "quadrature nodes per axis (0 keeps the scenario default)");
    opts["fd_step"] = app->add_option("--fd-step", f.fd_step, "finite-difference step");
    opts["alpha"] = app->add_option("--alpha", f.alpha, "coupling in E_FH = E + alpha E_inf");
    opts["p"] = app->add_option("--p", f.p, "exponent of the p-energy");
    opts["seed"] = app->add_option("--seed", f.seed, "seed for sample points and random fields");
    opts["sample_points"] = app->add_option("--sample-points", f.sample_points, "random points per pointwise check");
    opts["random_fields"] = app->add_option("--random-fields", f.random_fields, "random variation fields");
    app->add_option("--json", f.json_path, "write the JSON report here");
    app->add_option("--csv", f.csv_path, "write the residual table as CSV here");
    app->add_flag("--quiet", f.quiet, "no table on stdout");
}

std::vector<std::string> split_checks(const std::string& s) {
    std::vector<std::string> out;
    if (s == "all") return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

phwc::RunConfig effective_config(const Flags& f, const std::map<std::string, CLI::Option*>& opts) {
    phwc::RunConfig c;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw phwc::GeometryError(phwc::ErrorKind::ConfigError, "cannot read config " + f.config_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw phwc::GeometryError(phwc::ErrorKind::ConfigError, std::string("config is not JSON: ") + e.what());
        }
        c = phwc::config_from_json(j, c);
    }
    auto given = [&](const char* k) {
        auto it = opts.find(k);
        return it != opts.end() && it->second->count() > 0;
    };
    if (given("scenario")) c.scenario = f.scenario;
    if (given("checks")) c.checks = split_checks(f.checks);
    if (given("n")) c.n = f.n;
    if (given("order")) c.order = f.order;
    if (given("fd_step")) c.fd_step = f.fd_step;
    if (given("alpha")) c.alpha = f.alpha;
    if (given("p")) c.p = f.p;
    if (given("seed")) c.seed = f.seed;
    if (given("sample_points")) c.sample_points = f.sample_points;
    if (given("random_fields")) c.random_fields = f.random_fields;
    c.validate();
    return c;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw phwc::GeometryError(phwc::ErrorKind::ConfigError, "cannot write " + path);
    out << text;
}

int emit(const phwc::RunReport& r, const Flags& f) {
    if (!f.json_path.empty()) write_file(f.json_path, r.document().dump(2) + "\n");
    if (!f.csv_path.empty()) write_file(f.csv_path, phwc::report_csv(r));
    if (!f.quiet) std::cout << phwc::report_table(r);
    return r.all_match() ? kOk : kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phwc-lab: numerical checks for pseudo horizontally weakly conformal maps"};
    app.require_subcommand(1);

    bool list_json = false;
    auto* list = app.add_subcommand("list", "list the scenario catalogue");
    list->add_flag("--json", list_json, "print the catalogue as JSON");

    Flags run_flags, id_flags;
    std::map<std::string, CLI::Option*> run_opts, id_opts;
    auto* run = app.add_subcommand("run", "run check suites on one scenario");
    add_run_flags(run, run_flags, true, run_opts);
    auto* ids = app.add_subcommand("identities", "run only the identity suites");
    add_run_flags(ids, id_flags, false, id_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (list->parsed()) {
            if (list_json) {
                nlohmann::ordered_json j = nlohmann::ordered_json::array();
                for (const auto& id : phwc::scenario_ids())
                    j.push_back({{"id", id}, {"description", phwc::scenario_description(id)}});
                std::cout << j.dump(2) << "\n";
            } else {
                for (const auto& id : phwc::scenario_ids())
                    std::cout << id << "\t" << phwc::scenario_description(id) << "\n";
            }
            return kOk;
        }
        if (run->parsed()) return emit(phwc::run(effective_config(run_flags, run_opts)), run_flags);
        return emit(phwc::run_identities(effective_config(id_flags, id_opts)), id_flags);
    } catch (const phwc::GeometryError& e) {
        std::cerr << "phwc-lab: " << e.what() << "\n";
        switch (e.kind()) {
            case phwc::ErrorKind::UnknownScenario: return kUnknownScenario;
            case phwc::ErrorKind::ConfigError: return kConfig;
            default: return kNumerical;
        }
    } catch (const std::exception& e) {
        std::cerr << "phwc-lab: " << e.what() << "\n";
        return kNumerical;
    }
}
