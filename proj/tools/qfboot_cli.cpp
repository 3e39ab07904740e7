#include "qfboot/bootstrap.hpp"
#include "qfboot/diagnostics.hpp"
#include "qfboot/format.hpp"
#include "qfboot/gmm_gel.hpp"
#include "qfboot/mc_harness.hpp"
#include "qfboot/models.hpp"
#include "qfboot/quadratic_form.hpp"
#include "qfboot/reference_dist.hpp"
#include "qfboot/sample.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace qfboot;

MomentModel model_from_flag(const std::string& spec, const Sample& data) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument("--model must be panel:T or spline:K");
    }
    const std::string kind = spec.substr(0, colon);
    const auto size = static_cast<std::size_t>(std::stoul(spec.substr(colon + 1)));
    if (kind == "panel") {
        return panel_ab_model(size);
    }
    if (kind == "spline") {
        return conditional_spline_model(linear_iv_spec(), size, data);
    }
    throw std::invalid_argument("unknown model kind '" + kind + "'");
}

struct MstFlags {
    std::string data;
    std::string model;
    std::string kernel = "cue";
    std::string weight_matrix = "two-step";
    std::string scheme = "gaussian";
    std::size_t reps = 499;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::vector<double> levels = QuantileGrid::standard().levels();
};

void add_mst_flags(CLI::App* cmd, MstFlags& f, bool gel) {
    cmd->add_option("--data", f.data, "CSV file, one observation per row")->required();
    cmd->add_option("--model", f.model, "panel:T or spline:K")->required();
    if (gel) {
        cmd->add_option("--kernel", f.kernel, "el, et or cue")->capture_default_str();
    } else {
        cmd->add_option("--weight-matrix", f.weight_matrix, "identity or two-step")->capture_default_str();
    }
    cmd->add_option("--scheme", f.scheme, "gaussian, uniform or t3")->capture_default_str();
    cmd->add_option("--reps", f.reps, "bootstrap replicates B (>= 99)")->capture_default_str();
    cmd->add_option("--seed", f.seed)->capture_default_str();
    cmd->add_option("--threads", f.threads, "0 = all hardware threads")->capture_default_str();
    cmd->add_option("--levels", f.levels)->delimiter(',');
}

void run_mst(const MstFlags& f, bool gel) {
    const Sample data = read_csv_sample(std::filesystem::path(f.data));
    const MomentModel model = model_from_flag(f.model, data);
    MstMethod method;
    if (gel) {
        method = kernel(parse_gel_kind(f.kernel));
    } else {
        GmmConfig config;
        if (f.weight_matrix == "identity") {
            config.weight_matrix = WeightMatrixKind::identity;
        } else if (f.weight_matrix == "two-step") {
            config.weight_matrix = WeightMatrixKind::two_step_inverse_omega;
        } else {
            throw std::invalid_argument("--weight-matrix must be identity or two-step");
        }
        method = config;
    }
    const QuantileGrid grid(f.levels);
    const MstBootstrapResult r = mst_bootstrap_pvalue(model, data, method, parse_weight_scheme(f.scheme), f.reps,
                                                      RngState{f.seed, 0, 0}, grid, f.threads);
    std::cout << "stat,pvalue";
    for (const double a : grid.levels()) {
        std::cout << ",q" << format_double(a);
    }
    std::cout << '\n' << format_double(r.stat) << ',' << format_double(r.pvalue);
    for (const double q : r.quantiles) {
        std::cout << ',' << format_double(q);
    }
    std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted bootstrap for quadratic forms and moment-specification tests"};
    app.require_subcommand(1);

    // bootstrap
    std::string boot_data;
    std::string boot_scheme = "gaussian";
    std::size_t boot_reps = 1000;
    std::uint64_t boot_seed = 1;
    std::size_t boot_threads = 1;
    std::vector<double> boot_levels = QuantileGrid::standard().levels();
    std::optional<double> boot_observed;
    auto* boot = app.add_subcommand("bootstrap", "bootstrap quantiles of Q*_n for a data set");
    boot->add_option("--data", boot_data)->required();
    boot->add_option("--scheme", boot_scheme)->capture_default_str();
    boot->add_option("--reps", boot_reps)->capture_default_str();
    boot->add_option("--seed", boot_seed)->capture_default_str();
    boot->add_option("--threads", boot_threads)->capture_default_str();
    boot->add_option("--levels", boot_levels)->delimiter(',');
    boot->add_option("--observed", boot_observed, "statistic to compute a p-value for");

    // oracle
    std::vector<double> oracle_spectrum;
    std::vector<double> oracle_levels = QuantileGrid::standard().levels();
    std::size_t oracle_draws = 1000000;
    std::uint64_t oracle_seed = 1;
    std::size_t oracle_threads = 1;
    auto* oracle = app.add_subcommand("oracle", "Monte Carlo quantiles of a weighted chi-square sum");
    oracle->add_option("--spectrum", oracle_spectrum)->delimiter(',')->required();
    oracle->add_option("--levels", oracle_levels)->delimiter(',');
    oracle->add_option("--draws", oracle_draws)->capture_default_str();
    oracle->add_option("--seed", oracle_seed)->capture_default_str();
    oracle->add_option("--threads", oracle_threads)->capture_default_str();

    // diagnose
    std::string diag_data;
    double diag_gamma = 2.0;
    double diag_kappa = 0.0;
    auto* diag = app.add_subcommand("diagnose", "plug-in growth-rate ratios for a data set");
    diag->add_option("--data", diag_data)->required();
    diag->add_option("--gamma", diag_gamma)->capture_default_str();
    diag->add_option("--kappa", diag_kappa)->capture_default_str();

    MstFlags gmm_flags;
    auto* gmm = app.add_subcommand("gmm-test", "GMM specification test with bootstrap p-value");
    add_mst_flags(gmm, gmm_flags, false);
    MstFlags gel_flags;
    auto* gel = app.add_subcommand("gel-test", "GEL specification test with bootstrap p-value");
    add_mst_flags(gel, gel_flags, true);

    // simulate
    std::string sim_config;
    std::size_t sim_threads = 0;
    auto* sim = app.add_subcommand("simulate", "run one Monte Carlo study from a config file");
    sim->add_option("--config", sim_config)->required();
    sim->add_option("--threads", sim_threads, "0 = all hardware threads")->capture_default_str();

    // table
    std::string table_which;
    std::string table_scale = "desk";
    std::string table_out = ".";
    std::uint64_t table_seed = 42;
    std::size_t table_threads = 0;
    auto* table = app.add_subcommand("table", "reproduce a simulation table as CSV");
    table->add_option("--which", table_which, "t1, t2, t3, t4 or f1 (figure data)")->required();
    table->add_option("--scale", table_scale, "desk or paper")->capture_default_str();
    table->add_option("--out", table_out, "output directory")->capture_default_str();
    table->add_option("--seed", table_seed)->capture_default_str();
    table->add_option("--threads", table_threads)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (boot->parsed()) {
            const Sample data = read_csv_sample(std::filesystem::path(boot_data));
            const QuantileGrid grid(boot_levels);
            const auto dist = bootstrap_distribution(data, parse_weight_scheme(boot_scheme), boot_reps,
                                                     RngState{boot_seed, 0, 0}, boot_threads);
            std::cout << "quantity,level,value\n";
            std::cout << "statistic,," << format_double(quadratic_form_stat(data)) << '\n';
            for (const double a : grid.levels()) {
                std::cout << "quantile," << format_double(a) << ',' << format_double(bootstrap_quantile(dist, a))
                          << '\n';
            }
            if (boot_observed) {
                std::cout << "pvalue,," << format_double(bootstrap_pvalue(dist, *boot_observed)) << '\n';
            }
        } else if (oracle->parsed()) {
            const QuantileGrid grid(oracle_levels);
            auto draws = weighted_chisq_sample(oracle_spectrum, oracle_draws, RngState{oracle_seed, 0, 0},
                                               oracle_threads);
            std::sort(draws.begin(), draws.end());
            std::cout << "level,quantile\n";
            for (const double a : grid.levels()) {
                std::cout << format_double(a) << ',' << format_double(sorted_quantile(draws, a)) << '\n';
            }
        } else if (diag->parsed()) {
            const Sample data = read_csv_sample(std::filesystem::path(diag_data));
            const AssumptionReport r = assumption_report(data, diag_gamma, diag_kappa);
            std::cout << "n=" << r.n << "\nd=" << r.d << "\ngamma=" << format_double(r.gamma)
                      << "\nkappa=" << format_double(r.kappa) << "\nratio_i_1=" << format_double(r.ratio_i[0])
                      << "\nratio_i_2=" << format_double(r.ratio_i[1]) << "\nratio_i_3=" << format_double(r.ratio_i[2])
                      << "\nratio_ii=" << format_double(r.ratio_ii) << "\nratio_iii=" << format_double(r.ratio_iii)
                      << "\neig_min=" << format_double(r.eig_min) << "\neig_max=" << format_double(r.eig_max) << '\n';
        } else if (gmm->parsed()) {
            run_mst(gmm_flags, false);
        } else if (gel->parsed()) {
            run_mst(gel_flags, true);
        } else if (sim->parsed()) {
            const SimConfig config = read_sim_config(sim_config);
            std::cout << study_csv(run_study(config, sim_threads));
        } else if (table->parsed()) {
            const TableId id = parse_table_id(table_which);
            const std::string csv = run_table(id, parse_table_scale(table_scale), table_seed, table_threads);
            std::filesystem::create_directories(table_out);
            const auto path = std::filesystem::path(table_out) / (to_string(id) + "_" + table_scale + ".csv");
            std::ofstream out(path);
            out << csv;
            if (!out) {
                throw std::runtime_error("cannot write " + path.string());
            }
            std::cout << csv;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
