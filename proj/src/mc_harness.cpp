#include "qfboot/mc_harness.hpp"

#include "qfboot/errors.hpp"
#include "qfboot/format.hpp"
#include "qfboot/parallel.hpp"
#include "qfboot/quadratic_form.hpp"
#include "qfboot/reference_dist.hpp"
#include "qfboot/rng.hpp"

#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <sstream>

namespace qfboot {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view text, std::string_view what) {
    text = trim(text);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw InvalidArgumentError("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
    }
    return value;
}

std::uint64_t parse_unsigned(std::string_view text, std::string_view what) {
    text = trim(text);
    std::uint64_t value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw InvalidArgumentError("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
    }
    return value;
}

std::vector<double> parse_list(std::string_view text, std::string_view what) {
    std::vector<double> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        out.push_back(parse_number(text.substr(0, comma), what));
        if (comma == std::string_view::npos) {
            break;
        }
        text.remove_prefix(comma + 1);
    }
    return out;
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
    const Sample s = read_csv_sample(path);
    return s.values();
}

double log_ratio(double k, double kb) {
    if (kb == 0.0) {
        return k == 0.0 ? std::numeric_limits<double>::quiet_NaN() : std::numeric_limits<double>::infinity();
    }
    return std::log(k / kb);
}

double largest_band(const StudyResult& r) { return *std::max_element(r.noise_band.begin(), r.noise_band.end()); }

SimConfig table_config(std::size_t n, const DRule& rule, WeightScheme scheme, const TableBudget& budget,
                       std::uint64_t seed) {
    SimConfig c;
    c.n = n;
    c.d_rule = rule;
    c.scheme = scheme;
    c.mc_reps = budget.mc_reps;
    c.boot_reps = budget.boot_reps;
    c.seed = seed;
    return c;
}

const std::vector<std::size_t> kTableSizes = {250, 500, 1000, 2000, 3000};

}  // namespace

DRule DRule::fixed(std::size_t d) {
    if (d == 0) {
        throw InvalidArgumentError("fixed dimension must be >= 1");
    }
    return DRule{Kind::fixed, d, 0.0, "fixed:" + std::to_string(d)};
}

DRule DRule::power(int numerator, int denominator) {
    if (numerator <= 0 || denominator <= 0) {
        throw InvalidArgumentError("power rule needs a positive exponent");
    }
    return DRule{Kind::power, 0, static_cast<double>(numerator) / static_cast<double>(denominator),
                 "power:" + std::to_string(numerator) + "/" + std::to_string(denominator)};
}

DRule parse_d_rule(std::string_view text) {
    text = trim(text);
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw InvalidArgumentError("d_rule must be fixed:D or power:P, got '" + std::string(text) + "'");
    }
    const std::string_view kind = text.substr(0, colon);
    const std::string_view arg = trim(text.substr(colon + 1));
    if (kind == "fixed") {
        return DRule::fixed(static_cast<std::size_t>(parse_unsigned(arg, "fixed dimension")));
    }
    if (kind == "power") {
        const auto slash = arg.find('/');
        if (slash != std::string_view::npos) {
            return DRule::power(static_cast<int>(parse_unsigned(arg.substr(0, slash), "exponent numerator")),
                                static_cast<int>(parse_unsigned(arg.substr(slash + 1), "exponent denominator")));
        }
        const double p = parse_number(arg, "exponent");
        if (!(p > 0.0)) {
            throw InvalidArgumentError("power rule needs a positive exponent");
        }
        return DRule{DRule::Kind::power, 0, p, "power:" + std::string(arg)};
    }
    throw InvalidArgumentError("unknown d_rule kind '" + std::string(kind) + "'");
}

std::size_t derive_d(const DRule& rule, std::size_t n) {
    if (n == 0) {
        throw InvalidArgumentError("derive_d requires n >= 1");
    }
    if (rule.kind == DRule::Kind::fixed) {
        return rule.d;
    }
    const double raw = std::pow(static_cast<double>(n), rule.exponent);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(raw + 0.5)));
}

VSpec VSpec::identity() { return VSpec{}; }

VSpec VSpec::inflate(double epsilon) {
    VSpec v;
    v.kind = Kind::inflate;
    v.epsilon = epsilon;
    return v;
}

VSpec VSpec::user(SymMatrix m) {
    VSpec v;
    v.kind = Kind::user;
    v.matrix = std::move(m);
    return v;
}

void SimConfig::validate() const {
    if (n == 0) {
        throw InvalidArgumentError("n must be >= 1");
    }
    if (mc_reps == 0 || boot_reps == 0) {
        throw InvalidArgumentError("mc_reps and boot_reps must be >= 1");
    }
    if (v_spec.kind == VSpec::Kind::inflate && !(v_spec.epsilon >= 0.0 && std::isfinite(v_spec.epsilon))) {
        throw InvalidArgumentError("inflation epsilon must be finite and >= 0");
    }
    if (v_spec.kind == VSpec::Kind::user) {
        if (!v_spec.matrix) {
            throw InvalidArgumentError("user V requested but no matrix given");
        }
        if (v_spec.matrix->dim() != d()) {
            throw DimensionError("user V is " + std::to_string(v_spec.matrix->dim()) + "x" +
                                 std::to_string(v_spec.matrix->dim()) + " but d = " + std::to_string(d()));
        }
    }
}

SimConfig parse_sim_config(std::istream& in, const std::filesystem::path& base_dir) {
    SimConfig config;
    std::map<std::string, std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = trim(view);
        if (view.empty()) {
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw InvalidArgumentError("config line " + std::to_string(line_no) + " has no '='");
        }
        const std::string key(trim(view.substr(0, eq)));
        const std::string_view value = trim(view.substr(eq + 1));
        if (!seen.emplace(key, std::string(value)).second) {
            throw InvalidArgumentError("config key '" + key + "' given twice");
        }
        if (key == "n") {
            config.n = static_cast<std::size_t>(parse_unsigned(value, "n"));
        } else if (key == "d_rule") {
            config.d_rule = parse_d_rule(value);
        } else if (key == "v") {
            if (value == "identity") {
                config.v_spec = VSpec::identity();
            } else if (value.starts_with("inflate:")) {
                config.v_spec = VSpec::inflate(parse_number(value.substr(8), "inflation epsilon"));
            } else if (value.starts_with("user:")) {
                std::filesystem::path p{std::string(trim(value.substr(5)))};
                if (p.is_relative() && !base_dir.empty()) {
                    p = base_dir / p;
                }
                config.v_spec = VSpec::user(SymMatrix(read_matrix_csv(p)));
            } else {
                throw InvalidArgumentError("v must be identity, inflate:EPS or user:PATH");
            }
        } else if (key == "scheme") {
            config.scheme = parse_weight_scheme(value);
        } else if (key == "mc_reps") {
            config.mc_reps = static_cast<std::size_t>(parse_unsigned(value, "mc_reps"));
        } else if (key == "boot_reps") {
            config.boot_reps = static_cast<std::size_t>(parse_unsigned(value, "boot_reps"));
        } else if (key == "seed") {
            config.seed = parse_unsigned(value, "seed");
        } else if (key == "levels") {
            config.levels = QuantileGrid(parse_list(value, "levels"));
        } else {
            throw InvalidArgumentError("unknown config key '" + key + "'");
        }
    }
    config.validate();
    return config;
}

SimConfig read_sim_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgumentError("cannot open config file " + path.string());
    }
    return parse_sim_config(in, path.parent_path());
}

Sample dgp_draw(const SimConfig& config, std::size_t rep) {
    const std::size_t d = config.d();
    const auto rows = static_cast<Eigen::Index>(config.n);
    const auto cols = static_cast<Eigen::Index>(d);
    Engine engine = make_engine(RngState{config.seed, rep, 0});
    const double root12 = std::sqrt(12.0);
    boost::random::uniform_real_distribution<double> uniform(-0.5, 0.5);
    Eigen::MatrixXd z(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            z(i, j) = root12 * uniform(engine);
        }
    }
    switch (config.v_spec.kind) {
        case VSpec::Kind::identity:
            break;
        case VSpec::Kind::inflate:
            z *= std::sqrt(1.0 + config.v_spec.epsilon / std::sqrt(static_cast<double>(config.n)));
            break;
        case VSpec::Kind::user: {
            if (!config.v_spec.matrix || config.v_spec.matrix->dim() != d) {
                throw DimensionError("user V does not match the derived dimension");
            }
            const SymMatrix root = matrix_sqrt(*config.v_spec.matrix);
            z = z * root.matrix();  // rows become (V^{1/2} x)^T
            break;
        }
    }
    return Sample(std::move(z));
}

StudyResult run_study(const SimConfig& config, std::size_t threads) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const std::size_t d = config.d();
    const std::size_t reps = config.mc_reps;
    const auto& levels = config.levels.levels();

    std::vector<double> stats(reps);
    std::vector<std::vector<double>> boot_thresholds(reps);
    parallel_for(reps, threads, [&](std::size_t r) {
        const Sample sample = dgp_draw(config, r);
        stats[r] = quadratic_form_stat(sample);
        const BootstrapDistribution dist =
            bootstrap_distribution(sample, config.scheme, config.boot_reps, RngState{config.seed, r, 0}, 1);
        std::vector<double> t(levels.size());
        for (std::size_t k = 0; k < levels.size(); ++k) {
            t[k] = bootstrap_quantile(dist, levels[k]);
        }
        boot_thresholds[r] = std::move(t);
    });

    std::vector<double> chisq_row(levels.size());
    for (std::size_t k = 0; k < levels.size(); ++k) {
        chisq_row[k] = chisq_quantile(static_cast<int>(d), levels[k]);
    }
    const std::vector<std::vector<double>> chisq_thresholds(reps, chisq_row);

    StudyResult out;
    out.n = config.n;
    out.d = d;
    out.mc_reps = reps;
    out.boot_reps = config.boot_reps;
    out.levels = levels;
    out.errors_boot = coverage_errors(stats, boot_thresholds, config.levels);
    out.errors_chisq = coverage_errors(stats, chisq_thresholds, config.levels);
    for (const double a : levels) {
        out.noise_band.push_back(std::sqrt(a * (1.0 - a) / static_cast<double>(reps)));
    }
    out.kb = *std::max_element(out.errors_boot.begin(), out.errors_boot.end());
    out.k_chisq = *std::max_element(out.errors_chisq.begin(), out.errors_chisq.end());
    out.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::string study_csv(const StudyResult& result) {
    std::ostringstream os;
    os << "level,error_bootstrap,error_chisq,noise_band\n";
    for (std::size_t k = 0; k < result.levels.size(); ++k) {
        os << format_double(result.levels[k]) << ',' << format_double(result.errors_boot[k]) << ','
           << format_double(result.errors_chisq[k]) << ',' << format_double(result.noise_band[k]) << '\n';
    }
    os << "max," << format_double(result.kb) << ',' << format_double(result.k_chisq) << ','
       << format_double(largest_band(result)) << '\n';
    return os.str();
}

std::vector<Figure1Row> run_figure1(const SimConfig& base, const std::vector<double>& eps_list,
                                    std::size_t threads) {
    if (eps_list.empty()) {
        throw InvalidArgumentError("run_figure1 needs at least one epsilon");
    }
    std::vector<Figure1Row> rows;
    for (const double eps : eps_list) {
        SimConfig c = base;
        c.v_spec = VSpec::inflate(eps);
        const StudyResult r = run_study(c, threads);
        rows.push_back(Figure1Row{eps, r.kb, r.k_chisq, log_ratio(r.k_chisq, r.kb)});
    }
    return rows;
}

std::string figure1_csv(const std::vector<Figure1Row>& rows) {
    std::ostringstream os;
    os << "epsilon,log_ratio\n";
    for (const auto& row : rows) {
        os << format_double(row.epsilon) << ',' << format_double(row.log_ratio) << '\n';
    }
    return os.str();
}

TableId parse_table_id(std::string_view token) {
    if (token == "t1") {
        return TableId::t1;
    }
    if (token == "t2") {
        return TableId::t2;
    }
    if (token == "t3") {
        return TableId::t3;
    }
    if (token == "t4") {
        return TableId::t4;
    }
    if (token == "f1") {
        return TableId::f1;
    }
    throw InvalidArgumentError("unknown table '" + std::string(token) + "' (expected t1|t2|t3|t4|f1)");
}

TableScale parse_table_scale(std::string_view token) {
    if (token == "desk") {
        return TableScale::desk;
    }
    if (token == "paper") {
        return TableScale::paper;
    }
    throw InvalidArgumentError("unknown scale '" + std::string(token) + "' (expected desk|paper)");
}

std::string to_string(TableId id) {
    switch (id) {
        case TableId::t1:
            return "t1";
        case TableId::t2:
            return "t2";
        case TableId::t3:
            return "t3";
        case TableId::t4:
            return "t4";
        case TableId::f1:
            return "f1";
    }
    return "?";
}

TableBudget table_budget(TableId id, TableScale scale) {
    TableBudget b{5000, id == TableId::t4 ? std::size_t{2000} : std::size_t{5000}};
    if (scale == TableScale::desk) {
        b.mc_reps /= 10;
        b.boot_reps /= 10;
    }
    return b;
}

std::string run_table(TableId id, TableScale scale, std::uint64_t seed, std::size_t threads) {
    const TableBudget budget = table_budget(id, scale);
    const bool desk = scale == TableScale::desk;
    std::ostringstream os;
    const auto pct = [](double x) { return format_fixed(100.0 * x, 3); };

    switch (id) {
        case TableId::t1: {
            std::vector<StudyResult> cols;
            os << "a";
            for (int eps = 0; eps <= 28; eps += 4) {
                SimConfig c = table_config(500, DRule::fixed(3), WeightScheme::gaussian, budget, seed);
                c.v_spec = VSpec::inflate(eps);
                cols.push_back(run_study(c, threads));
                os << ",eps=" << eps;
            }
            os << (desk ? ",noise_band\n" : "\n");
            for (std::size_t k = 0; k < cols.front().levels.size(); ++k) {
                os << format_fixed(cols.front().levels[k], 3);
                for (const auto& r : cols) {
                    os << ',' << pct(r.errors_boot[k]);
                }
                if (desk) {
                    os << ',' << pct(cols.front().noise_band[k]);
                }
                os << '\n';
            }
            break;
        }
        case TableId::t2: {
            os << "quantity";
            std::vector<StudyResult> cols;
            for (const std::size_t n : kTableSizes) {
                os << ",n=" << n;
                cols.push_back(run_study(
                    table_config(n, DRule::power(1, 5), WeightScheme::gaussian, budget, seed), threads));
            }
            os << (desk ? ",noise_band\n" : "\n");
            os << "kb/k";
            for (const auto& r : cols) {
                os << ',' << format_fixed(r.k_chisq > 0.0 ? r.kb / r.k_chisq : std::nan(""), 3);
            }
            if (desk) {
                os << ',' << pct(largest_band(cols.front()));
            }
            os << '\n';
            break;
        }
        case TableId::t3: {
            const std::vector<DRule> rules = {DRule::power(1, 5), DRule::power(1, 4), DRule::power(1, 3),
                                              DRule::power(1, 2), DRule::power(3, 4)};
            os << "n";
            for (const auto& rule : rules) {
                os << ',' << rule.label;
            }
            os << (desk ? ",noise_band\n" : "\n");
            for (const std::size_t n : kTableSizes) {
                os << n;
                double band = 0.0;
                for (const auto& rule : rules) {
                    const StudyResult r = run_study(table_config(n, rule, WeightScheme::gaussian, budget, seed), threads);
                    band = largest_band(r);
                    os << ',' << pct(r.kb);
                }
                if (desk) {
                    os << ',' << pct(band);
                }
                os << '\n';
            }
            break;
        }
        case TableId::t4: {
            const std::vector<WeightScheme> schemes = {WeightScheme::gaussian, WeightScheme::uniform_scaled,
                                                       WeightScheme::student_t3_scaled};
            os << "n,gaussian,uniform,t3" << (desk ? ",noise_band\n" : "\n");
            for (const std::size_t n : kTableSizes) {
                os << n;
                double band = 0.0;
                for (const auto scheme : schemes) {
                    const StudyResult r = run_study(table_config(n, DRule::power(1, 5), scheme, budget, seed), threads);
                    band = largest_band(r);
                    os << ',' << pct(r.kb);
                }
                if (desk) {
                    os << ',' << pct(band);
                }
                os << '\n';
            }
            break;
        }
        case TableId::f1: {
            std::vector<double> eps;
            for (int e = 0; e <= 28; e += 2) {
                eps.push_back(e);
            }
            os << figure1_csv(run_figure1(table_config(500, DRule::fixed(3), WeightScheme::gaussian, budget, seed),
                                          eps, threads));
            break;
        }
    }
    return os.str();
}

}  // namespace qfboot
