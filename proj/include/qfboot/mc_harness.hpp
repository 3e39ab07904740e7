#pragma once

#include "qfboot/bootstrap.hpp"
#include "qfboot/linalg.hpp"
#include "qfboot/sample.hpp"
#include "qfboot/weights.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qfboot {

/// Dimension as a function of n: a constant or round(n^p).
struct DRule {
    enum class Kind { fixed, power };
    Kind kind = Kind::fixed;
    std::size_t d = 1;
    double exponent = 0.0;
    std::string label;  ///< e.g. "fixed:3", "power:1/5"

    static DRule fixed(std::size_t d);
    static DRule power(int numerator, int denominator);
};

/// Parses "fixed:3", "power:1/5" or "power:0.2".
[[nodiscard]] DRule parse_d_rule(std::string_view text);

/// max(1, floor(n^p + 1/2)) for power rules.
[[nodiscard]] std::size_t derive_d(const DRule& rule, std::size_t n);

/// Covariance of the simulated rows: I, (1 + eps / sqrt(n)) I, or a user matrix.
struct VSpec {
    enum class Kind { identity, inflate, user };
    Kind kind = Kind::identity;
    double epsilon = 0.0;
    std::optional<SymMatrix> matrix;

    static VSpec identity();
    static VSpec inflate(double epsilon);
    static VSpec user(SymMatrix m);
};

struct SimConfig {
    std::size_t n = 500;
    DRule d_rule = DRule::fixed(3);
    VSpec v_spec = VSpec::identity();
    WeightScheme scheme = WeightScheme::gaussian;
    std::size_t mc_reps = 500;
    std::size_t boot_reps = 500;
    std::uint64_t seed = 42;
    QuantileGrid levels = QuantileGrid::standard();

    [[nodiscard]] std::size_t d() const { return derive_d(d_rule, n); }
    /// Throws InvalidArgumentError on R = 0, B = 0, n = 0, eps < 0 or a user
    /// matrix whose size differs from d.
    void validate() const;
};

/// Flat "key = value" text; '#' starts a comment. Keys: n, d_rule, v,
/// scheme, mc_reps, boot_reps, seed, levels. v is identity, inflate:EPS or
/// user:PATH (CSV matrix). Unknown or repeated keys are errors.
[[nodiscard]] SimConfig parse_sim_config(std::istream& in, const std::filesystem::path& base_dir = {});
[[nodiscard]] SimConfig read_sim_config(const std::filesystem::path& path);

/// Replication `rep`: rows V^{1/2} sqrt(12) u with u iid U(-1/2, 1/2)^d,
/// drawn from stream (seed, rep, 0).
[[nodiscard]] Sample dgp_draw(const SimConfig& config, std::size_t rep);

struct StudyResult {
    std::size_t n = 0;
    std::size_t d = 0;
    std::size_t mc_reps = 0;
    std::size_t boot_reps = 0;
    std::vector<double> levels;
    std::vector<double> errors_boot;   ///< |P(Q >= t^B(a)) - (1 - a)| per level
    std::vector<double> errors_chisq;  ///< same with chi-square(d) critical values
    std::vector<double> noise_band;    ///< sqrt(a (1 - a) / R) per level
    double kb = 0.0;
    double k_chisq = 0.0;
    double runtime_seconds = 0.0;  ///< wall clock; never written to CSV
};

/// Paired design: each replication gives one Q_n compared with both its own
/// bootstrap quantiles and the chi-square quantiles. Replication r
/// bootstraps from stream (seed, r) substreams 1..B. Output does not depend
/// on `threads` (0 = all hardware threads).
[[nodiscard]] StudyResult run_study(const SimConfig& config, std::size_t threads = 1);

/// CSV with columns level, error_bootstrap, error_chisq, noise_band and a
/// final "max" row holding kb and k_chisq.
[[nodiscard]] std::string study_csv(const StudyResult& result);

struct Figure1Row {
    double epsilon = 0.0;
    double kb = 0.0;
    double k_chisq = 0.0;
    /// log(k_chisq / kb); +inf when kb = 0 (and k_chisq > 0), nan when both are 0.
    double log_ratio = 0.0;
};

[[nodiscard]] std::vector<Figure1Row> run_figure1(const SimConfig& base, const std::vector<double>& eps_list,
                                                  std::size_t threads = 1);

/// Two columns: epsilon, log_ratio.
[[nodiscard]] std::string figure1_csv(const std::vector<Figure1Row>& rows);

enum class TableId { t1, t2, t3, t4, f1 };
enum class TableScale { desk, paper };

[[nodiscard]] TableId parse_table_id(std::string_view token);
[[nodiscard]] TableScale parse_table_scale(std::string_view token);
[[nodiscard]] std::string to_string(TableId id);

/// (R, B) used for a table at a given scale. At `paper` scale R = B = 5000, except
/// B = 2000 for t4. Desk divides both by ten.
struct TableBudget {
    std::size_t mc_reps;
    std::size_t boot_reps;
};
[[nodiscard]] TableBudget table_budget(TableId id, TableScale scale);

/// Runs the table and returns its CSV. Values are 100 x coverage errors
/// (t1, t3, t4), ratios kb / k (t2) or log ratios (f1). Desk scale appends a
/// noise_band column holding 100 x the largest binomial standard error.
[[nodiscard]] std::string run_table(TableId id, TableScale scale, std::uint64_t seed = 42, std::size_t threads = 0);

}  // namespace qfboot
