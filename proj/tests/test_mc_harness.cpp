#include "doctest.h"

#include "qfboot/errors.hpp"
#include "qfboot/mc_harness.hpp"
#include "qfboot/reference_dist.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

using namespace qfboot;

namespace {

SimConfig small_config() {
    SimConfig c;
    c.n = 100;
    c.d_rule = DRule::fixed(2);
    c.mc_reps = 40;
    c.boot_reps = 60;
    c.seed = 11;
    return c;
}

std::size_t count_lines(const std::string& s) {
    std::size_t k = 0;
    for (char ch : s) {
        k += ch == '\n';
    }
    return k;
}

}  // namespace

TEST_CASE("derive_d") {
    CHECK(derive_d(DRule::fixed(3), 500) == 3);
    CHECK(derive_d(DRule::power(1, 5), 500) == 3);
    CHECK(derive_d(DRule::power(3, 4), 250) == 63);
    CHECK(derive_d(DRule::power(1, 2), 3000) == 55);
    CHECK(derive_d(DRule::power(1, 100), 2) == 1);
    CHECK(derive_d(parse_d_rule("power:0.2"), 500) == 3);
    CHECK(parse_d_rule("power:1/5").label == "power:1/5");
    CHECK(parse_d_rule("fixed:7").d == 7);
    CHECK_THROWS_AS((void)parse_d_rule("fixed:0"), InvalidArgumentError);
    CHECK_THROWS_AS((void)parse_d_rule("power:1/0"), InvalidArgumentError);
    CHECK_THROWS_AS((void)parse_d_rule("grow:2"), InvalidArgumentError);
}

TEST_CASE("dgp_draw: support and moments") {
    SimConfig c;
    c.n = 500;
    c.d_rule = DRule::fixed(3);
    double sum = 0.0;
    double sq = 0.0;
    double cross = 0.0;
    double count = 0.0;
    for (std::size_t r = 0; r < 40; ++r) {
        const Sample s = dgp_draw(c, r);
        CHECK(s.n() == 500);
        CHECK(s.d() == 3);
        CHECK(s.values().cwiseAbs().maxCoeff() <= std::sqrt(3.0));
        sum += s.values().sum();
        sq += s.values().squaredNorm();
        cross += s.values().col(0).dot(s.values().col(1));
        count += static_cast<double>(s.values().size());
    }
    CHECK(std::abs(sum / count) < 0.02);
    CHECK(sq / count == doctest::Approx(1.0).epsilon(0.02));
    CHECK(std::abs(cross / (count / 3.0)) < 0.03);
    CHECK(dgp_draw(c, 3).values() == dgp_draw(c, 3).values());
    CHECK(dgp_draw(c, 3).values() != dgp_draw(c, 4).values());
}

TEST_CASE("dgp_draw: inflated and user covariances") {
    SimConfig c;
    c.n = 500;
    c.d_rule = DRule::fixed(3);
    c.v_spec = VSpec::inflate(4.0);
    const double target = 1.0 + 4.0 / std::sqrt(500.0);
    CHECK(target == doctest::Approx(1.1789).epsilon(1e-4));
    double sq = 0.0;
    double count = 0.0;
    for (std::size_t r = 0; r < 40; ++r) {
        const Sample s = dgp_draw(c, r);
        sq += s.values().squaredNorm();
        count += static_cast<double>(s.values().size());
    }
    CHECK(sq / count == doctest::Approx(target).epsilon(0.02));

    Eigen::Matrix2d v;
    v << 2.0, 0.6, 0.6, 0.5;
    c.d_rule = DRule::fixed(2);
    c.v_spec = VSpec::user(SymMatrix(v));
    Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
    double rows = 0.0;
    for (std::size_t r = 0; r < 40; ++r) {
        const Sample s = dgp_draw(c, r);
        acc += s.values().transpose() * s.values();
        rows += static_cast<double>(s.n());
    }
    CHECK(((acc / rows) - v).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("SimConfig validation") {
    SimConfig c = small_config();
    c.validate();
    c.mc_reps = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgumentError);
    c = small_config();
    c.v_spec = VSpec::inflate(-1.0);
    CHECK_THROWS_AS(c.validate(), InvalidArgumentError);
    c = small_config();
    c.v_spec = VSpec::user(SymMatrix::identity(3));
    CHECK_THROWS_AS(c.validate(), DimensionError);
}

TEST_CASE("parse_sim_config") {
    std::istringstream in(
        "# study\n"
        "n = 250\n"
        "d_rule = power:1/5  # grows\n"
        "v = inflate:8\n"
        "scheme = t3\n"
        "mc_reps = 20\n"
        "boot_reps = 30\n"
        "seed = 9\n"
        "levels = 0.9,0.95\n");
    const SimConfig c = parse_sim_config(in);
    CHECK(c.n == 250);
    CHECK(c.d() == 3);
    CHECK(c.v_spec.kind == VSpec::Kind::inflate);
    CHECK(c.v_spec.epsilon == 8.0);
    CHECK(c.scheme == WeightScheme::student_t3_scaled);
    CHECK(c.mc_reps == 20);
    CHECK(c.boot_reps == 30);
    CHECK(c.seed == 9);
    CHECK(c.levels.size() == 2);

    std::istringstream unknown("n = 10\nwidth = 3\n");
    CHECK_THROWS_AS((void)parse_sim_config(unknown), InvalidArgumentError);
    std::istringstream repeated("n = 10\nn = 20\n");
    CHECK_THROWS_AS((void)parse_sim_config(repeated), InvalidArgumentError);
    std::istringstream bad_value("n = ten\n");
    CHECK_THROWS_AS((void)parse_sim_config(bad_value), InvalidArgumentError);
}

TEST_CASE("run_study: single replication errors are a or 1 - a") {
    SimConfig c = small_config();
    c.mc_reps = 1;
    const StudyResult r = run_study(c);
    CHECK(r.levels.size() == 4);
    for (std::size_t k = 0; k < r.levels.size(); ++k) {
        const double a = r.levels[k];
        const bool boot_ok = std::abs(r.errors_boot[k] - a) < 1e-12 || std::abs(r.errors_boot[k] - (1 - a)) < 1e-12;
        const bool chi_ok = std::abs(r.errors_chisq[k] - a) < 1e-12 || std::abs(r.errors_chisq[k] - (1 - a)) < 1e-12;
        CHECK(boot_ok);
        CHECK(chi_ok);
        CHECK(r.noise_band[k] == doctest::Approx(std::sqrt(a * (1 - a))));
    }
}

TEST_CASE("run_study: kb is the maximum and the CSV is thread independent") {
    const SimConfig c = small_config();
    const StudyResult one = run_study(c, 1);
    double max_boot = 0.0;
    double max_chi = 0.0;
    for (std::size_t k = 0; k < one.levels.size(); ++k) {
        max_boot = std::max(max_boot, one.errors_boot[k]);
        max_chi = std::max(max_chi, one.errors_chisq[k]);
        CHECK(one.noise_band[k] == doctest::Approx(std::sqrt(one.levels[k] * (1 - one.levels[k]) / 40.0)));
    }
    CHECK(one.kb == max_boot);
    CHECK(one.k_chisq == max_chi);
    const std::string csv = study_csv(one);
    CHECK(csv.rfind("level,error_bootstrap,error_chisq,noise_band\n", 0) == 0);
    CHECK(count_lines(csv) == 6);
    CHECK(csv.find("max,") != std::string::npos);
    CHECK(study_csv(run_study(c, 2)) == csv);
    CHECK(study_csv(run_study(c, 8)) == csv);
}

TEST_CASE("run_study: chi-square baseline is sane under the null") {
    SimConfig c;
    c.n = 500;
    c.d_rule = DRule::fixed(2);
    c.mc_reps = 2000;
    c.boot_reps = 20;
    c.seed = 5;
    const StudyResult r = run_study(c);
    // Five binomial standard errors at the widest level.
    CHECK(r.k_chisq < 5.0 * std::sqrt(0.25 / 2000.0));
}

TEST_CASE("figure1 rows") {
    SimConfig c = small_config();
    const auto rows = run_figure1(c, {0.0});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].epsilon == 0.0);
    const StudyResult direct = run_study(c);
    CHECK(rows[0].kb == direct.kb);
    CHECK(rows[0].k_chisq == direct.k_chisq);
    if (rows[0].kb > 0.0 && rows[0].k_chisq > 0.0) {
        CHECK(rows[0].log_ratio == doctest::Approx(std::log(rows[0].k_chisq / rows[0].kb)));
    }
    const std::string csv = figure1_csv(rows);
    CHECK(csv.rfind("epsilon,log_ratio\n", 0) == 0);
    CHECK(count_lines(csv) == 2);

    Figure1Row zero;
    zero.k_chisq = 0.1;
    zero.log_ratio = std::numeric_limits<double>::infinity();
    Figure1Row none;
    none.log_ratio = std::numeric_limits<double>::quiet_NaN();
    const std::string edge = figure1_csv({zero, none});
    CHECK(edge.find("inf") != std::string::npos);
    CHECK(edge.find("nan") != std::string::npos);
}

TEST_CASE("table selectors and budgets") {
    CHECK(parse_table_id("t1") == TableId::t1);
    CHECK(parse_table_id("f1") == TableId::f1);
    CHECK(to_string(TableId::t3) == "t3");
    CHECK_THROWS_AS((void)parse_table_id("t9"), InvalidArgumentError);
    CHECK(parse_table_scale("desk") == TableScale::desk);
    CHECK_THROWS_AS((void)parse_table_scale("huge"), InvalidArgumentError);
    CHECK(table_budget(TableId::t1, TableScale::paper).mc_reps == 5000);
    CHECK(table_budget(TableId::t1, TableScale::paper).boot_reps == 5000);
    CHECK(table_budget(TableId::t4, TableScale::paper).boot_reps == 2000);
    CHECK(table_budget(TableId::t2, TableScale::desk).mc_reps == 500);
    CHECK(table_budget(TableId::t4, TableScale::desk).boot_reps == 200);
}
