#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "ecm/experiment.hpp"
#include "ecm/rng.hpp"

using namespace ecm;
namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// CSV text with the wall_time_ms column blanked, for byte comparisons that
/// ignore timing.
std::string mask_wall_time(const std::string& csv) {
    std::istringstream in(csv);
    std::string out, line;
    while (std::getline(in, line)) {
        const auto pos = line.rfind(',');
        out += line.substr(0, pos);
        out += "\n";
    }
    return out;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::path("experiment_artifacts") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("run_trial is deterministic and internally consistent") {
    const TrialRecord a = run_trial(2.5, 1000, 1, 42);
    const TrialRecord b = run_trial(2.5, 1000, 1, 42);
    CHECK(a.same_data(b));
    CHECK(a.L_n % 2 == 0);
    CHECK(a.seed == 42);
    CHECK(a.erased_fraction ==
          static_cast<double>(a.total_erased) / static_cast<double>(a.L_n));
    CHECK(a.total_erased == a.self_loops + a.excess_multiplicity);
    CHECK(a.lemma1_bound >= 0.0);
    CHECK(a.pairwise_exp_term > 0.0);

    const TrialRecord c = run_trial(2.5, 1000, 1, 43);
    CHECK_FALSE(a.same_data(c));

    CHECK_THROWS_AS(run_trial(2.5, 1, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(run_trial(1.0, 100, 1, 0), std::invalid_argument);
}

TEST_CASE("trial records round-trip through CSV") {
    TrialRecord r = run_trial(1.7, 200, 2, 7);
    r.replication_index = 5;
    const TrialRecord back = trial_from_csv(trial_to_csv(r));
    CHECK(back.same_data(r));
    CHECK(back.wall_time_ms == r.wall_time_ms);
    CHECK_THROWS_AS(trial_from_csv("1,2,3"), std::runtime_error);
}

TEST_CASE("the CSV header is frozen") {
    CHECK(std::string(trial_csv_header) ==
          "gamma,n,replication_index,seed,L_n,sum_squares,self_loops,"
          "excess_multiplicity,total_erased,erased_fraction,lemma1_bound,"
          "pairwise_exp_term,wall_time_ms");
}

TEST_CASE("sweep plans are validated") {
    SweepPlan plan;
    plan.gamma_grid = {2.5};
    plan.n_grid = {100};
    plan.replications = 1;
    plan.validate();

    SweepPlan bad = plan;
    bad.gamma_grid.clear();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = plan;
    bad.gamma_grid = {0.9};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = plan;
    bad.n_grid.clear();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = plan;
    bad.n_grid = {100, 100};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = plan;
    bad.n_grid = {100, 50};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = plan;
    bad.replications = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    CHECK(default_gamma_grid().size() == 9);
    CHECK(default_n_grid() ==
          std::vector<std::uint64_t>{1000, 10000, 100000, 1000000});
}

TEST_CASE("a sweep yields one record per cell with derived seeds") {
    const fs::path dir = fresh_dir("basic");
    SweepPlan plan;
    plan.gamma_grid = {2.5};
    plan.n_grid = {100};
    plan.replications = 3;
    plan.master_seed = 11;
    plan.output_path = (dir / "sweep.csv").string();
    plan.threads = 2;

    const auto records = run_sweep(plan);
    REQUIRE(records.size() == 3);
    for (std::uint64_t r = 0; r < 3; ++r) {
        CHECK(records[r].replication_index == r);
        CHECK(records[r].seed == derive_seed(11, 2.5, 100, r));
    }
    CHECK(records[0].seed != records[1].seed);
    CHECK(records[1].seed != records[2].seed);

    const auto back = read_trial_csv(plan.output_path);
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(back[i].same_data(records[i]));
}

TEST_CASE("identical plans produce identical record data") {
    const fs::path dir = fresh_dir("repeat");
    SweepPlan plan;
    plan.gamma_grid = {1.5, 2.5};
    plan.n_grid = {50, 100};
    plan.replications = 2;
    plan.master_seed = 21;
    plan.threads = 2;

    plan.output_path = (dir / "a.csv").string();
    const auto first = run_sweep(plan);
    plan.output_path = (dir / "b.csv").string();
    const auto second = run_sweep(plan);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].same_data(second[i]));
    }
    CHECK(mask_wall_time(read_file((dir / "a.csv").string())) ==
          mask_wall_time(read_file((dir / "b.csv").string())));
}

TEST_CASE("a complete output file is reused byte for byte") {
    const fs::path dir = fresh_dir("reuse");
    SweepPlan plan;
    plan.gamma_grid = {2.0};
    plan.n_grid = {60};
    plan.replications = 4;
    plan.master_seed = 5;
    plan.output_path = (dir / "sweep.csv").string();

    const auto first = run_sweep(plan);
    const std::string bytes_before = read_file(plan.output_path);
    const auto second = run_sweep(plan);
    CHECK(read_file(plan.output_path) == bytes_before);
    REQUIRE(second.size() == first.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].same_data(second[i]));
    }
}

TEST_CASE("an interrupted sweep resumes to the same record set") {
    const fs::path dir = fresh_dir("resume");
    SweepPlan plan;
    plan.gamma_grid = {1.8, 2.5};
    plan.n_grid = {40, 80};
    plan.replications = 2;
    plan.master_seed = 31;

    plan.output_path = (dir / "full.csv").string();
    const auto full = run_sweep(plan);

    // Simulate an interrupt: keep the header and the first three data rows.
    const std::string full_bytes = read_file(plan.output_path);
    std::istringstream in(full_bytes);
    std::string line, prefix;
    for (int i = 0; i < 4 && std::getline(in, line); ++i) {
        prefix += line;
        prefix += "\n";
    }
    plan.output_path = (dir / "partial.csv").string();
    std::ofstream(plan.output_path) << prefix;

    const auto resumed = run_sweep(plan);
    REQUIRE(resumed.size() == full.size());
    for (std::size_t i = 0; i < full.size(); ++i) {
        CHECK(resumed[i].same_data(full[i]));
    }
    CHECK(mask_wall_time(read_file(plan.output_path)) ==
          mask_wall_time(read_file((dir / "full.csv").string())));
}

TEST_CASE("unwritable output paths fail up front") {
    SweepPlan plan;
    plan.gamma_grid = {2.5};
    plan.n_grid = {50};
    plan.replications = 1;
    plan.output_path = "experiment_artifacts/no_such_dir/sweep.csv";
    CHECK_THROWS_AS(run_sweep(plan), std::runtime_error);
}

TEST_CASE("trial CSV readers reject malformed files") {
    const fs::path dir = fresh_dir("badcsv");
    CHECK_THROWS_AS(read_trial_csv((dir / "missing.csv").string()),
                    std::runtime_error);
    const std::string bad_header = (dir / "bad.csv").string();
    std::ofstream(bad_header) << "not,the,header\n";
    CHECK_THROWS_AS(read_trial_csv(bad_header), std::runtime_error);
}

TEST_CASE("fitting an exact power law recovers it") {
    std::vector<TrialRecord> records;
    for (std::uint64_t n : {1000ULL, 10000ULL, 100000ULL}) {
        for (int rep = 0; rep < 2; ++rep) {
            TrialRecord r;
            r.gamma = 2.5;
            r.n = n;
            r.erased_fraction = 0.8 * std::pow(static_cast<double>(n), -0.5);
            records.push_back(r);
        }
    }
    const FitResult fit = fit_exponent(records);
    CHECK(fit.gamma == 2.5);
    CHECK(fit.fitted_slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(fit.slope_stderr <= 1e-10);
    CHECK(fit.intercept == doctest::Approx(std::log(0.8)).epsilon(1e-9));
    CHECK(fit.theoretical_slope == -1.0);
    CHECK(fit.points_used == 3);
}

TEST_CASE("zero-mean levels are dropped and starving fits fail") {
    std::vector<TrialRecord> records;
    for (std::uint64_t n : {10ULL, 100ULL, 1000ULL, 10000ULL}) {
        TrialRecord r;
        r.gamma = 2.0;
        r.n = n;
        r.erased_fraction =
            n == 10 ? 0.0 : std::pow(static_cast<double>(n), -1.0);
        records.push_back(r);
    }
    const FitResult fit = fit_exponent(records);
    CHECK(fit.points_used == 3);
    CHECK(fit.fitted_slope == doctest::Approx(-1.0).epsilon(1e-12));

    for (auto& r : records) r.erased_fraction = 0.0;
    CHECK_THROWS_AS(fit_exponent(records), std::invalid_argument);

    std::vector<TrialRecord> mixed = records;
    mixed[0].gamma = 1.5;
    CHECK_THROWS_AS(fit_exponent(mixed), std::invalid_argument);
    CHECK_THROWS_AS(fit_exponent({}), std::invalid_argument);
}

TEST_CASE("fit JSON carries the exact field names") {
    const fs::path dir = fresh_dir("fitjson");
    FitResult f;
    f.gamma = 2.5;
    f.fitted_slope = -1.01;
    f.slope_stderr = 0.05;
    f.theoretical_slope = -1.0;
    f.intercept = 1.25;
    f.points_used = 4;
    const std::string path = (dir / "fits.json").string();
    write_fit_json(path, {f});
    const std::string text = read_file(path);
    for (const char* name :
         {"\"gamma\"", "\"fitted_slope\"", "\"slope_stderr\"",
          "\"theoretical_slope\"", "\"intercept\"", "\"points_used\""}) {
        CHECK(text.find(name) != std::string::npos);
    }
    CHECK(text.find("-1.01") != std::string::npos);
}

TEST_CASE("plot data has the two-column layout with a reference block") {
    const fs::path dir = fresh_dir("plot");
    std::vector<TrialRecord> records;
    for (std::uint64_t n : {100ULL, 1000ULL, 10000ULL}) {
        TrialRecord r;
        r.gamma = 3.0;
        r.n = n;
        r.erased_fraction = 10.0 / static_cast<double>(n);
        records.push_back(r);
    }
    const std::string path = (dir / "plot.dat").string();
    write_plot_data(path, records);

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line.front() == '#');
    std::getline(in, line);
    std::istringstream row(line);
    double x = 0.0, y = 0.0;
    row >> x >> y;
    CHECK(x == doctest::Approx(2.0).epsilon(1e-12));   // log10(100)
    CHECK(y == doctest::Approx(-1.0).epsilon(1e-12));  // log10(0.1)
    int blanks = 0, data_rows = 1;
    while (std::getline(in, line)) {
        if (line.empty()) {
            ++blanks;
        } else if (line.front() != '#') {
            ++data_rows;
        }
    }
    CHECK(blanks == 1);
    CHECK(data_rows == 5);  // three data points plus a two-point reference line
}

TEST_CASE("gamma well above two erases a bounded number of edges") {
    long double total = 0.0L;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        const TrialRecord r = run_trial(3.0, 100000, 1, derive_seed(9, 3.0, 100000, rep));
        total += static_cast<double>(r.total_erased);
    }
    CHECK(static_cast<double>(total) / 100.0 < 50.0);
}
