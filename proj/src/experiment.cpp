#include "ecm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ecm/cm_core.hpp"
#include "ecm/format.hpp"
#include "ecm/rng.hpp"

namespace ecm {

void SweepPlan::validate() const {
    if (gamma_grid.empty()) throw std::invalid_argument("SweepPlan: empty gamma_grid");
    for (double g : gamma_grid) {
        if (!(g > 1.0)) throw std::invalid_argument("SweepPlan: gamma must be > 1");
    }
    if (n_grid.empty()) throw std::invalid_argument("SweepPlan: empty n_grid");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 2) throw std::invalid_argument("SweepPlan: n must be >= 2");
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
            throw std::invalid_argument("SweepPlan: n_grid must be strictly increasing");
        }
    }
    if (replications < 1) throw std::invalid_argument("SweepPlan: replications must be >= 1");
    if (k_min < 1) throw std::invalid_argument("SweepPlan: k_min must be >= 1");
}

std::vector<double> default_gamma_grid() {
    return {1.1, 1.2, 1.35, 1.5, 1.7, 1.9, 2.0, 2.5, 3.0};
}

std::vector<std::uint64_t> default_n_grid() {
    return {1000, 10000, 100000, 1000000};
}

bool TrialRecord::same_data(const TrialRecord& o) const {
    return gamma == o.gamma && n == o.n &&
           replication_index == o.replication_index && seed == o.seed &&
           L_n == o.L_n && sum_squares == o.sum_squares &&
           self_loops == o.self_loops &&
           excess_multiplicity == o.excess_multiplicity &&
           total_erased == o.total_erased &&
           erased_fraction == o.erased_fraction &&
           lemma1_bound == o.lemma1_bound &&
           pairwise_exp_term == o.pairwise_exp_term;
}

std::string trial_to_csv(const TrialRecord& r) {
    std::string line;
    line.reserve(160);
    line += format_double(r.gamma);
    line += ',';
    line += std::to_string(r.n);
    line += ',';
    line += std::to_string(r.replication_index);
    line += ',';
    line += std::to_string(r.seed);
    line += ',';
    line += std::to_string(r.L_n);
    line += ',';
    line += std::to_string(r.sum_squares);
    line += ',';
    line += std::to_string(r.self_loops);
    line += ',';
    line += std::to_string(r.excess_multiplicity);
    line += ',';
    line += std::to_string(r.total_erased);
    line += ',';
    line += format_double(r.erased_fraction);
    line += ',';
    line += format_double(r.lemma1_bound);
    line += ',';
    line += format_double(r.pairwise_exp_term);
    line += ',';
    line += format_double(r.wall_time_ms);
    return line;
}

TrialRecord trial_from_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (fields.size() != 13) {
        throw std::runtime_error("trial_from_csv: expected 13 fields, got " +
                                 std::to_string(fields.size()));
    }
    TrialRecord r;
    r.gamma = parse_double(fields[0]);
    r.n = parse_u64(fields[1]);
    r.replication_index = parse_u64(fields[2]);
    r.seed = parse_u64(fields[3]);
    r.L_n = parse_u64(fields[4]);
    r.sum_squares = parse_u64(fields[5]);
    r.self_loops = parse_u64(fields[6]);
    r.excess_multiplicity = parse_u64(fields[7]);
    r.total_erased = parse_u64(fields[8]);
    r.erased_fraction = parse_double(fields[9]);
    r.lemma1_bound = parse_double(fields[10]);
    r.pairwise_exp_term = parse_double(fields[11]);
    r.wall_time_ms = parse_double(fields[12]);
    return r;
}

TrialRecord run_trial(double gamma, std::uint64_t n, std::uint64_t k_min,
                      std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("run_trial: n must be >= 2");
    const auto start = std::chrono::steady_clock::now();
    const DegreeDistribution dist(gamma, k_min);
    RandomStream rng(seed);
    const DegreeSequence seq = sample_sequence(n, dist, rng);
    const Multigraph mg = pair_stubs(seq, rng);
    const auto [graph, stats] = erase_graph(mg);
    (void)graph;
    TrialRecord rec;
    rec.gamma = gamma;
    rec.n = n;
    rec.seed = seed;
    rec.L_n = seq.sum_degrees;
    rec.sum_squares = seq.sum_squares;
    rec.self_loops = stats.self_loop_count;
    rec.excess_multiplicity = stats.excess_multiplicity;
    rec.total_erased = stats.total_erased;
    rec.erased_fraction = stats.erased_fraction;
    rec.lemma1_bound = bound_lemma1(seq);
    rec.pairwise_exp_term =
        pairwise_exp_sum(seq, static_cast<double>(seq.sum_degrees));
    rec.wall_time_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    return rec;
}

namespace {

struct TrialKey {
    std::uint64_t gamma_bits;
    std::uint64_t n;
    std::uint64_t rep;
    auto operator<=>(const TrialKey&) const = default;
};

TrialKey key_of(double gamma, std::uint64_t n, std::uint64_t rep) {
    return {std::bit_cast<std::uint64_t>(gamma), n, rep};
}

}  // namespace

std::vector<TrialRecord> run_sweep(const SweepPlan& plan) {
    plan.validate();

    struct WorkItem {
        double gamma;
        std::uint64_t n;
        std::uint64_t rep;
    };
    std::vector<WorkItem> items;
    for (double g : plan.gamma_grid) {
        for (std::uint64_t n : plan.n_grid) {
            for (std::uint64_t r = 0; r < plan.replications; ++r) {
                items.push_back({g, n, r});
            }
        }
    }

    // Resume support: reuse complete records already present in the output.
    std::map<TrialKey, TrialRecord> existing;
    const bool streaming = !plan.output_path.empty();
    bool fresh_file = true;
    if (streaming && std::filesystem::exists(plan.output_path)) {
        for (const auto& rec : read_trial_csv(plan.output_path)) {
            existing.emplace(key_of(rec.gamma, rec.n, rec.replication_index), rec);
        }
        fresh_file = existing.empty();
    }

    std::ofstream out;
    if (streaming) {
        out.open(plan.output_path, std::ios::app);
        if (!out) {
            throw std::runtime_error("run_sweep: cannot open output " +
                                     plan.output_path);
        }
        if (fresh_file) out << trial_csv_header << "\n" << std::flush;
    }

    std::vector<std::optional<TrialRecord>> results(items.size());
    std::vector<char> reused(items.size(), 0);
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto it = existing.find(key_of(items[i].gamma, items[i].n, items[i].rep));
        if (it != existing.end()) {
            results[i] = it->second;
            reused[i] = 1;
        } else {
            pending.push_back(i);
        }
    }

    unsigned workers = plan.threads != 0 ? plan.threads
                                         : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = static_cast<unsigned>(
        std::min<std::size_t>(workers, std::max<std::size_t>(pending.size(), 1)));

    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next_pending{0};
    std::size_t done_count = 0;
    std::exception_ptr failure;

    auto worker = [&]() {
        for (;;) {
            const std::size_t p = next_pending.fetch_add(1);
            if (p >= pending.size()) return;
            const std::size_t idx = pending[p];
            const auto& item = items[idx];
            try {
                const std::uint64_t seed =
                    derive_seed(plan.master_seed, item.gamma, item.n, item.rep);
                TrialRecord rec = run_trial(item.gamma, item.n, plan.k_min, seed);
                rec.replication_index = item.rep;
                std::lock_guard<std::mutex> lock(mu);
                results[idx] = std::move(rec);
                ++done_count;
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!failure) failure = std::current_exception();
                ++done_count;
            }
            cv.notify_all();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);

    // Commit records to the file strictly in canonical order so an
    // uninterrupted sweep always produces the same bytes.
    {
        std::unique_lock<std::mutex> lock(mu);
        std::size_t write_cursor = 0;
        std::size_t last_done = 0;
        while (write_cursor < items.size()) {
            cv.wait(lock, [&] {
                return failure || done_count > last_done ||
                       (results[write_cursor].has_value());
            });
            if (failure) break;
            last_done = done_count;
            while (write_cursor < items.size() && results[write_cursor]) {
                if (streaming && !reused[write_cursor]) {
                    out << trial_to_csv(*results[write_cursor]) << "\n" << std::flush;
                }
                ++write_cursor;
            }
        }
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    if (streaming && !out) {
        throw std::runtime_error("run_sweep: write failed for " + plan.output_path);
    }

    std::vector<TrialRecord> records;
    records.reserve(items.size());
    for (auto& r : results) records.push_back(std::move(*r));
    return records;
}

std::vector<TrialRecord> read_trial_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_trial_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("read_trial_csv: empty file " + path);
    }
    if (line != trial_csv_header) {
        throw std::runtime_error("read_trial_csv: unexpected header in " + path);
    }
    std::vector<TrialRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        records.push_back(trial_from_csv(line));
    }
    return records;
}

FitResult fit_exponent(const std::vector<TrialRecord>& records) {
    if (records.empty()) throw std::invalid_argument("fit_exponent: no records");
    const double gamma = records.front().gamma;
    std::map<std::uint64_t, std::pair<double, std::uint64_t>> by_n;
    for (const auto& r : records) {
        if (r.gamma != gamma) {
            throw std::invalid_argument("fit_exponent: records mix gamma values");
        }
        auto& [sum, count] = by_n[r.n];
        sum += r.erased_fraction;
        count += 1;
    }
    std::vector<double> log_n, log_mean;
    for (const auto& [n, agg] : by_n) {
        const double mean = agg.first / static_cast<double>(agg.second);
        if (mean <= 0.0) {
            std::cerr << "fit_exponent: dropping n=" << n
                      << " (mean erased fraction is 0)\n";
            continue;
        }
        log_n.push_back(std::log(static_cast<double>(n)));
        log_mean.push_back(std::log(mean));
    }
    if (log_n.size() < 3) {
        throw std::invalid_argument(
            "fit_exponent: need >= 3 n-levels with nonzero mean erased fraction");
    }
    const OlsFit ols = ols_fit(log_n, log_mean);
    FitResult fit;
    fit.gamma = gamma;
    fit.fitted_slope = ols.slope;
    fit.slope_stderr = ols.slope_stderr;
    fit.theoretical_slope = theoretical_exponent(gamma);
    fit.intercept = ols.intercept;
    fit.points_used = static_cast<int>(log_n.size());
    return fit;
}

void write_fit_json(const std::string& path, const std::vector<FitResult>& fits) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_fit_json: cannot open " + path);
    out << "[\n";
    for (std::size_t i = 0; i < fits.size(); ++i) {
        const auto& f = fits[i];
        out << "  {\"gamma\": " << format_double(f.gamma)
            << ", \"fitted_slope\": " << format_double(f.fitted_slope)
            << ", \"slope_stderr\": " << format_double(f.slope_stderr)
            << ", \"theoretical_slope\": " << format_double(f.theoretical_slope)
            << ", \"intercept\": " << format_double(f.intercept)
            << ", \"points_used\": " << f.points_used << "}"
            << (i + 1 < fits.size() ? ",\n" : "\n");
    }
    out << "]\n";
    if (!out) throw std::runtime_error("write_fit_json: write failed for " + path);
}

void write_plot_data(const std::string& path,
                     const std::vector<TrialRecord>& records_for_gamma) {
    if (records_for_gamma.empty()) {
        throw std::invalid_argument("write_plot_data: no records");
    }
    const double gamma = records_for_gamma.front().gamma;
    std::map<std::uint64_t, std::pair<double, std::uint64_t>> by_n;
    for (const auto& r : records_for_gamma) {
        auto& [sum, count] = by_n[r.n];
        sum += r.erased_fraction;
        count += 1;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_plot_data: cannot open " + path);
    out << "# gamma=" << format_double(gamma)
        << " columns: log10(n) log10(mean_erased_fraction)\n";
    std::vector<std::pair<double, double>> points;
    for (const auto& [n, agg] : by_n) {
        const double mean = agg.first / static_cast<double>(agg.second);
        if (mean <= 0.0) continue;
        points.emplace_back(std::log10(static_cast<double>(n)), std::log10(mean));
    }
    for (const auto& [x, y] : points) {
        out << format_double(x) << " " << format_double(y) << "\n";
    }
    const double slope = theoretical_exponent(gamma);
    out << "\n# reference slope " << format_double(slope)
        << " anchored at the first point\n";
    if (!points.empty()) {
        const auto [x0, y0] = points.front();
        const auto [x1, y1] = points.back();
        out << format_double(x0) << " " << format_double(y0) << "\n";
        out << format_double(x1) << " "
            << format_double(y0 + slope * (x1 - x0)) << "\n";
    }
    if (!out) throw std::runtime_error("write_plot_data: write failed for " + path);
}

}  // namespace ecm
