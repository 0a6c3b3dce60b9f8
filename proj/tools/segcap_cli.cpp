// Command-line front end. Subcommands:
//
//   bounds     closed-form bounds at one parameter point
//   capacity   Blahut-Arimoto run with its convergence bracket
//   figures    regenerate the CSV behind the four figures
//   simulate   seeded Monte Carlo of the segmented channel
//   constants  the asymptotic constants K, K1, K2
//   sweep      generic grid sweep over (ell, p, q)
//
// Output is CSV (default) or newline-delimited JSON via --format json, one
// object per row with the same field names as the CSV header. Reals are
// printed with 12 significant digits so reruns are byte-identical.
//
// Exit codes: 0 success, 2 usage or parameter error, 3 non-convergence.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "segcap/segcap.hpp"

namespace {

using segcap::ChannelParams;

std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// One output row; fields keep insertion order in both formats.
struct Row {
    std::vector<std::pair<std::string, std::string>> cells;
    nlohmann::ordered_json object;

    Row& num(const std::string& name, double v) {
        cells.emplace_back(name, fmt12(v));
        object[name] = v;
        return *this;
    }
    Row& integer(const std::string& name, long long v) {
        cells.emplace_back(name, std::to_string(v));
        object[name] = v;
        return *this;
    }
    Row& boolean(const std::string& name, bool v) {
        cells.emplace_back(name, v ? "1" : "0");
        object[name] = v;
        return *this;
    }
};

class TableWriter {
  public:
    TableWriter(std::ostream& os, std::string format) : os_(os), format_(std::move(format)) {}

    void write(const Row& row) {
        if (format_ == "json") {
            os_ << row.object.dump() << "\n";
            return;
        }
        if (!header_written_) {
            for (std::size_t i = 0; i < row.cells.size(); ++i)
                os_ << (i ? "," : "") << row.cells[i].first;
            os_ << "\n";
            header_written_ = true;
        }
        for (std::size_t i = 0; i < row.cells.size(); ++i)
            os_ << (i ? "," : "") << row.cells[i].second;
        os_ << "\n";
    }

  private:
    std::ostream& os_;
    std::string format_;
    bool header_written_ = false;
};

enum class AlphaMode { fixed, optimize, uniform };

struct BoundsArgs {
    int ell = 2;
    double p = 0.0, q = 0.0;
    double alpha = 0.5;
    bool optimize = false, uniform = false;
    std::string format = "csv";
};

int run_bounds(const BoundsArgs& a) {
    const ChannelParams params{a.ell, a.p, a.q};
    double alpha = a.alpha;
    if (a.uniform) alpha = 0.5;
    if (a.optimize) alpha = segcap::optimize_alpha(params).alpha;
    const segcap::BoundsReport r = segcap::evaluate_bounds(params, alpha);
    TableWriter out(std::cout, a.format);
    Row row;
    row.integer("ell", r.params.ell)
        .num("p", r.params.p)
        .num("q", r.params.q)
        .num("alpha", r.alpha)
        .num("l_si_alpha", r.l_si_alpha)
        .num("l_si_uniform", r.l_si_uniform)
        .num("upper_u", r.upper_u)
        .num("l_no_si", r.l_no_si)
        .num("hb_pq", r.hb_pq)
        .boolean("enumeration_fallback", r.enumeration_fallback);
    out.write(row);
    return 0;
}

struct CapacityArgs {
    int ell = 2;
    double p = 0.0, q = 0.0;
    double tol = 1e-6;
    long max_iter = 100000;
    std::string format = "csv";
};

int run_capacity(const CapacityArgs& a) {
    const ChannelParams params{a.ell, a.p, a.q};
    const segcap::BASolution s = segcap::blahut_arimoto(params, a.tol, a.max_iter);
    TableWriter out(std::cout, a.format);
    Row row;
    row.integer("ell", a.ell)
        .num("p", a.p)
        .num("q", a.q)
        .num("tol", a.tol)
        .num("capacity_bits_per_symbol", s.capacity_bits_per_symbol)
        .integer("iterations", s.iterations)
        .num("lower_gap", s.lower_gap)
        .num("upper_gap", s.upper_gap)
        .boolean("converged", s.converged);
    out.write(row);
    if (!s.converged) {
        std::fprintf(stderr, "warning: bracket width above tol after %ld iterations\n",
                     s.iterations);
        return 3;
    }
    return 0;
}

struct FiguresArgs {
    int fig = 1;
    std::string out_dir;
    double grid_step = 0.05;
    double ba_tol = 1e-6;
    double max_pq = 1.0;
    int ell_min = 2, ell_max = 8;
    int jobs = 0;
};

int run_figures(const FiguresArgs& a) {
    namespace fs = std::filesystem;
    fs::create_directories(a.out_dir);
    int warnings = 0;

    if (a.fig == 1) {
        std::ofstream os(fs::path(a.out_dir) / "fig1.csv");
        TableWriter out(os, "csv");
        for (int ell = a.ell_min; ell <= a.ell_max; ++ell) {
            const segcap::GapReport r =
                segcap::relative_gaps(ell, a.grid_step, a.ba_tol, a.max_pq,
                                      segcap::kDefaultEnumerationCap, a.jobs);
            warnings += r.non_converged;
            Row row;
            row.integer("ell", r.ell)
                .num("delta_u_percent", r.delta_u_percent)
                .num("delta_l_percent", r.delta_l_percent);
            out.write(row);
        }
    } else if (a.fig == 2) {
        std::ofstream os(fs::path(a.out_dir) / "fig2.csv");
        TableWriter out(os, "csv");
        for (int ell : {2, 4, 8}) {
            for (int i = 1; i <= 10; ++i) {
                const double q = 0.05 * i;
                const double d = segcap::uniform_vs_optimized_gap(ell, q, a.grid_step);
                Row row;
                row.integer("ell", ell).num("q", q).num("delta_lsi_percent", 100.0 * d);
                out.write(row);
            }
        }
    } else {  // figs 3 and 4 share one file: q = 0 curves for ell = 8 and ell = 2
        const int steps = static_cast<int>(std::round(1.0 / a.grid_step));
        struct Point {
            int ell;
            double p, u, lopt, luni, csi;
            bool ok;
        };
        std::vector<Point> pts;
        for (int ell : {8, 2})
            for (int i = 0; i <= steps; ++i)
                pts.push_back({ell, std::min(i * a.grid_step, 1.0), 0, 0, 0, 0, true});
        segcap::parallel_for(pts.size(), a.jobs, [&](std::size_t i) {
            Point& pt = pts[i];
            const ChannelParams params{pt.ell, pt.p, 0.0};
            pt.u = segcap::upper_bound_u(params);
            pt.lopt = segcap::optimize_alpha(params).value;
            pt.luni = segcap::lower_bound_uniform(params);
            const segcap::BASolution s = segcap::blahut_arimoto(params, a.ba_tol);
            pt.csi = s.capacity_bits_per_symbol;
            pt.ok = s.converged;
        });
        std::ofstream os(fs::path(a.out_dir) / "fig34.csv");
        TableWriter out(os, "csv");
        for (const Point& pt : pts) {
            if (!pt.ok) ++warnings;
            Row row;
            row.integer("ell", pt.ell)
                .num("p", pt.p)
                .num("upper_u", pt.u)
                .num("l_opt", pt.lopt)
                .num("l_uniform", pt.luni)
                .num("c_si", pt.csi);
            out.write(row);
        }
    }
    if (warnings > 0)
        std::fprintf(stderr, "warning: %d grid point(s) did not reach the bracket tolerance\n",
                     warnings);
    return 0;
}

struct SimulateArgs {
    int ell = 4;
    double p = 0.0, q = 0.0;
    long blocks = 1000;
    std::uint64_t seed = 0;
    bool check_law = false;
    std::string format = "csv";
};

int run_simulate(const SimulateArgs& a) {
    const ChannelParams params{a.ell, a.p, a.q};
    if (a.blocks < 1) throw std::domain_error("simulate: blocks must be >= 1");
    const auto blocks = segcap::uniform_random_blocks(a.ell, static_cast<std::size_t>(a.blocks),
                                                      a.seed);
    const segcap::SampleResult res = segcap::sample_segmented(params, blocks, a.seed);
    long long tally[3] = {0, 0, 0};  // deletion, unchanged, duplication
    for (std::int8_t e : res.pattern) ++tally[e + 1];

    Row row;
    row.integer("ell", a.ell)
        .num("p", a.p)
        .num("q", a.q)
        .integer("blocks", a.blocks)
        .integer("seed", static_cast<long long>(a.seed))
        .integer("output_length", static_cast<long long>(res.output.size()))
        .integer("deletions", tally[0])
        .integer("unchanged", tally[1])
        .integer("duplications", tally[2]);

    if (a.check_law) {
        // per-block empirical output frequencies against the exact law under
        // uniform inputs, in binomial standard errors; only outputs with
        // expected count >= 20 enter the maximum
        const segcap::Distribution exact =
            segcap::output_distribution(params, segcap::uniform_input_distribution(a.ell));
        std::unordered_map<std::uint64_t, long long> counts;
        std::size_t at = 0;
        for (std::size_t i = 0; i < res.pattern.size(); ++i) {
            const std::size_t len = static_cast<std::size_t>(a.ell + res.pattern[i]);
            segcap::BinaryWord w;
            w.bits.assign(res.output.bits.begin() + at, res.output.bits.begin() + at + len);
            at += len;
            ++counts[segcap::detail::word_key(segcap::pack(w))];
        }
        double max_dev = 0.0;
        long long checked = 0;
        const double n = static_cast<double>(a.blocks);
        for (std::size_t i = 0; i < exact.size(); ++i) {
            const double expect = n * exact.mass[i];
            if (expect < 20.0) continue;
            ++checked;
            const auto it = counts.find(segcap::detail::word_key(exact.support[i]));
            const double got = it == counts.end() ? 0.0 : static_cast<double>(it->second);
            const double se = std::sqrt(n * exact.mass[i] * (1.0 - exact.mass[i]));
            max_dev = std::max(max_dev, std::abs(got - expect) / se);
        }
        row.num("max_dev_sigma", max_dev).integer("checked_outputs", checked);
    }

    TableWriter out(std::cout, a.format);
    out.write(row);
    return 0;
}

struct ConstantsArgs {
    double tol = 1e-12;
    std::string format = "csv";
};

int run_constants(const ConstantsArgs& a) {
    const double k = segcap::constant_k(a.tol);
    const double k1 = 1.0 + std::log2(std::exp(1.0)) - k;
    TableWriter out(std::cout, a.format);
    Row row;
    row.num("k", k).num("k1", k1).num("k2", 2.0 - k1);
    out.write(row);
    return 0;
}

struct SweepArgs {
    std::vector<int> ells;
    double p_start = 0.0, p_stop = 1.0, p_step = 0.05;
    double q_start = 0.0, q_stop = 0.0, q_step = 0.05;
    std::string alpha_mode = "uniform";
    double alpha = 0.5;
    bool ba = false;
    double ba_tol = 1e-6;
    std::string format = "csv";
    std::string out_path;
    std::uint64_t seed = 0;  // accepted for interface stability; sweeps are deterministic
    int jobs = 0;
};

int run_sweep(const SweepArgs& a) {
    auto check_range = [](double start, double stop, double step, const char* name) {
        if (!(step > 0.0) || start < 0.0 || stop > 1.0 || stop < start)
            throw std::domain_error(std::string("sweep: invalid ") + name + " range");
    };
    check_range(a.p_start, a.p_stop, a.p_step, "p");
    check_range(a.q_start, a.q_stop, a.q_step, "q");
    if (a.ells.empty()) throw std::domain_error("sweep: need at least one --ell");
    AlphaMode mode;
    if (a.alpha_mode == "fixed")
        mode = AlphaMode::fixed;
    else if (a.alpha_mode == "optimize")
        mode = AlphaMode::optimize;
    else if (a.alpha_mode == "uniform")
        mode = AlphaMode::uniform;
    else
        throw std::domain_error("sweep: alpha mode must be fixed, optimize or uniform");

    auto axis = [](double start, double stop, double step) {
        std::vector<double> v;
        for (int i = 0;; ++i) {
            const double x = start + i * step;
            if (x > stop + 1e-12) break;
            v.push_back(std::min(x, stop));
        }
        return v;
    };
    const std::vector<double> ps = axis(a.p_start, a.p_stop, a.p_step);
    const std::vector<double> qs = axis(a.q_start, a.q_stop, a.q_step);

    struct Point {
        int ell;
        double p, q;
        double alpha = 0.0, lsi = 0.0, luni = 0.0, u = 0.0, lno = 0.0;
        double csi = 0.0, blo = 0.0, bhi = 0.0;
        bool conv = true;
    };
    std::vector<Point> pts;
    for (int ell : a.ells)
        for (double p : ps)
            for (double q : qs)
                if (p + q <= 1.0 + 1e-9) pts.push_back({ell, p, q});

    int non_converged = 0;
    segcap::parallel_for(pts.size(), a.jobs, [&](std::size_t i) {
        Point& pt = pts[i];
        const ChannelParams params{pt.ell, pt.p, pt.q};
        switch (mode) {
            case AlphaMode::fixed:
                pt.alpha = a.alpha;
                pt.lsi = segcap::lower_bound_markov(params, a.alpha);
                break;
            case AlphaMode::optimize: {
                const segcap::AlphaOptimum opt = segcap::optimize_alpha(params);
                pt.alpha = opt.alpha;
                pt.lsi = opt.value;
                break;
            }
            case AlphaMode::uniform:
                pt.alpha = 0.5;
                pt.lsi = segcap::lower_bound_uniform(params);
                break;
        }
        pt.luni = segcap::lower_bound_uniform(params);
        pt.u = segcap::upper_bound_u(params);
        pt.lno = pt.lsi - segcap::entropy_hb(pt.p, pt.q) / pt.ell;
        if (a.ba) {
            const segcap::BASolution s = segcap::blahut_arimoto(params, a.ba_tol);
            pt.csi = s.capacity_bits_per_symbol;
            pt.blo = s.lower_gap;
            pt.bhi = s.upper_gap;
            pt.conv = s.converged;
        }
    });

    std::ofstream file;
    if (!a.out_path.empty()) {
        file.open(a.out_path);
        if (!file) throw std::domain_error("sweep: cannot open output path");
    }
    TableWriter out(a.out_path.empty() ? std::cout : file, a.format);
    for (const Point& pt : pts) {
        if (!pt.conv) ++non_converged;
        Row row;
        row.integer("ell", pt.ell)
            .num("p", pt.p)
            .num("q", pt.q)
            .num("alpha", pt.alpha)
            .num("l_si_alpha", pt.lsi)
            .num("l_si_uniform", pt.luni)
            .num("upper_u", pt.u)
            .num("l_no_si", pt.lno);
        if (a.ba) {
            row.num("c_si", pt.csi)
                .num("ba_lower_gap", pt.blo)
                .num("ba_upper_gap", pt.bhi)
                .boolean("ba_converged", pt.conv);
        }
        out.write(row);
    }
    if (non_converged > 0)
        std::fprintf(stderr, "warning: %d grid point(s) did not reach the bracket tolerance\n",
                     non_converged);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bounds, capacity and simulation toolkit for the segmented one-bit "
                 "deletion/duplication channel"};
    app.require_subcommand(1);

    BoundsArgs ba;
    CLI::App* bounds = app.add_subcommand("bounds", "closed-form bounds at one point");
    bounds->add_option("--ell", ba.ell, "block length")->required();
    bounds->add_option("--p", ba.p, "deletion probability")->required();
    bounds->add_option("--q", ba.q, "duplication probability")->required();
    auto* amode = bounds->add_option_group("alpha", "input distribution choice");
    amode->add_option("--alpha", ba.alpha, "fixed Markov transition probability");
    amode->add_flag("--optimize-alpha", ba.optimize, "maximize over alpha");
    amode->add_flag("--uniform", ba.uniform, "alpha = 1/2 (uniform input)");
    amode->require_option(1);
    bounds->add_option("--format", ba.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    CapacityArgs ca;
    CLI::App* capacity = app.add_subcommand("capacity", "Blahut-Arimoto with bracket");
    capacity->add_option("--ell", ca.ell, "block length")->required();
    capacity->add_option("--p", ca.p, "deletion probability")->required();
    capacity->add_option("--q", ca.q, "duplication probability")->required();
    capacity->add_option("--tol", ca.tol, "bracket width target, unnormalized bits");
    capacity->add_option("--max-iter", ca.max_iter, "iteration cap");
    capacity->add_option("--format", ca.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    FiguresArgs fa;
    CLI::App* figures = app.add_subcommand("figures", "regenerate figure CSV data");
    figures->add_option("--fig", fa.fig, "figure number")->required()->check(CLI::Range(1, 4));
    figures->add_option("--out", fa.out_dir, "output directory")->required();
    figures->add_option("--grid-step", fa.grid_step, "parameter grid step");
    figures->add_option("--ba-tol", fa.ba_tol, "Blahut-Arimoto bracket tolerance");
    figures->add_option("--max-pq", fa.max_pq, "restrict the fig 1 grid to p + q <= this");
    figures->add_option("--ell-min", fa.ell_min, "first block length for fig 1");
    figures->add_option("--ell-max", fa.ell_max, "last block length for fig 1");
    figures->add_option("--jobs", fa.jobs, "worker threads (0 = hardware)");

    SimulateArgs sa;
    CLI::App* simulate = app.add_subcommand("simulate", "seeded Monte Carlo run");
    simulate->add_option("--ell", sa.ell, "block length")->required();
    simulate->add_option("--p", sa.p, "deletion probability")->required();
    simulate->add_option("--q", sa.q, "duplication probability")->required();
    simulate->add_option("--blocks", sa.blocks, "number of blocks")->required();
    simulate->add_option("--seed", sa.seed, "RNG seed");
    simulate->add_flag("--check-law", sa.check_law,
                       "compare empirical output frequencies with the exact law");
    simulate->add_option("--format", sa.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    ConstantsArgs na;
    CLI::App* constants = app.add_subcommand("constants", "asymptotic constants");
    constants->add_option("--tol", na.tol, "certified tail bound for K");
    constants->add_option("--format", na.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    SweepArgs wa;
    CLI::App* sweep = app.add_subcommand("sweep", "grid sweep over (ell, p, q)");
    sweep->add_option("--ell", wa.ells, "block lengths")->required();
    sweep->add_option("--p-start", wa.p_start, "p range start");
    sweep->add_option("--p-stop", wa.p_stop, "p range stop");
    sweep->add_option("--p-step", wa.p_step, "p range step");
    sweep->add_option("--q-start", wa.q_start, "q range start");
    sweep->add_option("--q-stop", wa.q_stop, "q range stop");
    sweep->add_option("--q-step", wa.q_step, "q range step");
    sweep->add_option("--alpha-mode", wa.alpha_mode, "fixed, optimize or uniform")
        ->check(CLI::IsMember({"fixed", "optimize", "uniform"}));
    sweep->add_option("--alpha", wa.alpha, "alpha for --alpha-mode fixed");
    sweep->add_flag("--ba", wa.ba, "also run Blahut-Arimoto per point");
    sweep->add_option("--ba-tol", wa.ba_tol, "Blahut-Arimoto bracket tolerance");
    sweep->add_option("--format", wa.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sweep->add_option("--out", wa.out_path, "output file (default stdout)");
    sweep->add_option("--seed", wa.seed, "reserved; sweeps are deterministic");
    sweep->add_option("--jobs", wa.jobs, "worker threads (0 = hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (bounds->parsed()) return run_bounds(ba);
        if (capacity->parsed()) return run_capacity(ca);
        if (figures->parsed()) return run_figures(fa);
        if (simulate->parsed()) return run_simulate(sa);
        if (constants->parsed()) return run_constants(na);
        if (sweep->parsed()) return run_sweep(wa);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
