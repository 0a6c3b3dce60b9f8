#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "segcap/bounds.hpp"
#include "segcap/channel.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int status;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(SEGCAP_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int rc = pclose(pipe);
    return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, out};
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        FAIL("missing column " << name);
        return 0;
    }
    double num(std::size_t row, const std::string& name) const {
        return std::stod(rows.at(row).at(col(name)));
    }
};

Table parse_csv(const std::string& text) {
    Table t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (first) {
            t.header = cells;
            first = false;
        } else {
            t.rows.push_back(cells);
        }
    }
    return t;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("bounds subcommand") {
    SECTION("noiseless uniform point") {
        const RunResult r = run_cli("bounds --ell 4 --p 0 --q 0 --uniform");
        REQUIRE(r.status == 0);
        const Table t = parse_csv(r.out);
        REQUIRE(t.header == std::vector<std::string>{"ell", "p", "q", "alpha", "l_si_alpha",
                                                     "l_si_uniform", "upper_u", "l_no_si",
                                                     "hb_pq", "enumeration_fallback"});
        REQUIRE(t.rows.size() == 1);
        REQUIRE(t.num(0, "l_si_uniform") == Catch::Approx(1.0).margin(1e-10));
        REQUIRE(t.num(0, "upper_u") == Catch::Approx(1.0).margin(1e-10));
        REQUIRE(t.num(0, "alpha") == 0.5);
    }

    SECTION("optimized alpha dominates uniform") {
        const RunResult r = run_cli("bounds --ell 8 --p 0.5 --q 0 --optimize-alpha");
        REQUIRE(r.status == 0);
        const Table t = parse_csv(r.out);
        REQUIRE(t.num(0, "l_si_alpha") >= t.num(0, "l_si_uniform") - 1e-12);
        REQUIRE(t.num(0, "l_si_alpha") <= t.num(0, "upper_u") + 1e-9);
    }

    SECTION("fixed alpha equals the in-process value") {
        const RunResult r = run_cli("bounds --ell 4 --p 0.3 --q 0.2 --alpha 0.3");
        REQUIRE(r.status == 0);
        const Table t = parse_csv(r.out);
        const segcap::ChannelParams params{4, 0.3, 0.2};
        const double mi = segcap::mutual_information_exact(
            params, segcap::markov_input_distribution(4, {0.3}));
        REQUIRE(t.num(0, "l_si_alpha") == Catch::Approx(mi / 4).margin(1e-9));
        REQUIRE(t.num(0, "l_no_si") ==
                Catch::Approx(t.num(0, "l_si_alpha") - t.num(0, "hb_pq") / 4).margin(1e-9));
    }

    SECTION("alpha choice is mandatory and exclusive") {
        REQUIRE(run_cli("bounds --ell 4 --p 0.1 --q 0").status == 2);
        REQUIRE(run_cli("bounds --ell 4 --p 0.1 --q 0 --uniform --alpha 0.3").status == 2);
    }
}

TEST_CASE("capacity subcommand") {
    SECTION("reference points") {
        const RunResult r = run_cli("capacity --ell 2 --p 1 --q 0");
        REQUIRE(r.status == 0);
        const Table t = parse_csv(r.out);
        REQUIRE(t.num(0, "capacity_bits_per_symbol") == Catch::Approx(0.5).margin(1e-5));
        REQUIRE(t.rows[0][t.col("converged")] == "1");

        const RunResult clean = run_cli("capacity --ell 4 --p 0 --q 0");
        REQUIRE(clean.status == 0);
        REQUIRE(parse_csv(clean.out).num(0, "capacity_bits_per_symbol") ==
                Catch::Approx(1.0).margin(1e-9));
    }

    SECTION("estimate sits inside the analytic bounds") {
        const RunResult r = run_cli("capacity --ell 8 --p 0.3 --q 0.1");
        REQUIRE(r.status == 0);
        const double c = parse_csv(r.out).num(0, "capacity_bits_per_symbol");
        const segcap::ChannelParams params{8, 0.3, 0.1};
        REQUIRE(c >= segcap::lower_bound_uniform(params) - 1e-6);
        REQUIRE(c <= segcap::upper_bound_u(params) + 1e-9);
    }

    SECTION("iteration cap signals non-convergence") {
        const RunResult r = run_cli("capacity --ell 4 --p 0.3 --q 0.2 --max-iter 1");
        REQUIRE(r.status == 3);
        const Table t = parse_csv(r.out);
        REQUIRE(t.rows[0][t.col("converged")] == "0");
    }
}

TEST_CASE("usage and parameter errors exit with 2") {
    REQUIRE(run_cli("bounds --ell 4 --p 0.7 --q 0.7 --uniform").status == 2);
    REQUIRE(run_cli("capacity --ell 2 --p 0.1").status == 2);
    REQUIRE(run_cli("bounds --ell 4 --p 0.1 --q 0 --uniform --bogus-flag").status == 2);
    REQUIRE(run_cli("").status == 2);
}

TEST_CASE("figures subcommand") {
    SECTION("gap survey file") {
        const fs::path dir = fresh_dir("segcap_test_fig1");
        const RunResult r = run_cli("figures --fig 1 --out " + dir.string() +
                                    " --ell-min 2 --ell-max 3 --grid-step 0.2 --max-pq 0.6");
        REQUIRE(r.status == 0);
        const Table t = parse_csv(slurp(dir / "fig1.csv"));
        REQUIRE(t.header == std::vector<std::string>{"ell", "delta_u_percent", "delta_l_percent"});
        REQUIRE(t.rows.size() == 2);
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            REQUIRE(t.num(i, "delta_u_percent") >= 0.0);
            REQUIRE(t.num(i, "delta_u_percent") <= 50.0);
            REQUIRE(t.num(i, "delta_l_percent") >= 0.0);
        }
        fs::remove_all(dir);
    }

    SECTION("Markov-optimization advantage file") {
        const fs::path dir = fresh_dir("segcap_test_fig2");
        const RunResult r =
            run_cli("figures --fig 2 --out " + dir.string() + " --grid-step 0.25");
        REQUIRE(r.status == 0);
        const Table t = parse_csv(slurp(dir / "fig2.csv"));
        REQUIRE(t.header == std::vector<std::string>{"ell", "q", "delta_lsi_percent"});
        REQUIRE(t.rows.size() == 30);
        REQUIRE(t.num(0, "ell") == 2.0);
        REQUIRE(t.num(0, "q") == Catch::Approx(0.05).margin(1e-12));
        REQUIRE(t.num(29, "ell") == 8.0);
        REQUIRE(t.num(29, "q") == Catch::Approx(0.5).margin(1e-12));
        for (std::size_t i = 0; i < t.rows.size(); ++i)
            REQUIRE(t.num(i, "delta_lsi_percent") >= 0.0);
        fs::remove_all(dir);
    }

    SECTION("deletion cross-section file and determinism") {
        const fs::path a = fresh_dir("segcap_test_fig34a");
        const fs::path b = fresh_dir("segcap_test_fig34b");
        REQUIRE(run_cli("figures --fig 4 --out " + a.string() + " --grid-step 0.5").status == 0);
        REQUIRE(run_cli("figures --fig 3 --out " + b.string() + " --grid-step 0.5").status == 0);
        const std::string ta = slurp(a / "fig34.csv");
        REQUIRE(ta == slurp(b / "fig34.csv"));  // figs 3 and 4 share one table

        const Table t = parse_csv(ta);
        REQUIRE(t.header ==
                std::vector<std::string>{"ell", "p", "upper_u", "l_opt", "l_uniform", "c_si"});
        REQUIRE(t.rows.size() == 6);
        for (std::size_t i = 0; i < 3; ++i) REQUIRE(t.num(i, "ell") == 8.0);
        for (std::size_t i = 3; i < 6; ++i) REQUIRE(t.num(i, "ell") == 2.0);
        for (std::size_t i = 0; i < 6; ++i) {
            REQUIRE(t.num(i, "upper_u") >= t.num(i, "l_opt") - 1e-9);
            REQUIRE(t.num(i, "l_opt") >= t.num(i, "l_uniform") - 1e-12);
            if (t.num(i, "p") == 0.0) {
                REQUIRE(t.num(i, "upper_u") == Catch::Approx(1.0).margin(1e-10));
                REQUIRE(t.num(i, "c_si") == Catch::Approx(1.0).margin(1e-5));
            }
        }
        fs::remove_all(a);
        fs::remove_all(b);
    }
}

TEST_CASE("simulate subcommand") {
    SECTION("noiseless run passes every block through") {
        const RunResult r = run_cli("simulate --ell 4 --p 0 --q 0 --blocks 1000 --seed 7");
        REQUIRE(r.status == 0);
        const Table t = parse_csv(r.out);
        REQUIRE(t.num(0, "deletions") == 0.0);
        REQUIRE(t.num(0, "duplications") == 0.0);
        REQUIRE(t.num(0, "unchanged") == 1000.0);
        REQUIRE(t.num(0, "output_length") == 4000.0);
    }

    SECTION("event tallies follow the law and the empirical check passes") {
        const RunResult r =
            run_cli("simulate --ell 4 --p 0.3 --q 0.2 --blocks 100000 --seed 1 --check-law");
        REQUIRE(r.status == 0);
        const Table t = parse_csv(r.out);
        const double n = 100000.0;
        REQUIRE(std::abs(t.num(0, "deletions") - 0.3 * n) <= 3.0 * std::sqrt(n * 0.3 * 0.7));
        REQUIRE(std::abs(t.num(0, "duplications") - 0.2 * n) <= 3.0 * std::sqrt(n * 0.2 * 0.8));
        REQUIRE(t.num(0, "output_length") ==
                4 * n - t.num(0, "deletions") + t.num(0, "duplications"));
        REQUIRE(t.num(0, "checked_outputs") == 54.0);
        REQUIRE(t.num(0, "max_dev_sigma") > 0.0);
        REQUIRE(t.num(0, "max_dev_sigma") <= 3.0);
    }

    SECTION("seed determinism") {
        const std::string cmd = "simulate --ell 3 --p 0.25 --q 0.35 --blocks 2000 --seed 11";
        const RunResult a = run_cli(cmd);
        const RunResult b = run_cli(cmd);
        REQUIRE(a.status == 0);
        REQUIRE(a.out == b.out);
        const RunResult c = run_cli("simulate --ell 3 --p 0.25 --q 0.35 --blocks 2000 --seed 12");
        REQUIRE(a.out != c.out);
    }
}

TEST_CASE("constants subcommand") {
    const RunResult r = run_cli("constants");
    REQUIRE(r.status == 0);
    const Table t = parse_csv(r.out);
    REQUIRE(t.header == std::vector<std::string>{"k", "k1", "k2"});
    REQUIRE(t.num(0, "k") == Catch::Approx(1.2885312757793879).margin(1e-9));
    REQUIRE(t.num(0, "k1") == Catch::Approx(1.1541637651095755).margin(1e-9));
    REQUIRE(t.num(0, "k2") == Catch::Approx(0.8458362348904245).margin(1e-9));
    REQUIRE(run_cli("constants --tol 1e-6").status == 0);
}

TEST_CASE("sweep subcommand") {
    SECTION("grid shape and bound ordering") {
        const RunResult r =
            run_cli("sweep --ell 2 --ell 3 --p-step 0.5 --q-stop 0.5 --q-step 0.5");
        REQUIRE(r.status == 0);
        const Table t = parse_csv(r.out);
        REQUIRE(t.header == std::vector<std::string>{"ell", "p", "q", "alpha", "l_si_alpha",
                                                     "l_si_uniform", "upper_u", "l_no_si"});
        REQUIRE(t.rows.size() == 10);  // (p,q) = (1,0.5) is outside the simplex
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            REQUIRE(t.num(i, "p") + t.num(i, "q") <= 1.0 + 1e-12);
            REQUIRE(t.num(i, "l_si_uniform") <= t.num(i, "upper_u") + 1e-9);
            REQUIRE(t.num(i, "l_no_si") <=
                    t.num(i, "l_si_alpha") + 1e-12);
        }
    }

    SECTION("blahut-arimoto columns") {
        const RunResult r = run_cli(
            "sweep --ell 2 --p-start 0.2 --p-stop 0.2 --p-step 1 --q-step 1 --ba --ba-tol 1e-7");
        REQUIRE(r.status == 0);
        const Table t = parse_csv(r.out);
        REQUIRE(t.rows.size() == 1);
        REQUIRE(t.rows[0][t.col("ba_converged")] == "1");
        const double c = t.num(0, "c_si");
        REQUIRE(c >= t.num(0, "l_si_uniform") - 1e-7);
        REQUIRE(c <= t.num(0, "upper_u") + 1e-9);
    }

    SECTION("output file and optimize mode") {
        const fs::path dir = fresh_dir("segcap_test_sweep");
        const fs::path out = dir / "sweep.csv";
        const RunResult r = run_cli("sweep --ell 4 --p-step 0.5 --alpha-mode optimize --out " +
                                    out.string());
        REQUIRE(r.status == 0);
        REQUIRE(r.out.empty());
        const Table t = parse_csv(slurp(out));
        REQUIRE(t.rows.size() == 3);
        for (std::size_t i = 0; i < t.rows.size(); ++i)
            REQUIRE(t.num(i, "l_si_alpha") >= t.num(i, "l_si_uniform") - 1e-12);
        fs::remove_all(dir);
    }
}

TEST_CASE("json output mode") {
    const RunResult r = run_cli("sweep --ell 2 --p-step 1 --format json");
    REQUIRE(r.status == 0);
    std::istringstream in(r.out);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        REQUIRE(j.is_object());
        REQUIRE(j.contains("ell"));
        REQUIRE(j.contains("p"));
        REQUIRE(j.contains("l_si_uniform"));
        REQUIRE(j.contains("upper_u"));
        REQUIRE(j["ell"].get<int>() == 2);
        ++rows;
    }
    REQUIRE(rows == 2);

    const RunResult c = run_cli("constants --format json");
    const nlohmann::json j = nlohmann::json::parse(c.out);
    REQUIRE(j["k"].get<double>() == Catch::Approx(1.2885312757793879).margin(1e-9));

    const RunResult b = run_cli("bounds --ell 3 --p 0.1 --q 0.2 --uniform --format json");
    const nlohmann::json jb = nlohmann::json::parse(b.out);
    REQUIRE(jb["enumeration_fallback"].get<bool>() == false);
    REQUIRE(jb["l_si_uniform"].get<double>() ==
            Catch::Approx(segcap::lower_bound_uniform(segcap::ChannelParams{3, 0.1, 0.2}))
                .margin(1e-10));
}
