#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef TKV_CLI_PATH
#error "TKV_CLI_PATH must point at the command-line binary"
#endif

namespace {

struct RunResult {
    int code = -1;
    std::string out;  // captured stdout
    std::string err;  // captured stderr
};

std::string scratch_path(const char* tag) {
    static int counter = 0;
    return "/tmp/tkv_cli_" + std::to_string(getpid()) + "_" +
           std::to_string(counter++) + "_" + tag;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    RunResult r;
    const std::string so = scratch_path("stdout"), se = scratch_path("stderr");
    const std::string cmd =
        std::string(TKV_CLI_PATH) + " " + args + " > " + so + " 2> " + se;
    const int status = std::system(cmd.c_str());
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(so);
    r.err = slurp(se);
    std::remove(so.c_str());
    std::remove(se.c_str());
    return r;
}

std::string write_config(const std::string& body) {
    const std::string path = scratch_path("config") + ".json";
    std::ofstream out(path);
    out << body;
    return path;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

// Data rows only: everything that is neither metadata nor the column header.
std::vector<std::string> data_rows(const std::string& text) {
    std::vector<std::string> rows;
    bool header_seen = false;
    for (const auto& line : lines_of(text)) {
        if (line.rfind("#", 0) == 0) continue;
        if (!header_seen) {
            header_seen = true;  // column header
            continue;
        }
        rows.push_back(line);
    }
    return rows;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::istringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    return cells;
}

// Value of a "# key,value" metadata line.
std::string metadata(const std::string& text, const std::string& key) {
    const std::string prefix = "# " + key + ",";
    for (const auto& line : lines_of(text))
        if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
    return "";
}

const std::string kDamped = R"({
  "damping": {"kind": "constant", "d0": 1.0, "alpha": 0.5, "beta": 1.0},
  "grid": {"n_cells": 64},
  "time": {"t_final": 4.0, "stride": 4}
})";

}  // namespace

TEST_CASE("argument errors exit with the configuration code") {
    CHECK(run_cli("").code == 2);
    CHECK(run_cli("--config /tmp/none.json").code == 2);       // no subcommand
    CHECK(run_cli("--config /tmp/none.json frobnicate").code == 2);
}

TEST_CASE("configuration failures carry diagnostics") {
    SUBCASE("missing file") {
        const RunResult r = run_cli("--config /tmp/no_such_config_381.json simulate");
        CHECK(r.code == 2);
        CHECK(r.err.find("config error") != std::string::npos);
        CHECK(r.err.find("cannot open") != std::string::npos);
    }
    SUBCASE("malformed document names the line") {
        const std::string cfg = write_config("{ \"beam\": {\n  \"k1\": 2.0,\n");
        const RunResult r = run_cli("--config " + cfg + " simulate");
        CHECK(r.code == 2);
        CHECK(r.err.find("parse") != std::string::npos);
        CHECK(r.err.find("line") != std::string::npos);
        std::remove(cfg.c_str());
    }
    SUBCASE("schema violations name the field") {
        const std::string cfg = write_config(R"({"beam": {"k3": 1.0}})");
        const RunResult r = run_cli("--config " + cfg + " simulate");
        CHECK(r.code == 2);
        CHECK(r.err.find("beam.k3") != std::string::npos);
        std::remove(cfg.c_str());
    }
}

TEST_CASE("simulate writes a deterministic decaying trace") {
    const std::string cfg = write_config(kDamped);
    const std::string out_a = scratch_path("trace_a.csv");

    const RunResult r = run_cli("--config " + cfg + " --out " + out_a + " simulate");
    REQUIRE(r.code == 0);
    const std::string text = slurp(out_a);

    CHECK(lines_of(text).front() == "# tool_version,1.0.0");
    CHECK(metadata(text, "command") == "simulate");
    CHECK(metadata(text, "seed") == "42");
    CHECK(text.find("t,E,E_t\n") != std::string::npos);
    CHECK(metadata(text, "fitted_p") != "");
    CHECK(metadata(text, "fit_r2") != "");
    CHECK(metadata(text, "power_law") != "");
    CHECK(metadata(text, "graph_norm0") != "");
    CHECK(metadata(text, "max_mean_drift") != "");

    const auto rows = data_rows(text);
    REQUIRE(rows.size() >= 10);
    double prev_e = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto cells = split_csv(rows[i]);
        REQUIRE(cells.size() == 3);
        const double t = std::stod(cells[0]);
        const double e = std::stod(cells[1]);
        const double et = std::stod(cells[2]);
        CHECK(std::isfinite(e));
        CHECK(std::abs(et - e * t) <= 1e-12 * std::max(1.0, std::abs(et)));
        if (i > 0) CHECK(e <= prev_e * (1.0 + 1e-12));
        prev_e = e;
    }
    // dissipation actually happened
    const double first = std::stod(split_csv(rows.front())[1]);
    const double last = std::stod(split_csv(rows.back())[1]);
    CHECK(last < 0.99 * first);

    // identical config + seed -> identical bytes (the output path is part of
    // the echoed config, so the rerun must target the same path)
    const RunResult r2 = run_cli("--config " + cfg + " --out " + out_a + " simulate");
    REQUIRE(r2.code == 0);
    CHECK(slurp(out_a) == text);

    // wall time is reported on stderr, never inside the table
    CHECK(r.err.find("wall_time_seconds") != std::string::npos);
    CHECK(text.find("wall_time_seconds") == std::string::npos);

    std::remove(cfg.c_str());
    std::remove(out_a.c_str());
}

TEST_CASE("conservative simulate keeps the energy column flat") {
    const std::string cfg = write_config(R"({
      "damping": {"kind": "zero"},
      "grid": {"n_cells": 64},
      "time": {"t_final": 4.0, "stride": 4}
    })");
    const std::string out = scratch_path("flat.csv");
    const RunResult r = run_cli("--config " + cfg + " --out " + out + " simulate");
    REQUIRE(r.code == 0);
    const std::string text = slurp(out);

    const auto rows = data_rows(text);
    REQUIRE(rows.size() >= 10);
    const double e0 = std::stod(split_csv(rows.front())[1]);
    for (const auto& row : rows) {
        const double e = std::stod(split_csv(row)[1]);
        CHECK(std::abs(e - e0) <= 1e-8 * e0);
    }
    CHECK(std::abs(std::stod(metadata(text, "fitted_p"))) <= 0.05);

    std::remove(cfg.c_str());
    std::remove(out.c_str());
}

TEST_CASE("spectrum table") {
    SUBCASE("converged branch with sorted rows, stable across threads") {
        const std::string cfg = write_config(R"({
          "spectral": {"c": 1.0},
          "spectrum": {"branches": [1], "n_lo": 50, "n_hi": 54}
        })");
        const std::string out_a = scratch_path("spec_a.csv");
        const std::string out_b = scratch_path("spec_b.csv");

        const RunResult r = run_cli("--config " + cfg + " --out " + out_a + " spectrum");
        REQUIRE(r.code == 0);
        const std::string text = slurp(out_a);
        CHECK(metadata(text, "command") == "spectrum");

        const auto rows = data_rows(text);
        REQUIRE(rows.size() == 5);
        long prev_n = 0;
        for (const auto& row : rows) {
            const auto cells = split_csv(row);
            REQUIRE(cells.size() == 8);
            CHECK(cells[0] == "1");
            const long n = std::stol(cells[1]);
            CHECK(n > prev_n);
            prev_n = n;
            CHECK(std::stod(cells[2]) < 0.0);               // Re lambda < 0
            CHECK(std::stod(cells[4]) <= 1e-6);             // residual
            CHECK(std::stod(cells[5]) <= 0.05);             // |root - prediction|
            CHECK(cells[6].find('i') != std::string::npos); // complex token
            CHECK(cells[7] == "converged");
        }

        // rerun on two threads: metadata echoes the thread count, but the
        // numbers cannot change
        const RunResult r2 = run_cli("--config " + cfg + " --out " + out_b +
                                     " --threads 2 spectrum");
        REQUIRE(r2.code == 0);
        CHECK(data_rows(slurp(out_b)) == rows);

        std::remove(cfg.c_str());
        std::remove(out_a.c_str());
        std::remove(out_b.c_str());
    }

    SUBCASE("empty range produces a header-only table") {
        const std::string cfg = write_config(R"({
          "spectrum": {"n_lo": 60, "n_hi": 50}
        })");
        const std::string out = scratch_path("empty.csv");
        const RunResult r = run_cli("--config " + cfg + " --out " + out + " spectrum");
        CHECK(r.code == 0);
        const std::string text = slurp(out);
        CHECK(text.find("branch,n,") != std::string::npos);
        CHECK(data_rows(text).empty());
        std::remove(cfg.c_str());
        std::remove(out.c_str());
    }

    SUBCASE("a range no double can resolve is a numerical failure") {
        // At n ~ 1e13 the root offsets sit far below one ulp of |lambda|, so
        // no candidate can pass the enclosing-box verification.
        const std::string cfg = write_config(R"({
          "spectrum": {"branches": [1], "n_lo": 10000000000000, "n_hi": 10000000000001}
        })");
        const RunResult r = run_cli("--config " + cfg + " spectrum");
        CHECK(r.code == 3);
        CHECK(r.err.find("numerical failure") != std::string::npos);
        std::remove(cfg.c_str());
    }
}

TEST_CASE("resolvent scan") {
    SUBCASE("global damping grows quadratically") {
        const std::string cfg = write_config(R"({
          "damping": {"kind": "constant", "d0": 1.0},
          "grid": {"n_cells": 256},
          "resolvent": {"n_lo": 4, "n_hi": 24}
        })");
        const std::string out = scratch_path("scan.csv");
        const RunResult r = run_cli("--config " + cfg + " --out " + out + " resolvent");
        REQUIRE(r.code == 0);
        const std::string text = slurp(out);
        CHECK(metadata(text, "command") == "resolvent");
        CHECK(metadata(text, "diverging") == "true");
        const double slope = std::stod(metadata(text, "slope"));
        CHECK(slope > 1.6);
        CHECK(slope < 2.4);
        const auto rows = data_rows(text);
        REQUIRE(rows.size() == 21);
        for (const auto& row : rows) {
            const auto cells = split_csv(row);
            REQUIRE(cells.size() == 4);
            CHECK(std::stod(cells[1]) > 0.0);
            CHECK(cells[3] == "true");
        }
        std::remove(cfg.c_str());
        std::remove(out.c_str());
    }

    SUBCASE("scan frequencies beyond the grid are a config error") {
        const std::string cfg = write_config(R"({
          "damping": {"kind": "constant", "d0": 1.0},
          "grid": {"n_cells": 64},
          "resolvent": {"n_lo": 4, "n_hi": 64}
        })");
        const RunResult r = run_cli("--config " + cfg + " resolvent");
        CHECK(r.code == 2);
        CHECK(r.err.find("resolvent.n_hi") != std::string::npos);
        std::remove(cfg.c_str());
    }
}

TEST_CASE("verify summaries") {
    SUBCASE("identity suite passes") {
        const std::string cfg = write_config(R"({"verify": {"suite": "identities"}})");
        const std::string out = scratch_path("ver.csv");
        const RunResult r = run_cli("--config " + cfg + " --out " + out + " verify");
        CHECK(r.code == 0);
        const auto rows = data_rows(slurp(out));
        REQUIRE(rows.size() == 3);
        for (const auto& row : rows) {
            const auto cells = split_csv(row);
            CHECK(cells[0] == "identities");
            CHECK(cells[2] == "pass");
        }
        std::remove(cfg.c_str());
        std::remove(out.c_str());
    }

    SUBCASE("decay suite on a conservative profile is not applicable") {
        const std::string cfg = write_config(R"({
          "damping": {"kind": "zero"},
          "verify": {"suite": "decay"}
        })");
        const RunResult r = run_cli("--config " + cfg + " verify");
        CHECK(r.code == 0);
        CHECK(r.out.find("not-applicable (H violated)") != std::string::npos);
        std::remove(cfg.c_str());
    }

    SUBCASE("a run too short for the decay band fails the suite") {
        const std::string cfg = write_config(R"({
          "damping": {"kind": "constant", "d0": 1.0, "alpha": 0.5, "beta": 1.0},
          "grid": {"n_cells": 64},
          "time": {"t_final": 2.0},
          "verify": {"suite": "decay"}
        })");
        const RunResult r = run_cli("--config " + cfg + " verify");
        CHECK(r.code == 1);
        CHECK(r.out.find("decay_exponent_band,fail") != std::string::npos);
        std::remove(cfg.c_str());
    }

    SUBCASE("blowup suite needs global damping") {
        const std::string global_cfg = write_config(R"({
          "damping": {"kind": "constant", "d0": 1.0},
          "grid": {"n_cells": 1600},
          "verify": {"suite": "blowup"}
        })");
        const RunResult r = run_cli("--config " + global_cfg + " verify");
        CHECK(r.code == 0);
        CHECK(r.out.find("norm_ratio_slope,pass") != std::string::npos);
        std::remove(global_cfg.c_str());

        const std::string patch_cfg = write_config(R"({
          "damping": {"kind": "constant", "d0": 1.0, "alpha": 0.5, "beta": 1.0},
          "verify": {"suite": "blowup"}
        })");
        const RunResult r2 = run_cli("--config " + patch_cfg + " verify");
        CHECK(r2.code == 0);
        CHECK(r2.out.find("not-applicable (needs global damping)") !=
              std::string::npos);
        std::remove(patch_cfg.c_str());
    }
}

TEST_CASE("output goes to stdout unless a path is given") {
    const std::string cfg = write_config(kDamped);
    const RunResult r = run_cli("--config " + cfg + " simulate");
    CHECK(r.code == 0);
    CHECK(r.out.find("# command,simulate") != std::string::npos);
    CHECK(data_rows(r.out).size() >= 10);
    std::remove(cfg.c_str());
}

TEST_CASE("the out flag overrides the configured path") {
    const std::string configured = scratch_path("configured.csv");
    const std::string flagged = scratch_path("flagged.csv");
    const std::string cfg = write_config(R"({
      "damping": {"kind": "constant", "d0": 1.0, "alpha": 0.5, "beta": 1.0},
      "grid": {"n_cells": 64},
      "time": {"t_final": 2.0, "stride": 4},
      "out": ")" + configured + R"("
    })");
    const RunResult r = run_cli("--config " + cfg + " --out " + flagged + " simulate");
    CHECK(r.code == 0);
    CHECK(!slurp(flagged).empty());
    CHECK(slurp(configured).empty());  // never created
    std::remove(cfg.c_str());
    std::remove(flagged.c_str());
}
