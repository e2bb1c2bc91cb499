#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

namespace fs = std::filesystem;

std::string cli_path() {
    const char* p = std::getenv("RUINKIT_CLI");
    REQUIRE(p != nullptr);
    return p;
}

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "ruinkit_cli_tests";
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Run the CLI with the given arguments; stdout/stderr land in capture files.
int run_cli(const std::string& args) {
    const fs::path dir = work_dir();
    const std::string cmd = "\"" + cli_path() + "\" " + args + " > \"" +
                            (dir / "stdout.txt").string() + "\" 2> \"" +
                            (dir / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string captured_stdout() { return read_text(work_dir() / "stdout.txt"); }

// Parsed CSV: header fields plus rows of doubles.
struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

Csv parse_csv(const fs::path& path) {
    Csv csv;
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (first) {
            csv.header = fields;
            first = false;
            continue;
        }
        std::vector<double> row;
        for (const auto& f : fields) row.push_back(std::stod(f));
        csv.rows.push_back(std::move(row));
    }
    return csv;
}

const char* kConfigA = R"([model]
u = 1.0
c = 1.0

[premium_jumps]
dist = "exponential"
rate = 1.0

[claims]
dist = "exponential"
rate = 1.0

[mixing]
type = "degenerate"
gamma0 = 1.0
delta0 = 0.5

[grid]
start = 0.0
stop = 2.0
step = 1.0

[solver]
h = 0.02
u_max = 30.0

[mc]
paths = 2000
horizon = 200.0
seed = 7
)";

fs::path config_a_path() {
    const fs::path path = work_dir() / "config_a.toml";
    write_text(path, kConfigA);
    return path;
}

} // namespace

TEST_CASE("closed-form command") {
    const auto cfg = config_a_path();
    const auto out = work_dir() / "closed.csv";
    const std::string cmd = "closed-form --config \"" + cfg.string() + "\" --out \"" +
                            out.string() + "\"";
    SECTION("writes the conditional formula over the configured grid") {
        REQUIRE(run_cli(cmd) == 0);
        const auto csv = parse_csv(out);
        REQUIRE(csv.header == std::vector<std::string>{"u", "psi_closed"});
        REQUIRE(csv.rows.size() == 3);
        REQUIRE(csv.rows[0][0] == 0.0);
        REQUIRE(csv.rows[1][0] == 1.0);
        REQUIRE(csv.rows[2][0] == 2.0);
        REQUIRE_THAT(csv.rows[0][1], WithinAbs(0.71922359359558486254, 1e-9));
        REQUIRE_THAT(csv.rows[1][1], WithinAbs(0.54315562525350524526, 1e-9));
        REQUIRE_THAT(csv.rows[2][1], WithinAbs(0.4101895931551059567, 1e-9));
    }
    SECTION("reruns are byte-identical") {
        REQUIRE(run_cli(cmd) == 0);
        const std::string first = read_text(out);
        REQUIRE(run_cli(cmd) == 0);
        REQUIRE(read_text(out) == first);
        REQUIRE_FALSE(first.empty());
        REQUIRE(first.back() == '\n');
    }
    SECTION("the --u-grid flag overrides the configured grid") {
        REQUIRE(run_cli("closed-form --config \"" + cfg.string() + "\" --out \"" + out.string() +
                        "\" --u-grid 4:10:3") == 0);
        const auto csv = parse_csv(out);
        REQUIRE(csv.rows.size() == 3);
        REQUIRE(csv.rows[0][0] == 4.0);
        REQUIRE(csv.rows[1][0] == 7.0);
        REQUIRE(csv.rows[2][0] == 10.0);
        REQUIRE_THAT(csv.rows[0][1], WithinAbs(0.23394046556731899018, 1e-9));
        REQUIRE_THAT(csv.rows[2][1], WithinAbs(0.04339777723052685413, 1e-9));
    }
}

TEST_CASE("solve command") {
    const auto cfg = config_a_path();
    const auto out = work_dir() / "solve.csv";
    SECTION("agrees with the closed form on the reference configuration") {
        REQUIRE(run_cli("solve --config \"" + cfg.string() + "\" --out \"" + out.string() +
                        "\"") == 0);
        const auto csv = parse_csv(out);
        REQUIRE(csv.header == std::vector<std::string>{"u", "psi_solver", "residual"});
        REQUIRE(csv.rows.size() == 3);
        REQUIRE_THAT(csv.rows[0][1], WithinAbs(0.71922359359558486254, 2e-3));
        REQUIRE_THAT(csv.rows[1][1], WithinAbs(0.54315562525350524526, 2e-3));
        REQUIRE_THAT(csv.rows[2][1], WithinAbs(0.4101895931551059567, 2e-3));
        for (const auto& row : csv.rows) REQUIRE(row[2] <= 1e-10);
    }
}

TEST_CASE("simulate command") {
    const auto cfg = config_a_path();
    const auto out = work_dir() / "simulate.csv";
    const std::string cmd = "simulate --config \"" + cfg.string() + "\" --out \"" + out.string() +
                            "\"";
    SECTION("writes estimates with confidence intervals") {
        REQUIRE(run_cli(cmd) == 0);
        const auto csv = parse_csv(out);
        REQUIRE(csv.header ==
                std::vector<std::string>{"u", "psi_mc", "ci_low", "ci_high", "n_paths", "seed"});
        REQUIRE(csv.rows.size() == 3);
        for (const auto& row : csv.rows) {
            REQUIRE(row[2] <= row[1]);
            REQUIRE(row[1] <= row[3]);
            REQUIRE(row[4] == 2000.0);
            REQUIRE(row[5] == 7.0);
        }
        // The estimate should be in the right neighborhood of the closed form.
        REQUIRE_THAT(csv.rows[1][1], WithinAbs(0.54315562525350524526, 0.05));
    }
    SECTION("reruns are byte-identical") {
        REQUIRE(run_cli(cmd) == 0);
        const std::string first = read_text(out);
        REQUIRE(run_cli(cmd) == 0);
        REQUIRE(read_text(out) == first);
    }
}

TEST_CASE("compare command") {
    const auto cfg = config_a_path();
    const auto out = work_dir() / "compare.csv";
    REQUIRE(run_cli("compare --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"") ==
            0);
    const auto csv = parse_csv(out);
    REQUIRE(csv.header == std::vector<std::string>{"u", "psi_closed", "psi_solver", "psi_mc",
                                                   "ci_low", "ci_high"});
    REQUIRE(csv.rows.size() == 3);
    for (const auto& row : csv.rows) REQUIRE_THAT(row[1], WithinAbs(row[2], 2e-3));
    const std::string summary = captured_stdout();
    REQUIRE_THAT(summary, ContainsSubstring("max |psi_closed - psi_solver| = "));
    REQUIRE_THAT(summary, ContainsSubstring("CI covers psi_closed at "));
}

TEST_CASE("moments command") {
    const auto cfg = config_a_path();
    const auto out = work_dir() / "moments.csv";
    SECTION("exact small integers format exactly") {
        REQUIRE(run_cli("moments --config \"" + cfg.string() + "\" --out \"" + out.string() +
                        "\" --t-grid 2:2:1") == 0);
        REQUIRE(read_text(out) == "t,mean,variance\n2,2,6\n");
    }
    SECTION("default time grid is the single point t = 1") {
        REQUIRE(run_cli("moments --config \"" + cfg.string() + "\" --out \"" + out.string() +
                        "\"") == 0);
        REQUIRE(read_text(out) == "t,mean,variance\n1,1.5,3\n");
    }
}

TEST_CASE("failure exit codes") {
    const auto dir = work_dir();
    SECTION("missing config file exits 1 and writes nothing") {
        const auto out = dir / "never.csv";
        fs::remove(out);
        REQUIRE(run_cli("closed-form --config \"" + (dir / "absent.toml").string() +
                        "\" --out \"" + out.string() + "\"") == 1);
        REQUIRE_FALSE(fs::exists(out));
    }
    SECTION("closed form with heavy-tailed claims exits 2") {
        const auto cfg = dir / "pareto.toml";
        write_text(cfg, "[model]\nu = 1.0\nc = 1.0\n"
                        "[premium_jumps]\ndist = \"exponential\"\nrate = 1.0\n"
                        "[claims]\ndist = \"pareto\"\nscale = 1.0\ntail_index = 2.5\n"
                        "[mixing]\ntype = \"degenerate\"\ngamma0 = 1.0\ndelta0 = 0.5\n");
        REQUIRE(run_cli("closed-form --config \"" + cfg.string() + "\" --out \"" +
                        (dir / "pareto.csv").string() + "\"") == 2);
    }
    SECTION("solve at zero drift exits 4") {
        const auto cfg = dir / "zero_drift.toml";
        write_text(cfg, "[model]\nu = 2.0\nc = 0.0\n"
                        "[premium_jumps]\ndist = \"exponential\"\nrate = 1.0\n"
                        "[claims]\ndist = \"exponential\"\nrate = 1.0\n"
                        "[mixing]\ntype = \"degenerate\"\ngamma0 = 1.0\ndelta0 = 3.0\n");
        REQUIRE(run_cli("solve --config \"" + cfg.string() + "\" --out \"" +
                        (dir / "zero_drift.csv").string() + "\"") == 4);
    }
    SECTION("monte carlo without an explicit seed exits 1") {
        const auto cfg = dir / "no_seed.toml";
        write_text(cfg, std::string(kConfigA).substr(0, std::string(kConfigA).find("[mc]")) +
                            "[mc]\npaths = 1000\nhorizon = 10.0\n");
        REQUIRE(run_cli("simulate --config \"" + cfg.string() + "\" --out \"" +
                        (dir / "no_seed.csv").string() + "\"") == 1);
    }
    SECTION("a config without an output path needs --out") {
        const auto cfg = dir / "no_out.toml";
        write_text(cfg, kConfigA);
        REQUIRE(run_cli("closed-form --config \"" + cfg.string() + "\"") == 1);
    }
    SECTION("bad usage exits 1") {
        REQUIRE(run_cli("") == 1);
        REQUIRE(run_cli("frobnicate") == 1);
        const auto cfg = config_a_path();
        REQUIRE(run_cli("closed-form --config \"" + cfg.string() + "\" --out \"" +
                        (dir / "grid.csv").string() + "\" --u-grid nonsense") == 1);
    }
}
