// Integration checks for the hawkes_dt command-line tool. Takes the binary
// path as argv[1]; spawns it through the shell and inspects exit codes and
// output files.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int g_failures = 0;
std::string g_cli;
fs::path g_dir;

void check(bool ok, const std::string& what) {
    if (ok) {
        std::cout << "[ok] " << what << "\n";
    } else {
        std::cout << "[FAIL] " << what << "\n";
        ++g_failures;
    }
}

struct RunResult {
    int exit_code;
    std::string stdout_text;
};

RunResult run(const std::string& args) {
    const fs::path out_file = g_dir / "stdout.txt";
    const std::string cmd = g_cli + " " + args + " > " + out_file.string() + " 2> " +
                            (g_dir / "stderr.txt").string();
    const int rc = std::system(cmd.c_str());
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    int code = -1;
    if (rc != -1) code = WEXITSTATUS(rc);
    return {code, ss.str()};
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kFig4Config = R"({
  "params": {"kernel": "exp", "alpha": 2.0, "beta": 5.0, "lambda_inf": 3.0, "x0": 4.0,
             "marks": {"type": "exponential", "rate": 1.0}},
  "grid": {"T": 1.0, "N": 5000}
})";

void test_simulate_dthp() {
    const fs::path config = g_dir / "fig4.json";
    write_file(config, kFig4Config);

    const fs::path csv_a = g_dir / "a.csv";
    RunResult r = run("simulate-dthp --config " + config.string() + " --out " +
                      csv_a.string() + " --seed 42");
    check(r.exit_code == 0, "simulate-dthp exits 0");
    const json summary = json::parse(r.stdout_text);
    check(summary["command"] == "simulate-dthp", "summary names the command");
    check(summary["seed"] == 42, "summary carries the seed");
    check(summary.contains("config_digest"), "summary carries the config digest");

    const fs::path csv_b = g_dir / "b.csv";
    run("simulate-dthp --config " + config.string() + " --out " + csv_b.string() +
        " --seed 42");
    check(slurp(csv_a) == slurp(csv_b), "same config and seed give identical bytes");

    const fs::path csv_c = g_dir / "c.csv";
    run("simulate-dthp --config " + config.string() + " --out " + csv_c.string() +
        " --seed 43");
    check(slurp(csv_a) != slurp(csv_c), "different seed changes the trajectory");

    const std::string head = slurp(csv_a).substr(0, 200);
    check(head.find("t,lambda,xi,L,jump") != std::string::npos,
          "trajectory csv header schema");
    check(head.find("seed=42") != std::string::npos, "csv header notes the seed");
}

void test_config_errors() {
    const fs::path bad = g_dir / "bad.json";
    write_file(bad, R"({"params": {"kernel": "exp", "alpha": 2.0, "beta": 5.0,
        "lambda_inf": 3.0, "x0": 4.0, "gamma": 1.0,
        "marks": {"type": "exponential", "rate": 1.0}}, "grid": {"T": 1.0, "N": 100}})");
    const fs::path out = g_dir / "never.csv";
    RunResult r = run("simulate-dthp --config " + bad.string() + " --out " + out.string());
    check(r.exit_code == 2, "unknown params field exits 2");
    check(!fs::exists(out), "invalid config leaves the filesystem untouched");

    write_file(bad, R"({"params": {"kernel": "exp", "alpha": 6.0, "beta": 5.0,
        "lambda_inf": 3.0, "x0": 4.0,
        "marks": {"type": "constant", "value": 1.0}}, "grid": {"T": 1.0, "N": 100}})");
    r = run("simulate-dthp --config " + bad.string() + " --out " + out.string());
    check(r.exit_code == 2, "unstable parameters exit 2");

    const fs::path config = g_dir / "fig4b.json";
    write_file(config, kFig4Config);
    r = run("simulate-dthp --config " + config.string() +
            " --out /nonexistent-dir/x.csv");
    check(r.exit_code == 3, "unwritable output path exits 3");

    r = run("simulate-dthp --config " + config.string() + " --out " + out.string() +
            " --param params.alpha=7.0");
    check(r.exit_code == 2, "--param override is validated too");
}

void test_simulate_exact() {
    const fs::path config = g_dir / "exact.json";
    write_file(config, R"({
      "params": {"kernel": "exp", "alpha": 2.0, "beta": 5.0, "lambda_inf": 3.0,
                 "x0": 4.0, "marks": {"type": "exponential", "rate": 1.0}},
      "horizon": 2.0
    })");
    const fs::path events = g_dir / "events.csv";
    const fs::path state = g_dir / "state.csv";
    RunResult r = run("simulate-exact --config " + config.string() + " --out " +
                      events.string() + " --seed 5 --state-out " + state.string() +
                      " --state-grid-n 100");
    check(r.exit_code == 0, "simulate-exact exits 0");

    std::istringstream is(slurp(events));
    std::string line;
    std::getline(is, line); // comment
    std::getline(is, line);
    check(line == "theta,mark", "event csv header schema");
    double prev = 0.0;
    bool increasing = true;
    while (std::getline(is, line)) {
        const double theta = std::stod(line.substr(0, line.find(',')));
        if (theta <= prev) increasing = false;
        prev = theta;
    }
    check(increasing, "event times are strictly increasing");
    check(slurp(state).find("t,lambda,xi,L,jump") != std::string::npos,
          "sampled state csv reuses the trajectory schema");

    // erlang config routes to the thinning sampler
    write_file(config, R"({
      "params": {"kernel": "erlang", "alpha": 2.0, "beta": 5.0, "lambda_inf": 3.0,
                 "x0": 4.0, "marks": {"type": "constant", "value": 1.0}},
      "horizon": 1.0
    })");
    r = run("simulate-exact --config " + config.string() + " --out " + events.string());
    check(r.exit_code == 0, "simulate-exact accepts the erlang kernel");
}

void test_check_generator() {
    const fs::path config = g_dir / "gen.json";
    write_file(config, R"({
      "params": {"kernel": "exp", "alpha": 2.0, "beta": 5.0, "lambda_inf": 3.0,
                 "x0": 4.0, "marks": {"type": "exponential", "rate": 1.0}},
      "N_list": [50, 500], "horizon": 1.0,
      "functions": ["plateau_1_3"], "grid_points": 1500, "quadrature_nodes": 256
    })");
    const fs::path out = g_dir / "gen_report.json";
    RunResult r = run("check-generator --config " + config.string() + " --out " +
                      out.string());
    check(r.exit_code == 0, "check-generator exits 0 on decreasing norms");
    const json report = json::parse(slurp(out));
    check(report["pass"] == true, "generator report passes");
    check(report["functions"][0]["rows"].size() == 2, "one row per N");
    check(report["functions"][0]["rows"][0].contains("sup_norm_error"),
          "rows carry the sup norm");
    check(report["functions"][0]["rows"][0].contains("argmax_y"),
          "rows carry the argmax location");
}

void test_check_convergence() {
    // alpha = 0: the chain marginal equals the flow at grid times, so the
    // verification passes quickly and deterministically
    const fs::path config = g_dir / "conv.json";
    write_file(config, R"({
      "params": {"kernel": "exp", "alpha": 0.0, "beta": 5.0, "lambda_inf": 3.0,
                 "x0": 4.0, "marks": {"type": "constant", "value": 1.0}},
      "t": 1.0, "N_list": [100, 1000], "paths": 500
    })");
    const fs::path out = g_dir / "conv_report.json";
    RunResult r = run("check-convergence --config " + config.string() + " --out " +
                      out.string() + " --seed 9");
    check(r.exit_code == 0, "check-convergence passes the degenerate control");
    const json report = json::parse(slurp(out));
    check(report["lambda"]["rows"].size() == 2, "report has one row per N");

    // negative control: oracle with beta mismatched by 20 percent
    const fs::path config_neg = g_dir / "conv_neg.json";
    write_file(config_neg, R"({
      "params": {"kernel": "exp", "alpha": 2.0, "beta": 5.0, "lambda_inf": 3.0,
                 "x0": 4.0, "marks": {"type": "exponential", "rate": 1.0}},
      "oracle": {"kernel": "exp", "alpha": 2.0, "beta": 6.0, "lambda_inf": 3.0,
                 "x0": 4.0, "marks": {"type": "exponential", "rate": 1.0}},
      "t": 1.0, "N_list": [100, 1000], "paths": 2000
    })");
    r = run("check-convergence --config " + config_neg.string() + " --out " +
            (g_dir / "conv_neg.json.out").string() + " --seed 9");
    check(r.exit_code == 4, "mismatched oracle beta exits 4");
}

void test_reproduce_fig4() {
    const fs::path out = g_dir / "fig4_traj.csv";
    RunResult r = run("reproduce-fig4 --out " + out.string() +
                      " --seed 2 --param grid.N=20000 --param grid.T=1.0");
    check(r.exit_code == 0, "reproduce-fig4 exits 0");
    const json summary = json::parse(r.stdout_text);
    check(summary["command"] == "reproduce-fig4", "fig4 summary names the command");
    check(slurp(out).find("T=5 default horizon") != std::string::npos,
          "fig4 header documents the default horizon");
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: test_cli <path-to-hawkes_dt>\n";
        return 2;
    }
    g_cli = argv[1];
    g_dir = fs::temp_directory_path() / "hawkes_dt_cli_test";
    fs::remove_all(g_dir);
    fs::create_directories(g_dir);

    test_simulate_dthp();
    test_config_errors();
    test_simulate_exact();
    test_check_generator();
    test_check_convergence();
    test_reproduce_fig4();

    if (g_failures == 0) {
        std::cout << "all cli checks passed\n";
        return 0;
    }
    std::cout << g_failures << " cli checks failed\n";
    return 1;
}
