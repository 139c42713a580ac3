// End-to-end checks of the wp command-line tool: output formats, exit-code
// contract, and rerun determinism. The binary path and the sample data
// directory arrive via WP_CLI and WP_DATA (set by ctest).

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

namespace {

int g_failures = 0;

#define CLI_CHECK(cond, msg)                                                      \
    do {                                                                          \
        if (!(cond)) {                                                            \
            std::cerr << "FAIL " << __LINE__ << ": " << msg << "\n";              \
            ++g_failures;                                                         \
        }                                                                         \
    } while (0)

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cmd(const std::string& cmd) {
    RunResult r;
    FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string line;
    while (std::getline(is, line)) out.push_back(line);
    return out;
}

// CSV with the timing columns (mean_ns, median_ns) blanked out.
std::string stable_csv(const std::string& csv) {
    std::ostringstream os;
    for (const std::string& line : lines_of(csv)) {
        std::vector<std::string> cols;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                cols.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        cols.push_back(cur);
        if (cols.size() == 9 && cols[0] != "algo") {
            cols[3] = "-";
            cols[4] = "-";
        }
        for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
        os << "\n";
    }
    return os.str();
}

} // namespace

int main() {
    const char* cli_env = std::getenv("WP_CLI");
    const char* data_env = std::getenv("WP_DATA");
    if (!cli_env || !data_env) {
        std::cerr << "WP_CLI and WP_DATA must be set\n";
        return 1;
    }
    const std::string wp = cli_env;
    const std::string data = data_env;
    const std::string uni = data + "/unipotent.json";
    const std::string sanov = data + "/sanov.json";

    // solve: trivial word.
    {
        const auto r = run_cmd(wp + " solve --generators " + uni + " --word '1 -1'");
        CLI_CHECK(r.code == 0, "solve exit code");
        const auto ls = lines_of(r.out);
        CLI_CHECK(!ls.empty() && ls[0] == "trivial", "solve trivial answer, got: " + r.out);
    }

    // solve: nontrivial, decided at the modular stage with q(3) = 210.
    {
        const auto r = run_cmd(wp + " solve --generators " + uni + " --word '1 1 1'");
        CLI_CHECK(r.code == 0, "solve exit code");
        const auto ls = lines_of(r.out);
        CLI_CHECK(ls.size() >= 2 && ls[0] == "nontrivial", "solve nontrivial answer");
        CLI_CHECK(ls.size() >= 2 && ls[1] == "decided: modular stage, q = 210",
                  "diagnostics line, got: " + (ls.size() >= 2 ? ls[1] : "<none>"));
    }

    // solve: --show-matrix prints the exact value.
    {
        const auto r = run_cmd(wp + " solve --generators " + uni +
                               " --word '1 1 1' --show-matrix");
        CLI_CHECK(r.code == 0, "solve --show-matrix exit code");
        CLI_CHECK(r.out.find("[[1, 3]") != std::string::npos, "matrix printed");
    }

    // solve: every algorithm agrees on the answer lines.
    for (const std::string algo : {"naive", "dc", "dc_mod", "quickwp"}) {
        const auto r = run_cmd(wp + " solve --generators " + sanov +
                               " --word '1 2 -1 -2' --algo " + algo);
        CLI_CHECK(r.code == 0, "solve exit code for " + algo);
        const auto ls = lines_of(r.out);
        CLI_CHECK(!ls.empty() && ls[0] == "nontrivial", algo + " verdict");
    }

    // solve: input errors exit 2.
    CLI_CHECK(run_cmd(wp + " solve --generators /nonexistent.json --word '1'").code == 2,
              "missing generator file exits 2");
    CLI_CHECK(run_cmd(wp + " solve --generators " + uni + " --word '2'").code == 2,
              "out-of-range letter exits 2");
    CLI_CHECK(run_cmd(wp + " solve --generators " + uni).code == 2,
              "missing word exits 2");

    // solve: --word-file is interchangeable with --word.
    {
        const std::string wordfile = "/tmp/wp_cli_word.txt";
        {
            FILE* f = fopen(wordfile.c_str(), "w");
            CLI_CHECK(f != nullptr, "write word file");
            if (f) {
                fputs("1 1 1\n", f);
                fclose(f);
            }
        }
        const auto r = run_cmd(wp + " solve --generators " + uni + " --word-file " + wordfile);
        CLI_CHECK(r.code == 0, "solve --word-file exit code");
        const auto ls = lines_of(r.out);
        CLI_CHECK(!ls.empty() && ls[0] == "nontrivial", "solve --word-file verdict");
    }

    // q: format contract.
    {
        const auto r = run_cmd(wp + " q 3");
        CLI_CHECK(r.code == 0, "q exit code");
        CLI_CHECK(r.out == "q = 210, primes = [2,3,5,7], bits = 8\n",
                  "q(3) line, got: " + r.out);
    }
    {
        const auto r = run_cmd(wp + " q 1");
        CLI_CHECK(r.out == "q = 1, primes = [], bits = 1\n", "q(1) line, got: " + r.out);
    }
    {
        const auto r = run_cmd(wp + " q 4");
        CLI_CHECK(r.out.rfind("q = 200560490130, primes = [2,3,5,7,11,13,17,19,23,29,31]", 0) == 0,
                  "q(4) line, got: " + r.out);
    }

    // bench: CSV shape and rerun determinism outside the timing columns.
    {
        const std::string cmd = wp + " bench --generators " + sanov +
                                " --algo dc,quickwp --lengths 16,32 --trials 5 --seed 9";
        const auto a = run_cmd(cmd);
        CLI_CHECK(a.code == 0, "bench exit code");
        const auto ls = lines_of(a.out);
        CLI_CHECK(ls.size() == 5, "bench row count");
        CLI_CHECK(!ls.empty() &&
                      ls[0] == "algo,n,trials,mean_ns,median_ns,trivial_count,modular_decisions,"
                               "exact_decisions,seed",
                  "bench header");
        const auto b = run_cmd(cmd);
        CLI_CHECK(stable_csv(a.out) == stable_csv(b.out), "bench rerun determinism");
    }

    // bench: --out writes the same CSV to a file; --format json parses.
    {
        const std::string out_path = "/tmp/wp_cli_bench.csv";
        const auto r = run_cmd(wp + " bench --generators " + uni +
                               " --algo dc_mod --lengths 16 --trials 3 --seed 1 --out " +
                               out_path);
        CLI_CHECK(r.code == 0 && r.out.empty(), "bench --out writes no stdout");
        const auto cat = run_cmd("cat " + out_path);
        CLI_CHECK(lines_of(cat.out).size() == 2, "bench --out file contents");

        const auto j = run_cmd(wp + " bench --generators " + uni +
                               " --algo quickwp --lengths 16 --trials 3 --format json");
        const auto parsed = nlohmann::json::parse(j.out, nullptr, false);
        CLI_CHECK(!parsed.is_discarded() && parsed.is_array() && parsed.size() == 1,
                  "bench json output");
        if (parsed.is_array() && parsed.size() == 1) {
            CLI_CHECK(parsed[0]["algo"] == "quickwp", "bench json algo field");
            CLI_CHECK(parsed[0]["rng"] == "mt19937_64+rejection", "bench json rng id");
        }
        CLI_CHECK(run_cmd(wp + " bench --generators " + uni +
                          " --lengths 16 --format yaml").code == 2,
                  "unknown format exits 2");
    }

    // pn: exhaustive count at n = 8 over the Sanov pair.
    {
        const auto r = run_cmd(wp + " pn --generators " + sanov +
                               " --lengths 8 --exhaustive");
        CLI_CHECK(r.code == 0, "pn exit code");
        const auto j = nlohmann::json::parse(r.out, nullptr, false);
        CLI_CHECK(!j.is_discarded() && j.is_array() && j.size() == 1, "pn JSON array");
        if (j.is_array() && j.size() == 1) {
            CLI_CHECK(j[0]["hits"] == 2092, "pn exhaustive hits");
            CLI_CHECK(j[0]["trials"] == 65536, "pn exhaustive trials");
        }
        // Over-budget exhaustive enumeration is a resource error.
        const auto big = run_cmd(wp + " pn --generators " + sanov +
                                 " --lengths 13 --exhaustive");
        CLI_CHECK(big.code == 3, "pn exhaustive budget exits 3");
    }

    // chain: JSON report for the unipotent walk mod 3; inadmissible modulus
    // exits 3.
    {
        const auto r = run_cmd(wp + " chain --generators " + uni + " --modulus 3");
        CLI_CHECK(r.code == 0, "chain exit code");
        const auto j = nlohmann::json::parse(r.out, nullptr, false);
        CLI_CHECK(!j.is_discarded(), "chain JSON parses");
        if (!j.is_discarded()) {
            CLI_CHECK(j["size_H"] == 3, "chain size_H");
            CLI_CHECK(j["period"] == 1, "chain period");
            const double beta_star = j["beta_star"].get<double>();
            CLI_CHECK(beta_star > 0.25 - 1e-9 && beta_star < 0.25 + 1e-9, "chain beta_star");
            CLI_CHECK(j["tv_decay"].size() == 201, "chain tv table length");
        }
        CLI_CHECK(run_cmd(wp + " chain --generators " + uni + " --modulus 2").code == 3,
                  "collapsing modulus exits 3");
        CLI_CHECK(run_cmd(wp + " chain --generators " + sanov +
                          " --modulus 5 --cap 10").code == 3,
                  "tiny cap exits 3");
    }

    if (g_failures == 0) {
        std::cout << "all cli checks passed\n";
        return 0;
    }
    std::cerr << g_failures << " cli check(s) failed\n";
    return 1;
}
