// End-to-end checks of the command-line frontend: spec parsing, artifact
// layout, byte-identical reruns, exit codes.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
    std::printf("[%s] %s\n", ok ? "ok" : "FAIL", what.c_str());
    if (!ok) ++g_failures;
}

int run(const std::string& args) {
    std::string cmd = std::string(ZEROENT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return rc == -1 ? -1 : WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace

int main() {
    fs::path work = fs::temp_directory_path() / "zeroent_cli_tests";
    fs::remove_all(work);
    fs::create_directories(work);

    fs::path farey = work / "farey.json";
    write_file(farey,
               R"({"a": {"kind": "farey"}, "b": {"kind": "farey"}, "measure": {"kind": "uniform"}})");
    fs::path dril22 = work / "dril_2_2.json";
    write_file(dril22, R"({"a": {"kind": "dril", "gamma": 2, "delta": 2}})");
    fs::path broken = work / "broken.json";
    write_file(broken, R"({"a": {"kind": "dril", "gamma": 0.5, "delta": 1}})");

    // wtd: closed-form column, n-max 0 edge, law fit
    {
        int rc = run("wtd --source " + farey.string() + " --n-max 1e4 --out " +
                     (work / "w1").string());
        check(rc == 0, "wtd exits 0");
        std::string csv = slurp(work / "w1" / "wtd.csv");
        check(csv.find("# spec_hash=") == 0, "wtd.csv carries the spec hash");
        check(csv.find("\n0,1,1,,\n") != std::string::npos, "row n=0 has q=1");
        check(csv.find("\n1,0.5,0.5,,0.5\n") != std::string::npos, "row n=1 has q=1/2, r=1/2");

        rc = run("wtd --source " + farey.string() + " --n-max 0 --out " + (work / "w0").string());
        std::string csv0 = slurp(work / "w0" / "wtd.csv");
        // comment + header + exactly one data row
        int rows = 0;
        for (char ch : csv0) rows += (ch == '\n');
        check(rc == 0 && rows == 3, "wtd --n-max 0 emits a single row");

        rc = run("wtd --source " + dril22.string() + " --n-max 1e6 --fit 1e4:1e6 --out " +
                 (work / "w2").string());
        std::string law = slurp(work / "w2" / "wtd_law.json");
        check(rc == 0 && law.find("\"beta\": 0.5") != std::string::npos,
              "dril(2,2) fitted beta ~ 0.5 in wtd_law.json");
    }

    // weights: determinism of MC reruns, exact depth guard
    {
        std::string args = "weights --mc --depths 50,200 --samples 20000 --seed 7 --source " +
                           farey.string() + " --out ";
        check(run(args + (work / "m1").string()) == 0, "weights --mc exits 0");
        check(run(args + (work / "m2").string()) == 0, "weights --mc rerun exits 0");
        check(slurp(work / "m1" / "profile.csv") == slurp(work / "m2" / "profile.csv"),
              "identical seeds give byte-identical profiles");

        check(run("weights --exact --depth 10 --source " + farey.string() + " --out " +
                  (work / "e1").string()) == 0,
              "weights --exact exits 0");
        std::string csv = slurp(work / "e1" / "profile.csv");
        check(csv.find("\n2,1.329661348854758") != std::string::npos,
              "exact profile row 2 matches m(2)");
        check(run("weights --exact --depth 27 --source " + farey.string() + " --out " +
                  (work / "e2").string()) != 0,
              "exact depth 27 is a usage error");
    }

    // lambda identity via JSON output
    {
        check(run("lambda --v 0.7 --t 1 --s 1 --n-max 8 --source " + farey.string() + " --out " +
                  (work / "l1").string()) == 0,
              "lambda exits 0");
        std::string j = slurp(work / "l1" / "lambda.json");
        check(j.find("identity_gap") != std::string::npos, "lambda reports the identity gap");
    }

    // synthesize: valid pair writes spec, invalid exits nonzero
    {
        check(run("synthesize --beta 0.25 --delta 0.25 --n-max 1e5 --out " +
                  (work / "s1").string()) == 0,
              "synthesize (1/4, 1/4) exits 0");
        std::string j = slurp(work / "s1" / "synthesized_source.json");
        check(j.find("\"gamma\": 4.0") != std::string::npos, "synthesized spec has gamma 4");
        check(run("synthesize --beta 0 --delta 1 --out " + (work / "s2").string()) == 1,
              "synthesize (0, 1) exits nonzero");
    }

    // block on a small grid: entropy lands near pi^2/(6 log 2)
    {
        check(run("block --grid 257 --m-max 2e4 --tol 1e-9 --source " + farey.string() +
                  " --out " + (work / "b1").string()) == 0,
              "block exits 0");
        std::string j = slurp(work / "b1" / "block.json");
        check(j.find("\"entropy\": 2.37") != std::string::npos, "entropy ~ 2.373 in block.json");
        check(j.find("\"class\": \"infinite\"") != std::string::npos,
              "Farey E[W] classified infinite");
    }

    // bad specs are schema errors with nonzero exit
    {
        check(run("wtd --source " + broken.string() + " --out " + (work / "x1").string()) == 1,
              "gamma outside Gamma_S is rejected");
        check(run("wtd --source " + (work / "missing.json").string() + " --out " +
                  (work / "x2").string()) == 1,
              "missing spec file is an error");
    }

    // bundled checks: all four reports written, all passing on the Farey source
    {
        check(run("checks --source " + farey.string() + " --samples 2e5 --seed 3 --out " +
                  (work / "c1").string()) == 0,
              "checks exits 0 on the Farey source");
        for (const char* name : {"check_lambda_identity.json", "check_tauberian_sqrt.json",
                                 "check_v_asymptotic.json", "check_renewal.json"}) {
            std::string j = slurp(work / "c1" / name);
            check(j.find("\"pass\": true") != std::string::npos,
                  std::string(name) + " reports pass");
        }
        check(!slurp(work / "c1" / "check_renewal.csv").empty(), "renewal curve CSV written");
    }

    std::printf("%s: %d failure(s)\n", g_failures == 0 ? "SUCCESS" : "FAILURE", g_failures);
    return g_failures == 0 ? 0 : 1;
}
