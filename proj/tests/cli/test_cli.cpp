// SPDX-License-Identifier: Apache-2.0
// Runs the gaitevt executable as a subprocess.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("gaitevt_cli_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Result gaitevt(const std::string& args) {
    const auto out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
    const std::string cmd = std::string(GAITEVT_CLI) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int rc = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

// Fresh directory under the scratch area.
fs::path dir(const std::string& name) {
    const auto d = scratch() / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string p(const fs::path& x) { return x.string(); }

// Synthetic trials with varied periods and speeds.
fs::path synth_set(const std::string& name, int n) {
    const auto d = dir(name);
    for (int i = 0; i < n; ++i) {
        const double period = 1.0 + 0.3 * i / std::max(1, n - 1);
        const double speed = 1.4 - 0.5 * i / std::max(1, n - 1);
        REQUIRE(gaitevt("synth --seed " + std::to_string(100 + i) + " --period " + std::to_string(period) +
                        " --speed " + std::to_string(speed) + " --noise 0.001 --out-dir " + p(d))
                    .code == 0);
    }
    return d;
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s)
        n += c == '\n';
    return n;
}

} // namespace

TEST_CASE("version lists schema versions") {
    const auto r = gaitevt("--version");
    CHECK(r.code == 0);
    CHECK(r.out.find("report json schema 1") != std::string::npos);
}

TEST_CASE("synth writes trial and truth deterministically") {
    const auto a = dir("synth_a"), b = dir("synth_b");
    CHECK(gaitevt("synth --cycles 10 --period 1.1 --speed 1.2 --seed 7 --out-dir " + p(a)).code == 0);
    CHECK(gaitevt("synth --cycles 10 --period 1.1 --speed 1.2 --seed 7 --out-dir " + p(b)).code == 0);
    REQUIRE(fs::exists(a / "synth_7.csv"));
    REQUIRE(fs::exists(a / "synth_7_truth.csv"));
    CHECK(slurp(a / "synth_7.csv") == slurp(b / "synth_7.csv"));
    CHECK(slurp(a / "synth_7_truth.csv") == slurp(b / "synth_7_truth.csv"));
    CHECK(count_lines(slurp(a / "synth_7_truth.csv")) == 41);
    CHECK(gaitevt("synth --stance 0.95 --out-dir " + p(a)).code == 2);
    const auto nested = scratch() / "new" / "deeper";
    CHECK(gaitevt("synth --count 2 --out-dir " + p(nested)).code == 0);
    CHECK(fs::exists(nested / "synth_1.csv"));
}

TEST_CASE("detect") {
    const auto d = synth_set("detect", 1);
    const auto trial = d / "synth_100.csv";
    const auto out = d / "zeni.csv";
    auto r = gaitevt("detect --method zeni --input " + p(trial) + " --out " + p(out));
    CHECK(r.code == 0);
    REQUIRE(fs::exists(out));
    CHECK(slurp(out).rfind("side,kind,frame,time_s,source\n", 0) == 0);
    CHECK(count_lines(slurp(out)) == 41);

    r = gaitevt("detect --method zenith --input " + p(trial) + " --out " + p(out));
    CHECK(r.code == 2);
    CHECK(r.err.find("valid methods: zeni, desailly") != std::string::npos);

    r = gaitevt("detect --method zeni --input " + p(d / "missing.csv") + " --out " + p(out));
    CHECK(r.code == 2);
    CHECK(r.err.find("missing.csv") != std::string::npos);

    CHECK(gaitevt("detect --method grf --input " + p(trial) + " --out " + p(d / "grf.csv")).code == 0);
    CHECK(slurp(d / "grf.csv").find("grf_truth") != std::string::npos);

    CHECK(gaitevt("detect --method zeni --input " + p(trial)).code == 2);
}

TEST_CASE("detect without progression exits 3") {
    const auto d = dir("standing");
    std::ofstream f(d / "standing.csv");
    f << "# sample_rate_hz=200, units=m\nframe";
    const char* names[] = {"LASIS", "LPSIS", "RASIS", "RPSIS", "LFCC", "RFCC", "LFMT2", "RFMT2"};
    for (const char* n : names)
        f << ", " << n << "_x, " << n << "_y, " << n << "_z";
    f << '\n';
    for (int i = 0; i < 400; ++i) {
        f << i;
        for (int m = 0; m < 8; ++m)
            f << ", " << 0.1 * m << ", " << (m % 2 ? 0.1 : -0.1) << ", " << (m < 4 ? 1.0 : 0.05);
        f << '\n';
    }
    f.close();
    const auto r = gaitevt("detect --method zeni --input " + p(d / "standing.csv") + " --out " + p(d / "e.csv"));
    CHECK(r.code == 3);
    CHECK(r.err.find("no progression direction") != std::string::npos);
}

TEST_CASE("config file and flag overrides") {
    const auto d = synth_set("config", 1);
    const auto trial = p(d / "synth_100.csv");
    std::ofstream(d / "good.json") << R"({"ghoussayni_speed_threshold": 0.4})";
    std::ofstream(d / "bad.json") << R"({"no_such_field": 1})";
    CHECK(gaitevt("detect --method ghoussayni --input " + trial + " --out " + p(d / "g.csv") + " --config " +
                  p(d / "good.json"))
              .code == 0);
    CHECK(gaitevt("detect --method ghoussayni --input " + trial + " --out " + p(d / "g.csv") + " --config " +
                  p(d / "bad.json"))
              .code == 2);
    CHECK(gaitevt("detect --method ghoussayni --input " + trial + " --out " + p(d / "g.csv") +
                  " --ghoussayni-speed-threshold -1")
              .code == 2);
    // The flag beats the file.
    const auto from_file = gaitevt("detect --method ghoussayni --input " + trial + " --out " + p(d / "f.csv") +
                                   " --config " + p(d / "good.json"));
    const auto from_flag = gaitevt("detect --method ghoussayni --input " + trial + " --out " + p(d / "h.csv") +
                                   " --config " + p(d / "good.json") + " --ghoussayni-speed-threshold 0.5");
    const auto defaults = gaitevt("detect --method ghoussayni --input " + trial + " --out " + p(d / "i.csv"));
    CHECK(from_file.code == 0);
    CHECK(from_flag.code == 0);
    CHECK(slurp(d / "h.csv") == slurp(d / "i.csv"));
    CHECK(slurp(d / "f.csv") != slurp(d / "i.csv"));
}

TEST_CASE("evaluate") {
    const auto d = synth_set("evaluate", 1);
    const auto truth = p(d / "synth_100_truth.csv");
    auto r = gaitevt("evaluate --pred " + truth + " --truth " + truth + " --out " + p(d / "r.json") + " --csv " +
                     p(d / "r.csv"));
    CHECK(r.code == 0);
    const auto json = slurp(d / "r.json");
    CHECK(json.find("\"schema\": 1") != std::string::npos);
    CHECK(json.find("\"mean_ms\": 0.0") != std::string::npos);
    CHECK(json.find("\"detection_rate\": 1.0") != std::string::npos);
    CHECK(count_lines(slurp(d / "r.csv")) == 41);

    r = gaitevt("evaluate --pred " + p(d / "nope.csv") + " --truth " + truth + " --out " + p(d / "r.json"));
    CHECK(r.code == 2);
    CHECK(r.err.find("nope.csv") != std::string::npos);
}

TEST_CASE("compare over a directory") {
    const auto d = synth_set("compare", 20);
    const auto out = scratch() / "compare_out";
    auto r = gaitevt("compare --dir " + p(d) + " --out-dir " + p(out));
    CHECK(r.code == 0);
    const auto table = slurp(out / "table.txt");
    CHECK(r.out == table);
    std::istringstream lines(table);
    std::string line;
    std::getline(lines, line);
    const char* methods[] = {"zeni", "desailly", "oconnor", "ghoussayni", "hreljac", "hsue", "bonci"};
    for (const char* m : methods) {
        std::getline(lines, line);
        CHECK(line.rfind(m, 0) == 0);
        CHECK(line.size() > 20);
        CHECK(line.substr(line.size() - 21) == "     100.0      100.0");
        CHECK(fs::exists(out / (std::string(m) + "_deltas.csv")));
    }
    std::getline(lines, line);
    CHECK(line == "trials: 20, skipped: 0");
    CHECK(fs::exists(out / "compare.json"));
}

TEST_CASE("compare skips unreadable files and counts them") {
    const auto d = synth_set("compare_skip", 3);
    std::ofstream(d / "broken.csv") << "this is not a trial\n";
    const auto out = scratch() / "compare_skip_out";
    const auto r = gaitevt("compare --dir " + p(d) + " --out-dir " + p(out) + " --methods zeni,hsue");
    CHECK(r.code == 0);
    CHECK(r.err.find("broken.csv") != std::string::npos);
    CHECK(r.out.find("trials: 3, skipped: 1") != std::string::npos);
    CHECK(slurp(out / "compare.json").find("\"skipped\": 1") != std::string::npos);
    CHECK(gaitevt("compare --dir " + p(d) + " --out-dir " + p(out) + " --methods zeni,nope").code == 2);
}

TEST_CASE("compare on an empty directory fails") {
    const auto d = dir("empty");
    CHECK(gaitevt("compare --dir " + p(d) + " --out-dir " + p(scratch() / "empty_out")).code == 2);
    CHECK(gaitevt("compare --dir " + p(scratch() / "does_not_exist") + " --out-dir " + p(scratch() / "x")).code == 2);
}

TEST_CASE("parallel compare is byte-identical to serial") {
    const auto d = synth_set("compare_jobs", 6);
    const auto serial = scratch() / "serial", parallel = scratch() / "parallel";
    REQUIRE(gaitevt("compare --dir " + p(d) + " --out-dir " + p(serial) + " --jobs 1").code == 0);
    REQUIRE(gaitevt("compare --dir " + p(d) + " --out-dir " + p(parallel) + " --jobs 4").code == 0);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(serial)) {
        CHECK(slurp(e.path()) == slurp(parallel / e.path().filename()));
        ++files;
    }
    CHECK(files == 2 + 2 * 7);
}

TEST_CASE("external events appear as an extra row") {
    const auto d = synth_set("external", 2);
    const auto ext = dir("external_events");
    // Externally produced events: here the truth itself, named after each trial.
    for (int i = 0; i < 2; ++i) {
        const auto id = "synth_" + std::to_string(100 + i);
        fs::copy_file(d / (id + "_truth.csv"), ext / (id + ".csv"));
    }
    const auto out = scratch() / "external_out";
    const auto r = gaitevt("compare --dir " + p(d) + " --out-dir " + p(out) + " --methods zeni --external lstm=" + p(ext));
    CHECK(r.code == 0);
    CHECK(r.out.find("\nlstm ") != std::string::npos);
    CHECK(fs::exists(out / "lstm_deltas.csv"));
}

TEST_CASE("argument errors exit 2") {
    CHECK(gaitevt("").code == 2);
    CHECK(gaitevt("frobnicate").code == 2);
    CHECK(gaitevt("synth --cycles abc --out-dir x").code == 2);
}
