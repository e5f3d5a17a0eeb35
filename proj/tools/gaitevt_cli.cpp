// SPDX-License-Identifier: Apache-2.0
// Command-line front end. Talks to the library through the C API only.
#include "gaitevt/gaitevt.h"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kFormat = 2, kDetection = 3 };

int exit_for(gaitevt_status s) {
    if (s == GAITEVT_OK)
        return kOk;
    return s == GAITEVT_ERR_DETECTION ? kDetection : kFormat;
}

template <typename T, void (*Destroy)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    Handle(Handle&& o) noexcept : p(o.p) { o.p = nullptr; }
    ~Handle() { Destroy(p); }
    T** out() { return &p; }
    T* get() const { return p; }
};

using Trial = Handle<gaitevt_trial, gaitevt_trial_destroy>;
using Events = Handle<gaitevt_events, gaitevt_events_destroy>;
using Config = Handle<gaitevt_config, gaitevt_config_destroy>;
using Report = Handle<gaitevt_report, gaitevt_report_destroy>;

int report_error(gaitevt_status s, const std::string& context = {}) {
    std::cerr << "error: " << (context.empty() ? "" : context + ": ") << gaitevt_last_error() << '\n';
    return exit_for(s);
}

std::string dashed(std::string s) {
    std::replace(s.begin(), s.end(), '_', '-');
    return s;
}

// --config file, then individual flags on top.
struct ConfigOptions {
    std::string path;
    std::map<std::string, double> values;
    std::map<std::string, CLI::Option*> opts;

    void attach(CLI::App* app) {
        app->add_option("--config", path, "DetectorConfig JSON file")->check(CLI::ExistingFile);
        for (std::size_t i = 0; i < gaitevt_config_field_count(); ++i) {
            const std::string name = gaitevt_config_field_name(i);
            values[name] = 0;
            opts[name] = app->add_option("--" + dashed(name), values[name], "override " + name)->group("Config");
        }
    }

    gaitevt_status build(Config& cfg) {
        gaitevt_status s = gaitevt_config_create(cfg.out());
        if (s != GAITEVT_OK)
            return s;
        if (!path.empty() && (s = gaitevt_config_load_json(cfg.get(), path.c_str())) != GAITEVT_OK)
            return s;
        for (const auto& [name, opt] : opts)
            if (opt->count() && (s = gaitevt_config_set(cfg.get(), name.c_str(), values[name])) != GAITEVT_OK)
                return s;
        return gaitevt_config_validate(cfg.get());
    }
};

void print_notes(const Events& ev) {
    for (std::size_t i = 0; i < gaitevt_events_note_count(ev.get()); ++i)
        std::cerr << "note: " << gaitevt_events_note(ev.get(), i) << '\n';
}

int cmd_detect(const std::string& method, const std::string& input, const std::string& out, ConfigOptions& co) {
    Config cfg;
    if (auto s = co.build(cfg); s != GAITEVT_OK)
        return report_error(s, "config");
    Trial trial;
    if (auto s = gaitevt_trial_load(input.c_str(), trial.out()); s != GAITEVT_OK)
        return report_error(s, input);
    Events ev;
    // "grf" extracts force-plate truth instead of running a kinematic method.
    const bool grf = method == "grf" || method == "GRF";
    if (auto s = grf ? gaitevt_grf_truth(trial.get(), cfg.get(), ev.out())
                     : gaitevt_detect(method.c_str(), trial.get(), cfg.get(), ev.out());
        s != GAITEVT_OK)
        return report_error(s, input);
    print_notes(ev);
    if (auto s = gaitevt_events_write(ev.get(), out.c_str()); s != GAITEVT_OK)
        return report_error(s);
    std::cout << gaitevt_events_count(ev.get()) << " events written to " << out << '\n';
    return kOk;
}

void print_summary(const gaitevt_report* r) {
    for (int k : {GAITEVT_HS, GAITEVT_TO}) {
        gaitevt_summary s;
        gaitevt_report_summary(r, k, &s);
        std::cout << (k == GAITEVT_HS ? "HS" : "TO") << ": matched " << s.n_matched << ", missed " << s.n_missed
                  << ", spurious " << s.n_spurious;
        if (s.mean_defined)
            std::cout << ", mean " << s.mean_ms << " ms";
        if (s.std_defined)
            std::cout << ", STD " << s.std_ms << " ms";
        if (s.rate_defined)
            std::cout << ", detection " << s.detection_rate * 100 << " %";
        std::cout << '\n';
    }
}

int cmd_evaluate(const std::string& pred, const std::string& truth, const std::string& out, const std::string& csv,
                 double window) {
    Events p, t;
    if (auto s = gaitevt_events_load(truth.c_str(), t.out()); s != GAITEVT_OK)
        return report_error(s, truth);
    if (auto s = gaitevt_events_load(pred.c_str(), p.out()); s != GAITEVT_OK)
        return report_error(s, pred);
    std::string method = "predicted";
    if (gaitevt_events_count(p.get()) > 0)
        method = fs::path(pred).stem().string();
    Report r;
    gaitevt_report_create(method.c_str(), r.out());
    if (auto s = gaitevt_report_add(r.get(), t.get(), p.get(), window, fs::path(truth).stem().string().c_str());
        s != GAITEVT_OK)
        return report_error(s);
    if (auto s = gaitevt_report_write_json(r.get(), out.c_str()); s != GAITEVT_OK)
        return report_error(s);
    if (!csv.empty())
        if (auto s = gaitevt_report_write_csv(r.get(), csv.c_str()); s != GAITEVT_OK)
            return report_error(s);
    print_summary(r.get());
    return kOk;
}

bool is_events_file(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line.rfind("side,kind", 0) == 0;
}

struct TrialOutcome {
    bool skipped = false;
    std::string warning;
    std::vector<Report> reports; // one per method
};

struct External {
    std::string name;
    fs::path dir; // holds <trial stem>.csv events files
};

TrialOutcome process_trial(const fs::path& path, const std::vector<std::string>& methods,
                           const std::vector<External>& externals, const gaitevt_config* cfg, double window) {
    TrialOutcome o;
    const std::string id = path.stem().string();
    Trial trial;
    if (gaitevt_trial_load(path.string().c_str(), trial.out()) != GAITEVT_OK) {
        o.skipped = true;
        o.warning = path.string() + ": " + gaitevt_last_error();
        return o;
    }
    Events truth;
    if (gaitevt_grf_truth(trial.get(), cfg, truth.out()) != GAITEVT_OK) {
        o.skipped = true;
        o.warning = path.string() + ": " + gaitevt_last_error();
        return o;
    }
    for (const auto& m : methods) {
        Report r;
        gaitevt_report_create(m.c_str(), r.out());
        Events ev;
        if (gaitevt_detect(m.c_str(), trial.get(), cfg, ev.out()) != GAITEVT_OK) {
            // Counted as all-missed rather than dropping the trial for every method.
            o.warning += (o.warning.empty() ? "" : "; ") + path.string() + " [" + m + "]: " + gaitevt_last_error();
            gaitevt_events_create(ev.out());
        }
        gaitevt_report_add(r.get(), truth.get(), ev.get(), window, id.c_str());
        o.reports.push_back(std::move(r));
    }
    for (const auto& x : externals) {
        Report r;
        gaitevt_report_create(x.name.c_str(), r.out());
        Events ev;
        const auto file = (x.dir / (id + ".csv")).string();
        if (gaitevt_events_load(file.c_str(), ev.out()) != GAITEVT_OK) {
            o.warning += (o.warning.empty() ? "" : "; ") + file + ": " + gaitevt_last_error();
            gaitevt_events_create(ev.out());
        }
        gaitevt_report_add(r.get(), truth.get(), ev.get(), window, id.c_str());
        o.reports.push_back(std::move(r));
    }
    return o;
}

int cmd_compare(const std::string& dir, std::string methods_arg, const std::vector<std::string>& external_args,
                const std::string& out_dir, int jobs, double window, ConfigOptions& co) {
    Config cfg;
    if (auto s = co.build(cfg); s != GAITEVT_OK)
        return report_error(s, "config");
    std::vector<std::string> methods;
    if (methods_arg.empty() || methods_arg == "all") {
        for (std::size_t i = 0; i < gaitevt_method_count(); ++i)
            methods.emplace_back(gaitevt_method_name(i));
    } else {
        std::stringstream ss(methods_arg);
        for (std::string m; std::getline(ss, m, ',');) {
            std::transform(m.begin(), m.end(), m.begin(), [](unsigned char c) { return char(std::tolower(c)); });
            bool known = false;
            for (std::size_t i = 0; i < gaitevt_method_count(); ++i)
                known = known || m == gaitevt_method_name(i);
            if (!known) {
                std::string list;
                for (std::size_t i = 0; i < gaitevt_method_count(); ++i)
                    list += (i ? ", " : "") + std::string(gaitevt_method_name(i));
                std::cerr << "error: unknown method '" << m << "'; valid methods: " << list << '\n';
                return kFormat;
            }
            methods.push_back(m);
        }
    }

    std::vector<External> externals;
    for (const auto& a : external_args) {
        const auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == a.size()) {
            std::cerr << "error: --external expects NAME=DIR, got '" << a << "'\n";
            return kFormat;
        }
        externals.push_back({a.substr(0, eq), a.substr(eq + 1)});
    }

    std::error_code ec;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir, ec))
        if (e.is_regular_file() && e.path().extension() == ".csv" && !is_events_file(e.path()))
            files.push_back(e.path());
    if (ec) {
        std::cerr << "error: cannot read directory " << dir << ": " << ec.message() << '\n';
        return kFormat;
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << "error: no trial files in " << dir << '\n';
        return kFormat;
    }

    std::vector<TrialOutcome> outcomes(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < files.size();)
            outcomes[i] = process_trial(files[i], methods, externals, cfg.get(), window);
    };
    const int n_threads = std::max(1, std::min<int>(jobs, int(files.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();

    // Merge in sorted-path order so the output does not depend on --jobs.
    std::vector<std::string> names = methods;
    for (const auto& x : externals)
        names.push_back(x.name);
    std::vector<Report> merged(names.size());
    for (std::size_t m = 0; m < names.size(); ++m)
        gaitevt_report_create(names[m].c_str(), merged[m].out());
    std::size_t skipped = 0;
    for (const auto& o : outcomes) {
        if (!o.warning.empty())
            std::cerr << "warning: " << (o.skipped ? "skipped " : "") << o.warning << '\n';
        if (o.skipped) {
            ++skipped;
            continue;
        }
        for (std::size_t m = 0; m < names.size(); ++m)
            gaitevt_report_merge(merged[m].get(), o.reports[m].get());
    }
    if (skipped == files.size()) {
        std::cerr << "error: no usable trials in " << dir << '\n';
        return kFormat;
    }
    for (auto& r : merged)
        gaitevt_report_add_skipped(r.get(), skipped);

    fs::create_directories(out_dir, ec);
    std::vector<const gaitevt_report*> ptrs;
    for (auto& r : merged)
        ptrs.push_back(r.get());
    std::size_t needed = 0;
    gaitevt_compare_table(ptrs.data(), ptrs.size(), nullptr, 0, &needed);
    std::string table(needed, '\0');
    gaitevt_compare_table(ptrs.data(), ptrs.size(), table.data(), table.size(), &needed);
    table.resize(needed - 1);
    {
        std::ofstream t(fs::path(out_dir) / "table.txt", std::ios::binary);
        t << table;
        if (!t) {
            std::cerr << "error: cannot write " << (fs::path(out_dir) / "table.txt").string() << '\n';
            return kFormat;
        }
    }
    if (auto s = gaitevt_compare_write_json(ptrs.data(), ptrs.size(), (fs::path(out_dir) / "compare.json").string().c_str());
        s != GAITEVT_OK)
        return report_error(s);
    for (std::size_t m = 0; m < names.size(); ++m) {
        const auto base = fs::path(out_dir) / names[m];
        if (auto s = gaitevt_report_write_csv(ptrs[m], (base.string() + "_deltas.csv").c_str()); s != GAITEVT_OK)
            return report_error(s);
        if (auto s = gaitevt_report_write_json(ptrs[m], (base.string() + "_report.json").c_str()); s != GAITEVT_OK)
            return report_error(s);
    }
    std::cout << table;
    return kOk;
}

int cmd_synth(gaitevt_synth_spec spec, int count, const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "error: cannot create " << out_dir << ": " << ec.message() << '\n';
        return kFormat;
    }
    const uint64_t first = spec.seed;
    for (int i = 0; i < count; ++i) {
        spec.seed = first + uint64_t(i);
        const std::string id = "synth_" + std::to_string(spec.seed);
        Trial trial;
        Events truth;
        if (auto s = gaitevt_synth_generate(&spec, id.c_str(), trial.out(), truth.out()); s != GAITEVT_OK)
            return report_error(s, "synth");
        const auto base = fs::path(out_dir) / id;
        if (auto s = gaitevt_trial_write(trial.get(), (base.string() + ".csv").c_str()); s != GAITEVT_OK)
            return report_error(s);
        if (auto s = gaitevt_events_write(truth.get(), (base.string() + "_truth.csv").c_str()); s != GAITEVT_OK)
            return report_error(s);
        std::cout << base.string() << ".csv\n";
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gait event detection from marker trajectories"};
    app.require_subcommand(1);
    std::ostringstream version;
    version << "gaitevt " << gaitevt_version() << "\n"
            << "trial csv schema 1\nevents csv schema 1\nreport json schema " << gaitevt_report_schema();
    app.set_version_flag("--version", version.str());

    int code = kOk;

    auto* det = app.add_subcommand("detect", "Detect HS/TO events in one trial");
    std::string method, input, out;
    ConfigOptions det_cfg;
    det->add_option("--method", method, "zeni, desailly, oconnor, ghoussayni, hreljac, hsue, bonci, or grf")->required();
    det->add_option("--input", input, "Trial CSV")->required();
    det->add_option("--out", out, "Events CSV to write")->required();
    det_cfg.attach(det);
    det->callback([&] { code = cmd_detect(method, input, out, det_cfg); });

    auto* ev = app.add_subcommand("evaluate", "Compare predicted events against truth");
    std::string pred, truth, report_out, csv_out;
    double window = 0;
    ev->add_option("--pred", pred, "Predicted events CSV")->required();
    ev->add_option("--truth", truth, "Truth events CSV")->required();
    ev->add_option("--out", report_out, "Report JSON to write")->required();
    ev->add_option("--csv", csv_out, "Optional delta CSV");
    ev->add_option("--window", window, "Matching window in s (default: half the median truth period)");
    ev->callback([&] { code = cmd_evaluate(pred, truth, report_out, csv_out, window); });

    auto* cmp = app.add_subcommand("compare", "Run several methods over a directory of trials");
    std::string dir, methods = "all", cmp_out;
    std::vector<std::string> externals;
    int jobs = 1;
    double cmp_window = 0;
    ConfigOptions cmp_cfg;
    cmp->add_option("--dir", dir, "Directory with trial CSVs")->required();
    cmp->add_option("--methods", methods, "Comma-separated method list or 'all'");
    cmp->add_option("--external", externals, "Extra row NAME=DIR from events files named after each trial");
    cmp->add_option("--out-dir", cmp_out, "Output directory")->required();
    cmp->add_option("--jobs", jobs, "Parallel trials")->check(CLI::PositiveNumber);
    cmp->add_option("--window", cmp_window, "Matching window in s");
    cmp_cfg.attach(cmp);
    cmp->callback([&] { code = cmd_compare(dir, methods, externals, cmp_out, jobs, cmp_window, cmp_cfg); });

    auto* syn = app.add_subcommand("synth", "Write synthetic trials with truth events");
    gaitevt_synth_spec spec;
    gaitevt_synth_spec_default(&spec);
    int count = 1;
    std::string syn_out;
    syn->add_option("--cycles", spec.n_cycles, "Gait cycles per side")->capture_default_str();
    syn->add_option("--period", spec.gait_period, "Gait period, s")->capture_default_str();
    syn->add_option("--speed", spec.walking_speed, "Walking speed, m/s")->capture_default_str();
    syn->add_option("--seed", spec.seed, "Seed of the first trial")->capture_default_str();
    syn->add_option("--stance", spec.stance_fraction, "Stance fraction")->capture_default_str();
    syn->add_option("--step-height", spec.step_height, "Swing height, m")->capture_default_str();
    syn->add_option("--sample-rate", spec.sample_rate, "Hz")->capture_default_str();
    syn->add_option("--noise", spec.noise_std, "Marker noise STD, m")->capture_default_str();
    syn->add_option("--phase-offset", spec.phase_offset_lr, "Right vs left phase, cycles")->capture_default_str();
    syn->add_option("--count", count, "Number of trials (consecutive seeds)")->check(CLI::PositiveNumber);
    syn->add_option("--out-dir", syn_out, "Output directory")->required();
    syn->callback([&] { code = cmd_synth(spec, count, syn_out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kFormat;
    }
    return code;
}
