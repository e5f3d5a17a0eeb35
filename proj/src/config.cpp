// SPDX-License-Identifier: Apache-2.0
#include "gaitevt/config.hpp"

#include "gaitevt/error.hpp"
#include "text_util.hpp"

#include <cmath>
#include <functional>
#include <json.hpp>

namespace gaitevt {

namespace {

struct Field {
    const char* name;
    std::function<double(const DetectorConfig&)> get;
    std::function<void(DetectorConfig&, double)> set;
    bool boolean = false;
    bool integer = false;
};

#define GAITEVT_DOUBLE(f) Field{#f, [](const DetectorConfig& c) { return c.f; }, [](DetectorConfig& c, double v) { c.f = v; }}
#define GAITEVT_INT(f)                                                                                                 \
    Field{#f, [](const DetectorConfig& c) { return double(c.f); },                                                    \
          [](DetectorConfig& c, double v) { c.f = int(std::lround(v)); }, false, true}
#define GAITEVT_BOOL(f)                                                                                                \
    Field{#f, [](const DetectorConfig& c) { return c.f ? 1.0 : 0.0; },                                                 \
          [](DetectorConfig& c, double v) { c.f = v != 0; }, true, false}

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        GAITEVT_DOUBLE(ghoussayni_speed_threshold),
        GAITEVT_DOUBLE(grf_threshold),
        GAITEVT_DOUBLE(desailly_hs_cutoff_mult),
        GAITEVT_DOUBLE(desailly_to_cutoff_mult),
        GAITEVT_DOUBLE(bonci_rearfoot_mult),
        GAITEVT_DOUBLE(bonci_mult),
        GAITEVT_DOUBLE(smoothing_cutoff),
        GAITEVT_DOUBLE(min_event_separation_frac),
        GAITEVT_DOUBLE(debounce),
        Field{"extrema_prominence", [](const DetectorConfig& c) { return c.extrema_prominence.value_or(0.0); },
              [](DetectorConfig& c, double v) {
                  if (v > 0)
                      c.extrema_prominence = v;
                  else
                      c.extrema_prominence.reset();
              }},
        GAITEVT_INT(filter_order),
        GAITEVT_INT(desailly_filter_order),
        GAITEVT_INT(max_gap_frames),
        GAITEVT_BOOL(subframe_refinement),
        GAITEVT_BOOL(grf_lowpass),
        GAITEVT_DOUBLE(grf_lowpass_cutoff),
    };
    return f;
}

#undef GAITEVT_DOUBLE
#undef GAITEVT_INT
#undef GAITEVT_BOOL

const Field* lookup(const std::string& key) {
    for (const auto& f : fields())
        if (key == f.name)
            return &f;
    return nullptr;
}

void require(bool ok, const char* field, const std::string& rule, double value) {
    if (!ok)
        throw ConfigError(std::string("config error: ") + field + " must be " + rule + ", got " +
                          detail::format_double(value));
}

} // namespace

void validate(const DetectorConfig& c) {
    auto positive = [](const char* n, double v) { require(std::isfinite(v) && v > 0, n, "> 0", v); };
    auto mult = [](const char* n, double v) { require(v > 0 && v <= 2, n, "in (0, 2]", v); };
    positive("ghoussayni_speed_threshold", c.ghoussayni_speed_threshold);
    positive("grf_threshold", c.grf_threshold);
    positive("smoothing_cutoff", c.smoothing_cutoff);
    positive("grf_lowpass_cutoff", c.grf_lowpass_cutoff);
    mult("desailly_hs_cutoff_mult", c.desailly_hs_cutoff_mult);
    mult("desailly_to_cutoff_mult", c.desailly_to_cutoff_mult);
    mult("bonci_rearfoot_mult", c.bonci_rearfoot_mult);
    mult("bonci_mult", c.bonci_mult);
    require(c.min_event_separation_frac > 0 && c.min_event_separation_frac < 1, "min_event_separation_frac",
            "in (0, 1)", c.min_event_separation_frac);
    require(std::isfinite(c.debounce) && c.debounce >= 0, "debounce", ">= 0", c.debounce);
    if (c.extrema_prominence)
        positive("extrema_prominence", *c.extrema_prominence);
    require(c.filter_order >= 1 && c.filter_order <= 10, "filter_order", "in [1, 10]", c.filter_order);
    require(c.desailly_filter_order >= 1 && c.desailly_filter_order <= 10, "desailly_filter_order", "in [1, 10]",
            c.desailly_filter_order);
    require(c.max_gap_frames >= 0, "max_gap_frames", ">= 0", c.max_gap_frames);
}

const std::vector<std::string>& config_field_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& f : fields())
            v.emplace_back(f.name);
        return v;
    }();
    return names;
}

void set_field(DetectorConfig& cfg, const std::string& key, double value) {
    const Field* f = lookup(key);
    if (!f)
        throw ConfigError("config error: unknown field '" + key + "'");
    if (!std::isfinite(value))
        throw ConfigError("config error: " + key + " must be finite");
    f->set(cfg, value);
}

double get_field(const DetectorConfig& cfg, const std::string& key) {
    const Field* f = lookup(key);
    if (!f)
        throw ConfigError("config error: unknown field '" + key + "'");
    return f->get(cfg);
}

void apply_json(DetectorConfig& cfg, const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object())
        throw FormatError("config parse error: top level must be an object");
    DetectorConfig next = cfg;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const Field* f = lookup(it.key());
        if (!f)
            throw ConfigError("config error: unknown field '" + it.key() + "'");
        const auto& v = it.value();
        if (it.key() == "extrema_prominence" && (v.is_null() || (v.is_string() && v.get<std::string>() == "adaptive"))) {
            next.extrema_prominence.reset();
            continue;
        }
        if (f->boolean && v.is_boolean()) {
            f->set(next, v.get<bool>() ? 1.0 : 0.0);
            continue;
        }
        if (!v.is_number())
            throw ConfigError("config error: " + it.key() + " must be a number");
        double d = v.get<double>();
        if (it.key() == "extrema_prominence" && !(d > 0))
            throw ConfigError("config error: extrema_prominence must be > 0 or \"adaptive\"");
        f->set(next, d);
    }
    validate(next);
    cfg = next;
}

DetectorConfig load_config(const std::string& path, const DetectorConfig& base) {
    DetectorConfig cfg = base;
    apply_json(cfg, detail::read_file(path));
    return cfg;
}

std::string config_to_json(const DetectorConfig& cfg) {
    nlohmann::ordered_json j;
    for (const auto& f : fields()) {
        if (std::string(f.name) == "extrema_prominence") {
            if (cfg.extrema_prominence)
                j[f.name] = *cfg.extrema_prominence;
            else
                j[f.name] = "adaptive";
        } else if (f.boolean) {
            j[f.name] = f.get(cfg) != 0;
        } else if (f.integer) {
            j[f.name] = int(f.get(cfg));
        } else {
            j[f.name] = f.get(cfg);
        }
    }
    return j.dump(2) + "\n";
}

} // namespace gaitevt
