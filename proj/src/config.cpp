// Copyright 2026 The kpo-aqec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kpo/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "kpo/spectrum.hpp"
#include "kpo/units.hpp"

namespace kpo::config {

namespace {

const char* type_name(const Json& v) {
    if (v.is_number_integer()) return "integer";
    if (v.is_number()) return "number";
    if (v.is_string()) return "string";
    if (v.is_boolean()) return "boolean";
    if (v.is_array()) return "array";
    if (v.is_object()) return "object";
    return "null";
}

// Whether `value` may replace `def`. A null default stands for an optional
// number; an empty array default for a list of numbers.
bool compatible(const Json& def, const Json& value) {
    if (def.is_null()) return value.is_null() || value.is_number();
    if (def.is_number_integer()) return value.is_number_integer();
    if (def.is_number()) return value.is_number();
    if (def.is_array()) {
        if (!value.is_array()) return false;
        const bool strings = !def.empty() && def.front().is_string();
        for (const Json& e : value) {
            if (strings ? !e.is_string() : !e.is_number()) return false;
        }
        return true;
    }
    return def.type() == value.type();
}

std::string expected(const Json& def) {
    if (def.is_null()) return "number or null";
    if (def.is_array()) return !def.empty() && def.front().is_string() ? "array of strings" : "array of numbers";
    return type_name(def);
}

void overlay(Json& into, const Json& user, const std::string& prefix, std::vector<std::string>& issues) {
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (!into.contains(it.key())) {
            issues.push_back("unknown key '" + path + "'");
            continue;
        }
        Json& slot = into[it.key()];
        if (slot.is_object()) {
            if (!it.value().is_object()) {
                issues.push_back("'" + path + "' must be an object");
            } else {
                overlay(slot, it.value(), path, issues);
            }
        } else if (!compatible(slot, it.value())) {
            issues.push_back("'" + path + "' must be " + expected(slot) + ", got " + type_name(it.value()));
        } else {
            slot = it.value();
        }
    }
}

const Json& at(const Json& cfg, std::string_view section, std::string_view key) {
    const std::string s(section);
    const std::string k(key);
    if (!cfg.contains(s) || !cfg[s].contains(k)) {
        throw Error(ErrorKind::config, "missing config key '" + s + "." + k + "'");
    }
    return cfg[s][k];
}

double num(const Json& cfg, std::string_view section, std::string_view key) {
    return at(cfg, section, key).get<double>();
}

bool strictly_increasing(const Json& list) {
    for (std::size_t i = 1; i < list.size(); ++i) {
        if (!(list[i].get<double>() > list[i - 1].get<double>())) return false;
    }
    return true;
}

bool known_state(const std::string& s) {
    static const std::set<std::string> names{"0L", "1L", "+L", "-L", "0mod", "1mod", "2mod", "3mod"};
    if (names.count(s)) return true;
    if (s.rfind("fock:", 0) != 0 || s.size() == 5) return false;
    for (std::size_t i = 5; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
    }
    return true;
}

}  // namespace

Json defaults() {
    Json j;
    j["kpo"] = {{"omega_mhz", 2980.0},  {"kerr_mhz", 20.0}, {"delta_mhz", 30.0},
                {"pump_mhz", 5.5405},   {"t1_us", 50.0},    {"n_th", 0.0},
                {"gamma_phi_per_us", 0.0}};
    j["ancilla"] = {{"omega_mhz", 4000.0}, {"g_mhz", 7.0}, {"gamma_mhz", 0.557}};
    j["correction"] = {{"amplitude_mhz", 0.25}, {"offset_mhz", 0.36}};
    j["run"] = {{"dim_a", 30},           {"dim_b", 3},
                {"frame", "rwa"},        {"propagation", "interaction"},
                {"rtol", 1e-8},          {"atol", 1e-8},
                {"t_flip_us", 100.0},    {"sample_dt_us", 0.05},
                {"fit_discard_us", 0.5}, {"max_tail_weight", 1e-5},
                {"jobs", 1}};
    j["spectrum"] = {{"p_over_k_min", 0.0}, {"p_over_k_max", 0.5}, {"points", 101},
                     {"search_min", 0.05},  {"search_max", 0.35}};
    j["wigner"] = {{"points", 101},
                   {"half_width", nullptr},
                   {"states", {"0mod", "1mod", "2mod", "3mod"}}};
    j["sweep"] = {{"amplitude_mhz", nullptr},
                  {"t_eval_us", 10.0},
                  {"points", 61},
                  {"offsets_mhz", Json::array()}};
    j["flip_times"] = {{"four_state", false}};
    j["leakage"] = {{"t_final_us", 100.0}};
    j["optimize"] = {{"a_cor_mhz", {0.125, 0.25, 0.5, 1.0}},
                     {"gamma_an_mhz", {0.25, 0.557, 1.0, 2.0}}};
    j["pump_study"] = {{"g_mhz", {2.0, 4.0, 7.0}},
                       {"pump_offsets_mhz", {0.0, 0.25, 0.5, 1.0}},
                       {"sweep_offsets_mhz", {-0.4, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6}},
                       {"t_sweep_us", 10.0}};
    j["noise"] = {{"n_th", {0.0, 0.005, 0.01, 0.02}}, {"gamma_phi_per_us", {0.001, 0.005, 0.01}}};
    j["reset"] = {{"target", 0},
                  {"initial_states", {"0L", "1L", "0mod", "2mod", "fock:0"}},
                  {"t_final_us", 100.0},
                  {"sample_dt_us", 0.1},
                  {"a_cor_mhz", nullptr},
                  {"a_reset_mhz", nullptr}};
    j["xgate"] = {{"sign", 1}, {"amplitude_mhz", 0.1}, {"t_final_us", 10.0}, {"sample_dt_us", 0.01}};
    j["break_even"] = {{"t_bit_us", nullptr}, {"t_phase_us", nullptr}};
    return j;
}

Json merge(const Json& user, std::vector<std::string>& issues) {
    Json cfg = defaults();
    if (!user.is_object()) {
        issues.push_back("config root must be an object");
        return cfg;
    }
    overlay(cfg, user, "", issues);
    return cfg;
}

Json read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::config, "cannot open config file '" + path.string() + "'");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorKind::config, "'" + path.string() + "' is not valid JSON: " + e.what());
    }
    // A run manifest carries the resolved config next to the tool name.
    if (doc.is_object() && doc.contains("tool") && doc.contains("config")) return doc["config"];
    return doc;
}

void apply_override(Json& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw Error(ErrorKind::config, "override '" + std::string(assignment) + "' is not key=value");
    }
    const std::string key(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));
    Json value;
    try {
        value = Json::parse(text);
    } catch (const Json::parse_error&) {
        value = text;
    }

    Json* slot = &cfg;
    std::stringstream parts(key);
    std::string part;
    while (std::getline(parts, part, '.')) {
        if (!slot->is_object() || !slot->contains(part)) {
            throw Error(ErrorKind::config, "unknown key '" + key + "'");
        }
        slot = &(*slot)[part];
    }
    const Json def = [&] {
        const Json d = defaults();
        const Json* s = &d;
        std::stringstream again(key);
        while (std::getline(again, part, '.')) s = &(*s)[part];
        return *s;
    }();
    if (def.is_object()) throw Error(ErrorKind::config, "'" + key + "' is a section, not a value");
    if (!compatible(def, value)) {
        throw Error(ErrorKind::config,
                    "'" + key + "' must be " + expected(def) + ", got " + type_name(value));
    }
    *slot = std::move(value);
}

std::vector<std::string> violations(const Json& cfg) {
    std::vector<std::string> v;
    auto need = [&](bool ok, const std::string& what) {
        if (!ok) v.push_back(what);
    };
    auto positive = [&](std::string_view s, std::string_view k) {
        need(num(cfg, s, k) > 0.0, std::string(s) + "." + std::string(k) + " > 0");
    };
    auto non_negative = [&](std::string_view s, std::string_view k) {
        need(num(cfg, s, k) >= 0.0, std::string(s) + "." + std::string(k) + " >= 0");
    };
    auto sorted_list = [&](std::string_view s, std::string_view k, bool allow_empty) {
        const Json& list = at(cfg, s, k);
        const std::string name = std::string(s) + "." + std::string(k);
        need(allow_empty || !list.empty(), name + " must not be empty");
        need(strictly_increasing(list), name + " must be strictly increasing");
    };

    positive("kpo", "omega_mhz");
    need(num(cfg, "kpo", "kerr_mhz") > 0.0, "kerr > 0");
    non_negative("kpo", "pump_mhz");
    const Json& t1 = at(cfg, "kpo", "t1_us");
    need(t1.is_null() || t1.get<double>() > 0.0, "kpo.t1_us > 0 (null: lossless)");
    non_negative("kpo", "n_th");
    non_negative("kpo", "gamma_phi_per_us");
    positive("ancilla", "omega_mhz");
    non_negative("ancilla", "g_mhz");
    non_negative("ancilla", "gamma_mhz");
    non_negative("correction", "amplitude_mhz");

    const int dim_a = at(cfg, "run", "dim_a").get<int>();
    need(dim_a >= 8, "run.dim_a >= 8");
    need(at(cfg, "run", "dim_b").get<int>() >= 2, "run.dim_b >= 2");
    for (const char* key : {"frame", "propagation"}) {
        const std::string s = at(cfg, "run", key).get<std::string>();
        const bool ok = std::string(key) == "frame" ? (s == "rwa" || s == "full")
                                                    : (s == "interaction" || s == "direct");
        need(ok, std::string("run.") + key + " has unknown value '" + s + "'");
    }
    positive("run", "rtol");
    positive("run", "atol");
    positive("run", "t_flip_us");
    positive("run", "sample_dt_us");
    need(num(cfg, "run", "sample_dt_us") <= num(cfg, "run", "t_flip_us"), "run.sample_dt_us <= run.t_flip_us");
    need(num(cfg, "run", "fit_discard_us") >= 0.0 &&
             num(cfg, "run", "fit_discard_us") < num(cfg, "run", "t_flip_us"),
         "run.fit_discard_us in [0, run.t_flip_us)");
    positive("run", "max_tail_weight");
    need(at(cfg, "run", "jobs").get<int>() >= 1, "run.jobs >= 1");

    need(num(cfg, "spectrum", "p_over_k_max") > num(cfg, "spectrum", "p_over_k_min"),
         "spectrum.p_over_k_max > spectrum.p_over_k_min");
    non_negative("spectrum", "p_over_k_min");
    need(at(cfg, "spectrum", "points").get<int>() >= 2, "spectrum.points >= 2");
    need(num(cfg, "spectrum", "search_max") > num(cfg, "spectrum", "search_min") &&
             num(cfg, "spectrum", "search_min") > 0.0,
         "0 < spectrum.search_min < spectrum.search_max");

    need(at(cfg, "wigner", "points").get<int>() >= 2, "wigner.points >= 2");
    const Json& hw = at(cfg, "wigner", "half_width");
    need(hw.is_null() || hw.get<double>() > 0.0, "wigner.half_width > 0 (null: automatic)");
    for (const Json& s : at(cfg, "wigner", "states")) {
        need(known_state(s.get<std::string>()), "wigner.states: unknown state '" + s.get<std::string>() + "'");
    }

    const Json& amp = at(cfg, "sweep", "amplitude_mhz");
    need(amp.is_null() || amp.get<double>() >= 0.0, "sweep.amplitude_mhz >= 0");
    positive("sweep", "t_eval_us");
    if (at(cfg, "sweep", "offsets_mhz").empty()) {
        need(at(cfg, "sweep", "points").get<int>() >= 9, "sweep.points >= 9");
    } else {
        need(at(cfg, "sweep", "offsets_mhz").size() >= 3, "sweep.offsets_mhz needs >= 3 points");
        sorted_list("sweep", "offsets_mhz", false);
    }

    positive("leakage", "t_final_us");
    sorted_list("optimize", "a_cor_mhz", false);
    sorted_list("optimize", "gamma_an_mhz", false);
    for (const Json& x : at(cfg, "optimize", "a_cor_mhz")) need(x.get<double>() >= 0.0, "optimize.a_cor_mhz >= 0");
    for (const Json& x : at(cfg, "optimize", "gamma_an_mhz")) need(x.get<double>() >= 0.0, "optimize.gamma_an_mhz >= 0");

    sorted_list("pump_study", "g_mhz", false);
    sorted_list("pump_study", "pump_offsets_mhz", true);
    sorted_list("pump_study", "sweep_offsets_mhz", false);
    need(at(cfg, "pump_study", "sweep_offsets_mhz").size() >= 3, "pump_study.sweep_offsets_mhz needs >= 3 points");
    positive("pump_study", "t_sweep_us");

    sorted_list("noise", "n_th", true);
    sorted_list("noise", "gamma_phi_per_us", true);
    for (const Json& x : at(cfg, "noise", "n_th")) need(x.get<double>() >= 0.0, "noise.n_th >= 0");
    for (const Json& x : at(cfg, "noise", "gamma_phi_per_us")) need(x.get<double>() >= 0.0, "noise.gamma_phi_per_us >= 0");

    const int target = at(cfg, "reset", "target").get<int>();
    need(target == 0 || target == 1, "reset.target in {0, 1}");
    need(!at(cfg, "reset", "initial_states").empty(), "reset.initial_states must not be empty");
    for (const Json& s : at(cfg, "reset", "initial_states")) {
        const std::string name = s.get<std::string>();
        need(known_state(name), "reset.initial_states: unknown state '" + name + "'");
        if (name.rfind("fock:", 0) == 0 && known_state(name)) {
            need(std::stol(name.substr(5)) < dim_a, "reset.initial_states: '" + name + "' exceeds dim_a");
        }
    }
    positive("reset", "t_final_us");
    positive("reset", "sample_dt_us");
    for (const char* key : {"a_cor_mhz", "a_reset_mhz"}) {
        const Json& x = at(cfg, "reset", key);
        need(x.is_null() || x.get<double>() >= 0.0, std::string("reset.") + key + " >= 0");
    }

    const int sign = at(cfg, "xgate", "sign").get<int>();
    need(sign == 1 || sign == -1, "xgate.sign in {-1, +1}");
    non_negative("xgate", "amplitude_mhz");
    positive("xgate", "t_final_us");
    positive("xgate", "sample_dt_us");

    for (const char* key : {"t_bit_us", "t_phase_us"}) {
        const Json& x = at(cfg, "break_even", key);
        need(x.is_null() || x.get<double>() > 0.0, std::string("break_even.") + key + " > 0");
    }

    // Truncation sanity needs a valid physical block.
    if (v.empty()) {
        try {
            const experiments::ExperimentConfig e = to_experiment(cfg);
            (void)spectrum::information_space(e.params, e.dim_a, e.max_tail_weight);
        } catch (const std::exception& e) {
            v.push_back(std::string("truncation: ") + e.what());
        }
    }
    return v;
}

experiments::ExperimentConfig to_experiment(const Json& cfg) {
    using namespace units;
    experiments::ExperimentConfig e;
    e.params = model::SystemParams::from_lab(
        mhz(num(cfg, "kpo", "omega_mhz")), mhz(num(cfg, "kpo", "kerr_mhz")), mhz(num(cfg, "kpo", "delta_mhz")),
        mhz(num(cfg, "kpo", "pump_mhz")), mhz(num(cfg, "ancilla", "omega_mhz")), mhz(num(cfg, "ancilla", "g_mhz")));
    const Json& t1 = at(cfg, "kpo", "t1_us");
    e.noise.gamma_kpo = t1.is_null() ? 0.0 : rate_from_us(t1.get<double>());
    e.noise.n_th = num(cfg, "kpo", "n_th");
    e.noise.gamma_phi = num(cfg, "kpo", "gamma_phi_per_us") * 1e6;
    e.noise.gamma_an = mhz(num(cfg, "ancilla", "gamma_mhz"));
    e.correction = {mhz(num(cfg, "correction", "amplitude_mhz")),
                    e.params.delta_an + mhz(num(cfg, "correction", "offset_mhz")),
                    model::ToneKind::correction};
    e.dim_a = at(cfg, "run", "dim_a").get<int>();
    e.dim_b = at(cfg, "run", "dim_b").get<int>();
    e.frame = model::frame_from_string(at(cfg, "run", "frame").get<std::string>());
    const std::string prop = at(cfg, "run", "propagation").get<std::string>();
    if (prop != "interaction" && prop != "direct") {
        throw Error(ErrorKind::config, "unknown propagation '" + prop + "'");
    }
    e.propagation = prop == "direct" ? lindblad::Propagation::direct : lindblad::Propagation::interaction_picture;
    e.tolerances = {num(cfg, "run", "rtol"), num(cfg, "run", "atol")};
    e.max_tail_weight = num(cfg, "run", "max_tail_weight");
    e.t_flip = us(num(cfg, "run", "t_flip_us"));
    e.sample_dt = us(num(cfg, "run", "sample_dt_us"));
    e.fit_discard = us(num(cfg, "run", "fit_discard_us"));
    e.jobs = at(cfg, "run", "jobs").get<int>();
    return e;
}

double mhz_at(const Json& cfg, std::string_view section, std::string_view key) {
    return units::mhz(num(cfg, section, key));
}

double us_at(const Json& cfg, std::string_view section, std::string_view key) {
    return units::us(num(cfg, section, key));
}

std::vector<double> mhz_list(const Json& cfg, std::string_view section, std::string_view key) {
    std::vector<double> out;
    for (const Json& x : at(cfg, section, key)) out.push_back(units::mhz(x.get<double>()));
    return out;
}

}  // namespace kpo::config
