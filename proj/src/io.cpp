// io.cpp - file artifacts and strict config parsing
#include "nanolase/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nanolase/errors.hpp"

namespace nanolase::io {

namespace {

double get_number(const json& j, const char* key) {
    if (!j.at(key).is_number())
        throw ConfigError(std::string("config key '") + key + "' must be a number");
    return j.at(key).get<double>();
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const char* section) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw ConfigError(std::string("unknown key '") + it.key() + "' in " +
                              section);
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
    }
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json params_to_json(const LaserParams& p) {
    return json{{"F_cav", p.F_cav},
                {"eta", p.eta},
                {"tau_relax_s", p.tau_relax},
                {"tau_sp_s", p.tau_sp},
                {"tau_nr_G_s", p.tau_nr_G},
                {"tau_nr_E_s", p.tau_nr_E},
                {"C_A_m6_per_s", p.C_A},
                {"g0_per_m", p.g0},
                {"N_tr_per_m3", p.N_tr},
                {"beta_c", p.beta_c},
                {"Q", p.Q},
                {"lambda_cav_m", p.lambda_cav},
                {"lambda_pump_m", p.lambda_pump},
                {"V_a_m3", p.V_a},
                {"V_mode_m3", p.V_mode},
                {"v_g_m_per_s", p.v_g},
                {"kappa_out", p.kappa_out}};
}

LaserParams params_from_json(const json& j, const LaserParams& base) {
    if (!j.is_object()) throw ConfigError("'params' must be an object");
    reject_unknown_keys(j,
                        {"F_cav", "eta", "tau_relax_s", "tau_sp_s", "tau_nr_G_s",
                         "tau_nr_E_s", "C_A_m6_per_s", "g0_per_m", "N_tr_per_m3",
                         "beta_c", "Q", "lambda_cav_m", "lambda_pump_m", "V_a_m3",
                         "V_mode_m3", "v_g_m_per_s", "kappa_out"},
                        "params");
    LaserParams p = base;
    if (j.contains("F_cav")) p.F_cav = get_number(j, "F_cav");
    if (j.contains("eta")) p.eta = get_number(j, "eta");
    if (j.contains("tau_relax_s")) p.tau_relax = get_number(j, "tau_relax_s");
    if (j.contains("tau_sp_s")) p.tau_sp = get_number(j, "tau_sp_s");
    if (j.contains("tau_nr_G_s")) p.tau_nr_G = get_number(j, "tau_nr_G_s");
    if (j.contains("tau_nr_E_s")) p.tau_nr_E = get_number(j, "tau_nr_E_s");
    if (j.contains("C_A_m6_per_s")) p.C_A = get_number(j, "C_A_m6_per_s");
    if (j.contains("g0_per_m")) p.g0 = get_number(j, "g0_per_m");
    if (j.contains("N_tr_per_m3")) p.N_tr = get_number(j, "N_tr_per_m3");
    if (j.contains("beta_c")) p.beta_c = get_number(j, "beta_c");
    if (j.contains("Q")) p.Q = get_number(j, "Q");
    if (j.contains("lambda_cav_m")) p.lambda_cav = get_number(j, "lambda_cav_m");
    if (j.contains("lambda_pump_m")) p.lambda_pump = get_number(j, "lambda_pump_m");
    if (j.contains("V_a_m3")) p.V_a = get_number(j, "V_a_m3");
    if (j.contains("V_mode_m3")) p.V_mode = get_number(j, "V_mode_m3");
    if (j.contains("v_g_m_per_s")) p.v_g = get_number(j, "v_g_m_per_s");
    if (j.contains("kappa_out")) p.kappa_out = get_number(j, "kappa_out");
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return p;
}

json pump_to_json(const PumpProfile& pump) {
    switch (pump.kind) {
        case PumpProfile::Kind::cw:
            return json{{"type", "cw"}, {"power_W", pump.power}};
        case PumpProfile::Kind::gaussian_train:
            return json{{"type", "gaussian_train"},
                        {"avg_power_W", pump.avg_power},
                        {"fwhm_s", pump.fwhm},
                        {"period_s", pump.period}};
        case PumpProfile::Kind::chopped:
            return json{{"type", "chopped"},
                        {"cw_power_W", pump.cw_power},
                        {"on_duration_s", pump.on_duration},
                        {"period_s", pump.period}};
    }
    throw ConfigError("pump_to_json: unreachable");
}

PumpProfile pump_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw ConfigError("pump spec must be an object with a 'type' key");
    const std::string type = j.at("type").get<std::string>();
    try {
        if (type == "cw") {
            reject_unknown_keys(j, {"type", "power_W"}, "pump");
            return PumpProfile::cw(get_number(j, "power_W"));
        }
        if (type == "gaussian_train") {
            reject_unknown_keys(j, {"type", "avg_power_W", "fwhm_s", "period_s"},
                                "pump");
            return PumpProfile::gaussian_train(get_number(j, "avg_power_W"),
                                               get_number(j, "fwhm_s"),
                                               get_number(j, "period_s"));
        }
        if (type == "chopped") {
            reject_unknown_keys(j, {"type", "cw_power_W", "on_duration_s", "period_s"},
                                "pump");
            return PumpProfile::chopped(get_number(j, "cw_power_W"),
                                        get_number(j, "on_duration_s"),
                                        get_number(j, "period_s"));
        }
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("pump spec: ") + e.what());
    }
    throw ConfigError("pump type must be cw, gaussian_train, or chopped");
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open for writing: " + path);
    f << content;
    if (!f) throw Error("write failed: " + path);
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const LaserParams& p) {
    std::ostringstream os;
    os << "t_s,N_E_per_m3,N_G_per_m3,P_per_m3,L_out_W\n";
    for (const auto& s : traj.samples) {
        os << format_double(s.t) << ',' << format_double(s.N_E) << ','
           << format_double(s.N_G) << ',' << format_double(s.P) << ','
           << format_double(output_power(s.P, p)) << '\n';
    }
    write_text_file(path, os.str());
}

void write_ll_csv(const std::string& path, const LLCurve& ll) {
    std::ostringstream os;
    os << "pump_W,light_out_W\n";
    for (const auto& pt : ll.points)
        os << format_double(pt.pump_in) << ',' << format_double(pt.light_out)
           << '\n';
    write_text_file(path, os.str());
}

LLCurve read_ll_csv(const std::string& path, LLRegime regime) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open LL CSV: " + path);
    std::string line;
    if (!std::getline(f, line))
        throw ConfigError("LL CSV is empty (header row required): " + path);
    const auto header = split_csv_line(line);
    int col_pump = -1, col_light = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "pump_W") col_pump = static_cast<int>(i);
        if (header[i] == "light_arb" || header[i] == "light_out_W")
            col_light = static_cast<int>(i);
    }
    if (col_pump < 0 || col_light < 0)
        throw ConfigError("LL CSV header must contain pump_W and light_arb "
                          "(or light_out_W) columns: " + path);

    LLCurve ll;
    ll.regime = regime;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() <= static_cast<std::size_t>(std::max(col_pump, col_light)))
            throw ConfigError("LL CSV: too few columns at line " +
                              std::to_string(lineno));
        try {
            const double pump = std::stod(cells[col_pump]);
            const double light = std::stod(cells[col_light]);
            if (!std::isfinite(pump) || !std::isfinite(light) || light < 0)
                throw ConfigError("LL CSV: invalid values at line " +
                                  std::to_string(lineno));
            if (!ll.points.empty() && !(pump > ll.points.back().pump_in))
                throw ConfigError("LL CSV: pump_W must increase strictly (line " +
                                  std::to_string(lineno) + ")");
            ll.points.push_back({pump, light});
        } catch (const std::invalid_argument&) {
            throw ConfigError("LL CSV: non-numeric cell at line " +
                              std::to_string(lineno));
        } catch (const std::out_of_range&) {
            throw ConfigError("LL CSV: value out of range at line " +
                              std::to_string(lineno));
        }
    }
    return ll;
}

json ll_plot_json(const LLCurve& ll, const std::optional<ThresholdFit>& fit) {
    json xs = json::array();
    json ys = json::array();
    for (const auto& pt : ll.points) {
        xs.push_back(pt.pump_in);
        ys.push_back(pt.light_out);
    }
    json plot{{"series",
               json::array({json{{"name", ll.regime == LLRegime::cw
                                              ? "ll_cw"
                                              : "ll_pulsed_averaged"},
                                 {"x_label", "pump_W"},
                                 {"y_label", "light_out_W"},
                                 {"x", xs},
                                 {"y", ys}}})},
              {"annotations", json::array()}};
    if (fit) {
        plot["annotations"].push_back(json{{"type", "vline"},
                                           {"label", "threshold"},
                                           {"x", fit->threshold}});
        plot["annotations"].push_back(json{{"type", "segments"},
                                           {"label", "piecewise_fit"},
                                           {"threshold_W", fit->threshold},
                                           {"slope_below", fit->slope_below},
                                           {"slope_above", fit->slope_above},
                                           {"residual", fit->residual}});
    }
    return plot;
}

json trajectory_plot_json(const Trajectory& traj, const LaserParams& p) {
    json xs = json::array();
    json ys = json::array();
    for (const auto& s : traj.samples) {
        xs.push_back(s.t);
        ys.push_back(output_power(s.P, p));
    }
    return json{{"series", json::array({json{{"name", "light_out"},
                                             {"x_label", "t_s"},
                                             {"y_label", "L_out_W"},
                                             {"x", xs},
                                             {"y", ys}}})},
                {"annotations", json::array()}};
}

json make_manifest(const std::string& command, const json& resolved_config,
                   const json& outputs, double rel_tol,
                   std::uint64_t params_hash) {
    char hash_buf[24];
    std::snprintf(hash_buf, sizeof hash_buf, "0x%016llx",
                  static_cast<unsigned long long>(params_hash));
    return json{{"tool", kToolName},
                {"version", kToolVersion},
                {"command", command},
                {"resolved_config", resolved_config},
                {"tolerances", json{{"rel_tol", rel_tol}}},
                {"params_hash", hash_buf},
                {"outputs", outputs}};
}

}  // namespace nanolase::io
