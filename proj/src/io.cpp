#include "drop/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace drop {

using nlohmann::json;

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

json coeffs_to_json_obj(const SphCoeffs& c) {
    json entries = json::array();
    for (int l = 0; l <= c.lmax(); ++l) {
        for (int m = -l; m <= l; ++m) {
            double v = c.at(l, m);
            if (v != 0.0) entries.push_back({l, m, v});
        }
    }
    return json{{"lmax", c.lmax()}, {"coeffs", entries}};
}

SphCoeffs coeffs_from_json_obj(const json& j) {
    if (!j.contains("lmax") || !j.contains("coeffs"))
        throw std::invalid_argument("coeffs JSON: missing lmax or coeffs");
    int lmax = j.at("lmax").get<int>();
    if (lmax < 0) throw std::invalid_argument("coeffs JSON: lmax must be >= 0");
    SphCoeffs c(lmax);
    for (const auto& e : j.at("coeffs")) {
        if (!e.is_array() || e.size() != 3)
            throw std::invalid_argument("coeffs JSON: entries must be [l, m, value]");
        int l = e[0].get<int>();
        int m = e[1].get<int>();
        double v = e[2].get<double>();
        if (l < 0 || l > lmax || m < -l || m > l)
            throw std::invalid_argument("coeffs JSON: index outside the triangle");
        if (!std::isfinite(v)) throw std::invalid_argument("coeffs JSON: non-finite value");
        c.at(l, m) = v;
    }
    return c;
}

}  // namespace

std::string coeffs_to_json(const SphCoeffs& c) { return coeffs_to_json_obj(c).dump(); }

SphCoeffs coeffs_from_json(const std::string& text) {
    return coeffs_from_json_obj(json::parse(text));
}

void write_coeffs(const std::string& path, const SphCoeffs& c) {
    write_text(path, coeffs_to_json(c) + "\n");
}

SphCoeffs read_coeffs(const std::string& path) { return coeffs_from_json(read_text(path)); }

std::string state_to_json(const SurfaceState& s) {
    json j{{"sigma0", s.sigma0},
           {"h", coeffs_to_json_obj(s.h)},
           {"psi", coeffs_to_json_obj(s.psi)}};
    return j.dump();
}

SurfaceState state_from_json(const std::string& text) {
    json j = json::parse(text);
    SurfaceState s;
    s.sigma0 = j.at("sigma0").get<double>();
    if (!(s.sigma0 > 0.0)) throw std::invalid_argument("state JSON: sigma0 must be positive");
    s.h = coeffs_from_json_obj(j.at("h"));
    s.psi = coeffs_from_json_obj(j.at("psi"));
    return s;
}

void write_state(const std::string& path, const SurfaceState& s) {
    write_text(path, state_to_json(s) + "\n");
}

SurfaceState read_state(const std::string& path) { return state_from_json(read_text(path)); }

std::string resonance_to_json(const ResonanceReport& rep) {
    json S = json::array(), Sres = json::array();
    for (auto [l, m] : rep.S) S.push_back({l, m});
    for (auto [l, m] : rep.S_res) Sres.push_back({l, m});
    json j{{"l0", rep.l0},          {"m0", rep.m0},
           {"c0_num", rep.c0_num},  {"c0_den", rep.c0_den},
           {"omega_star", rep.omega_star}, {"S", S},
           {"S_res", Sres},         {"simple", rep.simple}};
    return j.dump();
}

std::string branch_to_json(const Branch& b) {
    json pts = json::array();
    for (const auto& p : b.points) {
        pts.push_back(json{{"omega", p.omega},
                           {"a", p.a},
                           {"lambda", p.lambda},
                           {"residual", p.residual},
                           {"eta", coeffs_to_json_obj(p.eta)},
                           {"beta", coeffs_to_json_obj(p.beta)}});
    }
    json j{{"l0", b.l0}, {"m0", b.m0}, {"sigma0", b.sigma0}, {"points", pts}};
    return j.dump();
}

std::string trajectory_to_csv(const Trajectory& traj) {
    std::ostringstream out;
    out << "t,energy,kinetic,potential,volume,bary_x,bary_y,bary_z,h_norm_H2,psi_norm_H1\n";
    for (const auto& row : traj.diagnostics) {
        out << format_g17(row.t) << ',' << format_g17(row.energy) << ','
            << format_g17(row.kinetic) << ',' << format_g17(row.potential) << ','
            << format_g17(row.volume) << ',' << format_g17(row.bary_x) << ','
            << format_g17(row.bary_y) << ',' << format_g17(row.bary_z) << ','
            << format_g17(row.h_norm_H2) << ',' << format_g17(row.psi_norm_H1) << '\n';
    }
    return out.str();
}

void write_trajectory(const std::string& path, const Trajectory& traj) {
    write_text(path, trajectory_to_csv(traj));
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace drop
