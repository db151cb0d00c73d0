/*
   Copyright 2026 The mmtail developers

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "model_io.hpp"

#include "errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>

namespace mmtail {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

MmpModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidModel(std::string("model JSON parse error: ") + e.what());
    }
    try {
        MmpModel m;
        m.states = j.at("states").get<std::vector<std::string>>();
        const int n = static_cast<int>(m.states.size());
        m.transition = Mat(n);
        m.c_xi = j.at("c_xi").get<double>();
        m.c_rho = j.at("c_rho").get<double>();
        for (const auto& je : j.at("transitions")) {
            Edge ed;
            ed.from = je.at("from").get<int>();
            ed.to = je.at("to").get<int>();
            ed.prob = je.at("prob").get<double>();
            if (ed.from < 0 || ed.from >= n || ed.to < 0 || ed.to >= n)
                throw InvalidModel("transition endpoint out of range");
            for (const auto& ja : je.at("atoms")) {
                Atom a;
                a.xi = ja.at("xi").get<double>();
                a.rho = ja.at("rho").get<double>();
                a.w = ja.at("w").get<double>();
                ed.atoms.push_back(a);
            }
            m.transition.at(ed.from, ed.to) = ed.prob;
            m.edges.push_back(std::move(ed));
        }
        m.rebuild_lookup();
        return m;
    } catch (const json::exception& e) {
        throw InvalidModel(std::string("model JSON shape error: ") + e.what());
    }
}

std::string model_to_json(const MmpModel& model) {
    json j;
    j["states"] = model.states;
    j["c_xi"] = model.c_xi;
    j["c_rho"] = model.c_rho;
    json edges = json::array();
    for (const Edge& ed : model.edges) {
        json je;
        je["from"] = ed.from;
        je["to"] = ed.to;
        je["prob"] = ed.prob;
        json atoms = json::array();
        for (const Atom& a : ed.atoms) atoms.push_back({{"xi", a.xi}, {"rho", a.rho}, {"w", a.w}});
        je["atoms"] = std::move(atoms);
        edges.push_back(std::move(je));
    }
    j["transitions"] = std::move(edges);
    return j.dump(2) + "\n";
}

std::string validation_report_to_json(const ValidationReport& report) {
    json j = json::array();
    for (const auto& v : report) {
        json jv;
        jv["rule"] = v.rule;
        jv["detail"] = v.detail;
        if (v.row >= 0) jv["row"] = v.row;
        if (v.from >= 0) jv["from"] = v.from;
        if (v.to >= 0) jv["to"] = v.to;
        if (v.atom >= 0) jv["atom"] = v.atom;
        j.push_back(std::move(jv));
    }
    return json{{"violations", std::move(j)}}.dump(2) + "\n";
}

namespace {

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.n; ++i) {
        json row = json::array();
        for (int j = 0; j < m.n; ++j) row.push_back(m.at(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

std::string spectral_to_json(const SpectralAnalysis& sp) {
    json j;
    json grid = json::array();
    for (const auto& [b, l] : sp.beta_grid) grid.push_back({b, l});
    j["beta_grid"] = std::move(grid);
    j["kappa"] = sp.kappa;
    j["h"] = sp.tilt.h;
    j["tilted_transition"] = mat_to_json(sp.tilt.tilted_transition);
    j["tilted_atoms"] = sp.tilt.tilted_atoms;
    j["pi_h"] = sp.tilt.pi_h;
    j["drift"] = sp.tilt.drift;
    j["drift_unweighted"] = sp.tilt.drift_unweighted;
    j["stationary"] = sp.pi;
    j["log_rho_mean"] = sp.log_rho_mean;
    return j.dump(2) + "\n";
}

std::string structure_to_json(const StructureReport& st) {
    json j;
    j["period"] = st.period.period;
    j["cyclic_classes"] = st.period.classes;
    j["condition_g"] = {{"holds", st.condition_g.holds},
                        {"a1", st.condition_g.a1},
                        {"a_neg1", st.condition_g.a_neg1},
                        {"augmented_components", st.condition_g.components}};
    json deg;
    deg["degenerate"] = st.degeneracy.degenerate;
    if (st.degeneracy.degenerate)
        deg["gamma"] = st.degeneracy.gamma;
    else
        deg["gamma"] = nullptr;
    j["degeneracy"] = std::move(deg);
    json ar;
    ar["arithmetic"] = st.arithmetic.arithmetic;
    ar["alpha"] = st.arithmetic.alpha;
    ar["degenerate_lattice"] = st.arithmetic.degenerate_lattice;
    ar["fragile"] = st.arithmetic.fragile;
    if (st.arithmetic.arithmetic) {
        json shifts = json::array();
        for (std::size_t x = 0; x < st.arithmetic.shift.size(); ++x)
            shifts.push_back({{"state", x},
                              {"plus", st.arithmetic.shift[x][0]},
                              {"minus", st.arithmetic.shift[x][1]}});
        ar["shift"] = std::move(shifts);
    }
    j["arithmetic"] = std::move(ar);
    return j.dump(2) + "\n";
}

namespace {

json plateau_to_json(const PlateauEstimate& p) {
    if (!p.valid) return nullptr;
    return {{"value", p.value},     {"se", p.se},
            {"window", {p.window_lo, p.window_hi}},
            {"max_point", p.max_point}, {"min_point", p.min_point}};
}

} // namespace

std::string tail_report_to_json(const TailReport& tr) {
    json j;
    j["kappa"] = tr.kappa;
    if (tr.hill) {
        j["hill"] = {{"kappa_hat", tr.hill->kappa_hat},
                     {"k", tr.hill->k},
                     {"ci", {tr.hill->ci_lo, tr.hill->ci_hi}}};
    } else {
        j["hill"] = nullptr;
        j["hill_skip_reason"] = tr.hill_skip_reason;
    }
    j["t_grid"] = tr.t_grid;
    json per_state = json::array();
    for (std::size_t x = 0; x < tr.plateau_pos.size(); ++x) {
        json js;
        js["state"] = x;
        js["plateau_pos"] = plateau_to_json(tr.plateau_pos[x]);
        js["plateau_neg"] = plateau_to_json(tr.plateau_neg[x]);
        js["plateau_abs"] = plateau_to_json(tr.plateau_abs[x]);
        js["median"] = tr.medians[x];
        per_state.push_back(std::move(js));
    }
    j["per_state"] = std::move(per_state);
    j["constants"] = {{"branch", tr.constants.branch},
                      {"K1", tr.constants.k1},
                      {"K1_se", tr.constants.k1_se},
                      {"Kneg1", tr.constants.kneg1},
                      {"Kneg1_se", tr.constants.kneg1_se}};
    json curves = json::array();
    for (std::size_t x = 0; x < tr.curves.size(); ++x)
        for (int sign = 0; sign < 2; ++sign) {
            const auto& pts = sign == 0 ? tr.curves[x].pos : tr.curves[x].neg;
            for (const CurvePoint& p : pts)
                curves.push_back({{"state", x},
                                  {"sign", sign == 0 ? 1 : -1},
                                  {"t", p.t},
                                  {"value", p.value},
                                  {"band_lo", p.band_lo},
                                  {"band_hi", p.band_hi},
                                  {"exceedances", p.exceedances}});
        }
    j["curves"] = std::move(curves);
    json sym = json::array();
    for (const auto& row : tr.symmetrization)
        sym.push_back({{"state", row.state},
                       {"t", row.t},
                       {"lhs", row.lhs},
                       {"rhs_half", row.rhs_half},
                       {"se", row.se},
                       {"pass", row.pass}});
    j["symmetrization"] = std::move(sym);
    return j.dump(2) + "\n";
}

std::string batch_to_csv(const SampleBatch& batch) {
    std::ostringstream os;
    os << "state,index,R,xi0,rho0,terms\n";
    for (std::size_t x = 0; x < batch.by_state.size(); ++x) {
        const auto& recs = batch.by_state[x];
        for (std::size_t i = 0; i < recs.size(); ++i)
            os << x << "," << i << "," << fmt17(recs[i].r) << "," << fmt17(recs[i].xi0) << ","
               << fmt17(recs[i].rho0) << "," << recs[i].terms << "\n";
    }
    return os.str();
}

SampleBatch batch_from_csv(const std::string& text) {
    SampleBatch batch;
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line.rfind("state,index,R", 0) != 0)
        throw ComputationError("sample CSV missing header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        long x, i, terms;
        double r, xi0, rho0;
        if (std::sscanf(line.c_str(), "%ld,%ld,%lg,%lg,%lg,%ld", &x, &i, &r, &xi0, &rho0,
                        &terms) != 6)
            throw ComputationError("sample CSV parse error: " + line);
        if (x < 0) throw ComputationError("sample CSV has negative state");
        if (static_cast<std::size_t>(x) >= batch.by_state.size())
            batch.by_state.resize(static_cast<std::size_t>(x) + 1);
        batch.by_state[static_cast<std::size_t>(x)].push_back(
            {r, xi0, rho0, static_cast<std::int32_t>(terms)});
    }
    batch.n_per_state = batch.by_state.empty()
                            ? 0
                            : static_cast<long>(batch.by_state.front().size());
    return batch;
}

} // namespace mmtail
