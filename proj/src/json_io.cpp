#include "qfi/json_io.hpp"

namespace qfi {

using nlohmann::json;

namespace {

std::string basis_kind_name(BasisKind k) {
    switch (k) {
        case BasisKind::Harmonic: return "harmonic";
        case BasisKind::HermiteGaussian: return "hermite_gaussian";
        case BasisKind::PlaneWave: return "plane_wave";
    }
    return "unknown";
}

BasisKind basis_kind_from_name(const std::string& s) {
    if (s == "harmonic") return BasisKind::Harmonic;
    if (s == "hermite_gaussian") return BasisKind::HermiteGaussian;
    if (s == "plane_wave") return BasisKind::PlaneWave;
    throw Error("unknown basis kind: " + s);
}

} // namespace

json basis_to_json(const BasisSpec& b) {
    json j{{"kind", basis_kind_name(b.kind)}, {"T", b.T}};
    switch (b.kind) {
        case BasisKind::Harmonic: j["n_max"] = b.n_max; break;
        case BasisKind::HermiteGaussian:
            j["t0"] = b.t0;
            j["n_max"] = b.n_max;
            break;
        case BasisKind::PlaneWave:
            j["n_min"] = b.n_min;
            j["n_max"] = b.n_max;
            break;
    }
    return j;
}

BasisSpec basis_from_json(const json& j) {
    BasisKind kind = basis_kind_from_name(j.at("kind").get<std::string>());
    double T = j.at("T").get<double>();
    switch (kind) {
        case BasisKind::Harmonic: return BasisSpec::harmonic(T, j.at("n_max").get<int>());
        case BasisKind::HermiteGaussian:
            return BasisSpec::hermite_gaussian(T, j.value("t0", -1.0), j.at("n_max").get<int>());
        case BasisKind::PlaneWave:
            return BasisSpec::plane_wave(T, j.at("n_min").get<int>(), j.at("n_max").get<int>());
    }
    throw Error("basis_from_json: unreachable");
}

json pulse_to_json(const PulseSpec& p) {
    if (p.family == Family::Expansion) {
        json coeffs = json::array();
        for (const auto& c : p.coeffs) coeffs.push_back(json::array({c.real(), c.imag()}));
        return json{{"basis", basis_to_json(p.basis)},
                    {"coeffs", coeffs},
                    {"alpha_sq", p.alpha_sq},
                    {"carrier_detuning", p.carrier_detuning}};
    }
    json params{{"T", p.T}};
    if (p.family == Family::Gaussian || p.family == Family::RisingExp ||
        p.family == Family::SymmetricExp)
        params["t0"] = p.t0;
    if (p.family == Family::Sine) params["omega"] = p.omega;
    return json{{"family", family_name(p.family)},
                {"params", params},
                {"alpha_sq", p.alpha_sq},
                {"carrier_detuning", p.carrier_detuning}};
}

PulseSpec pulse_from_json(const json& j) {
    double alpha_sq = j.at("alpha_sq").get<double>();
    double carrier = j.value("carrier_detuning", 0.0);
    if (j.contains("basis")) {
        BasisSpec basis = basis_from_json(j.at("basis"));
        std::vector<cplx> coeffs;
        for (const auto& c : j.at("coeffs")) coeffs.emplace_back(c.at(0).get<double>(),
                                                                 c.at(1).get<double>());
        // coefficients are stored already normalized; synthesize re-normalizes,
        // which is a no-op for round trips
        return synthesize(basis, coeffs, alpha_sq, carrier);
    }
    Family fam = family_from_name(j.at("family").get<std::string>());
    const json& params = j.at("params");
    double T = params.at("T").get<double>();
    switch (fam) {
        case Family::Rectangular: return PulseSpec::rectangular(T, alpha_sq, carrier);
        case Family::Gaussian:
            return PulseSpec::gaussian(T, alpha_sq, params.value("t0", -1.0), carrier);
        case Family::DecreasingExp: return PulseSpec::decreasing_exp(T, alpha_sq, carrier);
        case Family::RisingExp:
            return PulseSpec::rising_exp(T, alpha_sq, params.value("t0", -1.0), carrier);
        case Family::SymmetricExp:
            return PulseSpec::symmetric_exp(T, alpha_sq, params.value("t0", -1.0), carrier);
        case Family::Sine:
            return PulseSpec::sine(T, params.at("omega").get<double>(), alpha_sq, carrier);
        default: throw Error("pulse_from_json: bad family");
    }
}

json breakdown_to_json(const QfiBreakdown& b, double gamma) {
    json j{{"qfi_total", b.total},
           {"qfi_total_time2", b.total / (gamma * gamma)},
           {"t_end", b.t_end},
           {"solver",
            {{"rel_tol", b.solver.rel_tol},
             {"abs_tol", b.solver.abs_tol},
             {"steps", b.solver.steps},
             {"rhs_evals", b.solver.rhs_evals},
             {"horizon_factor_used", b.solver.horizon_factor_used}}}};
    if (b.f_p) {
        j["f_p"] = *b.f_p;
        j["f_z"] = *b.f_z;
        j["f_x"] = *b.f_x;
    }
    if (b.z1_term) {
        j["z1_term"] = *b.z1_term;
        j["work_term"] = *b.work_term;
    }
    return j;
}

json fd_estimate_to_json(const FdEstimate& e) {
    return json{{"qfi", e.qfi}, {"step", e.step}, {"richardson_err", e.richardson_err}};
}

json opt_result_to_json(const OptResult& r) {
    json seeds = json::array();
    for (const auto& s : r.per_seed)
        seeds.push_back(json{{"final_qfi", s.final_qfi},
                             {"iterations", s.iterations},
                             {"converged", s.converged}});
    json coeffs = json::array();
    for (const auto& c : r.best_coeffs) coeffs.push_back(json::array({c.real(), c.imag()}));
    return json{{"best_qfi", r.best_qfi},
                {"best_seed", r.best_seed},
                {"best_coeffs", coeffs},
                {"per_seed", seeds},
                {"populations", r.populations}};
}

} // namespace qfi
