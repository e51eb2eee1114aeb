#include "qfi/sweep.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qfi/analytic.hpp"
#include "qfi/parallel.hpp"

namespace qfi {

namespace {

using nlohmann::json;

PulseSpec make_family_pulse(Family family, double T, double alpha_sq) {
    switch (family) {
        case Family::Rectangular: return PulseSpec::rectangular(T, alpha_sq);
        case Family::Gaussian: return PulseSpec::gaussian(T, alpha_sq);
        case Family::DecreasingExp: return PulseSpec::decreasing_exp(T, alpha_sq);
        case Family::RisingExp: return PulseSpec::rising_exp(T, alpha_sq);
        case Family::SymmetricExp: return PulseSpec::symmetric_exp(T, alpha_sq);
        default: throw UnsupportedFamily("sweep: " + family_name(family));
    }
}

std::string row_key(const std::string& family, double alpha_sq, double width) {
    std::ostringstream os;
    os.precision(17);
    os << family << '|' << alpha_sq << '|' << width;
    return os.str();
}

json row_to_json(const ResultRow& r) {
    return json{{"family", r.family},
                {"alpha_sq", r.alpha_sq},
                {"gamma_Tsigma", r.gamma_Tsigma},
                {"qfi_total", r.qfi_total},
                {"f_p", r.f_p},
                {"f_z", r.f_z},
                {"f_x", r.f_x},
                {"analytic_long", r.analytic_long},
                {"analytic_short", r.analytic_short},
                {"wall_time_s", r.wall_time_s},
                {"error", r.error}};
}

ResultRow row_from_json(const json& j) {
    ResultRow r;
    r.family = j.at("family").get<std::string>();
    r.alpha_sq = j.at("alpha_sq").get<double>();
    r.gamma_Tsigma = j.at("gamma_Tsigma").get<double>();
    r.qfi_total = j.at("qfi_total").get<double>();
    r.f_p = j.at("f_p").get<double>();
    r.f_z = j.at("f_z").get<double>();
    r.f_x = j.at("f_x").get<double>();
    r.analytic_long = j.at("analytic_long").get<double>();
    r.analytic_short = j.at("analytic_short").get<double>();
    r.wall_time_s = j.at("wall_time_s").get<double>();
    r.error = j.value("error", "");
    return r;
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

void SweepPlan::validate() const {
    params.validate();
    if (families.empty() || alpha_sq_grid.empty() || width_grid.empty())
        throw Error("sweep: empty grid");
    auto increasing = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (!(v[i] > v[i - 1])) return false;
        return true;
    };
    if (!increasing(alpha_sq_grid) || !increasing(width_grid))
        throw Error("sweep: grids must be strictly increasing");
}

std::string SweepPlan::hash() const {
    std::ostringstream os;
    os.precision(17);
    for (Family f : families) os << family_name(f) << ',';
    os << ';';
    for (double a : alpha_sq_grid) os << a << ',';
    os << ';';
    for (double w : width_grid) os << w << ',';
    os << ';' << params.gamma << ',' << params.delta << ',' << params.horizon_factor << ','
       << params.rel_tol << ',' << params.abs_tol;
    std::ostringstream hex;
    hex << std::hex << fnv1a(os.str());
    return hex.str();
}

double width_to_T(Family family, double t_sigma) {
    switch (family) {
        case Family::Rectangular: return t_sigma * std::sqrt(12.0);
        case Family::Gaussian: return t_sigma * std::sqrt(2.0);
        case Family::DecreasingExp:
        case Family::RisingExp: return t_sigma;
        case Family::SymmetricExp: return t_sigma * std::sqrt(2.0);
        default: throw UnsupportedFamily("width_to_T: " + family_name(family));
    }
}

std::vector<ResultRow> run_sweep(const SweepPlan& plan, const std::string& store_path, int jobs) {
    plan.validate();
    const std::string plan_hash = plan.hash();

    struct Task {
        Family family;
        double alpha_sq, width;
    };
    std::vector<Task> tasks;
    for (Family f : plan.families)
        for (double a : plan.alpha_sq_grid)
            for (double w : plan.width_grid) tasks.push_back({f, a, w});

    std::vector<ResultRow> rows(tasks.size());
    std::vector<bool> done(tasks.size(), false);

    // resume: load rows persisted under the same plan hash
    std::set<std::string> persisted;
    if (!store_path.empty()) {
        std::ifstream in(store_path);
        if (in) {
            std::string line;
            bool header_ok = false;
            if (std::getline(in, line)) {
                auto j = json::parse(line, nullptr, false);
                header_ok = !j.is_discarded() && j.value("plan_hash", "") == plan_hash;
            }
            if (header_ok) {
                while (std::getline(in, line)) {
                    auto j = json::parse(line, nullptr, false);
                    if (j.is_discarded()) continue;
                    ResultRow r = row_from_json(j);
                    std::string key = row_key(r.family, r.alpha_sq, r.gamma_Tsigma);
                    for (std::size_t i = 0; i < tasks.size(); ++i) {
                        if (done[i]) continue;
                        if (row_key(family_name(tasks[i].family), tasks[i].alpha_sq,
                                    tasks[i].width) == key) {
                            rows[i] = r;
                            done[i] = true;
                            persisted.insert(key);
                            break;
                        }
                    }
                }
            }
        }
    }

    std::ofstream store;
    if (!store_path.empty()) {
        if (persisted.empty()) {
            store.open(store_path, std::ios::trunc);
            store << json{{"plan_hash", plan_hash}}.dump() << "\n" << std::flush;
        } else {
            store.open(store_path, std::ios::app);
        }
    }

    // parallel compute; single writer appends completed rows in order
    std::mutex write_mutex;
    std::size_t next_to_write = 0;
    std::vector<bool> computed(tasks.size(), false);

    auto flush_ready = [&]() {
        while (next_to_write < tasks.size() && (computed[next_to_write] || done[next_to_write])) {
            if (store.is_open() && computed[next_to_write]) {
                store << row_to_json(rows[next_to_write]).dump() << "\n" << std::flush;
            }
            ++next_to_write;
        }
    };

    parallel_for(
        tasks.size(),
        [&](std::size_t i) {
            if (!done[i]) {
                const Task& t = tasks[i];
                ResultRow r;
                r.family = family_name(t.family);
                r.alpha_sq = t.alpha_sq;
                r.gamma_Tsigma = t.width;
                auto start = std::chrono::steady_clock::now();
                try {
                    double T = width_to_T(t.family, t.width / plan.params.gamma);
                    PulseSpec pulse = make_family_pulse(t.family, T, t.alpha_sq);
                    QfiBreakdown bd = solve_real(pulse, plan.params);
                    r.qfi_total = bd.total;
                    r.f_p = *bd.f_p;
                    r.f_z = *bd.f_z;
                    r.f_x = *bd.f_x;
                    r.analytic_long = qfi_long_table(t.family, plan.params.gamma * T) * t.alpha_sq;
                    r.analytic_short =
                        qfi_short_table(t.family, plan.params.gamma * T, t.alpha_sq) * t.alpha_sq;
                } catch (const std::exception& e) {
                    r.error = e.what();
                    r.qfi_total = r.f_p = r.f_z = r.f_x = std::nan("");
                    r.analytic_long = r.analytic_short = std::nan("");
                }
                r.wall_time_s =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                        .count();
                rows[i] = r;
            }
            std::lock_guard<std::mutex> lock(write_mutex);
            computed[i] = true;
            flush_ready();
        },
        jobs);

    return rows;
}

void write_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
    os << "family,alpha_sq,gamma_Tsigma,qfi_total,f_p,f_z,f_x,analytic_long,analytic_short,"
          "wall_time_s\n";
    os.precision(12);
    for (const auto& r : rows) {
        os << r.family << ',' << r.alpha_sq << ',' << r.gamma_Tsigma << ',' << r.qfi_total << ','
           << r.f_p << ',' << r.f_z << ',' << r.f_x << ',' << r.analytic_long << ','
           << r.analytic_short << ',' << r.wall_time_s << "\n";
    }
}

std::pair<double, double> best_width(Family family, double alpha_sq, const PhysicsParams& params,
                                     double t_sigma_lo, double t_sigma_hi) {
    params.validate();
    auto q = [&](double log_w) {
        double T = width_to_T(family, std::exp(log_w) / params.gamma);
        PulseSpec pulse = make_family_pulse(family, T, alpha_sq);
        return solve_real(pulse, params).total;
    };

    // coarse log scan to bracket the peak
    const int n_scan = 25;
    double lo = std::log(t_sigma_lo), hi = std::log(t_sigma_hi);
    int best_i = 0;
    double best_v = -1;
    std::vector<double> grid(n_scan), vals(n_scan);
    for (int i = 0; i < n_scan; ++i) {
        grid[i] = lo + (hi - lo) * i / (n_scan - 1.0);
        vals[i] = q(grid[i]);
        if (vals[i] > best_v) {
            best_v = vals[i];
            best_i = i;
        }
    }
    if (best_i == 0 || best_i == n_scan - 1)
        throw BracketNotFound("best_width: maximum at scan edge");

    double a = grid[best_i - 1], b = grid[best_i + 1];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = q(c), fd = q(d);
    while (b - a > 1e-3) {  // 1e-3 relative in width (log scale)
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = q(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = q(d);
        }
    }
    double xm = 0.5 * (a + b);
    return {std::exp(xm), q(xm)};
}

} // namespace qfi
