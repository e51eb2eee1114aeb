#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qfi/engine.hpp"
#include "qfi/pulse.hpp"

namespace qfi {

struct SweepPlan {
    std::vector<Family> families;
    std::vector<double> alpha_sq_grid;
    std::vector<double> width_grid;  // gamma T_sigma values
    PhysicsParams params;
    std::vector<std::string> outputs;  // informational; full schema always computed

    void validate() const;
    std::string hash() const;  // canonical content hash for resumability
};

struct ResultRow {
    std::string family;
    double alpha_sq = 0, gamma_Tsigma = 0;
    double qfi_total = 0, f_p = 0, f_z = 0, f_x = 0;  // gamma^2-scaled
    double analytic_long = 0, analytic_short = 0;     // Table values times alpha^2
    double wall_time_s = 0;
    std::string error;  // nonempty when the row failed
};

// Pulse width T for a family at a given intensity standard deviation.
double width_to_T(Family family, double t_sigma);

// One row per (family, alpha^2, width) grid point, ordered like the nested
// grids. store_path, when nonempty, is a JSON-lines file with a plan-hash
// header: rows already present under a matching hash are skipped, and new
// rows are appended incrementally in order. Per-row failures are recorded
// in-row and never abort the sweep.
std::vector<ResultRow> run_sweep(const SweepPlan& plan, const std::string& store_path = "",
                                 int jobs = 0);

// CSV export (derived, never authoritative); header is the fixed schema.
void write_csv(const std::vector<ResultRow>& rows, std::ostream& os);

// Golden-section search over log width for the engine QFI maximum.
// Returns (T_sigma_opt, gamma^2 F at the optimum).
std::pair<double, double> best_width(Family family, double alpha_sq, const PhysicsParams& params,
                                     double t_sigma_lo = 2e-2, double t_sigma_hi = 2e4);

} // namespace qfi
