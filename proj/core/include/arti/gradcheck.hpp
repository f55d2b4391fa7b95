#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace arti {

/// Analytic-vs-central-finite-difference master suite covering every
/// gradient path the library exposes: triplane sample jacobians, field
/// normals, marching-tetrahedra vertex jacobians, and the grid-SDF fitting
/// loss. Each row reports the max relative error over its probe set.
struct GradCheckRow {
    std::string name;
    double max_rel_err = 0.0;
    double tolerance = 1e-4;
    bool pass = false;
};

struct GradCheckReport {
    std::vector<GradCheckRow> rows;
    bool all_pass = false;
};

GradCheckReport run_gradcheck(std::uint64_t seed = 99);

/// Fixed-width pass/fail table, one row per check.
std::string format_report(const GradCheckReport& report);

} // namespace arti
