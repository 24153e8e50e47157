#pragma once

#include <vector>

namespace bicm {

// Dense two-phase simplex with Bland's rule (deterministic pivoting).
// Solves: maximize c.x  s.t.  A x {<=,=,>=} b,  x >= 0.
struct LpResult {
    enum class Status { optimal, infeasible, unbounded };
    Status status = Status::infeasible;
    std::vector<double> x;
    double objective = 0.0;
};

LpResult solve_lp_max(const std::vector<double>& c, const std::vector<std::vector<double>>& a,
                      const std::vector<char>& rel, const std::vector<double>& b);

}  // namespace bicm
