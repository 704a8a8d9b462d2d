#include "anneal/schedule.hpp"

#include <algorithm>
#include <stdexcept>

namespace anneal {

std::vector<int> make_tau_grid(int m, int points) {
    std::vector<int> grid;
    points = std::max(2, points);
    for (int k = 0; k <= points; ++k) {
        int tau = static_cast<int>(std::lround(static_cast<double>(k) * m / points));
        grid.push_back(tau);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

QuenchProtocol QuenchProtocol::hamiltonian(int n_sites, double s_start, double s_end,
                                           double velocity, double power, int tau_points) {
    if (!(s_start >= 0.0 && s_end <= 1.0 && s_end > s_start))
        throw std::invalid_argument("protocol: need 0 <= s_start < s_end <= 1");
    if (velocity <= 0.0) throw std::invalid_argument("protocol: velocity must be > 0");
    QuenchProtocol p;
    p.mode = Mode::hamiltonian;
    p.s_start = s_start;
    p.s_end = s_end;
    p.power = power;
    p.m = std::max(1, static_cast<int>(std::lround(n_sites * (s_end - s_start) / velocity)));
    // delta_s recomputed from the rounded m so s_m lands exactly on s_end
    p.velocity = n_sites * (s_end - s_start) / p.m;
    p.tau_grid = make_tau_grid(p.m, std::min(tau_points, p.m));
    return p;
}

QuenchProtocol QuenchProtocol::simulation_time(int n_sites, double s_target, double velocity) {
    if (!(s_target > 0.0 && s_target <= 1.0))
        throw std::invalid_argument("protocol: s_target must be in (0, 1]");
    if (velocity <= 0.0) throw std::invalid_argument("protocol: velocity must be > 0");
    QuenchProtocol p;
    p.mode = Mode::simulation_time;
    p.s_start = 0.0;
    p.s_end = s_target;
    p.velocity = velocity;
    p.m = 4 * n_sites * n_sites;
    p.tau_grid = {p.m};  // center of the string
    return p;
}

std::vector<int> ThermalProtocol::measure_grid() const {
    std::vector<int> grid;
    int total = sweeps();
    int points = std::max(1, std::min(measure_points, total));
    for (int k = 0; k <= points; ++k) {
        int sweep = static_cast<int>(std::lround(static_cast<double>(k) * total / points));
        grid.push_back(std::max(1, sweep));
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

}  // namespace anneal
