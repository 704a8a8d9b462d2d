#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace anneal {

// Annealing schedule for the operator-string sampler. In hamiltonian mode the
// string slot j in 1..m carries s_j = s_start + (s_end - s_start)*(j/m)^r and
// the velocity obeys v = N*delta_s (prefactor a = 1), so m = round(N*ds/v).
// In simulation_time mode all slots share one s that the driver advances by v
// per sweep; m follows the fixed rule m = 4*N^2.
struct QuenchProtocol {
    enum class Mode { hamiltonian, simulation_time };

    Mode mode = Mode::hamiltonian;
    double s_start = 0.0;
    double s_end = 1.0;
    double velocity = 0.1;  // ds per unit imaginary time (hamiltonian),
                            // ds per sweep (simulation_time)
    double power = 1.0;     // quench power r
    int m = 1;              // operator product length; sampled string is 2m
    std::vector<int> tau_grid;  // measurement slots, subset of 0..m

    // s associated with measurement position tau in 0..m
    double s_at(int tau) const {
        if (tau <= 0) return s_start;
        double x = static_cast<double>(tau) / m;
        return s_start + (s_end - s_start) * std::pow(x, power);
    }
    // s of string slot p in 1..2m (palindromic: up the ramp then back down)
    double slot_s(int p) const { return s_at(p <= m ? p : 2 * m + 1 - p); }

    static QuenchProtocol hamiltonian(int n_sites, double s_start, double s_end, double velocity,
                                      double power = 1.0, int tau_points = 64);
    static QuenchProtocol simulation_time(int n_sites, double s_target, double velocity);
};

// Makes tau_grid: `points` evenly spaced values in [0, m], endpoints included.
std::vector<int> make_tau_grid(int m, int points);

// Linear cooling schedule for classical simulated annealing, T in units of |J|.
struct ThermalProtocol {
    enum class Update { metropolis, swendsen_wang };

    double t_start = 2.0;
    double t_end = 0.5;
    double velocity = 0.01;  // temperature decrease per sweep
    Update update = Update::metropolis;
    int measure_points = 64;

    int sweeps() const {
        return std::max(1, static_cast<int>(std::lround((t_start - t_end) / velocity)));
    }
    // temperature during sweep k in 1..sweeps(); lands exactly on t_end
    double t_at(int k) const {
        int total = sweeps();
        return t_start + (t_end - t_start) * (static_cast<double>(k) / total);
    }
    std::vector<int> measure_grid() const;
};

}  // namespace anneal
