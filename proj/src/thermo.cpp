#include "sbthermo/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbt {

namespace {

double real_trace_product(const Mat2& a, const Mat2& b, double tol_scale) {
    const std::complex<double> tr = (a * b).trace();
    if (std::abs(tr.imag()) > 1e-10 * std::max(1.0, tol_scale))
        throw std::runtime_error("thermo: trace product has non-negligible imaginary part");
    return tr.real();
}

void check_uniform(const std::vector<double>& times) {
    if (times.size() < 2) throw std::invalid_argument("thermo: need at least two grid points");
    const double h = times[1] - times[0];
    for (std::size_t i = 1; i + 1 < times.size(); ++i)
        if (std::abs(times[i + 1] - times[i] - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw std::invalid_argument("thermo: time grid is not uniform");
}

// Cumulative composite trapezoid of sampled integrand.
std::vector<double> cumulative_trapezoid(const std::vector<double>& times,
                                         const std::vector<double>& f) {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t i = 1; i < f.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (times[i] - times[i - 1]) * (f[i] + f[i - 1]);
    return out;
}

// Centered differences on a uniform grid, one-sided second-order at the ends.
std::vector<Mat2> grid_derivative(const std::vector<double>& times, const std::vector<Mat2>& f) {
    const std::size_t n = f.size();
    const double h = times[1] - times[0];
    std::vector<Mat2> out(n);
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return out;
}

// ln(rho) with the eigenvalue clamp; also reports the smallest eigenvalue.
Mat2 log_density(const Mat2& rho, double* min_eig = nullptr) {
    Eigen::SelfAdjointEigenSolver<Mat2> solver(0.5 * (rho + rho.adjoint()));
    const Eigen::Vector2d ev = solver.eigenvalues();
    if (min_eig) *min_eig = ev(0);
    Mat2 out = Mat2::Zero();
    for (int i = 0; i < 2; ++i) {
        const double lambda = std::clamp(ev(i), 1e-14, 1.0);
        out += std::log(lambda) * solver.eigenvectors().col(i) *
               solver.eigenvectors().col(i).adjoint();
    }
    return out;
}

}  // namespace

double ThermoSeries::first_law_residual() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
        worst = std::max(worst, std::abs((u[i] - u[0]) - w[i] - q[i]));
    return worst;
}

std::vector<double> internal_energy(const std::vector<Mat2>& k_s,
                                    const std::vector<TrajectoryPoint>& states) {
    if (k_s.size() != states.size()) throw std::invalid_argument("internal_energy: grid mismatch");
    std::vector<double> out(states.size());
    for (std::size_t i = 0; i < states.size(); ++i)
        out[i] = real_trace_product(k_s[i], states[i].rho, k_s[i].norm());
    return out;
}

std::vector<double> work(const std::vector<double>& times, const std::vector<Mat2>& k_s,
                         const std::vector<TrajectoryPoint>& states) {
    if (k_s.size() != states.size() || times.size() != states.size())
        throw std::invalid_argument("work: grid mismatch");
    check_uniform(times);
    const std::vector<Mat2> k_dot = grid_derivative(times, k_s);
    std::vector<double> integrand(times.size());
    for (std::size_t i = 0; i < times.size(); ++i)
        integrand[i] = real_trace_product(k_dot[i], states[i].rho, k_dot[i].norm());
    return cumulative_trapezoid(times, integrand);
}

std::vector<double> heat(const std::vector<double>& times, const std::vector<Mat2>& k_s,
                         const std::vector<TrajectoryPoint>& states) {
    if (k_s.size() != states.size() || times.size() != states.size())
        throw std::invalid_argument("heat: grid mismatch");
    std::vector<double> integrand(times.size());
    for (std::size_t i = 0; i < times.size(); ++i)
        integrand[i] = real_trace_product(k_s[i], states[i].rho_dot, k_s[i].norm());
    return cumulative_trapezoid(times, integrand);
}

WeakCoupling weak_coupling_observables(const std::vector<double>& times, const Mat2& h_s,
                                       const std::vector<TrajectoryPoint>& states, double beta) {
    if (times.size() != states.size())
        throw std::invalid_argument("weak_coupling_observables: grid mismatch");
    WeakCoupling out;
    out.w.assign(times.size(), 0.0);  // Hdot_S = 0 here
    std::vector<double> integrand(times.size());
    for (std::size_t i = 0; i < times.size(); ++i)
        integrand[i] = real_trace_product(h_s, states[i].rho_dot, h_s.norm());
    out.q = cumulative_trapezoid(times, integrand);
    out.sigma_rate.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const Mat2 log_rho = log_density(states[i].rho);
        const double ds_dt = -real_trace_product(states[i].rho_dot, log_rho, 10.0);
        out.sigma_rate[i] = ds_dt - beta * integrand[i];
    }
    return out;
}

double von_neumann_entropy(const Mat2& rho) {
    Eigen::SelfAdjointEigenSolver<Mat2> solver(0.5 * (rho + rho.adjoint()));
    double s = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double lambda = std::clamp(solver.eigenvalues()(i), 1e-14, 1.0);
        s -= lambda * std::log(lambda);
    }
    return s;
}

EntropyProduction entropy_and_production(const std::vector<double>& times,
                                         const std::vector<TrajectoryPoint>& states,
                                         const std::vector<Mat2>& k_s,
                                         const std::vector<double>& q, double beta) {
    if (times.size() != states.size() || k_s.size() != states.size() || q.size() != states.size())
        throw std::invalid_argument("entropy_and_production: grid mismatch");

    EntropyProduction out;
    out.ds.resize(times.size());
    out.sigma_tot.resize(times.size());
    out.sigma_rate.resize(times.size());

    const double s0 = von_neumann_entropy(states[0].rho);
    for (std::size_t i = 0; i < times.size(); ++i) {
        double min_eig = 0.0;
        const Mat2 log_rho = log_density(states[i].rho, &min_eig);
        if (min_eig < -1e-6)
            throw std::runtime_error("entropy_and_production: state eigenvalue " +
                                     std::to_string(min_eig) + " below -1e-6 at t = " +
                                     std::to_string(times[i]));
        out.ds[i] = von_neumann_entropy(states[i].rho) - s0;
        out.sigma_tot[i] = out.ds[i] - beta * q[i];
        // rates from the exact rhodot; valid since Tr rhodot = 0
        const double ds_dt = -real_trace_product(states[i].rho_dot, log_rho, 10.0);
        const double dq_dt = real_trace_product(k_s[i], states[i].rho_dot, k_s[i].norm());
        out.sigma_rate[i] = ds_dt - beta * dq_dt;
    }
    return out;
}

ThermoSeries compute_thermo(const std::vector<double>& times,
                            const std::vector<TrajectoryPoint>& states,
                            const std::vector<Mat2>& k_s, const Mat2& h_s, double beta) {
    ThermoSeries series;
    series.times = times;
    series.beta = beta;
    series.u = internal_energy(k_s, states);
    series.w = work(times, k_s, states);
    series.q = heat(times, k_s, states);
    const EntropyProduction ep = entropy_and_production(times, states, k_s, series.q, beta);
    series.ds = ep.ds;
    series.sigma_tot = ep.sigma_tot;
    series.sigma_rate = ep.sigma_rate;
    const WeakCoupling weak = weak_coupling_observables(times, h_s, states, beta);
    series.w_weak = weak.w;
    series.q_weak = weak.q;
    series.sigma_weak_rate = weak.sigma_rate;
    return series;
}

}  // namespace sbt
