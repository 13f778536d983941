#include "sbthermo/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace sbt {

namespace {

using cxd = std::complex<double>;

// sigma_z in the interaction picture at time -s: e^{-iHs} sz e^{iHs} with
// H = Omega (n . sigma), n = (delta, 0, -epsilon)/Omega. Conjugation rotates
// the Bloch z-axis about n by 2 Omega s (Rodrigues formula, ny = 0).
Mat2 coupling_backward(const SystemSpec& sys, double s) {
    const double omega = std::hypot(sys.epsilon, sys.delta);
    if (omega == 0.0) return sigma_z();
    const double nx = sys.delta / omega;
    const double nz = -sys.epsilon / omega;
    const double theta = 2.0 * omega * s;
    const double c = std::cos(theta), si = std::sin(theta);
    const double vx = nx * nz * (1.0 - c);
    const double vy = -nx * si;
    const double vz = c + nz * nz * (1.0 - c);
    return vx * sigma_x() + vy * sigma_y() + vz * sigma_z();
}

}  // namespace

double dephasing_gamma(double t, const BathSpec& spec, double rel_tol) {
    spec.validate();
    if (t < 0.0) throw std::invalid_argument("dephasing_gamma: t must be >= 0");
    if (t == 0.0 || spec.alpha == 0.0) return 0.0;

    const double a = spec.alpha;
    const double wc = spec.omega_c;
    const double beta = spec.beta;
    const double x = wc * t;

    // zero-temperature part: 2a [gamma_E + ln(wc t) - (e^x Ei(-x) + e^-x Ei(x))/2]
    const double g0 = 2.0 * a * (std::numbers::egamma + std::log(x) -
                                 0.5 * (std::exp(x) * std::expint(-x) +
                                        std::exp(-x) * std::expint(x)));

    // thermal part: 4 a wc^2 int n_B(beta w) (1 - cos wt) / (w (w^2 + wc^2));
    // 1 - cos written as 2 sin^2 to avoid cancellation at small w t
    auto integrand = [&](double w) {
        if (w <= 0.0) return 2.0 * a * t * t / beta;
        const double half = std::sin(0.5 * w * t);
        return 4.0 * a * wc * wc / (w * (w * w + wc * wc)) * bose_occupation(beta * w) *
               (2.0 * half * half);
    };
    double error_estimate = 0.0;
    const double w_max = 60.0 / beta;
    const double g_th = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, 0.0, w_max, 18, rel_tol, &error_estimate);
    if (!(error_estimate <= 1e-9 * std::max(1.0, std::abs(g_th))))
        throw std::runtime_error("dephasing_gamma: quadrature did not converge");
    return g0 + g_th;
}

std::complex<double> dephasing_coherence(double t, const BathSpec& spec, double epsilon,
                                         std::complex<double> rho01_initial) {
    const double gamma = dephasing_gamma(t, spec);
    return rho01_initial * std::exp(cxd(0.0, 2.0 * epsilon * t)) * std::exp(-gamma);
}

std::vector<TrajectoryPoint> tcl2_propagate(const SystemSpec& sys, const BathSpec& spec,
                                            const Mat2& rho0, const Tcl2Options& opts) {
    spec.validate();
    if (!(opts.dt > 0.0) || !(opts.t_final >= 0.0) || opts.output_stride < 1)
        throw std::invalid_argument("tcl2_propagate: bad stepping options");

    const long n_steps = std::lround(opts.t_final / opts.dt);
    if (std::abs(n_steps * opts.dt - opts.t_final) > 1e-9)
        throw std::invalid_argument("tcl2_propagate: dt must divide t_final");

    // Correlation values cached on the RK4 stage grid (t_k and midpoints).
    std::vector<cxd> c_grid(static_cast<std::size_t>(2 * n_steps + 1));
    for (long i = 0; i < 2 * n_steps + 1; ++i)
        c_grid[static_cast<std::size_t>(i)] =
            spec.alpha == 0.0 ? cxd{0.0, 0.0}
                              : correlation_quadrature(0.5 * i * opts.dt, spec, opts.quad_rel_tol);

    const Mat2 h = sys.hamiltonian();
    const Mat2 a_op = sigma_z();
    const cxd mi(0.0, -1.0);

    // Augmented state (rho, Lambda): dLambda/dt = C(t) A(-t).
    const auto rhs = [&](const Mat2& rho, const Mat2& lambda, double t, long c_index,
                         Mat2& drho, Mat2& dlambda) {
        drho = mi * commutator(h, rho);
        drho += commutator(lambda * rho, a_op) + commutator(a_op, rho * lambda.adjoint());
        dlambda = c_grid[static_cast<std::size_t>(c_index)] * coupling_backward(sys, t);
    };

    std::vector<TrajectoryPoint> out;
    Mat2 rho = rho0;
    Mat2 lambda = Mat2::Zero();

    const auto record = [&](double t) {
        Mat2 drho, dl;
        rhs(rho, lambda, t, std::lround(2 * t / opts.dt), drho, dl);
        out.push_back({t, rho, drho});
    };
    record(0.0);

    Mat2 k1r, k1l, k2r, k2l, k3r, k3l, k4r, k4l;
    for (long step = 0; step < n_steps; ++step) {
        const double t = step * opts.dt;
        rhs(rho, lambda, t, 2 * step, k1r, k1l);
        rhs(rho + 0.5 * opts.dt * k1r, lambda + 0.5 * opts.dt * k1l, t + 0.5 * opts.dt,
            2 * step + 1, k2r, k2l);
        rhs(rho + 0.5 * opts.dt * k2r, lambda + 0.5 * opts.dt * k2l, t + 0.5 * opts.dt,
            2 * step + 1, k3r, k3l);
        rhs(rho + opts.dt * k3r, lambda + opts.dt * k3l, t + opts.dt, 2 * step + 2, k4r, k4l);
        rho += opts.dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
        lambda += opts.dt / 6.0 * (k1l + 2.0 * k2l + 2.0 * k3l + k4l);
        if ((step + 1) % opts.output_stride == 0) record((step + 1) * opts.dt);
    }
    return out;
}

}  // namespace sbt
