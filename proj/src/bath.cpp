#include "sbthermo/bath.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace sbt {

namespace {

constexpr double kPi = std::numbers::pi;

// Positive eigenvalues of the zero-diagonal symmetric tridiagonal matrix with
// the given off-diagonal band, mapped to poles xi = 2 / lambda.
std::vector<double> tridiagonal_poles(const std::vector<double>& band, int count) {
    const int dim = static_cast<int>(band.size()) + 1;
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd sub(dim - 1);
    for (int i = 0; i < dim - 1; ++i) sub(i) = band[static_cast<std::size_t>(i)];

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("pade_decomposition: tridiagonal eigensolver failed");

    const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending
    std::vector<double> poles(static_cast<std::size_t>(count));
    // The spectrum is symmetric about zero; the largest `count` eigenvalues
    // give the distinct positive poles, stored in decreasing order.
    for (int j = 0; j < count; ++j)
        poles[static_cast<std::size_t>(count - 1 - j)] = 2.0 / ev(dim - 1 - j);
    return poles;
}

struct BosePoles {
    std::vector<double> xi;      // pole positions, decreasing
    std::vector<double> weight;  // residual weights (1 for Matsubara)
};

// Poles/weights of the [N-1/N] Pade approximant of the Bose function:
//   n_B(x) ~ 1/x - 1/2 + sum_j 2 w_j x / (x^2 + xi_j^2).
BosePoles pade_bose_poles(int n) {
    BosePoles out;
    if (n < 1) return out;

    std::vector<double> band(static_cast<std::size_t>(2 * n - 1));
    for (int m = 1; m <= 2 * n - 1; ++m)
        band[static_cast<std::size_t>(m - 1)] =
            1.0 / std::sqrt(static_cast<double>(2 * m + 1) * (2 * m + 3));
    out.xi = tridiagonal_poles(band, n);

    std::vector<double> zeta;
    if (n >= 2) {
        std::vector<double> band2(static_cast<std::size_t>(2 * n - 2));
        for (int m = 1; m <= 2 * n - 2; ++m)
            band2[static_cast<std::size_t>(m - 1)] =
                1.0 / std::sqrt(static_cast<double>(2 * m + 3) * (2 * m + 5));
        zeta = tridiagonal_poles(band2, n - 1);
    }

    out.weight.resize(static_cast<std::size_t>(n));
    const double prefactor = 0.5 * n * (2.0 * n + 3.0);
    for (int j = 0; j < n; ++j) {
        const double xj2 = out.xi[static_cast<std::size_t>(j)] * out.xi[static_cast<std::size_t>(j)];
        double prod = 1.0;
        for (int k = 0; k < n - 1; ++k) {
            const double zk2 = zeta[static_cast<std::size_t>(k)] * zeta[static_cast<std::size_t>(k)];
            const double xk2 = (k == j) ? out.xi[static_cast<std::size_t>(n - 1)] * out.xi[static_cast<std::size_t>(n - 1)]
                                        : out.xi[static_cast<std::size_t>(k)] * out.xi[static_cast<std::size_t>(k)];
            prod *= (zk2 - xj2) / (xk2 - xj2);
        }
        out.weight[static_cast<std::size_t>(j)] = prefactor * prod;
    }
    return out;
}

// Matsubara poles xi_l = 2 pi l with unit weights.
BosePoles matsubara_bose_poles(int n) {
    BosePoles out;
    out.xi.resize(static_cast<std::size_t>(n));
    out.weight.assign(static_cast<std::size_t>(n), 1.0);
    for (int l = 1; l <= n; ++l) out.xi[static_cast<std::size_t>(l - 1)] = 2.0 * kPi * l;
    return out;
}

// Assemble the Debye correlation-function decomposition from a Bose pole set.
// With `consistent_debye` the Debye-pole weight evaluates the Bose factor at
// x = -i beta omega_c through the same rational approximant (the form that
// converges fastest for the Pade scheme); otherwise it uses the exact
// (1/2) cot(beta omega_c / 2), the textbook Matsubara form.
BathDecomposition assemble(const BathSpec& spec, const BosePoles& poles, int n_pade,
                           bool consistent_debye) {
    BathDecomposition decomp;
    decomp.n_pade = n_pade;
    if (spec.alpha == 0.0) return decomp;

    const double a = spec.alpha;
    const double wc = spec.omega_c;
    const double beta = spec.beta;
    const double bwc = beta * wc;

    double re_scale;
    if (consistent_debye) {
        re_scale = 1.0 / bwc;  // -> (1/2) cot(bwc/2) as poles accumulate
        for (std::size_t j = 0; j < poles.xi.size(); ++j) {
            const double xi2 = poles.xi[j] * poles.xi[j];
            re_scale -= 2.0 * poles.weight[j] * bwc / (xi2 - bwc * bwc);
        }
    } else {
        re_scale = 0.5 / std::tan(0.5 * bwc);
    }
    decomp.terms.push_back({std::complex<double>(0.5 * kPi * a * wc * wc * re_scale,
                                                 -0.25 * kPi * a * wc * wc),
                            std::complex<double>(wc, 0.0)});

    for (std::size_t j = 0; j < poles.xi.size(); ++j) {
        const double rate = poles.xi[j] / beta;
        const double weight =
            kPi * a / beta * poles.weight[j] * rate * wc * wc / (rate * rate - wc * wc);
        decomp.terms.push_back({std::complex<double>(weight, 0.0),
                                std::complex<double>(rate, 0.0)});
    }
    return decomp;
}

}  // namespace

void BathSpec::validate() const {
    if (!(alpha >= 0.0)) throw std::invalid_argument("BathSpec: alpha must be >= 0");
    if (!(omega_c > 0.0)) throw std::invalid_argument("BathSpec: omega_c must be > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("BathSpec: beta must be > 0");
}

double bose_occupation(double x) { return 1.0 / std::expm1(x); }

double spectral_density(double omega, const BathSpec& spec) {
    spec.validate();
    if (omega < 0.0) throw std::invalid_argument("spectral_density: omega must be >= 0");
    const double wc2 = spec.omega_c * spec.omega_c;
    return 0.5 * kPi * spec.alpha * omega * wc2 / (omega * omega + wc2);
}

std::complex<double> BathDecomposition::reconstruct(double t) const {
    std::complex<double> sum = 0.0;
    for (const auto& term : terms) sum += term.eta * std::exp(-term.gamma * t);
    return sum;
}

void BathDecomposition::drop_negligible(double abs_tol) {
    std::erase_if(terms, [abs_tol](const BathTerm& t) { return std::abs(t.eta) <= abs_tol; });
}

std::complex<double> correlation_quadrature(double t, const BathSpec& spec, double rel_tol) {
    spec.validate();
    if (t < 0.0) throw std::invalid_argument("correlation_quadrature: t must be >= 0");
    if (spec.alpha == 0.0) return {0.0, 0.0};

    const double a = spec.alpha;
    const double wc = spec.omega_c;
    const double wc2 = wc * wc;
    const double beta = spec.beta;

    // Imaginary part: -(1/pi) int J sin(wt) = -(pi a wc^2 / 4) e^{-wc t}.
    const double im = -0.25 * kPi * a * wc2 * std::exp(-wc * t);

    // Temperature-independent real part:
    //   (1/pi) int J cos(wt) = -(a wc^2 / 4) [e^x Ei(-x) + e^{-x} Ei(x)], x = wc t,
    // which diverges logarithmically as t -> 0+.
    double re0 = 0.0;
    if (t > 0.0) {
        const double x = wc * t;
        re0 = -0.25 * a * wc2 * (std::exp(x) * std::expint(-x) + std::exp(-x) * std::expint(x));
    }

    // Thermal real part: (2/pi) int J n_B cos(wt); the occupation factor
    // cuts the integrand off beyond w ~ 60 / beta.
    const double w_max = 60.0 / beta;
    auto integrand = [&](double w) {
        if (w <= 0.0) return a / beta;  // limit of w * n_B(beta w) * wc^2/(w^2+wc^2)
        return a * w * wc2 / (w * w + wc2) * bose_occupation(beta * w) * std::cos(w * t);
    };
    double error_estimate = 0.0;
    const double re_th = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, 0.0, w_max, 18, rel_tol, &error_estimate);
    const double scale = std::max(std::abs(re_th), 0.25 * kPi * a * wc2);
    if (!(error_estimate <= 1e-9 * scale))
        throw std::runtime_error("correlation_quadrature: quadrature did not converge, "
                                 "estimated error " + std::to_string(error_estimate));

    return {re0 + re_th, im};
}

BathDecomposition pade_decomposition(const BathSpec& spec, int n_pade) {
    spec.validate();
    if (n_pade < 1) throw std::invalid_argument("pade_decomposition: n_pade must be >= 1");
    if (spec.alpha == 0.0) {
        BathDecomposition empty;
        empty.n_pade = n_pade;
        return empty;
    }
    return assemble(spec, pade_bose_poles(n_pade), n_pade, true);
}

BathDecomposition matsubara_decomposition(const BathSpec& spec, int n_terms) {
    spec.validate();
    if (n_terms < 0) throw std::invalid_argument("matsubara_decomposition: n_terms must be >= 0");
    if (spec.alpha == 0.0) return {};
    return assemble(spec, matsubara_bose_poles(n_terms), n_terms, false);
}

double reconstruction_error(const BathDecomposition& decomp, const BathSpec& spec,
                            double t_min, double t_max, int n_points) {
    if (!(t_min > 0.0) || !(t_max > t_min) || n_points < 2)
        throw std::invalid_argument("reconstruction_error: need 0 < t_min < t_max, n >= 2");
    double worst = 0.0;
    for (int i = 0; i < n_points; ++i) {
        const double t = t_min + (t_max - t_min) * i / (n_points - 1);
        worst = std::max(worst, std::abs(decomp.reconstruct(t) - correlation_quadrature(t, spec)));
    }
    return worst;
}

BathDecomposition merge_resonant_terms(const BathDecomposition& decomp, double rel_tol) {
    std::vector<BathTerm> sorted = decomp.terms;
    std::sort(sorted.begin(), sorted.end(),
              [](const BathTerm& a, const BathTerm& b) { return a.gamma.real() < b.gamma.real(); });

    BathDecomposition out;
    out.n_pade = decomp.n_pade;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i + 1;
        while (j < sorted.size() &&
               std::abs(sorted[j].gamma - sorted[i].gamma) <=
                   rel_tol * std::max(sorted[i].gamma.real(), sorted[j].gamma.real()))
            ++j;

        if (j == i + 1) {
            out.terms.push_back(sorted[i]);
        } else {
            std::complex<double> eta_sum = 0.0, integral_sum = 0.0;
            double rate_lo = sorted[i].gamma.real(), rate_hi = rate_lo, abs_eta = 0.0,
                   rate_mean = 0.0;
            for (std::size_t k = i; k < j; ++k) {
                eta_sum += sorted[k].eta;
                integral_sum += sorted[k].eta / sorted[k].gamma;
                rate_lo = std::min(rate_lo, sorted[k].gamma.real());
                rate_hi = std::max(rate_hi, sorted[k].gamma.real());
                abs_eta += std::abs(sorted[k].eta);
                rate_mean += std::abs(sorted[k].eta) * sorted[k].gamma.real();
            }
            if (std::abs(eta_sum) > 1e-12 * abs_eta) {
                // match the cluster's t = 0 value and its time integral;
                // fall back to the weighted mean rate if that lands far
                // outside the cluster
                std::complex<double> gamma = eta_sum / integral_sum;
                if (!(gamma.real() > 0.2 * rate_lo && gamma.real() < 5.0 * rate_hi))
                    gamma = rate_mean / abs_eta;
                out.terms.push_back({eta_sum, gamma});
            }
        }
        i = j;
    }
    return out;
}

}  // namespace sbt
