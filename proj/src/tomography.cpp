#include "sbthermo/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sbt {

namespace {

using cxd = std::complex<double>;

Eigen::Vector4cd complex_pauli_components(const Mat2& m) {
    const auto& basis = pauli_basis();
    Eigen::Vector4cd c;
    for (int a = 0; a < 4; ++a) c(a) = (basis[a] * m).trace();
    return c;
}

Mat2 from_complex_pauli(const Eigen::Vector4cd& c) {
    const auto& basis = pauli_basis();
    Mat2 m = Mat2::Zero();
    for (int a = 0; a < 4; ++a) m += c(a) * basis[a];
    return m;
}

// Deterministic phase: rotate so the largest-magnitude entry is real positive.
Mat2 canonical_phase(const Mat2& e) {
    int best_r = 0, best_c = 0;
    double best = -1.0;
    for (int c = 0; c < 2; ++c)
        for (int r = 0; r < 2; ++r)
            if (std::abs(e(r, c)) > best + 1e-15) {
                best = std::abs(e(r, c));
                best_r = r;
                best_c = c;
            }
    if (best <= 0.0) return e;
    const cxd ph = e(best_r, best_c) / std::abs(e(best_r, best_c));
    return e / ph;
}

bool lex_less(const Mat2& a, const Mat2& b) {
    for (int c = 0; c < 2; ++c)
        for (int r = 0; r < 2; ++r) {
            const cxd x = a(r, c), y = b(r, c);
            if (x.real() != y.real()) return x.real() < y.real();
            if (x.imag() != y.imag()) return x.imag() < y.imag();
        }
    return false;
}

}  // namespace

std::vector<TrajectoryPoint> TransferSeries::state_series(const Mat2& rho0) const {
    const Eigen::Vector4d c0 = pauli_components(rho0);
    std::vector<TrajectoryPoint> out;
    out.reserve(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        TrajectoryPoint p;
        p.t = times[i];
        p.rho = from_pauli(phi[i] * c0);
        p.rho_dot = from_pauli(phi_dot[i] * c0);
        out.push_back(p);
    }
    return out;
}

TransferSeries propagate_basis(const SystemSpec& sys, const BathDecomposition& decomp, int l_max,
                               const PropagateOptions& opts, CouplingConvention convention) {
    const HierarchyTable table = build_hierarchy(decomp, l_max, convention);

    const Mat2 id = identity2();
    const std::array<Mat2, 4> initials = {
        0.5 * id, 0.5 * (id + sigma_x()), 0.5 * (id + sigma_y()), 0.5 * (id + sigma_z())};

    std::array<Trajectory, 4> runs;
    for (int r = 0; r < 4; ++r) {
        HierarchyState state = HierarchyState::initial(table, initials[static_cast<std::size_t>(r)]);
        runs[static_cast<std::size_t>(r)] = propagate(state, sys, table, opts);
    }

    const std::size_t n = runs[0].points.size();
    TransferSeries series;
    series.times.reserve(n);
    series.phi.reserve(n);
    series.phi_dot.reserve(n);

    const double sqrt2 = std::numbers::sqrt2;
    for (std::size_t i = 0; i < n; ++i) {
        series.times.push_back(runs[0].points[i].t);
        Super phi, phi_dot;
        // Phi(P_0) = sqrt(2) rho_I(t); Phi(P_k) = sqrt(2) (rho_k(t) - rho_I(t))
        phi.col(0) = pauli_components(sqrt2 * runs[0].points[i].rho);
        phi_dot.col(0) = pauli_components(sqrt2 * runs[0].points[i].rho_dot);
        for (int k = 1; k < 4; ++k) {
            const auto& pk = runs[static_cast<std::size_t>(k)].points[i];
            const auto& pi = runs[0].points[i];
            phi.col(k) = pauli_components(sqrt2 * (pk.rho - pi.rho));
            phi_dot.col(k) = pauli_components(sqrt2 * (pk.rho_dot - pi.rho_dot));
        }
        series.phi.push_back(phi);
        series.phi_dot.push_back(phi_dot);

        for (int r = 0; r < 4; ++r)
            series.hermiticity_residual =
                std::max(series.hermiticity_residual,
                         hermiticity_residual(runs[static_cast<std::size_t>(r)].points[i].rho));
        const Eigen::Vector4d id_row = series.phi.back().row(0).transpose();
        series.trace_residual = std::max(
            series.trace_residual, (id_row - Eigen::Vector4d(1, 0, 0, 0)).cwiseAbs().maxCoeff());
    }
    return series;
}

GeneratorSeries generator(const TransferSeries& series, double cond_bound) {
    GeneratorSeries out;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const Eigen::JacobiSVD<Super> svd(series.phi[i]);
        const double cond = svd.singularValues()(0) / svd.singularValues()(3);
        if (!(cond < cond_bound)) {
            out.truncated_at = series.times[i];
            break;
        }
        out.times.push_back(series.times[i]);
        out.condition.push_back(cond);
        out.gen.push_back(series.phi_dot[i] * series.phi[i].inverse());
    }
    return out;
}

Choi choi_of_generator(const Super& gen) {
    const Eigen::Matrix4cd genc = gen.cast<cxd>();
    Choi choi;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Mat2 unit = Mat2::Zero();
            unit(i, j) = 1.0;
            const Mat2 image = from_complex_pauli(genc * complex_pauli_components(unit));
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) choi(2 * i + a, 2 * j + b) = image(a, b);
        }
    return choi;
}

PseudoKraus pseudo_kraus(const Choi& choi) {
    const double herm = (choi - choi.adjoint()).norm();
    if (herm > 1e-8 * std::max(1.0, choi.norm()))
        throw std::invalid_argument("pseudo_kraus: Choi matrix is not Hermitian");

    Eigen::SelfAdjointEigenSolver<Choi> solver(0.5 * (choi + choi.adjoint()));
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("pseudo_kraus: eigendecomposition failed");

    struct Term {
        double theta;
        Mat2 op;
    };
    std::vector<Term> terms;
    const double scale = solver.eigenvalues().cwiseAbs().maxCoeff();
    for (int k = 0; k < 4; ++k) {
        const double theta = solver.eigenvalues()(k);
        if (std::abs(theta) <= 1e-13 * scale) continue;
        const Eigen::Vector4cd v = solver.eigenvectors().col(k);
        Mat2 e;
        e(0, 0) = v(0);
        e(1, 0) = v(1);
        e(0, 1) = v(2);
        e(1, 1) = v(3);
        terms.push_back({theta, canonical_phase(e)});
    }
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
        if (std::abs(a.theta) != std::abs(b.theta)) return std::abs(a.theta) > std::abs(b.theta);
        return lex_less(a.op, b.op);
    });

    PseudoKraus out;
    for (const auto& term : terms) {
        out.theta.push_back(term.theta);
        out.ops.push_back(term.op);
    }
    return out;
}

Mat2 effective_hamiltonian(const PseudoKraus& kraus) {
    const cxd quarter_i(0.0, 0.25);
    Mat2 k = Mat2::Zero();
    for (std::size_t j = 0; j < kraus.theta.size(); ++j) {
        const Mat2& e = kraus.ops[j];
        const cxd tr = e.trace();
        k -= quarter_i * kraus.theta[j] * (tr * e.adjoint() - std::conj(tr) * e);
    }
    return k;
}

Super lindblad_superop(const Mat2& k, const std::vector<double>& theta,
                       const std::vector<Mat2>& lindblad) {
    return superop_matrix([&](const Mat2& rho) {
        Mat2 out = cxd(0.0, -1.0) * commutator(k, rho);
        for (std::size_t j = 0; j < theta.size(); ++j) {
            const Mat2& l = lindblad[j];
            const Mat2 ldl = l.adjoint() * l;
            out += theta[j] * (l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl));
        }
        return out;
    });
}

MinimalDissipator minimal_dissipator(const PseudoKraus& kraus, const Mat2& k_s,
                                     const Super& gen) {
    MinimalDissipator out;
    out.theta = kraus.theta;
    for (const Mat2& e : kraus.ops)
        out.lindblad.push_back(e - 0.5 * e.trace() * identity2());
    out.reconstruction_residual = (gen - lindblad_superop(k_s, out.theta, out.lindblad)).norm();
    return out;
}

double gibbs_fixed_point_residual(const Mat2& k_s, double beta, const Super& gen) {
    Eigen::SelfAdjointEigenSolver<Mat2> solver(k_s);
    const Eigen::Vector2d ev = solver.eigenvalues();
    // spectral shift keeps exp(-beta k) finite at large beta
    const double w0 = 1.0;
    const double w1 = std::exp(-beta * (ev(1) - ev(0)));
    const double z = w0 + w1;
    const Mat2 gibbs =
        (w0 / z) * solver.eigenvectors().col(0) * solver.eigenvectors().col(0).adjoint() +
        (w1 / z) * solver.eigenvectors().col(1) * solver.eigenvectors().col(1).adjoint();
    return apply_superop(gen, gibbs).norm();
}

std::vector<Mat2> SnapshotSeries::k_s() const {
    std::vector<Mat2> out;
    out.reserve(snapshots.size());
    for (const auto& s : snapshots) out.push_back(s.k_s);
    return out;
}

std::vector<double> SnapshotSeries::times() const {
    std::vector<double> out;
    out.reserve(snapshots.size());
    for (const auto& s : snapshots) out.push_back(s.t);
    return out;
}

SnapshotSeries analyze_generator(const GeneratorSeries& series, double beta) {
    SnapshotSeries out;
    out.snapshots.resize(series.times.size());
    const std::int64_t n = static_cast<std::int64_t>(series.times.size());
#pragma omp parallel for schedule(static) if (n > 32)
    for (std::int64_t i = 0; i < n; ++i) {
        GeneratorSnapshot snap;
        snap.t = series.times[static_cast<std::size_t>(i)];
        snap.gen = series.gen[static_cast<std::size_t>(i)];
        snap.choi = choi_of_generator(snap.gen);
        snap.kraus = pseudo_kraus(snap.choi);
        snap.k_s = effective_hamiltonian(snap.kraus);
        for (std::size_t k = 0; k < snap.kraus.theta.size() && k < 4; ++k)
            snap.theta[k] = snap.kraus.theta[k];
        Mat2 constraint = Mat2::Zero();
        for (std::size_t k = 0; k < snap.kraus.theta.size(); ++k)
            constraint += snap.kraus.theta[k] * snap.kraus.ops[k].adjoint() * snap.kraus.ops[k];
        snap.kraus_constraint = constraint.norm();
        const MinimalDissipator diss = minimal_dissipator(snap.kraus, snap.k_s, snap.gen);
        snap.reconstruction_residual = diss.reconstruction_residual;
        snap.gibbs_residual = gibbs_fixed_point_residual(snap.k_s, beta, snap.gen);
        out.snapshots[static_cast<std::size_t>(i)] = std::move(snap);
    }
    return out;
}

}  // namespace sbt
