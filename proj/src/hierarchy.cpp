#include "sbthermo/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sbt {

namespace {

using cxd = std::complex<double>;

constexpr cxd kImag{0.0, 1.0};

struct VectorHash {
    std::size_t operator()(const std::vector<std::uint8_t>& v) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (auto b : v) {
            h ^= b;
            h *= 1099511628211ull;
        }
        return h;
    }
};

// Parallel element-wise helpers used by the integrators. Each slot is written
// by exactly one worker, so results do not depend on the worker count.
void axpy(std::vector<cxd>& out, const std::vector<cxd>& x, const std::vector<cxd>& y,
          double a) {
    const std::int64_t n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static) if (n > 1 << 15)
    for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] =
        x[static_cast<std::size_t>(i)] + a * y[static_cast<std::size_t>(i)];
}

void accumulate(std::vector<cxd>& acc, const std::vector<cxd>& k, double w) {
    const std::int64_t n = static_cast<std::int64_t>(acc.size());
#pragma omp parallel for schedule(static) if (n > 1 << 15)
    for (std::int64_t i = 0; i < n; ++i) acc[static_cast<std::size_t>(i)] +=
        w * k[static_cast<std::size_t>(i)];
}

bool tier0_sane(const std::vector<cxd>& y) {
    for (int i = 0; i < 4; ++i) {
        const cxd v = y[static_cast<std::size_t>(i)];
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    const double norm2 = std::norm(y[0]) + std::norm(y[1]) + std::norm(y[2]) + std::norm(y[3]);
    return norm2 < 1e6;
}

bool state_finite(const std::vector<cxd>& y) {
    for (const cxd& v : y)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

void write_bytes(std::ofstream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_bytes(std::ifstream& is, void* p, std::size_t n) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!is) throw std::runtime_error("checkpoint: truncated file");
}

constexpr std::uint32_t kCheckpointMagic = 0x54484253;  // "SBHT"
constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace

Mat2 SystemSpec::hamiltonian() const {
    return -epsilon * sigma_z() + delta * sigma_x();
}

int effective_workers() {
    if (const char* env = std::getenv("SBTHERMO_WORKERS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

HierarchyTable build_hierarchy(const BathDecomposition& decomp, int l_max,
                               CouplingConvention convention, std::size_t max_ados) {
    if (l_max < 0) throw std::invalid_argument("build_hierarchy: l_max must be >= 0");

    HierarchyTable table;
    table.convention = convention;
    table.terms = decomp.terms;
    table.l_max = l_max;
    const int k = static_cast<int>(decomp.terms.size());
    table.n_terms = k;

    // Retained-set size C(l_max + k, k); guard the memory budget up front.
    double count = 1.0;
    for (int i = 1; i <= k; ++i) count *= static_cast<double>(l_max + i) / i;
    if (count > static_cast<double>(max_ados))
        throw std::length_error("build_hierarchy: retained set of " + std::to_string(count) +
                                " ADOs exceeds budget of " + std::to_string(max_ados));

    // Enumerate occupation vectors with tier <= l_max in lexicographic order.
    std::vector<std::vector<std::uint8_t>> occs;
    std::vector<std::uint8_t> current(static_cast<std::size_t>(k), 0);
    const auto enumerate = [&](auto&& self, int slot, int budget) -> void {
        if (slot == k) {
            occs.push_back(current);
            return;
        }
        for (int n = 0; n <= budget; ++n) {
            current[static_cast<std::size_t>(slot)] = static_cast<std::uint8_t>(n);
            self(self, slot + 1, budget - n);
        }
        current[static_cast<std::size_t>(slot)] = 0;
    };
    if (k > 0) {
        enumerate(enumerate, 0, l_max);
    } else {
        occs.push_back({});
    }

    table.n_ados = occs.size();
    std::unordered_map<std::vector<std::uint8_t>, std::size_t, VectorHash> index;
    index.reserve(occs.size() * 2);
    for (std::size_t i = 0; i < occs.size(); ++i) index.emplace(occs[i], i);

    table.occupations.resize(table.n_ados * static_cast<std::size_t>(k));
    table.gamma_tot.resize(table.n_ados);
    table.link_offset.assign(table.n_ados + 1, 0);
    table.links.reserve(table.n_ados * static_cast<std::size_t>(k));

    // Factor table over (term, direction, occupancy n_l); the link cost per
    // ADO is then just an index pair. Contribution of a link is
    // c_left * (sz nb) + c_right * (nb sz), folded to p = cL + cR on the
    // diagonal and m = cL - cR on the off-diagonal of the neighbor block.
    const bool standard = convention == CouplingConvention::standard;
    const auto factor_index = [&](int l, int dir, int n_l) {
        return static_cast<std::uint32_t>((2 * l + dir) * (l_max + 1) + n_l);
    };
    table.factor_p.assign(static_cast<std::size_t>(2 * std::max(k, 1) * (l_max + 1)), 0.0);
    table.factor_m.assign(table.factor_p.size(), 0.0);
    for (int l = 0; l < k; ++l) {
        const cxd eta = decomp.terms[static_cast<std::size_t>(l)].eta;
        const double abs_eta = std::abs(eta);
        if (abs_eta == 0.0) continue;
        for (int n_l = 0; n_l <= l_max; ++n_l) {
            const double f = std::sqrt((n_l + 1.0) * abs_eta);
            const cxd up_left = standard ? -kImag * f : cxd(-f, 0.0);
            const cxd up_right = standard ? kImag * f : cxd(-f, 0.0);
            table.factor_p[factor_index(l, 0, n_l)] = up_left + up_right;
            table.factor_m[factor_index(l, 0, n_l)] = up_left - up_right;
            if (n_l > 0) {
                const double g = std::sqrt(static_cast<double>(n_l) / abs_eta);
                const cxd dn_left = standard ? -kImag * g * eta : -g * eta;
                const cxd dn_right = standard ? kImag * g * std::conj(eta) : g * std::conj(eta);
                table.factor_p[factor_index(l, 1, n_l)] = dn_left + dn_right;
                table.factor_m[factor_index(l, 1, n_l)] = dn_left - dn_right;
            }
        }
    }

    std::vector<std::uint8_t> probe(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < occs.size(); ++i) {
        const auto& occ = occs[i];
        if (k > 0)
            std::memcpy(table.occupations.data() + i * static_cast<std::size_t>(k), occ.data(),
                        static_cast<std::size_t>(k));

        cxd gamma_sum = 0.0;
        int tier = 0;
        for (int l = 0; l < k; ++l) {
            gamma_sum += static_cast<double>(occ[static_cast<std::size_t>(l)]) *
                         decomp.terms[static_cast<std::size_t>(l)].gamma;
            tier += occ[static_cast<std::size_t>(l)];
        }
        table.gamma_tot[i] = gamma_sum;

        for (int l = 0; l < k; ++l) {
            const double abs_eta = std::abs(decomp.terms[static_cast<std::size_t>(l)].eta);
            const int n_l = occ[static_cast<std::size_t>(l)];
            if (abs_eta == 0.0) continue;

            if (tier < l_max) {
                probe = occ;
                ++probe[static_cast<std::size_t>(l)];
                const auto it = index.find(probe);
                table.links.push_back({static_cast<std::uint32_t>(it->second),
                                       factor_index(l, 0, n_l)});
            }
            if (n_l > 0) {
                probe = occ;
                --probe[static_cast<std::size_t>(l)];
                const auto it = index.find(probe);
                table.links.push_back({static_cast<std::uint32_t>(it->second),
                                       factor_index(l, 1, n_l)});
            }
        }
        table.link_offset[i + 1] = static_cast<std::int64_t>(table.links.size());
    }
    return table;
}

HierarchyState HierarchyState::initial(const HierarchyTable& table, const Mat2& rho0) {
    HierarchyState state;
    state.data.assign(table.state_size(), cxd{0.0, 0.0});
    state.data[0] = rho0(0, 0);
    state.data[1] = rho0(1, 0);
    state.data[2] = rho0(0, 1);
    state.data[3] = rho0(1, 1);
    return state;
}

Mat2 HierarchyState::tier0() const {
    Mat2 rho;
    rho(0, 0) = data[0];
    rho(1, 0) = data[1];
    rho(0, 1) = data[2];
    rho(1, 1) = data[3];
    return rho;
}

void heom_rhs(const HierarchyTable& table, const SystemSpec& sys,
              std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
    const cxd h00(-sys.epsilon, 0.0);
    const cxd h11(sys.epsilon, 0.0);
    const cxd h01(sys.delta, 0.0);  // real symmetric H_S

    const std::int64_t n = static_cast<std::int64_t>(table.n_ados);
    const cxd* gamma = table.gamma_tot.data();
    const std::int64_t* offs = table.link_offset.data();
    const HierarchyTable::Link* links = table.links.data();
    const cxd* fp = table.factor_p.data();
    const cxd* fm = table.factor_m.data();
    const cxd* y = in.data();
    cxd* dy = out.data();

#pragma omp parallel for schedule(static) if (n > 256)
    for (std::int64_t i = 0; i < n; ++i) {
        const cxd* r = y + 4 * i;
        const cxd r00 = r[0], r10 = r[1], r01 = r[2], r11 = r[3];

        // -i [H, rho] - gamma_tot rho
        const cxd hr00 = h00 * r00 + h01 * r10;
        const cxd hr10 = h01 * r00 + h11 * r10;
        const cxd hr01 = h00 * r01 + h01 * r11;
        const cxd hr11 = h01 * r01 + h11 * r11;
        const cxd rh00 = r00 * h00 + r01 * h01;
        const cxd rh10 = r10 * h00 + r11 * h01;
        const cxd rh01 = r00 * h01 + r01 * h11;
        const cxd rh11 = r10 * h01 + r11 * h11;

        const cxd g = gamma[i];
        cxd o00 = -kImag * (hr00 - rh00) - g * r00;
        cxd o10 = -kImag * (hr10 - rh10) - g * r10;
        cxd o01 = -kImag * (hr01 - rh01) - g * r01;
        cxd o11 = -kImag * (hr11 - rh11) - g * r11;

        // tier couplings, folded into p * diagonal and m * off-diagonal parts
        for (std::int64_t j = offs[i]; j < offs[i + 1]; ++j) {
            const auto& link = links[j];
            const cxd* nb = y + 4 * static_cast<std::int64_t>(link.neighbor);
            const cxd p = fp[link.factor];
            const cxd m = fm[link.factor];
            o00 += p * nb[0];
            o10 -= m * nb[1];
            o01 += m * nb[2];
            o11 -= p * nb[3];
        }

        cxd* o = dy + 4 * i;
        o[0] = o00;
        o[1] = o10;
        o[2] = o01;
        o[3] = o11;
    }
}

std::vector<double> Trajectory::sigma_z() const {
    std::vector<double> sz;
    sz.reserve(points.size());
    for (const auto& p : points) sz.push_back((p.rho(0, 0) - p.rho(1, 1)).real());
    return sz;
}

namespace {

class Stepper {
public:
    Stepper(const HierarchyTable& table, const SystemSpec& sys, std::size_t n)
        : table_(table), sys_(sys), k1_(n), k2_(n), k3_(n), k4_(n), tmp_(n), acc_(n) {}

    void rk4_step(std::vector<cxd>& y, double dt) {
        heom_rhs(table_, sys_, y, k1_);
        axpy(tmp_, y, k1_, 0.5 * dt);
        heom_rhs(table_, sys_, tmp_, k2_);
        axpy(tmp_, y, k2_, 0.5 * dt);
        heom_rhs(table_, sys_, tmp_, k3_);
        axpy(tmp_, y, k3_, dt);
        heom_rhs(table_, sys_, tmp_, k4_);
        acc_ = k1_;
        accumulate(acc_, k2_, 2.0);
        accumulate(acc_, k3_, 2.0);
        accumulate(acc_, k4_, 1.0);
        accumulate(y, acc_, dt / 6.0);
    }

private:
    const HierarchyTable& table_;
    const SystemSpec& sys_;
    std::vector<cxd> k1_, k2_, k3_, k4_, tmp_, acc_;
};

// Embedded Cash-Karp 4(5) pair for the adaptive path.
class AdaptiveStepper {
public:
    AdaptiveStepper(const HierarchyTable& table, const SystemSpec& sys, std::size_t n, double tol)
        : table_(table), sys_(sys), tol_(tol), n_(n) {
        for (auto& k : k_) k.resize(n);
        trial_.resize(n);
    }

    // Integrates y over a span of length `span` starting at time t.
    void advance(std::vector<cxd>& y, double t, double span) {
        double h = std::min(last_h_ > 0 ? last_h_ : span, span);
        double done = 0.0;
        int rejects = 0;
        while (done < span * (1.0 - 1e-14)) {
            h = std::min(h, span - done);
            const double err = attempt(y, h);
            if (err <= 1.0) {
                done += h;
                last_h_ = h;
                y.swap(trial_);
                h *= std::clamp(0.9 * std::pow(std::max(err, 1e-12), -0.2), 0.2, 5.0);
                rejects = 0;
            } else {
                h *= std::clamp(0.9 * std::pow(err, -0.25), 0.1, 0.9);
                if (++rejects > 60) throw PropagationDiverged(t + done);
            }
        }
    }

private:
    // Returns the scaled error of a trial step; trial_ holds the 5th-order result.
    double attempt(const std::vector<cxd>& y, double h) {
        static constexpr double a[6][5] = {
            {},
            {1.0 / 5},
            {3.0 / 40, 9.0 / 40},
            {3.0 / 10, -9.0 / 10, 6.0 / 5},
            {-11.0 / 54, 5.0 / 2, -70.0 / 27, 35.0 / 27},
            {1631.0 / 55296, 175.0 / 512, 575.0 / 13824, 44275.0 / 110592, 253.0 / 4096}};
        static constexpr double b5[6] = {37.0 / 378, 0, 250.0 / 621, 125.0 / 594, 0, 512.0 / 1771};
        static constexpr double b4[6] = {2825.0 / 27648,  0,             18575.0 / 48384,
                                         13525.0 / 55296, 277.0 / 14336, 1.0 / 4};

        heom_rhs(table_, sys_, y, k_[0]);
        for (int s = 1; s < 6; ++s) {
            const std::int64_t n = static_cast<std::int64_t>(n_);
#pragma omp parallel for schedule(static) if (n > 1 << 15)
            for (std::int64_t i = 0; i < n; ++i) {
                cxd acc = y[static_cast<std::size_t>(i)];
                for (int q = 0; q < s; ++q)
                    acc += h * a[s][q] * k_[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)];
                trial_[static_cast<std::size_t>(i)] = acc;
            }
            heom_rhs(table_, sys_, trial_, k_[static_cast<std::size_t>(s)]);
        }

        double worst = 0.0;
        const std::int64_t n = static_cast<std::int64_t>(n_);
#pragma omp parallel for schedule(static) reduction(max : worst) if (n > 1 << 15)
        for (std::int64_t i = 0; i < n; ++i) {
            cxd y5 = y[static_cast<std::size_t>(i)];
            cxd y4 = y[static_cast<std::size_t>(i)];
            for (int s = 0; s < 6; ++s) {
                y5 += h * b5[s] * k_[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)];
                y4 += h * b4[s] * k_[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)];
            }
            trial_[static_cast<std::size_t>(i)] = y5;
            const double scale = tol_ * (1.0 + std::abs(y5));
            worst = std::max(worst, std::abs(y5 - y4) / scale);
        }
        return worst;
    }

    const HierarchyTable& table_;
    const SystemSpec& sys_;
    double tol_;
    std::size_t n_;
    std::vector<cxd> k_[6];
    std::vector<cxd> trial_;
    double last_h_{-1.0};
};

}  // namespace

Trajectory propagate(HierarchyState& state, const SystemSpec& sys, const HierarchyTable& table,
                     const PropagateOptions& opts) {
    if (!(opts.dt > 0.0)) throw std::invalid_argument("propagate: dt must be > 0");
    if (!(opts.t_final >= 0.0)) throw std::invalid_argument("propagate: t_final must be >= 0");
    if (opts.output_stride < 1) throw std::invalid_argument("propagate: output_stride >= 1");
    if (state.data.size() != table.state_size())
        throw std::invalid_argument("propagate: state size does not match table");

#ifdef _OPENMP
    omp_set_num_threads(effective_workers());
#endif

    const double grid_dt = opts.dt * opts.output_stride;
    const long n_grid = std::lround(opts.t_final / grid_dt);
    if (std::abs(n_grid * grid_dt - opts.t_final) > 1e-9 * std::max(1.0, opts.t_final))
        throw std::invalid_argument("propagate: dt * output_stride must divide t_final");

    Trajectory traj;
    traj.points.reserve(static_cast<std::size_t>(n_grid) + 1);

    const double t0 = state.time;
    std::vector<cxd> rhs_buf(table.state_size());
    const auto record = [&](double t) {
        heom_rhs(table, sys, state.data, rhs_buf);
        TrajectoryPoint p;
        p.t = t;
        p.rho = state.tier0();
        p.rho_dot(0, 0) = rhs_buf[0];
        p.rho_dot(1, 0) = rhs_buf[1];
        p.rho_dot(0, 1) = rhs_buf[2];
        p.rho_dot(1, 1) = rhs_buf[3];
        traj.points.push_back(p);
        if (!tier0_sane(state.data)) throw PropagationDiverged(t);
    };

    record(t0);

    if (opts.integrator == IntegratorKind::rk4) {
        Stepper stepper(table, sys, table.state_size());
        long step = 0;
        for (long g = 0; g < n_grid; ++g) {
            for (int s = 0; s < opts.output_stride; ++s) {
                stepper.rk4_step(state.data, opts.dt);
                ++step;
                if (!tier0_sane(state.data)) throw PropagationDiverged(t0 + step * opts.dt);
                if (step % 256 == 0 && !state_finite(state.data))
                    throw PropagationDiverged(t0 + step * opts.dt);
            }
            record(t0 + (g + 1) * grid_dt);
        }
    } else {
        AdaptiveStepper stepper(table, sys, table.state_size(), opts.rk45_tol);
        for (long g = 0; g < n_grid; ++g) {
            stepper.advance(state.data, t0 + g * grid_dt, grid_dt);
            if (!state_finite(state.data)) throw PropagationDiverged(t0 + (g + 1) * grid_dt);
            record(t0 + (g + 1) * grid_dt);
        }
    }
    state.time = t0 + n_grid * grid_dt;

    if (!opts.checkpoint_path.empty()) save_checkpoint(opts.checkpoint_path, sys, table, state);
    return traj;
}

Trajectory propagate_fresh(const SystemSpec& sys, const BathDecomposition& decomp, int l_max,
                           const Mat2& rho0, const PropagateOptions& opts,
                           CouplingConvention convention) {
    const HierarchyTable table = build_hierarchy(decomp, l_max, convention);
    HierarchyState state = HierarchyState::initial(table, rho0);
    return propagate(state, sys, table, opts);
}

ScanResult convergence_scan(const SystemSpec& sys, const BathSpec& spec, const ScanOptions& opts) {
    if (opts.l_values.empty() || opts.n_pade_values.empty() || opts.dt_values.empty())
        throw std::invalid_argument("convergence_scan: empty grid");

    const double grid_dt = opts.t_final / opts.n_output;
    const auto snapped_dt = [&](double dt) {
        const int per = std::max(1, static_cast<int>(std::lround(grid_dt / dt)));
        return grid_dt / per;
    };

    std::map<std::tuple<int, int, double>, std::vector<double>> cache;
    const auto trajectory_sz = [&](int l, int n_pade, double dt) -> const std::vector<double>& {
        const auto key = std::make_tuple(l, n_pade, dt);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        BathDecomposition decomp;
        if (spec.alpha != 0.0) decomp = pade_decomposition(spec, n_pade);
        const HierarchyTable table = build_hierarchy(decomp, spec.alpha == 0.0 ? 0 : l,
                                                     CouplingConvention::standard, opts.max_ados);
        HierarchyState state = HierarchyState::initial(table, opts.rho0);
        PropagateOptions popts;
        popts.dt = dt;
        popts.output_stride = std::max(1, static_cast<int>(std::lround(grid_dt / dt)));
        popts.t_final = opts.t_final;
        Trajectory traj = propagate(state, sys, table, popts);
        return cache.emplace(key, traj.sigma_z()).first->second;
    };

    ScanResult result;
    const std::size_t nl = opts.l_values.size();
    const std::size_t nn = opts.n_pade_values.size();
    const std::size_t nd = opts.dt_values.size();

    for (std::size_t i = 0; i < nl; ++i)
        for (std::size_t j = 0; j < nn; ++j)
            for (std::size_t d = 0; d < nd; ++d) {
                const std::size_t i2 = std::min(i + 1, nl - 1);
                const std::size_t j2 = std::min(j + 1, nn - 1);
                const std::size_t d2 = std::min(d + 1, nd - 1);
                if (i2 == i && j2 == j && d2 == d) continue;  // nothing finer

                ScanComparison cmp;
                cmp.coarse = {opts.l_values[i], opts.n_pade_values[j], snapped_dt(opts.dt_values[d])};
                cmp.fine = {opts.l_values[i2], opts.n_pade_values[j2], snapped_dt(opts.dt_values[d2])};
                const auto& a = trajectory_sz(cmp.coarse.l_max, cmp.coarse.n_pade, cmp.coarse.dt);
                const auto& b = trajectory_sz(cmp.fine.l_max, cmp.fine.n_pade, cmp.fine.dt);
                double sup = 0.0;
                for (std::size_t q = 0; q < a.size(); ++q)
                    sup = std::max(sup, std::abs(a[q] - b[q]));
                cmp.sup_diff = sup;
                result.report.push_back(cmp);

                if (!result.converged && sup < opts.tolerance) {
                    result.converged = true;
                    result.selected = cmp.coarse;
                    result.achieved = sup;
                    return result;
                }
            }
    return result;
}

void save_checkpoint(const std::filesystem::path& path, const SystemSpec& sys,
                     const HierarchyTable& table, const HierarchyState& state) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("checkpoint: cannot open " + path.string());
    write_bytes(os, &kCheckpointMagic, 4);
    write_bytes(os, &kCheckpointVersion, 4);
    write_bytes(os, &sys.epsilon, 8);
    write_bytes(os, &sys.delta, 8);
    const std::uint32_t conv = table.convention == CouplingConvention::standard ? 0 : 1;
    write_bytes(os, &conv, 4);
    const std::uint32_t n_terms = static_cast<std::uint32_t>(table.terms.size());
    write_bytes(os, &n_terms, 4);
    for (const auto& term : table.terms) {
        const double vals[4] = {term.eta.real(), term.eta.imag(), term.gamma.real(),
                                term.gamma.imag()};
        write_bytes(os, vals, 32);
    }
    const std::uint32_t l_max = static_cast<std::uint32_t>(table.l_max);
    write_bytes(os, &l_max, 4);
    const std::uint64_t n_ados = table.n_ados;
    write_bytes(os, &n_ados, 8);
    write_bytes(os, &state.time, 8);
    write_bytes(os, state.data.data(), state.data.size() * sizeof(cxd));
    if (!os) throw std::runtime_error("checkpoint: write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open " + path.string());
    std::uint32_t magic = 0, version = 0;
    read_bytes(is, &magic, 4);
    read_bytes(is, &version, 4);
    if (magic != kCheckpointMagic) throw std::runtime_error("checkpoint: bad magic");
    if (version != kCheckpointVersion)
        throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));

    Checkpoint cp;
    read_bytes(is, &cp.sys.epsilon, 8);
    read_bytes(is, &cp.sys.delta, 8);
    std::uint32_t conv = 0, n_terms = 0;
    read_bytes(is, &conv, 4);
    read_bytes(is, &n_terms, 4);
    cp.convention = conv == 0 ? CouplingConvention::standard : CouplingConvention::paper_literal;
    cp.decomp.terms.resize(n_terms);
    for (auto& term : cp.decomp.terms) {
        double vals[4];
        read_bytes(is, vals, 32);
        term.eta = {vals[0], vals[1]};
        term.gamma = {vals[2], vals[3]};
    }
    std::uint32_t l_max = 0;
    read_bytes(is, &l_max, 4);
    cp.l_max = static_cast<int>(l_max);
    std::uint64_t n_ados = 0;
    read_bytes(is, &n_ados, 8);
    read_bytes(is, &cp.state.time, 8);
    cp.state.data.resize(4 * n_ados);
    read_bytes(is, cp.state.data.data(), cp.state.data.size() * sizeof(cxd));
    return cp;
}

}  // namespace sbt
