#include "fracmem/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "fracmem/spectral.hpp"

namespace fracmem {

namespace {

void check_config(const SolverConfig& c) {
    if (!(c.dt > 0.0)) throw std::invalid_argument("solver dt must be positive");
    if (!(c.horizon >= c.dt))
        throw std::invalid_argument("solver horizon must be at least one step");
    if (!(c.blowup_threshold > 0.0))
        throw std::invalid_argument("blowup_threshold must be positive");
    if (c.corrector_passes < 0)
        throw std::invalid_argument("corrector_passes must be nonnegative");
    if (c.sample_every < 1)
        throw std::invalid_argument("sample_every must be at least 1");
}

bool all_finite(const std::array<double, 3>& d) {
    return std::isfinite(d[0]) && std::isfinite(d[1]) && std::isfinite(d[2]);
}

}  // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::global_looking: return "global-looking";
        case Verdict::growth: return "growth";
        default: return "overflow";
    }
}

Simulator::Simulator(std::shared_ptr<const TorusGrid> grid, ModelParams params,
                     SolverConfig config)
    : grid_(std::move(grid)),
      params_(params),
      config_(std::move(config)),
      table_(grid_, params, config_.dt),
      hsigma_symbol_(grid_->symbol(params.laplacian_order)),
      history_(grid_, params.memory_exponent, config_.dt, config_.history_budget) {
    check_config(config_);
}

void Simulator::initialize(const Field& u0, const Field& u1) {
    require_same_grid(u0, u1);
    if (!u0.grid().compatible_with(*grid_))
        throw std::invalid_argument("initial data lives on a different grid");

    uh_ = to_spectral(u0).spectral();
    vh_ = to_spectral(u1).spectral();
    prev_uh_.clear();
    have_prev_ = false;
    t_ = 0.0;
    step_ = 0;
    history_ = MemoryHistory(grid_, params_.memory_exponent, config_.dt,
                             config_.history_budget);
    forcing_now_.assign(grid_->num_points(), 0.0);
    if (config_.memory_forcing_enabled) {
        history_.append(nonlinearity(uh_));
        // the convolution over an empty interval vanishes
    }
    if (config_.extra_forcing) {
        const std::vector<double> extra = config_.extra_forcing(0.0);
        for (std::size_t i = 0; i < forcing_now_.size(); ++i) forcing_now_[i] += extra[i];
    }
}

std::vector<double> Simulator::nonlinearity(
    const std::vector<std::complex<double>>& uh) const {
    const std::size_t n = grid_->num_points();
    std::vector<std::complex<double>> work(uh);
    grid_->backward(work.data());
    const double p = params_.power;
    for (std::size_t i = 0; i < n; ++i)
        work[i] = std::complex<double>(std::pow(std::abs(work[i].real()), p), 0.0);
    grid_->forward(work.data());
    const auto& keep = grid_->dealias_keep();
    for (std::size_t i = 0; i < n; ++i)
        if (!keep[i]) work[i] = {0.0, 0.0};
    grid_->backward(work.data());
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = work[i].real();
    return g;
}

void Simulator::forcing_to_spectral(const std::vector<double>& phys,
                                    std::vector<std::complex<double>>& out) const {
    const std::size_t n = grid_->num_points();
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::complex<double>(phys[i], 0.0);
    grid_->forward(out.data());
}

bool Simulator::step() {
    const std::size_t n = grid_->num_points();
    const double t_new = t_ + config_.dt;

    std::vector<std::complex<double>> forcing_hat_now;
    forcing_to_spectral(forcing_now_, forcing_hat_now);

    // Convolution prefix at the new time: everything except the endpoint sample.
    std::vector<double> prefix(n, 0.0);
    double endpoint_weight = 0.0;
    if (config_.memory_forcing_enabled) {
        prefix = history_.weighted_prefix(step_ + 1);
        endpoint_weight = history_.weights().endpoint();
    }
    std::vector<double> extra_new;
    if (config_.extra_forcing) extra_new = config_.extra_forcing(t_new);

    // Predictor for the endpoint nonlinearity sample.
    std::vector<std::complex<double>> u_guess(n);
    if (have_prev_) {
        for (std::size_t i = 0; i < n; ++i) u_guess[i] = 2.0 * uh_[i] - prev_uh_[i];
    } else {
        for (std::size_t i = 0; i < n; ++i) u_guess[i] = uh_[i] + config_.dt * vh_[i];
    }
    std::vector<double> g_try =
        config_.memory_forcing_enabled ? nonlinearity(u_guess)
                                       : std::vector<double>(n, 0.0);

    const auto& k1 = table_.k1();
    const auto& k2 = table_.k2();
    const auto& dk1 = table_.dk1();
    const auto& dk2 = table_.dk2();
    const auto& fo_u = table_.forcing_old_u();
    const auto& fn_u = table_.forcing_new_u();
    const auto& fo_v = table_.forcing_old_v();
    const auto& fn_v = table_.forcing_new_v();

    std::vector<std::complex<double>> uh_new(n), vh_new(n), forcing_hat_new;
    std::vector<double> forcing_new(n);
    for (int pass = 0; pass <= config_.corrector_passes; ++pass) {
        for (std::size_t i = 0; i < n; ++i)
            forcing_new[i] = prefix[i] + endpoint_weight * g_try[i];
        if (!extra_new.empty())
            for (std::size_t i = 0; i < n; ++i) forcing_new[i] += extra_new[i];
        forcing_to_spectral(forcing_new, forcing_hat_new);

        for (std::size_t i = 0; i < n; ++i) {
            uh_new[i] = k1[i] * uh_[i] + k2[i] * vh_[i] + fo_u[i] * forcing_hat_now[i] +
                        fn_u[i] * forcing_hat_new[i];
            vh_new[i] = dk1[i] * uh_[i] + dk2[i] * vh_[i] + fo_v[i] * forcing_hat_now[i] +
                        fn_v[i] * forcing_hat_new[i];
        }
        if (config_.memory_forcing_enabled) g_try = nonlinearity(uh_new);
    }

    // Reject a non-finite state, keeping the last finite one for inspection.
    double probe = 0.0;
    for (std::size_t i = 0; i < n; ++i) probe += std::norm(uh_new[i]) + std::norm(vh_new[i]);
    if (!std::isfinite(probe)) return false;

    if (config_.memory_forcing_enabled) {
        history_.append(g_try);  // throws when the budget is exhausted
        for (std::size_t i = 0; i < n; ++i)
            forcing_now_[i] = prefix[i] + endpoint_weight * g_try[i];
    } else {
        std::fill(forcing_now_.begin(), forcing_now_.end(), 0.0);
    }
    if (!extra_new.empty())
        for (std::size_t i = 0; i < n; ++i) forcing_now_[i] += extra_new[i];

    prev_uh_ = std::move(uh_);
    have_prev_ = true;
    uh_ = std::move(uh_new);
    vh_ = std::move(vh_new);
    t_ = t_new;
    ++step_;
    return true;
}

std::array<double, 3> Simulator::diagnostics() const {
    const double vol = grid_->box_volume();
    double su = 0.0, sh = 0.0, sv = 0.0;
    for (std::size_t i = 0; i < uh_.size(); ++i) {
        const double nu = std::norm(uh_[i]);
        su += nu;
        sh += hsigma_symbol_[i] * nu;
        sv += std::norm(vh_[i]);
    }
    return {std::sqrt(vol * su), std::sqrt(vol * sh), std::sqrt(vol * sv)};
}

SimState Simulator::snapshot() const {
    SimState s;
    s.t = t_;
    s.step = step_;
    s.u = Field::from_spectral(grid_, uh_);
    s.ut = Field::from_spectral(grid_, vh_);
    return s;
}

RunReport Simulator::run(const Field& u0, const Field& u1,
                         const std::function<void(const Simulator&)>& per_step) {
    initialize(u0, u1);
    const auto steps =
        static_cast<std::size_t>(std::llround(config_.horizon / config_.dt));

    RunReport report;
    auto record = [&] {
        const auto d = diagnostics();
        report.trajectory.times.push_back(t_);
        report.trajectory.l2_u.push_back(d[0]);
        report.trajectory.hsigma_u.push_back(d[1]);
        report.trajectory.l2_ut.push_back(d[2]);
    };
    record();

    for (std::size_t s = 0; s < steps; ++s) {
        if (!step()) {
            report.overflowed = true;
            report.overflow_time = t_ + config_.dt;
            break;
        }
        if (per_step) per_step(*this);
        if (step_ % static_cast<std::size_t>(config_.sample_every) == 0 || s + 1 == steps)
            record();
    }
    report.final_state = snapshot();
    return report;
}

double weighted_sup_norm(const Trajectory& traj, double gamma) {
    double sup = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double w = std::pow(1.0 + traj.times[i], gamma);
        sup = std::max(sup, w * (traj.l2_u[i] + traj.hsigma_u[i] + traj.l2_ut[i]));
    }
    return sup;
}

Verdict detect_blow_up(const Trajectory& traj, double threshold) {
    if (traj.size() == 0) throw std::invalid_argument("empty trajectory");
    double peak = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const std::array<double, 3> d{traj.l2_u[i], traj.hsigma_u[i], traj.l2_ut[i]};
        if (!all_finite(d)) return Verdict::overflow;
        peak = std::max(peak, d[0]);
    }
    const double initial = traj.l2_u.front();
    if (peak > threshold * initial && peak > 0.0 && initial > 0.0)
        return Verdict::growth;
    if (initial == 0.0 && peak > 0.0) return Verdict::growth;
    return Verdict::global_looking;
}

PicardReport picard_iterate(const Field& u0, const Field& u1, const ModelParams& params,
                            const SolverConfig& config, double tol, int max_iter) {
    check_config(config);
    if (!(tol > 0.0)) throw std::invalid_argument("picard tolerance must be positive");
    if (max_iter < 1) throw std::invalid_argument("picard needs at least one iteration");
    require_same_grid(u0, u1);

    const auto grid = to_spectral(u0).grid_ptr();
    const std::size_t n = grid->num_points();
    const auto nt = static_cast<std::size_t>(std::llround(config.horizon / config.dt));
    if ((nt + 1) * n > config.history_budget)
        throw std::runtime_error("picard trajectory exceeds the history budget");

    const PropagatorTable table(grid, params, config.dt);
    const ProductIntegrationWeights weights(params.memory_exponent, config.dt);
    weights.reserve(nt + 1);
    const std::vector<double> hsig = grid->symbol(params.laplacian_order);
    const double gamma = params.memory_exponent;
    const double p = params.power;
    const auto& keep = grid->dealias_keep();

    using Cvec = std::vector<std::complex<double>>;
    auto at = [n](Cvec& a, std::size_t j) { return a.data() + j * n; };
    auto cat = [n](const Cvec& a, std::size_t j) { return a.data() + j * n; };

    Cvec U((nt + 1) * n), V((nt + 1) * n);
    {
        const Cvec u0c = to_spectral(u0).spectral();
        const Cvec v0c = to_spectral(u1).spectral();
        std::copy(u0c.begin(), u0c.end(), at(U, 0));
        std::copy(v0c.begin(), v0c.end(), at(V, 0));
    }

    // Initial iterate: the linear flow.
    for (std::size_t j = 0; j < nt; ++j) {
        const auto* up = cat(U, j);
        const auto* vp = cat(V, j);
        auto* un = at(U, j + 1);
        auto* vn = at(V, j + 1);
        for (std::size_t i = 0; i < n; ++i) {
            un[i] = table.k1()[i] * up[i] + table.k2()[i] * vp[i];
            vn[i] = table.dk1()[i] * up[i] + table.dk2()[i] * vp[i];
        }
    }

    auto weighted_diff_norm = [&](const Cvec& Ua, const Cvec& Va, const Cvec& Ub,
                                  const Cvec& Vb) {
        double sup = 0.0;
        const double vol = grid->box_volume();
        for (std::size_t j = 0; j <= nt; ++j) {
            double su = 0.0, sh = 0.0, sv = 0.0;
            const auto* ua = cat(Ua, j);
            const auto* ub = cat(Ub, j);
            const auto* va = cat(Va, j);
            const auto* vb = cat(Vb, j);
            for (std::size_t i = 0; i < n; ++i) {
                const double du = std::norm(ua[i] - ub[i]);
                su += du;
                sh += hsig[i] * du;
                sv += std::norm(va[i] - vb[i]);
            }
            const double w = std::pow(1.0 + j * config.dt, gamma);
            sup = std::max(sup, w * (std::sqrt(vol * su) + std::sqrt(vol * sh) +
                                     std::sqrt(vol * sv)));
        }
        return sup;
    };

    // One application of the mild-solution operator: trajectory -> trajectory.
    Cvec work(n);
    std::vector<std::vector<double>> G(nt + 1);
    auto apply_operator = [&](const Cvec& Uin, Cvec& Uout, Cvec& Vout) {
        for (std::size_t j = 0; j <= nt; ++j) {
            std::copy(cat(Uin, j), cat(Uin, j) + n, work.begin());
            grid->backward(work.data());
            for (std::size_t i = 0; i < n; ++i)
                work[i] = std::complex<double>(std::pow(std::abs(work[i].real()), p), 0.0);
            grid->forward(work.data());
            for (std::size_t i = 0; i < n; ++i)
                if (!keep[i]) work[i] = {0.0, 0.0};
            grid->backward(work.data());
            G[j].resize(n);
            for (std::size_t i = 0; i < n; ++i) G[j][i] = work[i].real();
        }
        // Memory convolution per step, then spectral forcing samples.
        Cvec F((nt + 1) * n, {0.0, 0.0});
        std::vector<double> acc(n);
        for (std::size_t j = 1; j <= nt; ++j) {
            const double w0 = weights.first(j);
            for (std::size_t i = 0; i < n; ++i) acc[i] = w0 * G[0][i];
            for (std::size_t k = 1; k < j; ++k) {
                const double w = weights.interior(j - k);
                const auto& g = G[k];
                for (std::size_t i = 0; i < n; ++i) acc[i] += w * g[i];
            }
            const double we = weights.endpoint();
            for (std::size_t i = 0; i < n; ++i) acc[i] += we * G[j][i];
            auto* fj = F.data() + j * n;
            for (std::size_t i = 0; i < n; ++i) fj[i] = std::complex<double>(acc[i], 0.0);
            grid->forward(fj);
        }
        std::copy(cat(U, 0), cat(U, 0) + n, at(Uout, 0));
        std::copy(cat(V, 0), cat(V, 0) + n, at(Vout, 0));
        for (std::size_t j = 0; j < nt; ++j) {
            const auto* up = cat(Uout, j);
            const auto* vp = cat(Vout, j);
            const auto* fo = F.data() + j * n;
            const auto* fn = F.data() + (j + 1) * n;
            auto* un = at(Uout, j + 1);
            auto* vn = at(Vout, j + 1);
            for (std::size_t i = 0; i < n; ++i) {
                un[i] = table.k1()[i] * up[i] + table.k2()[i] * vp[i] +
                        table.forcing_old_u()[i] * fo[i] + table.forcing_new_u()[i] * fn[i];
                vn[i] = table.dk1()[i] * up[i] + table.dk2()[i] * vp[i] +
                        table.forcing_old_v()[i] * fo[i] + table.forcing_new_v()[i] * fn[i];
            }
        }
    };

    PicardReport report;
    Cvec Unew((nt + 1) * n), Vnew((nt + 1) * n);
    double prev_update = -1.0;
    int rising = 0;
    for (int it = 0; it < max_iter; ++it) {
        apply_operator(U, Unew, Vnew);
        const double update = weighted_diff_norm(Unew, Vnew, U, V);
        report.update_norms.push_back(update);
        if (prev_update > 0.0) {
            const double factor = update / prev_update;
            report.contraction_factors.push_back(factor);
            rising = factor >= 1.0 ? rising + 1 : 0;
        }
        prev_update = update;
        U.swap(Unew);
        V.swap(Vnew);
        report.iterations = it + 1;
        if (update < tol) {
            report.converged = true;
            break;
        }
        if (rising >= 3) {
            report.non_contraction = true;
            break;
        }
    }

    // Residual of the returned iterate under one more operator application.
    apply_operator(U, Unew, Vnew);
    report.residual_norm = weighted_diff_norm(Unew, Vnew, U, V);

    report.trajectory.times.resize(nt + 1);
    report.trajectory.l2_u.resize(nt + 1);
    report.trajectory.hsigma_u.resize(nt + 1);
    report.trajectory.l2_ut.resize(nt + 1);
    const double vol = grid->box_volume();
    for (std::size_t j = 0; j <= nt; ++j) {
        double su = 0.0, sh = 0.0, sv = 0.0;
        const auto* up = cat(U, j);
        const auto* vp = cat(V, j);
        for (std::size_t i = 0; i < n; ++i) {
            const double nu = std::norm(up[i]);
            su += nu;
            sh += hsig[i] * nu;
            sv += std::norm(vp[i]);
        }
        report.trajectory.times[j] = j * config.dt;
        report.trajectory.l2_u[j] = std::sqrt(vol * su);
        report.trajectory.hsigma_u[j] = std::sqrt(vol * sh);
        report.trajectory.l2_ut[j] = std::sqrt(vol * sv);
    }
    return report;
}

}  // namespace fracmem
