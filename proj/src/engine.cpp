#include "chemo/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace chemo {

long SimConfig::steps() const {
    const double ratio = T_f / dt.value();
    return static_cast<long>(std::llround(ratio));
}

MotionParams<double> SimConfig::motion() const {
    MotionParams<double> m;
    m.D_alpha = D_alpha;
    m.D_beta = D_beta;
    m.chi = chi;
    m.epsilon = epsilon;
    m.dt = dt.value();
    m.interaction = interaction;
    m.cutoff = interaction_cutoff.value();
    m.integrator = integrator;
    return m;
}

Kernel<double> SimConfig::deposit_kernel() const {
    if (kernel == KernelKind::CloudInCell) return Kernel<double>::cloud_in_cell();
    return {KernelKind::Gaussian, bandwidth.value(), kernel_cutoff.value()};
}

Grid<double> SimConfig::grid() const {
    const Domain<double> d = domain();
    return Grid<double>(n_c, d.min, domain_length, field_boundary.value());
}

SimConfig resolve(SimConfig c) {
    auto fail = [](const std::string& what) { throw std::invalid_argument(what); };

    if (c.n_alpha < 0 || c.n_beta < 0 || c.total_particles() <= 0)
        fail("n_alpha and n_beta must be >= 0 with a positive total");
    if (!(c.sigma > 0)) fail("sigma must be positive");
    if (!(c.domain_length > 0)) fail("domain_length must be positive");
    if (!(c.epsilon > 0)) fail("epsilon must be positive");
    if (!(c.D_beta >= 0) || !(c.D_alpha >= 0)) fail("diffusion coefficients must be >= 0");

    if (!c.dt) {
        if (!(c.D_beta > 0)) fail("dt cannot be derived when D_beta = 0; set dt explicitly");
        c.dt = (0.23 * c.epsilon) * (0.23 * c.epsilon) / (4 * c.D_beta);
    }
    if (!(*c.dt > 0)) fail("dt must be positive");
    if (!(c.T_f >= 0) || !std::isfinite(c.T_f)) fail("T_f must be >= 0");
    if (!c.interaction_cutoff) c.interaction_cutoff = 5 * c.epsilon;
    if (!c.field_boundary) c.field_boundary = c.periodic ? FieldBoundary::Periodic : FieldBoundary::Neumann;
    if (!c.bandwidth) c.bandwidth = c.epsilon;
    if (!(*c.bandwidth > 0)) fail("bandwidth must be positive");
    if (!c.kernel_cutoff) c.kernel_cutoff = 3 * *c.bandwidth;
    if (*c.kernel_cutoff < 3 * *c.bandwidth * (1 - 1e-12)) fail("kernel_cutoff must be at least 3 * bandwidth");
    if (c.n_c < 3) fail("n_c must be >= 3");
    if (c.samples < 1) fail("samples must be >= 1");
    if (c.seed_base < 0) fail("seed_base must be >= 0");
    if (c.output_every < 1) fail("output_every must be >= 1");
    if (c.snapshots < 1) fail("snapshots must be >= 1");
    if (c.hist_bins < 1) fail("hist_bins must be >= 1");

    validate(c.motion());
    validate(c.reactions(), *c.dt);
    validate(c.field_params());

    // Explicit source terms need dt (gamma + k_beta max rho_beta) < 1; bound
    // max rho_beta by every particle piled on one node.
    const Grid<double> g = c.grid();
    const double peak = c.kernel == KernelKind::Gaussian
                            ? 1 / (2 * 3.14159265358979323846 * *c.bandwidth * *c.bandwidth)
                            : 1 / (g.spacing() * g.spacing());
    const double explicit_rate = *c.dt * (c.gamma + c.k_beta * static_cast<double>(c.total_particles()) * peak);
    if (!c.field_frozen() && !(explicit_rate < 1)) {
        std::ostringstream msg;
        msg << "explicit field sources unstable: dt * (gamma + k_beta * N * max kernel) = " << explicit_rate
            << " >= 1";
        fail(msg.str());
    }
    return c;
}

SimConfig preset(const std::string& name) {
    SimConfig c;
    c.experiment = name;
    if (name == "fig1" || name == "counts" || name == "custom") return c;

    if (name == "msd1" || name == "msd2" || name == "msd3") {
        c.periodic = true;
        c.field_boundary = FieldBoundary::Neumann;
        c.initial_field = InitialField::LinearX;
        c.D_c = 0;
        c.k_alpha = 0;
        c.k_beta = 0;
        c.gamma = 0;
        c.D_alpha = 1;
        c.D_beta = 1;
        c.chi = 1;
        c.interaction = Interaction::None;
        c.T_f = 10;
        c.dt = 1e-3;
        c.samples = 200;
        c.output_every = 10;
        c.r_beta = 0;
        if (name == "msd1") {
            c.n_alpha = 100;
            c.n_beta = 0;
            c.r_alpha = 0;
        } else if (name == "msd2") {
            c.n_alpha = 0;
            c.n_beta = 100;
            c.r_alpha = 0;
        } else {
            c.n_alpha = 50;
            c.n_beta = 50;
            c.r_alpha = 10;
        }
        return c;
    }
    throw std::invalid_argument("unknown experiment '" + name + "'");
}

double msd(const Population<double>& pop) {
    if (pop.empty()) throw std::invalid_argument("msd of an empty population");
    double sum = 0;
    for (const auto& p : pop) sum += (p.position - p.start_anchor).squaredNorm();
    return sum / static_cast<double>(pop.size());
}

Histogram species_histogram(const Population<double>& pop, const Domain<double>& domain, long bins, Species s) {
    Histogram h = Histogram::Zero(bins, bins);
    const Vector2d len = domain.extent();
    std::size_t count = 0;
    for (const auto& p : pop) {
        if (p.species != s) continue;
        const Vector2d u = (p.position - domain.min).cwiseQuotient(len) * static_cast<double>(bins);
        const long bx = std::clamp(static_cast<long>(std::floor(u[0])), 0L, bins - 1);
        const long by = std::clamp(static_cast<long>(std::floor(u[1])), 0L, bins - 1);
        h(by, bx) += 1;
        ++count;
    }
    if (count > 0) h /= static_cast<double>(count);
    return h;
}

std::vector<long> dense_record_steps(long n_steps, long every) {
    std::vector<long> out;
    for (long s = 0; s <= n_steps; s += every) out.push_back(s);
    if (out.back() != n_steps) out.push_back(n_steps);
    return out;
}

std::vector<long> snapshot_steps(long n_steps, long count) {
    std::vector<long> out;
    if (n_steps == 0 || count == 1) return {0};
    for (long k = 0; k < count; ++k) {
        const long s = std::lround(static_cast<double>(k) * static_cast<double>(n_steps) / static_cast<double>(count - 1));
        if (out.empty() || s != out.back()) out.push_back(s);
    }
    return out;
}

namespace {

CellIndex<double> make_index(const SimConfig& c) {
    const Domain<double> d = c.domain();
    const MotionParams<double> m = c.motion();
    const double side = cell_side_for(c.cell_sizing, m.interaction_radius(),
                                      static_cast<std::size_t>(c.total_particles()), d);
    return CellIndex<double>(d, side);
}

}  // namespace

// Draw order of the stream: initial positions, then the Gillespie clock (if
// used); per step, one normal pair per particle in id order, then the
// reaction draws.
Simulation::Simulation(const SimConfig& config, long sample)
    : config_(config),
      domain_(config.domain()),
      motion_(config.motion()),
      reactions_(config.reactions()),
      field_params_(config.field_params()),
      kernel_(config.deposit_kernel()),
      grid_(config.grid()),
      seed_(realisation_seed(static_cast<std::uint64_t>(config.total_particles()),
                             static_cast<std::uint64_t>(sample))),
      rng_(seed_),
      field_(config.grid().size()),
      index_(make_index(config)) {
    if (sample < 0) throw std::invalid_argument("sample must be >= 0");
    pop_ = init_population(config.initial_condition(), domain_, rng_);
    ops_ = build_operators(grid_, field_params_, motion_.dt);

    if (config.initial_field == InitialField::LinearX)
        field_.c = grid_.sample([](double x, double) { return x; });
    gradient(field_, ops_);
    refresh_particle_fields(pop_, field_, grid_, motion_.chi);

    if (reactions_.scheduler == Scheduler::GillespieAlpha)
        clock_.reset(0.0, pop_.n_alpha(), reactions_.r_alpha, rng_);
}

void Simulation::stage_step() {
    const bool frozen = config_.field_frozen();
    const bool soft = motion_.interaction == Interaction::SoftExponential;

    if (soft) {
        const auto positions = pop_.positions();
        index_.rebuild(positions);
    }
    if (!frozen) {
        field_.rho_alpha = deposit(pop_, grid_, kernel_, Species::Alpha);
        field_.rho_beta = deposit(pop_, grid_, kernel_, Species::Beta);
        step_field(field_, ops_, field_params_, motion_.dt);
        gradient(field_, ops_);
    }
    refresh_particle_fields(pop_, field_, grid_, motion_.chi);

    std::vector<Vector2d> forces = soft ? accumulate_forces(pop_, index_, motion_)
                                        : std::vector<Vector2d>(pop_.size(), Vector2d::Zero());
    propose_positions(pop_, forces, motion_, rng_);
    if (motion_.interaction == Interaction::HardSphere) resolve_hard_sphere(pop_, domain_, motion_);
    apply_boundaries(pop_, domain_);

    if (reactions_.scheduler == Scheduler::GillespieAlpha) {
        gillespie_reactions(pop_, reactions_, time(), motion_.dt, clock_, rng_);
    } else {
        fixed_step_reactions(pop_, reactions_, motion_.dt, rng_);
    }
}

void Simulation::step() {
    try {
        stage_step();
    } catch (const SimulationError& e) {
        if (e.step() >= 0) throw;
        throw SimulationError(e.what(), step_index_);
    } catch (const std::exception& e) {
        throw SimulationError(e.what(), step_index_);
    }
    ++step_index_;
}

Snapshot Simulation::snapshot() const {
    Snapshot s;
    s.t = time();
    s.hist_alpha = species_histogram(pop_, domain_, config_.hist_bins, Species::Alpha);
    s.hist_beta = species_histogram(pop_, domain_, config_.hist_bins, Species::Beta);
    s.field = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        field_.c.data(), grid_.n(), grid_.n());
    return s;
}

Observables Simulation::run() {
    const long n_steps = config_.steps();
    const std::vector<long> dense = dense_record_steps(n_steps, config_.output_every);
    const std::vector<long> snaps = snapshot_steps(n_steps, config_.snapshots);

    Observables obs;
    auto record = [&] {
        if (std::binary_search(dense.begin(), dense.end(), step_index_)) {
            obs.t.push_back(time());
            obs.n_alpha.push_back(static_cast<double>(pop_.n_alpha()));
            obs.n_beta.push_back(static_cast<double>(pop_.n_beta()));
            obs.msd.push_back(msd(pop_));
        }
        if (std::binary_search(snaps.begin(), snaps.end(), step_index_)) obs.snapshots.push_back(snapshot());
    };

    record();
    while (step_index_ < n_steps) {
        step();
        record();
    }
    return obs;
}

Observables run_realisation(const SimConfig& config, long sample) { return Simulation(config, sample).run(); }

EnsembleObservables reduce(const std::vector<Observables>& runs) {
    if (runs.empty()) throw std::invalid_argument("cannot reduce an empty ensemble");
    const std::size_t S = runs.size();
    const std::size_t T = runs.front().t.size();
    for (const auto& r : runs)
        if (r.t.size() != T || r.snapshots.size() != runs.front().snapshots.size())
            throw std::invalid_argument("realisations recorded different series lengths");

    EnsembleObservables out;
    out.t = runs.front().t;

    auto mean_se = [&](auto member, std::vector<double>& mean, std::vector<double>& se) {
        mean.assign(T, 0.0);
        se.assign(T, 0.0);
        for (std::size_t k = 0; k < T; ++k) {
            double sum = 0;
            for (const auto& r : runs) sum += (r.*member)[k];
            const double m = sum / static_cast<double>(S);
            double ss = 0;
            for (const auto& r : runs) ss += ((r.*member)[k] - m) * ((r.*member)[k] - m);
            mean[k] = m;
            se[k] = S > 1 ? std::sqrt(ss / static_cast<double>(S - 1) / static_cast<double>(S)) : 0.0;
        }
    };
    mean_se(&Observables::n_alpha, out.n_alpha_mean, out.n_alpha_se);
    mean_se(&Observables::n_beta, out.n_beta_mean, out.n_beta_se);
    mean_se(&Observables::msd, out.msd_mean, out.msd_se);

    out.snapshots = runs.front().snapshots;
    for (std::size_t k = 0; k < out.snapshots.size(); ++k) {
        auto& s = out.snapshots[k];
        for (std::size_t r = 1; r < S; ++r) {
            s.hist_alpha += runs[r].snapshots[k].hist_alpha;
            s.hist_beta += runs[r].snapshots[k].hist_beta;
            s.field += runs[r].snapshots[k].field;
        }
        s.hist_alpha /= static_cast<double>(S);
        s.hist_beta /= static_cast<double>(S);
        s.field /= static_cast<double>(S);
    }
    return out;
}

EnsembleObservables run_ensemble(const SimConfig& config, int threads) {
    const auto S = static_cast<std::size_t>(config.samples);
    std::vector<Observables> runs(S);
    std::vector<std::exception_ptr> errors(S);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t s = next++; s < S; s = next++) {
            try {
                runs[s] = run_realisation(config, config.seed_base + static_cast<long>(s));
            } catch (...) {
                errors[s] = std::current_exception();
            }
        }
    };

    const int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(S)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int k = 0; k < n_threads; ++k) pool.emplace_back(worker);
    }

    for (std::size_t s = 0; s < S; ++s) {
        if (!errors[s]) continue;
        const long id = config.seed_base + static_cast<long>(s);
        try {
            std::rethrow_exception(errors[s]);
        } catch (const std::exception& e) {
            throw SimulationError("sample " + std::to_string(id) + " failed: " + e.what());
        }
    }

    EnsembleObservables out = reduce(runs);
    for (std::size_t s = 0; s < S; ++s) {
        const long id = config.seed_base + static_cast<long>(s);
        out.sample_ids.push_back(id);
        out.seeds.push_back(realisation_seed(static_cast<std::uint64_t>(config.total_particles()),
                                             static_cast<std::uint64_t>(id)));
    }
    return out;
}

}  // namespace chemo
