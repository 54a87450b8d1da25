#pragma once

#include "chemo/core.hpp"
#include "chemo/coupling.hpp"
#include "chemo/field.hpp"
#include "chemo/motion.hpp"
#include "chemo/particles.hpp"
#include "chemo/reactions.hpp"
#include "chemo/spatial_index.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace chemo {

enum class InitialField { Zero, LinearX };

/// Every model and numerical parameter of one experiment. Optional members
/// are derived by resolve() when unset.
struct SimConfig {
    std::string experiment = "fig1";

    long n_alpha = 100;
    long n_beta = 100;
    double sigma = 0.1;

    double domain_length = 1.0;
    bool periodic = false;

    double D_alpha = 0.1;
    double D_beta = 1.0;
    double chi = 1.0;
    double epsilon = 0.02;
    /// Default (0.23 epsilon)^2 / (4 D_beta).
    std::optional<double> dt;
    double T_f = 0.05;
    Interaction interaction = Interaction::SoftExponential;
    /// Default 5 epsilon.
    std::optional<double> interaction_cutoff;
    Integrator integrator = Integrator::EulerMaruyama;
    CellSizing cell_sizing = CellSizing::QueryRadius;

    double r_alpha = 10.0;
    double r_beta = 0.0;
    Scheduler scheduler = Scheduler::FixedStep;

    double D_c = 1.0;
    double k_alpha = 0.1;
    double k_beta = 0.03;
    double gamma = 0.0;
    long n_c = 52;
    /// Default follows `periodic`.
    std::optional<FieldBoundary> field_boundary;
    InitialField initial_field = InitialField::Zero;
    KernelKind kernel = KernelKind::Gaussian;
    /// Default epsilon.
    std::optional<double> bandwidth;
    /// Default 3 * bandwidth.
    std::optional<double> kernel_cutoff;

    long samples = 2000;
    long seed_base = 0;
    long output_every = 20;
    long snapshots = 4;
    long hist_bins = 26;

    long total_particles() const { return n_alpha + n_beta; }
    long steps() const;

    Domain<double> domain() const { return Domain<double>::centered_square(domain_length, periodic); }
    MotionParams<double> motion() const;
    ReactionParams<double> reactions() const { return {r_alpha, r_beta, scheduler}; }
    FieldParams<double> field_params() const { return {D_c, k_alpha, k_beta, gamma}; }
    Kernel<double> deposit_kernel() const;
    Grid<double> grid() const;
    InitialCondition<double> initial_condition() const { return {n_alpha, n_beta, sigma}; }

    bool field_frozen() const { return field_params().frozen(); }
};

/// Fills derived defaults and validates; throws std::invalid_argument.
SimConfig resolve(SimConfig config);

/// Parameter set of a named experiment: fig1, counts, msd1, msd2, msd3, custom.
SimConfig preset(const std::string& name);

/// One B x B histogram, rows are y bins (bottom to top), columns x bins.
using Histogram = Eigen::MatrixXd;

struct Snapshot {
    double t = 0;
    Histogram hist_alpha;
    Histogram hist_beta;
    /// n_c x n_c node values, row j / column i.
    Eigen::MatrixXd field;
};

struct Observables {
    std::vector<double> t;
    std::vector<double> n_alpha;
    std::vector<double> n_beta;
    std::vector<double> msd;
    std::vector<Snapshot> snapshots;
};

struct EnsembleObservables {
    std::vector<double> t;
    std::vector<double> n_alpha_mean, n_alpha_se;
    std::vector<double> n_beta_mean, n_beta_se;
    std::vector<double> msd_mean, msd_se;
    std::vector<Snapshot> snapshots;
    std::vector<long> sample_ids;
    std::vector<std::uint64_t> seeds;
};

/// Mean squared displacement from the MSD anchors.
double msd(const Population<double>& pop);

/// Species histogram normalised by the species count (all zeros if absent).
Histogram species_histogram(const Population<double>& pop, const Domain<double>& domain, long bins, Species s);

/// Record steps of a run: dense series and snapshot steps.
std::vector<long> dense_record_steps(long n_steps, long every);
std::vector<long> snapshot_steps(long n_steps, long count);

/// One realisation: population, chemical field, random stream and clock.
class Simulation {
public:
    /// `config` must be resolved. Seeds the stream with N * sample.
    Simulation(const SimConfig& config, long sample);

    /// Advances one time step through the fixed stage order.
    void step();

    /// Runs to T_f recording observables at the configured cadence.
    Observables run();

    double time() const { return static_cast<double>(step_index_) * motion_.dt; }
    long step_index() const { return step_index_; }
    std::uint64_t seed() const { return seed_; }

    const SimConfig& config() const { return config_; }
    const Population<double>& population() const { return pop_; }
    const Field<double>& field() const { return field_; }
    const Grid<double>& grid() const { return grid_; }
    const Domain<double>& domain() const { return domain_; }

private:
    void stage_step();
    Snapshot snapshot() const;

    SimConfig config_;
    Domain<double> domain_;
    MotionParams<double> motion_;
    ReactionParams<double> reactions_;
    FieldParams<double> field_params_;
    Kernel<double> kernel_;
    Grid<double> grid_;
    Operators<double> ops_;
    std::uint64_t seed_;
    RandomStream<double> rng_;
    Population<double> pop_;
    Field<double> field_;
    CellIndex<double> index_;
    GillespieClock<double> clock_;
    long step_index_ = 0;
};

Observables run_realisation(const SimConfig& config, long sample);

/// Runs samples seed_base .. seed_base + samples - 1 on `threads` workers
/// and averages pointwise in sample order.
EnsembleObservables run_ensemble(const SimConfig& config, int threads = 1);

/// Pointwise mean / standard error over realisations (no simulation).
EnsembleObservables reduce(const std::vector<Observables>& runs);

}  // namespace chemo
