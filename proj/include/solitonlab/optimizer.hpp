#pragma once

#include "solitonlab/field.hpp"
#include "solitonlab/propagator.hpp"
#include "solitonlab/response.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace solitonlab {

enum class SearchParameter { delta, n_a, omega_p0, omega_c };

std::string to_string(SearchParameter s);
std::optional<SearchParameter> parse_search_parameter(const std::string& name);

struct SearchDimension {
    SearchParameter parameter;
    double lower;  // units of PhysicalParams (angular frequencies, um^-3)
    double upper;
};

struct SearchSpace {
    std::vector<SearchDimension> dimensions;
    void validate() const;
    std::size_t size() const { return dimensions.size(); }
};

struct GaConfig {
    int population = 24;
    int generations = 40;
    int tournament_size = 3;
    double crossover_rate = 0.9;
    double blend_alpha = 0.5;
    double mutation_rate = 0.2;
    double mutation_scale = 0.1;  // fraction of each bound range
    int elitism = 2;
    std::uint64_t seed = 1;
    int threads = 1;

    void validate() const;
};

/// Everything a fitness evaluation needs besides the candidate itself.
struct Scenario {
    PhysicalParams base;
    int l1 = 2;
    int l2 = -2;
    Grid grid = Grid::square(128, 48.0);
    double z_target = 5000.0;
    double dz = 0.0;  // <= 0: l_diff / 200
    PropagationMode mode = PropagationMode::reduced;
    AbsorbingBoundary absorber;
    KernelOptions kernel;
    bool real_kernel = false;  // propagate with Re(kernel) only
    int kernel_samples = 1024;
    double kernel_extent_rb = 50.0;  // table r_max in units of R_b
};

using Candidate = std::vector<double>;

PhysicalParams apply_candidate(const PhysicalParams& base, const SearchSpace& space, const Candidate& c);

/// Kernel table for a scenario's parameters, honouring real_kernel.
KernelTable scenario_kernel(const Scenario& s, const PhysicalParams& p);

struct Evaluation {
    double fitness = 0.0;
    bool failed = false;
    std::string failure;
};

/// J(z_target) for the candidate. Divergence scores 0 and is flagged.
Evaluation evaluate(const Candidate& c, const SearchSpace& space, const Scenario& scenario);

struct GenerationStats {
    int generation = 0;
    double best = 0.0;  // best of this generation
    double mean = 0.0;
    int failures = 0;
    Candidate best_candidate;
    double best_ever = 0.0;
};

struct OptimizationResult {
    Candidate best;
    double best_fitness = 0.0;
    std::vector<GenerationStats> history;
    std::vector<std::vector<Candidate>> populations;  // per generation
};

class OptimizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using FitnessFunction = std::function<Evaluation(const Candidate&)>;

/// Tournament selection, blend crossover, Gaussian mutation clipped to the
/// bounds, and elitism. Random draws come from per-candidate streams seeded
/// by (seed, generation, index), so results do not depend on thread count.
OptimizationResult optimize(const SearchSpace& space, const GaConfig& ga, const FitnessFunction& fitness);
OptimizationResult optimize(const SearchSpace& space, const GaConfig& ga, const Scenario& scenario);

}  // namespace solitonlab
