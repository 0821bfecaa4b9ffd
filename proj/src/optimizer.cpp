#include "solitonlab/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace solitonlab {

namespace {

std::mt19937_64 stream_for(std::uint64_t seed, int generation, int index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(generation), static_cast<std::uint32_t>(index)};
    return std::mt19937_64(seq);
}

double& parameter_ref(PhysicalParams& p, SearchParameter s) {
    switch (s) {
        case SearchParameter::delta: return p.delta;
        case SearchParameter::n_a: return p.n_a;
        case SearchParameter::omega_p0: return p.omega_p0;
        case SearchParameter::omega_c: return p.omega_c;
    }
    return p.delta;
}

std::vector<Evaluation> evaluate_all(const std::vector<Candidate>& pop, const std::vector<bool>& needed,
                                     std::vector<Evaluation> known, const FitnessFunction& fitness, int threads) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < pop.size(); i = next++) {
            if (needed[i]) known[i] = fitness(pop[i]);
        }
    };
    const int n = std::max(1, std::min<int>(threads, static_cast<int>(pop.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    }
    return known;
}

}  // namespace

std::string to_string(SearchParameter s) {
    switch (s) {
        case SearchParameter::delta: return "delta";
        case SearchParameter::n_a: return "n_a";
        case SearchParameter::omega_p0: return "omega_p0";
        case SearchParameter::omega_c: return "omega_c";
    }
    return "?";
}

std::optional<SearchParameter> parse_search_parameter(const std::string& name) {
    for (auto s : {SearchParameter::delta, SearchParameter::n_a, SearchParameter::omega_p0, SearchParameter::omega_c}) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

void SearchSpace::validate() const {
    if (dimensions.empty()) throw ValidationError("search", "at least one parameter required");
    for (const auto& d : dimensions) {
        if (!std::isfinite(d.lower) || !std::isfinite(d.upper) || d.lower > d.upper) {
            throw ValidationError("search." + to_string(d.parameter), "bounds must be finite with lower <= upper");
        }
    }
}

void GaConfig::validate() const {
    if (population < 4) throw ValidationError("ga.population", "must be >= 4");
    if (generations < 0) throw ValidationError("ga.generations", "must be >= 0");
    if (tournament_size < 1) throw ValidationError("ga.tournament_size", "must be >= 1");
    auto rate = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(name, "must be in [0, 1]");
    };
    rate(crossover_rate, "ga.crossover_rate");
    rate(mutation_rate, "ga.mutation_rate");
    if (!(mutation_scale >= 0.0)) throw ValidationError("ga.mutation_scale", "must be >= 0");
    if (!(blend_alpha >= 0.0)) throw ValidationError("ga.blend_alpha", "must be >= 0");
    if (elitism < 0 || elitism >= population) throw ValidationError("ga.elitism", "must be in [0, population)");
}

PhysicalParams apply_candidate(const PhysicalParams& base, const SearchSpace& space, const Candidate& c) {
    if (c.size() != space.size()) throw std::invalid_argument("candidate size does not match search space");
    PhysicalParams p = base;
    for (std::size_t i = 0; i < c.size(); ++i) parameter_ref(p, space.dimensions[i].parameter) = c[i];
    return p;
}

KernelTable scenario_kernel(const Scenario& s, const PhysicalParams& p) {
    const DerivedParams d = derive(p);
    KernelTable t = build_kernel_table(p, s.kernel_extent_rb * d.r_b, s.kernel_samples, s.kernel);
    return s.real_kernel ? t.real_part() : t;
}

Evaluation evaluate(const Candidate& c, const SearchSpace& space, const Scenario& scenario) {
    const PhysicalParams p = apply_candidate(scenario.base, space, c);
    if (scenario.z_target <= 0.0) return {1.0, false, {}};
    const ComplexField input = make_ofw(scenario.grid, p, scenario.l1, scenario.l2);

    PropagationConfig cfg;
    cfg.dz = scenario.dz;
    cfg.z_end = scenario.z_target;
    cfg.mode = scenario.mode;
    cfg.record_every = 1 << 30;
    cfg.absorber = scenario.absorber;
    cfg.kernel = std::make_shared<const KernelTable>(scenario_kernel(scenario, p));
    try {
        const PropagationResult r = Propagator(scenario.grid, p, cfg).propagate(input);
        return {r.records.back().j, false, {}};
    } catch (const DivergenceError& e) {
        return {0.0, true, e.what()};
    }
}

OptimizationResult optimize(const SearchSpace& space, const GaConfig& ga, const FitnessFunction& fitness) {
    space.validate();
    ga.validate();
    const std::size_t n = static_cast<std::size_t>(ga.population);
    const std::size_t dims = space.size();

    auto clip = [&](Candidate& c) {
        for (std::size_t k = 0; k < dims; ++k) {
            c[k] = std::clamp(c[k], space.dimensions[k].lower, space.dimensions[k].upper);
        }
    };

    std::vector<Candidate> pop(n, Candidate(dims));
    for (std::size_t i = 0; i < n; ++i) {
        auto rng = stream_for(ga.seed, 0, static_cast<int>(i));
        for (std::size_t k = 0; k < dims; ++k) {
            const auto& d = space.dimensions[k];
            pop[i][k] = d.lower == d.upper ? d.lower : std::uniform_real_distribution<double>(d.lower, d.upper)(rng);
        }
    }

    OptimizationResult result;
    std::vector<Evaluation> evals =
        evaluate_all(pop, std::vector<bool>(n, true), std::vector<Evaluation>(n), fitness, ga.threads);

    auto ranked = [&] {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return evals[a].fitness > evals[b].fitness; });
        return order;
    };
    auto record = [&](int generation) {
        int failures = 0;
        double sum = 0.0;
        for (const auto& e : evals) {
            failures += e.failed ? 1 : 0;
            sum += e.fitness;
        }
        if (failures == static_cast<int>(n)) {
            std::ostringstream os;
            os << "every candidate of generation " << generation << " failed; first failure: " << evals[0].failure;
            throw OptimizationError(os.str());
        }
        const std::size_t top = ranked().front();
        if (result.history.empty() || evals[top].fitness > result.best_fitness) {
            result.best = pop[top];
            result.best_fitness = evals[top].fitness;
        }
        result.history.push_back({generation, evals[top].fitness, sum / static_cast<double>(n), failures, pop[top],
                                  result.best_fitness});
        result.populations.push_back(pop);
    };
    record(0);

    for (int g = 1; g <= ga.generations; ++g) {
        const std::vector<std::size_t> order = ranked();
        std::vector<Candidate> next(n);
        std::vector<Evaluation> next_evals(n);
        std::vector<bool> needed(n, true);
        const std::size_t elites = static_cast<std::size_t>(ga.elitism);
        for (std::size_t e = 0; e < elites; ++e) {
            next[e] = pop[order[e]];
            next_evals[e] = evals[order[e]];
            needed[e] = false;
        }
        for (std::size_t i = elites; i < n; ++i) {
            auto rng = stream_for(ga.seed, g, static_cast<int>(i));
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            auto tournament = [&] {
                std::size_t best = pick(rng);
                for (int t = 1; t < ga.tournament_size; ++t) {
                    const std::size_t other = pick(rng);
                    if (evals[other].fitness > evals[best].fitness) best = other;
                }
                return best;
            };
            const Candidate& a = pop[tournament()];
            const Candidate& b = pop[tournament()];
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            Candidate child = a;
            if (unit(rng) < ga.crossover_rate) {
                for (std::size_t k = 0; k < dims; ++k) {
                    const double lo = std::min(a[k], b[k]), hi = std::max(a[k], b[k]);
                    const double ext = ga.blend_alpha * (hi - lo);
                    child[k] = lo - ext + unit(rng) * (hi - lo + 2.0 * ext);
                }
            }
            for (std::size_t k = 0; k < dims; ++k) {
                if (unit(rng) < ga.mutation_rate) {
                    const auto& d = space.dimensions[k];
                    const double sigma = ga.mutation_scale * (d.upper - d.lower);
                    if (sigma > 0.0) child[k] += std::normal_distribution<double>(0.0, sigma)(rng);
                }
            }
            clip(child);
            next[i] = std::move(child);
        }
        pop = std::move(next);
        evals = evaluate_all(pop, needed, std::move(next_evals), fitness, ga.threads);
        record(g);
    }
    return result;
}

OptimizationResult optimize(const SearchSpace& space, const GaConfig& ga, const Scenario& scenario) {
    return optimize(space, ga, [&](const Candidate& c) { return evaluate(c, space, scenario); });
}

}  // namespace solitonlab
