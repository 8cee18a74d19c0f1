#include "sipl/belief.hpp"

namespace sipl {

Belief initial_belief(const FactoredModel& model) {
    const auto& task = model.task;
    Belief b{std::vector<double>(model.num_states(), 0.0)};
    const double p = 1.0 / static_cast<double>(task.init_i.size() * task.init_j.size());
    for (Cell ci : task.init_i) {
        for (Cell cj : task.init_j) {
            b.probs[model.space.encode({model.space.index_of(ci), model.space.index_of(cj)})] += p;
        }
    }
    return b;
}

namespace {

// weight(s, a_j) is Pr(a_j | s).
template <typename Weight>
PredictedMass propagate_weighted(const Belief& belief, const FactoredModel& model, const InteractionIndicator& x,
                                 int a_i, Weight&& weight) {
    const std::size_t num_states = model.num_states();
    if (belief.probs.size() != num_states) throw std::invalid_argument("belief shape does not match the model");
    const auto cells = static_cast<std::size_t>(model.space.num_cells());

    PredictedMass out{std::vector<double>(num_states, 0.0)};
    // Non-interactive mass after agent j's factor: indexed (s_i, s_j').
    std::vector<double> after_j(num_states, 0.0);
    for (std::size_t s = 0; s < num_states; ++s) {
        const double b = belief.probs[s];
        if (b == 0.0) continue;
        const JointState js = model.space.decode(s);
        for (int aj = 0; aj < kNumActions; ++aj) {
            const double w = weight(s, aj);
            if (w == 0.0) continue;
            const JointAction a{a_i, aj};
            if (x.transition_active(model.space, js, a)) {
                for (const auto& e : model.t_int_i.row(s * kNumJointActions + a.index()))
                    out.mass[e.target] += e.prob * w * b;
            } else {
                for (const auto& e : model.t_j.row(static_cast<std::size_t>(js.pos_j) * kNumActions + aj))
                    after_j[static_cast<std::size_t>(js.pos_i) * cells + e.target] += e.prob * w * b;
            }
        }
    }
    for (std::size_t ci = 0; ci < cells; ++ci) {
        const auto& row = model.t_i.row(ci * kNumActions + a_i);
        for (std::size_t cj = 0; cj < cells; ++cj) {
            const double m = after_j[ci * cells + cj];
            if (m == 0.0) continue;
            for (const auto& e : row) out.mass[e.target * cells + cj] += e.prob * m;
        }
    }
    return out;
}

}  // namespace

PredictedMass propagate(const Belief& belief, const FactoredModel& model, const InteractionIndicator& x,
                        JointAction a) {
    return propagate_weighted(belief, model, x, a.a_i,
                              [a_j = a.a_j](std::size_t, int aj) { return aj == a_j ? 1.0 : 0.0; });
}

PredictedMass propagate(const Belief& belief, const FactoredModel& model, const InteractionIndicator& x, int a_i,
                        const MixedStrategy& pi_hat_j) {
    check_strategy(pi_hat_j, model, Agent::J);
    return propagate_weighted(belief, model, x, a_i,
                              [&](std::size_t s, int aj) { return pi_hat_j(s, aj); });
}

Belief correct(const PredictedMass& predicted, const FactoredModel& model, int a_i, int observation,
               ZeroLikelihoodPolicy on_zero) {
    if (predicted.mass.size() != model.num_states()) throw std::invalid_argument("mass shape does not match the model");
    if (observation < 0 || observation >= kNumObservations) throw std::invalid_argument("observation code out of range");
    Belief out{std::vector<double>(predicted.mass.size(), 0.0)};
    double total = 0.0;
    for (std::size_t s = 0; s < predicted.mass.size(); ++s) {
        const double m = predicted.mass[s];
        if (m == 0.0) continue;
        const double v = m * model.observation_prob(model.space.decode(s).pos_i, a_i, observation);
        out.probs[s] = v;
        total += v;
    }
    if (total <= 0.0) {
        if (on_zero == ZeroLikelihoodPolicy::Raise)
            throw ZeroLikelihood("observation " + std::to_string(observation) +
                                 " has zero likelihood under the predicted belief");
        double mass = 0.0;
        for (double m : predicted.mass) mass += m;
        if (mass <= 0.0) throw ZeroLikelihood("predicted belief has no mass");
        for (std::size_t s = 0; s < out.probs.size(); ++s) out.probs[s] = predicted.mass[s] / mass;
        return out;
    }
    for (double& p : out.probs) p /= total;
    return out;
}

Belief update(const Belief& belief, const FactoredModel& model, const InteractionIndicator& x, JointAction a,
              int observation, ZeroLikelihoodPolicy on_zero) {
    return correct(propagate(belief, model, x, a), model, a.a_i, observation, on_zero);
}

Belief update(const Belief& belief, const FactoredModel& model, const InteractionIndicator& x, int a_i,
              const MixedStrategy& pi_hat_j, int observation, ZeroLikelihoodPolicy on_zero) {
    return correct(propagate(belief, model, x, a_i, pi_hat_j), model, a_i, observation, on_zero);
}

}  // namespace sipl
