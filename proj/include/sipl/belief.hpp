#pragma once

#include "sipl/model.hpp"
#include "sipl/nested.hpp"

#include <vector>

namespace sipl {

/// Agent i's distribution over joint states.
struct Belief {
    std::vector<double> probs;
};

/// Propagated but not yet observation-corrected mass over next states.
struct PredictedMass {
    std::vector<double> mass;
};

/// The observation has zero likelihood under the predicted belief.
class ZeroLikelihood : public Error {
public:
    using Error::Error;
};

enum class ZeroLikelihoodPolicy { Raise, KeepPredicted };

/// Uniform product distribution over the two init supports.
Belief initial_belief(const FactoredModel& model);

/// Prediction with the opponent's actual action given.
PredictedMass propagate(const Belief& belief, const FactoredModel& model, const InteractionIndicator& x,
                        JointAction a);

/// Prediction with the opponent's action weighted by its mixed strategy.
PredictedMass propagate(const Belief& belief, const FactoredModel& model, const InteractionIndicator& x, int a_i,
                        const MixedStrategy& pi_hat_j);

/// Multiplies by O_i(s', a_i, o_i) and normalizes. Raises ZeroLikelihood
/// when the normalizer vanishes unless `on_zero` keeps the normalized
/// predicted mass instead.
Belief correct(const PredictedMass& predicted, const FactoredModel& model, int a_i, int observation,
               ZeroLikelihoodPolicy on_zero = ZeroLikelihoodPolicy::Raise);

Belief update(const Belief& belief, const FactoredModel& model, const InteractionIndicator& x, JointAction a,
              int observation, ZeroLikelihoodPolicy on_zero = ZeroLikelihoodPolicy::Raise);

Belief update(const Belief& belief, const FactoredModel& model, const InteractionIndicator& x, int a_i,
              const MixedStrategy& pi_hat_j, int observation,
              ZeroLikelihoodPolicy on_zero = ZeroLikelihoodPolicy::Raise);

}  // namespace sipl
