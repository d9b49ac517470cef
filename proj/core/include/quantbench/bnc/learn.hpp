#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "quantbench/bnc/cpt.hpp"
#include "quantbench/data/dataset.hpp"

namespace quantbench::bnc {

/// Closed-form maximum likelihood with Laplace smoothing epsilon > 0:
/// log p = log (count + eps) / (total + eps * cardinality).
CPTSet learn_ml(const data::DiscreteDataset& d, const Structure& s, double eps = 1.0);

/// Gradient-ascent settings shared by the discriminative objectives.
struct GdConfig {
  int epochs = 200;
  double step = 0.5;
  double step_decay = 0.5;     // applied when an ascent step fails
  double min_step = 1e-6;
  double tolerance = 1e-9;     // allowed per-epoch objective decrease
  double valid_fraction = 0.0; // > 0: early stopping on held-out CE
  int patience = 20;
  std::uint64_t seed = 1;
  double init_eps = 1.0;       // smoothing of the ML warm start
};

struct LearnResult {
  CPTSet cpts;
  double objective = 0.0;  // final objective value (per-sample mean)
  int epochs_run = 0;
};

/// Maximum conditional likelihood: ascends mean log p(c|x) over
/// softmax-reparameterized table rows.
LearnResult learn_mcl(const data::DiscreteDataset& d, const Structure& s, const GdConfig& cfg);

/// Maximum margin: ascends mean min(log gamma, log p(c|x) - max_{c'!=c}
/// log p(c'|x)) with subgradient 0 above the cap. gamma > 1.
LearnResult learn_mm(const data::DiscreteDataset& d, const Structure& s, double gamma,
                     const GdConfig& cfg);

/// Hybrid objective: lambda * mean log p(c,x) + (1-lambda) * MM objective,
/// lambda in [0,1]; 1 recovers the ML stationary point, 0 recovers MM.
LearnResult learn_hybrid(const data::DiscreteDataset& d, const Structure& s, double lambda,
                         double gamma, const GdConfig& cfg);

/// Discriminative frequency estimates: per epoch, every sample adds
/// (1 - p(c|x)) to the counts active under (c, x); counts are renormalized
/// to CPTs after each epoch (posteriors within an epoch use the CPTs from
/// the epoch start).
CPTSet learn_dfe(const data::DiscreteDataset& d, const Structure& s, int epochs,
                 double init_count = 1.0);

/// Objective/gradient oracle access used by the finite-difference tests.
/// theta holds unconstrained row logits laid out like the CPT tables.
struct DiscriminativeObjective {
  enum class Kind { mcl, mm, hybrid };
  Kind kind = Kind::mcl;
  double gamma = 10.0;
  double lambda = 0.5;
};

double objective_value(const data::DiscreteDataset& d, const Structure& s,
                       const std::vector<std::vector<double>>& theta,
                       const DiscriminativeObjective& obj);
std::vector<std::vector<double>> objective_gradient(const data::DiscreteDataset& d,
                                                    const Structure& s,
                                                    const std::vector<std::vector<double>>& theta,
                                                    const DiscriminativeObjective& obj);

/// Normalized log CPTs from unconstrained logits.
CPTSet cpts_from_logits(const Structure& s, const std::vector<std::vector<double>>& theta);

}  // namespace quantbench::bnc
