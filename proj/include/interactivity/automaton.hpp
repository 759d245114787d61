#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace interactivity::ulenv {

/// Finite embedded automaton: input, output, and internal state spaces are
/// 0..n-1 enumerations; u and pi are total lookup tables.
struct EmbeddedAutomatonSpec {
  int num_inputs = 1;
  int num_outputs = 1;
  int num_states = 1;
  std::vector<std::vector<int>> update;  // update[x][theta] -> theta'
  std::vector<std::vector<int>> output;  // output[x][theta] -> y

  void validate() const;
};

/// Finite deterministic environment closing the loop: consumes the
/// automaton's output, advances its own state, emits the next input.
struct EnvSpec {
  int num_states = 1;
  std::vector<std::vector<int>> advance;  // advance[e][y] -> e'
  std::vector<std::vector<int>> emit;     // emit[e][y] -> next input x'

  void validate(int num_inputs, int num_outputs) const;
};

EmbeddedAutomatonSpec random_automaton(int num_inputs, int num_outputs, int num_states,
                                       std::uint64_t seed);
EnvSpec random_env(int num_env_states, int num_inputs, int num_outputs, std::uint64_t seed);

struct BehaviourStep {
  int input;
  int output;
  bool operator==(const BehaviourStep&) const = default;
};

/// Simulates the coupled system as a joint Markov state over four indexed
/// cells (input, output, internal state, environment state), each updated by
/// a local rule reading only its declared boundary cells. Returns the
/// behaviour trace b_0..b_{steps-1} read off the input/output cells.
std::vector<BehaviourStep> run_embedded(const EmbeddedAutomatonSpec& automaton, const EnvSpec& env,
                                        int x0, int theta0, int e0, int steps);

/// The same coupled system as an explicit observe -> act -> update
/// interaction loop with a stateful policy. `true_update`, when provided,
/// replaces u in this loop only and may read the environment cell; a
/// dependence on it violates the declared boundary and must be detected.
std::vector<BehaviourStep> run_interaction_loop(
    const EmbeddedAutomatonSpec& automaton, const EnvSpec& env, int x0, int theta0, int e0,
    int steps, const std::function<int(int x, int theta, int e)>& true_update = nullptr);

struct EquivalenceVerdict {
  bool ok = true;
  int first_divergence = -1;
  BehaviourStep boundaried{};
  BehaviourStep interactive{};
};

EquivalenceVerdict verify_pomdp_equivalence(
    const EmbeddedAutomatonSpec& automaton, const EnvSpec& env, int x0, int theta0, int e0,
    int steps, const std::function<int(int x, int theta, int e)>& true_update = nullptr);

}  // namespace interactivity::ulenv
