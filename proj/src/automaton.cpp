#include "interactivity/automaton.hpp"

#include <random>
#include <stdexcept>

#include "interactivity/types.hpp"

namespace interactivity::ulenv {

namespace {

void check_table(const std::vector<std::vector<int>>& table, int rows, int cols, int range,
                 const char* name) {
  if (static_cast<int>(table.size()) != rows)
    throw std::invalid_argument(std::string(name) + ": wrong row count");
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != cols)
      throw std::invalid_argument(std::string(name) + ": wrong column count");
    for (int v : row)
      if (v < 0 || v >= range) throw std::invalid_argument(std::string(name) + ": value out of range");
  }
}

std::vector<std::vector<int>> random_table(int rows, int cols, int range, Rng& rng) {
  std::uniform_int_distribution<int> dist(0, range - 1);
  std::vector<std::vector<int>> table(static_cast<size_t>(rows),
                                      std::vector<int>(static_cast<size_t>(cols)));
  for (auto& row : table)
    for (int& v : row) v = dist(rng);
  return table;
}

}  // namespace

void EmbeddedAutomatonSpec::validate() const {
  check_table(update, num_inputs, num_states, num_states, "automaton update");
  check_table(output, num_inputs, num_states, num_outputs, "automaton output");
}

void EnvSpec::validate(int num_inputs, int num_outputs) const {
  check_table(advance, num_states, num_outputs, num_states, "env advance");
  check_table(emit, num_states, num_outputs, num_inputs, "env emit");
}

EmbeddedAutomatonSpec random_automaton(int num_inputs, int num_outputs, int num_states,
                                       std::uint64_t seed) {
  Rng rng(seed);
  EmbeddedAutomatonSpec a;
  a.num_inputs = num_inputs;
  a.num_outputs = num_outputs;
  a.num_states = num_states;
  a.update = random_table(num_inputs, num_states, num_states, rng);
  a.output = random_table(num_inputs, num_states, num_outputs, rng);
  return a;
}

EnvSpec random_env(int num_env_states, int num_inputs, int num_outputs, std::uint64_t seed) {
  Rng rng(seed);
  EnvSpec e;
  e.num_states = num_env_states;
  e.advance = random_table(num_env_states, num_outputs, num_env_states, rng);
  e.emit = random_table(num_env_states, num_outputs, num_inputs, rng);
  return e;
}

namespace {

// Joint Markov state: a sparse mapping from a tiny index set to symbols.
// Index 0 holds the automaton's input cell, 1 the output cell, 2 the
// internal state, 3 the environment state. Each index updates through a
// local rule that may read only its declared boundary indices; the framework
// enforces the restriction by handing each rule a restricted view.
constexpr int kInputCell = 0;
constexpr int kOutputCell = 1;
constexpr int kThetaCell = 2;
constexpr int kEnvCell = 3;

using JointState = std::map<int, int>;
using RestrictedView = std::map<int, int>;

struct LocalRule {
  std::vector<int> boundary;  // indices the rule may read, besides its own
  std::function<int(int self, const RestrictedView&)> apply;
};

JointState joint_step(const JointState& state, const std::map<int, LocalRule>& rules) {
  JointState next;
  for (const auto& [index, rule] : rules) {
    RestrictedView view;
    for (int b : rule.boundary) view[b] = state.at(b);
    next[index] = rule.apply(state.at(index), view);
  }
  return next;
}

}  // namespace

std::vector<BehaviourStep> run_embedded(const EmbeddedAutomatonSpec& automaton, const EnvSpec& env,
                                        int x0, int theta0, int e0, int steps) {
  automaton.validate();
  env.validate(automaton.num_inputs, automaton.num_outputs);

  // One synchronous update of all four cells:
  //   y'     = pi(x, theta)        (boundary: input, theta)
  //   theta' = u(x, theta)         (boundary: input)
  //   e'     = advance(e, pi(x, theta))
  //   x'     = emit(e, pi(x, theta))
  // The environment cells read the freshly computed output via the same
  // (x, theta) boundary, keeping the update simultaneous.
  std::map<int, LocalRule> rules;
  rules[kOutputCell] = {{kInputCell, kThetaCell}, [&](int, const RestrictedView& v) {
                          return automaton.output[v.at(kInputCell)][v.at(kThetaCell)];
                        }};
  rules[kThetaCell] = {{kInputCell}, [&](int theta, const RestrictedView& v) {
                         return automaton.update[v.at(kInputCell)][theta];
                       }};
  rules[kEnvCell] = {{kInputCell, kThetaCell}, [&](int e, const RestrictedView& v) {
                       const int y = automaton.output[v.at(kInputCell)][v.at(kThetaCell)];
                       return env.advance[e][y];
                     }};
  rules[kInputCell] = {{kEnvCell, kThetaCell}, [&](int x, const RestrictedView& v) {
                         const int y = automaton.output[x][v.at(kThetaCell)];
                         return env.emit[v.at(kEnvCell)][y];
                       }};

  JointState state{{kInputCell, x0}, {kOutputCell, -1}, {kThetaCell, theta0}, {kEnvCell, e0}};
  std::vector<BehaviourStep> trace;
  trace.reserve(static_cast<size_t>(steps));
  for (int t = 0; t < steps; ++t) {
    const int x = state.at(kInputCell);
    const int theta = state.at(kThetaCell);
    const int y = automaton.output[x][theta];
    trace.push_back({x, y});
    state = joint_step(state, rules);
  }
  return trace;
}

std::vector<BehaviourStep> run_interaction_loop(
    const EmbeddedAutomatonSpec& automaton, const EnvSpec& env, int x0, int theta0, int e0,
    int steps, const std::function<int(int, int, int)>& true_update) {
  automaton.validate();
  env.validate(automaton.num_inputs, automaton.num_outputs);
  int x = x0, theta = theta0, e = e0;
  std::vector<BehaviourStep> trace;
  trace.reserve(static_cast<size_t>(steps));
  for (int t = 0; t < steps; ++t) {
    const int y = automaton.output[x][theta];
    trace.push_back({x, y});
    theta = true_update ? true_update(x, theta, e) : automaton.update[x][theta];
    const int e_next = env.advance[e][y];
    x = env.emit[e][y];
    e = e_next;
  }
  return trace;
}

EquivalenceVerdict verify_pomdp_equivalence(const EmbeddedAutomatonSpec& automaton,
                                            const EnvSpec& env, int x0, int theta0, int e0,
                                            int steps,
                                            const std::function<int(int, int, int)>& true_update) {
  const auto boundaried = run_embedded(automaton, env, x0, theta0, e0, steps);
  const auto interactive = run_interaction_loop(automaton, env, x0, theta0, e0, steps, true_update);
  for (int t = 0; t < steps; ++t) {
    if (!(boundaried[static_cast<size_t>(t)] == interactive[static_cast<size_t>(t)])) {
      return {false, t, boundaried[static_cast<size_t>(t)], interactive[static_cast<size_t>(t)]};
    }
  }
  return {};
}

}  // namespace interactivity::ulenv
