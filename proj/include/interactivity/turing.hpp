#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace interactivity::ulenv {

/// Deterministic Turing machine. States and tape symbols are indices into
/// the name tables; the transition table must be total on (Q \ F) x Gamma.
struct TuringMachineSpec {
  std::vector<std::string> states;
  std::vector<std::string> tape_alphabet;
  int start_state = 0;
  int blank = 0;  // index into tape_alphabet
  std::set<int> final_states;

  struct Transition {
    int next_state;
    int write;
    int move;  // -1 left, +1 right
  };
  std::map<std::pair<int, int>, Transition> table;  // (state, read) -> transition

  void validate() const;
  int state_index(const std::string& name) const;
  int symbol_index(const std::string& name) const;
};

TuringMachineSpec tm_spec_from_json(const nlohmann::json& j);
TuringMachineSpec load_tm_spec(const std::string& path);

/// Binary counter: repeatedly increments the number on the tape, forever.
TuringMachineSpec binary_increment_tm();

/// Direct simulator configuration: the oracle-side representation.
struct TmConfig {
  int state = 0;
  long head = 0;
  std::map<long, int> tape;  // only non-blank symbols stored
  bool halted = false;

  int read(const TuringMachineSpec& spec, long pos) const;
  bool operator==(const TmConfig&) const = default;
};

/// One step of the plain table-lookup simulator.
TmConfig tm_step_direct(const TuringMachineSpec& spec, const TmConfig& cfg);

/// Markov encoding: tape positions indexed by the integers; the symbol at a
/// position is either (control state, tape symbol) at the head, a marker
/// paired with the tape symbol off the head, or blank.
struct TmMarkovCell {
  int state;  // kNoHead when the head is elsewhere
  int tape_symbol;
  bool operator==(const TmMarkovCell&) const = default;
};

inline constexpr int kNoHead = -1;

struct TmMarkovState {
  std::map<long, TmMarkovCell> cells;
  bool halted = false;
  bool operator==(const TmMarkovState&) const = default;
};

TmMarkovState tm_encode(const TuringMachineSpec& spec, const TmConfig& cfg);
TmConfig tm_decode(const TuringMachineSpec& spec, const TmMarkovState& state);

/// One Markov transition: write at the head, place the control state at the
/// destination cell, leave everything else unchanged. Changes at most two
/// positions. Once in a final state the transition is the identity.
TmMarkovState tm_markov_step(const TuringMachineSpec& spec, const TmMarkovState& state);

/// Initial configuration with the given tape contents starting at position 0.
TmConfig tm_initial_config(const TuringMachineSpec& spec, const std::vector<int>& input);

}  // namespace interactivity::ulenv
