#include "interactivity/turing.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace interactivity::ulenv {

void TuringMachineSpec::validate() const {
  if (states.empty() || tape_alphabet.empty())
    throw std::invalid_argument("tm spec: empty state set or alphabet");
  if (start_state < 0 || start_state >= static_cast<int>(states.size()))
    throw std::invalid_argument("tm spec: start state out of range");
  if (blank < 0 || blank >= static_cast<int>(tape_alphabet.size()))
    throw std::invalid_argument("tm spec: blank symbol out of range");
  for (int q = 0; q < static_cast<int>(states.size()); ++q) {
    if (final_states.count(q)) continue;
    for (int a = 0; a < static_cast<int>(tape_alphabet.size()); ++a) {
      if (!table.count({q, a}))
        throw std::invalid_argument("tm spec: transition table not total: missing (" + states[q] +
                                    ", " + tape_alphabet[a] + ")");
    }
  }
  for (const auto& [key, t] : table) {
    if (t.next_state < 0 || t.next_state >= static_cast<int>(states.size()) || t.write < 0 ||
        t.write >= static_cast<int>(tape_alphabet.size()) || (t.move != -1 && t.move != 1))
      throw std::invalid_argument("tm spec: transition out of range");
  }
}

int TuringMachineSpec::state_index(const std::string& name) const {
  auto it = std::find(states.begin(), states.end(), name);
  if (it == states.end()) throw std::invalid_argument("tm spec: unknown state " + name);
  return static_cast<int>(it - states.begin());
}

int TuringMachineSpec::symbol_index(const std::string& name) const {
  auto it = std::find(tape_alphabet.begin(), tape_alphabet.end(), name);
  if (it == tape_alphabet.end()) throw std::invalid_argument("tm spec: unknown symbol " + name);
  return static_cast<int>(it - tape_alphabet.begin());
}

TuringMachineSpec tm_spec_from_json(const nlohmann::json& j) {
  TuringMachineSpec spec;
  spec.states = j.at("states").get<std::vector<std::string>>();
  spec.tape_alphabet = j.at("tape_alphabet").get<std::vector<std::string>>();
  spec.start_state = spec.state_index(j.at("start_state").get<std::string>());
  spec.blank = spec.symbol_index(j.at("blank").get<std::string>());
  for (const auto& f : j.at("final_states")) spec.final_states.insert(spec.state_index(f.get<std::string>()));
  // rows: [state, read, next_state, write, "L"|"R"]
  for (const auto& row : j.at("transitions")) {
    const int q = spec.state_index(row.at(0).get<std::string>());
    const int a = spec.symbol_index(row.at(1).get<std::string>());
    TuringMachineSpec::Transition t;
    t.next_state = spec.state_index(row.at(2).get<std::string>());
    t.write = spec.symbol_index(row.at(3).get<std::string>());
    const std::string dir = row.at(4).get<std::string>();
    if (dir != "L" && dir != "R") throw std::invalid_argument("tm spec: move must be L or R");
    t.move = dir == "L" ? -1 : 1;
    spec.table[{q, a}] = t;
  }
  spec.validate();
  return spec;
}

TuringMachineSpec load_tm_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tm spec: " + path);
  nlohmann::json j;
  in >> j;
  return tm_spec_from_json(j);
}

TuringMachineSpec binary_increment_tm() {
  // Tape holds a binary number, most significant bit leftmost, head starting
  // on the least significant bit. "inc" carries left; "ret" walks back right.
  TuringMachineSpec spec;
  spec.states = {"inc", "ret"};
  spec.tape_alphabet = {"_", "0", "1"};
  spec.start_state = 0;
  spec.blank = 0;
  const int inc = 0, ret = 1, blank = 0, zero = 1, one = 2;
  spec.table[{inc, one}] = {inc, zero, -1};
  spec.table[{inc, zero}] = {ret, one, 1};
  spec.table[{inc, blank}] = {ret, one, 1};
  spec.table[{ret, zero}] = {ret, zero, 1};
  spec.table[{ret, one}] = {ret, one, 1};
  spec.table[{ret, blank}] = {inc, blank, -1};
  spec.validate();
  return spec;
}

int TmConfig::read(const TuringMachineSpec& spec, long pos) const {
  auto it = tape.find(pos);
  return it == tape.end() ? spec.blank : it->second;
}

TmConfig tm_step_direct(const TuringMachineSpec& spec, const TmConfig& cfg) {
  if (cfg.halted || spec.final_states.count(cfg.state)) {
    TmConfig halted = cfg;
    halted.halted = true;
    return halted;
  }
  const int a = cfg.read(spec, cfg.head);
  auto it = spec.table.find({cfg.state, a});
  if (it == spec.table.end())
    throw std::runtime_error("tm_step_direct: undefined transition in non-final state");
  const auto& t = it->second;
  TmConfig next = cfg;
  if (t.write == spec.blank)
    next.tape.erase(cfg.head);
  else
    next.tape[cfg.head] = t.write;
  next.head = cfg.head + t.move;
  next.state = t.next_state;
  return next;
}

TmMarkovState tm_encode(const TuringMachineSpec& spec, const TmConfig& cfg) {
  TmMarkovState state;
  state.halted = cfg.halted;
  for (const auto& [pos, sym] : cfg.tape) {
    if (pos != cfg.head && sym != spec.blank) state.cells[pos] = {kNoHead, sym};
  }
  state.cells[cfg.head] = {cfg.state, cfg.read(spec, cfg.head)};
  return state;
}

TmConfig tm_decode(const TuringMachineSpec& spec, const TmMarkovState& state) {
  TmConfig cfg;
  cfg.halted = state.halted;
  bool head_found = false;
  for (const auto& [pos, cell] : state.cells) {
    if (cell.state != kNoHead) {
      if (head_found) throw std::runtime_error("tm_decode: multiple head cells");
      head_found = true;
      cfg.state = cell.state;
      cfg.head = pos;
    }
    if (cell.tape_symbol != spec.blank) cfg.tape[pos] = cell.tape_symbol;
  }
  if (!head_found) throw std::runtime_error("tm_decode: no head cell");
  return cfg;
}

TmMarkovState tm_markov_step(const TuringMachineSpec& spec, const TmMarkovState& state) {
  // Locate the head: the unique cell carrying a control state.
  long head = 0;
  const TmMarkovCell* head_cell = nullptr;
  for (const auto& [pos, cell] : state.cells) {
    if (cell.state != kNoHead) {
      head = pos;
      head_cell = &cell;
      break;
    }
  }
  if (!head_cell) throw std::runtime_error("tm_markov_step: no head cell");
  if (state.halted || spec.final_states.count(head_cell->state)) {
    TmMarkovState halted = state;
    halted.halted = true;
    return halted;
  }

  auto it = spec.table.find({head_cell->state, head_cell->tape_symbol});
  if (it == spec.table.end())
    throw std::runtime_error("tm_markov_step: undefined transition in non-final state");
  const auto& t = it->second;

  TmMarkovState next = state;
  // Write the new symbol at the old head position; blank cells are not stored.
  if (t.write == spec.blank)
    next.cells.erase(head);
  else
    next.cells[head] = {kNoHead, t.write};
  // Move the control state onto the destination cell, keeping its tape symbol.
  const long dest = head + t.move;
  auto dest_it = next.cells.find(dest);
  const int dest_symbol = dest_it == next.cells.end() ? spec.blank : dest_it->second.tape_symbol;
  next.cells[dest] = {t.next_state, dest_symbol};
  return next;
}

TmConfig tm_initial_config(const TuringMachineSpec& spec, const std::vector<int>& input) {
  TmConfig cfg;
  cfg.state = spec.start_state;
  cfg.head = 0;
  for (size_t i = 0; i < input.size(); ++i) {
    if (input[i] != spec.blank) cfg.tape[static_cast<long>(i)] = input[i];
  }
  return cfg;
}

}  // namespace interactivity::ulenv
