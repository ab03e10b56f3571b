#pragma once

#include <stdexcept>
#include <string>

namespace ehbp {

// Invalid or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A runtime invariant of the simulation broke; carries the slot and node it broke at.
class SimulationFault : public std::runtime_error {
 public:
  SimulationFault(const std::string& what, long long slot, int node)
      : std::runtime_error(what + " (slot " + std::to_string(slot) + ", node " + std::to_string(node) + ")"),
        slot_(slot),
        node_(node) {}

  long long slot() const { return slot_; }
  int node() const { return node_; }

 private:
  long long slot_;
  int node_;
};

// Energy spent in a slot exceeded the battery content at the start of the slot.
class CausalityViolation : public SimulationFault {
 public:
  using SimulationFault::SimulationFault;
};

// A file could not be read or written.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, const std::string& path) : std::runtime_error(path + ": " + what), path_(path) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace ehbp
