#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>

#include "fairmatch/instance.hpp"

namespace fairmatch {

/// An online algorithm driven one arrival at a time. Adaptive adversaries feed
/// items through arrive() instead of mutating a stored instance.
class OnlineProcess {
 public:
  virtual ~OnlineProcess() = default;
  virtual void arrive(std::span<const int> neighbors) = 0;
  /// Current value (fractional degree, or 0/1 when integral) of an agent.
  virtual double agent_value(int agent) const = 0;
  virtual double total_value() const = 0;
};

/// Builds a fresh process over the agents/classes of `agents`; the seed is
/// ignored by deterministic algorithms.
using ProcessFactory = std::function<std::unique_ptr<OnlineProcess>(const Instance& agents, std::uint64_t seed)>;

}  // namespace fairmatch
