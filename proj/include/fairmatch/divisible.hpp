#pragma once

#include <algorithm>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "fairmatch/common.hpp"
#include "fairmatch/instance.hpp"
#include "fairmatch/online.hpp"
#include "fairmatch/rational.hpp"

namespace fairmatch {

/// Phase I is equal filling across needy classes, phase II global water filling.
enum class FillPhase { kEqualFilling = 1, kWaterFilling = 2 };

template <class Scalar>
struct BasicSegment {
  int item = 0;
  int agent = 0;
  Scalar mass{};
  Scalar z_start{};  ///< agent degree when the segment began
  Scalar z_end{};
  FillPhase phase = FillPhase::kEqualFilling;
};

template <class Scalar>
struct BasicAllocation {
  int agent = 0;
  Scalar mass{};
};

using Segment = BasicSegment<double>;
using Allocation = BasicAllocation<double>;

/// Sparse x_{o,a}: per item, the agents it was split between.
struct FractionalMatching {
  int num_agents = 0;
  std::vector<std::vector<Allocation>> items;
  std::vector<double> agent_degree;
  std::vector<double> item_degree;

  int num_items() const { return static_cast<int>(items.size()); }
  double total_mass() const;
};

struct ExactFractionalMatching {
  int num_agents = 0;
  std::vector<std::vector<BasicAllocation<Rational>>> items;
  std::vector<Rational> agent_degree;

  Rational total_mass() const;
};

struct EfttTrace {
  double gamma = 0.0;
  bool capped = true;
  std::vector<Segment> segments;
  FractionalMatching matching;
};

namespace detail {
template <class Scalar>
Scalar tolerance();
template <>
inline double tolerance<double>() {
  return kEpsNum;
}
template <>
inline Rational tolerance<Rational>() {
  return Rational(0);
}
}  // namespace detail

/// Exact event-driven simulation of the continuous EFTT(gamma) process.
///
/// Rates are piecewise constant between events, so each step advances to the
/// next event in closed form: an agent reaching gamma (or 1), a class water
/// level reaching the next agent's degree, or the item running out. Tied
/// minimum-degree agents share their class's rate equally. With `capped`
/// false, agents have no unit capacity (the guiding process used for
/// rounding) and phase II never saturates anyone.
template <class Scalar>
class BasicEfttProcess {
 public:
  BasicEfttProcess(const Instance& agents, Scalar gamma, bool capped = true)
      : gamma_(std::move(gamma)),
        capped_(capped),
        class_of_(agents.class_of_agents()),
        degree_(static_cast<std::size_t>(agents.num_agents), Scalar(0)),
        open_segment_(static_cast<std::size_t>(agents.num_agents), -1),
        by_class_(static_cast<std::size_t>(agents.num_classes())) {
    if (gamma_ < Scalar(0) || gamma_ > Scalar(1)) throw InvalidParameter("gamma must lie in [0,1]");
  }

  void arrive(std::span<const int> neighbors) {
    const int item = static_cast<int>(allocations_.size());
    allocations_.emplace_back();
    item_degree_.emplace_back(0);
    if (neighbors.empty()) return;

    Scalar remaining(1);
    if (gamma_ > Scalar(0)) remaining = equal_fill(item, neighbors, remaining);
    close_segments(neighbors);
    if (remaining > eps_) water_fill(item, neighbors, remaining);
    close_segments(neighbors);
  }

  const std::vector<Scalar>& degrees() const { return degree_; }
  const std::vector<BasicSegment<Scalar>>& segments() const { return segments_; }
  const std::vector<std::vector<BasicAllocation<Scalar>>>& allocations() const { return allocations_; }
  const std::vector<Scalar>& item_degrees() const { return item_degree_; }
  const Scalar& gamma() const { return gamma_; }
  bool capped() const { return capped_; }

 private:
  bool below_threshold(const Scalar& z) const { return z < gamma_ - eps_; }
  bool unsaturated(const Scalar& z) const { return !capped_ || z < Scalar(1) - eps_; }

  void snap(Scalar& z, const Scalar& target) const {
    Scalar gap = z - target;
    if (gap < Scalar(0)) gap = -gap;
    if (gap <= eps_) z = target;
  }

  void give(int item, int agent, const Scalar& amount, const std::optional<Scalar>& snap_target,
            FillPhase phase) {
    Scalar z_start = degree_[agent];
    Scalar z_end = z_start + amount;
    if (snap_target) snap(z_end, *snap_target);
    if (gamma_ > Scalar(0)) snap(z_end, gamma_);
    if (capped_) snap(z_end, Scalar(1));
    Scalar mass = z_end - z_start;
    degree_[agent] = z_end;
    item_degree_[item] += mass;

    int& open = open_segment_[agent];
    if (open >= 0) {
      auto& seg = segments_[open];
      seg.mass += mass;
      seg.z_end = z_end;
    } else {
      open = static_cast<int>(segments_.size());
      segments_.push_back({item, agent, mass, z_start, z_end, phase});
    }
    auto& row = allocations_[item];
    auto it = std::find_if(row.begin(), row.end(), [&](const auto& al) { return al.agent == agent; });
    if (it == row.end()) {
      row.push_back({agent, mass});
    } else {
      it->mass += mass;
    }
  }

  void close_segments(std::span<const int> neighbors) {
    for (int a : neighbors) open_segment_[a] = -1;
  }

  Scalar equal_fill(int item, std::span<const int> neighbors, Scalar remaining) {
    touched_.clear();
    for (int a : neighbors) {
      auto& bucket = by_class_[class_of_[a]];
      if (bucket.empty()) touched_.push_back(class_of_[a]);
      bucket.push_back(a);
    }
    std::sort(touched_.begin(), touched_.end());

    struct ClassStep {
      int cls;
      Scalar level;
      Scalar next;
      Scalar time;
      std::vector<int> tied;
    };
    std::vector<ClassStep> active;
    guard_ = 0;
    while (remaining > eps_) {
      active.clear();
      for (int c : touched_) {
        const auto& members = by_class_[c];
        std::optional<Scalar> level;
        for (int a : members) {
          if (below_threshold(degree_[a]) && (!level || degree_[a] < *level)) level = degree_[a];
        }
        if (!level) continue;
        ClassStep step{c, *level, gamma_, Scalar(0), {}};
        for (int a : members) {
          const Scalar& z = degree_[a];
          if (!below_threshold(z)) continue;
          if (z <= step.level + eps_) {
            step.tied.push_back(a);
          } else if (z < step.next) {
            step.next = z;
          }
        }
        active.push_back(std::move(step));
      }
      if (active.empty()) break;

      const Scalar classes(static_cast<long>(active.size()));
      Scalar dt = remaining;
      for (auto& step : active) {
        step.time = (step.next - step.level) * Scalar(static_cast<long>(step.tied.size())) * classes;
        if (step.time < dt) dt = step.time;
      }
      for (const auto& step : active) {
        Scalar per_agent = dt / (classes * Scalar(static_cast<long>(step.tied.size())));
        std::optional<Scalar> target;
        if (step.time <= dt) target = step.next;
        for (int a : step.tied) give(item, a, per_agent, target, FillPhase::kEqualFilling);
      }
      remaining -= dt;
      check_progress();
    }
    for (int c : touched_) by_class_[c].clear();
    return remaining;
  }

  void water_fill(int item, std::span<const int> neighbors, Scalar remaining) {
    std::vector<int> tied;
    guard_ = 0;
    while (remaining > eps_) {
      std::optional<Scalar> level;
      for (int a : neighbors) {
        if (unsaturated(degree_[a]) && (!level || degree_[a] < *level)) level = degree_[a];
      }
      if (!level) break;
      tied.clear();
      std::optional<Scalar> next;
      if (capped_) next = Scalar(1);
      for (int a : neighbors) {
        const Scalar& z = degree_[a];
        if (!unsaturated(z)) continue;
        if (z <= *level + eps_) {
          tied.push_back(a);
        } else if (!next || z < *next) {
          next = z;
        }
      }
      std::sort(tied.begin(), tied.end());
      const Scalar count(static_cast<long>(tied.size()));
      Scalar dt = remaining;
      std::optional<Scalar> target;
      if (next) {
        Scalar time = (*next - *level) * count;
        if (time <= dt) {
          dt = time;
          target = *next;
        }
      }
      Scalar per_agent = dt / count;
      for (int a : tied) give(item, a, per_agent, target, FillPhase::kWaterFilling);
      remaining -= dt;
      check_progress();
    }
  }

  void check_progress() {
    if (++guard_ > 1'000'000) throw std::logic_error("EFTT event loop failed to make progress");
  }

  Scalar gamma_;
  bool capped_;
  Scalar eps_ = detail::tolerance<Scalar>();
  std::vector<int> class_of_;
  std::vector<Scalar> degree_;
  std::vector<Scalar> item_degree_;
  std::vector<int> open_segment_;
  std::vector<BasicSegment<Scalar>> segments_;
  std::vector<std::vector<BasicAllocation<Scalar>>> allocations_;
  std::vector<std::vector<int>> by_class_;
  std::vector<int> touched_;
  long guard_ = 0;
};

using EfttProcess = BasicEfttProcess<double>;

/// OnlineProcess adapter so the adversary driver can feed EFTT item by item.
class EfttOnline : public OnlineProcess {
 public:
  EfttOnline(const Instance& agents, double gamma) : process_(agents, gamma) {}
  void arrive(std::span<const int> neighbors) override { process_.arrive(neighbors); }
  double agent_value(int agent) const override { return process_.degrees()[agent]; }
  double total_value() const override;
  const EfttProcess& process() const { return process_; }

 private:
  EfttProcess process_;
};

ProcessFactory eftt_factory(double gamma);

EfttTrace eftt_run(const Instance& instance, double gamma);

/// Uncapped guiding run (agents may exceed degree 1); used by the rounding module.
EfttTrace eftt_guide_run(const Instance& instance, double gamma);

/// Exact rational execution for small instances (at most 32 vertices).
ExactFractionalMatching eftt_run_exact(const Instance& instance, const Rational& gamma);

/// Standalone water-filling: for each item, raises the lowest unsaturated liking
/// agents to a common level found by sorting, without event simulation.
FractionalMatching water_filling_reference(const Instance& instance);

double eftt_usw(const EfttTrace& trace);

/// y_i[o] = sum over agents a in class i of x[o,a].
std::vector<std::vector<double>> class_loads(const FractionalMatching& matching, const Instance& instance);

void write_trace_csv(std::ostream& out, const EfttTrace& trace);

}  // namespace fairmatch
