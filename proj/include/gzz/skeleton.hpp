#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace gzz {

using Eigen::Index;
using Eigen::VectorXd;

enum class EventKind { kStart, kBounce, kHyper, kEnd };

/// Full process state at one skeleton point. `theta` holds +-1 entries.
struct SkeletonEvent {
  double t = 0.0;
  VectorXd xi;
  VectorXd theta;
  VectorXd alpha;
  EventKind kind = EventKind::kStart;
};

struct SkeletonState {
  VectorXd xi;
  VectorXd theta;
  VectorXd alpha;
};

class SkeletonError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Event record of a zig-zag type trajectory: xi is piecewise linear with
/// velocity theta, alpha is piecewise constant, both right-continuous at
/// event times.
class Skeleton {
 public:
  Skeleton(VectorXd xi, VectorXd theta, VectorXd alpha);

  /// Appends an event. Throws SkeletonError on non-increasing time, a
  /// position off the interpolated ray, or a change in both theta and alpha.
  void append(SkeletonEvent event);

  /// State at time t in [0, final_time]; the state at an event time is the
  /// post-event state.
  SkeletonState position_at(double t) const;

  double final_time() const { return events_.back().t; }
  std::size_t size() const { return events_.size(); }
  const SkeletonEvent& operator[](std::size_t k) const { return events_[k]; }
  const std::vector<SkeletonEvent>& events() const { return events_; }

  Index dim() const { return events_.front().xi.size(); }
  Index hyper_dim() const { return events_.front().alpha.size(); }

  /// Index k of the segment [T^k, T^{k+1}) containing t.
  std::size_t segment_index(double t) const;

 private:
  std::vector<SkeletonEvent> events_;
};

/// CSV with header t,xi_1..xi_p,theta_1..theta_p,alpha_1..alpha_r.
void write_skeleton_csv(std::ostream& out, const Skeleton& sk);
void write_skeleton_csv(const std::string& path, const Skeleton& sk);
/// Event kinds are inferred: a flipped theta is a bounce, a changed alpha a
/// hyperparameter update, the last record an end marker.
Skeleton read_skeleton_csv(std::istream& in);
Skeleton read_skeleton_csv(const std::string& path);

}  // namespace gzz
