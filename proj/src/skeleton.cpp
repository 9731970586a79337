#include "gzz/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace gzz {

namespace {

constexpr double kInterpolationTolerance = 1e-12;

bool is_sign_vector(const VectorXd& theta) {
  return (theta.array().abs() == 1.0).all();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

Skeleton::Skeleton(VectorXd xi, VectorXd theta, VectorXd alpha) {
  if (xi.size() != theta.size()) throw SkeletonError("xi and theta sizes differ");
  if (!is_sign_vector(theta)) throw SkeletonError("theta entries must be +1 or -1");
  events_.push_back({0.0, std::move(xi), std::move(theta), std::move(alpha), EventKind::kStart});
}

void Skeleton::append(SkeletonEvent event) {
  const SkeletonEvent& last = events_.back();
  if (!(event.t > last.t)) throw SkeletonError("event time must exceed the final time");
  if (event.xi.size() != last.xi.size() || event.theta.size() != last.theta.size() ||
      event.alpha.size() != last.alpha.size()) {
    throw SkeletonError("event dimensions differ from the skeleton");
  }
  if (!is_sign_vector(event.theta)) throw SkeletonError("theta entries must be +1 or -1");

  const double dt = event.t - last.t;
  for (Index i = 0; i < event.xi.size(); ++i) {
    const double expected = last.xi[i] + last.theta[i] * dt;
    if (std::abs(event.xi[i] - expected) > kInterpolationTolerance * std::max(1.0, std::abs(expected))) {
      throw SkeletonError("event position is inconsistent with linear interpolation");
    }
  }
  const Index flips = (event.theta.array() != last.theta.array()).count();
  const bool alpha_changed = (event.alpha.array() != last.alpha.array()).any();
  if (flips > 1) throw SkeletonError("more than one velocity component flipped at one event");
  if (flips == 1 && alpha_changed) throw SkeletonError("velocity and hyperparameters changed at one event");

  events_.push_back(std::move(event));
}

std::size_t Skeleton::segment_index(double t) const {
  if (!(t >= 0.0) || t > final_time()) throw std::out_of_range("time outside [0, final_time]");
  auto it = std::upper_bound(events_.begin(), events_.end(), t,
                             [](double value, const SkeletonEvent& e) { return value < e.t; });
  return static_cast<std::size_t>(std::distance(events_.begin(), it)) - 1;
}

SkeletonState Skeleton::position_at(double t) const {
  const SkeletonEvent& e = events_[segment_index(t)];
  return {e.xi + e.theta * (t - e.t), e.theta, e.alpha};
}

void write_skeleton_csv(std::ostream& out, const Skeleton& sk) {
  const Index p = sk.dim();
  const Index r = sk.hyper_dim();
  out << "t";
  for (Index i = 1; i <= p; ++i) out << ",xi_" << i;
  for (Index i = 1; i <= p; ++i) out << ",theta_" << i;
  for (Index i = 1; i <= r; ++i) out << ",alpha_" << i;
  out << '\n';
  out << std::setprecision(17);
  for (const auto& e : sk.events()) {
    out << e.t;
    for (Index i = 0; i < p; ++i) out << ',' << e.xi[i];
    for (Index i = 0; i < p; ++i) out << ',' << static_cast<int>(e.theta[i]);
    for (Index i = 0; i < r; ++i) out << ',' << e.alpha[i];
    out << '\n';
  }
}

void write_skeleton_csv(const std::string& path, const Skeleton& sk) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write_skeleton_csv(out, sk);
}

Skeleton read_skeleton_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SkeletonError("empty skeleton file");
  const auto header = split_csv_line(line);
  Index p = 0;
  Index r = 0;
  for (const auto& h : header) {
    if (h.rfind("xi_", 0) == 0) ++p;
    if (h.rfind("alpha_", 0) == 0) ++r;
  }
  if (header.empty() || header[0] != "t" || static_cast<Index>(header.size()) != 1 + 2 * p + r) {
    throw SkeletonError("malformed skeleton header");
  }

  std::vector<SkeletonEvent> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (static_cast<Index>(fields.size()) != 1 + 2 * p + r) throw SkeletonError("malformed skeleton row");
    SkeletonEvent e;
    e.t = std::stod(fields[0]);
    e.xi.resize(p);
    e.theta.resize(p);
    e.alpha.resize(r);
    for (Index i = 0; i < p; ++i) e.xi[i] = std::stod(fields[1 + i]);
    for (Index i = 0; i < p; ++i) e.theta[i] = std::stod(fields[1 + p + i]);
    for (Index i = 0; i < r; ++i) e.alpha[i] = std::stod(fields[1 + 2 * p + i]);
    rows.push_back(std::move(e));
  }
  if (rows.empty()) throw SkeletonError("skeleton file has no events");
  if (rows.front().t != 0.0) throw SkeletonError("first event must be at t = 0");

  Skeleton sk(rows.front().xi, rows.front().theta, rows.front().alpha);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto& prev = rows[k - 1];
    auto& e = rows[k];
    if ((e.theta.array() != prev.theta.array()).any()) {
      e.kind = EventKind::kBounce;
    } else if ((e.alpha.array() != prev.alpha.array()).any()) {
      e.kind = EventKind::kHyper;
    } else {
      e.kind = (k + 1 == rows.size()) ? EventKind::kEnd : EventKind::kHyper;
    }
    sk.append(std::move(e));
  }
  return sk;
}

Skeleton read_skeleton_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_skeleton_csv(in);
}

}  // namespace gzz
