// Copyright 2026 The ppcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ppcert/universe.hpp"

#include <cstdio>
#include <stdexcept>
#include <unordered_set>

namespace ppcert {

namespace {

void check_distinct(const std::vector<std::string>& ids) {
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw std::invalid_argument("universe ids must be distinct: '" + id +
                                  "' repeats");
    }
  }
}

}  // namespace

Universe::Universe(std::vector<std::string> ids) : ids_(std::move(ids)) {
  check_distinct(ids_);
}

Universe::Universe(std::vector<std::string> ids,
                   std::vector<Eigen::VectorXd> points)
    : ids_(std::move(ids)), points_(std::move(points)) {
  check_distinct(ids_);
  if (!points_.empty()) {
    if (points_.size() != ids_.size()) {
      throw std::invalid_argument("universe points must match ids in count");
    }
    for (const auto& p : points_) {
      if (p.size() != points_.front().size()) {
        throw std::invalid_argument(
            "universe points must share one dimension");
      }
    }
  }
}

int Universe::point_dim() const {
  if (!has_points()) {
    throw std::invalid_argument("universe has no numeric points");
  }
  return static_cast<int>(points_.front().size());
}

const Eigen::VectorXd& Universe::point(int i) const {
  if (!has_points()) {
    throw std::invalid_argument("universe has no numeric points");
  }
  return points_.at(i);
}

double Universe::scalar(int i) const {
  if (point_dim() != 1) {
    throw std::invalid_argument("universe points are not scalar");
  }
  return points_.at(i)(0);
}

int Universe::index_of(std::string_view id) const {
  for (int i = 0; i < size(); ++i) {
    if (ids_[i] == id) return i;
  }
  throw std::invalid_argument("unknown universe id: '" + std::string(id) + "'");
}

bool Universe::contains(std::string_view id) const {
  for (const auto& known : ids_) {
    if (known == id) return true;
  }
  return false;
}

bool Universe::operator==(const Universe& other) const {
  if (ids_ != other.ids_) return false;
  if (points_.size() != other.points_.size()) return false;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].size() != other.points_[i].size()) return false;
    if (!(points_[i].array() == other.points_[i].array()).all()) return false;
  }
  return true;
}

std::string render_scalar_id(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string render_tuple_id(const Eigen::VectorXd& v) {
  std::string out = "(";
  for (int i = 0; i < v.size(); ++i) {
    if (i > 0) out += ",";
    out += render_scalar_id(v(i));
  }
  out += ")";
  return out;
}

Universe scalar_universe(const std::vector<double>& values) {
  std::vector<std::string> ids;
  std::vector<Eigen::VectorXd> points;
  ids.reserve(values.size());
  points.reserve(values.size());
  for (double v : values) {
    ids.push_back(render_scalar_id(v));
    points.push_back(Eigen::VectorXd::Constant(1, v));
  }
  return Universe(std::move(ids), std::move(points));
}

Universe tuple_universe(const std::vector<std::vector<double>>& tuples) {
  std::vector<std::string> ids;
  std::vector<Eigen::VectorXd> points;
  ids.reserve(tuples.size());
  points.reserve(tuples.size());
  for (const auto& t : tuples) {
    Eigen::VectorXd p(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) p(i) = t[i];
    ids.push_back(render_tuple_id(p));
    points.push_back(std::move(p));
  }
  return Universe(std::move(ids), std::move(points));
}

}  // namespace ppcert
