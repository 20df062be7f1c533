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

#ifndef PPCERT_UNIVERSE_HPP_
#define PPCERT_UNIVERSE_HPP_

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace ppcert {

// Finite ordered universe of candidate datasets. Every member has a distinct
// string id; members may additionally carry numeric coordinates, which the
// interval and moment-based scores and the Hamming neighbor relation need.
class Universe {
 public:
  Universe() = default;
  explicit Universe(std::vector<std::string> ids);
  Universe(std::vector<std::string> ids, std::vector<Eigen::VectorXd> points);

  int size() const { return static_cast<int>(ids_.size()); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(int i) const { return ids_.at(i); }

  bool has_points() const { return !points_.empty(); }
  int point_dim() const;
  const Eigen::VectorXd& point(int i) const;
  // Scalar coordinate of member i; requires 1-d points.
  double scalar(int i) const;

  // Index of an id; throws std::invalid_argument if absent.
  int index_of(std::string_view id) const;
  bool contains(std::string_view id) const;

  bool operator==(const Universe& other) const;

 private:
  std::vector<std::string> ids_;
  std::vector<Eigen::VectorXd> points_;  // empty, or one entry per id
};

// Universe whose members are real scalars; ids are rendered from the values.
Universe scalar_universe(const std::vector<double>& values);
// Universe of equal-length real tuples; ids like "(0,1)".
Universe tuple_universe(const std::vector<std::vector<double>>& tuples);

// Canonical id rendering used by scalar_universe/tuple_universe and JSON IO.
std::string render_scalar_id(double v);
std::string render_tuple_id(const Eigen::VectorXd& v);

}  // namespace ppcert

#endif  // PPCERT_UNIVERSE_HPP_
