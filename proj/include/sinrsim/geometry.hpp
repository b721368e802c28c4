#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sinrsim/error.hpp"
#include "sinrsim/rng.hpp"

namespace sinrsim {

using LinkId = std::size_t;

template <typename Scalar>
using Point = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using ScalarVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
Scalar distance(const Point<Scalar>& a, const Point<Scalar>& b) {
  return (a - b).norm();
}

template <typename Scalar>
struct Link {
  LinkId id = 0;
  Point<Scalar> sender = Point<Scalar>::Zero();
  Point<Scalar> receiver = Point<Scalar>::Zero();

  Scalar length() const { return distance(sender, receiver); }
};

/// Distance from the sender of `v` to the receiver of `u`. The self case
/// yields the link length.
template <typename Scalar>
Scalar link_distance(const Link<Scalar>& v, const Link<Scalar>& u) {
  return distance(v.sender, u.receiver);
}

/// A set of links in the plane together with the propagation constants that
/// every SINR computation over it shares. Immutable after construction.
template <typename Scalar>
class Topology {
 public:
  Topology(std::vector<Link<Scalar>> links, Scalar alpha, Scalar beta, Scalar noise)
      : links_(std::move(links)), alpha_(alpha), beta_(beta), noise_(noise) {
    if (!(alpha_ > 0) || !(beta_ > 0) || !(noise_ >= 0) || !std::isfinite(alpha_) ||
        !std::isfinite(beta_) || !std::isfinite(noise_)) {
      throw Error(ErrorCode::invalid_parameter, "alpha and beta must be positive, noise non-negative");
    }
    lengths_.resize(static_cast<Eigen::Index>(links_.size()));
    for (std::size_t i = 0; i < links_.size(); ++i) {
      const auto& l = links_[i];
      if (l.id != i) {
        throw Error(ErrorCode::invalid_parameter, "link ids must be 0..n-1 in list order");
      }
      if (!l.sender.allFinite() || !l.receiver.allFinite()) {
        throw Error(ErrorCode::invalid_parameter, "link coordinates must be finite");
      }
      const Scalar len = l.length();
      if (!(len > 0)) {
        throw Error(ErrorCode::invalid_parameter, "link " + std::to_string(i) + " has zero length");
      }
      lengths_[static_cast<Eigen::Index>(i)] = len;
    }
  }

  std::size_t size() const { return links_.size(); }
  bool empty() const { return links_.empty(); }
  const std::vector<Link<Scalar>>& links() const { return links_; }
  const Link<Scalar>& link(LinkId id) const { return links_[id]; }
  const ScalarVector<Scalar>& lengths() const { return lengths_; }
  Scalar length(LinkId id) const { return lengths_[static_cast<Eigen::Index>(id)]; }

  Scalar alpha() const { return alpha_; }
  Scalar beta() const { return beta_; }
  Scalar noise() const { return noise_; }

  Scalar min_length() const { return require_links().minCoeff(); }
  Scalar max_length() const { return require_links().maxCoeff(); }

 private:
  const ScalarVector<Scalar>& require_links() const {
    if (links_.empty()) throw Error(ErrorCode::empty_topology, "topology has no links");
    return lengths_;
  }

  std::vector<Link<Scalar>> links_;
  ScalarVector<Scalar> lengths_;
  Scalar alpha_;
  Scalar beta_;
  Scalar noise_;
};

/// Length diversity: ratio of the longest to the shortest link.
template <typename Scalar>
Scalar length_diversity(const Topology<Scalar>& t) {
  return t.max_length() / t.min_length();
}

template <typename Scalar>
struct TopologyParams {
  std::size_t n = 200;
  Scalar side = 100;
  Scalar lmin = 1;
  Scalar lmax = 20;
  Scalar alpha = 2.5;
  Scalar beta = 1;
  Scalar noise = 0;
};

/// Senders uniform in the side x side square, lengths uniform in
/// [lmin, lmax], receivers at a uniform random bearing from their sender.
/// Receivers may fall outside the square.
template <typename Scalar>
Topology<Scalar> generate_random_topology(const TopologyParams<Scalar>& params, std::uint64_t seed) {
  if (params.n < 1 || !(params.side > 0) || !(params.lmin > 0) || !(params.lmin <= params.lmax)) {
    throw Error(ErrorCode::invalid_parameter, "require n >= 1, side > 0 and 0 < lmin <= lmax");
  }
  Engine rng = derive_stream(seed, {static_cast<std::uint64_t>(StreamTag::topology)});
  std::uniform_real_distribution<Scalar> coord(Scalar(0), params.side);
  std::uniform_real_distribution<Scalar> bearing(Scalar(0), 2 * std::numbers::pi_v<Scalar>);

  std::vector<Link<Scalar>> links;
  links.reserve(params.n);
  for (std::size_t i = 0; i < params.n; ++i) {
    Link<Scalar> l;
    l.id = i;
    l.sender = Point<Scalar>(coord(rng), coord(rng));
    Scalar len = params.lmin;
    if (params.lmax > params.lmin) {
      len = std::uniform_real_distribution<Scalar>(params.lmin, params.lmax)(rng);
    }
    const Scalar theta = bearing(rng);
    l.receiver = l.sender + len * Point<Scalar>(std::cos(theta), std::sin(theta));
    links.push_back(l);
  }
  return Topology<Scalar>(std::move(links), params.alpha, params.beta, params.noise);
}

using Point2d = Point<double>;
using Linkd = Link<double>;
using Topologyd = Topology<double>;
using TopologyParamsd = TopologyParams<double>;

}  // namespace sinrsim
