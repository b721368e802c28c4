#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sinrsim/error.hpp"
#include "sinrsim/geometry.hpp"

namespace sinrsim {

/// Absolute slack applied to every comparison of an affectance sum against
/// its threshold.
inline constexpr double kAffectanceEps = 1e-9;

enum class PowerKind { uniform, linear, mean, custom };

inline const char* to_string(PowerKind kind) {
  switch (kind) {
    case PowerKind::uniform: return "uniform";
    case PowerKind::linear: return "linear";
    case PowerKind::mean: return "mean";
    case PowerKind::custom: return "custom";
  }
  return "unknown";
}

inline std::optional<PowerKind> parse_power_kind(std::string_view name) {
  if (name == "uniform") return PowerKind::uniform;
  if (name == "linear") return PowerKind::linear;
  if (name == "mean") return PowerKind::mean;
  if (name == "custom") return PowerKind::custom;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// LinkSet

/// Sorted, duplicate-free set of link ids over a fixed topology.
class LinkSet {
 public:
  LinkSet() = default;
  LinkSet(std::initializer_list<LinkId> ids) : LinkSet(std::vector<LinkId>(ids)) {}
  explicit LinkSet(std::vector<LinkId> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end()) {
      throw Error(ErrorCode::invalid_parameter, "link set contains duplicate ids");
    }
  }

  bool contains(LinkId id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }

  void insert(LinkId id) {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) ids_.insert(it, id);
  }

  LinkSet without(LinkId id) const {
    LinkSet out;
    out.ids_.reserve(ids_.size());
    for (auto v : ids_) {
      if (v != id) out.ids_.push_back(v);
    }
    return out;
  }

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }
  const std::vector<LinkId>& ids() const { return ids_; }

  friend bool operator==(const LinkSet&, const LinkSet&) = default;
  friend auto operator<=>(const LinkSet&, const LinkSet&) = default;

 private:
  std::vector<LinkId> ids_;
};

template <typename Scalar>
bool is_valid_link_set(const Topology<Scalar>& t, const LinkSet& s) {
  return s.empty() || s.ids().back() < t.size();
}

// ---------------------------------------------------------------------------
// Power assignments

/// Noise margin factor c = beta / (1 - beta*N*l^alpha/P). Throws when the
/// link cannot meet the threshold alone or when c would exceed 2*beta.
template <typename Scalar>
Scalar c_factor(Scalar alpha, Scalar beta, Scalar noise, Scalar length, Scalar power) {
  const Scalar load = beta * noise * std::pow(length, alpha) / power;
  const Scalar denom = Scalar(1) - load;
  if (!(denom > 0)) {
    throw Error(ErrorCode::assumption_violated, "link cannot overcome ambient noise");
  }
  const Scalar c = beta / denom;
  if (c > 2 * beta) {
    throw Error(ErrorCode::assumption_violated, "noise margin factor exceeds 2*beta");
  }
  return c;
}

/// Materialized per-link transmit powers. Built-in kinds are length-monotone
/// and sublinear by construction; custom powers are accepted unchecked and
/// flagged through in_theory_class(). Links violating the noise assumption
/// are recorded, and any affectance involving them as receiver throws.
template <typename Scalar>
class PowerAssignment {
 public:
  static PowerAssignment make(PowerKind kind, const Topology<Scalar>& t, Scalar scale = Scalar(1)) {
    if (kind == PowerKind::custom) {
      throw Error(ErrorCode::invalid_parameter, "custom power needs explicit per-link values");
    }
    if (!(scale > 0)) throw Error(ErrorCode::invalid_parameter, "power scale must be positive");
    ScalarVector<Scalar> p(static_cast<Eigen::Index>(t.size()));
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const Scalar len = t.lengths()[i];
      switch (kind) {
        case PowerKind::uniform: p[i] = scale; break;
        case PowerKind::linear: p[i] = scale * std::pow(len, t.alpha()); break;
        case PowerKind::mean: p[i] = scale * std::pow(len, t.alpha() / 2); break;
        case PowerKind::custom: break;
      }
    }
    return PowerAssignment(kind, t, std::move(p));
  }

  static PowerAssignment custom(const Topology<Scalar>& t, ScalarVector<Scalar> powers) {
    if (static_cast<std::size_t>(powers.size()) != t.size()) {
      throw Error(ErrorCode::invalid_parameter, "custom power vector size mismatch");
    }
    return PowerAssignment(PowerKind::custom, t, std::move(powers));
  }

  PowerKind kind() const { return kind_; }
  bool in_theory_class() const { return kind_ != PowerKind::custom; }
  const ScalarVector<Scalar>& powers() const { return powers_; }
  Scalar operator[](LinkId id) const { return powers_[static_cast<Eigen::Index>(id)]; }
  std::size_t size() const { return static_cast<std::size_t>(powers_.size()); }

  /// True iff beta*N*l^alpha/P <= 1/2 on every link.
  bool satisfies_noise_assumption() const { return c_.allFinite(); }

  /// Cached noise margin factor; rethrows the c_factor error for links that
  /// violate the assumption.
  Scalar c(LinkId id) const {
    const Scalar v = c_[static_cast<Eigen::Index>(id)];
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::assumption_violated, "link " + std::to_string(id) + " violates the noise assumption");
    }
    return v;
  }

 private:
  PowerAssignment(PowerKind kind, const Topology<Scalar>& t, ScalarVector<Scalar> powers)
      : kind_(kind), powers_(std::move(powers)), c_(powers_.size()) {
    for (Eigen::Index i = 0; i < powers_.size(); ++i) {
      if (!(powers_[i] > 0) || !std::isfinite(powers_[i])) {
        throw Error(ErrorCode::invalid_parameter, "powers must be positive and finite");
      }
      try {
        c_[i] = c_factor(t.alpha(), t.beta(), t.noise(), t.lengths()[i], powers_[i]);
      } catch (const Error&) {
        c_[i] = std::numeric_limits<Scalar>::quiet_NaN();
      }
    }
  }

  PowerKind kind_;
  ScalarVector<Scalar> powers_;
  ScalarVector<Scalar> c_;
};

template <typename Scalar>
Scalar c_factor(const Topology<Scalar>& t, const PowerAssignment<Scalar>& p, LinkId u) {
  return c_factor(t.alpha(), t.beta(), t.noise(), t.length(u), p[u]);
}

// Pairwise scans over the power class conditions.
template <typename Scalar>
bool is_length_monotone(const Topology<Scalar>& t, const PowerAssignment<Scalar>& p) {
  for (LinkId v = 0; v < t.size(); ++v)
    for (LinkId w = 0; w < t.size(); ++w)
      if (t.length(v) >= t.length(w) && p[v] < p[w]) return false;
  return true;
}

template <typename Scalar>
bool is_sublinear(const Topology<Scalar>& t, const PowerAssignment<Scalar>& p) {
  for (LinkId v = 0; v < t.size(); ++v) {
    const Scalar dv = p[v] / std::pow(t.length(v), t.alpha());
    for (LinkId w = 0; w < t.size(); ++w) {
      const Scalar dw = p[w] / std::pow(t.length(w), t.alpha());
      if (t.length(v) >= t.length(w) && dv > dw * (1 + Scalar(1e-12))) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Affectance

/// Uncapped affectance of `v` on `u`: c_u * (P_v/P_u) * (l_u/d_vu)^alpha.
/// Infinite when v's sender sits on u's receiver; zero for v == u.
template <typename Scalar>
Scalar raw_affectance(const Topology<Scalar>& t, const PowerAssignment<Scalar>& p, LinkId v, LinkId u) {
  if (v == u) return Scalar(0);
  const Scalar d = link_distance(t.link(v), t.link(u));
  if (d == 0) return std::numeric_limits<Scalar>::infinity();
  return p.c(u) * (p[v] / p[u]) * std::pow(t.length(u) / d, t.alpha());
}

template <typename Scalar>
Scalar affectance(const Topology<Scalar>& t, const PowerAssignment<Scalar>& p, LinkId v, LinkId u) {
  return std::min(Scalar(1), raw_affectance(t, p, v, u));
}

template <typename Scalar>
Scalar total_affectance(const Topology<Scalar>& t, const PowerAssignment<Scalar>& p, const LinkSet& s,
                        LinkId u) {
  Scalar sum = 0;
  for (auto v : s) sum += affectance(t, p, v, u);
  return sum;
}

template <typename Scalar>
Scalar raw_total_affectance(const Topology<Scalar>& t, const PowerAssignment<Scalar>& p, const LinkSet& s,
                            LinkId u) {
  Scalar sum = 0;
  for (auto v : s) sum += raw_affectance(t, p, v, u);
  return sum;
}

/// True iff every member of `s` receives affectance at most 1/delta from the
/// rest of the set. The test runs on uncapped terms: this agrees with the
/// capped sum everywhere except a lone saturated interferer, which the
/// capped form would wrongly admit at delta = 1.
template <typename Scalar>
bool is_delta_signal(const Topology<Scalar>& t, const PowerAssignment<Scalar>& p, const LinkSet& s,
                     Scalar delta) {
  if (!(delta >= 1)) throw Error(ErrorCode::invalid_parameter, "delta must be >= 1");
  const Scalar limit = Scalar(1) / delta + Scalar(kAffectanceEps);
  for (auto u : s) {
    if (raw_total_affectance(t, p, s, u) > limit) return false;
  }
  return true;
}

template <typename Scalar>
bool is_feasible(const Topology<Scalar>& t, const PowerAssignment<Scalar>& p, const LinkSet& s) {
  return is_delta_signal(t, p, s, Scalar(1));
}

/// Raw SINR test for receiver `u` against the other members of `s`.
template <typename Scalar>
bool check_sinr_direct(const Topology<Scalar>& t, const PowerAssignment<Scalar>& p, const LinkSet& s,
                       LinkId u) {
  const Scalar signal = p[u] / std::pow(t.length(u), t.alpha());
  Scalar interference = t.noise();
  for (auto v : s) {
    if (v == u) continue;
    const Scalar d = link_distance(t.link(v), t.link(u));
    if (d == 0) return false;
    interference += p[v] / std::pow(d, t.alpha());
  }
  if (interference == 0) return true;
  return signal / interference >= t.beta();
}

/// Dense cache of pairwise affectance for a fixed (topology, power) pair.
/// Column u holds the affectance that every link exerts on u.
template <typename Scalar>
class AffectanceMatrix {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  AffectanceMatrix(const Topology<Scalar>& t, const PowerAssignment<Scalar>& p) {
    if (!p.satisfies_noise_assumption()) {
      throw Error(ErrorCode::assumption_violated, "power assignment violates the noise assumption");
    }
    const auto n = static_cast<Eigen::Index>(t.size());
    raw_.resize(n, n);
    for (Eigen::Index u = 0; u < n; ++u)
      for (Eigen::Index v = 0; v < n; ++v)
        raw_(v, u) = raw_affectance(t, p, static_cast<LinkId>(v), static_cast<LinkId>(u));
    capped_ = raw_.cwiseMin(Scalar(1));
  }

  std::size_t size() const { return static_cast<std::size_t>(raw_.rows()); }
  const Matrix& raw() const { return raw_; }
  const Matrix& capped() const { return capped_; }
  Scalar raw(LinkId v, LinkId u) const { return raw_(idx(v), idx(u)); }
  Scalar capped(LinkId v, LinkId u) const { return capped_(idx(v), idx(u)); }

  template <typename Range>
  Scalar raw_load(const Range& s, LinkId u) const {
    Scalar sum = 0;
    for (auto v : s) sum += raw_(idx(v), idx(u));
    return sum;
  }

  template <typename Range>
  Scalar capped_load(const Range& s, LinkId u) const {
    Scalar sum = 0;
    for (auto v : s) sum += capped_(idx(v), idx(u));
    return sum;
  }

  template <typename Range>
  bool is_delta_signal(const Range& s, Scalar delta) const {
    const Scalar limit = Scalar(1) / delta + Scalar(kAffectanceEps);
    for (auto u : s) {
      if (raw_load(s, u) > limit) return false;
    }
    return true;
  }

  template <typename Range>
  bool is_feasible(const Range& s) const {
    return is_delta_signal(s, Scalar(1));
  }

 private:
  static Eigen::Index idx(LinkId id) { return static_cast<Eigen::Index>(id); }

  Matrix raw_;
  Matrix capped_;
};

// ---------------------------------------------------------------------------
// Signal strengthening and structural checks

/// Upper bound on the part count of a q^alpha-signal decomposition of a
/// feasible set: ceil(2 q^alpha / beta)^2.
template <typename Scalar>
std::size_t strengthen_part_bound(Scalar alpha, Scalar beta, Scalar q) {
  const auto k = static_cast<std::size_t>(std::ceil(2 * std::pow(q, alpha) / beta));
  return k * k;
}

/// Partitions a feasible set into q^alpha-signal sets by first-fit over links
/// in decreasing length order (ties by id).
template <typename Scalar>
std::vector<LinkSet> strengthen_decompose(const Topology<Scalar>& t, const PowerAssignment<Scalar>& p,
                                          const LinkSet& s, Scalar q) {
  if (!(q >= 1)) throw Error(ErrorCode::invalid_parameter, "q must be >= 1");
  if (!is_feasible(t, p, s)) throw Error(ErrorCode::infeasible_input, "decomposition input is not feasible");
  const Scalar limit = Scalar(1) / std::pow(q, t.alpha()) + Scalar(kAffectanceEps);

  std::vector<LinkId> order(s.begin(), s.end());
  std::stable_sort(order.begin(), order.end(),
                   [&t](LinkId a, LinkId b) { return t.length(a) > t.length(b); });

  struct Part {
    std::vector<LinkId> members;
    std::vector<Scalar> load;  // uncapped affectance on each member from the part
  };
  std::vector<Part> parts;
  for (auto x : order) {
    bool placed = false;
    for (auto& part : parts) {
      Scalar incoming = 0;
      bool fits = true;
      for (std::size_t i = 0; i < part.members.size() && fits; ++i) {
        incoming += raw_affectance(t, p, part.members[i], x);
        fits = part.load[i] + raw_affectance(t, p, x, part.members[i]) <= limit;
      }
      if (!fits || incoming > limit) continue;
      for (std::size_t i = 0; i < part.members.size(); ++i) {
        part.load[i] += raw_affectance(t, p, x, part.members[i]);
      }
      part.members.push_back(x);
      part.load.push_back(incoming);
      placed = true;
      break;
    }
    if (!placed) parts.push_back(Part{{x}, {Scalar(0)}});
  }

  std::vector<LinkSet> out;
  out.reserve(parts.size());
  for (auto& part : parts) out.emplace_back(std::move(part.members));
  return out;
}

/// d_uv * d_vu >= q^2 * l_u * l_v, with 1e-9 relative slack.
template <typename Scalar>
bool check_separation(const Topology<Scalar>& t, LinkId u, LinkId v, Scalar q) {
  const Scalar lhs = link_distance(t.link(u), t.link(v)) * link_distance(t.link(v), t.link(u));
  const Scalar rhs = q * q * t.length(u) * t.length(v);
  return lhs >= rhs * (1 - Scalar(1e-9));
}

/// kappa = 3^(alpha+1) times the length-diversity factor Delta^alpha. Under
/// linear power the diversity factor drops out.
template <typename Scalar>
Scalar max_set_affectance_bound(const Topology<Scalar>& t, const PowerAssignment<Scalar>& p) {
  const Scalar kappa = std::pow(Scalar(3), t.alpha() + 1);
  if (p.kind() == PowerKind::linear) return kappa;
  return kappa * std::pow(length_diversity(t), t.alpha());
}

// ---------------------------------------------------------------------------
// Structural checks on signal sets and set affectance

/// Largest P_u l_v^a / (P_v l_u^a) over all ordered pairs.
template <typename Scalar>
Scalar max_signal_ratio(const Topology<Scalar>& t, const PowerAssignment<Scalar>& p) {
  Scalar worst = 0;
  ScalarVector<Scalar> la(static_cast<Eigen::Index>(t.size()));
  for (LinkId i = 0; i < t.size(); ++i) la[static_cast<Eigen::Index>(i)] = std::pow(t.length(i), t.alpha());
  for (LinkId u = 0; u < t.size(); ++u)
    for (LinkId v = 0; v < t.size(); ++v) {
      const auto iu = static_cast<Eigen::Index>(u);
      const auto iv = static_cast<Eigen::Index>(v);
      worst = std::max(worst, (p[u] * la[iv]) / (p[v] * la[iu]));
    }
  return worst;
}

/// Returns the first member pair of `s` violating the separation property
/// for q, or nullopt when every pair is separated.
template <typename Scalar>
std::optional<std::pair<LinkId, LinkId>> find_separation_violation(const Topology<Scalar>& t,
                                                                   const LinkSet& s, Scalar q) {
  const auto& ids = s.ids();
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j)
      if (!check_separation(t, ids[i], ids[j], q)) return std::make_pair(ids[i], ids[j]);
  return std::nullopt;
}

/// ceil(2*3^a/beta)^2 * (1 + 2*(3*Delta)^a): the per-subset bound from the
/// decomposition argument times the subset count.
template <typename Scalar>
Scalar set_affectance_product_bound(Scalar alpha, Scalar beta, Scalar diversity) {
  const auto parts = static_cast<Scalar>(strengthen_part_bound(alpha, beta, Scalar(3)));
  return parts * (1 + 2 * std::pow(3 * diversity, alpha));
}

template <typename Scalar>
struct SetAffectanceSample {
  Scalar total = 0;
  Scalar bound = 0;
  bool holds = false;
};

/// Affectance of a feasible set on an arbitrary probe link against the
/// product bound. `delta_free` evaluates the bound with Delta = 1.
template <typename Scalar>
SetAffectanceSample<Scalar> check_set_affectance(const Topology<Scalar>& t, const PowerAssignment<Scalar>& p,
                                                 const LinkSet& s, LinkId probe, bool delta_free = false) {
  if (!is_feasible(t, p, s)) throw Error(ErrorCode::infeasible_input, "set is not feasible");
  SetAffectanceSample<Scalar> out;
  out.total = total_affectance(t, p, s, probe);
  const Scalar diversity = delta_free ? Scalar(1) : length_diversity(t);
  out.bound = set_affectance_product_bound(t.alpha(), t.beta(), diversity);
  out.holds = out.total <= out.bound * (1 + Scalar(1e-9));
  return out;
}

using PowerAssignmentd = PowerAssignment<double>;
using AffectanceMatrixd = AffectanceMatrix<double>;

}  // namespace sinrsim
