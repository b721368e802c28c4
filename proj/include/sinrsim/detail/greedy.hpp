#pragma once

#include <vector>

#include "sinrsim/sinr.hpp"

namespace sinrsim::detail {

/// Incremental first-come greedy: admits each candidate in turn iff the
/// admitted set stays feasible. Keeps the uncapped load on every admitted
/// member so each test costs O(|admitted|).
class GreedyFeasibleBuilder {
 public:
  explicit GreedyFeasibleBuilder(const AffectanceMatrixd& m, double delta = 1.0)
      : m_(m), limit_(1.0 / delta + kAffectanceEps) {}

  void reset() {
    chosen_.clear();
    load_.clear();
  }

  bool try_add(LinkId x) {
    const double limit = limit_;
    double incoming = 0;
    for (std::size_t i = 0; i < chosen_.size(); ++i) {
      incoming += m_.raw(chosen_[i], x);
      if (load_[i] + m_.raw(x, chosen_[i]) > limit) return false;
    }
    if (incoming > limit) return false;
    for (std::size_t i = 0; i < chosen_.size(); ++i) load_[i] += m_.raw(x, chosen_[i]);
    chosen_.push_back(x);
    load_.push_back(incoming);
    return true;
  }

  const std::vector<LinkId>& chosen() const { return chosen_; }

 private:
  const AffectanceMatrixd& m_;
  double limit_;
  std::vector<LinkId> chosen_;
  std::vector<double> load_;
};

}  // namespace sinrsim::detail
