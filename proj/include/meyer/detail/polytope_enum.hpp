#pragma once

// Enumeration of integer coefficient vectors c with lo <= B c <= hi.
//
// The coordinate ranges are computed level by level from a Fourier-Motzkin
// projection of the constraint system, so the innermost loop only visits
// the exact (up to rounding slack) feasible interval. The caller filters the
// produced points against the true region.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "meyer/error.hpp"

namespace meyer::detail {

struct LinearConstraint {
  std::vector<double> a;  // a . c <= b
  double b;
};

inline std::size_t default_enumeration_cap() {
  if (const char* env = std::getenv("MEYER_BUDGET")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return 10'000'000;
}

class BoxEnumerator {
 public:
  BoxEnumerator(const Eigen::MatrixXd& basis, std::vector<double> lo, std::vector<double> hi)
      : dim_(static_cast<int>(basis.cols())), levels_(dim_) {
    std::vector<LinearConstraint> cons;
    for (int i = 0; i < dim_; ++i) {
      LinearConstraint up{std::vector<double>(dim_), hi[i]};
      LinearConstraint dn{std::vector<double>(dim_), -lo[i]};
      for (int j = 0; j < dim_; ++j) {
        up.a[j] = basis(i, j);
        dn.a[j] = -basis(i, j);
      }
      cons.push_back(std::move(up));
      cons.push_back(std::move(dn));
    }
    for (int k = dim_ - 1; k >= 0; --k) {
      levels_[k] = cons;
      if (k > 0) cons = eliminate(cons, k);
    }
  }

  /// Calls visit(const std::vector<long long>& coeffs) for every candidate.
  /// Returns the number of candidates visited.
  template <class Visitor>
  std::size_t run(Visitor&& visit, std::size_t cap) const {
    std::vector<long long> c(dim_, 0);
    std::size_t visited = 0;
    recurse(0, c, visit, visited, cap);
    return visited;
  }

 private:
  int dim_;
  std::vector<std::vector<LinearConstraint>> levels_;

  static std::vector<LinearConstraint> eliminate(const std::vector<LinearConstraint>& cons, int k) {
    std::vector<LinearConstraint> out;
    std::vector<const LinearConstraint*> pos, neg;
    for (const auto& c : cons) {
      double scale = 0;
      for (double v : c.a) scale = std::max(scale, std::abs(v));
      if (std::abs(c.a[k]) <= 1e-14 * scale) {
        out.push_back(c);
        out.back().a[k] = 0.0;
      } else if (c.a[k] > 0) {
        pos.push_back(&c);
      } else {
        neg.push_back(&c);
      }
    }
    for (const auto* p : pos) {
      for (const auto* q : neg) {
        double lp = -q->a[k];
        double lq = p->a[k];
        LinearConstraint r{std::vector<double>(p->a.size()), lp * p->b + lq * q->b};
        double norm = 0;
        for (std::size_t j = 0; j < r.a.size(); ++j) {
          r.a[j] = lp * p->a[j] + lq * q->a[j];
          norm = std::max(norm, std::abs(r.a[j]));
        }
        r.a[k] = 0.0;
        if (norm > 0) {
          for (double& v : r.a) v /= norm;
          r.b /= norm;
        }
        out.push_back(std::move(r));
      }
    }
    return out;
  }

  template <class Visitor>
  void recurse(int k, std::vector<long long>& c, Visitor& visit, std::size_t& visited,
               std::size_t cap) const {
    double lo = -HUGE_VAL, hi = HUGE_VAL;
    for (const auto& con : levels_[k]) {
      double ak = con.a[k];
      if (ak == 0.0) continue;
      double rest = con.b;
      for (int j = 0; j < k; ++j) rest -= con.a[j] * static_cast<double>(c[j]);
      double bound = rest / ak;
      if (ak > 0) hi = std::min(hi, bound);
      else lo = std::max(lo, bound);
    }
    if (!(lo <= hi + 1e-9)) return;
    if (!std::isfinite(lo) || !std::isfinite(hi))
      throw Error(ErrorCode::EnumerationBudgetExceeded, "unbounded enumeration region");
    const double slack = 1e-9 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
    long long from = static_cast<long long>(std::ceil(lo - slack));
    long long to = static_cast<long long>(std::floor(hi + slack));
    for (long long v = from; v <= to; ++v) {
      c[k] = v;
      if (k + 1 == dim_) {
        if (++visited > cap)
          throw Error(ErrorCode::EnumerationBudgetExceeded,
                      "candidate count exceeds cap " + std::to_string(cap));
        visit(static_cast<const std::vector<long long>&>(c));
      } else {
        recurse(k + 1, c, visit, visited, cap);
      }
    }
  }
};

}  // namespace meyer::detail
