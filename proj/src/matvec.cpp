#include "tallip/matvec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace tallip {

namespace {

struct SymmetricRoots {
  Matrix sqrt;
  Matrix inv_sqrt;
};

SymmetricRoots psd_roots(const Matrix& W) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(W);
  if (eig.info() != Eigen::Success) throw SolverError("matvec: eigendecomposition failed");
  const Vector& w = eig.eigenvalues();
  const Matrix& V = eig.eigenvectors();
  const double cut = 1e-12 * std::max(0.0, w.maxCoeff());
  Vector rt(w.size()), irt(w.size());
  for (Index i = 0; i < w.size(); ++i) {
    if (!(w[i] > cut))
      throw RankDeficient("estimate_matvec: B must have full column rank");
    rt[i] = std::sqrt(w[i]);
    irt[i] = 1.0 / rt[i];
  }
  return SymmetricRoots{V * rt.asDiagonal() * V.transpose(),
                        V * irt.asDiagonal() * V.transpose()};
}

}  // namespace

Vector estimate_matvec(const MatVecRequest& req, Rng rng, CostLedger& ledger,
                       std::string_view label, MatVecStats* stats, bool log_modeled) {
  if (!(req.delta > 0.0)) throw std::domain_error("estimate_matvec: delta > 0 required");
  if (!(req.failure_prob > 0.0) || req.failure_prob >= 1.0)
    throw std::domain_error("estimate_matvec: failure_prob in (0,1) required");
  const Index n = req.B.n;
  const Index d = req.B.d;
  const std::string lbl(label);

  if (log_modeled) {
    ledger.add_modeled(lbl, req.v_inf_bound *
                                modeled_quantum_cost(CostKind::MatVec,
                                                     static_cast<double>(n),
                                                     static_cast<double>(d),
                                                     std::min(1.0, req.delta)));
  }

  HalvingOptions hopts;
  hopts.modeled_kind = std::nullopt;
  RowOracle inner = req.B;
  inner.ledger = nullptr;  // sketch queries charged under their own sublabel
  SpectralSketch sk = repeated_halving(inner, 0.5, rng.stream("precondition"), ledger,
                                       lbl + "/sketch", hopts);
  const SymmetricRoots roots = psd_roots(sk.gram());

  // preconditioned rows P_i = W~^{-1/2} b_i, cached once per call
  Matrix P(n, d);
  Vector vvals(n);
  for (Index i = 0; i < n; ++i) {
    const Vector bi = req.B.fetch(i);
    const double vi = req.v(i);
    if (std::abs(vi) > req.v_inf_bound)
      throw std::domain_error("estimate_matvec: |v| exceeds declared bound at index " +
                              std::to_string(i));
    P.row(i) = (roots.inv_sqrt * bi).transpose();
    vvals[i] = vi;
  }

  const Index groups = static_cast<Index>(
      std::ceil(8.0 * std::log(1.0 / req.failure_prob)));
  const double tr_bound = 1.5 * static_cast<double>(n) * static_cast<double>(d) *
                          req.v_inf_bound * req.v_inf_bound;
  const std::uint64_t group_size = static_cast<std::uint64_t>(
      std::ceil(16.0 * tr_bound / (req.delta * req.delta) /
                static_cast<double>(groups)));

  // Each group mean averages `group_size` i.i.d. draws of
  // X = n v_l W~^{-1/2} b_l with l uniform. Equal cell probabilities let the
  // occupancy counts be drawn as a binomial chain; the result is distributed
  // exactly as the per-sample loop while the ledger still charges one row
  // query per sample.
  Rng srng = rng.stream("samples");
  Matrix means(groups, d);
  for (Index g = 0; g < groups; ++g) {
    Vector acc = Vector::Zero(d);
    std::uint64_t left = group_size;
    for (Index i = 0; i < n && left > 0; ++i) {
      const double pr = 1.0 / static_cast<double>(n - i);
      const long long c =
          (i + 1 == n) ? static_cast<long long>(left)
                       : srng.binomial(static_cast<long long>(left), pr);
      if (c > 0 && vvals[i] != 0.0)
        acc += (static_cast<double>(c) * vvals[i]) * P.row(i).transpose();
      left -= static_cast<std::uint64_t>(c);
    }
    means.row(g) = (static_cast<double>(n) / static_cast<double>(group_size)) *
                   acc.transpose();
  }
  ledger.add_classical(lbl, static_cast<std::uint64_t>(groups) * group_size);

  // per-coordinate median of group means
  Vector med(d);
  std::vector<double> col(static_cast<size_t>(groups));
  for (Index j = 0; j < d; ++j) {
    for (Index g = 0; g < groups; ++g) col[static_cast<size_t>(g)] = means(g, j);
    auto mid = col.begin() + static_cast<std::ptrdiff_t>(col.size() / 2);
    std::nth_element(col.begin(), mid, col.end());
    double m = *mid;
    if (col.size() % 2 == 0) {
      auto lo = std::max_element(col.begin(), mid);
      m = 0.5 * (m + *lo);
    }
    med[j] = m;
  }

  if (stats) {
    stats->samples = static_cast<std::uint64_t>(groups) * group_size;
    stats->groups = groups;
    stats->group_size = group_size;
  }
  return roots.sqrt * med;
}

Vector exact_matvec(const Matrix& B, const Vector& v) {
  if (B.rows() != v.size()) throw std::invalid_argument("exact_matvec: shape mismatch");
  Vector y = Vector::Zero(B.cols());
  for (Index i = 0; i < B.rows(); ++i) y += v[i] * B.row(i).transpose();
  return y;
}

std::pair<double, double> perturbation_bound_check(const Matrix& B, const Vector& v,
                                                   const Vector& diag) {
  if (B.rows() != v.size() || B.rows() != diag.size())
    throw std::invalid_argument("perturbation_bound_check: shape mismatch");
  const double eps = (diag.array() - 1.0).abs().maxCoeff();
  const Vector lhs_vec = B.transpose() * (v - diag.cwiseProduct(v));
  const PsdPinv p = pinv_psd(B.transpose() * B);
  const double lhs = std::sqrt(std::max(0.0, lhs_vec.dot(p.pinv * lhs_vec)));
  return {lhs, eps * v.norm()};
}

}  // namespace tallip
