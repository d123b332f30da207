#include "tallip/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tallip/rng.hpp"

namespace tallip {

Index LpInstance::row_sparsity() const {
  Index r = 0;
  for (Index i = 0; i < A.rows(); ++i) {
    Index nnz = 0;
    for (Index j = 0; j < A.cols(); ++j)
      if (A(i, j) != 0.0) ++nnz;
    r = std::max(r, nnz);
  }
  return r;
}

void LpInstance::validate() const {
  if (d < 1 || n < d) throw std::invalid_argument("instance requires n >= d >= 1");
  if (A.rows() != n || A.cols() != d) throw std::invalid_argument("A shape mismatch");
  if (b.size() != n) throw std::invalid_argument("b length mismatch");
  if (c.size() != d) throw std::invalid_argument("c length mismatch");
  if (!A.allFinite() || !b.allFinite() || !c.allFinite())
    throw std::invalid_argument("instance entries must be finite");
  if (x0) {
    if (x0->size() != d) throw std::invalid_argument("x0 length mismatch");
    if (!x0->allFinite()) throw std::invalid_argument("x0 entries must be finite");
    const Vector s = A * (*x0) - b;
    for (Index i = 0; i < n; ++i)
      if (!(s[i] > 0.0)) throw InfeasibleInterior(i + 1, s[i]);
  }
}

RowPair row_query(const LpInstance& inst, Index i, CostLedger& ledger,
                  std::string_view label) {
  if (i < 1 || i > inst.n) throw std::out_of_range("row_query: index out of range");
  ledger.add_classical(label, 1);
  return RowPair{inst.A.row(i - 1).transpose(), inst.b[i - 1]};
}

HalvingChain HalvingChain::make(std::uint64_t seed, Index n, Index d) {
  if (d < 1 || n < d) throw std::invalid_argument("halving chain requires n >= d >= 1");
  const double ratio = static_cast<double>(n) / static_cast<double>(d);
  const int depth = std::max(0, static_cast<int>(std::ceil(std::log2(ratio))));
  return HalvingChain{seed, depth};
}

bool chain_member(const HalvingChain& chain, Index i, int level) {
  if (level < 0 || level > chain.depth)
    throw std::out_of_range("chain_member: level out of range");
  for (int l = 1; l <= level; ++l) {
    const std::uint64_t h = splitmix64(
        chain.seed ^ splitmix64(static_cast<std::uint64_t>(i) * 0x9e3779b97f4a7c15ULL +
                                static_cast<std::uint64_t>(l)));
    if (h >= (1ULL << 63)) return false;
  }
  return true;
}

double modeled_quantum_cost(CostKind kind, double n, double d, double eps) {
  if (!(n >= d) || !(d >= 1.0)) throw std::domain_error("modeled cost: need n >= d >= 1");
  if (!(eps > 0.0) || !(eps <= 1.0)) throw std::domain_error("modeled cost: need 0 < eps <= 1");
  switch (kind) {
    case CostKind::SpectralApprox:
    case CostKind::LeverageScores:
    case CostKind::HessianLog:
    case CostKind::HessianVol:
      return std::sqrt(n * d) / eps;
    case CostKind::LewisWeights:
    case CostKind::HessianLewis:
      return std::sqrt(n) * d * std::sqrt(d) / (eps * eps);
    case CostKind::MatVec:
    case CostKind::GradLog:
    case CostKind::GradVol:
      return std::sqrt(n) * d / eps;
    case CostKind::GradLewis:
      return std::sqrt(n) * d * d * std::sqrt(d) / (eps * eps);
  }
  throw std::domain_error("modeled cost: unknown kind");
}

LpInstance gen_random_tall_lp(Index n, Index d, std::uint64_t seed) {
  if (d < 1 || n < 2 * d) throw std::invalid_argument("generator requires n >= 2d");
  Rng rng = Rng(seed).stream("gen_random_tall_lp");

  const Index m = n - 2 * d;  // random rows; the rest is the bounding box
  const double box = 10.0;

  LpInstance inst;
  inst.n = n;
  inst.d = d;
  inst.A = Matrix::Zero(n, d);
  inst.b = Vector::Zero(n);
  inst.c = Vector::Zero(d);

  Vector x0(d);
  for (Index j = 0; j < d; ++j) x0[j] = 0.5 * rng.normal();
  for (Index j = 0; j < d; ++j) x0[j] = std::clamp(x0[j], -0.5 * box, 0.5 * box);

  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < d; ++j)
      inst.A(i, j) = std::clamp(rng.normal(), -6.0, 6.0);
  // slack at x0 drawn positive, so x0 is strictly interior by construction
  for (Index i = 0; i < m; ++i) {
    const double s = 0.2 + 1.8 * rng.uniform01();
    inst.b[i] = inst.A.row(i).dot(x0) - s;
  }
  // box rows: x_j >= -box and -x_j >= -box
  for (Index j = 0; j < d; ++j) {
    inst.A(m + j, j) = 1.0;
    inst.b[m + j] = -box;
    inst.A(m + d + j, j) = -1.0;
    inst.b[m + d + j] = -box;
  }

  for (Index j = 0; j < d; ++j) inst.c[j] = rng.normal();
  const double cn = inst.c.norm();
  if (cn > 0) inst.c /= cn;

  inst.x0 = x0;
  inst.validate();
  return inst;
}

Matrix gen_search_hard_matrix(Index n, Index d,
                              const std::vector<std::vector<std::uint8_t>>& z) {
  if (d < 1 || n < 1 || n % d != 0)
    throw std::invalid_argument("gen_search_hard_matrix: d must divide n");
  const Index block = n / d;
  if (static_cast<Index>(z.size()) != d)
    throw std::invalid_argument("gen_search_hard_matrix: need d bitstrings");
  Matrix A = Matrix::Zero(n, d);
  for (Index j = 0; j < d; ++j) {
    if (static_cast<Index>(z[j].size()) != block)
      throw std::invalid_argument("gen_search_hard_matrix: bitstring length must be n/d");
    for (Index i = 0; i < block; ++i) {
      if (z[j][i] != 0 && z[j][i] != 1)
        throw std::invalid_argument("gen_search_hard_matrix: entries must be 0/1");
      A(j * block + i, j) = static_cast<double>(z[j][i]);
    }
  }
  return A;
}

}  // namespace tallip
