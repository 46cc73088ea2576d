#include "rqm/classical.hpp"

#include <algorithm>
#include <cmath>

namespace rqm {

FiniteSpace make_space(std::size_t size, std::vector<std::string> labels) {
  if (size == 0) throw Error(ErrorCode::InvalidSpec, "a finite space needs at least one point");
  if (!labels.empty() && labels.size() != size) {
    throw Error(ErrorCode::InvalidSpec, "got " + std::to_string(labels.size()) + " labels for " +
                                            std::to_string(size) + " points");
  }
  return FiniteSpace{size, std::move(labels)};
}

Kernel::Kernel(Eigen::MatrixXd matrix, double eps) : matrix_(std::move(matrix)) {
  if (matrix_.rows() == 0 || matrix_.cols() == 0) {
    throw Error(ErrorCode::InvalidSpec, "empty kernel");
  }
  for (Eigen::Index x = 0; x < matrix_.rows(); ++x) {
    if (matrix_.row(x).minCoeff() < -eps) {
      throw Error(ErrorCode::NotStochastic, "kernel row " + std::to_string(x) + " has a negative entry",
                  "kernel.nonnegative");
    }
    const double s = matrix_.row(x).sum();
    if (std::abs(s - 1.0) > eps) {
      throw Error(ErrorCode::NotStochastic, "kernel row " + std::to_string(x) + " sums to " + std::to_string(s),
                  "kernel.row-sum");
    }
  }
}

Kernel compose_kernels(const Kernel& first, const Kernel& second) {
  if (first.cols() != second.rows()) {
    throw Error(ErrorCode::Dimension, "kernel shapes do not compose");
  }
  return Kernel(first.matrix() * second.matrix());
}

void validate_random_map(const ClassicalRandomMap& m, double eps) {
  if (m.x.size == 0 || m.y.size == 0 || m.z.size == 0) {
    throw Error(ErrorCode::InvalidSpec, "random map spaces must be nonempty");
  }
  if (m.table.size() != m.x.size) {
    throw Error(ErrorCode::InvalidSpec, "table has " + std::to_string(m.table.size()) + " rows, |X| = " +
                                            std::to_string(m.x.size));
  }
  for (std::size_t x = 0; x < m.table.size(); ++x) {
    if (m.table[x].size() != m.z.size) {
      throw Error(ErrorCode::InvalidSpec, "table row " + std::to_string(x) + " has " +
                                              std::to_string(m.table[x].size()) + " entries, |Z| = " +
                                              std::to_string(m.z.size));
    }
    for (std::size_t y : m.table[x]) {
      if (y >= m.y.size) {
        throw Error(ErrorCode::InvalidSpec, "table row " + std::to_string(x) + " maps outside Y");
      }
    }
  }
  if (m.nu.size() != m.z.size) {
    throw Error(ErrorCode::InvalidSpec, "ν has " + std::to_string(m.nu.size()) + " weights, |Z| = " +
                                            std::to_string(m.z.size));
  }
  double s = 0.0;
  for (double w : m.nu) {
    if (w < -eps) throw Error(ErrorCode::NotStochastic, "ν has a negative weight", "nu.probability");
    s += w;
  }
  if (std::abs(s - 1.0) > eps) {
    throw Error(ErrorCode::NotStochastic, "ν sums to " + std::to_string(s), "nu.probability");
  }
}

Kernel kernel_of_random_map(const ClassicalRandomMap& m) {
  validate_random_map(m);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.x.size), static_cast<Eigen::Index>(m.y.size));
  for (std::size_t x = 0; x < m.x.size; ++x) {
    for (std::size_t z = 0; z < m.z.size; ++z) {
      k(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(m.table[x][z])) += m.nu[z];
    }
  }
  return Kernel(std::move(k));
}

ClassicalRandomMap compose_random_maps(const ClassicalRandomMap& first, const ClassicalRandomMap& second) {
  validate_random_map(first);
  validate_random_map(second);
  if (first.y.size != second.x.size) {
    throw Error(ErrorCode::Dimension, "random maps do not compose: |Y_1| = " + std::to_string(first.y.size) +
                                          ", |X_2| = " + std::to_string(second.x.size));
  }
  ClassicalRandomMap out;
  out.x = first.x;
  out.y = second.y;
  out.z = make_space(first.z.size * second.z.size);
  out.table.assign(first.x.size, std::vector<std::size_t>(out.z.size));
  for (std::size_t x = 0; x < first.x.size; ++x) {
    for (std::size_t z1 = 0; z1 < first.z.size; ++z1) {
      for (std::size_t z2 = 0; z2 < second.z.size; ++z2) {
        out.table[x][z1 * second.z.size + z2] = second.table[first.table[x][z1]][z2];
      }
    }
  }
  for (std::size_t z1 = 0; z1 < first.z.size; ++z1) {
    for (std::size_t z2 = 0; z2 < second.z.size; ++z2) out.nu.push_back(first.nu[z1] * second.nu[z2]);
  }
  return out;
}

LinearMap fmo_of_kernel(const Kernel& k) {
  Algebra domain = Algebra::commutative(k.cols());
  Algebra codomain = Algebra::commutative(k.rows());
  return validate_cp_unital(LinearMap(domain, codomain, k.matrix().cast<Complex>()));
}

Kernel kernel_of_fmo(const LinearMap& f, double eps) {
  if (!f.domain().is_commutative() || !f.codomain().is_commutative()) {
    throw Error(ErrorCode::UnsupportedShape, "kernels correspond to maps between commutative algebras");
  }
  const CMatrix& m = f.matrix();
  if (m.imag().cwiseAbs().maxCoeff() > eps) {
    throw Error(ErrorCode::NotStochastic, "map does not preserve real functions", "kernel.real");
  }
  return Kernel(m.real(), eps);
}

RandomQuantumMap lift_random_map(const ClassicalRandomMap& m) {
  validate_random_map(m);
  Algebra b = m.y.algebra();
  Algebra a = m.x.algebra();
  Algebra c = m.z.algebra();
  Algebra codomain = tensor_algebra(a, c);
  CMatrix phi = CMatrix::Zero(codomain.dim(), b.dim());
  for (std::size_t x = 0; x < m.x.size; ++x) {
    for (std::size_t z = 0; z < m.z.size; ++z) phi(x * m.z.size + z, m.table[x][z]) = 1.0;
  }
  LinearMap morphism = make_morphism(LinearMap(b, codomain, std::move(phi)));
  return RandomQuantumMap(QuantumFamily(b, a, c, morphism), distribution_state(m.nu));
}

State distribution_state(const std::vector<double>& p, double eps) {
  if (p.empty()) throw Error(ErrorCode::InvalidSpec, "empty distribution");
  std::vector<CMatrix> d;
  for (double w : p) d.push_back(CMatrix::Constant(1, 1, w));
  return State(Algebra::commutative(p.size()), std::move(d), eps);
}

std::vector<double> state_distribution(const State& s) {
  if (!s.algebra().is_commutative()) {
    throw Error(ErrorCode::UnsupportedShape, "state on " + describe(s.algebra()) + " is not a distribution");
  }
  std::vector<double> p;
  for (const CMatrix& d : s.densities()) p.push_back(d(0, 0).real());
  return p;
}

std::vector<double> classical_chain_marginals(const std::vector<ClassicalRandomMap>& maps,
                                              const std::vector<double>& sigma, std::size_t n) {
  if (n > maps.size()) {
    throw Error(ErrorCode::OutOfRange, "step " + std::to_string(n) + " exceeds the " +
                                           std::to_string(maps.size()) + " given maps");
  }
  Eigen::RowVectorXd p = Eigen::Map<const Eigen::RowVectorXd>(sigma.data(), static_cast<Eigen::Index>(sigma.size()));
  for (std::size_t i = 0; i < n; ++i) {
    Kernel k = kernel_of_random_map(maps[i]);
    if (k.rows() != static_cast<std::size_t>(p.size())) {
      throw Error(ErrorCode::Dimension, "map " + std::to_string(i + 1) + " expects " + std::to_string(k.rows()) +
                                            " states, distribution has " + std::to_string(p.size()));
    }
    p = (p * k.matrix()).eval();
  }
  return std::vector<double>(p.data(), p.data() + p.size());
}

ChainSpec lift_chain(const std::vector<ClassicalRandomMap>& maps, const std::vector<double>& sigma,
                     std::size_t depth, std::size_t dim_cap) {
  if (maps.empty()) throw Error(ErrorCode::InvalidSpec, "a chain needs at least one map");
  std::vector<RandomQuantumMap> steps;
  for (const ClassicalRandomMap& m : maps) {
    if (m.x.size != m.y.size) {
      throw Error(ErrorCode::Dimension, "chain maps must send X × Z back into X");
    }
    steps.push_back(lift_random_map(m));
  }
  State s = distribution_state(sigma);
  Algebra a = steps.front().target();
  return ChainSpec{a, std::move(steps), maps.size() == 1, std::move(s), depth, dim_cap};
}

std::vector<double> stationary_distribution(const Kernel& k) {
  if (k.rows() != k.cols()) throw Error(ErrorCode::Dimension, "stationary distribution needs a square kernel");
  const auto n = static_cast<Eigen::Index>(k.rows());
  Eigen::MatrixXd system(n + 1, n);
  system.topRows(n) = k.matrix().transpose() - Eigen::MatrixXd::Identity(n, n);
  system.row(n).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;
  Eigen::VectorXd pi = system.colPivHouseholderQr().solve(rhs);
  return std::vector<double>(pi.data(), pi.data() + pi.size());
}

ClassicalRandomMap implement_kernel(const Kernel& k) {
  constexpr double kMerge = 1e-12;
  std::vector<double> cuts{0.0, 1.0};
  for (std::size_t x = 0; x < k.rows(); ++x) {
    double c = 0.0;
    for (std::size_t y = 0; y + 1 < k.cols(); ++y) {
      c += k(x, y);
      cuts.push_back(std::clamp(c, 0.0, 1.0));
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return b - a <= kMerge; }), cuts.end());
  if (1.0 - cuts.back() > kMerge) cuts.push_back(1.0);
  cuts.back() = 1.0;

  ClassicalRandomMap m;
  m.x = make_space(k.rows());
  m.y = make_space(k.cols());
  m.z = make_space(cuts.size() - 1);
  m.table.assign(k.rows(), std::vector<std::size_t>(m.z.size));
  for (std::size_t z = 0; z + 1 < cuts.size(); ++z) m.nu.push_back(cuts[z + 1] - cuts[z]);
  for (std::size_t x = 0; x < k.rows(); ++x) {
    for (std::size_t z = 0; z < m.z.size; ++z) {
      const double mid = 0.5 * (cuts[z] + cuts[z + 1]);
      double c = 0.0;
      std::size_t y = 0;
      while (y + 1 < k.cols() && mid >= c + k(x, y)) c += k(x, y++);
      m.table[x][z] = y;
    }
  }
  return m;
}

}  // namespace rqm
