#include "rqm/linear_map.hpp"

#include <sstream>

#include "rqm/tensor_legs.hpp"

namespace rqm {

const char* to_string(MapKind kind) {
  switch (kind) {
    case MapKind::Raw: return "raw";
    case MapKind::Morphism: return "morphism";
    case MapKind::CpUnital: return "cp_unital";
  }
  return "unknown";
}

LinearMap::LinearMap(Algebra domain, Algebra codomain, CMatrix matrix, MapKind kind)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), matrix_(std::move(matrix)), kind_(kind) {
  if (static_cast<std::size_t>(matrix_.rows()) != codomain_.dim() ||
      static_cast<std::size_t>(matrix_.cols()) != domain_.dim())
    throw Error(ErrorCode::Dimension, "map matrix must be " + std::to_string(codomain_.dim()) + "x" +
                                          std::to_string(domain_.dim()));
}

LinearMap::LinearMap(Algebra domain, Algebra codomain, CMatrix matrix)
    : LinearMap(std::move(domain), std::move(codomain), std::move(matrix), MapKind::Raw) {}

LinearMap LinearMap::trusted(Algebra domain, Algebra codomain, CMatrix matrix, MapKind kind) {
  return LinearMap(std::move(domain), std::move(codomain), std::move(matrix), kind);
}

LinearMap LinearMap::from_images(const Algebra& domain, const Algebra& codomain,
                                 const std::vector<Element>& basis_images) {
  if (basis_images.size() != domain.dim())
    throw Error(ErrorCode::Dimension, "need " + std::to_string(domain.dim()) + " basis images, got " +
                                          std::to_string(basis_images.size()));
  CMatrix m(codomain.dim(), domain.dim());
  for (std::size_t k = 0; k < basis_images.size(); ++k) {
    if (basis_images[k].algebra() != codomain)
      throw Error(ErrorCode::Dimension, "basis image " + std::to_string(k) + " is not in " + describe(codomain));
    m.col(k) = basis_images[k].flatten();
  }
  return LinearMap(domain, codomain, std::move(m));
}

LinearMap LinearMap::identity(const Algebra& a) {
  return LinearMap(a, a, CMatrix::Identity(a.dim(), a.dim()), MapKind::Morphism);
}

Element LinearMap::apply(const Element& x) const {
  if (x.algebra() != domain_) throw Error(ErrorCode::Dimension, "element is not in the map's domain");
  return Element::from_flat(codomain_, matrix_ * x.flatten());
}

Element LinearMap::image(std::size_t basis_index) const {
  return Element::from_flat(codomain_, matrix_.col(static_cast<Eigen::Index>(basis_index)));
}

double basis_distance(const LinearMap& f, const LinearMap& g) {
  if (f.domain() != g.domain() || f.codomain() != g.codomain())
    throw Error(ErrorCode::Dimension, "maps have different shapes");
  return (f.matrix() - g.matrix()).colwise().norm().maxCoeff();
}

// ---------------------------------------------------------------------------

namespace {

std::string unit_name(const Algebra& a, std::size_t k) {
  BasisIndex b = a.locate(k);
  std::ostringstream os;
  os << "e[" << b.block << "](" << b.row << ',' << b.col << ')';
  return os.str();
}

struct DefectScan {
  MorphismDefects defects;
  std::string first_multiplicative;
  std::string first_star;
};

DefectScan scan_morphism(const LinearMap& f, double eps) {
  const Algebra& d = f.domain();
  std::vector<Element> img;
  img.reserve(d.dim());
  for (std::size_t k = 0; k < d.dim(); ++k) img.push_back(f.image(k));

  DefectScan scan;
  for (std::size_t k = 0; k < d.dim(); ++k) {
    BasisIndex bk = d.locate(k);
    for (std::size_t l = 0; l < d.dim(); ++l) {
      BasisIndex bl = d.locate(l);
      Element lhs = img[k] * img[l];
      double r;
      if (bk.block == bl.block && bk.col == bl.row)
        r = (lhs - img[d.index(bk.block, bk.row, bl.col)]).norm();
      else
        r = lhs.norm();
      if (r > scan.defects.multiplicative) {
        scan.defects.multiplicative = r;
        if (r > eps && scan.first_multiplicative.empty())
          scan.first_multiplicative = unit_name(d, k) + "*" + unit_name(d, l);
      }
    }
    double s = (img[k].adjoint() - img[d.index(bk.block, bk.col, bk.row)]).norm();
    if (s > scan.defects.star) {
      scan.defects.star = s;
      if (s > eps && scan.first_star.empty()) scan.first_star = unit_name(d, k);
    }
  }
  scan.defects.unital = (f.apply(Element::unit(d)) - Element::unit(f.codomain())).norm();
  return scan;
}

}  // namespace

MorphismDefects morphism_defects(const LinearMap& f) { return scan_morphism(f, 0.0).defects; }

LinearMap make_morphism(const LinearMap& f, double eps) {
  DefectScan scan = scan_morphism(f, eps);
  if (scan.defects.multiplicative > eps)
    throw Error(ErrorCode::NotAMorphism,
                "not a morphism: multiplicativity fails at " + scan.first_multiplicative + " (residual " +
                    std::to_string(scan.defects.multiplicative) + ")",
                "morphism.multiplicative");
  if (scan.defects.star > eps)
    throw Error(ErrorCode::NotAMorphism,
                "not a morphism: star preservation fails at " + scan.first_star + " (residual " +
                    std::to_string(scan.defects.star) + ")",
                "morphism.star");
  if (scan.defects.unital > eps)
    throw Error(ErrorCode::NotAMorphism,
                "not a morphism: unitality fails (residual " + std::to_string(scan.defects.unital) + ")",
                "morphism.unital");
  return LinearMap::trusted(f.domain(), f.codomain(), f.matrix(), MapKind::Morphism);
}

LinearMap make_morphism(const Algebra& domain, const Algebra& codomain,
                        const std::vector<Element>& basis_images, double eps) {
  return make_morphism(LinearMap::from_images(domain, codomain, basis_images), eps);
}

// ---------------------------------------------------------------------------

std::vector<ChoiBlock> choi_blocks(const LinearMap& f) {
  const Algebra& dom = f.domain();
  const Algebra& cod = f.codomain();
  std::vector<ChoiBlock> out;
  for (std::size_t i = 0; i < cod.num_blocks(); ++i) {
    auto n = static_cast<Eigen::Index>(cod.block_size(i));
    for (std::size_t j = 0; j < dom.num_blocks(); ++j) {
      auto m = static_cast<Eigen::Index>(dom.block_size(j));
      CMatrix c = CMatrix::Zero(n * m, n * m);
      for (Eigen::Index p = 0; p < m; ++p)
        for (Eigen::Index q = 0; q < m; ++q) {
          auto col = f.matrix().col(static_cast<Eigen::Index>(dom.index(j, p, q)));
          // block i of F(e_pq), placed as F(e_pq) ⊗ e_pq
          for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index s = 0; s < n; ++s) c(r * m + p, s * m + q) = col(cod.offset(i) + r * n + s);
        }
      out.push_back({i, j, std::move(c)});
    }
  }
  return out;
}

CpDiagnostics cp_diagnostics(const LinearMap& f) {
  CpDiagnostics diag;
  diag.min_choi_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& blk : choi_blocks(f)) {
    diag.hermitian_defect = std::max(diag.hermitian_defect, (blk.matrix - blk.matrix.adjoint()).norm());
    CMatrix h = 0.5 * (blk.matrix + blk.matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues().minCoeff();
    if (lo < diag.min_choi_eigenvalue) {
      diag.min_choi_eigenvalue = lo;
      diag.worst_codomain_block = blk.codomain_block;
      diag.worst_domain_block = blk.domain_block;
    }
  }
  diag.unital_defect = (f.apply(Element::unit(f.domain())) - Element::unit(f.codomain())).norm();
  return diag;
}

LinearMap validate_cp_unital(const LinearMap& f, double eps) {
  CpDiagnostics d = cp_diagnostics(f);
  if (d.hermitian_defect > eps || d.min_choi_eigenvalue < -eps)
    throw Error(ErrorCode::NotCompletelyPositive,
                "Choi block (" + std::to_string(d.worst_codomain_block) + "," +
                    std::to_string(d.worst_domain_block) + ") has eigenvalue " +
                    std::to_string(d.min_choi_eigenvalue),
                "cp.choi_positive");
  if (d.unital_defect > eps)
    throw Error(ErrorCode::NotUnital, "F(1) != 1 (residual " + std::to_string(d.unital_defect) + ")",
                "cp.unital");
  MapKind kind = f.kind() == MapKind::Morphism ? MapKind::Morphism : MapKind::CpUnital;
  return LinearMap::trusted(f.domain(), f.codomain(), f.matrix(), kind);
}

// ---------------------------------------------------------------------------

namespace {

MapKind combine(MapKind a, MapKind b) {
  if (a == MapKind::Raw || b == MapKind::Raw) return MapKind::Raw;
  if (a == MapKind::Morphism && b == MapKind::Morphism) return MapKind::Morphism;
  return MapKind::CpUnital;
}

}  // namespace

LinearMap compose(const LinearMap& outer, const LinearMap& inner) {
  if (inner.codomain() != outer.domain())
    throw Error(ErrorCode::Dimension, "cannot compose: codomain " + describe(inner.codomain()) +
                                          " != domain " + describe(outer.domain()));
  return LinearMap::trusted(inner.domain(), outer.codomain(), outer.matrix() * inner.matrix(),
                            combine(outer.kind(), inner.kind()));
}

LinearMap direct_sum(const LinearMap& f, const LinearMap& g) {
  Algebra dom = direct_sum_algebra(f.domain(), g.domain());
  Algebra cod = direct_sum_algebra(f.codomain(), g.codomain());
  CMatrix m = CMatrix::Zero(cod.dim(), dom.dim());
  m.topLeftCorner(f.matrix().rows(), f.matrix().cols()) = f.matrix();
  m.bottomRightCorner(g.matrix().rows(), g.matrix().cols()) = g.matrix();
  return LinearMap::trusted(dom, cod, std::move(m), combine(f.kind(), g.kind()));
}

LinearMap tensor(const LinearMap& f, const LinearMap& g) {
  TensorLegs dom({f.domain(), g.domain()});
  TensorLegs cod({f.codomain(), g.codomain()});
  CMatrix m = CMatrix::Zero(cod.product().dim(), dom.product().dim());
  const auto& mf = f.matrix();
  const auto& mg = g.matrix();
  for (std::size_t col = 0; col < dom.product().dim(); ++col) {
    auto ij = dom.split(col);
    auto fi = mf.col(static_cast<Eigen::Index>(ij[0]));
    auto gj = mg.col(static_cast<Eigen::Index>(ij[1]));
    for (Eigen::Index a = 0; a < fi.size(); ++a) {
      if (fi(a) == Complex(0.0)) continue;
      for (Eigen::Index b = 0; b < gj.size(); ++b) {
        if (gj(b) == Complex(0.0)) continue;
        m(cod.flat({static_cast<std::size_t>(a), static_cast<std::size_t>(b)}), col) = fi(a) * gj(b);
      }
    }
  }
  return LinearMap::trusted(dom.product(), cod.product(), std::move(m), combine(f.kind(), g.kind()));
}

LinearMap permute_legs(const std::vector<Algebra>& legs, const std::vector<std::size_t>& order) {
  auto perm = leg_permutation(legs, order);
  std::vector<Algebra> reordered;
  for (std::size_t t : order) reordered.push_back(legs[t]);
  TensorLegs source(legs), target(reordered);
  CMatrix m = CMatrix::Zero(target.product().dim(), source.product().dim());
  for (std::size_t f = 0; f < perm.size(); ++f) m(perm[f], f) = 1.0;
  return LinearMap::trusted(source.product(), target.product(), std::move(m), MapKind::Morphism);
}

LinearMap slice_right(const Algebra& a, const Algebra& c, const CVector& w) {
  if (static_cast<std::size_t>(w.size()) != c.dim())
    throw Error(ErrorCode::Dimension, "functional does not match the sliced leg");
  TensorLegs legs({a, c});
  CMatrix m = CMatrix::Zero(a.dim(), legs.product().dim());
  for (std::size_t f = 0; f < legs.product().dim(); ++f) {
    auto ac = legs.split(f);
    m(ac[0], f) = w(ac[1]);
  }
  return LinearMap(legs.product(), a, std::move(m));
}

LinearMap slice_right(const Algebra& a, const State& nu) {
  LinearMap raw = slice_right(a, nu.algebra(), nu.functional());
  return LinearMap::trusted(raw.domain(), raw.codomain(), raw.matrix(), MapKind::CpUnital);
}

// ---------------------------------------------------------------------------

Transition::Transition(Algebra source, Algebra target, CMatrix dual)
    : source_(std::move(source)), target_(std::move(target)), dual_(std::move(dual)) {
  if (static_cast<std::size_t>(dual_.rows()) != target_.dim() ||
      static_cast<std::size_t>(dual_.cols()) != source_.dim())
    throw Error(ErrorCode::Dimension, "transition matrix has the wrong shape");
}

CVector Transition::apply_functional(const CVector& w) const {
  if (static_cast<std::size_t>(w.size()) != source_.dim())
    throw Error(ErrorCode::Dimension, "functional is not on the transition's source algebra");
  return dual_ * w;
}

std::vector<CMatrix> Transition::apply_densities(const std::vector<CMatrix>& densities) const {
  return functional_to_densities(target_, apply_functional(densities_to_functional(source_, densities)));
}

State Transition::apply(const State& rho, double eps) const {
  if (rho.algebra() != source_) throw Error(ErrorCode::Dimension, "state is not on the transition's source algebra");
  return State(target_, apply_densities(rho.densities()), eps);
}

Transition adjoint_transition(const LinearMap& f) {
  if (!f.is_cp_unital())
    throw Error(ErrorCode::NotCompletelyPositive, "adjoint transition needs a validated unital CP map");
  // (rho ∘ F)(e_k) = sum_a w_a M(a, k)
  return Transition(f.codomain(), f.domain(), f.matrix().transpose());
}

}  // namespace rqm
