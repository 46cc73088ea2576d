#include "rqm/chain.hpp"

#include <algorithm>
#include <sstream>

#include "rqm/random.hpp"

namespace rqm {

TruncatedChain build_chain(const ChainSpec& spec) {
  const Algebra& a = spec.a;
  if (spec.depth < 1) throw Error(ErrorCode::InvalidSpec, "chain depth must be at least 1");
  if (spec.sigma.algebra() != a) throw Error(ErrorCode::Dimension, "initial state is not a state of A");
  if (spec.homogeneous ? spec.steps.size() != 1 : spec.steps.size() < spec.depth)
    throw Error(ErrorCode::InvalidSpec, spec.homogeneous ? "a homogeneous chain takes exactly one RQM"
                                                         : "a chain of depth N needs N RQMs");
  std::vector<RandomQuantumMap> steps;
  for (std::size_t n = 0; n < spec.depth; ++n) {
    const auto& r = spec.homogeneous ? spec.steps.front() : spec.steps[n];
    if (r.source() != a || r.target() != a)
      throw Error(ErrorCode::Dimension, "step " + std::to_string(n + 1) + " is not an RQM on " + describe(a));
    steps.push_back(r);
  }

  // dim(A) * prod dim(C_n), checked before anything is allocated
  double required = static_cast<double>(a.dim());
  for (const auto& r : steps) required *= static_cast<double>(r.parameter().dim());
  if (required > static_cast<double>(spec.dim_cap)) {
    std::ostringstream os;
    os << "chain needs " << required << " complex entries per element, cap is " << spec.dim_cap;
    throw Error(ErrorCode::CapExceeded, os.str());
  }

  TruncatedChain chain;
  chain.homogeneous_ = spec.homogeneous;
  chain.steps_ = steps;
  chain.levels_.push_back(a);
  chain.mus_.push_back(spec.sigma);
  chain.psis_.push_back(LinearMap::identity(a));
  QuantumFamily psi = QuantumFamily::trivial(a);
  for (std::size_t n = 1; n <= spec.depth; ++n) {
    const auto& r = steps[n - 1];
    chain.levels_.push_back(tensor_algebra(chain.levels_.back(), r.parameter()));
    chain.mus_.push_back(tensor_state(chain.mus_.back(), r.nu()));
    psi = diamond(psi, r.family());
    chain.psis_.push_back(LinearMap::trusted(a, chain.levels_.back(), psi.phi().matrix(), MapKind::Morphism));
  }
  // tails_[n] = C_{n+1} ⊗ ... ⊗ C_N, assembled from the back
  for (std::size_t n = spec.depth; n-- > 0;) {
    const Algebra& c = steps[n].parameter();
    chain.tails_.push_back(chain.tails_.empty() ? c : tensor_algebra(c, chain.tails_.back()));
  }
  std::reverse(chain.tails_.begin(), chain.tails_.end());
  return chain;
}

Element TruncatedChain::embed(const Element& x, std::size_t n) const {
  if (n > depth()) throw Error(ErrorCode::OutOfRange, "level exceeds chain depth");
  if (x.algebra() != levels_[n]) throw Error(ErrorCode::Dimension, "element is not in B_" + std::to_string(n));
  if (n == depth()) return x;
  Element out = tensor_element(x, Element::unit(tails_[n]));
  return Element(levels_.back(), out.mats());
}

LinearMap conditional_expectation(const TruncatedChain& chain, std::size_t n) {
  if (n + 1 > chain.depth())
    throw Error(ErrorCode::OutOfRange, "conditional expectation E_" + std::to_string(n) + " needs depth >= " +
                                           std::to_string(n + 1));
  LinearMap e = slice_right(chain.level(n), chain.step(n + 1).nu());
  return LinearMap::trusted(chain.level(n + 1), chain.level(n), e.matrix(), MapKind::CpUnital);
}

namespace {

Element normalized(Element x) {
  double nrm = x.norm();
  if (nrm > 0) x *= Complex(1.0 / nrm);
  return x;
}

CheckResult finish(std::string id, double residual, double tol) {
  return {std::move(id), residual, tol, residual <= tol};
}

}  // namespace

MarkovReport verify_markov(const TruncatedChain& chain, std::size_t n, const VerifyOptions& options) {
  LinearMap e = conditional_expectation(chain, n);
  const Algebra& bn = chain.level(n);
  const Algebra& bn1 = chain.level(n + 1);
  const Algebra& c = chain.step(n + 1).parameter();
  const State& mu_n = chain.mu(n);
  const State& mu_n1 = chain.mu(n + 1);
  Rng rng(options.seed);

  auto lift = [&](const Element& b) { return Element(bn1, tensor_element(b, Element::unit(c)).mats()); };
  auto module_defect = [&](const Element& b, const Element& x) {
    Element bb = lift(b);
    return (e.apply(bb * x) - b * e.apply(x)).norm();
  };

  MarkovReport report;
  report.level = n;
  report.random_samples = options.random_samples;

  double module = 0.0;
  if (bn.dim() * bn1.dim() <= options.exhaustive_limit) {
    std::vector<Element> lifted;
    for (std::size_t k = 0; k < bn.dim(); ++k) lifted.push_back(lift(Element::basis(bn, k)));
    for (std::size_t l = 0; l < bn1.dim(); ++l) {
      Element x = Element::basis(bn1, l);
      Element ex = e.apply(x);
      for (std::size_t k = 0; k < bn.dim(); ++k)
        module = std::max(module, (e.apply(lifted[k] * x) - Element::basis(bn, k) * ex).norm());
    }
  }
  for (std::size_t s = 0; s < options.random_samples; ++s)
    module = std::max(module, module_defect(normalized(random_element(bn, rng)), normalized(random_element(bn1, rng))));
  report.module_property = finish("markov.module-property", module, options.tolerance);

  double compat = 0.0;
  for (std::size_t l = 0; l < bn1.dim(); ++l) {
    Element x = Element::basis(bn1, l);
    compat = std::max(compat, std::abs(mu_n.evaluate(e.apply(x)) - mu_n1.evaluate(x)));
  }
  for (std::size_t s = 0; s < options.random_samples; ++s) {
    Element x = normalized(random_element(bn1, rng));
    compat = std::max(compat, std::abs(mu_n.evaluate(e.apply(x)) - mu_n1.evaluate(x)));
  }
  report.state_compatibility = finish("markov.state-compatibility", compat, options.tolerance);

  LinearMap step_nfmo = induced_nfmo(chain.step(n + 1));
  double contain = 0.0;
  for (std::size_t k = 0; k < chain.base().dim(); ++k) {
    Element a = Element::basis(chain.base(), k);
    Element lhs = e.apply(chain.psi(n + 1).apply(a));
    Element rhs = chain.psi(n).apply(step_nfmo.apply(a));
    contain = std::max(contain, (lhs - rhs).norm());
  }
  report.containment = finish("markov.containment", contain, options.tolerance);
  return report;
}

Complex finite_dim_distribution(const TruncatedChain& chain, const std::vector<std::size_t>& times,
                                const std::vector<Element>& elements) {
  if (times.size() != elements.size())
    throw Error(ErrorCode::InvalidSpec, "one time per element is required");
  const std::size_t depth = chain.depth();
  Element word = Element::unit(chain.level(depth));
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] > depth)
      throw Error(ErrorCode::OutOfRange, "time " + std::to_string(times[i]) + " exceeds depth " + std::to_string(depth));
    word = word * chain.embed(chain.psi(times[i]).apply(elements[i]), times[i]);
  }
  return chain.mu(depth).evaluate(word);
}

double StationarityReport::violation(std::size_t r, std::size_t shift) const {
  for (const auto& v : by_length_and_shift)
    if (v.r == r && v.shift == shift) return v.max_violation;
  throw Error(ErrorCode::OutOfRange, "no stationarity data for that word length and shift");
}

namespace {

// Odometer over {0..base-1}^digits.
bool advance(std::vector<std::size_t>& digits, std::size_t base) {
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (++digits[i] < base) return true;
    digits[i] = 0;
  }
  return false;
}

std::string describe_word(const Algebra& a, const std::vector<std::size_t>& times,
                          const std::vector<std::size_t>& basis, std::size_t shift) {
  std::ostringstream os;
  os << "shift " << shift << ", word";
  for (std::size_t i = 0; i < times.size(); ++i) {
    BasisIndex b = a.locate(basis[i]);
    os << " psi_" << times[i] << "(e[" << b.block << "](" << b.row << ',' << b.col << "))";
  }
  return os.str();
}

}  // namespace

StationarityReport check_stationarity(const TruncatedChain& chain, std::size_t r_max, std::size_t l_max,
                                      const StationarityOptions& options) {
  if (!chain.homogeneous()) throw Error(ErrorCode::InvalidSpec, "stationarity is defined for homogeneous chains only");
  const std::size_t depth = chain.depth();
  if (r_max < 1 || l_max < 1) throw Error(ErrorCode::InvalidSpec, "r_max and l_max must be at least 1");
  if (l_max > depth)
    throw Error(ErrorCode::OutOfRange, "insufficient depth: shift " + std::to_string(l_max) + " needs N >= " +
                                           std::to_string(l_max));
  const Algebra& a = chain.base();
  const State& mu = chain.mu(depth);

  // embedded[t][k] = ψ_t(e_k) ⊗ 1 in B_N
  std::vector<std::vector<Element>> embedded(depth + 1);
  for (std::size_t t = 0; t <= depth; ++t)
    for (std::size_t k = 0; k < a.dim(); ++k)
      embedded[t].push_back(chain.embed(chain.psi(t).apply(Element::basis(a, k)), t));

  StationarityReport report;
  report.tolerance = options.tolerance;
  Rng rng(options.seed);

  for (std::size_t r = 1; r <= r_max; ++r) {
    double power = 1.0;
    for (std::size_t i = 0; i < r; ++i) power *= static_cast<double>(a.dim());
    const bool exhaustive = power <= static_cast<double>(options.basis_word_limit);
    if (!exhaustive) report.sampled = true;

    for (std::size_t shift = 1; shift <= l_max; ++shift) {
      ShiftViolation sv{r, shift, 0.0, 0};
      const std::size_t time_count = depth - shift + 1;
      auto record = [&](double v, const std::string& word) {
        ++sv.words;
        sv.max_violation = std::max(sv.max_violation, v);
        if (v > report.max_violation) {
          report.max_violation = v;
          report.worst_word = word;
        }
      };
      if (exhaustive) {
        std::vector<std::size_t> times(r, 0);
        do {
          std::vector<std::size_t> basis(r, 0);
          do {
            Element w0 = embedded[times[0]][basis[0]];
            Element w1 = embedded[times[0] + shift][basis[0]];
            for (std::size_t i = 1; i < r; ++i) {
              w0 = w0 * embedded[times[i]][basis[i]];
              w1 = w1 * embedded[times[i] + shift][basis[i]];
            }
            double v = std::abs(mu.evaluate(w0) - mu.evaluate(w1));
            if (v > sv.max_violation) record(v, describe_word(a, times, basis, shift));
            else ++sv.words;
          } while (advance(basis, a.dim()));
        } while (advance(times, time_count));
      } else {
        std::uniform_int_distribution<std::size_t> pick_time(0, time_count - 1);
        for (std::size_t s = 0; s < options.sampled_words; ++s) {
          std::vector<std::size_t> times(r);
          std::vector<Element> elems;
          for (std::size_t i = 0; i < r; ++i) {
            times[i] = pick_time(rng);
            elems.push_back(normalized(random_element(a, rng)));
          }
          std::vector<std::size_t> shifted = times;
          for (auto& t : shifted) t += shift;
          double v = std::abs(finite_dim_distribution(chain, times, elems) -
                              finite_dim_distribution(chain, shifted, elems));
          record(v, "shift " + std::to_string(shift) + ", sampled word " + std::to_string(s));
        }
      }
      report.by_length_and_shift.push_back(sv);
    }
  }
  report.pass = report.max_violation <= options.tolerance;
  return report;
}

SemiCommutativityReport check_semi_commutative(const TruncatedChain& chain, double tolerance) {
  const std::size_t depth = chain.depth();
  const Algebra& a = chain.base();
  std::vector<std::vector<Element>> embedded(depth + 1);
  for (std::size_t t = 0; t <= depth; ++t)
    for (std::size_t k = 0; k < a.dim(); ++k)
      embedded[t].push_back(chain.embed(chain.psi(t).apply(Element::basis(a, k)), t));

  SemiCommutativityReport report;
  report.tolerance = tolerance;
  for (std::size_t n = 0; n <= depth; ++n)
    for (std::size_t m = n + 1; m <= depth; ++m)
      for (std::size_t k = 0; k < a.dim(); ++k)
        for (std::size_t l = 0; l < a.dim(); ++l) {
          double c = commutator(embedded[n][k], embedded[m][l]).norm();
          if (c > report.max_commutator) {
            report.max_commutator = c;
            BasisIndex bk = a.locate(k), bl = a.locate(l);
            std::ostringstream os;
            os << "[psi_" << n << "(e[" << bk.block << "](" << bk.row << ',' << bk.col << ")), psi_" << m << "(e["
               << bl.block << "](" << bl.row << ',' << bl.col << "))]";
            report.worst_pair = os.str();
          }
        }
  report.sufficient_condition_holds = report.max_commutator <= tolerance;
  return report;
}

}  // namespace rqm
