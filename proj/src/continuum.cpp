#include "branchlab/fragmentation.hpp"
#include "branchlab/samplers.hpp"
#include "branchlab/splitlaws.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace branchlab {

EdgeTree approx_continuum_tree(const PropexempleLaw& q, int n, Rng& rng) {
  if (n < q.n0())
    throw std::invalid_argument("approx_continuum_tree: n = " + std::to_string(n) + " is below n0 = " + std::to_string(q.n0()));
  if (n > q.max_n()) throw std::out_of_range("approx_continuum_tree: n exceeds the law's tables");
  return EdgeTree::uniform(sample_P(q, n, rng), std::pow(static_cast<double>(n), -q.gamma()));
}

EdgeTree approx_continuum_tree(const DislocationMeasure& nu, double gamma, int n, Rng& rng) {
  if (!(gamma > 0.0)) throw std::invalid_argument("approx_continuum_tree: gamma must be positive");
  if (n < 1) throw std::invalid_argument("approx_continuum_tree: n must be positive");
  const auto q = propexemple_law(nu, gamma, std::max(n, 2));
  return approx_continuum_tree(*q, n, rng);
}

}  // namespace branchlab
