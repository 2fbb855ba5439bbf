#pragma once

#include <cstdint>
#include <random>

#include "types.hpp"

namespace dsmkit {

/// Seeded source of Gaussian complex data. Uses std::mt19937_64, whose output
/// sequence is fixed by the standard; std::normal_distribution is not, so
/// streams are reproducible per standard library, not across them.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double normal() { return nd_(eng_); }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng_); }
  bool coin() { return std::bernoulli_distribution(0.5)(eng_); }
  cplx cnormal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }

  cmat cmatrix(Index rows, Index cols) {
    cmat A(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) A(i, j) = cnormal();
    return A;
  }
  cvec cvector(Index n) { return cmatrix(n, 1).col(0); }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> nd_{0.0, 1.0};
};

}  // namespace dsmkit
