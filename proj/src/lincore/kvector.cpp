#include "mlid/lincore/kvector.hpp"

#include <array>

namespace mlid::lincore {
namespace {

constexpr int kTable = 33;

constexpr std::array<std::array<std::uint64_t, kTable>, kTable> make_binomials() {
  std::array<std::array<std::uint64_t, kTable>, kTable> t{};
  for (int n = 0; n < kTable; ++n) {
    t[n][0] = 1;
    for (int k = 1; k <= n; ++k) t[n][k] = t[n - 1][k - 1] + (k <= n - 1 ? t[n - 1][k] : 0);
  }
  return t;
}

constexpr auto kBinomials = make_binomials();

}  // namespace

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  return kBinomials[n][k];
}

std::size_t colex_rank(SubsetMask subset) {
  std::size_t rank = 0;
  int position = 0;
  while (subset) {
    const int element = std::countr_zero(subset);
    ++position;
    rank += binomial(element, position);
    subset &= subset - 1;
  }
  return rank;
}

SubsetMask colex_unrank(std::size_t rank, int grade) {
  SubsetMask out = 0;
  for (int position = grade; position >= 1; --position) {
    int element = position - 1;
    while (binomial(element + 1, position) <= rank) ++element;
    rank -= binomial(element, position);
    out |= SubsetMask{1} << element;
  }
  return out;
}

int merge_sign(SubsetMask a, SubsetMask b) {
  int inversions = 0;
  while (a) {
    const int element = std::countr_zero(a);
    const SubsetMask below = element == 0 ? 0 : ((SubsetMask{1} << element) - 1);
    inversions += std::popcount(b & below);
    a &= a - 1;
  }
  return (inversions & 1) ? -1 : 1;
}

}  // namespace mlid::lincore
