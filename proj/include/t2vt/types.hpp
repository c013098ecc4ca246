#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace t2vt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

//! Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

inline void require(bool condition, const std::string& message)
{
  if (!condition)
    throw ContractViolation(message);
}

//! Derives an independent generator from a base seed and a stream tag.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t sub = 0)
{
  std::seed_seq seq{ static_cast<std::uint32_t>(seed),
                     static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(stream),
                     static_cast<std::uint32_t>(stream >> 32),
                     static_cast<std::uint32_t>(sub) };
  return Rng(seq);
}

} // namespace t2vt
