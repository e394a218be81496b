#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "quidd/linalg.hpp"

namespace quidd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitResource = 3;

struct Amplitude {
  std::string bits;  // qubit 0 first
  std::complex<double> value;
  double probability = 0;
};

/// The k largest nonzero amplitudes by magnitude, ties in basis order.
/// Enumerates diagram paths only, so it works for any width.
std::vector<Amplitude> top_amplitudes(const QuiddVector& v, std::size_t k);

/// Fixed cost per node plus the storage of `terminals` values at `mantissa_bits`.
std::size_t approx_bytes(std::size_t nodes, std::size_t terminals, unsigned mantissa_bits);

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            std::istream& in);

}  // namespace quidd::cli
