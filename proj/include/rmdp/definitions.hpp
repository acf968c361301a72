// This file is part of rmdp, a C++ library for studying static and dynamic
// formulations of finite-horizon robust Markov decision processes.
//
// MIT License
//
// Permission is hereby granted, free of charge, to any person obtaining a copy
// of this software and associated documentation files (the "Software"), to deal
// in the Software without restriction, including without limitation the rights
// to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
// copies of the Software, and to permit persons to whom the Software is
// furnished to do so, subject to the following conditions:
//
// The above copyright notice and this permission notice shall be included in
// all copies or substantial portions of the Software.
//
// THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
// IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
// FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
// AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
// LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
// OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
// SOFTWARE.


#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmdp {

/// Default precision used throughout the library
using prec_t = double;

/// Dense vector of values (probabilities, costs, values)
using numvec = std::vector<prec_t>;

/// Vector of indices
using indvec = std::vector<std::size_t>;

/// Row-stochasticity and policy normalization tolerance
constexpr prec_t SIMPLEX_TOLERANCE = 1e-12;

/// Thrown when a model, kernel, or policy is malformed or dimensions disagree
class ModelError : public std::invalid_argument {
public:
    explicit ModelError(const std::string& message) : std::invalid_argument(message) {}
};

/// Thrown when an enumeration would exceed its configured size guard
class SizeGuardError : public std::length_error {
public:
    explicit SizeGuardError(const std::string& message) : std::length_error(message) {}
};

/// Thrown when an operation precondition on the data (not its shape) fails
class PreconditionError : public std::domain_error {
public:
    explicit PreconditionError(const std::string& message)
        : std::domain_error(message) {}
};

/// Thrown when a numerical routine cannot reach its accuracy contract
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& message) : std::runtime_error(message) {}
};

namespace detail {

/// Multiplies two counts, saturating at the maximum of std::uint64_t.
inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
        return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

} // namespace detail
} // namespace rmdp
