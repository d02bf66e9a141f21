/*
 * Copyright 2026 The bosonkey Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BOSONKEY_LINALG_HPP
#define BOSONKEY_LINALG_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bosonkey/combinatorics.hpp"

namespace bosonkey {

using Complex = std::complex<double>;

/// Dense row-major complex matrix.
class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    /// Throws DomainError if entries.size() != rows*cols or any entry is non-finite.
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

    static ComplexMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const Complex> entries() const { return data_; }
    std::span<const Complex> row(std::size_t i) const {
        return std::span<const Complex>(data_).subspan(i * cols_, cols_);
    }

    ComplexMatrix adjoint() const;
    ComplexMatrix transpose() const;

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

/// max_ij |a_ij - b_ij|; shapes must agree.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// max_ij |(A A^dagger - I)_ij|.
double unitarity_defect(const ComplexMatrix& a);

inline constexpr double kUnitarityTolerance = 1e-10;

/// An M x M unitary acting on the optical modes.
class ModeUnitary {
  public:
    /// Throws DomainError unless the matrix is square and unitary to kUnitarityTolerance.
    explicit ModeUnitary(ComplexMatrix matrix, std::optional<std::uint64_t> source_seed = {});

    const ComplexMatrix& matrix() const { return matrix_; }
    int modes() const { return static_cast<int>(matrix_.rows()); }
    const std::optional<std::uint64_t>& source_seed() const { return source_seed_; }

    const Complex& operator()(std::size_t i, std::size_t j) const { return matrix_(i, j); }

  private:
    ComplexMatrix matrix_;
    std::optional<std::uint64_t> source_seed_;
};

/// Haar-random m x m unitary: complex Ginibre draw, Householder QR, then each
/// column of Q is multiplied by the phase of the matching diagonal entry of R.
ModeUnitary haar_unitary(int m, std::uint64_t rng_seed);

enum class PermanentMethod { ryser, naive };

inline constexpr std::size_t kMaxRyserSize = 25;
inline constexpr std::size_t kMaxNaiveSize = 9;
/// Ryser switches to compensated accumulation from this size upward.
inline constexpr std::size_t kCompensatedRyserSize = 16;

/// Per(A) = sum over permutations sigma of prod_i a_{i, sigma(i)}.
Complex permanent(const ComplexMatrix& a, PermanentMethod method = PermanentMethod::ryser);

/// N x N matrix whose row i is output photon i's mode (from r) and whose
/// column j is input photon j's mode (from s): entry U[r_mode_i][s_mode_j].
ComplexMatrix submatrix_for(const ModeUnitary& u, const BosonConfig& s, const BosonConfig& r);

/// {"m": int, "seed": int|null, "entries": [[re, im], ...]} row-major.
nlohmann::json unitary_to_json(const ModeUnitary& u);
ModeUnitary unitary_from_json(const nlohmann::json& j);

void save_unitary(const ModeUnitary& u, const std::string& path);
ModeUnitary load_unitary(const std::string& path);

} // namespace bosonkey

#endif
