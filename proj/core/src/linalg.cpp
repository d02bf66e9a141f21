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

#include "bosonkey/linalg.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>

#include "bosonkey/errors.hpp"
#include "bosonkey/rng.hpp"

namespace bosonkey {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows * cols) {
        throw DomainError("ComplexMatrix: expected " + std::to_string(rows * cols) +
                          " entries, got " + std::to_string(data_.size()));
    }
    for (const auto& z : data_) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw DomainError("ComplexMatrix: entries must be finite");
        }
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        out(i, i) = 1.0;
    }
    return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            out(j, i) = std::conj((*this)(i, j));
        }
    }
    return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            out(j, i) = (*this)(i, j);
        }
    }
    return out;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) {
        throw DomainError("ComplexMatrix: shape mismatch in product");
    }
    ComplexMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const Complex aik = a(i, k);
            for (std::size_t j = 0; j < b.cols_; ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DomainError("max_abs_diff: shape mismatch");
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < a.entries().size(); ++k) {
        worst = std::max(worst, std::abs(a.entries()[k] - b.entries()[k]));
    }
    return worst;
}

double unitarity_defect(const ComplexMatrix& a) {
    if (!a.is_square()) {
        throw DomainError("unitarity_defect: matrix is not square");
    }
    return max_abs_diff(a * a.adjoint(), ComplexMatrix::identity(a.rows()));
}

ModeUnitary::ModeUnitary(ComplexMatrix matrix, std::optional<std::uint64_t> source_seed)
    : matrix_(std::move(matrix)), source_seed_(source_seed) {
    if (!matrix_.is_square() || matrix_.rows() == 0) {
        throw DomainError("ModeUnitary: matrix must be square and non-empty");
    }
    const double defect = unitarity_defect(matrix_);
    if (!(defect <= kUnitarityTolerance)) {
        std::ostringstream msg;
        msg << "ModeUnitary: |U U^dagger - I|_max = " << defect << " exceeds "
            << kUnitarityTolerance;
        throw DomainError(msg.str());
    }
}

ModeUnitary haar_unitary(int m, std::uint64_t rng_seed) {
    if (m < 1) {
        throw DomainError("haar_unitary: m must be >= 1");
    }
    const auto n = static_cast<Eigen::Index>(m);
    Rng rng(rng_seed);
    Eigen::MatrixXcd ginibre(n, n);
    const double scale = 1.0 / std::sqrt(2.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double re = rng.normal();
            const double im = rng.normal();
            ginibre(i, j) = Complex(re * scale, im * scale);
        }
    }

    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ginibre);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
    const Eigen::MatrixXcd& packed = qr.matrixQR();
    for (Eigen::Index j = 0; j < n; ++j) {
        const Complex diag = packed(j, j);
        const double mag = std::abs(diag);
        // Q diag(r_jj/|r_jj|) is Haar; QR alone is not
        const Complex phase = mag > 0.0 ? diag / mag : Complex(1.0, 0.0);
        q.col(j) *= phase;
    }

    std::vector<Complex> entries(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            entries[static_cast<std::size_t>(i * n + j)] = q(i, j);
        }
    }
    return ModeUnitary(ComplexMatrix(static_cast<std::size_t>(m), static_cast<std::size_t>(m),
                                     std::move(entries)),
                       rng_seed);
}

namespace {

// Neumaier-compensated complex accumulator.
struct CompensatedSum {
    double re = 0.0, im = 0.0, re_c = 0.0, im_c = 0.0;

    static void add(double& sum, double& comp, double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }

    void operator+=(Complex z) {
        add(re, re_c, z.real());
        add(im, im_c, z.imag());
    }

    Complex value() const { return {re + re_c, im + im_c}; }
};

template <typename Accumulator>
Complex ryser_gray(const ComplexMatrix& a) {
    const std::size_t n = a.rows();
    std::vector<Complex> row_sums(n, Complex(0.0, 0.0));
    Accumulator total{};
    double sign = 1.0;
    std::uint64_t gray = 0;
    const std::uint64_t steps = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < steps; ++k) {
        const auto col = static_cast<std::size_t>(std::countr_zero(k));
        const std::uint64_t bit = std::uint64_t{1} << col;
        gray ^= bit;
        if (gray & bit) {
            for (std::size_t i = 0; i < n; ++i) {
                row_sums[i] += a(i, col);
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                row_sums[i] -= a(i, col);
            }
        }
        sign = -sign;

        Complex prod = row_sums[0];
        for (std::size_t i = 1; i < n; ++i) {
            prod *= row_sums[i];
        }
        total += sign * prod;
    }
    Complex result;
    if constexpr (std::is_same_v<Accumulator, Complex>) {
        result = total;
    } else {
        result = total.value();
    }
    return (n % 2 == 0) ? result : -result;
}

void naive_recurse(const ComplexMatrix& a, std::size_t row, std::uint32_t used, Complex partial,
                   Complex& total) {
    const std::size_t n = a.rows();
    if (row == n) {
        total += partial;
        return;
    }
    for (std::size_t col = 0; col < n; ++col) {
        if (!(used & (1u << col))) {
            naive_recurse(a, row + 1, used | (1u << col), partial * a(row, col), total);
        }
    }
}

} // namespace

Complex permanent(const ComplexMatrix& a, PermanentMethod method) {
    if (!a.is_square()) {
        throw DomainError("permanent: matrix must be square");
    }
    const std::size_t n = a.rows();
    if (n == 0) {
        return {1.0, 0.0};
    }
    if (method == PermanentMethod::naive) {
        if (n > kMaxNaiveSize) {
            throw ResourceError("permanent: naive method is capped at n = " +
                                std::to_string(kMaxNaiveSize));
        }
        Complex total(0.0, 0.0);
        naive_recurse(a, 0, 0u, Complex(1.0, 0.0), total);
        return total;
    }
    if (n > kMaxRyserSize) {
        throw ResourceError("permanent: Ryser method is capped at n = " +
                            std::to_string(kMaxRyserSize));
    }
    if (n == 1) {
        return a(0, 0);
    }
    if (n >= kCompensatedRyserSize) {
        return ryser_gray<CompensatedSum>(a);
    }
    return ryser_gray<Complex>(a);
}

ComplexMatrix submatrix_for(const ModeUnitary& u, const BosonConfig& s, const BosonConfig& r) {
    if (s.modes() != u.modes() || r.modes() != u.modes()) {
        throw DomainError("submatrix_for: configurations must have " +
                          std::to_string(u.modes()) + " modes");
    }
    if (s.photons() != r.photons()) {
        throw DomainError("submatrix_for: input and output photon numbers differ");
    }
    const auto cols = s.photon_modes();
    const auto rows = r.photon_modes();
    const std::size_t n = cols.size();
    ComplexMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out(i, j) = u(static_cast<std::size_t>(rows[i]), static_cast<std::size_t>(cols[j]));
        }
    }
    return out;
}

nlohmann::json unitary_to_json(const ModeUnitary& u) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& z : u.matrix().entries()) {
        entries.push_back({z.real(), z.imag()});
    }
    nlohmann::json j;
    j["m"] = u.modes();
    j["seed"] = u.source_seed() ? nlohmann::json(*u.source_seed()) : nlohmann::json(nullptr);
    j["entries"] = std::move(entries);
    return j;
}

ModeUnitary unitary_from_json(const nlohmann::json& j) {
    try {
        const int m = j.at("m").get<int>();
        if (m < 1) {
            throw DomainError("unitary json: m must be >= 1");
        }
        std::optional<std::uint64_t> seed;
        if (j.contains("seed") && !j.at("seed").is_null()) {
            seed = j.at("seed").get<std::uint64_t>();
        }
        const auto& raw = j.at("entries");
        const auto n = static_cast<std::size_t>(m);
        if (!raw.is_array() || raw.size() != n * n) {
            throw DomainError("unitary json: expected " + std::to_string(n * n) + " entries");
        }
        std::vector<Complex> entries;
        entries.reserve(n * n);
        for (const auto& z : raw) {
            if (!z.is_array() || z.size() != 2) {
                throw DomainError("unitary json: each entry must be [re, im]");
            }
            entries.emplace_back(z[0].get<double>(), z[1].get<double>());
        }
        return ModeUnitary(ComplexMatrix(n, n, std::move(entries)), seed);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("unitary json: ") + e.what());
    }
}

void save_unitary(const ModeUnitary& u, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    out << unitary_to_json(u).dump() << '\n';
    if (!out) {
        throw Error("failed writing '" + path + "'");
    }
}

ModeUnitary load_unitary(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open '" + path + "' for reading");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError("'" + path + "': " + e.what());
    }
    return unitary_from_json(j);
}

} // namespace bosonkey
