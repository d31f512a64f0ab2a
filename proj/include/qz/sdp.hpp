// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qz/interval.hpp"
#include "qz/quadratic_form.hpp"

namespace qz::sdp {

/// Symmetric matrix with packed upper-triangular storage.
class SymMatrix {
  public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * (n + 1) / 2, fill) {}

    static SymMatrix identity(std::size_t n);
    /// From a row-major dense matrix; only the upper triangle is read.
    static SymMatrix from_dense(std::size_t n, const std::vector<double>& dense);

    [[nodiscard]] std::size_t order() const noexcept { return n_; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return data_[index(i, j)]; }
    void set(std::size_t i, std::size_t j, double v) noexcept { data_[index(i, j)] = v; }

    /// Packed entries; entry k of two matrices of the same order share (i,j).
    [[nodiscard]] std::vector<double>& packed() noexcept { return data_; }
    [[nodiscard]] const std::vector<double>& packed() const noexcept { return data_; }

    [[nodiscard]] std::vector<double> dense() const;
    [[nodiscard]] double frobenius() const noexcept;
    [[nodiscard]] double max_abs() const noexcept;

    bool operator==(const SymMatrix&) const = default;

  private:
    [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const noexcept {
        if (i > j) {
            std::swap(i, j);
        }
        return i * n_ - i * (i - 1) / 2 + (j - i);
    }

    std::size_t n_ = 0;
    std::vector<double> data_;
};

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator*(double k, const SymMatrix& a);

/// Frobenius inner product sum_ij a_ij b_ij.
double inner(const SymMatrix& a, const SymMatrix& b) noexcept;

class EigenError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Eigen {
    std::vector<double> values;  // ascending
    std::vector<double> vectors; // row-major; column k belongs to values[k]
};

/// Cyclic Jacobi. Stops once the off-diagonal norm is at most 1e-12 of the
/// matrix norm; throws EigenError after 50 sweeps. A start basis, when given,
/// is applied first so that a nearly diagonalizing guess converges quickly.
Eigen jacobi_eigen(const SymMatrix& s, const std::vector<double>* start = nullptr);

SymMatrix recompose(const Eigen& e);
double min_eigenvalue(const SymMatrix& s);
SymMatrix project_psd(const SymMatrix& s);
/// Same, warm-started from `basis` (ignored unless n x n); the eigenvectors
/// of `s` are written back.
SymMatrix project_psd(const SymMatrix& s, std::vector<double>& basis);

enum class Sense { Sup, Inf };

/// sup or inf of tr(M X) over X PSD with lower <= X <= upper entrywise.
/// Rows and columns: plain symbols 0..m-1, then the symmetric, positive and
/// negative error symbols, then the constant.
struct SdpProblem {
    SymMatrix objective;
    SymMatrix lower;
    SymMatrix upper;
    Sense sense = Sense::Sup;
    std::vector<SymbolId> symbols;

    [[nodiscard]] std::size_t plain() const noexcept { return symbols.size(); }
};

/// Box of the lifted noise domain for m plain symbols.
void lifted_box(std::size_t m, SymMatrix& lower, SymMatrix& upper);

/// For Sense::Inf the objective holds -M so that every solve is a sup.
SdpProblem lift(const QuadraticForm& q, Sense sense = Sense::Sup);

struct AdmmParams {
    double rho = 1.0;
    double relaxation = 1.6;
    double tolerance = 1e-7;
    int max_iters = 5000;
};

struct AdmmResult {
    SymMatrix x;
    SymMatrix p;
    SymMatrix n;
    double primal_value = 0.0;
    int iterations = 0;
    bool converged = false;
};

AdmmResult admm_solve(const SdpProblem& problem, const AdmmParams& params = {});

struct Certificate {
    SymMatrix p;
    SymMatrix n;
    SymMatrix slack; // P - N - M
    double shift = 0.0;
    double bound = 0.0;
};

/// Weak-duality bound: repairs P so that P - N - M is PSD, then returns
/// sum P.upper - sum N.lower rounded upward. Requires P, N >= 0.
Certificate certify_upper(const SdpProblem& problem, SymMatrix p, SymMatrix n);

struct SdpOptions {
    AdmmParams admm;
    /// Forms with more plain symbols fall back to the closed-form bounds.
    std::size_t max_symbols = 60;
};

struct GammaReport {
    Interval range;
    Interval mt;
    bool solved = false; // false when the SDP was skipped or failed
    bool converged = false;
    int iterations = 0;
};

GammaReport gamma_sdp_report(const QuadraticForm& q, const SdpOptions& options = {});
Interval gamma_sdp(const QuadraticForm& q, const SdpOptions& options = {});

/// Inner approximation of the exact range from sampled noise values. For
/// m <= 3 a dense grid with `resolution` points per symbol, reduced so that
/// the grid has at most 2e6 points; otherwise the vertices (m <= 16) plus 1e5
/// uniform samples. Error symbols sit at their optimal endpoints.
Interval grid_oracle(const QuadraticForm& q, int resolution = 1001, std::uint64_t seed = 0xC0FFEE);

} // namespace qz::sdp
