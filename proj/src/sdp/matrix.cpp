// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "qz/sdp.hpp"

namespace qz::sdp {

SymMatrix SymMatrix::identity(std::size_t n) {
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.set(i, i, 1.0);
    }
    return m;
}

SymMatrix SymMatrix::from_dense(std::size_t n, const std::vector<double>& dense) {
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            m.set(i, j, dense[i * n + j]);
        }
    }
    return m;
}

std::vector<double> SymMatrix::dense() const {
    std::vector<double> d(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            d[i * n_ + j] = (*this)(i, j);
        }
    }
    return d;
}

double SymMatrix::frobenius() const noexcept { return std::sqrt(inner(*this, *this)); }

double SymMatrix::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) {
        m = std::max(m, std::fabs(v));
    }
    return m;
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
    SymMatrix r = a;
    std::transform(r.packed().begin(), r.packed().end(), b.packed().begin(), r.packed().begin(), std::plus<>());
    return r;
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
    SymMatrix r = a;
    std::transform(r.packed().begin(), r.packed().end(), b.packed().begin(), r.packed().begin(), std::minus<>());
    return r;
}

SymMatrix operator*(double k, const SymMatrix& a) {
    SymMatrix r = a;
    for (double& v : r.packed()) {
        v *= k;
    }
    return r;
}

double inner(const SymMatrix& a, const SymMatrix& b) noexcept {
    const std::size_t n = a.order();
    double diag = 0.0;
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        diag += a(i, i) * b(i, i);
        for (std::size_t j = i + 1; j < n; ++j) {
            off += a(i, j) * b(i, j);
        }
    }
    return diag + 2.0 * off;
}

namespace {

constexpr int kMaxSweeps = 50;
constexpr double kOffTolerance = 1e-12;

// Modified Gram-Schmidt on the columns of a row-major n x n matrix.
void orthonormalize(std::vector<double>& v, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < k; ++j) {
            double d = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                d += v[r * n + k] * v[r * n + j];
            }
            for (std::size_t r = 0; r < n; ++r) {
                v[r * n + k] -= d * v[r * n + j];
            }
        }
        double norm = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            norm += v[r * n + k] * v[r * n + k];
        }
        norm = std::sqrt(norm);
        if (norm < 0.5) {
            throw EigenError("start basis is not orthogonal");
        }
        for (std::size_t r = 0; r < n; ++r) {
            v[r * n + k] /= norm;
        }
    }
}

double off_norm(const std::vector<double>& a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            s += a[i * n + j] * a[i * n + j];
        }
    }
    return std::sqrt(2.0 * s);
}

void rotate(std::vector<double>& a, std::vector<double>& v, std::size_t n, std::size_t p, std::size_t q) {
    const double apq = a[p * n + q];
    const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
    double t = 0.0;
    if (std::fabs(theta) > 1e150) {
        t = 0.5 / theta;
    } else {
        t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
    }
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;
    for (std::size_t k = 0; k < n; ++k) {
        const double akp = a[k * n + p];
        const double akq = a[k * n + q];
        a[k * n + p] = c * akp - s * akq;
        a[k * n + q] = s * akp + c * akq;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double apk = a[p * n + k];
        const double aqk = a[q * n + k];
        a[p * n + k] = c * apk - s * aqk;
        a[q * n + k] = s * apk + c * aqk;
    }
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double vkp = v[k * n + p];
        const double vkq = v[k * n + q];
        v[k * n + p] = c * vkp - s * vkq;
        v[k * n + q] = s * vkp + c * vkq;
    }
}

} // namespace

Eigen jacobi_eigen(const SymMatrix& s, const std::vector<double>* start) {
    const std::size_t n = s.order();
    for (double x : s.packed()) {
        if (!std::isfinite(x)) {
            throw EigenError("non-finite matrix entry");
        }
    }
    std::vector<double> a = s.dense();
    std::vector<double> v(n * n, 0.0);
    if (start != nullptr && start->size() == n * n) {
        v = *start;
        orthonormalize(v, n);
        // a <- V^T S V
        std::vector<double> sv(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                const double sik = a[i * n + k];
                for (std::size_t j = 0; j < n; ++j) {
                    sv[i * n + j] += sik * v[k * n + j];
                }
            }
        }
        std::fill(a.begin(), a.end(), 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                const double vki = v[k * n + i];
                for (std::size_t j = 0; j < n; ++j) {
                    a[i * n + j] += vki * sv[k * n + j];
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double m = 0.5 * (a[i * n + j] + a[j * n + i]);
                a[i * n + j] = m;
                a[j * n + i] = m;
            }
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            v[i * n + i] = 1.0;
        }
    }

    const double target = kOffTolerance * s.frobenius();
    int sweep = 0;
    for (double off = off_norm(a, n); off > target; off = off_norm(a, n)) {
        if (sweep++ == kMaxSweeps) {
            throw EigenError("Jacobi did not converge: off-diagonal norm " + std::to_string(off) + " after " +
                             std::to_string(kMaxSweeps) + " sweeps, target " + std::to_string(target));
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a[p * n + q] != 0.0) {
                    rotate(a, v, n, p, q);
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return a[l * n + l] < a[r * n + r]; });
    Eigen e;
    e.values.resize(n);
    e.vectors.resize(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        e.values[k] = a[order[k] * n + order[k]];
        for (std::size_t r = 0; r < n; ++r) {
            e.vectors[r * n + k] = v[r * n + order[k]];
        }
    }
    return e;
}

namespace {

SymMatrix recompose_with(const Eigen& e, const std::vector<double>& values) {
    const std::size_t n = values.size();
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                if (values[k] != 0.0) {
                    s += e.vectors[i * n + k] * values[k] * e.vectors[j * n + k];
                }
            }
            m.set(i, j, s);
        }
    }
    return m;
}

} // namespace

SymMatrix recompose(const Eigen& e) { return recompose_with(e, e.values); }

double min_eigenvalue(const SymMatrix& s) {
    if (s.order() == 0) {
        return 0.0;
    }
    return jacobi_eigen(s).values.front();
}

namespace {

SymMatrix clamp_negative(const Eigen& e) {
    std::vector<double> clamped = e.values;
    for (double& v : clamped) {
        v = std::max(v, 0.0);
    }
    return recompose_with(e, clamped);
}

} // namespace

SymMatrix project_psd(const SymMatrix& s) { return clamp_negative(jacobi_eigen(s)); }

SymMatrix project_psd(const SymMatrix& s, std::vector<double>& basis) {
    Eigen e;
    try {
        e = jacobi_eigen(s, &basis);
    } catch (const EigenError&) {
        e = jacobi_eigen(s);
    }
    basis = e.vectors;
    return clamp_negative(e);
}

} // namespace qz::sdp
