#include "projlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace projlab {

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> entries) {
    for (const Triplet& t : entries) {
        if (t.row >= rows || t.col >= cols) {
            throw std::invalid_argument("SparseMatrix: entry (" + std::to_string(t.row) + "," +
                                        std::to_string(t.col) + ") out of range");
        }
        if (!std::isfinite(t.value)) {
            throw std::invalid_argument("SparseMatrix: non-finite value at (" +
                                        std::to_string(t.row) + "," + std::to_string(t.col) + ")");
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].row == entries[i - 1].row && entries[i].col == entries[i - 1].col) {
            throw std::invalid_argument("SparseMatrix: duplicate entry at (" +
                                        std::to_string(entries[i].row) + "," +
                                        std::to_string(entries[i].col) + ")");
        }
    }

    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_offsets_.assign(rows + 1, 0);
    m.col_indices_.reserve(entries.size());
    m.values_.reserve(entries.size());
    for (const Triplet& t : entries) {
        ++m.row_offsets_[t.row + 1];
        m.col_indices_.push_back(t.col);
        m.values_.push_back(t.value);
    }
    for (std::size_t r = 0; r < rows; ++r) m.row_offsets_[r + 1] += m.row_offsets_[r];
    return m;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> out) const {
    for (std::size_t r = 0; r < rows_; ++r) {
        double sum = 0.0;
        for (std::size_t e = row_offsets_[r]; e < row_offsets_[r + 1]; ++e) {
            sum += values_[e] * x[col_indices_[e]];
        }
        out[r] = sum;
    }
}

void SparseMatrix::multiply_transpose(std::span<const double> y, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
        const double yr = y[r];
        for (std::size_t e = row_offsets_[r]; e < row_offsets_[r + 1]; ++e) {
            out[col_indices_[e]] += values_[e] * yr;
        }
    }
}

namespace {

constexpr std::size_t kJacobiSweepCap = 200;
constexpr std::size_t kMedoidRoundCap = 100;

double off_diagonal_norm(const Matrix& a) {
    double sum = 0.0;
    for (std::size_t p = 0; p < a.rows(); ++p) {
        for (std::size_t q = p + 1; q < a.cols(); ++q) sum += 2.0 * a(p, q) * a(p, q);
    }
    return std::sqrt(sum);
}

}  // namespace

EigenResult symmetric_eigen(const Matrix& m, std::size_t k) {
    const std::size_t n = m.rows();
    if (n == 0 || m.cols() != n) {
        throw std::invalid_argument("symmetric_eigen: matrix must be square and non-empty");
    }
    if (k == 0 || k > n) {
        throw std::invalid_argument("symmetric_eigen: k must be in [1, size]");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(m(i, j) - m(j, i)) > 1e-9) {
                throw std::invalid_argument("symmetric_eigen: input not symmetric at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }

    Matrix a = m;
    // Symmetrize exactly so rounding in the caller cannot bias rotations.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = avg;
            a(j, i) = avg;
        }
    }

    Matrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    double frob = 0.0;
    for (double x : a.values()) frob += x * x;
    frob = std::sqrt(frob);
    const double tol = 1e-14 * static_cast<double>(n) * std::max(1.0, frob);

    bool converged = n == 1;
    for (std::size_t sweep = 0; sweep < kJacobiSweepCap && !converged; ++sweep) {
        if (off_diagonal_norm(a) <= tol) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a(i, p);
                    const double aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a(p, i);
                    const double aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p);
                    const double viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
        if (off_diagonal_norm(a) <= tol) converged = true;
    }
    if (!converged) {
        throw std::runtime_error("symmetric_eigen: no convergence after " +
                                 std::to_string(kJacobiSweepCap) +
                                 " sweeps, off-diagonal residual " +
                                 std::to_string(off_diagonal_norm(a)));
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    EigenResult result;
    result.eigenvalues.resize(k);
    result.eigenvectors = Matrix(n, k);
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t src = order[j];
        result.eigenvalues[j] = a(src, src);
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm += v(i, src) * v(i, src);
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < n; ++i) result.eigenvectors(i, j) = v(i, src) / norm;
    }
    return result;
}

MdsResult classical_mds(const DistanceMatrix& d, std::size_t out_dim) {
    const std::size_t n = d.size();
    if (out_dim == 0) throw std::invalid_argument("classical_mds: out_dim must be >= 1");
    if (n < out_dim + 1) {
        throw std::invalid_argument("classical_mds: need at least out_dim + 1 points, got " +
                                    std::to_string(n));
    }

    MdsResult result;
    result.coords = Matrix(n, out_dim);
    if (d.all_zero()) {
        result.degenerate = true;
        return result;
    }

    // B = -1/2 J D^2 J via row/column/grand means of the squared distances.
    Matrix sq(n, n);
    std::vector<double> row_mean(n, 0.0);
    double grand_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = d(i, j) * d(i, j);
            sq(i, j) = v;
            row_mean[i] += v;
        }
        row_mean[i] /= static_cast<double>(n);
        grand_mean += row_mean[i];
    }
    grand_mean /= static_cast<double>(n);

    Matrix b(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double value = -0.5 * (sq(i, j) - row_mean[i] - row_mean[j] + grand_mean);
            b(i, j) = value;
            b(j, i) = value;
        }
    }

    const EigenResult eig = symmetric_eigen(b, out_dim);
    for (std::size_t j = 0; j < out_dim; ++j) {
        const double scale = eig.eigenvalues[j] > 0.0 ? std::sqrt(eig.eigenvalues[j]) : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            result.coords(i, j) = eig.eigenvectors(i, j) * scale;
        }
    }

    // Double-centered eigenvectors are already mean-free; make it exact.
    for (std::size_t j = 0; j < out_dim; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += result.coords(i, j);
        mean /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) result.coords(i, j) -= mean;
    }
    return result;
}

namespace {

// Assigns every point to its nearest medoid (lowest cluster index on ties);
// a medoid always lands in its own cluster, which keeps the invariant intact
// even when duplicate points make two medoids coincide.
void assign_to_medoids(const DistanceMatrix& d, const std::vector<std::size_t>& medoids,
                       std::vector<std::size_t>& assignment) {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        double best_dist = d(i, medoids[0]);
        bool is_medoid = i == medoids[0];
        for (std::size_t c = 1; c < medoids.size() && !is_medoid; ++c) {
            if (i == medoids[c]) {
                best = c;
                is_medoid = true;
                break;
            }
            const double dist = d(i, medoids[c]);
            if (dist < best_dist) {
                best_dist = dist;
                best = c;
            }
        }
        assignment[i] = best;
    }
}

double assignment_cost(const DistanceMatrix& d, const std::vector<std::size_t>& medoids,
                       const std::vector<std::size_t>& assignment) {
    double cost = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) cost += d(i, medoids[assignment[i]]);
    return cost;
}

}  // namespace

MedoidAssignment k_medoids(const DistanceMatrix& d, std::size_t k, std::uint64_t seed) {
    const std::size_t n = d.size();
    if (k == 0) throw std::invalid_argument("k_medoids: k must be >= 1");
    if (k > n) {
        throw std::invalid_argument("k_medoids: k = " + std::to_string(k) + " exceeds n = " +
                                    std::to_string(n));
    }

    // Seeded random distinct initial medoids, picked with squared-distance
    // weighting (k-means++ style): a plain uniform draw lands two medoids in
    // one tight cluster often enough to strand the alternation in a poor
    // local optimum.
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> medoids;
    medoids.reserve(k);
    medoids.push_back(static_cast<std::size_t>(rng() % n));
    std::vector<double> weight(n, 0.0);
    while (medoids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double nearest = std::numeric_limits<double>::infinity();
            for (std::size_t m : medoids) nearest = std::min(nearest, d(i, m));
            weight[i] = nearest * nearest;
            total += weight[i];
        }
        std::size_t pick = n;
        if (total > 0.0) {
            const double u = (static_cast<double>(rng() >> 11) * 0x1.0p-53) * total;
            double cumulative = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                cumulative += weight[i];
                if (cumulative > u) {
                    pick = i;
                    break;
                }
            }
        }
        if (pick == n) {  // all remaining points coincide with a medoid
            for (std::size_t i = 0; i < n && pick == n; ++i) {
                if (std::find(medoids.begin(), medoids.end(), i) == medoids.end()) pick = i;
            }
        }
        medoids.push_back(pick);
    }

    std::vector<std::size_t> assignment(n, 0);
    std::vector<std::vector<std::size_t>> members(k);
    double previous_cost = std::numeric_limits<double>::infinity();

    for (std::size_t round = 0; round < kMedoidRoundCap; ++round) {
        assign_to_medoids(d, medoids, assignment);

        const double cost = assignment_cost(d, medoids, assignment);
        if (cost > previous_cost * (1.0 + 1e-12) + 1e-12) {
            throw std::logic_error("k_medoids: cost increased from " +
                                   std::to_string(previous_cost) + " to " + std::to_string(cost));
        }
        previous_cost = cost;

        for (auto& m : members) m.clear();
        for (std::size_t i = 0; i < n; ++i) members[assignment[i]].push_back(i);

        bool changed = false;
        for (std::size_t c = 0; c < k; ++c) {
            if (members[c].empty()) continue;  // coincident medoids; keep as-is
            std::size_t best = medoids[c];
            double best_sum = std::numeric_limits<double>::infinity();
            for (std::size_t candidate : members[c]) {
                double sum = 0.0;
                for (std::size_t other : members[c]) sum += d(candidate, other);
                if (sum < best_sum) {  // ties keep the earlier (lower) index
                    best_sum = sum;
                    best = candidate;
                }
            }
            if (best != medoids[c]) {
                medoids[c] = best;
                changed = true;
            }
        }
        if (!changed) break;
    }

    assign_to_medoids(d, medoids, assignment);
    MedoidAssignment result;
    result.cost = assignment_cost(d, medoids, assignment);
    result.medoids = std::move(medoids);
    result.assignment = std::move(assignment);
    return result;
}

namespace {

double norm2(std::span<const double> v) {
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return std::sqrt(sum);
}

}  // namespace

std::vector<double> sparse_least_squares(const SparseMatrix& a, std::span<const double> b) {
    if (a.rows() != b.size()) {
        throw std::invalid_argument("sparse_least_squares: A has " + std::to_string(a.rows()) +
                                    " rows but b has " + std::to_string(b.size()) + " entries");
    }
    const std::size_t n = a.cols();
    constexpr double kRelTol = 1e-10;

    std::vector<double> atb(n);
    a.multiply_transpose(b, atb);
    const double rhs_norm = norm2(atb);

    std::vector<double> x(n, 0.0);
    if (rhs_norm == 0.0) return x;

    std::vector<double> r = atb;  // residual of the normal equations at x = 0
    std::vector<double> p = r;
    std::vector<double> tmp(a.rows());
    std::vector<double> ap(n);

    double rs_old = 0.0;
    for (double v : r) rs_old += v * v;

    const std::size_t max_iter = 10 * n;
    const auto true_residual = [&](std::vector<double>& out) {
        a.multiply(x, tmp);
        a.multiply_transpose(tmp, out);
        for (std::size_t i = 0; i < n; ++i) out[i] = atb[i] - out[i];
    };

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        a.multiply(p, tmp);
        a.multiply_transpose(tmp, ap);

        double pap = 0.0;
        for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
        if (!(pap > 0.0)) {
            throw std::runtime_error(
                "sparse_least_squares: rank deficiency detected (CG breakdown), relative "
                "residual " +
                std::to_string(std::sqrt(rs_old) / rhs_norm));
        }

        const double alpha = rs_old / pap;
        for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
        for (std::size_t i = 0; i < n; ++i) r[i] -= alpha * ap[i];

        double rs_new = 0.0;
        for (double v : r) rs_new += v * v;

        if (std::sqrt(rs_new) <= kRelTol * rhs_norm) {
            // The recursive residual drifts; accept only on the true one.
            std::vector<double> rt(n);
            true_residual(rt);
            if (norm2(rt) <= kRelTol * rhs_norm) return x;
            r = std::move(rt);
            rs_new = 0.0;
            for (double v : r) rs_new += v * v;
            p = r;
            rs_old = rs_new;
            continue;
        }

        const double beta = rs_new / rs_old;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        rs_old = rs_new;
    }

    std::vector<double> rt(n);
    true_residual(rt);
    throw std::runtime_error(
        "sparse_least_squares: no convergence in " + std::to_string(max_iter) +
        " iterations (rank deficiency or ill-conditioning), relative residual " +
        std::to_string(norm2(rt) / rhs_norm));
}

}  // namespace projlab
