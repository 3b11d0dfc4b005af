#include "semigarch/contraction.hpp"

#include "semigarch/errors.hpp"

#include <stdexcept>

namespace semigarch {

ContractionTable::ContractionTable(std::vector<double> c, int kmax)
    : c_(std::move(c)), total_(0.0), kmax_(kmax) {
    if (c_.empty()) throw std::invalid_argument("contraction table: empty coefficient vector");
    if (kmax_ < 1) throw std::invalid_argument("contraction table: kmax must be >= 1");
    for (double v : c_) {
        if (!(v >= 0.0))
            throw std::invalid_argument("contraction table: coefficients must be non-negative");
        total_ += v;
    }
    if (!(total_ < 1.0))
        throw InfeasibleDriftError("contraction table: c_1 + ... + c_q must be < 1");

    const int q = static_cast<int>(c_.size());
    d_.assign(static_cast<std::size_t>(kmax_) * q, 0.0);
    d_[0] = 1.0; // d(1,1) = 1, d(1,i) = 0 for i >= 2
    for (int k = 2; k <= kmax_; ++k) {
        for (int i = 1; i <= q; ++i) {
            double v = 0.0;
            const int jmax = std::min(q, k - 2);
            for (int j = 1; j <= jmax; ++j) v += c_[j - 1] * d_[(k - j - 1) * q + (i - 1)];
            const int direct = k + i - 2;
            if (direct >= 1 && direct <= q) v += c_[direct - 1];
            d_[(k - 1) * q + (i - 1)] = v;
        }
    }
    cum_.assign(d_.size(), 0.0);
    for (int i = 0; i < q; ++i) cum_[i] = d_[i];
    for (int k = 2; k <= kmax_; ++k)
        for (int i = 0; i < q; ++i)
            cum_[(k - 1) * q + i] = cum_[(k - 2) * q + i] + d_[(k - 1) * q + i];
}

double ContractionTable::coeff(int k, int i) const {
    if (k < 1 || k > kmax_ || i < 1 || i > q())
        throw std::out_of_range("contraction table: index out of range");
    return d_[(k - 1) * q() + (i - 1)];
}

double ContractionTable::cumulative(int m, int i) const {
    if (m < 1 || m > kmax_ || i < 1 || i > q())
        throw std::out_of_range("contraction table: index out of range");
    return cum_[(m - 1) * q() + (i - 1)];
}

double ContractionTable::gap_bound(int k, std::span<const double> initial_gaps) const {
    if (static_cast<int>(initial_gaps.size()) != q())
        throw std::invalid_argument("gap_bound: need q initial gap components");
    double bound = 0.0;
    for (int i = 1; i <= q(); ++i) bound += coeff(k, i) * initial_gaps[i - 1];
    return bound;
}

ContractionTable contraction_coeffs(std::span<const double> c, int kmax) {
    return ContractionTable(std::vector<double>(c.begin(), c.end()), kmax);
}

std::vector<std::vector<double>> composition_sum_table(std::span<const double> c, int kmax) {
    const int q = static_cast<int>(c.size());
    if (q < 1 || kmax < 1) throw std::invalid_argument("composition_sum_table: bad sizes");
    // All-compositions weight A(s) = sum_{j<=min(q,s)} c_j A(s-j), A(0) = 1;
    // the entry for (k,i) is A(k+i-2).
    const int smax = kmax + q - 2;
    std::vector<double> comp(static_cast<std::size_t>(smax) + 1, 0.0);
    comp[0] = 1.0;
    for (int s = 1; s <= smax; ++s) {
        double v = 0.0;
        for (int j = 1; j <= std::min(q, s); ++j) v += c[j - 1] * comp[s - j];
        comp[s] = v;
    }
    std::vector<std::vector<double>> table(kmax, std::vector<double>(q, 0.0));
    table[0][0] = 1.0; // fixed first row, matching the recursion table
    for (int k = 2; k <= kmax; ++k)
        for (int i = 1; i <= q; ++i) table[k - 1][i - 1] = comp[k + i - 2];
    return table;
}

} // namespace semigarch
