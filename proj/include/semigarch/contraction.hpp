#ifndef SEMIGARCH_CONTRACTION_HPP
#define SEMIGARCH_CONTRACTION_HPP

#include <span>
#include <vector>

namespace semigarch {

/// Gap-propagation weights for a run of coupled hits: after k hits the
/// intensity gap is at most sum_i d(k,i) * (initial gap component i), and
/// the cumulative weights D(m,i) stay below 1/(1-c).
class ContractionTable {
  public:
    ContractionTable(std::vector<double> c, int kmax);

    int kmax() const { return kmax_; }
    int q() const { return static_cast<int>(c_.size()); }
    const std::vector<double>& contraction() const { return c_; }
    double total() const { return total_; }

    /// d(k,i) for k in 1..kmax, i in 1..q.
    double coeff(int k, int i) const;
    /// D(m,i) = sum_{k<=m} d(k,i).
    double cumulative(int m, int i) const;

    /// Upper bound on the gap after k hits given initial gap components
    /// (newest first, size q).
    double gap_bound(int k, std::span<const double> initial_gaps) const;

  private:
    std::vector<double> c_;
    double total_;
    int kmax_;
    std::vector<double> d_;   // row-major, kmax x q
    std::vector<double> cum_; // prefix sums over k
};

/// Builds the table by the linear-time unrolling of the hit-run inequality
/// chain: d(1,*) = (1, 0, ..., 0) and for k >= 2
///   d(k,i) = sum_{j=1..min(q,k-2)} c_j d(k-j,i) + c_{k+i-2} [1 <= k+i-2 <= q].
ContractionTable contraction_coeffs(std::span<const double> c, int kmax);

/// Companion upper bound: the full composition sum over products
/// c_{i1}...c_{il} with i1+...+il = k+i-2 and parts in 1..q.  Dominates the
/// recursion table pointwise; kept as a cross-check oracle.
std::vector<std::vector<double>> composition_sum_table(std::span<const double> c, int kmax);

} // namespace semigarch

#endif
