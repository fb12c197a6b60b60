#pragma once

#include <span>
#include <utility>
#include <vector>

namespace idseries {

/// 2 ln 2 - 1: the coefficient that makes s = 1 a removable singularity of tau.
inline constexpr double kBeta0 = 0.38629436111989061883;
/// ln 2 / (2 ln 2 - 1): tau(beta0, 1) after filling the singularity.
inline constexpr double kTauAtOne = 1.7943497247810449154;

enum class Curve { Q, B, T };

/// Q(s) = (1+s) ln(1+s) - s.
double curve_q(double s);
/// B(s) = s^2 / (2 (1 + s/3)).
double curve_b(double s);
/// T(s) = s^2/4 on [0, 3), 3s/4 on [3, inf).
double curve_t(double s);
double eval_curve(Curve kind, double s);

/// tau(beta, s) = (ln Q(s) - ln beta) / ln s.
/// For beta == beta0 the value at (and within 1e-4 of) s = 1 is ln2/beta0.
double tau(double beta, double s);

/// Piecewise lower bound of Q on (0, c]:
///   beta0 s^2 on (0, 1], beta0 s^tau_n on (p_{n-1}, p_n], tau_n = tau(beta0, p_n).
class PartitionBound {
public:
    /// `points` must start at 1 and be strictly increasing with last element c > 1.
    explicit PartitionBound(std::vector<double> points);

    /// The two-piece bound H_c = H_{{1,c}}.
    static PartitionBound two_piece(double c) { return PartitionBound({1.0, c}); }

    double c() const noexcept { return points_.back(); }
    std::span<const double> points() const noexcept { return points_; }
    std::span<const double> exponents() const noexcept { return exponents_; }

    /// H_P(s) for s in (0, c].
    double operator()(double s) const;

private:
    std::vector<double> points_;
    std::vector<double> exponents_;  // exponents_[n-1] = tau_n
};

inline PartitionBound build_partition_bound(std::vector<double> points) {
    return PartitionBound(std::move(points));
}

double eval_hp(const PartitionBound& pb, double s);

struct Crossing {
    double s_star = 0.0;
    double value = 0.0;
};

/// First crossing of H_c and B, bisected on (0.5, 1] to 1e-10.
Crossing bh_crossing(double c);

/// Every sign change of H_c - B on (0, c], located by a log-spaced scan and
/// refined by bisection. The first entry equals bh_crossing(c).
std::vector<Crossing> bh_crossings(double c);

}  // namespace idseries
