#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace idseries {

using Engine = std::mt19937_64;

/// One point mass of a discrete Levy measure: nu({location}) = weight.
struct Atom {
    double location = 0.0;
    double weight = 0.0;
};

/// Finite discrete Levy measure. Locations are distinct and nonzero, weights
/// strictly positive. An empty measure is allowed (pure Gaussian law).
class LevyMeasure {
public:
    LevyMeasure() = default;
    explicit LevyMeasure(std::vector<Atom> atoms);

    std::span<const Atom> atoms() const noexcept { return atoms_; }
    bool empty() const noexcept { return atoms_.empty(); }
    double mass() const noexcept;

private:
    std::vector<Atom> atoms_;
};

/// Centered infinitely divisible law with Gaussian variance sigma2 and a
/// finite discrete Levy measure. The drift is implicit: it is whatever makes
/// the mean exactly zero.
class IdModel {
public:
    IdModel(double sigma2, LevyMeasure measure);

    static IdModel gaussian(double sigma2) { return IdModel(sigma2, LevyMeasure{}); }

    double sigma2() const noexcept { return sigma2_; }
    const LevyMeasure& measure() const noexcept { return measure_; }

    /// R = max |u_j|, zero without atoms.
    double support_radius() const noexcept { return support_radius_; }
    /// V = sum w_j u_j^2.
    double second_moment() const noexcept { return second_moment_; }
    /// sum w_j u_j; subtracted when sampling.
    double jump_mean() const noexcept { return jump_mean_; }
    double variance() const noexcept { return sigma2_ + second_moment_; }
    /// sup{theta : E exp(theta |xi|) < inf}. Always +inf for bounded atoms.
    double mgf_domain() const noexcept;

    /// Law of `factor * xi`.
    IdModel scaled(double factor) const;
    /// Same law rescaled to unit variance.
    IdModel normalized() const;
    bool has_unit_variance(double tol = 1e-8) const noexcept;

    /// One exact draw: sigma Z + sum u_j N_j - sum u_j w_j.
    double draw(Engine& engine) const;

private:
    double sigma2_;
    LevyMeasure measure_;
    double support_radius_ = 0.0;
    double second_moment_ = 0.0;
    double jump_mean_ = 0.0;
};

/// sum_j w_j |u_j|^k.
double levy_moment(const IdModel& model, int k);

/// alpha(s) = sigma2 s + sum_j w_j |u_j| (exp(s|u_j|) - 1), s >= 0.
double alpha(const IdModel& model, double s);

/// d alpha / ds = sigma2 + sum_j w_j u_j^2 exp(s|u_j|).
double alpha_derivative(const IdModel& model, double s);

/// Inverse of alpha on [0, inf). Geometric bracket growth, bisection, then
/// one Newton polish.
double alpha_inv(const IdModel& model, double y);

/// Phi(theta) = sigma2 theta^2 / 2 + sum_j w_j (exp(theta|u_j|) - theta|u_j| - 1).
double phi(const IdModel& model, double theta);

/// n independent draws from one engine seeded with `seed`.
std::vector<double> sample(const IdModel& model, std::size_t n, std::uint64_t seed);

}  // namespace idseries
