#pragma once

#include <optional>

#include "kahler/radial_profile.hpp"
#include "kahler/rng.hpp"

namespace kahler {

// ---------------------------------------------------------------------------
// builtin profiles

RadialProfile flat_profile(int m, GridSpec grid = {});
RadialProfile fubini_study_profile(int m, GridSpec grid = {}, double scale = 1.0);
/** Fubini-Study in the rescaled parameterization (valid for t < 1/4). */
RadialProfile fubini_study_alpha_profile(int m, GridSpec grid = make_grid(1e-6, 0.2, 512));
/** xi(r) = a r/(1+r) with 0 < a < 1; incomplete but positively curved. */
RadialProfile ht_seed_profile(int m, double a, GridSpec grid = {});

inline GridSpec alpha_default_grid() { return make_grid(1e-4, 50.0, 1200); }

/** alpha(t) = lambda (1 - (1+t^2)^-a); the a in (1/2, 1) family. */
RadialProfile family1_profile(int m, double a, double lambda, GridSpec grid = alpha_default_grid());
/** Same family pushed to a = 6, the large-exponent example. */
RadialProfile sec8_a6_profile(int m, double lambda, GridSpec grid = alpha_default_grid());
/** alpha(t) = t - 2 a t^2 + t^3. */
RadialProfile cubic_profile(int m, double a, GridSpec grid = alpha_default_grid());

struct Family1Report {
    double a = 0.0, lambda = 0.0;
    double t_root = 0.0;      // zero of the radial-holomorphic component
    double lhs = 0.0, rhs = 0.0; // the sharpness inequality on lambda
    bool lambda_condition = false;
};
Family1Report family1_report(double a, double lambda);

// ---------------------------------------------------------------------------
// the five quadratics controlling the cubic family's sign pattern

struct QuadraticRecord {
    std::string name;       // formula it came from
    double c0 = 0, c1 = 0, c2 = 0; // c0 + c1 t + c2 t^2
    double discriminant = 0;
    double threshold_a_squared = 0; // indefinite exactly when a^2 exceeds this
    std::vector<double> roots;      // both positive when present
    std::string verdict;            // "positive" | "vanishes" | "indefinite"
};
std::vector<QuadraticRecord> cubic_quadratics(double a);

// ---------------------------------------------------------------------------
// smooth cutoff and the local slope perturbation

/**
 * Smooth plateau function: zero for x <= -0.3, a single rise with slope 1 at
 * x = 0, and back to zero for x >= 0.95.  Built from two mollifier bumps so
 * every derivative is continuous and |phi'| <= 1, 0 <= phi <= sup().
 */
class CutoffBump {
public:
    static const CutoffBump& standard();
    double chi(double x) const; // phi'
    double phi(double x) const;
    double sup() const { return sup_; }

private:
    CutoffBump();
    CumulativeIntegral table_;
    double sup_ = 0.0;
};

/**
 * Subtracts strength * h(R) * C(R) * phi(r - R) from the seed's slope profile.
 * The support of the dent lies inside [R - 1, R + 1].
 */
RadialProfile ht_perturb(const RadialProfile& seed, double R, double strength = 0.5);

struct PerturbationReport {
    int m = 2;
    double R = 0.0, strength = 0.0;
    double window_a_plus_c_min = 0.0; // over [R-1, R+1]
    double b_min = 0.0, c_min = 0.0;  // over the whole grid
    double radial_ricci_at_R = 0.0;   // A + (m-1)B at R
    bool window_positive = false, b_positive = false, c_positive = false, radial_negative = false;
    bool all() const { return window_positive && b_positive && c_positive && radial_negative; }
    nlohmann::ordered_json to_json() const;
};
PerturbationReport verify_perturbation(const RadialProfile& perturbed, double R, double strength);

struct PerturbationSearch {
    bool found = false;
    double R = 0.0;
    PerturbationReport report;
};
PerturbationSearch find_perturbation_radius(
    const RadialProfile& seed, double strength = 0.5,
    const std::vector<double>& candidates = {4, 5, 6, 8, 10, 12, 16, 20, 24, 32, 48, 64});

/** r h(r) / F(r); tends to 1 - xi(inf) for slope profiles with a limit. */
double tail_ratio(const RadialProfile& profile, double r);

/** max over the grid of t alpha'(t) - 2 alpha(t); nonpositive = half-slope bound holds. */
double half_slope_excess(const RadialProfile& alpha_profile);

// ---------------------------------------------------------------------------
// random admissible profiles and the JSON spec loader

/** Random profile with 0 < xi < 1 and xi' > 0: a positive mix of Moebius steps. */
RadialProfile random_positive_profile(int m, Rng& rng, GridSpec grid = make_grid(1e-4, 1e3, 1024));

struct ProfileSpec {
    int m = 2;
    std::string rep;    // "xi" | "alpha" (optional; builtins have a native one)
    std::string name;   // builtin name
    std::map<std::string, double> params;
    std::optional<GridSpec> grid;
};

ProfileSpec parse_profile_spec(const nlohmann::json& j);
RadialProfile make_profile(const ProfileSpec& spec);

} // namespace kahler
