#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kahler/curvature_tensor.hpp"
#include "kahler/quadrature.hpp"

namespace kahler {

/** Log-spaced parameter grid with optional extra linear refinement windows. */
struct GridSpec {
    double min = 1e-6;
    double max = 1e4;
    int n = 2048;
    std::vector<std::pair<double, double>> windows; // dense linear inserts
    int window_n = 512;

    std::vector<double> make() const; // sorted, deduplicated, all > 0
};

inline GridSpec make_grid(double min, double max, int n) {
    GridSpec g;
    g.min = min;
    g.max = max;
    g.n = n;
    return g;
}

enum class ProfileRep { Xi, Alpha };

struct CurvatureABC {
    double param = 0.0;
    double A = 0.0, B = 0.0, C = 0.0;
};

/**
 * Rotation-invariant metric profile given by xi(r) = -r h'/h.  xi_prime is
 * required because the radial-holomorphic curvature component is xi'/h; a
 * finite-difference fallback exists but must be opted into explicitly
 * (make_fd_derivative), since silent numeric differentiation would blur the
 * sign thresholds this library exists to locate.
 */
struct XiSpec {
    std::function<double(double)> xi;
    std::function<double(double)> xi_prime;
    double scale = 1.0; // h(0); multiplies the metric, divides curvatures

    // optional exact closed forms (builtins); quadrature used when absent
    std::function<double(double)> closed_h;   // h(r)
    std::function<double(double)> closed_big_f; // F(r) = integral of h from 0
    std::function<double(double)> closed_eta; // arc length eta(r)
    std::function<CurvatureABC(double)> closed_abc;
};

/** Profile in the rescaled parameterization: curvature components are rational in alpha. */
struct AlphaSpec {
    std::function<double(double)> alpha;
    std::function<double(double)> alpha_prime;
    std::function<double(double)> alpha_second;
};

/** Central-difference derivative helper (the documented opt-in fallback). */
std::function<double(double)> make_fd_derivative(std::function<double(double)> f);

class RadialProfile {
public:
    static RadialProfile from_xi(int m, XiSpec spec, GridSpec grid = {});
    static RadialProfile from_alpha(int m, AlphaSpec spec, GridSpec grid = {});

    int dim() const { return m_; }
    ProfileRep rep() const { return rep_; }
    const std::vector<double>& params() const { return grid_; }
    const GridSpec& grid_spec() const { return gspec_; }
    double param_min() const { return grid_.front(); }
    double param_max() const { return grid_.back(); }

    /** xi(r) for XiForm; 1 - 1/k(t) for AlphaForm (same geometric quantity). */
    double xi_value(double p) const;

    // XiForm-only primitives (throw std::logic_error for AlphaForm)
    double xi_derivative(double r) const;
    double h(double r) const;
    double integral_h(double r) const; // F(r)
    double f(double r) const;          // F(r)/r
    double metric_scale() const;
    const XiSpec& xi_spec() const;
    const AlphaSpec& alpha_spec() const;

    /** Arc length along the radial ray; extends past the grid adaptively. */
    double arc_length(double p) const;
    /** d(arc length)/d(param), used for monotone inversion. */
    double arc_length_derivative(double p) const;

    /** Curvature components; param must lie within the tabulated range. */
    CurvatureABC abc(double p) const;

    /** The curvature tensor in the adapted unitary frame at a parameter value. */
    CurvatureTensor tensor_at(double p) const;

private:
    RadialProfile() = default;
    void check_range(double p, const char* who) const;

    int m_ = 2;
    ProfileRep rep_ = ProfileRep::Xi;
    GridSpec gspec_;
    std::vector<double> grid_;

    // XiForm state
    XiSpec xi_;
    CumulativeIntegral xi_over_s_; // integral of xi(s)/s from 0
    CumulativeIntegral int_h_;     // integral of h from 0
    CumulativeIntegral eta_u_;     // arc length in u = sqrt(param)
    double series_xi1_ = 0.0;      // xi'(0)
    double series_xi2_ = 0.0;      // xi''(0) estimate, for the small-r series

    // AlphaForm state
    AlphaSpec alpha_;
};

/** Positivity targets in terms of which curvature family must stay positive. */
enum class PositivityTarget { Bisectional, OrthogonalBisectional, OrthBisectionalRicci };

PositivityTarget positivity_target_from_string(const std::string& s);
std::string to_string(PositivityTarget t);

struct ConditionTrace {
    std::string name; // "A", "B", "C", "A+B", "A+C", "B+C", "A+(m-1)B"
    bool required = false;
    int positive = 0, negative = 0, indeterminate = 0;
    std::vector<double> roots; // bisection-refined sign changes
    bool strictly_positive() const { return negative == 0 && indeterminate == 0; }
};

struct PositivityReport {
    PositivityTarget target = PositivityTarget::Bisectional;
    int m = 2;
    std::size_t sampled = 0;
    double param_lo = 0.0, param_hi = 0.0;
    std::vector<ConditionTrace> conditions; // required set first, then tracked extras
    bool verdict = false;
    std::vector<std::string> failures; // e.g. "A not strictly positive"
    std::string note;

    const ConditionTrace* find(const std::string& name) const;
    nlohmann::ordered_json to_json() const;
};

/**
 * Evaluates the positivity condition set for the requested target on the
 * sampled grid (the profile's own grid when `params` is empty), with a
 * +-1e-10 indeterminacy band and bisection-refined sign-change locations.
 */
PositivityReport classify(const RadialProfile& profile, PositivityTarget target,
                          const std::vector<double>& params = {});

struct CompletenessReport {
    bool xi_condition = false;    // 0 < xi < 1 at every sampled parameter
    double xi_min = 0.0, xi_max = 0.0;
    std::vector<double> radii;    // R values of the partial diagnostic
    std::vector<double> partial;  // 2 * arc length at those R
    double fitted_exponent = 0.0; // log-log slope over the tail
    std::string verdict;          // sufficient-condition-met | diverging-trend | inconclusive

    nlohmann::ordered_json to_json() const;
};

/** Divergence diagnostic for the radial length integral (cannot prove divergence). */
CompletenessReport completeness_check(const RadialProfile& profile);

/** CSV rows param,A,B,C,A+C,A+B,A+(m-1)B over the given (or native) grid. */
std::string profile_csv(const RadialProfile& profile, const std::vector<double>& params = {});

/** max |xi + r h'/h| over subsampled grid nodes, h' by central differences. */
double xi_roundtrip_error(const RadialProfile& profile, int samples = 64);
/** max |dF/dr - h| / h over subsampled grid nodes. */
double f_roundtrip_error(const RadialProfile& profile, int samples = 64);

} // namespace kahler
