#include "kahler/radial_profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace kahler {

namespace {

constexpr double kSignBand = 1e-10;   // indeterminacy band around zero
constexpr double kRootTol = 1e-8;     // bisection width for sign changes
constexpr double kOriginEps = 1e-12;  // below this the exact origin limits apply
constexpr double kSeriesRadius = 1e-3; // quadrature-backed profiles switch to the origin series

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::vector<double> GridSpec::make() const {
    if (!(min > 0.0) || !(max > min)) throw std::invalid_argument("grid range must satisfy 0 < min < max");
    if (n < 2) throw std::invalid_argument("grid needs at least two nodes");
    std::vector<double> g = log_grid(min, max, n);
    for (const auto& [lo, hi] : windows) {
        if (!(hi > lo)) throw std::invalid_argument("grid window must have positive width");
        const auto w = linear_grid(std::max(lo, min * 1e-3), hi, window_n);
        g.insert(g.end(), w.begin(), w.end());
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

std::function<double(double)> make_fd_derivative(std::function<double(double)> f) {
    if (!f) throw std::invalid_argument("make_fd_derivative: empty function");
    return [f = std::move(f)](double x) {
        const double d = 1e-6 * std::max(1.0, std::abs(x));
        return (f(x + d) - f(x - d)) / (2.0 * d);
    };
}

RadialProfile RadialProfile::from_xi(int m, XiSpec spec, GridSpec grid) {
    if (m < 2 || m > 8) throw std::invalid_argument("profile dimension must be between 2 and 8");
    if (!spec.xi || !spec.xi_prime) throw std::invalid_argument("xi profile needs xi and xi_prime");
    if (!(spec.scale > 0.0)) throw std::invalid_argument("metric scale must be positive");
    if (std::abs(spec.xi(1e-12)) > 1e-8) throw std::invalid_argument("xi must vanish at the origin");

    RadialProfile p;
    p.m_ = m;
    p.rep_ = ProfileRep::Xi;
    p.gspec_ = grid;
    p.grid_ = grid.make();
    p.xi_ = std::move(spec);

    p.series_xi1_ = p.xi_.xi_prime(0.0);
    { // one-sided second-order estimate of xi''(0) for the small-parameter series
        const double d = 1e-5;
        p.series_xi2_ = (-3.0 * p.xi_.xi_prime(0.0) + 4.0 * p.xi_.xi_prime(d) - p.xi_.xi_prime(2.0 * d)) / (2.0 * d);
    }

    // Tables are built bottom-up with value captures so the profile stays
    // freely movable; a table copy is self-contained and immutable.
    if (!p.xi_.closed_h) {
        std::vector<double> nodes = p.grid_;
        nodes.insert(nodes.begin(), 0.0);
        const auto xi = p.xi_.xi;
        p.xi_over_s_ = CumulativeIntegral(
            [xi](double s) { return s > 0.0 ? xi(s) / s : 0.0; }, std::move(nodes));
    }
    std::function<double(double)> h_fn;
    if (p.xi_.closed_h) {
        h_fn = p.xi_.closed_h;
    } else {
        h_fn = [table = p.xi_over_s_, scale = p.xi_.scale](double s) {
            return scale * std::exp(-table(s));
        };
    }
    if (!p.xi_.closed_big_f) {
        std::vector<double> nodes = p.grid_;
        nodes.insert(nodes.begin(), 0.0);
        p.int_h_ = CumulativeIntegral(h_fn, std::move(nodes));
    }
    if (!p.xi_.closed_eta) {
        std::vector<double> nodes;
        nodes.reserve(p.grid_.size() + 1);
        nodes.push_back(0.0);
        for (double r : p.grid_) nodes.push_back(std::sqrt(r));
        p.eta_u_ = CumulativeIntegral([h_fn](double u) { return std::sqrt(h_fn(u * u)); },
                                      std::move(nodes));
    }

    if (p.xi_.closed_h) {
        for (std::size_t i = 0; i < p.grid_.size(); i += std::max<std::size_t>(1, p.grid_.size() / 16))
            if (!(p.xi_.closed_h(p.grid_[i]) > 0.0))
                throw std::invalid_argument("closed-form h must stay positive on the grid");
    }
    return p;
}

RadialProfile RadialProfile::from_alpha(int m, AlphaSpec spec, GridSpec grid) {
    if (m < 2 || m > 8) throw std::invalid_argument("profile dimension must be between 2 and 8");
    if (!spec.alpha || !spec.alpha_prime || !spec.alpha_second)
        throw std::invalid_argument("alpha profile needs alpha, alpha_prime, alpha_second");
    if (std::abs(spec.alpha(1e-12)) > 1e-8) throw std::invalid_argument("alpha must vanish at the origin");

    RadialProfile p;
    p.m_ = m;
    p.rep_ = ProfileRep::Alpha;
    p.gspec_ = grid;
    p.grid_ = grid.make();
    p.alpha_ = std::move(spec);

    for (double t : p.grid_) {
        const double a = p.alpha_.alpha(t);
        const double k = 1.0 + a + t * p.alpha_.alpha_prime(t);
        if (!(1.0 + a > 0.0) || !(k > 0.0))
            throw std::invalid_argument("alpha profile leaves the admissible range on the grid");
    }

    std::vector<double> nodes;
    nodes.reserve(p.grid_.size() + 1);
    nodes.push_back(0.0);
    for (double t : p.grid_) nodes.push_back(std::sqrt(t));
    const auto alpha = p.alpha_.alpha;
    const auto alpha_prime = p.alpha_.alpha_prime;
    p.eta_u_ = CumulativeIntegral(
        [alpha, alpha_prime](double u) {
            const double t = u * u;
            return 1.0 + alpha(t) + t * alpha_prime(t);
        },
        std::move(nodes));
    return p;
}

void RadialProfile::check_range(double p, const char* who) const {
    if (!(p >= 0.0) || p > grid_.back() * (1.0 + 1e-12))
        throw std::out_of_range(std::string(who) + ": parameter outside the tabulated range");
}

double RadialProfile::xi_value(double p) const {
    if (rep_ == ProfileRep::Xi) return xi_.xi(p);
    const double a = alpha_.alpha(p);
    const double k = 1.0 + a + p * alpha_.alpha_prime(p);
    return 1.0 - 1.0 / k;
}

double RadialProfile::xi_derivative(double r) const {
    if (rep_ != ProfileRep::Xi) throw std::logic_error("xi_derivative: profile is not in xi form");
    return xi_.xi_prime(r);
}

double RadialProfile::h(double r) const {
    if (rep_ != ProfileRep::Xi) throw std::logic_error("h: profile is not in xi form");
    if (xi_.closed_h) return xi_.closed_h(r);
    return xi_.scale * std::exp(-xi_over_s_(r));
}

double RadialProfile::integral_h(double r) const {
    if (rep_ != ProfileRep::Xi) throw std::logic_error("integral_h: profile is not in xi form");
    if (xi_.closed_big_f) return xi_.closed_big_f(r);
    return int_h_(r);
}

double RadialProfile::f(double r) const {
    if (!(r > 0.0)) return rep_ == ProfileRep::Xi ? xi_.scale : 1.0; // F(r)/r -> h(0)
    return integral_h(r) / r;
}

double RadialProfile::metric_scale() const {
    if (rep_ != ProfileRep::Xi) throw std::logic_error("metric_scale: profile is not in xi form");
    return xi_.scale;
}

const XiSpec& RadialProfile::xi_spec() const {
    if (rep_ != ProfileRep::Xi) throw std::logic_error("xi_spec: profile is not in xi form");
    return xi_;
}

const AlphaSpec& RadialProfile::alpha_spec() const {
    if (rep_ != ProfileRep::Alpha) throw std::logic_error("alpha_spec: profile is not in alpha form");
    return alpha_;
}

double RadialProfile::arc_length(double p) const {
    if (!(p >= 0.0)) throw std::out_of_range("arc_length: negative parameter");
    if (p == 0.0) return 0.0;
    if (rep_ == ProfileRep::Xi && xi_.closed_eta) return xi_.closed_eta(p);
    return eta_u_(std::sqrt(p));
}

double RadialProfile::arc_length_derivative(double p) const {
    if (!(p > 0.0)) throw std::out_of_range("arc_length_derivative: parameter must be positive");
    if (rep_ == ProfileRep::Xi) return 0.5 * std::sqrt(h(p) / p);
    const double k = 1.0 + alpha_.alpha(p) + p * alpha_.alpha_prime(p);
    return 0.5 * k / std::sqrt(p);
}

CurvatureABC RadialProfile::abc(double p) const {
    check_range(p, "abc");
    CurvatureABC out;
    out.param = p;

    if (rep_ == ProfileRep::Alpha) {
        const double a1 = alpha_.alpha_prime(p);
        if (p < kOriginEps) {
            out.A = 2.0 * a1;
            out.B = a1;
            out.C = 2.0 * a1;
            return out;
        }
        const double a = alpha_.alpha(p);
        const double a2 = alpha_.alpha_second(p);
        const double k = 1.0 + a + p * a1;
        const double w = 1.0 + a;
        out.A = (p * a2 + 2.0 * a1) / (k * k * k);
        out.B = a1 / (k * w * w);
        out.C = 2.0 * a / (p * w * w);
        return out;
    }

    if (xi_.closed_abc) return xi_.closed_abc(p);

    const double scale = xi_.scale;
    if (p < kOriginEps) {
        out.A = series_xi1_ / scale;
        out.B = 0.5 * series_xi1_ / scale;
        out.C = series_xi1_ / scale;
        return out;
    }

    out.A = xi_.xi_prime(p) / h(p);
    const bool quadrature_backed = !xi_.closed_h || !xi_.closed_big_f;
    if (quadrature_backed && p < kSeriesRadius) {
        // expanding h and F about the origin kills the r^2-order cancellation
        const double slope = (series_xi1_ * series_xi1_ + series_xi2_) / 3.0;
        out.B = (0.5 * series_xi1_ + p * slope) / scale;
        out.C = (series_xi1_ + p * slope) / scale;
        return out;
    }

    const double hr = h(p);
    const double F = integral_h(p);
    const double xi = xi_.xi(p);
    out.B = (p * hr - (1.0 - xi) * F) / (F * F);
    out.C = 2.0 * (F - p * hr) / (F * F);
    return out;
}

CurvatureTensor RadialProfile::tensor_at(double p) const {
    const CurvatureABC v = abc(p);
    return diagonal_type_tensor(m_, v.A, v.B, v.C);
}

// ---------------------------------------------------------------------------
// positivity classification

PositivityTarget positivity_target_from_string(const std::string& s) {
    if (s == "bisectional+") return PositivityTarget::Bisectional;
    if (s == "orthogonal-bisectional+") return PositivityTarget::OrthogonalBisectional;
    if (s == "orth-bisectional-and-ricci+") return PositivityTarget::OrthBisectionalRicci;
    throw std::invalid_argument("unknown positivity target: " + s);
}

std::string to_string(PositivityTarget t) {
    switch (t) {
    case PositivityTarget::Bisectional: return "bisectional+";
    case PositivityTarget::OrthogonalBisectional: return "orthogonal-bisectional+";
    case PositivityTarget::OrthBisectionalRicci: return "orth-bisectional-and-ricci+";
    }
    throw std::logic_error("unreachable");
}

const ConditionTrace* PositivityReport::find(const std::string& name) const {
    for (const auto& c : conditions)
        if (c.name == name) return &c;
    return nullptr;
}

nlohmann::ordered_json PositivityReport::to_json() const {
    nlohmann::ordered_json j;
    j["target"] = to_string(target);
    j["m"] = m;
    j["sampled"] = sampled;
    j["param_range"] = {param_lo, param_hi};
    j["conditions"] = nlohmann::ordered_json::array();
    for (const auto& c : conditions) {
        nlohmann::ordered_json jc;
        jc["name"] = c.name;
        jc["required"] = c.required;
        jc["positive"] = c.positive;
        jc["negative"] = c.negative;
        jc["indeterminate"] = c.indeterminate;
        jc["roots"] = c.roots;
        j["conditions"].push_back(std::move(jc));
    }
    j["verdict"] = verdict;
    j["failures"] = failures;
    if (!note.empty()) j["note"] = note;
    return j;
}

namespace {

struct Quantity {
    std::string name;
    std::function<double(const CurvatureABC&)> eval;
};

std::vector<Quantity> tracked_quantities(int m) {
    std::vector<Quantity> q;
    q.push_back({"A", [](const CurvatureABC& v) { return v.A; }});
    q.push_back({"B", [](const CurvatureABC& v) { return v.B; }});
    q.push_back({"C", [](const CurvatureABC& v) { return v.C; }});
    q.push_back({"A+B", [](const CurvatureABC& v) { return v.A + v.B; }});
    q.push_back({"A+C", [](const CurvatureABC& v) { return v.A + v.C; }});
    q.push_back({"B+C", [](const CurvatureABC& v) { return v.B + v.C; }});
    q.push_back({"A+(m-1)B", [m](const CurvatureABC& v) { return v.A + (m - 1) * v.B; }});
    return q;
}

std::vector<std::string> required_set(PositivityTarget target, int m) {
    switch (target) {
    case PositivityTarget::Bisectional:
        return {"A"};
    case PositivityTarget::OrthogonalBisectional:
        if (m == 2) return {"B", "A+C"};
        return {"B", "C", "A+C"};
    case PositivityTarget::OrthBisectionalRicci:
        if (m == 2) return {"B", "A+B", "B+C", "A+C"};
        return {"B", "C", "A+C", "A+(m-1)B"};
    }
    throw std::logic_error("unreachable");
}

int band_sign(double v) {
    if (v > kSignBand) return 1;
    if (v < -kSignBand) return -1;
    return 0;
}

double refine_root(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 200 && hi - lo > kRootTol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

PositivityReport classify(const RadialProfile& profile, PositivityTarget target,
                          const std::vector<double>& params) {
    const std::vector<double>& grid = params.empty() ? profile.params() : params;
    if (grid.size() < 2) throw std::invalid_argument("classify: need at least two parameters");
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw std::invalid_argument("classify: parameters must be sorted");

    const int m = profile.dim();
    PositivityReport rep;
    rep.target = target;
    rep.m = m;
    rep.sampled = grid.size();
    rep.param_lo = grid.front();
    rep.param_hi = grid.back();

    std::vector<CurvatureABC> values;
    values.reserve(grid.size());
    for (double p : grid) values.push_back(profile.abc(p));

    const auto req = required_set(target, m);
    for (const auto& quantity : tracked_quantities(m)) {
        ConditionTrace trace;
        trace.name = quantity.name;
        trace.required = std::find(req.begin(), req.end(), quantity.name) != req.end();

        int last_sign = 0;
        double last_param = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const int s = band_sign(quantity.eval(values[i]));
            if (s > 0) ++trace.positive;
            else if (s < 0) ++trace.negative;
            else ++trace.indeterminate;
            if (s != 0) {
                if (last_sign != 0 && s != last_sign) {
                    auto f = [&](double p) { return quantity.eval(profile.abc(p)); };
                    trace.roots.push_back(refine_root(f, last_param, grid[i]));
                }
                last_sign = s;
                last_param = grid[i];
            }
        }
        rep.conditions.push_back(std::move(trace));
    }

    // required conditions first, in their canonical order
    std::stable_sort(rep.conditions.begin(), rep.conditions.end(),
                     [](const ConditionTrace& a, const ConditionTrace& b) {
                         return a.required > b.required;
                     });

    rep.verdict = true;
    for (const auto& c : rep.conditions) {
        if (!c.required) continue;
        if (!c.strictly_positive() || c.positive == 0) {
            rep.verdict = false;
            rep.failures.push_back(c.name + " not strictly positive");
        }
    }
    if (m == 2 && target != PositivityTarget::Bisectional)
        rep.note = "m = 2 evaluates the reduced two-dimensional condition set; the general-m set "
                   "stays sufficient for the same conclusion, it is only no longer necessary";
    return rep;
}

// ---------------------------------------------------------------------------
// completeness diagnostic

nlohmann::ordered_json CompletenessReport::to_json() const {
    nlohmann::ordered_json j;
    j["xi_condition"] = xi_condition;
    j["xi_range"] = {xi_min, xi_max};
    j["radii"] = radii;
    j["partial_lengths"] = partial;
    j["fitted_exponent"] = fitted_exponent;
    j["verdict"] = verdict;
    return j;
}

CompletenessReport completeness_check(const RadialProfile& profile) {
    CompletenessReport rep;

    const auto& grid = profile.params();
    rep.xi_min = rep.xi_max = profile.xi_value(grid.front());
    for (double p : grid) {
        const double v = profile.xi_value(p);
        rep.xi_min = std::min(rep.xi_min, v);
        rep.xi_max = std::max(rep.xi_max, v);
    }
    rep.xi_condition = rep.xi_min > 0.0 && rep.xi_max < 1.0;

    // the diagnostic itself: growth of twice the radial arc length over the tail
    const double hi = grid.back();
    const double lo = hi / 100.0;
    rep.radii = log_grid(std::max(lo, grid.front()), hi, 16);
    for (double R : rep.radii) rep.partial.push_back(2.0 * profile.arc_length(R));

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(rep.radii.size());
    for (std::size_t i = 0; i < rep.radii.size(); ++i) {
        const double x = std::log(rep.radii[i]);
        const double y = std::log(std::max(rep.partial[i], 1e-300));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    rep.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    if (rep.xi_condition) rep.verdict = "sufficient-condition-met";
    else if (rep.fitted_exponent > 0.05) rep.verdict = "diverging-trend";
    else rep.verdict = "inconclusive";
    return rep;
}

// ---------------------------------------------------------------------------
// export and reconstruction checks

std::string profile_csv(const RadialProfile& profile, const std::vector<double>& params) {
    const std::vector<double>& grid = params.empty() ? profile.params() : params;
    std::string out = "param,A,B,C,A+C,A+B,A+(m-1)B\n";
    const int m = profile.dim();
    for (double p : grid) {
        const CurvatureABC v = profile.abc(p);
        out += fmt(p) + "," + fmt(v.A) + "," + fmt(v.B) + "," + fmt(v.C) + "," +
               fmt(v.A + v.C) + "," + fmt(v.A + v.B) + "," + fmt(v.A + (m - 1) * v.B) + "\n";
    }
    return out;
}

double xi_roundtrip_error(const RadialProfile& profile, int samples) {
    const auto& grid = profile.params();
    double worst = 0.0;
    const std::size_t stride = std::max<std::size_t>(1, grid.size() / samples);
    for (std::size_t i = 0; i < grid.size(); i += stride) {
        const double r = grid[i];
        const double d = 1e-4 * r;
        const double rec = -r * (std::log(profile.h(r + d)) - std::log(profile.h(r - d))) / (2.0 * d);
        worst = std::max(worst, std::abs(rec - profile.xi_value(r)));
    }
    return worst;
}

double f_roundtrip_error(const RadialProfile& profile, int samples) {
    const auto& grid = profile.params();
    double worst = 0.0;
    const std::size_t stride = std::max<std::size_t>(1, grid.size() / samples);
    for (std::size_t i = 0; i < grid.size(); i += stride) {
        const double r = grid[i];
        const double d = 1e-4 * r;
        const double rec = (profile.integral_h(r + d) - profile.integral_h(r - d)) / (2.0 * d);
        worst = std::max(worst, std::abs(rec - profile.h(r)) / profile.h(r));
    }
    return worst;
}

} // namespace kahler
