#include "kahler/profile_library.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kahler {

RadialProfile flat_profile(int m, GridSpec grid) {
    XiSpec s;
    s.xi = [](double) { return 0.0; };
    s.xi_prime = [](double) { return 0.0; };
    s.closed_h = [](double) { return 1.0; };
    s.closed_big_f = [](double r) { return r; };
    s.closed_eta = [](double r) { return std::sqrt(r); };
    s.closed_abc = [](double r) { return CurvatureABC{r, 0.0, 0.0, 0.0}; };
    return RadialProfile::from_xi(m, std::move(s), grid);
}

RadialProfile fubini_study_profile(int m, GridSpec grid, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("fubini-study: scale must be positive");
    XiSpec s;
    s.scale = scale;
    s.xi = [](double r) { return 2.0 * r / (1.0 + r); };
    s.xi_prime = [](double r) { return 2.0 / ((1.0 + r) * (1.0 + r)); };
    s.closed_h = [scale](double r) { return scale / ((1.0 + r) * (1.0 + r)); };
    s.closed_big_f = [scale](double r) { return scale * r / (1.0 + r); };
    s.closed_eta = [scale](double r) { return std::sqrt(scale) * std::atan(std::sqrt(r)); };
    s.closed_abc = [scale](double r) {
        return CurvatureABC{r, 2.0 / scale, 1.0 / scale, 2.0 / scale};
    };
    return RadialProfile::from_xi(m, std::move(s), grid);
}

RadialProfile fubini_study_alpha_profile(int m, GridSpec grid) {
    if (grid.max >= 0.25)
        throw std::invalid_argument("fubini-study alpha form only exists for t < 1/4");
    AlphaSpec s;
    // t = u(1-u) inverted on the u < 1/2 branch; the rationalized form
    // u = 2t/(1 + sqrt(1-4t)) stays accurate near t = 0, and tiny t switches
    // to the series to keep the derivatives stable
    auto u_of = [](double t) { return 2.0 * t / (1.0 + std::sqrt(1.0 - 4.0 * t)); };
    s.alpha = [](double t) {
        if (t < 1e-6) return t * (1.0 + t * (2.0 + 5.0 * t));
        const double q = std::sqrt(1.0 - 4.0 * t);
        return (1.0 - q) / (1.0 + q); // u/t - 1 simplified
    };
    s.alpha_prime = [u_of](double t) {
        if (t < 1e-6) return 1.0 + 4.0 * t;
        const double u = u_of(t);
        const double u1 = 1.0 / std::sqrt(1.0 - 4.0 * t);
        return (u1 * t - u) / (t * t);
    };
    s.alpha_second = [u_of](double t) {
        if (t < 1e-6) return 4.0 + 30.0 * t;
        const double u = u_of(t);
        const double q = 1.0 - 4.0 * t;
        const double u1 = 1.0 / std::sqrt(q);
        const double u2 = 2.0 / (q * std::sqrt(q));
        return u2 / t - 2.0 * (u1 * t - u) / (t * t * t);
    };
    return RadialProfile::from_alpha(m, std::move(s), grid);
}

RadialProfile ht_seed_profile(int m, double a, GridSpec grid) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("ht-seed: need 0 < a < 1");
    XiSpec s;
    s.xi = [a](double r) { return a * r / (1.0 + r); };
    s.xi_prime = [a](double r) { return a / ((1.0 + r) * (1.0 + r)); };
    s.closed_h = [a](double r) { return std::pow(1.0 + r, -a); };
    s.closed_big_f = [a](double r) { return (std::pow(1.0 + r, 1.0 - a) - 1.0) / (1.0 - a); };
    return RadialProfile::from_xi(m, std::move(s), grid);
}

namespace {

RadialProfile power_family_profile(int m, double a, double lambda, GridSpec grid) {
    AlphaSpec s;
    s.alpha = [a, lambda](double t) { return lambda * (1.0 - std::pow(1.0 + t * t, -a)); };
    s.alpha_prime = [a, lambda](double t) {
        return 2.0 * a * lambda * t * std::pow(1.0 + t * t, -a - 1.0);
    };
    s.alpha_second = [a, lambda](double t) {
        const double q = 1.0 + t * t;
        return 2.0 * a * lambda * (1.0 - (2.0 * a + 1.0) * t * t) * std::pow(q, -a - 2.0);
    };
    return RadialProfile::from_alpha(m, std::move(s), grid);
}

} // namespace

RadialProfile family1_profile(int m, double a, double lambda, GridSpec grid) {
    if (!(a > 0.5 && a < 1.0)) throw std::invalid_argument("family1: need 1/2 < a < 1");
    if (!(lambda > 0.0)) throw std::invalid_argument("family1: need lambda > 0");
    return power_family_profile(m, a, lambda, grid);
}

RadialProfile sec8_a6_profile(int m, double lambda, GridSpec grid) {
    if (!(lambda > 0.0)) throw std::invalid_argument("sec8-a6: need lambda > 0");
    return power_family_profile(m, 6.0, lambda, grid);
}

RadialProfile cubic_profile(int m, double a, GridSpec grid) {
    if (!(a > 0.0)) throw std::invalid_argument("cubic: need a > 0");
    AlphaSpec s;
    s.alpha = [a](double t) { return t - 2.0 * a * t * t + t * t * t; };
    s.alpha_prime = [a](double t) { return 1.0 - 4.0 * a * t + 3.0 * t * t; };
    s.alpha_second = [a](double t) { return -4.0 * a + 6.0 * t; };
    return RadialProfile::from_alpha(m, std::move(s), grid);
}

Family1Report family1_report(double a, double lambda) {
    if (!(a > 0.5)) throw std::invalid_argument("family1_report: need a > 1/2");
    Family1Report rep;
    rep.a = a;
    rep.lambda = lambda;
    rep.t_root = std::sqrt(3.0 / (2.0 * a - 1.0));
    rep.lhs = 1.0 / (2.0 * lambda - 1.0);
    rep.rhs = std::pow(1.0 + 3.0 / (2.0 * a - 1.0), a) - 1.0;
    // for lambda <= 1/2 the left side is negative (or infinite) and the
    // inequality is read as trivially satisfied through the sign
    rep.lambda_condition = lambda > 0.5 ? rep.lhs < rep.rhs : true;
    return rep;
}

// ---------------------------------------------------------------------------

std::vector<QuadraticRecord> cubic_quadratics(double a) {
    if (!(a > 0.0)) throw std::invalid_argument("cubic_quadratics: need a > 0");
    std::vector<QuadraticRecord> out;
    auto add = [&](std::string name, double c0, double c1, double c2) {
        QuadraticRecord q;
        q.name = std::move(name);
        q.c0 = c0; q.c1 = c1; q.c2 = c2;
        q.discriminant = c1 * c1 - 4.0 * c0 * c2;
        const double k = c1 / a; // coefficients scale linearly in a
        q.threshold_a_squared = 4.0 * c0 * c2 / (k * k);
        const double eps = 1e-14 * std::max({std::abs(c1 * c1), std::abs(4.0 * c0 * c2), 1.0});
        if (q.discriminant > eps) {
            const double s = std::sqrt(q.discriminant);
            q.roots = {(-c1 - s) / (2.0 * c2), (-c1 + s) / (2.0 * c2)};
            std::sort(q.roots.begin(), q.roots.end());
            q.verdict = "indefinite";
        } else if (q.discriminant < -eps) {
            q.verdict = "positive";
        } else {
            q.roots = {-c1 / (2.0 * c2)};
            q.verdict = "vanishes";
        }
        out.push_back(std::move(q));
    };
    add("alpha/t", 1.0, -2.0 * a, 1.0);
    add("alpha'", 1.0, -4.0 * a, 3.0);
    add("t*alpha''+2*alpha'", 2.0, -12.0 * a, 12.0);
    add("t*alpha''+3*alpha'", 3.0, -16.0 * a, 15.0);
    add("t*alpha''+2*alpha'+2*alpha/t", 4.0, -16.0 * a, 14.0);
    return out;
}

// ---------------------------------------------------------------------------
// cutoff bump

namespace {

double mollifier(double y) {
    if (std::abs(y) >= 1.0) return 0.0;
    return std::exp(1.0 / (y * y - 1.0) + 1.0); // normalized to 1 at the centre
}

} // namespace

CutoffBump::CutoffBump() {
    auto chi_fn = [](double x) { return mollifier(x / 0.3) - mollifier((x - 0.65) / 0.3); };
    table_ = CumulativeIntegral(chi_fn, linear_grid(-1.0, 1.0, 2049));
    sup_ = table_(0.325); // inside the gap between the two bumps
}

const CutoffBump& CutoffBump::standard() {
    static const CutoffBump instance;
    return instance;
}

double CutoffBump::chi(double x) const {
    return mollifier(x / 0.3) - mollifier((x - 0.65) / 0.3);
}

double CutoffBump::phi(double x) const {
    if (x <= -1.0) return 0.0;
    if (x >= 1.0) return table_(1.0);
    return table_(x);
}

// ---------------------------------------------------------------------------
// perturbation

RadialProfile ht_perturb(const RadialProfile& seed, double R, double strength) {
    if (seed.rep() != ProfileRep::Xi)
        throw std::invalid_argument("ht_perturb: seed must be a slope-form profile");
    if (!(R >= 3.0)) throw std::invalid_argument("ht_perturb: need R >= 3 so the dent stays away from the origin");
    if (!(strength > 0.0 && strength < 1.0)) throw std::invalid_argument("ht_perturb: strength in (0,1)");
    if (R + 2.0 > seed.param_max()) throw std::invalid_argument("ht_perturb: dent window leaves the grid");

    const double amp = strength * seed.h(R) * seed.abc(R).C;
    const XiSpec& base = seed.xi_spec();
    const CutoffBump* bump = &CutoffBump::standard();

    XiSpec s;
    s.scale = base.scale;
    s.xi = [xi = base.xi, amp, R, bump](double r) { return xi(r) - amp * bump->phi(r - R); };
    s.xi_prime = [xp = base.xi_prime, amp, R, bump](double r) { return xp(r) - amp * bump->chi(r - R); };

    GridSpec grid = seed.grid_spec();
    grid.windows.push_back({std::max(R - 2.0, 0.5), R + 2.0});
    return RadialProfile::from_xi(seed.dim(), std::move(s), grid);
}

nlohmann::ordered_json PerturbationReport::to_json() const {
    nlohmann::ordered_json j;
    j["m"] = m;
    j["R"] = R;
    j["strength"] = strength;
    j["window_a_plus_c_min"] = window_a_plus_c_min;
    j["b_min"] = b_min;
    j["c_min"] = c_min;
    j["radial_ricci_at_R"] = radial_ricci_at_R;
    j["conclusions"] = {
        {"a_plus_c_positive_near_dent", window_positive},
        {"b_positive", b_positive},
        {"c_positive", c_positive},
        {"radial_ricci_negative_at_R", radial_negative},
    };
    j["all"] = all();
    return j;
}

PerturbationReport verify_perturbation(const RadialProfile& perturbed, double R, double strength) {
    PerturbationReport rep;
    rep.m = perturbed.dim();
    rep.R = R;
    rep.strength = strength;

    rep.b_min = rep.c_min = std::numeric_limits<double>::infinity();
    for (double p : perturbed.params()) {
        const CurvatureABC v = perturbed.abc(p);
        rep.b_min = std::min(rep.b_min, v.B);
        rep.c_min = std::min(rep.c_min, v.C);
    }

    rep.window_a_plus_c_min = std::numeric_limits<double>::infinity();
    for (double p : linear_grid(R - 1.0, R + 1.0, 257)) {
        const CurvatureABC v = perturbed.abc(p);
        rep.window_a_plus_c_min = std::min(rep.window_a_plus_c_min, v.A + v.C);
    }

    const CurvatureABC at_r = perturbed.abc(R);
    rep.radial_ricci_at_R = at_r.A + (rep.m - 1) * at_r.B;

    rep.window_positive = rep.window_a_plus_c_min > 0.0;
    rep.b_positive = rep.b_min > 0.0;
    rep.c_positive = rep.c_min > 0.0;
    rep.radial_negative = rep.radial_ricci_at_R < 0.0;
    return rep;
}

PerturbationSearch find_perturbation_radius(const RadialProfile& seed, double strength,
                                            const std::vector<double>& candidates) {
    PerturbationSearch out;
    for (double R : candidates) {
        if (R + 2.0 > seed.param_max()) continue;
        const RadialProfile pert = ht_perturb(seed, R, strength);
        const PerturbationReport rep = verify_perturbation(pert, R, strength);
        if (rep.all()) {
            out.found = true;
            out.R = R;
            out.report = rep;
            return out;
        }
    }
    return out;
}

double tail_ratio(const RadialProfile& profile, double r) {
    return r * profile.h(r) / profile.integral_h(r);
}

double half_slope_excess(const RadialProfile& alpha_profile) {
    const AlphaSpec& s = alpha_profile.alpha_spec();
    double worst = -std::numeric_limits<double>::infinity();
    for (double t : alpha_profile.params())
        worst = std::max(worst, t * s.alpha_prime(t) - 2.0 * s.alpha(t));
    return worst;
}

// ---------------------------------------------------------------------------

RadialProfile random_positive_profile(int m, Rng& rng, GridSpec grid) {
    const double total = 0.4 + 0.55 * rng.uniform();
    double g[3], c[3];
    double gsum = 0.0;
    for (int i = 0; i < 3; ++i) {
        g[i] = 0.2 + 0.8 * rng.uniform();
        gsum += g[i];
        c[i] = std::exp(std::log(0.3) + rng.uniform() * (std::log(30.0) - std::log(0.3)));
    }
    double w[3];
    for (int i = 0; i < 3; ++i) w[i] = total * g[i] / gsum;

    XiSpec s;
    s.xi = [w0 = w[0], w1 = w[1], w2 = w[2], c0 = c[0], c1 = c[1], c2 = c[2]](double r) {
        return w0 * r / (c0 + r) + w1 * r / (c1 + r) + w2 * r / (c2 + r);
    };
    s.xi_prime = [w0 = w[0], w1 = w[1], w2 = w[2], c0 = c[0], c1 = c[1], c2 = c[2]](double r) {
        auto d = [](double w, double c, double r) {
            const double q = c + r;
            return w * c / (q * q);
        };
        return d(w0, c0, r) + d(w1, c1, r) + d(w2, c2, r);
    };
    return RadialProfile::from_xi(m, std::move(s), grid);
}

// ---------------------------------------------------------------------------
// JSON profile spec

namespace {

GridSpec grid_from_json(const nlohmann::json& j) {
    GridSpec g;
    if (j.contains("min")) g.min = j.at("min").get<double>();
    if (j.contains("max")) g.max = j.at("max").get<double>();
    if (j.contains("n")) g.n = j.at("n").get<int>();
    return g;
}

double need_param(const ProfileSpec& s, const std::string& key) {
    auto it = s.params.find(key);
    if (it == s.params.end())
        throw std::invalid_argument("profile spec: builtin '" + s.name + "' needs parameter '" + key + "'");
    return it->second;
}

} // namespace

ProfileSpec parse_profile_spec(const nlohmann::json& j) {
    ProfileSpec s;
    if (!j.is_object()) throw std::invalid_argument("profile spec must be a JSON object");
    s.m = j.value("m", 2);
    s.rep = j.value("rep", std::string{});
    if (!j.contains("name")) throw std::invalid_argument("profile spec: missing 'name'");
    s.name = j.at("name").get<std::string>();
    if (j.contains("params")) {
        for (const auto& [k, v] : j.at("params").items()) {
            if (!v.is_number()) throw std::invalid_argument("profile spec: parameter '" + k + "' must be a number");
            s.params[k] = v.get<double>();
        }
    }
    if (j.contains("grid")) s.grid = grid_from_json(j.at("grid"));
    return s;
}

RadialProfile make_profile(const ProfileSpec& spec) {
    const auto rep_ok = [&](const char* native) {
        if (!spec.rep.empty() && spec.rep != native)
            throw std::invalid_argument("profile spec: builtin '" + spec.name + "' is expressed in '" +
                                        native + "' form, not '" + spec.rep + "'");
    };
    if (spec.name == "flat") {
        rep_ok("xi");
        return flat_profile(spec.m, spec.grid.value_or(GridSpec{}));
    }
    if (spec.name == "fubini-study") {
        double scale = 1.0;
        if (auto it = spec.params.find("scale"); it != spec.params.end()) scale = it->second;
        if (spec.rep == "alpha") {
            if (scale != 1.0)
                throw std::invalid_argument("profile spec: scaled fubini-study only exists in xi form");
            return fubini_study_alpha_profile(spec.m, spec.grid.value_or(make_grid(1e-6, 0.2, 512)));
        }
        rep_ok("xi");
        return fubini_study_profile(spec.m, spec.grid.value_or(GridSpec{}), scale);
    }
    if (spec.name == "ht-seed") {
        rep_ok("xi");
        return ht_seed_profile(spec.m, need_param(spec, "a"), spec.grid.value_or(GridSpec{}));
    }
    if (spec.name == "family1") {
        rep_ok("alpha");
        return family1_profile(spec.m, need_param(spec, "a"), need_param(spec, "lambda"),
                               spec.grid.value_or(alpha_default_grid()));
    }
    if (spec.name == "sec8-a6") {
        rep_ok("alpha");
        return sec8_a6_profile(spec.m, need_param(spec, "lambda"), spec.grid.value_or(alpha_default_grid()));
    }
    if (spec.name == "cubic") {
        rep_ok("alpha");
        return cubic_profile(spec.m, need_param(spec, "a"), spec.grid.value_or(alpha_default_grid()));
    }
    throw std::invalid_argument(
        "profile spec: unknown builtin '" + spec.name +
        "' (expected flat, fubini-study, ht-seed, family1, sec8-a6 or cubic)");
}

} // namespace kahler
