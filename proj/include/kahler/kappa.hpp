#pragma once

namespace kahler {

/**
 * Solutions of y'' + kappa*y = 0 used as comparison models:
 *
 *   s_kappa:  y(0)=0, y'(0)=1   (sin / identity / sinh branch)
 *   c_kappa:  y(0)=1/sqrt(|kappa|) for kappa != 0, y(0)=1 for kappa = 0,
 *             y'(0)=0            (cos / one / cosh branch)
 *
 * cot_kappa = s'/s and tan_kappa = c'/c.  Note tan_kappa is negative for
 * kappa > 0 and t in (0, pi/(2 sqrt(kappa))): the cosine branch decays.
 */
double s_kappa(double kappa, double t);
double s_kappa_prime(double kappa, double t);
double c_kappa(double kappa, double t);
double c_kappa_prime(double kappa, double t);

/** s'/s; throws std::domain_error at t <= 0 and at zeros of s. */
double cot_kappa(double kappa, double t);

/** c'/c; throws std::domain_error at zeros of c. */
double tan_kappa(double kappa, double t);

} // namespace kahler
