//! Order 0 and 1 Bessel functions of real positive argument.
//!
//! Ordinary functions J, Y:
//! - `x <= SERIES_MAX`: ascending power series.
//! - `SERIES_MAX < x < HANKEL_MIN`: Miller backward recurrence for J_n, with Y0, Y1 from
//!   the Neumann expansions in the even/odd J_n.
//! - `x >= HANKEL_MIN`: Hankel asymptotic expansion.
//!
//! Modified functions (exponentially scaled):
//! - I: power series up to `I_SERIES_MAX`, asymptotic expansion above.
//! - K: power series up to `K_SERIES_MAX`, trapezoidal rule on
//!   `e^x K_v(x) = int_0^inf exp(-x (cosh t - 1)) cosh(v t) dt` up to `HANKEL_MIN`,
//!   asymptotic expansion above.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

pub(crate) const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
pub(crate) const SERIES_MAX: f64 = 4.0;
pub(crate) const HANKEL_MIN: f64 = 25.0;
pub(crate) const I_SERIES_MAX: f64 = 30.0;
pub(crate) const K_SERIES_MAX: f64 = 2.0;

const TINY_TERM: f64 = 1e-18;

/// (J0, J1, Y0, Y1) at `x > 0`.
pub(crate) fn jy01(x: f64) -> [f64; 4] {
    if x <= SERIES_MAX {
        series_jy(x)
    } else if x < HANKEL_MIN {
        miller_jy(x)
    } else {
        hankel_jy(x)
    }
}

/// (J0, J1) at `x >= 0` without the Y companions.
pub(crate) fn j01(x: f64) -> [f64; 2] {
    if x == 0.0 {
        return [1.0, 0.0];
    }
    if x <= SERIES_MAX {
        series_j(x)
    } else if x < HANKEL_MIN {
        let [j0, j1, ..] = miller_jy(x);
        [j0, j1]
    } else {
        let [j0, j1, ..] = hankel_jy(x);
        [j0, j1]
    }
}

fn series_j(x: f64) -> [f64; 2] {
    let q = -0.25 * x * x;
    let mut t0 = 1.0; // q^k / (k!)^2
    let mut t1 = 1.0; // q^k / (k! (k+1)!)
    let (mut s0, mut s1) = (1.0, 1.0);
    for k in 1..200 {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        s0 += t0;
        s1 += t1;
        if t0.abs() < TINY_TERM * s0.abs().max(1e-300) && t1.abs() < TINY_TERM * s1.abs() {
            break;
        }
    }
    [s0, 0.5 * x * s1]
}

fn series_jy(x: f64) -> [f64; 4] {
    let q = -0.25 * x * x;
    let mut t0 = 1.0;
    let mut t1 = 1.0;
    let (mut s0, mut s1) = (1.0, 1.0);
    let mut h = 0.0; // H_k
    let mut y0sum = 0.0; // sum_{k>=1} H_k q^k/(k!)^2
    // sum_k (psi(k+1) + psi(k+2)) q^k/(k!(k+1)!), psi(k+1) = H_k - gamma
    let mut y1sum = 2.0 * (-EULER_GAMMA) + 1.0;
    for k in 1..200 {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        h += 1.0 / kf;
        let h_next = h + 1.0 / (kf + 1.0);
        s0 += t0;
        s1 += t1;
        y0sum += h * t0;
        y1sum += (h + h_next - 2.0 * EULER_GAMMA) * t1;
        if t0.abs() * (1.0 + h) < TINY_TERM * 1e-2 && t1.abs() * (1.0 + h_next) < TINY_TERM * 1e-2 {
            break;
        }
    }
    let j0 = s0;
    let j1 = 0.5 * x * s1;
    let log_half = (0.5 * x).ln();
    let y0 = 2.0 / PI * (log_half + EULER_GAMMA) * j0 - 2.0 / PI * y0sum;
    let y1 = -2.0 / (PI * x) + 2.0 / PI * log_half * j1 - 0.5 * x / PI * y1sum;
    [j0, j1, y0, y1]
}

fn miller_jy(x: f64) -> [f64; 4] {
    // Start well above x: J_N(x) is negligible once N exceeds x by a few x^(1/3).
    let mut n = (1.5 * x + 40.0) as usize;
    if n % 2 == 1 {
        n += 1;
    }
    let mut j = vec![0.0f64; n + 2];
    j[n] = 1e-30;
    let two_over_x = 2.0 / x;
    for k in (1..=n).rev() {
        j[k - 1] = k as f64 * two_over_x * j[k] - j[k + 1];
        if j[k - 1].abs() > 1e250 {
            for v in j[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let mut norm = j[0];
    for k in (2..=n).step_by(2) {
        norm += 2.0 * j[k];
    }
    for v in j.iter_mut() {
        *v /= norm;
    }
    let log_term = (0.5 * x).ln() + EULER_GAMMA;
    let mut y0sum = 0.0;
    let mut y1sum = 0.0;
    let mut sign = -1.0;
    for k in 1..=n / 2 {
        let kf = k as f64;
        y0sum += sign * j[2 * k] / kf;
        y1sum += sign * (j[2 * k - 1] - j[2 * k + 1]) / kf;
        sign = -sign;
    }
    let j0 = j[0];
    let j1 = j[1];
    let y0 = 2.0 / PI * log_term * j0 - 4.0 / PI * y0sum;
    let y1 = 2.0 / PI * log_term * j1 - 2.0 / (PI * x) * j0 + 2.0 / PI * y1sum;
    [j0, j1, y0, y1]
}

/// Hankel P, Q series for order with `mu = 4 nu^2`.
fn hankel_pq(mu: f64, x: f64) -> (f64, f64) {
    let mut p = 1.0;
    let mut q = 0.0;
    let mut t: f64 = 1.0;
    let eight_x = 8.0 * x;
    for k in 1..200usize {
        let odd = (2 * k - 1) as f64;
        let next = t * (mu - odd * odd) / (k as f64 * eight_x);
        if next.abs() > t.abs() && k > 2 {
            break;
        }
        t = next;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * t;
        } else {
            q += sign * t;
        }
        if t.abs() < TINY_TERM {
            break;
        }
    }
    (p, q)
}

fn hankel_jy(x: f64) -> [f64; 4] {
    let (s, c) = x.sin_cos();
    let amp = (2.0 / (PI * x)).sqrt();
    // chi0 = x - pi/4, chi1 = x - 3pi/4
    let cos0 = (c + s) * FRAC_1_SQRT_2;
    let sin0 = (s - c) * FRAC_1_SQRT_2;
    let cos1 = (s - c) * FRAC_1_SQRT_2;
    let sin1 = -(s + c) * FRAC_1_SQRT_2;
    let (p0, q0) = hankel_pq(0.0, x);
    let (p1, q1) = hankel_pq(4.0, x);
    [
        amp * (p0 * cos0 - q0 * sin0),
        amp * (p1 * cos1 - q1 * sin1),
        amp * (p0 * sin0 + q0 * cos0),
        amp * (p1 * sin1 + q1 * cos1),
    ]
}

/// (e^-x I0, e^-x I1) at `x >= 0`.
pub(crate) fn i01_scaled(x: f64) -> [f64; 2] {
    if x <= I_SERIES_MAX {
        let q = 0.25 * x * x;
        let mut t0 = 1.0;
        let mut t1 = 1.0;
        let (mut s0, mut s1) = (1.0, 1.0);
        for k in 1..400 {
            let kf = k as f64;
            t0 *= q / (kf * kf);
            t1 *= q / (kf * (kf + 1.0));
            s0 += t0;
            s1 += t1;
            if t0 < TINY_TERM * s0 && t1 < TINY_TERM * s1 {
                break;
            }
        }
        let e = (-x).exp();
        [s0 * e, 0.5 * x * s1 * e]
    } else {
        let pref = 1.0 / (2.0 * PI * x).sqrt();
        [
            pref * modified_asymptotic(0.0, x, -1.0),
            pref * modified_asymptotic(4.0, x, -1.0),
        ]
    }
}

/// (e^x K0, e^x K1) at `x > 0`.
pub(crate) fn k01_scaled(x: f64) -> [f64; 2] {
    if x <= K_SERIES_MAX {
        let [k0, k1] = series_k(x);
        let e = x.exp();
        [k0 * e, k1 * e]
    } else if x < HANKEL_MIN {
        trapezoid_k(x)
    } else {
        let pref = (PI / (2.0 * x)).sqrt();
        [
            pref * modified_asymptotic(0.0, x, 1.0),
            pref * modified_asymptotic(4.0, x, 1.0),
        ]
    }
}

/// sum_k sign^k a_k(nu) / x^k for the I (sign = -1) and K (sign = +1) expansions.
fn modified_asymptotic(mu: f64, x: f64, sign: f64) -> f64 {
    let mut sum = 1.0;
    let mut t: f64 = 1.0;
    let eight_x = 8.0 * x;
    for k in 1..200usize {
        let odd = (2 * k - 1) as f64;
        let next = t * (mu - odd * odd) / (k as f64 * eight_x);
        if next.abs() > t.abs() && k > 2 {
            break;
        }
        t = next;
        sum += if k % 2 == 1 { sign * t } else { t };
        if t.abs() < TINY_TERM {
            break;
        }
    }
    sum
}

fn series_k(x: f64) -> [f64; 2] {
    let q = 0.25 * x * x;
    let mut t0 = 1.0;
    let mut t1 = 1.0;
    let (mut i0, mut i1s) = (1.0, 1.0);
    let mut h = 0.0;
    let mut k0sum = 0.0;
    let mut k1sum = -2.0 * EULER_GAMMA + 1.0;
    for k in 1..200 {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        h += 1.0 / kf;
        let h_next = h + 1.0 / (kf + 1.0);
        i0 += t0;
        i1s += t1;
        k0sum += h * t0;
        k1sum += (h + h_next - 2.0 * EULER_GAMMA) * t1;
        if t0 * (1.0 + h) < TINY_TERM * 1e-2 && t1 * (1.0 + h_next) < TINY_TERM * 1e-2 {
            break;
        }
    }
    let i1 = 0.5 * x * i1s;
    let log_half = (0.5 * x).ln();
    let k0 = -(log_half + EULER_GAMMA) * i0 + k0sum;
    let k1 = 1.0 / x + log_half * i1 - 0.25 * x * k1sum;
    [k0, k1]
}

fn trapezoid_k(x: f64) -> [f64; 2] {
    const H: f64 = 0.1;
    let mut s0 = 0.5;
    let mut s1 = 0.5;
    for k in 1..2000 {
        let t = H * k as f64;
        let sh = (0.5 * t).sinh();
        let w = (-2.0 * x * sh * sh).exp();
        let c = t.cosh();
        s0 += w;
        s1 += w * c;
        if w * c < 1e-19 * s1 {
            break;
        }
    }
    [H * s0, H * s1]
}
