//! Independent brute-force references for the optimized routines.
//!
//! Everything here is computed by direct summation or enumeration, never by
//! the transform/solver paths it is meant to check. These run in tests and
//! behind the `isac oracle` subcommand.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::ambiguity::GammaGrid;
use crate::frame::{ComplexGrid, PowerGrid};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// `gamma(nu, mu)` by the literal double sum over the power grid.
pub fn gamma_cell(p: &PowerGrid, nu: i64, mu: i64) -> Complex64 {
    let (m_sym, n_c) = p.dims();
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..m_sym {
        for k in 0..n_c {
            let phase =
                TAU * (nu as f64 * m as f64 / m_sym as f64 - mu as f64 * k as f64 / n_c as f64);
            acc += p.at(m, k) * Complex64::from_polar(1.0, phase);
        }
    }
    acc
}

/// `P(m, k)` by the literal double sum over a gamma grid.
pub fn power_cell(g: &GammaGrid, m: usize, k: usize) -> Complex64 {
    let (m_sym, n_c) = g.dims();
    let mut acc = Complex64::new(0.0, 0.0);
    for nu in crate::ambiguity::centered_range(m_sym) {
        for mu in crate::ambiguity::centered_range(n_c) {
            let phase =
                TAU * (mu as f64 * k as f64 / n_c as f64 - nu as f64 * m as f64 / m_sym as f64);
            acc += g.at(nu, mu) * Complex64::from_polar(1.0, phase);
        }
    }
    acc / (m_sym * n_c) as f64
}

/// `eta(nu)` by direct summation of the Doppler phase ramp.
pub fn eta_cell(m_sym: usize, n_c: usize, nu: i64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..n_c {
        acc += Complex64::from_polar(1.0, TAU * nu as f64 * n as f64 / (m_sym * n_c) as f64);
    }
    acc
}

/// The full per-symbol quadruple sum of the auto-ambiguity function.
pub fn aaf_quadruple_sum(s: &ComplexGrid, nu: i64, mu: i64) -> Complex64 {
    aaf_terms(s, nu, mu, false)
}

/// Only the cross-subcarrier (`k1 != k2`) terms of the quadruple sum — the
/// part the separable approximation drops.
pub fn aaf_cross_terms(s: &ComplexGrid, nu: i64, mu: i64) -> Complex64 {
    aaf_terms(s, nu, mu, true)
}

fn aaf_terms(s: &ComplexGrid, nu: i64, mu: i64, cross_only: bool) -> Complex64 {
    let (m_sym, n_c) = s.dims();
    let total = (m_sym * n_c) as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..m_sym {
        for n in 0..n_c {
            let global = (m * n_c + n) as f64;
            let doppler = Complex64::from_polar(1.0, TAU * nu as f64 * global / total);
            for k1 in 0..n_c {
                for k2 in 0..n_c {
                    if cross_only && k1 == k2 {
                        continue;
                    }
                    let phase = TAU
                        * ((k1 as f64 - k2 as f64) * global - k2 as f64 * mu as f64)
                        / n_c as f64;
                    acc += s.at(m, k1)
                        * s.at(m, k2).conj()
                        * Complex64::from_polar(1.0, phase)
                        * doppler;
                }
            }
        }
    }
    acc
}

/// The linear (non-cyclic) auto-ambiguity of a raw sample stream:
/// `sum_n x(n) conj(x(n + mu)) e^{j2pi nu n / N}` with zero padding past the
/// ends. This is the textbook definition the per-symbol model approximates.
pub fn aaf_linear(samples: &[Complex64], nu: i64, mu: i64) -> Complex64 {
    let n_total = samples.len() as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..n_total {
        let lag = n + mu;
        if lag < 0 || lag >= n_total {
            continue;
        }
        let phase = TAU * nu as f64 * n as f64 / n_total as f64;
        acc += samples[n as usize]
            * samples[lag as usize].conj()
            * Complex64::from_polar(1.0, phase);
    }
    acc
}

/// Result of a brute-force search.
#[derive(Debug, Clone)]
pub struct SearchResult {
    pub objective: f64,
    pub point: Vec<f64>,
}

/// Grid search over the simplex `{p >= 0, sum p = total}` maximizing the sum
/// rate `sum log2(1 + g_i p_i)`. Enumerates every composition of `steps`
/// quanta over the candidates: `C(steps + n - 1, n - 1)` points.
pub fn water_fill_grid_search(gains: &[f64], total: f64, steps: usize) -> SearchResult {
    let n = gains.len();
    assert!(n >= 1);
    let quantum = total / steps as f64;
    let mut best = SearchResult {
        objective: f64::NEG_INFINITY,
        point: vec![0.0; n],
    };
    let mut counts = vec![0usize; n];
    enumerate_compositions(steps, n, &mut counts, &mut |counts| {
        let mut rate = 0.0;
        for i in 0..n {
            rate += (1.0 + gains[i] * counts[i] as f64 * quantum).log2();
        }
        if rate > best.objective {
            best.objective = rate;
            best.point = counts.iter().map(|&c| c as f64 * quantum).collect();
        }
    });
    best
}

fn enumerate_compositions(
    remaining: usize,
    slots: usize,
    counts: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    let idx = counts.len() - slots;
    if slots == 1 {
        counts[idx] = remaining;
        visit(counts);
        return;
    }
    for take in 0..=remaining {
        counts[idx] = take;
        enumerate_compositions(remaining - take, slots - 1, counts, visit);
    }
}

/// Number of points [`water_fill_grid_search`] visits for given steps/slots.
pub fn composition_count(steps: usize, slots: usize) -> usize {
    // C(steps + slots - 1, slots - 1)
    let mut num = 1.0_f64;
    for i in 0..slots - 1 {
        num *= (steps + slots - 1 - i) as f64 / (i + 1) as f64;
    }
    num.round() as usize
}

/// Exhaustive PAPR minimum over all `R^n` discrete phase assignments of the
/// active subcarriers. Returns the optimum in dB and the phase indices.
pub fn papr_exhaustive(p_r_row: &[f64], u_row: &[bool], r: usize) -> (f64, Vec<usize>) {
    let n_c = u_row.len();
    let active: Vec<usize> = (0..n_c).filter(|&k| u_row[k] && p_r_row[k] > 0.0).collect();
    let weights: Vec<f64> = active.iter().map(|&k| p_r_row[k].sqrt()).collect();
    let mean: f64 = active.iter().map(|&k| p_r_row[k]).sum();
    assert!(!active.is_empty(), "need at least one active subcarrier");

    let mut assignment = vec![0usize; active.len()];
    let mut best_db = f64::INFINITY;
    let mut best_assignment = assignment.clone();
    loop {
        // peak over n of |sum_k w_k e^{j(theta_k - 2pi n k/N_c)}|^2
        let mut peak = 0.0_f64;
        for n in 0..n_c {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, &k) in active.iter().enumerate() {
                let theta = TAU * assignment[t] as f64 / r as f64;
                acc += weights[t]
                    * Complex64::from_polar(1.0, theta - TAU * (n * k) as f64 / n_c as f64);
            }
            peak = peak.max(acc.norm_sqr());
        }
        let papr = 10.0 * (peak / mean).log10();
        if papr < best_db {
            best_db = papr;
            best_assignment = assignment.clone();
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == assignment.len() {
                let mut phases = vec![0usize; n_c];
                for (t, &k) in active.iter().enumerate() {
                    phases[k] = best_assignment[t];
                }
                return (best_db, phases);
            }
            assignment[pos] += 1;
            if assignment[pos] < r {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
    }
}

/// Random search over the simplex-with-support for the minimax sidelobe
/// problem: draws `samples` exponential-normalized points and returns the
/// best maximum modulus over the given complex functionals.
///
/// `functionals[i]` holds one complex coefficient per support cell.
pub fn minimax_random_search(
    functionals: &[Vec<Complex64>],
    total: f64,
    samples: usize,
    seed: u64,
) -> SearchResult {
    let dim = functionals.first().map_or(0, Vec::len);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut best = SearchResult {
        objective: f64::INFINITY,
        point: vec![0.0; dim],
    };
    let mut point = vec![0.0; dim];
    for _ in 0..samples {
        let mut sum = 0.0;
        for p in point.iter_mut() {
            // exponential draw -> uniform on the simplex after normalization
            let u: f64 = rng.gen_range(f64::EPSILON..1.0);
            *p = -u.ln();
            sum += *p;
        }
        for p in point.iter_mut() {
            *p *= total / sum;
        }
        let mut worst = 0.0_f64;
        for row in functionals {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, p) in row.iter().zip(&point) {
                acc += c * *p;
            }
            worst = worst.max(acc.norm());
        }
        if worst < best.objective {
            best.objective = worst;
            best.point.copy_from_slice(&point);
        }
    }
    best
}
