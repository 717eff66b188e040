//! Doubly-dispersive multipath channel generation, the communication link,
//! and the achievable-rate metric.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{ComplexGrid, FrameConfig, GridRole, PowerGrid};

/// One propagation path: complex gain, delay (s) and Doppler shift (Hz).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub tau_s: f64,
    pub v_hz: f64,
}

impl Path {
    pub fn gain(&self) -> Complex64 {
        Complex64::new(self.alpha_re, self.alpha_im)
    }
}

/// A multipath channel realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSet {
    pub paths: Vec<Path>,
}

/// Statistical description used to draw a [`PathSet`].
///
/// Gains are complex Gaussian with unit total mean power, delays uniform in
/// `[delay_max_s miniature range)` and Dopplers uniform in `+-doppler_max_hz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub n_paths: usize,
    pub delay_max_s: f64,
    pub doppler_max_hz: f64,
}

impl PathSpec {
    /// Fast time-varying preset: Doppler offsets up to 100 kHz.
    pub fn fast(cfg: &FrameConfig) -> Self {
        Self {
            n_paths: 8,
            delay_max_s: cfg.t_g_s,
            doppler_max_hz: 100.0e3,
        }
    }

    /// Slow time-varying preset: Doppler offsets up to 1 kHz.
    pub fn slow(cfg: &FrameConfig) -> Self {
        Self {
            n_paths: 8,
            delay_max_s: cfg.t_g_s,
            doppler_max_hz: 1.0e3,
        }
    }
}

/// Noise variances of the two receive chains (linear power).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma2_c: f64,
    pub sigma2_r: f64,
}

impl NoiseSpec {
    pub fn new(sigma2_c: f64, sigma2_r: f64) -> Result<Self> {
        if !(sigma2_c > 0.0) || !(sigma2_r > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "noise variances must be positive, got sigma2_c={sigma2_c}, sigma2_r={sigma2_r}"
            )));
        }
        Ok(Self { sigma2_c, sigma2_r })
    }
}

/// Per-RE channel gains `H_c(m, k)`.
pub type ChannelGrid = ComplexGrid;

fn complex_gaussian(rng: &mut ChaCha12Rng, variance: f64) -> Complex64 {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * scale, im * scale)
}

/// Draws a deterministic multipath realization from `spec`.
///
/// Gains are i.i.d. `CN(0, 1/L)` so the total mean power is one; delays are
/// uniform in `[0, delay_max_s)` and Dopplers uniform in `+-doppler_max_hz`.
pub fn gen_paths(spec: &PathSpec, seed: u64) -> Result<PathSet> {
    if spec.n_paths == 0 {
        return Err(Error::EmptyRange("path count must be at least 1".into()));
    }
    if spec.delay_max_s < 0.0 || spec.doppler_max_hz < 0.0 {
        return Err(Error::EmptyRange(
            "delay and Doppler ranges must be nonnegative".into(),
        ));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let l = spec.n_paths;
    let paths = (0..l)
        .map(|_| {
            let alpha = complex_gaussian(&mut rng, 1.0 / l as f64);
            let tau_s = if spec.delay_max_s > 0.0 {
                rng.gen_range(0.0..spec.delay_max_s)
            } else {
                0.0
            };
            let v_hz = if spec.doppler_max_hz > 0.0 {
                rng.gen_range(-spec.doppler_max_hz..=spec.doppler_max_hz)
            } else {
                0.0
            };
            Path {
                alpha_re: alpha.re,
                alpha_im: alpha.im,
                tau_s,
                v_hz,
            }
        })
        .collect();
    Ok(PathSet { paths })
}

/// Samples the channel on the RE grid:
/// `H_c(m,k) = sum_l alpha_l e^{j 2 pi (v_l m T_O - tau_l k delta_f)}`.
pub fn sample_grid(paths: &PathSet, cfg: &FrameConfig) -> ChannelGrid {
    let t_o = cfg.symbol_total_duration();
    ComplexGrid::from_fn(cfg.m_sym, cfg.n_c, GridRole::Transmit, |m, k| {
        let mut h = Complex64::new(0.0, 0.0);
        for p in &paths.paths {
            let phase = 2.0 * std::f64::consts::PI
                * (p.v_hz * m as f64 * t_o - p.tau_s * k as f64 * cfg.delta_f_hz);
            h += p.gain() * Complex64::from_polar(1.0, phase);
        }
        h
    })
}

/// Received communication matrix `Y_c = H o S_c + W_c` with i.i.d. complex
/// Gaussian noise of variance `sigma2_c`; `sigma2_c = 0` disables the noise.
pub fn comm_receive(
    s_c: &ComplexGrid,
    h: &ChannelGrid,
    sigma2_c: f64,
    seed: u64,
) -> Result<ComplexGrid> {
    if s_c.dims() != h.dims() {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", h.dims()),
            got: format!("{:?}", s_c.dims()),
        });
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let (m_sym, n_c) = s_c.dims();
    Ok(ComplexGrid::from_fn(m_sym, n_c, GridRole::Received, |m, k| {
        let noise = if sigma2_c > 0.0 {
            complex_gaussian(&mut rng, sigma2_c)
        } else {
            Complex64::new(0.0, 0.0)
        };
        h.at(m, k) * s_c.at(m, k) + noise
    }))
}

/// Frame sum rate `sum_{m,k} log2(1 + P_c(m,k) |H(m,k)|^2 / sigma2_c)` in bits.
pub fn achievable_rate(p_c: &PowerGrid, h: &ChannelGrid, sigma2_c: f64) -> Result<f64> {
    if p_c.dims() != h.dims() {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", h.dims()),
            got: format!("{:?}", p_c.dims()),
        });
    }
    let (m_sym, n_c) = p_c.dims();
    let mut rate = 0.0;
    for m in 0..m_sym {
        for k in 0..n_c {
            let p = p_c.at(m, k);
            if p < 0.0 {
                return Err(Error::Domain(format!(
                    "negative power {p} at RE ({m},{k})"
                )));
            }
            rate += (1.0 + p * h.at(m, k).norm_sqr() / sigma2_c).log2();
        }
    }
    Ok(rate)
}
