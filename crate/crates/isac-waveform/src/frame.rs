//! OFDM frame numerology, time-frequency grid containers, time-domain
//! synthesis and PAPR measurement.
//!
//! A frame is `m_sym` OFDM symbols by `n_c` subcarriers; the `(m, k)`-th cell
//! is one resource element (RE). Grids are stored row-major with the symbol
//! index `m` outermost.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;

/// Propagation speed used for all range/speed conversions (m/s).
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// OFDM numerology and the sensing limits it implies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameConfig {
    /// Carrier frequency (Hz).
    pub f_c_hz: f64,
    /// Subcarrier spacing (Hz).
    pub delta_f_hz: f64,
    /// Subcarriers per symbol.
    pub n_c: usize,
    /// OFDM symbols per frame.
    pub m_sym: usize,
    /// Cyclic-prefix duration (s).
    pub t_g_s: f64,
}

impl FrameConfig {
    pub fn new(f_c_hz: f64, delta_f_hz: f64, n_c: usize, m_sym: usize, t_g_s: f64) -> Result<Self> {
        if !(f_c_hz > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "carrier frequency must be positive, got {f_c_hz}"
            )));
        }
        if !(delta_f_hz > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "subcarrier spacing must be positive, got {delta_f_hz}"
            )));
        }
        if n_c < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 subcarriers, got {n_c}"
            )));
        }
        if m_sym < 1 {
            return Err(Error::InvalidConfig("need at least 1 OFDM symbol".into()));
        }
        if !(t_g_s >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "cyclic prefix duration must be nonnegative, got {t_g_s}"
            )));
        }
        Ok(Self {
            f_c_hz,
            delta_f_hz,
            n_c,
            m_sym,
            t_g_s,
        })
    }

    /// Core symbol duration `T = 1/delta_f` (s).
    pub fn symbol_core_duration(&self) -> f64 {
        1.0 / self.delta_f_hz
    }

    /// Total symbol duration `T_O = T + T_G` (s).
    pub fn symbol_total_duration(&self) -> f64 {
        self.symbol_core_duration() + self.t_g_s
    }

    /// Sampling period `T_s = T / n_c` (s).
    pub fn sample_period(&self) -> f64 {
        self.symbol_core_duration() / self.n_c as f64
    }

    /// Cyclic-prefix length in samples, rounded to the sample grid.
    pub fn cp_samples(&self) -> usize {
        (self.t_g_s / self.sample_period()).round() as usize
    }

    /// Maximum unambiguous distance `c T_G / 2` (m).
    pub fn max_distance_m(&self) -> f64 {
        SPEED_OF_LIGHT * self.t_g_s / 2.0
    }

    /// Maximum unambiguous radial speed `c / (4 f_c T_O)` (m/s).
    pub fn max_speed_mps(&self) -> f64 {
        SPEED_OF_LIGHT / (4.0 * self.f_c_hz * self.symbol_total_duration())
    }

    /// Total resource elements per frame.
    pub fn re_count(&self) -> usize {
        self.m_sym * self.n_c
    }

    /// Frame numerology of the reference evaluation setup: 240 GHz carrier,
    /// 240 kHz spacing, 128 subcarriers, 32 symbols, 1.0368 us cyclic prefix.
    pub fn reference() -> Self {
        Self {
            f_c_hz: 240.0e9,
            delta_f_hz: 240.0e3,
            n_c: 128,
            m_sym: 32,
            t_g_s: 1.0368e-6,
        }
    }
}

/// Role tag of a complex resource grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridRole {
    /// Full transmit matrix S.
    Transmit,
    /// Sensing component S_r = U o S.
    Sensing,
    /// Communication component S_c = (1-U) o S.
    Comm,
    /// Received communication matrix Y_c.
    Received,
    /// Echo spectrum Y_r.
    EchoSpectrum,
}

/// `m_sym x n_c` complex-valued grid, row-major with the symbol index outer.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid {
    m_sym: usize,
    n_c: usize,
    role: GridRole,
    data: Vec<Complex64>,
}

impl ComplexGrid {
    pub fn zeros(m_sym: usize, n_c: usize, role: GridRole) -> Self {
        Self {
            m_sym,
            n_c,
            role,
            data: vec![Complex64::new(0.0, 0.0); m_sym * n_c],
        }
    }

    pub fn from_fn(
        m_sym: usize,
        n_c: usize,
        role: GridRole,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        let mut g = Self::zeros(m_sym, n_c, role);
        for m in 0..m_sym {
            for k in 0..n_c {
                g.data[m * n_c + k] = f(m, k);
            }
        }
        g
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m_sym, self.n_c)
    }

    pub fn role(&self) -> GridRole {
        self.role
    }

    pub fn with_role(mut self, role: GridRole) -> Self {
        self.role = role;
        self
    }

    pub fn at(&self, m: usize, k: usize) -> Complex64 {
        self.data[m * self.n_c + k]
    }

    pub fn set(&mut self, m: usize, k: usize, value: Complex64) {
        self.data[m * self.n_c + k] = value;
    }

    pub fn row(&self, m: usize) -> &[Complex64] {
        &self.data[m * self.n_c..(m + 1) * self.n_c]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Element-wise |.|^2 of the grid.
    pub fn power(&self) -> PowerGrid {
        PowerGrid {
            m_sym: self.m_sym,
            n_c: self.n_c,
            data: self.data.iter().map(|s| s.norm_sqr()).collect(),
        }
    }
}

/// `m_sym x n_c` grid of nonnegative linear powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerGrid {
    m_sym: usize,
    n_c: usize,
    data: Vec<f64>,
}

impl PowerGrid {
    pub fn zeros(m_sym: usize, n_c: usize) -> Self {
        Self {
            m_sym,
            n_c,
            data: vec![0.0; m_sym * n_c],
        }
    }

    pub fn uniform(m_sym: usize, n_c: usize, total: f64) -> Self {
        let per_cell = total / (m_sym * n_c) as f64;
        Self {
            m_sym,
            n_c,
            data: vec![per_cell; m_sym * n_c],
        }
    }

    pub fn from_fn(m_sym: usize, n_c: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut g = Self::zeros(m_sym, n_c);
        for m in 0..m_sym {
            for k in 0..n_c {
                g.data[m * n_c + k] = f(m, k);
            }
        }
        g
    }

    pub fn from_vec(m_sym: usize, n_c: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != m_sym * n_c {
            return Err(Error::DimensionMismatch {
                expected: format!("{} cells", m_sym * n_c),
                got: format!("{}", data.len()),
            });
        }
        Ok(Self { m_sym, n_c, data })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m_sym, self.n_c)
    }

    pub fn at(&self, m: usize, k: usize) -> f64 {
        self.data[m * self.n_c + k]
    }

    pub fn set(&mut self, m: usize, k: usize, value: f64) {
        self.data[m * self.n_c + k] = value;
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.data[m * self.n_c..(m + 1) * self.n_c]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Keeps entries where `u` is set, zeroes the rest.
    pub fn masked(&self, u: &IndicatorGrid) -> PowerGrid {
        debug_assert_eq!(self.dims(), u.dims());
        PowerGrid {
            m_sym: self.m_sym,
            n_c: self.n_c,
            data: self
                .data
                .iter()
                .zip(u.data.iter())
                .map(|(&p, &sel)| if sel { p } else { 0.0 })
                .collect(),
        }
    }
}

/// Binary selector grid: `true` marks a sensing RE, `false` a communication RE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorGrid {
    m_sym: usize,
    n_c: usize,
    data: Vec<bool>,
}

impl IndicatorGrid {
    pub fn filled(m_sym: usize, n_c: usize, value: bool) -> Self {
        Self {
            m_sym,
            n_c,
            data: vec![value; m_sym * n_c],
        }
    }

    pub fn from_fn(m_sym: usize, n_c: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Self::filled(m_sym, n_c, false);
        for m in 0..m_sym {
            for k in 0..n_c {
                g.data[m * n_c + k] = f(m, k);
            }
        }
        g
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m_sym, self.n_c)
    }

    pub fn at(&self, m: usize, k: usize) -> bool {
        self.data[m * self.n_c + k]
    }

    pub fn set(&mut self, m: usize, k: usize, value: bool) {
        self.data[m * self.n_c + k] = value;
    }

    pub fn row(&self, m: usize) -> &[bool] {
        &self.data[m * self.n_c..(m + 1) * self.n_c]
    }

    /// Number of sensing REs.
    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }
}

/// Normalization convention of a synthesized sequence.
///
/// `Unit` carries the 1/sqrt(N_c) factor of the sampled transmit sequence;
/// `Raw` drops it, which is the convention the delay-Doppler analysis uses so
/// that the ambiguity mainlobe equals `N_c` times the total sensing power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    Unit,
    Raw,
}

/// Discrete complex baseband sequence for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<Complex64>,
    with_cp: bool,
    normalization: Normalization,
    sample_period: f64,
}

impl TimeSeries {
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn with_cp(&self) -> bool {
        self.with_cp
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    pub fn from_samples(
        samples: Vec<Complex64>,
        with_cp: bool,
        normalization: Normalization,
        sample_period: f64,
    ) -> Self {
        Self {
            samples,
            with_cp,
            normalization,
            sample_period,
        }
    }
}

fn check_dims(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", a.0, a.1),
            got: format!("{}x{}", b.0, b.1),
        });
    }
    Ok(())
}

/// Splits the transmit grid into its sensing and communication components:
/// `s_r = u o s` and `s_c = (1-u) o s`, so that `s_r + s_c = s` exactly.
pub fn split_grid(s: &ComplexGrid, u: &IndicatorGrid) -> Result<(ComplexGrid, ComplexGrid)> {
    check_dims(s.dims(), u.dims())?;
    let (m_sym, n_c) = s.dims();
    let mut s_r = ComplexGrid::zeros(m_sym, n_c, GridRole::Sensing);
    let mut s_c = ComplexGrid::zeros(m_sym, n_c, GridRole::Comm);
    for m in 0..m_sym {
        for k in 0..n_c {
            if u.at(m, k) {
                s_r.set(m, k, s.at(m, k));
            } else {
                s_c.set(m, k, s.at(m, k));
            }
        }
    }
    Ok((s_r, s_c))
}

/// Synthesizes the discrete time-domain sequence of a resource grid.
///
/// Per symbol `m` the core samples are
/// `x_m(n) = norm * sum_k S(m,k) e^{j 2 pi k n / N_c}`, `n = 0..N_c-1`,
/// with `norm` either `1/sqrt(N_c)` (`Unit`) or `1` (`Raw`). With `with_cp`
/// the last `cp_samples` of each symbol are prepended as a cyclic prefix.
pub fn synthesize(
    s: &ComplexGrid,
    cfg: &FrameConfig,
    with_cp: bool,
    normalization: Normalization,
) -> Result<TimeSeries> {
    check_dims((cfg.m_sym, cfg.n_c), s.dims())?;
    let n_c = cfg.n_c;
    let n_cp = if with_cp { cfg.cp_samples() } else { 0 };
    let norm = match normalization {
        Normalization::Unit => 1.0 / (n_c as f64).sqrt(),
        Normalization::Raw => 1.0,
    };
    let mut samples = Vec::with_capacity(cfg.m_sym * (n_c + n_cp));
    let mut core = vec![Complex64::new(0.0, 0.0); n_c];
    for m in 0..cfg.m_sym {
        core.copy_from_slice(s.row(m));
        fft::ifft_inplace(&mut core);
        for v in core.iter_mut() {
            *v *= norm;
        }
        if with_cp {
            samples.extend_from_slice(&core[n_c - n_cp..]);
        }
        samples.extend_from_slice(&core);
    }
    Ok(TimeSeries {
        samples,
        with_cp,
        normalization,
        sample_period: cfg.sample_period(),
    })
}

/// PAPR in dB of the sensing sequence of one OFDM symbol:
/// peak over `n = 0..N_c-1` of the instantaneous power of
/// `sum_k U(m,k) sqrt(P_r(m,k)) e^{j(theta_k - 2 pi n k / N_c)}`
/// over the mean sensing power of the row.
pub fn papr_db(phases: &[f64], p_r_row: &[f64], u_row: &[bool]) -> Result<f64> {
    let n_c = u_row.len();
    if phases.len() != n_c || p_r_row.len() != n_c {
        return Err(Error::DimensionMismatch {
            expected: format!("{n_c} entries"),
            got: format!("{} phases, {} powers", phases.len(), p_r_row.len()),
        });
    }
    let mean_power: f64 = (0..n_c).filter(|&k| u_row[k]).map(|k| p_r_row[k]).sum();
    if mean_power <= 0.0 {
        return Err(Error::UndefinedPapr);
    }
    let mut spectrum: Vec<Complex64> = (0..n_c)
        .map(|k| {
            if u_row[k] {
                Complex64::from_polar(p_r_row[k].max(0.0).sqrt(), phases[k])
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    fft::fft_inplace(&mut spectrum);
    let peak = spectrum
        .iter()
        .map(|c| c.norm_sqr())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(10.0 * (peak / mean_power).log10())
}
