//! Auto-ambiguity functions of the OFDM sensing sequence, the delay-Doppler
//! function gamma dual to the sensing power grid, region-of-interest
//! construction, and the peak-to-sidelobe ratio.
//!
//! All delay-Doppler quantities live on the centered index set
//! `Omega = [-floor(M/2) .. M-1-floor(M/2)] x [-floor(N_c/2) .. N_c-1-floor(N_c/2)]`.
//! Storage is in DFT-bin order; the public accessors take centered indices and
//! wrap them modularly.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::frame::{FrameConfig, Normalization, PowerGrid, TimeSeries, SPEED_OF_LIGHT};

/// Default cell-count cap for the quadratic-cost exact ambiguity evaluation.
pub const EXACT_AAF_DEFAULT_CAP: usize = 8192;

/// Maps a centered index to its DFT bin.
pub(crate) fn bin_of(centered: i64, n: usize) -> usize {
    centered.rem_euclid(n as i64) as usize
}

/// Maps a DFT bin to its centered index in `[-floor(n/2), n-1-floor(n/2)]`.
pub(crate) fn centered_of(bin: usize, n: usize) -> i64 {
    let half = (n / 2) as i64;
    let b = bin as i64;
    if b <= n as i64 - 1 - half {
        b
    } else {
        b - n as i64
    }
}

/// Centered index range of an axis of length `n`.
pub fn centered_range(n: usize) -> impl Iterator<Item = i64> {
    let half = (n / 2) as i64;
    -half..=(n as i64 - 1 - half)
}

/// Mirror of a centered index pair: `(-nu, -mu)` wrapped back into range.
pub fn mirror(nu: i64, mu: i64, m_sym: usize, n_c: usize) -> (i64, i64) {
    (
        centered_of(bin_of(-nu, m_sym), m_sym),
        centered_of(bin_of(-mu, n_c), n_c),
    )
}

/// Status of one gamma cell under a region-of-interest template.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    /// Value pinned by the RoI template; never modified by enforcement.
    Fixed,
    /// Canonical optimization cell.
    Free,
    /// Determined as the conjugate of its mirror partner.
    Mirrored,
}

/// The delay-Doppler function gamma on the centered grid, with a per-cell
/// status mask distinguishing pinned RoI cells from free cells and their
/// conjugate mirrors.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaGrid {
    m_sym: usize,
    n_c: usize,
    data: Vec<Complex64>,
    status: Vec<CellStatus>,
}

impl GammaGrid {
    fn canonical_status(m_sym: usize, n_c: usize) -> Vec<CellStatus> {
        let mut status = vec![CellStatus::Free; m_sym * n_c];
        for r in 0..m_sym {
            for c in 0..n_c {
                let (nu, mu) = (centered_of(r, m_sym), centered_of(c, n_c));
                let (nu_m, mu_m) = mirror(nu, mu, m_sym, n_c);
                let here = r * n_c + c;
                let there = bin_of(nu_m, m_sym) * n_c + bin_of(mu_m, n_c);
                if there < here {
                    status[here] = CellStatus::Mirrored;
                }
            }
        }
        status
    }

    /// Plain grid holding `values` in bin order, with a canonical free/mirror
    /// mask and no pinned cells.
    pub fn from_bins(m_sym: usize, n_c: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != m_sym * n_c {
            return Err(Error::DimensionMismatch {
                expected: format!("{} cells", m_sym * n_c),
                got: format!("{}", data.len()),
            });
        }
        Ok(Self {
            m_sym,
            n_c,
            status: Self::canonical_status(m_sym, n_c),
            data,
        })
    }

    /// All-zero grid with the canonical mask.
    pub fn zeros(m_sym: usize, n_c: usize) -> Self {
        Self {
            m_sym,
            n_c,
            data: vec![Complex64::new(0.0, 0.0); m_sym * n_c],
            status: Self::canonical_status(m_sym, n_c),
        }
    }

    /// RoI template: gamma(0,0) pinned to `p_bar_r`, zero on the rest of
    /// `Omega_s` and on its mirror image; all remaining cells free (or
    /// mirrors of free cells).
    pub fn roi_template(roi: &Roi, p_bar_r: f64) -> Self {
        let (m_sym, n_c) = (roi.m_sym, roi.n_c);
        let mut g = Self::zeros(m_sym, n_c);
        for (nu, mu) in roi.omega_s_cells() {
            let idx = g.index_of(nu, mu);
            g.status[idx] = CellStatus::Fixed;
            g.data[idx] = if (nu, mu) == (0, 0) {
                Complex64::new(p_bar_r, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        // Mirrors of pinned cells carry the conjugate values; everything else
        // keeps the canonical free/mirror split.
        for (nu, mu) in roi.omega_s_cells() {
            let (nu_m, mu_m) = mirror(nu, mu, m_sym, n_c);
            let idx = g.index_of(nu_m, mu_m);
            if g.status[idx] != CellStatus::Fixed {
                g.status[idx] = CellStatus::Mirrored;
                g.data[idx] = g.at(nu, mu).conj();
            }
        }
        g
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m_sym, self.n_c)
    }

    fn index_of(&self, nu: i64, mu: i64) -> usize {
        bin_of(nu, self.m_sym) * self.n_c + bin_of(mu, self.n_c)
    }

    pub fn at(&self, nu: i64, mu: i64) -> Complex64 {
        self.data[self.index_of(nu, mu)]
    }

    pub fn set(&mut self, nu: i64, mu: i64, value: Complex64) {
        let idx = self.index_of(nu, mu);
        self.data[idx] = value;
    }

    pub fn status_at(&self, nu: i64, mu: i64) -> CellStatus {
        self.status[self.index_of(nu, mu)]
    }

    pub fn set_status(&mut self, nu: i64, mu: i64, status: CellStatus) {
        let idx = self.index_of(nu, mu);
        self.status[idx] = status;
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest |gamma| over the RoI cells other than the origin.
    pub fn roi_sidelobe_max(&self, roi: &Roi) -> f64 {
        roi.sidelobe_cells()
            .map(|(nu, mu)| self.at(nu, mu).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn bins(&self) -> &[Complex64] {
        &self.data
    }
}

/// Transforms a power grid into its delay-Doppler dual:
/// `gamma(nu,mu) = sum_{m,k} P(m,k) e^{-j2pi mu k/N_c} e^{j2pi nu m/M}`.
/// The origin cell equals the total power exactly.
pub fn gamma_from_power(p: &PowerGrid) -> GammaGrid {
    let (m_sym, n_c) = p.dims();
    let fft = Fft2::new(m_sym, n_c);
    let mut data: Vec<Complex64> = p
        .as_slice()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    fft.fft_rows(&mut data);
    fft.ifft_cols(&mut data);
    GammaGrid::from_bins(m_sym, n_c, data).expect("dims agree")
}

/// Inverse transform of [`gamma_from_power`] with the imaginary residue of
/// the result reported alongside the real part.
#[derive(Debug, Clone)]
pub struct PowerInversion {
    pub power: PowerGrid,
    /// Largest |Im| over all cells before the real part was taken.
    pub imag_residue: f64,
}

/// Recovers the sensing power grid from gamma:
/// `P(m,k) = 1/(M N_c) sum_{nu,mu} gamma(nu,mu) e^{j2pi mu k/N_c} e^{-j2pi nu m/M}`.
pub fn power_from_gamma(g: &GammaGrid) -> PowerInversion {
    let (m_sym, n_c) = g.dims();
    let fft = Fft2::new(m_sym, n_c);
    let mut data = g.bins().to_vec();
    fft.ifft_rows(&mut data);
    fft.fft_cols(&mut data);
    let scale = 1.0 / (m_sym * n_c) as f64;
    let mut imag_residue = 0.0_f64;
    let mut power = PowerGrid::zeros(m_sym, n_c);
    for m in 0..m_sym {
        for k in 0..n_c {
            let v = data[m * n_c + k] * scale;
            imag_residue = imag_residue.max(v.im.abs());
            power.set(m, k, v.re);
        }
    }
    PowerInversion {
        power,
        imag_residue,
    }
}

/// [`power_from_gamma`] that fails when the grid was not centrohermitian:
/// the imaginary residue is compared against `tol_rel * ||gamma||`.
pub fn power_from_gamma_checked(g: &GammaGrid, tol_rel: f64) -> Result<PowerGrid> {
    let inv = power_from_gamma(g);
    let tolerance = tol_rel * g.frobenius_norm();
    if inv.imag_residue > tolerance {
        return Err(Error::SymmetryViolation {
            residue: inv.imag_residue,
            tolerance,
        });
    }
    Ok(inv.power)
}

/// Restores `gamma(nu,mu) = conj(gamma(-nu,-mu))`.
///
/// Mirrored cells are overwritten with the conjugate of their partner, free
/// self-paired cells are made real, and pinned cells are never modified;
/// two pinned mirror cells with inconsistent values are an error.
pub fn enforce_centrohermitian(g: &GammaGrid) -> Result<GammaGrid> {
    let (m_sym, n_c) = g.dims();
    let mut out = g.clone();
    let scale = g.frobenius_norm().max(1.0) * 1e-12;
    for nu in centered_range(m_sym) {
        for mu in centered_range(n_c) {
            let (nu_m, mu_m) = mirror(nu, mu, m_sym, n_c);
            if (nu_m, mu_m) == (nu, mu) {
                // Self-paired cell must be real.
                let v = g.at(nu, mu);
                match g.status_at(nu, mu) {
                    CellStatus::Fixed => {
                        if v.im.abs() > scale {
                            return Err(Error::InconsistentFixedCells {
                                nu,
                                mu,
                                nu_m,
                                mu_m,
                            });
                        }
                    }
                    _ => out.set(nu, mu, Complex64::new(v.re, 0.0)),
                }
                continue;
            }
            if (nu_m, mu_m) < (nu, mu) {
                continue; // handled when visiting the partner
            }
            let a = g.at(nu, mu);
            let b = g.at(nu_m, mu_m);
            match (g.status_at(nu, mu), g.status_at(nu_m, mu_m)) {
                (CellStatus::Fixed, CellStatus::Fixed) => {
                    if (a - b.conj()).norm() > scale {
                        return Err(Error::InconsistentFixedCells {
                            nu,
                            mu,
                            nu_m,
                            mu_m,
                        });
                    }
                }
                (CellStatus::Fixed, _) => out.set(nu_m, mu_m, a.conj()),
                (_, CellStatus::Fixed) => out.set(nu, mu, b.conj()),
                (CellStatus::Free, CellStatus::Mirrored) => out.set(nu_m, mu_m, a.conj()),
                (CellStatus::Mirrored, CellStatus::Free) => out.set(nu, mu, b.conj()),
                _ => {
                    // Free pair without a canonical side: symmetrize.
                    let avg = (a + b.conj()) * 0.5;
                    out.set(nu, mu, avg);
                    out.set(nu_m, mu_m, avg.conj());
                }
            }
        }
    }
    Ok(out)
}

/// The delay-axis Dirichlet factor
/// `eta(nu) = sum_{n=0}^{N_c-1} e^{j2pi nu n/(M N_c)}` at a centered Doppler
/// index, in closed form.
pub fn eta(m_sym: usize, n_c: usize, nu: i64) -> Complex64 {
    if nu == 0 {
        return Complex64::new(n_c as f64, 0.0);
    }
    let x = std::f64::consts::PI * nu as f64 / (m_sym * n_c) as f64;
    let magnitude = (x * n_c as f64).sin() / x.sin();
    Complex64::from_polar(1.0, x * (n_c as f64 - 1.0)) * magnitude
}

/// Provenance of an ambiguity surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Exact,
    Approx,
}

/// Auto-ambiguity values over the centered grid.
#[derive(Debug, Clone)]
pub struct AmbiguitySurface {
    m_sym: usize,
    n_c: usize,
    data: Vec<Complex64>,
    provenance: Provenance,
    /// Per-Doppler-row Dirichlet factor, present on approximate surfaces.
    eta_by_row: Option<Vec<Complex64>>,
}

impl AmbiguitySurface {
    pub fn dims(&self) -> (usize, usize) {
        (self.m_sym, self.n_c)
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn at(&self, nu: i64, mu: i64) -> Complex64 {
        self.data[bin_of(nu, self.m_sym) * self.n_c + bin_of(mu, self.n_c)]
    }

    /// The stored Dirichlet factor for a centered Doppler index, when present.
    pub fn eta_at(&self, nu: i64) -> Option<Complex64> {
        self.eta_by_row
            .as_ref()
            .map(|v| v[bin_of(nu, self.m_sym)])
    }

    /// Writes `nu,mu,abs,arg` rows over the centered grid.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "nu,mu,abs,arg")?;
        for nu in centered_range(self.m_sym) {
            for mu in centered_range(self.n_c) {
                let v = self.at(nu, mu);
                writeln!(w, "{},{},{},{}", nu, mu, v.norm(), v.arg())?;
            }
        }
        Ok(())
    }

    /// Writes the surface row-major over the centered grid as little-endian
    /// f64 (re, im) pairs.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        for nu in centered_range(self.m_sym) {
            for mu in centered_range(self.n_c) {
                let v = self.at(nu, mu);
                w.write_all(&v.re.to_le_bytes())?;
                w.write_all(&v.im.to_le_bytes())?;
            }
        }
        Ok(())
    }
}

/// Approximate auto-ambiguity function `chi(nu,mu) = gamma(nu,mu) eta(nu)`.
/// The mainlobe is `chi(0,0) = N_c * sum(P)`.
pub fn approx_aaf(p: &PowerGrid) -> AmbiguitySurface {
    let gamma = gamma_from_power(p);
    let (m_sym, n_c) = gamma.dims();
    let eta_by_row: Vec<Complex64> = (0..m_sym)
        .map(|r| eta(m_sym, n_c, centered_of(r, m_sym)))
        .collect();
    let data = gamma
        .bins()
        .iter()
        .enumerate()
        .map(|(i, &g)| g * eta_by_row[i / n_c])
        .collect();
    AmbiguitySurface {
        m_sym,
        n_c,
        data,
        provenance: Provenance::Approx,
        eta_by_row: Some(eta_by_row),
    }
}

/// Exact auto-ambiguity of a raw, CP-free sequence under the CP-protected
/// per-symbol model: the per-symbol circular correlation
/// `chi(nu,mu) = sum_m sum_n x_m(n) conj(x_m((n+mu) mod N_c)) e^{j2pi nu (m N_c + n)/(M N_c)}`.
///
/// Cost is O((M N_c)^2); grids larger than `cap` cells are refused.
pub fn exact_aaf(x: &TimeSeries, cfg: &FrameConfig, cap: usize) -> Result<AmbiguitySurface> {
    if x.with_cp() {
        return Err(Error::Domain(
            "exact ambiguity needs a CP-free sequence".into(),
        ));
    }
    if x.normalization() != Normalization::Raw {
        return Err(Error::Domain(
            "exact ambiguity needs the raw normalization".into(),
        ));
    }
    let (m_sym, n_c) = (cfg.m_sym, cfg.n_c);
    if x.samples().len() != m_sym * n_c {
        return Err(Error::DimensionMismatch {
            expected: format!("{} samples", m_sym * n_c),
            got: format!("{}", x.samples().len()),
        });
    }
    let cells = m_sym * n_c;
    if cells > cap {
        return Err(Error::SizeGuard { cells, cap });
    }

    let samples = x.samples();
    let total = (m_sym * n_c) as f64;
    let rows: Vec<Vec<Complex64>> = (0..m_sym)
        .into_par_iter()
        .map(|r| {
            let nu = centered_of(r, m_sym);
            // Doppler phase per global sample index.
            let phases: Vec<Complex64> = (0..m_sym * n_c)
                .map(|n| {
                    Complex64::from_polar(
                        1.0,
                        2.0 * std::f64::consts::PI * nu as f64 * n as f64 / total,
                    )
                })
                .collect();
            let mut row = vec![Complex64::new(0.0, 0.0); n_c];
            for (c, cell) in row.iter_mut().enumerate() {
                let mu = centered_of(c, n_c);
                let shift = bin_of(mu, n_c);
                let mut acc = Complex64::new(0.0, 0.0);
                for m in 0..m_sym {
                    let base = m * n_c;
                    for n in 0..n_c {
                        let lagged = samples[base + (n + shift) % n_c];
                        acc += samples[base + n] * lagged.conj() * phases[base + n];
                    }
                }
                *cell = acc;
            }
            row
        })
        .collect();
    let mut data = Vec::with_capacity(m_sym * n_c);
    for row in rows {
        data.extend(row);
    }
    Ok(AmbiguitySurface {
        m_sym,
        n_c,
        data,
        provenance: Provenance::Exact,
        eta_by_row: None,
    })
}

/// Region of interest in the delay-Doppler plane.
///
/// `Omega_s` spans Doppler indices `[-floor(M/2a) .. M/a-1-floor(M/2a)]` and
/// delay indices `[0 .. N_c/b-1-floor(N_c/2b)]`, where `a | M` and `b | N_c`
/// are the largest divisors whose implied speed and distance coverages still
/// contain the requested scopes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Roi {
    m_sym: usize,
    n_c: usize,
    pub a: usize,
    pub b: usize,
}

fn divisors_desc(n: usize) -> Vec<usize> {
    let mut d: Vec<usize> = (1..=n).filter(|x| n % x == 0).collect();
    d.reverse();
    d
}

/// Builds the RoI for distance scope `[0, d0]` (m) and speed scope
/// `[-u0, u0]` (m/s).
pub fn make_roi(cfg: &FrameConfig, d0_m: f64, u0_mps: f64) -> Result<Roi> {
    if !(0.0..cfg.max_distance_m()).contains(&d0_m) {
        return Err(Error::Scope(format!(
            "distance scope {d0_m} m outside [0, {:.3} m)",
            cfg.max_distance_m()
        )));
    }
    if !(0.0..cfg.max_speed_mps()).contains(&u0_mps) {
        return Err(Error::Scope(format!(
            "speed scope {u0_mps} m/s outside [0, {:.3} m/s)",
            cfg.max_speed_mps()
        )));
    }
    let t_o = cfg.symbol_total_duration();
    // a controls the speed coverage c/(4 a f_c T_O); b the distance coverage
    // c/(2 b delta_f).
    let a = divisors_desc(cfg.m_sym)
        .into_iter()
        .find(|&a| SPEED_OF_LIGHT / (4.0 * a as f64 * cfg.f_c_hz * t_o) >= u0_mps)
        .expect("a = 1 always qualifies");
    let b = divisors_desc(cfg.n_c)
        .into_iter()
        .find(|&b| SPEED_OF_LIGHT / (2.0 * b as f64 * cfg.delta_f_hz) >= d0_m)
        .expect("b = 1 always qualifies");
    Ok(Roi {
        m_sym: cfg.m_sym,
        n_c: cfg.n_c,
        a,
        b,
    })
}

impl Roi {
    /// RoI with explicit divisors; `a` must divide `M` and `b` divide `N_c`.
    pub fn with_divisors(m_sym: usize, n_c: usize, a: usize, b: usize) -> Result<Self> {
        if a == 0 || m_sym % a != 0 {
            return Err(Error::InvalidConfig(format!("{a} does not divide {m_sym}")));
        }
        if b == 0 || n_c % b != 0 {
            return Err(Error::InvalidConfig(format!("{b} does not divide {n_c}")));
        }
        Ok(Self { m_sym, n_c, a, b })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m_sym, self.n_c)
    }

    /// Centered Doppler index bounds of `Omega_s` (inclusive).
    pub fn doppler_bounds(&self) -> (i64, i64) {
        let span = self.m_sym / self.a;
        let half = (span / 2) as i64;
        (-half, span as i64 - 1 - half)
    }

    /// Centered delay index bounds of `Omega_s` (inclusive); delays start at 0.
    pub fn delay_bounds(&self) -> (i64, i64) {
        let span = self.n_c / self.b;
        let half = (span / 2) as i64;
        (0, span as i64 - 1 - half)
    }

    pub fn contains(&self, nu: i64, mu: i64) -> bool {
        let (nu_lo, nu_hi) = self.doppler_bounds();
        let (mu_lo, mu_hi) = self.delay_bounds();
        nu >= nu_lo && nu <= nu_hi && mu >= mu_lo && mu <= mu_hi
    }

    /// All cells of `Omega_s`.
    pub fn omega_s_cells(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let (nu_lo, nu_hi) = self.doppler_bounds();
        let (mu_lo, mu_hi) = self.delay_bounds();
        (nu_lo..=nu_hi).flat_map(move |nu| (mu_lo..=mu_hi).map(move |mu| (nu, mu)))
    }

    /// `Omega_s` without the origin.
    pub fn sidelobe_cells(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.omega_s_cells().filter(|&(nu, mu)| (nu, mu) != (0, 0))
    }

    /// The upper half-plane `Omega_r`: every Doppler row, nonnegative delays.
    pub fn omega_r_cells(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let mu_hi = self.n_c as i64 - 1 - (self.n_c / 2) as i64;
        centered_range(self.m_sym).flat_map(move |nu| (0..=mu_hi).map(move |mu| (nu, mu)))
    }

    /// The free cells `Omega_x = Omega_r \ Omega_s`.
    pub fn omega_x_cells(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.omega_r_cells()
            .filter(move |&(nu, mu)| !self.contains(nu, mu))
    }
}

/// Peak-to-sidelobe ratio within the RoI, in dB:
/// `20 log10(|chi(0,0)| / max_{RoI \ (0,0)} |chi|)`.
///
/// Returns `f64::INFINITY` when every RoI sidelobe is exactly zero.
pub fn pslr_db(chi: &AmbiguitySurface, roi: &Roi) -> Result<f64> {
    if chi.dims() != roi.dims() {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", roi.dims()),
            got: format!("{:?}", chi.dims()),
        });
    }
    let mut worst = 0.0_f64;
    let mut any = false;
    for (nu, mu) in roi.sidelobe_cells() {
        any = true;
        worst = worst.max(chi.at(nu, mu).norm());
    }
    if !any {
        return Err(Error::Domain(
            "RoI holds no cell beyond the origin".into(),
        ));
    }
    let main = chi.at(0, 0).norm();
    if worst == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(20.0 * (main / worst).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{ComplexGrid, GridRole};
    use crate::oracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn random_power(m_sym: usize, n_c: usize, seed: u64) -> PowerGrid {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        PowerGrid::from_fn(m_sym, n_c, |_, _| rng.gen_range(0.0..1.0))
    }

    #[test]
    fn gamma_of_uniform_power_is_a_delta() {
        let p = PowerGrid::uniform(4, 8, 3.5);
        let g = gamma_from_power(&p);
        assert!((g.at(0, 0) - Complex64::new(3.5, 0.0)).norm() < 1e-12);
        for nu in centered_range(4) {
            for mu in centered_range(8) {
                if (nu, mu) != (0, 0) {
                    assert!(g.at(nu, mu).norm() < 1e-12, "cell ({nu},{mu})");
                }
            }
        }
    }

    #[test]
    fn gamma_of_impulse_is_all_ones() {
        let mut p = PowerGrid::zeros(4, 8);
        p.set(0, 0, 1.0);
        let g = gamma_from_power(&p);
        for nu in centered_range(4) {
            for mu in centered_range(8) {
                assert!((g.at(nu, mu) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gamma_matches_direct_double_sum() {
        let p = random_power(4, 8, 17);
        let g = gamma_from_power(&p);
        for &(nu, mu) in &[(0i64, 0i64), (1, -3), (-2, 4), (1, 2), (-1, -4), (0, 3)] {
            let expect = oracle::gamma_cell(&p, nu, mu);
            assert!(
                (g.at(nu, mu) - expect).norm() < 1e-10,
                "cell ({nu},{mu}): {} vs {expect}",
                g.at(nu, mu)
            );
        }
    }

    #[test]
    fn inverse_of_origin_delta_is_uniform() {
        let mut g = GammaGrid::zeros(4, 8);
        g.set(0, 0, Complex64::new(2.0, 0.0));
        let inv = power_from_gamma(&g);
        for m in 0..4 {
            for k in 0..8 {
                assert!((inv.power.at(m, k) - 2.0 / 32.0).abs() < 1e-12);
            }
        }
        assert!(inv.imag_residue < 1e-14);
    }

    #[test]
    fn duality_round_trip_is_identity() {
        for seed in 0..5 {
            let p = random_power(8, 16, seed);
            let inv = power_from_gamma(&gamma_from_power(&p));
            let scale = p.total();
            for m in 0..8 {
                for k in 0..16 {
                    assert!((inv.power.at(m, k) - p.at(m, k)).abs() < 1e-10 * scale.max(1.0));
                }
            }
        }
    }

    #[test]
    fn centrohermitian_grid_inverts_to_real_power() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let mut g = GammaGrid::zeros(4, 8);
        for nu in centered_range(4) {
            for mu in centered_range(8) {
                g.set(
                    nu,
                    mu,
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                );
            }
        }
        let g = enforce_centrohermitian(&g).unwrap();
        let inv = power_from_gamma(&g);
        assert!(inv.imag_residue <= 1e-10 * g.frobenius_norm());
        assert!(power_from_gamma_checked(&g, 1e-10).is_ok());
    }

    #[test]
    fn symmetry_enforcement_sets_conjugate_mirror() {
        let mut g = GammaGrid::zeros(4, 8);
        g.set(1, 1, Complex64::new(0.0, 1.0));
        g.set_status(1, 1, CellStatus::Free);
        g.set_status(-1, -1, CellStatus::Mirrored);
        let out = enforce_centrohermitian(&g).unwrap();
        assert!((out.at(-1, -1) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(out.at(1, 1), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn symmetric_real_grid_is_unchanged() {
        let p = random_power(4, 8, 23);
        let g = gamma_from_power(&p);
        let out = enforce_centrohermitian(&g).unwrap();
        for nu in centered_range(4) {
            for mu in centered_range(8) {
                assert!((out.at(nu, mu) - g.at(nu, mu)).norm() < 1e-9 * g.frobenius_norm());
            }
        }
    }

    #[test]
    fn approx_mainlobe_equals_nc_times_total_power() {
        for seed in 0..10 {
            let p = random_power(4, 8, 100 + seed);
            let chi = approx_aaf(&p);
            let expect = 8.0 * p.total();
            assert!((chi.at(0, 0).norm() - expect).abs() < 1e-9 * expect);
        }
    }

    #[test]
    fn approx_of_uniform_power_has_zero_roi_sidelobes() {
        let p = PowerGrid::uniform(4, 8, 2.0);
        let chi = approx_aaf(&p);
        for nu in centered_range(4) {
            for mu in centered_range(8) {
                if (nu, mu) != (0, 0) && nu == 0 {
                    assert!(chi.at(nu, mu).norm() < 1e-10);
                }
                if nu != 0 {
                    // gamma vanishes off the origin for uniform power
                    assert!(chi.at(nu, mu).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn approx_matches_naive_gamma_eta_product() {
        let p = random_power(4, 8, 7);
        let chi = approx_aaf(&p);
        for nu in centered_range(4) {
            for mu in centered_range(8) {
                let expect = oracle::gamma_cell(&p, nu, mu) * oracle::eta_cell(4, 8, nu);
                assert!(
                    (chi.at(nu, mu) - expect).norm() < 1e-10 * p.total().max(1.0),
                    "cell ({nu},{mu})"
                );
            }
        }
    }

    fn random_qpsk(m_sym: usize, n_c: usize, seed: u64) -> ComplexGrid {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        ComplexGrid::from_fn(m_sym, n_c, GridRole::Sensing, |_, _| {
            let q: u8 = rng.gen_range(0..4);
            Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_2 * q as f64)
        })
    }

    #[test]
    fn exact_mainlobe_is_zero_lag_energy() {
        let cfg = FrameConfig::new(1.0e9, 1.0e6, 8, 1, 0.0).unwrap();
        let s = random_qpsk(1, 8, 3);
        let x = crate::frame::synthesize(&s, &cfg, false, Normalization::Raw).unwrap();
        let chi = exact_aaf(&x, &cfg, EXACT_AAF_DEFAULT_CAP).unwrap();
        let total_power: f64 = s.as_slice().iter().map(|v| v.norm_sqr()).sum();
        assert!((chi.at(0, 0).re - 8.0 * total_power).abs() < 1e-9 * total_power);
        assert!(chi.at(0, 0).im.abs() < 1e-9 * total_power);
    }

    #[test]
    fn exact_single_tone_row_is_flat_under_cyclic_model() {
        // Per-symbol circular correlation keeps |chi(0, mu)| = M N_c P for a
        // single active subcarrier; the triangular profile belongs to the
        // linear-correlation variant, exercised in the oracle tests.
        let cfg = FrameConfig::new(1.0e9, 1.0e6, 8, 2, 0.0).unwrap();
        let mut s = ComplexGrid::zeros(2, 8, GridRole::Sensing);
        s.set(0, 3, Complex64::new(2.0, 0.0));
        s.set(1, 3, Complex64::new(2.0, 0.0));
        let x = crate::frame::synthesize(&s, &cfg, false, Normalization::Raw).unwrap();
        let chi = exact_aaf(&x, &cfg, EXACT_AAF_DEFAULT_CAP).unwrap();
        for mu in centered_range(8) {
            let expect = 2.0 * 8.0 * 4.0;
            assert!(
                (chi.at(0, mu).norm() - expect).abs() < 1e-9 * expect,
                "mu = {mu}"
            );
        }
    }

    #[test]
    fn exact_minus_approx_equals_cross_terms() {
        for seed in 0..3 {
            let cfg = FrameConfig::new(1.0e9, 1.0e6, 8, 4, 0.0).unwrap();
            let s = random_qpsk(4, 8, 40 + seed);
            let x = crate::frame::synthesize(&s, &cfg, false, Normalization::Raw).unwrap();
            let chi = exact_aaf(&x, &cfg, EXACT_AAF_DEFAULT_CAP).unwrap();
            let p = s.power();
            let approx = approx_aaf(&p);
            for nu in centered_range(4) {
                for mu in centered_range(8) {
                    let cross = oracle::aaf_cross_terms(&s, nu, mu);
                    let diff = chi.at(nu, mu) - approx.at(nu, mu);
                    assert!(
                        (diff - cross).norm() < 1e-9 * p.total().max(1.0) * 8.0,
                        "cell ({nu},{mu}): diff {diff} vs cross {cross}"
                    );
                }
            }
        }
    }

    #[test]
    fn exact_matches_quadruple_sum_oracle() {
        let cfg = FrameConfig::new(1.0e9, 1.0e6, 8, 2, 0.0).unwrap();
        let s = random_qpsk(2, 8, 9);
        let x = crate::frame::synthesize(&s, &cfg, false, Normalization::Raw).unwrap();
        let chi = exact_aaf(&x, &cfg, EXACT_AAF_DEFAULT_CAP).unwrap();
        for &(nu, mu) in &[(0i64, 0i64), (1, 2), (-1, -3), (0, 4), (1, -1)] {
            let expect = oracle::aaf_quadruple_sum(&s, nu, mu);
            assert!(
                (chi.at(nu, mu) - expect).norm() < 1e-9 * 64.0,
                "cell ({nu},{mu})"
            );
        }
    }

    #[test]
    fn exact_rejects_oversize_and_wrong_tagging() {
        let cfg = FrameConfig::new(1.0e9, 1.0e6, 8, 2, 2.0e-7).unwrap();
        let s = random_qpsk(2, 8, 1);
        let raw = crate::frame::synthesize(&s, &cfg, false, Normalization::Raw).unwrap();
        assert!(matches!(
            exact_aaf(&raw, &cfg, 8).unwrap_err(),
            Error::SizeGuard { .. }
        ));
        let unit = crate::frame::synthesize(&s, &cfg, false, Normalization::Unit).unwrap();
        assert!(exact_aaf(&unit, &cfg, 1024).is_err());
        let cp = crate::frame::synthesize(&s, &cfg, true, Normalization::Raw).unwrap();
        assert!(exact_aaf(&cp, &cfg, 1024).is_err());
    }

    #[test]
    fn table1_scope_60m_20mps_gives_a2_b8() {
        let cfg = FrameConfig::reference();
        let roi = make_roi(&cfg, 60.0, 20.0).unwrap();
        assert_eq!(roi.a, 2);
        assert_eq!(roi.b, 8);
        assert_eq!(roi.doppler_bounds(), (-8, 7));
        assert_eq!(roi.delay_bounds(), (0, 7));
    }

    #[test]
    fn full_scope_keeps_omega_s_equal_to_omega_r() {
        // CP as long as the core symbol makes the delay coverage of b = 1
        // reach the frame's own distance limit.
        let cfg = FrameConfig::new(10.0e9, 1.0e6, 8, 4, 1.0e-6).unwrap();
        let d0 = cfg.max_distance_m() * (1.0 - 1e-9);
        let u0 = cfg.max_speed_mps() * (1.0 - 1e-9);
        let roi = make_roi(&cfg, d0, u0).unwrap();
        assert_eq!((roi.a, roi.b), (1, 1));
        let s: Vec<_> = roi.omega_s_cells().collect();
        let r: Vec<_> = roi.omega_r_cells().collect();
        assert_eq!(s, r);
        assert_eq!(roi.omega_x_cells().count(), 0);
    }

    #[test]
    fn speed_scope_boundary_picks_a2() {
        let cfg = FrameConfig::reference();
        let t_o = cfg.symbol_total_duration();
        // Just above the a = 4 coverage: a = 4 would shrink below u0.
        let u0 = SPEED_OF_LIGHT / (16.0 * cfg.f_c_hz * t_o) * (1.0 + 1e-9);
        let roi = make_roi(&cfg, 60.0, u0).unwrap();
        assert_eq!(roi.a, 2);
    }

    #[test]
    fn scope_outside_frame_limits_is_rejected() {
        let cfg = FrameConfig::reference();
        assert!(make_roi(&cfg, cfg.max_distance_m() * 1.01, 20.0).is_err());
        assert!(make_roi(&cfg, 60.0, cfg.max_speed_mps() * 1.01).is_err());
    }

    #[test]
    fn roi_shrinks_monotonically_with_scope() {
        let cfg = FrameConfig::reference();
        let mut last = (usize::MAX, usize::MAX);
        for step in 1..6 {
            let d0 = 20.0 * step as f64;
            let u0 = 8.0 * step as f64;
            let roi = make_roi(&cfg, d0, u0).unwrap();
            assert!(roi.a <= last.0 && roi.b <= last.1);
            last = (roi.a, roi.b);
        }
    }

    #[test]
    fn pslr_of_uniform_power_is_infinite() {
        let cfg = FrameConfig::new(10.0e9, 1.0e6, 8, 4, 2.5e-7).unwrap();
        let p = PowerGrid::uniform(4, 8, 1.0);
        let chi = approx_aaf(&p);
        let roi = Roi::with_divisors(4, 8, 2, 2).unwrap();
        assert!(pslr_db(&chi, &roi).unwrap().is_infinite());
        let _ = cfg;
    }

    #[test]
    fn pslr_of_half_height_sidelobe_is_6db() {
        let mut g = GammaGrid::zeros(4, 8);
        g.set(0, 0, Complex64::new(2.0, 0.0));
        g.set(1, 1, Complex64::new(1.0, 0.0));
        let chi = AmbiguitySurface {
            m_sym: 4,
            n_c: 8,
            data: g.bins().to_vec(),
            provenance: Provenance::Approx,
            eta_by_row: None,
        };
        let roi = Roi::with_divisors(4, 8, 1, 1).unwrap();
        let pslr = pslr_db(&chi, &roi).unwrap();
        assert!((pslr - 20.0 * 2.0_f64.log10()).abs() < 1e-9);
    }

    #[test]
    fn pslr_scale_invariance() {
        let p = random_power(4, 8, 77);
        let roi = Roi::with_divisors(4, 8, 2, 2).unwrap();
        let a = pslr_db(&approx_aaf(&p), &roi).unwrap();
        let mut scaled = p.clone();
        for v in scaled.as_mut_slice() {
            *v *= 3.7;
        }
        let b = pslr_db(&approx_aaf(&scaled), &roi).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn roi_template_pins_mainlobe_and_zeros() {
        let roi = Roi::with_divisors(4, 8, 2, 2).unwrap();
        let g = GammaGrid::roi_template(&roi, 5.0);
        assert_eq!(g.at(0, 0), Complex64::new(5.0, 0.0));
        assert_eq!(g.status_at(0, 0), CellStatus::Fixed);
        for (nu, mu) in roi.sidelobe_cells() {
            assert_eq!(g.at(nu, mu), Complex64::new(0.0, 0.0));
            assert_eq!(g.status_at(nu, mu), CellStatus::Fixed);
            let (nu_m, mu_m) = mirror(nu, mu, 4, 8);
            assert_eq!(g.at(nu_m, mu_m), Complex64::new(0.0, 0.0));
        }
    }
}
