//! Planar RIS geometry and Rician channel realizations for the TX-RIS and
//! RIS-RX links.
//!
//! Coordinates are expressed in the RIS frame: the surface lies in the
//! `z = 0` plane centered at the origin, cell rows run along `x`, columns
//! along `y`, and `+z` is the surface normal facing the TX and RX.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::{Read, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::SPEED_OF_LIGHT;

pub type Point3 = [f64; 3];

/// Rectangular uniform planar array of `m_x * m_y` unit cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RisGeometry {
    pub m_x: usize,
    pub m_y: usize,
    /// Cell pitch along x, meters.
    pub d_x: f64,
    /// Cell pitch along y, meters.
    pub d_y: f64,
    /// Carrier frequency, Hz.
    pub frequency: f64,
}

impl RisGeometry {
    pub fn new(m_x: usize, m_y: usize, d_x: f64, d_y: f64, frequency: f64) -> Result<Self> {
        if m_x == 0 || m_y == 0 {
            return Err(Error::domain("RIS needs at least one cell along each axis"));
        }
        if !(d_x > 0.0 && d_y > 0.0) || !d_x.is_finite() || !d_y.is_finite() {
            return Err(Error::domain("cell pitch must be positive and finite"));
        }
        if !(frequency > 0.0) || !frequency.is_finite() {
            return Err(Error::domain("frequency must be positive and finite"));
        }
        Ok(Self {
            m_x,
            m_y,
            d_x,
            d_y,
            frequency,
        })
    }

    /// Half-wavelength spaced array, the usual configuration.
    pub fn half_wavelength(m_x: usize, m_y: usize, frequency: f64) -> Result<Self> {
        let lambda = SPEED_OF_LIGHT / frequency;
        Self::new(m_x, m_y, lambda / 2.0, lambda / 2.0, frequency)
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency
    }

    pub fn num_cells(&self) -> usize {
        self.m_x * self.m_y
    }
}

/// Cell centers on a regular grid centered at the RIS origin.
///
/// Cell `k = iy * m_x + ix` sits at `((ix - (m_x-1)/2) d_x, (iy - (m_y-1)/2) d_y, 0)`.
pub fn cell_positions(geom: &RisGeometry) -> Vec<Point3> {
    let cx = (geom.m_x as f64 - 1.0) / 2.0;
    let cy = (geom.m_y as f64 - 1.0) / 2.0;
    let mut out = Vec::with_capacity(geom.num_cells());
    for iy in 0..geom.m_y {
        for ix in 0..geom.m_x {
            out.push([(ix as f64 - cx) * geom.d_x, (iy as f64 - cy) * geom.d_y, 0.0]);
        }
    }
    out
}

/// Cosine element pattern `4 cos(theta)` on `[0, pi/2)`.
pub fn element_gain(theta: f64) -> Result<f64> {
    if !(0.0..FRAC_PI_2).contains(&theta) {
        return Err(Error::domain(format!("element angle {theta} rad outside [0, pi/2)")));
    }
    Ok(4.0 * theta.cos())
}

/// Free-space amplitude prefactor `sqrt((lambda/4pi)^2 G G_s / d^2)`.
pub fn los_amplitude(distance: f64, antenna_gain: f64, element_gain: f64, wavelength: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::domain(format!("link distance must be positive, got {distance}")));
    }
    if antenna_gain < 0.0 || element_gain < 0.0 {
        return Err(Error::domain("gains must be non-negative"));
    }
    Ok(wavelength / (4.0 * PI) * (antenna_gain * element_gain).sqrt() / distance)
}

/// How per-cell path lengths (and therefore LoS phases) are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseModel {
    /// Spherical distance from the TX/RX position to each cell center.
    Exact,
    /// `d - <p_k, u>` with `u` the unit direction toward the TX/RX.
    PlaneWave,
}

impl std::str::FromStr for PhaseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" => Ok(Self::Exact),
            "plane-wave" | "plane_wave" => Ok(Self::PlaneWave),
            other => Err(Error::Parse(format!(
                "unknown phase model '{other}' (expected exact or plane-wave)"
            ))),
        }
    }
}

impl std::fmt::Display for PhaseModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Exact => "exact",
            Self::PlaneWave => "plane-wave",
        })
    }
}

/// TX/RX placement relative to the RIS center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub d_t: f64,
    pub d_r: f64,
    pub theta_inc: f64,
    pub theta_dep: f64,
    pub g_t: f64,
    pub g_r: f64,
    pub tx_position: Option<Point3>,
    pub rx_position: Option<Point3>,
    pub phase_model: PhaseModel,
}

impl Placement {
    /// Placement from link distances and angles. Without explicit positions
    /// the TX is taken in the `x-z` plane on the `+x` side and the RX on the
    /// `-x` side, and phases default to the plane-wave model.
    pub fn new(d_t: f64, d_r: f64, theta_inc: f64, theta_dep: f64, g_t: f64, g_r: f64) -> Result<Self> {
        let p = Self {
            d_t,
            d_r,
            theta_inc,
            theta_dep,
            g_t,
            g_r,
            tx_position: None,
            rx_position: None,
            phase_model: PhaseModel::PlaneWave,
        };
        p.validate()?;
        Ok(p)
    }

    /// Placement from explicit positions in the RIS frame; phases default to
    /// exact spherical distances.
    pub fn from_positions(tx: Point3, rx: Point3, g_t: f64, g_r: f64) -> Result<Self> {
        let (d_t, theta_inc) = range_and_angle(tx)?;
        let (d_r, theta_dep) = range_and_angle(rx)?;
        let p = Self {
            d_t,
            d_r,
            theta_inc,
            theta_dep,
            g_t,
            g_r,
            tx_position: Some(tx),
            rx_position: Some(rx),
            phase_model: PhaseModel::Exact,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_phase_model(mut self, model: PhaseModel) -> Self {
        self.phase_model = model;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d_t > 0.0 && self.d_r > 0.0) {
            return Err(Error::domain("link distances must be positive"));
        }
        for (name, th) in [("incidence", self.theta_inc), ("departure", self.theta_dep)] {
            if !(0.0..FRAC_PI_2).contains(&th) {
                return Err(Error::domain(format!("{name} angle {th} rad outside [0, pi/2)")));
            }
        }
        if !(self.g_t > 0.0 && self.g_r > 0.0) {
            return Err(Error::domain("antenna gains must be positive"));
        }
        Ok(())
    }

    fn tx_direction(&self) -> Point3 {
        match self.tx_position {
            Some(p) => unit(p),
            None => [self.theta_inc.sin(), 0.0, self.theta_inc.cos()],
        }
    }

    fn rx_direction(&self) -> Point3 {
        match self.rx_position {
            Some(p) => unit(p),
            None => [-self.theta_dep.sin(), 0.0, self.theta_dep.cos()],
        }
    }
}

fn norm(p: Point3) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
}

fn unit(p: Point3) -> Point3 {
    let n = norm(p);
    [p[0] / n, p[1] / n, p[2] / n]
}

fn dot(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn range_and_angle(p: Point3) -> Result<(f64, f64)> {
    let d = norm(p);
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::domain("position must be finite and away from the RIS center"));
    }
    let cos = (p[2] / d).clamp(-1.0, 1.0);
    Ok((d, cos.acos()))
}

/// Per-cell path lengths for one link.
fn path_lengths(cells: &[Point3], position: Point3, range: f64, direction: Point3, model: PhaseModel) -> Vec<f64> {
    match model {
        PhaseModel::Exact => cells
            .iter()
            .map(|c| norm([position[0] - c[0], position[1] - c[1], position[2] - c[2]]))
            .collect(),
        PhaseModel::PlaneWave => cells.iter().map(|c| range - dot(*c, direction)).collect(),
    }
}

/// Diffuse-component variances of the two links (Rician `K = 1/sigma^2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingParams {
    pub sigma_t_sq: f64,
    pub sigma_r_sq: f64,
}

impl FadingParams {
    pub fn new(sigma_t_sq: f64, sigma_r_sq: f64) -> Result<Self> {
        if !(sigma_t_sq >= 0.0 && sigma_r_sq >= 0.0) || !sigma_t_sq.is_finite() || !sigma_r_sq.is_finite() {
            return Err(Error::domain("fading variances must be finite and non-negative"));
        }
        Ok(Self { sigma_t_sq, sigma_r_sq })
    }

    pub fn free_space() -> Self {
        Self {
            sigma_t_sq: 0.0,
            sigma_r_sq: 0.0,
        }
    }

    /// `(K_1, K_2)`; infinite when the corresponding variance is zero.
    pub fn k_factors(&self) -> (f64, f64) {
        (1.0 / self.sigma_t_sq, 1.0 / self.sigma_r_sq)
    }
}

/// One complex channel coefficient stored in polar form, so that equal-gain
/// links keep bitwise-equal magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub magnitude: f64,
    /// Angle in `(-pi, pi]`.
    pub phase: f64,
}

impl Coefficient {
    pub fn from_complex(z: Complex64) -> Self {
        Self {
            magnitude: z.norm(),
            phase: z.arg(),
        }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase)
    }
}

/// Channel vectors `h_t`, `h_r` of one fading block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    pub h_t: Vec<Coefficient>,
    pub h_r: Vec<Coefficient>,
}

impl ChannelRealization {
    pub fn new(h_t: Vec<Coefficient>, h_r: Vec<Coefficient>) -> Result<Self> {
        if h_t.len() != h_r.len() {
            return Err(Error::domain(format!(
                "channel vectors differ in length ({} vs {})",
                h_t.len(),
                h_r.len()
            )));
        }
        if h_t.is_empty() {
            return Err(Error::domain("channel realization has no cells"));
        }
        let ok = |c: &Coefficient| c.magnitude.is_finite() && c.magnitude >= 0.0 && c.phase.is_finite();
        if !h_t.iter().all(ok) || !h_r.iter().all(ok) {
            return Err(Error::domain("channel coefficients must be finite"));
        }
        Ok(Self { h_t, h_r })
    }

    pub fn from_complex(h_t: &[Complex64], h_r: &[Complex64]) -> Result<Self> {
        Self::new(
            h_t.iter().copied().map(Coefficient::from_complex).collect(),
            h_r.iter().copied().map(Coefficient::from_complex).collect(),
        )
    }

    /// Realization from magnitudes only, with zero phases.
    pub fn from_magnitudes(h_t: &[f64], h_r: &[f64]) -> Result<Self> {
        let mk = |m: &f64| Coefficient { magnitude: *m, phase: 0.0 };
        Self::new(h_t.iter().map(mk).collect(), h_r.iter().map(mk).collect())
    }

    pub fn num_cells(&self) -> usize {
        self.h_t.len()
    }

    pub fn mag_t(&self, k: usize) -> f64 {
        self.h_t[k].magnitude
    }

    pub fn mag_r(&self, k: usize) -> f64 {
        self.h_r[k].magnitude
    }

    /// Cascaded gain `|h_t[k]| |h_r[k]|`.
    pub fn product_gain(&self, k: usize) -> f64 {
        self.h_t[k].magnitude * self.h_r[k].magnitude
    }

    /// True when every `|h_t[k]|` is bitwise identical.
    pub fn tx_equal_gain(&self) -> bool {
        let first = self.h_t[0].magnitude;
        self.h_t.iter().all(|c| c.magnitude == first)
    }
}

/// Mix `(seed, index)` into an independent 64-bit seed (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for one link: stream 0 feeds the TX-link diffuse terms and
/// stream 1 the RX-link ones, so the two never overlap.
fn link_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws a circularly-symmetric complex Gaussian with total variance `var`.
fn complex_gaussian(rng: &mut impl Rng, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

fn draw_link(amplitude: f64, lengths: &[f64], wavelength: f64, variance: f64, rng: &mut impl Rng) -> Vec<Coefficient> {
    lengths
        .iter()
        .map(|&d| {
            let phase = (TAU * (d / wavelength).rem_euclid(1.0)).rem_euclid(TAU);
            if variance == 0.0 {
                // Pure LoS: |e^{j.}| is exactly one, keep the magnitude exact.
                let phase = if phase > PI { phase - TAU } else { phase };
                Coefficient {
                    magnitude: amplitude,
                    phase,
                }
            } else {
                let z = Complex64::from_polar(1.0, phase) + complex_gaussian(rng, variance);
                Coefficient {
                    magnitude: amplitude * z.norm(),
                    phase: z.arg(),
                }
            }
        })
        .collect()
}

/// Draws one realization of both links.
///
/// `h_t[k] = A_t (e^{j 2 pi d_{t_k} / lambda} + m_k)` with a common amplitude
/// `A_t` evaluated at `d_t` and `m_k ~ CN(0, sigma_t^2)`; `h_r` likewise.
pub fn draw_channels(geom: &RisGeometry, placement: &Placement, fading: &FadingParams, seed: u64) -> Result<ChannelRealization> {
    placement.validate()?;
    let lambda = geom.wavelength();
    let cells = cell_positions(geom);

    let amp_t = los_amplitude(placement.d_t, placement.g_t, element_gain(placement.theta_inc)?, lambda)?;
    let amp_r = los_amplitude(placement.d_r, placement.g_r, element_gain(placement.theta_dep)?, lambda)?;

    let dir_t = placement.tx_direction();
    let dir_r = placement.rx_direction();
    let pos_t = placement
        .tx_position
        .unwrap_or([dir_t[0] * placement.d_t, dir_t[1] * placement.d_t, dir_t[2] * placement.d_t]);
    let pos_r = placement
        .rx_position
        .unwrap_or([dir_r[0] * placement.d_r, dir_r[1] * placement.d_r, dir_r[2] * placement.d_r]);

    let len_t = path_lengths(&cells, pos_t, placement.d_t, dir_t, placement.phase_model);
    let len_r = path_lengths(&cells, pos_r, placement.d_r, dir_r, placement.phase_model);

    let h_t = draw_link(amp_t, &len_t, lambda, fading.sigma_t_sq, &mut link_rng(seed, 0));
    let h_r = draw_link(amp_r, &len_r, lambda, fading.sigma_r_sq, &mut link_rng(seed, 1));
    ChannelRealization::new(h_t, h_r)
}

/// Writes a realization as `cell_index,re_h_t,im_h_t,re_h_r,im_h_r` rows
/// (0-based cell index).
pub fn write_channel_csv<W: Write>(channels: &ChannelRealization, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["cell_index", "re_h_t", "im_h_t", "re_h_r", "im_h_r"])?;
    for k in 0..channels.num_cells() {
        let t = channels.h_t[k].to_complex();
        let r = channels.h_r[k].to_complex();
        w.write_record([
            k.to_string(),
            t.re.to_string(),
            t.im.to_string(),
            r.re.to_string(),
            r.im.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a dump written by [`write_channel_csv`]. Rows must be in cell order.
pub fn read_channel_csv<R: Read>(input: R) -> Result<ChannelRealization> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(input);
    let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    let expected = ["cell_index", "re_h_t", "im_h_t", "re_h_r", "im_h_r"];
    if headers.len() != expected.len() || headers.iter().zip(expected).any(|(a, b)| a != b) {
        return Err(Error::Parse(format!("unexpected channel dump header: {headers:?}")));
    }
    let mut h_t = Vec::new();
    let mut h_r = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if rec.len() != 5 {
            return Err(Error::Parse(format!("row {}: expected 5 fields, got {}", row + 1, rec.len())));
        }
        let idx: usize = rec[0]
            .parse()
            .map_err(|_| Error::Parse(format!("row {}: bad cell index '{}'", row + 1, &rec[0])))?;
        if idx != row {
            return Err(Error::Parse(format!("row {}: cell index {idx} out of order", row + 1)));
        }
        let mut v = [0.0; 4];
        for (i, slot) in v.iter_mut().enumerate() {
            let field = &rec[i + 1];
            *slot = field
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Parse(format!("row {}: bad number '{field}'", row + 1)))?;
        }
        h_t.push(Complex64::new(v[0], v[1]));
        h_r.push(Complex64::new(v[2], v[3]));
    }
    ChannelRealization::from_complex(&h_t, &h_r).map_err(|e| Error::Parse(e.to_string()))
}
