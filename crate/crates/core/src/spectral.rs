//! Periodograms of per-kick series, band-limited peak search and the period
//! and width-frequency estimates built on them.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::TimeSeries;

pub const MIN_SERIES_LEN: usize = 16;

/// Peaks below this fraction of the series' absolute sum are treated as numerical noise.
pub const PEAK_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    Rect,
    Hann,
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Window::Rect => "rect",
            Window::Hann => "hann",
        })
    }
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rect" | "rectangular" | "none" => Ok(Window::Rect),
            "hann" | "hanning" => Ok(Window::Hann),
            other => Err(Error::Config(format!("unknown window '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralOptions {
    pub window: Window,
    pub pad_factor: usize,
    pub detrend: bool,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            window: Window::Rect,
            pad_factor: 4,
            detrend: true,
        }
    }
}

/// One-sided magnitude spectrum `|sum_n x_n exp(-2 pi i nu n)|` on `nu = k / (pad n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub magnitudes: Vec<f64>,
    pub options: SpectralOptions,
    pub series_len: usize,
    /// `sum |x_n|` of the raw series, the reference for the noise floor.
    pub scale: f64,
    /// `sum |y_n|^2` of the windowed, detrended series.
    pub energy: f64,
}

impl Spectrum {
    pub fn spacing(&self) -> f64 {
        1.0 / (self.options.pad_factor * self.series_len) as f64
    }

    /// Native resolution `1 / n`, independent of padding.
    pub fn resolution(&self) -> f64 {
        1.0 / self.series_len as f64
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// Relative Parseval residual between the one-sided spectrum and the time-domain energy.
    pub fn parseval_residual(&self) -> f64 {
        let m = self.options.pad_factor * self.series_len;
        let last = self.magnitudes.len() - 1;
        let spectral: f64 = self
            .magnitudes
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let double = k != 0 && !(m.is_multiple_of(2) && k == last);
                a * a * if double { 2.0 } else { 1.0 }
            })
            .sum::<f64>()
            / m as f64;
        if self.energy == 0.0 {
            spectral
        } else {
            (spectral - self.energy).abs() / self.energy
        }
    }
}

pub fn periodogram(series: &TimeSeries, options: &SpectralOptions) -> Result<Spectrum> {
    periodogram_values(&series.values, options)
}

pub fn periodogram_values(values: &[f64], options: &SpectralOptions) -> Result<Spectrum> {
    let n = values.len();
    if n < MIN_SERIES_LEN {
        return Err(Error::Argument(format!(
            "series of length {n} is shorter than {MIN_SERIES_LEN}"
        )));
    }
    if options.pad_factor == 0 {
        return Err(Error::Config("pad factor must be at least 1".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Argument("series contains non-finite values".into()));
    }
    let mean = if options.detrend {
        values.iter().sum::<f64>() / n as f64
    } else {
        0.0
    };
    let m = options.pad_factor * n;
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    let mut energy = 0.0;
    for (i, (b, v)) in buf.iter_mut().zip(values).enumerate() {
        let w = match options.window {
            Window::Rect => 1.0,
            Window::Hann => 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos(),
        };
        let y = (v - mean) * w;
        energy += y * y;
        *b = Complex64::new(y, 0.0);
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let half = m / 2;
    Ok(Spectrum {
        frequencies: (0..=half).map(|k| k as f64 / m as f64).collect(),
        magnitudes: buf[..=half].iter().map(|c| c.norm()).collect(),
        options: *options,
        series_len: n,
        scale: values.iter().map(|v| v.abs()).sum(),
        energy,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub label: String,
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn new(label: impl Into<String>, lo: f64, hi: f64) -> Self {
        Self {
            label: label.into(),
            lo,
            hi,
        }
    }

    /// Fast rotation band.
    pub fn high() -> Self {
        Self::new("high", 0.2, 0.45)
    }

    /// Intermediate beat band.
    pub fn mid() -> Self {
        Self::new("mid", 0.004, 0.1)
    }

    /// Slow beat band, starting three native bins above zero.
    pub fn low(n_samples: usize) -> Self {
        Self::new("low", 3.0 / n_samples as f64, 0.004)
    }

    /// Width-oscillation band.
    pub fn width() -> Self {
        Self::new("width", 0.25, 0.45)
    }

    pub fn contains(&self, nu: f64) -> bool {
        nu > self.lo && nu < self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakReport {
    pub band: String,
    pub nu: f64,
    pub period: f64,
    pub amplitude: f64,
    pub interpolated: bool,
}

/// Highest local maximum strictly inside `band`, refined by a three-point parabola.
pub fn find_band_peak(spec: &Spectrum, band: &Band) -> Result<PeakReport> {
    if !(band.lo >= 0.0 && band.hi <= 0.5 && band.lo < band.hi) {
        return Err(Error::Resolution(format!(
            "band [{}, {}] is empty or leaves [0, 0.5]",
            band.lo, band.hi
        )));
    }
    let bins = (band.hi - band.lo) / spec.resolution();
    if bins <= 3.0 {
        return Err(Error::Resolution(format!(
            "band '{}' [{:.3e}, {:.3e}] spans {bins:.2} bins of a {}-sample series",
            band.label, band.lo, band.hi, spec.series_len
        )));
    }
    let mags = &spec.magnitudes;
    let freqs = &spec.frequencies;
    let floor = PEAK_FLOOR * spec.scale;
    let best = (1..mags.len() - 1)
        .filter(|&k| band.contains(freqs[k]))
        .filter(|&k| mags[k] > mags[k - 1] && mags[k] > mags[k + 1] && mags[k] > floor)
        .max_by(|&a, &b| mags[a].total_cmp(&mags[b]));
    let Some(k) = best else {
        return Err(Error::NoPeak {
            lo: band.lo,
            hi: band.hi,
        });
    };
    let (a, b, c) = (mags[k - 1], mags[k], mags[k + 1]);
    let denom = a - 2.0 * b + c;
    let delta = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
    let refined = freqs[k] + delta * spec.spacing();
    let (nu, amplitude, interpolated) = if band.contains(refined) {
        (refined, b - 0.25 * (a - c) * delta, true)
    } else {
        (freqs[k], b, false)
    };
    Ok(PeakReport {
        band: band.label.clone(),
        nu,
        period: 1.0 / nu,
        amplitude,
        interpolated,
    })
}

/// Result of a band search where absence of a peak is an expected answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum BandOutcome {
    Peak(PeakReport),
    NoPeak { band: String },
}

impl BandOutcome {
    pub fn search(spec: &Spectrum, band: &Band) -> Result<Self> {
        match find_band_peak(spec, band) {
            Ok(report) => Ok(BandOutcome::Peak(report)),
            Err(Error::NoPeak { .. }) => Ok(BandOutcome::NoPeak {
                band: band.label.clone(),
            }),
            Err(e) => Err(e),
        }
    }

    pub fn peak(&self) -> Option<&PeakReport> {
        match self {
            BandOutcome::Peak(p) => Some(p),
            BandOutcome::NoPeak { .. } => None,
        }
    }

    pub fn period(&self) -> Option<f64> {
        self.peak().map(|p| p.period)
    }

    pub fn amplitude(&self) -> Option<f64> {
        self.peak().map(|p| p.amplitude)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSet {
    pub high: Band,
    pub mid: Band,
    /// `None` selects `[3 / n, 0.004]` for a series of length `n`.
    pub low: Option<Band>,
}

impl Default for BandSet {
    fn default() -> Self {
        Self {
            high: Band::high(),
            mid: Band::mid(),
            low: None,
        }
    }
}

impl BandSet {
    pub fn low_for(&self, n_samples: usize) -> Band {
        self.low.clone().unwrap_or_else(|| Band::low(n_samples))
    }
}

/// Fast, intermediate and slow fidelity periods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodReport {
    pub t1: BandOutcome,
    pub t2: BandOutcome,
    pub t3: BandOutcome,
}

pub fn extract_periods(
    fidelity: &TimeSeries,
    options: &SpectralOptions,
    bands: &BandSet,
) -> Result<PeriodReport> {
    let spec = periodogram(fidelity, options)?;
    extract_periods_from(&spec, bands)
}

pub fn extract_periods_from(spec: &Spectrum, bands: &BandSet) -> Result<PeriodReport> {
    Ok(PeriodReport {
        t1: BandOutcome::search(spec, &bands.high)?,
        t2: BandOutcome::search(spec, &bands.mid)?,
        t3: BandOutcome::search(spec, &bands.low_for(spec.series_len))?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthFrequency {
    pub peak: PeakReport,
    /// `2 pi nu` in radians per kick.
    pub omega_width: f64,
}

/// Dominant breathing frequency of a width series in `[0.25, 0.45]` cycles per kick.
pub fn width_frequency(width: &TimeSeries, options: &SpectralOptions) -> Result<WidthFrequency> {
    let spec = periodogram(width, options)?;
    let peak = find_band_peak(&spec, &Band::width())?;
    Ok(WidthFrequency {
        omega_width: 2.0 * PI * peak.nu,
        peak,
    })
}

/// `2 pi / (2 omega - Omega_width)`.
pub fn predict_t2(omega: f64, omega_width: f64) -> Result<f64> {
    let delta = 2.0 * omega - omega_width;
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::Regime(format!(
            "width frequency {omega_width} is not below 2 omega = {}",
            2.0 * omega
        )));
    }
    Ok(2.0 * PI / delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tones(n: usize, parts: &[(f64, f64)]) -> Vec<f64> {
        (0..n)
            .map(|i| {
                parts
                    .iter()
                    .map(|(a, nu)| a * (2.0 * PI * nu * i as f64).cos())
                    .sum()
            })
            .collect()
    }

    fn spectrum(values: &[f64]) -> Spectrum {
        periodogram_values(values, &SpectralOptions::default()).unwrap()
    }

    #[test]
    fn pure_tone_peak() {
        let spec = spectrum(&tones(1024, &[(1.0, 0.25)]));
        assert!((spec.spacing() - 1.0 / 4096.0).abs() < 1e-15);
        assert_eq!(spec.frequencies.len(), 2049);
        let peak = find_band_peak(&spec, &Band::high()).unwrap();
        assert!((peak.nu - 0.25).abs() < 1.0 / 1024.0);
        assert!((peak.period * peak.nu - 1.0).abs() < 1e-12);
        assert!((peak.amplitude - 512.0).abs() < 1.0);
    }

    #[test]
    fn three_tones_in_three_bands() {
        let values = tones(8192, &[(1.0, 0.33), (0.3, 0.025), (0.1, 0.001)]);
        let report = extract_periods(
            &TimeSeries::from_values("synthetic", 0, values),
            &SpectralOptions::default(),
            &BandSet::default(),
        )
        .unwrap();
        let bin = 1.0 / (4.0 * 8192.0);
        for (outcome, nu) in [(&report.t1, 0.33), (&report.t2, 0.025), (&report.t3, 0.001)] {
            let peak = outcome.peak().unwrap();
            assert!((peak.nu - nu).abs() < bin, "{} vs {nu}", peak.nu);
            assert!(peak.interpolated);
        }
    }

    #[test]
    fn constant_series_is_flat() {
        let spec = spectrum(&[0.7; 64]);
        assert!(spec.magnitudes.iter().all(|m| *m < 1e-12));
        assert!(matches!(
            find_band_peak(&spec, &Band::high()),
            Err(Error::NoPeak { .. })
        ));
        assert_eq!(
            BandOutcome::search(&spec, &Band::mid()).unwrap(),
            BandOutcome::NoPeak { band: "mid".into() }
        );
    }

    #[test]
    fn parseval_holds() {
        let values = tones(300, &[(1.0, 0.31), (0.4, 0.05)]);
        for window in [Window::Rect, Window::Hann] {
            for pad_factor in [1, 3, 4] {
                let opts = SpectralOptions {
                    window,
                    pad_factor,
                    detrend: true,
                };
                let spec = periodogram_values(&values, &opts).unwrap();
                assert!(spec.parseval_residual() < 1e-10);
            }
        }
    }

    #[test]
    fn short_series_rejected() {
        assert!(matches!(
            periodogram_values(&[1.0; 15], &SpectralOptions::default()),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn narrow_band_is_unresolved() {
        let spec = spectrum(&tones(100, &[(1.0, 0.3)]));
        assert!(matches!(
            find_band_peak(&spec, &Band::low(100)),
            Err(Error::Resolution(_))
        ));
        assert!(matches!(
            find_band_peak(&spec, &Band::new("x", 0.3, 0.6)),
            Err(Error::Resolution(_))
        ));
        // High band still resolves on the same short series.
        assert!(find_band_peak(&spec, &Band::high()).is_ok());
    }

    #[test]
    fn padding_does_not_move_the_peak() {
        let values = tones(512, &[(1.0, 0.2871)]);
        let mut found = Vec::new();
        for pad_factor in [1, 2, 4, 8] {
            let opts = SpectralOptions {
                pad_factor,
                ..Default::default()
            };
            let spec = periodogram_values(&values, &opts).unwrap();
            found.push(find_band_peak(&spec, &Band::high()).unwrap().nu);
        }
        let bin = 1.0 / 512.0;
        for nu in &found {
            assert!((nu - found[3]).abs() < 0.1 * bin, "{found:?}");
        }
    }

    #[test]
    fn width_frequency_reports_radians() {
        let series = TimeSeries::from_values("width", 0, tones(4096, &[(1e-4, 0.309)]));
        let wf = width_frequency(&series, &SpectralOptions::default()).unwrap();
        assert!((wf.peak.nu - 0.309).abs() < 1.0 / 4096.0);
        assert!((wf.omega_width - 2.0 * PI * wf.peak.nu).abs() < 1e-15);
        let flat = TimeSeries::from_values("width", 0, vec![4.77e-3; 4096]);
        assert!(matches!(
            width_frequency(&flat, &SpectralOptions::default()),
            Err(Error::NoPeak { .. })
        ));
    }

    #[test]
    fn t2_prediction() {
        let t = predict_t2(1.03, 1.94).unwrap();
        assert!((t - 2.0 * PI / 0.12).abs() < 1e-9);
        assert!((t - 52.36).abs() < 0.05);
        let t = predict_t2(1.03, 1.903).unwrap();
        assert!((t - 40.0).abs() < 0.1);
        assert!(matches!(predict_t2(1.0, 2.0), Err(Error::Regime(_))));
        assert!(matches!(predict_t2(1.0, 2.5), Err(Error::Regime(_))));
    }

    #[test]
    fn window_parsing() {
        assert_eq!("rect".parse::<Window>().unwrap(), Window::Rect);
        assert_eq!("Hann".parse::<Window>().unwrap(), Window::Hann);
        assert!("kaiser".parse::<Window>().is_err());
    }
}
