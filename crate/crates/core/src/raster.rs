//! Deterministic rendering of the colored phase diagram.
//!
//! Flux runs along the horizontal axis and energy along the vertical one
//! (top row = E_max). Each pixel column is assigned the smallest-
//! denominator fraction inside its flux interval (Stern-Brocot descent,
//! capped at q_cap); the column is then painted from that flux's labeled
//! gaps. Gaps with nonzero Hall conductance take the palette color of
//! k mod 16; the spectrum and the zero-conductance background stay white.
//! Output is binary PPM (P6) plus a JSON sidecar with the per-column gap
//! records; identical configs produce bitwise-identical bytes.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::flux::RationalFlux;
use crate::labels::{label_spectrum, GapRecord};
use crate::spectral::compute_spectrum;

/// 16 fixed colors: hue wheel at 22.5 degree steps, full saturation,
/// value 0.9. Index is k mod 16.
pub fn default_palette() -> [[u8; 3]; 16] {
    let mut palette = [[0u8; 3]; 16];
    for (i, slot) in palette.iter_mut().enumerate() {
        *slot = hsv_to_rgb(22.5 * i as f64, 1.0, 0.9);
    }
    palette
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let c = v * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [
        ((r + m) * 255.0).round() as u8,
        ((g + m) * 255.0).round() as u8,
        ((b + m) * 255.0).round() as u8,
    ]
}

const WHITE: [u8; 3] = [255, 255, 255];
const BLACK: [u8; 3] = [0, 0, 0];

/// Raster geometry and paint options.
#[derive(Debug, Clone)]
pub struct RenderConfig {
    pub width: u32,
    pub height: u32,
    pub phi_min: f64,
    pub phi_max: f64,
    pub e_min: f64,
    pub e_max: f64,
    pub q_cap: i64,
    pub palette: [[u8; 3]; 16],
    /// Paint bands black instead of white (debugging aid).
    pub spectrum_black: bool,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            width: 512,
            height: 512,
            phi_min: 0.0,
            phi_max: 1.0,
            e_min: -4.0,
            e_max: 4.0,
            q_cap: 30,
            palette: default_palette(),
            spectrum_black: false,
        }
    }
}

impl RenderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.width < 16 || self.height < 16 {
            return Err(Error::InvalidConfig(format!(
                "raster {}x{} below the 16-pixel minimum",
                self.width, self.height
            )));
        }
        if !(0.0..=1.0).contains(&self.phi_min)
            || !(0.0..=1.0).contains(&self.phi_max)
            || self.phi_min >= self.phi_max
        {
            return Err(Error::InvalidConfig(format!(
                "flux window [{}, {}] must be a nonempty subset of [0, 1]",
                self.phi_min, self.phi_max
            )));
        }
        if !(-4.0..=4.0).contains(&self.e_min)
            || !(-4.0..=4.0).contains(&self.e_max)
            || self.e_min >= self.e_max
        {
            return Err(Error::InvalidConfig(format!(
                "energy window [{}, {}] must be a nonempty subset of [-4, 4]",
                self.e_min, self.e_max
            )));
        }
        if self.q_cap < 1 {
            return Err(Error::InvalidConfig(format!("q_cap {} < 1", self.q_cap)));
        }
        Ok(())
    }

    /// Flux interval covered by a pixel column (closed on both ends, so
    /// mirrored columns cover exactly mirrored intervals).
    pub fn column_interval(&self, column: u32) -> (f64, f64) {
        let span = self.phi_max - self.phi_min;
        let w = self.width as f64;
        (
            self.phi_min + span * (column as f64 / w),
            self.phi_min + span * ((column + 1) as f64 / w),
        )
    }

    /// Energy at a pixel row; row 0 maps to e_max and the bottom row to
    /// e_min. Integer-weighted interpolation keeps row mirroring exact
    /// for symmetric windows.
    pub fn row_energy(&self, row: u32) -> f64 {
        let h1 = (self.height - 1) as f64;
        (self.e_max * (self.height - 1 - row) as f64 + self.e_min * row as f64) / h1
    }
}

/// Classification of one pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PixelClass {
    /// Energy inside a band (bands are closed sets).
    Spectrum,
    /// Energy in an open gap with nonzero Hall conductance.
    Phase(i64),
    /// Energy in one of the semi-infinite zero-conductance gaps.
    Background,
}

impl PixelClass {
    /// The class on the mirror image (labels negate, the rest is fixed).
    pub fn negated(self) -> Self {
        match self {
            PixelClass::Phase(k) => PixelClass::Phase(-k),
            other => other,
        }
    }
}

/// Smallest-denominator reduced fraction inside [a, b] (within [0, 1]),
/// or None if every such fraction needs q > q_cap. Ties between the two
/// denominator-1 endpoints resolve to the smaller numerator 0/1; all
/// other minimal-denominator fractions are unique.
pub fn simplest_fraction_in(a: f64, b: f64, q_cap: i64) -> Option<RationalFlux> {
    if q_cap < 1 || a > b {
        return None;
    }
    let inside = |p: i64, q: i64| {
        let v = p as f64 / q as f64;
        a <= v && v <= b
    };
    if inside(0, 1) {
        return Some(RationalFlux::new(0, 1).expect("0/1"));
    }
    if inside(1, 1) {
        return Some(RationalFlux::new(1, 1).expect("1/1"));
    }
    // Stern-Brocot descent restricted to [0, 1]: mediants are reduced by
    // construction, and the first mediant landing inside the interval has
    // the minimal denominator.
    let (mut ln, mut ld, mut rn, mut rd) = (0i64, 1i64, 1i64, 1i64);
    loop {
        let (mn, md) = (ln + rn, ld + rd);
        if md > q_cap {
            return None;
        }
        let v = mn as f64 / md as f64;
        if v < a {
            ln = mn;
            ld = md;
        } else if v > b {
            rn = mn;
            rd = md;
        } else {
            return Some(RationalFlux::new(mn, md).expect("mediant in [0, 1]"));
        }
    }
}

/// Flux assigned to a pixel column, if any fraction with q <= q_cap lands
/// in its interval.
pub fn column_flux(column: u32, config: &RenderConfig) -> Option<RationalFlux> {
    let (a, b) = config.column_interval(column);
    simplest_fraction_in(a, b, config.q_cap)
}

/// Classify an energy against the labeled gaps of one flux: inside an
/// open gap it takes the gap's phase (k = 0 means background), otherwise
/// it lies in a band.
pub fn classify_pixel(energy: f64, records: &[GapRecord]) -> PixelClass {
    for rec in records {
        if rec.contains_energy(energy) {
            return if rec.k == 0 {
                PixelClass::Background
            } else {
                PixelClass::Phase(rec.k)
            };
        }
    }
    PixelClass::Spectrum
}

/// Gap records backing one rendered column.
#[derive(Debug, Clone)]
pub struct ColumnGeometry {
    pub x: u32,
    pub flux: RationalFlux,
    pub gaps: Vec<GapRecord>,
}

impl Serialize for ColumnGeometry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            x: u32,
            p: i64,
            q: i64,
            gaps: &'a [GapRecord],
        }
        Repr {
            x: self.x,
            p: self.flux.p(),
            q: self.flux.q(),
            gaps: &self.gaps,
        }
        .serialize(s)
    }
}

/// Machine-readable sidecar listing the per-column gap records.
#[derive(Serialize)]
pub struct Sidecar<'a> {
    pub columns: &'a [ColumnGeometry],
}

/// A rendered diagram: the per-pixel classification plus the geometry it
/// was painted from.
#[derive(Debug, Clone)]
pub struct RenderOutput {
    config: RenderConfig,
    classes: Vec<PixelClass>,
    columns: Vec<ColumnGeometry>,
}

impl RenderOutput {
    pub fn config(&self) -> &RenderConfig {
        &self.config
    }

    pub fn class_at(&self, x: u32, y: u32) -> PixelClass {
        self.classes[(y * self.config.width + x) as usize]
    }

    /// Per-column geometry for resolved columns, in column order.
    pub fn columns(&self) -> &[ColumnGeometry] {
        &self.columns
    }

    pub fn sidecar(&self) -> Sidecar<'_> {
        Sidecar {
            columns: &self.columns,
        }
    }

    /// Binary PPM (P6) bytes, rows top to bottom.
    pub fn ppm_bytes(&self) -> Vec<u8> {
        let cfg = &self.config;
        let mut out = format!("P6\n{} {}\n255\n", cfg.width, cfg.height).into_bytes();
        out.reserve(self.classes.len() * 3);
        for class in &self.classes {
            let rgb = match class {
                PixelClass::Phase(k) => cfg.palette[k.rem_euclid(16) as usize],
                PixelClass::Spectrum => {
                    if cfg.spectrum_black {
                        BLACK
                    } else {
                        WHITE
                    }
                }
                PixelClass::Background => WHITE,
            };
            out.extend_from_slice(&rgb);
        }
        out
    }
}

/// Render the phase diagram. Columns are classified in parallel and
/// assembled in order, so the output is deterministic for a fixed config.
pub fn render(config: &RenderConfig) -> Result<RenderOutput> {
    config.validate()?;
    let width = config.width;
    let height = config.height;

    let fluxes: Vec<Option<RationalFlux>> =
        (0..width).map(|x| column_flux(x, config)).collect();
    let mut distinct: Vec<RationalFlux> = fluxes.iter().flatten().copied().collect();
    distinct.sort();
    distinct.dedup();
    let records: HashMap<RationalFlux, Vec<GapRecord>> = distinct
        .par_iter()
        .map(|&f| (f, label_spectrum(&compute_spectrum(f))))
        .collect();

    let energies: Vec<f64> = (0..height).map(|y| config.row_energy(y)).collect();
    let column_classes: Vec<Vec<PixelClass>> = (0..width as usize)
        .into_par_iter()
        .map(|x| match fluxes[x] {
            Some(f) => {
                let recs = &records[&f];
                energies.iter().map(|&e| classify_pixel(e, recs)).collect()
            }
            None => vec![PixelClass::Background; height as usize],
        })
        .collect();

    let mut classes = vec![PixelClass::Background; (width * height) as usize];
    for (x, col) in column_classes.iter().enumerate() {
        for (y, &class) in col.iter().enumerate() {
            classes[y * width as usize + x] = class;
        }
    }
    let columns: Vec<ColumnGeometry> = (0..width)
        .filter_map(|x| {
            fluxes[x as usize].map(|f| ColumnGeometry {
                x,
                flux: f,
                gaps: records[&f].clone(),
            })
        })
        .collect();

    Ok(RenderOutput {
        config: config.clone(),
        classes,
        columns,
    })
}

/// Square bitmap used for box counting.
#[derive(Debug, Clone)]
pub struct Mask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; (width * height) as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[(y * self.width + x) as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        self.bits[(y * self.width + x) as usize] = v;
    }

    pub fn count_set(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Pixels of the mask with at least one 4-neighbor outside it
    /// (out-of-bounds counts as outside).
    pub fn boundary(&self) -> Mask {
        let mut out = Mask::new(self.width, self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                if !self.get(x, y) {
                    continue;
                }
                let exposed = (x == 0 || !self.get(x - 1, y))
                    || (x + 1 == self.width || !self.get(x + 1, y))
                    || (y == 0 || !self.get(x, y - 1))
                    || (y + 1 == self.height || !self.get(x, y + 1));
                out.set(x, y, exposed);
            }
        }
        out
    }
}

/// Membership mask of the phase P(k) on a size x size raster of the full
/// diagram window.
pub fn phase_mask(k: i64, size: u32, q_cap: i64) -> Result<Mask> {
    let config = RenderConfig {
        width: size,
        height: size,
        q_cap,
        ..RenderConfig::default()
    };
    let out = render(&config)?;
    let mut mask = Mask::new(size, size);
    for y in 0..size {
        for x in 0..size {
            mask.set(x, y, out.class_at(x, y) == PixelClass::Phase(k));
        }
    }
    Ok(mask)
}

/// Calibration mask: a one-pixel diagonal line (a dimension-1 set).
pub fn calibration_line(size: u32) -> Mask {
    let mut m = Mask::new(size, size);
    for i in 0..size {
        m.set(i, i, true);
    }
    m
}

/// Calibration mask: a filled square covering a quarter of the area
/// (a dimension-2 set).
pub fn calibration_square(size: u32) -> Mask {
    let mut m = Mask::new(size, size);
    for y in size / 4..3 * size / 4 {
        for x in size / 4..3 * size / 4 {
            m.set(x, y, true);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flux(p: i64, q: i64) -> RationalFlux {
        RationalFlux::new(p, q).unwrap()
    }

    #[test]
    fn simplest_fraction_examples() {
        assert_eq!(simplest_fraction_in(0.49, 0.51, 50), Some(flux(1, 2)));
        assert_eq!(simplest_fraction_in(0.332, 0.334, 50), Some(flux(1, 3)));
        assert_eq!(simplest_fraction_in(0.38, 0.42, 50), Some(flux(2, 5)));
        // both endpoints inside: smaller numerator wins
        assert_eq!(simplest_fraction_in(0.0, 1.0, 1), Some(flux(0, 1)));
        // nothing with q <= cap inside a narrow window
        assert_eq!(simplest_fraction_in(0.41, 0.415, 5), None);
    }

    #[test]
    fn simplest_fraction_is_minimal_denominator() {
        // exhaustive cross-check against a scan of all fractions
        let windows = [
            (0.1, 0.13),
            (0.30, 0.34),
            (0.61, 0.64),
            (0.70, 0.72),
            (0.05, 0.9),
        ];
        for (a, b) in windows {
            let got = simplest_fraction_in(a, b, 40).unwrap();
            let best = RationalFlux::farey_sequence(40)
                .into_iter()
                .filter(|f| {
                    let v = f.value();
                    a <= v && v <= b
                })
                .min_by_key(|f| (f.q(), f.p()))
                .unwrap();
            assert_eq!(got, best, "window ({a}, {b})");
        }
    }

    #[test]
    fn column_intervals_tile_the_window() {
        let cfg = RenderConfig::default();
        let (a0, _) = cfg.column_interval(0);
        let (_, b_last) = cfg.column_interval(cfg.width - 1);
        assert_eq!(a0, 0.0);
        assert_eq!(b_last, 1.0);
        for x in 0..cfg.width - 1 {
            let (_, b) = cfg.column_interval(x);
            let (a, _) = cfg.column_interval(x + 1);
            assert_eq!(a, b, "columns {x} and {} must share an edge", x + 1);
        }
    }

    #[test]
    fn row_energy_mirrors_exactly() {
        let cfg = RenderConfig::default();
        for y in 0..cfg.height {
            let a = cfg.row_energy(y);
            let b = cfg.row_energy(cfg.height - 1 - y);
            assert_eq!(a.to_bits(), (-b).to_bits(), "row {y}");
        }
        assert_eq!(cfg.row_energy(0), 4.0);
        assert_eq!(cfg.row_energy(cfg.height - 1), -4.0);
    }

    #[test]
    fn classify_examples() {
        let half = label_spectrum(&compute_spectrum(flux(1, 2)));
        assert_eq!(classify_pixel(0.0, &half), PixelClass::Spectrum);
        assert_eq!(classify_pixel(5.0, &half), PixelClass::Background);

        let third = label_spectrum(&compute_spectrum(flux(1, 3)));
        let gap1 = &third[1];
        let inside = 0.5 * (gap1.lo + gap1.hi);
        assert_eq!(classify_pixel(inside, &third), PixelClass::Phase(1));

        let free = label_spectrum(&compute_spectrum(flux(0, 1)));
        assert_eq!(classify_pixel(5.0, &free), PixelClass::Background);
        assert_eq!(classify_pixel(0.0, &free), PixelClass::Spectrum);
    }

    #[test]
    fn tiny_render_single_band_is_blank() {
        let cfg = RenderConfig {
            width: 16,
            height: 16,
            q_cap: 1,
            ..RenderConfig::default()
        };
        let out = render(&cfg).unwrap();
        let bytes = out.ppm_bytes();
        let header = b"P6\n16 16\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert!(
            bytes[header.len()..].iter().all(|&b| b == 255),
            "q_cap = 1 leaves no colored gap"
        );
    }

    #[test]
    fn render_rejects_bad_configs() {
        let cfg = RenderConfig {
            width: 8,
            ..RenderConfig::default()
        };
        assert!(render(&cfg).is_err());
        let cfg = RenderConfig {
            phi_min: 0.7,
            phi_max: 0.3,
            ..RenderConfig::default()
        };
        assert!(render(&cfg).is_err());
        let cfg = RenderConfig {
            e_max: 9.0,
            ..RenderConfig::default()
        };
        assert!(render(&cfg).is_err());
        let cfg = RenderConfig {
            q_cap: 0,
            ..RenderConfig::default()
        };
        assert!(render(&cfg).is_err());
    }

    #[test]
    fn render_determinism_small() {
        let cfg = RenderConfig {
            width: 64,
            height: 64,
            q_cap: 12,
            ..RenderConfig::default()
        };
        let a = render(&cfg).unwrap().ppm_bytes();
        let b = render(&cfg).unwrap().ppm_bytes();
        assert_eq!(a, b);
    }

    #[test]
    fn render_mirror_and_vertical_antisymmetry_small() {
        let cfg = RenderConfig {
            width: 128,
            height: 128,
            q_cap: 16,
            ..RenderConfig::default()
        };
        let out = render(&cfg).unwrap();
        for x in 0..cfg.width {
            let xm = cfg.width - 1 - x;
            let fa = column_flux(x, &cfg);
            let fb = column_flux(xm, &cfg);
            // columns whose fluxes mirror must carry negated labels
            if fa.map(|f| f.complement()) != fb {
                continue;
            }
            for y in 0..cfg.height {
                assert_eq!(
                    out.class_at(x, y).negated(),
                    out.class_at(xm, y),
                    "mirror mismatch at ({x}, {y})"
                );
                assert_eq!(
                    out.class_at(x, y).negated(),
                    out.class_at(x, cfg.height - 1 - y),
                    "vertical mismatch at ({x}, {y})"
                );
            }
        }
    }

    #[test]
    fn sidecar_lists_resolved_columns() {
        let cfg = RenderConfig {
            width: 32,
            height: 32,
            q_cap: 8,
            ..RenderConfig::default()
        };
        let out = render(&cfg).unwrap();
        assert!(!out.columns().is_empty());
        for col in out.columns() {
            assert_eq!(col.gaps.len(), col.flux.q() as usize + 1);
        }
        let json = serde_json::to_value(out.sidecar()).unwrap();
        let first = &json["columns"][0];
        assert!(first["x"].is_number());
        assert!(first["p"].is_number());
        assert!(first["q"].is_number());
        assert!(first["gaps"].is_array());
    }

    #[test]
    fn palette_is_stable() {
        let p = default_palette();
        assert_eq!(p[0], [230, 0, 0]);
        // spot-check a mid-wheel entry: hue 180 = cyan
        assert_eq!(p[8], [0, 230, 230]);
        assert_eq!(p.len(), 16);
        let distinct: std::collections::BTreeSet<[u8; 3]> = p.iter().copied().collect();
        assert_eq!(distinct.len(), 16, "palette colors must be distinct");
    }

    #[test]
    fn calibration_masks_count_as_expected() {
        for size in [64u32, 128, 256] {
            assert_eq!(calibration_line(size).count_set(), size as usize);
            assert_eq!(
                calibration_square(size).count_set(),
                (size as usize / 2) * (size as usize / 2)
            );
        }
    }

    #[test]
    fn boundary_of_square_is_its_outline() {
        let m = calibration_square(16);
        // filled 8x8 block: boundary = perimeter = 4*8 - 4
        assert_eq!(m.boundary().count_set(), 28);
    }

    #[test]
    fn phase_mask_picks_one_label() {
        let mask = phase_mask(1, 64, 12).unwrap();
        assert!(mask.count_set() > 0, "the first wing must show at 64px");
        let none = phase_mask(50, 64, 12).unwrap();
        assert_eq!(none.count_set(), 0, "label 50 needs q > 100");
    }
}
