//! Magnetic Bloch Hamiltonians and exact band structure at rational flux.
//!
//! At flux p/q the Bloch-reduced Hamiltonian is the q x q matrix with
//! diagonal 2 cos(2 pi n p/q + theta2), unit hopping on the super/sub
//! diagonals, and the accumulated Bloch phase exp(+-i q theta1) on the
//! corner bond. Its characteristic polynomial depends on the Bloch phases
//! only through cos(q theta1) + cos(q theta2) (the Chambers relation), so
//! every band edge is attained at one of the two phase points (0, 0) and
//! (pi/q, pi/q), where the matrix is real symmetric. Two q x q eigensolves
//! therefore give exact band edges; no Bloch-grid scan is needed.

use std::f64::consts::{PI, TAU};

use ndarray::Array2;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::eigen::{hermitian_eigenvalues, symmetric_eigenvalues};
use crate::error::{Error, Result};
use crate::flux::RationalFlux;

/// Gaps narrower than this are reported as closed (width clamped to zero).
/// The central gap at even q closes exactly in theory; floating point
/// needs a cutoff.
pub const CLOSED_GAP_TOL: f64 = 1e-9;

/// Bloch-reduced Hamiltonian of the magnetic unit cell at fixed phases.
#[derive(Debug, Clone)]
pub struct BlochHamiltonian {
    flux: RationalFlux,
    theta1: f64,
    theta2: f64,
    entries: Array2<Complex64>,
}

/// Build the q x q Bloch Hamiltonian at flux p/q and phases (theta1, theta2).
///
/// Hermitian by construction. For q = 1 the corner bond and its conjugate
/// land on the single entry, giving 2 cos(theta1) + 2 cos(theta2).
pub fn bloch_hamiltonian(flux: RationalFlux, theta1: f64, theta2: f64) -> BlochHamiltonian {
    let q = flux.q();
    let p = flux.p();
    let n = q as usize;
    let mut h = Array2::<Complex64>::zeros((n, n));
    for site in 0..n {
        // reduce site*p mod q first so special angles stay exact
        let r = (site as i64 * p).rem_euclid(q);
        let angle = TAU * r as f64 / q as f64 + theta2;
        h[[site, site]] += Complex64::new(2.0 * angle.cos(), 0.0);
    }
    let corner = Complex64::from_polar(1.0, q as f64 * theta1);
    if n == 1 {
        h[[0, 0]] += corner + corner.conj();
    } else {
        for site in 0..n - 1 {
            h[[site, site + 1]] += Complex64::new(1.0, 0.0);
            h[[site + 1, site]] += Complex64::new(1.0, 0.0);
        }
        h[[n - 1, 0]] += corner;
        h[[0, n - 1]] += corner.conj();
    }
    BlochHamiltonian {
        flux,
        theta1,
        theta2,
        entries: h,
    }
}

impl BlochHamiltonian {
    pub fn flux(&self) -> RationalFlux {
        self.flux
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    /// Eigenvalues at these Bloch phases, sorted ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries).expect("Hermitian by construction")
    }

    /// Drop to a real symmetric matrix. Valid only at phase points where
    /// the corner entries are real (theta1 a multiple of pi/q); elsewhere
    /// the residual imaginary part trips the symmetry tolerance.
    pub fn to_real(&self) -> Result<Array2<f64>> {
        let mut max_im = 0.0f64;
        for v in self.entries.iter() {
            max_im = max_im.max(v.im.abs());
        }
        if max_im > crate::eigen::SYMMETRY_TOL {
            return Err(Error::NotSymmetric {
                asym: max_im,
                tol: crate::eigen::SYMMETRY_TOL,
            });
        }
        Ok(self.entries.mapv(|v| v.re))
    }
}

/// One closed energy band, in units of the hopping amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, e: f64) -> bool {
        self.lo <= e && e <= self.hi
    }
}

/// One spectral gap, as an open interval. The 0th gap runs from -inf to
/// the bottom of the spectrum and the q-th from the top to +inf. A closed
/// gap has lo == hi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub lo: f64,
    pub hi: f64,
}

impl Gap {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_closed(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn contains(&self, e: f64) -> bool {
        self.lo < e && e < self.hi
    }
}

/// Exact band structure at one rational flux: q bands and q+1 gaps
/// (counting the two semi-infinite ones).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    flux: RationalFlux,
    bands: Vec<Band>,
    gaps: Vec<Gap>,
}

impl Spectrum {
    /// Assemble a spectrum from its bands; gaps are derived, with widths
    /// below [`CLOSED_GAP_TOL`] clamped to zero at the interval midpoint.
    pub fn from_bands(flux: RationalFlux, bands: Vec<Band>) -> Self {
        assert_eq!(
            bands.len(),
            flux.q() as usize,
            "flux {flux} needs exactly q bands"
        );
        let q = bands.len();
        let mut gaps = Vec::with_capacity(q + 1);
        gaps.push(Gap {
            lo: f64::NEG_INFINITY,
            hi: bands[0].lo,
        });
        for j in 1..q {
            let lo = bands[j - 1].hi;
            let hi = bands[j].lo;
            if hi - lo < CLOSED_GAP_TOL {
                let mid = 0.5 * (lo + hi);
                gaps.push(Gap { lo: mid, hi: mid });
            } else {
                gaps.push(Gap { lo, hi });
            }
        }
        gaps.push(Gap {
            lo: bands[q - 1].hi,
            hi: f64::INFINITY,
        });
        Self { flux, bands, gaps }
    }

    pub fn flux(&self) -> RationalFlux {
        self.flux
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    /// Gap j for j = 0..=q; gap 0 and gap q are semi-infinite.
    pub fn gaps(&self) -> &[Gap] {
        &self.gaps
    }

    /// Sum of all band widths.
    pub fn total_bandwidth(&self) -> f64 {
        self.bands.iter().map(Band::width).sum()
    }

    pub fn min_energy(&self) -> f64 {
        self.bands[0].lo
    }

    pub fn max_energy(&self) -> f64 {
        self.bands[self.bands.len() - 1].hi
    }

    pub fn in_band(&self, e: f64) -> bool {
        self.bands.iter().any(|b| b.contains(e))
    }
}

#[derive(Serialize, Deserialize)]
struct SpectrumRepr {
    p: i64,
    q: i64,
    bands: Vec<Band>,
}

impl Serialize for Spectrum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpectrumRepr {
            p: self.flux.p(),
            q: self.flux.q(),
            bands: self.bands.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Spectrum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SpectrumRepr::deserialize(d)?;
        let flux = RationalFlux::new(repr.p, repr.q).map_err(D::Error::custom)?;
        if repr.bands.len() != flux.q() as usize {
            return Err(D::Error::custom(format!(
                "flux {flux} carries {} bands, expected {}",
                repr.bands.len(),
                flux.q()
            )));
        }
        Ok(Spectrum::from_bands(flux, repr.bands))
    }
}

/// Exact band structure at rational flux via the Chambers relation:
/// band i spans between the i-th eigenvalues of the Bloch matrices at
/// (0, 0) and (pi/q, pi/q).
pub fn compute_spectrum(flux: RationalFlux) -> Spectrum {
    let t = PI / flux.q() as f64;
    let a = bloch_hamiltonian(flux, 0.0, 0.0)
        .to_real()
        .expect("corner is +1 at theta1 = 0");
    let b = bloch_hamiltonian(flux, t, t)
        .to_real()
        .expect("corner is -1 at theta1 = pi/q");
    let ea = symmetric_eigenvalues(&a).expect("real symmetric by construction");
    let eb = symmetric_eigenvalues(&b).expect("real symmetric by construction");
    let bands = ea
        .iter()
        .zip(eb.iter())
        .map(|(&x, &y)| Band {
            lo: x.min(y),
            hi: x.max(y),
        })
        .collect();
    Spectrum::from_bands(flux, bands)
}

/// Hausdorff distance between the band unions of two spectra.
///
/// Exact for finite unions of closed intervals: the directed distance is
/// maximized either at a band endpoint of one spectrum or at the center
/// of a gap of the other, so only those candidates are scanned.
pub fn hausdorff_distance(a: &Spectrum, b: &Spectrum) -> f64 {
    fn point_to_bands(x: f64, bands: &[Band]) -> f64 {
        bands
            .iter()
            .map(|band| (band.lo - x).max(x - band.hi).max(0.0))
            .fold(f64::MAX, f64::min)
    }
    fn directed(from: &Spectrum, to: &Spectrum) -> f64 {
        let mut worst = 0.0f64;
        for band in from.bands() {
            worst = worst.max(point_to_bands(band.lo, to.bands()));
            worst = worst.max(point_to_bands(band.hi, to.bands()));
        }
        // interior candidates: centers of `to`'s finite gaps covered by `from`
        for gap in to.gaps() {
            if gap.lo.is_finite() && gap.hi.is_finite() && !gap.is_closed() {
                let c = 0.5 * (gap.lo + gap.hi);
                if from.in_band(c) {
                    worst = worst.max(point_to_bands(c, to.bands()));
                }
            }
        }
        worst
    }
    directed(a, b).max(directed(b, a))
}
