//! Multi-phase coexistence at rational flux.
//!
//! A boundary point of the phase P(k) at flux p/q is shared by every
//! phase P(k + l*q), and by no other: along the Bezout approximants
//! p_n/q_n = (n*p - b)/(n*q - a) the gap labeled k + l*q closes in on the
//! point, with the approach distance controlled by the total-bandwidth
//! bound 24/q_n plus the Holder gap bound 18*sqrt(p_n/q_n - p/q) for each
//! intermediate gap. This module builds the approximants, measures those
//! distances, and also provides the disc probe for the almost-Wada
//! property and the box-counting estimate for the boundary dimension.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flux::{extended_gcd, gcd, RationalFlux};
use crate::labels::{label_spectrum, GapRecord};
use crate::raster::{phase_mask, Mask};
use crate::spectral::compute_spectrum;

/// Distances below the assembled bound must stay above this floor for a
/// non-coexisting label.
pub const NON_COEXIST_FLOOR: f64 = 1e-3;

/// One approximant term. `p` and `q` are the raw formula values (q may be
/// negative on the n -> -inf branch); the determinant identity
/// p*q_base - q*p_base = 1 holds for the raw pair exactly.
#[derive(Debug, Clone, Copy)]
pub struct Approximant {
    pub n: i64,
    pub p: i64,
    pub q: i64,
    /// Sign-normalized reduced fraction in [0, 1].
    pub flux: RationalFlux,
}

impl Approximant {
    /// True if the term approaches the base flux from above.
    pub fn from_right(&self) -> bool {
        self.q > 0
    }
}

/// Bezout approximant sequence converging to a base flux from both sides.
#[derive(Debug, Clone)]
pub struct ApproximantSequence {
    pub base: RationalFlux,
    /// Canonical Bezout pair: p*a - q*b = 1 with 0 <= a < q.
    pub a: i64,
    pub b: i64,
    pub terms: Vec<Approximant>,
}

/// Build the approximants p_n/q_n = (n*p - b)/(n*q - a) for n in the given
/// range. Terms whose denominator vanishes or whose value leaves [0, 1]
/// are skipped (this prunes the out-of-window branch at the base fluxes
/// 0/1 and 1/1).
pub fn bezout_approximants(
    base: RationalFlux,
    n_min: i64,
    n_max: i64,
) -> ApproximantSequence {
    let (p, q) = (base.p(), base.q());
    let (_, x, _) = extended_gcd(p, q);
    let a = x.rem_euclid(q);
    let b = (p * a - 1) / q;
    let mut terms = Vec::new();
    for n in n_min..=n_max {
        let pn = n * p - b;
        let qn = n * q - a;
        if qn == 0 {
            continue;
        }
        debug_assert_eq!(pn * q - qn * p, 1);
        if let Ok(flux) = RationalFlux::new(pn, qn) {
            terms.push(Approximant {
                n,
                p: pn,
                q: qn,
                flux,
            });
        }
    }
    ApproximantSequence { base, a, b, terms }
}

/// The set of labels coexisting with k at flux p/q: the coset
/// {k + l*q : |l| <= l_max}. Labels outside the coset (within the
/// truncation window) never share a boundary point with k.
pub fn coexisting_labels(k: i64, flux: RationalFlux, l_max: i64) -> Result<Vec<i64>> {
    let q = flux.q();
    if 2 * k.abs() > q {
        return Err(Error::LabelNotRealizable { k, q });
    }
    Ok((-l_max..=l_max).map(|l| k + l * q).collect())
}

/// Which endpoint of the gap serves as the boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(Error::InvalidConfig(format!(
                "side must be left or right, got {other:?}"
            ))),
        }
    }
}

/// Boundary point of P(k) at the given flux: the upper (right) or lower
/// (left) endpoint of the gap labeled k. For k = 0 the right boundary is
/// the bottom of the spectrum and the left boundary its top.
fn boundary_point(flux: RationalFlux, k: i64, side: Side) -> Result<(f64, f64)> {
    let spectrum = compute_spectrum(flux);
    if k == 0 {
        let e = match side {
            Side::Right => spectrum.min_energy(),
            Side::Left => spectrum.max_energy(),
        };
        return Ok((flux.value(), e));
    }
    let records = label_spectrum(&spectrum);
    let rec = records
        .iter()
        .find(|r| r.k == k)
        .ok_or(Error::LabelNotRealizable { k, q: flux.q() })?;
    let e = match side {
        Side::Right => rec.hi,
        Side::Left => rec.lo,
    };
    Ok((flux.value(), e))
}

/// Euclidean distance in the (flux, energy) plane from a point to the
/// vertical segment a gap occupies.
fn distance_to_gap(point: (f64, f64), flux_value: f64, rec: &GapRecord) -> f64 {
    let dphi = point.0 - flux_value;
    let de = (rec.lo - point.1).max(point.1 - rec.hi).max(0.0);
    dphi.hypot(de)
}

/// One (n, l) measurement in a coexistence report.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoexistEntry {
    pub n: i64,
    pub l: i64,
    pub p_n: i64,
    pub q_n: i64,
    /// Target Hall conductance k + (sign convention) * l * q.
    pub label: i64,
    pub dist: Option<f64>,
    pub bound: Option<f64>,
    pub pass: Option<bool>,
    /// Target gap closed or not realizable at this approximant.
    pub skipped: bool,
}

/// Convergence table for one boundary point.
#[derive(Debug, Clone, Serialize)]
pub struct CoexistenceReport {
    pub point: Point,
    pub k: i64,
    pub p: i64,
    pub q: i64,
    pub side: Side,
    pub entries: Vec<CoexistEntry>,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Point {
    pub phi: f64,
    pub energy: f64,
}

/// Measure the approach of the phases P(k + l*q) to the boundary point of
/// P(k) at the base flux, along both approximant branches.
///
/// For the right boundary point the n -> +inf branch realizes k + l*q and
/// the n -> -inf branch k - l*q (swapped for the left point). Each
/// measured distance is checked against the assembled bound
/// 24*l/q_n + 18*(l-1)/sqrt(q*q_n) + |phi - p_n/q_n|. Entries whose
/// target gap is closed or unrealizable are marked skipped, not failed.
pub fn verify_proposition(
    k: i64,
    base: RationalFlux,
    side: Side,
    n_max: i64,
    l_max: i64,
) -> Result<CoexistenceReport> {
    let q = base.q();
    if 2 * k.abs() > q {
        return Err(Error::LabelNotRealizable { k, q });
    }
    let (phi0, e0) = boundary_point(base, k, side)?;
    let seq = bezout_approximants(base, -n_max, n_max);

    // spectra at the approximant fluxes, in parallel
    let spectra: BTreeMap<RationalFlux, Vec<GapRecord>> = seq
        .terms
        .par_iter()
        .map(|t| (t.flux, label_spectrum(&compute_spectrum(t.flux))))
        .collect();

    let mut entries = Vec::new();
    for term in &seq.terms {
        let records = &spectra[&term.flux];
        let dir = match (side, term.from_right()) {
            (Side::Right, true) | (Side::Left, false) => 1,
            (Side::Right, false) | (Side::Left, true) => -1,
        };
        let qn = term.flux.q();
        for l in 1..=l_max {
            let label = k + dir * l * q;
            let target = records
                .iter()
                .find(|r| r.k == label && !r.central_closed && r.is_open());
            let entry = match target {
                Some(rec) => {
                    let dist = distance_to_gap((phi0, e0), term.flux.value(), rec);
                    let bound = 24.0 * l as f64 / qn as f64
                        + 18.0 * (l - 1) as f64 / ((q * qn) as f64).sqrt()
                        + (phi0 - term.flux.value()).abs();
                    CoexistEntry {
                        n: term.n,
                        l,
                        p_n: term.flux.p(),
                        q_n: qn,
                        label,
                        dist: Some(dist),
                        bound: Some(bound),
                        pass: Some(dist <= bound),
                        skipped: false,
                    }
                }
                None => CoexistEntry {
                    n: term.n,
                    l,
                    p_n: term.flux.p(),
                    q_n: qn,
                    label,
                    dist: None,
                    bound: None,
                    pass: None,
                    skipped: true,
                },
            };
            entries.push(entry);
        }
    }
    let measured: Vec<&CoexistEntry> = entries.iter().filter(|e| !e.skipped).collect();
    let pass = !measured.is_empty() && measured.iter().all(|e| e.pass == Some(true));
    Ok(CoexistenceReport {
        point: Point {
            phi: phi0,
            energy: e0,
        },
        k,
        p: base.p(),
        q,
        side,
        entries,
        pass,
    })
}

/// One distance measurement to a non-coset label.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NonCoexistEntry {
    pub n: i64,
    pub p_n: i64,
    pub q_n: i64,
    pub dist: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NonCoexistReport {
    pub point: Point,
    pub k: i64,
    pub kprime: i64,
    pub q: i64,
    pub entries: Vec<NonCoexistEntry>,
    pub min_dist: f64,
    pub pass: bool,
}

/// Check that the phase P(k') stays bounded away from the boundary point
/// of P(k) along the approximants. Requires k' - k not divisible by q
/// (otherwise the two phases do coexist there and the call is refused).
pub fn non_coexistence_check(
    k: i64,
    kprime: i64,
    base: RationalFlux,
    n_max: i64,
) -> Result<NonCoexistReport> {
    let q = base.q();
    if (kprime - k).rem_euclid(q) == 0 {
        return Err(Error::SameCoset { k, kprime, q });
    }
    if 2 * k.abs() > q {
        return Err(Error::LabelNotRealizable { k, q });
    }
    let (phi0, e0) = boundary_point(base, k, Side::Right)?;
    let seq = bezout_approximants(base, -n_max, n_max);
    let spectra: BTreeMap<RationalFlux, Vec<GapRecord>> = seq
        .terms
        .par_iter()
        .map(|t| (t.flux, label_spectrum(&compute_spectrum(t.flux))))
        .collect();

    let mut entries = Vec::new();
    for term in &seq.terms {
        let records = &spectra[&term.flux];
        if let Some(rec) = records
            .iter()
            .find(|r| r.k == kprime && !r.central_closed && r.is_open())
        {
            entries.push(NonCoexistEntry {
                n: term.n,
                p_n: term.flux.p(),
                q_n: term.flux.q(),
                dist: distance_to_gap((phi0, e0), term.flux.value(), rec),
            });
        }
    }
    let min_dist = entries
        .iter()
        .map(|e| e.dist)
        .fold(f64::INFINITY, f64::min);
    Ok(NonCoexistReport {
        point: Point {
            phi: phi0,
            energy: e0,
        },
        k,
        kprime,
        q,
        entries,
        min_dist,
        pass: min_dist > NON_COEXIST_FLOOR,
    })
}

/// Labels of all gaps (denominator <= q_max) whose segment intersects the
/// open disc. If the disc straddles a phase boundary the count keeps
/// growing with q_max; that is the almost-Wada property in discrete form.
pub fn wada_probe(center: (f64, f64), radius: f64, q_max: i64) -> Result<BTreeSet<i64>> {
    if radius <= 0.0 {
        return Err(Error::InvalidConfig(format!("radius {radius} <= 0")));
    }
    if q_max < 1 {
        return Err(Error::InvalidConfig(format!("q_max {q_max} < 1")));
    }
    let (cx, cy) = center;
    let fluxes: Vec<RationalFlux> = RationalFlux::farey_sequence(q_max)
        .into_iter()
        .filter(|f| (f.value() - cx).abs() < radius)
        .collect();
    let per_flux: Vec<Vec<i64>> = fluxes
        .par_iter()
        .map(|&f| {
            let half = (radius * radius - (f.value() - cx).powi(2)).sqrt();
            label_spectrum(&compute_spectrum(f))
                .iter()
                .filter(|rec| rec.is_open() && rec.lo < cy + half && rec.hi > cy - half)
                .map(|rec| rec.k)
                .collect()
        })
        .collect();
    Ok(per_flux.into_iter().flatten().collect())
}

/// Least-squares slope of y against x.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Box-counting slope of a mask ladder: regression of log(count) against
/// log(resolution), where each mask contributes the number of set pixels
/// (one box per pixel at scale 1/resolution).
pub fn box_counting_slope(masks: &[Mask]) -> Result<f64> {
    if masks.len() < 3 {
        return Err(Error::TooFewResolutions(masks.len()));
    }
    let mut pts = Vec::with_capacity(masks.len());
    for m in masks {
        let count = m.count_set();
        if count == 0 {
            return Err(Error::InvalidConfig(
                "box counting on an empty mask".into(),
            ));
        }
        pts.push(((m.width() as f64).ln(), (count as f64).ln()));
    }
    Ok(fit_slope(&pts))
}

/// Box-counting estimate of the dimension of the boundary of P(k):
/// renders the phase mask at each resolution, extracts its boundary
/// pixels, and fits log N against log resolution. Needs >= 3 resolutions.
///
/// Each rung uses q_cap equal to its pixel resolution: a column of width
/// 1/R always contains a fraction with q <= R, so every column resolves.
/// A fixed cap would leave unresolvable columns at fine resolutions,
/// and their stripes corrupt the boundary count.
pub fn boundary_dimension_estimate(k: i64, resolutions: &[u32]) -> Result<f64> {
    if resolutions.len() < 3 {
        return Err(Error::TooFewResolutions(resolutions.len()));
    }
    let boundaries = resolutions
        .iter()
        .map(|&r| Ok(phase_mask(k, r, r as i64)?.boundary()))
        .collect::<Result<Vec<Mask>>>()?;
    box_counting_slope(&boundaries)
}

/// Seeded pairs of nearby reduced fractions, for spot-checking the Holder
/// continuity of the spectrum.
pub fn random_flux_pairs(
    seed: u64,
    count: usize,
    q_cap: i64,
    max_delta: f64,
) -> Vec<(RationalFlux, RationalFlux)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = |rng: &mut ChaCha8Rng| loop {
        let q = rng.random_range(1..=q_cap);
        let p = rng.random_range(0..=q);
        if gcd(p, q) == 1 {
            return RationalFlux::new(p, q).expect("0 <= p <= q");
        }
    };
    let mut pairs = Vec::with_capacity(count);
    while pairs.len() < count {
        let a = sample(&mut rng);
        let b = sample(&mut rng);
        if a != b && (a.value() - b.value()).abs() <= max_delta {
            pairs.push((a, b));
        }
    }
    pairs
}
