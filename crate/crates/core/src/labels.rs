//! Hall-conductance labels for spectral gaps.
//!
//! Gap j at flux p/q carries the unique integer k with p*k = j (mod q)
//! and |k| < q/2; k is the quantized Hall conductance of the gap. The
//! closed central gap at even q takes the formal value q/2 (flagged), and
//! the two semi-infinite gaps take k = 0. All labeling is exact integer
//! arithmetic; no floating point enters.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::{extended_gcd, gcd, RationalFlux};
use crate::spectral::{compute_spectrum, Spectrum};

/// Denominator cap for atlas construction; spectra are O(q^3) apiece and
/// there are ~0.3 q_max^2 of them.
pub const ATLAS_QMAX_CAP: i64 = 256;

/// Hall conductance assigned to one gap index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapLabel {
    pub k: i64,
    /// Set for the zero-width central gap at even q, where the label is
    /// the formal coset representative +q/2.
    pub central_closed: bool,
}

/// Solve p*k = j (mod q) for the Hall conductance of gap j.
///
/// Requires a reduced fraction and 0 <= j <= q. Returns the balanced
/// residue |k| < q/2, or the flagged formal value +q/2 for the central
/// gap at even q; gaps 0 and q get k = 0.
pub fn solve_label(p: i64, q: i64, j: i64) -> Result<GapLabel> {
    if q < 1 || gcd(p, q) != 1 {
        return Err(Error::NotReduced {
            p,
            q,
            g: gcd(p, q),
        });
    }
    if !(0..=q).contains(&j) {
        return Err(Error::GapIndexOutOfRange { j, q });
    }
    // k = p^{-1} j mod q, mapped to the balanced residue system
    let (_, inv, _) = extended_gcd(p.rem_euclid(q), q);
    let k0 = (inv.rem_euclid(q) * j.rem_euclid(q)).rem_euclid(q);
    if q % 2 == 0 && k0 == q / 2 {
        return Ok(GapLabel {
            k: q / 2,
            central_closed: true,
        });
    }
    let k = if 2 * k0 > q { k0 - q } else { k0 };
    Ok(GapLabel {
        k,
        central_closed: false,
    })
}

/// One labeled gap: flux, gap index, Hall conductance, density j/q, and
/// the energy interval (semi-infinite for j = 0 and j = q, empty for the
/// closed central gap).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRecord {
    pub flux: RationalFlux,
    pub j: i64,
    pub k: i64,
    pub central_closed: bool,
    /// Lower interval edge; -inf for gap 0.
    pub lo: f64,
    /// Upper interval edge; +inf for gap q.
    pub hi: f64,
}

impl GapRecord {
    /// Integrated density of states inside the gap, as the exact pair
    /// (j, q).
    pub fn rho(&self) -> (i64, i64) {
        (self.j, self.flux.q())
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// True for gaps with nonempty interior (excludes the closed central
    /// gap, includes the semi-infinite ones).
    pub fn is_open(&self) -> bool {
        self.lo < self.hi
    }

    pub fn contains_energy(&self, e: f64) -> bool {
        self.lo < e && e < self.hi
    }
}

#[derive(Serialize, Deserialize)]
struct GapRecordRepr {
    p: i64,
    q: i64,
    j: i64,
    k: i64,
    central_closed: bool,
    rho: String,
    e_lo: Option<f64>,
    e_hi: Option<f64>,
}

impl Serialize for GapRecord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GapRecordRepr {
            p: self.flux.p(),
            q: self.flux.q(),
            j: self.j,
            k: self.k,
            central_closed: self.central_closed,
            rho: format!("{}/{}", self.j, self.flux.q()),
            e_lo: self.lo.is_finite().then_some(self.lo),
            e_hi: self.hi.is_finite().then_some(self.hi),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GapRecord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = GapRecordRepr::deserialize(d)?;
        let flux = RationalFlux::new(repr.p, repr.q).map_err(D::Error::custom)?;
        Ok(GapRecord {
            flux,
            j: repr.j,
            k: repr.k,
            central_closed: repr.central_closed,
            lo: repr.e_lo.unwrap_or(f64::NEG_INFINITY),
            hi: repr.e_hi.unwrap_or(f64::INFINITY),
        })
    }
}

/// Label every gap of a spectrum: q+1 records for j = 0..=q.
pub fn label_spectrum(spectrum: &Spectrum) -> Vec<GapRecord> {
    let flux = spectrum.flux();
    let (p, q) = (flux.p(), flux.q());
    spectrum
        .gaps()
        .iter()
        .enumerate()
        .map(|(j, gap)| {
            let j = j as i64;
            let label = solve_label(p, q, j).expect("gap index in range for a valid spectrum");
            GapRecord {
                flux,
                j,
                k: label.k,
                central_closed: label.central_closed,
                lo: gap.lo,
                hi: gap.hi,
            }
        })
        .collect()
}

/// Every labeled gap for every reduced fraction with denominator up to
/// q_max: the discretized phase diagram.
#[derive(Debug, Clone)]
pub struct PhaseAtlas {
    q_max: i64,
    fluxes: Vec<RationalFlux>,
    records: Vec<Vec<GapRecord>>,
    by_label: BTreeMap<i64, Vec<(u32, u32)>>,
}

/// Compute and label the spectrum of every reduced fraction with q <= q_max.
/// Fluxes are processed in parallel; the atlas itself is immutable.
pub fn build_atlas(q_max: i64) -> Result<PhaseAtlas> {
    if q_max < 1 {
        return Err(Error::InvalidConfig(format!("q_max {q_max} < 1")));
    }
    if q_max > ATLAS_QMAX_CAP {
        return Err(Error::QMaxTooLarge {
            q_max,
            cap: ATLAS_QMAX_CAP,
        });
    }
    let fluxes = RationalFlux::farey_sequence(q_max);
    let records: Vec<Vec<GapRecord>> = fluxes
        .par_iter()
        .map(|&f| label_spectrum(&compute_spectrum(f)))
        .collect();
    let mut by_label: BTreeMap<i64, Vec<(u32, u32)>> = BTreeMap::new();
    for (fi, recs) in records.iter().enumerate() {
        for (gi, rec) in recs.iter().enumerate() {
            by_label
                .entry(rec.k)
                .or_default()
                .push((fi as u32, gi as u32));
        }
    }
    Ok(PhaseAtlas {
        q_max,
        fluxes,
        records,
        by_label,
    })
}

impl PhaseAtlas {
    pub fn q_max(&self) -> i64 {
        self.q_max
    }

    pub fn fluxes(&self) -> &[RationalFlux] {
        &self.fluxes
    }

    pub fn records_at(&self, flux: RationalFlux) -> Option<&[GapRecord]> {
        let idx = self.fluxes.binary_search(&flux).ok()?;
        Some(&self.records[idx])
    }

    /// All records carrying Hall conductance k (central records appear
    /// under their stored +q/2 representative).
    pub fn with_label(&self, k: i64) -> impl Iterator<Item = &GapRecord> + '_ {
        self.by_label
            .get(&k)
            .into_iter()
            .flatten()
            .map(move |&(fi, gi)| &self.records[fi as usize][gi as usize])
    }

    pub fn iter(&self) -> impl Iterator<Item = &GapRecord> + '_ {
        self.records.iter().flatten()
    }

    pub fn labels(&self) -> impl Iterator<Item = i64> + '_ {
        self.by_label.keys().copied()
    }
}

/// One violated symmetry relation between two records.
#[derive(Debug, Clone)]
pub struct SymmetryViolation {
    pub flux: RationalFlux,
    pub j: i64,
    pub relation: &'static str,
    pub expected: i64,
    pub found: i64,
}

impl fmt::Display for SymmetryViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} gap {} under {}: expected k = {}, found {}",
            self.flux, self.j, self.relation, self.expected, self.found
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct SymmetryReport {
    pub checked: usize,
    pub violations: Vec<SymmetryViolation>,
}

impl SymmetryReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check the four-fold label antisymmetry across the whole atlas: the
/// record at ((q-p)/q, j) and the record at (p/q, q-j) must both carry -k.
/// Central records match as the coset {q/2 + l*q}, which is closed under
/// negation.
pub fn label_symmetry_check(atlas: &PhaseAtlas) -> SymmetryReport {
    fn check(
        flux: RationalFlux,
        j: i64,
        relation: &'static str,
        a: &GapRecord,
        b: &GapRecord,
        report: &mut SymmetryReport,
    ) {
        report.checked += 1;
        let matches = if a.central_closed || b.central_closed {
            a.central_closed && b.central_closed && a.flux.q() == b.flux.q()
        } else {
            b.k == -a.k
        };
        if !matches {
            report.violations.push(SymmetryViolation {
                flux,
                j,
                relation,
                expected: -a.k,
                found: b.k,
            });
        }
    }
    let mut report = SymmetryReport::default();
    for flux in atlas.fluxes() {
        let recs = atlas.records_at(*flux).expect("atlas flux");
        let mirror = atlas
            .records_at(flux.complement())
            .expect("complement shares the denominator");
        let q = flux.q();
        for rec in recs {
            let j = rec.j;
            check(
                *flux,
                j,
                "flux reflection",
                rec,
                &mirror[j as usize],
                &mut report,
            );
            check(
                *flux,
                j,
                "energy reflection",
                rec,
                &recs[(q - j) as usize],
                &mut report,
            );
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn flux(p: i64, q: i64) -> RationalFlux {
        RationalFlux::new(p, q).unwrap()
    }

    /// Brute-force label: scan the balanced residue window directly.
    fn brute_label(p: i64, q: i64, j: i64) -> Option<i64> {
        let half = q / 2;
        (-half..=half).find(|&k| (p * k - j).rem_euclid(q) == 0)
    }

    #[test]
    fn label_examples_q3() {
        assert_eq!(solve_label(1, 3, 1).unwrap().k, 1);
        assert_eq!(solve_label(1, 3, 2).unwrap().k, -1);
        assert_eq!(solve_label(1, 3, 0).unwrap().k, 0);
        assert_eq!(solve_label(1, 3, 3).unwrap().k, 0);
    }

    #[test]
    fn label_example_two_fifths() {
        let l = solve_label(2, 5, 1).unwrap();
        assert_eq!(l.k, -2);
        assert!(!l.central_closed);
        assert_eq!((2 * -2i64).rem_euclid(5), 1);
    }

    #[test]
    fn central_gap_is_flagged() {
        let l = solve_label(1, 2, 1).unwrap();
        assert_eq!(l.k, 1);
        assert!(l.central_closed);
        let l = solve_label(3, 8, 4).unwrap();
        assert_eq!(l.k, 4);
        assert!(l.central_closed);
    }

    #[test]
    fn rejects_unreduced_and_out_of_range() {
        assert!(matches!(
            solve_label(2, 4, 1),
            Err(Error::NotReduced { .. })
        ));
        assert!(matches!(
            solve_label(1, 3, 4),
            Err(Error::GapIndexOutOfRange { .. })
        ));
        assert!(matches!(
            solve_label(1, 3, -1),
            Err(Error::GapIndexOutOfRange { .. })
        ));
    }

    #[test]
    fn matches_brute_force_scan() {
        for q in 1..=30i64 {
            for p in 0..=q {
                if gcd(p, q) != 1 {
                    continue;
                }
                for j in 0..=q {
                    let got = solve_label(p, q, j).unwrap();
                    if got.central_closed {
                        assert_eq!(got.k, q / 2);
                        assert_eq!((p * got.k - j).rem_euclid(q), 0);
                    } else {
                        assert_eq!(Some(got.k), brute_label(p, q, j), "p={p} q={q} j={j}");
                        assert!(2 * got.k.abs() < q || q == 1, "p={p} q={q} j={j}");
                    }
                    // zero label exactly on the semi-infinite gaps
                    assert_eq!(got.k == 0, j == 0 || j == q, "p={p} q={q} j={j}");
                }
            }
        }
    }

    #[test]
    fn label_spectrum_one_third() {
        let recs = label_spectrum(&compute_spectrum(flux(1, 3)));
        let ks: Vec<i64> = recs.iter().map(|r| r.k).collect();
        assert_eq!(ks, [0, 1, -1, 0]);
        assert_eq!(recs[0].lo, f64::NEG_INFINITY);
        assert_eq!(recs[3].hi, f64::INFINITY);
        assert!(recs[1].is_open());
        assert_eq!(recs[1].rho(), (1, 3));
    }

    #[test]
    fn label_spectrum_half_flux() {
        let recs = label_spectrum(&compute_spectrum(flux(1, 2)));
        let ks: Vec<i64> = recs.iter().map(|r| r.k).collect();
        assert_eq!(ks, [0, 1, 0]);
        assert!(recs[1].central_closed);
        assert!(!recs[1].is_open(), "central interval must be empty");
    }

    #[test]
    fn label_spectrum_two_fifths() {
        let recs = label_spectrum(&compute_spectrum(flux(2, 5)));
        let ks: Vec<i64> = recs.iter().map(|r| r.k).collect();
        assert_eq!(ks, [0, -2, 1, -1, 2, 0]);
    }

    #[test]
    fn atlas_smallest_orders() {
        let atlas = build_atlas(1).unwrap();
        assert_eq!(atlas.fluxes().len(), 2);
        assert!(atlas.iter().all(|r| r.k == 0));

        let atlas = build_atlas(2).unwrap();
        let half = atlas.records_at(flux(1, 2)).unwrap();
        assert_eq!(half.len(), 3);
        assert!(half[1].central_closed);
    }

    #[test]
    fn atlas_rejects_big_qmax() {
        assert!(matches!(
            build_atlas(ATLAS_QMAX_CAP + 1),
            Err(Error::QMaxTooLarge { .. })
        ));
        assert!(build_atlas(0).is_err());
    }

    #[test]
    fn atlas_labels_complete_and_unique_q10() {
        let atlas = build_atlas(10).unwrap();
        for f in atlas.fluxes() {
            let recs = atlas.records_at(*f).unwrap();
            assert_eq!(recs.len(), f.q() as usize + 1);
            let open_nonzero: Vec<i64> = recs
                .iter()
                .filter(|r| !r.central_closed && r.k != 0)
                .map(|r| r.k)
                .collect();
            let expect: BTreeSet<i64> = (1..)
                .take_while(|k| 2 * k < f.q())
                .flat_map(|k| [k, -k])
                .collect();
            let got: BTreeSet<i64> = open_nonzero.iter().copied().collect();
            assert_eq!(got.len(), open_nonzero.len(), "duplicate label at {f}");
            assert_eq!(got, expect, "label set mismatch at {f}");
        }
    }

    #[test]
    fn atlas_label_index_agrees() {
        let atlas = build_atlas(7).unwrap();
        for k in atlas.labels() {
            for rec in atlas.with_label(k) {
                assert_eq!(rec.k, k);
            }
        }
        let count: usize = atlas.labels().map(|k| atlas.with_label(k).count()).sum();
        assert_eq!(count, atlas.iter().count());
    }

    #[test]
    fn symmetry_check_passes_small_atlas() {
        let atlas = build_atlas(5).unwrap();
        let report = label_symmetry_check(&atlas);
        assert!(report.pass(), "violations: {:?}", report.violations);
        assert!(report.checked > 0);
    }

    #[test]
    fn symmetry_single_pairs() {
        // energy reflection within one flux
        assert_eq!(solve_label(1, 3, 1).unwrap().k, 1);
        assert_eq!(solve_label(1, 3, 2).unwrap().k, -1);
        // flux reflection across the pair 1/5 vs 4/5
        let a = solve_label(1, 5, 1).unwrap().k;
        let b = solve_label(4, 5, 1).unwrap().k;
        assert_eq!(a, -b);
    }

    #[test]
    fn density_consistency() {
        for q in 1..=20i64 {
            for p in (0..=q).filter(|&p| gcd(p, q) == 1) {
                for j in 0..=q {
                    let l = solve_label(p, q, j).unwrap();
                    // flux * k - rho must be an integer: (p k - j) / q
                    assert_eq!((p * l.k - j).rem_euclid(q), 0, "p={p} q={q} j={j}");
                }
            }
        }
    }

    #[test]
    fn record_json_shape() {
        let recs = label_spectrum(&compute_spectrum(flux(1, 2)));
        let v = serde_json::to_value(recs[0]).unwrap();
        assert_eq!(v["p"], 1);
        assert_eq!(v["q"], 2);
        assert_eq!(v["rho"], "0/2");
        assert!(v["e_lo"].is_null(), "semi-infinite edge must be null");
        assert!(v["e_hi"].is_number());
        let back: GapRecord = serde_json::from_value(v).unwrap();
        assert_eq!(back, recs[0]);

        let central = serde_json::to_value(recs[1]).unwrap();
        assert_eq!(central["central_closed"], true);
        assert_eq!(central["k"], 1);
    }
}
