//! Component counting for the pure phases.
//!
//! The phase with Hall conductance k pinches off exactly at the flux
//! values whose denominator is too small to realize k, i.e. at the Farey
//! fractions of order 2|k|. Its number of connected components is
//! therefore |F_{2|k|}| - 1 = sum of the totients phi(1) + ... + phi(2|k|),
//! which grows like 12 k^2 / pi^2. The k = 0 phase is the two half-planes
//! above and below the spectrum.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flux::RationalFlux;
use crate::labels::PhaseAtlas;

/// Euler's totient by trial-division factorization.
pub fn totient(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::TotientOfZero);
    }
    let mut n = n;
    let mut phi = n;
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            phi -= phi / d;
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    Ok(phi)
}

/// All reduced fractions in [0, 1] with denominator <= m, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FareySet {
    pub order: i64,
    pub elements: Vec<RationalFlux>,
}

impl FareySet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, f: RationalFlux) -> bool {
        self.elements.binary_search(&f).is_ok()
    }
}

/// The Farey set of order m (m >= 1), endpoints 0 and 1 included.
pub fn farey_set(m: i64) -> FareySet {
    assert!(m >= 1, "farey_set needs order >= 1");
    FareySet {
        order: m,
        elements: RationalFlux::farey_sequence(m),
    }
}

/// Number of connected components of the phase with Hall conductance k,
/// together with the wing-tip flux values.
#[derive(Debug, Clone)]
pub struct ComponentCount {
    pub k: i64,
    pub count: u64,
    /// Flux values where the phase pinches off; empty for k = 0.
    pub tips: Vec<RationalFlux>,
}

/// Count the components of phase k. For k != 0 this is the totient sum up
/// to 2|k| with the wing-tips at the Farey fractions of order 2|k|; the
/// k = 0 phase always has the two components above and below the spectrum.
pub fn component_count(k: i64) -> ComponentCount {
    if k == 0 {
        return ComponentCount {
            k,
            count: 2,
            tips: Vec::new(),
        };
    }
    let order = 2 * k.unsigned_abs();
    let count: u64 = (1..=order).map(|q| totient(q).expect("q >= 1")).sum();
    ComponentCount {
        k,
        count,
        tips: RationalFlux::farey_sequence(order as i64),
    }
}

/// Component count divided by its leading-order growth 12 k^2 / pi^2.
pub fn asymptotic_ratio(k: i64) -> Result<f64> {
    if k == 0 {
        return Err(Error::RatioOfZero);
    }
    let count = component_count(k).count as f64;
    Ok(count * std::f64::consts::PI.powi(2) / (12.0 * (k * k) as f64))
}

/// Outcome of scanning the atlas for the wing-tips of phase k.
#[derive(Debug, Clone, Serialize)]
pub struct TipReport {
    pub k: i64,
    /// Fluxes of Farey order 2|k| where the label wrongly appears.
    pub spurious: Vec<String>,
    /// A flux with q = 2|k|+1 where the label is present, if any.
    pub witness: Option<String>,
    pub pass: bool,
}

/// Verify that label k is absent from every flux in the Farey set of
/// order 2|k| (those fluxes are exactly the wing-tips) and present at
/// some flux with denominator 2|k|+1. Needs atlas q_max >= 2|k|+1.
pub fn tip_absence_check(atlas: &PhaseAtlas, k: i64) -> Result<TipReport> {
    if k == 0 {
        // trivially present at every flux through the semi-infinite gaps
        return Ok(TipReport {
            k,
            spurious: Vec::new(),
            witness: atlas.fluxes().first().map(|f| f.to_string()),
            pass: true,
        });
    }
    let needed = 2 * k.abs() + 1;
    if atlas.q_max() < needed {
        return Err(Error::InsufficientQMax {
            q_max: atlas.q_max(),
            needed,
        });
    }
    let mut spurious = Vec::new();
    for f in farey_set(2 * k.abs()).elements {
        let recs = atlas.records_at(f).expect("q <= q_max");
        for rec in recs {
            if rec.k == k && !rec.central_closed {
                spurious.push(f.to_string());
            }
        }
    }
    let witness = atlas
        .fluxes()
        .iter()
        .find(|f| {
            f.q() == needed
                && atlas
                    .records_at(**f)
                    .expect("q <= q_max")
                    .iter()
                    .any(|rec| rec.k == k && !rec.central_closed)
        })
        .map(|f| f.to_string());
    Ok(TipReport {
        k,
        pass: spurious.is_empty() && witness.is_some(),
        spurious,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::build_atlas;

    /// Count coprime residues directly.
    fn brute_totient(n: u64) -> u64 {
        (1..=n)
            .filter(|&i| crate::flux::gcd(i as i64, n as i64) == 1)
            .count() as u64
    }

    #[test]
    fn totient_small_values() {
        assert_eq!(totient(1).unwrap(), 1);
        assert_eq!(totient(2).unwrap(), 1);
        assert_eq!(totient(3).unwrap(), 2);
        assert_eq!(totient(12).unwrap(), 4);
        assert_eq!(totient(97).unwrap(), 96);
    }

    #[test]
    fn totient_rejects_zero() {
        assert!(matches!(totient(0), Err(Error::TotientOfZero)));
    }

    #[test]
    fn totient_matches_brute_force() {
        for n in 1..=300 {
            assert_eq!(totient(n).unwrap(), brute_totient(n), "n={n}");
        }
    }

    #[test]
    fn farey_examples() {
        let f = farey_set(2);
        let got: Vec<String> = f.elements.iter().map(|x| x.to_string()).collect();
        assert_eq!(got, ["0/1", "1/2", "1/1"]);
        let f = farey_set(3);
        let got: Vec<String> = f.elements.iter().map(|x| x.to_string()).collect();
        assert_eq!(got, ["0/1", "1/3", "1/2", "2/3", "1/1"]);
        assert_eq!(farey_set(1).len(), 2);
    }

    #[test]
    fn farey_size_is_one_plus_totient_sum() {
        for m in 1..=200u64 {
            let size = farey_set(m as i64).len() as u64;
            let sum: u64 = (1..=m).map(|q| totient(q).unwrap()).sum();
            assert_eq!(size, 1 + sum, "order {m}");
        }
    }

    #[test]
    fn component_count_examples() {
        assert_eq!(component_count(0).count, 2);
        assert_eq!(component_count(1).count, 2);
        assert_eq!(component_count(2).count, 6);
        assert_eq!(component_count(-3).count, 12);
    }

    #[test]
    fn component_count_sign_symmetric() {
        for k in 1..=30 {
            assert_eq!(component_count(k).count, component_count(-k).count);
        }
    }

    #[test]
    fn tips_outnumber_components_by_one() {
        for k in 1..=12i64 {
            let c = component_count(k);
            assert_eq!(c.count + 1, c.tips.len() as u64, "k={k}");
        }
        assert!(component_count(0).tips.is_empty());
    }

    #[test]
    fn asymptotic_ratio_examples() {
        let r1 = asymptotic_ratio(1).unwrap();
        assert!((r1 - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
        let r10 = asymptotic_ratio(10).unwrap();
        assert!((0.9..1.2).contains(&r10), "ratio(10) = {r10}");
        assert_eq!(component_count(10).count, 128);
        let r100 = asymptotic_ratio(100).unwrap();
        assert!((0.98..1.05).contains(&r100), "ratio(100) = {r100}");
        assert!(matches!(asymptotic_ratio(0), Err(Error::RatioOfZero)));
    }

    #[test]
    fn ratio_trend_toward_one() {
        let r20 = asymptotic_ratio(20).unwrap();
        let r200 = asymptotic_ratio(200).unwrap();
        assert!((r200 - 1.0).abs() < (r20 - 1.0).abs());
    }

    #[test]
    fn tip_absence_small_k() {
        let atlas = build_atlas(13).unwrap();
        for k in [-5i64, -3, -1, 1, 2, 3, 4, 5] {
            let report = tip_absence_check(&atlas, k).unwrap();
            assert!(report.pass, "k={k}: {report:?}");
        }
        let zero = tip_absence_check(&atlas, 0).unwrap();
        assert!(zero.pass);
    }

    #[test]
    fn tip_absence_tight_examples() {
        let atlas = build_atlas(5).unwrap();
        let r = tip_absence_check(&atlas, 1).unwrap();
        assert!(r.pass);
        assert_eq!(r.witness.as_deref(), Some("1/3"));
        let r = tip_absence_check(&atlas, 2).unwrap();
        assert!(r.pass);
        assert_eq!(r.witness.as_deref(), Some("1/5"));
    }

    #[test]
    fn tip_absence_needs_headroom() {
        let atlas = build_atlas(5).unwrap();
        assert!(matches!(
            tip_absence_check(&atlas, 3),
            Err(Error::InsufficientQMax { .. })
        ));
    }
}
