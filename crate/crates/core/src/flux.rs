//! Rational magnetic flux per unit cell.
//!
//! Every quantity in the phase diagram is indexed by a reduced fraction
//! p/q in [0, 1]; this module owns that type and the ordered enumeration
//! of all such fractions up to a denominator bound.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Greatest common divisor, always nonnegative.
pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

/// Extended Euclid: returns (g, x, y) with a*x + b*y = g = gcd(a, b).
pub fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        let s = if a < 0 { -1 } else { 1 };
        return (a.abs(), s, 0);
    }
    let (g, x, y) = extended_gcd(b, a % b);
    (g, y, x - (a / b) * y)
}

/// Reduced fraction p/q in [0, 1]: the flux per unit cell in units of the
/// flux quantum. The horizontal coordinate of the phase diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalFlux {
    p: i64,
    q: i64,
}

impl RationalFlux {
    /// Construct from any integer pair; the fraction is reduced so that
    /// gcd(p, q) = 1 always holds. Fails for q = 0 or a value outside [0, 1].
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::ZeroDenominator(q));
        }
        let (mut p, mut q) = if q < 0 { (-p, -q) } else { (p, q) };
        if p < 0 || p > q {
            return Err(Error::FluxOutOfRange { p, q });
        }
        let g = gcd(p, q);
        p /= g;
        q /= g;
        Ok(Self { p, q })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// Time-reversal partner (q - p)/q.
    pub fn complement(&self) -> Self {
        Self {
            p: self.q - self.p,
            q: self.q,
        }
    }

    /// True if the given pair was already in lowest terms.
    pub fn is_reduced(p: i64, q: i64) -> bool {
        gcd(p, q) == 1
    }

    /// All reduced fractions in [0, 1] with denominator <= max_den, in
    /// increasing order (the Farey sequence of that order, endpoints
    /// included). Uses the neighbor recurrence, O(1) per term.
    pub fn farey_sequence(max_den: i64) -> Vec<RationalFlux> {
        assert!(max_den >= 1, "farey_sequence needs max_den >= 1");
        let m = max_den;
        let mut out = Vec::new();
        let (mut a, mut b, mut c, mut d) = (0i64, 1i64, 1i64, m);
        out.push(RationalFlux { p: a, q: b });
        while c <= m {
            let k = (b + m) / d;
            let (na, nb) = (k * c - a, k * d - b);
            a = c;
            b = d;
            c = na;
            d = nb;
            out.push(RationalFlux { p: a, q: b });
        }
        out
    }
}

impl PartialOrd for RationalFlux {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RationalFlux {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // exact cross-multiplication; q <= i64 range so i128 never overflows
        let lhs = self.p as i128 * other.q as i128;
        let rhs = other.p as i128 * self.q as i128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for RationalFlux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for RationalFlux {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (ps, qs) = s
            .split_once('/')
            .ok_or_else(|| Error::InvalidConfig(format!("flux must be P/Q, got {s:?}")))?;
        let p: i64 = ps
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad flux numerator {ps:?}")))?;
        let q: i64 = qs
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad flux denominator {qs:?}")))?;
        RationalFlux::new(p, q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_reduces() {
        let f = RationalFlux::new(2, 4).unwrap();
        assert_eq!((f.p(), f.q()), (1, 2));
        let f = RationalFlux::new(0, 7).unwrap();
        assert_eq!((f.p(), f.q()), (0, 1));
        let f = RationalFlux::new(5, 5).unwrap();
        assert_eq!((f.p(), f.q()), (1, 1));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(RationalFlux::new(3, 2).is_err());
        assert!(RationalFlux::new(-1, 2).is_err());
        assert!(RationalFlux::new(1, 0).is_err());
    }

    #[test]
    fn negative_denominator_normalizes() {
        let f = RationalFlux::new(-1, -3).unwrap();
        assert_eq!((f.p(), f.q()), (1, 3));
    }

    #[test]
    fn parse_and_display_round_trip() {
        let f: RationalFlux = "3/7".parse().unwrap();
        assert_eq!(f.to_string(), "3/7");
        let f: RationalFlux = "4/8".parse().unwrap();
        assert_eq!(f.to_string(), "1/2");
        assert!("three/7".parse::<RationalFlux>().is_err());
        assert!("3".parse::<RationalFlux>().is_err());
    }

    #[test]
    fn farey_order_three() {
        let f = RationalFlux::farey_sequence(3);
        let got: Vec<String> = f.iter().map(|x| x.to_string()).collect();
        assert_eq!(got, ["0/1", "1/3", "1/2", "2/3", "1/1"]);
    }

    #[test]
    fn farey_order_one_and_two() {
        let got: Vec<String> = RationalFlux::farey_sequence(1)
            .iter()
            .map(|x| x.to_string())
            .collect();
        assert_eq!(got, ["0/1", "1/1"]);
        let got: Vec<String> = RationalFlux::farey_sequence(2)
            .iter()
            .map(|x| x.to_string())
            .collect();
        assert_eq!(got, ["0/1", "1/2", "1/1"]);
    }

    #[test]
    fn farey_sorted_reduced_and_sized() {
        for m in 1..=60 {
            let f = RationalFlux::farey_sequence(m);
            for w in f.windows(2) {
                assert!(w[0] < w[1], "not strictly sorted at order {m}");
            }
            for x in &f {
                assert_eq!(gcd(x.p(), x.q()), 1);
                assert!(x.q() <= m);
            }
        }
    }

    #[test]
    fn extended_gcd_identity() {
        for a in -20..=20i64 {
            for b in -20..=20i64 {
                let (g, x, y) = extended_gcd(a, b);
                assert_eq!(g, gcd(a, b));
                assert_eq!(a * x + b * y, g, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn complement_mirrors() {
        let f = RationalFlux::new(2, 5).unwrap();
        assert_eq!(f.complement().to_string(), "3/5");
        assert_eq!(f.complement().complement(), f);
    }

    #[test]
    fn exact_ordering() {
        let a = RationalFlux::new(1, 3).unwrap();
        let b = RationalFlux::new(333_333, 1_000_000).unwrap();
        assert!(b < a);
    }
}
