//! Verification suites behind `butterfly verify --suite <name>`.
//!
//! Each suite prints one [PASS]/[FAIL] line per check and reports overall
//! success to the caller (exit 1 on any failure).

use clap::ValueEnum;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use butterfly_core::coexist::{
    boundary_dimension_estimate, box_counting_slope, non_coexistence_check, random_flux_pairs,
    verify_proposition, wada_probe, Side,
};
use butterfly_core::labels::{build_atlas, label_symmetry_check};
use butterfly_core::raster::{calibration_line, calibration_square};
use butterfly_core::spectral::{compute_spectrum, hausdorff_distance};
use butterfly_core::RationalFlux;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Suite {
    Symmetry,
    Bounds,
    Proposition,
    Wada,
    Dimension,
}

pub fn run(suite: Suite, q_max: i64, seed: u64) -> anyhow::Result<bool> {
    match suite {
        Suite::Symmetry => symmetry(q_max),
        Suite::Bounds => bounds(q_max, seed),
        Suite::Proposition => proposition(),
        Suite::Wada => wada(q_max, seed),
        Suite::Dimension => dimension(),
    }
}

fn report(name: &str, pass: bool, detail: String) -> bool {
    let tag = if pass { "[PASS]" } else { "[FAIL]" };
    println!("{tag} {name}: {detail}");
    pass
}

fn symmetry(q_max: i64) -> anyhow::Result<bool> {
    let mut ok = true;
    let fluxes = RationalFlux::farey_sequence(q_max);
    let spectra: Vec<_> = fluxes.iter().map(|&f| compute_spectrum(f)).collect();

    let mut worst_e = 0.0f64;
    for s in &spectra {
        let n = s.bands().len();
        for i in 0..n {
            let a = s.bands()[i];
            let b = s.bands()[n - 1 - i];
            worst_e = worst_e.max((a.lo + b.hi).abs()).max((a.hi + b.lo).abs());
        }
    }
    ok &= report(
        "energy reflection E <-> -E",
        worst_e < 1e-9,
        format!("q <= {q_max}, worst asymmetry {worst_e:.3e}"),
    );

    let mut worst_phi = 0.0f64;
    for (f, s) in fluxes.iter().zip(&spectra) {
        let idx = fluxes.binary_search(&f.complement()).expect("same order");
        for (a, b) in s.bands().iter().zip(spectra[idx].bands()) {
            worst_phi = worst_phi
                .max((a.lo - b.lo).abs())
                .max((a.hi - b.hi).abs());
        }
    }
    ok &= report(
        "flux reflection phi <-> 1-phi",
        worst_phi < 1e-9,
        format!("q <= {q_max}, worst asymmetry {worst_phi:.3e}"),
    );

    let mut worst_central = 0.0f64;
    for s in &spectra {
        let q = s.flux().q();
        if q % 2 == 0 {
            let j = (q / 2) as usize;
            let raw = s.bands()[j].lo - s.bands()[j - 1].hi;
            worst_central = worst_central.max(raw.abs());
        }
    }
    ok &= report(
        "even-q central gap closed",
        worst_central < 1e-9,
        format!("widest central gap {worst_central:.3e}"),
    );

    let atlas = build_atlas(q_max)?;
    let labels = label_symmetry_check(&atlas);
    ok &= report(
        "label antisymmetry (exact)",
        labels.pass(),
        format!(
            "{} relations checked, {} violations",
            labels.checked,
            labels.violations.len()
        ),
    );
    Ok(ok)
}

fn bounds(q_max: i64, seed: u64) -> anyhow::Result<bool> {
    let mut ok = true;
    let fluxes = RationalFlux::farey_sequence(q_max.max(2));

    let mut contained = true;
    let mut bound_ok = true;
    let mut worst_ratio = 0.0f64;
    for &f in &fluxes {
        let s = compute_spectrum(f);
        contained &= s.min_energy() >= -4.0 - 1e-9 && s.max_energy() <= 4.0 + 1e-9;
        if f.q() >= 2 {
            let w = s.total_bandwidth();
            bound_ok &= w <= 24.0 / f.q() as f64;
            worst_ratio = worst_ratio.max(w * f.q() as f64 / 24.0);
        }
    }
    ok &= report(
        "spectrum inside [-4, 4]",
        contained,
        format!("q <= {}", q_max.max(2)),
    );
    ok &= report(
        "total bandwidth <= 24/q",
        bound_ok,
        format!("worst fill {:.1}% of the bound", 100.0 * worst_ratio),
    );

    let pairs = random_flux_pairs(seed, 100, 40, 0.05);
    let mut holder_ok = true;
    let mut worst_fill = 0.0f64;
    for (a, b) in &pairs {
        let d = hausdorff_distance(&compute_spectrum(*a), &compute_spectrum(*b));
        let bound = 18.0 * (a.value() - b.value()).abs().sqrt();
        holder_ok &= d <= bound;
        worst_fill = worst_fill.max(d / bound);
    }
    ok &= report(
        "Holder distance <= 18 sqrt|dphi|",
        holder_ok,
        format!(
            "{} seeded pairs, worst fill {:.1}%",
            pairs.len(),
            100.0 * worst_fill
        ),
    );
    Ok(ok)
}

fn proposition() -> anyhow::Result<bool> {
    let mut ok = true;
    let cases = [
        (0i64, RationalFlux::new(1, 2).expect("1/2")),
        (1i64, RationalFlux::new(1, 3).expect("1/3")),
    ];
    for (k, base) in cases {
        let rep = verify_proposition(k, base, Side::Right, 12, 2)?;
        let measured = rep.entries.iter().filter(|e| !e.skipped).count();
        ok &= report(
            &format!("coexistence at (k={k}, phi={base})"),
            rep.pass,
            format!("{measured} measured (n, l) entries within the bound"),
        );
        // three labels outside the coset never touch the boundary point
        let mut floor_ok = true;
        let mut min_dist = f64::INFINITY;
        for dk in [1i64, -1, 2] {
            let kprime = k + dk;
            if (kprime - k).rem_euclid(base.q()) == 0 {
                continue;
            }
            let r = non_coexistence_check(k, kprime, base, 12)?;
            floor_ok &= r.pass;
            min_dist = min_dist.min(r.min_dist);
        }
        ok &= report(
            &format!("non-coexistence at (k={k}, phi={base})"),
            floor_ok,
            format!("min distance {min_dist:.4}"),
        );
    }
    Ok(ok)
}

fn wada(q_max: i64, seed: u64) -> anyhow::Result<bool> {
    // disc straddling the lower spectral edge at flux 1/2, jittered by seed
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cx = 0.48 + 0.04 * rng.random::<f64>();
    let cy = -2.88 + 0.10 * rng.random::<f64>();
    let radius = 0.13;
    let upper_q = q_max.max(11);
    let few = wada_probe((cx, cy), radius, 10)?;
    let many = wada_probe((cx, cy), radius, upper_q)?;
    let pass = many.len() > few.len();
    Ok(report(
        "disc label count grows with q_max",
        pass,
        format!(
            "disc ({cx:.4}, {cy:.4}) r={radius}: {} labels at q_max=10, {} at q_max={upper_q}",
            few.len(),
            many.len()
        ),
    ))
}

fn dimension() -> anyhow::Result<bool> {
    let mut ok = true;
    let line_masks: Vec<_> = [256u32, 512, 1024].iter().map(|&s| calibration_line(s)).collect();
    let line = box_counting_slope(&line_masks)?;
    ok &= report(
        "calibration line slope ~ 1",
        (line - 1.0).abs() <= 0.05,
        format!("slope {line:.4}"),
    );
    let square_masks: Vec<_> = [256u32, 512, 1024]
        .iter()
        .map(|&s| calibration_square(s))
        .collect();
    let square = box_counting_slope(&square_masks)?;
    ok &= report(
        "calibration square slope ~ 2",
        (square - 2.0).abs() <= 0.1,
        format!("slope {square:.4}"),
    );
    let slope = boundary_dimension_estimate(1, &[256, 512, 1024])?;
    ok &= report(
        "boundary dimension of the first wing",
        (0.85..=1.15).contains(&slope),
        format!("box-counting slope {slope:.4}"),
    );
    Ok(ok)
}
