//! Calibration run for the constants frozen in the acceptance suite.
//!
//! Prints the worst observed ratio on each fixed-seed grid. The frozen
//! constants are these maxima times 1.5.
//!
//! Run with `cargo run --release -p hypvoro --example calibrate`.

use std::f64::consts::TAU;
use std::time::Instant;

use hypvoro::exec::Exec;
use hypvoro::hypgeo::HPoint;
use hypvoro::rng::{self, domain};
use hypvoro::schemes::{count_planar_pairs, z_tail, Scheme, ZParams};
use hypvoro::verify::{geometry_region, phi_star_check};
use rand::Rng;

fn main() {
    let exec = Exec::default();

    // sin(2 phi*) <= C' theta (1 - x) on the grid of the formula check.
    let mut worst: f64 = 0.0;
    for i in 0..7 {
        let x = 0.3 + 0.1 * i as f64;
        for &t in &[1e-4, 1e-3, 1e-2] {
            let p = phi_star_check(x, t).expect("grid point");
            worst = worst.max(p.bound_ratio(x, t));
        }
    }
    println!("phi* bound ratio: max {worst:.6}");

    // Thin-triangle region ratio.
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    let mut worst_e: f64 = 0.0;
    for i in 0..10 {
        let x = 0.05 + 0.1 * i as f64;
        for &theta in &[1e-3, 1e-2, 1e-1] {
            let e = geometry_region(exec, x, theta, 2.0, 400_000, 11).expect("grid point");
            println!("  x={x:.2} theta={theta:.0e} hits={} ratio={:.4} ratio_e={:.4}", e.hits, e.ratio, e.ratio_e);
            worst = worst.max(e.ratio);
            worst_e = worst_e.max(e.ratio_e);
        }
    }
    println!("region ratio: max {worst:.4} (euclidean {worst_e:.4}) in {:?}", t0.elapsed());

    // Planar pairs: count^(1/k) / k.
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for set in 0..60u64 {
        let k = 3 + (set % 4) as usize;
        let mut g = rng::stream(17, domain::VERIFY, set);
        let r = 0.5 + 7.5 * g.random::<f64>();
        let pts: Vec<HPoint> = (0..k)
            .map(|_| {
                let u: f64 = g.random();
                HPoint::polar(hypvoro::ppp::radial_inverse_cdf(u, r), g.random::<f64>() * TAU)
            })
            .collect();
        let n = count_planar_pairs(&pts, true).expect("small set");
        worst = worst.max((n as f64).powf(1.0 / k as f64) / k as f64);
    }
    println!("planar pairs C: max {worst:.4} in {:?}", t0.elapsed());

    // Z tail on the chain scheme.
    let p = ZParams::new(3.0, 0.1, 5).unwrap();
    let scheme = Scheme::strip(40).unwrap();
    for &eps in &[0.001, 0.002, 0.003, 0.004, 0.006, 0.008] {
        let t0 = Instant::now();
        let a = z_tail(exec, &p, &scheme, 10, eps, 200_000).unwrap();
        let b = z_tail(exec, &p, &scheme, 40, eps, 200_000).unwrap();
        println!(
            "z tail eps={eps}: k=10 {:.3e}, k=40 {:.3e} ({:?})",
            a.p_hat(),
            b.p_hat(),
            t0.elapsed()
        );
    }
}
