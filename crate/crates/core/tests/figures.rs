//! Shape of the reference figure data.

use nli_core::analytic;
use nli_core::interferometer::InterferometerConfig;
use nli_core::sweep::{self, figure_config, Axis, FIGURE_ETA1, FIGURE_ETA2, FIGURE_GAIN, FIGURE_T1, FIGURE_T2};

fn grid_argmax(axis: Axis, m: f64) -> (f64, f64) {
    let table = sweep::run_fig4(&figure_config(), axis, &sweep::unit_grid(sweep::GRID_POINTS), &[m]).unwrap();
    let mut best = (f64::NEG_INFINITY, f64::NAN);
    for r in &table.rows {
        if let Some(v) = r.get(&table, "visibility") {
            if v > best.0 {
                best = (v, r.t.unwrap());
            }
        }
    }
    best
}

fn brute_force_argmax(axis: Axis, m: f64, points: usize) -> f64 {
    let mut best = (f64::NEG_INFINITY, f64::NAN);
    for k in 0..points {
        let t = k as f64 / (points - 1) as f64;
        let (t1, t2) = match axis {
            Axis::T1 => (t, FIGURE_T2),
            Axis::T2 => (FIGURE_T1, t),
            Axis::TBoth => (t, t),
        };
        let c = InterferometerConfig::balanced(FIGURE_GAIN, t1, t2, FIGURE_ETA1, FIGURE_ETA2).unwrap();
        if let Ok(v) = analytic::visibility(&c, 0.0, m) {
            if v > best.0 {
                best = (v, t);
            }
        }
    }
    best.1
}

#[test]
fn detected_arm_visibility_peaks_at_the_other_arm_transmission() {
    let (_, t) = grid_argmax(Axis::T1, 100.0);
    assert_eq!(t, brute_force_argmax(Axis::T1, 100.0, sweep::GRID_POINTS));
    assert!((t - 0.4).abs() <= 0.05, "{t}");
    assert!((brute_force_argmax(Axis::T1, 100.0, 100_001) - 0.4).abs() <= 0.05);
}

#[test]
fn undetected_arm_visibility_peaks_near_detected_transmission_at_large_m() {
    for m in [100.0, 1000.0] {
        let (_, t) = grid_argmax(Axis::T2, m);
        assert_eq!(t, brute_force_argmax(Axis::T2, m, sweep::GRID_POINTS));
        assert!((t - 0.6).abs() <= 0.05, "m={m}: {t}");
    }
}

#[test]
fn unseeded_visibility_is_loss_balanced() {
    // with m = 0 the fringe depends on T1 / T2 only through the balance parameter
    let (v, t) = grid_argmax(Axis::TBoth, 0.0);
    assert!(v > 0.9 && t > 0.9, "V={v} at t={t}");
}

#[test]
fn visibility_rises_monotonically_with_seeding() {
    let v = sweep::run_fig2(&figure_config(), &sweep::integer_m_values(100)).unwrap().column("visibility");
    assert!(v.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn sensitivity_improves_monotonically_with_seeding() {
    let t = sweep::run_fig3(&figure_config(), &sweep::integer_m_values(100)).unwrap();
    let db = t.column("dphi_min_db");
    assert!(db.windows(2).all(|w| w[1] < w[0]));
    let snr = t.column("snr_ratio");
    assert_eq!(snr[0], 1.0);
    assert!(snr.windows(2).all(|w| w[1] > w[0]));
}
