//! Release gate: every criterion prints one PASS/FAIL line; the test fails if
//! any criterion fails. Run with `--nocapture` to see the report.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use v2x_beam::antenna::{AntennaArray, AntennaSelection, ElementId};
use v2x_beam::config::parse_scenario_file;
use v2x_beam::geometry::{normalize_angle, Position};
use v2x_beam::linkbudget::{distance_ratio_for_gain, free_space_path_loss, received_power_inverse_square, LinkBudget};
use v2x_beam::propagation::{
    coverage_grid, dominant_path_loss, CoverageSetup, DominantPathParams, Environment, Execution, GridRegion, Obstacle,
};
use v2x_beam::scenario::{distance_run, rotation_sweep, run_comparison, ScenarioConfig};
use v2x_beam::switching::{select_antenna, SwitchPolicy};

const SHIPPED_SCENARIO: &str = include_str!("../scenarios/l_shaped_approach.toml");

/// Mean switched-minus-omni RSSI of the shipped scenario, from an independent
/// per-sample evaluation of the link budget (Python, double precision).
const L_SHAPE_MEAN_DELTA_DB: f64 = 6.416978362275554;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, ok: impl Into<String>, bad: impl Into<String>) -> Outcome {
    if cond {
        Ok(ok.into())
    } else {
        Err(bad.into())
    }
}

fn ac1_doubling_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let expected = 20.0 * 2f64.log10();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let d = 10f64.powf(rng.gen_range(-1.0..4.0));
        let f = 10f64.powf(rng.gen_range(8.0..11.0));
        let step = free_space_path_loss(2.0 * d, f).unwrap() - free_space_path_loss(d, f).unwrap();
        worst = worst.max((step - expected).abs());
    }
    check(
        worst <= 1e-9 && (expected - 6.0206).abs() < 5e-5,
        format!("max |ΔFSPL − 20·lg2| = {worst:.2e} dB over 1000 pairs"),
        format!("doubling step deviates by {worst:.3e} dB"),
    )
}

fn ac2_distance_gain_tradeoff() -> Outcome {
    let r8 = distance_ratio_for_gain(8.0);
    let r6 = distance_ratio_for_gain(6.0206);
    check(
        (r8 - 2.5119).abs() <= 1e-4 && (r6 - 2.0).abs() <= 1e-6,
        format!("ratio(8 dB) = {r8:.6}, ratio(6.0206 dB) = {r6:.8}"),
        format!("ratio(8) = {r8}, ratio(6.0206) = {r6}"),
    )
}

fn ac3_budget_vs_inverse_square() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let pt = rng.gen_range(-30.0..40.0);
        let d = 10f64.powf(rng.gen_range(-1.0..4.0));
        let f = 10f64.powf(rng.gen_range(8.0..11.0));
        let budget = LinkBudget {
            tx_power: pt,
            path_loss_fs: free_space_path_loss(d, f).unwrap(),
            ..LinkBudget::default()
        };
        let linear = received_power_inverse_square(pt, d, f).unwrap();
        worst = worst.max((budget.received_power() - linear).abs());
    }
    check(
        worst <= 1e-9,
        format!("max disagreement {worst:.2e} dB over 1000 links"),
        format!("routes disagree by {worst:.3e} dB"),
    )
}

fn ac4_sweep_coverage() -> Outcome {
    let array = AntennaArray::default();
    let sweep = rotation_sweep(&array, 60.0, 5.0).map_err(|e| e.to_string())?;
    let min_best = sweep.min_best_gain();
    let aligned = rotation_sweep(&array, 52.5, 15.0).map_err(|e| e.to_string())?;
    let el4 = aligned
        .rows
        .iter()
        .find(|r| r.theta == -7.5 && r.element.get() == 4)
        .map(|r| r.gain);
    let all_boresights_peak = aligned.best.iter().all(|r| r.gain == 11.0);
    check(
        sweep.best.len() == 25 && min_best >= 10.0 && el4 == Some(11.0) && all_boresights_peak,
        format!("25 angles, min best-element gain {min_best:.4} dBi, element 4 on boresight 11.0 dBi"),
        format!(
            "angles {}, min best {min_best}, element 4 aligned {el4:?}",
            sweep.best.len()
        ),
    )
}

fn ac5_distance_run() -> Outcome {
    let distances: Vec<f64> = (1..=13).map(|i| f64::from(i) * 10.0).chain([127.0]).collect();
    let el4 = AntennaSelection::Element(ElementId::new(4).unwrap());
    let gain_gap = (11.0 - 12.0 * (7.5f64 / 45.0).powi(2)) - 2.0;
    let mut worst: f64 = 0.0;
    for (insertion, expected) in [(2.5, gain_gap - 2.5), (0.0, gain_gap)] {
        let mut cfg = ScenarioConfig::default();
        cfg.switch_model.insertion_loss = insertion;
        let rows = distance_run(&cfg, &distances).map_err(|e| e.to_string())?;
        for d in &distances {
            let p = |s: AntennaSelection| rows.iter().find(|r| r.distance == *d && r.selection == s).unwrap().p_r;
            worst = worst.max((p(el4) - p(AntennaSelection::Omni) - expected).abs());
        }
    }
    check(
        worst <= 1e-9,
        format!(
            "element 4 − omni = {:.4} dB (switch loss charged) / {gain_gap:.4} dB (zeroed), max error {worst:.1e}",
            gain_gap - 2.5
        ),
        format!("advantage deviates by {worst:.3e} dB"),
    )
}

fn ac6_switching_oracle() -> Outcome {
    let array = AntennaArray::default();
    let policy = SwitchPolicy::default();
    let mut mismatches = 0;
    for i in -600..=600 {
        let theta = normalize_angle(f64::from(i) / 10.0).unwrap();
        let chosen = select_antenna(&policy, &array, theta);
        if chosen != AntennaSelection::Element(array.best_element_by_gain(theta)) {
            mismatches += 1;
        }
    }
    check(
        mismatches == 0,
        "1201 angles, 0 mismatches",
        format!("{mismatches} mismatches"),
    )
}

fn ac7_window_boundary() -> Outcome {
    let array = AntennaArray::default();
    let policy = SwitchPolicy::default();
    let sel = |t: f64| select_antenna(&policy, &array, normalize_angle(t).unwrap());
    let inside = sel(100.0).is_sector() && sel(-100.0).is_sector();
    let outside = sel(100.1) == AntennaSelection::Omni && sel(-100.1) == AntennaSelection::Omni;
    check(
        inside && outside,
        format!("±100° → {}/{}, ±100.1° → omni", sel(100.0), sel(-100.0)),
        format!(
            "±100 → {}/{}, ±100.1 → {}/{}",
            sel(100.0),
            sel(-100.0),
            sel(100.1),
            sel(-100.1)
        ),
    )
}

fn ac8_scenario_delta() -> Outcome {
    let file = parse_scenario_file(SHIPPED_SCENARIO, &[]).map_err(|e| e.to_string())?;
    if file.scenario.trajectory.len() != 50 {
        return Err(format!("scenario has {} samples", file.scenario.trajectory.len()));
    }
    let (_, _, cmp) = run_comparison(&file.scenario).map_err(|e| e.to_string())?;
    let mean = cmp.mean_delta;
    check(
        mean >= 6.0 && (mean - L_SHAPE_MEAN_DELTA_DB).abs() <= 1e-6,
        format!("mean delta_rss {mean:.6} dB (golden {L_SHAPE_MEAN_DELTA_DB:.6})"),
        format!("mean delta_rss {mean} vs golden {L_SHAPE_MEAN_DELTA_DB}"),
    )
}

fn ac9_dominant_path_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut diffracted = 0;
    for _ in 0..100 {
        let env = common::random_environment(&mut rng, 2);
        let a = common::random_endpoint(&mut rng);
        let b = common::random_endpoint(&mut rng);
        let fast = dominant_path_loss(&env, &a, &b, 5.9e9).map_err(|e| e.to_string())?;
        let slow = common::brute_force_loss(&env, &a, &b, 5.9e9);
        if fast.corner_count() > 0 {
            diffracted += 1;
        }
        worst = worst.max((fast.total_loss - slow).abs());
    }
    check(
        worst <= 1e-9,
        format!("100 environments ({diffracted} diffracted), max |Δ| {worst:.2e} dB"),
        format!("search differs from enumeration by {worst:.3e} dB"),
    )
}

fn symmetric_environment() -> Environment {
    Environment::new(
        vec![
            Obstacle::rectangle("left", [-15.0, 30.0], [-5.0, 40.0], 12.0),
            Obstacle::rectangle("right", [5.0, 30.0], [15.0, 40.0], 12.0),
            Obstacle::rectangle("across", [-3.0, 60.0], [3.0, 62.0], 40.0),
        ],
        DominantPathParams::default(),
    )
    .unwrap()
}

fn ac10_grid_symmetry_and_determinism() -> Outcome {
    let env = symmetric_environment();
    let array = AntennaArray::default();
    let cfg = ScenarioConfig::default();
    let el4 = AntennaSelection::Element(ElementId::new(4).unwrap());
    let setup = CoverageSetup {
        environment: &env,
        tx: Position::new(0.0, 0.0),
        array: &array,
        selection: el4,
        // element 4 looks 7.5° left of the axis; this points it due north
        heading: normalize_angle(7.5).unwrap(),
        budget_template: cfg.budget_template(el4),
        frequency: cfg.frequency,
        region: GridRegion {
            origin: Position::new(-20.5, -0.5),
            cell_size: 1.0,
            width: 41,
            height: 80,
        },
    };
    let par = coverage_grid(&setup, Execution::Parallel).map_err(|e| e.to_string())?;
    let seq = coverage_grid(&setup, Execution::Sequential).map_err(|e| e.to_string())?;
    let bit_identical = par
        .values
        .iter()
        .zip(&seq.values)
        .all(|(x, y)| x.to_bits() == y.to_bits());
    let w = setup.region.width;
    let mut worst: f64 = 0.0;
    let mut nan_mismatch = false;
    for row in 0..setup.region.height {
        for col in 0..w {
            let (l, r) = (par.value(col, row), par.value(w - 1 - col, row));
            if l.is_nan() || r.is_nan() {
                nan_mismatch |= l.is_nan() != r.is_nan();
            } else {
                worst = worst.max((l - r).abs());
            }
        }
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg_path = dir.path().join("scenario.toml");
    std::fs::write(&cfg_path, SHIPPED_SCENARIO).map_err(|e| e.to_string())?;
    let mut hashes = Vec::new();
    for attempt in 0..2 {
        for cmd in ["coverage", "run", "compare", "sweep", "link", "pattern"] {
            let out = dir.path().join(format!("{cmd}-{attempt}.csv"));
            let code = v2x_beam::cli::run([
                "v2x-beam",
                cmd,
                "--config",
                cfg_path.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ]);
            if code != 0 {
                return Err(format!("{cmd} exited with {code}"));
            }
            let bytes = std::fs::read(&out).map_err(|e| e.to_string())?;
            hashes.push((cmd, attempt, Sha256::digest(&bytes)));
        }
    }
    let cli_identical = hashes[..6]
        .iter()
        .zip(&hashes[6..])
        .all(|(a, b)| a.0 == b.0 && a.2 == b.2);
    check(
        worst <= 1e-9 && !nan_mismatch && bit_identical && cli_identical,
        format!("mirror error {worst:.2e} dB, parallel == sequential bitwise, 6 CLI outputs hash-identical"),
        format!("mirror error {worst:.3e}, nan mismatch {nan_mismatch}, bitwise {bit_identical}, cli {cli_identical}"),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("AC1 free-space doubling law", ac1_doubling_law),
        ("AC2 distance-gain tradeoff", ac2_distance_gain_tradeoff),
        ("AC3 budget / inverse-square consistency", ac3_budget_vs_inverse_square),
        ("AC4 sweep coverage", ac4_sweep_coverage),
        ("AC5 distance run", ac5_distance_run),
        ("AC6 switching oracle", ac6_switching_oracle),
        ("AC7 activation window boundary", ac7_window_boundary),
        ("AC8 trajectory delta", ac8_scenario_delta),
        ("AC9 dominant-path oracle", ac9_dominant_path_oracle),
        ("AC10 grid symmetry and determinism", ac10_grid_symmetry_and_determinism),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                println!("[FAIL] {name}: {detail}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
