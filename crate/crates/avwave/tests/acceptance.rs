//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Criterion 9 (byte-identical CSV output of the command-line presets) lives
//! in the CLI crate's integration tests, next to the presets it exercises.

use std::f64::consts::PI;
use std::time::Instant;

use avwave::dfa::{describing_transfer, SpeedBounds};
use avwave::freq::{transfer_at, transfer_at_continued, FrequencyResponse};
use avwave::model::{ControllerSpec, Equilibrium};
use avwave::platoon::{
    crossover_index, propagate_spectrum, OscComponent, PlatoonSpec, VehicleModel,
};
use avwave::sim::{fit_first_harmonic, simulate_platoon, wrap_phase, SimConfig};
use avwave::wave::{pair_wave_speed, platoon_aggregate_wave, wave_speed_series};

/// Independent recomputation path for the transfer descriptors: plain real
/// arithmetic on the rational function's parts, no complex types, no library
/// calls. This is the evaluation script behind the frozen regression values.
mod oracle {
    pub fn transfer_mag_phase(
        k_s: f64,
        k_v: f64,
        tau: f64,
        phi: f64,
        omega: f64,
    ) -> (f64, f64) {
        let re_num = k_s;
        let im_num = omega * k_v;
        let re_den = k_s - omega * omega;
        let im_den = omega * (k_v + k_s * tau) - phi * omega.powi(3);
        let mag = ((re_num * re_num + im_num * im_num)
            / (re_den * re_den + im_den * im_den))
            .sqrt();
        // angle(num) - angle(den) through the cross/dot products
        let cross = im_num * re_den - re_num * im_den;
        let dot = re_num * re_den + im_num * im_den;
        (mag, cross.atan2(dot))
    }
}

/// Deterministic SplitMix64; keeps the 1000-instance suites reproducible.
struct Rng(u64);

impl Rng {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn index(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

const OMEGA_REF: f64 = 0.16 * PI;

fn defaults() -> ControllerSpec<f64> {
    ControllerSpec::default()
}

/// Simulates one follower and fits the stage gain and phase lag.
fn simulated_stage(
    spec: ControllerSpec<f64>,
    eq: Equilibrium<f64>,
    bounds: bool,
    speed_amp: f64,
    omega: f64,
    warmup: u32,
) -> (f64, f64) {
    let platoon = PlatoonSpec::homogeneous(spec, 1, eq, bounds).unwrap();
    let input = vec![OscComponent::from_speed_amplitude(speed_amp, omega, 0.0).unwrap()];
    let config = SimConfig::new(0.005, warmup, 4).unwrap();
    let traj = simulate_platoon(&platoon, &input, &config).unwrap();
    let warm_end = warmup as f64 * 2.0 * PI / omega;
    let lead =
        fit_first_harmonic(traj.times(), &traj.track(0).speed, omega, 4, warm_end).unwrap();
    let foll =
        fit_first_harmonic(traj.times(), &traj.track(1).speed, omega, 4, warm_end).unwrap();
    (
        foll.amplitude / lead.amplitude,
        wrap_phase(foll.phase - lead.phase),
    )
}

#[test]
fn c1_newell_anchor() {
    let start = Instant::now();
    let fr = transfer_at(&defaults().linearize(), 1e-3).unwrap();
    let elapsed = start.elapsed();
    assert!((fr.magnitude - 1.0).abs() <= 1e-4, "|G| = {}", fr.magnitude);
    assert!(
        (fr.response_time - 1.2).abs() <= 1e-3,
        "rt = {}",
        fr.response_time
    );
    assert!(elapsed.as_micros() < 1000, "took {elapsed:?}");
    println!(
        "[PASS] criterion 1: low-frequency anchor |G|={:.6}, rt={:.6}s in {:?}",
        fr.magnitude, fr.response_time, elapsed
    );
}

#[test]
fn c2_transfer_regression() {
    let (mag_o, phase_o) = oracle::transfer_mag_phase(1.0, 1.0, 1.2, 0.1, OMEGA_REF);
    // the independent route lands inside the published brackets
    assert!((mag_o - 0.845).abs() <= 0.005, "oracle |G| = {mag_o}");
    assert!((phase_o - -0.510).abs() <= 0.005, "oracle angle = {phase_o}");
    // and the implementation agrees with it to near machine precision
    let fr = transfer_at(&defaults().linearize(), OMEGA_REF).unwrap();
    assert!((fr.magnitude - mag_o).abs() < 1e-12);
    assert!((fr.phase - phase_o).abs() < 1e-12);
    assert!((fr.magnitude - 0.845).abs() <= 0.005);
    assert!((fr.phase - -0.510).abs() <= 0.005);
    println!(
        "[PASS] criterion 2: transfer regression |G|={:.6} (oracle {:.6}), angle={:.6} (oracle {:.6})",
        fr.magnitude, mag_o, fr.phase, phase_o
    );
}

#[test]
fn c3_linear_oracle_equivalence() {
    let start = Instant::now();
    let mut grid: Vec<ControllerSpec<f64>> = Vec::new();
    for k_s in [0.2, 0.6, 1.0, 1.4] {
        grid.push(ControllerSpec::new(k_s, 1.0, 1.2, 0.1, 2.0).unwrap());
    }
    for k_v in [0.2, 0.6, 1.0, 1.4] {
        grid.push(ControllerSpec::new(1.0, k_v, 1.2, 0.1, 2.0).unwrap());
    }
    for tau in [0.6, 0.8, 1.0, 1.2, 1.4] {
        grid.push(ControllerSpec::new(1.0, 1.0, tau, 0.1, 2.0).unwrap());
    }
    let mut worst_mag = 0.0_f64;
    let mut worst_phase = 0.0_f64;
    for spec in grid {
        for omega in [0.1, 0.3, 0.5, 1.0, 2.0] {
            let period = 2.0 * PI / omega;
            // enough warmup for the slowest pole of the grid to die out
            let warmup = 10.max((60.0 / period).ceil() as u32);
            let (ratio, lag) =
                simulated_stage(spec, Equilibrium::default(), false, 1.0, omega, warmup);
            let g = transfer_at(&spec.linearize(), omega).unwrap();
            let mag_err = (ratio - g.magnitude).abs() / g.magnitude;
            let phase_err = (lag - g.phase).abs();
            assert!(
                mag_err < 0.01,
                "k_s={} k_v={} tau={} omega={omega}: gain err {mag_err}",
                spec.k_s(),
                spec.k_v(),
                spec.tau()
            );
            assert!(
                phase_err < 0.01,
                "k_s={} k_v={} tau={} omega={omega}: phase err {phase_err}",
                spec.k_s(),
                spec.k_v(),
                spec.tau()
            );
            worst_mag = worst_mag.max(mag_err);
            worst_phase = worst_phase.max(phase_err);
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "took {elapsed:?}");
    println!(
        "[PASS] criterion 3: linear oracle equivalence, worst gain err {:.2e}, worst phase err {:.2e} rad, {:?}",
        worst_mag, worst_phase, elapsed
    );
}

#[test]
fn c4_dfa_closed_form() {
    // Classic saturation describing function at A = 2L:
    // (2/pi)(asin(1/2) + (1/2) sqrt(1 - 1/4)).
    let closed = (2.0 / PI) * (0.5_f64.asin() + 0.5 * (1.0 - 0.25_f64).sqrt());
    assert!((closed - 0.60900).abs() < 5e-6);
    let unit = FrequencyResponse::from_polar(1.0, 1.0, 0.0);
    let bounds = SpeedBounds::symmetric(1.0).unwrap();
    let nl = describing_transfer(&unit, 2.0, &bounds).unwrap();
    assert!(
        (nl.magnitude - closed).abs() <= 1e-6,
        "quadrature {} vs closed form {closed}",
        nl.magnitude
    );
    println!(
        "[PASS] criterion 4: saturation describing function {:.9} vs closed form {:.9}",
        nl.magnitude, closed
    );
}

#[test]
fn c5_dfa_vs_simulation() {
    // Speed-limited setup: v_e = v_free - v_e = 10 m/s, tau = 0.5 s,
    // omega = 1 rad/s (the case split requires 1 < |G| <= 10/9).
    let spec = ControllerSpec::new(1.0, 1.0, 0.5, 0.1, 2.0).unwrap();
    let eq = Equilibrium::new(10.0, 20.0).unwrap();
    let bounds = SpeedBounds::from_equilibrium(&eq);
    let omega = 1.0;
    let linear = transfer_at_continued(&spec.linearize(), omega).unwrap();
    assert!(linear.magnitude > 1.0 && linear.magnitude < 10.0 / 9.0);

    let mut dfs = Vec::new();
    for frac in [0.8, 0.9, 1.0] {
        let amp = 10.0 * frac;
        let nl = describing_transfer(&linear, amp, &bounds).unwrap();
        let (ratio, lag) = simulated_stage(spec, eq, true, amp, omega, 10);
        let err = (ratio - nl.magnitude).abs() / nl.magnitude;
        assert!(err < 0.05, "A/v_bound={frac}: sim {ratio} vs DF {}", nl.magnitude);
        let _ = lag;
        dfs.push(nl);
    }
    // untouched limits: identical transfer; touched limits: strictly smaller
    assert!((dfs[0].magnitude - dfs[1].magnitude).abs() <= 1e-9);
    assert!(dfs[2].magnitude < dfs[0].magnitude);
    // saturation adds no phase shift
    for pair in dfs.windows(2) {
        assert!((pair[0].phase - pair[1].phase).abs() <= 1e-3);
    }
    println!(
        "[PASS] criterion 5: DF vs simulation; |Gnl| = {:.6}/{:.6}/{:.6}, phases within 1e-3",
        dfs[0].magnitude, dfs[1].magnitude, dfs[2].magnitude
    );
}

fn random_controller(rng: &mut Rng) -> ControllerSpec<f64> {
    ControllerSpec::new(
        rng.uniform(0.2, 1.5),
        rng.uniform(0.1, 1.5),
        rng.uniform(0.5, 1.5),
        rng.uniform(0.05, 0.3),
        rng.uniform(0.5, 4.0),
    )
    .unwrap()
}

fn single_input(rng: &mut Rng) -> (f64, Vec<OscComponent<f64>>) {
    let omega = rng.uniform(0.05, 2.0);
    let amp = rng.uniform(1.0, 10.0);
    (
        omega,
        vec![OscComponent::from_speed_amplitude(amp, omega, 0.0).unwrap()],
    )
}

#[test]
fn c6a_intra_pair_time_variability() {
    let mut rng = Rng(101);
    for _ in 0..1000 {
        let spec = random_controller(&mut rng);
        let v_e = rng.uniform(5.0, 20.0);
        let eq = Equilibrium::new(v_e, 2.0 * v_e + 5.0).unwrap();
        let platoon = PlatoonSpec::homogeneous(spec, 1, eq, false).unwrap();
        let (omega, input) = single_input(&mut rng);
        let prop = propagate_spectrum(&platoon, &input).unwrap();
        let (t1, t2) = (rng.uniform(0.0, 50.0), rng.uniform(0.0, 50.0));
        let w1 = pair_wave_speed(&platoon, &prop, 1, t1).unwrap();
        let w2 = pair_wave_speed(&platoon, &prop, 1, t2).unwrap();
        let g = transfer_at_continued(&spec.linearize(), omega).unwrap();
        let a_pos = input[0].amplitude();
        let closed = omega * (g.magnitude - 1.0) * a_pos / g.phase
            * ((omega * t1).sin() - (omega * t2).sin());
        assert!(
            ((w1 - w2) - closed).abs() <= 1e-9,
            "diff {} vs closed {closed}",
            w1 - w2
        );
    }
    println!("[PASS] criterion 6a: intra-pair wave-speed time variability, 1000 instances");
}

#[test]
fn c6b_inter_pair_difference() {
    let mut rng = Rng(202);
    for _ in 0..1000 {
        let spec = random_controller(&mut rng);
        let v_e = rng.uniform(5.0, 20.0);
        let eq = Equilibrium::new(v_e, 2.0 * v_e + 5.0).unwrap();
        let platoon = PlatoonSpec::homogeneous(spec, 3, eq, false).unwrap();
        let (omega, input) = single_input(&mut rng);
        let prop = propagate_spectrum(&platoon, &input).unwrap();
        let t = rng.uniform(0.0, 50.0);
        let i = 1 + rng.index(2); // pairs (i, i+1), i in {1, 2}
        let wi = pair_wave_speed(&platoon, &prop, i, t).unwrap();
        let wn = pair_wave_speed(&platoon, &prop, i + 1, t).unwrap();
        let g = transfer_at_continued(&spec.linearize(), omega).unwrap();
        let a_pos = input[0].amplitude();
        let closed = -omega * g.magnitude.powi(i as i32 - 1) * (g.magnitude - 1.0).powi(2)
            * a_pos
            * (omega * t).sin()
            / g.phase;
        assert!(
            ((wi - wn) - closed).abs() <= 1e-9,
            "diff {} vs closed {closed}",
            wi - wn
        );
    }
    // unit-gain stages: the difference vanishes identically
    let platoon = PlatoonSpec::<f64>::new(
        vec![
            VehicleModel::Newell {
                displacement: 0.9,
                s_0: 2.0,
            };
            3
        ],
        Equilibrium::default(),
        false,
    )
    .unwrap();
    let input = vec![OscComponent::from_speed_amplitude(10.0, 0.4, 0.0).unwrap()];
    let prop = propagate_spectrum(&platoon, &input).unwrap();
    for &t in &[0.0, 3.3, 7.1] {
        let w1 = pair_wave_speed(&platoon, &prop, 1, t).unwrap();
        let w2 = pair_wave_speed(&platoon, &prop, 2, t).unwrap();
        assert!((w1 - w2).abs() < 1e-12);
    }
    println!("[PASS] criterion 6b: inter-pair wave-speed difference, 1000 instances");
}

fn random_heterogeneous(rng: &mut Rng, n: usize) -> Vec<VehicleModel<f64>> {
    (0..n)
        .map(|_| {
            if rng.index(5) == 0 {
                VehicleModel::Newell {
                    displacement: rng.uniform(0.5, 1.5),
                    s_0: rng.uniform(0.5, 4.0),
                }
            } else {
                VehicleModel::Controller(random_controller(rng))
            }
        })
        .collect()
}

#[test]
fn c6c_permutation_invariance() {
    let mut rng = Rng(303);
    for _ in 0..1000 {
        let n = 2 + rng.index(7); // N in 2..=8
        let vehicles = random_heterogeneous(&mut rng, n);
        let v_e = rng.uniform(5.0, 20.0);
        let eq = Equilibrium::new(v_e, 2.0 * v_e + 5.0).unwrap();
        let (omega, input) = single_input(&mut rng);
        let t = rng.uniform(0.0, 40.0);
        let _ = omega;

        let base = PlatoonSpec::new(vehicles.clone(), eq, false).unwrap();
        let pb = propagate_spectrum(&base, &input).unwrap();
        let wb = platoon_aggregate_wave(&base, &pb, 1..=n, t).unwrap();

        // Fisher-Yates shuffle
        let mut shuffled = vehicles;
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.index(i + 1));
        }
        let perm = PlatoonSpec::new(shuffled, eq, false).unwrap();
        let pp = propagate_spectrum(&perm, &input).unwrap();
        let wp = platoon_aggregate_wave(&perm, &pp, 1..=n, t).unwrap();

        assert!((wb.total_travel_time - wp.total_travel_time).abs() <= 1e-9);
        assert!((wb.total_shifted_distance - wp.total_shifted_distance).abs() <= 1e-9);
    }
    println!("[PASS] criterion 6c: permutation invariance of aggregate waves, 1000 instances");
}

#[test]
fn c6d_split_additivity() {
    let mut rng = Rng(404);
    for _ in 0..1000 {
        let n = 2 + rng.index(7);
        let vehicles = random_heterogeneous(&mut rng, n);
        let v_e = rng.uniform(5.0, 20.0);
        let eq = Equilibrium::new(v_e, 2.0 * v_e + 5.0).unwrap();
        let (_, input) = single_input(&mut rng);
        let t = rng.uniform(0.0, 40.0);
        let platoon = PlatoonSpec::new(vehicles, eq, false).unwrap();
        let prop = propagate_spectrum(&platoon, &input).unwrap();
        let whole = platoon_aggregate_wave(&platoon, &prop, 1..=n, t).unwrap();
        for k in 1..n {
            let left = platoon_aggregate_wave(&platoon, &prop, 1..=k, t).unwrap();
            let right = platoon_aggregate_wave(&platoon, &prop, (k + 1)..=n, t).unwrap();
            assert!(
                (left.total_travel_time + right.total_travel_time - whole.total_travel_time)
                    .abs()
                    <= 1e-9
            );
            assert!(
                (left.total_shifted_distance + right.total_shifted_distance
                    - whole.total_shifted_distance)
                    .abs()
                    <= 1e-9
            );
        }
    }
    println!("[PASS] criterion 6d: split additivity of aggregate waves, 1000 instances");
}

#[test]
fn c6e_crossover_exactness() {
    let mut rng = Rng(505);
    for _ in 0..1000 {
        let a_other = rng.uniform(0.1, 2.0);
        let a_dom = a_other * rng.uniform(1.0, 50.0);
        let g_dom = rng.uniform(0.3, 1.2);
        let g_other = g_dom * rng.uniform(1.005, 2.0);
        let got = crossover_index(a_dom, a_other, g_dom, g_other).unwrap();
        let mut brute = 1u32;
        while a_other * g_other.powi(brute as i32) <= a_dom * g_dom.powi(brute as i32) {
            brute += 1;
            assert!(brute < 1_000_000, "runaway scan");
        }
        assert_eq!(got, brute, "a={a_dom}/{a_other} g={g_dom}/{g_other}");
    }
    println!("[PASS] criterion 6e: predominance crossover index exactness, 1000 instances");
}

#[test]
fn c7_string_stability_wave_trend() {
    let start = Instant::now();
    let omega = 2.0 * PI * 0.05;
    let period = 2.0 * PI / omega;
    let grid: Vec<f64> = (0..512).map(|k| k as f64 * period / 511.0).collect();
    let input = vec![OscComponent::from_speed_amplitude(15.0, omega, 0.0).unwrap()];
    let mut summary = Vec::new();
    for (k_v, increasing) in [(0.2, true), (1.0, false)] {
        let spec = ControllerSpec::new(1.0, k_v, 1.2, 0.1, 2.0).unwrap();
        let platoon =
            PlatoonSpec::homogeneous(spec, 5, Equilibrium::default(), false).unwrap();
        let prop = propagate_spectrum(&platoon, &input).unwrap();
        let series = wave_speed_series(&platoon, &prop, &[1, 2, 3, 4, 5], &grid).unwrap();
        let mut amps = Vec::new();
        for pair in 1..=5 {
            let speeds: Vec<f64> = series
                .iter()
                .filter(|s| s.pair == pair)
                .map(|s| s.speed)
                .collect();
            let max = speeds.iter().cloned().fold(f64::MIN, f64::max);
            let min = speeds.iter().cloned().fold(f64::MAX, f64::min);
            amps.push((max - min) / 2.0);
        }
        for w in amps.windows(2) {
            if increasing {
                assert!(w[1] > w[0], "k_v={k_v}: expected increasing, got {amps:?}");
            } else {
                assert!(w[1] < w[0], "k_v={k_v}: expected decreasing, got {amps:?}");
            }
        }
        summary.push((k_v, amps[0], amps[4]));
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 5, "took {elapsed:?}");
    println!(
        "[PASS] criterion 7: wave-speed oscillation {:.4}->{:.4} (k_v=0.2, rising), {:.4}->{:.4} (k_v=1.0, falling), {:?}",
        summary[0].1, summary[0].2, summary[1].1, summary[1].2, elapsed
    );
}

#[test]
fn c8_trajectory_vs_simulation() {
    // Default preset: five followers, omega = 0.16 pi, 15 m/s speed amplitude.
    let platoon = PlatoonSpec::homogeneous(
        defaults(),
        5,
        Equilibrium::default(),
        false,
    )
    .unwrap();
    let input = vec![OscComponent::from_speed_amplitude(15.0, OMEGA_REF, 0.0).unwrap()];
    let config = SimConfig::new(0.005, 10, 4).unwrap();
    let traj = simulate_platoon(&platoon, &input, &config).unwrap();
    let prop = propagate_spectrum(&platoon, &input).unwrap();
    let warm_end = 10.0 * 2.0 * PI / OMEGA_REF;
    let mut worst = 0.0_f64;
    for i in 1..=5usize {
        let amp_i = prop.vehicle(i).components[0].amplitude;
        let tol = 0.005 * amp_i;
        for (k, &t) in traj.times().iter().enumerate() {
            if t < warm_end {
                continue;
            }
            let ana = avwave::platoon::analytic_position(&platoon, &prop, i, t, 0.0);
            let err = (traj.track(i).position[k] - ana).abs();
            assert!(err < tol, "vehicle {i} t={t}: err {err} tol {tol}");
            worst = worst.max(err / amp_i);
        }
    }
    println!(
        "[PASS] criterion 8: simulated vs closed-form positions, worst deviation {:.2e} of the oscillation amplitude",
        worst
    );
}
