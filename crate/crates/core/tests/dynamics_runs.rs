use superlab_core::dynamics::{
    detect_threshold, integrate, make_velocity_ensemble, photons_per_atom, IntegratorConfig,
    RampSchedule, SystemState, TimeTrace, DEFAULT_COUNT_THRESHOLD,
};
use superlab_core::thresholds::threshold_decay;
use superlab_core::{ModelParams, KHZ};

fn model(gamma: f64) -> ModelParams {
    let mut mp = ModelParams::from_model(100.0 * KHZ, 215.0 * KHZ, 100.0 * KHZ);
    mp.gamma = gamma;
    mp
}

fn sampled(dt: f64) -> IntegratorConfig {
    IntegratorConfig {
        sample_dt: dt,
        max_dt: dt,
        ..Default::default()
    }
}

// Runs of samples above `floor` as (start, end, peak); runs separated by
// less than `min_gap` are merged.
fn pulses_above(trace: &TimeTrace, floor: f64, min_gap: f64) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    let mut current: Option<(f64, f64, f64)> = None;
    for (&t, &v) in trace.t.iter().zip(&trace.intensity) {
        match (&mut current, v > floor) {
            (Some(p), true) => {
                p.1 = t;
                p.2 = p.2.max(v);
            }
            (None, true) => current = Some((t, t, v)),
            (Some(_), false) => out.extend(current.take()),
            (None, false) => {}
        }
    }
    out.extend(current);
    let mut merged: Vec<(f64, f64, f64)> = Vec::new();
    for p in out {
        match merged.last_mut() {
            Some(last) if p.0 - last.1 < min_gap => {
                last.1 = p.1;
                last.2 = last.2.max(p.2);
            }
            _ => merged.push(p),
        }
    }
    merged
}

#[test]
fn spin_length_conserved_without_decay() {
    let mp = model(0.0);
    let lc = threshold_decay(mp.omega, mp.omega_0, mp.kappa, 0.0, -0.5, 0.0)
        .unwrap()
        .value()
        .unwrap();
    let ens = make_velocity_ensemble(30.0 * KHZ, 5, 0.0, false).unwrap();
    let state = SystemState::normal_phase(&ens, -0.5);
    let sched = RampSchedule::linear(1.5 * lc, 1.5 * lc, 1e-3, 4e-3);
    let tr = integrate(&state, &mp, &sched, &sampled(1e-5)).unwrap();
    let peak = tr.intensity.iter().copied().fold(0.0, f64::max);
    assert!(peak > 1e3, "dynamics should leave the normal phase (peak {peak})");
    for c in &tr.final_state.classes {
        let drift = (c.bloch_length_sq().sqrt() - 0.5).abs() / 0.5;
        assert!(drift < 1e-9, "drift {drift}");
    }
}

#[test]
fn detection_lambda_non_increasing_with_ramp_duration() {
    let mp = model(20.0 * KHZ);
    let lc = threshold_decay(mp.omega, mp.omega_0, mp.kappa, mp.gamma, -0.5, 0.0)
        .unwrap()
        .value()
        .unwrap();
    let state = SystemState::normal_phase(&make_velocity_ensemble(0.0, 1, 0.0, false).unwrap(), -0.5);
    let cfg = IntegratorConfig {
        seed_floor: true,
        ..sampled(1e-6)
    };
    let detected: Vec<f64> = [1e-3, 3e-3, 10e-3]
        .iter()
        .map(|&ramp| {
            let sched = RampSchedule::linear(1.5 * lc, 1.5 * lc, ramp, 0.0);
            let tr = integrate(&state, &mp, &sched, &cfg).unwrap();
            detect_threshold(&tr, DEFAULT_COUNT_THRESHOLD).unwrap()
        })
        .collect();
    assert!(detected.windows(2).all(|w| w[1] <= w[0]), "{detected:?}");
    assert!(detected.iter().all(|&l| l > 0.95 * lc));
}

#[test]
fn no_detection_below_threshold() {
    let mp = model(20.0 * KHZ);
    let lc = threshold_decay(mp.omega, mp.omega_0, mp.kappa, mp.gamma, -0.5, 0.0)
        .unwrap()
        .value()
        .unwrap();
    let state = SystemState::normal_phase(&make_velocity_ensemble(0.0, 1, 0.0, false).unwrap(), -0.5);
    let sched = RampSchedule::linear(0.9 * lc, 0.9 * lc, 2e-3, 0.0);
    let cfg = IntegratorConfig {
        seed_floor: true,
        ..sampled(1e-6)
    };
    let tr = integrate(&state, &mp, &sched, &cfg).unwrap();
    assert!(detect_threshold(&tr, DEFAULT_COUNT_THRESHOLD).is_err());
}

#[test]
fn inverted_start_gives_transfer_pulse_then_main_pulse() {
    let mut mp = model(300.0);
    mp.gamma_d = 59.0 * KHZ;
    let ens = make_velocity_ensemble(mp.gamma_d, 15, 0.0, false).unwrap();
    let state = SystemState::normal_phase(&ens, 0.5);
    let sched = RampSchedule::linear(150.0 * KHZ, 150.0 * KHZ, 3e-3, 2e-3);
    let tr = integrate(&state, &mp, &sched, &sampled(2e-6)).unwrap();
    let peak = tr.intensity.iter().copied().fold(0.0, f64::max);
    let pulses = pulses_above(&tr, 1e-6 * peak, 50e-6);
    assert_eq!(pulses.len(), 2, "{pulses:?}");
    let (transfer, main) = (pulses[0], pulses[1]);
    assert!(transfer.1 < main.0);
    assert!(transfer.2 > 1e-4 * peak && transfer.2 < main.2, "{pulses:?}");
    assert_eq!(main.2, peak);
}

#[test]
fn zero_coupling_emits_only_seed() {
    let mp = model(0.0);
    let state = SystemState::normal_phase(&make_velocity_ensemble(0.0, 1, 0.0, false).unwrap(), -0.5);
    let tr = integrate(&state, &mp, &RampSchedule::constant(0.0, 0.0, 1e-4), &sampled(1e-6)).unwrap();
    let seed_photons = 1e-8 * mp.n_atoms as f64;
    assert!((photons_per_atom(&tr, mp.n_atoms) * mp.n_atoms as f64 - seed_photons).abs() < 1e-6 * seed_photons);
}
