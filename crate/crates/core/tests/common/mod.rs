//! Test-only helpers: random profile generation and an explicit fine-step
//! integrator that works from the time-domain current signal alone.

#![allow(dead_code)]

use batlife_core::battery::{BatteryParams, CurrentSegment};
use rand::Rng;

/// A random piecewise-constant profile together with a battery sized so the
/// whole trajectory stays inside [0.1, 0.9] SOC.
pub struct RandomCase {
    pub segments: Vec<CurrentSegment>,
    pub params: BatteryParams,
    pub initial_soc: f64,
}

pub fn random_case<R: Rng>(rng: &mut R) -> RandomCase {
    let n = rng.random_range(3..=50);
    let segments: Vec<_> = (0..n)
        .map(|_| {
            let current = rng.random_range(-20.0..=20.0);
            let duration = rng.random_range(0.01..=2.0);
            CurrentSegment::new(current, duration).unwrap()
        })
        .collect();
    let soh = rng.random_range(0.6..=1.0);

    let (mut q, mut q_min, mut q_max) = (0.0f64, 0.0f64, 0.0f64);
    for s in &segments {
        q += s.current * s.duration;
        q_min = q_min.min(q);
        q_max = q_max.max(q);
    }
    let effective = (q_max - q_min).max(1.0) / 0.8;
    let params = BatteryParams::new(effective / soh).unwrap().with_soh(soh).unwrap();
    let initial_soc = 0.1 - q_min / effective;
    RandomCase {
        segments,
        params,
        initial_soc,
    }
}

/// Piecewise-constant current signal looked up by absolute time.
pub struct Signal {
    breaks: Vec<f64>,
    currents: Vec<f64>,
}

impl Signal {
    pub fn new(segments: &[CurrentSegment]) -> Self {
        let mut t = 0.0;
        let mut breaks = vec![0.0];
        for s in segments {
            t += s.duration;
            breaks.push(t);
        }
        Signal {
            breaks,
            currents: segments.iter().map(|s| s.current).collect(),
        }
    }

    pub fn end(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn at(&self, t: f64) -> f64 {
        let idx = self.breaks.partition_point(|&b| b <= t).saturating_sub(1);
        self.currents[idx.min(self.currents.len() - 1)]
    }
}

/// Explicit forward integration of `i / (C·SOH)` and `|i| / (2·C)` with a
/// fixed step, clipped at the signal's breakpoints so no step straddles a
/// current change. Returns (SOC, FEC) at every breakpoint after the first.
pub fn integrate(signal: &Signal, params: &BatteryParams, soc0: f64, step: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut soc = soc0;
    let mut fec = 0.0;
    let mut t = 0.0;
    for &next_break in &signal.breaks()[1..] {
        while t < next_break {
            let h = step.min(next_break - t);
            let i = signal.at(t + 0.5 * h);
            soc += h * i / (params.nominal_capacity * params.soh);
            fec += h * i.abs() / (2.0 * params.nominal_capacity);
            t += h;
            if next_break - t < 1e-12 {
                t = next_break;
            }
        }
        out.push((soc, fec));
    }
    out
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
