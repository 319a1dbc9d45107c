//! Distinguishability metrics for the Deutsch distinguishing circuit, parameter
//! sweeps, and the randomized never-enhancement harness.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{davies_apply, DaviesParams};
use crate::deutsch::{solve_deutsch, DeutschResult, FigOneInput};
use crate::error::{invalid, Error, Result};
use crate::gates::fig1_unitary;
use crate::qmat::{bloch_from_state, trace_distance, BlochVector, DensityOperator, PureState};

/// Enhancement above this counts as a violation in [`conjecture_harness`].
pub const VIOLATION_TOL: f64 = 1e-9;
/// Pairs with squared overlap below this are resampled.
pub const ORTHOGONAL_REJECT: f64 = 1e-6;

/// `(1 - e^{-At}) e^{-Gt} √(8e^{2Gt} + 1) / (2 - e^{-At})`, the factor shared
/// by both closed-form distances, rearranged so large `At` does not overflow.
fn shared_factor(d: &DaviesParams) -> f64 {
    let relaxed = -(-d.a() * d.t()).exp_m1();
    let decay = (8.0 + (-2.0 * d.g() * d.t()).exp()).sqrt();
    std::f64::consts::FRAC_1_SQRT_2 * relaxed * decay / (1.0 + relaxed)
}

/// Closed-form distance between the noisy and ideal outputs for input `|−⟩`.
pub fn q_minus_closed(d: &DaviesParams) -> f64 {
    shared_factor(d) * (1.0 - d.p()).abs()
}

/// Closed-form distance between the noisy and ideal outputs for input `|0⟩`.
pub fn q_zero_closed(d: &DaviesParams) -> f64 {
    shared_factor(d) * d.p()
}

/// Solves the distinguishing circuit for one of its two reference inputs.
pub fn fig1_solve(input: FigOneInput, d: &DaviesParams) -> Result<DeutschResult> {
    solve_deutsch(&fig1_unitary(), &input.state(), d)
}

/// Numerically solved distance between the noisy and ideal outputs.
pub fn q_numeric(input: FigOneInput, d: &DaviesParams) -> Result<f64> {
    let res = fig1_solve(input, d)?;
    trace_distance(&res.rho_f, &input.ideal_output())
}

/// Trace distance between the circuit's outputs for `|0⟩` and `|−⟩`.
pub fn r_numeric(d: &DaviesParams) -> Result<f64> {
    let zero = fig1_solve(FigOneInput::Zero, d)?;
    let minus = fig1_solve(FigOneInput::Minus, d)?;
    trace_distance(&zero.rho_f, &minus.rho_f)
}

/// A closed form for the output distance, evaluated term by term. It
/// does not reduce to 1 at `t = 0` or `A = 0`, so it is reported next to
/// [`r_numeric`] and never used as the reference value.
pub fn r_paper_formula(d: &DaviesParams) -> f64 {
    let (p, a, g, t) = (d.p(), d.a(), d.g(), d.t());
    let eat = (a * t).exp();
    (-t * g).exp() / (4.0 * eat - 1.0)
        * ((1.0 - 4.0 * p + 4.0 * p * p) * (2.0 * (2.0 * a * t).exp() - 4.0 * eat + 2.0)
            + 4.0 * (2.0 * t * g).exp())
}

/// One row of a distinguishability sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistinguishabilityRecord {
    pub params: DaviesParams,
    pub q_minus: f64,
    pub q_zero: f64,
    pub r_numeric: f64,
    pub r_paper_formula: f64,
    pub inputs: [String; 2],
}

impl DistinguishabilityRecord {
    pub fn evaluate(d: &DaviesParams) -> Result<Self> {
        Ok(Self {
            params: *d,
            q_minus: q_minus_closed(d),
            q_zero: q_zero_closed(d),
            r_numeric: r_numeric(d)?,
            r_paper_formula: r_paper_formula(d),
            inputs: ["0".to_string(), "minus".to_string()],
        })
    }

    pub fn discrepancy(&self) -> f64 {
        (self.r_paper_formula - self.r_numeric).abs()
    }
}

/// A one-dimensional parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Grid {
    /// `count` evenly spaced points from `start` to `stop` inclusive.
    Range { start: f64, stop: f64, count: usize },
    Values(Vec<f64>),
}

impl Grid {
    pub fn fixed(value: f64) -> Self {
        Self::Values(vec![value])
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            Self::Range { start, stop, count } => {
                if *count == 0 {
                    return invalid("grid count must be at least 1");
                }
                if !(start.is_finite() && stop.is_finite()) || start > stop {
                    return invalid(format!("grid bounds [{start}, {stop}] are invalid"));
                }
                if *count == 1 {
                    return Ok(vec![*start]);
                }
                let step = (stop - start) / (*count as f64 - 1.0);
                Ok((0..*count)
                    .map(|k| if k + 1 == *count { *stop } else { start + step * k as f64 })
                    .collect())
            }
            Self::Values(v) => {
                if v.is_empty() {
                    return invalid("grid has no values");
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return invalid("grid values must be finite");
                }
                Ok(v.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamGrids {
    pub p: Grid,
    pub a: Grid,
    pub g: Grid,
    pub omega: Grid,
    pub t: Grid,
}

impl Default for ParamGrids {
    fn default() -> Self {
        Self {
            p: Grid::fixed(0.0),
            a: Grid::fixed(0.0),
            g: Grid::fixed(0.0),
            omega: Grid::fixed(1.0),
            t: Grid::fixed(0.0),
        }
    }
}

impl ParamGrids {
    /// All grid points, `t` varying fastest, then `omega`, `G`, `A`, `p`.
    pub fn points(&self) -> Result<Vec<DaviesParams>> {
        let (ps, as_, gs, ws, ts) = (
            self.p.values()?,
            self.a.values()?,
            self.g.values()?,
            self.omega.values()?,
            self.t.values()?,
        );
        let mut out = Vec::with_capacity(ps.len() * as_.len() * gs.len() * ws.len() * ts.len());
        for &p in &ps {
            for &a in &as_ {
                for &g in &gs {
                    for &w in &ws {
                        for &t in &ts {
                            out.push(DaviesParams::new(p, a, g, w, t)?);
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepCircuit {
    DeutschFig1,
    PctcFig4,
    UnprovenFig5,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub circuit: SweepCircuit,
    pub grids: ParamGrids,
}

/// One record per grid point, in grid order.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<DistinguishabilityRecord>> {
    if spec.circuit != SweepCircuit::DeutschFig1 {
        return invalid(format!(
            "distinguishability sweeps are defined for the deutsch_fig1 circuit, not {:?}",
            spec.circuit
        ));
    }
    let points = spec.grids.points()?;
    points.par_iter().map(DistinguishabilityRecord::evaluate).collect()
}

/// A trial where noise with `A > 0` increased output distinguishability
/// relative to the pure-dephasing reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolatingPair {
    pub trial: usize,
    pub state_a: BlochVector,
    pub state_b: BlochVector,
    pub params: DaviesParams,
    pub noisy_distance: f64,
    pub reference_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub trials: usize,
    pub seed: u64,
    /// Largest `noisy - reference` output distance seen over all trials.
    pub max_violation: f64,
    pub violating_pairs: Vec<ViolatingPair>,
    /// Trials where the Davies map alone increased the input distance.
    pub contractivity_failures: usize,
    /// Trials skipped because a fixed-point family could not be resolved.
    pub skipped: usize,
    /// Near-orthogonal pairs rejected and resampled.
    pub rejected_pairs: usize,
}

impl ConjectureReport {
    pub fn violations(&self) -> usize {
        self.violating_pairs.len()
    }
}

fn random_pure_state(rng: &mut ChaCha8Rng) -> PureState {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let theta = z.acos();
    let amp0 = Complex64::new((theta / 2.0).cos(), 0.0);
    let amp1 = Complex64::from_polar((theta / 2.0).sin(), phi);
    PureState::normalize(vec![amp0, amp1]).expect("unit vector")
}

fn random_params(rng: &mut ChaCha8Rng) -> DaviesParams {
    let p = rng.random_range(0.0..=0.5);
    let a = 2.0 * (1.0 - rng.random::<f64>());
    let g = a / 2.0 + rng.random_range(0.0..2.0);
    let omega = rng.random_range(0.5..2.0);
    let t = rng.random_range(0.0..5.0);
    DaviesParams::new(p, a, g, omega, t).expect("sampled parameters are valid")
}

enum TrialOutcome {
    Done {
        enhancement: f64,
        violation: Option<ViolatingPair>,
        contractive: bool,
        rejected: usize,
    },
    Skipped {
        rejected: usize,
    },
}

fn output_distance(a: &DensityOperator, b: &DensityOperator, d: &DaviesParams) -> Result<f64> {
    let u = fig1_unitary();
    let ra = solve_deutsch(&u, a, d)?;
    let rb = solve_deutsch(&u, b, d)?;
    trace_distance(&ra.rho_f, &rb.rho_f)
}

fn run_trial(seed: u64, trial: usize) -> Result<TrialOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let psi = random_pure_state(&mut rng);
    let mut rejected = 0;
    let phi = loop {
        let candidate = random_pure_state(&mut rng);
        if psi.inner(&candidate).norm_sqr() >= ORTHOGONAL_REJECT {
            break candidate;
        }
        rejected += 1;
    };
    let d = random_params(&mut rng);
    let reference = d.with_a(0.0)?;
    let (a, b) = (psi.density(), phi.density());

    let contractive = {
        let before = trace_distance(&a, &b)?;
        let after = trace_distance(&davies_apply(&d, &a)?, &davies_apply(&d, &b)?)?;
        after <= before + 1e-12
    };

    let distances = output_distance(&a, &b, &d).and_then(|n| Ok((n, output_distance(&a, &b, &reference)?)));
    let (noisy, refd) = match distances {
        Ok(v) => v,
        Err(Error::UnsupportedAmbiguity { .. }) => return Ok(TrialOutcome::Skipped { rejected }),
        Err(e) => return Err(e),
    };
    let enhancement = noisy - refd;
    let violation = (enhancement > VIOLATION_TOL).then(|| ViolatingPair {
        trial,
        state_a: bloch_from_state(&a).unwrap(),
        state_b: bloch_from_state(&b).unwrap(),
        params: d,
        noisy_distance: noisy,
        reference_distance: refd,
    });
    Ok(TrialOutcome::Done {
        enhancement,
        violation,
        contractive,
        rejected,
    })
}

/// Samples non-orthogonal pure pairs and Davies parameters with `A > 0`, and
/// compares the distinguishing circuit's output distance against the
/// `A = 0` reference with the same `(p, G, ω, t)`. Each trial draws from its
/// own ChaCha stream, so reports are reproducible and independent of thread
/// scheduling.
pub fn conjecture_harness(trials: usize, seed: u64) -> Result<ConjectureReport> {
    if trials == 0 {
        return invalid("trials must be at least 1");
    }
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|k| run_trial(seed, k))
        .collect::<Result<_>>()?;

    let mut report = ConjectureReport {
        trials,
        seed,
        max_violation: f64::NEG_INFINITY,
        violating_pairs: Vec::new(),
        contractivity_failures: 0,
        skipped: 0,
        rejected_pairs: 0,
    };
    for outcome in outcomes {
        match outcome {
            TrialOutcome::Done {
                enhancement,
                violation,
                contractive,
                rejected,
            } => {
                report.max_violation = report.max_violation.max(enhancement);
                report.violating_pairs.extend(violation);
                report.contractivity_failures += usize::from(!contractive);
                report.rejected_pairs += rejected;
            }
            TrialOutcome::Skipped { rejected } => {
                report.skipped += 1;
                report.rejected_pairs += rejected;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: f64, a: f64, g: f64, t: f64) -> DaviesParams {
        DaviesParams::new(p, a, g, 1.0, t).unwrap()
    }

    #[test]
    fn closed_forms_vanish_without_relaxation() {
        for (p, g, t) in [(0.1, 0.5, 1.0), (0.5, 3.0, 4.0), (0.0, 0.0, 2.0)] {
            assert_eq!(q_minus_closed(&params(p, 0.0, g, t)), 0.0);
            assert_eq!(q_zero_closed(&params(p, 0.0, g, t)), 0.0);
        }
        assert_eq!(q_minus_closed(&params(0.3, 1.0, 1.0, 0.0)), 0.0);
        assert_eq!(q_zero_closed(&params(0.0, 1.0, 1.0, 3.0)), 0.0);
    }

    #[test]
    fn closed_forms_match_expanded_expression() {
        let d = params(0.25, 1.0, 1.0, 1.0);
        let (a, g, t, p) = (1.0f64, 1.0f64, 1.0f64, 0.25f64);
        let expanded = 2f64.sqrt() / 2.0 * ((a * t).exp() - 1.0) * (-g * t).exp()
            * (8.0 * (2.0 * g * t).exp() + 1.0).sqrt()
            / (2.0 * (a * t).exp() - 1.0);
        assert!((q_minus_closed(&d) - expanded * (1.0 - p)).abs() < 1e-15);
        assert!((q_zero_closed(&d) - expanded * p).abs() < 1e-15);
    }

    #[test]
    fn closed_forms_match_numeric_pipeline() {
        let d = params(0.25, 1.0, 1.0, 1.0);
        let qm = q_numeric(FigOneInput::Minus, &d).unwrap();
        let qz = q_numeric(FigOneInput::Zero, &d).unwrap();
        assert!((q_minus_closed(&d) - qm).abs() < 1e-12);
        assert!((q_zero_closed(&d) - qz).abs() < 1e-12);
    }

    #[test]
    fn r_numeric_limits() {
        assert!((r_numeric(&params(0.25, 1.0, 1.0, 0.0)).unwrap() - 1.0).abs() < 1e-12);
        assert!((r_numeric(&params(0.4, 0.0, 2.0, 3.0)).unwrap() - 1.0).abs() < 1e-10);
        let r = r_numeric(&params(0.25, 2.0, 1.0, 2.0)).unwrap();
        assert!(r < std::f64::consts::SQRT_2 / 2.0);
    }

    #[test]
    fn literal_r_formula_values() {
        assert!((r_paper_formula(&params(0.25, 1.0, 1.0, 0.0)) - 4.0 / 3.0).abs() < 1e-15);
        let v = r_paper_formula(&params(0.25, 0.0, 1.0, 1.0));
        assert!((v - 4.0 / 3.0 * std::f64::consts::E).abs() < 1e-14);
    }

    #[test]
    fn grid_values() {
        let g = Grid::Range { start: 0.0, stop: 1.0, count: 5 };
        assert_eq!(g.values().unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(Grid::Range { start: 2.0, stop: 2.0, count: 1 }.values().unwrap(), vec![2.0]);
        assert!(Grid::Range { start: 1.0, stop: 0.0, count: 3 }.values().is_err());
        assert!(Grid::Range { start: 0.0, stop: 1.0, count: 0 }.values().is_err());
        assert!(Grid::Values(vec![]).values().is_err());
    }

    #[test]
    fn sweep_single_point_matches_direct_calls() {
        let spec = SweepSpec {
            circuit: SweepCircuit::DeutschFig1,
            grids: ParamGrids {
                p: Grid::fixed(0.25),
                a: Grid::fixed(1.0),
                g: Grid::fixed(1.0),
                omega: Grid::fixed(1.0),
                t: Grid::fixed(1.5),
            },
        };
        let rows = sweep(&spec).unwrap();
        assert_eq!(rows.len(), 1);
        let d = params(0.25, 1.0, 1.0, 1.5);
        assert_eq!(rows[0], DistinguishabilityRecord::evaluate(&d).unwrap());
    }

    #[test]
    fn sweep_rejects_bad_grids_and_circuits() {
        let mut spec = SweepSpec {
            circuit: SweepCircuit::DeutschFig1,
            grids: ParamGrids {
                a: Grid::fixed(2.0),
                g: Grid::fixed(0.5),
                ..ParamGrids::default()
            },
        };
        assert!(matches!(sweep(&spec), Err(Error::InvalidParams(_))));
        spec.grids.g = Grid::fixed(1.0);
        spec.circuit = SweepCircuit::PctcFig4;
        assert!(matches!(sweep(&spec), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn harness_is_deterministic() {
        let a = conjecture_harness(20, 7).unwrap();
        let b = conjecture_harness(20, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.contractivity_failures, 0);
        assert!(conjecture_harness(0, 7).is_err());
    }
}
