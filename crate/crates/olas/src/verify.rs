//! Verification suites: closed-form solvers against their brute-force
//! enumeration oracles, and the noise-function contract sweeps.
//!
//! The `verify` CLI subcommand and the acceptance test suite both run these.

use rand::Rng;

use crate::assignment::{brute_force_minmax, optimal_assignment};
use crate::domain::{validate_panel, EntropyTable, LabelerPanel, LabelerProfile, SampleId};
use crate::noise::{noise_model1, noise_model2, validate_noise_function, NoiseSpec};
use crate::sampling::{brute_force_model4, check_query_plan, olas_select};
use crate::{seeded_rng, Result};

/// One named verification check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckResult {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

/// A batch of checks with an overall verdict.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SuiteReport {
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn merge(&mut self, other: SuiteReport) {
        self.checks.extend(other.checks);
    }
}

const ORACLE_TOL: f64 = 1e-12;

fn random_panel<R: Rng + ?Sized>(
    rng: &mut R,
    max_labelers: usize,
    max_capacity: usize,
) -> LabelerPanel {
    let m = rng.random_range(1..=max_labelers);
    let profiles: Vec<LabelerProfile> = (0..m)
        .map(|_| LabelerProfile {
            accuracy: rng.random_range(0.0..=1.0),
            capacity: rng.random_range(1..=max_capacity),
        })
        .collect();
    validate_panel(&profiles).unwrap()
}

fn sorted_entropies<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut e: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
    e.sort_by(|a, b| b.partial_cmp(a).unwrap());
    e
}

/// Closed-form min-max assignment vs exhaustive enumeration on random
/// instances (both noise models per instance).
pub fn theorem1_suite(instances: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = seeded_rng(seed);
    let mut max_delta: f64 = 0.0;
    let mut failures = 0usize;
    for _ in 0..instances {
        let panel = random_panel(&mut rng, 3, 3);
        let n = rng.random_range(1..=panel.total_capacity().min(7));
        let entropies = sorted_entropies(&mut rng, n);
        for noise in [NoiseSpec::Model1, NoiseSpec::Model2] {
            let plan = optimal_assignment(&entropies, &panel, &noise)?;
            let (brute, _) = brute_force_minmax(&entropies, &panel, &noise)?;
            let delta = (plan.max_noise - brute).abs();
            max_delta = max_delta.max(delta);
            if delta > ORACLE_TOL {
                failures += 1;
            }
        }
    }
    let mut report = SuiteReport::default();
    report.checks.push(CheckResult::new(
        "min-max assignment equals brute force",
        failures == 0,
        format!("{instances} instances x 2 noise models, max |delta| = {max_delta:.3e}"),
    ));
    Ok(report)
}

/// Closed-form joint selection vs exhaustive enumeration over a beta grid,
/// plus feasibility of every returned plan.
pub fn theorem2_suite(instances: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = seeded_rng(seed);
    let mut max_delta: f64 = 0.0;
    let mut objective_failures = 0usize;
    let mut feasibility_failures = 0usize;
    let mut solved = 0usize;
    for _ in 0..instances {
        let panel = random_panel(&mut rng, 3, 3);
        let n = rng.random_range(1..=8);
        let entropies = sorted_entropies(&mut rng, n);
        let table = EntropyTable::from_scores(
            entropies
                .iter()
                .enumerate()
                .map(|(i, &e)| (SampleId(i as u64), e))
                .collect(),
        )?;
        for noise in [NoiseSpec::Model1, NoiseSpec::Model2] {
            for k in 0..=20 {
                let beta = k as f64 * 0.05;
                let plan = olas_select(&table, &panel, &noise, beta)?;
                if check_query_plan(&plan, &panel, &noise, beta).is_err() {
                    feasibility_failures += 1;
                }
                let (brute, _) = brute_force_model4(&entropies, &panel, &noise, beta)?;
                let delta = (plan.objective - brute).abs();
                max_delta = max_delta.max(delta);
                if delta > ORACLE_TOL {
                    objective_failures += 1;
                }
                solved += 1;
            }
        }
    }
    let mut report = SuiteReport::default();
    report.checks.push(CheckResult::new(
        "joint selection objective equals brute force",
        objective_failures == 0,
        format!("{solved} solves, max |delta| = {max_delta:.3e}"),
    ));
    report.checks.push(CheckResult::new(
        "joint selection plans satisfy all constraints",
        feasibility_failures == 0,
        format!("{feasibility_failures} infeasible plans"),
    ));
    Ok(report)
}

/// Noise-function contract: grid validity for both models, branch
/// continuity, endpoint values, and the two hand-computed values.
pub fn noise_validity_suite() -> SuiteReport {
    let mut report = SuiteReport::default();

    let r1 = validate_noise_function(|a, e| noise_model1(a, e).unwrap(), 0.01);
    report.checks.push(CheckResult::new(
        "noise model 1 valid on 0.01 grid",
        r1.is_valid,
        format!("{} violations", r1.violations.len()),
    ));
    let r2 = validate_noise_function(|a, e| noise_model2(a, e).unwrap(), 0.01);
    report.checks.push(CheckResult::new(
        "noise model 2 valid on 0.01 grid",
        r2.is_valid,
        format!("{} violations", r2.violations.len()),
    ));

    let mut max_gap: f64 = 0.0;
    for i in 0..=100 {
        let a = i as f64 / 100.0;
        let below = noise_model2(a, 0.5).unwrap();
        let above = noise_model2(a, 0.5 + 1e-12).unwrap();
        max_gap = max_gap.max((below - above).abs());
    }
    report.checks.push(CheckResult::new(
        "noise model 2 continuous at e = 0.5",
        max_gap <= 1e-9,
        format!("max gap {max_gap:.3e}"),
    ));

    let mut endpoints_ok = true;
    for i in 1..10 {
        let a = i as f64 / 10.0;
        endpoints_ok &= noise_model2(a, 0.0).unwrap() == 0.0;
        endpoints_ok &= noise_model2(a, 1.0).unwrap() == 1.0;
    }
    report.checks.push(CheckResult::new(
        "noise model 2 endpoint values",
        endpoints_ok,
        "eps(a, 0) = 0 and eps(a, 1) = 1 for a in {0.1..0.9}".to_string(),
    ));

    let hand1 = noise_model1(0.5, 0.4).unwrap();
    let hand2 = noise_model2(0.7, 0.5).unwrap();
    report.checks.push(CheckResult::new(
        "hand-computed noise values",
        hand1 == 0.2 && hand2 == 1.0 - 0.7,
        format!("eps1(0.5, 0.4) = {hand1}, eps2(0.7, 0.5) = {hand2}"),
    ));

    report
}

/// Run every verification suite with default sizes.
pub fn full_verification(seed: u64) -> Result<SuiteReport> {
    let mut report = theorem1_suite(500, seed)?;
    report.merge(theorem2_suite(300, crate::derive_seed(seed, 2))?);
    report.merge(noise_validity_suite());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        let r = theorem1_suite(50, 1).unwrap();
        assert!(r.all_passed(), "{:?}", r.checks);
        let r = theorem2_suite(20, 2).unwrap();
        assert!(r.all_passed(), "{:?}", r.checks);
        let r = noise_validity_suite();
        assert!(r.all_passed(), "{:?}", r.checks);
    }
}
