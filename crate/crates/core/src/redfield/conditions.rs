//! A-priori check of whether an assembled generator will commute with the
//! number superoperator.

use super::assembly::DecomposedChannel;
use super::psa::PsaPolicy;

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    /// Every jump component changes the excitation number by at most one.
    pub condition_one: bool,
    /// Every retained same-bath pair `(ω, ω′)` joins components with the
    /// same excitation change.
    pub condition_two: bool,
    /// All pairs `E_k + E_l` exceed the retained gap, so emission and
    /// absorption of single quanta are never paired.
    pub energies_resolved: bool,
    pub symmetry_predicted: bool,
    /// `(channel, frequency)` of components with no definite grading.
    pub ungraded: Vec<(usize, f64)>,
    /// `(α, β, ω, ω′)` of retained pairs with mismatched grading.
    pub violations: Vec<(usize, usize, f64, f64)>,
}

pub fn check_conditions(
    mode_energies: &[f64],
    channels: &[DecomposedChannel],
    policy: &PsaPolicy,
) -> ConditionReport {
    let mut ungraded = Vec::new();
    let mut condition_one = true;
    for (idx, c) in channels.iter().enumerate() {
        for comp in &c.jumps.components {
            match comp.delta {
                Some(d) if d.abs() <= 1 => {}
                Some(_) => condition_one = false,
                None => {
                    condition_one = false;
                    ungraded.push((idx, comp.frequency));
                }
            }
        }
    }

    let mut violations = Vec::new();
    for (alpha, a) in channels.iter().enumerate() {
        for (beta, b) in channels.iter().enumerate() {
            if a.bath != b.bath {
                continue;
            }
            for cb in &b.jumps.components {
                for ca in &a.jumps.components {
                    if !policy.keeps(cb.frequency, ca.frequency) {
                        continue;
                    }
                    let same = matches!((cb.delta, ca.delta), (Some(x), Some(y)) if x == y);
                    if !same {
                        violations.push((alpha, beta, cb.frequency, ca.frequency));
                    }
                }
            }
        }
    }
    let condition_two = violations.is_empty();

    let gap = match policy.mode {
        super::psa::SecularMode::Partial => policy.threshold(),
        super::psa::SecularMode::FullSecular => policy.freq_tol,
        super::psa::SecularMode::None => f64::INFINITY,
    };
    let energies_resolved = mode_energies
        .iter()
        .all(|&e| mode_energies.iter().all(|&f| e + f > gap));

    ConditionReport {
        condition_one,
        condition_two,
        energies_resolved,
        symmetry_predicted: condition_two,
        ungraded,
        violations,
    }
}
