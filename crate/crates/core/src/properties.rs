//! Randomized audits of the measure's structural properties.
//!
//! Each property is checked per seed on random densities of two and three
//! qubits. A check returns the worst deviation seen; it passes when that
//! deviation is within the property's tolerance. Failures are reported,
//! never clipped.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::measure::{entanglement, nonentangling, LogBase};
use crate::norms::{NormMode, NormOptions};
use crate::tensor::{random_density, random_local_unitaries, tensor_product, Operator, SpaceShape};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Property {
    Semipositivity,
    Nullification,
    Additivity,
    LocalUnitaryInvariance,
    Continuity,
    ScaleInvariance,
    Idempotence,
}

impl Property {
    pub const ALL: [Property; 7] = [
        Property::Semipositivity,
        Property::Nullification,
        Property::Additivity,
        Property::LocalUnitaryInvariance,
        Property::Continuity,
        Property::ScaleInvariance,
        Property::Idempotence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Semipositivity => "semipositivity",
            Property::Nullification => "nullification",
            Property::Additivity => "additivity",
            Property::LocalUnitaryInvariance => "local_unitary_invariance",
            Property::Continuity => "continuity",
            Property::ScaleInvariance => "scale_invariance",
            Property::Idempotence => "idempotence",
        }
    }

    /// Largest admissible deviation. For semipositivity the deviation is `-ε`.
    pub fn tolerance(self) -> f64 {
        match self {
            Property::Semipositivity | Property::Nullification => 1e-7,
            Property::Additivity | Property::LocalUnitaryInvariance => 1e-6,
            Property::Continuity => 0.01,
            Property::ScaleInvariance => 1e-9,
            Property::Idempotence => 1e-10,
        }
    }
}

impl std::fmt::Display for Property {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Perturbation size for the continuity check.
pub const CONTINUITY_T: f64 = 1e-3;

/// Qubit counts every seed is checked on.
pub const QUBIT_COUNTS: [usize; 2] = [2, 3];

/// A single seed's outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub seed: u64,
    pub deviation: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyOutcome {
    pub property: Property,
    pub passed: usize,
    pub failed: usize,
    pub worst: f64,
    pub failures: Vec<Check>,
}

impl PropertyOutcome {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

fn sub_seed(seed: u64, salt: u64) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(salt)
}

fn qubits(k: usize) -> SpaceShape {
    SpaceShape::uniform(2, k).expect("k >= 1")
}

/// The random density a check uses for `seed` on `k` qubits.
pub fn fixture_density(seed: u64, k: usize) -> Operator {
    random_density(&qubits(k), sub_seed(seed, k as u64))
}

fn eps(a: &Operator, opts: &NormOptions) -> Result<f64> {
    Ok(entanglement(a, NormMode::Variational, LogBase::TWO, opts)?.epsilon)
}

/// Runs one property for one seed; the deviation is the worst over [`QUBIT_COUNTS`].
pub fn check(property: Property, seed: u64, opts: &NormOptions) -> Result<Check> {
    let mut worst = f64::NEG_INFINITY;
    let mut detail = String::new();
    for k in QUBIT_COUNTS {
        let shape = qubits(k);
        let rho = fixture_density(seed, k);
        let (dev, what) = match property {
            Property::Semipositivity => {
                let e = eps(&rho, opts)?;
                (-e, format!("{k} qubits: epsilon = {e:.12e}"))
            }
            Property::Nullification => {
                let factors: Vec<Operator> = (0..k)
                    .map(|i| random_density(&qubits(1), sub_seed(seed, 100 + i as u64)))
                    .collect();
                let e = eps(&tensor_product(&factors)?, opts)?;
                (e.abs(), format!("{k} qubits: epsilon of product = {e:.12e}"))
            }
            Property::Additivity => {
                let other = random_density(&shape, sub_seed(seed, 200 + k as u64));
                let joint = eps(&tensor_product(&[rho.clone(), other.clone()])?, opts)?;
                let sum = eps(&rho, opts)? + eps(&other, opts)?;
                ((joint - sum).abs(), format!("{k}+{k} qubits: joint {joint:.12e}, sum {sum:.12e}"))
            }
            Property::LocalUnitaryInvariance => {
                let us = random_local_unitaries(&shape, sub_seed(seed, 300 + k as u64));
                let rotated = rho.conjugate_local(&us)?;
                let rotated = Operator::hermitian(shape.clone(), crate::tensor::hermitian_part(rotated.matrix()))?;
                let (a, b) = (eps(&rho, opts)?, eps(&rotated, opts)?);
                ((a - b).abs(), format!("{k} qubits: {a:.12e} vs rotated {b:.12e}"))
            }
            Property::Continuity => {
                let d = shape.total_dim() as f64;
                let t = CONTINUITY_T;
                let mixed = rho
                    .scale(C64::new(1.0 - t, 0.0))
                    .add(&Operator::identity(shape.clone()).scale(C64::new(t / d, 0.0)))?;
                let mixed = Operator::hermitian(shape.clone(), mixed.into_matrix())?;
                let (a, b) = (eps(&rho, opts)?, eps(&mixed, opts)?);
                ((a - b).abs(), format!("{k} qubits: {a:.12e} vs perturbed {b:.12e}"))
            }
            Property::ScaleInvariance => {
                let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 400 + k as u64));
                let c: f64 = 10f64.powf(rng.random_range(-2.0..2.0));
                let scaled = Operator::hermitian(shape.clone(), rho.matrix() * C64::new(c, 0.0))?;
                let (a, b) = (eps(&rho, opts)?, eps(&scaled, opts)?);
                ((a - b).abs(), format!("{k} qubits, c = {c:.6}: {a:.12e} vs {b:.12e}"))
            }
            Property::Idempotence => {
                let once = nonentangling(&rho)?;
                let twice = nonentangling(&once)?;
                let dev = (once.matrix() - twice.matrix()).camax();
                (dev, format!("{k} qubits: max entry difference {dev:.3e}"))
            }
        };
        if dev > worst {
            worst = dev;
            detail = what;
        }
    }
    Ok(Check {
        seed,
        deviation: worst,
        passed: worst <= property.tolerance(),
        detail,
    })
}

/// Runs every listed property over every seed.
pub fn audit(properties: &[Property], seeds: &[u64], opts: &NormOptions) -> Result<Vec<PropertyOutcome>> {
    properties
        .iter()
        .map(|&property| {
            let mut out = PropertyOutcome {
                property,
                passed: 0,
                failed: 0,
                worst: f64::NEG_INFINITY,
                failures: Vec::new(),
            };
            for &seed in seeds {
                let c = check(property, seed, opts)?;
                out.worst = out.worst.max(c.deviation);
                if c.passed {
                    out.passed += 1;
                } else {
                    out.failed += 1;
                    out.failures.push(c);
                }
            }
            Ok(out)
        })
        .collect()
}
