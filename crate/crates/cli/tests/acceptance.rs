//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use entmeter::manybody::{condensate, fermi_sea, infinite_temperature, measure_reduced, measure_spin, polarized, reduced_dm};
use entmeter::measure::{order_index, reduced_measure_formula};
use entmeter::norms::{restricted_norm_oracle, restricted_norm_variational, NormMode};
use entmeter::properties::{audit, Property};
use entmeter::states::{self, Statistics};
use entmeter::tensor::{outer, random_density};
use entmeter::{entanglement, Error, LogBase, NormOptions, Operator, SpaceShape, C64};
use entmeter_cli::report::ReproduceRow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn(&mut Tally));

/// Collects failed checks for one criterion.
#[derive(Default)]
struct Tally {
    checks: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn close(&mut self, label: impl Into<String>, got: f64, want: f64, tol: f64) {
        self.checks += 1;
        let diff = (got - want).abs();
        if diff.is_nan() || diff > tol {
            self.failures.push(format!("{}: got {got:.12}, want {want:.12} (tol {tol:e})", label.into()));
        }
    }

    fn holds(&mut self, label: impl Into<String>, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failures.push(label.into());
        }
    }
}

fn opts() -> NormOptions {
    NormOptions::default()
}

fn eps(a: &Operator, mode: NormMode) -> f64 {
    entanglement(a, mode, LogBase::TWO, &opts()).unwrap().epsilon
}

fn density(psi: entmeter::PureState) -> Operator {
    outer(&psi).unwrap()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn falling(n: usize, p: usize) -> f64 {
    (n - p + 1..=n).map(|k| k as f64).product()
}

fn example_table(t: &mut Tally) {
    for s in [1, -1] {
        t.close(format!("epr({s})"), eps(&density(states::epr(s).unwrap()), NormMode::Variational), 1.0, 1e-9);
        t.close(format!("bell({s})"), eps(&density(states::bell(s).unwrap()), NormMode::Variational), 1.0, 1e-9);
        t.close(format!("ghz({s})"), eps(&density(states::ghz(s).unwrap()), NormMode::Variational), 2.0, 1e-9);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    for n in [2usize, 3, 4, 6] {
        let top = eps(&density(states::multicat(n, h, h).unwrap()), NormMode::Variational);
        t.close(format!("multicat N={n} maximum"), top, n as f64 - 1.0, 1e-9);
        for _ in 0..20 {
            let w: f64 = rng.random_range(0.01..0.99);
            let c1 = C64::from_polar(w.sqrt(), rng.random_range(0.0..std::f64::consts::TAU));
            let c2 = C64::from_polar((1.0 - w).sqrt(), rng.random_range(0.0..std::f64::consts::TAU));
            let got = eps(&density(states::multicat(n, c1, c2).unwrap()), NormMode::Variational);
            t.close(format!("multicat N={n} w={w:.4}"), got, (1.0 - n as f64) * w.max(1.0 - w).log2(), 1e-6);
        }
    }

    for (n, m) in [(2usize, 3usize), (3, 3), (3, 4)] {
        let c = vec![C64::new((m as f64).powf(-0.5), 0.0); m];
        let got = eps(&density(states::multimode(n, &c).unwrap()), NormMode::Variational);
        t.close(format!("multimode ({n},{m})"), got, (n as f64 - 1.0) * (m as f64).log2(), 1e-6);
    }

    for stat in [Statistics::Fermi, Statistics::Bose] {
        for n in 2..=5usize {
            let got = eps(&density(states::hartree_fock(n, stat).unwrap()), NormMode::Basis);
            let want = ((n as f64).powi(n as i32) / factorial(n)).log2();
            t.close(format!("hartree_fock {stat:?} N={n} basis"), got, want, 1e-9);
        }
    }
    let bose = eps(&density(states::hartree_fock(3, Statistics::Bose).unwrap()), NormMode::Variational);
    t.close("hartree_fock Bose N=3 variational", bose, 6f64.log2(), 1e-6);
    t.notes.push(format!(
        "finding: bosonic Hartree-Fock N=3 variational {bose:.9} vs basis closed form {:.9}",
        4.5f64.log2()
    ));

    let mut oracle_checked = 0;
    for n in 2..=5usize {
        for p in 1..=n {
            let a = states::reduced_hartree_fock(n, p, Statistics::Fermi).unwrap();
            let want = (factorial(n - p) * (n as f64).powi(p as i32) / factorial(n)).log2();
            let r = entanglement(&a, NormMode::Variational, LogBase::TWO, &opts()).unwrap();
            t.close(format!("reduced HF N={n} p={p}"), r.epsilon, want, 1e-6);
            if a.dim() <= 256 {
                let o = restricted_norm_oracle(&a, 300, (10 * n + p) as u64).unwrap();
                t.close(format!("reduced HF N={n} p={p} oracle"), (o / r.norm_d_aotimes).log2(), want, 1e-6);
                oracle_checked += 1;
            }
        }
    }
    t.notes.push(format!("{oracle_checked} reduced Hartree-Fock cases cross-checked by the oracle"));
}

fn desk_checks(t: &mut Tally) {
    for n in 1..=6usize {
        let (space, rho) = condensate(n, 2).unwrap();
        for p in 1..=n.min(3) {
            let r = measure_reduced(&space, &rho, p, NormMode::Variational, LogBase::TWO, &opts()).unwrap();
            t.close(format!("condensate N={n} p={p} epsilon"), r.epsilon, 0.0, 1e-8);
            let tr = reduced_dm(&space, &rho, p).unwrap().matrix.trace().re;
            t.close(format!("condensate N={n} p={p} trace"), tr / falling(n, p), 1.0, 1e-8);
        }
    }

    let (space, rho) = fermi_sea(3, 3).unwrap();
    let r = measure_reduced(&space, &rho, 2, NormMode::Variational, LogBase::TWO, &opts()).unwrap();
    let hf = (factorial(1) * 9.0 / factorial(3)).log2();
    t.close("Fermi sea N=3 m=3 p=2", r.epsilon, hf, 1e-6);

    for n in [10usize, 1000, 1_000_000] {
        let nf = n as f64;
        for p in [2usize, 3] {
            let c_p = falling(n, p) / nf.powi(p as i32);
            let power = if p % 2 == 0 { p as f64 / 2.0 } else { (p as f64 - 1.0) / 2.0 };
            let got = reduced_measure_formula(n, p, c_p * nf.powf(power), 1.0, LogBase::TWO).unwrap();
            let want = power * nf.log2();
            t.close(format!("half-order law N={n} p={p}"), got, want, 1e-12 * want.max(1.0));
        }
    }

    for n in 2..=8usize {
        let r = measure_spin(&polarized(n).unwrap(), 2, NormMode::Variational, LogBase::TWO, &opts()).unwrap();
        t.close(format!("polarized N={n} R_2"), r.epsilon, 0.0, 1e-6);
    }
    for n in [2usize, 4, 6, 8] {
        let rho = infinite_temperature(n).unwrap();
        let one = measure_spin(&rho, 1, NormMode::Variational, LogBase::TWO, &opts()).unwrap();
        t.close(format!("paramagnet N={n} R_1"), one.epsilon, 0.0, 1e-9);
        let two = measure_spin(&rho, 2, NormMode::Variational, LogBase::TWO, &opts()).unwrap();
        t.notes.push(format!(
            "paramagnet N={n}: eps(R_2) = {:.9}, mean-field log2(3) = {:.9}, gap {:.9}",
            two.epsilon,
            3f64.log2(),
            3f64.log2() - two.epsilon
        ));
    }
}

fn property_suites(t: &mut Tally) {
    let seeds: Vec<u64> = (0..20).collect();
    for o in audit(&Property::ALL, &seeds, &opts()).unwrap() {
        t.holds(
            format!("{}: {} of 20 seeds failed, worst {:e}", o.property.name(), o.failed, o.worst),
            o.all_passed(),
        );
        t.notes.push(format!("{}: worst deviation {:.3e}", o.property.name(), o.worst));
    }
}

fn optimizer_vs_oracle(t: &mut Tally) {
    let shape = SpaceShape::uniform(2, 2).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..50u64 {
        let rho = random_density(&shape, 5000 + seed);
        let v = restricted_norm_variational(&rho, &opts()).unwrap();
        let o = restricted_norm_oracle(&rho, 10_000, seed).unwrap();
        worst = worst.max((v.value - o).abs());
        t.close(format!("density {seed}"), v.value, o, 1e-4);
        t.holds(format!("density {seed}: {} non-monotone sweeps", v.monotone_violations), v.monotone_violations == 0);
    }
    t.notes.push(format!("largest |variational - oracle| = {worst:.3e}"));
}

fn order_indices(t: &mut Tally) {
    for n in [10usize, 100] {
        let (space, rho) = condensate(n, 2).unwrap();
        let w = order_index(&reduced_dm(&space, &rho, 1).unwrap().matrix).unwrap();
        t.close(format!("condensate N={n}"), w.omega, 1.0, 1e-12);
        let (space, rho) = fermi_sea(n, n + 1).unwrap();
        let w = order_index(&reduced_dm(&space, &rho, 1).unwrap().matrix).unwrap();
        t.close(format!("Fermi sea N={n}"), w.omega, 0.0, 1e-12);
    }
    let pure = density(states::epr(1).unwrap());
    t.holds("unit trace is degenerate", matches!(order_index(&pure), Err(Error::DegenerateTrace { .. })));
}

fn cli_reproduce(t: &mut Tally) {
    let run = || Command::new(env!("CARGO_BIN_EXE_entmeter")).arg("reproduce").output().unwrap();
    let (first, second) = (run(), run());
    t.holds(format!("reproduce exit status {:?}", first.status.code()), first.status.success());
    t.holds("two runs byte-identical", first.stdout == second.stdout);
    let rows: Vec<ReproduceRow> = serde_json::from_slice(&first.stdout).unwrap();
    for r in &rows {
        if r.flag.is_none() {
            t.close(r.name.as_str(), r.epsilon_computed, r.epsilon_closed_form, 1e-6);
        } else {
            t.notes.push(format!("{} (flag {}): abs_diff {:.3e}", r.name, r.flag.as_deref().unwrap(), r.abs_diff));
        }
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("worked example table", example_table),
        ("phase-transition desk checks", desk_checks),
        ("property suites on seeds 0..19", property_suites),
        ("optimizer against oracle on 50 two-qubit densities", optimizer_vs_oracle),
        ("order index", order_indices),
        ("reproduce command and determinism", cli_reproduce),
    ];
    let mut failed = 0;
    for (k, (title, body)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut tally = Tally::default();
        let outcome = catch_unwind(AssertUnwindSafe(|| body(&mut tally)));
        let secs = start.elapsed().as_secs_f64();
        for note in &tally.notes {
            println!("    note: {note}");
        }
        let ok = outcome.is_ok() && tally.failures.is_empty();
        if !ok {
            failed += 1;
        }
        let status = if ok { "PASS" } else { "FAIL" };
        println!("{status} criterion {}: {title} ({} checks, {secs:.1}s)", k + 1, tally.checks);
        for f in &tally.failures {
            println!("    failed: {f}");
        }
        if outcome.is_err() {
            println!("    failed: panicked");
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
