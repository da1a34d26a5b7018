//! Preset fixture checks, printed as an expected-versus-actual table.

use anyhow::Result;
use clap::ValueEnum;
use latmn::bases::{check_simple_corruption, theorem1_basis};
use latmn::fiber::{connectivity, enumerate_fiber, stuck_moves, witness_path_implicit, EnumerationOptions, WitnessPath};
use latmn::fixtures;
use latmn::lattice::kernel_lattice_basis;
use latmn::models::{build_bandmisread, build_contingency, build_mta, build_suffstats};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Example {
    Contingency,
    Mta,
    Suffstats,
    Bandmisread,
}

pub struct Check {
    pub name: &'static str,
    pub expected: String,
    pub actual: String,
}

impl Check {
    fn new(name: &'static str, expected: impl ToString, actual: impl ToString) -> Self {
        Check { name, expected: expected.to_string(), actual: actual.to_string() }
    }

    pub fn passed(&self) -> bool {
        self.expected == self.actual
    }
}

fn dims(rows: usize, cols: usize) -> String {
    format!("{rows}x{cols}")
}

fn vector(v: &[impl ToString]) -> String {
    format!("({})", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
}

fn set(v: &[usize]) -> String {
    format!("{{{}}}", v.iter().map(|k| format!("LB{}", k + 1)).collect::<Vec<_>>().join(","))
}

fn verdict(w: &WitnessPath) -> &'static str {
    match w {
        WitnessPath::Connected(_) => "connected",
        WitnessPath::Disconnected { .. } => "disconnected",
    }
}

fn contingency() -> Result<Vec<Check>> {
    let spec = build_contingency(3, 3)?;
    let ex = fixtures::contingency()?;
    let y = [5, 3, 2, 0, 4];
    let fiber = enumerate_fiber(&spec.matrix, &y, EnumerationOptions::default())?;
    let lattice = ex.lattice.as_ref().expect("contingency ships a lattice basis");
    let mut checks = vec![Check::new("A dimensions", dims(5, 9), dims(spec.matrix.rows(), spec.matrix.cols()))];
    for (i, x) in ex.solutions.iter().enumerate() {
        let name = ["A·x1", "A·x2"].get(i).copied().unwrap_or("A·x");
        checks.push(Check::new(name, vector(&y), vector(&spec.matrix.mul_vec(x)?)));
    }
    checks.extend([
        Check::new("fiber size", 11, fiber.len()),
        Check::new("HNF basis size", 4, kernel_lattice_basis(&spec.matrix)?.len()),
        Check::new("lattice basis components", fiber.len(), connectivity(&fiber, lattice)?.component_count),
        Check::new("Markov basis components", 1, connectivity(&fiber, &ex.markov)?.component_count),
    ]);
    Ok(checks)
}

fn mta() -> Result<Vec<Check>> {
    let ex = fixtures::mta2()?;
    let a = &ex.spec.matrix;
    let lattice = ex.lattice.as_ref().expect("mta(2) ships a lattice basis");
    let (x1, x2) = (&ex.solutions[0], &ex.solutions[1]);
    let accepted: Vec<usize> =
        (1..=6).filter(|&k| build_mta(k).is_ok_and(|s| check_simple_corruption(&s.matrix).holds())).collect();
    let opts = EnumerationOptions::with_bound(5);
    Ok(vec![
        Check::new("A dimensions", dims(3, 9), dims(a.rows(), a.cols())),
        Check::new("A·x1", vector(&[363, 22, 174]), vector(&a.mul_vec(x1)?)),
        Check::new("simple corruption, K = 1..6", "6 of 6", format!("{} of 6", accepted.len())),
        Check::new("constructed basis = reference Markov basis", true, theorem1_basis(a)?.same_moves(&ex.markov)),
        Check::new("stuck lattice moves at x1", set(&[1, 2, 4, 5]), set(&stuck_moves(x1, lattice)?)),
        Check::new("x1 to x2, lattice basis", "disconnected", verdict(&witness_path_implicit(lattice, a, x1, x2, opts)?)),
        Check::new("x1 to x2, Markov basis", "connected", verdict(&witness_path_implicit(&ex.markov, a, x1, x2, opts)?)),
    ])
}

fn suffstats() -> Result<Vec<Check>> {
    let spec = build_suffstats(4)?;
    let ex = fixtures::suffstats4()?;
    let y = [6030, 1312, 161, 4, 629, 622, 6279, 1623, 8680];
    let lattice = ex.lattice.as_ref().expect("suffstats(4) ships a lattice basis");
    let mut checks = vec![Check::new("A dimensions", dims(9, 15), dims(spec.matrix.rows(), spec.matrix.cols()))];
    for (i, x) in ex.solutions.iter().enumerate() {
        let name = ["A·x1", "A·x2"].get(i).copied().unwrap_or("A·x");
        checks.push(Check::new(name, vector(&y), vector(&spec.matrix.mul_vec(x)?)));
    }
    checks.push(Check::new("stuck lattice moves at x2", set(&[0, 1, 3, 4, 5, 6]), set(&stuck_moves(&ex.solutions[1], lattice)?)));
    checks.push(Check::new("imported Markov basis size", 16, ex.markov.len()));
    Ok(checks)
}

fn bandmisread() -> Result<Vec<Check>> {
    let spec = build_bandmisread(3)?;
    let ex = fixtures::bandmisread3()?;
    let fiber = enumerate_fiber(&spec.matrix, &ex.y, EnumerationOptions::default())?;
    let hnf = kernel_lattice_basis(&spec.matrix)?;
    let split = connectivity(&fiber, &hnf)?;
    Ok(vec![
        Check::new("A dimensions", dims(9, 21), dims(spec.matrix.rows(), spec.matrix.cols())),
        Check::new("simple corruption", false, check_simple_corruption(&spec.matrix).holds()),
        Check::new("fiber size", 120, fiber.len()),
        Check::new("imported Markov basis size", 63, ex.markov.len()),
        Check::new("Markov basis components", 1, connectivity(&fiber, &ex.markov)?.component_count),
        Check::new("HNF basis size", 12, hnf.len()),
        Check::new("HNF basis connects the fiber", false, split.is_connected()),
    ])
}

pub fn checks(example: Example) -> Result<Vec<Check>> {
    match example {
        Example::Contingency => contingency(),
        Example::Mta => mta(),
        Example::Suffstats => suffstats(),
        Example::Bandmisread => bandmisread(),
    }
}

pub fn render(checks: &[Check]) -> String {
    let header = ["check", "expected", "actual", "status"];
    let rows: Vec<[String; 4]> = checks
        .iter()
        .map(|c| {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            [c.name.to_string(), c.expected.clone(), c.actual.clone(), status.to_string()]
        })
        .collect();
    let mut width = header.map(|h| h.chars().count());
    for r in &rows {
        for (w, cell) in width.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: [&str; 4]| {
        let padded: Vec<String> = cells.iter().zip(width).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header);
    for r in &rows {
        out += &line([&r[0], &r[1], &r[2], &r[3]]);
    }
    out
}
