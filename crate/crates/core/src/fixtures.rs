//! Reference matrices, observations and move sets shipped with the crate,
//! stored as 4ti2 text under `data/`.

use crate::bases::parse_moveset;
use crate::error::Result;
use crate::fourti2;
use crate::models::{build_bandmisread, build_contingency, build_mta, build_suffstats, ModelSpec};
use crate::{IntMoveSet, IntVector};

pub mod text {
    pub const CONTINGENCY_Y: &str = include_str!("../data/contingency3x3.y");
    pub const CONTINGENCY_SOLUTIONS: &str = include_str!("../data/contingency3x3_solutions.mat");
    pub const CONTINGENCY_LATTICE: &str = include_str!("../data/contingency3x3_lattice.mar");
    pub const CONTINGENCY_MARKOV: &str = include_str!("../data/contingency3x3_markov.mar");
    pub const MTA2_Y: &str = include_str!("../data/mta2.y");
    pub const MTA2_SOLUTIONS: &str = include_str!("../data/mta2_solutions.mat");
    pub const MTA2_LATTICE: &str = include_str!("../data/mta2_lattice.mar");
    pub const MTA2_MARKOV: &str = include_str!("../data/mta2_markov.mar");
    pub const SUFFSTATS4_Y: &str = include_str!("../data/suffstats4.y");
    pub const SUFFSTATS4_SOLUTIONS: &str = include_str!("../data/suffstats4_solutions.mat");
    pub const SUFFSTATS4_LATTICE: &str = include_str!("../data/suffstats4_lattice.mar");
    pub const SUFFSTATS4_MARKOV: &str = include_str!("../data/suffstats4_markov.mar");
    pub const BANDMISREAD3_Y: &str = include_str!("../data/bandmisread3.y");
    pub const BANDMISREAD3_START: &str = include_str!("../data/bandmisread3_start.mat");
    pub const BANDMISREAD3_MARKOV: &str = include_str!("../data/bandmisread3_markov.mar");
}

/// A model with its observation, known fiber elements and move sets.
#[derive(Clone, Debug)]
pub struct Example {
    pub spec: ModelSpec,
    pub y: IntVector,
    /// Named fiber elements (`x1`, `x2`, …).
    pub solutions: Vec<IntVector>,
    pub lattice: Option<IntMoveSet>,
    pub markov: IntMoveSet,
}

fn rows(text: &str) -> Result<Vec<IntVector>> {
    Ok(fourti2::parse::<i64>(text)?.to_rows())
}

/// 3×3 table with margins `(5,3,2 | 0,4)`.
pub fn contingency() -> Result<Example> {
    let spec = build_contingency(3, 3)?;
    Ok(Example {
        y: fourti2::parse_vector(text::CONTINGENCY_Y)?,
        solutions: rows(text::CONTINGENCY_SOLUTIONS)?,
        lattice: Some(parse_moveset(text::CONTINGENCY_LATTICE, &spec.matrix)?),
        markov: parse_moveset(text::CONTINGENCY_MARKOV, &spec.matrix)?,
        spec,
    })
}

/// Two-occasion `mta` with observed `(363, 22, 174)`.
pub fn mta2() -> Result<Example> {
    let spec = build_mta(2)?;
    Ok(Example {
        y: fourti2::parse_vector(text::MTA2_Y)?,
        solutions: rows(text::MTA2_SOLUTIONS)?,
        lattice: Some(parse_moveset(text::MTA2_LATTICE, &spec.matrix)?),
        markov: parse_moveset(text::MTA2_MARKOV, &spec.matrix)?,
        spec,
    })
}

/// Four-list sufficient-statistics model.
pub fn suffstats4() -> Result<Example> {
    let spec = build_suffstats(4)?;
    Ok(Example {
        y: fourti2::parse_vector(text::SUFFSTATS4_Y)?,
        solutions: rows(text::SUFFSTATS4_SOLUTIONS)?,
        lattice: Some(parse_moveset(text::SUFFSTATS4_LATTICE, &spec.matrix)?),
        markov: parse_moveset(text::SUFFSTATS4_MARKOV, &spec.matrix)?,
        spec,
    })
}

/// Three-occasion band misreading with seven single sightings.
pub fn bandmisread3() -> Result<Example> {
    let spec = build_bandmisread(3)?;
    Ok(Example {
        y: fourti2::parse_vector(text::BANDMISREAD3_Y)?,
        solutions: vec![fourti2::parse_vector(text::BANDMISREAD3_START)?],
        lattice: None,
        markov: parse_moveset(text::BANDMISREAD3_MARKOV, &spec.matrix)?,
        spec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_solution_lies_in_its_fiber() {
        for ex in [contingency(), mta2(), suffstats4(), bandmisread3()] {
            let ex = ex.unwrap();
            for x in &ex.solutions {
                assert_eq!(ex.spec.matrix.mul_vec(x).unwrap(), ex.y);
                assert!(x.iter().all(|&v| v >= 0));
            }
        }
    }

    #[test]
    fn move_set_sizes() {
        assert_eq!(contingency().unwrap().markov.len(), 9);
        assert_eq!(mta2().unwrap().lattice.unwrap().len(), 6);
        assert_eq!(suffstats4().unwrap().markov.len(), 16);
        assert_eq!(suffstats4().unwrap().lattice.unwrap().len(), 7);
        assert_eq!(bandmisread3().unwrap().markov.len(), 63);
    }
}
