use latmn::fiber::{connectivity, enumerate_fiber, EnumerationOptions};
use latmn::fixtures;
use latmn::mass::{LatentModel, MassModel, Theta};
use latmn::sampler::{run_chain, ChainState, MoveSelection, SamplerConfig};
use latmn::summary::summarize;

#[test]
fn chains_stay_in_the_fiber_and_replay_exactly() {
    let ex = fixtures::mta2().unwrap();
    let model = LatentModel::new(ex.spec.clone(), MassModel::mta(2000)).unwrap();
    for selection in [MoveSelection::UniformRandom, MoveSelection::Cycle] {
        let mut c = SamplerConfig::new(3000, 99);
        c.selection = selection;
        c.coefficient_cap = 4;
        c.move_caps = Some(vec![5, 1, 2, 1, 1, 3]);
        c.record = vec!["N".into(), "x_01".into(), "x_02".into(), "alpha".into(), "accepted".into()];
        c.track_states = true;
        let a = run_chain(&model, &ex.markov, &c, &ex.solutions[0]).unwrap();
        for x in a.state_counts.as_ref().unwrap().keys() {
            assert_eq!(ex.spec.matrix.mul_vec(x).unwrap(), ex.y);
            assert!(x.iter().all(|&v| v >= 0));
        }
        let b = run_chain(&model, &ex.markov, &c, &ex.solutions[0]).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
    }
}

#[test]
fn lattice_basis_chain_from_x1_never_creates_misidentifications() {
    // From x1 the only usable reference lattice moves change x_00 and swap
    // between x_10 and x_20, so the 01/02 split is frozen.
    let ex = fixtures::mta2().unwrap();
    let model = LatentModel::new(ex.spec.clone(), MassModel::mta(2000)).unwrap();
    let mut c = SamplerConfig::new(5000, 4);
    c.record = vec!["x_01".into(), "x_02".into()];
    let out = run_chain(&model, ex.lattice.as_ref().unwrap(), &c, &ex.solutions[0]).unwrap();
    assert!(out.field("x_01").unwrap().iter().all(|&v| v == 363.0));
    assert!(out.field("x_02").unwrap().iter().all(|&v| v == 0.0));
}

#[test]
fn band_misreading_markov_chain_visits_whole_fiber() {
    let ex = fixtures::bandmisread3().unwrap();
    let model = LatentModel::uniform(ex.spec.clone());
    let mut c = SamplerConfig::new(200_000, 5);
    c.track_states = true;
    let out = run_chain(&model, &ex.markov, &c, &ex.solutions[0]).unwrap();
    assert_eq!(out.state_counts.unwrap().len(), 120);
}

#[test]
fn constant_field_summarizes_to_one_bin() {
    let ex = fixtures::mta2().unwrap();
    let model = LatentModel::new(ex.spec.clone(), MassModel::mta(2000)).unwrap();
    let mut c = SamplerConfig::new(200, 1);
    c.record = vec!["x_11".into()];
    let out = run_chain(&model, &ex.markov, &c, &ex.solutions[0]).unwrap();
    let s = summarize(&out, "x_11", None).unwrap();
    assert_eq!(s.bins.len(), 1);
    assert_eq!(s.bins[0].count, 200);
    assert!(summarize(&out, "N", None).is_err());
}

#[test]
fn sufficient_statistics_chain_updates_abundance() {
    let ex = fixtures::suffstats4().unwrap();
    let model = LatentModel::new(ex.spec.clone(), MassModel::mt(60_000)).unwrap();
    let mut c = SamplerConfig::new(2000, 8);
    c.burn_in = 500;
    c.record = vec!["N".into(), "x_1000".into(), "p1".into()];
    let out = run_chain(&model, &ex.markov, &c, &ex.solutions[0]).unwrap();
    let seen: i64 = ex.solutions[0].iter().sum();
    assert!(out.field("N").unwrap().iter().all(|&n| n >= seen as f64));
    assert_eq!(out.len(), 1500);
}

#[test]
fn theta_override_is_used() {
    let ex = fixtures::mta2().unwrap();
    let model = LatentModel::new(ex.spec.clone(), MassModel::mta(2000)).unwrap();
    let theta = Theta::Mta { capture: vec![0.5, 0.6], identification: 0.95 };
    let mut c = SamplerConfig::new(1, 1);
    c.initial_theta = Some(theta.clone());
    let st = ChainState::new(&model, &c, ex.solutions[0].clone()).unwrap();
    assert_eq!(st.theta, theta);
    assert_eq!(st.log_mass(), model.log_mass(&theta, &ex.solutions[0]).unwrap());
}

#[test]
fn visited_states_equal_the_start_component() {
    let ex = fixtures::mta2().unwrap();
    let a = &ex.spec.matrix;
    let basis = ex.lattice.clone().unwrap();
    let x0 = vec![0, 2, 0, 1, 1, 0, 0, 0, 1];
    let y = a.mul_vec(&x0).unwrap();
    let fiber = enumerate_fiber(a, &y, EnumerationOptions::with_bound(0)).unwrap();
    let start = fiber.position(&x0).unwrap();
    let uniform = LatentModel::uniform(ex.spec.clone());
    // The null-history move leaves the bounded fiber, so drop it.
    let moves = latmn::MoveSet::new(a, basis.moves()[1..].to_vec(), latmn::Provenance::Lattice).unwrap();
    let report = connectivity(&fiber, &moves).unwrap();
    let mut c = SamplerConfig::new(20_000, 3);
    c.track_states = true;
    let out = run_chain(&uniform, &moves, &c, &x0).unwrap();
    let expected: std::collections::BTreeSet<_> = fiber
        .elements()
        .iter()
        .enumerate()
        .filter(|&(i, _)| report.component_of[i] == report.component_of[start])
        .map(|(_, x)| x.clone())
        .collect();
    let visited: std::collections::BTreeSet<_> = out.state_counts.unwrap().into_keys().collect();
    assert_eq!(visited, expected);
}
