//! Property-based invariants of the parsers, the state model and the nodal
//! solver.

mod common;

use proptest::prelude::*;
use rand::prelude::*;

use atomic::bundle;
use atomic::circuit_sim::solve_section_node;
use atomic::spec_io::{AlgorithmProgram, ImplyParameters};
use atomic::state_model::{calc_algorithm, calc_algorithm_scalar, VectorState};

proptest! {
    /// The algorithm parser is total: arbitrary text returns Ok or Err but
    /// never panics, for any plausible section count.
    #[test]
    fn parser_never_panics(text in ".{0,200}", sections in 1usize..4) {
        let _ = AlgorithmProgram::parse(&text, sections);
    }

    /// Resistance and state maps stay inside their domains.
    #[test]
    fn resistance_maps_are_clamped(w in 0.0f64..=1.0, r in 0.0f64..1e9) {
        let p = ImplyParameters::parse(bundle::IMPLY_PARAMETERS).unwrap();
        let resistance = p.resistance(w);
        prop_assert!(resistance >= p.r_on - 1e-9 && resistance <= p.r_off + 1e-9);
        let state = p.state_from_resistance(r);
        prop_assert!((0.0..=1.0).contains(&state));
        // the two maps are mutually inverse inside the valid band
        let roundtrip = p.state_from_resistance(p.resistance(w));
        prop_assert!((roundtrip - w).abs() < 1e-12);
    }

    /// The single-node solution always satisfies Kirchhoff's current law.
    #[test]
    fn nodal_solution_satisfies_kcl(
        branches in prop::collection::vec((-5.0f64..5.0, 1e3f64..1e7), 1..8),
        r_g in 1e3f64..1e6,
    ) {
        let v_g = solve_section_node(&branches, r_g);
        let residual = branches.iter().map(|(v, r)| (v - v_g) / r).sum::<f64>() - v_g / r_g;
        let scale = branches.iter().map(|(v, r)| (v / r).abs()).sum::<f64>().max(1e-12);
        prop_assert!((residual / scale).abs() < 1e-12);
    }
}

#[test]
fn render_parse_roundtrip_on_random_programs() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..200 {
        let program = common::random_program(&mut rng, common::MAX_DEVICES, 30);
        let text = program.render();
        let reparsed = AlgorithmProgram::parse(&text, 1).unwrap();
        assert_eq!(reparsed, program);
    }
}

#[test]
fn imply_steps_are_idempotent() {
    // Applying the same IMPLY step twice never changes the state further.
    let mut rng = StdRng::seed_from_u64(23);
    for _ in 0..100 {
        let program = common::random_program(&mut rng, common::MAX_DEVICES, 1);
        let bundle = common::synthetic_bundle(program.clone(), 3);
        let mut once = VectorState::initial(&bundle);
        once.apply_step(&program.steps[0]);
        let mut twice = once.clone();
        twice.apply_step(&program.steps[0]);
        assert_eq!(once, twice);
    }
}

#[test]
fn scalar_and_vector_models_agree_on_random_programs() {
    let mut rng = StdRng::seed_from_u64(47);
    for _ in 0..50 {
        let n_inputs = rand::Rng::gen_range(&mut rng, 1..=4);
        let program = common::random_program(&mut rng, common::MAX_DEVICES, 30);
        let bundle = common::synthetic_bundle(program, n_inputs);
        let history = calc_algorithm(&bundle);
        let final_state = history.final_state();
        for k in 0..bundle.config.n_combinations() {
            let scalar = calc_algorithm_scalar(&bundle, k);
            for (d, bit) in scalar.iter().enumerate() {
                assert_eq!(*bit, final_state.bit(d, k));
            }
        }
    }
}
