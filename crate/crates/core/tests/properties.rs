//! Randomized properties of passes, certificates and the pipeline.

use proptest::prelude::*;
use tacc_core::cert::{check_with, gen_cert, CheckOptions};
use tacc_core::harness::{
    differential_inputs, diverges, gen_random_program, mutate, pipeline, Mode, DEFAULT_FUEL,
};
use tacc_core::{run, validate, PassKind};

const PASSES: [PassKind; 5] = [PassKind::Uce, PassKind::DaeOnce, PassKind::Dae, PassKind::UceDae, PassKind::Cp];

fn pass() -> impl Strategy<Value = PassKind> {
    prop::sample::select(PASSES.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn passes_preserve_observable_behaviour(seed in any::<u64>(), size in 2usize..40, pass in pass()) {
        let p = gen_random_program(seed, size);
        let r = pass.run(&p);
        prop_assert_eq!(validate(&r.after), vec![]);
        for i in differential_inputs(&p, 12, seed) {
            prop_assert!(!diverges(&p, &r.after, &i, DEFAULT_FUEL), "{} diverges on {:?}", pass.name(), i);
        }
    }

    #[test]
    fn honest_certificates_check(seed in any::<u64>(), size in 2usize..40, pass in pass()) {
        let r = pass.run(&gen_random_program(seed, size));
        let v = check_with(&r.before, &r.after, &gen_cert(&r), CheckOptions::default());
        prop_assert!(v.is_accepted(), "{}: {}", pass.name(), v);
    }

    #[test]
    fn certified_pipeline_is_safe(seed in any::<u64>(), size in 2usize..40, passes in prop::collection::vec(pass(), 1..5)) {
        let p = gen_random_program(seed, size);
        let out = pipeline(&p, &passes, Mode::Cc);
        prop_assert!(out.all_accepted());
        for i in differential_inputs(&p, 8, seed ^ 1) {
            prop_assert!(!diverges(&p, &out.program, &i, DEFAULT_FUEL));
        }
    }

    #[test]
    fn passes_and_generators_are_deterministic(seed in any::<u64>(), size in 2usize..30, pass in pass()) {
        let p = gen_random_program(seed, size);
        prop_assert_eq!(&p, &gen_random_program(seed, size));
        let (a, b) = (pass.run(&p), pass.run(&p));
        prop_assert_eq!(&a.after, &b.after);
        prop_assert_eq!(gen_cert(&a), gen_cert(&b));
    }

    #[test]
    fn fast_path_never_changes_a_verdict(seed in any::<u64>(), size in 2usize..30, pass in pass(), mseed in any::<u64>()) {
        let r = pass.run(&gen_random_program(seed, size));
        let cert = gen_cert(&r);
        if let Some((r2, c2, m)) = mutate(&r, &cert, mseed) {
            let slow = CheckOptions { fast_path: false, ..CheckOptions::default() };
            let a = check_with(&r2.before, &r2.after, &c2, CheckOptions::default());
            let b = check_with(&r2.before, &r2.after, &c2, slow);
            prop_assert_eq!(a.is_accepted(), b.is_accepted(), "{}", m);
        }
    }
}

#[test]
fn generated_programs_mostly_halt() {
    let mut halted = 0;
    for seed in 0..1000 {
        let p = gen_random_program(seed, 20);
        let zeros = &differential_inputs(&p, 1, seed)[0];
        if run(&p, zeros, DEFAULT_FUEL).unwrap().is_halted() {
            halted += 1;
        }
    }
    assert!(halted >= 950, "only {halted} of 1000 generated programs halt");
}
