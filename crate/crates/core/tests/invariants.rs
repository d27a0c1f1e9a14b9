use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use constellation_core::corpus::{multiplicity_corpus, random_conjugate, random_presentation, random_theta};
use constellation_core::equivariant::{apply_gauge, enumerate_submodules, Exactness, GaugeElement, SamplingConfig};
use constellation_core::git::{candidate_subspaces, mu_one_step, theta_tilde};
use constellation_core::rational::q;
use constellation_core::stability::{module_theta_verdict, Status};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conjugation_keeps_submodule_hilbert_functions(seed in any::<u64>(), pick in 0usize..26) {
        let modules = multiplicity_corpus().unwrap();
        let m = &modules[pick % modules.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_conjugate(&mut rng, m).unwrap();
        let cfg = SamplingConfig::default();
        let a = enumerate_submodules(m, None, &cfg).unwrap();
        let b = enumerate_submodules(&c, None, &cfg).unwrap();
        for s in &b.submodules {
            prop_assert!(c.is_submodule(s));
        }
        prop_assert_eq!(c.hilbert_function(), m.hilbert_function());
        if let Some(theta) = random_theta(&mut rng, &m.hilbert_function()) {
            let v = module_theta_verdict(&theta, m, false, &cfg).unwrap();
            let w = module_theta_verdict(&theta, &c, false, &cfg).unwrap();
            if a.exactness == Exactness::Exact {
                prop_assert_eq!(v.status, w.status);
            } else {
                prop_assert!(v.status != Status::Stable && w.status != Status::Stable);
            }
        }
        prop_assert_eq!(a.exactness, b.exactness);
    }

    #[test]
    fn gauge_moves_weights_with_subspaces(seed in any::<u64>(), pick in 0usize..26) {
        let modules = multiplicity_corpus().unwrap();
        let m = &modules[pick % modules.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = m.hilbert_function();
        let Some(theta) = random_theta(&mut rng, &h) else { return Ok(()) };
        let Some((p, params)) = random_presentation(&mut rng, m, &theta).unwrap() else { return Ok(()) };
        prop_assert_eq!(theta_tilde(&params, &h, &h).unwrap(), q(0));
        let gamma = GaugeElement::random(&p, &mut rng);
        let moved = apply_gauge(&p, &gamma).unwrap();
        let (cands, _) = candidate_subspaces(&p, &SamplingConfig::default());
        for a in cands.iter().take(6) {
            prop_assert_eq!(
                mu_one_step(&moved, &params, &gamma.pull(a)).unwrap(),
                mu_one_step(&p, &params, a).unwrap()
            );
        }
    }
}
