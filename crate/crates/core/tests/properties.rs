use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stquad::decomp::{count_decompositions_dp, enumerate_decompositions};
use stquad::elements::{contains, ReferenceFrame};
use stquad::symmetry::{orbit_families, sample_params, OrbitInstance};
use stquad::ElementKind;

fn kind() -> impl Strategy<Value = ElementKind> {
    prop::sample::select(ElementKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decompositions_sum_to_target(kind in kind(), n in 1usize..160) {
        let all = enumerate_decompositions(kind, n, 1).unwrap();
        prop_assert_eq!(all.len() as u64, count_decompositions_dp(kind, n, 1));
        let fams = orbit_families(kind);
        for d in &all {
            let total: usize = d.counts.iter().map(|(&f, &c)| fams[f - 1].cardinality * c).sum();
            prop_assert_eq!(total, n);
        }
    }

    #[test]
    fn generic_orbits_have_full_size_and_stay_inside(kind in kind(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frame = ReferenceFrame::reference(kind);
        for fam in orbit_families(kind) {
            let pts = OrbitInstance::new(fam, sample_params(&fam, &mut rng)).unwrap().expand().unwrap();
            prop_assert_eq!(pts.len(), fam.cardinality);
            prop_assert!(pts.iter().all(|p| contains(frame, p, 1e-12)));
        }
    }
}
