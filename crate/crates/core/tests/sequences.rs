use stquad::polytope_seq::{
    format_removed, is_prism_over, sequence_a, sequence_b, vertex_count_profile, ZeroOnePolytope,
};

#[test]
fn four_dimensional_sequences_differ_after_the_sixth_vertex() {
    let a = sequence_a(4).unwrap();
    let b = sequence_b(4).unwrap();
    assert_eq!(a.removed[..6], b.removed[..6]);
    assert_ne!(a.removed[6], b.removed[6]);
    assert_eq!(format_removed(&a).lines().nth(6), Some("0111"));
    assert_eq!(format_removed(&b).lines().nth(6), Some("1001"));
}

#[test]
fn tetrahedral_prism_sits_at_index_eight() {
    let a = sequence_a(4).unwrap();
    assert_eq!(a.prism_index(), 8);
    assert!(is_prism_over(&a.polytopes[8], &ZeroOnePolytope::standard_simplex(3)).unwrap());
}

#[test]
fn both_sequences_end_at_the_simplex() {
    for d in 2..=6 {
        for s in [sequence_a(d).unwrap(), sequence_b(d).unwrap()] {
            let counts = vertex_count_profile(&s);
            assert_eq!(counts.first(), Some(&(1 << d)));
            assert_eq!(counts.last(), Some(&(d + 1)));
            assert!(s.polytopes.iter().all(ZeroOnePolytope::is_full_dimensional));
            assert!(s.polytopes.last().unwrap().same_vertices(&ZeroOnePolytope::standard_simplex(d)));
        }
    }
}

#[test]
fn out_of_range_dimensions_are_rejected() {
    assert!(sequence_a(0).is_err());
    assert!(sequence_b(7).is_err());
}
