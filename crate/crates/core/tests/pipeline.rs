use cnflift::brute::is_satisfiable;
use cnflift::cp::{check_cpk, cp_php_refutation, cpk_rank, lift_cp_refutation, CpProof};
use cnflift::generate::{gen_bipartite, gen_php, gen_random_tcnf};
use cnflift::lifting::{
    lift_gap_mode, lift_parity, lift_tensor, parse_sidecar, write_sidecar, ParityParams,
    TensorParams,
};
use cnflift::resolution::{check_resolution, lift_refutation_tensor, proof_rank, ResolutionProof};
use cnflift::search::{optimal_tree, DepthProblem};
use cnflift::{parse_dimacs, write_dimacs};
use proptest::prelude::*;

#[test]
fn lifted_formula_survives_serialization() {
    let base = gen_php(&gen_bipartite(4, 2, 3).unwrap()).unwrap();
    for lifted in [
        lift_tensor(&base, TensorParams::new(2, 2).unwrap()).unwrap(),
        lift_parity(&base, ParityParams::new(1, 2).unwrap()).unwrap(),
        lift_gap_mode(&base).unwrap(),
    ] {
        let text = write_dimacs(lifted.formula());
        assert_eq!(&parse_dimacs(&text).unwrap(), lifted.formula());
        let tags = parse_sidecar(&write_sidecar(lifted.provenance())).unwrap();
        assert_eq!(tags.as_slice(), lifted.provenance());
        for (tag, clause) in tags.iter().zip(lifted.formula().clauses()) {
            assert_eq!(&lifted.clause_from_provenance(tag), clause);
        }
    }
}

#[test]
fn proofs_survive_text_round_trip() {
    let base = gen_php(&cnflift::BipartiteGraph::complete(3)).unwrap();
    let (_, tree) = optimal_tree(DepthProblem::Search(&base)).unwrap();
    let lifted = lift_tensor(&base, TensorParams::new(1, 2).unwrap()).unwrap();
    let res = lift_refutation_tensor(&tree, &lifted).unwrap();
    let parsed = ResolutionProof::parse_text(&res.to_text()).unwrap();
    assert_eq!(check_resolution(lifted.formula(), &parsed), Ok(()));
    assert_eq!(proof_rank(&parsed), proof_rank(&res));

    let (f, cp) = cp_php_refutation(&cnflift::BipartiteGraph::complete(3)).unwrap();
    let out = lift_cp_refutation(&f, &cp, &lifted).unwrap();
    let parsed = CpProof::parse_text(&out.proof.to_text()).unwrap();
    assert_eq!(parsed, out.proof);
    assert_eq!(check_cpk(lifted.formula(), &parsed), Ok(()));
    assert_eq!(cpk_rank(&parsed), cpk_rank(&out.proof));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lifts_preserve_satisfiability(t in 1u32..=3, n in 3u32..=4, m in 2usize..=12, seed in 0u64..1000) {
        let base = gen_random_tcnf(t, n, m, seed).unwrap();
        let sat = is_satisfiable(&base);
        let tensor = lift_tensor(&base, TensorParams::new(1, 2).unwrap()).unwrap();
        prop_assert_eq!(is_satisfiable(tensor.formula()), sat);
        let parity = lift_parity(&base, ParityParams::new(1, 1).unwrap()).unwrap();
        prop_assert_eq!(is_satisfiable(parity.formula()), sat);
        let gap = lift_gap_mode(&base).unwrap();
        prop_assert_eq!(is_satisfiable(gap.formula()), sat);
    }
}
