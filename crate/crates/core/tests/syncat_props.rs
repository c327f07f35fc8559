mod common;

use geologic::category::{validate_category, Arr};
use geologic::proof::SearchBudget;
use geologic::semantics::DEFAULT_CEILING;
use geologic::syncat::{
    build_syntactic_category, compose, equivalent, identity, is_functional, jt_covers, EquivalenceRegime,
    FormulaInContext, FunctionalRelation, Judge, SyncatError, SyncatOptions, Tri,
};
use geologic::syntax::{Formula, Theory};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{theories, theory, Gen};

const SEMANTIC: EquivalenceRegime = EquivalenceRegime::Semantic { max_size: 2 };

fn relation_formula(r: &FunctionalRelation) -> FormulaInContext {
    FormulaInContext::new(r.joint_context().unwrap(), r.sigma.clone())
}

/// `σ ∧ φ` names the same relation as `σ`, since `σ ⊢ φ`.
fn padded(r: &FunctionalRelation) -> FunctionalRelation {
    FunctionalRelation { sigma: Formula::And(vec![r.sigma.clone(), r.source.formula.clone()]), ..r.clone() }
}

#[test]
fn corpus_categories_satisfy_the_laws() {
    for (name, t) in theories() {
        if !t.axioms.iter().all(|a| a.is_geometric()) {
            continue;
        }
        for (depth, context_len) in [(1, 1), (1, 2), (2, 1)] {
            let opts = SyncatOptions { depth, context_len, ..Default::default() };
            match build_syntactic_category(&t, opts, SEMANTIC) {
                Ok(sc) => assert!(validate_category(&sc.category).is_empty(), "{name} {depth} {context_len}"),
                // too many candidates for the ceiling is an honest refusal, not a law failure
                Err(SyncatError::Semantics(e)) => println!("{name} {depth} {context_len}: skipped, {e}"),
                Err(e) => panic!("{name}: {e}"),
            }
        }
    }
}

#[test]
fn composition_respects_equivalent_representatives() {
    for name in ["serial", "subset", "pointed", "dichotomy"] {
        let t = theory(name);
        let sc = build_syntactic_category(&t, SyncatOptions::default(), SEMANTIC).unwrap();
        let judge = Judge::new(&t, SEMANTIC, DEFAULT_CEILING).unwrap();
        let c = &sc.category;
        for f in c.arrows() {
            for g in c.arrows_from(c.cod(f)) {
                let table = sc.relation(c.comp(g, f).unwrap().0);
                let (rf, rg) = (sc.relation(f.0), sc.relation(g.0));
                for (a, b) in [(rf.clone(), rg.clone()), (padded(&rf), rg.clone()), (rf.clone(), padded(&rg))] {
                    let composite = compose(&judge, &a, &b).unwrap();
                    assert_eq!(
                        equivalent(&judge, &relation_formula(&composite), &relation_formula(&table)).unwrap(),
                        Tri::Yes,
                        "{name}: {} then {}",
                        sc.arrows[f.0].name,
                        sc.arrows[g.0].name
                    );
                }
            }
        }
    }
}

#[test]
fn covers_ignore_choice_of_representative() {
    for name in ["serial", "subset", "dichotomy"] {
        let t = theory(name);
        let sc = build_syntactic_category(&t, SyncatOptions::default(), SEMANTIC).unwrap();
        let judge = Judge::new(&t, SEMANTIC, DEFAULT_CEILING).unwrap();
        let c = &sc.category;
        for target in c.objects() {
            let into: Vec<Arr> = c.arrows_into(target).into_iter().filter(|&a| c.dom(a) != target).collect();
            let fam: Vec<FunctionalRelation> = into.iter().map(|a| sc.relation(a.0)).collect();
            let alt: Vec<FunctionalRelation> = fam.iter().map(padded).collect();
            let goal = sc.classes[target.0].fic();
            assert_eq!(jt_covers(&judge, &fam, &goal).unwrap(), jt_covers(&judge, &alt, &goal).unwrap(), "{name}");
            for r in &fam {
                assert_eq!(is_functional(&judge, r).unwrap(), Tri::Yes);
            }
        }
        for class in &sc.classes {
            let a = class.fic();
            assert_eq!(jt_covers(&judge, &[identity(&a)], &a).unwrap(), Tri::Yes);
            assert_eq!(jt_covers(&judge, &[padded(&identity(&a))], &a).unwrap(), Tri::Yes);
        }
    }
}

#[test]
fn proof_regime_arrows_are_semantic_arrows() {
    let t = theory("serial");
    let budget = SearchBudget::new(6, 1, 20_000).unwrap();
    let proof = build_syntactic_category(&t, SyncatOptions::default(), EquivalenceRegime::Proof { budget }).unwrap();
    let judge = Judge::new(&t, SEMANTIC, DEFAULT_CEILING).unwrap();
    assert!(validate_category(&proof.category).is_empty());
    for a in 0..proof.arrows.len() {
        assert_eq!(is_functional(&judge, &proof.relation(a)).unwrap(), Tri::Yes);
    }
}

fn geometric(t: &Theory) -> bool {
    t.axioms.iter().all(|a| a.is_geometric())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn proof_yes_implies_semantic_yes(seed in any::<u64>()) {
        let all: Vec<(String, Theory)> = theories().into_iter().filter(|(_, t)| geometric(t)).collect();
        let (name, t) = &all[(seed % all.len() as u64) as usize];
        let budget = SearchBudget::new(6, 1, 5_000).unwrap();
        let proof = Judge::new(t, EquivalenceRegime::Proof { budget }, DEFAULT_CEILING).unwrap();
        let semantic = Judge::new(t, SEMANTIC, DEFAULT_CEILING).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = Gen::new(&t.signature, &mut rng, false);
        let ctx = g.context(2);
        let s = g.sequent(&ctx, 2);
        if proof.entails(&s).unwrap() == Tri::Yes {
            prop_assert_eq!(semantic.entails(&s).unwrap(), Tri::Yes, "{}: {}", name, s);
        }
        prop_assert_ne!(proof.entails(&s).unwrap(), Tri::No);
    }
}
