use afftool_core::centralizer::{centralizer_verdict, Narrative};
use afftool_core::fixtures::{cat_map, example_one, example_two, irrational_rotation};
use afftool_core::forge::{build_witness, commutes_exactly, rationalize_base, CaseChoice};
use afftool_core::structure::{base_period, split_cyclotomic_base, BasePeriod};
use afftool_core::verify::{affine_evaluator, commutation_residual, GridSpec, PASS_THRESHOLD};
use afftool_core::{classify, AffineToralMap, HierarchyTag, Rat, SymbolContext, SystemDescriptor};

#[test]
fn fixtures_classify() {
    let tags: Vec<_> = [example_one(), example_two(), cat_map()]
        .iter()
        .map(|f| classify(f).unwrap().tag)
        .collect();
    assert_eq!(tags, [HierarchyTag::NonErgodic, HierarchyTag::NonErgodic, HierarchyTag::K]);
    let r = irrational_rotation();
    let ctx = SymbolContext::new().with("alpha", 0.5f64.sqrt()).unwrap();
    let rot = AffineToralMap::with_context(r.linear().clone(), r.translation().to_vec(), ctx).unwrap();
    assert_eq!(classify(&rot).unwrap().tag, HierarchyTag::ErgodicNotWeaklyMixing);
}

#[test]
fn fibrations_of_the_examples() {
    for f in [example_one(), example_two()] {
        let fib = split_cyclotomic_base(&f).unwrap();
        assert_eq!((fib.base_dim, fib.fiber_dim), (1, 2));
        assert_eq!(base_period(&fib), BasePeriod::Periodic(2));
    }
}

#[test]
fn witnesses_commute_with_the_perturbed_map() {
    for f in [example_one(), example_two()] {
        assert_eq!(centralizer_verdict(&f).unwrap().narrative, Narrative::NonLie);
        let fib = split_cyclotomic_base(&f).unwrap();
        let p = rationalize_base(&f, &fib, &Rat::new(1.into(), 100.into())).unwrap();
        let w = build_witness(&p, CaseChoice::Auto).unwrap();
        let h = w.sample_member().unwrap();
        assert!(commutes_exactly(&p.perturbed, &h).unwrap());
        let num = h.numeric(p.perturbed.context()).unwrap();
        let res = commutation_residual(
            affine_evaluator(&p.perturbed).unwrap(),
            |x| num.eval(x),
            &GridSpec::new(3, 16, 1).unwrap(),
        );
        assert!(res.passes(PASS_THRESHOLD), "{}", res.max);
    }
}

#[test]
fn descriptor_drives_the_same_verdict() {
    let d = SystemDescriptor::parse(
        r#"{"n": 3, "matrix": [[1,0,0],[1,2,1],[0,1,1]], "translation": [{"rational": "1/2"}, {"rational": "0"}, {"rational": "0"}]}"#,
    )
    .unwrap();
    assert_eq!(classify(&d.map).unwrap().tag, HierarchyTag::NonErgodic);
    let again = SystemDescriptor::parse(&d.to_canonical_string()).unwrap();
    assert_eq!(again.to_canonical_string(), d.to_canonical_string());
}
