use num_bigint::BigUint;
use proptest::prelude::*;

use portrait_growth::algebra::PortraitStore;
use portrait_growth::asymptotics::{certify_double_exponential, gamma_certificate, grigorchuk_bounds, BoundsKind};
use portrait_growth::catalog::{apollonian, ggs, grigorchuk, validate_contraction, GgsVector};
use portrait_growth::families::{apollonian_growth, ggs_growth, grigorchuk_growth};
use portrait_growth::portrait::build_portrait;
use portrait_growth::quotient::LevelActions;
use portrait_growth::series::GrowthSeries;
use portrait_growth::word::{Letter, Word};
use portrait_growth::{inverse_word, GroupSpec};

fn groups() -> Vec<GroupSpec> {
    vec![grigorchuk(), ggs(&GgsVector::new(3, vec![1, 2]).unwrap()), apollonian()]
}

fn word_strategy(gens: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..gens, any::<bool>()), 0..10)
        .prop_map(|v| Word(v.into_iter().map(|(g, inv)| Letter::new(g, inv)).collect()))
}

fn case() -> impl Strategy<Value = (usize, Word, Word, usize)> {
    (0usize..3).prop_flat_map(|k| {
        let gens = groups()[k].generators().len();
        let d = groups()[k].degree();
        (Just(k), word_strategy(gens), word_strategy(gens), 0..d)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1500))]

    #[test]
    fn sections_of_products((k, g, h, u) in case()) {
        let spec = &groups()[k];
        let (pg, sg) = spec.decompose(&g).unwrap();
        let (ph, sh) = spec.decompose(&h).unwrap();
        let (pgh, sgh) = spec.decompose(&g.concat(&h)).unwrap();
        prop_assert_eq!(pgh, pg.then(&ph));
        prop_assert!(spec.are_equal(&sgh[u], &sg[u].concat(&sh[pg.apply(u)])).unwrap());
    }

    #[test]
    fn inverses_cancel((k, g, _h, _u) in case()) {
        let spec = &groups()[k];
        prop_assert!(spec.is_trivial(&g.concat(&inverse_word(&g))).unwrap());
        prop_assert!(spec.is_trivial(&inverse_word(&g).concat(&g)).unwrap());
        let mut store = PortraitStore::new(spec).unwrap();
        let x = store.intern(&build_portrait(spec, &g, 64).unwrap());
        let y = store.inverse(x);
        prop_assert_eq!(store.mul(x, y), store.leaf(spec.identity_index()));
    }

    #[test]
    fn portraits_reconstruct_actions((k, g, h, _u) in case()) {
        let spec = &groups()[k];
        let w = g.concat(&h);
        let p = build_portrait(spec, &w, 64).unwrap();
        let level = (p.depth() + 2).min(if spec.degree() == 2 { 8 } else { 5 });
        let acts = LevelActions::new(spec, level);
        prop_assert_eq!(acts.portrait(&p, level), acts.word(&w));
        let mut store = PortraitStore::new(spec).unwrap();
        let x = store.intern(&build_portrait(spec, &g, 64).unwrap());
        let y = store.intern(&build_portrait(spec, &h, 64).unwrap());
        let z = store.mul(x, y);
        prop_assert_eq!(store.portrait(z), p);
    }

    #[test]
    fn equal_words_share_portraits((k, g, h, _u) in case()) {
        let spec = &groups()[k];
        let a = g.concat(&h).concat(&inverse_word(&h));
        prop_assert_eq!(build_portrait(spec, &a, 64).unwrap(), build_portrait(spec, &g, 64).unwrap());
    }
}

#[test]
fn catalog_nuclei_are_closed() {
    for spec in groups() {
        let report = validate_contraction(&spec, 3).unwrap();
        assert!(report.is_valid(), "{}", spec.name());
    }
}

fn check_nesting(s: &GrowthSeries, d: u32) {
    let c = certify_double_exponential(s, d, None).unwrap();
    assert!(c.nested, "{}", s.group);
    assert!(c.all_verified(), "{}", s.group);
    for w in c.terms.windows(2) {
        assert!(w[1].error.upper() < w[0].error.upper());
    }
}

#[test]
fn certificates_nest() {
    check_nesting(&grigorchuk_growth(9), 2);
    check_nesting(&apollonian_growth(5).unwrap(), 3);
    check_nesting(&ggs_growth(&GgsVector::new(5, vec![1, 0, 0, 0]).unwrap(), 4).unwrap(), 5);
}

#[test]
fn certificate_exports_round_trip_through_json() {
    let (a, b) = grigorchuk_bounds();
    let c = gamma_certificate(&grigorchuk_growth(6), 2, &a, &b, BoundsKind::Proven, None).unwrap();
    let v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
    assert_eq!(v["terms"].as_array().unwrap().len(), 7);
    assert_eq!(v["all_verified"], true);
    let csv = c.to_csv();
    assert_eq!(csv.lines().count(), 8);
}

#[test]
fn series_json_round_trip() {
    let s = grigorchuk_growth(5);
    assert_eq!(GrowthSeries::from_json(&s.to_json()).unwrap(), s);
    assert_eq!(s.totals[0], BigUint::from(5u32));
}
