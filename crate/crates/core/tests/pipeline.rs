use dpx::corpus;
use dpx::deduction::{check_derivation, derive_dk, parse_derivation};
use dpx::extract::{extract_bm, extract_choice, extract_slash};
use dpx::horn::{id_check, validate_cut_deduction, CutDeduction};
use dpx::normalize::{default_fuel, harrop_normalize, non_id_sequents};
use dpx::oracle::ipc_valid;
use dpx::slash::{build_ida_base, soundness_violations};
use dpx::syntax::{parse_sequent, spd_enumerate, ChoiceVector};
use proptest::prelude::*;

#[test]
fn handwritten_corpus_end_to_end() {
    for e in corpus::handwritten() {
        let d = &e.derivation;
        check_derivation(d).unwrap_or_else(|err| panic!("{}: {err}", e.name));
        let text = d.to_string();
        assert_eq!(&parse_derivation(&text).unwrap(), d, "{}", e.name);

        let bm = extract_bm(d).unwrap();
        let sl = extract_slash(d).unwrap();
        assert!(bm.validate() && sl.validate(), "{}", e.name);
        assert!(ipc_valid(&bm.target, 200).unwrap().valid);

        let n = harrop_normalize(d, default_fuel(d)).unwrap();
        check_derivation(&n.derivation).unwrap();
        assert_eq!(n.derivation.conclusion(), d.conclusion());
        assert!(non_id_sequents(d, &n.derivation).is_empty(), "{}", e.name);

        let base = build_ida_base(d);
        assert!(soundness_violations(d, &base).is_empty(), "{}", e.name);
    }
}

#[test]
fn every_choice_vector_yields_a_valid_extraction() {
    for d in corpus::choice_instances(5, 6, 3) {
        let e = spd_enumerate(d.antecedent());
        for k in 0..(1u64 << e.count()) {
            let k = ChoiceVector::from_number(k, e.count());
            let dk = derive_dk(&d, &e, &k).unwrap();
            check_derivation(&dk).unwrap();
            let r = extract_choice(&d, &k).unwrap();
            assert!(r.validate());
        }
    }
}

#[test]
fn certificates_survive_text() {
    let base = ["p => q", "q, r => s", "s => t"].map(|s| parse_sequent(s).unwrap()).into_iter().collect();
    let target = parse_sequent("p, r => t").unwrap();
    let cd = id_check(&base, &target).expect("derivable by cuts");
    let back = CutDeduction::parse_certificate(&cd.to_certificate()).unwrap();
    assert!(validate_cut_deduction(&back, &base, &target));
    assert!(id_check(&base, &parse_sequent("r => t").unwrap()).is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_derivations_round_trip(seed in 0u64..1000) {
        for e in corpus::generated(seed, 2) {
            let d = e.derivation;
            prop_assert!(check_derivation(&d).is_ok());
            prop_assert_eq!(parse_derivation(&d.to_string()).unwrap(), d.clone());
            let r = extract_bm(&d).unwrap();
            prop_assert!(r.validate());
        }
    }
}
