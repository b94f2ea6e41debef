use kobdd_core::builder::{build, decode_layers};
use kobdd_core::program::{from_json, to_json, validate_kobdd};
use kobdd_core::saf::{eval_saf, full_chain_input, trace, WitnessBuilder};
use kobdd_core::{Assignment, ExtValue, SafParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn serialized_build_evaluates_like_the_reference() {
    let params = SafParams::new(2, 4, 208).unwrap();
    let built = build(&params).unwrap();
    let restored = from_json(&to_json(&built)).unwrap();
    assert_eq!(restored, built);
    assert!(validate_kobdd(&restored).is_ok());

    let layout = params.layout();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..300 {
        let x = full_chain_input(&layout, &mut rng);
        let tr = trace(&params, &x).unwrap();
        assert_eq!(restored.evaluate(&x).unwrap(), tr.output);
        assert_eq!(decode_layers(&restored, &params, &x).unwrap(), tr.layer_values());
        assert!(tr.layer_values().iter().all(|v| !v.is_fail()));
    }
}

#[test]
fn hand_written_chain_reaches_the_expected_output() {
    // k = 2, w = 2: step 0 reads slots 0 then 2 + v, step 1 reads the carried slot then 2 + v.
    let params = SafParams::new(2, 2, 64).unwrap();
    let l = params.layout();
    let x = WitnessBuilder::new(&l)
        .block(0, 0, 0, 1) // step1(0) = 1 + 2 = 3
        .block(1, 0, 3, 1) // step2(0) = 1
        .block(2, 1, 1, 0) // step1(1) = 0 + 2 = 2
        .block(3, 1, 2, 1) // step2(1) = 1
        .finish();
    let tr = trace(&params, &x).unwrap();
    assert_eq!(tr.layer_values(), vec![ExtValue::Value(3), ExtValue::Value(1), ExtValue::Value(2), ExtValue::Value(1)]);
    assert!(tr.output);
    assert!(build(&params).unwrap().evaluate(&x).unwrap());

    // Dropping the last block leaves slot (1, 2) unclaimed.
    let y = WitnessBuilder::from_input(&l, x.clone()).address(3, 0, 1).finish();
    assert_eq!(trace(&params, &y).unwrap().steps[1].step2, ExtValue::Fail);
    assert!(!eval_saf(&params, &y).unwrap());
    assert!(!build(&params).unwrap().evaluate(&y).unwrap());
}

#[test]
fn arity_is_checked() {
    let params = SafParams::new(2, 2, 64).unwrap();
    assert!(eval_saf(&params, &Assignment::zeros(63)).is_err());
    assert!(build(&params).unwrap().evaluate(&Assignment::zeros(65)).is_err());
}
