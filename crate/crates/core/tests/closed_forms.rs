//! Closed-form outage against frozen reference values.
//!
//! The references were produced outside this crate by integrating the gamma
//! density of the aggregate interference at 30 digits and enumerating all 32
//! success patterns of the five receptions that matter to U1.

#![allow(clippy::excessive_precision)]

use approx::assert_relative_eq;
use onc_core::analytic::{outage_noncoop, outage_onc, pr_theta, SirVector};
use onc_core::ScenarioConfig;

/// (rate, SIR dB, relay-scheme outage, direct outage) at K = 7, equal SIRs.
const EQUAL_K7: [(f64, f64, f64, f64); 8] = [
    (0.5, 0.0, 0.97306680363437446, 0.91161165235168156),
    (0.5, 10.0, 0.25714032498733814, 0.24731260346215049),
    (0.5, 20.0, 0.0060857041147415155, 0.02852045375207421),
    (0.5, 30.0, 6.7530513636501728e-5, 0.0028946968596245612),
    (1.0, 0.0, 0.99930898985492923, 0.9921875),
    (1.0, 10.0, 0.63950321879574069, 0.48684188176929324),
    (1.0, 20.0, 0.036387721132581823, 0.067281945292864626),
    (1.0, 30.0, 0.00047619205904362062, 0.0069720837904610777),
];

#[test]
fn equal_sir_references() {
    for (rate, db, onc, direct) in EQUAL_K7 {
        let s = SirVector::equal_db(db, 7).unwrap();
        let got = outage_onc(rate, &s, &s, &s).unwrap().p_total;
        assert_relative_eq!(got, onc, max_relative = 1e-12);
        assert_relative_eq!(
            outage_noncoop(rate, &s).unwrap(),
            direct,
            max_relative = 1e-12
        );
    }
}

#[test]
fn per_link_reference() {
    let s = ScenarioConfig {
        k_interferers: 4,
        rate_bits: 0.75,
        sir: onc_core::SirSpec::PerLink {
            bs_rs: vec![10.0; 4],
            bs_u1: vec![5.0; 4],
            rs_u1: vec![15.0; 4],
        },
        ..ScenarioConfig::equal(4, 0.75, 0.0).unwrap()
    }
    .validated()
    .unwrap();
    let [rs, b1, r1] = s.sir_vectors().unwrap();
    let got = outage_onc(0.75, &rs, &b1, &r1).unwrap().p_total;
    assert_relative_eq!(got, 0.50447216812709177, max_relative = 1e-12);
    assert_relative_eq!(
        outage_noncoop(0.75, &b1).unwrap(),
        0.54203253254623309,
        max_relative = 1e-12
    );
}

#[test]
fn relay_state_reference() {
    let p = pr_theta(0.5, &SirVector::equal_db(10.0, 7).unwrap()).unwrap();
    assert_relative_eq!(p[0], 0.39717498678562578, max_relative = 1e-12);
    assert_relative_eq!(p[1], 0.23304321890635975, max_relative = 1e-12);
    assert_eq!(p[1], p[2]);
    assert_relative_eq!(p[3], 0.13673857540165472, max_relative = 1e-12);
}

#[test]
fn crossover_between_15_and_20_db() {
    let diff = |db: f64| {
        let s = SirVector::equal_db(db, 7).unwrap();
        outage_onc(1.0, &s, &s, &s).unwrap().p_total - outage_noncoop(1.0, &s).unwrap()
    };
    assert!(diff(15.0) > 0.0);
    assert!(diff(20.0) < 0.0);
}
