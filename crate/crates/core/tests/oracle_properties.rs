use itertools::Itertools;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use slnc::lnc::GlobalCode;
use slnc::oracle::{
    mutual_information, observation_distribution, rank_security_criterion, refute_key_rate,
    verify_security, OracleError, Verdict, VerifyOptions, DEFAULT_ENUMERATION_BUDGET,
};
use slnc::{Matrix, Network, SecureCodeBundle};

fn fixture(name: &str) -> Network {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    Network::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn random_invertible(rng: &mut StdRng, net: &Network, n: usize) -> Matrix {
    let q = net.field().order();
    loop {
        let rows: Vec<Vec<u32>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(0..q)).collect())
            .collect();
        let m = Matrix::from_rows(net.field(), &rows).unwrap();
        if m.rank() == n {
            return m;
        }
    }
}

fn ids(net: &Network, set: &[usize]) -> Vec<String> {
    set.iter().map(|&e| net.edge(e).id.clone()).collect()
}

#[test]
fn leakage_grows_with_the_observed_set() {
    let mut rng = StdRng::seed_from_u64(11);
    for name in ["parallel3-gf5.net", "diamond3.net", "butterfly.net"] {
        let net = fixture(name);
        let n = net.c_min();
        let code = GlobalCode::construct(&net, n).unwrap();
        let bundle =
            SecureCodeBundle::new(code, random_invertible(&mut rng, &net, n), 1, 1, 0).unwrap();
        let mi = |set: &[String]| {
            mutual_information(
                &observation_distribution(&bundle, set, DEFAULT_ENUMERATION_BUDGET).unwrap(),
            )
        };
        for pair in (0..net.num_edges()).combinations(2) {
            let both = mi(&ids(&net, &pair));
            for &e in &pair {
                let one = mi(&ids(&net, &[e]));
                assert!(one <= both + 1e-12, "{name}: {pair:?}");
            }
            assert!((0.0..=1.0 + 1e-12).contains(&both));
        }
    }
}

#[test]
fn whole_network_reveals_the_message() {
    let b = SecureCodeBundle::build(&fixture("parallel3-gf5.net"), 2, 1, 0).unwrap();
    let d = observation_distribution(&b, &["e1", "e2", "e3"], DEFAULT_ENUMERATION_BUDGET).unwrap();
    assert!((mutual_information(&d) - 2.0).abs() < 1e-12);
}

#[test]
fn criterion_matches_enumeration_with_imperfect_layouts() {
    let mut rng = StdRng::seed_from_u64(5);
    let net = fixture("parallel3-gf5.net");
    for _ in 0..20 {
        let code = GlobalCode::construct(&net, 3).unwrap();
        let bundle =
            SecureCodeBundle::new(code, random_invertible(&mut rng, &net, 3), 2, 2, 1).unwrap();
        for size in 1..=2 {
            for set in (0..3).combinations(size) {
                let set = ids(&net, &set);
                let d =
                    observation_distribution(&bundle, &set, DEFAULT_ENUMERATION_BUDGET).unwrap();
                assert_eq!(
                    d.is_independent(),
                    rank_security_criterion(&bundle, &set).unwrap()
                );
            }
        }
    }
}

#[test]
fn optimal_key_cannot_be_shortened() {
    // For every fixture and parameter choice the encoder accepts, one key
    // symbol fewer admits no secure decodable linear code.
    let mut checked = 0;
    for name in [
        "parallel2-gf2.net",
        "parallel3-gf2.net",
        "parallel3-gf5.net",
        "butterfly.net",
        "combination.net",
    ] {
        let net = fixture(name);
        for omega in 1..=2 {
            for r in 1..=2 {
                let Ok(bundle) = SecureCodeBundle::build(&net, omega, r, 0) else {
                    continue;
                };
                assert!(
                    verify_security(&bundle, VerifyOptions::default())
                        .unwrap()
                        .pass
                );
                match refute_key_rate(&net, omega, r, r - 1, 2_000_000, None) {
                    Ok(res) => {
                        assert_eq!(res.verdict, Verdict::Refuted, "{name} omega={omega} r={r}");
                        checked += 1;
                    }
                    Err(OracleError::BudgetExceeded { .. }) => {}
                    Err(e) => panic!("{name}: {e}"),
                }
            }
        }
    }
    assert!(checked >= 5, "only {checked} cases fit the budget");
}

#[test]
fn imperfect_bundles_stay_within_their_allowance() {
    for (name, omega, r, i) in [
        ("parallel3-gf5.net", 2, 2, 1),
        ("parallel3-gf5.net", 1, 2, 1),
        ("diamond3.net", 2, 2, 1),
        ("diamond3.net", 1, 2, 1),
        ("combination.net", 1, 1, 1),
    ] {
        let b = SecureCodeBundle::build(&fixture(name), omega, r, i).unwrap();
        assert_eq!(b.key_dim(), r - i);
        let rep = verify_security(&b, VerifyOptions::default()).unwrap();
        assert!(rep.pass, "{name} {omega} {r} {i}: {}", rep.to_text());
        assert!(rep.max_mi <= i as f64 + 1e-9);
    }
}
