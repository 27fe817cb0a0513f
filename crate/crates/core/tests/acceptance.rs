//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use slnc::lnc::GlobalCode;
use slnc::oracle::{
    han_profile, mutual_information, observation_distribution, rank_security_criterion,
    refute_key_rate, verify_security, ProbabilityTable, Verdict, VerifyOptions,
    DEFAULT_ENUMERATION_BUDGET, DEFAULT_SEARCH_BUDGET,
};
use slnc::{Matrix, Network, SecureCodeBundle};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const FIXTURES: [&str; 7] = [
    "butterfly.net",
    "combination.net",
    "diamond3.net",
    "mixed-sinks.net",
    "parallel2-gf2.net",
    "parallel3-gf2.net",
    "parallel3-gf5.net",
];

fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn fixture(name: &str) -> Network {
    Network::parse(&std::fs::read_to_string(fixture_path(name)).unwrap()).unwrap()
}

fn slnc(args: &[&str]) -> (i32, Vec<u8>) {
    let o = Command::new(env!("CARGO_BIN_EXE_slnc"))
        .args(args)
        .output()
        .expect("binary runs");
    (o.status.code().unwrap_or(-1), o.stdout)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))
}

fn butterfly_end_to_end() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bundle_path = dir.path().join("b.slnc");
    let net = fixture_path("butterfly.net");
    let (code, _) = slnc(&[
        "secure",
        net.to_str().unwrap(),
        "--omega",
        "1",
        "--r",
        "1",
        "-o",
        bundle_path.to_str().unwrap(),
    ]);
    ensure(code == 0, || format!("secure exited {code}"))?;
    let (code, out) = slnc(&["verify", bundle_path.to_str().unwrap()]);
    let report = String::from_utf8(out).unwrap();
    ensure(code == 0, || format!("verify exited {code}:\n{report}"))?;
    let set_lines: Vec<&str> = report.lines().filter(|l| l.starts_with("set ")).collect();
    ensure(set_lines.len() == 9, || {
        format!("{} sets reported", set_lines.len())
    })?;
    ensure(
        set_lines
            .iter()
            .all(|l| l.split(' ').count() == 4 && l.ends_with(" mi=0.000000000 pass")),
        || format!("nonzero leakage:\n{report}"),
    )?;

    let bundle = SecureCodeBundle::parse(&std::fs::read_to_string(&bundle_path).unwrap())
        .map_err(|e| e.to_string())?;
    let rep = verify_security(&bundle, VerifyOptions::default()).map_err(|e| e.to_string())?;
    ensure(rep.results.iter().all(|r| r.mi == 0.0), || {
        "MI not exactly zero".into()
    })?;
    let mut decoded = 0;
    for m in 0..3 {
        for k in 0..3 {
            let y = bundle.encode(&[m], &[k]).map_err(|e| e.to_string())?;
            for t in ["t1", "t2"] {
                let sink = bundle.network().sink_index(t).unwrap();
                let obs: Vec<u32> = bundle
                    .network()
                    .in_edges(sink)
                    .iter()
                    .map(|&e| y[e])
                    .collect();
                let got = bundle.decode_at_sink(t, &obs).map_err(|e| e.to_string())?;
                ensure(got == (vec![m], vec![k]), || {
                    format!("{t} decoded {got:?} for ({m},{k})")
                })?;
                decoded += 1;
            }
        }
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!(
        "9 singleton sets at MI 0, {decoded} sink decodings, {:.2?}",
        start.elapsed()
    ))
}

fn padding_regime() -> Outcome {
    let start = Instant::now();
    let net = fixture("parallel3-gf5.net");
    let mut keys = Vec::new();
    for omega in [1, 2] {
        let b = SecureCodeBundle::build(&net, omega, 1, 0).map_err(|e| e.to_string())?;
        let rep = verify_security(&b, VerifyOptions::default()).map_err(|e| e.to_string())?;
        ensure(rep.pass && rep.max_mi == 0.0, || {
            format!("omega={omega}:\n{}", rep.to_text())
        })?;
        ensure(b.key_dim() == 1, || {
            format!("omega={omega} uses key_dim {}", b.key_dim())
        })?;
        keys.push(b.key_dim());
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!(
        "key_dim {keys:?} for omega 1 and 2, {:.2?}",
        start.elapsed()
    ))
}

/// Number of linear codes of dimension `d` on `net`, counted from the topology.
fn code_space_size(net: &Network, d: usize) -> u64 {
    let coeffs: usize = net
        .edges()
        .iter()
        .map(|e| {
            if e.tail == net.source() {
                d
            } else {
                net.in_edges(e.tail).len()
            }
        })
        .sum();
    (net.field().order() as u64).pow(coeffs as u32)
}

fn converse() -> Outcome {
    let mut notes = Vec::new();
    for (name, omega) in [
        ("parallel2-gf2.net", 1),
        ("parallel3-gf2.net", 1),
        ("parallel3-gf2.net", 2),
    ] {
        let start = Instant::now();
        let net = fixture(name);
        let res = refute_key_rate(&net, omega, 1, 0, DEFAULT_SEARCH_BUDGET, None)
            .map_err(|e| format!("{name}: {e}"))?;
        let total = code_space_size(&net, omega);
        ensure(res.verdict == Verdict::Refuted, || {
            format!("{name} omega={omega}: counterexample found")
        })?;
        ensure(res.searched == total, || {
            format!("{name} omega={omega}: searched {} of {total}", res.searched)
        })?;
        within(start, Duration::from_secs(10))?;
        notes.push(format!("{name} omega={omega}: {total}"));
    }
    Ok(format!("refuted exhaustively ({})", notes.join(", ")))
}

fn wiretap_containment() -> Outcome {
    let start = Instant::now();
    let net = fixture("butterfly.net");
    let code = GlobalCode::construct(&net, net.c_min()).map_err(|e| e.to_string())?;
    let rep = code.verify_subset_bound(1).map_err(|e| e.to_string())?;
    ensure(
        (rep.subset, rep.code_sets, rep.cut_sets, rep.all_sets) == (true, 9, 9, 9),
        || format!("butterfly r=1: {rep:?}"),
    )?;
    let mut checked = 0;
    for name in FIXTURES {
        let net = fixture(name);
        for r in 1..=2 {
            let code = GlobalCode::construct(&net, net.c_min()).map_err(|e| e.to_string())?;
            let rep = code
                .verify_subset_bound(r)
                .map_err(|e| format!("{name} r={r}: {e}"))?;
            ensure(rep.subset, || format!("{name} r={r}: {rep:?}"))?;
            ensure(
                rep.code_sets <= rep.cut_sets && rep.cut_sets as u128 <= rep.all_sets,
                || format!("{name} r={r}: {rep:?}"),
            )?;
            checked += 1;
        }
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!(
        "butterfly (9, 9, 9); subset holds for {checked} code/r pairs"
    ))
}

fn imperfect() -> Outcome {
    let start = Instant::now();
    let net = fixture("parallel3-gf5.net");
    let b = SecureCodeBundle::build(&net, 2, 2, 1).map_err(|e| format!("i=1: {e}"))?;
    ensure(b.key_dim() == 1, || format!("i=1 key_dim {}", b.key_dim()))?;
    let rep = verify_security(&b, VerifyOptions::default()).map_err(|e| e.to_string())?;
    ensure(rep.max_mi <= 1.0 + 1e-9 && rep.pass, || {
        format!("i=1:\n{}", rep.to_text())
    })?;
    let leak = rep.max_mi;

    let perfect = || -> Result<(), String> {
        let b = SecureCodeBundle::build(&net, 2, 2, 0).map_err(|e| e.to_string())?;
        ensure(b.key_dim() == 2, || format!("key_dim {}", b.key_dim()))?;
        let rep = verify_security(&b, VerifyOptions::default()).map_err(|e| e.to_string())?;
        ensure(rep.max_mi == 0.0 && rep.pass, || rep.to_text())
    };
    perfect().map_err(|e| format!("i=1 ok (key_dim 1, max MI {leak:.9}); i=0: {e}"))?;
    within(start, Duration::from_secs(5))?;
    Ok(format!("i=1 max MI {leak:.9}; i=0 max MI 0"))
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

fn oracle_cross_validation() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let (mut bundles, mut sets, mut hidden) = (0, 0, 0);
    while bundles < 120 {
        let name = FIXTURES[bundles % FIXTURES.len()];
        let net = fixture(name);
        let n = net.c_min();
        let r = rng.gen_range(1..n.max(2)).min(n - 1).max(1);
        let i = rng.gen_range(0..=r);
        let key = r - i;
        if key + 1 > n {
            continue;
        }
        let omega = rng.gen_range(1..=n - key);
        let code = GlobalCode::construct(&net, n).map_err(|e| e.to_string())?;
        let q = random_invertible(&mut rng, &net, n);
        let bundle = SecureCodeBundle::new(code, q, omega, r, i).map_err(|e| e.to_string())?;
        for size in 1..=r {
            for set in (0..net.num_edges()).combinations(size) {
                let ids: Vec<String> = set.iter().map(|&e| net.edge(e).id.clone()).collect();
                let dist = observation_distribution(&bundle, &ids, DEFAULT_ENUMERATION_BUDGET)
                    .map_err(|e| e.to_string())?;
                let by_enumeration = dist.is_independent();
                let by_rank = rank_security_criterion(&bundle, &ids).map_err(|e| e.to_string())?;
                let mi_zero = mutual_information(&dist) == 0.0;
                ensure(by_enumeration == by_rank && mi_zero == by_rank, || {
                    format!("{name} omega={omega} r={r} i={i} {ids:?}: enumeration {by_enumeration}, rank {by_rank}")
                })?;
                sets += 1;
                hidden += by_rank as usize;
            }
        }
        bundles += 1;
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "{bundles} bundles, {sets} wiretap sets agree ({hidden} secure), {:.2?}",
        start.elapsed()
    ))
}

fn han_monotone() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    for trial in 0..10_000 {
        let n = rng.gen_range(1..=4usize);
        let alphabet = rng.gen_range(2..=3u32);
        let outcomes = (alphabet as usize).pow(n as u32);
        let weights: Vec<f64> = (0..outcomes)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    0.0
                } else {
                    rng.gen::<f64>()
                }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        if total == 0.0 {
            continue;
        }
        let rows = (0..outcomes)
            .map(|idx| {
                let x = (0..n)
                    .map(|j| (idx / (alphabet as usize).pow(j as u32)) as u32 % alphabet)
                    .collect();
                (x, weights[idx] / total)
            })
            .collect();
        let table = ProbabilityTable::new(rows).map_err(|e| format!("trial {trial}: {e}"))?;
        let h = han_profile(&table, 2.0).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure(h.windows(2).all(|w| w[1] >= w[0] - 1e-9), || {
            format!("trial {trial}: {h:?}")
        })?;
    }
    let independent = ProbabilityTable::parse("0 0 0.25\n0 1 0.25\n1 0 0.25\n1 1 0.25\n").unwrap();
    let identical = ProbabilityTable::parse("0 0 0.5\n1 1 0.5\n").unwrap();
    let a = han_profile(&independent, 2.0).map_err(|e| e.to_string())?;
    let b = han_profile(&identical, 2.0).map_err(|e| e.to_string())?;
    ensure(a == [2.0, 2.0] && b == [0.0, 1.0], || {
        format!("examples gave {a:?} and {b:?}")
    })?;
    Ok("10000 random profiles nondecreasing; examples (2, 2) and (0, 1)".into())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for name in FIXTURES {
        let net = fixture_path(name);
        let net = net.to_str().unwrap();
        let mut outputs: Vec<Vec<Vec<u8>>> = Vec::new();
        for run in 0..2 {
            let code = dir.path().join(format!("{name}.{run}.code"));
            let bundle = dir.path().join(format!("{name}.{run}.slnc"));
            let (c1, _) = slnc(&["construct", net, "-o", code.to_str().unwrap()]);
            let (c2, _) = slnc(&[
                "secure",
                net,
                "--omega",
                "1",
                "--r",
                "1",
                "-o",
                bundle.to_str().unwrap(),
            ]);
            let (c3, sim) = slnc(&[
                "simulate",
                bundle.to_str().unwrap(),
                "--message",
                "1",
                "--seed",
                "42",
            ]);
            ensure(c1 == 0 && c2 == 0 && c3 == 0, || {
                format!("{name}: exit codes {c1} {c2} {c3}")
            })?;
            outputs.push(vec![
                std::fs::read(&code).unwrap(),
                std::fs::read(&bundle).unwrap(),
                sim,
            ]);
        }
        ensure(outputs[0] == outputs[1], || {
            format!("{name}: outputs differ between runs")
        })?;
        files += 3;
    }
    Ok(format!("{files} outputs byte-identical across two runs"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("butterfly end-to-end", butterfly_end_to_end),
        ("padding regime", padding_regime),
        ("converse by exhaustive refutation", converse),
        ("wiretap collection containment", wiretap_containment),
        ("imperfect security", imperfect),
        ("oracle cross-validation", oracle_cross_validation),
        ("entropy profile monotonicity", han_monotone),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (idx, (title, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}. {title}: {detail}", idx + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {title}: {why}", idx + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
