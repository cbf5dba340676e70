//! Acceptance run: one PASS/FAIL line per criterion, all comparisons exact.

use std::io::Write;
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use lenscalc::checker::check_certificate;
use lenscalc::genus::{bounds_certificate, level_lower_bound, meyer_exact};
use lenscalc::lensring::{make_ring, pullback, Generator, LensRing};
use lenscalc::membership::{verify_ideal_prop, BackendChoice, ProofOptions};
use lenscalc::ringcert::{factors_certificate, info_certificate, power_certificate};
use lenscalc::{Certificate, Verdict};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn(&mut Run) -> Outcome);

fn lenscalc(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_lenscalc"))
        .args(args)
        .env_remove("LENSCALC_BUDGET_BITS")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

/// Certificates from a `--json` run: one object or an array of them.
fn parse_certs(stdout: &[u8]) -> Result<Vec<Certificate>, String> {
    let v: Value = serde_json::from_slice(stdout).map_err(|e| format!("bad JSON: {e}"))?;
    let items = match v {
        Value::Array(items) => items,
        single => vec![single],
    };
    items.into_iter().map(|c| serde_json::from_value(c).map_err(|e| e.to_string())).collect()
}

fn pow(p: u64, e: u32) -> u64 {
    p.pow(e)
}

struct Run {
    certs: Vec<Certificate>,
}

impl Run {
    fn criterion1(&mut self) -> Outcome {
        let (mut verified, mut unknown) = (0, 0);
        for p in [2u64, 3, 5] {
            for k in 2..=4u32 {
                for l in 1..k {
                    for m in 1..=pow(p, l) {
                        for n in 1..=32usize {
                            let c = verify_ideal_prop(p, k, l, m, n, &ProofOptions::default())
                                .map_err(|e| e.to_string())?;
                            let h1 = m < pow(p, l);
                            let h2 = m * pow(p, k - l) < n as u64;
                            let tuple = format!("(p,k,l,m,n)=({p},{k},{l},{m},{n})");
                            if h1 && h2 {
                                if c.verdict != Verdict::Verified {
                                    return Err(format!("{tuple}: {:?}", c.verdict));
                                }
                                verified += 1;
                            } else {
                                let named: Vec<&str> = c.witness["violated"]
                                    .as_array()
                                    .map(|v| v.iter().filter_map(|h| h["name"].as_str()).collect())
                                    .unwrap_or_default();
                                let mut expected = Vec::new();
                                if !h1 {
                                    expected.push("m < p^l");
                                }
                                if !h2 {
                                    expected.push("m*p^(k-l) < n");
                                }
                                if c.verdict != Verdict::Unknown || named != expected {
                                    return Err(format!("{tuple}: {:?} naming {named:?}", c.verdict));
                                }
                                unknown += 1;
                            }
                            self.certs.push(c);
                        }
                    }
                }
            }
        }
        let (code, out) =
            lenscalc(&["verify", "prop-ideal", "-p", "3", "-k", "3", "-l", "1", "-m", "2", "-n", "20", "--json"]);
        if code != 0 {
            return Err(format!("CLI exit {code}"));
        }
        self.certs.extend(parse_certs(&out)?);
        Ok(format!("{verified} verified, {unknown} unknown with the violated inequality named"))
    }

    fn criterion2(&mut self) -> Outcome {
        let mut agree = 0;
        for p in [2u64, 3, 5] {
            for k in 2..=4u32 {
                for l in 1..k {
                    for m in 1..pow(p, l) {
                        for n in (m * pow(p, k - l) + 1) as usize..=32 {
                            let run = |backend| {
                                verify_ideal_prop(p, k, l, m, n, &ProofOptions { backend, ..ProofOptions::default() })
                            };
                            let exact = run(BackendChoice::Exact).map_err(|e| e.to_string())?;
                            let modular = run(BackendChoice::Modular).map_err(|e| e.to_string())?;
                            if exact.backend != lenscalc::Backend::ExactHnf {
                                continue;
                            }
                            if exact.verdict != modular.verdict {
                                return Err(format!(
                                    "({p},{k},{l},{m},{n}): exact {:?}, modular {:?}",
                                    exact.verdict, modular.verdict
                                ));
                            }
                            agree += 1;
                            self.certs.push(exact);
                            self.certs.push(modular);
                        }
                    }
                }
            }
        }
        Ok(format!("{agree} instances, 0 disagreements"))
    }

    fn criterion3(&mut self) -> Outcome {
        let mut rings = 0;
        for p in [2u64, 3, 5] {
            for k in 1..=3u32 {
                for n in 1..=8usize {
                    let ring = make_ring(p, k, n).map_err(|e| e.to_string())?;
                    let want = BigInt::from(p).pow(k * (n as u32 - 1));
                    if ring.lattice().det != want {
                        return Err(format!("({p},{k},{n}): det {} != {want}", ring.lattice().det));
                    }
                    self.certs.push(info_certificate(&ring));
                    self.certs.push(factors_certificate(&ring));
                    rings += 1;
                }
            }
        }
        for ((p, k, n), want) in [((2, 1, 2), vec![2]), ((2, 2, 3), vec![2, 8]), ((3, 1, 3), vec![3, 3])] {
            let got = make_ring(p, k, n).map_err(|e| e.to_string())?.invariant_factors();
            let want: Vec<BigInt> = want.into_iter().map(BigInt::from).collect();
            if got != want {
                return Err(format!("invariant factors of ({p},{k},{n}): {got:?}"));
            }
        }
        for (args, want) in [
            (["-p", "2", "-k", "1", "-n", "2"], "[\"2\"]"),
            (["-p", "2", "-k", "2", "-n", "3"], "[\"2\",\"8\"]"),
            (["-p", "3", "-k", "1", "-n", "3"], "[\"3\",\"3\"]"),
        ] {
            let mut argv = vec!["ring", "factors", "--json"];
            argv.extend(args);
            let (code, out) = lenscalc(&argv);
            let certs = parse_certs(&out)?;
            let got = certs[0].witness["factors"].to_string();
            if code != 0 || got != want {
                return Err(format!("CLI factors {args:?}: exit {code}, {got}"));
            }
            self.certs.extend(certs);
        }
        Ok(format!("{rings} rings with det p^(k(n-1)); factors [2], [2,8], [3,3]"))
    }

    fn criterion4(&mut self) -> Outcome {
        let mut rings = 0;
        for p in [2u64, 3, 5] {
            for k in 1..=3u32 {
                for n in 1..=8usize {
                    let ring = make_ring(p, k, n).map_err(|e| e.to_string())?;
                    let sigma = ring.generator(Generator::Sigma);
                    let eta = ring.generator(Generator::Eta);
                    let c1 = power_certificate(&ring, &sigma, &BigInt::from(n)).map_err(|e| e.to_string())?;
                    let c2 = power_certificate(&ring, &eta, &BigInt::from(pow(p, k))).map_err(|e| e.to_string())?;
                    let zero = c1.witness["result"].as_array().is_some_and(|r| r.iter().all(|x| x == "0"));
                    let one = c2.witness["result"]
                        .as_array()
                        .is_some_and(|r| r.iter().enumerate().all(|(i, x)| x == if i == 0 { "1" } else { "0" }));
                    if !zero || !one {
                        return Err(format!("({p},{k},{n}): sigma^n zero {zero}, eta^(p^k) one {one}"));
                    }
                    self.certs.push(c1);
                    self.certs.push(c2);
                    rings += 1;
                }
            }
        }
        Ok(format!("sigma^n = 0 and eta^(p^k) = 1 in all {rings} rings"))
    }

    fn criterion5(&mut self) -> Outcome {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let (mut pairs, mut skipped) = (0, 0);
        for p in [2u64, 3, 5] {
            let rings: Vec<_> =
                (1..=3u32).flat_map(|k| (1..=8usize).map(move |n| make_ring(p, k, n).unwrap())).collect();
            for src in &rings {
                for dst in &rings {
                    if dst.k() < src.k() {
                        continue;
                    }
                    if !LensRing::pullback_is_well_defined(src, dst).map_err(|e| e.to_string())? {
                        skipped += 1;
                        continue;
                    }
                    let shift = pow(p, dst.k() - src.k());
                    let image = pullback(src, dst, &src.generator(Generator::Eta)).map_err(|e| e.to_string())?;
                    if image != dst.generator(Generator::Eta).pow(shift) {
                        return Err(format!("pullback(eta) {} -> {}", src.params(), dst.params()));
                    }
                    for _ in 0..500 {
                        let mut draw =
                            || src.element((0..src.n()).map(|_| BigInt::from(rng.gen_range(-99i64..=99))).collect());
                        let (a, b) = (draw(), draw());
                        let lhs = pullback(src, dst, &a.mul(&b).unwrap()).unwrap();
                        let rhs = pullback(src, dst, &a).unwrap().mul(&pullback(src, dst, &b).unwrap()).unwrap();
                        if lhs != rhs {
                            return Err(format!("{} -> {}: a = {a}, b = {b}", src.params(), dst.params()));
                        }
                    }
                    pairs += 1;
                }
            }
        }
        Ok(format!("{pairs} ring pairs x 500 products; {skipped} pairs where the map is not defined were skipped"))
    }

    fn criterion6(&mut self) -> Outcome {
        for family in ["f1", "f2", "f3"] {
            for p in ["3", "5", "7"] {
                let (code, out) = lenscalc(&["els", "check", "--family", family, "-p", p, "--horizon", "12", "--json"]);
                let certs = parse_certs(&out)?;
                if code != 0 || certs[0].verdict != Verdict::Verified {
                    return Err(format!("els check {family} p={p}: exit {code}"));
                }
                self.certs.extend(certs);
            }
        }
        let mut count = 0;
        for i in 1..=3 {
            for j in ["1", "2"] {
                let i_str = i.to_string();
                let (code, out) =
                    lenscalc(&["els", "certify", "--family", "f1", "-p", "3", "-i", &i_str, "-j", j, "--json"]);
                let certs = parse_certs(&out)?;
                let expected = pow(3, i) as usize - 1;
                if code != 0 || certs.len() != expected || certs.iter().any(|c| c.verdict != Verdict::Verified) {
                    return Err(format!("els certify i={i} j={j}: exit {code}, {} certificates", certs.len()));
                }
                let holds = certs
                    .iter()
                    .all(|c| c.witness["hypotheses"].as_array().is_some_and(|h| h.iter().all(|x| x["holds"] == true)));
                if !holds {
                    return Err(format!("i={i} j={j}: a membership hypothesis fails"));
                }
                count += certs.len();
                self.certs.extend(certs);
            }
        }
        let (code, _) = lenscalc(&["els", "certify", "--family", "f1", "-p", "3", "-i", "0", "-j", "1"]);
        if code != 3 {
            return Err(format!("i = 0 admits no m, expected exit 3, got {code}"));
        }
        Ok(format!("growth verified at horizon 12 for 9 families; {count} cup-length certificates verified (i = 0 admits no m)"))
    }

    fn criterion7(&mut self) -> Outcome {
        let mut checked = 0;
        for p in [3i64, 5, 7] {
            for m in (2..=10_000i64).filter(|m| m % p == 2) {
                let exact = meyer_exact(&p, &m).map_err(|e| format!("{e:?}"))?;
                let bound = level_lower_bound(&p, 2, &m);
                let big = meyer_exact(&BigInt::from(p), &BigInt::from(m)).map_err(|e| format!("{e:?}"))?;
                if exact != bound || big != BigInt::from(bound) {
                    return Err(format!("p={p} m={m}: {exact} vs {bound}"));
                }
                self.certs.push(bounds_certificate(p as u64, 2, &BigInt::from(m)).map_err(|e| e.to_string())?);
                checked += 1;
            }
        }
        Ok(format!("{checked} values of m agree"))
    }

    fn criterion8(&mut self) -> Outcome {
        let (code, out) = lenscalc(&["els", "corollary", "-p", "3", "--horizon", "8", "--json"]);
        if code != 1 {
            return Err(format!("exit {code}, expected 1"));
        }
        let certs = parse_certs(&out)?;
        let stages = certs[0].witness["stages"].as_array().cloned().unwrap_or_default();
        if stages.len() != 9 {
            return Err(format!("{} stages", stages.len()));
        }
        for s in &stages {
            let i = s["i"].as_u64().unwrap_or(u64::MAX);
            if s["congruent"] != true || s["m_mod_p"] != "2" {
                return Err(format!("stage {i}: congruence fails"));
            }
            let eq = s["value_eq_n_i"] == true;
            if (i == 0 && (eq || s["value_le_n_i"] != false)) || (i >= 1 && !eq) {
                return Err(format!("stage {i}: value {} vs n_i {}", s["value"], s["n_i"]));
            }
        }
        if certs[0].witness["violations"] != serde_json::json!([0]) {
            return Err(format!("violations {}", certs[0].witness["violations"]));
        }
        let mut file = tempfile::NamedTempFile::new().map_err(|e| e.to_string())?;
        file.write_all(&out).map_err(|e| e.to_string())?;
        let (check, _) = lenscalc(&["check-cert", file.path().to_str().unwrap()]);
        if check != 0 {
            return Err(format!("check-cert exit {check}"));
        }
        self.certs.extend(certs);
        Ok("exit 1; congruence at all 9 stages, equality for i >= 1, violation at i = 0; check-cert exit 0".into())
    }

    fn criterion9(&mut self) -> Outcome {
        for (idx, c) in self.certs.iter().enumerate() {
            check_certificate(c).map_err(|e| format!("certificate {idx} ({}): {e}", c.claim()))?;
        }
        let mut file = tempfile::NamedTempFile::new().map_err(|e| e.to_string())?;
        serde_json::to_writer(&mut file, &self.certs).map_err(|e| e.to_string())?;
        let (code, _) = lenscalc(&["check-cert", file.path().to_str().unwrap()]);
        if code != 0 {
            return Err(format!("check-cert exit {code}"));
        }
        Ok(format!("{} of {} certificates pass check-cert", self.certs.len(), self.certs.len()))
    }
}

fn main() -> ExitCode {
    let mut run = Run { certs: Vec::new() };
    let criteria: [Criterion; 9] = [
        ("prop-ideal grid", Run::criterion1),
        ("exact and modular backends agree", Run::criterion2),
        ("ring determinants and invariant factors", Run::criterion3),
        ("generator relations", Run::criterion4),
        ("pullback is multiplicative", Run::criterion5),
        ("lens sequence families", Run::criterion6),
        ("exact level value meets the lower bound", Run::criterion7),
        ("corollary audit", Run::criterion8),
        ("certificate round trip", Run::criterion9),
    ];
    let mut failed = 0;
    for (idx, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f(&mut run);
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} ({secs:.1}s)", idx + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail} ({secs:.1}s)", idx + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
