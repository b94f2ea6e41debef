//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::collections::HashSet;
use std::process::Command as Process;
use std::time::{Duration, Instant};

use itertools::Itertools;
use kobdd_cli::{
    build_summary, cmd_bounds, cmd_check, cmd_distinguish, cmd_gap, cmd_params, BoundsArgs, CheckArgs, DistinguishArgs,
    GapArgs, ParamArgs, SafArgs,
};
use kobdd_core::analysis::{block_split_partition, census_global, classify_partition, BoolFunction, Partition};
use kobdd_core::builder::build;
use kobdd_core::program::{random_kobdd, validate_kobdd, TruthTable, VariableOrder};
use kobdd_core::saf::{ceil_log2, eval_saf};
use kobdd_core::{Assignment, SafParams};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const GRID: [(usize, usize); 4] = [(2, 2), (2, 4), (3, 4), (4, 8)];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn grid_n(k: usize, w: usize) -> Result<usize, String> {
    let r = cmd_params(&ParamArgs { k, w, n: None }).map_err(|e| e.to_string())?;
    Ok(r.record["n"].as_u64().unwrap() as usize)
}

fn width_bound() -> Outcome {
    let mut detail = Vec::new();
    for (k, w) in GRID {
        let n = grid_n(k, w)?;
        let params = SafParams::new(k, w, n).map_err(|e| e.to_string())?;
        let start = Instant::now();
        let program = build(&params).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        let s = build_summary(&params, &program);
        let m = program.metrics();
        ensure(validate_kobdd(&program).is_ok(), || {
            format!("({k},{w},{n}) fails k-OBDD validation: {}", s["violations"])
        })?;
        ensure(m.layer_count == 2 * k, || format!("({k},{w},{n}) has {} layers", m.layer_count))?;
        ensure(m.width <= 3 * w + 1, || format!("({k},{w},{n}) width {} > {}", m.width, 3 * w + 1))?;
        ensure(elapsed < Duration::from_secs(10), || format!("({k},{w},{n}) build took {elapsed:?}"))?;
        detail.push(format!("({k},{w},n={n}) width {}/{}", m.width, 3 * w + 1));
    }
    Ok(detail.join(", "))
}

fn equivalence() -> Outcome {
    let mut detail = Vec::new();
    for (k, w) in GRID {
        let n = grid_n(k, w)?;
        let args = CheckArgs { saf: SafArgs::new(k, w, n), samples: 100_000, seed: 1, decode: 1_000 };
        let r = cmd_check(&args).map_err(|e| e.to_string())?;
        let mismatches = r.record["mismatches"].as_array().unwrap();
        let disagreements = r.record["layer_disagreements"].as_array().unwrap();
        ensure(mismatches.is_empty(), || {
            format!("({k},{w},{n}): {} mismatches, first {}", mismatches.len(), mismatches[0])
        })?;
        ensure(disagreements.is_empty(), || {
            format!("({k},{w},{n}): layer decoding differs on samples {disagreements:?}")
        })?;
        ensure(r.record["decoded"] == 1_000, || "decoded fewer than 1000 samples".into())?;
        detail.push(format!("({k},{w}) 100000+{} inputs", r.record["structured"]));
    }
    Ok(format!("0 mismatches, per-layer agreement on 1000 each: {}", detail.join(", ")))
}

fn size_inequality() -> Outcome {
    let mut checked = 0;
    for (k, w) in GRID {
        let program = build(&SafParams::new(k, w, grid_n(k, w)?).unwrap()).unwrap();
        let m = program.metrics();
        ensure(m.size < m.width * program.n() * m.layer_count, || {
            format!("built ({k},{w}): size {} ceiling {}", m.size, m.size_ceiling)
        })?;
        checked += 1;
    }
    // Same shapes as the bounds sweep, plus larger programs.
    let sweep = BoundsArgs { count: 1_000, max_k: 3, min_w: 2, max_w: 3, max_n: 6, seed: 2 };
    for i in 0..sweep.count {
        let (k, w, n, seed) = kobdd_cli::sweep_shape(&sweep, i);
        let p = random_kobdd(k, w, n, seed);
        let m = p.metrics();
        ensure(m.size < m.width * n * m.layer_count, || format!("random ({k},{w},{n},{seed}) size {}", m.size))?;
        checked += 1;
    }
    // With two or more levels every level but the source's holds w nodes,
    // so these programs have width w >= 2.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let (k, w, n) = (rng.gen_range(1..=8), rng.gen_range(2..=16), rng.gen_range(2..=40));
        let p = random_kobdd(k, w, n, rng.gen());
        let m = p.metrics();
        ensure(m.width == w, || format!("random ({k},{w},{n}) has width {}", m.width))?;
        ensure(m.size < m.width * n * m.layer_count, || format!("random ({k},{w},{n}) size {}", m.size))?;
        checked += 1;
    }
    Ok(format!("{checked} programs, width >= 2 for random ones"))
}

/// Distinct subfunctions after fixing the first `u` variables of `order`,
/// by building every restricted table explicitly.
fn naive_cut(table: &TruthTable, order: &[usize], u: usize) -> usize {
    let n = order.len();
    let (a, b) = order.split_at(u);
    let mut seen = HashSet::new();
    for fix in 0..1u64 << a.len() {
        let sub: Vec<bool> = (0..1u64 << b.len())
            .map(|rest| {
                let mut idx = 0usize;
                for (j, &v) in a.iter().enumerate() {
                    idx |= ((fix >> j & 1) as usize) << v;
                }
                for (j, &v) in b.iter().enumerate() {
                    idx |= ((rest >> j & 1) as usize) << v;
                }
                table.get(idx)
            })
            .collect();
        seen.insert(sub);
    }
    debug_assert!(n > u);
    seen.len()
}

fn naive_global(table: &TruthTable) -> usize {
    let n = table.arity();
    (0..n).permutations(n).map(|order| (1..n).map(|u| naive_cut(table, &order, u)).max().unwrap_or(1)).min().unwrap()
}

fn census_oracle() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    let mut compare = |table: TruthTable| -> Result<(), String> {
        let expected = naive_global(&table);
        let got = census_global(&BoolFunction::from_table(table.clone())).unwrap().n_global;
        count += 1;
        ensure(got == expected, || format!("table {table}: lattice {got}, naive {expected}"))
    };
    for f in 0..256usize {
        compare(TruthTable::from_bits(&(0..8).map(|i| f >> i & 1 == 1).collect::<Vec<_>>()).unwrap())?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in [4, 5] {
        for _ in 0..50 {
            compare(TruthTable::from_bits(&(0..1 << n).map(|_| rng.gen()).collect::<Vec<_>>()).unwrap())?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{count} functions agree (all 256 at n=3, 50 each at n=4,5) in {:.1}s", elapsed.as_secs_f64()))
}

fn ceiling_sweep() -> Outcome {
    let r = cmd_bounds(&BoundsArgs { count: 1_000, max_k: 3, min_w: 2, max_w: 3, max_n: 6, seed: 2 })
        .map_err(|e| e.to_string())?;
    let v = r.record["violations"].as_array().unwrap();
    ensure(v.is_empty(), || format!("{} violations, first {}", v.len(), v[0]))?;
    let unit = cmd_bounds(&BoundsArgs { count: 200, max_k: 3, min_w: 1, max_w: 1, max_n: 6, seed: 5 })
        .map_err(|e| e.to_string())?;
    let uv = unit.record["violations"].as_array().unwrap();
    ensure(uv.is_empty(), || format!("width-1 sweep: {} violations", uv.len()))?;
    Ok(format!(
        "1000 programs (k<=3, w in 2..=3, n<=6, largest N {}) and 200 width-1 programs: 0 violations",
        r.record["max_census"]
    ))
}

fn good_set() -> Outcome {
    let mut detail = Vec::new();
    for (k, w) in GRID {
        let params = SafParams::new(k, w, grid_n(k, w)?).unwrap();
        let l = params.layout();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut hits = 0usize;
        for _ in 0..1_000 {
            let mut theta: Vec<usize> = (0..l.n).collect();
            theta.shuffle(&mut rng);
            // Running count of each block's value variables already in X_A.
            let mut in_a = vec![0usize; l.block_count];
            let mut i_a = 0usize;
            let mut classified = false;
            for u in 1..l.n {
                let v = theta[u - 1];
                if l.is_value_var(v) {
                    let p = l.locate(v).0;
                    in_a[p] += 1;
                    if in_a[p] == w {
                        i_a += 1;
                    }
                }
                if i_a != k * w {
                    continue;
                }
                hits += 1;
                let rich_b = (0..l.block_count).filter(|&p| in_a[p] < w && l.b - in_a[p] >= w).count();
                let i_b = (0..l.block_count).filter(|&p| in_a[p] < w).count();
                ensure(i_b == k * w && rich_b == k * w, || format!("({k},{w}) cut {u}: |I_B| = {i_b}, rich {rich_b}"))?;
                if !classified {
                    let pi = Partition::new(VariableOrder::new(theta.clone()).unwrap(), u).unwrap();
                    let c = classify_partition(&l, &pi);
                    ensure(c.i_a.len() == k * w && c.balanced == Some(true), || {
                        format!("({k},{w}) classifier disagrees at cut {u}")
                    })?;
                    classified = true;
                }
            }
            ensure(classified, || format!("({k},{w}) order without a cut where |I_A| = kw"))?;
        }
        detail.push(format!("({k},{w}) {hits} cuts"));
    }
    Ok(format!("1000 random orders per layout, every cut with |I_A| = kw has |I_B| = kw: {}", detail.join(", ")))
}

fn hierarchy() -> Outcome {
    let start = Instant::now();
    let r = cmd_gap(&GapArgs { k: vec![], w: vec![], grid: true }).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let rows = r.record["rows"].as_array().unwrap();
    let bad: Vec<&Value> = rows.iter().filter(|r| r["k"].as_u64().unwrap() >= 6 && r["separated"] != true).collect();
    ensure(bad.is_empty(), || {
        format!("not separated at {:?}", bad.iter().map(|r| (&r["k"], &r["w"])).collect::<Vec<_>>())
    })?;
    ensure(rows.len() == 63 * 4, || format!("{} rows", rows.len()))?;
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    let at2: Vec<String> = rows
        .iter()
        .filter(|r| r["k"] == 2)
        .map(|r| format!("w={} {}", r["w"], if r["separated"] == true { "separated" } else { "not separated" }))
        .collect();
    let first: Vec<String> =
        r.record["first_separated"].as_array().unwrap().iter().map(|f| format!("w={}:k={}", f["w"], f["k"])).collect();
    Ok(format!(
        "separated for all k in 6..=64, w in {{64,128,256,1024}}; at k=2: {}; smallest separating k: {}",
        at2.join(", "),
        first.join(", ")
    ))
}

fn distinguishing_witnesses() -> Outcome {
    let mut total = 0;
    for (k, w) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let r = cmd_distinguish(&DistinguishArgs { k, w, pairs: 10, budget: 100_000, seed: 8 })
            .map_err(|e| e.to_string())?;
        let n = r.record["n"].as_u64().unwrap() as usize;
        let addr = ceil_log2(k) + ceil_log2(2 * w);
        ensure(n == 2 * k * w * (addr + w + 1), || format!("unexpected n {n}"))?;
        let params = SafParams::relaxed(k, w, n).unwrap();
        let layout = params.layout();
        let x_b = block_split_partition(&layout).x_b();
        for pair in r.record["pairs"].as_array().unwrap() {
            let (rr, z, seed) = (
                pair["r"].as_u64().unwrap() as usize,
                pair["z"].as_u64().unwrap() as usize,
                pair["seed"].as_u64().unwrap(),
            );
            let gamma = pair["gamma"].as_str().ok_or_else(|| format!("({k},{w}) pair ({rr},{z}) has no witness"))?;
            let (s, sp) = kobdd_core::analysis::designed_pair(&layout, rr, z, seed);
            let mut x = Assignment::zeros(n);
            let mut y = Assignment::zeros(n);
            s.apply(&mut x);
            sp.apply(&mut y);
            for (&v, c) in x_b.iter().zip(gamma.chars()) {
                x.set(v, c == '1');
                y.set(v, c == '1');
            }
            ensure(eval_saf(&params, &x).unwrap() != eval_saf(&params, &y).unwrap(), || {
                format!("({k},{w}) pair ({rr},{z}): witness does not separate")
            })?;
            total += 1;
        }
    }
    Ok(format!("{total} designed pairs at relaxed (2,2), (2,3), (3,2), (3,3), each with a re-verified witness"))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_kobdd");
    let runs: [&[&str]; 5] = [
        &["--json", "check", "-k", "2", "-w", "2", "-n", "64", "--samples", "20000", "--seed", "1"],
        &["--json", "bounds", "--count", "300", "--seed", "2"],
        &["--json", "gap", "--grid"],
        &["--json", "distinguish", "-k", "3", "-w", "2", "--seed", "4"],
        &["--json", "census", "--table", "0110100110010110"],
    ];
    for args in runs {
        let out = |_: u8| Process::new(bin).args(args).output().map_err(|e| e.to_string());
        let (a, b) = (out(0)?, out(1)?);
        ensure(a.status.success(), || format!("{args:?} exited with {}", a.status))?;
        ensure(a.stdout == b.stdout, || format!("{args:?} differs between runs"))?;
        let text = String::from_utf8(a.stdout).map_err(|e| e.to_string())?;
        ensure(text.lines().count() == 1, || format!("{args:?} printed {} lines", text.lines().count()))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        ensure(v["schema"] == 1, || format!("{args:?} lacks schema 1"))?;
    }
    Ok(format!("{} seeded commands byte-identical across two runs", runs.len()))
}

fn main() {
    // Flags forwarded by cargo test (such as --nocapture) are ignored.
    let criteria: [Criterion; 9] = [
        ("width bound of the built program", width_bound),
        ("built program equals the reference evaluator", equivalence),
        ("size below width * n * layers", size_inequality),
        ("lattice census equals all-orders enumeration", census_oracle),
        ("subfunction ceiling on random k-OBDDs", ceiling_sweep),
        ("prefix partitions split blocks evenly", good_set),
        ("hierarchy comparison with exact integers", hierarchy),
        ("distinguishing witnesses for designed pairs", distinguishing_witnesses),
        ("seeded output is reproducible", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} [{secs:.1}s] {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name} [{secs:.1}s] {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
