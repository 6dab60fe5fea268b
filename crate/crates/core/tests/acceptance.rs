//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use compactenum::bench::{run_bench_with, total_stored, total_unions, UNIFORM_LABEL, WEIGHTED_LABEL};
use compactenum::cli;
use compactenum::maxwell::discover::{build_validator, EXPECTED_RATIOS};
use compactenum::maxwell::{
    check_expected, discover, expected_maxwell, gen_scene, standard_alphabet, DiscoveryConfig, EvalMode,
    SampleSet, TermValue,
};
use compactenum::{march, prune_supersets, trivial_validator, Enumerator, Theory, Validator, WeightedAlphabet};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SEEDS: [u64; 10] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 42];

const WEIGHTED_COUNTS: [usize; 14] = [2, 1, 0, 4, 8, 4, 6, 18, 18, 6, 24, 52, 32, 19];

// Totals over all levels, frozen from an independent script that replays
// the pair loop literally (ordered pairs, l = m visited twice).
const WEIGHTED_UNIONS: u64 = 1327;
const WEIGHTED_DUPLICATES: u64 = 466;
const UNIFORM_UNIONS: u64 = 5_755_730;
const UNIFORM_DUPLICATES: u64 = 294_436;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["compactenum"];
    full.extend_from_slice(args);
    let code = cli::run(full, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).expect("utf-8 stdout"),
        String::from_utf8(err).expect("utf-8 stderr"),
    )
}

// Powerset bucket counts computed without the library.
fn powerset_counts(weights: &[u32], max_q: u32) -> Vec<usize> {
    let mut counts = vec![0; max_q as usize];
    for mask in 1u32..(1 << weights.len()) {
        let q: u32 = (0..weights.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| weights[i])
            .sum();
        if q <= max_q {
            counts[q as usize - 1] += 1;
        }
    }
    counts
}

fn binomial(n: u64, k: u64) -> u64 {
    (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
}

fn listing_fidelity() -> Outcome {
    let expected = [
        "q=1 count=2 [{A},{B}]",
        "q=2 count=1 [{A,B}]",
        "q=3 count=0 []",
        "q=4 count=4 [{C},{D},{E},{F}]",
        "q=5 count=8 [{A,C},{A,D},{A,E},{A,F},{B,C},{B,D},{B,E},{B,F}]",
        "q=6 count=4 [{A,B,C},{A,B,D},{A,B,E},{A,B,F}]",
        "q=7 count=6 [{G},{H},{I},{J},{K},{L}]",
    ];
    let start = Instant::now();
    let (code, out, err) = run_cli(&["enumerate", "--alphabet", "paper", "--list"]);
    let elapsed = start.elapsed();
    ensure(code == 0, || format!("exit {code}: {err}"))?;
    let lines: Vec<&str> = out.lines().take(7).collect();
    ensure(lines == expected, || format!("listing differs: {lines:?}"))?;
    ensure(elapsed < Duration::from_millis(100), || format!("took {elapsed:?}"))?;
    Ok(format!("levels 1-7 match exactly in {elapsed:?}"))
}

fn full_level_counts() -> Outcome {
    let weights: Vec<u32> = WeightedAlphabet::weighted().entries().iter().map(|e| e.1).collect();
    let oracle = powerset_counts(&weights, 14);
    ensure(oracle == WEIGHTED_COUNTS, || format!("oracle counts {oracle:?}"))?;
    let out = march(&WeightedAlphabet::weighted(), 14, &trivial_validator()).map_err(|e| e.to_string())?;
    let counts = out.levels.counts();
    ensure(counts == WEIGHTED_COUNTS, || format!("march counts {counts:?}"))?;
    ensure(out.levels.total() == 194, || format!("total {}", out.levels.total()))?;
    Ok(format!("{counts:?}, total 194"))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let runs: [&[&str]; 3] = [
        &["oracle", "--alphabet", "paper", "--max-comp", "14"],
        &["oracle", "--alphabet", "uniform12", "--max-comp", "12"],
        &["oracle", "--random", "20", "--symbols", "10", "--max-weight", "5", "--seed", "1"],
    ];
    for args in runs {
        let (code, out, err) = run_cli(args);
        ensure(code == 0, || format!("{args:?}: exit {code} {err}{out}"))?;
        for line in out.lines() {
            ensure(line.ends_with("EQUIVALENT"), || format!("{args:?}: {line}"))?;
            checked += 1;
        }
    }
    // random alphabets of up to 12 symbols with a cap below the total weight
    for seed in 100..105 {
        let a = compactenum::random_alphabet(12, 5, seed);
        let cap = (a.total_weight() as u32 * 2 / 3).max(1);
        let m = march(&a, cap, &trivial_validator()).map_err(|e| e.to_string())?;
        let o = compactenum::brute_force_oracle(&a, cap).map_err(|e| e.to_string())?;
        ensure(m.levels.first_difference(&o).is_none(), || format!("seed {seed} differs"))?;
        checked += 1;
    }
    let elapsed = start.elapsed();
    ensure(checked >= 27, || format!("only {checked} alphabets checked"))?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{checked} alphabets EQUIVALENT in {elapsed:?}"))
}

fn binomial_law() -> Outcome {
    let out = march(&WeightedAlphabet::uniform(12), 14, &trivial_validator()).map_err(|e| e.to_string())?;
    ensure(out.levels.max_q() == 12, || format!("max_q {}", out.levels.max_q()))?;
    for m in 1..=12u32 {
        let got = out.levels.level_len(m) as u64;
        let want = binomial(12, u64::from(m));
        ensure(got == want, || format!("level {m}: {got} != C(12,{m}) = {want}"))?;
    }
    ensure(out.levels.total() == 4095, || format!("total {}", out.levels.total()))?;
    Ok("C(12,m) for m = 1..12, total 4095".into())
}

fn compactness_dominance() -> Outcome {
    let strip = |rows: Vec<compactenum::bench::BenchRow>| -> Vec<(String, u32, u64, u64, u64)> {
        rows.into_iter()
            .map(|r| (r.alphabet_label, r.q, r.stored, r.unions_attempted, r.duplicates_rejected))
            .collect()
    };
    let single = run_bench_with(14, 1, 1).map_err(|e| e.to_string())?;
    let again = run_bench_with(14, 1, 1).map_err(|e| e.to_string())?;
    let parallel = run_bench_with(14, 1, 4).map_err(|e| e.to_string())?;
    ensure(single.len() == 26, || format!("{} rows", single.len()))?;
    let weighted = total_unions(&single, WEIGHTED_LABEL);
    let uniform = total_unions(&single, UNIFORM_LABEL);
    ensure(weighted == WEIGHTED_UNIONS && uniform == UNIFORM_UNIONS, || {
        format!("unions weighted={weighted} uniform={uniform}")
    })?;
    let dup = |label| single.iter().filter(|r| r.alphabet_label == label).map(|r| r.duplicates_rejected).sum::<u64>();
    ensure(
        dup(WEIGHTED_LABEL) == WEIGHTED_DUPLICATES && dup(UNIFORM_LABEL) == UNIFORM_DUPLICATES,
        || "duplicate counts differ from frozen values".into(),
    )?;
    ensure(total_stored(&single, WEIGHTED_LABEL) == 194, || "weighted stored".into())?;
    ensure(total_stored(&single, UNIFORM_LABEL) == 4095, || "uniform stored".into())?;
    ensure(weighted * 20 < uniform, || format!("ratio only {}", uniform / weighted.max(1)))?;
    let counts = strip(single);
    ensure(counts == strip(again), || "counts differ between runs".into())?;
    ensure(counts == strip(parallel), || "counts differ between worker counts".into())?;

    // warm, then time a full weighted enumeration
    let enumerator = Enumerator::sequential();
    enumerator
        .march(&WeightedAlphabet::weighted(), 14, &trivial_validator())
        .map_err(|e| e.to_string())?;
    let start = Instant::now();
    enumerator
        .march(&WeightedAlphabet::weighted(), 14, &trivial_validator())
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_millis(100), || format!("weighted enumeration took {elapsed:?}"))?;
    Ok(format!(
        "unions weighted={weighted} uniform12={uniform} ({}x); identical across runs and 1/4 workers; weighted run {elapsed:?}",
        uniform / weighted
    ))
}

fn ratio_errors(config: &DiscoveryConfig) -> Result<f64, String> {
    let report = discover(config).map_err(|e| e.to_string())?;
    check_expected(&report, config.tolerances.tol_coef)?;
    let mut worst = 0.0_f64;
    for (names, num, den, want) in EXPECTED_RATIOS {
        let d = report.find(names).ok_or("missing discovery")?;
        let got = d.coefficient(num).unwrap() / d.coefficient(den).unwrap();
        worst = worst.max((got - want).abs());
    }
    Ok(worst)
}

fn discovery_analytic() -> Outcome {
    let mut worst_ratio = 0.0_f64;
    let mut slowest = Duration::ZERO;
    for seed in SEEDS {
        let s = seed.to_string();
        let start = Instant::now();
        let (code, out, err) = run_cli(&["discover", "--expect-maxwell", "--seed", &s]);
        slowest = slowest.max(start.elapsed());
        ensure(code == 0, || format!("seed {seed}: exit {code} {err}{out}"))?;
        let config = DiscoveryConfig::default().seeded(seed);
        worst_ratio = worst_ratio.max(ratio_errors(&config).map_err(|e| format!("seed {seed}: {e}"))?);
    }
    ensure(worst_ratio <= 1e-6, || format!("ratio error {worst_ratio:e}"))?;
    ensure(slowest < Duration::from_secs(5), || format!("slowest seed {slowest:?}"))?;
    Ok(format!(
        "six equations over {} seeds, max ratio error {worst_ratio:.1e}, slowest {slowest:?}",
        SEEDS.len()
    ))
}

fn max_term_error(h: f64) -> f64 {
    let scene = gen_scene(3, 42).expect("scene");
    let samples = SampleSet::uniform(100, 9).expect("samples");
    let alphabet = standard_alphabet();
    let mut worst = 0.0_f64;
    for (x, t) in &samples.points {
        for (_, term) in alphabet.terms() {
            let a: TermValue = scene.eval(*term, x, *t, EvalMode::Analytic);
            let f = scene.eval(*term, x, *t, EvalMode::FiniteDifference { h });
            worst = worst.max(a.max_abs_diff(&f));
        }
    }
    worst
}

fn discovery_finite_difference() -> Outcome {
    let mut worst_ratio = 0.0_f64;
    for seed in SEEDS {
        let s = seed.to_string();
        let (code, out, err) = run_cli(&["discover", "--mode", "fd", "--expect-maxwell", "--seed", &s]);
        ensure(code == 0, || format!("seed {seed}: exit {code} {err}{out}"))?;
        let config = DiscoveryConfig::with_mode(EvalMode::FiniteDifference { h: 1e-3 }).seeded(seed);
        worst_ratio = worst_ratio.max(ratio_errors(&config).map_err(|e| format!("seed {seed}: {e}"))?);
    }
    ensure(worst_ratio <= 1e-3, || format!("ratio error {worst_ratio:e}"))?;
    let coarse = max_term_error(1e-3);
    let fine = max_term_error(5e-4);
    ensure(coarse / fine >= 3.0, || format!("error {coarse:e} -> {fine:e} only shrank {:.2}x", coarse / fine))?;
    Ok(format!(
        "six equations over {} seeds, max ratio error {worst_ratio:.1e}; term error {coarse:.2e} -> {fine:.2e} ({:.2}x)",
        SEEDS.len(),
        coarse / fine
    ))
}

fn monochromatic_trap() -> Outcome {
    let trap = Theory::of(&["A", "I"]);
    let mono = DiscoveryConfig {
        monochromatic: true,
        ..Default::default()
    };
    let report = discover(&mono).map_err(|e| e.to_string())?;
    ensure(report.keys().contains(&(8, trap.clone())), || {
        format!("monochromatic run missed {{A,I}}@8: {:?}", report.keys())
    })?;
    let (_, mono_validator) = build_validator(&mono).map_err(|e| e.to_string())?;
    ensure(mono_validator.validate(&trap).map_err(|e| e.to_string())?.accepted, || {
        "validator rejected {A,I} on monochromatic data".into()
    })?;

    let default = DiscoveryConfig::default();
    let (_, validator) = build_validator(&default).map_err(|e| e.to_string())?;
    ensure(!validator.validate(&trap).map_err(|e| e.to_string())?.accepted, || {
        "multi-frequency scene accepted {A,I}".into()
    })?;
    let report = discover(&default).map_err(|e| e.to_string())?;
    ensure(!report.keys().iter().any(|(_, t)| *t == trap), || "{A,I} reported".into())?;
    Ok("{A,I}@8 accepted on single-frequency data, rejected on the default scene".into())
}

fn minimality() -> Outcome {
    let mut checked = 0;
    for mode in [EvalMode::Analytic, EvalMode::finite_difference()] {
        for seed in SEEDS {
            let config = DiscoveryConfig::with_mode(mode).seeded(seed);
            let (_, validator) = build_validator(&config).map_err(|e| e.to_string())?;
            let report = discover(&config).map_err(|e| e.to_string())?;
            for d in &report.discoveries {
                for member in d.theory.members() {
                    let rest = d.theory.without(member);
                    let out = validator.validate(&rest).map_err(|e| e.to_string())?;
                    ensure(!out.accepted, || format!("{rest} still valid after dropping {member} from {}", d.theory))?;
                    checked += 1;
                }
            }

            let raw = march(&config_alphabet(), config.max_comp, &validator).map_err(|e| e.to_string())?;
            let pruned = prune_supersets(&raw.records);
            ensure(prune_supersets(&pruned) == pruned, || "pruning not idempotent".into())?;
            for x in &pruned {
                for y in &pruned {
                    ensure(x.theory == y.theory || !x.theory.is_subset(&y.theory), || {
                        format!("{} ⊂ {}", x.theory, y.theory)
                    })?;
                }
            }
            let keys: BTreeSet<_> = pruned.iter().map(|r| (r.q, r.theory.clone())).collect();
            ensure(keys == expected_maxwell().into_iter().collect(), || "pruned set differs".into())?;
        }
    }
    Ok(format!("{checked} single-member removals all rejected; pruned outputs are idempotent antichains"))
}

fn config_alphabet() -> WeightedAlphabet {
    standard_alphabet().alphabet
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 listing fidelity", listing_fidelity),
        ("2 full-level counts", full_level_counts),
        ("3 oracle equivalence", oracle_equivalence),
        ("4 binomial law", binomial_law),
        ("5 compactness dominance", compactness_dominance),
        ("6 discovery, analytic", discovery_analytic),
        ("7 discovery, finite differences", discovery_finite_difference),
        ("8 monochromatic trap", monochromatic_trap),
        ("9 minimality", minimality),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
