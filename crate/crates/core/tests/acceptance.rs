//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use priverm::bounds::{alpha_cubic, alpha_threshold, d_a_interval, necessary_condition, sufficient_condition};
use priverm::bounds::{BoundInputs, LogBase, ASYMPTOTIC_ALPHA};
use priverm::constructions::{
    construct_lemma1_tight, construct_lemma2_witness, construct_theorem1, construct_theorem5_family, theorem5_alpha,
};
use priverm::erm::{erm_privileged, erm_standard};
use priverm::sim::comparison::{ClassesSpec, DistributionSpec, ExperimentConfig};
use priverm::sim::{adversarial_theorem5, persist_run, rerun_from_manifest, run_comparison, Candidates};
use priverm::vc::{build_aux_class, build_f_class, exact_vc, is_shattered, k_fold_union, union_class};
use priverm::{Bits, FiniteDistribution, FiniteDomain, HypothesisClass, Triple, TripleSample};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn class_from_codes(label: &str, n: usize, codes: impl IntoIterator<Item = u32>) -> HypothesisClass {
    let dom = Arc::new(FiniteDomain::new(label, n).unwrap());
    HypothesisClass::from_patterns(dom, codes.into_iter().map(|c| Bits::from_fn(n, |i| (c >> i) & 1 == 1))).unwrap()
}

fn random_class(rng: &mut ChaCha8Rng, label: &str, n: usize, max_members: usize) -> HypothesisClass {
    let k = rng.gen_range(1..=max_members);
    let codes: Vec<u32> = (0..k).map(|_| rng.gen_range(0..1u32 << n)).collect();
    class_from_codes(label, n, codes)
}

/// Brute-force VC dimension over every subset of a domain of at most 16 points.
fn naive_vc(cls: &HypothesisClass) -> usize {
    let n = cls.domain().size();
    assert!(n <= 16);
    let codes: Vec<u32> = cls
        .members()
        .iter()
        .map(|h| (0..n).filter(|&i| h.at(i)).map(|i| 1u32 << i).sum())
        .collect();
    let mut best = 0;
    for subset in 0u32..1 << n {
        let size = subset.count_ones() as usize;
        if size <= best || (1usize << size) > codes.len() {
            continue;
        }
        let mut seen = std::collections::HashSet::new();
        for c in &codes {
            seen.insert(c & subset);
        }
        if seen.len() == 1 << size {
            best = size;
        }
    }
    best
}

fn criterion1() -> Outcome {
    let mut notes = Vec::new();
    for (d, limit) in [(1usize, Duration::from_secs(1)), (2, Duration::from_secs(300))] {
        let start = Instant::now();
        let t = construct_theorem1(d).map_err(|e| e.to_string())?;
        let vh = exact_vc(&t.h).map_err(|e| e.to_string())?;
        let vp = exact_vc(&t.phi).map_err(|e| e.to_string())?;
        let f = build_f_class(&t.h, &t.phi).map_err(|e| e.to_string())?;
        let vf = exact_vc(&f).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        check(
            vh.exact && vp.exact && vf.exact && (vh.vc, vp.vc, vf.vc) == (d, d, 3 * d),
            format!("d={d}: VC(H)={} VC(Φ)={} VC(F)={} (exact: {})", vh.vc, vp.vc, vf.vc, vf.exact),
        )?;
        check(f.domain().size() == 18 * d * d, format!("F domain size {}", f.domain().size()))?;
        check(elapsed < limit, format!("d={d} took {elapsed:?}, limit {limit:?}"))?;
        notes.push(format!(
            "d={d}: VC(H)={} VC(Φ)={} VC(F)={} over {} points, additive prediction d+d*={} vs measured {} [{:.2?}]",
            vh.vc,
            vp.vc,
            vf.vc,
            f.domain().size(),
            t.additive_prediction(),
            vf.vc,
            elapsed
        ));
    }
    let start = Instant::now();
    let t = construct_theorem1(3).map_err(|e| e.to_string())?;
    let f = build_f_class(&t.h, &t.phi).map_err(|e| e.to_string())?;
    let witness = t.diagonal_witness();
    let shattered = is_shattered(&f, &witness).map_err(|e| e.to_string())?;
    let vh = exact_vc(&t.h).map_err(|e| e.to_string())?.vc;
    let vp = exact_vc(&t.phi).map_err(|e| e.to_string())?.vc;
    let elapsed = start.elapsed();
    check(
        shattered && witness.len() == 9 && vh == 3 && vp == 3,
        format!("d=3: witness shattered={shattered}, VC(H)={vh}, VC(Φ)={vp}"),
    )?;
    check(elapsed < Duration::from_secs(30), format!("d=3 took {elapsed:?}"))?;
    notes.push(format!(
        "d=3: 9-point witness shattered by F, VC(H)=VC(Φ)=3, additive prediction {} vs ≥ 9 [{elapsed:.2?}]",
        t.additive_prediction()
    ));
    Ok(notes.join("; "))
}

fn criterion2() -> Outcome {
    for (d, ds) in [(1, 1), (1, 2), (2, 2), (2, 3)] {
        let l = construct_lemma1_tight(d, ds).map_err(|e| e.to_string())?;
        let u = union_class(&l.h, &l.j).map_err(|e| e.to_string())?;
        let (vh, vj, vu) = (naive_vc(&l.h), naive_vc(&l.j), exact_vc(&u).map_err(|e| e.to_string())?.vc);
        check(
            (vh, vj, vu) == (d, ds, d + ds + 1) && naive_vc(&u) == vu,
            format!("tight ({d},{ds}): VC(H)={vh} VC(J)={vj} VC(H∪J)={vu}"),
        )?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xa11ce);
    let mut violations = 0;
    let mut engine_mismatch = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=10);
        let a = random_class(&mut rng, "X", n, 40);
        let b = random_class(&mut rng, "X", n, 40);
        let u = union_class(&a, &b).unwrap();
        let (va, vb, vu) = (exact_vc(&a).unwrap().vc, exact_vc(&b).unwrap().vc, exact_vc(&u).unwrap().vc);
        if vu > va + vb + 1 {
            violations += 1;
        }
        if vu != naive_vc(&u) || va != naive_vc(&a) {
            engine_mismatch += 1;
        }
    }
    check(
        violations == 0 && engine_mismatch == 0,
        format!("{violations} union-bound violations, {engine_mismatch} engine/brute-force mismatches"),
    )?;
    Ok("tight pairs (1,1),(1,2),(2,2),(2,3) reach d+d*+1; 1000 random pairs: 0 violations".into())
}

fn criterion3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3f01d);
    let mut violations = 0;
    let mut max_ratio: f64 = 0.0;
    for i in 0..200 {
        let k = if i % 2 == 0 { 2 } else { 3 };
        let n = rng.gen_range(2..=8);
        let r = random_class(&mut rng, "X", n, 12);
        let vr = exact_vc(&r).unwrap().vc;
        let vk = exact_vc(&k_fold_union(&r, k).unwrap()).unwrap().vc;
        let bound = vr as f64 * 2.0 * k as f64 * (2.0 * std::f64::consts::E * k as f64).log2();
        if vk as f64 > bound {
            violations += 1;
        }
        if bound > 0.0 {
            max_ratio = max_ratio.max(vk as f64 / bound);
        }
    }
    check(violations == 0, format!("{violations} violations"))?;
    Ok(format!("200 set systems, k∈{{2,3}}: 0 violations (max VC/bound = {max_ratio:.3})"))
}

fn sandwich(h: &HypothesisClass, phi: &HypothesisClass) -> Result<(usize, usize, usize), String> {
    let d = exact_vc(h).map_err(|e| e.to_string())?.vc;
    let ds = exact_vc(phi).map_err(|e| e.to_string())?.vc;
    let aux = build_aux_class(h, phi).map_err(|e| e.to_string())?;
    let da = exact_vc(&aux).map_err(|e| e.to_string())?.vc;
    let (lo, hi) = d_a_interval(d, ds);
    check(
        lo <= da && (da as f64) <= hi,
        format!("d={d} d*={ds}: d_a={da} outside [{lo}, {hi:.3}]"),
    )?;
    let w = construct_lemma2_witness(h, phi).map_err(|e| e.to_string())?;
    let independent = is_shattered(&aux, &w.indices).map_err(|e| e.to_string())?;
    check(
        independent && w.indices.len() == d + ds - 2,
        format!("witness of size {} (shattered: {independent})", w.indices.len()),
    )?;
    Ok((d, ds, da))
}

fn criterion4() -> Outcome {
    let mut constructed = Vec::new();
    let t = construct_theorem1(2).map_err(|e| e.to_string())?;
    constructed.push(sandwich(&t.h, &t.phi)?);
    for (d, ds) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let l = construct_lemma1_tight(d, ds).map_err(|e| e.to_string())?;
        let n = l.j.domain().size();
        let phi = HypothesisClass::from_patterns(
            Arc::new(FiniteDomain::privileged(n).unwrap()),
            l.j.members().iter().map(|m| m.bits().clone()),
        )
        .unwrap();
        constructed.push(sandwich(&l.h, &phi)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5a4d);
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < 500 {
        attempts += 1;
        let n = rng.gen_range(3..=5);
        let ns = rng.gen_range(3..=5);
        let h = random_class(&mut rng, "X", n, 14);
        let phi = random_class(&mut rng, "X*", ns, 14);
        let d = exact_vc(&h).unwrap().vc;
        let ds = exact_vc(&phi).unwrap().vc;
        if !(2..=3).contains(&d) || !(2..=3).contains(&ds) {
            continue;
        }
        sandwich(&h, &phi)?;
        accepted += 1;
    }
    Ok(format!(
        "constructed (d,d*,d_a) = {constructed:?}; 500 random pairs ({attempts} drawn): 0 violations, all witnesses shattered"
    ))
}

fn criterion5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe5a);
    let mut mismatches = 0;
    let mut lemma4 = 0;
    for i in 0..10_000 {
        let n = rng.gen_range(1..=6);
        let ns = rng.gen_range(1..=6);
        let h = random_class(&mut rng, "X", n, 64);
        let phi = random_class(&mut rng, "X*", ns, 64);
        assert!(h.len() * phi.len() <= 4096);
        let m = rng.gen_range(0..=20);
        let s: TripleSample = (0..m)
            .map(|_| Triple::new(rng.gen_range(0..n), rng.gen_range(0..ns), rng.gen()))
            .collect();
        let c = if i % 2 == 0 { 1.0 } else { 2.0 };
        let r = erm_privileged(&h, &phi, &s, c).unwrap();
        // Oracle: direct evaluation of (1/C)·ℓ* + max(ℓ − ℓ*, 0) over every pair.
        let mut best = f64::INFINITY;
        for hh in h.members() {
            for pp in phi.members() {
                let total: f64 = s
                    .iter()
                    .map(|t| {
                        let l = f64::from(u8::from(hh.at(t.x) != t.y));
                        let ls = f64::from(u8::from(pp.at(t.xstar)));
                        ls / c + (l - ls).max(0.0)
                    })
                    .sum();
                best = best.min(total);
            }
        }
        if (r.objective_sum - best).abs() > 1e-9 {
            mismatches += 1;
        }
        let std = erm_standard(&h, &s).unwrap();
        if std.empirical_error > r.ignored_weight + r.unexplained_error + 1e-12 {
            lemma4 += 1;
        }
    }
    check(
        mismatches == 0 && lemma4 == 0,
        format!("{mismatches} oracle mismatches, {lemma4} Lemma-4 violations"),
    )?;
    Ok("10^4 random instances, C∈{1,2}: objective matches pair oracle; ε̂_ERM ≤ ε̂_ig + ε̂_u everywhere".into())
}

fn table(entries: &[(usize, usize, u8, f64)]) -> FiniteDistribution {
    FiniteDistribution::new(entries.iter().map(|&(x, xs, y, p)| (Triple::new(x, xs, y == 1), p)).collect()).unwrap()
}

fn comparison_configs() -> Vec<(&'static str, ExperimentConfig)> {
    let base = |distribution, classes| ExperimentConfig {
        distribution,
        classes,
        m: 60,
        trials: 2000,
        delta: 0.05,
        seed: 20240611,
        c: 1.0,
        log_base: LogBase::Natural,
        pair_budget: priverm::erm::DEFAULT_PAIR_BUDGET,
        node_limit: None,
        output_dir: None,
    };
    let thresholds = |n: usize| (0..=n).map(|k| "0".repeat(k) + &"1".repeat(n - k)).collect::<Vec<_>>();
    vec![
        (
            "full classes, label noise",
            base(
                DistributionSpec::Table(table(&[(0, 0, 0, 0.3), (0, 1, 1, 0.1), (1, 0, 1, 0.35), (1, 1, 0, 0.05), (2, 1, 1, 0.2)])),
                ClassesSpec::Full { x_size: 3, xstar_size: 2 },
            ),
        ),
        (
            "product construction d=1",
            base(
                DistributionSpec::Table(table(&[(0, 0, 0, 0.25), (1, 1, 1, 0.25), (2, 2, 0, 0.2), (0, 2, 1, 0.15), (2, 0, 1, 0.15)])),
                ClassesSpec::Theorem1 { d: 1 },
            ),
        ),
        (
            "thresholds, privileged noise flags",
            base(
                DistributionSpec::Table(table(&[
                        (0, 0, 0, 0.2),
                        (1, 0, 0, 0.15),
                        (2, 1, 1, 0.2),
                        (3, 1, 1, 0.2),
                        (1, 2, 1, 0.15),
                        (3, 2, 0, 0.1),
                    ])),
                ClassesSpec::Explicit {
                    h: priverm::io::ClassFile { domain_size: 4, hypotheses: thresholds(4) },
                    phi: priverm::io::ClassFile { domain_size: 3, hypotheses: thresholds(3) },
                },
            ),
        ),
    ]
}

fn criterion6() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    for (name, cfg) in comparison_configs() {
        let run = run_comparison(&cfg, None).map_err(|e| e.to_string())?;
        let s = &run.summary;
        let erm_floor = 0.95 - 3.0 * s.coverage_erm_se;
        let pr_floor = 0.90 - 3.0 * s.coverage_pr_se;
        check(
            s.effective_trials == 2000 && s.coverage_erm >= erm_floor && s.coverage_pr >= pr_floor,
            format!(
                "{name}: coverage ERM {:.4} (floor {erm_floor:.4}), PR {:.4} (floor {pr_floor:.4}), {} effective trials",
                s.coverage_erm, s.coverage_pr, s.effective_trials
            ),
        )?;
        check(
            s.lemma4_violations == 0 && s.decomposition_violations == 0,
            format!("{name}: per-trial invariant violations"),
        )?;
        notes.push(format!(
            "{name} (d={},d*={},d_a={}): ERM {:.4}, PR {:.4}",
            s.dims.d, s.dims.dstar, s.dims.d_a, s.coverage_erm, s.coverage_pr
        ));
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(600), format!("took {elapsed:?}"))?;
    Ok(format!("{} [{elapsed:.2?}]", notes.join("; ")))
}

fn random_inputs(rng: &mut ChaCha8Rng) -> BoundInputs {
    let d = rng.gen_range(1..=60);
    let dstar = rng.gen_range(1..=60);
    let (lo, _) = d_a_interval(d, dstar);
    BoundInputs {
        m: 10f64.powf(rng.gen_range(0.0..7.0)).round().max(1.0) as u64,
        delta: rng.gen_range(1e-4..0.999),
        d,
        dstar,
        d_a: lo + rng.gen_range(0..=40),
        eps_erm: 0.0,
        eps_ig: 0.0,
        eps_u: 0.0,
        log_base: LogBase::Natural,
    }
}

fn criterion7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e57);
    let (mut suff_true, mut suff_viol) = (0, 0);
    let (mut nec_applicable, mut nec_viol) = (0, 0);
    for _ in 0..100_000 {
        // (a): premise ε_ERM = ε_ig + ε_u.
        let mut b = random_inputs(&mut rng);
        b.eps_erm = rng.gen_range(0.0..=1.0);
        b.eps_ig = b.eps_erm * rng.gen_range(0.0..=1.0);
        b.eps_u = b.eps_erm - b.eps_ig;
        let r = sufficient_condition(&b).map_err(|e| e.to_string())?;
        if r.holds {
            suff_true += 1;
            if r.b_pr > r.b_erm {
                suff_viol += 1;
            }
        }
        // (b): ε_ERM ≤ ε_ig + ε_u, d_a ≥ d + d* − 2.
        let mut b = random_inputs(&mut rng);
        b.eps_erm = rng.gen_range(0.0..=1.0);
        let total = if rng.gen_bool(0.5) { b.eps_erm } else { (b.eps_erm + rng.gen_range(0.0..0.05)).min(1.0) };
        b.eps_ig = total * rng.gen_range(0.0..=1.0);
        b.eps_u = (total - b.eps_ig).max(0.0);
        let r = necessary_condition(&b).map_err(|e| e.to_string())?;
        if r.pr_leq_erm && r.lemma4_consistent && r.d_a_consistent {
            nec_applicable += 1;
            if !r.inequality_holds {
                nec_viol += 1;
            }
        }
    }
    let root = alpha_threshold();
    check(suff_viol == 0, format!("(a) {suff_viol} of {suff_true} sufficient cases had B_PR > B_ERM"))?;
    check(nec_viol == 0, format!("(b) {nec_viol} of {nec_applicable} applicable cases broke the inequality"))?;
    check(
        (2.246..=2.248).contains(&root) && alpha_cubic(root).abs() <= 1e-8 && ASYMPTOTIC_ALPHA > root,
        format!("alpha root {root}, residual {:e}", alpha_cubic(root)),
    )?;
    check(suff_true > 0 && nec_applicable > 0, "sweeps exercised no applicable case".into())?;
    Ok(format!(
        "(a) {suff_true} sufficient cases, 0 violations; (b) {nec_applicable} applicable cases, 0 violations; \
         α root {root:.9} < 2.25, |f(root)| = {:.1e}",
        alpha_cubic(root).abs()
    ))
}

/// Exact probability that the empirical-minimizing φ̂ deviates by more than
/// `eps`, for consecutive pairs `(2i, 2i+1)` of a full class: per pair φ̂
/// labels the point with the smaller count, the later point on ties.
fn exact_deviation_probability(m: usize, dstar: usize, eps: f64, delta: f64, heavy_side: &[bool]) -> f64 {
    let pairs = dstar / 2;
    let alpha = theorem5_alpha(eps, delta);
    let (hm, lm) = ((1.0 + alpha) / dstar as f64, (1.0 - alpha) / dstar as f64);
    let (ph, pl) = ((1.0 + alpha) / 2.0, (1.0 - alpha) / 2.0);
    let mut fact = vec![1.0f64; m + 1];
    for i in 1..=m {
        fact[i] = fact[i - 1] * i as f64;
    }
    let binom = |n: usize, k: usize| fact[n] / (fact[k] * fact[n - k]);
    // State: (points used, heavy points chosen, chosen count) -> weight.
    let mut states: std::collections::HashMap<(usize, usize, usize), f64> = [((0, 0, 0), 1.0)].into();
    for &heavy_later in heavy_side.iter().take(pairs) {
        let mut next = std::collections::HashMap::new();
        for (&(used, k, c), &w) in &states {
            for n in 0..=m - used {
                let wn = w * (1.0 / pairs as f64).powi(n as i32) / fact[n];
                for nh in 0..=n {
                    let nl = n - nh;
                    let p = wn * binom(n, nh) * ph.powi(nh as i32) * pl.powi(nl as i32);
                    let tie_picks_heavy = heavy_later;
                    let key = if nh < nl || (nh == nl && tie_picks_heavy) {
                        (used + n, k + 1, c + nh)
                    } else {
                        (used + n, k, c + nl)
                    };
                    *next.entry(key).or_insert(0.0) += p;
                }
            }
        }
        states = next;
    }
    states
        .into_iter()
        .filter(|&((used, _, _), _)| used == m)
        .filter(|&((_, k, c), _)| k as f64 * hm + (pairs - k) as f64 * lm - c as f64 / m as f64 > eps)
        .map(|(_, w)| w * fact[m])
        .sum()
}

fn criterion8() -> Outcome {
    let (dstar, eps, delta, m, trials) = (8usize, 0.1, 0.005, 50usize, 10_000usize);
    let phi = class_from_codes("X*", dstar, 0..1u32 << dstar);
    let (fam, dist) = construct_theorem5_family(&phi, eps, delta, None).map_err(|e| e.to_string())?;
    let alpha = 8.0 * eps / (1.0 - 8.0 * delta);
    check((fam.alpha - alpha).abs() <= 1e-12, format!("alpha {} vs {alpha}", fam.alpha))?;
    let p_star = dist.probability(|t| fam.phi_star.at(t.xstar));
    check(
        (p_star - (1.0 - alpha) / 2.0).abs() <= 1e-12,
        format!("P[φ*=1] = {p_star}, expected {}", (1.0 - alpha) / 2.0),
    )?;
    let report = adversarial_theorem5(&phi, eps, delta, m, trials, 0x5eed, Candidates::PhiPrime, None)
        .map_err(|e| e.to_string())?;
    let worst = &report.choices[report.worst];
    let exact_worst = report
        .choices
        .iter()
        .map(|r| exact_deviation_probability(m, dstar, eps, delta, &r.heavy_side))
        .fold(0.0, f64::max);
    let exact_for_worst = exact_deviation_probability(m, dstar, eps, delta, &worst.heavy_side);
    let sup_rate = report.choices.iter().map(|r| r.exceed_rate_sup).fold(0.0, f64::max);
    let details = format!(
        "α={alpha:.6}, P[φ*=1]=(1−α)/2 ok; worst heavy side {:?}: φ̂ deviation > ε in {:.4} of {trials} trials \
         (exact {exact_for_worst:.5}; max exact over all heavy sides {exact_worst:.5}), need > δ={delta}; sup over Φ′ exceeds ε in {sup_rate:.4}; \
         m={m} vs sample limit (d*−1)/(1280ε²) = {:.3}: {}",
        worst.heavy_side, report.worst_exceed_rate, worst.sample_limit, worst.note
    );
    check(report.exceeds_delta, details.clone())?;
    Ok(details)
}

fn criterion9() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (_, mut cfg) = comparison_configs().swap_remove(0);
    cfg.trials = 300;
    let run = run_comparison(&cfg, Some(1)).map_err(|e| e.to_string())?;
    let original = tmp.path().join("original");
    persist_run(&run, &cfg, &original).map_err(|e| e.to_string())?;
    let base = std::fs::read(original.join("trials.csv")).map_err(|e| e.to_string())?;
    for threads in [1usize, 4] {
        let out = tmp.path().join(format!("rerun-{threads}"));
        rerun_from_manifest(&original, &out, Some(threads)).map_err(|e| e.to_string())?;
        let again = std::fs::read(out.join("trials.csv")).map_err(|e| e.to_string())?;
        check(again == base, format!("trials.csv differs with {threads} threads"))?;
    }
    Ok(format!("{} trials, reruns from manifest with 1 and 4 threads are byte-identical", cfg.trials))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("product classes: exact VC of H, Φ, F", criterion1),
        ("union VC: tight pairs and upper bound", criterion2),
        ("k-fold union VC bound", criterion3),
        ("auxiliary VC sandwich and witness", criterion4),
        ("privileged ERM vs pair oracle, Lemma 4", criterion5),
        ("Monte Carlo bound coverage", criterion6),
        ("condition checkers and α threshold", criterion7),
        ("deviation experiment on paired family", criterion8),
        ("determinism across thread counts", criterion9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        match outcome {
            Ok(details) => println!("PASS criterion {id} ({name}) [{elapsed:.2?}]: {details}"),
            Err(details) => {
                failed += 1;
                println!("FAIL criterion {id} ({name}) [{elapsed:.2?}]: {details}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
