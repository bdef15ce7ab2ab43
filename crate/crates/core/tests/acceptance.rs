//! Exit criteria for the bundled five-supplier case. Prints one line per
//! criterion, detail lines under it, and exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use supplier_dss::dataset::Dataset;
use supplier_dss::fixtures::{self, SUPPLIERS};
use supplier_dss::fuzzy::{LinguisticScale, Tfn};
use supplier_dss::goal::{self, AllocationOptions, LeadDenominator, LeadMode, McgpModel};
use supplier_dss::granular::{ReliabilityConfig, ReliabilityMode};
use supplier_dss::lp::{self, LinearProgram, LpStatus, Relation};
use supplier_dss::pipeline::{self, Artifacts, CellSource};
use supplier_dss::qualitative::{aggregate_dms, build_weight_tfn};
use supplier_dss::synth;
use supplier_dss::temporal::{induce_tfn, Bins, InductionConfig, TimeSeries, TriangleFit};
use supplier_dss::topsis::{
    self, Attribute, DecisionMatrix, DistanceVariant, EvidenceKind, Group, GroupFilter, Objective, ScriInputs,
};

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>, details: Vec<String>) -> Self {
        Outcome {
            pass,
            summary: summary.into(),
            details,
        }
    }
}

fn case() -> Dataset {
    fixtures::paper_case()
}

fn run(ds: &Dataset) -> Artifacts {
    Artifacts::compute(ds).expect("bundled case runs")
}

fn with_variant(v: DistanceVariant) -> Dataset {
    let mut ds = case();
    ds.manifest.config.distance_variant = v;
    ds
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("({})", parts.join(", "))
}

fn a1() -> Outcome {
    // Weight scale written out again so the oracle does not share the library's table.
    let scale = |t: &str| -> [f64; 3] {
        match t {
            "VUI" => [0.0, 0.1, 0.2],
            "UI" => [0.1, 0.2, 0.3],
            "M" => [0.3, 0.4, 0.5],
            "MI" => [0.4, 0.5, 0.6],
            "I" => [0.5, 0.6, 0.7],
            "VI" => [0.6, 0.7, 0.8],
            "EI" => [0.8, 0.9, 1.0],
            other => panic!("term {other}"),
        }
    };
    let ds = case();
    let lib_scale = LinguisticScale::weight();
    let mut bad = Vec::new();
    for (j, expected) in fixtures::WEIGHTS.iter().enumerate() {
        let attr = format!("C{}", j + 1);
        let terms: Vec<[f64; 3]> = ds
            .weights
            .iter()
            .filter(|w| w.attribute == attr)
            .map(|w| scale(&w.term))
            .collect();
        let oracle = [
            terms.iter().map(|t| t[0]).fold(f64::INFINITY, f64::min),
            terms.iter().map(|t| t[1]).sum::<f64>() / terms.len() as f64,
            terms.iter().map(|t| t[2]).fold(f64::NEG_INFINITY, f64::max),
        ];
        let got = build_weight_tfn(&attr, &ds.weights, ds.dms(), &lib_scale).expect("complete weights");
        let ok = (got.a() - expected[0]).abs() < 1e-9
            && (got.c() - expected[2]).abs() < 1e-9
            && (got.b() - expected[1]).abs() <= 0.005
            && got.max_abs_diff(&Tfn::new(oracle[0], oracle[1], oracle[2]).unwrap()) < 1e-12;
        if !ok {
            bad.push(format!("{attr}: got {got}, oracle {oracle:?}, published {expected:?}"));
        }
    }
    Outcome::new(bad.is_empty(), format!("19 weight rows, {} mismatches", bad.len()), bad)
}

fn a2() -> Outcome {
    let a = run(&case());
    let r = &a.ranking.all;
    let mut details = Vec::new();
    let mut pis_ok = true;
    for (j, (pis, w)) in r.pis.iter().zip(fixtures::WEIGHTS.iter()).enumerate() {
        if (pis.b() - w[2]).abs() > 0.005 {
            pis_ok = false;
            details.push(format!("PIS C{}: {} vs {}", j + 1, pis.b(), w[2]));
        }
    }
    let mut deviating = Vec::new();
    details.push("NIS per column (computed / published / delta):".into());
    for (j, (nis, published)) in r.nis.iter().zip(fixtures::NIS.iter()).enumerate() {
        let delta = nis.b() - published;
        let flag = if delta.abs() > 0.005 {
            deviating.push(format!("C{}", j + 1));
            "  <- differs"
        } else {
            ""
        };
        details.push(format!(
            "  C{:<2} {:.4} / {:.2} / {:+.4}{flag}",
            j + 1,
            nis.b(),
            published,
            delta
        ));
    }
    let c9 = (r.nis[8].b() - 0.01).abs() <= 0.005;
    details.push(format!(
        "discrepancy report: NIS columns off by more than 0.005: {}",
        deviating.join(" ")
    ));
    Outcome::new(
        pis_ok && c9,
        format!(
            "PIS 19/19 {}, C9 NIS {:.4}",
            if pis_ok { "match" } else { "MISMATCH" },
            r.nis[8].b()
        ),
        details,
    )
}

fn a3() -> Outcome {
    let t = Instant::now();
    let published: Vec<f64> = fixtures::RANKING.iter().map(|r| r[2]).collect();
    let mut details = Vec::new();
    let mut within_any = false;
    let mut best = (f64::INFINITY, DistanceVariant::Paper);
    let mut order_ok = true;
    for v in [DistanceVariant::Paper, DistanceVariant::PerAttribute] {
        let a = run(&with_variant(v));
        let r = &a.ranking.all;
        let cc = r.closeness();
        let worst = cc
            .iter()
            .zip(&published)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        let mean = cc.iter().zip(&published).map(|(x, y)| (x - y).abs()).sum::<f64>() / 5.0;
        within_any |= worst <= 0.05;
        if mean < best.0 {
            best = (mean, v);
        }
        let order = r.order();
        if v == DistanceVariant::Paper {
            order_ok = order == ["S3", "S2", "S1", "S4", "S5"];
        }
        let d: Vec<String> = r
            .scores
            .iter()
            .map(|s| format!("{} d+={:.3} d-={:.3}", s.supplier, s.d_plus, s.d_minus))
            .collect();
        details.push(format!(
            "{v}: closeness {} order {} max|delta| {worst:.4} mean|delta| {mean:.4}",
            fmt_vec(&cc),
            order.join(">")
        ));
        details.push(format!("  {}", d.join(", ")));
    }
    details.push(format!("closer variant: {}", best.1));
    let fast = t.elapsed() < Duration::from_secs(1);
    Outcome::new(
        order_ok && within_any && fast,
        format!(
            "order S3>S2>S1>S4>S5 {}, closeness within 0.05: {within_any}, closer: {}",
            if order_ok { "ok" } else { "WRONG" },
            best.1
        ),
        details,
    )
}

fn a4() -> Outcome {
    let a = run(&case());
    let res = a.ranking.resilience.as_ref().expect("resilience group").normalized();
    let cost = a.ranking.cost.as_ref().expect("cost group").normalized();
    let close = |x: &[f64], y: &[f64]| x.iter().zip(y).all(|(a, b)| (a - b).abs() <= 0.01);
    let res_ok = close(&res, &fixtures::RESILIENCE_NORMALIZED);
    let cost_ok = close(&cost, &fixtures::COST_NORMALIZED);
    let inputs = ScriInputs::from_rankings(a.ranking.resilience.as_ref().unwrap(), a.ranking.cost.as_ref().unwrap())
        .expect("matching suppliers");
    let mut grid_ok = true;
    let mut argmax_ok = true;
    let mut details = vec![
        format!(
            "resilience {} vs {}",
            fmt_vec(&res),
            fmt_vec(&fixtures::RESILIENCE_NORMALIZED)
        ),
        format!(
            "cost       {} vs {}",
            fmt_vec(&cost),
            fmt_vec(&fixtures::COST_NORMALIZED)
        ),
    ];
    for k in 0..9 {
        let alpha = (k + 1) as f64 / 10.0;
        let values = inputs.scri(alpha).unwrap();
        let worst = (0..5)
            .map(|i| (values[i] - fixtures::SCRI[i][k]).abs())
            .fold(0.0, f64::max);
        grid_ok &= worst <= 0.01;
        let leader = SUPPLIERS[topsis::argmax(&values)];
        let expected = fixtures::SCRI_ARGMAX[k];
        let hit = expected.is_none_or(|e| e == leader);
        argmax_ok &= hit;
        details.push(format!(
            "alpha {alpha:.1}: {} leader {leader}{}{}",
            fmt_vec(&values),
            expected.map(|e| format!(" (expected {e})")).unwrap_or_default(),
            if hit { "" } else { "  <- MISS" }
        ));
    }
    Outcome::new(
        res_ok && cost_ok && grid_ok && argmax_ok,
        format!("resilience {res_ok}, cost {cost_ok}, 45-point grid {grid_ok}, argmax {argmax_ok}"),
        details,
    )
}

fn raw_case(m: usize) -> Artifacts {
    let mut ds = case();
    ds.manifest.config.from_raw = true;
    ds.manifest.config.frame_classes = m;
    run(&ds)
}

fn granular_residuals(a: &Artifacts) -> Vec<(String, String, [f64; 3])> {
    let mut out = Vec::new();
    for (i, s) in SUPPLIERS.iter().enumerate() {
        for (k, attr) in ["C3", "C4"].iter().enumerate() {
            let cell = a
                .evidence
                .cells
                .iter()
                .find(|c| c.supplier == *s && c.attribute == *attr && c.source == CellSource::Granular)
                .expect("granular cell");
            let p = fixtures::GRANULAR_TFNS[i][k];
            out.push((
                s.to_string(),
                attr.to_string(),
                [cell.tfn.a() - p[0], cell.tfn.b() - p[1], cell.tfn.c() - p[2]],
            ));
        }
    }
    out
}

fn a5() -> Outcome {
    let a = raw_case(7);
    let mut details = Vec::new();
    let frames: Vec<String> = a
        .evidence
        .granular
        .iter()
        .map(|g| format!("{} frame [{}, {}]", g.attribute, g.frame.lo(), g.frame.hi()))
        .collect();
    details.push(frames.join(", "));
    let mut width_ok = true;
    for g in &a.evidence.granular {
        let bound = 2.0 * g.frame.span() / 7.0 + 1e-9;
        for c in &g.cells {
            width_ok &= c.extraction.tfn.width() <= bound;
        }
    }
    let residuals = granular_residuals(&a);
    let mut all_within = true;
    let mut c3_within = true;
    for (s, attr, r) in &residuals {
        let ok = r.iter().all(|d| d.abs() <= 2.0);
        all_within &= ok;
        if attr == "C3" {
            c3_within &= ok;
        }
        details.push(format!(
            "  {s} {attr} residual ({:+.2}, {:+.2}, {:+.2}){}",
            r[0],
            r[1],
            r[2],
            if ok { "" } else { "  <- outside 2.0" }
        ));
    }
    let mut fallback = String::new();
    if !all_within {
        details.push("class-count sweep (max |residual| per attribute):".into());
        let mut best = (f64::INFINITY, 0);
        for m in [5, 7, 9] {
            let res = granular_residuals(&raw_case(m));
            let worst = |attr: &str| {
                res.iter()
                    .filter(|(_, a, _)| a == attr)
                    .flat_map(|(_, _, r)| r.iter().map(|d| d.abs()))
                    .fold(0.0, f64::max)
            };
            let rms = (res.iter().flat_map(|(_, _, r)| r.iter().map(|d| d * d)).sum::<f64>() / 30.0).sqrt();
            if rms < best.0 {
                best = (rms, m);
            }
            details.push(format!(
                "  m={m}: C3 {:.2}, C4 {:.2}, rms {rms:.2}",
                worst("C3"),
                worst("C4")
            ));
        }
        fallback = format!(", sweep best m={} (rms {:.2})", best.1, best.0);
    }
    Outcome::new(
        width_ok,
        format!(
            "C3 within 2.0: {c3_within}, all 10 within 2.0: {all_within}{fallback}, width bound {}",
            if width_ok { "holds" } else { "VIOLATED" }
        ),
        details,
    )
}

fn a6() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for mode in [ReliabilityMode::MidpointMean, ReliabilityMode::SeededUniform] {
        for seed in 0..5u64 {
            let mut on = case();
            on.manifest.config.from_raw = true;
            on.manifest.config.reliability = ReliabilityConfig {
                enabled: true,
                mode,
                samples: 8,
                seed,
            };
            let mut off = on.clone();
            off.manifest.config.reliability.enabled = false;
            let x = pipeline::run_evidence(&on).unwrap();
            let y = pipeline::run_evidence(&off).unwrap();
            for (gx, gy) in x.granular.iter().zip(&y.granular) {
                assert!(gx
                    .reliability
                    .as_ref()
                    .is_some_and(|r| r.normalized > 0.0 && r.normalized <= 1.0));
                for (cx, cy) in gx.cells.iter().zip(&gy.cells) {
                    worst = worst.max(cx.extraction.tfn.max_abs_diff(&cy.extraction.tfn));
                }
            }
            runs += 1;
        }
    }
    Outcome::new(
        worst < 1e-12,
        format!("{runs} runs, largest component difference {worst:.2e}"),
        vec![],
    )
}

/// Penalty of a plan on the bundled goal program, written out long-hand.
fn penalty_oracle(model: &McgpModel, x: &[f64]) -> (f64, f64) {
    let g = &model.goals;
    let coeff: Vec<f64> = model.suppliers.iter().map(|s| s.coeff.unwrap()).collect();
    let tvp: f64 = x.iter().zip(&coeff).map(|(a, b)| a * b).sum();
    let spend: f64 = x.iter().zip(&model.suppliers).map(|(a, s)| a * s.unit_cost).sum();
    let total: f64 = x.iter().sum();
    let lead = x
        .iter()
        .zip(&model.suppliers)
        .map(|(a, s)| a * s.lead_time)
        .sum::<f64>()
        / total;
    // min over y in [lo, hi] of |v - y| + |y - anchor|, by dense scan plus breakpoints
    let level = |v: f64, lo: f64, hi: f64, anchor: f64| {
        let mut ys: Vec<f64> = (0..=20_000).map(|k| lo + (hi - lo) * k as f64 / 20_000.0).collect();
        ys.extend([v.clamp(lo, hi), anchor.clamp(lo, hi)]);
        ys.into_iter()
            .map(|y| (v - y).abs() + (y - anchor).abs())
            .fold(f64::INFINITY, f64::min)
    };
    let p = (g.tvp_floor - tvp).max(0.0)
        + level(spend, g.budget.min, g.budget.max, g.budget.anchor)
        + level(lead, g.lead.min, g.lead.max, g.lead.anchor)
        + (total - g.quantity).max(0.0);
    (p, spend)
}

/// Minimum of `c.x` over `{A x <= b, lo <= x <= hi}` by visiting every vertex.
fn vertex_min(c: &[f64], rows: &[(Vec<f64>, f64)], hi: &[f64]) -> Option<f64> {
    let n = c.len();
    // every inequality as (g, h) meaning g.x <= h
    let mut ineq: Vec<(Vec<f64>, f64)> = rows.to_vec();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = -1.0;
        ineq.push((e.clone(), 0.0));
        e[j] = 1.0;
        ineq.push((e, hi[j]));
    }
    let mut best: Option<f64> = None;
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let mut a: Vec<Vec<f64>> = pick.iter().map(|&k| ineq[k].0.clone()).collect();
        let mut b: Vec<f64> = pick.iter().map(|&k| ineq[k].1).collect();
        if let Some(x) = gauss(&mut a, &mut b) {
            if ineq
                .iter()
                .all(|(g, h)| g.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= h + 1e-9)
            {
                let v: f64 = c.iter().zip(&x).map(|(p, q)| p * q).sum();
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] < ineq.len() - n + i {
                pick[i] += 1;
                for k in i + 1..n {
                    pick[k] = pick[k - 1] + 1;
                }
                break;
            }
        }
    }
}

fn gauss(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= f * p;
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn a7() -> Outcome {
    let t = Instant::now();
    let mut details = Vec::new();
    let model = case().mcgp.expect("bundled goal program");
    let eval = goal::evaluate_plan(&model, &fixtures::PLAN, LeadDenominator::Actual).unwrap();
    let (oracle, spend) = penalty_oracle(&model, &fixtures::PLAN);
    let part_a = (eval.objective - 39.22).abs() <= 0.05 && spend == 300_000.0 && (oracle - eval.objective).abs() < 1e-9;
    details.push(format!(
        "(a) reference plan penalty {:.5} (long-hand {oracle:.5}), spend {spend}",
        eval.objective
    ));

    let plan = goal::solve_allocation(&model, &AllocationOptions::default()).unwrap();
    let part_b = plan.objective <= eval.objective + 1e-9;
    details.push(format!(
        "(b) solver plan {} objective {:.5}, duality gap {:.1e}",
        fmt_vec(&plan.quantities),
        plan.objective,
        plan.duality_gap
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut agree = 0;
    for _ in 0..50 {
        let n = rng.random_range(2..=6);
        let m = rng.random_range(1..=4);
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let hi: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..10.0)).collect();
        let mut lp = LinearProgram::new();
        let vars: Vec<usize> = (0..n).map(|j| lp.add_variable(format!("x{j}"), 0.0, hi[j])).collect();
        for (j, &v) in vars.iter().enumerate() {
            lp.set_cost(v, c[j]);
        }
        let mut rows = Vec::new();
        for _ in 0..m {
            let g: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let h = rng.random_range(-2.0..8.0);
            let ge = rng.random_bool(0.3);
            if ge {
                // g.x >= -h  <=>  -g.x <= h
                lp.add_constraint(vars.iter().zip(&g).map(|(&v, a)| (v, *a)).collect(), Relation::Ge, -h);
                rows.push((g.iter().map(|a| -a).collect(), h));
            } else {
                lp.add_constraint(vars.iter().zip(&g).map(|(&v, a)| (v, *a)).collect(), Relation::Le, h);
                rows.push((g, h));
            }
        }
        let sol = lp::solve(&lp).unwrap();
        match (vertex_min(&c, &rows, &hi), sol.status) {
            (Some(v), LpStatus::Optimal) => {
                worst = worst.max((v - sol.objective).abs());
                if (v - sol.objective).abs() <= 1e-6 {
                    agree += 1;
                }
            }
            (None, LpStatus::Infeasible) => agree += 1,
            (v, s) => details.push(format!("    LP disagreement: vertices {v:?}, solver {s:?}")),
        }
    }
    let part_c = agree == 50;
    details.push(format!(
        "(c) {agree}/50 random LPs match vertex enumeration, worst gap {worst:.1e}"
    ));

    let mut worst_comp: f64 = plan.deviations.max_complementarity();
    for mode in [LeadMode::FixedTotal, LeadMode::Iterative] {
        let tvps = goal::parse_sweep("160:280:10").unwrap();
        let options = AllocationOptions {
            mode,
            integerize: false,
        };
        for p in goal::tvp_sweep(&model, &tvps, &options).unwrap() {
            worst_comp = worst_comp.max(p.plan.deviations.max_complementarity());
        }
    }
    let part_d = worst_comp <= 1e-9;
    details.push(format!("(d) largest d+ * d- over 27 optima {worst_comp:.1e}"));
    let elapsed = t.elapsed();
    Outcome::new(
        part_a && part_b && part_c && part_d && elapsed < Duration::from_secs(5),
        format!("(a) {part_a} (b) {part_b} (c) {part_c} (d) {part_d}, {elapsed:.2?}"),
        details,
    )
}

fn a8() -> Outcome {
    let mut details = Vec::new();
    let mut ok = 0;
    let mut equivariant = true;
    for k in 0..20 {
        let p = fixtures::TEMPORAL_TFNS[k % 5][(k / 5) % 2];
        let truth = Tfn::new(p[0], p[1], p[2]).unwrap();
        let xs = synth::triangular_series(truth, 500, &mut synth::rng(1000 + k as u64));
        let series = TimeSeries::new(xs).unwrap();
        let got = induce_tfn(&series, &InductionConfig::default()).unwrap().tfn;
        let extremes = got.a() == series.min() && got.c() == series.max();
        let mode_ok = (got.b() - truth.b()).abs() <= (got.c() - got.a()) / 10.0;
        if extremes && mode_ok {
            ok += 1;
        } else {
            details.push(format!("  series {k}: truth {truth}, induced {got}"));
        }
        let fixed = InductionConfig {
            bins: Bins::Fixed(16),
            fit: TriangleFit::default(),
        };
        let (s, shift) = (2.5, -37.0);
        let base = induce_tfn(&series, &fixed).unwrap().tfn;
        let moved = induce_tfn(&series.map(|v| s * v + shift), &fixed).unwrap().tfn;
        let expect = [s * base.a() + shift, s * base.b() + shift, s * base.c() + shift];
        let diff = [moved.a() - expect[0], moved.b() - expect[1], moved.c() - expect[2]]
            .iter()
            .fold(0.0_f64, |m, d| m.max(d.abs()));
        if diff > 1e-9 {
            equivariant = false;
            details.push(format!("  series {k}: shift/scale drift {diff:.2e}"));
        }
    }
    Outcome::new(
        ok == 20 && equivariant,
        format!("{ok}/20 series recover extremes and peak, equivariance {equivariant}"),
        details,
    )
}

fn random_matrix(rng: &mut ChaCha8Rng) -> DecisionMatrix {
    let n_sup = rng.random_range(2..=6);
    let n_att = rng.random_range(2..=5);
    let perf = LinguisticScale::performance();
    let weight = LinguisticScale::weight();
    let attrs: Vec<Attribute> = (0..n_att)
        .map(|j| Attribute {
            id: format!("C{j}"),
            name: format!("attribute {j}"),
            evidence_kind: EvidenceKind::Linguistic,
            objective: if rng.random_bool(0.3) {
                Objective::Min
            } else {
                Objective::Max
            },
            group: if j == 0 || rng.random_bool(0.3) {
                Group::Cost
            } else {
                Group::Resilience
            },
        })
        .collect();
    let cells = (0..n_sup)
        .map(|_| {
            (0..n_att)
                .map(|_| {
                    let dms = rng.random_range(1..=5);
                    let terms: Vec<Tfn> = (0..dms).map(|_| perf.entries()[rng.random_range(1..9)].1).collect();
                    aggregate_dms(&terms).unwrap()
                })
                .collect()
        })
        .collect();
    let weights = (0..n_att).map(|_| weight.entries()[rng.random_range(0..7)].1).collect();
    DecisionMatrix::new((0..n_sup).map(|i| format!("S{i}")).collect(), attrs, cells, weights).unwrap()
}

fn a9() -> Outcome {
    let perf = LinguisticScale::performance();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut violations: Vec<String> = Vec::new();
    let note = |v: &mut Vec<String>, what: String| {
        if v.len() < 10 {
            v.push(what);
        } else if v.len() == 10 {
            v.push("...".into());
        }
    };
    let mut checks = 0usize;
    let mut anchor_moves = 0usize;
    for grid in 0..1000 {
        // qualitative invariants on one random cell
        let dms = rng.random_range(1..=7);
        let idx: Vec<usize> = (0..dms).map(|_| rng.random_range(0..9)).collect();
        let tfns: Vec<Tfn> = idx.iter().map(|&i| perf.entries()[i].1).collect();
        let agg = aggregate_dms(&tfns).unwrap();
        let lo_b = tfns.iter().map(|t| t.b()).fold(f64::INFINITY, f64::min);
        let hi_b = tfns.iter().map(|t| t.b()).fold(f64::NEG_INFINITY, f64::max);
        if tfns.iter().any(|t| agg.a() > t.a() || agg.c() < t.c()) || agg.b() < lo_b - 1e-12 || agg.b() > hi_b + 1e-12 {
            note(&mut violations, format!("grid {grid}: dominance"));
        }
        let unanimous = aggregate_dms(&vec![tfns[0]; dms]).unwrap();
        if unanimous.max_abs_diff(&tfns[0]) > 1e-12 {
            note(&mut violations, format!("grid {grid}: idempotence"));
        }
        let mut shuffled = tfns.clone();
        shuffled.reverse();
        shuffled.rotate_left(grid % dms);
        if aggregate_dms(&shuffled).unwrap().max_abs_diff(&agg) > 1e-12 {
            note(&mut violations, format!("grid {grid}: permutation"));
        }
        let k = rng.random_range(0..dms);
        if idx[k] < 8 {
            let mut raised = tfns.clone();
            raised[k] = perf.entries()[idx[k] + 1].1;
            let up = aggregate_dms(&raised).unwrap();
            if up.a() < agg.a() || up.b() < agg.b() || up.c() < agg.c() {
                note(&mut violations, format!("grid {grid}: monotonicity"));
            }
        }
        checks += 4;

        // ranking invariants on a random matrix
        let m = random_matrix(&mut rng);
        let variant = if grid % 2 == 0 {
            DistanceVariant::Paper
        } else {
            DistanceVariant::PerAttribute
        };
        let weighted = topsis::apply_weights(&topsis::normalize(&m).unwrap()).unwrap();
        let ideal = topsis::ideal_solutions(&weighted);
        let base = topsis::closeness(&weighted, &ideal, variant);
        if base.scores.iter().any(|s| !(0.0..=1.0).contains(&s.closeness)) {
            note(&mut violations, format!("grid {grid}: closeness outside [0, 1]"));
        }
        for (j, w) in m.weights().iter().enumerate() {
            if (ideal.pis[j].b() - w.c()).abs() > 1e-12 {
                note(&mut violations, format!("grid {grid}: PIS identity C{j}"));
            }
        }
        let i = rng.random_range(0..m.suppliers().len());
        let (mut top, mut bottom) = (weighted.clone(), weighted.clone());
        for j in 0..m.attributes().len() {
            top.set_cell(i, j, ideal.pis[j]);
            bottom.set_cell(i, j, ideal.nis[j]);
        }
        let at_top = topsis::closeness(&top, &ideal, variant).scores[i].closeness;
        let at_bottom = topsis::closeness(&bottom, &ideal, variant).scores[i].closeness;
        if (at_top - 1.0).abs() > 1e-12 || at_bottom.abs() > 1e-12 {
            note(
                &mut violations,
                format!("grid {grid}: anchor rows give {at_top} / {at_bottom}"),
            );
        }
        // improve one benefit cell of supplier i
        if let Some(j) = (0..m.attributes().len()).find(|&j| m.attributes()[j].objective == Objective::Max) {
            let old = m.cell(i, j);
            let step = rng.random_range(0.0..1.5);
            let mut better = m.clone();
            better.set_cell(i, j, Tfn::new(old.a() + step, old.b() + step, old.c() + step).unwrap());
            let bw = topsis::apply_weights(&topsis::normalize(&better).unwrap()).unwrap();
            let bi = topsis::ideal_solutions(&bw);
            let after = topsis::closeness(&bw, &bi, variant);
            let col_max = |d: &DecisionMatrix| {
                (0..d.suppliers().len())
                    .map(|r| d.cell(r, j).c())
                    .fold(f64::MIN, f64::max)
            };
            let anchors_same = bi == ideal && col_max(&m) == col_max(&better);
            let dropped = after.scores[i].closeness < base.scores[i].closeness - 1e-12;
            if dropped && !anchors_same {
                anchor_moves += 1;
            }
            if anchors_same {
                if dropped {
                    note(
                        &mut violations,
                        format!("grid {grid}: improving S{i} lowered it ({variant})"),
                    );
                }
                for (k, (x, y)) in base.scores.iter().zip(&after.scores).enumerate() {
                    if k != i && y.closeness > x.closeness + 1e-12 {
                        note(&mut violations, format!("grid {grid}: improving S{i} raised S{k}"));
                    }
                }
            }
        }
        // risk index sums to one and alpha = 1 follows the resilience vector
        if let Ok(inputs) = ScriInputs::from_matrix(&m, variant) {
            for alpha in [0.0, 0.25, 0.5, 1.0] {
                let s: f64 = inputs.scri(alpha).unwrap().iter().sum();
                if (s - 1.0).abs() > 1e-12 {
                    note(&mut violations, format!("grid {grid}: index sums to {s}"));
                }
            }
            let r = topsis::rank(&m, GroupFilter::Resilience, variant).unwrap();
            if topsis::ranks_descending(&inputs.scri(1.0).unwrap()) != topsis::ranks_descending(&r.normalized()) {
                note(&mut violations, format!("grid {grid}: alpha = 1 ranking"));
            }
        }
        checks += 6;
    }
    Outcome::new(
        violations.is_empty(),
        format!(
            "1000 grids, {checks} checks, {} violations ({anchor_moves} self-drops with moved anchors, exempt)",
            violations.len()
        ),
        violations,
    )
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("A1", "weight aggregation", a1),
        ("A2", "ideal solutions", a2),
        ("A3", "ranking reproduction", a3),
        ("A4", "group rankings and risk index", a4),
        ("A5", "granular extraction", a5),
        ("A6", "reliability cancellation", a6),
        ("A7", "goal program", a7),
        ("A8", "temporal induction", a8),
        ("A9", "aggregation and ranking invariants", a9),
    ];
    let verbose = std::env::args().any(|a| a == "--verbose" || a == "-v");
    let mut failed = Vec::new();
    println!("\nacceptance criteria");
    for (id, name, check) in criteria {
        let t = Instant::now();
        let out = check();
        let status = if out.pass { "PASS" } else { "FAIL" };
        println!("{id} {status}  {name}: {} [{:.0?}]", out.summary, t.elapsed());
        if verbose || !out.pass || matches!(id, "A2" | "A3" | "A5") {
            for d in &out.details {
                println!("     {d}");
            }
        }
        if !out.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("all criteria pass\n");
        ExitCode::SUCCESS
    } else {
        println!("failing: {}\n", failed.join(", "));
        ExitCode::FAILURE
    }
}
